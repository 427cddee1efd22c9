//! Cyclic Jacobi eigendecomposition of Hermitian matrices and the unitary
//! exponentials built on it.

use super::{ComplexMatrix, HermitianOperator, PureState, UnitaryOperator, C64};

const MAX_SWEEPS: usize = 64;

/// Spectral decomposition `h = V diag(λ) V†` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct Eigendecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: UnitaryOperator,
}

impl Eigendecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &UnitaryOperator {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// V f(λ) V† for a complex-valued spectral function.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = self.eigenvectors.matrix();
        let n = self.dim();
        let weights: Vec<C64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, |j, k| {
            (0..n).map(|m| v[(j, m)] * weights[m] * v[(k, m)].conj()).sum()
        })
    }

    /// e^{−iht}
    pub fn exp_unitary(&self, t: f64) -> UnitaryOperator {
        if t == 0.0 {
            return UnitaryOperator::identity(self.dim());
        }
        UnitaryOperator::new_unchecked(self.map_spectrum(|l| C64::from_polar(1.0, -l * t)))
    }

    /// e^{−iht}ψ in O(n²), without forming the exponential.
    pub fn evolve(&self, psi: &PureState, t: f64) -> PureState {
        let v = self.eigenvectors.matrix();
        let n = self.dim();
        let amps = psi.amplitudes();
        let coeffs: Vec<C64> = (0..n)
            .map(|m| {
                let proj: C64 = (0..n).map(|j| v[(j, m)].conj() * amps[j]).sum();
                proj * C64::from_polar(1.0, -self.eigenvalues[m] * t)
            })
            .collect();
        let out = (0..n).map(|j| (0..n).map(|m| v[(j, m)] * coeffs[m]).sum()).collect();
        PureState::renormalized(out)
    }

    /// V diag(λ) V†
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| C64::new(l, 0.0))
    }
}

/// Eigendecomposition by cyclic complex Jacobi rotations.
pub fn hermitian_eigendecomposition(h: &HermitianOperator) -> Eigendecomposition {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off.sqrt() <= f64::EPSILON * 1e-2 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |j, k| v[(j, order[k])]);
    Eigendecomposition { eigenvalues, eigenvectors: UnitaryOperator::new_unchecked(vectors) }
}

/// Annihilates a[p][q] with G = diag(e^{iφ}, 1)·R(θ) acting on columns p, q.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau == 0.0 { 1.0 } else { tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let g_pp = phase * c;
    let g_pq = phase * s;
    let g_qp = C64::new(-s, 0.0);
    let g_qq = C64::new(c, 0.0);
    let n = a.dim();

    // A ← A G
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A ← G† A
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(app - t * b, 0.0);
    a[(q, q)] = C64::new(aqq + t * b, 0.0);

    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// e^{−iht}
pub fn expm_unitary(h: &HermitianOperator, t: f64) -> UnitaryOperator {
    if t == 0.0 {
        return UnitaryOperator::identity(h.dim());
    }
    hermitian_eigendecomposition(h).exp_unitary(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::*;
    use crate::sampling::{random_hermitian, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input() {
        let e = hermitian_eigendecomposition(&HermitianOperator::from_real_diagonal(&[1.0, 2.0]));
        assert_eq!(e.eigenvalues(), &[1.0, 2.0]);
        assert_eq!(e.eigenvectors().matrix(), &ComplexMatrix::identity(2));
    }

    #[test]
    fn pauli_spectrum() {
        let e = hermitian_eigendecomposition(&sigma_x());
        assert!((e.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2, 3, 5, 8, 16] {
            for _ in 0..20 {
                let h = random_hermitian(&mut rng, dim, 3.0);
                let e = hermitian_eigendecomposition(&h);
                assert!(e.reconstruct().max_abs_diff(h.matrix()) < 1e-10);
                assert!(e.eigenvectors().unitarity_residual() < 1e-10);
                assert!(e.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }

    #[test]
    fn degenerate_spectrum() {
        let h = HermitianOperator::identity(4).scale(2.5);
        let e = hermitian_eigendecomposition(&h);
        assert!(e.eigenvalues().iter().all(|&l| (l - 2.5).abs() < 1e-15));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // Rank-one perturbation of the identity keeps a three-fold degeneracy.
        let psi = random_state(&mut rng, 4);
        let proj = HermitianOperator::from_hermitian_part(
            &ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()).unwrap(),
        );
        let h = &HermitianOperator::identity(4) + &proj;
        let e = hermitian_eigendecomposition(&h);
        assert!(e.reconstruct().max_abs_diff(h.matrix()) < 1e-12);
        assert!((e.eigenvalues()[3] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_examples() {
        let u = expm_unitary(&sigma_z(), PI);
        assert!(u.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale(c(-1.0, 0.0))) < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(&mut rng, 3, 2.0);
        assert_eq!(expm_unitary(&h, 0.0).matrix(), &ComplexMatrix::identity(3));

        // e^{−iθσy} = cos θ − i sin θ σy = [[cos θ, −sin θ], [sin θ, cos θ]]; θ = π/2.
        let u = expm_unitary(&sigma_y(), PI / 2.0);
        let expected =
            ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
                .unwrap();
        assert!(u.matrix().max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn evolve_matches_full_exponential() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = random_hermitian(&mut rng, 4, 2.0);
        let psi = random_state(&mut rng, 4);
        let e = h.eigen();
        let a = e.evolve(&psi, 0.77);
        let b = e.exp_unitary(0.77).apply(&psi);
        assert!(a.distance(&b) < 1e-14);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        /// e^{−iht} by scaling and squaring a 20-term Taylor series.
        fn taylor_expm(h: &HermitianOperator, t: f64) -> ComplexMatrix {
            let squarings = 8;
            let a = h.matrix().scale(c(0.0, -t / f64::from(1 << squarings)));
            let mut term = ComplexMatrix::identity(h.dim());
            let mut sum = term.clone();
            for k in 1..20 {
                term = (&term * &a).scale(c(1.0 / k as f64, 0.0));
                sum = &sum + &term;
            }
            for _ in 0..squarings {
                sum = &sum * &sum;
            }
            sum
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn matches_taylor_series(seed in any::<u64>(), t in -4.0..4.0f64, dim in 2usize..9) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let h = random_hermitian(&mut rng, dim, 2.0);
                let u = expm_unitary(&h, t);
                prop_assert!(u.matrix().max_abs_diff(&taylor_expm(&h, t)) < 1e-11);
            }

            #[test]
            fn group_law(seed in any::<u64>(), s in -5.0..5.0f64, t in -5.0..5.0f64, dim in 2usize..7) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let h = random_hermitian(&mut rng, dim, 2.0);
                let e = h.eigen();
                let lhs = e.exp_unitary(s).compose(&e.exp_unitary(t));
                prop_assert!(lhs.matrix().max_abs_diff(e.exp_unitary(s + t).matrix()) < 1e-9);
            }

            #[test]
            fn exponential_preserves_norm(seed in any::<u64>(), t in -10.0..10.0f64, dim in 2usize..9) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let h = random_hermitian(&mut rng, dim, 2.0);
                let psi = random_state(&mut rng, dim);
                let u = expm_unitary(&h, t);
                prop_assert!(u.unitarity_residual() < 1e-10);
                let out: Vec<C64> = u.matrix().mul_vec(psi.amplitudes());
                let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                prop_assert!((norm - 1.0).abs() < 1e-10);
            }
        }
    }
}
