//! Optimal qubit paths on the Bloch sphere.
//!
//! Without wind the path is an arc of a great circle. A head-on wind bends it
//! out of every plane through the origin.

use zermelo::bloch::{best_fit_normal, plane_fit_residual, BlochPoint};
use zermelo::instances::{head_on_wind, orthogonal_zero_wind};
use zermelo::solver::{solve, NavigationProblem};

fn report(name: &str, p: &NavigationProblem) -> Result<(), Box<dyn std::error::Error>> {
    let sol = solve(p)?;
    let traj = sol.trajectory(0.01)?;
    let points: Vec<BlochPoint> = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, s)| BlochPoint::from_state(t, s))
        .collect::<Result<_, _>>()?;
    let coords: Vec<[f64; 3]> = points.iter().map(BlochPoint::coords).collect();
    let n = best_fit_normal(&coords);
    println!("{name}: T = {:.6}", sol.t_star);
    println!("  plane residual {:.3e}, normal ({:+.3}, {:+.3}, {:+.3})", plane_fit_residual(&coords), n[0], n[1], n[2]);
    let stride = (points.len() / 8).max(1);
    for p in points.iter().step_by(stride).chain(points.last()) {
        println!("  t = {:6.3}  ({:+.4}, {:+.4}, {:+.4})", p.t, p.x, p.y, p.z);
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    report("zero wind", &orthogonal_zero_wind())?;
    report("head-on wind 0.5", &head_on_wind(0.5))?;
    Ok(())
}
