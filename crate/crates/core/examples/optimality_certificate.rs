//! Random admissible controls never beat the solver's journey time.
//!
//! ```text
//! cargo run --release --example optimality_certificate [samples]
//! ```

use zermelo::instances::regression_set;
use zermelo::oracle::{optimality_certificate, CertificateConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n_samples = match std::env::args().nth(1) {
        Some(s) => s.parse()?,
        None => 100,
    };
    let config = CertificateConfig { n_samples, dt: 2e-3, ..CertificateConfig::default() };
    println!("{:<22} {:>10} {:>12} {:>12} {:>6}", "instance", "T", "orbit min", "piecewise", "pass");
    for (name, p) in regression_set() {
        let r = optimality_certificate(&p, &config)?;
        let show = |x: Option<f64>| x.map_or("none".to_string(), |v| format!("{v:.6}"));
        println!(
            "{name:<22} {:>10.6} {:>12} {:>12} {:>6}",
            r.t_star,
            show(r.orbit_min_arrival),
            show(r.piecewise_min_arrival),
            r.pass
        );
    }
    Ok(())
}
