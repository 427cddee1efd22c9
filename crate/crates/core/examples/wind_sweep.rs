//! Journey time as a function of wind strength.
//!
//! The tailwind family is compared with π/(1+ε). The head-on family rises,
//! peaks, then falls once going around with the wind becomes faster.

use std::f64::consts::PI;

use zermelo::instances::{head_on_wind, tailwind};
use zermelo::solver::solve;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>12} {:>12} {:>10}", "eps", "tailwind", "pi/(1+eps)", "head-on");
    for k in 0..=20 {
        let eps = k as f64 * 0.05;
        let tail = solve(&tailwind(eps))?.t_star;
        let head = solve(&head_on_wind(eps))?.t_star;
        println!("{eps:>6.2} {tail:>12.8} {:>12.8} {head:>10.6}", PI / (1.0 + eps));
    }
    Ok(())
}
