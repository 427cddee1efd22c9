//! Time-ordered midpoint propagation against the closed-form optimum.
//!
//! Halving the step divides the worst deviation by about four.

use zermelo::instances::random_instance;
use zermelo::solver::solve;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sol = solve(&random_instance(7, 4, 2.0))?;
    println!("T = {:.10}", sol.t_star);
    println!("{:>10} {:>14} {:>8}", "dt", "max deviation", "ratio");
    let mut previous: Option<f64> = None;
    for k in 0..6 {
        let dt = 0.04 / f64::from(1 << k);
        let traj = sol.propagate_ordered(dt)?;
        let dev = traj
            .times()
            .iter()
            .zip(traj.states())
            .map(|(&t, s)| s.distance(&sol.propagate_closed_form(t)))
            .fold(0.0, f64::max);
        let ratio = previous.map_or(String::new(), |p| format!("{:.3}", p / dev));
        println!("{dt:>10.5} {dev:>14.3e} {ratio:>8}");
        previous = Some(dev);
    }
    Ok(())
}
