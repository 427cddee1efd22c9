//! Solves a navigation problem and prints its journey time and checks.
//!
//! ```text
//! cargo run --example solve [problem.json]
//! ```

use std::path::PathBuf;

use zermelo::instances::head_on_wind;
use zermelo::problem::ProblemFile;
use zermelo::solver::{solve, NavigationProblem};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let problem: NavigationProblem = match std::env::args_os().nth(1).map(PathBuf::from) {
        Some(path) => ProblemFile::read(&path)?.load(None)?.navigation_problem(None)?,
        None => head_on_wind(0.5),
    };
    let sol = solve(&problem)?;
    println!("dimension        {}", problem.dim());
    println!("journey time     {:.12}", sol.t_star);
    println!("FS angle at T    {:.12}", sol.theta);
    println!("root residual    {:.3e}", sol.root.residual);
    println!("crossing slope   {:.4}", sol.root.crossing_slope);
    println!();
    for check in sol.diagnostics.checks() {
        let verdict = if check.pass { "ok" } else { "FAIL" };
        if check.at_least {
            // Fidelities: show the shortfall from one.
            println!("{:<22} 1 - {:<9.3e} >= 1 - {:<9.3e} {verdict}", check.name, 1.0 - check.value, 1.0 - check.limit);
        } else {
            println!("{:<22} {:>13.3e} <= {:<13.3e} {verdict}", check.name, check.value, check.limit);
        }
    }
    Ok(())
}
