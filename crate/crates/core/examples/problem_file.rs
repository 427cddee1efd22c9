//! Writes a problem as JSON, reads it back and solves it.

use zermelo::instances::qutrit_ladder;
use zermelo::problem::ProblemFile;
use zermelo::solver::solve;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let p = qutrit_ladder();
    let file = ProblemFile::from_parts(p.h0(), p.psi_i(), p.psi_f(), Some(1.0));
    let text = file.to_json_pretty();
    println!("{text}");

    let loaded = ProblemFile::from_json_str(&text)?.load(None)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    for eps in [0.0, 0.5, 1.0] {
        let sol = solve(&loaded.navigation_problem_with_wind_scale(eps, None)?)?;
        println!("epsilon {eps:.1}: T = {:.10}", sol.t_star);
    }
    Ok(())
}
