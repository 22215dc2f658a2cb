// Barrier functions and the supersolution bound on the neck of a two-bubble tower.

use tower_bubbles::linearized::{barrier_report, BarrierReport};
use tower_bubbles::params::solve;
use tower_bubbles::tower::{potential_bound_check, NormGrid, TowerApprox};
use tower_bubbles::Result;

pub fn run_example() -> Result<BarrierReport> {
    let ps = solve(2, 100.0, 0.0)?;
    let ta = TowerApprox::new(ps.clone(), 0.5)?;
    let c_bar = potential_bound_check(&ta, &NormGrid::default()).max_c_bar();
    barrier_report(&ps, c_bar, 0.5, 0.5, 1000)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let rep = run_example()?;
    println!(
        "C_bar = {:.4}, D = {:.4}, calibration x{}",
        rep.config.c_bar, rep.config.d_under, rep.config.calibration
    );
    for c in &rep.checks {
        println!(
            "j={} {:<40} min slack {:>10.3e} at threshold: {}",
            c.j, c.name, c.min_margin, c.min_at_threshold
        );
    }
    println!("all pass: {}", rep.all_pass);
    Ok(())
}
