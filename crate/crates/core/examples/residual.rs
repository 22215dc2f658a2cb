// Weighted residual of the tower and its decay as p grows.

use tower_bubbles::tower::{residual_scan, NormGrid, ResidualScan};
use tower_bubbles::Result;

pub fn run_example() -> Result<ResidualScan> {
    residual_scan(
        2,
        &[40.0, 80.0, 160.0, 320.0],
        0.5,
        0.0,
        &NormGrid::default(),
    )
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let scan = run_example()?;
    for (p, n) in scan.p_values.iter().zip(&scan.norms) {
        println!("p = {p:>5}  |R_p| = {n:.6e}");
    }
    println!("log-log slope {:.4}", scan.slope);
    Ok(())
}
