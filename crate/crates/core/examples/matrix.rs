// Relation matrix of the reduction and its determinant.

use tower_bubbles::linearized::{build_matrix_closed_form, det_and_recursion_check, DetReport};
use tower_bubbles::params::solve;
use tower_bubbles::Result;

pub fn run_example() -> Result<Vec<(usize, f64, DetReport)>> {
    let mut out = Vec::new();
    for k in 1..=4 {
        for p in [50.0, 200.0] {
            let tm = build_matrix_closed_form(&solve(k, p, 0.0)?)?;
            out.push((k, p, det_and_recursion_check(&tm)?));
        }
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for (k, p, r) in run_example()? {
        println!(
            "k={k} p={p:>4} det={:.6e} recursion={:.6e} rel diff {:.1e}",
            r.det, r.recursion_det, r.rel_diff
        );
    }
    Ok(())
}
