// Shape of a two-bubble tower: annuli, concentration sets and nodal regions.

use tower_bubbles::params::solve;
use tower_bubbles::tower::{nodal_count, TowerApprox};
use tower_bubbles::Result;

pub struct TowerShape {
    pub nodal_regions: usize,
    pub inclusion: Vec<bool>,
    pub samples: Vec<(f64, f64)>,
}

pub fn run_example() -> Result<TowerShape> {
    let ta = TowerApprox::new(solve(2, 150.0, 0.0)?, 0.5)?;
    let samples = (0..=40)
        .map(|m| {
            let ln_r = -70.0 + 70.0 * m as f64 / 40.0;
            ta.eval_ln_r(ln_r).map(|u| (ln_r, u))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TowerShape {
        nodal_regions: nodal_count(&ta),
        inclusion: ta.partition.inclusion.clone(),
        samples,
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let t = run_example()?;
    println!("nodal regions: {}", t.nodal_regions);
    println!("B_j inside A_j: {:?}", t.inclusion);
    for (l, u) in &t.samples {
        println!("ln r = {l:>7.2}  U_p = {u:>12.6}");
    }
    Ok(())
}
