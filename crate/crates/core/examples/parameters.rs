// Concentration parameters of a three-bubble tower.

use tower_bubbles::params::{check_structural_properties, solve, ParamSet, StructuralReport};
use tower_bubbles::Result;

pub fn run_example() -> Result<(ParamSet, StructuralReport)> {
    let ps = solve(3, 150.0, 0.0)?;
    let rep = check_structural_properties(&ps);
    Ok((ps, rep))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (ps, rep) = run_example()?;
    println!("k = {}, p = {}", ps.k, ps.p);
    for j in 0..ps.k {
        println!(
            "j={} alpha={:.6} b={:.6} ln(delta)={:.4} tau={:.6e}",
            j + 1,
            ps.alpha[j],
            ps.b[j],
            ps.ln_delta[j],
            ps.tau[j]
        );
    }
    println!("s = {:?}", ps.s);
    for c in &rep.checks {
        println!(
            "[{}] {}  {}",
            if c.pass { "ok" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    Ok(())
}
