// Expansion of (1 + a/p + b/p^2 + c/p^3)^p and the elementary bound |1+s/p|^p <= e^s.

use tower_bubbles::profiles::{gpp_check, taylor_check, GppReport};
use tower_bubbles::Result;

pub fn run_example() -> Result<(Vec<(f64, f64)>, GppReport)> {
    let errs = [100.0, 200.0, 400.0, 800.0]
        .iter()
        .map(|p| taylor_check(1.0, 1.0, 1.0, *p).map(|t| (*p, t.err)))
        .collect::<Result<Vec<_>>>()?;
    Ok((errs, gpp_check(100.0, 10_000)))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let (errs, gpp) = run_example()?;
    for w in errs.windows(2) {
        println!(
            "p = {:>4}: err {:.3e}, ratio to 2p {:.3}",
            w[0].0,
            w[0].1,
            w[0].1 / w[1].1
        );
    }
    println!(
        "|1+s/p|^p <= e^s: {} violations in {} samples",
        gpp.violations, gpp.samples
    );
    Ok(())
}
