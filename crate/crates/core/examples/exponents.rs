// Exponents of the limiting recursion, computed two ways.

use tower_bubbles::params::{alpha_via_lambert, check_unperturbed, solve_unperturbed};
use tower_bubbles::Result;

pub struct Exponents {
    pub alpha: Vec<f64>,
    pub s: Vec<f64>,
    pub max_disagreement: f64,
    pub all_checks_pass: bool,
}

pub fn run_example() -> Result<Exponents> {
    let k = 10;
    let u = solve_unperturbed(k)?;
    let lw = alpha_via_lambert(k)?;
    let max_disagreement = u
        .alpha
        .iter()
        .zip(&lw)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let checks = check_unperturbed(&u);
    Ok(Exponents {
        alpha: u.alpha,
        s: u.s,
        max_disagreement,
        all_checks_pass: checks.iter().all(|c| c.pass),
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let e = run_example()?;
    println!("{:>3} {:>20} {:>12}", "j", "alpha_j", "8j-6..8j-5");
    for (j, a) in e.alpha.iter().enumerate() {
        let j1 = (j + 1) as f64;
        println!(
            "{:>3} {:>20.12} {:>5}..{:<5}",
            j + 1,
            a,
            8.0 * j1 - 6.0,
            8.0 * j1 - 5.0
        );
    }
    println!("s_j = {:?}", e.s);
    println!("root finder vs Lambert W: {:e}", e.max_disagreement);
    println!("checks pass: {}", e.all_checks_pass);
    Ok(())
}
