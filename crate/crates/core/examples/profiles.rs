// First and second order corrections around the bubble with alpha = 2.

use tower_bubbles::profiles::correction_profiles;
use tower_bubbles::Result;

pub struct ProfileSummary {
    pub c0: f64,
    pub c1: f64,
    pub w0_at_0: f64,
    pub w1_at_0: f64,
    pub slope0: f64,
    pub slope1: f64,
    pub residual: f64,
}

pub fn run_example() -> Result<ProfileSummary> {
    let cp = correction_profiles(2.0)?;
    Ok(ProfileSummary {
        c0: cp.c0,
        c1: cp.c1,
        w0_at_0: cp.w0_at_0,
        w1_at_0: cp.w1_at_0,
        slope0: cp.w0.fitted_log_slope(),
        slope1: cp.w1.fitted_log_slope(),
        residual: cp.w0.ode_residual.max(cp.w1.ode_residual),
    })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    let s = run_example()?;
    println!("C0 = {:.10}  fitted {:.10}", s.c0, s.slope0);
    println!("C1 = {:.10}  fitted {:.10}", s.c1, s.slope1);
    println!("w0(0) = {:.8}  w1(0) = {:.8}", s.w0_at_0, s.w1_at_0);
    println!("scaled ODE residual {:e}", s.residual);
    Ok(())
}
