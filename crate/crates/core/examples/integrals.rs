// Closed-form integrals checked by quadrature.

use tower_bubbles::integrals::{
    i_alpha_reports, odd_even_check, verify_elementary_table, z_identities, IntegralReport,
};
use tower_bubbles::Result;

pub fn run_example() -> Result<Vec<IntegralReport>> {
    let mut out = Vec::new();
    for a in [2.0, 10.5] {
        out.extend(i_alpha_reports(a)?);
        out.extend(z_identities(a)?);
    }
    out.extend(verify_elementary_table()?);
    out.extend(odd_even_check()?);
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    for r in run_example()? {
        println!(
            "{:<45} quad {:>22.15e} closed {:>22.15e} err {:.2e}",
            r.name, r.quadrature_value, r.closed_form, r.abs_err
        );
    }
    Ok(())
}
