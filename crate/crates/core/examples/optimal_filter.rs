//! Best trace-preserving local filter for one link: closed form, the
//! induced semidefinite-program candidate, and a direct numeric search.

use swapgain::entfrac::{make_rho_ab, singlet_fraction_magic, FamilyParams};
use swapgain::filter::{
    apply_tp_filter_ab, optimal_filter_closed, optimal_filter_numeric, NumericOptions, SdpCandidate,
};

fn main() -> swapgain::Result<()> {
    for a in [0.02, 0.05, 0.1, 0.3, 0.5] {
        let params = FamilyParams::new(0.75, a)?;
        let closed = optimal_filter_closed(&params);
        let numeric = optimal_filter_numeric(&make_rho_ab(&params), NumericOptions::default())?;
        let cand = SdpCandidate::from_filter(&closed.filter)?;
        let filtered = apply_tp_filter_ab(&params)?;
        println!(
            "a = {a:.2} {:?}: F* = {:.8}, search {:.8} ({} evals), filtered state F = {:.8}, \
             success {:.4}, worst constraint violation {:.1e}",
            closed.regime,
            closed.f_star,
            numeric.solution.f_star,
            numeric.evaluations,
            singlet_fraction_magic(&filtered)?,
            closed.success_probability,
            cand.constraint_violation()?,
        );
    }
    Ok(())
}
