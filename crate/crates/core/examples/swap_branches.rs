//! Bob's Bell measurement on the middle pair: per-outcome probabilities and
//! singlet fractions, the closed forms they match, and the deterministic
//! strategy that discards sub-½ outcomes.

use swapgain::entfrac::{initial_singlet_fraction, make_rho_ab, make_rho_bc, FamilyParams};
use swapgain::swap::{
    deterministic_swap, phi_branch_closed, psi_branch_closed, psi_probability, swap_general,
};

fn main() -> swapgain::Result<()> {
    let params = FamilyParams::new(0.75, 0.5)?;
    println!("initial F = {:.6}", initial_singlet_fraction(&params));

    let ensemble = swap_general(&make_rho_ab(&params), &make_rho_bc(&params))?;
    for b in &ensemble.branches {
        println!(
            "outcome {:<5} prob {:.6}  F {:.6}",
            b.outcome.name(),
            b.probability,
            b.singlet_fraction
        );
    }
    let psi = psi_branch_closed(&params)?;
    let phi = phi_branch_closed(&params)?;
    println!(
        "closed forms: N = {:.6}, F_psi = {:.6}, F_phi = {:.6}",
        psi_probability(&params),
        psi.singlet_fraction,
        phi.singlet_fraction
    );

    println!("\ndeterministic swap at p = 0.75");
    for a in [0.1, 0.2, 0.5, 0.8, 0.9] {
        let d = deterministic_swap(&FamilyParams::new(0.75, a)?)?;
        println!(
            "a = {a:.1}: {:?}, average F = {:.6} (initial {:.6})",
            d.region,
            d.average_singlet_fraction,
            initial_singlet_fraction(&FamilyParams::new(0.75, a)?)
        );
    }
    Ok(())
}
