//! Relaying a qubit from A to C: two hops of filtered teleportation versus
//! swapping at B and teleporting once.

use swapgain::entfrac::{make_rho_ab, FamilyParams};
use swapgain::teleport::{
    align_resource, average_fidelity, compare_strategies, pauli_design_average,
    teleportation_channel,
};

fn main() -> swapgain::Result<()> {
    let params = FamilyParams::new(0.75, 0.2)?;
    let aligned = align_resource(&make_rho_ab(&params))?;
    let hop = teleportation_channel(&aligned.state)?;
    println!(
        "one hop at a = 0.2: f = {:.6} (six-state average {:.6})",
        average_fidelity(&hop.channel),
        pauli_design_average(&hop.channel)?
    );

    println!("\n{:>6} {:>12} {:>12}", "a", "strategy 1", "strategy 2");
    for i in 1..20 {
        let a = i as f64 / 20.0;
        let r = compare_strategies(&FamilyParams::new(0.75, a)?)?;
        println!(
            "{a:>6.2} {:>12.6} {:>12.6}",
            r.fidelity_strategy1, r.fidelity_strategy2
        );
    }
    Ok(())
}
