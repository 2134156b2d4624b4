//! Singlet fraction of the two-link family and of a few reference states,
//! computed by the magic-basis eigenvalue and by direct search.

use swapgain::entfrac::{
    initial_singlet_fraction, make_rho_ab, singlet_fraction_bruteforce, singlet_fraction_magic,
    teleport_fidelity_from_f, werner_state, BruteForceOptions, FamilyParams,
};

fn main() -> swapgain::Result<()> {
    println!(
        "{:>6} {:>10} {:>10} {:>10} {:>10}",
        "a", "closed", "magic", "search", "f_tel"
    );
    for a in [0.02, 0.1, 0.3, 0.5, 0.7, 0.9] {
        let params = FamilyParams::new(0.75, a)?;
        let rho = make_rho_ab(&params);
        let magic = singlet_fraction_magic(&rho)?;
        let search = singlet_fraction_bruteforce(&rho, BruteForceOptions::default())?;
        println!(
            "{a:>6.2} {:>10.6} {magic:>10.6} {search:>10.6} {:>10.6}",
            initial_singlet_fraction(&params),
            teleport_fidelity_from_f(magic)?
        );
    }

    for w in [0.0, 1.0 / 3.0, 0.8, 1.0] {
        let rho = werner_state(w)?;
        println!("werner w={w:.3}: F = {:.6}", singlet_fraction_magic(&rho)?);
    }
    Ok(())
}
