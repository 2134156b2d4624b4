//! The swap realised with photon-pair sources, lossy beam splitters and
//! photon counting.

use swapgain::entfrac::FamilyParams;
use swapgain::optics::{loss_transmission, run_heralded_swap};

fn main() -> swapgain::Result<()> {
    let params = FamilyParams::new(0.75, 0.5)?;
    println!("loss transmission T = {:.6}", loss_transmission(&params));
    for e in run_heralded_swap(&params)? {
        let f = e
            .singlet_fraction()?
            .map_or("-".to_string(), |f| format!("{f:.6}"));
        let bell = e.bell.map_or("-", |b| b.name());
        println!(
            "counts {:?}: probability {:.6}, heralds {bell:<4} F = {f}",
            e.counts, e.probability
        );
    }
    Ok(())
}
