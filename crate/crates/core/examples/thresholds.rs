//! Where each quantity crosses its classical boundary at p = 0.75.

use swapgain::sweep::{find_threshold, ThresholdQuery, ThresholdTarget};

fn main() -> swapgain::Result<()> {
    let queries = [
        (ThresholdTarget::InitialFHalf, 0.001, 0.2),
        (ThresholdTarget::PsiBranchFHalf, 0.5, 0.9),
        (ThresholdTarget::PhiBranchFHalf, 0.1, 0.5),
        (ThresholdTarget::Strategy1Classical, 0.05, 0.3),
        (ThresholdTarget::Strategy1Classical, 0.7, 0.95),
    ];
    for (target, lo, hi) in queries {
        let r = find_threshold(&ThresholdQuery::new(target, 0.75, lo, hi).with_tolerance(1e-9))?;
        println!("{:<20} a* = {:.7}", target.name(), r.a_star);
    }
    Ok(())
}
