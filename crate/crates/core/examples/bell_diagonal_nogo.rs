//! For Bell-diagonal inputs no swap outcome beats the better input link.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swapgain::swap::bell_diagonal_nogo_check;

fn random_weights(rng: &mut ChaCha8Rng) -> [f64; 4] {
    let w: [f64; 4] = std::array::from_fn(|_| rng.random::<f64>());
    let s: f64 = w.iter().sum();
    w.map(|x| x / s)
}

fn main() -> swapgain::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..500 {
        let report = bell_diagonal_nogo_check(random_weights(&mut rng), random_weights(&mut rng))?;
        worst = worst.max(report.gain());
    }
    println!("largest gain over 500 random Bell-diagonal pairs: {worst:.3e}");

    let werner = [0.2 / 3.0, 0.8, 0.2 / 3.0, 0.2 / 3.0];
    let r = bell_diagonal_nogo_check(werner, werner)?;
    println!(
        "two Werner links at F = 0.8: best outcome F = {:.6}",
        r.max_branch_singlet_fraction
    );
    Ok(())
}
