//! Regenerate the three figure CSVs into a directory (default: the system
//! temp directory).

use std::path::PathBuf;

use swapgain::sweep::{emit_csv, sweep, Figure, SweepConfig};

fn main() -> swapgain::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    for (figure, name) in [
        (Figure::Fig1, "fig1.csv"),
        (Figure::Fig2, "fig2.csv"),
        (Figure::Fig3, "fig3.csv"),
    ] {
        let rows = sweep(&SweepConfig::new(figure, 0.75, 0.001, 0.999, 999)?)?;
        let path = dir.join(name);
        emit_csv(figure, &rows, &path)?;
        println!("{} rows -> {}", rows.len(), path.display());
    }
    Ok(())
}
