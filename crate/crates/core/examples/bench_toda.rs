use ising_corr::diagonal::{toda_closed_sequence, Regime};
use std::time::Instant;

fn main() {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    for regime in [Regime::Plus, Regime::Minus] {
        let t0 = Instant::now();
        let seq = toda_closed_sequence(regime, n).unwrap();
        let cf = seq.last().unwrap();
        println!(
            "{} N={} in {:.2?}: even terms {}, odd terms {}, max degs {:?}",
            regime.name(), n, t0.elapsed(),
            cf.even.num_terms(), cf.odd.num_terms(), cf.even.max_degrees(),
        );
    }
}
