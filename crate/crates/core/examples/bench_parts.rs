use ising_corr::diagonal::{c0, c1, toda_step, Engine, Regime};
use ising_corr::elliptic::EllipticContext;
use std::time::Instant;

fn main() {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(6);
    let ctx = EllipticContext::new(4, ising_corr::diagonal::required_initial_ns(Regime::Minus, n, 8));
    let mut seq = vec![c0(Regime::Minus, &ctx), c1(Regime::Minus, &ctx)];
    for m in 1..n {
        let t0 = Instant::now();
        let next = toda_step(&seq[(m - 1) as usize], &seq[m as usize], Engine::ClosedForm).unwrap();
        println!("step {} -> N={}: {:.2?} (terms {})", m, m + 1, t0.elapsed(),
            next.closed_form.as_ref().map(|c| c.even.num_terms() + c.odd.num_terms()).unwrap_or(0));
        seq.push(next);
    }
}
