use ising_corr::diagonal::{c0, c1, toda_step, Engine, Regime};
use ising_corr::elliptic::EllipticContext;

fn main() {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let ctx = EllipticContext::new(4, ising_corr::diagonal::required_initial_ns(Regime::Minus, n, 8));
    let mut seq = vec![c0(Regime::Minus, &ctx), c1(Regime::Minus, &ctx)];
    for m in 1..n {
        let next = toda_step(&seq[(m - 1) as usize], &seq[m as usize], Engine::ClosedForm).unwrap();
        let cf = next.closed_form.as_ref().unwrap();
        let bits = cf.even.terms().chain(cf.odd.terms()).map(|(_, q)| q.max_bits()).max().unwrap_or(0);
        println!("N={}: max coeff bits {}", m + 1, bits);
        seq.push(next);
    }
}
