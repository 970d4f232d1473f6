use ising_corr::diagonal::{c0, c1, toda_step, Engine, Regime};
use ising_corr::diffalg::{DiffAlgElement, QT};
use ising_corr::elliptic::EllipticContext;
use std::time::Instant;

fn main() {
    let n: u32 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let ctx = EllipticContext::new(4, ising_corr::diagonal::required_initial_ns(Regime::Minus, n, 8));
    let mut seq = vec![c0(Regime::Minus, &ctx), c1(Regime::Minus, &ctx)];
    for m in 1..n {
        let next = toda_step(&seq[(m - 1) as usize], &seq[m as usize], Engine::ClosedForm).unwrap();
        seq.push(next);
    }
    let curr = seq[(n - 1) as usize].closed_form.clone().unwrap();
    let prev = seq[(n - 2) as usize].closed_form.clone().unwrap();
    let nn = (n - 1) as i64;
    let t0 = Instant::now(); let dc = curr.d_dt(); let d2c = dc.d_dt(); println!("derivs: {:.2?}", t0.elapsed());
    let t = QT::monomial(ising_corr::coeff::rat(1), 1, 0);
    let n2 = QT::monomial(ising_corr::coeff::rat(nn * nn), 0, -2);
    let t0 = Instant::now();
    let g = d2c.scale_qt(&t).add(&dc).unwrap().add(&curr.scale_qt(&n2)).unwrap();
    println!("assemble g: {:.2?} (terms {})", t0.elapsed(), g.even.num_terms() + g.odd.num_terms());
    let t0 = Instant::now(); let p1 = curr.mul(&g); println!("C*G: {:.2?}", t0.elapsed());
    let t0 = Instant::now(); let p2 = dc.square(); println!("dc^2: {:.2?}", t0.elapsed());
    let t0 = Instant::now(); let numer = p1.sub(&p2.scale_qt(&t)).unwrap(); println!("sub: {:.2?} (numer terms {})", t0.elapsed(), numer.even.num_terms() + numer.odd.num_terms());
    let t0 = Instant::now(); let q = numer.exact_divide(&prev).unwrap(); println!("divide: {:.2?} (q terms {})", t0.elapsed(), q.even.num_terms() + q.odd.num_terms());
    let _ = DiffAlgElement::one();
}
