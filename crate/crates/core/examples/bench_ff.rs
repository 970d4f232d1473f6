use ising_corr::formfactor::formfactor_series;
use std::time::Instant;

fn main() {
    for (n, noff, ord) in [(2usize, 1u32, 40i64), (3, 0, 34), (3, 1, 34), (4, 1, 30), (4, 1, 34)] {
        let t0 = Instant::now();
        let f = formfactor_series(n, 0, noff, ord).unwrap();
        println!("n={n} N={noff} order {ord}: {:.2?} (lead {:?}, terms {})", t0.elapsed(), f.lead(), f.num_terms());
    }
}
