//! Published data for the row nearest-neighbor form factors `Ĉ⁽ⁿ⁾(0,1)`:
//! the coefficient tables, the monic `p_n` polynomials, and the explicit
//! `n ≤ 4` closed forms used as independent data-entry checks.

use crate::coeff::{ratio, Rational};
use crate::kepoly::KEPolynomial;

use super::AnsatzFit;

/// Table rows `a_i^{(n)}`, `n = 1..6`.
pub fn table_a(n: u32) -> Vec<Rational> {
    match n {
        1 => vec![ratio(-1, 2)],
        2 => vec![ratio(3, 8), ratio(-1, 2)],
        3 => vec![ratio(-5, 16), ratio(1, 4)],
        4 => vec![ratio(35, 128), ratio(-17, 48), ratio(1, 8)],
        5 => vec![ratio(-63, 256), ratio(23, 96), ratio(-1, 16)],
        6 => vec![ratio(231, 1024), ratio(-3319, 11520), ratio(25, 192), ratio(-1, 48)],
        _ => panic!("tables cover n = 1..6"),
    }
}

/// Table rows `b_{i,j}^{(n)}`: entry `[i-1][j]` for `i = 1..n`, `j = 0..⌊(i-1)/2⌋`.
pub fn table_b(n: u32) -> Vec<Vec<Rational>> {
    match n {
        1 => vec![vec![ratio(1, 2)]],
        2 => vec![vec![ratio(-1, 4)], vec![ratio(-1, 8)]],
        3 => vec![
            vec![ratio(13, 48)],
            vec![ratio(1, 16)],
            vec![ratio(-1, 48), ratio(-1, 4)],
        ],
        4 => vec![
            vec![ratio(-19, 96)],
            vec![ratio(-17, 192)],
            vec![ratio(1, 96), ratio(1, 8)],
            vec![ratio(1, 384), ratio(1, 16)],
        ],
        5 => vec![
            vec![ratio(263, 1280)],
            vec![ratio(23, 384)],
            vec![ratio(-7, 384), ratio(-7, 32)],
            vec![ratio(-1, 768), ratio(-1, 32)],
            vec![ratio(1, 3840), ratio(1, 96), ratio(1, 16)],
        ],
        6 => vec![
            vec![ratio(-1289, 7680)],
            vec![ratio(-3319, 46080)],
            vec![ratio(3, 256), ratio(9, 64)],
            vec![ratio(25, 9216), ratio(25, 384)],
            vec![ratio(-1, 7680), ratio(-1, 192), ratio(-1, 32)],
            vec![ratio(-1, 46080), ratio(-1, 768), ratio(-1, 64)],
        ],
        _ => panic!("tables cover n = 1..6"),
    }
}

/// `p_n(s)`: monic degree `n-1` polynomials in `s²`, ascending coefficients.
pub fn p_poly(n: u32) -> Vec<i64> {
    match n {
        1 => vec![1],
        2 => vec![-3, 1],
        3 => vec![-11, 6, 1],
        4 => vec![25, 3, -21, 1],
        5 => vec![201, -180, -66, 60, 1],
        6 => vec![-299, -123, 466, 106, -183, 1],
        _ => panic!("p polynomials cover n = 1..6"),
    }
}

/// The full table-backed fit for `n = 1..6`.
pub fn table_fit(n: u32) -> AnsatzFit {
    AnsatzFit {
        n,
        a: table_a(n),
        b: table_b(n),
        p: (1..=n).map(p_poly).collect(),
    }
}

/// `c (1+s²) q(s²) K^k E^e` with integer `q` given ascending.
fn one_plus(k: u8, e: u8, c: Rational, q: &[i64]) -> KEPolynomial {
    let base: Vec<Rational> = q.iter().map(|&v| &c * Rational::from_integer(v.into())).collect();
    let mut sum = base.clone();
    sum.push(Rational::from_integer(0.into()));
    for (i, v) in base.iter().enumerate() {
        sum[i + 1] += v;
    }
    KEPolynomial::term(k, e, &sum)
}

/// The explicitly printed `Ĉ⁽ⁿ⁾(0,1)` for `n = 1..4`, entered term by term
/// as an independent check of the table data.
pub fn printed_form(n: u32) -> KEPolynomial {
    use KEPolynomial as P;
    match n {
        1 => P::constant(ratio(-1, 2)).add(&one_plus(1, 0, ratio(1, 2), &[1])),
        2 => P::constant(ratio(3, 8))
            .add(&one_plus(1, 0, ratio(-1, 4), &[1]))
            .add(&one_plus(2, 0, ratio(-1, 8), &[-3, 1]))
            .add(&P::term(1, 1, &[ratio(-1, 2)])),
        3 => P::constant(ratio(-5, 16))
            .add(&one_plus(1, 0, ratio(13, 48), &[1]))
            .add(&one_plus(2, 0, ratio(1, 16), &[-3, 1]))
            .add(&one_plus(3, 0, ratio(-1, 48), &[-11, 6, 1]))
            .add(&P::term(1, 1, &[ratio(1, 4)]))
            .add(&one_plus(2, 1, ratio(-1, 4), &[1])),
        4 => P::constant(ratio(35, 128))
            .add(&one_plus(1, 0, ratio(-19, 96), &[1]))
            .add(&one_plus(2, 0, ratio(-17, 192), &[-3, 1]))
            .add(&one_plus(3, 0, ratio(1, 96), &[-11, 6, 1]))
            .add(&one_plus(4, 0, ratio(1, 384), &[25, 3, -21, 1]))
            .add(&P::term(1, 1, &[ratio(-17, 48)]))
            .add(&P::term(2, 2, &[ratio(1, 8)]))
            .add(&one_plus(2, 1, ratio(1, 8), &[1]))
            .add(&one_plus(3, 1, ratio(1, 16), &[-3, 1])),
        _ => panic!("printed forms cover n = 1..4"),
    }
}
