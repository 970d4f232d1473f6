//! The n-fold form-factor integrals `Ĉ⁽ⁿ⁾(M,N)`: an independent oracle for
//! everything the theta-function track produces.
//!
//! Exact track: the integrand
//!
//! ```text
//! ∏ x_i^M / sinh γ_i · ∏_{i<j} h_ij² · cos(N Σ ω_i)
//! ```
//!
//! is expanded as a Laurent series in `s` whose coefficients are
//! trigonometric polynomials (maps from integer frequency vectors to
//! rationals); angle integration is exact Fourier projection, which for the
//! `cos(NΣω)` weight amounts to reading off the coefficient of the frequency
//! vector `(N,...,N)`. Angles are eliminated one at a time to keep the
//! intermediate frequency supports small. The numeric track evaluates the
//! same integrals by tensor-product trapezoid sums on the periodic torus,
//! contracted edge-by-edge so `n = 4` costs `O(g³)` per grid.

mod trig;

pub use trig::{FourierLaurent, TrigPoly};

use thiserror::Error;

use crate::coeff::{ratio, Rational};
use crate::series::SeriesError;
use crate::QSeries;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormFactorError {
    #[error("series error: {0}")]
    Series(#[from] SeriesError),
    #[error("angle count must be 1..=4, got {0}")]
    BadAngleCount(usize),
    #[error("truncation order too small to resolve the leading behavior")]
    TruncationExhausted,
    #[error("s must lie in (0,1) for the numeric track")]
    Domain,
    #[error("quadrature did not reach tolerance {0} at the grid cap")]
    Convergence(f64),
}

fn check_n(n: usize) -> Result<(), FormFactorError> {
    if (1..=4).contains(&n) {
        Ok(())
    } else {
        Err(FormFactorError::BadAngleCount(n))
    }
}

fn one(n: usize, order: i64) -> FourierLaurent {
    FourierLaurent::constant(n, Rational::from_integer(1.into()), order)
}

/// `B = s²(y²-1) = (1 - s cos ω + s²)² - s²`, a unit series; the explicit
/// factorization fixes the branch of the square root (`sinh γ > 0`).
fn b_series(angle: usize, n: usize, order: i64) -> FourierLaurent {
    let a = one(n, order)
        .add(&FourierLaurent::cos_angle(n, angle, order).shift(1).scale(&ratio(-1, 1)))
        .add(&one(n, order).shift(2));
    a.mul(&a).sub(&one(n, order).shift(2))
}

/// `1/sinh γ = s B^{-1/2}`.
fn inv_sinh_gamma(angle: usize, n: usize, order: i64) -> Result<FourierLaurent, FormFactorError> {
    Ok(b_series(angle, n, order + 2).pow_rational(&ratio(-1, 2))?.shift(1).truncate_to(order))
}

/// `sinh γ = s^{-1} B^{1/2}`.
fn sinh_gamma(angle: usize, n: usize, order: i64) -> Result<FourierLaurent, FormFactorError> {
    Ok(b_series(angle, n, order + 2).pow_rational(&ratio(1, 2))?.shift(-1).truncate_to(order))
}

/// `x = y - sinh γ`; the `s^{-1}` singularities cancel, leaving `O(s)`.
fn x_series(angle: usize, n: usize, order: i64) -> Result<FourierLaurent, FormFactorError> {
    // y = s + 1/s - cos ω
    let y = one(n, order)
        .shift(1)
        .add(&one(n, order).shift(-1))
        .sub(&FourierLaurent::cos_angle(n, angle, order));
    let x = y.sub(&sinh_gamma(angle, n, order)?);
    if x.s_lead() < 1 {
        return Err(FormFactorError::TruncationExhausted);
    }
    Ok(x)
}

/// `h_ij² = 4 x_i x_j sin²((ω_i-ω_j)/2) / (1 - x_i x_j)²`.
fn h_squared(
    xi: &FourierLaurent,
    xj: &FourierLaurent,
    i: usize,
    j: usize,
    n: usize,
    order: i64,
) -> Result<FourierLaurent, FormFactorError> {
    let xx = xi.mul(xj).truncate_to(order);
    let denom_inv = one(n, order).sub(&xx).pow_rational(&ratio(-2, 1))?;
    // sin²((ω_i-ω_j)/2) = (1 - cos(ω_i-ω_j))/2
    let sin2 = FourierLaurent::constant(n, ratio(1, 2), order)
        .sub(&FourierLaurent::cos_diff(n, i, j, order).scale(&ratio(1, 2)));
    Ok(xx.mul(&sin2).mul(&denom_inv).scale(&ratio(4, 1)).truncate_to(order))
}

/// Multiply factors with truncation driven by the leads still to come.
fn product_truncated(factors: &[FourierLaurent], mut acc: FourierLaurent, target: i64) -> FourierLaurent {
    let mut remaining: i64 = factors.iter().map(|f| f.s_lead()).sum();
    for f in factors {
        remaining -= f.s_lead();
        acc = acc.mul(f).truncate_to(target - remaining);
    }
    acc
}

/// The full integrand of `Ĉ⁽ⁿ⁾(M,N)` (without the `1/n!` prefactor) as a
/// Fourier-Laurent series.
pub fn integrand(n: usize, m_off: u32, n_off: u32, order_s: i64) -> Result<FourierLaurent, FormFactorError> {
    check_n(n)?;
    let mut factors = Vec::new();
    let mut xs = Vec::new();
    for i in 0..n {
        xs.push(x_series(i, n, order_s + 2)?);
    }
    for (i, x) in xs.iter().enumerate() {
        let f = inv_sinh_gamma(i, n, order_s + 2)?;
        factors.push(if m_off > 0 { f.mul(&x.pow_i(m_off as i64)?) } else { f });
    }
    for i in 0..n {
        for j in (i + 1)..n {
            factors.push(h_squared(&xs[i], &xs[j], i, j, n, order_s + 2)?);
        }
    }
    let acc = product_truncated(&factors, one(n, order_s), order_s).truncate_to(order_s);
    Ok(if n_off > 0 { acc.mul_cos_all(n_off as i64) } else { acc })
}

/// Exact `Ĉ⁽ⁿ⁾(M,N)` as an `s`-series: the coefficient of the frequency
/// vector `(N,...,N)`, divided by `n!`, with angles integrated out one at a
/// time.
pub fn formfactor_series(n: usize, m_off: u32, n_off: u32, order_s: i64) -> Result<QSeries, FormFactorError> {
    check_n(n)?;
    let inv_fact = Rational::new(1.into(), crate::coeff::factorial(n as u32).to_integer());
    let mut xs = Vec::new();
    for i in 0..n {
        xs.push(x_series(i, n, order_s + 2)?);
    }
    let mut angle_factor = Vec::new();
    for (i, x) in xs.iter().enumerate() {
        let f = inv_sinh_gamma(i, n, order_s + 2)?;
        angle_factor.push(if m_off > 0 { f.mul(&x.pow_i(m_off as i64)?) } else { f });
    }
    // leads of all blocks strictly below angle `a` (their factors are not
    // yet multiplied when angle `a` is eliminated)
    let lead_below = |a: usize| -> i64 {
        (0..a).map(|i| angle_factor[i].s_lead()).sum::<i64>() + (a * (a - 1)) as i64
    };
    let mut acc: Option<FourierLaurent> = None;
    for a in (1..n).rev() {
        let target = order_s - lead_below(a);
        let mut factors = vec![angle_factor[a].clone()];
        for i in 0..a {
            factors.push(h_squared(&xs[i], &xs[a], i, a, n, target)?);
        }
        let start = match acc.take() {
            Some(p) => p,
            None => one(n, target),
        };
        let block = product_truncated(&factors, start, target);
        debug_assert!(block.is_real_symmetric() || n_off > 0);
        acc = Some(block.project_angle(a, n_off as i64));
    }
    let last = match acc {
        Some(p) => angle_factor[0].mul(&p).truncate_to(order_s),
        None => angle_factor[0].truncate_to(order_s),
    };
    Ok(last.project_angle_scalar(0, n_off as i64).scale_rational(&inv_fact))
}

/// Numeric `Ĉ⁽ⁿ⁾(M,N)` by trapezoid sums on the torus, refined until two
/// successive grids agree within `tol` (relative for values above one).
pub fn formfactor_numeric(
    n: usize,
    m_off: u32,
    n_off: u32,
    s_value: f64,
    tol: f64,
) -> Result<f64, FormFactorError> {
    formfactor_numeric_detailed(n, m_off, n_off, s_value, tol).map(|(v, _)| v)
}

/// Numeric value together with the last refinement delta as an error
/// estimate.
pub fn formfactor_numeric_detailed(
    n: usize,
    m_off: u32,
    n_off: u32,
    s_value: f64,
    tol: f64,
) -> Result<(f64, f64), FormFactorError> {
    check_n(n)?;
    if !(0.0 < s_value && s_value < 1.0) {
        return Err(FormFactorError::Domain);
    }
    let mut g: usize = 32;
    let cap = match n {
        1 => 1 << 17,
        2 => 1 << 13,
        3 => 1 << 10,
        _ => 1 << 10,
    };
    let mut prev = quad_eval(n, m_off, n_off, s_value, g);
    while g < cap {
        g *= 2;
        let next = quad_eval(n, m_off, n_off, s_value, g);
        let delta = (next - prev).abs();
        if delta <= tol * next.abs().max(1.0) {
            return Ok((next, delta));
        }
        prev = next;
    }
    Err(FormFactorError::Convergence(tol))
}

/// One tensor-grid evaluation, contracted so the cost is `O(g^min(n,3))`.
fn quad_eval(n: usize, m_off: u32, n_off: u32, s: f64, g: usize) -> f64 {
    let mut xv = vec![0.0f64; g];
    let mut fv = vec![0.0f64; g]; // x^M / sinh γ
    let mut cosn = vec![0.0f64; g];
    let mut sinn = vec![0.0f64; g];
    let mut cosw = vec![0.0f64; g];
    let mut sinw = vec![0.0f64; g];
    for k in 0..g {
        let w = 2.0 * std::f64::consts::PI * (k as f64) / (g as f64) - std::f64::consts::PI;
        let y = s + 1.0 / s - w.cos();
        let sh = (y * y - 1.0).sqrt();
        let x = y - sh;
        xv[k] = x;
        fv[k] = x.powi(m_off as i32) / sh;
        let nn = n_off as f64;
        cosn[k] = (nn * w).cos();
        sinn[k] = (nn * w).sin();
        cosw[k] = w.cos();
        sinw[k] = w.sin();
    }
    let h2 = |a: usize, b: usize| -> f64 {
        let xx = xv[a] * xv[b];
        let cdiff = cosw[a] * cosw[b] + sinw[a] * sinw[b];
        2.0 * xx * (1.0 - cdiff) / ((1.0 - xx) * (1.0 - xx))
    };
    let inv_gn = 1.0 / (g as f64).powi(n as i32);
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    let acc = match n {
        1 => {
            let mut acc = 0.0;
            for a in 0..g {
                acc += fv[a] * cosn[a];
            }
            acc
        }
        2 => {
            let mut acc = 0.0;
            for a in 0..g {
                for b in 0..g {
                    acc += fv[a] * fv[b] * h2(a, b) * (cosn[a] * cosn[b] - sinn[a] * sinn[b]);
                }
            }
            acc
        }
        3 => {
            // Σ_{bc} T_bc F_b F_c e_b e_c (Σ_a T_ab T_ac F_a e_a);
            // rows over b run in parallel, reduced in index order
            use rayon::prelude::*;
            let rows: Vec<f64> = (0..g)
                .into_par_iter()
                .map(|b| {
                    let mut row = 0.0;
                    for c in 0..g {
                        let mut re = 0.0;
                        let mut im = 0.0;
                        for a in 0..g {
                            let t = fv[a] * h2(a, b) * h2(a, c);
                            re += t * cosn[a];
                            im += t * sinn[a];
                        }
                        let cbc = cosn[b] * cosn[c] - sinn[b] * sinn[c];
                        let sbc = sinn[b] * cosn[c] + cosn[b] * sinn[c];
                        row += fv[b] * fv[c] * h2(b, c) * (re * cbc - im * sbc);
                    }
                    row
                })
                .collect();
            rows.iter().sum()
        }
        _ => {
            // Q_cd = Σ_a T_ac T_ad F_a e_a; I = Σ_cd T_cd F_c F_d e_c e_d Q_cd²
            use rayon::prelude::*;
            let rows: Vec<f64> = (0..g)
                .into_par_iter()
                .map(|c| {
                    let mut row = 0.0;
                    for d in 0..g {
                        let mut re = 0.0;
                        let mut im = 0.0;
                        for a in 0..g {
                            let t = fv[a] * h2(a, c) * h2(a, d);
                            re += t * cosn[a];
                            im += t * sinn[a];
                        }
                        let q_re = re * re - im * im;
                        let q_im = 2.0 * re * im;
                        let ccd = cosn[c] * cosn[d] - sinn[c] * sinn[d];
                        let scd = sinn[c] * cosn[d] + cosn[c] * sinn[d];
                        row += fv[c] * fv[d] * h2(c, d) * (q_re * ccd - q_im * scd);
                    }
                    row
                })
                .collect();
            rows.iter().sum()
        }
    };
    acc * inv_gn / fact
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    #[test]
    fn single_angle_expansions() {
        // sinh γ = s^{-1}(1 - s cos ω + O(s²))
        let sh = sinh_gamma(0, 1, 4).unwrap();
        assert_eq!(sh.coeff_scalar(-1, &[0]), rat(1));
        assert_eq!(sh.coeff_scalar(0, &[1]), ratio(-1, 2));
        assert_eq!(sh.coeff_scalar(0, &[-1]), ratio(-1, 2));
        // x = (s/2)(1 + s cos ω + O(s²))
        let x = x_series(0, 1, 5).unwrap();
        assert_eq!(x.coeff_scalar(1, &[0]), ratio(1, 2));
        assert_eq!(x.coeff_scalar(2, &[1]), ratio(1, 4));
        assert_eq!(x.coeff_scalar(2, &[-1]), ratio(1, 4));
        assert!(x.is_real_symmetric());
    }

    #[test]
    fn h_squared_leading() {
        // h12² = sin²((ω1-ω2)/2) s² (1 + s(cos ω1 + cos ω2) + O(s²))
        let x0 = x_series(0, 2, 8).unwrap();
        let x1 = x_series(1, 2, 8).unwrap();
        let h = h_squared(&x0, &x1, 0, 1, 2, 8).unwrap();
        assert_eq!(h.coeff_scalar(2, &[0, 0]), ratio(1, 2));
        assert_eq!(h.coeff_scalar(2, &[1, -1]), ratio(-1, 4));
        assert_eq!(h.coeff_scalar(2, &[-1, 1]), ratio(-1, 4));
        // s³: sin²((ω1-ω2)/2)(cos ω1 + cos ω2) has 1/4 - 1/8 = 1/8 at freq (1,0)
        assert_eq!(h.coeff_scalar(3, &[1, 0]), ratio(1, 8));
        assert!(h.is_real_symmetric());
    }

    #[test]
    fn c1_01_series() {
        // Ĉ⁽¹⁾(0,1) = -1/2 + (1+s²)K/2 = s²/2 + s⁴/8 + ...
        let ff = formfactor_series(1, 0, 1, 20).unwrap();
        let k = crate::elliptic::hypergeometric_k(24);
        let expect = QSeries::from_terms([(0, ratio(-1, 2))], 20)
            .add(&k.scale(&ratio(1, 2)))
            .add(&k.shift(2).scale(&ratio(1, 2)));
        assert!(ff.eq_to_common_trunc(&expect));
        assert_eq!(ff.coeff(2), ratio(1, 2));
        assert_eq!(ff.coeff(4), ratio(1, 8));
    }

    #[test]
    fn c1_00_series() {
        // Ĉ⁽¹⁾(0,0) = sK = s + s⁵/4 + 9 s⁹/64 + ...
        let ff = formfactor_series(1, 0, 0, 12).unwrap();
        assert_eq!(ff.coeff(1), rat(1));
        assert_eq!(ff.coeff(5), ratio(1, 4));
        assert_eq!(ff.coeff(9), ratio(9, 64));
    }

    #[test]
    fn c2_01_kinematic_zero() {
        // zero of order n(n+1) = 6, leading 2^{-n²} = 1/16, next factor (1 + s²/4)
        let ff = formfactor_series(2, 0, 1, 12).unwrap();
        assert_eq!(ff.lead(), Some(6));
        assert_eq!(ff.coeff(6), ratio(1, 16));
        assert_eq!(ff.coeff(8), ratio(1, 64));
    }

    #[test]
    fn integrand_matches_projection() {
        for (n, m, noff) in [(2usize, 0u32, 0u32), (2, 0, 1), (3, 0, 1)] {
            let order = if n == 3 { 14 } else { 12 };
            let full = integrand(n, m, noff, order).unwrap();
            let direct = full
                .zero_frequency()
                .scale(&Rational::new(1.into(), crate::coeff::factorial(n as u32).to_integer()));
            let fast = formfactor_series(n, m, noff, order).unwrap();
            assert!(direct.eq_to_common_trunc(&fast), "n={n} N={noff}");
        }
    }

    #[test]
    fn numeric_matches_closed_forms() {
        let s = 0.3;
        let k = crate::elliptic::numeric_eval("K", s, None).unwrap();
        let expect = -0.5 + 0.5 * (1.0 + s * s) * k;
        let got = formfactor_numeric(1, 0, 1, s, 1e-11).unwrap();
        assert!((got - expect).abs() < 1e-10, "{got} vs {expect}");
        let s = 0.5;
        let k = crate::elliptic::numeric_eval("K", s, None).unwrap();
        let e = crate::elliptic::numeric_eval("E", s, None).unwrap();
        let got = formfactor_numeric(2, 0, 0, s, 1e-11).unwrap();
        assert!((got - k * (k - e) / 2.0).abs() < 1e-10);
    }

    #[test]
    fn numeric_kinematic_limit() {
        // n=1, M=0, N=0 vanishes as s -> 0 (like s)
        let a = formfactor_numeric(1, 0, 0, 0.05, 1e-10).unwrap();
        let b = formfactor_numeric(1, 0, 0, 0.025, 1e-10).unwrap();
        assert!(a.abs() < 0.06 && b.abs() < 0.03);
        assert!((a / b - 2.0).abs() < 0.01);
    }
}
