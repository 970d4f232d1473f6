//! The λ-extension of the nearest-neighbor row correlation `C±(0,1;λ)`:
//! the polynomial Ansatz for its form factors, fits against the integral
//! oracle, the elliptic closed form, and the structural checks behind it.

pub mod structure;
pub mod tables;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::coeff::{rat, ratio, Rational};
use crate::diagonal::Regime;
use crate::elliptic::{EllipticContext, EllipticError};
use crate::kepoly::KEPolynomial;
use crate::series::{arcsin_series, GradedSeries, SeriesError};
use crate::{QBiSeries, QSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OffdiagError {
    #[error("series error: {0}")]
    Series(#[from] SeriesError),
    #[error("elliptic error: {0}")]
    Elliptic(#[from] EllipticError),
    #[error("oracle order too low: the fit system is not overdetermined")]
    NotOverdetermined,
    #[error("fit basis is rank deficient at n = {0}")]
    RankDeficient(u32),
    #[error("the Ansatz is inconsistent with the oracle: {0}")]
    InconsistentFit(String),
    #[error("|λ| must be at most 1 for the numeric track")]
    Domain,
}

/// Fitted (or table-backed) Ansatz data for `Ĉ⁽ⁿ⁾(0,1)`:
/// `Σ_i a_i (EK)^i + (1+s²) Σ_{i,j} b_{i,j} E^j K^{i-j} p_{i-2j}(s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnsatzFit {
    pub n: u32,
    /// `a_i`, `i = 0..⌊n/2⌋`
    pub a: Vec<Rational>,
    /// `b[i-1][j]`, `i = 1..n`, `j = 0..⌊(i-1)/2⌋`
    pub b: Vec<Vec<Rational>>,
    /// `p_1..p_n` as ascending integer coefficients in `s²` (monic)
    pub p: Vec<Vec<i64>>,
}

impl AnsatzFit {
    pub fn to_json(&self) -> String {
        let fmt_rat = |q: &Rational| format!("\"{}\"", crate::series::format_coeff(q));
        let mut out = format!("{{\"n\":{},\"a\":[", self.n);
        out.push_str(&self.a.iter().map(&fmt_rat).collect::<Vec<_>>().join(","));
        out.push_str("],\"b\":[");
        out.push_str(
            &self
                .b
                .iter()
                .map(|row| format!("[{}]", row.iter().map(&fmt_rat).collect::<Vec<_>>().join(",")))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("],\"p\":[");
        out.push_str(
            &self
                .p
                .iter()
                .map(|row| format!("[{}]", row.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push_str("]}");
        out
    }
}

/// The Ansatz as an explicit `(K,E)`-polynomial.
pub fn ansatz_kepoly(fit: &AnsatzFit) -> KEPolynomial {
    let mut acc = KEPolynomial::zero();
    for (i, ai) in fit.a.iter().enumerate() {
        acc = acc.add(&KEPolynomial::term(i as u8, i as u8, &[ai.clone()]));
    }
    for (i1, row) in fit.b.iter().enumerate() {
        let i = i1 + 1;
        for (j, bij) in row.iter().enumerate() {
            let pn = &fit.p[i - 2 * j - 1];
            // (1+s²) p(s²) b_ij
            let base: Vec<Rational> = pn.iter().map(|&c| bij * Rational::from_integer(c.into())).collect();
            let mut sum = base.clone();
            sum.push(Rational::zero());
            for (m, v) in base.iter().enumerate() {
                sum[m + 1] += v;
            }
            acc = acc.add(&KEPolynomial::term((i - j) as u8, j as u8, &sum));
        }
    }
    acc
}

/// Exact `s`-series of the Ansatz.
pub fn ansatz_evaluate(fit: &AnsatzFit, k: &QSeries, e: &QSeries, ns: i64) -> QSeries {
    ansatz_kepoly(fit).eval_series(k, e, ns)
}

/// Exact Gaussian elimination; returns `None` on rank deficiency and
/// `Some(Err(row))` when an inconsistent row survives.
fn solve_exact(mut m: Vec<Vec<Rational>>, mut rhs: Vec<Rational>, unknowns: usize) -> Option<Result<Vec<Rational>, usize>> {
    let rows = m.len();
    let mut pivot_of_col = vec![usize::MAX; unknowns];
    let mut used = vec![false; rows];
    for col in 0..unknowns {
        let pivot = (0..rows).find(|&r| !used[r] && !m[r][col].is_zero())?;
        used[pivot] = true;
        pivot_of_col[col] = pivot;
        let inv = Rational::one() / m[pivot][col].clone();
        for c in col..unknowns {
            m[pivot][c] = &m[pivot][c] * &inv;
        }
        rhs[pivot] = &rhs[pivot] * &inv;
        for r in 0..rows {
            if r != pivot && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in col..unknowns {
                    let sub = &f * &m[pivot][c];
                    m[r][c] -= sub;
                }
                let sub = &f * &rhs[pivot];
                rhs[r] -= sub;
            }
        }
    }
    // consistency of the remaining rows
    for r in 0..rows {
        if !used[r] && !rhs[r].is_zero() {
            return Some(Err(r));
        }
    }
    Some(Ok(pivot_of_col.iter().map(|&r| rhs[r].clone()).collect()))
}

/// Recover the `n ≤ 4` Ansatz rows from an oracle series by an exact linear
/// solve in the basis `{(EK)^i} ∪ {E^j K^{i-j} (1+s²) s^{2m}}`, then factor
/// the shared `p`-polynomials.
pub fn ansatz_fit_from_oracle(n: u32, oracle: &QSeries) -> Result<AnsatzFit, OffdiagError> {
    assert!((1..=4).contains(&n), "the fit is specified for n <= 4");
    // unknown layout: a_0..a_{n/2}, then d_{i,j,m} for i = 1.., j, m
    let mut basis: Vec<(String, QSeries)> = Vec::new();
    let ns = oracle.trunc();
    let k = crate::elliptic::hypergeometric_k(ns + 4);
    let e = crate::elliptic::hypergeometric_e(ns + 4);
    let one_plus_s2 = QSeries::from_terms([(0, rat(1)), (2, rat(1))], crate::series::EXACT);
    let mut kpow = vec![QSeries::one(ns + 4)];
    for i in 1..=n as usize {
        kpow.push(kpow[i - 1].mul(&k).truncate_to(ns + 4));
    }
    let mut epow = vec![QSeries::one(ns + 4)];
    for j in 1..=(n as usize) / 2 + 1 {
        epow.push(epow[j - 1].mul(&e).truncate_to(ns + 4));
    }
    for i in 0..=(n as usize) / 2 {
        basis.push((format!("a{i}"), kpow[i].mul(&epow[i]).truncate_to(ns)));
    }
    let mut layout: Vec<(usize, usize, usize)> = Vec::new(); // (i, j, m)
    for i in 1..=n as usize {
        for j in 0..=(i - 1) / 2 {
            let core = kpow[i - j].mul(&epow[j]).mul(&one_plus_s2).truncate_to(ns);
            for m in 0..(i - 2 * j) {
                basis.push((format!("d{i}{j}{m}"), core.shift(2 * m as i64).truncate_to(ns)));
                layout.push((i, j, m));
            }
        }
    }
    let unknowns = basis.len();
    // equations from even s-orders (everything in play is even in s)
    let max_order = (ns - 1) / 2;
    let rows: Vec<i64> = (0..=max_order).map(|r| 2 * r).collect();
    if rows.len() < unknowns + 2 {
        return Err(OffdiagError::NotOverdetermined);
    }
    let matrix: Vec<Vec<Rational>> = rows.iter().map(|&o| basis.iter().map(|(_, f)| f.coeff(o)).collect()).collect();
    let rhs: Vec<Rational> = rows.iter().map(|&o| oracle.coeff(o)).collect();
    // odd orders of the oracle must vanish outright
    for o in (1..ns).step_by(2) {
        if !oracle.coeff(o).is_zero() {
            return Err(OffdiagError::InconsistentFit(format!("odd s-order {o} present")));
        }
    }
    let sol = match solve_exact(matrix, rhs, unknowns) {
        None => return Err(OffdiagError::RankDeficient(n)),
        Some(Err(row)) => {
            return Err(OffdiagError::InconsistentFit(format!("residual at s-order {}", 2 * row)))
        }
        Some(Ok(s)) => s,
    };
    let a: Vec<Rational> = sol[..=(n as usize) / 2].to_vec();
    // regroup d into b and p, checking the shared-p consistency
    let mut p: Vec<Option<Vec<Rational>>> = vec![None; n as usize];
    let mut b: Vec<Vec<Rational>> = (1..=n as usize).map(|i| vec![Rational::zero(); (i - 1) / 2 + 1]).collect();
    let offset = (n as usize) / 2 + 1;
    let mut idx = 0;
    let mut groups: Vec<((usize, usize), Vec<Rational>)> = Vec::new();
    while idx < layout.len() {
        let (i, j, _) = layout[idx];
        let deg = i - 2 * j;
        let coeffs: Vec<Rational> = (0..deg).map(|m| sol[offset + idx + m].clone()).collect();
        groups.push(((i, j), coeffs));
        idx += deg;
    }
    for ((i, j), coeffs) in groups {
        let top = coeffs.last().cloned().unwrap_or_else(Rational::zero);
        if top.is_zero() {
            return Err(OffdiagError::InconsistentFit(format!(
                "vanishing top coefficient in the (i,j) = ({i},{j}) block"
            )));
        }
        let pn: Vec<Rational> = coeffs.iter().map(|c| c / &top).collect();
        let slot = i - 2 * j - 1;
        match &p[slot] {
            None => p[slot] = Some(pn),
            Some(existing) => {
                if existing != &pn {
                    return Err(OffdiagError::InconsistentFit(format!(
                        "p_{} differs between blocks",
                        slot + 1
                    )));
                }
            }
        }
        b[i - 1][j] = top;
    }
    let p_int: Vec<Vec<i64>> = p
        .into_iter()
        .enumerate()
        .map(|(slot, pn)| match pn {
            Some(v) => v
                .iter()
                .map(|c| {
                    if c.is_integer() {
                        Ok(i64::try_from(c.to_integer()).map_err(|_| ())?)
                    } else {
                        Err(())
                    }
                })
                .collect::<Result<Vec<i64>, ()>>()
                .map_err(|_| OffdiagError::InconsistentFit(format!("p_{} is not integral", slot + 1))),
            None => Ok(tables::p_poly(slot as u32 + 1)),
        })
        .collect::<Result<_, _>>()?;
    Ok(AnsatzFit { n, a, b, p: p_int })
}

/// Result of the kinematic-zero conditions on a fit.
#[derive(Debug, Clone)]
pub struct ZeroConditionReport {
    pub n: u32,
    pub zero_order_ok: bool,
    pub leading_ok: bool,
    pub next_factor_ok: bool,
    pub details: String,
}

impl ZeroConditionReport {
    pub fn passed(&self) -> bool {
        self.zero_order_ok && self.leading_ok && self.next_factor_ok
    }
}

/// Verify the `s`-zero of order `n(n+1)` with leading `2^{-n²}` and next
/// factor `(1 + s²/4)`.
pub fn zero_condition_check(fit: &AnsatzFit) -> ZeroConditionReport {
    let n = fit.n;
    let target = (n * (n + 1)) as i64;
    let ns = target + 6;
    let k = crate::elliptic::hypergeometric_k(ns);
    let e = crate::elliptic::hypergeometric_e(ns);
    let series = ansatz_evaluate(fit, &k, &e, ns);
    let zero_order_ok = series.lead() == Some(target);
    let expected_lead = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(n * n));
    let leading_ok = series.coeff(target) == expected_lead;
    let next_factor_ok = series.coeff(target + 2) == expected_lead * ratio(1, 4);
    ZeroConditionReport {
        n,
        zero_order_ok,
        leading_ok,
        next_factor_ok,
        details: format!(
            "lead {:?} (want {target}), coeff {} (want 2^-{})",
            series.lead(),
            series.coeff(target),
            n * n
        ),
    }
}

/// `g_ev` and `g_odd` of the closed form, as bivariate series in `(y, s)`
/// where the Jacobi argument is `y/2`.
pub fn g_pair(ctx: &EllipticContext) -> Result<(QBiSeries, QBiSeries), OffdiagError> {
    let j = ctx.jacobi();
    let half = GradedSeries::constant(ratio(1, 2), crate::series::EXACT);
    let sn = j.sn.scale_x_by(&half);
    let cn = j.cn.scale_x_by(&half);
    let dn = j.dn.scale_x_by(&half);
    let s2 = QSeries::monomial(2, rat(1), crate::series::EXACT);
    let sn2 = sn.mul(&sn);
    let one = QBiSeries::one(sn.nx(), sn.ns());
    let g_ev = cn.mul(&dn).div(&one.sub(&sn2.scale_s(&s2)))?;
    let g_odd = sn
        .scale_s(&QSeries::from_terms([(0, rat(1)), (2, rat(1))], crate::series::EXACT))
        .div(&one.add(&sn2.scale_s(&s2)))?;
    Ok((g_ev, g_odd))
}

/// `sin(cx)` and `cos(cx)` as exact x-series for rational `c`.
pub(crate) fn sin_cx(c: &Rational, nx: i64) -> QSeries {
    let mut f = QSeries::zero(nx);
    let mut coeff = c.clone();
    let mut k: i64 = 0;
    while 2 * k + 1 < nx {
        if k > 0 {
            coeff *= c * c;
            coeff /= Rational::from_integer((2 * k * (2 * k + 1)).into());
        }
        let signed = if k % 2 == 1 { -coeff.clone() } else { coeff.clone() };
        f = f.add(&QSeries::monomial(2 * k + 1, signed, nx));
        k += 1;
    }
    f
}

pub(crate) fn cos_cx(c: &Rational, nx: i64) -> QSeries {
    let mut f = QSeries::zero(nx);
    let mut coeff = Rational::one();
    let mut k: i64 = 0;
    while 2 * k < nx {
        if k > 0 {
            coeff *= c * c;
            coeff /= Rational::from_integer(((2 * k - 1) * 2 * k).into());
        }
        let signed = if k % 2 == 1 { -coeff.clone() } else { coeff.clone() };
        f = f.add(&QSeries::monomial(2 * k, signed, nx));
        k += 1;
    }
    f
}

/// Closed form of `C±(0,1;x)` as a bivariate series in `(x, s)`.
///
/// The trigonometric prefactors are folded through the bracket so nothing
/// singular appears:
/// `C⁻ = Φ (cos(x/2) g_ev - sin(x/2) g_odd)/cos x`,
/// `C⁺ = -(1/s) Φ (sin(x/2) g_ev - cos(x/2) g_odd)/cos x`.
pub fn c01_closed_form(regime: Regime, ctx: &EllipticContext) -> Result<QBiSeries, OffdiagError> {
    let (g_ev, g_odd) = g_pair(ctx)?;
    let half = ratio(1, 2);
    let nx = ctx.nx();
    // substitute y = xK into the g's
    let g_ev = g_ev.scale_x_by(ctx.ell_k());
    let g_odd = g_odd.scale_x_by(ctx.ell_k());
    let sin_h = QBiSeries::from_x_series(&sin_cx(&half, nx));
    let cos_h = QBiSeries::from_x_series(&cos_cx(&half, nx));
    let sec = QBiSeries::from_x_series(&crate::series::cos_series(nx)).pow_i(-1)?;
    let phi = ctx.phi();
    Ok(match regime {
        Regime::Minus => phi.mul(&cos_h.mul(&g_ev).sub(&sin_h.mul(&g_odd))).mul(&sec),
        Regime::Plus => phi
            .mul(&sin_h.mul(&g_ev).sub(&cos_h.mul(&g_odd)))
            .mul(&sec)
            .mul_monomial(0, -1)
            .scale_rational(&rat(-1)),
    })
}

/// Numeric closed form at `(s, λ)`; `x = arcsin λ` on the principal branch.
pub fn c01_numeric(regime: Regime, s: f64, lambda: f64) -> Result<f64, OffdiagError> {
    if !(-1.0..=1.0).contains(&lambda) {
        return Err(OffdiagError::Domain);
    }
    let x = lambda.asin();
    c01_numeric_at_x(regime, s, x)
}

/// Numeric closed form at explicit `x`.
pub fn c01_numeric_at_x(regime: Regime, s: f64, x: f64) -> Result<f64, OffdiagError> {
    let ctx = crate::NumericCtx::new(s)?;
    let u = x * ctx.cap_k() / 2.0;
    let sn = ctx.sn(u)?;
    let cn = ctx.cn(u)?;
    let dn = ctx.dn(u)?;
    let s2 = s * s;
    let g_ev = cn * dn / (1.0 - s2 * sn * sn);
    let g_odd = (1.0 + s2) * sn / (1.0 + s2 * sn * sn);
    let phi = ctx.phi_at(x)?;
    Ok(match regime {
        Regime::Minus => phi * ((x / 2.0).cos() * g_ev - (x / 2.0).sin() * g_odd) / x.cos(),
        Regime::Plus => -phi * ((x / 2.0).sin() * g_ev - (x / 2.0).cos() * g_odd) / (s * x.cos()),
    })
}

/// λ-coefficients of the closed form after `x = arcsin λ`, with the regime
/// prefactor stripped: entry `n` approximates `Ĉ⁽ⁿ⁾(0,1)`.
pub fn c01_form_factors(regime: Regime, ctx: &EllipticContext, n_max: u32) -> Result<Vec<QSeries>, OffdiagError> {
    let series = c01_closed_form(regime, ctx)?;
    let ns = series.ns();
    let kp_qtr_inv = crate::elliptic::one_minus_t_pow(&ratio(-1, 4), ns + 8);
    let stripped = match regime {
        Regime::Plus => series.scale_s(&kp_qtr_inv).mul_monomial(0, 1),
        Regime::Minus => series.scale_s(&kp_qtr_inv),
    };
    let in_lambda = stripped.compose_x(&arcsin_series::<Rational>(series.nx()))?;
    Ok((0..=n_max as i64).map(|n| in_lambda.x_slice(n)).collect())
}

/// The two Appendix combination identities: every monomial below the stated
/// total degree must cancel.
pub fn b_combination_min_degree(which: u32) -> (KEPolynomial, u8) {
    let f = tables::printed_form;
    match which {
        3 => (
            f(3)
                .add(&f(2).scale(&ratio(1, 2)))
                .sub(&f(1).scale(&ratio(7, 24)))
                .sub(&KEPolynomial::constant(ratio(1, 48))),
            3,
        ),
        4 => (
            f(4)
                .add(&f(3).scale(&ratio(1, 2)))
                .sub(&f(2).scale(&ratio(11, 24)))
                .sub(&f(1).scale(&ratio(5, 48)))
                .add(&KEPolynomial::constant(ratio(1, 384))),
            4,
        ),
        _ => panic!("combinations exist for which = 3, 4"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_match_printed_forms() {
        for n in 1..=4 {
            let from_tables = ansatz_kepoly(&tables::table_fit(n));
            let printed = tables::printed_form(n);
            assert_eq!(from_tables, printed, "n = {n}");
        }
    }

    #[test]
    fn ansatz_n1_n2_series() {
        let k = crate::elliptic::hypergeometric_k(24);
        let e = crate::elliptic::hypergeometric_e(24);
        // n=1: -1/2 + (1+s²)K/2
        let f1 = ansatz_evaluate(&tables::table_fit(1), &k, &e, 20);
        assert_eq!(f1.coeff(0), rat(0));
        assert_eq!(f1.coeff(2), ratio(1, 2));
        // n=2 zero structure: s^6/16 (1 + s²/4 + ...)
        let f2 = ansatz_evaluate(&tables::table_fit(2), &k, &e, 20);
        assert_eq!(f2.lead(), Some(6));
        assert_eq!(f2.coeff(6), ratio(1, 16));
    }

    #[test]
    fn zero_conditions_tables() {
        for n in 1..=6 {
            let rep = zero_condition_check(&tables::table_fit(n));
            assert!(rep.passed(), "n = {n}: {}", rep.details);
        }
    }

    #[test]
    fn zero_condition_negative_control() {
        let mut fit = tables::table_fit(2);
        fit.b[1][0] += ratio(1, 64);
        let rep = zero_condition_check(&fit);
        assert!(!rep.passed());
    }

    #[test]
    fn fit_recovers_tables_n2() {
        let k = crate::elliptic::hypergeometric_k(40);
        let e = crate::elliptic::hypergeometric_e(40);
        let oracle = ansatz_evaluate(&tables::table_fit(2), &k, &e, 36);
        let fit = ansatz_fit_from_oracle(2, &oracle).unwrap();
        assert_eq!(fit, tables::table_fit(2));
    }

    #[test]
    fn fit_inconsistent_oracle() {
        let k = crate::elliptic::hypergeometric_k(40);
        let e = crate::elliptic::hypergeometric_e(40);
        let mut oracle = ansatz_evaluate(&tables::table_fit(2), &k, &e, 36);
        oracle = oracle.add(&QSeries::monomial(20, ratio(1, 7), 36));
        assert!(matches!(
            ansatz_fit_from_oracle(2, &oracle),
            Err(OffdiagError::InconsistentFit(_))
        ));
    }

    #[test]
    fn b_combinations() {
        let (c3, d3) = b_combination_min_degree(3);
        assert!(c3.min_degree() >= d3, "combo 3: {}", c3);
        let (c4, d4) = b_combination_min_degree(4);
        assert!(c4.min_degree() >= d4, "combo 4: {}", c4);
    }

    #[test]
    fn c01_lambda0_limit() {
        // C⁻(0,1;0) = (1-t)^{1/4}
        let ctx = EllipticContext::new(8, 24);
        let c = c01_closed_form(Regime::Minus, &ctx).unwrap();
        let x0 = c.x_slice(0);
        assert!(x0.eq_to_common_trunc(&crate::elliptic::one_minus_t_pow(&ratio(1, 4), 24)));
    }

    #[test]
    fn c01_matches_oracle_lowest_orders() {
        let ctx = EllipticContext::new(8, 24);
        let k = crate::elliptic::hypergeometric_k(22);
        let e = crate::elliptic::hypergeometric_e(22);
        let ff = c01_form_factors(Regime::Minus, &ctx, 2).unwrap();
        let expect = ansatz_evaluate(&tables::table_fit(2), &k, &e, 20);
        assert!(ff[2].eq_to_common_trunc(&expect));
        let ffp = c01_form_factors(Regime::Plus, &ctx, 1).unwrap();
        let expect1 = ansatz_evaluate(&tables::table_fit(1), &k, &e, 20);
        assert!(ffp[1].eq_to_common_trunc(&expect1));
    }

    #[test]
    fn c01_numeric_symmetric_point() {
        // λ=1: C⁺ = (√(1+s²)/(2s))(1+(s²-1)K), C⁻ = (√(1+s²)/2)(1-(s²-1)K)
        let s = 0.5f64;
        let k = crate::elliptic::numeric_eval("K", s, None).unwrap();
        let plus_expect = (1.0 + s * s).sqrt() / (2.0 * s) * (1.0 + (s * s - 1.0) * k);
        let minus_expect = (1.0 + s * s).sqrt() / 2.0 * (1.0 - (s * s - 1.0) * k);
        // Richardson in ε² around x = π/2
        for (regime, expect) in [(Regime::Plus, plus_expect), (Regime::Minus, minus_expect)] {
            let f = |eps: f64| c01_numeric_at_x(regime, s, std::f64::consts::FRAC_PI_2 - eps).unwrap();
            let (f1, f2, f3) = (f(2e-2), f(1e-2), f(5e-3));
            let r1 = (4.0 * f2 - f1) / 3.0;
            let r2 = (4.0 * f3 - f2) / 3.0;
            let val = (16.0 * r2 - r1) / 15.0;
            assert!((val - expect).abs() < 1e-10, "{}: {val} vs {expect}", regime.name());
        }
    }
}
