//! λ-extended diagonal correlation functions `C±(N,N;λ)`.
//!
//! Initial conditions `C₀±`, `C₁±` come from theta-function closed forms with
//! `λ = sin x`; the Toda-type recurrence
//!
//! ```text
//! t (log C_N)'' + (log C_N)' + N²/(1-t)² = (N²-¼)/(1-t)² · C_{N+1} C_{N-1} / C_N²
//! ```
//!
//! then produces every higher `N`, either on bivariate series or in the
//! closed-form algebra. A sigma-form Painlevé VI residual and the n-particle
//! form-factor extraction provide independent verification hooks.

pub mod printed;

use thiserror::Error;

use crate::coeff::{factorial, pochhammer, rat, ratio, Rational};
use crate::diffalg::{DiffAlgElement, DiffAlgError, Mono, MultiPoly, Prefactor, QT};
use crate::elliptic::{hypergeometric_2f1, EllipticContext};
use crate::kepoly::{sp, KEPolynomial};
use crate::series::{arcsin_series, cos_series, SeriesError, EXACT};
use crate::{QBiSeries, QSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagonalError {
    #[error("series error: {0}")]
    Series(#[from] SeriesError),
    #[error("closed-form error: {0}")]
    DiffAlg(#[from] DiffAlgError),
    #[error("provable truncation order dropped below one usable term")]
    TruncationExhausted,
    #[error("inputs must be consecutive correlations of one regime")]
    InconsistentInputs,
}

/// Temperature regime: `Plus` is `T > T_c`, `Minus` is `T < T_c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Plus,
    Minus,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Plus => "plus",
            Regime::Minus => "minus",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "plus" | "+" => Ok(Regime::Plus),
            "minus" | "-" => Ok(Regime::Minus),
            _ => Err(format!("unknown regime `{s}` (expected plus|minus)")),
        }
    }
}

/// Engine choice for the Toda step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Series,
    ClosedForm,
}

/// One λ-extended diagonal correlation `C±(N,N;λ)` with `λ = sin x`.
#[derive(Debug, Clone)]
pub struct DiagonalCorrelation {
    pub regime: Regime,
    pub n: u32,
    pub series: QBiSeries,
    pub closed_form: Option<DiffAlgElement>,
}

/// `1/cos x` as an s-exact bivariate series.
fn sec_x(nx: i64) -> QBiSeries {
    QBiSeries::from_x_series(&cos_series::<Rational>(nx))
        .pow_i(-1)
        .expect("cos is a unit")
}

/// `C₀±` from the theta-function closed forms.
pub fn c0(regime: Regime, ctx: &EllipticContext) -> DiagonalCorrelation {
    match regime {
        Regime::Minus => {
            // theta4(x|tau)/theta3(0|tau)
            let series = ctx.phi();
            DiagonalCorrelation { regime, n: 0, series, closed_form: Some(closed_initial(regime, 0)) }
        }
        Regime::Plus => {
            // (1-t)^{1/4} t^{-1/4} theta1(x|tau)/theta4(0|tau);
            // theta1 carries q^{1/4}, so all s-exponents stay non-negative
            let series = ctx
                .theta_fn(1)
                .div(&QBiSeries::from_s_series(ctx.theta_const(4)))
                .expect("theta4(0) is a unit")
                .scale_s(&ctx.kp_quarter())
                .mul_monomial(0, -1);
            DiagonalCorrelation { regime, n: 0, series, closed_form: Some(closed_initial(regime, 0)) }
        }
    }
}

/// `C₁±` with the `cos x` normalization fixed by the form-factor expansions.
pub fn c1(regime: Regime, ctx: &EllipticContext) -> DiagonalCorrelation {
    let sec = sec_x(ctx.nx());
    let (s_gen, c_gen, x_gen) = ctx.scx();
    let phi = ctx.phi();
    match regime {
        Regime::Minus => {
            // (1/cos x) Φ (cn dn + sn X)
            let series = phi.mul(&c_gen.add(&s_gen.mul(&x_gen))).mul(&sec);
            DiagonalCorrelation { regime, n: 1, series, closed_form: Some(closed_initial(regime, 1)) }
        }
        Regime::Plus => {
            // (1/cos x) Φ X t^{-1/2}
            let series = phi.mul(&x_gen).mul(&sec).mul_monomial(0, -2);
            DiagonalCorrelation { regime, n: 1, series, closed_form: Some(closed_initial(regime, 1)) }
        }
    }
}

/// `(1-t)^{-2}` truncated near the working order.
fn inv_one_minus_t_sq(ns: i64) -> QSeries {
    QSeries::from_terms([(0, rat(1)), (4, rat(-1))], EXACT)
        .truncate_to(ns + 16)
        .pow_i(-2)
        .expect("1-t is a unit")
}

/// One Toda step: `C_{N+1}` from `(C_{N-1}, C_N)`.
pub fn toda_step(
    c_prev: &DiagonalCorrelation,
    c_curr: &DiagonalCorrelation,
    engine: Engine,
) -> Result<DiagonalCorrelation, DiagonalError> {
    if c_prev.regime != c_curr.regime || c_prev.n + 1 != c_curr.n {
        return Err(DiagonalError::InconsistentInputs);
    }
    let n = c_curr.n;
    let b_n = ratio(4, 4 * (n as i64) * (n as i64) - 1); // 1/(N² - 1/4)
    let series = toda_step_series(&c_prev.series, &c_curr.series, n, &b_n)?;
    let closed_form = match engine {
        Engine::Series => None,
        Engine::ClosedForm => {
            let prev = c_prev.closed_form.as_ref().ok_or(DiagonalError::InconsistentInputs)?;
            let curr = c_curr.closed_form.as_ref().ok_or(DiagonalError::InconsistentInputs)?;
            match toda_step_closed(prev, curr, n, &b_n) {
                Ok(e) => Some(e),
                // No divisibility proof exists; certify by series instead.
                Err(DiffAlgError::NotDivisible) => None,
                Err(e) => return Err(e.into()),
            }
        }
    };
    Ok(DiagonalCorrelation { regime: c_curr.regime, n: n + 1, series, closed_form })
}

fn toda_step_series(
    prev: &QBiSeries,
    curr: &QBiSeries,
    n: u32,
    b_n_inv: &Rational,
) -> Result<QBiSeries, DiagonalError> {
    let ns = curr.ns();
    let ld = curr.log_derivative_t()?;
    let t = QSeries::monomial(4, rat(1), EXACT);
    let n2 = rat((n as i64) * (n as i64));
    // bracket = t (log C)'' + (log C)' + N²/(1-t)²
    let bracket = ld
        .derivative_t()
        .scale_s(&t)
        .add(&ld)
        .add(&QBiSeries::from_s_series(&inv_one_minus_t_sq(ns).scale(&n2)));
    let omt2 = QSeries::from_terms([(0, rat(1)), (4, rat(-2)), (8, rat(1))], EXACT);
    let next = curr
        .mul(curr)
        .mul(&bracket)
        .scale_s(&omt2)
        .scale(b_n_inv)
        .div(prev)?;
    if next.is_zero_to_trunc() || next.ns() <= next.s_lead() || next.nx() <= next.x_lead() {
        return Err(DiagonalError::TruncationExhausted);
    }
    Ok(next)
}

fn toda_step_closed(
    prev: &DiffAlgElement,
    curr: &DiffAlgElement,
    n: u32,
    b_n_inv: &Rational,
) -> Result<DiffAlgElement, DiffAlgError> {
    let dc = curr.d_dt();
    let d2c = dc.d_dt();
    let t = QT::monomial(Rational::from_integer(1.into()), 1, 0);
    let n2_omt2 = QT::monomial(Rational::from_integer(((n as i64) * (n as i64)).into()), 0, -2);
    // numer = C (t C'' + C' + N²(1-t)^{-2} C) - t C'^2: two big products
    let g = d2c.scale_qt(&t).add(&dc)?.add(&curr.scale_qt(&n2_omt2))?;
    let numer = curr.mul(&g).sub(&dc.square().scale_qt(&t))?;
    let quotient = numer.exact_divide(prev)?;
    Ok(quotient.scale_qt(&QT::monomial(b_n_inv.clone(), 0, 2)))
}

/// Initial `ns` needed so `C_target` is provable to absolute order `want_ns`.
///
/// Each step costs two t-derivatives plus division shrinkage; the plus
/// regime additionally pays for the growing `s`-leads `2N`.
pub fn required_initial_ns(regime: Regime, target_n: u32, want_ns: i64) -> i64 {
    let n = target_n as i64;
    let base = want_ns + 12 * n.max(1) + 8;
    match regime {
        Regime::Minus => base,
        Regime::Plus => base + n * n + 2 * n,
    }
}

/// Run the recurrence from `(C₀, C₁)` up to `C_target`, returning all of
/// `C_0..=C_target`. Fails fast when the context cannot support the target.
pub fn toda_sequence(
    regime: Regime,
    ctx: &EllipticContext,
    target_n: u32,
    engine: Engine,
) -> Result<Vec<DiagonalCorrelation>, DiagonalError> {
    let mut out = vec![c0(regime, ctx)];
    if target_n >= 1 {
        out.push(c1(regime, ctx));
    }
    for n in 1..target_n {
        let next = toda_step(&out[(n - 1) as usize], &out[n as usize], engine)?;
        out.push(next);
    }
    Ok(out)
}

/// The closed-form initial condition alone (no series, no context).
pub fn closed_initial(regime: Regime, n: u32) -> DiffAlgElement {
    match (regime, n) {
        (Regime::Minus, 0) => DiffAlgElement::new(
            Prefactor { phi: 1, ..Default::default() },
            MultiPoly::one(),
            MultiPoly::zero(),
        ),
        (Regime::Plus, 0) => DiffAlgElement::new(
            Prefactor { phi: 1, ..Default::default() },
            MultiPoly::monomial(Mono { s: 1, ..Mono::ONE }, QT::one()),
            MultiPoly::zero(),
        ),
        (Regime::Minus, 1) => DiffAlgElement::new(
            Prefactor { phi: 1, cosx: -1, ..Default::default() },
            MultiPoly::monomial(Mono { s: 1, x: 1, ..Mono::ONE }, QT::one()),
            MultiPoly::one(),
        ),
        (Regime::Plus, 1) => DiffAlgElement::new(
            Prefactor { phi: 1, cosx: -1, t2: -1, omt4: 0 },
            MultiPoly::monomial(Mono { x: 1, ..Mono::ONE }, QT::one()),
            MultiPoly::zero(),
        ),
        _ => panic!("closed initial conditions exist for N = 0, 1"),
    }
}

/// Closed-form-only recurrence: no series track, no elliptic context.
/// Returns `C_0..=C_target` as algebra elements.
pub fn toda_closed_sequence(regime: Regime, target_n: u32) -> Result<Vec<DiffAlgElement>, DiagonalError> {
    let mut out = vec![closed_initial(regime, 0)];
    if target_n >= 1 {
        out.push(closed_initial(regime, 1));
    }
    for n in 1..target_n {
        let b_n_inv = ratio(4, 4 * (n as i64) * (n as i64) - 1);
        let next = toda_step_closed(&out[(n - 1) as usize], &out[n as usize], n, &b_n_inv)?;
        out.push(next);
    }
    Ok(out)
}

/// `σ_N` of the sigma-form Painlevé VI, from the stored series.
pub fn sigma(c: &DiagonalCorrelation) -> Result<QBiSeries, DiagonalError> {
    let t_t1 = QSeries::from_terms([(8, rat(1)), (4, rat(-1))], EXACT); // t(t-1)
    let ld = c.series.log_derivative_t()?;
    let shift = match c.regime {
        Regime::Plus => QSeries::monomial(0, ratio(1, 4), EXACT),
        Regime::Minus => QSeries::monomial(4, ratio(1, 4), EXACT),
    };
    Ok(ld.scale_s(&t_t1).sub(&QBiSeries::from_s_series(&shift.truncate_to(c.series.ns()))))
}

/// Full left-minus-right residual of the sigma-form equation; identically
/// zero (to provable truncation) for genuine correlations.
pub fn sigma_residual(c: &DiagonalCorrelation) -> Result<QBiSeries, DiagonalError> {
    let s = sigma(c)?;
    sigma_residual_of(&s, c.n)
}

/// Residual for a given sigma function and integer `N`.
pub fn sigma_residual_of(s: &QBiSeries, n: u32) -> Result<QBiSeries, DiagonalError> {
    let t_t1 = QSeries::from_terms([(8, rat(1)), (4, rat(-1))], EXACT);
    let t = QSeries::monomial(4, rat(1), EXACT);
    let t1 = QSeries::from_terms([(4, rat(1)), (0, rat(-1))], EXACT); // t - 1
    let sp = s.derivative_t();
    let spp = sp.derivative_t();
    let lhs = spp.scale_s(&t_t1);
    let lhs2 = lhs.mul(&lhs);
    let a = sp.scale_s(&t1).sub(s); // (t-1)σ' - σ
    let quarter = QBiSeries::from_s_series(&QSeries::monomial(0, ratio(1, 4), EXACT).truncate_to(s.ns()));
    let b = a.sub(&quarter); // (t-1)σ' - σ - 1/4
    let c2 = sp.scale_s(&t).sub(s); // tσ' - σ
    let middle = sp.mul(&b).mul(&c2).scale_rational(&rat(4));
    let rhs = a.mul(&a).scale_rational(&rat((n as i64) * (n as i64)));
    Ok(lhs2.add(&middle).sub(&rhs))
}

/// λ-coefficients after composing with `x = arcsin λ` and stripping the
/// regime prefactor: index `n` holds `Ĉ⁽ⁿ⁾(N,N)` (odd `n` for plus, even for
/// minus; the minus entry at `n = 0` is the constant 1).
pub fn extract_form_factors(c: &DiagonalCorrelation, n_max: u32) -> Result<Vec<QSeries>, DiagonalError> {
    let ns = c.series.ns();
    let kp_qtr_inv = crate::elliptic::one_minus_t_pow(&ratio(-1, 4), ns + 8);
    let stripped = match c.regime {
        // C+ = s^{-1}(1-t)^{1/4} Σ λ^{2n+1} Ĉ^{(2n+1)}
        Regime::Plus => c.series.scale_s(&kp_qtr_inv).mul_monomial(0, 1),
        // C- = (1-t)^{1/4} (1 + Σ λ^{2n} Ĉ^{(2n)})
        Regime::Minus => c.series.scale_s(&kp_qtr_inv),
    };
    let arcsin = arcsin_series::<Rational>(c.series.nx());
    let in_lambda = stripped.compose_x(&arcsin)?;
    let mut out = Vec::new();
    for n in 0..=n_max as i64 {
        out.push(in_lambda.x_slice(n));
    }
    Ok(out)
}

/// The printed ratio `Ĉ⁽ⁿ⁾(0,0) / (sK)` (odd `n`) or `Ĉ⁽ⁿ⁾(0,0) / K`
/// (even `n`) as an explicit `(K,E)`-polynomial, `n = 1..7`.
pub fn appendix_a_reduced(n: u32) -> KEPolynomial {
    use KEPolynomial as P;
    let term = P::term;
    let t_term = P::t_term;
    match n {
        1 => P::constant(rat(1)),
        2 => term(1, 0, &sp(&[(1, 2)])).add(&term(0, 1, &sp(&[(-1, 2)]))),
        3 => P::constant(ratio(1, 6))
            .add(&term(1, 1, &sp(&[(-1, 2)])))
            .add(&t_term(2, 0, &sp(&[(1, 3), (-1, 6)]))),
        4 => term(1, 0, &sp(&[(1, 6)]))
            .add(&t_term(3, 0, &sp(&[(1, 8), (-1, 12)])))
            .add(&term(0, 1, &sp(&[(-1, 6)])))
            .add(&term(2, 1, &sp(&[(-1, 4)])))
            .add(&term(1, 2, &sp(&[(1, 8)]))),
        5 => P::constant(ratio(3, 40))
            .add(&term(1, 1, &sp(&[(-1, 4)])))
            .add(&term(2, 2, &sp(&[(1, 8)])))
            .add(&t_term(2, 0, &sp(&[(1, 6), (-1, 12)])))
            .add(&t_term(3, 1, &sp(&[(-1, 6), (1, 12)])))
            .add(&t_term(4, 0, &sp(&[(1, 20), (-1, 20)]).concat_t(ratio(1, 120)))),
        6 => term(1, 0, &sp(&[(4, 45)]))
            .add(&t_term(3, 0, &sp(&[(1, 12), (-1, 18)])))
            .add(&t_term(5, 0, &sp(&[(1, 48), (-22, 720)]).concat_t(ratio(8, 720))))
            .add(&term(0, 1, &sp(&[(-4, 45)])))
            .add(&term(1, 2, &sp(&[(1, 12)])))
            .add(&term(2, 3, &sp(&[(-1, 48)])))
            .add(&term(2, 1, &sp(&[(-1, 6)])))
            .add(&term(3, 2, &sp(&[(1, 16)])))
            .add(&t_term(4, 1, &sp(&[(-1, 16), (1, 24)]))),
        7 => P::constant(ratio(5, 112))
            .add(&term(1, 1, &sp(&[(-37, 240)])))
            .add(&term(2, 2, &sp(&[(5, 48)])))
            .add(&term(3, 3, &sp(&[(-1, 48)])))
            .add(&t_term(2, 0, &sp(&[(37, 360), (-37, 720)])))
            .add(&t_term(3, 1, &sp(&[(-5, 36), (5, 72)])))
            .add(&t_term(4, 2, &sp(&[(1, 24), (-1, 48)])))
            .add(&t_term(4, 0, &sp(&[(1, 24), (-1, 24)]).concat_t(ratio(1, 144))))
            .add(&t_term(5, 1, &sp(&[(-1, 40), (1, 40)]).concat_t(ratio(-1, 240))))
            .add(&t_term(6, 0, &minus_one_over_5040_poly())),
        _ => panic!("Appendix A covers n = 1..7"),
    }
}

trait ConcatT {
    fn concat_t(self, top: Rational) -> Vec<Rational>;
}

impl ConcatT for Vec<Rational> {
    /// Append `top` as the next t-coefficient (helper for quadratics in t).
    fn concat_t(mut self, top: Rational) -> Vec<Rational> {
        self.push(top);
        self
    }
}

fn minus_one_over_5040_poly() -> Vec<Rational> {
    // -(t-2)(t^2-10t+10)/5040 = (20 - 30t + 12t^2 - t^3)/5040
    vec![ratio(20, 5040), ratio(-30, 5040), ratio(12, 5040), ratio(-1, 5040)]
}

/// Full `Ĉ⁽ⁿ⁾(0,0)` as a series (with the `sK` or `K` prefactor applied).
pub fn appendix_a_series(n: u32, k: &QSeries, e: &QSeries, ns: i64) -> QSeries {
    let red = appendix_a_reduced(n).eval_series(k, e, ns);
    let with_k = red.mul(k).truncate_to(ns);
    if n % 2 == 1 {
        with_k.shift(1)
    } else {
        with_k
    }
}

/// The five homogeneity combinations; each must contain only monomials of
/// total `(K,E)`-degree `n` once the shared `K` prefactor is counted.
///
/// The `n = 6` coefficient of `Ĉ⁽²⁾` is `2/45`, not the `1/45` of the
/// corresponding susceptibility combination: `1/45` leaves a degree-2
/// remainder `K(E-K)/90`, while `2/45` cancels every monomial below degree 6.
pub fn homogeneity_combo(n: u32) -> KEPolynomial {
    let f = |m: u32| appendix_a_reduced(m);
    let combo = match n {
        3 => f(3).sub(&f(1).scale(&ratio(1, 6))),
        4 => f(4).sub(&f(2).scale(&ratio(1, 3))),
        5 => f(5).sub(&f(3).scale(&ratio(1, 2))).add(&f(1).scale(&ratio(1, 120))),
        6 => f(6).sub(&f(4).scale(&ratio(2, 3))).add(&f(2).scale(&ratio(2, 45))),
        7 => f(7)
            .sub(&f(5).scale(&(rat(5) / factorial(3))))
            .add(&f(3).scale(&(rat(13) / factorial(5))))
            .sub(&f(1).scale(&(rat(1) / factorial(7)))),
        _ => panic!("combinations exist for n = 3..7"),
    };
    combo.mul_ke(1, 0)
}

pub fn homogeneity_check(n: u32) -> bool {
    homogeneity_combo(n).is_homogeneous(n as u8)
}

/// `f⁽¹⁾_{N,N} = t^{N/2} (1/2)_N / N! · ₂F₁(1/2, N+1/2; N+1; t)`.
pub fn f1_nn(n: u32, ns: i64) -> QSeries {
    let c = pochhammer(&ratio(1, 2), n) / factorial(n);
    hypergeometric_2f1(&ratio(1, 2), &(ratio(1, 2) + rat(n as i64)), &rat(n as i64 + 1), ns)
        .scale(&c)
        .shift(2 * n as i64)
}

/// Leading λ²-coefficient of `C⁻_N - (1-t)^{1/4}`: `(1/2)_N (3/2)_N / (4 ((N+1)!)²) t^{N+1}`.
pub fn minus_lambda2_leading(n: u32) -> Rational {
    let num = pochhammer(&ratio(1, 2), n) * pochhammer(&ratio(3, 2), n);
    let den = rat(4) * factorial(n + 1) * factorial(n + 1);
    num / den
}

/// Leading λ³-coefficient of the plus regime: `(1/2)_N ((3/2)_N)² t^{3N/2+2} / (16 (N+1)!(N+2)!)`.
pub fn plus_lambda3_leading(n: u32) -> Rational {
    let p32 = pochhammer(&ratio(3, 2), n);
    let num = pochhammer(&ratio(1, 2), n) * &p32 * &p32;
    let den = rat(16) * factorial(n + 1) * factorial(n + 2);
    num / den
}

/// Numeric closed-form value of `C_N(x)` for `N = 0, 1` at given `(s, x)`.
pub fn low_n_numeric(regime: Regime, n: u32, s: f64, x: f64) -> Result<f64, crate::elliptic::EllipticError> {
    let ctx = crate::NumericCtx::new(s)?;
    let t = ctx.t();
    match (regime, n) {
        (Regime::Minus, 0) => Ok(ctx.theta(4, x)? / ctx.theta(3, 0.0)?),
        (Regime::Plus, 0) => {
            Ok((1.0 - t).powf(0.25) / t.powf(0.25) * ctx.theta(1, x)? / ctx.theta(4, 0.0)?)
        }
        (Regime::Minus, 1) => {
            let z = x * ctx.cap_k();
            let big_x = ctx.big_x_at(x)?;
            Ok(ctx.phi_at(x)? * (ctx.cn(z)? * ctx.dn(z)? + ctx.sn(z)? * big_x) / x.cos())
        }
        (Regime::Plus, 1) => {
            let big_x = ctx.big_x_at(x)?;
            Ok(ctx.phi_at(x)? * big_x / (t.sqrt() * x.cos()))
        }
        _ => Err(crate::elliptic::EllipticError::Domain("closed numeric forms cover N = 0, 1".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> EllipticContext {
        EllipticContext::new(8, 32)
    }

    #[test]
    fn c0_minus_constant_part() {
        // at x = 0: C0- = (1-t)^{1/4}
        let c = c0(Regime::Minus, &ctx());
        let x0 = c.series.x_slice(0);
        assert!(x0.eq_to_common_trunc(&crate::elliptic::one_minus_t_pow(&ratio(1, 4), 32)));
        assert!(c.series.is_even_in_x());
    }

    #[test]
    fn c0_plus_lambda1() {
        // stripped λ¹ entry is Ĉ⁽¹⁾(0,0) = s·f^{(1)}_{0,0} = sK
        let c = c0(Regime::Plus, &ctx());
        assert!(c.series.is_odd_in_x());
        let ff = extract_form_factors(&c, 1).unwrap();
        assert!(ff[1].eq_to_common_trunc(&crate::elliptic::hypergeometric_k(28).shift(1)));
        assert!(ff[1].eq_to_common_trunc(&f1_nn(0, 28).shift(1)));
    }

    #[test]
    fn c0_closed_vs_series() {
        let cx = ctx();
        for regime in [Regime::Plus, Regime::Minus] {
            let c = c0(regime, &cx);
            let cf = c.closed_form.as_ref().unwrap().to_series(&cx);
            assert!(cf.eq_to_common_trunc(&c.series), "{:?}", regime);
        }
    }

    #[test]
    fn c1_closed_vs_series() {
        let cx = ctx();
        for regime in [Regime::Plus, Regime::Minus] {
            let c = c1(regime, &cx);
            let cf = c.closed_form.as_ref().unwrap().to_series(&cx);
            assert!(cf.eq_to_common_trunc(&c.series), "{:?}", regime);
        }
    }

    #[test]
    fn c1_minus_lambda2_t2_coefficient() {
        // [λ² t²] of C1-/(1-t)^{1/4} - 1 is 3/64
        let c = c1(Regime::Minus, &ctx());
        let ff = extract_form_factors(&c, 2).unwrap();
        assert_eq!(ff[2].coeff(8), ratio(3, 64));
        assert_eq!(minus_lambda2_leading(1), ratio(3, 64));
    }

    #[test]
    fn c1_plus_series_leading() {
        // C1+ at λ=1 has series t^{1/2}(1/2 + t/16 + ...); its λ-structure:
        // f^{(1)}_{1,1} = t^{1/2}(1/2)(2F1(1/2,3/2;2;t))
        let c = c1(Regime::Plus, &ctx());
        let ff = extract_form_factors(&c, 1).unwrap();
        assert!(ff[1].eq_to_common_trunc(&f1_nn(1, 28).shift(1)));
        assert_eq!(ff[1].coeff(3), ratio(1, 2));
    }

    #[test]
    fn toda_series_minus_n2_leading() {
        let cx = EllipticContext::new(8, 40);
        let seq = toda_sequence(Regime::Minus, &cx, 2, Engine::Series).unwrap();
        let ff = extract_form_factors(&seq[2], 2).unwrap();
        // leading λ² coefficient: (1/2)_2 (3/2)_2 t^3/(4 (3!)^2)
        assert_eq!(ff[2].coeff(12), minus_lambda2_leading(2));
        assert!(seq[2].series.is_even_in_x());
    }

    #[test]
    fn sigma_residual_c0() {
        let cx = EllipticContext::new(8, 28);
        for regime in [Regime::Plus, Regime::Minus] {
            let c = c0(regime, &cx);
            let r = sigma_residual(&c).unwrap();
            assert!(r.is_zero_to_trunc(), "{:?}: residual = {}", regime, r);
        }
    }

    #[test]
    fn sigma_residual_negative_control() {
        // corrupt one coefficient and the residual must turn nonzero
        let cx = EllipticContext::new(8, 28);
        let mut c = c0(Regime::Minus, &cx);
        c.series = c.series.add(&QBiSeries::monomial(2, 8, ratio(1, 7), 8, 28));
        let r = sigma_residual(&c).unwrap();
        assert!(!r.is_zero_to_trunc());
    }

    #[test]
    fn homogeneity_combos() {
        for n in 3..=7 {
            assert!(homogeneity_check(n), "combination n = {n}");
        }
        // and the raw forms are NOT homogeneous
        assert!(!appendix_a_reduced(3).mul_ke(1, 0).is_homogeneous(3));
    }

    #[test]
    fn appendix_a_matches_extraction() {
        let cx = EllipticContext::new(10, 36);
        let k = crate::elliptic::hypergeometric_k(36);
        let e = crate::elliptic::hypergeometric_e(36);
        let cp = c0(Regime::Plus, &cx);
        let ffp = extract_form_factors(&cp, 7).unwrap();
        for n in [1u32, 3, 5, 7] {
            let expect = appendix_a_series(n, &k, &e, 30);
            assert!(ffp[n as usize].eq_to_common_trunc(&expect), "odd n = {n}");
        }
        let cm = c0(Regime::Minus, &cx);
        let ffm = extract_form_factors(&cm, 6).unwrap();
        for n in [2u32, 4, 6] {
            let expect = appendix_a_series(n, &k, &e, 30);
            assert!(ffm[n as usize].eq_to_common_trunc(&expect), "even n = {n}");
        }
    }
}
