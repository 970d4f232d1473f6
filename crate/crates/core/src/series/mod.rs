//! Exact truncated power-series arithmetic.
//!
//! Everything downstream (elliptic functions, the Toda recurrence, the
//! form-factor oracle) is built on two types:
//!
//! - [`GradedSeries`]: a truncated Laurent series in the inner variable `s`,
//!   where `t = s^4`. All fractional powers of `t` used by the closed forms
//!   (`t^{1/4}`, `t^{N/2}`, ...) land on integer `s`-exponents.
//! - [`BiSeries`]: a truncated bivariate series in `(x, s)`; `x` is the
//!   λ-parameter variable with `λ = sin x`.
//!
//! Truncation orders are *provable* orders: a series with truncation `N`
//! claims nothing about exponents `≥ N`. Binary operations compute the
//! resulting provable order conservatively from the leading exponents, so a
//! division or multiplication can shrink the window but never silently
//! produces wrong tails.

pub(crate) mod bi;
mod json;

pub use bi::{BiSeries, EXACT};
pub use json::format_coeff;

use std::collections::BTreeMap;

use num_traits::One;
use thiserror::Error;

use crate::coeff::{binomial_rational, factorial, Coeff, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("division by a series with no nonzero coefficient")]
    ZeroDivisor,
    #[error("operation requires a unit leading coefficient")]
    NonUnitLeading,
    #[error("exponent would leave the integer s-lattice")]
    NonLatticeExponent,
    #[error("operation requires zero constant term")]
    NonzeroConstantTerm,
    #[error("composition inner series must have positive leading exponent")]
    BadComposition,
    #[error("provable truncation order dropped below 1")]
    TruncationExhausted,
}

/// Truncated Laurent series `sum c_e s^e` for `e < trunc`.
///
/// Invariants: no stored exponent `>= trunc`, no stored zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSeries<T> {
    coeffs: BTreeMap<i64, T>,
    trunc: i64,
}

impl<T: Coeff> GradedSeries<T> {
    pub fn zero(trunc: i64) -> Self {
        GradedSeries { coeffs: BTreeMap::new(), trunc }
    }

    pub fn one(trunc: i64) -> Self {
        Self::monomial(0, T::one(), trunc)
    }

    pub fn monomial(exp: i64, coeff: T, trunc: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if exp < trunc && !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        GradedSeries { coeffs, trunc }
    }

    pub fn constant(c: T, trunc: i64) -> Self {
        Self::monomial(0, c, trunc)
    }

    /// Build from `(exponent, coefficient)` pairs; later duplicates add.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, T)>, trunc: i64) -> Self {
        let mut r = Self::zero(trunc);
        for (e, c) in terms {
            r.add_term(e, c);
        }
        r
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    /// Leading (lowest) stored exponent, or `None` if zero to truncation.
    pub fn lead(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Leading exponent for order bookkeeping: truncation order if no term is known.
    pub fn lead_or_trunc(&self) -> i64 {
        self.lead().unwrap_or(self.trunc)
    }

    pub fn is_zero_to_trunc(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> T {
        self.coeffs.get(&exp).cloned().unwrap_or_else(T::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &T)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    fn add_term(&mut self, exp: i64, c: T) {
        if exp >= self.trunc || c.is_zero() {
            return;
        }
        match self.coeffs.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add_ref(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Raise the provable order marker; caller must hold an external proof
    /// (used by Newton-style iterations whose convergence argument certifies
    /// more coefficients than the conservative op-level tracking).
    fn assert_provable_to(mut self, t: i64) -> Self {
        self.trunc = self.trunc.max(t);
        self
    }

    /// Restrict to exponents `< new_trunc` (never raises the order).
    pub fn truncate_to(&self, new_trunc: i64) -> Self {
        let t = new_trunc.min(self.trunc);
        GradedSeries {
            coeffs: self.coeffs.iter().filter(|(e, _)| **e < t).map(|(e, c)| (*e, c.clone())).collect(),
            trunc: t,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let trunc = self.trunc.min(other.trunc);
        let mut r = self.truncate_to(trunc);
        for (e, c) in other.coeffs.iter() {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        GradedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c.neg())).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.trunc);
        }
        GradedSeries {
            coeffs: self.coeffs.iter().map(|(e, q)| (*e, q.mul_ref(c))).collect(),
            trunc: self.trunc,
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        self.scale(&T::from_rational(q))
    }

    /// Multiply by the monomial `s^exp`.
    pub fn shift(&self, exp: i64) -> Self {
        GradedSeries {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e + exp, c.clone())).collect(),
            trunc: self.trunc + exp,
        }
    }

    /// Cauchy product, truncated at the provable order
    /// `min(a.trunc + lead(b), b.trunc + lead(a))`.
    pub fn mul(&self, other: &Self) -> Self {
        let la = self.lead_or_trunc();
        let lb = other.lead_or_trunc();
        let trunc = (self.trunc + lb).min(other.trunc + la);
        let mut r = Self::zero(trunc);
        for (ea, ca) in self.coeffs.iter() {
            if *ea + lb >= trunc {
                continue;
            }
            for (eb, cb) in other.coeffs.iter() {
                let e = *ea + *eb;
                if e >= trunc {
                    break;
                }
                r.add_term(e, ca.mul_ref(cb));
            }
        }
        r
    }

    /// Exact division `self / other`.
    ///
    /// The quotient `q` satisfies `q * other = self` to the provable order
    /// `min(a.trunc - lead(b), b.trunc + lead(a) - 2 lead(b))`.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        let lb = match other.lead() {
            Some(l) => l,
            None => return Err(SeriesError::ZeroDivisor),
        };
        let la = self.lead_or_trunc();
        let qlead = la - lb;
        let qtrunc = (self.trunc - lb).min(other.trunc + la - 2 * lb);
        if self.is_zero_to_trunc() {
            return Ok(Self::zero(qtrunc));
        }
        // Exact-by-exact division only terminates when the divisor is a
        // monomial or the division happens to be exact; break early once the
        // remainder empties, and refuse runs that cannot terminate.
        assert!(
            qtrunc < bi::EXACT_GUARD || other.coeffs.len() == 1,
            "truncate exact series before division by a multi-term series"
        );
        let inv_lead = {
            let l = other.coeffs.get(&lb).expect("lead exists");
            T::one().div_ref(l)
        };
        // Solve q coefficient-by-coefficient from the convolution equation.
        let mut q = Self::zero(qtrunc);
        let bterms: Vec<(i64, T)> = other.coeffs.iter().map(|(e, c)| (*e, c.clone())).collect();
        let mut rem = self.clone();
        let mut e = qlead;
        while e < qtrunc {
            if rem.is_zero_to_trunc() {
                break;
            }
            let target = e + lb;
            let c = rem.coeff(target);
            if !c.is_zero() {
                let qc = c.mul_ref(&inv_lead);
                // rem -= qc * s^e * other
                for (eb, cb) in bterms.iter() {
                    rem.add_term(e + eb, qc.mul_ref(cb).neg());
                }
                q.add_term(e, qc);
            }
            e += 1;
        }
        Ok(q)
    }

    pub fn inv(&self) -> Result<Self, SeriesError> {
        Self::one(self.trunc + 2 * self.lead_or_trunc()).div(self)
    }

    /// Integer power (negative exponents invert first).
    pub fn pow_i(&self, n: i64) -> Result<Self, SeriesError> {
        if n == 0 {
            return Ok(Self::one(self.trunc - self.lead_or_trunc()));
        }
        let (mut base, mut e) = if n < 0 { (self.inv()?, (-n) as u64) } else { (self.clone(), n as u64) };
        let mut acc: Option<Self> = None;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        Ok(acc.unwrap())
    }

    /// Rational power via the binomial series.
    ///
    /// Requires a unit leading coefficient and `lead * p` integral.
    pub fn pow_rational(&self, p: &Rational) -> Result<Self, SeriesError> {
        let lead = self.lead().ok_or(SeriesError::NonUnitLeading)?;
        if !self.coeff(lead).is_one() {
            return Err(SeriesError::NonUnitLeading);
        }
        let new_lead = Rational::from_integer(lead.into()) * p;
        if !new_lead.is_integer() {
            return Err(SeriesError::NonLatticeExponent);
        }
        let new_lead: i64 = i64::try_from(new_lead.to_integer()).map_err(|_| SeriesError::NonLatticeExponent)?;
        // u = s^{-lead} * self - 1 has positive leading exponent.
        let rel_trunc = self.trunc - lead;
        let mut u = self.shift(-lead);
        u.coeffs.remove(&0);
        let mut result = Self::one(rel_trunc);
        let mut upow = Self::one(rel_trunc);
        let ulead = u.lead_or_trunc();
        let mut k: u32 = 1;
        while (k as i64) * ulead < rel_trunc {
            upow = upow.mul(&u).truncate_to(rel_trunc);
            if upow.is_zero_to_trunc() {
                break;
            }
            let b = binomial_rational(p, k);
            result = result.add(&upow.scale_rational(&b));
            k += 1;
        }
        Ok(result.shift(new_lead))
    }

    /// Formal logarithm; requires constant term 1 (lead 0, unit coefficient).
    pub fn log(&self) -> Result<Self, SeriesError> {
        if self.lead() != Some(0) || !self.coeff(0).is_one() {
            return Err(SeriesError::NonUnitLeading);
        }
        // log(1+u) = sum (-1)^{k+1} u^k / k
        let mut u = self.clone();
        u.coeffs.remove(&0);
        if u.lead_or_trunc() < 1 {
            return Err(SeriesError::NonUnitLeading);
        }
        let trunc = self.trunc;
        let mut result = Self::zero(trunc);
        let mut upow = Self::one(trunc);
        let ulead = u.lead_or_trunc();
        let mut k: i64 = 1;
        while k * ulead < trunc {
            upow = upow.mul(&u).truncate_to(trunc);
            if upow.is_zero_to_trunc() {
                break;
            }
            let c = Rational::new((if k % 2 == 1 { 1 } else { -1 }).into(), k.into());
            result = result.add(&upow.scale_rational(&c));
            k += 1;
        }
        Ok(result)
    }

    /// Formal exponential; requires zero constant term and no negative exponents.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if self.lead_or_trunc() < 1 {
            if self.is_zero_to_trunc() {
                return Ok(Self::one(self.trunc));
            }
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let trunc = self.trunc;
        let mut result = Self::one(trunc);
        let mut upow = Self::one(trunc);
        let ulead = self.lead_or_trunc();
        let mut k: u32 = 1;
        while (k as i64) * ulead < trunc {
            upow = upow.mul(self).truncate_to(trunc);
            if upow.is_zero_to_trunc() {
                break;
            }
            let c = Rational::new(1.into(), factorial(k).to_integer());
            result = result.add(&upow.scale_rational(&c));
            k += 1;
        }
        Ok(result)
    }

    /// Derivative with respect to `s`.
    pub fn derivative_s(&self) -> Self {
        let mut r = Self::zero(self.trunc - 1);
        for (e, c) in self.coeffs.iter() {
            if *e != 0 {
                r.add_term(*e - 1, c.mul_ref(&T::from_int(*e)));
            }
        }
        r
    }

    /// Derivative with respect to `t = s^4`, acting as `(1/(4 s^3)) d/ds`.
    pub fn derivative_t(&self) -> Self {
        let mut r = Self::zero(self.trunc - 4);
        for (e, c) in self.coeffs.iter() {
            if *e != 0 {
                r.add_term(*e - 4, c.mul_ref(&T::from_rational(&Rational::new((*e).into(), 4.into()))));
            }
        }
        r
    }

    /// Logarithmic derivative `a'/a` in `t`.
    pub fn log_derivative_t(&self) -> Result<Self, SeriesError> {
        self.derivative_t().div(self)
    }

    /// Substitute `inner` (positive leading exponent, no Laurent part) into `outer = self`.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        let il = inner.lead_or_trunc();
        if il < 1 {
            return Err(SeriesError::BadComposition);
        }
        if self.lead().map(|l| l < 0).unwrap_or(false) {
            return Err(SeriesError::BadComposition);
        }
        let trunc = (self.trunc * il).min(inner.trunc + (self.lead_or_trunc().max(1) - 1) * il);
        // Horner from the highest stored exponent down.
        let mut result = Self::zero(trunc);
        let mut last_exp: Option<i64> = None;
        for (e, c) in self.coeffs.iter().rev() {
            if let Some(le) = last_exp {
                result = result.mul(&inner.pow_i(le - *e)?).truncate_to(trunc);
            }
            result = result.add(&Self::constant(c.clone(), trunc));
            last_exp = Some(*e);
        }
        if let Some(le) = last_exp {
            if le > 0 {
                result = result.mul(&inner.pow_i(le)?).truncate_to(trunc);
            }
        }
        Ok(result)
    }

    /// Reversion: the series `g` with `self(g(y)) = y`, for `self = c1 s + ...`, `c1` a unit.
    ///
    /// Newton iteration `g <- g - (f(g) - y)/f'(g)` doubles the correct
    /// order each round.
    pub fn reverse(&self) -> Result<Self, SeriesError> {
        if self.lead() != Some(1) {
            return Err(SeriesError::BadComposition);
        }
        let n = self.trunc;
        let c1 = self.coeff(1);
        let df = self.derivative_s();
        let y = Self::monomial(1, T::one(), n);
        let mut g = Self::monomial(1, T::one().div_ref(&c1), n);
        let mut known: i64 = 2;
        while known < n {
            known = (2 * known).min(n);
            // g is correct to the previous order; extend its window with a
            // zero guess, which the quadratic Newton step then corrects
            // through order `known`
            let gk = g.truncate_to(known).assert_provable_to(known);
            let err = self.truncate_to(known).compose(&gk)?.sub(&y.truncate_to(known));
            if err.is_zero_to_trunc() {
                g = gk;
                continue;
            }
            let slope = df.truncate_to(known).compose(&gk)?;
            g = gk.sub(&err.div(&slope)?).truncate_to(known);
        }
        Ok(g.truncate_to(n))
    }

    /// Evaluate the truncated polynomial at a numeric point.
    pub fn eval_f64(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (e, c) in self.coeffs.iter() {
            acc += c.to_f64() * s.powi(*e as i32);
        }
        acc
    }

    /// True when both series agree on every exponent below the common truncation.
    pub fn eq_to_common_trunc(&self, other: &Self) -> bool {
        let t = self.trunc.min(other.trunc);
        self.truncate_to(t) == other.truncate_to(t)
    }
}

impl<T: Coeff> std::fmt::Display for GradedSeries<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, (e, c)) in self.coeffs.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                match e {
                    0 => write!(f, "{c}")?,
                    1 => write!(f, "({c})*s")?,
                    _ => write!(f, "({c})*s^{e}")?,
                }
            }
        }
        write!(f, " + O(s^{})", self.trunc)
    }
}

/// The sine series `x - x^3/6 + ...` as a univariate series, used for λ = sin x.
pub fn sin_series<T: Coeff>(trunc: i64) -> GradedSeries<T> {
    let mut r = GradedSeries::zero(trunc);
    let mut c = Rational::one();
    let mut k: i64 = 1;
    while k < trunc {
        if k > 1 {
            c /= Rational::from_integer(((k - 1) * k).into());
        }
        let signed = if (k / 2) % 2 == 1 { -c.clone() } else { c.clone() };
        r.add_term(k, T::from_rational(&signed));
        k += 2;
    }
    r
}

/// The arcsine series, inverse of [`sin_series`].
pub fn arcsin_series<T: Coeff>(trunc: i64) -> GradedSeries<T> {
    // arcsin λ = sum_k C(2k, k) / (4^k (2k+1)) λ^{2k+1}
    let mut r = GradedSeries::zero(trunc);
    let mut c = Rational::one(); // C(2k,k)/4^k
    let mut k: i64 = 0;
    while 2 * k + 1 < trunc {
        let term = &c / Rational::from_integer((2 * k + 1).into());
        r.add_term(2 * k + 1, T::from_rational(&term));
        c *= Rational::new((2 * k + 1).into(), (2 * k + 2).into());
        k += 1;
    }
    r
}

/// Cosine series.
pub fn cos_series<T: Coeff>(trunc: i64) -> GradedSeries<T> {
    let mut r = GradedSeries::zero(trunc);
    let mut c = Rational::one();
    let mut k: i64 = 0;
    while k < trunc {
        if k > 0 {
            c /= Rational::from_integer(((k - 1) * k).into());
        }
        let signed = if (k / 2) % 2 == 1 { -c.clone() } else { c.clone() };
        r.add_term(k, T::from_rational(&signed));
        k += 2;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, ratio};

    type Qs = GradedSeries<Rational>;

    fn s_poly(terms: &[(i64, i64, i64)], trunc: i64) -> Qs {
        Qs::from_terms(terms.iter().map(|&(e, n, d)| (e, ratio(n, d))), trunc)
    }

    #[test]
    fn add_cancellation() {
        // (1 + s) + (-1 + s) = 2s
        let a = s_poly(&[(0, 1, 1), (1, 1, 1)], 10);
        let b = s_poly(&[(0, -1, 1), (1, 1, 1)], 10);
        assert_eq!(a.add(&b), s_poly(&[(1, 2, 1)], 10));
    }

    #[test]
    fn add_identity_and_laurent() {
        let a = s_poly(&[(2, 3, 4)], 8);
        assert_eq!(a.add(&Qs::zero(8)), a);
        let l = s_poly(&[(-1, 1, 1)], 6).add(&s_poly(&[(1, 1, 1)], 6));
        assert_eq!(l, s_poly(&[(-1, 1, 1), (1, 1, 1)], 6));
    }

    #[test]
    fn mul_basic() {
        // (1+s)(1-s) = 1 - s^2
        let a = s_poly(&[(0, 1, 1), (1, 1, 1)], 10);
        let b = s_poly(&[(0, 1, 1), (1, -1, 1)], 10);
        assert_eq!(a.mul(&b), s_poly(&[(0, 1, 1), (2, -1, 1)], 10));
        // s^2 * s^-1 = s, with truncation shifted by the leads
        let c = s_poly(&[(2, 1, 1)], 10).mul(&s_poly(&[(-1, 1, 1)], 10));
        assert_eq!(c.coeff(1), rat(1));
        assert_eq!(c.trunc(), 9);
    }

    #[test]
    fn div_exact() {
        // (1 - s^2) / (1 - s) = 1 + s
        let num = s_poly(&[(0, 1, 1), (2, -1, 1)], 12);
        let den = s_poly(&[(0, 1, 1), (1, -1, 1)], 12);
        let q = num.div(&den).unwrap();
        assert!(q.eq_to_common_trunc(&s_poly(&[(0, 1, 1), (1, 1, 1)], 12)));
        // s^3 / s = s^2
        let q2 = s_poly(&[(3, 1, 1)], 9).div(&s_poly(&[(1, 1, 1)], 9)).unwrap();
        assert_eq!(q2.coeff(2), rat(1));
        // a / a = 1
        let a = s_poly(&[(1, 2, 3), (3, -1, 7), (4, 5, 1)], 15);
        let q3 = a.div(&a).unwrap();
        assert!(q3.eq_to_common_trunc(&Qs::one(20)));
        assert!(Qs::one(5).div(&Qs::zero(5)).is_err());
    }

    #[test]
    fn pow_rational_quarter() {
        // (1-t)^{1/4} = 1 - t/4 - 3t^2/32 - 7t^3/128 + O(t^4), t = s^4
        let one_minus_t = s_poly(&[(0, 1, 1), (4, -1, 1)], 16);
        let p = one_minus_t.pow_rational(&ratio(1, 4)).unwrap();
        assert_eq!(p.coeff(0), rat(1));
        assert_eq!(p.coeff(4), ratio(-1, 4));
        assert_eq!(p.coeff(8), ratio(-3, 32));
        assert_eq!(p.coeff(12), ratio(-7, 128));
        // a^0 = 1
        let a = s_poly(&[(0, 1, 1), (1, 5, 2)], 9);
        assert!(a.pow_rational(&rat(0)).unwrap().eq_to_common_trunc(&Qs::one(9)));
        // inverse pair multiplies to 1
        let pm = one_minus_t.pow_rational(&ratio(-1, 4)).unwrap();
        assert!(p.mul(&pm).eq_to_common_trunc(&Qs::one(16)));
    }

    #[test]
    fn pow_rational_errors() {
        // leading coefficient 2 is not a unit
        let a = s_poly(&[(0, 2, 1), (1, 1, 1)], 6);
        assert_eq!(a.pow_rational(&ratio(1, 2)), Err(SeriesError::NonUnitLeading));
        // s * 1/2 exponent leaves the lattice
        let b = s_poly(&[(1, 1, 1), (2, 1, 1)], 6);
        assert_eq!(b.pow_rational(&ratio(1, 2)), Err(SeriesError::NonLatticeExponent));
        // s^2 to the 1/2 is fine
        let c = s_poly(&[(2, 1, 1), (3, 1, 1)], 8);
        assert_eq!(c.pow_rational(&ratio(1, 2)).unwrap().lead(), Some(1));
    }

    #[test]
    fn log_exp() {
        // log(1+t) = t - t^2/2 + t^3/3 + O(t^4)
        let a = s_poly(&[(0, 1, 1), (4, 1, 1)], 16);
        let l = a.log().unwrap();
        assert_eq!(l.coeff(4), rat(1));
        assert_eq!(l.coeff(8), ratio(-1, 2));
        assert_eq!(l.coeff(12), ratio(1, 3));
        assert!(l.exp().unwrap().eq_to_common_trunc(&a));
        // exp then log round-trips
        let u = s_poly(&[(1, 1, 2), (3, -2, 5)], 12);
        assert!(u.exp().unwrap().log().unwrap().eq_to_common_trunc(&u));
        assert!(s_poly(&[(0, 1, 2)], 4).log().is_err());
        assert!(s_poly(&[(0, 1, 2)], 4).exp().is_err());
    }

    #[test]
    fn compose_inverse_functions() {
        let sin: Qs = sin_series(14);
        let asin: Qs = arcsin_series(14);
        let id = sin.compose(&asin).unwrap();
        assert!(id.eq_to_common_trunc(&s_poly(&[(1, 1, 1)], 14)));
        let id2 = asin.compose(&sin).unwrap();
        assert!(id2.eq_to_common_trunc(&s_poly(&[(1, 1, 1)], 14)));
    }

    #[test]
    fn derivative_t_shifts_lattice() {
        // d/dt (t^2) = 2t on the s-lattice
        let t2 = s_poly(&[(8, 1, 1)], 20);
        assert_eq!(t2.derivative_t(), s_poly(&[(4, 2, 1)], 16));
        // d/dt s = 1/(4 s^3)
        let s = s_poly(&[(1, 1, 1)], 9);
        assert_eq!(s.derivative_t(), s_poly(&[(-3, 1, 4)], 5));
    }

    #[test]
    fn reversion() {
        let f = s_poly(&[(1, 2, 1), (2, 1, 1), (3, -1, 3)], 10);
        let g = f.reverse().unwrap();
        let id = f.compose(&g).unwrap();
        assert!(id.eq_to_common_trunc(&s_poly(&[(1, 1, 1)], 10)));
    }

    #[test]
    fn display_format() {
        let a = s_poly(&[(0, 1, 1), (4, -1, 4)], 8);
        assert_eq!(format!("{a}"), "1 + (-1/4)*s^4 + O(s^8)");
    }
}
