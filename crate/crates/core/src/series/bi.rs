//! Bivariate truncated series in `(x, s)`.
//!
//! Stored as `x`-slices, each an `s`-Laurent [`GradedSeries`]. The truncation
//! is rectangular: every coefficient with `x`-exponent `< nx` and `s`-exponent
//! `< ns` is determined. `x`-exponents are non-negative; `s`-exponents may be
//! negative.

use std::collections::BTreeMap;

use crate::coeff::{binomial_rational, factorial, Coeff, Rational};

use super::{GradedSeries, SeriesError};

/// Truncation sentinel for series that are exact polynomials in a variable.
/// Arithmetic on truncation orders treats it as "effectively infinite" while
/// staying safely inside `i64`.
pub const EXACT: i64 = i64::MAX / 4;

/// Guard below which a truncation is considered finite; series-producing
/// loops refuse to run past it.
pub(crate) const EXACT_GUARD: i64 = EXACT / 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiSeries<T> {
    slices: BTreeMap<i64, GradedSeries<T>>,
    nx: i64,
    ns: i64,
}

impl<T: Coeff> BiSeries<T> {
    pub fn zero(nx: i64, ns: i64) -> Self {
        BiSeries { slices: BTreeMap::new(), nx, ns }
    }

    pub fn one(nx: i64, ns: i64) -> Self {
        Self::monomial(0, 0, T::one(), nx, ns)
    }

    pub fn monomial(xe: i64, se: i64, c: T, nx: i64, ns: i64) -> Self {
        assert!(xe >= 0, "x-exponents must be non-negative");
        let mut r = Self::zero(nx, ns);
        if xe < nx && se < ns && !c.is_zero() {
            r.slices.insert(xe, GradedSeries::monomial(se, c, ns));
        }
        r
    }

    /// Embed an `s`-only series (exact in `x`).
    pub fn from_s_series(f: &GradedSeries<T>) -> Self {
        let mut r = Self::zero(EXACT, f.trunc());
        if !f.is_zero_to_trunc() {
            r.slices.insert(0, f.clone());
        }
        r
    }

    /// Embed an `x`-only series (exact in `s`); the argument is read as a
    /// series in `x`.
    pub fn from_x_series(f: &GradedSeries<T>) -> Self {
        let mut r = Self::zero(f.trunc(), EXACT);
        for (e, c) in f.terms() {
            assert!(e >= 0, "x-exponents must be non-negative");
            r.slices.insert(e, GradedSeries::monomial(0, c.clone(), EXACT));
        }
        r
    }

    pub fn from_x_slices(slices: impl IntoIterator<Item = (i64, GradedSeries<T>)>, nx: i64, ns: i64) -> Self {
        let mut r = Self::zero(nx, ns);
        for (xe, f) in slices {
            assert!(xe >= 0, "x-exponents must be non-negative");
            if xe >= nx {
                continue;
            }
            let f = f.truncate_to(ns);
            if !f.is_zero_to_trunc() {
                r.slices.insert(xe, f);
            }
        }
        r
    }

    pub fn nx(&self) -> i64 {
        self.nx
    }

    pub fn ns(&self) -> i64 {
        self.ns
    }

    pub fn x_lead(&self) -> i64 {
        self.slices.keys().next().copied().unwrap_or(self.nx)
    }

    pub fn s_lead(&self) -> i64 {
        self.slices.values().map(|f| f.lead_or_trunc()).min().unwrap_or(self.ns)
    }

    pub fn is_zero_to_trunc(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn x_slice(&self, xe: i64) -> GradedSeries<T> {
        self.slices.get(&xe).cloned().unwrap_or_else(|| GradedSeries::zero(self.ns))
    }

    pub fn x_slices(&self) -> impl Iterator<Item = (i64, &GradedSeries<T>)> {
        self.slices.iter().map(|(e, f)| (*e, f))
    }

    pub fn coeff(&self, xe: i64, se: i64) -> T {
        self.slices.get(&xe).map(|f| f.coeff(se)).unwrap_or_else(T::zero)
    }

    pub fn truncate_to(&self, nx: i64, ns: i64) -> Self {
        let nx = nx.min(self.nx);
        let ns = ns.min(self.ns);
        Self::from_x_slices(self.slices.iter().map(|(e, f)| (*e, f.clone())), nx, ns)
    }

    fn normalized(slices: BTreeMap<i64, GradedSeries<T>>, nx: i64, ns: i64) -> Self {
        Self::from_x_slices(slices, nx, ns)
    }

    pub fn add(&self, other: &Self) -> Self {
        let nx = self.nx.min(other.nx);
        let ns = self.ns.min(other.ns);
        let mut slices = BTreeMap::new();
        for (xe, f) in self.slices.iter() {
            slices.insert(*xe, f.clone());
        }
        for (xe, g) in other.slices.iter() {
            match slices.entry(*xe) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(g.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let sum = o.get().add(g);
                    *o.get_mut() = sum;
                }
            }
        }
        Self::normalized(slices, nx, ns)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        BiSeries {
            slices: self.slices.iter().map(|(e, f)| (*e, f.neg())).collect(),
            nx: self.nx,
            ns: self.ns,
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        if c.is_zero() {
            return Self::zero(self.nx, self.ns);
        }
        BiSeries {
            slices: self.slices.iter().map(|(e, f)| (*e, f.scale(c))).collect(),
            nx: self.nx,
            ns: self.ns,
        }
    }

    pub fn scale_rational(&self, q: &Rational) -> Self {
        self.scale(&T::from_rational(q))
    }

    /// Multiply by an `s`-only series.
    pub fn scale_s(&self, f: &GradedSeries<T>) -> Self {
        self.mul(&Self::from_s_series(f))
    }

    /// Multiply by the monomial `x^xe s^se`.
    pub fn mul_monomial(&self, xe: i64, se: i64) -> Self {
        BiSeries {
            slices: self.slices.iter().map(|(e, f)| (*e + xe, f.shift(se))).collect(),
            nx: self.nx + xe,
            ns: self.ns + se,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let nx = (self.nx.saturating_add(other.x_lead())).min(other.nx.saturating_add(self.x_lead()));
        let ns = (self.ns.saturating_add(other.s_lead())).min(other.ns.saturating_add(self.s_lead()));
        let mut slices: BTreeMap<i64, GradedSeries<T>> = BTreeMap::new();
        for (ea, fa) in self.slices.iter() {
            for (eb, fb) in other.slices.iter() {
                let e = *ea + *eb;
                if e >= nx {
                    break;
                }
                let prod = fa.mul(fb);
                match slices.entry(e) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(prod);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        let sum = o.get().add(&prod);
                        *o.get_mut() = sum;
                    }
                }
            }
        }
        Self::normalized(slices, nx, ns)
    }

    pub fn pow_i(&self, n: i64) -> Result<Self, SeriesError> {
        if n == 0 {
            return Ok(Self::one(self.nx, self.ns));
        }
        let (mut base, mut e) = if n < 0 {
            (Self::one(self.nx, self.ns).div(self)?, (-n) as u64)
        } else {
            (self.clone(), n as u64)
        };
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

    /// Exact division, solved slice-recursively in `x`.
    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        if other.is_zero_to_trunc() {
            return Err(SeriesError::ZeroDivisor);
        }
        let jb = other.x_lead();
        let ja = self.x_lead();
        if other.slices.len() == 1 {
            // x-monomial divisor: divide slice-wise, keeping x-exactness
            let b0 = other.x_slice(jb);
            let mut slices = BTreeMap::new();
            let mut ns_min = i64::MAX;
            for (m, f) in self.slices.iter() {
                let q = f.div(&b0)?;
                ns_min = ns_min.min(q.trunc());
                slices.insert(*m - jb, q);
            }
            if ns_min == i64::MAX {
                ns_min = self.ns - other.s_lead();
            }
            return Ok(Self::normalized(slices, self.nx - jb, ns_min));
        }
        let nxq = (self.nx - jb).min(other.nx + ja - 2 * jb);
        assert!(nxq < EXACT_GUARD, "truncate exact series before bivariate division");
        let b0 = other.x_slice(jb);
        let mut qslices: BTreeMap<i64, GradedSeries<T>> = BTreeMap::new();
        let mut ns_min = i64::MAX;
        for m in (ja - jb)..nxq {
            // residual = a_[m+jb] - sum_{j>0} b_j q_{m-j}
            let mut residual = self.x_slice(m + jb);
            for (ebrel, bj) in other.slices.iter().map(|(e, f)| (*e - jb, f)) {
                if ebrel <= 0 {
                    continue;
                }
                if let Some(qk) = qslices.get(&(m - ebrel)) {
                    residual = residual.sub(&bj.mul(qk));
                }
            }
            let qm = residual.div(&b0)?;
            ns_min = ns_min.min(qm.trunc());
            if !qm.is_zero_to_trunc() {
                qslices.insert(m, qm);
            }
        }
        if qslices.is_empty() && ns_min == i64::MAX {
            ns_min = self.ns - other.s_lead();
        }
        Ok(Self::normalized(qslices, nxq, ns_min))
    }

    pub fn derivative_x(&self) -> Self {
        let mut slices = BTreeMap::new();
        for (e, f) in self.slices.iter() {
            if *e > 0 {
                slices.insert(*e - 1, f.scale(&T::from_int(*e)));
            }
        }
        Self::normalized(slices, self.nx - 1, self.ns)
    }

    /// Antiderivative in `x` vanishing at `x = 0`.
    pub fn integrate_x(&self) -> Self {
        let mut slices = BTreeMap::new();
        for (e, f) in self.slices.iter() {
            slices.insert(*e + 1, f.scale(&T::from_rational(&Rational::new(1.into(), (*e + 1).into()))));
        }
        Self::normalized(slices, self.nx.saturating_add(1), self.ns)
    }

    pub fn derivative_t(&self) -> Self {
        let mut slices = BTreeMap::new();
        for (e, f) in self.slices.iter() {
            let d = f.derivative_t();
            if !d.is_zero_to_trunc() {
                slices.insert(*e, d);
            }
        }
        let ns = if self.ns >= EXACT_GUARD { self.ns } else { self.ns - 4 };
        Self::normalized(slices, self.nx, ns)
    }

    pub fn log_derivative_t(&self) -> Result<Self, SeriesError> {
        self.derivative_t().div(self)
    }

    /// Substitute `x <- inner(λ)` where `inner` is a univariate series with
    /// positive leading exponent (read in the new outer variable).
    pub fn compose_x(&self, inner: &GradedSeries<T>) -> Result<Self, SeriesError> {
        let il = inner.lead_or_trunc();
        if il < 1 {
            return Err(SeriesError::BadComposition);
        }
        let inner_b = Self::from_x_series(inner);
        let nx = (self.nx.saturating_mul(il))
            .min(inner.trunc() + (self.x_lead().max(1) - 1) * il)
            .min(EXACT);
        let mut result = Self::zero(nx, self.ns);
        let mut last_exp: Option<i64> = None;
        for (e, f) in self.slices.iter().rev() {
            if let Some(le) = last_exp {
                result = result.mul(&inner_b.pow_i(le - *e)?).truncate_to(nx, self.ns);
            }
            result = result.add(&Self::from_s_series(f).truncate_to(nx, self.ns));
            last_exp = Some(*e);
        }
        if let Some(le) = last_exp {
            if le > 0 {
                result = result.mul(&inner_b.pow_i(le)?).truncate_to(nx, self.ns);
            }
        }
        Ok(result)
    }

    /// Substitute `x <- x * f(s)`.
    pub fn scale_x_by(&self, f: &GradedSeries<T>) -> Self {
        let mut slices = BTreeMap::new();
        let mut fpow = GradedSeries::one(EXACT);
        let mut cur: i64 = 0;
        let mut ns_min = self.ns;
        for (e, g) in self.slices.iter() {
            while cur < *e {
                fpow = fpow.mul(f);
                cur += 1;
            }
            let prod = g.mul(&fpow);
            ns_min = ns_min.min(prod.trunc());
            slices.insert(*e, prod);
        }
        Self::normalized(slices, self.nx, ns_min)
    }

    fn converges_geometrically(&self) -> bool {
        match self.slices.get(&0) {
            None => true,
            Some(f) => f.lead_or_trunc() >= 1,
        }
    }

    /// Formal exponential of a series with no constant term.
    pub fn exp(&self) -> Result<Self, SeriesError> {
        if !self.converges_geometrically() || !self.coeff(0, 0).is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        assert!(self.nx < EXACT_GUARD || self.ns < EXACT_GUARD, "truncate exact series before exp");
        let mut result = Self::one(self.nx, self.ns);
        let mut upow = Self::one(self.nx, self.ns);
        let mut k: u32 = 1;
        loop {
            upow = upow.mul(self).truncate_to(self.nx, self.ns);
            if upow.is_zero_to_trunc() {
                break;
            }
            let c = Rational::new(1.into(), factorial(k).to_integer());
            result = result.add(&upow.scale_rational(&c));
            k += 1;
            assert!(k < 100_000, "bivariate exp failed to terminate");
        }
        Ok(result)
    }

    /// Formal logarithm of `1 + u`.
    pub fn log(&self) -> Result<Self, SeriesError> {
        if !self.coeff(0, 0).is_one() {
            return Err(SeriesError::NonUnitLeading);
        }
        let mut u = self.sub(&Self::one(self.nx, self.ns));
        u = u.truncate_to(self.nx, self.ns);
        if !u.converges_geometrically() {
            return Err(SeriesError::NonUnitLeading);
        }
        assert!(self.nx < EXACT_GUARD || self.ns < EXACT_GUARD, "truncate exact series before log");
        let mut result = Self::zero(self.nx, self.ns);
        let mut upow = Self::one(self.nx, self.ns);
        let mut k: i64 = 1;
        loop {
            upow = upow.mul(&u).truncate_to(self.nx, self.ns);
            if upow.is_zero_to_trunc() {
                break;
            }
            let c = Rational::new((if k % 2 == 1 { 1 } else { -1 }).into(), k.into());
            result = result.add(&upow.scale_rational(&c));
            k += 1;
            assert!(k < 100_000, "bivariate log failed to terminate");
        }
        Ok(result)
    }

    /// Rational power; the leading `x`-slice must have a unit leading
    /// coefficient and both scaled leading exponents must stay integral.
    pub fn pow_rational(&self, p: &Rational) -> Result<Self, SeriesError> {
        let jx = self.x_lead();
        if self.is_zero_to_trunc() {
            return Err(SeriesError::NonUnitLeading);
        }
        let lead_slice = self.x_slice(jx);
        let js = lead_slice.lead_or_trunc();
        if !lead_slice.coeff(js).is_one() {
            return Err(SeriesError::NonUnitLeading);
        }
        let to_int = |e: i64| -> Result<i64, SeriesError> {
            let v = Rational::from_integer(e.into()) * p;
            if !v.is_integer() {
                return Err(SeriesError::NonLatticeExponent);
            }
            i64::try_from(v.to_integer()).map_err(|_| SeriesError::NonLatticeExponent)
        };
        let new_jx = to_int(jx)?;
        let new_js = to_int(js)?;
        if new_jx < 0 {
            return Err(SeriesError::NonLatticeExponent);
        }
        let rel = self.mul_monomial(-jx, -js);
        let u = rel.sub(&Self::one(rel.nx, rel.ns));
        if !u.converges_geometrically() {
            return Err(SeriesError::NonUnitLeading);
        }
        assert!(rel.nx < EXACT_GUARD || rel.ns < EXACT_GUARD, "truncate exact series before pow_rational");
        let mut result = Self::one(rel.nx, rel.ns);
        let mut upow = Self::one(rel.nx, rel.ns);
        let mut k: u32 = 1;
        loop {
            upow = upow.mul(&u).truncate_to(rel.nx, rel.ns);
            if upow.is_zero_to_trunc() {
                break;
            }
            result = result.add(&upow.scale_rational(&binomial_rational(p, k)));
            k += 1;
            assert!(k < 100_000, "bivariate pow_rational failed to terminate");
        }
        Ok(result.mul_monomial(new_jx, new_js))
    }

    pub fn is_odd_in_x(&self) -> bool {
        self.slices.keys().all(|e| e % 2 == 1)
    }

    pub fn is_even_in_x(&self) -> bool {
        self.slices.keys().all(|e| e % 2 == 0)
    }

    pub fn eq_to_common_trunc(&self, other: &Self) -> bool {
        let nx = self.nx.min(other.nx);
        let ns = self.ns.min(other.ns);
        self.truncate_to(nx, ns) == other.truncate_to(nx, ns)
    }

    pub fn eval_f64(&self, x: f64, s: f64) -> f64 {
        let mut acc = 0.0;
        for (e, f) in self.slices.iter() {
            acc += x.powi(*e as i32) * f.eval_f64(s);
        }
        acc
    }

    pub fn num_terms(&self) -> usize {
        self.slices.values().map(|f| f.num_terms()).sum()
    }
}

impl<T: Coeff> std::fmt::Display for BiSeries<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.slices.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, (e, g)) in self.slices.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "x^{e}*[{g}]")?;
            }
        }
        write!(f, " + O(x^{})", self.nx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, ratio};

    type Qb = BiSeries<Rational>;
    type Qs = GradedSeries<Rational>;

    fn xs(terms: &[(i64, i64, i64, i64)], nx: i64, ns: i64) -> Qb {
        let mut r = Qb::zero(nx, ns);
        for &(xe, se, n, d) in terms {
            r = r.add(&Qb::monomial(xe, se, ratio(n, d), nx, ns));
        }
        r
    }

    #[test]
    fn mul_and_rectangle() {
        // (1 + x s)(1 - x s) = 1 - x^2 s^2
        let a = xs(&[(0, 0, 1, 1), (1, 1, 1, 1)], 6, 10);
        let b = xs(&[(0, 0, 1, 1), (1, 1, -1, 1)], 6, 10);
        let p = a.mul(&b);
        assert_eq!(p.coeff(0, 0), rat(1));
        assert_eq!(p.coeff(2, 2), rat(-1));
        assert_eq!(p.coeff(1, 1), rat(0));
    }

    #[test]
    fn div_roundtrip() {
        let a = xs(&[(1, -2, 3, 1), (2, 0, 1, 2), (3, 4, -1, 5)], 7, 12);
        let b = xs(&[(0, 0, 1, 1), (1, 1, 1, 3), (2, -1, 2, 1)], 7, 12);
        let q = a.mul(&b).div(&b).unwrap();
        assert!(q.eq_to_common_trunc(&a));
    }

    #[test]
    fn div_with_x_lead() {
        // x-leading divisor: (x^2 f) / (x g)
        let f = xs(&[(2, 0, 1, 1), (3, 2, 1, 1)], 8, 10);
        let g = xs(&[(1, 0, 1, 1), (2, 1, 1, 2)], 8, 10);
        let q = f.div(&g).unwrap();
        assert_eq!(q.x_lead(), 1);
        assert!(q.mul(&g).eq_to_common_trunc(&f));
    }

    #[test]
    fn exact_polynomials_do_not_degrade() {
        // multiplying a Laurent series by the exact polynomial t(t-1) keeps
        // the provable order
        let laurent = xs(&[(0, -4, 1, 1), (0, 0, 1, 1), (0, 4, 1, 3)], 4, 20);
        let t_poly = Qs::from_terms([(4, rat(1)), (8, rat(-1))], EXACT);
        let prod = laurent.scale_s(&t_poly);
        assert_eq!(prod.ns(), 20 + 4);
        assert_eq!(prod.coeff(0, 0), rat(1));
        assert_eq!(prod.coeff(0, 4), rat(0));
    }

    #[test]
    fn exp_log_roundtrip() {
        let u = xs(&[(2, 0, -1, 2), (1, 4, 1, 3), (0, 4, 1, 1)], 7, 16);
        let e = u.exp().unwrap();
        assert!(e.log().unwrap().eq_to_common_trunc(&u));
    }

    #[test]
    fn compose_with_sin() {
        // x^2 composed with sin gives sin^2
        let x2 = Qb::monomial(2, 0, rat(1), 9, 8);
        let sin: Qs = crate::series::sin_series(9);
        let c = x2.compose_x(&sin).unwrap();
        assert_eq!(c.coeff(2, 0), rat(1));
        assert_eq!(c.coeff(4, 0), ratio(-1, 3));
        assert_eq!(c.coeff(6, 0), ratio(2, 45));
    }

    #[test]
    fn scale_x_substitution() {
        // x^2 with x <- x*(1+s) gives x^2(1+s)^2
        let x2 = Qb::monomial(2, 0, rat(1), 5, 8);
        let f = Qs::from_terms([(0, rat(1)), (1, rat(1))], 8);
        let r = x2.scale_x_by(&f);
        assert_eq!(r.coeff(2, 0), rat(1));
        assert_eq!(r.coeff(2, 1), rat(2));
        assert_eq!(r.coeff(2, 2), rat(1));
    }

    #[test]
    fn pow_rational_sqrt() {
        let a = xs(&[(0, 0, 1, 1), (1, 2, 1, 2), (2, 0, 1, 3)], 6, 9);
        let sq = a.mul(&a);
        let back = sq.pow_rational(&ratio(1, 2)).unwrap();
        assert!(back.eq_to_common_trunc(&a));
    }

    #[test]
    fn derivative_and_integral() {
        let f = xs(&[(1, 0, 1, 1), (3, 4, 1, 2)], 8, 12);
        let d = f.derivative_x();
        assert_eq!(d.coeff(0, 0), rat(1));
        assert_eq!(d.coeff(2, 4), ratio(3, 2));
        let back = d.integrate_x();
        assert!(back.eq_to_common_trunc(&f));
    }
}
