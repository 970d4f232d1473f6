//! Laurent series in `s` whose coefficients are trigonometric polynomials in
//! up to four angles, stored on the exponential basis: maps from integer
//! frequency vectors to rationals. Realness means `c(v) = c(-v)` throughout.

use std::collections::BTreeMap;

use num_traits::Zero;
use rustc_hash::FxHashMap;

use crate::coeff::{binomial_rational, Rational};
use crate::series::SeriesError;
use crate::QSeries;

pub const MAX_ANGLES: usize = 4;

/// Frequency vector; unused slots stay zero.
pub type Freq = [i16; MAX_ANGLES];

/// Trigonometric polynomial on the exponential basis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    terms: FxHashMap<Freq, Rational>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut t = TrigPoly::zero();
        t.insert_add([0; MAX_ANGLES], c);
        t
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, v: &Freq) -> Rational {
        self.terms.get(v).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn insert_add(&mut self, v: Freq, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(v) {
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::hash_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, o: &TrigPoly) {
        for (v, c) in o.terms.iter() {
            self.insert_add(*v, c.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return TrigPoly::zero();
        }
        TrigPoly {
            terms: self.terms.iter().map(|(v, q)| (*v, q * c)).collect(),
        }
    }

    pub fn mul_into(&self, o: &TrigPoly, out: &mut TrigPoly, scale: Option<&Rational>) {
        for (va, ca) in self.terms.iter() {
            for (vb, cb) in o.terms.iter() {
                let mut v = *va;
                for (x, y) in v.iter_mut().zip(vb.iter()) {
                    *x += *y;
                }
                let mut c = ca * cb;
                if let Some(sc) = scale {
                    c *= sc;
                }
                out.insert_add(v, c);
            }
        }
    }

    /// Reality: coefficient at `v` equals coefficient at `-v`.
    pub fn is_real_symmetric(&self) -> bool {
        self.terms.iter().all(|(v, c)| {
            let neg = v.map(|x| -x);
            self.coeff(&neg) == *c
        })
    }

    /// Shift by `±d` in the given angle, averaged: multiply by `cos(d ω_i)`.
    pub fn mul_cos(&self, angle: usize, d: i16) -> Self {
        let mut out = TrigPoly::zero();
        let half = crate::coeff::ratio(1, 2);
        for (v, c) in self.terms.iter() {
            let mut up = *v;
            up[angle] += d;
            let mut dn = *v;
            dn[angle] -= d;
            let ch = c * &half;
            out.insert_add(up, ch.clone());
            out.insert_add(dn, ch);
        }
        out
    }

    /// Shift every angle's frequency by `±d` simultaneously, averaged:
    /// multiply by `cos(d Σ ω_i)` over the first `n` angles.
    pub fn mul_cos_sum(&self, n: usize, d: i16) -> Self {
        let mut out = TrigPoly::zero();
        let half = crate::coeff::ratio(1, 2);
        for (v, c) in self.terms.iter() {
            let mut up = *v;
            let mut dn = *v;
            for i in 0..n {
                up[i] += d;
                dn[i] -= d;
            }
            let ch = c * &half;
            out.insert_add(up, ch.clone());
            out.insert_add(dn, ch);
        }
        out
    }

    /// Terms with frequency `f` in `angle`, that slot zeroed out.
    pub fn extract_angle(&self, angle: usize, f: i16) -> Self {
        let mut out = TrigPoly::zero();
        for (v, c) in self.terms.iter() {
            if v[angle] == f {
                let mut w = *v;
                w[angle] = 0;
                out.insert_add(w, c.clone());
            }
        }
        out
    }
}

/// Laurent series in `s` with [`TrigPoly`] coefficients and a provable
/// truncation order, mirroring [`crate::series::GradedSeries`].
#[derive(Debug, Clone, PartialEq)]
pub struct FourierLaurent {
    n: usize,
    orders: BTreeMap<i64, TrigPoly>,
    trunc: i64,
}

impl FourierLaurent {
    pub fn zero(n: usize, trunc: i64) -> Self {
        assert!(n <= MAX_ANGLES);
        FourierLaurent { n, orders: BTreeMap::new(), trunc }
    }

    pub fn constant(n: usize, c: Rational, trunc: i64) -> Self {
        let mut f = Self::zero(n, trunc);
        if !c.is_zero() && 0 < trunc {
            f.orders.insert(0, TrigPoly::constant(c));
        }
        f
    }

    /// `cos ω_angle` as a series-free trig factor.
    pub fn cos_angle(n: usize, angle: usize, trunc: i64) -> Self {
        let mut t = TrigPoly::zero();
        let half = crate::coeff::ratio(1, 2);
        let mut up = [0i16; MAX_ANGLES];
        up[angle] = 1;
        let mut dn = [0i16; MAX_ANGLES];
        dn[angle] = -1;
        t.insert_add(up, half.clone());
        t.insert_add(dn, half);
        let mut f = Self::zero(n, trunc);
        f.orders.insert(0, t);
        f
    }

    /// `cos(ω_i - ω_j)`.
    pub fn cos_diff(n: usize, i: usize, j: usize, trunc: i64) -> Self {
        let mut t = TrigPoly::zero();
        let half = crate::coeff::ratio(1, 2);
        let mut up = [0i16; MAX_ANGLES];
        up[i] = 1;
        up[j] = -1;
        let dn = up.map(|x| -x);
        t.insert_add(up, half.clone());
        t.insert_add(dn, half);
        let mut f = Self::zero(n, trunc);
        f.orders.insert(0, t);
        f
    }

    pub fn n_angles(&self) -> usize {
        self.n
    }

    pub fn trunc(&self) -> i64 {
        self.trunc
    }

    pub fn s_lead(&self) -> i64 {
        self.orders.keys().next().copied().unwrap_or(self.trunc)
    }

    pub fn num_terms(&self) -> usize {
        self.orders.values().map(|t| t.num_terms()).sum()
    }

    pub fn coeff_scalar(&self, order: i64, freq_prefix: &[i16]) -> Rational {
        let mut v = [0i16; MAX_ANGLES];
        v[..freq_prefix.len()].copy_from_slice(freq_prefix);
        self.orders.get(&order).map(|t| t.coeff(&v)).unwrap_or_else(Rational::zero)
    }

    pub fn truncate_to(&self, trunc: i64) -> Self {
        let t = trunc.min(self.trunc);
        FourierLaurent {
            n: self.n,
            orders: self.orders.iter().filter(|(e, _)| **e < t).map(|(e, p)| (*e, p.clone())).collect(),
            trunc: t,
        }
    }

    pub fn shift(&self, d: i64) -> Self {
        FourierLaurent {
            n: self.n,
            orders: self.orders.iter().map(|(e, p)| (*e + d, p.clone())).collect(),
            trunc: self.trunc + d,
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        FourierLaurent {
            n: self.n,
            orders: self.orders.iter().map(|(e, p)| (*e, p.scale(c))).collect(),
            trunc: self.trunc,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let trunc = self.trunc.min(o.trunc);
        let mut orders: BTreeMap<i64, TrigPoly> = BTreeMap::new();
        for (e, p) in self.orders.iter().chain(o.orders.iter()) {
            if *e >= trunc {
                continue;
            }
            orders.entry(*e).or_default().add_assign(p);
        }
        orders.retain(|_, p| !p.is_zero());
        FourierLaurent { n: self.n, orders, trunc }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&crate::coeff::rat(-1)))
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        let la = self.s_lead();
        let lb = o.s_lead();
        let trunc = (self.trunc + lb).min(o.trunc + la);
        let mut orders: BTreeMap<i64, TrigPoly> = BTreeMap::new();
        for (ea, pa) in self.orders.iter() {
            for (eb, pb) in o.orders.iter() {
                let e = ea + eb;
                if e >= trunc {
                    break;
                }
                pa.mul_into(pb, orders.entry(e).or_default(), None);
            }
        }
        orders.retain(|_, p| !p.is_zero());
        FourierLaurent { n: self.n, orders, trunc }
    }

    pub fn pow_i(&self, k: i64) -> Result<Self, SeriesError> {
        assert!(k >= 0, "negative powers go through pow_rational");
        if k == 0 {
            return Ok(Self::constant(self.n, Rational::from_integer(1.into()), self.trunc - self.s_lead()));
        }
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut e = k as u64;
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

    /// Binomial-series power for series with a unit scalar leading term.
    pub fn pow_rational(&self, p: &Rational) -> Result<Self, SeriesError> {
        let lead = self.s_lead();
        let lead_poly = self.orders.get(&lead).ok_or(SeriesError::NonUnitLeading)?;
        // require the leading coefficient to be the scalar 1
        let one = TrigPoly::constant(Rational::from_integer(1.into()));
        if *lead_poly != one {
            return Err(SeriesError::NonUnitLeading);
        }
        let new_lead = Rational::from_integer(lead.into()) * p;
        if !new_lead.is_integer() {
            return Err(SeriesError::NonLatticeExponent);
        }
        let new_lead = i64::try_from(new_lead.to_integer()).map_err(|_| SeriesError::NonLatticeExponent)?;
        let rel_trunc = self.trunc - lead;
        let mut u = self.shift(-lead);
        u.orders.remove(&0);
        let mut result = Self::constant(self.n, Rational::from_integer(1.into()), rel_trunc);
        let mut upow = result.clone();
        let ul = u.s_lead().max(1);
        let mut k: u32 = 1;
        while (k as i64) * ul < rel_trunc {
            upow = upow.mul(&u).truncate_to(rel_trunc);
            if upow.orders.is_empty() {
                break;
            }
            result = result.add(&upow.scale(&binomial_rational(p, k)));
            k += 1;
        }
        Ok(result.shift(new_lead))
    }

    /// Multiply by `cos(d Σ ω_i)`.
    pub fn mul_cos_all(&self, d: i64) -> Self {
        FourierLaurent {
            n: self.n,
            orders: self.orders.iter().map(|(e, p)| (*e, p.mul_cos_sum(self.n, d as i16))).collect(),
            trunc: self.trunc,
        }
    }

    /// Keep only terms with frequency `f` in `angle` (slot zeroed).
    pub fn project_angle(&self, angle: usize, f: i64) -> Self {
        let mut orders = BTreeMap::new();
        for (e, p) in self.orders.iter() {
            let q = p.extract_angle(angle, f as i16);
            if !q.is_zero() {
                orders.insert(*e, q);
            }
        }
        FourierLaurent { n: self.n, orders, trunc: self.trunc }
    }

    /// Extract the scalar series at frequency `f` in `angle` (all other
    /// slots zero).
    pub fn project_angle_scalar(&self, angle: usize, f: i64) -> QSeries {
        let mut v = [0i16; MAX_ANGLES];
        v[angle] = f as i16;
        let mut out = QSeries::zero(self.trunc);
        for (e, p) in self.orders.iter() {
            let c = p.coeff(&v);
            if !c.is_zero() {
                out = out.add(&QSeries::monomial(*e, c, self.trunc));
            }
        }
        out
    }

    /// Zero-frequency component as a scalar series.
    pub fn zero_frequency(&self) -> QSeries {
        self.project_angle_scalar(0, 0)
    }

    pub fn is_real_symmetric(&self) -> bool {
        self.orders.values().all(|p| p.is_real_symmetric())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, ratio};

    #[test]
    fn trig_mul_and_reality() {
        // cos²ω = 1/2 + cos(2ω)/2
        let c = FourierLaurent::cos_angle(1, 0, 6);
        let c2 = c.mul(&c);
        assert_eq!(c2.coeff_scalar(0, &[0]), ratio(1, 2));
        assert_eq!(c2.coeff_scalar(0, &[2]), ratio(1, 4));
        assert_eq!(c2.coeff_scalar(0, &[-2]), ratio(1, 4));
        assert!(c2.is_real_symmetric());
    }

    #[test]
    fn sqrt_of_unit_series() {
        // (1 - 2 s cos ω)^{1/2} squared round-trips
        let one = FourierLaurent::constant(1, rat(1), 10);
        let f = one.sub(&FourierLaurent::cos_angle(1, 0, 10).shift(1).scale(&rat(2)));
        let r = f.pow_rational(&ratio(1, 2)).unwrap();
        assert!(r.mul(&r).sub(&f).orders.is_empty());
    }

    #[test]
    fn projection() {
        let c01 = FourierLaurent::cos_diff(2, 0, 1, 5);
        // coefficient of e^{i(ω0-ω1)} is 1/2; projecting angle 1 at -1 keeps it
        let p = c01.project_angle(1, -1);
        assert_eq!(p.coeff_scalar(0, &[1, 0]), ratio(1, 2));
        let z = c01.project_angle(1, 2);
        assert!(z.orders.is_empty());
    }
}
