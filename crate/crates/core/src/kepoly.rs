//! Polynomials in the renormalized elliptic integrals `K`, `E` with
//! coefficients polynomial in `s²` — the shape of all printed form factors.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::coeff::{rat, ratio, Rational};
use crate::series::EXACT;
use crate::QSeries;

/// Coefficient polynomial in `s²`, ascending.
pub type SPoly = Vec<Rational>;

/// `sum_{(i,j)} p_{ij}(s²) K^i E^j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct KEPolynomial {
    terms: BTreeMap<(u8, u8), SPoly>,
}

fn spoly_trim(mut p: SPoly) -> SPoly {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

fn spoly_add(a: &[Rational], b: &[Rational]) -> SPoly {
    let mut r = vec![Rational::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        r[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        r[i] += c;
    }
    spoly_trim(r)
}

fn spoly_mul(a: &[Rational], b: &[Rational]) -> SPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        for (j, cb) in b.iter().enumerate() {
            r[i + j] += ca * cb;
        }
    }
    spoly_trim(r)
}

impl KEPolynomial {
    pub fn zero() -> Self {
        KEPolynomial::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(0, 0, &[c])
    }

    pub fn constant_i64(n: i64, d: i64) -> Self {
        Self::constant(ratio(n, d))
    }

    /// `p(s²) K^i E^j` from ascending s²-coefficients.
    pub fn term(k_deg: u8, e_deg: u8, s_coeffs: &[Rational]) -> Self {
        let p = spoly_trim(s_coeffs.to_vec());
        let mut terms = BTreeMap::new();
        if !p.is_empty() {
            terms.insert((k_deg, e_deg), p);
        }
        KEPolynomial { terms }
    }

    /// `c * t^m K^i E^j` on the s²-lattice (`t = (s²)²`).
    pub fn t_term(k_deg: u8, e_deg: u8, t_coeffs: &[Rational]) -> Self {
        let mut s = Vec::new();
        for (m, c) in t_coeffs.iter().enumerate() {
            while s.len() < 2 * m {
                s.push(Rational::zero());
            }
            s.push(c.clone());
            s.push(Rational::zero());
        }
        Self::term(k_deg, e_deg, &s)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u8, u8), &SPoly)> {
        self.terms.iter()
    }

    fn insert_add(&mut self, key: (u8, u8), p: SPoly) {
        if p.is_empty() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = spoly_add(o.get(), &p);
                if s.is_empty() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (k, p) in o.terms.iter() {
            r.insert_add(*k, p.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        KEPolynomial {
            terms: self.terms.iter().map(|(k, p)| (*k, p.iter().map(|c| -c).collect())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        KEPolynomial {
            terms: self.terms.iter().map(|(k, p)| (*k, p.iter().map(|q| q * c).collect())).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero();
        for ((ka, ea), pa) in self.terms.iter() {
            for ((kb, eb), pb) in o.terms.iter() {
                r.insert_add((ka + kb, ea + eb), spoly_mul(pa, pb));
            }
        }
        r
    }

    /// Multiply by `K^i E^j`.
    pub fn mul_ke(&self, k_deg: u8, e_deg: u8) -> Self {
        KEPolynomial {
            terms: self.terms.iter().map(|((k, e), p)| ((k + k_deg, e + e_deg), p.clone())).collect(),
        }
    }

    /// No `E` appears at all.
    pub fn is_e_free(&self) -> bool {
        self.terms.keys().all(|(_, e)| *e == 0)
    }

    /// Every monomial has total `(K,E)`-degree exactly `deg`.
    pub fn is_homogeneous(&self, deg: u8) -> bool {
        self.terms.keys().all(|(k, e)| k + e == deg)
    }

    /// Largest total degree present.
    pub fn max_degree(&self) -> u8 {
        self.terms.keys().map(|(k, e)| k + e).max().unwrap_or(0)
    }

    /// Smallest total degree present (255 when zero).
    pub fn min_degree(&self) -> u8 {
        self.terms.keys().map(|(k, e)| k + e).min().unwrap_or(255)
    }

    /// Exact series in `s`, substituting the hypergeometric `K`, `E`.
    pub fn eval_series(&self, k: &QSeries, e: &QSeries, ns: i64) -> QSeries {
        let kd = self.terms.keys().map(|(kk, _)| *kk).max().unwrap_or(0);
        let ed = self.terms.keys().map(|(_, ee)| *ee).max().unwrap_or(0);
        let mut kpow = vec![QSeries::one(ns)];
        for i in 1..=kd as usize {
            kpow.push(kpow[i - 1].mul(k).truncate_to(ns));
        }
        let mut epow = vec![QSeries::one(ns)];
        for i in 1..=ed as usize {
            epow.push(epow[i - 1].mul(e).truncate_to(ns));
        }
        let mut acc = QSeries::zero(ns);
        for ((kk, ee), p) in self.terms.iter() {
            let sp = QSeries::from_terms(p.iter().enumerate().map(|(i, c)| (2 * i as i64, c.clone())), EXACT);
            let term = sp.mul(&kpow[*kk as usize]).mul(&epow[*ee as usize]);
            acc = acc.add(&term.truncate_to(ns));
        }
        acc
    }

    /// Numeric evaluation at `(K, E, s)`.
    pub fn eval_f64(&self, k: f64, e: f64, s: f64) -> f64 {
        let mut acc = 0.0;
        for ((kk, ee), p) in self.terms.iter() {
            let mut ps = 0.0;
            for (i, c) in p.iter().enumerate() {
                ps += crate::coeff::rational_to_f64(c) * s.powi(2 * i as i32);
            }
            acc += ps * k.powi(*kk as i32) * e.powi(*ee as i32);
        }
        acc
    }
}

impl std::fmt::Display for KEPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for ((k, e), p) in self.terms.iter() {
            let mut sp = Vec::new();
            for (i, c) in p.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                match i {
                    0 => sp.push(format!("{c}")),
                    1 => sp.push(format!("{c}*s^2")),
                    _ => sp.push(format!("{c}*s^{}", 2 * i)),
                }
            }
            let coeff = if sp.len() == 1 { sp.pop().unwrap() } else { format!("({})", sp.join(" + ")) };
            let mut factors = vec![coeff];
            match k {
                0 => {}
                1 => factors.push("K".into()),
                _ => factors.push(format!("K^{k}")),
            }
            match e {
                0 => {}
                1 => factors.push("E".into()),
                _ => factors.push(format!("E^{e}")),
            }
            parts.push(factors.join("*"));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Convenience: `c` as a 1-element slice for [`KEPolynomial::term`].
pub fn sp(items: &[(i64, i64)]) -> Vec<Rational> {
    items.iter().map(|&(n, d)| ratio(n, d)).collect()
}

/// Integer s²-polynomial coefficients.
pub fn spi(items: &[i64]) -> Vec<Rational> {
    items.iter().map(|&n| rat(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_eval() {
        // (K - E)(K + E) = K^2 - E^2
        let a = KEPolynomial::term(1, 0, &spi(&[1])).sub(&KEPolynomial::term(0, 1, &spi(&[1])));
        let b = KEPolynomial::term(1, 0, &spi(&[1])).add(&KEPolynomial::term(0, 1, &spi(&[1])));
        let p = a.mul(&b);
        let expect = KEPolynomial::term(2, 0, &spi(&[1])).sub(&KEPolynomial::term(0, 2, &spi(&[1])));
        assert_eq!(p, expect);
        assert!(p.is_homogeneous(2));
        assert!(!p.is_e_free());
        let k = crate::elliptic::hypergeometric_k(20);
        let e = crate::elliptic::hypergeometric_e(20);
        // K^2 - E^2 = (K-E)(K+E) = (t/2 + ...)(2 - ...) = t + ...
        let s = p.eval_series(&k, &e, 20);
        assert_eq!(s.coeff(0), rat(0));
        assert_eq!(s.coeff(4), rat(1));
    }

    #[test]
    fn t_term_lattice() {
        // t K = s^4 K
        let p = KEPolynomial::t_term(1, 0, &spi(&[0, 1]));
        let k = crate::elliptic::hypergeometric_k(16);
        let e = crate::elliptic::hypergeometric_e(16);
        let s = p.eval_series(&k, &e, 16);
        assert_eq!(s.coeff(4), rat(1));
        assert_eq!(s.coeff(8), ratio(1, 4));
    }
}
