//! Coefficients of the closed-form algebra: rational functions of `t` whose
//! denominators are products of powers of `t` and `1-t` only. Any other
//! denominator is a bug in the caller, so division reports failure rather
//! than extending the coefficient ring.
//!
//! Stored as `content * t^tpow * (1-t)^opow * p(t)` with `p` a primitive
//! integer polynomial (content 1, `p[0] != 0`, `p(1) != 0`). By Gauss's
//! lemma products of primitives are primitive, so multiplication — the hot
//! path of the Toda run — needs no gcd work at all.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::coeff::Rational;
use crate::series::EXACT;
use crate::QSeries;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QT {
    content: Rational,
    p: Vec<BigInt>,
    tpow: i32,
    opow: i32,
}

fn ipoly_trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

fn ipoly_add(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, c) in a.iter().enumerate() {
        r[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        r[i] += c;
    }
    ipoly_trim(r)
}

fn ipoly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            if !cb.is_zero() {
                r[i + j] += ca * cb;
            }
        }
    }
    r
}

/// Exact division over ℚ[t] for primitive operands; the quotient of
/// primitives is integral when it exists at all.
fn ipoly_div_exact(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    if den.is_empty() {
        return None;
    }
    if num.is_empty() {
        return Some(Vec::new());
    }
    if num.len() < den.len() {
        return None;
    }
    let mut rem = num.to_vec();
    let mut q = vec![BigInt::zero(); num.len() - den.len() + 1];
    let lead = den.last().unwrap();
    for i in (0..q.len()).rev() {
        let (c, r) = rem[i + den.len() - 1].div_rem(lead);
        if !r.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, d) in den.iter().enumerate() {
                let sub = &c * d;
                rem[i + j] -= sub;
            }
        }
        q[i] = c;
    }
    if rem.iter().all(|c| c.is_zero()) {
        Some(q)
    } else {
        None
    }
}

fn ipoly_content(p: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        if !c.is_zero() {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
    }
    g
}

/// Evaluate at t = 1 (to test divisibility by 1-t).
fn ipoly_at_one(p: &[BigInt]) -> BigInt {
    let mut s = BigInt::zero();
    for c in p {
        s += c;
    }
    s
}

/// Synthetic division by (1 - t); call only when `ipoly_at_one` vanishes.
fn ipoly_div_one_minus_t(p: &[BigInt]) -> Vec<BigInt> {
    // p(t) = (1-t) q(t): q_i = p_0 + p_1 + ... + p_i  (from p_i = q_i - q_{i-1})
    let mut q = Vec::with_capacity(p.len().saturating_sub(1));
    let mut acc = BigInt::zero();
    for c in &p[..p.len() - 1] {
        acc += c;
        q.push(acc.clone());
    }
    q
}

impl QT {
    pub fn zero() -> Self {
        QT { content: Rational::zero(), p: Vec::new(), tpow: 0, opow: 0 }
    }

    pub fn one() -> Self {
        QT::from_rational(Rational::one())
    }

    pub fn from_rational(c: Rational) -> Self {
        if c.is_zero() {
            QT::zero()
        } else {
            QT { content: c, p: vec![BigInt::one()], tpow: 0, opow: 0 }
        }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        QT::from_rational(crate::coeff::ratio(n, d))
    }

    /// `c * t^tpow * (1-t)^opow`.
    pub fn monomial(c: Rational, tpow: i32, opow: i32) -> Self {
        if c.is_zero() {
            QT::zero()
        } else {
            QT { content: c, p: vec![BigInt::one()], tpow, opow }
        }
    }

    /// Polynomial in `t` from ascending rational coefficients.
    pub fn from_poly(coeffs: &[Rational], tpow: i32, opow: i32) -> Self {
        let mut den = BigInt::one();
        for c in coeffs {
            den = den.lcm(c.denom());
        }
        let p: Vec<BigInt> = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        QT {
            content: Rational::new(BigInt::one(), den),
            p: ipoly_trim(p),
            tpow,
            opow,
        }
        .normalized()
    }

    pub fn from_int_poly(coeffs: &[i64], tpow: i32, opow: i32) -> Self {
        let p: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        QT { content: Rational::one(), p: ipoly_trim(p), tpow, opow }.normalized()
    }

    fn normalized(mut self) -> Self {
        if self.p.is_empty() || self.content.is_zero() {
            return QT::zero();
        }
        while self.p.first().map(|c| c.is_zero()).unwrap_or(false) {
            self.p.remove(0);
            self.tpow += 1;
        }
        while !self.p.is_empty() && ipoly_at_one(&self.p).is_zero() {
            self.p = ipoly_trim(ipoly_div_one_minus_t(&self.p));
            self.opow += 1;
        }
        if self.p.is_empty() {
            return QT::zero();
        }
        let mut content = ipoly_content(&self.p);
        if self.p.last().unwrap().is_negative() {
            content = -content;
        }
        if !content.is_one() {
            for c in self.p.iter_mut() {
                *c = &*c / &content;
            }
            self.content *= Rational::from_integer(content);
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let tpow = self.tpow.min(other.tpow);
        let opow = self.opow.min(other.opow);
        // common rational content: gcd of numerators over lcm of denominators
        let gn = self.content.numer().gcd(other.content.numer());
        let gd = self.content.denom().lcm(other.content.denom());
        let g = Rational::new(gn, gd);
        let lift = |q: &QT| -> Vec<BigInt> {
            let scale = (&q.content / &g).to_integer();
            let mut p: Vec<BigInt> = q.p.iter().map(|c| c * &scale).collect();
            for _ in 0..(q.tpow - tpow) {
                p.insert(0, BigInt::zero());
            }
            for _ in 0..(q.opow - opow) {
                p = ipoly_mul(&p, &[BigInt::one(), -BigInt::one()]);
            }
            p
        };
        let p = ipoly_add(&lift(self), &lift(other));
        QT { content: g, p, tpow, opow }.normalized()
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return QT::zero();
        }
        QT { content: -&self.content, p: self.p.clone(), tpow: self.tpow, opow: self.opow }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return QT::zero();
        }
        // primitive * primitive stays primitive: no normalization needed
        QT {
            content: &self.content * &other.content,
            p: ipoly_mul(&self.p, &other.p),
            tpow: self.tpow + other.tpow,
            opow: self.opow + other.opow,
        }
    }

    /// Exact division in the localization; `None` when the quotient would
    /// need a denominator other than `t^a (1-t)^b`.
    pub fn div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(QT::zero());
        }
        let q = ipoly_div_exact(&self.p, &other.p)?;
        Some(
            QT {
                content: &self.content / &other.content,
                p: q,
                tpow: self.tpow - other.tpow,
                opow: self.opow - other.opow,
            }
            .normalized(),
        )
    }

    /// `d/dt`.
    pub fn derivative(&self) -> Self {
        if self.is_zero() {
            return QT::zero();
        }
        let a = BigInt::from(self.tpow);
        let b = BigInt::from(self.opow);
        // d/dt [t^a (1-t)^b p] = t^{a-1}(1-t)^{b-1} [a(1-t)p - b t p + t(1-t)p']
        let one_minus_t = [BigInt::one(), -BigInt::one()];
        let t = [BigInt::zero(), BigInt::one()];
        let pa = ipoly_mul(&ipoly_mul(&[a], &one_minus_t), &self.p);
        let pb = ipoly_mul(&ipoly_mul(&[-b], &t), &self.p);
        let dp: Vec<BigInt> = self
            .p
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        let pd = ipoly_mul(&ipoly_mul(&t, &one_minus_t), &dp);
        QT {
            content: self.content.clone(),
            p: ipoly_add(&ipoly_add(&pa, &pb), &pd),
            tpow: self.tpow - 1,
            opow: self.opow - 1,
        }
        .normalized()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() || self.is_zero() {
            return QT::zero();
        }
        QT { content: &self.content * c, p: self.p.clone(), tpow: self.tpow, opow: self.opow }
    }

    /// Multiply by an integer power of `t`.
    pub fn shift_t(&self, dt: i32) -> Self {
        if self.is_zero() {
            return QT::zero();
        }
        QT { content: self.content.clone(), p: self.p.clone(), tpow: self.tpow + dt, opow: self.opow }
    }

    /// Multiply by an integer power of `1-t`.
    pub fn shift_omt(&self, d: i32) -> Self {
        if self.is_zero() {
            return QT::zero();
        }
        QT { content: self.content.clone(), p: self.p.clone(), tpow: self.tpow, opow: self.opow + d }
    }

    /// Exact series on the s-lattice, truncated at `ns`.
    pub fn to_series(&self, ns: i64) -> QSeries {
        if self.is_zero() {
            return QSeries::zero(ns);
        }
        let mut p = QSeries::from_terms(
            self.p
                .iter()
                .enumerate()
                .map(|(i, c)| (4 * i as i64, Rational::from_integer(c.clone()) * &self.content)),
            EXACT,
        );
        p = p.shift(4 * self.tpow as i64);
        let omt = QSeries::from_terms([(0, Rational::one()), (4, -Rational::one())], EXACT)
            .truncate_to(ns + 4 * self.opow.unsigned_abs() as i64 + 8);
        let omt_pow = omt.pow_i(self.opow as i64).expect("1-t is a unit");
        p.mul(&omt_pow).truncate_to(ns)
    }

    pub fn numer_degree(&self) -> usize {
        self.p.len().saturating_sub(1)
    }

    /// Integer coefficients after clearing the content against a common
    /// denominator `d` (which the content's denominator must divide).
    pub(crate) fn scaled_ints(&self, d: &BigInt) -> (Vec<BigInt>, i32, i32) {
        let scale = self.content.numer() * (d / self.content.denom());
        (self.p.iter().map(|c| c * &scale).collect(), self.tpow, self.opow)
    }

    /// Rebuild from integer coefficients over the common denominator `d`.
    pub(crate) fn from_scaled(p: Vec<BigInt>, tpow: i32, opow: i32, d: &BigInt) -> Self {
        QT {
            content: Rational::new(BigInt::one(), d.clone()),
            p: ipoly_trim(p),
            tpow,
            opow,
        }
        .normalized()
    }

    pub(crate) fn content_denom(&self) -> &BigInt {
        self.content.denom()
    }

    /// Bit bound of the scaled integer coefficients.
    pub(crate) fn scaled_bits(&self, d: &BigInt) -> u64 {
        let scale_bits = self.content.numer().bits() + (d.bits().saturating_sub(self.content.denom().bits()) + 1);
        self.p.iter().map(|c| c.bits()).max().unwrap_or(0) + scale_bits
    }

    pub(crate) fn poly_len(&self) -> usize {
        self.p.len()
    }

    /// Evaluate at `t = tv` in the prime field `F_p` (for randomized
    /// product verification).
    pub(crate) fn eval_mod(&self, p: u64, tv: u64) -> u64 {
        if self.is_zero() {
            return 0;
        }
        let bigp = BigInt::from(p);
        let to_res = |n: &BigInt| -> u64 {
            let r = n.mod_floor(&bigp);
            u64::try_from(r).expect("residue fits")
        };
        let mut acc: u64 = 0;
        for c in self.p.iter().rev() {
            acc = mod_add(mod_mul(acc, tv, p), to_res(c), p);
        }
        let num = to_res(self.content.numer());
        let den = to_res(self.content.denom());
        acc = mod_mul(acc, mod_mul(num, mod_inv(den, p), p), p);
        acc = mod_mul(acc, mod_pow_signed(tv, self.tpow, p), p);
        let omt = mod_sub(1, tv, p);
        mod_mul(acc, mod_pow_signed(omt, self.opow, p), p)
    }

    /// Rational-coefficient exact division of the polynomial parts (the
    /// quotient may have any rational content); `None` only when the
    /// polynomial division itself has a remainder.
    pub(crate) fn div_rational(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(QT::zero());
        }
        if self.p.len() < other.p.len() {
            return None;
        }
        // integer fast path (quotient of primitives is integral when exact)
        if let Some(q) = ipoly_div_exact(&self.p, &other.p) {
            return Some(
                QT {
                    content: &self.content / &other.content,
                    p: q,
                    tpow: self.tpow - other.tpow,
                    opow: self.opow - other.opow,
                }
                .normalized(),
            );
        }
        // rational long division
        let mut rem: Vec<Rational> = self.p.iter().map(|c| Rational::from_integer(c.clone())).collect();
        let den: Vec<Rational> = other.p.iter().map(|c| Rational::from_integer(c.clone())).collect();
        let mut q = vec![Rational::zero(); self.p.len() - other.p.len() + 1];
        let lead = den.last().unwrap();
        for i in (0..q.len()).rev() {
            let c = &rem[i + den.len() - 1] / lead;
            if !c.is_zero() {
                for (j, d) in den.iter().enumerate() {
                    let sub = &c * d;
                    rem[i + j] -= sub;
                }
            }
            q[i] = c;
        }
        if !rem.iter().all(|c| c.is_zero()) {
            return None;
        }
        let quotient = QT::from_poly(&q, self.tpow - other.tpow, self.opow - other.opow);
        Some(quotient.scale(&(&self.content / &other.content)))
    }
}

pub(crate) fn mod_mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn mod_add(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + b as u128) % p as u128) as u64
}

pub(crate) fn mod_sub(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 + p as u128 - b as u128 % p as u128) % p as u128) as u64
}

pub(crate) fn mod_pow(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u64 = 1;
    base %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mod_mul(acc, base, p);
        }
        base = mod_mul(base, base, p);
        e >>= 1;
    }
    acc
}

/// Fermat inverse; `p` prime, `a` nonzero mod `p`.
pub(crate) fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

pub(crate) fn mod_pow_signed(base: u64, e: i32, p: u64) -> u64 {
    if e >= 0 {
        mod_pow(base, e as u64, p)
    } else {
        mod_pow(mod_inv(base, p), (-(e as i64)) as u64, p)
    }
}

/// Pack ascending integer coefficients into one big integer at base `2^b`.
pub(crate) fn kronecker_pack(p: &[BigInt], b: u64) -> BigInt {
    let mut n = BigInt::zero();
    for c in p.iter().rev() {
        n = (n << b) + c;
    }
    n
}

/// Balanced-digit unpacking, inverse of [`kronecker_pack`] as long as every
/// coefficient fits in `b - 1` bits.
///
/// Adding `2^{b-1}` to every digit slot makes the number non-negative with
/// plain binary digits, which are then read straight out of the limb array.
pub(crate) fn kronecker_unpack(n: &BigInt, b: u64) -> Vec<BigInt> {
    if n.is_zero() {
        return Vec::new();
    }
    let len = n.bits() / b + 2;
    let half = BigInt::one() << (b - 1);
    // offset = half * (2^{b*len} - 1)/(2^b - 1): half in every slot
    let offset = ((BigInt::one() << (b * len)) - BigInt::one()) / ((BigInt::one() << b) - BigInt::one()) * &half;
    let m = n + &offset;
    debug_assert!(!m.is_negative());
    let limbs: Vec<u64> = m.magnitude().iter_u64_digits().collect();
    let read_bit_window = |start: u64, width: u64| -> BigInt {
        // gather bits [start, start+width) into a little-endian u64 vector
        let mut out = vec![0u64; ((width + 63) / 64) as usize + 1];
        let limb0 = (start / 64) as usize;
        let shift = start % 64;
        let nlimbs = ((width + shift) + 63) / 64;
        for i in 0..nlimbs as usize {
            let lo = limbs.get(limb0 + i).copied().unwrap_or(0);
            let hi = limbs.get(limb0 + i + 1).copied().unwrap_or(0);
            let v = if shift == 0 { lo } else { (lo >> shift) | (hi << (64 - shift)) };
            out[i] = v;
        }
        // mask off bits beyond `width`
        let top = (width % 64) as usize;
        let full = (width / 64) as usize;
        if top > 0 {
            out[full] &= (1u64 << top) - 1;
            out.truncate(full + 1);
        } else {
            out.truncate(full);
        }
        BigInt::from(num_bigint::BigUint::from_slice(
            &out.iter().flat_map(|v| [*v as u32, (*v >> 32) as u32]).collect::<Vec<u32>>(),
        ))
    };
    let mut p = Vec::with_capacity(len as usize);
    for slot in 0..len {
        if slot * b >= 64 * limbs.len() as u64 {
            break;
        }
        p.push(read_bit_window(slot * b, b) - &half);
    }
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

impl std::fmt::Display for QT {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (i, c) in self.p.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let q = Rational::from_integer(c.clone()) * &self.content;
            let body = match i {
                0 => format!("{q}"),
                1 => format!("{q}*t"),
                _ => format!("{q}*t^{i}"),
            };
            if !parts.is_empty() && !q.is_negative() {
                parts.push(format!("+{body}"));
            } else {
                parts.push(body);
            }
        }
        let core = parts.join("");
        let core = if self.p.iter().filter(|c| !c.is_zero()).count() > 1 { format!("({core})") } else { core };
        write!(f, "{core}")?;
        if self.tpow != 0 {
            write!(f, "*t^{}", self.tpow)?;
        }
        if self.opow != 0 {
            write!(f, "*(1-t)^{}", self.opow)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, ratio};

    #[test]
    fn reduction() {
        // t^2 - t^3 = t^2 (1-t)
        let q = QT::from_int_poly(&[0, 0, 1, -1], 0, 0);
        assert_eq!(q, QT::monomial(rat(1), 2, 1));
        // content extraction: 6 + 6t -> 6(1 + t)
        let q = QT::from_int_poly(&[6, 6], 0, 0);
        assert_eq!(q.numer_degree(), 1);
        assert_eq!(q.to_series(8).coeff(0), rat(6));
    }

    #[test]
    fn add_and_mul() {
        let a = QT::monomial(rat(1), -1, 0); // 1/t
        let b = QT::monomial(rat(1), 0, -1); // 1/(1-t)
        // 1/t + 1/(1-t) = 1/(t(1-t))
        let s = a.add(&b);
        assert_eq!(s, QT::monomial(rat(1), -1, -1));
        let p = a.mul(&b);
        assert_eq!(p, QT::monomial(rat(1), -1, -1));
        // fractional contents combine
        let c = QT::from_ratio(3, 4).add(&QT::from_ratio(5, 6));
        assert_eq!(c, QT::from_ratio(19, 12));
    }

    #[test]
    fn division() {
        let a = QT::from_int_poly(&[1, 1], 0, 0); // 1 + t
        let b = QT::from_int_poly(&[1, 2, 1], -1, 2); // (1+t)^2 (1-t)^2 / t
        let q = b.div(&a).unwrap();
        assert_eq!(q, QT::from_int_poly(&[1, 1], -1, 2));
        // non-localized denominator fails
        assert!(QT::one().div(&a).is_none());
        // rational-content division
        let x = QT::from_poly(&[ratio(1, 2), ratio(1, 2)], 0, 0);
        let y = x.div(&QT::from_ratio(1, 4)).unwrap();
        assert_eq!(y, QT::from_int_poly(&[2, 2], 0, 0));
    }

    #[test]
    fn derivative_matches_series() {
        let q = QT::from_int_poly(&[3, 0, 1], -2, -1); // (3 + t^2)/(t^2 (1-t))
        let d = q.derivative();
        let lhs = d.to_series(20);
        let rhs = q.to_series(28).derivative_t();
        assert!(lhs.eq_to_common_trunc(&rhs));
        let q2 = QT::from_poly(&[ratio(1, 3), ratio(-2, 7)], 1, 2);
        assert!(q2.derivative().to_series(20).eq_to_common_trunc(&q2.to_series(28).derivative_t()));
    }

    #[test]
    fn series_of_simple() {
        // 1/(1-t) = 1 + t + t^2 + ...
        let q = QT::monomial(rat(1), 0, -1);
        let s = q.to_series(12);
        assert_eq!(s.coeff(0), rat(1));
        assert_eq!(s.coeff(4), rat(1));
        assert_eq!(s.coeff(8), rat(1));
        assert_eq!(QT::from_ratio(-1, 2).to_series(8).coeff(0), ratio(-1, 2));
    }
}

impl QT {
    /// Largest coefficient bit-length (diagnostics).
    pub fn max_bits(&self) -> u64 {
        self.p.iter().map(|c| c.bits()).max().unwrap_or(0).max(self.content.numer().bits()).max(self.content.denom().bits())
    }
}
