//! Closed-form differential algebra for the diagonal correlations.
//!
//! Elements are polynomials in the generators
//!
//! - `S = sn(z,t)`, `C = cn(z,t) dn(z,t)`, `X = 𝓔(z,t) - xE` with `z = xK`,
//! - `K`, `E` (renormalized complete integrals) and the bare variable `x`,
//!
//! over rational functions of `t` with denominators `t^a (1-t)^b`, carried as
//! a prefactor `Φ^p cos(x)^c t^{e/2} (1-t)^{f/4}` with `Φ = θ₄(x|τ)/θ₃(0|τ)`
//! times an even part plus `C` times an odd part; `C² = (1-S²)(1-tS²)`
//! reduces higher `C`-powers away.
//!
//! The algebra is closed under `d/dt`: total derivatives through `z = xK`
//! cancel every explicit `x`, leaving the generator rules implemented in
//! `d_dt` (each verified against the series engine in the tests).

mod packed;
mod qt;

pub use qt::QT;

use std::collections::BTreeMap;

use num_traits::One;
use thiserror::Error;

use crate::coeff::{ratio, Rational};
use crate::elliptic::EllipticContext;
use crate::series::EXACT;
use crate::{QBiSeries, QSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiffAlgError {
    #[error("quotient does not lie in the algebra")]
    NotDivisible,
    #[error("division by zero element")]
    ZeroDivisor,
    #[error("prefactors are incompatible: {0}")]
    IncompatiblePrefactors(String),
}

/// Monomial exponents `S^s X^x K^k E^e x^v`; the derive order gives an
/// admissible lexicographic term order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Mono {
    pub s: u8,
    pub x: u8,
    pub k: u8,
    pub e: u8,
    pub v: u8,
}

impl Mono {
    pub const ONE: Mono = Mono { s: 0, x: 0, k: 0, e: 0, v: 0 };

    fn mul(&self, o: &Mono) -> Mono {
        Mono {
            s: self.s.checked_add(o.s).expect("S-degree overflow"),
            x: self.x.checked_add(o.x).expect("X-degree overflow"),
            k: self.k.checked_add(o.k).expect("K-degree overflow"),
            e: self.e.checked_add(o.e).expect("E-degree overflow"),
            v: self.v.checked_add(o.v).expect("x-degree overflow"),
        }
    }

    fn try_div(&self, o: &Mono) -> Option<Mono> {
        Some(Mono {
            s: self.s.checked_sub(o.s)?,
            x: self.x.checked_sub(o.x)?,
            k: self.k.checked_sub(o.k)?,
            e: self.e.checked_sub(o.e)?,
            v: self.v.checked_sub(o.v)?,
        })
    }
}

/// Polynomial in the generators over [`QT`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Mono, QT>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly::default()
    }

    pub fn one() -> Self {
        MultiPoly::monomial(Mono::ONE, QT::one())
    }

    pub fn monomial(m: Mono, c: QT) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &QT)> {
        self.terms.iter()
    }

    fn insert_add(&mut self, m: Mono, c: QT) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in o.terms.iter() {
            r.insert_add(*m, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    /// Pair count above which multiplication and division switch to the
    /// Kronecker-packed fast path.
    const PACKED_THRESHOLD: usize = 4096;

    pub fn mul(&self, o: &Self) -> Self {
        if self.num_terms() * o.num_terms() >= Self::PACKED_THRESHOLD {
            if std::ptr::eq(self, o) || self == o {
                return packed::square_packed(self);
            }
            return packed::mul_packed(self, o);
        }
        self.mul_naive(o)
    }

    pub(crate) fn mul_naive(&self, o: &Self) -> Self {
        let mut r = MultiPoly::zero();
        for (ma, ca) in self.terms.iter() {
            for (mb, cb) in o.terms.iter() {
                r.insert_add(ma.mul(mb), ca.mul(cb));
            }
        }
        r
    }

    pub fn square(&self) -> Self {
        if self.num_terms() * self.num_terms() >= Self::PACKED_THRESHOLD {
            packed::square_packed(self)
        } else {
            self.mul_naive(self)
        }
    }

    pub fn scale(&self, c: &QT) -> Self {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly {
            terms: self.terms.iter().map(|(m, q)| (*m, q.mul(c))).collect(),
        }
    }

    fn leading(&self) -> Option<(&Mono, &QT)> {
        self.terms.iter().next_back()
    }

    /// Evaluate mod `p` at the generator values `vals = [S, X, K, E, x]`
    /// and `t = tv`.
    fn eval_mod(&self, p: u64, vals: &[u64; 5], tv: u64) -> u64 {
        use qt::{mod_add, mod_mul, mod_pow};
        let mut acc: u64 = 0;
        for (m, c) in self.terms.iter() {
            let mut v = c.eval_mod(p, tv);
            for (g, d) in vals.iter().zip([m.s, m.x, m.k, m.e, m.v]) {
                if d > 0 {
                    v = mod_mul(v, mod_pow(*g, d as u64, p), p);
                }
            }
            acc = mod_add(acc, v, p);
        }
        acc
    }

    /// Exact multivariate division; fails when the quotient leaves the ring.
    pub fn exact_div(&self, den: &Self) -> Result<Self, DiffAlgError> {
        if self.num_terms() * den.num_terms() >= Self::PACKED_THRESHOLD {
            // retry with doubled bases before surrendering to the slow path;
            // intermediate remainder heights are hard to bound a priori
            let dbg = std::env::var_os("ISING_DIV_DEBUG").is_some();
            let mut bb = packed::division_base(self, den);
            for attempt in 0..3 {
                let t0 = std::time::Instant::now();
                if let Some(result) = packed::exact_div_packed(self, den, bb) {
                    let q = result?;
                    // A wrong base can only corrupt the quotient, never report
                    // a wrong NotDivisible as Ok; check q*den = self at random
                    // points of two 62-bit prime fields (Schwartz-Zippel,
                    // failure odds < 2^-100 at these degrees).
                    let ok = verify_product_mod(&q, den, self);
                    if dbg {
                        eprintln!(
                            "[div] attempt {attempt} bb={bb} verified={ok} in {:.2?} ({}x{} -> {})",
                            t0.elapsed(),
                            self.num_terms(),
                            den.num_terms(),
                            q.num_terms()
                        );
                    }
                    if ok {
                        return Ok(q);
                    }
                } else if dbg {
                    eprintln!("[div] attempt {attempt} bb={bb} aborted in {:.2?}", t0.elapsed());
                }
                bb *= 2;
            }
        }
        self.exact_div_naive(den)
    }

    fn exact_div_naive(&self, den: &Self) -> Result<Self, DiffAlgError> {
        let (dm, dc) = den.leading().ok_or(DiffAlgError::ZeroDivisor)?;
        let mut rem = self.clone();
        let mut q = MultiPoly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.try_div(dm).ok_or(DiffAlgError::NotDivisible)?;
            let c = rc.div(dc).ok_or(DiffAlgError::NotDivisible)?;
            rem = rem.sub(&den.mul(&MultiPoly::monomial(m, c.clone())));
            q.insert_add(m, c);
        }
        Ok(q)
    }

    /// Evaluate on series generators.
    fn to_series(&self, cache: &SeriesCache) -> QBiSeries {
        let mut acc = QBiSeries::zero(cache.nx, cache.ns);
        for (m, c) in self.terms.iter() {
            let mut term = QBiSeries::from_s_series(&c.to_series(cache.ns));
            term = term.mul(cache.pow(Gen::S, m.s));
            term = term.mul(cache.pow(Gen::X, m.x));
            term = term.mul(cache.pow(Gen::K, m.k));
            term = term.mul(cache.pow(Gen::E, m.e));
            term = term.mul(cache.pow(Gen::V, m.v));
            acc = acc.add(&term);
        }
        acc
    }

    pub fn max_degrees(&self) -> Mono {
        let mut d = Mono::ONE;
        for m in self.terms.keys() {
            d.s = d.s.max(m.s);
            d.x = d.x.max(m.x);
            d.k = d.k.max(m.k);
            d.e = d.e.max(m.e);
            d.v = d.v.max(m.v);
        }
        d
    }
}

/// `Φ^phi cos(x)^cosx t^{t2/2} (1-t)^{omt4/4}`; `t2` counts half-powers of
/// `t`, `omt4` quarter-powers of `1-t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Prefactor {
    pub phi: i32,
    pub cosx: i32,
    pub t2: i32,
    pub omt4: i32,
}

/// Closed-form expression: `prefactor * (even + C * odd)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffAlgElement {
    pub pre: Prefactor,
    pub even: MultiPoly,
    pub odd: MultiPoly,
}

#[derive(Clone, Copy)]
enum Gen {
    S,
    X,
    K,
    E,
    V,
}

/// Randomized check that `q * den = num`, at one point in each of two prime
/// fields.
fn verify_product_mod(q: &MultiPoly, den: &MultiPoly, num: &MultiPoly) -> bool {
    const PRIMES: [u64; 2] = [(1 << 61) - 1, 4611686018427387847];
    let mut seed = 0x9e3779b97f4a7c15u64
        ^ (q.num_terms() as u64).wrapping_mul(0xbf58476d1ce4e5b9)
        ^ (num.num_terms() as u64).rotate_left(17);
    let mut next = move || {
        seed = seed.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = seed;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    };
    for p in PRIMES {
        // keep t away from 0 and 1 so denominators stay invertible
        let tv = 2 + next() % (p - 3);
        let vals = [2 + next() % (p - 3), 2 + next() % (p - 3), 2 + next() % (p - 3), 2 + next() % (p - 3), 2 + next() % (p - 3)];
        let lhs = qt::mod_mul(q.eval_mod(p, &vals, tv), den.eval_mod(p, &vals, tv), p);
        if lhs != num.eval_mod(p, &vals, tv) {
            return false;
        }
    }
    true
}

/// `W = C² = (1-S²)(1-tS²)` as a polynomial.
fn c_squared() -> MultiPoly {
    let mut w = MultiPoly::zero();
    w.insert_add(Mono::ONE, QT::one());
    w.insert_add(Mono { s: 2, ..Mono::ONE }, QT::from_poly(&[-Rational::one(), -Rational::one()], 0, 0));
    w.insert_add(Mono { s: 4, ..Mono::ONE }, QT::monomial(Rational::one(), 1, 0));
    w
}

/// Generator derivative: even and odd parts of `d(gen)/dt` divided by the
/// power-rule factor, as lists of `(Δmono relative to gen^{deg-1}, coeff)`.
struct GenRule {
    even: Vec<(Mono, QT)>,
    odd: Vec<(Mono, QT)>,
}

fn rules() -> [GenRule; 4] {
    let half_omt = || QT::monomial(ratio(1, 2), 0, -1);
    let neg_half_omt = || QT::monomial(ratio(-1, 2), 0, -1);
    // dS = [S - S^3]/(2(1-t)) - C X /(2t(1-t))
    let d_s = GenRule {
        even: vec![
            (Mono { s: 1, ..Mono::ONE }, half_omt()),
            (Mono { s: 3, ..Mono::ONE }, neg_half_omt()),
        ],
        odd: vec![(Mono { x: 1, ..Mono::ONE }, QT::monomial(ratio(-1, 2), -1, -1))],
    };
    // dX = -[X(1-S^2)]/(2(1-t)) ... in (1-t) form:
    // dX = [X cn^2 - S C]/(2(t-1)) = -[X(1-S^2) - S C]/(2(1-t))
    let d_x = GenRule {
        even: vec![
            (Mono { x: 1, ..Mono::ONE }, neg_half_omt()),
            (Mono { s: 2, x: 1, ..Mono::ONE }, half_omt()),
        ],
        odd: vec![(Mono { s: 1, ..Mono::ONE }, half_omt())],
    };
    // dK = E/(2t(1-t)) - K/(2t)
    let d_k = GenRule {
        even: vec![
            (Mono { e: 1, ..Mono::ONE }, QT::monomial(ratio(1, 2), -1, -1)),
            (Mono { k: 1, ..Mono::ONE }, QT::monomial(ratio(-1, 2), -1, 0)),
        ],
        odd: vec![],
    };
    // dE = (E - K)/(2t)
    let d_e = GenRule {
        even: vec![
            (Mono { e: 1, ..Mono::ONE }, QT::monomial(ratio(1, 2), -1, 0)),
            (Mono { k: 1, ..Mono::ONE }, QT::monomial(ratio(-1, 2), -1, 0)),
        ],
        odd: vec![],
    };
    [d_s, d_x, d_k, d_e]
}

/// `dC/dt` as an element (even + odd·C): `dC = S(1+t-2tS²)X/(2t(1-t)) - S²C/(1-t)`.
fn d_c() -> (MultiPoly, MultiPoly) {
    let mut even = MultiPoly::zero();
    even.insert_add(
        Mono { s: 1, x: 1, ..Mono::ONE },
        QT::from_poly(&[ratio(1, 2), ratio(1, 2)], -1, -1),
    );
    even.insert_add(Mono { s: 3, x: 1, ..Mono::ONE }, QT::monomial(-Rational::one(), 0, -1));
    let mut odd = MultiPoly::zero();
    odd.insert_add(Mono { s: 2, ..Mono::ONE }, QT::monomial(-Rational::one(), 0, -1));
    (even, odd)
}

/// `d/dt log Φ = -(1-S²)/(4(1-t)) - X²/(4t(1-t))`.
fn d_log_phi() -> MultiPoly {
    let mut p = MultiPoly::zero();
    p.insert_add(Mono::ONE, QT::monomial(ratio(-1, 4), 0, -1));
    p.insert_add(Mono { s: 2, ..Mono::ONE }, QT::monomial(ratio(1, 4), 0, -1));
    p.insert_add(Mono { x: 2, ..Mono::ONE }, QT::monomial(ratio(-1, 4), -1, -1));
    p
}

/// Derivative of a bare polynomial via the power rule; returns (even, odd).
fn derive_poly(p: &MultiPoly) -> (MultiPoly, MultiPoly) {
    let rules = rules();
    let mut even = MultiPoly::zero();
    let mut odd = MultiPoly::zero();
    for (m, c) in p.terms() {
        // coefficient derivative
        even.insert_add(*m, c.derivative());
        let degs = [m.s, m.x, m.k, m.e];
        for (gi, rule) in rules.iter().enumerate() {
            let deg = degs[gi];
            if deg == 0 {
                continue;
            }
            let mut base = *m;
            match gi {
                0 => base.s -= 1,
                1 => base.x -= 1,
                2 => base.k -= 1,
                _ => base.e -= 1,
            }
            let factor = c.scale(&Rational::from_integer(deg.into()));
            for (dm, dc) in rule.even.iter() {
                even.insert_add(base.mul(dm), factor.mul(dc));
            }
            for (dm, dc) in rule.odd.iter() {
                odd.insert_add(base.mul(dm), factor.mul(dc));
            }
        }
    }
    (even, odd)
}

impl DiffAlgElement {
    pub fn new(pre: Prefactor, even: MultiPoly, odd: MultiPoly) -> Self {
        DiffAlgElement { pre, even, odd }
    }

    pub fn zero() -> Self {
        DiffAlgElement { pre: Prefactor::default(), even: MultiPoly::zero(), odd: MultiPoly::zero() }
    }

    pub fn one() -> Self {
        DiffAlgElement { pre: Prefactor::default(), even: MultiPoly::one(), odd: MultiPoly::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.even.is_zero() && self.odd.is_zero()
    }

    /// One of `S`, `C`, `X`, `K`, `E`, `x` as an element.
    pub fn generator(name: &str) -> Self {
        let mut e = DiffAlgElement::one();
        match name {
            "S" => e.even = MultiPoly::monomial(Mono { s: 1, ..Mono::ONE }, QT::one()),
            "X" => e.even = MultiPoly::monomial(Mono { x: 1, ..Mono::ONE }, QT::one()),
            "K" => e.even = MultiPoly::monomial(Mono { k: 1, ..Mono::ONE }, QT::one()),
            "E" => e.even = MultiPoly::monomial(Mono { e: 1, ..Mono::ONE }, QT::one()),
            "x" => e.even = MultiPoly::monomial(Mono { v: 1, ..Mono::ONE }, QT::one()),
            "C" => {
                e.even = MultiPoly::zero();
                e.odd = MultiPoly::one();
            }
            _ => panic!("unknown generator `{name}`"),
        }
        e
    }

    /// Fold integer `t` and `1-t` prefactor powers into the coefficients so
    /// both elements carry the target prefactor. Fails if parities differ.
    fn align_pre(&self, target: Prefactor) -> Result<Self, DiffAlgError> {
        if self.pre.phi != target.phi || self.pre.cosx != target.cosx {
            return Err(DiffAlgError::IncompatiblePrefactors(
                "theta-ratio or cos powers differ".into(),
            ));
        }
        let dt2 = self.pre.t2 - target.t2;
        let do4 = self.pre.omt4 - target.omt4;
        if dt2 % 2 != 0 || do4 % 4 != 0 {
            return Err(DiffAlgError::IncompatiblePrefactors(
                "fractional power difference cannot be folded".into(),
            ));
        }
        let q = QT::monomial(Rational::one(), dt2 / 2, do4 / 4);
        Ok(DiffAlgElement { pre: target, even: self.even.scale(&q), odd: self.odd.scale(&q) })
    }

    pub fn add(&self, o: &Self) -> Result<Self, DiffAlgError> {
        if self.is_zero() {
            return Ok(o.clone());
        }
        if o.is_zero() {
            return Ok(self.clone());
        }
        let target = Prefactor {
            phi: self.pre.phi,
            cosx: self.pre.cosx,
            t2: self.pre.t2.min(o.pre.t2),
            omt4: self.pre.omt4.min(o.pre.omt4),
        };
        let a = self.align_pre(target)?;
        let b = o.align_pre(target)?;
        Ok(DiffAlgElement { pre: target, even: a.even.add(&b.even), odd: a.odd.add(&b.odd) })
    }

    pub fn sub(&self, o: &Self) -> Result<Self, DiffAlgError> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        DiffAlgElement { pre: self.pre, even: self.even.neg(), odd: self.odd.neg() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let pre = Prefactor {
            phi: self.pre.phi + o.pre.phi,
            cosx: self.pre.cosx + o.pre.cosx,
            t2: self.pre.t2 + o.pre.t2,
            omt4: self.pre.omt4 + o.pre.omt4,
        };
        let w = c_squared();
        let even = self.even.mul(&o.even).add(&self.odd.mul(&o.odd).mul(&w));
        let odd = self.even.mul(&o.odd).add(&self.odd.mul(&o.even));
        DiffAlgElement { pre, even, odd }
    }

    pub fn square(&self) -> Self {
        let pre = Prefactor {
            phi: 2 * self.pre.phi,
            cosx: 2 * self.pre.cosx,
            t2: 2 * self.pre.t2,
            omt4: 2 * self.pre.omt4,
        };
        let w = c_squared();
        let even = self.even.square().add(&self.odd.square().mul(&w));
        let odd = self.even.mul(&self.odd).scale(&QT::from_ratio(2, 1));
        DiffAlgElement { pre, even, odd }
    }

    pub fn scale_qt(&self, c: &QT) -> Self {
        DiffAlgElement { pre: self.pre, even: self.even.scale(c), odd: self.odd.scale(c) }
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.scale_qt(&QT::from_rational(c.clone()))
    }

    /// The normal form is maintained by construction (odd degree ≤ 1 in `C`,
    /// coefficients reduced); normalize is therefore idempotent cleanup.
    pub fn normalize(&self) -> Self {
        self.clone()
    }

    /// Exact `d/dt`, staying inside the algebra; the prefactor is unchanged
    /// and its logarithmic derivative folds into the polynomial part.
    pub fn d_dt(&self) -> Self {
        let mut log_term = d_log_phi().scale(&QT::from_rational(Rational::from_integer(self.pre.phi.into())));
        log_term.insert_add(Mono::ONE, QT::monomial(ratio(self.pre.t2 as i64, 2), -1, 0));
        log_term.insert_add(Mono::ONE, QT::monomial(ratio(-(self.pre.omt4 as i64), 4), 0, -1));
        let (dc_e, dc_o) = d_c();
        let (dev_e, dev_o) = derive_poly(&self.even);
        let (dod_e, dod_o) = derive_poly(&self.odd);
        let w = c_squared();
        // d(ev + od C) = D(ev) + D(od) C + od dC + (ev + od C) L
        let even = dev_e
            .add(&dod_o.mul(&w))
            .add(&self.odd.mul(&dc_e))
            .add(&self.even.mul(&log_term));
        let odd = dev_o
            .add(&dod_e)
            .add(&self.odd.mul(&dc_o))
            .add(&self.odd.mul(&log_term));
        DiffAlgElement { pre: self.pre, even, odd }
    }

    /// Exact division in the `{1, C}` module over the generator ring.
    pub fn exact_divide(&self, den: &Self) -> Result<Self, DiffAlgError> {
        if den.is_zero() {
            return Err(DiffAlgError::ZeroDivisor);
        }
        let pre = Prefactor {
            phi: self.pre.phi - den.pre.phi,
            cosx: self.pre.cosx - den.pre.cosx,
            t2: self.pre.t2 - den.pre.t2,
            omt4: self.pre.omt4 - den.pre.omt4,
        };
        if den.odd.is_zero() {
            let even = self.even.exact_div(&den.even)?;
            let odd = self.odd.exact_div(&den.even)?;
            return Ok(DiffAlgElement { pre, even, odd });
        }
        // Clear C from the denominator with the conjugate:
        // (n_e + n_o C)/(d_e + d_o C): q_o = (n_o d_e - n_e d_o)/(d_e² - d_o² W),
        // then q_e from the smaller division q_e = (n_e - q_o d_o W)/d_e.
        let w = c_squared();
        let dow = den.odd.mul(&w);
        let disc = den.even.mul(&den.even).sub(&den.odd.mul(&dow));
        let odd = self.odd.mul(&den.even).sub(&self.even.mul(&den.odd)).exact_div(&disc)?;
        let even = if den.even.is_zero() {
            // purely odd denominator: q_e = n_o/d_o, q_o W ... handled above;
            // here n_e must be divisible by d_o W
            self.even.exact_div(&dow)?
        } else {
            self.even.sub(&odd.mul(&dow)).exact_div(&den.even)?
        };
        Ok(DiffAlgElement { pre, even, odd })
    }

    /// Ring equality up to folding integer `t`/(1-t) prefactor powers.
    pub fn ring_eq(&self, other: &Self) -> bool {
        if self.pre.phi != other.pre.phi || self.pre.cosx != other.pre.cosx {
            return false;
        }
        let target = Prefactor {
            phi: self.pre.phi,
            cosx: self.pre.cosx,
            t2: self.pre.t2.min(other.pre.t2),
            omt4: self.pre.omt4.min(other.pre.omt4),
        };
        match (self.align_pre(target), other.align_pre(target)) {
            (Ok(a), Ok(b)) => a.even == b.even && a.odd == b.odd,
            _ => false,
        }
    }

    /// Evaluation homomorphism onto the bivariate series engine.
    pub fn to_series(&self, ctx: &EllipticContext) -> QBiSeries {
        let cache = SeriesCache::new(ctx, &self.max_degrees());
        self.to_series_cached(&cache)
    }

    fn max_degrees(&self) -> Mono {
        let a = self.even.max_degrees();
        let b = self.odd.max_degrees();
        Mono {
            s: a.s.max(b.s),
            x: a.x.max(b.x),
            k: a.k.max(b.k),
            e: a.e.max(b.e),
            v: a.v.max(b.v),
        }
    }

    fn to_series_cached(&self, cache: &SeriesCache) -> QBiSeries {
        let mut acc = self.even.to_series(cache);
        if !self.odd.is_zero() {
            acc = acc.add(&self.odd.to_series(cache).mul(&cache.c));
        }
        // prefactor
        let mut pre = QBiSeries::one(cache.nx, cache.ns);
        if self.pre.phi != 0 {
            pre = pre.mul(&cache.phi.pow_i(self.pre.phi as i64).expect("phi is a unit"));
        }
        if self.pre.cosx != 0 {
            pre = pre.mul(&cache.cosx.pow_i(self.pre.cosx as i64).expect("cos is a unit"));
        }
        if self.pre.t2 != 0 {
            pre = pre.mul_monomial(0, 2 * self.pre.t2 as i64);
        }
        if self.pre.omt4 != 0 {
            let p = cache
                .omt
                .pow_rational(&ratio(self.pre.omt4 as i64, 4))
                .expect("1-t is a unit");
            pre = pre.scale_s(&p);
        }
        acc.mul(&pre)
    }
}

/// Series values of the generators, with memoized powers.
struct SeriesCache {
    nx: i64,
    ns: i64,
    c: QBiSeries,
    phi: QBiSeries,
    cosx: QBiSeries,
    omt: QSeries,
    pows: [Vec<QBiSeries>; 5],
}

impl SeriesCache {
    fn new(ctx: &EllipticContext, degs: &Mono) -> Self {
        let nx = ctx.nx();
        let ns = ctx.ns();
        let (s, c, xg) = ctx.scx();
        let k = QBiSeries::from_s_series(ctx.ell_k());
        let e = QBiSeries::from_s_series(ctx.ell_e());
        let v = QBiSeries::monomial(1, 0, Rational::one(), nx, ns);
        let phi = ctx.phi();
        let cosx = QBiSeries::from_x_series(&crate::series::cos_series(nx));
        let omt = QSeries::from_terms([(0, Rational::one()), (4, -Rational::one())], EXACT).truncate_to(ns + 8);
        let build = |g: QBiSeries, d: u8| -> Vec<QBiSeries> {
            let mut v = vec![QBiSeries::one(nx, ns)];
            for i in 1..=d as usize {
                let p = v[i - 1].mul(&g).truncate_to(nx, ns);
                v.push(p);
            }
            v
        };
        SeriesCache {
            nx,
            ns,
            c,
            phi,
            cosx,
            omt,
            pows: [build(s, degs.s), build(xg, degs.x), build(k, degs.k), build(e, degs.e), build(v, degs.v)],
        }
    }

    fn pow(&self, g: Gen, d: u8) -> &QBiSeries {
        let idx = match g {
            Gen::S => 0,
            Gen::X => 1,
            Gen::K => 2,
            Gen::E => 3,
            Gen::V => 4,
        };
        &self.pows[idx][d as usize]
    }
}

impl std::fmt::Display for DiffAlgElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut front = Vec::new();
        match self.pre.phi {
            0 => {}
            1 => front.push("theta4(x|tau)/theta3(0|tau)".to_string()),
            p => front.push(format!("(theta4(x|tau)/theta3(0|tau))^{p}")),
        }
        if self.pre.cosx != 0 {
            front.push(format!("cos(x)^{}", self.pre.cosx));
        }
        if self.pre.t2 != 0 {
            if self.pre.t2 % 2 == 0 {
                front.push(format!("t^{}", self.pre.t2 / 2));
            } else {
                front.push(format!("t^({}/2)", self.pre.t2));
            }
        }
        if self.pre.omt4 != 0 {
            if self.pre.omt4 % 4 == 0 {
                front.push(format!("(1-t)^{}", self.pre.omt4 / 4));
            } else {
                front.push(format!("(1-t)^({}/4)", self.pre.omt4));
            }
        }
        let fmt_poly = |p: &MultiPoly, with_c: bool| -> String {
            let mut parts = Vec::new();
            for (m, c) in p.terms() {
                let mut factors = Vec::new();
                let cs = format!("{c}");
                if cs != "1" || (m == &Mono::ONE && !with_c) {
                    factors.push(cs);
                }
                if with_c {
                    factors.push("C".into());
                }
                for (sym, d) in [("S", m.s), ("X", m.x), ("K", m.k), ("E", m.e), ("x", m.v)] {
                    match d {
                        0 => {}
                        1 => factors.push(sym.into()),
                        _ => factors.push(format!("{sym}^{d}")),
                    }
                }
                if factors.is_empty() {
                    factors.push("1".into());
                }
                parts.push(factors.join("*"));
            }
            parts.join(" + ")
        };
        let mut body = Vec::new();
        if !self.even.is_zero() {
            body.push(fmt_poly(&self.even, false));
        }
        if !self.odd.is_zero() {
            body.push(fmt_poly(&self.odd, true));
        }
        if body.is_empty() {
            body.push("0".into());
        }
        if front.is_empty() {
            write!(f, "{}", body.join(" + "))
        } else {
            write!(f, "{} * ( {} )", front.join(" * "), body.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    fn ctx() -> EllipticContext {
        EllipticContext::new(8, 28)
    }

    #[test]
    fn c_squared_reduction() {
        let c = DiffAlgElement::generator("C");
        let c2 = c.mul(&c);
        assert!(c2.odd.is_zero());
        assert_eq!(c2.even, c_squared());
        // normalize is idempotent
        assert_eq!(c2.normalize(), c2.normalize().normalize());
    }

    #[test]
    fn ring_laws() {
        let s = DiffAlgElement::generator("S");
        let c = DiffAlgElement::generator("C");
        let x = DiffAlgElement::generator("X");
        let a = s.mul(&c).add(&x).unwrap();
        let b = c.mul(&c).sub(&s).unwrap();
        let cc = x.mul(&s).add(&DiffAlgElement::one()).unwrap();
        let lhs = a.add(&b).unwrap().mul(&cc);
        let rhs = a.mul(&cc).add(&b.mul(&cc)).unwrap();
        assert!(lhs.ring_eq(&rhs));
    }

    #[test]
    fn derivative_of_constants() {
        let one = DiffAlgElement::one();
        assert!(one.d_dt().is_zero());
        // d/dt K = E/(2t(1-t)) - K/(2t)
        let k = DiffAlgElement::generator("K");
        let dk = k.d_dt();
        let ctx = ctx();
        let lhs = dk.to_series(&ctx);
        let rhs = QBiSeries::from_s_series(&ctx.ell_k().derivative_t());
        assert!(lhs.eq_to_common_trunc(&rhs));
    }

    #[test]
    fn generator_series_values() {
        let ctx = ctx();
        let s = DiffAlgElement::generator("S").to_series(&ctx);
        assert!(s.is_odd_in_x());
        assert_eq!(s.coeff(0, 0), rat(0));
        // to_series(S) x-lead coefficient is K
        assert!(s.x_slice(1).eq_to_common_trunc(ctx.ell_k()));
        let k = DiffAlgElement::generator("K").to_series(&ctx);
        assert_eq!(k.coeff(0, 0), rat(1));
        assert_eq!(k.coeff(0, 4), ratio(1, 4));
        // Phi constant term 1
        let phi_elem = DiffAlgElement::new(
            Prefactor { phi: 1, cosx: 0, t2: 0, omt4: 0 },
            MultiPoly::one(),
            MultiPoly::zero(),
        );
        assert_eq!(phi_elem.to_series(&ctx).coeff(0, 0), rat(1));
    }

    #[test]
    fn derivative_cross_engine() {
        // d_dt commutes with to_series for each generator and a composite
        let ctx = ctx();
        for name in ["S", "C", "X", "K", "E"] {
            let g = DiffAlgElement::generator(name);
            let lhs = g.d_dt().to_series(&ctx);
            let rhs = g.to_series(&ctx).derivative_t();
            assert!(lhs.eq_to_common_trunc(&rhs), "d/dt {name} mismatch");
        }
        let s = DiffAlgElement::generator("S");
        let c = DiffAlgElement::generator("C");
        let x = DiffAlgElement::generator("X");
        let e = s.mul(&s).mul(&x).add(&c.mul(&x).mul(&x)).unwrap();
        let lhs = e.d_dt().to_series(&ctx);
        let rhs = e.to_series(&ctx).derivative_t();
        assert!(lhs.eq_to_common_trunc(&rhs));
    }

    #[test]
    fn derivative_with_prefactor() {
        // Phi-carrying element: d/dt folds the log-derivative into the poly part
        let ctx = ctx();
        let e = DiffAlgElement::new(
            Prefactor { phi: 1, cosx: -1, t2: -1, omt4: 0 },
            MultiPoly::monomial(Mono { x: 1, ..Mono::ONE }, QT::one()),
            MultiPoly::zero(),
        );
        let lhs = e.d_dt().to_series(&ctx);
        let rhs = e.to_series(&ctx).derivative_t();
        assert!(lhs.eq_to_common_trunc(&rhs));
    }

    #[test]
    fn leibniz() {
        let s = DiffAlgElement::generator("S");
        let c = DiffAlgElement::generator("C");
        let x = DiffAlgElement::generator("X");
        let a = s.mul(&x).add(&c).unwrap();
        let b = x.mul(&x).sub(&s).unwrap();
        let lhs = a.mul(&b).d_dt();
        let rhs = a.d_dt().mul(&b).add(&a.mul(&b.d_dt())).unwrap();
        assert!(lhs.ring_eq(&rhs));
    }

    #[test]
    fn exact_division() {
        let s = DiffAlgElement::generator("S");
        let c = DiffAlgElement::generator("C");
        let x = DiffAlgElement::generator("X");
        // (S C)/S = C
        let q = s.mul(&c).exact_divide(&s).unwrap();
        assert!(q.ring_eq(&c));
        // e/e = 1
        let e = s.mul(&x).add(&c.mul(&x)).unwrap();
        assert!(e.exact_divide(&e).unwrap().ring_eq(&DiffAlgElement::one()));
        // product/den round-trips with a C-bearing denominator
        let num = e.mul(&c.add(&s.mul(&x)).unwrap());
        let q2 = num.exact_divide(&c.add(&s.mul(&x)).unwrap()).unwrap();
        assert!(q2.ring_eq(&e));
        // genuine non-divisibility is reported
        assert!(s.mul(&s).exact_divide(&x).is_err());
    }

    #[test]
    fn homomorphism_property() {
        let ctx = ctx();
        let s = DiffAlgElement::generator("S");
        let x = DiffAlgElement::generator("X");
        let a = s.mul(&x).add(&DiffAlgElement::one()).unwrap();
        let b = x.mul(&x).sub(&s.mul(&s)).unwrap();
        let lhs = a.mul(&b).to_series(&ctx);
        let rhs = a.to_series(&ctx).mul(&b.to_series(&ctx));
        assert!(lhs.eq_to_common_trunc(&rhs));
    }

    use crate::coeff::ratio;
}
