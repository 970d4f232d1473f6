//! Complete elliptic integrals, theta functions, Jacobi functions and the
//! fundamental elliptic integral of the second kind, as exact series.
//!
//! Conventions: `k = s^2`, `t = k^2 = s^4`, `K = (2/π)𝐊(t)`, `E = (2/π)𝐄(t)`
//! (parameter convention, not modulus). Theta functions have quasi-periods
//! `π` and `πτ`; the nome `q = e^{iπτ}` is computed as a series by inverting
//! `k(q)^2 = t`, which keeps everything inside exact arithmetic. Jacobi
//! functions are theta quotients at `v = u/K`.

pub mod numeric;

use thiserror::Error;

use crate::coeff::{pochhammer, ratio, Coeff, Rational};
use crate::series::{GradedSeries, SeriesError};
use crate::{QBiSeries, QSeries};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("series error: {0}")]
    Series(#[from] SeriesError),
    #[error("numeric argument outside the domain: {0}")]
    Domain(String),
    #[error("numeric series did not converge: {0}")]
    Convergence(String),
    #[error("unknown quantity `{0}`")]
    UnknownName(String),
}

/// sn, cn, dn as bivariate series in `(u, s)` with `u` a formal argument.
#[derive(Debug, Clone)]
pub struct JacobiTriple {
    pub sn: QBiSeries,
    pub cn: QBiSeries,
    pub dn: QBiSeries,
}

/// Eagerly built cache of every series the elliptic layer provides.
#[derive(Debug, Clone)]
pub struct EllipticContext {
    nx: i64,
    ns: i64,
    k: QSeries,
    e: QSeries,
    nome: QSeries,
    nome_quarter: QSeries,
    theta2_0: QSeries,
    theta3_0: QSeries,
    theta4_0: QSeries,
    theta_x: [QBiSeries; 4],
    jacobi: JacobiTriple,
    eps: QBiSeries,
}

/// `K = sum ((1/2)_n / n!)^2 t^n` on the s-lattice.
pub fn hypergeometric_k(ns: i64) -> QSeries {
    let mut f = QSeries::zero(ns);
    let mut c = Rational::from_integer(1.into());
    let mut n: i64 = 0;
    while 4 * n < ns {
        f = f.add(&QSeries::monomial(4 * n, c.clone(), ns));
        // ratio ((1/2)+n)^2 / (n+1)^2
        let step = ratio(2 * n + 1, 2 * n + 2);
        c *= &step * &step;
        n += 1;
    }
    f
}

/// `E = sum ((-1/2)_n (1/2)_n / (n!)^2) t^n`.
pub fn hypergeometric_e(ns: i64) -> QSeries {
    let mut f = QSeries::zero(ns);
    let mut n: i64 = 0;
    while 4 * n < ns {
        let c = pochhammer(&ratio(-1, 2), n as u32) * pochhammer(&ratio(1, 2), n as u32)
            / (crate::coeff::factorial(n as u32) * crate::coeff::factorial(n as u32));
        f = f.add(&QSeries::monomial(4 * n, c, ns));
        n += 1;
    }
    f
}

/// Gauss hypergeometric 2F1(a, b; c; t) on the s-lattice (t = s^4).
pub fn hypergeometric_2f1(a: &Rational, b: &Rational, c: &Rational, ns: i64) -> QSeries {
    let mut f = QSeries::zero(ns);
    let mut term = Rational::from_integer(1.into());
    let mut n: i64 = 0;
    while 4 * n < ns {
        f = f.add(&QSeries::monomial(4 * n, term.clone(), ns));
        let nn = Rational::from_integer(n.into());
        term *= (a + &nn) * (b + &nn);
        term /= (c + &nn) * Rational::from_integer((n + 1).into());
        n += 1;
    }
    f
}

/// `(1-t)^p` as an exact series.
pub fn one_minus_t_pow(p: &Rational, ns: i64) -> QSeries {
    QSeries::from_terms([(0, Rational::from_integer(1.into())), (4, ratio(-1, 1))], ns)
        .pow_rational(p)
        .expect("unit leading")
}

fn cos_mx<T: Coeff>(m: i64, nx: i64) -> GradedSeries<T> {
    // cos(m x) as an exact x-polynomial (truncated at nx)
    let mut f = GradedSeries::zero(nx);
    let mut c = Rational::from_integer(1.into());
    let mut j: i64 = 0;
    while 2 * j < nx {
        if j > 0 {
            c *= Rational::new((m * m).into(), ((2 * j - 1) * 2 * j).into());
        }
        let signed = if j % 2 == 1 { -c.clone() } else { c.clone() };
        f = f.add(&GradedSeries::monomial(2 * j, T::from_rational(&signed), nx));
        j += 1;
    }
    f
}

fn sin_mx<T: Coeff>(m: i64, nx: i64) -> GradedSeries<T> {
    let mut f = GradedSeries::zero(nx);
    let mut c = Rational::from_integer(m.into());
    let mut j: i64 = 0;
    while 2 * j + 1 < nx {
        if j > 0 {
            c *= Rational::new((m * m).into(), (2 * j * (2 * j + 1)).into());
        }
        let signed = if j % 2 == 1 { -c.clone() } else { c.clone() };
        f = f.add(&GradedSeries::monomial(2 * j + 1, T::from_rational(&signed), nx));
        j += 1;
    }
    f
}

impl EllipticContext {
    /// Build every cached series at truncation orders `(nx, ns)`.
    pub fn new(nx: i64, ns: i64) -> Self {
        assert!(nx >= 1 && ns >= 4, "need nx >= 1 and ns >= 4");
        let k = hypergeometric_k(ns);
        let e = hypergeometric_e(ns);

        // Nome by series inversion of k(q)^2 = t. Work in powers of q, then
        // map q-powers onto the s-lattice (one q-power = 4 s-units).
        let nq = ns / 4 + 2;
        let theta3_q = {
            let mut f = QSeries::one(nq);
            let mut n: i64 = 1;
            while n * n < nq {
                f = f.add(&QSeries::monomial(n * n, ratio(2, 1), nq));
                n += 1;
            }
            f
        };
        let theta4_q = {
            let mut f = QSeries::one(nq);
            let mut n: i64 = 1;
            while n * n < nq {
                let c = if n % 2 == 1 { ratio(-2, 1) } else { ratio(2, 1) };
                f = f.add(&QSeries::monomial(n * n, c, nq));
                n += 1;
            }
            f
        };
        // theta2 = 2 q^{1/4} A(q), A = sum q^{n(n+1)}
        let a_q = {
            let mut f = QSeries::zero(nq);
            let mut n: i64 = 0;
            while n * (n + 1) < nq {
                f = f.add(&QSeries::monomial(n * (n + 1), ratio(1, 1), nq));
                n += 1;
            }
            f
        };
        // t(q) = k(q)^2 = theta2(0|q)^4 / theta3(0|q)^4 = 16 q A^4 / theta3^4
        let t_of_q = a_q
            .pow_i(4)
            .expect("power")
            .div(&theta3_q.pow_i(4).expect("power"))
            .expect("unit leading divisor")
            .shift(1)
            .scale_rational(&ratio(16, 1));
        let q_of_t_in_t = t_of_q.reverse().expect("t(q) has a unit-degree lead");
        // Map exponents onto the s-lattice.
        let nome = QSeries::from_terms(q_of_t_in_t.terms().map(|(e, c)| (4 * e, c.clone())), 4 * q_of_t_in_t.trunc());
        let nome = nome.truncate_to(ns);

        // q^{1/4} = (s/2) * (16 q / t)^{1/4}
        let nome_quarter = nome
            .shift(-4)
            .scale_rational(&ratio(16, 1))
            .pow_rational(&ratio(1, 4))
            .expect("unit leading")
            .shift(1)
            .scale_rational(&ratio(1, 2));

        // Compose a series in powers of q with q(t); exponents of `outer`
        // count q-powers directly.
        let compose_q = |outer: &QSeries| -> QSeries {
            outer.compose(&nome).expect("nome has positive lead").truncate_to(ns)
        };
        let theta3_0 = compose_q(&theta3_q);
        let theta4_0 = compose_q(&theta4_q);
        let theta2_0 = compose_q(&a_q).mul(&nome_quarter).scale_rational(&ratio(2, 1));

        // Bivariate theta functions theta_i(x|tau).
        let nome_pows = |max_n: i64| -> Vec<QSeries> {
            // nome^{n} for n = 0..max, truncated
            let mut v = vec![QSeries::one(ns)];
            for n in 1..=max_n {
                v.push(v[(n - 1) as usize].mul(&nome).truncate_to(ns));
            }
            v
        };
        let max_sq = {
            let mut n = 0i64;
            while 4 * (n + 1) * (n + 1) < ns + 4 {
                n += 1;
            }
            n
        };
        let pows = nome_pows((max_sq + 1) * (max_sq + 2));
        let mut theta1 = QBiSeries::zero(nx, ns);
        let mut theta2 = QBiSeries::zero(nx, ns);
        let mut theta3 = QBiSeries::one(nx, ns);
        let mut theta4 = QBiSeries::one(nx, ns);
        let mut n: i64 = 1;
        while n * n <= (max_sq + 1) * (max_sq + 1) {
            let qn2 = &pows[(n * n) as usize];
            let c2n = QBiSeries::from_x_series(&cos_mx::<Rational>(2 * n, nx)).scale_s(qn2);
            theta3 = theta3.add(&c2n.scale_rational(&ratio(2, 1)));
            let sign = if n % 2 == 1 { ratio(-2, 1) } else { ratio(2, 1) };
            theta4 = theta4.add(&c2n.scale_rational(&sign));
            n += 1;
        }
        let mut m: i64 = 0;
        while m * (m + 1) <= max_sq * (max_sq + 1) {
            let qnn = &pows[(m * (m + 1)) as usize];
            let sgn = if m % 2 == 1 { ratio(-2, 1) } else { ratio(2, 1) };
            theta1 = theta1.add(
                &QBiSeries::from_x_series(&sin_mx::<Rational>(2 * m + 1, nx))
                    .scale_s(&qnn.mul(&nome_quarter))
                    .scale_rational(&sgn),
            );
            theta2 = theta2.add(
                &QBiSeries::from_x_series(&cos_mx::<Rational>(2 * m + 1, nx))
                    .scale_s(&qnn.mul(&nome_quarter))
                    .scale_rational(&ratio(2, 1)),
            );
            m += 1;
        }
        let theta1 = theta1.truncate_to(nx, ns);
        let theta2 = theta2.truncate_to(nx, ns);

        // Jacobi functions at u = K v: substitute x <- u / K in the theta
        // quotients, then apply the modulus prefactors (k^{1/2} = s).
        let inv_k = k.inv().expect("K is a unit");
        let sqrt_kp = one_minus_t_pow(&ratio(1, 4), ns);
        let t1u = theta1.scale_x_by(&inv_k);
        let t2u = theta2.scale_x_by(&inv_k);
        let t3u = theta3.scale_x_by(&inv_k);
        let t4u = theta4.scale_x_by(&inv_k);
        let sn = t1u.div(&t4u).expect("theta4 is a unit").mul_monomial(0, -1);
        let cn = t2u.div(&t4u).expect("theta4 is a unit").scale_s(&sqrt_kp).mul_monomial(0, -1);
        let dn = t3u.div(&t4u).expect("theta4 is a unit").scale_s(&sqrt_kp);
        let jacobi = JacobiTriple { sn: sn.clone(), cn, dn: dn.clone() };

        let eps = dn.mul(&dn).integrate_x().truncate_to(nx, ns);

        EllipticContext {
            nx,
            ns,
            k,
            e,
            nome,
            nome_quarter,
            theta2_0,
            theta3_0,
            theta4_0,
            theta_x: [theta1, theta2, theta3, theta4],
            jacobi,
            eps,
        }
    }

    pub fn nx(&self) -> i64 {
        self.nx
    }

    pub fn ns(&self) -> i64 {
        self.ns
    }

    /// Renormalized complete elliptic integral of the first kind, `K = (2/π)𝐊(t)`.
    pub fn ell_k(&self) -> &QSeries {
        &self.k
    }

    /// Renormalized complete elliptic integral of the second kind, `E = (2/π)𝐄(t)`.
    pub fn ell_e(&self) -> &QSeries {
        &self.e
    }

    /// The nome `q(t)`, with `k(q)^2 = t` exactly to truncation.
    pub fn nome(&self) -> &QSeries {
        &self.nome
    }

    /// `q^{1/4}` on the s-lattice (leading term `s/2`).
    pub fn nome_quarter(&self) -> &QSeries {
        &self.nome_quarter
    }

    /// Theta constant `theta_i(0|tau)`, `i` in {2, 3, 4}.
    pub fn theta_const(&self, i: usize) -> &QSeries {
        match i {
            2 => &self.theta2_0,
            3 => &self.theta3_0,
            4 => &self.theta4_0,
            _ => panic!("theta constant index must be 2, 3 or 4"),
        }
    }

    /// Bivariate `theta_i(x|tau)`, `i` in {1, 2, 3, 4}.
    pub fn theta_fn(&self, i: usize) -> &QBiSeries {
        assert!((1..=4).contains(&i), "theta index must be 1..4");
        &self.theta_x[i - 1]
    }

    pub fn jacobi(&self) -> &JacobiTriple {
        &self.jacobi
    }

    /// `𝓔(u,t) = ∫_0^u dn²(x,t) dx`, odd in `u`.
    pub fn eps_integral(&self) -> &QBiSeries {
        &self.eps
    }

    /// `X(x,t) = 𝓔(xK, t) - xE`.
    pub fn big_x(&self) -> QBiSeries {
        let ek = self.eps.scale_x_by(&self.k);
        ek.sub(&QBiSeries::monomial(1, 0, Rational::from_integer(1.into()), self.nx, self.ns).scale_s(&self.e))
    }

    /// `Φ = θ₄(x|τ)/θ₃(0|τ)`, the prefactor of every closed form.
    pub fn phi(&self) -> QBiSeries {
        self.theta_x[3]
            .div(&QBiSeries::from_s_series(&self.theta3_0))
            .expect("theta3(0) is a unit")
            .truncate_to(self.nx, self.ns)
    }

    /// `sn, cn·dn, X` composed at `z = xK`: the generators of the printed
    /// closed forms.
    pub fn scx(&self) -> (QBiSeries, QBiSeries, QBiSeries) {
        let s = self.jacobi.sn.scale_x_by(&self.k);
        let c = self.jacobi.cn.mul(&self.jacobi.dn).scale_x_by(&self.k);
        (s, c, self.big_x())
    }

    /// `(1-t)^{1/4}`.
    pub fn kp_quarter(&self) -> QSeries {
        one_minus_t_pow(&ratio(1, 4), self.ns)
    }
}

/// Numeric evaluation of a named quantity at `s = s_value` (and argument
/// `x_value` where one is required). Names: `K`, `E`, `q`, `k`, `kprime`,
/// `theta1..theta4`, `sn`, `cn`, `dn`, `eps`.
pub fn numeric_eval(name: &str, s_value: f64, x_value: Option<f64>) -> Result<f64, EllipticError> {
    let ctx = numeric::NumericEllipticContext::<f64>::new(s_value)?;
    let need_x = || x_value.ok_or_else(|| EllipticError::Domain(format!("`{name}` needs an argument")));
    Ok(match name {
        "K" => ctx.cap_k(),
        "E" => ctx.cap_e(),
        "q" => ctx.q(),
        "k" => ctx.k(),
        "kprime" => ctx.k_prime(),
        "theta1" => ctx.theta(1, need_x()?)?,
        "theta2" => ctx.theta(2, need_x()?)?,
        "theta3" => ctx.theta(3, need_x()?)?,
        "theta4" => ctx.theta(4, need_x()?)?,
        "sn" => ctx.sn(need_x()?)?,
        "cn" => ctx.cn(need_x()?)?,
        "dn" => ctx.dn(need_x()?)?,
        "eps" => ctx.eps(need_x()?)?,
        _ => return Err(EllipticError::UnknownName(name.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat;

    fn ctx() -> EllipticContext {
        EllipticContext::new(8, 24)
    }

    #[test]
    fn k_and_e_series() {
        let c = ctx();
        let k = c.ell_k();
        assert_eq!(k.coeff(0), rat(1));
        assert_eq!(k.coeff(4), ratio(1, 4));
        assert_eq!(k.coeff(8), ratio(9, 64));
        assert_eq!(k.coeff(12), ratio(25, 256));
        let e = c.ell_e();
        assert_eq!(e.coeff(0), rat(1));
        assert_eq!(e.coeff(4), ratio(-1, 4));
        assert_eq!(e.coeff(8), ratio(-3, 64));
        assert_eq!(e.coeff(12), ratio(-5, 256));
    }

    #[test]
    fn nome_series() {
        let c = ctx();
        let q = c.nome();
        assert_eq!(q.coeff(0), rat(0));
        assert_eq!(q.coeff(4), ratio(1, 16));
        assert_eq!(q.coeff(8), ratio(1, 32));
        assert_eq!(q.coeff(12), ratio(21, 1024));
        // defining property: (theta2/theta3)^2 = k = s^2, so (..)^4 = t
        let k_of_q = c
            .theta_const(2)
            .div(c.theta_const(3))
            .unwrap()
            .pow_i(2)
            .unwrap();
        assert!(k_of_q.eq_to_common_trunc(&QSeries::monomial(2, rat(1), 24)));
    }

    #[test]
    fn theta_ratios() {
        let c = ctx();
        // theta4(0)/theta3(0) = (1-t)^{1/4}
        let r = c.theta_const(4).div(c.theta_const(3)).unwrap();
        assert!(r.eq_to_common_trunc(&one_minus_t_pow(&ratio(1, 4), 24)));
        assert_eq!(c.theta_const(3).coeff(0), rat(1));
    }

    #[test]
    fn theta_fn_basics() {
        let c = ctx();
        // theta1 odd in x, vanishes at x = 0
        assert!(c.theta_fn(1).is_odd_in_x());
        // theta4 at q=0 (s-constant term) is 1 for all x
        let t4 = c.theta_fn(4);
        assert_eq!(t4.coeff(0, 0), rat(1));
        for xe in 1..6 {
            assert_eq!(t4.x_slice(xe).coeff(0), rat(0));
        }
    }

    #[test]
    fn jacobi_series() {
        let c = ctx();
        let j = c.jacobi();
        // sn(u,t) = u - (1+t)u^3/6 + O(u^5)
        assert_eq!(j.sn.coeff(1, 0), rat(1));
        assert_eq!(j.sn.coeff(3, 0), ratio(-1, 6));
        assert_eq!(j.sn.coeff(3, 4), ratio(-1, 6));
        assert_eq!(j.sn.coeff(5, 0), ratio(1, 120));
        assert_eq!(j.sn.coeff(5, 4), ratio(14, 120));
        // cn(0,t) = dn(0,t) = 1
        assert_eq!(j.cn.coeff(0, 0), rat(1));
        assert!(j.cn.x_slice(0).eq_to_common_trunc(&QSeries::one(24)));
        assert!(j.dn.x_slice(0).eq_to_common_trunc(&QSeries::one(24)));
        // dn(u,0) = 1: the s-constant part of dn is 1
        for xe in 1..8 {
            assert_eq!(j.dn.x_slice(xe).coeff(0), rat(0));
        }
        // parity
        assert!(j.sn.is_odd_in_x());
        assert!(j.cn.is_even_in_x());
        assert!(j.dn.is_even_in_x());
    }

    #[test]
    fn jacobi_identities() {
        let c = ctx();
        let j = c.jacobi();
        let one = QBiSeries::one(8, 24);
        let sn2 = j.sn.mul(&j.sn);
        let cn2 = j.cn.mul(&j.cn);
        let dn2 = j.dn.mul(&j.dn);
        assert!(sn2.add(&cn2).eq_to_common_trunc(&one));
        let t = QSeries::monomial(4, rat(1), crate::series::EXACT);
        assert!(dn2.add(&sn2.scale_s(&t)).eq_to_common_trunc(&one));
    }

    #[test]
    fn eps_series() {
        let c = ctx();
        let eps = c.eps_integral();
        // E(u,t) = u - t u^3/3 + O(u^5)
        assert_eq!(eps.coeff(1, 0), rat(1));
        assert_eq!(eps.coeff(3, 0), rat(0));
        assert_eq!(eps.coeff(3, 4), ratio(-1, 3));
        assert!(eps.is_odd_in_x());
        // E(u, 0) = u
        for xe in [3, 5, 7] {
            assert_eq!(eps.x_slice(xe).coeff(0), rat(0));
        }
    }

    #[test]
    fn big_x_series() {
        let c = ctx();
        let x = c.big_x();
        // X at x = 0 is 0; odd in x
        assert!(x.is_odd_in_x());
        // leading x-coefficient is K - E = t/2 + 3t^2/16 + ...
        let lead = x.x_slice(1);
        assert_eq!(lead.coeff(0), rat(0));
        assert_eq!(lead.coeff(4), ratio(1, 2));
        assert_eq!(lead.coeff(8), ratio(3, 16));
        // X at t = 0 vanishes for all x
        for xe in [1, 3, 5] {
            assert_eq!(x.x_slice(xe).coeff(0), rat(0));
        }
    }

    #[test]
    fn dk_dt_formula() {
        // d/dt K = (E - (1-t)K) / (2t(1-t))
        let c = ctx();
        let num = c.ell_e().sub(&one_minus_t_pow(&rat(1), 24).mul(c.ell_k()));
        let den = QSeries::from_terms([(4, rat(2)), (8, rat(-2))], crate::series::EXACT);
        let rhs = num.div(&den).unwrap();
        assert!(c.ell_k().derivative_t().eq_to_common_trunc(&rhs));
        // d/dt E = (E - K)/(2t)
        let rhs_e = c.ell_e().sub(c.ell_k()).div(&QSeries::monomial(4, rat(2), crate::series::EXACT)).unwrap();
        assert!(c.ell_e().derivative_t().eq_to_common_trunc(&rhs_e));
    }
}
