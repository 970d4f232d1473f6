//! Floating-point track: AGM elliptic integrals, q-series theta functions,
//! Jacobi functions and the elliptic integral of the second kind.
//!
//! Used for spot checks of the exact series at concrete `s` and for the
//! λ = 1 specializations, which sit outside the formal composition range.

use num_traits::float::FloatConst;
use num_traits::Float;

use super::EllipticError;

/// Numeric elliptic data at a fixed `s` in (0,1); `t = s^4`.
#[derive(Debug, Clone, Copy)]
pub struct NumericEllipticContext<F: Float> {
    s: F,
    t: F,
    big_k: F,
    big_kp: F,
    big_e: F,
    q: F,
}

fn f<F: Float>(x: f64) -> F {
    F::from(x).expect("literal conversion")
}

/// Complete elliptic integrals `(𝐊(m), 𝐄(m))` by the arithmetic-geometric mean.
pub fn agm_ke<F: Float + FloatConst>(m: F) -> (F, F) {
    let one = F::one();
    let two = f::<F>(2.0);
    let mut a = one;
    let mut b = (one - m).sqrt();
    let mut c = m.sqrt();
    let mut csum = c * c / two; // sum 2^{n-1} c_n^2 starting at n = 0
    let mut pow2 = one;
    for _ in 0..64 {
        if c.abs() <= F::epsilon() * two {
            break;
        }
        let an = (a + b) / two;
        let bn = (a * b).sqrt();
        c = (a - b) / two;
        a = an;
        b = bn;
        pow2 = pow2 * two;
        csum = csum + pow2 * c * c / two;
    }
    let big_k = F::PI() / (two * a);
    let big_e = big_k * (one - csum);
    (big_k, big_e)
}

impl<F: Float + FloatConst> NumericEllipticContext<F> {
    pub fn new(s: F) -> Result<Self, EllipticError> {
        if !(s > F::zero() && s < F::one()) {
            return Err(EllipticError::Domain(format!(
                "s must lie in (0,1), got {}",
                s.to_f64().unwrap_or(f64::NAN)
            )));
        }
        let t = s * s * s * s;
        let (big_k, big_e) = agm_ke(t);
        let (big_kp, _) = agm_ke(F::one() - t);
        let q = (-F::PI() * big_kp / big_k).exp();
        Ok(NumericEllipticContext { s, t, big_k, big_kp, big_e, q })
    }

    pub fn s(&self) -> F {
        self.s
    }

    pub fn t(&self) -> F {
        self.t
    }

    /// Elliptic modulus `k = s^2`.
    pub fn k(&self) -> F {
        self.s * self.s
    }

    /// Complementary modulus `k' = sqrt(1-t)`.
    pub fn k_prime(&self) -> F {
        (F::one() - self.t).sqrt()
    }

    /// `𝐊(t)`.
    pub fn big_k(&self) -> F {
        self.big_k
    }

    /// `𝐊(1-t)`.
    pub fn big_k_prime(&self) -> F {
        self.big_kp
    }

    /// `𝐄(t)`.
    pub fn big_e(&self) -> F {
        self.big_e
    }

    /// Renormalized `K = (2/π)𝐊`.
    pub fn cap_k(&self) -> F {
        f::<F>(2.0) * self.big_k / F::PI()
    }

    /// Renormalized `E = (2/π)𝐄`.
    pub fn cap_e(&self) -> F {
        f::<F>(2.0) * self.big_e / F::PI()
    }

    pub fn q(&self) -> F {
        self.q
    }

    /// `theta_i(x|q)` by direct q-series summation.
    pub fn theta(&self, i: usize, x: F) -> Result<F, EllipticError> {
        let q = self.q;
        let two = f::<F>(2.0);
        let tol = F::epsilon();
        match i {
            1 | 2 => {
                let mut acc = F::zero();
                let mut n: i32 = 0;
                loop {
                    let expo = (f::<F>(n as f64) + f::<F>(0.5)).powi(2);
                    let qp = q.powf(expo);
                    let m = f::<F>((2 * n + 1) as f64);
                    let term = match i {
                        1 => {
                            let sgn = if n % 2 == 1 { -F::one() } else { F::one() };
                            sgn * qp * (m * x).sin()
                        }
                        _ => qp * (m * x).cos(),
                    };
                    acc = acc + two * term;
                    if qp < tol && n > 2 {
                        return Ok(acc);
                    }
                    n += 1;
                    if n > 200 {
                        return Err(EllipticError::Convergence(format!("theta{i} q-series at q = {}", q.to_f64().unwrap_or(f64::NAN))));
                    }
                }
            }
            3 | 4 => {
                let mut acc = F::one();
                let mut n: i32 = 1;
                loop {
                    let qp = q.powi(n * n);
                    let sgn = if i == 4 && n % 2 == 1 { -F::one() } else { F::one() };
                    acc = acc + two * sgn * qp * (f::<F>((2 * n) as f64) * x).cos();
                    if qp < tol && n > 2 {
                        return Ok(acc);
                    }
                    n += 1;
                    if n > 200 {
                        return Err(EllipticError::Convergence(format!("theta{i} q-series at q = {}", q.to_f64().unwrap_or(f64::NAN))));
                    }
                }
            }
            _ => Err(EllipticError::Domain("theta index must be 1..4".into())),
        }
    }

    /// `d/dx log theta4(x|q)`.
    pub fn theta4_log_dx(&self, x: F) -> Result<F, EllipticError> {
        let q = self.q;
        let tol = F::epsilon();
        let mut num = F::zero();
        let mut n: i32 = 1;
        loop {
            let qp = q.powi(n * n);
            let sgn = if n % 2 == 1 { -F::one() } else { F::one() };
            num = num - f::<F>(4.0) * sgn * qp * f::<F>(n as f64) * (f::<F>((2 * n) as f64) * x).sin();
            if qp < tol && n > 2 {
                break;
            }
            n += 1;
            if n > 200 {
                return Err(EllipticError::Convergence("theta4' q-series".into()));
            }
        }
        Ok(num / self.theta(4, x)?)
    }

    /// Jacobi `sn(u,t)` via theta quotients at `v = u/K`.
    pub fn sn(&self, u: F) -> Result<F, EllipticError> {
        let v = u / self.cap_k();
        Ok(self.theta(1, v)? / (self.k().sqrt() * self.theta(4, v)?))
    }

    pub fn cn(&self, u: F) -> Result<F, EllipticError> {
        let v = u / self.cap_k();
        Ok((self.k_prime() / self.k()).sqrt() * self.theta(2, v)? / self.theta(4, v)?)
    }

    pub fn dn(&self, u: F) -> Result<F, EllipticError> {
        let v = u / self.cap_k();
        Ok(self.k_prime().sqrt() * self.theta(3, v)? / self.theta(4, v)?)
    }

    /// `𝓔(u,t) = ∫_0^u dn²` via the theta log-derivative (Jacobi zeta).
    pub fn eps(&self, u: F) -> Result<F, EllipticError> {
        let v = u / self.cap_k();
        Ok(u * self.big_e / self.big_k + self.theta4_log_dx(v)? / self.cap_k())
    }

    /// Independent route: adaptive Simpson quadrature of `dn²`.
    pub fn eps_quadrature(&self, u: F, tol: F) -> Result<F, EllipticError> {
        let g = |x: F| -> Result<F, EllipticError> {
            let d = self.dn(x)?;
            Ok(d * d)
        };
        adaptive_simpson(&g, F::zero(), u, tol, 24)
    }

    /// `X(x,t) = 𝓔(xK,t) - xE`.
    pub fn big_x_at(&self, x: F) -> Result<F, EllipticError> {
        Ok(self.eps(x * self.cap_k())? - x * self.cap_e())
    }

    /// `Φ = θ₄(x|τ)/θ₃(0|τ)`.
    pub fn phi_at(&self, x: F) -> Result<F, EllipticError> {
        Ok(self.theta(4, x)? / self.theta(3, F::zero())?)
    }
}

fn adaptive_simpson<F: Float, G: Fn(F) -> Result<F, EllipticError>>(
    g: &G,
    a: F,
    b: F,
    tol: F,
    depth: u32,
) -> Result<F, EllipticError> {
    let two = f::<F>(2.0);
    let six = f::<F>(6.0);
    let m = (a + b) / two;
    let fa = g(a)?;
    let fb = g(b)?;
    let fm = g(m)?;
    let whole = (b - a) / six * (fa + f::<F>(4.0) * fm + fb);
    fn helper<F: Float, G: Fn(F) -> Result<F, EllipticError>>(
        g: &G,
        a: F,
        m: F,
        b: F,
        fa: F,
        fm: F,
        fb: F,
        whole: F,
        tol: F,
        depth: u32,
    ) -> Result<F, EllipticError> {
        let two = f::<F>(2.0);
        let six = f::<F>(6.0);
        let lm = (a + m) / two;
        let rm = (m + b) / two;
        let flm = g(lm)?;
        let frm = g(rm)?;
        let left = (m - a) / six * (fa + f::<F>(4.0) * flm + fm);
        let right = (b - m) / six * (fm + f::<F>(4.0) * frm + fb);
        let delta = left + right - whole;
        if depth == 0 {
            return Err(EllipticError::Convergence("adaptive quadrature depth exhausted".into()));
        }
        if delta.abs() <= f::<F>(15.0) * tol {
            return Ok(left + right + delta / f::<F>(15.0));
        }
        let l = helper(g, a, lm, m, fa, flm, fm, left, tol / two, depth - 1)?;
        let r = helper(g, m, rm, b, fm, frm, fb, right, tol / two, depth - 1)?;
        Ok(l + r)
    }
    helper(g, a, m, b, fa, fm, fb, whole, tol, depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agm_known_values() {
        // K(0) = E(0) = pi/2
        let (k, e) = agm_ke(1e-14_f64);
        assert!((k - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        assert!((e - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        // K(1/2) = 1.85407467730137191843, E(1/2) = 1.35064388104767550205
        let (k, e) = agm_ke(0.5_f64);
        assert!((k - 1.8540746773013719184).abs() < 1e-14);
        assert!((e - 1.3506438810476755021).abs() < 1e-14);
    }

    #[test]
    fn modulus_identity() {
        // k^2 + k'^2 = 1 via theta constants, at s = 0.95
        let ctx = NumericEllipticContext::<f64>::new(0.95).unwrap();
        let t2 = ctx.theta(2, 0.0).unwrap();
        let t3 = ctx.theta(3, 0.0).unwrap();
        let t4 = ctx.theta(4, 0.0).unwrap();
        let k = (t2 / t3).powi(2);
        let kp = (t4 / t3).powi(2);
        assert!((k * k + kp * kp - 1.0).abs() < 1e-12);
        assert!((k - ctx.k()).abs() < 1e-12);
    }

    #[test]
    fn eps_at_quarter_period_is_e() {
        // E(K(t), t) = E(t), checked through the independent quadrature route
        let ctx = NumericEllipticContext::<f64>::new(0.5).unwrap();
        let via_zeta = ctx.eps(ctx.big_k()).unwrap();
        let via_quad = ctx.eps_quadrature(ctx.big_k(), 1e-13).unwrap();
        assert!((via_zeta - ctx.big_e()).abs() < 1e-12);
        assert!((via_quad - ctx.big_e()).abs() < 1e-12);
    }

    #[test]
    fn domain_error() {
        assert!(NumericEllipticContext::<f64>::new(1.5).is_err());
        assert!(NumericEllipticContext::<f64>::new(0.0).is_err());
    }

    #[test]
    fn jacobi_pythagorean() {
        let ctx = NumericEllipticContext::<f64>::new(0.7).unwrap();
        let u = 0.37;
        let sn = ctx.sn(u).unwrap();
        let cn = ctx.cn(u).unwrap();
        let dn = ctx.dn(u).unwrap();
        assert!((sn * sn + cn * cn - 1.0).abs() < 1e-13);
        assert!((dn * dn + ctx.t() * sn * sn - 1.0).abs() < 1e-13);
        // sn(0) = 0, cn(0) = dn(0) = 1
        assert!(ctx.sn(0.0).unwrap().abs() < 1e-15);
        assert!((ctx.cn(0.0).unwrap() - 1.0).abs() < 1e-13);
    }
}
