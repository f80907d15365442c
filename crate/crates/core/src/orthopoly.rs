//! Independent oracle for classical discrete orthogonal polynomials, built
//! from three-term recurrences only. Nothing here touches the graph
//! machinery; the dynamics tests compare against these values to validate
//! eigenfunctions without sharing code paths.

use crate::error::{KerovError, Result};
use crate::scalar::{factorial, falling, pochhammer, Scalar};

#[derive(Clone, Debug)]
pub enum PolySpec {
    /// Orthogonal under the negative binomial law `pi_{t,xi}` on `Z_{>=0}`.
    Meixner { t: Scalar, xi: Scalar },
    /// Orthogonal under Poisson(`gamma`).
    Charlier { gamma: Scalar },
    /// Orthogonal under Binomial(`n`, `p`) on `{0, ..., n}`.
    Krawtchouk { n: u32, p: Scalar },
}

impl PolySpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(KerovError::OutOfRange(m));
        match self {
            PolySpec::Meixner { t, xi } => {
                if t.to_f64() <= 0.0 {
                    return bad(format!("meixner needs t > 0, got {t}"));
                }
                let x = xi.to_f64();
                if x <= 0.0 || x >= 1.0 {
                    return bad(format!("meixner needs xi in (0,1), got {xi}"));
                }
                Ok(())
            }
            PolySpec::Charlier { gamma } => {
                if gamma.to_f64() <= 0.0 {
                    return bad(format!("charlier needs gamma > 0, got {gamma}"));
                }
                Ok(())
            }
            PolySpec::Krawtchouk { p, .. } => {
                let pv = p.to_f64();
                if pv <= 0.0 || pv >= 1.0 {
                    return bad(format!("krawtchouk needs p in (0,1), got {p}"));
                }
                Ok(())
            }
        }
    }

    /// Recurrence coefficients for the monic family:
    /// `m_{k+1}(x) = (x - b_k) m_k(x) - c_k m_{k-1}(x)`.
    fn recurrence(&self, k: u32) -> (Scalar, Scalar) {
        let ki = Scalar::from_int(k as i64);
        match self {
            PolySpec::Meixner { t, xi } => {
                let om = Scalar::one() - xi.clone();
                let b = (ki.clone() + (ki.clone() + t.clone()) * xi.clone()) / om.clone();
                let c = ki.clone() * (ki - Scalar::one() + t.clone()) * xi.clone() / (om.clone() * om);
                (b, c)
            }
            PolySpec::Charlier { gamma } => (ki.clone() + gamma.clone(), ki * gamma.clone()),
            PolySpec::Krawtchouk { n, p } => {
                let nn = Scalar::from_int(*n as i64);
                let q = Scalar::one() - p.clone();
                let b = p.clone() * (nn.clone() - ki.clone()) + ki.clone() * q.clone();
                let c = ki.clone() * p.clone() * q * (nn - ki + Scalar::one());
                (b, c)
            }
        }
    }

    /// Monic polynomial of degree `n` evaluated at `x`.
    pub fn eval_monic(&self, n: u32, x: &Scalar) -> Result<Scalar> {
        self.validate()?;
        if let PolySpec::Krawtchouk { n: cap, .. } = self {
            if n > *cap {
                return Err(KerovError::OutOfRange(format!("krawtchouk degree {n} exceeds {cap}")));
            }
        }
        let mut prev = Scalar::zero();
        let mut cur = Scalar::one();
        for k in 0..n {
            let (b, c) = self.recurrence(k);
            let next = (x.clone() - b) * cur.clone() - c * prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// Squared norm of the degree-`n` monic polynomial under the matching
    /// discrete weight.
    pub fn norm_squared(&self, n: u32) -> Result<Scalar> {
        self.validate()?;
        match self {
            PolySpec::Meixner { t, xi } => {
                let om = Scalar::one() - xi.clone();
                Ok(factorial(n) * pochhammer(t, n) * xi.pow_i(n as i32) / (om.clone() * om).pow_i(n as i32))
            }
            PolySpec::Charlier { gamma } => Ok(factorial(n) * gamma.pow_i(n as i32)),
            PolySpec::Krawtchouk { n: cap, p } => {
                if n > *cap {
                    return Err(KerovError::OutOfRange(format!("krawtchouk degree {n} exceeds {cap}")));
                }
                let q = Scalar::one() - p.clone();
                Ok(factorial(n) * falling(&Scalar::from_int(*cap as i64), n) * (p.clone() * q).pow_i(n as i32))
            }
        }
    }

    /// Point mass of the orthogonality weight at `x` (float).
    pub fn weight(&self, x: u32) -> f64 {
        match self {
            PolySpec::Meixner { t, xi } => {
                let (t, xi) = (t.to_f64(), xi.to_f64());
                let mut logw = t * (1.0 - xi).ln() + (x as f64) * xi.ln();
                for i in 0..x {
                    logw += ((t + i as f64) / (i as f64 + 1.0)).ln();
                }
                logw.exp()
            }
            PolySpec::Charlier { gamma } => {
                let g = gamma.to_f64();
                let mut logw = -g + (x as f64) * g.ln();
                for i in 1..=x {
                    logw -= (i as f64).ln();
                }
                logw.exp()
            }
            PolySpec::Krawtchouk { n, p } => {
                if x > *n {
                    return 0.0;
                }
                let pv = p.to_f64();
                let mut w = pv.powi(x as i32) * (1.0 - pv).powi((*n - x) as i32);
                for i in 0..x {
                    w *= (*n - i) as f64 / (i + 1) as f64;
                }
                w
            }
        }
    }
}

/// Explicit expansion of the monic Meixner polynomial over falling powers:
/// `M_n(x) = sum_m (xi/(xi-1))^{n-m} C(n,m) (t+m)_{n-m} x^{falling m}`.
pub fn meixner_explicit(t: &Scalar, xi: &Scalar, n: u32, x: &Scalar) -> Scalar {
    let ratio = xi.clone() / (xi.clone() - Scalar::one());
    let mut s = Scalar::zero();
    for m in 0..=n {
        let term = ratio.pow_i((n - m) as i32)
            * crate::scalar::binomial(n, m)
            * pochhammer(&(t.clone() + Scalar::from_int(m as i64)), n - m)
            * falling(x, m);
        s = s + term;
    }
    s
}
