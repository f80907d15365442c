//! Relative dimension functions `P*_mu(lam) = |lam|^{falling |mu|} dim(mu,lam)/dim(lam)`
//! and the filtered coefficient space they span.
//!
//! Operators are stored as coefficient maps over the `P*` basis restricted
//! to the built depth; pointwise evaluation exists for cross-validation.
//! With a self-dualized multiplicity, `dim(mu, lam)` carries the radical
//! `sqrt(g(lam)/g(mu))` of the gauge factor, which the exact scalar backend
//! tracks explicitly, so identity checks stay exact.

use crate::error::{KerovError, Result};
use crate::graph::VertexId;
use crate::kerov::KerovData;
use crate::multiplicity::WeightedGraph;
use crate::scalar::{factorial, falling, Scalar};
use std::collections::BTreeMap;

/// Finitely supported coefficient vector over the `P*` basis.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AVector {
    pub coeffs: BTreeMap<VertexId, Scalar>,
}

impl AVector {
    pub fn zero() -> Self {
        AVector { coeffs: BTreeMap::new() }
    }

    pub fn basis(mu: VertexId) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(mu, Scalar::one());
        AVector { coeffs }
    }

    pub fn add_term(&mut self, mu: VertexId, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(mu).or_insert_with(Scalar::zero);
        *e = e.clone() + c;
        if e.is_zero() {
            self.coeffs.remove(&mu);
        }
    }

    pub fn scale(&self, c: &Scalar) -> AVector {
        let mut out = AVector::zero();
        for (&mu, x) in &self.coeffs {
            out.add_term(mu, x.clone() * c.clone());
        }
        out
    }

    pub fn plus(&self, other: &AVector) -> AVector {
        let mut out = self.clone();
        for (&mu, c) in &other.coeffs {
            out.add_term(mu, c.clone());
        }
        out
    }

    /// Filtration degree: maximal level in the support.
    pub fn degree(&self, wg: &WeightedGraph) -> u32 {
        self.coeffs.keys().map(|&mu| wg.g.level(mu)).max().unwrap_or(0)
    }

    /// Pointwise value `sum_mu c_mu P*_mu(lam)`.
    pub fn evaluate(&self, wg: &WeightedGraph, lam: VertexId) -> Scalar {
        let mut s = Scalar::zero();
        for (&mu, c) in &self.coeffs {
            s = s + c.clone() * pstar_value(wg, mu, lam);
        }
        s
    }

    /// Sum of absolute coefficient values (for tail bounds).
    pub fn abs_coeff_sum(&self) -> f64 {
        self.coeffs.values().map(|c| c.abs().to_f64()).sum()
    }
}

/// `P*_mu(lam)`; vanishes unless `mu` is contained in `lam`, and
/// `P*_mu(mu) = |mu|! / dim mu`.
pub fn pstar_value(wg: &WeightedGraph, mu: VertexId, lam: VertexId) -> Scalar {
    let m = wg.g.level(mu);
    let n = wg.g.level(lam);
    if m > n {
        return Scalar::zero();
    }
    let rel = wg.rel_dim(mu, lam);
    if rel.is_zero() {
        return Scalar::zero();
    }
    falling(&Scalar::from_int(n as i64), m) * rel / wg.dim(lam).clone()
}

/// Multiplication by the level function: `p * P*_mu = |mu| P*_mu + sum_rho
/// kappa(mu, rho) P*_rho` extended linearly. Errors if the result leaves
/// the built depth.
pub fn pieri_multiply_p(wg: &WeightedGraph, f: &AVector) -> Result<AVector> {
    let mut out = AVector::zero();
    for (&mu, c) in &f.coeffs {
        let lvl = wg.g.level(mu);
        if lvl + 1 > wg.g.depth && !wg.g.rim_complete {
            return Err(KerovError::Truncated { level: lvl + 1, depth: wg.g.depth });
        }
        out.add_term(mu, c.clone() * Scalar::from_int(lvl as i64));
        for (idx, e) in wg.g.up[mu as usize].iter().enumerate() {
            out.add_term(e.to, c.clone() * wg.kap(mu, idx).clone());
        }
    }
    Ok(out)
}

/// One term `(a p + b) * vec` of an operator image, where `p` is the level
/// function; evaluated pointwise as `(a |lam| + b) * vec(lam)`.
#[derive(Clone, Debug)]
pub struct PTerm {
    pub p_coeff: Scalar,
    pub constant: Scalar,
    pub vec: AVector,
}

impl PTerm {
    pub fn evaluate(&self, wg: &WeightedGraph, lam: VertexId) -> Scalar {
        let lvl = Scalar::from_int(wg.g.level(lam) as i64);
        (self.p_coeff.clone() * lvl + self.constant.clone()) * self.vec.evaluate(wg, lam)
    }
}

/// Reduced isometry weight `w(lam) = xi^{n/2} (dim lam / n!) sqrt(prod q^2)`;
/// the ambient constant `(1-xi)^{t/2}` is dropped since it cancels in every
/// identity stated through these weights.
pub fn isometry_weight(k: &KerovData, xi: &Scalar, lam: VertexId) -> Scalar {
    let n = k.graph().level(lam);
    let half_xi_n = xi.pow_i(n as i32).sqrt();
    half_xi_n * (k.wg.dim(lam).clone() / factorial(n)) * k.prod_qsq(lam).sqrt()
}

/// Action of the raising operator on `I_xi f` in coefficient space:
/// `U(I_xi P*_mu) = xi^{-1/2} (p - |mu|) (I_xi P*_mu)`.
pub fn apply_kerov_u(k: &KerovData, xi: &Scalar, f: &AVector) -> Result<Vec<PTerm>> {
    ensure_dynamics_ready(k, xi)?;
    let inv_sqrt_xi = Scalar::one() / xi.sqrt();
    let mut terms = Vec::new();
    for (&mu, c) in &f.coeffs {
        let m = k.graph().level(mu) as i64;
        terms.push(PTerm {
            p_coeff: c.clone() * inv_sqrt_xi.clone(),
            constant: c.clone() * inv_sqrt_xi.clone() * Scalar::from_int(-m),
            vec: AVector::basis(mu),
        });
    }
    Ok(terms)
}

/// Action of the lowering operator:
/// `D(I_xi P*_mu) = xi^{1/2} (p + |mu| + t)(I_xi P*_mu)
///                + xi^{1/2} sum_rho kappa(rho, mu) q^2(mu/rho) (I_xi P*_rho)`.
pub fn apply_kerov_d(k: &KerovData, xi: &Scalar, f: &AVector) -> Result<Vec<PTerm>> {
    ensure_dynamics_ready(k, xi)?;
    let sqrt_xi = xi.sqrt();
    let mut terms = Vec::new();
    for (&mu, c) in &f.coeffs {
        let m = k.graph().level(mu) as i64;
        terms.push(PTerm {
            p_coeff: c.clone() * sqrt_xi.clone(),
            constant: c.clone() * sqrt_xi.clone() * (Scalar::from_int(m) + k.t_param().clone()),
            vec: AVector::basis(mu),
        });
        let mut lower = AVector::zero();
        for e in k.graph().cocovers(mu) {
            let rho = e.to;
            let idx = k.graph().up[rho as usize].iter().position(|ue| ue.to == mu).expect("edge");
            let w = k.wg.kap(rho, idx).clone() * k.qsq(rho, idx).clone();
            lower.add_term(rho, c.clone() * w);
        }
        if !lower.coeffs.is_empty() {
            terms.push(PTerm { p_coeff: Scalar::zero(), constant: sqrt_xi.clone(), vec: lower });
        }
    }
    Ok(terms)
}

fn ensure_dynamics_ready(_k: &KerovData, xi: &Scalar) -> Result<()> {
    let x = xi.to_f64();
    if !(0.0..1.0).contains(&x) || x == 0.0 {
        return Err(KerovError::OutOfRange(format!("xi must lie in (0,1), got {xi}")));
    }
    Ok(())
}

/// Raw edge-weight action of the raising operator on a value table:
/// `(U v)(lam) = sum_{kap up-to lam} kappa q(lam/kap) v(kap)`.
pub fn raw_u(k: &KerovData, values: &[Scalar]) -> Vec<Scalar> {
    let g = k.graph();
    let mut out = vec![Scalar::zero(); g.verts.len()];
    for v in 0..g.verts.len() as VertexId {
        for (idx, e) in g.up[v as usize].iter().enumerate() {
            let w = k.wg.kap(v, idx).clone() * k.qsq(v, idx).sqrt();
            out[e.to as usize] = out[e.to as usize].clone() + w * values[v as usize].clone();
        }
    }
    out
}

/// `(D v)(lam) = sum_{nu covers lam} kappa q(nu/lam) v(nu)`.
pub fn raw_d(k: &KerovData, values: &[Scalar]) -> Vec<Scalar> {
    let g = k.graph();
    let mut out = vec![Scalar::zero(); g.verts.len()];
    for v in 0..g.verts.len() as VertexId {
        for (idx, e) in g.up[v as usize].iter().enumerate() {
            let w = k.wg.kap(v, idx).clone() * k.qsq(v, idx).sqrt();
            out[v as usize] = out[v as usize].clone() + w * values[e.to as usize].clone();
        }
    }
    out
}

#[derive(Clone, Debug)]
pub enum IdentityCheck {
    Ok,
    Failure { lhs: Scalar, rhs: Scalar },
}

impl IdentityCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, IdentityCheck::Ok)
    }
}

/// The exchange identity
/// `sum_nu kappa(lam,nu) q^2(nu/lam) dim(mu,nu)
///   = sum_rho kappa(rho,mu) q^2(mu/rho) dim(rho,lam)
///   + (n + m + t)(n - m + 1) dim(mu,lam)`.
pub fn check_comb_identity(k: &KerovData, mu: VertexId, lam: VertexId) -> Result<IdentityCheck> {
    let g = k.graph();
    let n = g.level(lam) as i64;
    let m = g.level(mu) as i64;
    let mut lhs = Scalar::zero();
    for (idx, e) in g.covers(lam)?.iter().enumerate() {
        lhs = lhs + k.wg.kap(lam, idx).clone() * k.qsq(lam, idx).clone() * k.wg.rel_dim(mu, e.to);
    }
    let mut rhs = Scalar::zero();
    for e in g.cocovers(mu) {
        let rho = e.to;
        let idx = g.up[rho as usize].iter().position(|ue| ue.to == mu).expect("edge");
        rhs = rhs + k.wg.kap(rho, idx).clone() * k.qsq(rho, idx).clone() * k.wg.rel_dim(rho, lam);
    }
    rhs = rhs
        + (Scalar::from_int(n + m) + k.t_param().clone())
            * Scalar::from_int(n - m + 1)
            * k.wg.rel_dim(mu, lam);
    if lhs.approx_eq(&rhs, 1e-10) {
        Ok(IdentityCheck::Ok)
    } else {
        Ok(IdentityCheck::Failure { lhs, rhs })
    }
}
