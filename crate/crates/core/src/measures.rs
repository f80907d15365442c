//! Coherent measure systems generated by sl(2) data, the down/up transition
//! kernels, negative-binomial mixing, and the Plancherel specialization for
//! Heisenberg graphs.

use crate::error::{KerovError, Result};
use crate::graph::VertexId;
use crate::kerov::KerovData;
use crate::multiplicity::{commutator_diagonal, CommutatorClass, WeightedGraph};
use crate::scalar::{factorial, pochhammer, Rat, Scalar};
use num::{Signed, ToPrimitive};

/// Probability masses on one level, aligned with `g.levels[level]`.
#[derive(Clone, Debug)]
pub struct LevelMeasure {
    pub level: u32,
    pub vals: Vec<Scalar>,
}

impl LevelMeasure {
    pub fn get(&self, k: &KerovData, v: VertexId) -> Scalar {
        let pos = k.graph().levels[self.level as usize]
            .iter()
            .position(|&x| x == v)
            .expect("vertex on level");
        self.vals[pos].clone()
    }

    pub fn total(&self) -> Scalar {
        self.vals.iter().cloned().sum()
    }

    /// All masses real and nonnegative (probability mode).
    pub fn is_probability(&self, tol: f64) -> bool {
        self.vals.iter().all(|m| match m {
            Scalar::Exact(_) => m.as_rat().map(|r| !r.is_negative()).unwrap_or(m.to_f64() >= 0.0),
            Scalar::F64(x) => *x >= -tol,
            Scalar::C64(z) => z.im.abs() <= tol && z.re >= -tol,
        })
    }
}

fn check_t(k: &KerovData) -> Result<()> {
    if let Some(t) = k.t_param().as_rat() {
        if t.is_integer() && !t.is_positive() {
            return Err(KerovError::BadT { t: t.to_string() });
        }
    }
    Ok(())
}

fn check_level(k: &KerovData, n: u32) -> Result<()> {
    if n as usize >= k.graph().levels.len() {
        return Err(KerovError::Truncated { level: n, depth: k.graph().depth });
    }
    Ok(())
}

/// `M_n(lam) = dim(lam)^2 prod q^2 / (n! (t)_n)`.
pub fn coherent_measure(k: &KerovData, n: u32) -> Result<LevelMeasure> {
    check_t(k)?;
    check_level(k, n)?;
    let z = factorial(n) * pochhammer(k.t_param(), n);
    let vals = k.graph().levels[n as usize]
        .iter()
        .map(|&v| {
            let d = k.wg.dim(v);
            d.clone() * d.clone() * k.prod_qsq(v).clone() / z.clone()
        })
        .collect();
    Ok(LevelMeasure { level: n, vals })
}

#[derive(Clone, Debug)]
pub enum NormalizationCheck {
    Ok { n: u32, z: Scalar },
    Failure { lhs: Scalar, rhs: Scalar },
}

impl NormalizationCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, NormalizationCheck::Ok { .. })
    }
}

/// `sum_lam dim^2 prod q^2 = n! (t)_n`.
pub fn normalization_check(k: &KerovData, n: u32) -> Result<NormalizationCheck> {
    check_level(k, n)?;
    let lhs: Scalar = k.graph().levels[n as usize]
        .iter()
        .map(|&v| {
            let d = k.wg.dim(v);
            d.clone() * d.clone() * k.prod_qsq(v).clone()
        })
        .sum();
    let rhs = factorial(n) * pochhammer(k.t_param(), n);
    if lhs.approx_eq(&rhs, 1e-10) {
        Ok(NormalizationCheck::Ok { n, z: rhs })
    } else {
        Ok(NormalizationCheck::Failure { lhs, rhs })
    }
}

/// `p_down(lam, mu) = kappa(mu, lam) dim mu / dim lam`; rows sum to 1.
/// Depends only on the multiplicity, not on the sl(2) data.
pub fn down_kernel(wg: &WeightedGraph, lam: VertexId) -> Vec<(VertexId, Scalar)> {
    let g = &wg.g;
    g.down[lam as usize]
        .iter()
        .map(|e| {
            let idx = g.up[e.to as usize].iter().position(|ue| ue.to == lam).expect("edge");
            let p = wg.kap(e.to, idx).clone() * wg.dim(e.to).clone() / wg.dim(lam).clone();
            (e.to, p)
        })
        .collect()
}

/// `p_up(lam, nu) = q^2(nu/lam) kappa(lam, nu) dim nu / ((n+1)(n+t) dim lam)`;
/// rows sum to 1 for nondegenerate data.
pub fn up_kernel(k: &KerovData, lam: VertexId) -> Result<Vec<(VertexId, Scalar)>> {
    check_t(k)?;
    let g = k.graph();
    let n = g.level(lam);
    let covers = g.covers(lam)?;
    let denom = Scalar::from_int((n + 1) as i64)
        * (Scalar::from_int(n as i64) + k.t_param().clone())
        * k.wg.dim(lam).clone();
    Ok(covers
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let p = k.qsq(lam, idx).clone() * k.wg.kap(lam, idx).clone() * k.wg.dim(e.to).clone()
                / denom.clone();
            (e.to, p)
        })
        .collect())
}

#[derive(Clone, Debug)]
pub enum CoherencyCheck {
    Ok { n: u32, checked: usize },
    Failure { lambda: String, lhs: Scalar, rhs: Scalar },
}

impl CoherencyCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, CoherencyCheck::Ok { .. })
    }
}

/// `sum_nu M_{n+1}(nu) p_down(nu, lam) = M_n(lam)` for every `lam` on level `n`.
pub fn check_coherency(k: &KerovData, n: u32) -> Result<CoherencyCheck> {
    let upper = coherent_measure(k, n + 1)?;
    let lower = coherent_measure(k, n)?;
    let g = k.graph();
    let mut checked = 0;
    for (pos, &lam) in g.levels[n as usize].iter().enumerate() {
        let mut lhs = Scalar::zero();
        for e in &g.up[lam as usize] {
            let mnu = upper.get(k, e.to);
            let pd = down_kernel(&k.wg, e.to)
                .into_iter()
                .find(|(mu, _)| *mu == lam)
                .map(|(_, p)| p)
                .expect("edge");
            lhs = lhs + mnu * pd;
        }
        checked += 1;
        if !lhs.approx_eq(&lower.vals[pos], 1e-10) {
            return Ok(CoherencyCheck::Failure {
                lambda: g.vertex(lam).code(),
                lhs,
                rhs: lower.vals[pos].clone(),
            });
        }
    }
    Ok(CoherencyCheck::Ok { n, checked })
}

/// Negative binomial mass `pi_{c,xi}(n) = (1-xi)^c (c)_n / n! xi^n`.
/// Exact when `c` is a positive integer and `xi` rational.
pub fn negative_binomial(c: &Scalar, xi: &Scalar, n: u32) -> Result<Scalar> {
    check_xi(xi)?;
    let pref = pow_scalar(&(Scalar::one() - xi.clone()), c);
    Ok(pref * pochhammer(c, n) / factorial(n) * xi.pow_i(n as i32))
}

fn pow_scalar(base: &Scalar, e: &Scalar) -> Scalar {
    match e.as_rat() {
        Some(r) => base.pow_rat(&r),
        None => Scalar::F64(base.to_f64().powf(e.to_f64())),
    }
}

fn check_xi(xi: &Scalar) -> Result<()> {
    let x = xi.to_f64();
    if !(0.0..1.0).contains(&x) || x == 0.0 {
        return Err(KerovError::OutOfRange(format!("xi must lie in (0,1), got {xi}")));
    }
    Ok(())
}

/// The mixture of `{M_n}` over levels by the negative binomial law.
/// Masses factor as `(1-xi)^t * weight(lam)` where the weight
/// `xi^n (dim/n!)^2 prod q^2` stays exact for rational data.
pub struct MixedMeasure<'a> {
    pub k: &'a KerovData,
    pub xi: Scalar,
}

impl<'a> MixedMeasure<'a> {
    pub fn new(k: &'a KerovData, xi: Scalar) -> Result<Self> {
        check_xi(&xi)?;
        check_t(k)?;
        if k.t_param().to_f64() <= 0.0 {
            return Err(KerovError::BadT { t: k.t_param().to_string() });
        }
        Ok(MixedMeasure { k, xi })
    }

    /// Exact part: `M_xi(lam) = (1-xi)^t * weight(lam)`.
    pub fn weight(&self, v: VertexId) -> Scalar {
        let n = self.k.graph().level(v);
        let d = self.k.wg.dim(v).clone() / factorial(n);
        self.xi.pow_i(n as i32) * d.clone() * d * self.k.prod_qsq(v).clone()
    }

    /// Full mass, float when `(1-xi)^t` is irrational.
    pub fn mass(&self, v: VertexId) -> Scalar {
        self.prefactor() * self.weight(v)
    }

    pub fn prefactor(&self) -> Scalar {
        pow_scalar(&(Scalar::one() - self.xi.clone()), self.k.t_param())
    }

    /// `sum_{|lam| <= N} M_xi(lam) = sum_{n <= N} pi_{t,xi}(n)`, exactly on
    /// the weight side.
    pub fn check_level_marginal(&self, max_level: u32) -> Result<bool> {
        for n in 0..=max_level.min(self.k.graph().depth) {
            let lhs: Scalar = self.k.graph().levels[n as usize]
                .iter()
                .map(|&v| self.weight(v))
                .sum();
            let rhs = pochhammer(self.k.t_param(), n) / factorial(n) * self.xi.pow_i(n as i32);
            if !lhs.approx_eq(&rhs, 1e-10) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `Pl_n(lam) = dim(lam)^2 / (r^n n!)` on a graph with `[D°,U°] = r * 1`.
pub fn plancherel(wg: &WeightedGraph, n: u32) -> Result<LevelMeasure> {
    let r = heisenberg_constant(wg)?;
    if n as usize >= wg.g.levels.len() {
        return Err(KerovError::Truncated { level: n, depth: wg.g.depth });
    }
    let z = pow_i_scalar(&r, n) * factorial(n);
    let vals = wg.g.levels[n as usize]
        .iter()
        .map(|&v| {
            let d = wg.dim(v);
            d.clone() * d.clone() / z.clone()
        })
        .collect();
    Ok(LevelMeasure { level: n, vals })
}

fn pow_i_scalar(r: &Scalar, n: u32) -> Scalar {
    r.pow_i(n as i32)
}

pub fn heisenberg_constant(wg: &WeightedGraph) -> Result<Scalar> {
    let rep = commutator_diagonal(&wg.g, &wg.m, wg.g.depth.saturating_sub(1))?;
    match rep.class {
        CommutatorClass::Heisenberg { r } => Ok(r),
        other => Err(KerovError::NotHeisenberg(format!("{other:?}"))),
    }
}

/// Poissonized weights: `Pl_gamma(lam) = e^{-gamma r} * gamma^n (dim/n!)^2`.
pub struct PoissonizedPlancherel<'a> {
    pub wg: &'a WeightedGraph,
    pub gamma: Scalar,
    pub r: Scalar,
}

impl<'a> PoissonizedPlancherel<'a> {
    pub fn new(wg: &'a WeightedGraph, gamma: Scalar) -> Result<Self> {
        if gamma.to_f64() <= 0.0 {
            return Err(KerovError::OutOfRange("gamma must be positive".into()));
        }
        let r = heisenberg_constant(wg)?;
        Ok(PoissonizedPlancherel { wg, gamma, r })
    }

    pub fn weight(&self, v: VertexId) -> Scalar {
        let n = self.wg.g.level(v);
        let d = self.wg.dim(v).clone() / factorial(n);
        self.gamma.pow_i(n as i32) * d.clone() * d
    }

    pub fn mass(&self, v: VertexId) -> Scalar {
        let gr = (self.gamma.clone() * self.r.clone()).to_f64();
        Scalar::F64((-gr).exp()) * self.weight(v)
    }

    /// Level marginal is Poisson(`gamma r`): `sum_{|lam|=n} weight = (gamma r)^n / n!`.
    pub fn check_level_marginal(&self, max_level: u32) -> bool {
        for n in 0..=max_level.min(self.wg.g.depth) {
            let lhs: Scalar = self.wg.g.levels[n as usize].iter().map(|&v| self.weight(v)).sum();
            let gr = self.gamma.clone() * self.r.clone();
            let rhs = gr.pow_i(n as i32) / factorial(n);
            if !lhs.approx_eq(&rhs, 1e-10) {
                return false;
            }
        }
        true
    }
}

/// Mean of the negative binomial distribution, by direct series summation.
pub fn negative_binomial_mean_oracle(c: f64, xi: f64, terms: u32) -> f64 {
    let mut mass;
    let mut mean = 0.0;
    let mut logterm = c * (1.0 - xi).ln();
    for n in 0..terms {
        mass = logterm.exp();
        mean += n as f64 * mass;
        logterm += ((c + n as f64) / (n as f64 + 1.0)).ln() + xi.ln();
    }
    mean
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{BranchingGraph, Family, Vertex};
    use crate::kerov::KerovSpec;
    use crate::multiplicity::{MultKind, MultiplicityFn};
    use crate::scalar::rat;

    fn sc(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    fn young23() -> KerovData {
        KerovData::new(
            KerovSpec::Young { z: sc(2, 1), zp: sc(3, 1), theta: Scalar::one() },
            6,
            true,
        )
        .unwrap()
    }

    #[test]
    fn level_zero_mass_one() {
        let k = young23();
        let m = coherent_measure(&k, 0).unwrap();
        assert_eq!(m.vals, vec![Scalar::one()]);
    }

    #[test]
    fn pascal_measure_closed_form() {
        // M_n(k,l) = (n!/(k!l!)) (t1)_k (t2)_l / (t1+t2)_n
        let k = KerovData::new(KerovSpec::Pascal { ts: vec![sc(1, 1), sc(2, 1)] }, 4, false).unwrap();
        for n in 0..=4u32 {
            let m = coherent_measure(&k, n).unwrap();
            assert_eq!(m.total(), Scalar::one());
            for (pos, &v) in k.graph().levels[n as usize].iter().enumerate() {
                if let Vertex::Tuple(t) = k.graph().vertex(v) {
                    let (a, b) = (t[0], t[1]);
                    let expect = factorial(n) / (factorial(a) * factorial(b))
                        * pochhammer(&sc(1, 1), a)
                        * pochhammer(&sc(2, 1), b)
                        / pochhammer(&sc(3, 1), n);
                    assert_eq!(m.vals[pos], expect);
                }
            }
        }
    }

    #[test]
    fn young_level_two_masses() {
        // z = z' = 1, theta = 1: M_2((2)) = (z+1)(z'+1)/(2(zz'+1)) = 1
        let k = KerovData::new(
            KerovSpec::Young { z: Scalar::one(), zp: Scalar::one(), theta: Scalar::one() },
            3,
            true,
        )
        .unwrap();
        let m = coherent_measure(&k, 2).unwrap();
        let v2 = k.graph().id_of(&Vertex::Partition(vec![2])).unwrap();
        assert_eq!(m.get(&k, v2), Scalar::one());
        assert_eq!(m.total(), Scalar::one());
    }

    #[test]
    fn normalization_small_levels() {
        let k = young23();
        // n = 0: empty product; n = 1: the initial-vertex balance condition
        assert!(normalization_check(&k, 0).unwrap().is_ok());
        assert!(normalization_check(&k, 1).unwrap().is_ok());
        // n = 4 against 4! (6)_4 via the same exact route
        match normalization_check(&k, 4).unwrap() {
            NormalizationCheck::Ok { z, .. } => {
                assert_eq!(z, factorial(4) * pochhammer(&Scalar::from_int(6), 4));
            }
            _ => panic!("normalization failed"),
        }
    }

    #[test]
    fn down_kernel_rows() {
        let k = young23();
        let g = k.graph();
        // from (1): unique target with mass 1
        let one = g.id_of(&Vertex::Partition(vec![1])).unwrap();
        let row = down_kernel(&k.wg, one);
        assert_eq!(row.len(), 1);
        assert_eq!(row[0].1, Scalar::one());
        // pascal: mass k/(k+l) to (k-1, l)
        let kp = KerovData::new(KerovSpec::Pascal { ts: vec![sc(1, 1), sc(2, 1)] }, 4, false).unwrap();
        let v = kp.graph().id_of(&Vertex::Tuple(vec![3, 1])).unwrap();
        for (mu, p) in down_kernel(&kp.wg, v) {
            if let Vertex::Tuple(t) = kp.graph().vertex(mu) {
                if t == &vec![2, 1] {
                    assert_eq!(p, sc(3, 4));
                }
            }
        }
    }

    #[test]
    fn up_kernel_rows_sum_to_one() {
        let k = young23();
        for n in 0..=5u32 {
            for &v in &k.graph().levels[n as usize] {
                let row = up_kernel(&k, v).unwrap();
                let total: Scalar = row.iter().map(|(_, p)| p.clone()).sum();
                assert_eq!(total, Scalar::one(), "level {n}");
            }
        }
    }

    #[test]
    fn coherency_catalog() {
        let cases: Vec<KerovData> = vec![
            young23(),
            KerovData::new(KerovSpec::Young { z: sc(3, 2), zp: sc(5, 2), theta: sc(2, 1) }, 6, false).unwrap(),
            KerovData::new(KerovSpec::Kingman { alpha: sc(1, 3), tau: sc(2, 1) }, 6, false).unwrap(),
            KerovData::new(KerovSpec::Schur { a: sc(5, 1) }, 6, false).unwrap(),
            KerovData::new(KerovSpec::Pascal { ts: vec![sc(1, 1), sc(2, 1), sc(3, 1)] }, 6, false).unwrap(),
            KerovData::new(KerovSpec::Chain { t: sc(7, 2) }, 6, false).unwrap(),
            KerovData::new(KerovSpec::Trees, 5, false).unwrap(),
            KerovData::new(KerovSpec::RimHook { r: 2, z: sc(5, 2), zp: sc(7, 2) }, 4, false).unwrap(),
        ];
        for k in &cases {
            for n in 0..=k.graph().depth.saturating_sub(1).min(5) {
                assert!(
                    check_coherency(k, n).unwrap().is_ok(),
                    "coherency fails for {} at level {n}",
                    k.spec
                );
            }
        }
    }

    #[test]
    fn coherency_degenerate_kingman() {
        let k = KerovData::new(KerovSpec::Kingman { alpha: sc(-1, 1), tau: sc(2, 1) }, 6, true).unwrap();
        for n in 0..=5 {
            assert!(check_coherency(&k, n).unwrap().is_ok());
        }
    }

    #[test]
    fn coherency_complex_parameters() {
        // z' != conj(z), both complex: masses are complex but coherency holds
        let k = KerovData::new(
            KerovSpec::Young {
                z: Scalar::C64(num::Complex::new(0.7, 0.3)),
                zp: Scalar::C64(num::Complex::new(1.1, 0.5)),
                theta: Scalar::one(),
            },
            5,
            true,
        )
        .unwrap();
        for n in 0..=4 {
            let m = coherent_measure(&k, n).unwrap();
            assert!(m.total().approx_eq(&Scalar::one(), 1e-10));
            assert!(check_coherency(&k, n).unwrap().is_ok());
        }
        assert!(!k.positive);
    }

    #[test]
    fn bad_t_rejected() {
        let k = KerovData::new(KerovSpec::Chain { t: Scalar::from_int(-2) }, 4, true).unwrap();
        assert!(matches!(coherent_measure(&k, 2), Err(KerovError::BadT { .. })));
    }

    #[test]
    fn negative_binomial_basics() {
        let c = sc(7, 2);
        let xi = sc(2, 5);
        // pi(0) = (1-xi)^c (float: fractional power)
        let p0 = negative_binomial(&c, &xi, 0).unwrap();
        assert!((p0.to_f64() - 0.6f64.powf(3.5)).abs() < 1e-12);
        // integer c stays exact: (1/2)^3 * (3)_2/2! * (1/2)^2 = 3/16
        let p = negative_binomial(&Scalar::from_int(3), &sc(1, 2), 2).unwrap();
        assert_eq!(p, sc(3, 16));
    }

    #[test]
    fn negative_binomial_mean() {
        let mean = negative_binomial_mean_oracle(3.5, 0.4, 400);
        assert!((mean - 0.4 * 3.5 / 0.6).abs() < 1e-10);
    }

    #[test]
    fn mixing_marginal_and_factorization() {
        let k = KerovData::new(KerovSpec::Pascal { ts: vec![sc(1, 1), sc(2, 1)] }, 6, false).unwrap();
        let mx = MixedMeasure::new(&k, sc(1, 2)).unwrap();
        assert!(mx.check_level_marginal(5).unwrap());
        // factorization M_xi(k,l) = pi_{t1,xi}(k) pi_{t2,xi}(l)
        for &v in k.graph().levels[4].iter() {
            if let Vertex::Tuple(t) = k.graph().vertex(v) {
                let lhs = mx.mass(v);
                let rhs = negative_binomial(&sc(1, 1), &sc(1, 2), t[0]).unwrap()
                    * negative_binomial(&sc(2, 1), &sc(1, 2), t[1]).unwrap();
                assert!(lhs.approx_eq(&rhs, 1e-12));
            }
        }
    }

    #[test]
    fn plancherel_trivial_young() {
        let g = BranchingGraph::build(Family::Young, 4).unwrap();
        let wg = WeightedGraph::new(g, MultiplicityFn::trivial()).unwrap();
        let pl = plancherel(&wg, 3).unwrap();
        assert_eq!(pl.total(), Scalar::one());
        // masses proportional to dim^2 = {1, 4, 1} on {(3), (2,1), (1,1,1)}
        let dims: Vec<Scalar> = wg.g.levels[3].iter().map(|&v| wg.dim(v).clone()).collect();
        for (pos, d) in dims.iter().enumerate() {
            assert_eq!(pl.vals[pos], d.clone() * d.clone() / Scalar::from_int(6));
        }
        assert_eq!(plancherel(&wg, 0).unwrap().vals, vec![Scalar::one()]);
    }

    #[test]
    fn qt_plancherel_well_defined() {
        let g = BranchingGraph::build(Family::Young, 5).unwrap();
        let m = MultiplicityFn::new(MultKind::MacdonaldSelfdual { q: sc(1, 3), t: sc(1, 2) });
        let wg = WeightedGraph::new(g, m).unwrap();
        assert_eq!(heisenberg_constant(&wg).unwrap(), sc(4, 3));
        for n in 0..=4 {
            let pl = plancherel(&wg, n).unwrap();
            assert!(pl.total().approx_eq(&Scalar::one(), 1e-12));
        }
    }

    #[test]
    fn poissonized_plancherel_marginal() {
        let g = BranchingGraph::build(Family::Young, 6).unwrap();
        let wg = WeightedGraph::new(g, MultiplicityFn::trivial()).unwrap();
        let pp = PoissonizedPlancherel::new(&wg, sc(3, 4)).unwrap();
        assert!(pp.check_level_marginal(5));
    }

    #[test]
    fn z_measures_approach_plancherel() {
        // M_n^{ss theta} -> Pl_n^theta as s -> infinity, error ~ 1/s
        let theta = sc(1, 2);
        let g = BranchingGraph::build(Family::Young, 5).unwrap();
        let wg = WeightedGraph::new(g, MultiplicityFn::new(MultKind::JackSelfdual { theta: theta.clone() }))
            .unwrap();
        let pl = plancherel(&wg, 5).unwrap();
        let mut errs = Vec::new();
        for s in [1e3, 1e4] {
            let k = KerovData::new(
                KerovSpec::Young { z: Scalar::F64(s), zp: Scalar::F64(s), theta: theta.clone() },
                5,
                true,
            )
            .unwrap();
            let m = coherent_measure(&k, 5).unwrap();
            let worst = m
                .vals
                .iter()
                .zip(&pl.vals)
                .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
                .fold(0.0f64, f64::max);
            errs.push(worst);
        }
        assert!(errs[1] < errs[0] * 0.15, "convergence rate not O(1/s): {errs:?}");
        assert!(errs[1] < 1e-3, "not converged at s=1e4: {errs:?}");
    }

    #[test]
    fn detailed_balance_seed() {
        // M_n(lam) p_up(lam, nu) p_down(nu, lam2) is symmetric in (lam, lam2)
        let k = young23();
        let g = k.graph();
        for n in 0..=4u32 {
            let m = coherent_measure(&k, n).unwrap();
            for (pos, &lam) in g.levels[n as usize].iter().enumerate() {
                for (nu, pup) in up_kernel(&k, lam).unwrap() {
                    for (lam2, pdn) in down_kernel(&k.wg, nu) {
                        let lhs = m.vals[pos].clone() * pup.clone() * pdn;
                        // mirror
                        let pos2 = g.levels[n as usize].iter().position(|&x| x == lam2).unwrap();
                        let pup2 = up_kernel(&k, lam2)
                            .unwrap()
                            .into_iter()
                            .find(|(v, _)| *v == nu)
                            .unwrap()
                            .1;
                        let pdn2 = down_kernel(&k.wg, nu)
                            .into_iter()
                            .find(|(v, _)| *v == lam)
                            .unwrap()
                            .1;
                        let rhs = m.vals[pos2].clone() * pup2 * pdn2;
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn probability_mode_flags_negative_mass() {
        let k = KerovData::new(KerovSpec::Chain { t: sc(7, 2) }, 4, false).unwrap();
        let m = coherent_measure(&k, 3).unwrap();
        assert!(m.is_probability(0.0));
        let bad = LevelMeasure { level: 0, vals: vec![sc(-1, 2), sc(3, 2)] };
        assert!(!bad.is_probability(0.0));
        let _ = rat(1, 2);
    }
}
