//! Up/down chains, the jump-process generator, and the eigenfunction
//! theory: Meixner-type and Charlier-type bases, spectra, orthogonality
//! with certified truncation, autoduality and the moment functional.

use crate::dimfun::{pstar_value, AVector};
use crate::error::{KerovError, Result};
use crate::graph::{BranchingGraph, VertexId, Vertex};
use crate::kerov::{KerovData, KerovSpec};
use crate::linalg;
use crate::measures::{coherent_measure, down_kernel, heisenberg_constant, up_kernel, MixedMeasure};

use crate::multiplicity::WeightedGraph;
use crate::scalar::{factorial, falling, Rat, Scalar};
use nalgebra::DMatrix;
use num::ToPrimitive;
use std::collections::HashMap;

/// Transition matrix of the composite up-then-down chain on one level, in
/// the canonical vertex order of that level.
#[derive(Clone, Debug)]
pub struct ChainOperator {
    pub level: u32,
    pub mat: Vec<Vec<Scalar>>,
}

/// `T_n(lam, lam2) = sum_nu p_up(lam, nu) p_down(nu, lam2)`.
pub fn updown_matrix(k: &KerovData, n: u32) -> Result<ChainOperator> {
    let g = k.graph();
    if n + 1 > g.depth {
        return Err(KerovError::Truncated { level: n + 1, depth: g.depth });
    }
    let ids = &g.levels[n as usize];
    let pos: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut mat = vec![vec![Scalar::zero(); ids.len()]; ids.len()];
    for (i, &lam) in ids.iter().enumerate() {
        for (nu, pu) in up_kernel(k, lam)? {
            for (lam2, pd) in down_kernel(&k.wg, nu) {
                let j = pos[&lam2];
                mat[i][j] = mat[i][j].clone() + pu.clone() * pd;
            }
        }
    }
    Ok(ChainOperator { level: n, mat })
}

impl ChainOperator {
    pub fn is_row_stochastic(&self) -> bool {
        self.mat.iter().all(|row| {
            row.iter().cloned().sum::<Scalar>().approx_eq(&Scalar::one(), 1e-12)
        })
    }

    /// Detailed balance with the level measure.
    pub fn is_reversible(&self, m: &[Scalar]) -> bool {
        let n = self.mat.len();
        for i in 0..n {
            for j in 0..n {
                let lhs = m[i].clone() * self.mat[i][j].clone();
                let rhs = m[j].clone() * self.mat[j][i].clone();
                if !lhs.approx_eq(&rhs, 1e-12) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Debug)]
pub enum IdentityCheck {
    Ok,
    Failure { what: String, lhs: Scalar, rhs: Scalar },
}

impl IdentityCheck {
    pub fn is_ok(&self) -> bool {
        matches!(self, IdentityCheck::Ok)
    }
}

/// `(T_n - 1)(P*_mu)_n = -(|mu|(|mu|-1+t)/((n+1)(n+t))) (P*_mu)_n
///   + ((n+1-|mu|)/((n+1)(n+t))) sum_rho kappa(rho,mu) q^2(mu/rho) (P*_rho)_n`,
/// compared as value vectors on level `n`.
pub fn check_tn_action(k: &KerovData, n: u32, mu: VertexId) -> Result<IdentityCheck> {
    let g = k.graph();
    let t = updown_matrix(k, n)?;
    let ids = &g.levels[n as usize];
    let vals: Vec<Scalar> = ids.iter().map(|&v| pstar_value(&k.wg, mu, v)).collect();
    let m = g.level(mu) as i64;
    let denom = Scalar::from_int(n as i64 + 1) * (Scalar::from_int(n as i64) + k.t_param().clone());
    let c1 = -(Scalar::from_int(m) * (Scalar::from_int(m - 1) + k.t_param().clone())) / denom.clone();
    let c2 = Scalar::from_int(n as i64 + 1 - m) / denom;
    for (i, &lam) in ids.iter().enumerate() {
        // (T_n - 1) applied to the value vector
        let mut lhs = -vals[i].clone();
        for (j, v) in vals.iter().enumerate() {
            lhs = lhs + t.mat[i][j].clone() * v.clone();
        }
        let mut rhs = c1.clone() * vals[i].clone();
        for e in g.cocovers(mu) {
            let rho = e.to;
            let idx = g.up[rho as usize].iter().position(|ue| ue.to == mu).expect("edge");
            let w = k.wg.kap(rho, idx).clone() * k.qsq(rho, idx).clone();
            rhs = rhs + c2.clone() * w * pstar_value(&k.wg, rho, lam);
        }
        if !lhs.approx_eq(&rhs, 1e-10) {
            return Ok(IdentityCheck::Failure { what: format!("level {n}, lam {}", g.vertex(lam).code()), lhs, rhs });
        }
    }
    Ok(IdentityCheck::Ok)
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// Sorted eigenvalues of the chain generator `T_n - 1` (ascending).
    pub computed: Vec<f64>,
    /// Predicted `(eigenvalue, multiplicity)` pairs, `j = 0..=n`.
    pub predicted: Vec<(Scalar, usize)>,
    pub max_deviation: f64,
    /// Exact confirmation (determinant/rank certificates), when run.
    pub exact: Option<bool>,
}

/// Spectrum of `T_n - 1`: predicted `-j(j-1+t)/((n+1)(n+t))` with
/// multiplicity `#G_j - #G_{j-1}`. The float route diagonalizes the
/// reversibility-symmetrized kernel; the exact route (small levels)
/// certifies each predicted eigenvalue and its multiplicity by rank
/// computations over the rationals.
pub fn updown_spectrum(k: &KerovData, n: u32, exact: bool) -> Result<SpectrumReport> {
    let g = k.graph();
    let t = updown_matrix(k, n)?;
    let meas = coherent_measure(k, n)?;
    let dim = t.mat.len();
    // symmetrize: S = D^{1/2} (T - I) D^{-1/2}
    let mut s = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let mi = meas.vals[i].to_f64();
            let mj = meas.vals[j].to_f64();
            let tij = t.mat[i][j].to_f64() - if i == j { 1.0 } else { 0.0 };
            s[(i, j)] = (mi / mj).sqrt() * tij;
        }
    }
    let eig = nalgebra::SymmetricEigen::new(s);
    let mut computed: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    computed.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut predicted = Vec::new();
    for j in 0..=n {
        let mult = g.levels[j as usize].len()
            - if j == 0 { 0 } else { g.levels[(j - 1) as usize].len() };
        let num = Scalar::from_int(j as i64) * (Scalar::from_int(j as i64 - 1) + k.t_param().clone());
        let den = Scalar::from_int(n as i64 + 1) * (Scalar::from_int(n as i64) + k.t_param().clone());
        predicted.push((-(num / den), mult));
    }
    let mut expanded: Vec<f64> = predicted
        .iter()
        .flat_map(|(ev, m)| std::iter::repeat(ev.to_f64()).take(*m))
        .collect();
    expanded.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let max_deviation = computed
        .iter()
        .zip(&expanded)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);

    let exact_ok = if exact {
        Some(exact_spectrum_certificate(&t, &predicted)?)
    } else {
        None
    };
    Ok(SpectrumReport { computed, predicted, max_deviation, exact: exact_ok })
}

/// For each predicted eigenvalue `e` of `T - I` with multiplicity `m`,
/// certify `rank(T - (1+e) I) = dim - m` exactly. Together with the
/// multiplicities summing to the dimension this pins the whole spectrum
/// (the matrix is diagonalizable by reversibility).
fn exact_spectrum_certificate(t: &ChainOperator, predicted: &[(Scalar, usize)]) -> Result<bool> {
    let dim = t.mat.len();
    let as_rat = |s: &Scalar| -> Result<Rat> {
        s.as_rat().ok_or_else(|| KerovError::NotExact("exact spectrum needs rational entries".into()))
    };
    for (ev, mult) in predicted {
        if *mult == 0 {
            continue;
        }
        let shift = Scalar::one() + ev.clone();
        let mut m: Vec<Vec<Rat>> = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut row = Vec::with_capacity(dim);
            for j in 0..dim {
                let mut x = t.mat[i][j].clone();
                if i == j {
                    x = x - shift.clone();
                }
                row.push(as_rat(&x)?);
            }
            m.push(row);
        }
        if linalg::rank(&m) != dim - mult {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Jump rates out of `lam`: off-diagonal row entries plus the diagonal.
pub fn jump_rates(k: &KerovData, xi: &Scalar, lam: VertexId) -> Result<(Vec<(VertexId, Scalar)>, Scalar)> {
    check_positive_t(k)?;
    check_xi(xi)?;
    let g = k.graph();
    let n = g.level(lam) as i64;
    let om = Scalar::one() - xi.clone();
    let mut row = Vec::new();
    for (mu, pd) in down_kernel(&k.wg, lam) {
        row.push((mu, Scalar::from_int(n) / om.clone() * pd));
    }
    for (nu, pu) in up_kernel(k, lam)? {
        row.push((nu, xi.clone() * (Scalar::from_int(n) + k.t_param().clone()) / om.clone() * pu));
    }
    let diag = -(Scalar::from_int(n) + xi.clone() * (Scalar::from_int(n) + k.t_param().clone())) / om;
    Ok((row, diag))
}

fn check_positive_t(k: &KerovData) -> Result<()> {
    if k.t_param().to_f64() <= 0.0 {
        return Err(KerovError::BadT { t: k.t_param().to_string() });
    }
    Ok(())
}

fn check_xi(xi: &Scalar) -> Result<()> {
    let x = xi.to_f64();
    if x <= 0.0 || x >= 1.0 {
        return Err(KerovError::OutOfRange(format!("xi must lie in (0,1), got {xi}")));
    }
    Ok(())
}

/// The jump generator restricted to the coefficient space: triangular with
/// respect to the level filtration, diagonal entry `-|mu|`.
pub struct GeneratorOnA<'a> {
    pub k: &'a KerovData,
    pub xi: Scalar,
    pub max_level: u32,
}

impl<'a> GeneratorOnA<'a> {
    pub fn new(k: &'a KerovData, xi: Scalar, max_level: u32) -> Result<Self> {
        check_positive_t(k)?;
        check_xi(&xi)?;
        if max_level > k.graph().depth {
            return Err(KerovError::Truncated { level: max_level, depth: k.graph().depth });
        }
        Ok(GeneratorOnA { k, xi, max_level })
    }

    /// `A P*_mu = -|mu| P*_mu + (xi/(1-xi)) sum_rho kappa(rho,mu) q^2(mu/rho) P*_rho`.
    pub fn apply(&self, f: &AVector) -> AVector {
        let g = self.k.graph();
        let ratio = self.xi.clone() / (Scalar::one() - self.xi.clone());
        let mut out = AVector::zero();
        for (&mu, c) in &f.coeffs {
            out.add_term(mu, -Scalar::from_int(g.level(mu) as i64) * c.clone());
            for e in g.cocovers(mu) {
                let rho = e.to;
                let idx = g.up[rho as usize].iter().position(|ue| ue.to == mu).expect("edge");
                let w = self.k.wg.kap(rho, idx).clone() * self.k.qsq(rho, idx).clone();
                out.add_term(rho, ratio.clone() * w * c.clone());
            }
        }
        out
    }

    /// Basis vertices of the truncation, level by level.
    pub fn basis(&self) -> Vec<VertexId> {
        (0..=self.max_level as usize)
            .flat_map(|l| self.k.graph().levels[l].iter().copied())
            .collect()
    }

    /// Spectrum of the truncation read off the triangular structure:
    /// `{-n}` with multiplicity `#G_n`.
    pub fn spectrum(&self) -> Vec<(i64, usize)> {
        (0..=self.max_level as usize)
            .map(|l| (-(l as i64), self.k.graph().levels[l].len()))
            .collect()
    }
}

/// The Meixner-type eigenfunction
/// `M_lam = sum_{mu <= lam} (xi/(xi-1))^{|lam|-|mu|} dim(mu,lam)/(|lam|-|mu|)!
///          (prod_{cells of lam/mu} q^2) P*_mu`, monic in `P*_lam`.
pub fn meixner_fn(k: &KerovData, xi: &Scalar, lam: VertexId) -> Result<AVector> {
    check_positive_t(k)?;
    check_xi(xi)?;
    let g = k.graph();
    let n = g.level(lam);
    let ratio = xi.clone() / (xi.clone() - Scalar::one());
    let mut out = AVector::zero();
    for lvl in 0..=n {
        for &mu in &g.levels[lvl as usize] {
            let rel = k.wg.rel_dim(mu, lam);
            if rel.is_zero() {
                continue;
            }
            let qprod = k.prod_qsq(lam).clone() / k.prod_qsq(mu).clone();
            let c = ratio.pow_i((n - lvl) as i32) * rel / factorial(n - lvl) * qprod;
            out.add_term(mu, c);
        }
    }
    debug_assert_eq!(out.coeffs.get(&lam), Some(&Scalar::one()));
    Ok(out)
}

/// Exact check that `A M_lam = -|lam| M_lam` in coefficient space.
pub fn check_generator_eigen(k: &KerovData, xi: &Scalar, lam: VertexId) -> Result<IdentityCheck> {
    let n = k.graph().level(lam);
    let gen = GeneratorOnA::new(k, xi.clone(), n)?;
    let m = meixner_fn(k, xi, lam)?;
    let lhs = gen.apply(&m);
    let rhs = m.scale(&Scalar::from_int(-(n as i64)));
    if lhs == rhs {
        return Ok(IdentityCheck::Ok);
    }
    // locate a differing coefficient for the report
    for (mu, c) in &lhs.coeffs {
        let r = rhs.coeffs.get(mu).cloned().unwrap_or_else(Scalar::zero);
        if !c.approx_eq(&r, 1e-12) {
            return Ok(IdentityCheck::Failure {
                what: format!("coefficient at {}", k.graph().vertex(*mu).code()),
                lhs: c.clone(),
                rhs: r,
            });
        }
    }
    Ok(IdentityCheck::Ok)
}

/// Value table of the orthonormal-basis function on the unweighted space:
/// `F_lam = c_lam * sqrt(M_xi(.)) * M_lam(.)` with
/// `c_lam = ((1-xi)/sqrt(xi))^{|lam|} / prod_{cells of lam} q`.
pub fn f_fn(k: &KerovData, xi: &Scalar, lam: VertexId) -> Result<Vec<f64>> {
    check_positive_t(k)?;
    check_xi(xi)?;
    let g = k.graph();
    let mx = MixedMeasure::new(k, xi.clone())?;
    let m = meixner_fn(k, xi, lam)?;
    let n = g.level(lam);
    let xif = xi.to_f64();
    let c = ((1.0 - xif) / xif.sqrt()).powi(n as i32) / k.prod_qsq(lam).to_f64().sqrt();
    let mut out = Vec::with_capacity(g.verts.len());
    for v in 0..g.verts.len() as VertexId {
        let val = m.evaluate(&k.wg, v).to_f64();
        out.push(c * mx.mass(v).to_f64().sqrt() * val);
    }
    Ok(out)
}

/// Mixing law over levels, for truncation bounds and deep sums.
#[derive(Clone, Copy, Debug)]
pub enum Mixing {
    /// Negative binomial with parameters `(t, xi)`.
    NegBin { t: f64, xi: f64 },
    /// Poisson with the given rate.
    Poisson { rate: f64 },
}

impl Mixing {
    /// Mass of level `n`.
    fn level_mass(&self, n: u32) -> f64 {
        match self {
            Mixing::NegBin { t, xi } => {
                let mut logw = t * (1.0 - xi).ln() + (n as f64) * xi.ln();
                for i in 0..n {
                    logw += ((t + i as f64) / (i as f64 + 1.0)).ln();
                }
                logw.exp()
            }
            Mixing::Poisson { rate } => {
                let mut logw = -rate + (n as f64) * rate.ln();
                for i in 1..=n {
                    logw -= (i as f64).ln();
                }
                logw.exp()
            }
        }
    }

    /// Ratio `mass(n+1)/mass(n)`.
    fn ratio(&self, n: u32) -> f64 {
        match self {
            Mixing::NegBin { t, xi } => xi * (n as f64 + t) / (n as f64 + 1.0),
            Mixing::Poisson { rate } => rate / (n as f64 + 1.0),
        }
    }
}

/// Rigorous bound on `C * sum_{n > n0} n^{deg} mass(n)`: terms are summed
/// until the term ratio drops below 1, then a geometric majorant closes the
/// tail. Returns infinity if the ratio never contracts within the scan.
pub fn tail_bound(c: f64, deg: i32, n0: u32, mix: Mixing) -> f64 {
    let term = |n: u32| c * (n as f64).powi(deg) * mix.level_mass(n);
    let mut total = 0.0;
    let mut n = n0 + 1;
    for _ in 0..100_000 {
        let r = mix.ratio(n) * ((n as f64 + 1.0) / n as f64).powi(deg);
        if r < 0.9 {
            return total + term(n) / (1.0 - r);
        }
        total += term(n);
        n += 1;
    }
    f64::INFINITY
}

/// Float tables over a (possibly deep) graph for truncated inner products.
/// Masses are accumulated along edges by ratio, so nothing overflows even
/// when the exact numerators would.
pub struct DeepMixed {
    pub g: BranchingGraph,
    pub m: crate::multiplicity::MultiplicityFn,
    pub mixing: Mixing,
    dim: Vec<f64>,
    mass: Vec<f64>,
    kapf: Vec<Vec<f64>>,
    pstar_cache: std::cell::RefCell<HashMap<Vertex, std::rc::Rc<Vec<f64>>>>,
}

impl DeepMixed {
    /// Negative-binomial mixture of the coherent system attached to `spec`,
    /// with the same degenerate-box restriction as the exact build.
    pub fn negbin(spec: &KerovSpec, xi: f64, depth: u32, budget: usize) -> Result<Self> {
        let t = spec.t_closed_form().to_f64();
        if t <= 0.0 {
            return Err(KerovError::BadT { t: t.to_string() });
        }
        let is_zero = |bx: &crate::graph::PosetBox| -> bool {
            match spec.q_squared(bx) {
                Ok(v) => v.as_rat().map(|r| num::Zero::is_zero(&r)).unwrap_or(false),
                Err(_) => false,
            }
        };
        let g = BranchingGraph::build_restricted(spec.family(), depth, budget, &|bx| !is_zero(bx))?;
        let m = spec.multiplicity();
        let qf = |g: &BranchingGraph, e: &crate::graph::Edge| -> Result<f64> {
            Ok(match spec {
                KerovSpec::Trees => 2.0,
                _ => spec.q_squared(&g.boxes[e.box_id as usize])?.to_f64(),
            })
        };
        Self::build(g, m, Mixing::NegBin { t, xi }, (1.0 - xi).powf(t), move |g, e| qf(g, e).map(|q| xi * q))
    }

    /// Poissonized Plancherel mixture on a Heisenberg graph.
    pub fn plancherel(
        family: crate::graph::Family,
        m: crate::multiplicity::MultiplicityFn,
        gamma: f64,
        r: f64,
        depth: u32,
        budget: usize,
    ) -> Result<Self> {
        let g = BranchingGraph::build_with_budget(family, depth, budget)?;
        Self::build(g, m, Mixing::Poisson { rate: gamma * r }, (-gamma * r).exp(), move |_, _| Ok(gamma))
    }

    fn build(
        g: BranchingGraph,
        m: crate::multiplicity::MultiplicityFn,
        mixing: Mixing,
        root_mass: f64,
        edge_factor: impl Fn(&BranchingGraph, &crate::graph::Edge) -> Result<f64>,
    ) -> Result<Self> {
        let mut kapf: Vec<Vec<f64>> = Vec::with_capacity(g.verts.len());
        let mut factor: Vec<Vec<f64>> = Vec::with_capacity(g.verts.len());
        for v in 0..g.verts.len() as VertexId {
            let mut krow = Vec::new();
            let mut frow = Vec::new();
            for e in &g.up[v as usize] {
                krow.push(m.kappa_squared(&g, v, e)?.to_f64().sqrt());
                frow.push(edge_factor(&g, e)?);
            }
            kapf.push(krow);
            factor.push(frow);
        }
        let mut dim = vec![0.0; g.verts.len()];
        dim[0] = 1.0;
        for lvl in 0..g.levels.len() - 1 {
            for &v in &g.levels[lvl] {
                for (idx, e) in g.up[v as usize].iter().enumerate() {
                    dim[e.to as usize] += dim[v as usize] * kapf[v as usize][idx];
                }
            }
        }
        // mass ratio along an edge: factor * (dim nu / ((n+1) dim lam))^2
        let mut mass = vec![0.0; g.verts.len()];
        mass[0] = root_mass;
        for lvl in 0..g.levels.len() - 1 {
            let n1 = (lvl + 1) as f64;
            for &v in &g.levels[lvl] {
                for (idx, e) in g.up[v as usize].iter().enumerate() {
                    if mass[e.to as usize] != 0.0 {
                        continue;
                    }
                    let dr = dim[e.to as usize] / (n1 * dim[v as usize]);
                    mass[e.to as usize] = mass[v as usize] * factor[v as usize][idx] * dr * dr;
                }
            }
        }
        Ok(DeepMixed { g, m, mixing, dim, mass, kapf, pstar_cache: Default::default() })
    }

    pub fn depth(&self) -> u32 {
        self.g.depth
    }

    pub fn mass(&self, v: VertexId) -> f64 {
        self.mass[v as usize]
    }

    /// Value table of `P*_mu` over the deep graph; `mu` given by canonical
    /// encoding so supports can be carried over from a shallow exact build.
    pub fn pstar_table(&self, mu: &Vertex) -> Result<std::rc::Rc<Vec<f64>>> {
        if let Some(t) = self.pstar_cache.borrow().get(mu) {
            return Ok(std::rc::Rc::clone(t));
        }
        let mid = self.g.id_of(mu).ok_or(KerovError::NotInGraph)?;
        let mlvl = self.g.level(mid);
        let mut rel = vec![0.0; self.g.verts.len()];
        rel[mid as usize] = 1.0;
        for lvl in mlvl as usize..self.g.levels.len() - 1 {
            for &v in &self.g.levels[lvl] {
                if rel[v as usize] == 0.0 {
                    continue;
                }
                for (idx, e) in self.g.up[v as usize].iter().enumerate() {
                    rel[e.to as usize] += rel[v as usize] * self.kapf[v as usize][idx];
                }
            }
        }
        let mut out = vec![0.0; self.g.verts.len()];
        for v in 0..self.g.verts.len() as VertexId {
            let n = self.g.level(v);
            if n < mlvl || rel[v as usize] == 0.0 {
                continue;
            }
            let mut fall = 1.0;
            for i in 0..mlvl {
                fall *= (n - i) as f64;
            }
            out[v as usize] = fall * rel[v as usize] / self.dim[v as usize];
        }
        let rc = std::rc::Rc::new(out);
        self.pstar_cache.borrow_mut().insert(mu.clone(), std::rc::Rc::clone(&rc));
        Ok(rc)
    }
}

/// Truncated inner product with a certified tail bound.
#[derive(Clone, Debug)]
pub struct InnerProduct {
    pub value: f64,
    pub bound: f64,
    pub truncation: u32,
}

/// `(f, h)_{M_xi}` evaluated on the deep float tables; the truncation level
/// is chosen from the polynomial growth bound `|f(lam)| <= C_f |lam|^{deg f}`
/// so that the discarded tail is at most `eps`. The coefficient supports
/// live on the shallow exact graph and are carried over by encoding.
pub fn inner_product_via(
    wg: &WeightedGraph,
    deep: &DeepMixed,
    f: &AVector,
    h: &AVector,
    eps: f64,
) -> Result<InnerProduct> {
    let deg = (f.degree(wg) + h.degree(wg)) as i32;
    let c = f.abs_coeff_sum() * h.abs_coeff_sum();
    let mut n0 = None;
    for cand in 0..=deep.depth() {
        if tail_bound(c, deg, cand, deep.mixing) <= eps {
            n0 = Some(cand);
            break;
        }
    }
    let n0 = match n0 {
        Some(v) => v,
        None => {
            let mut needed = deep.depth() + 1;
            while tail_bound(c, deg, needed, deep.mixing) > eps && needed < 100_000 {
                needed += 1;
            }
            return Err(KerovError::DepthInsufficient { eps, needed, depth: deep.depth() });
        }
    };
    let table = |av: &AVector| -> Result<Vec<(std::rc::Rc<Vec<f64>>, f64)>> {
        av.coeffs
            .iter()
            .map(|(&mu, cmu)| Ok((deep.pstar_table(wg.g.vertex(mu))?, cmu.to_f64())))
            .collect()
    };
    let tf = table(f)?;
    let th = table(h)?;
    let mut value = 0.0;
    for lvl in 0..=n0 as usize {
        for &v in &deep.g.levels[lvl] {
            let fv: f64 = tf.iter().map(|(t, c)| c * t[v as usize]).sum();
            let hv: f64 = th.iter().map(|(t, c)| c * t[v as usize]).sum();
            value += fv * hv * deep.mass(v);
        }
    }
    Ok(InnerProduct { value, bound: tail_bound(c, deg, n0, deep.mixing), truncation: n0 })
}

pub fn inner_product_mxi(
    k: &KerovData,
    deep: &DeepMixed,
    f: &AVector,
    h: &AVector,
    eps: f64,
) -> Result<InnerProduct> {
    inner_product_via(&k.wg, deep, f, h, eps)
}

#[derive(Clone, Debug)]
pub struct OrthogonalityReport {
    pub value: f64,
    pub expected: f64,
    pub bound: f64,
    pub truncation: u32,
    pub ok: bool,
}

/// `(M_lam, M_mu)_{M_xi} = delta * xi^{|lam|} (1-xi)^{-2|lam|} prod q^2`
/// within the certified tolerance.
pub fn check_orthogonality(
    k: &KerovData,
    deep: &DeepMixed,
    xi: &Scalar,
    lam: VertexId,
    mu: VertexId,
    eps: f64,
) -> Result<OrthogonalityReport> {
    let flam = meixner_fn(k, xi, lam)?;
    let fmu = meixner_fn(k, xi, mu)?;
    let ip = inner_product_mxi(k, deep, &flam, &fmu, eps)?;
    let expected = if lam == mu {
        let n = k.graph().level(lam) as i32;
        let xif = xi.to_f64();
        xif.powi(n) / (1.0 - xif).powi(2 * n) * k.prod_qsq(lam).to_f64()
    } else {
        0.0
    };
    // the certified claim: |truncated - true| <= bound <= eps and the
    // theorem gives true == expected; allow only float-summation slack on top
    let scale = expected.abs().max(1.0);
    let ok = (ip.value - expected).abs() <= eps + 1e-9 * scale;
    Ok(OrthogonalityReport { value: ip.value, expected, bound: ip.bound, truncation: ip.truncation, ok })
}

/// Autoduality: with `M_lam = pref(lam) M'_lam`,
/// `pref(lam) = (-1)^{|lam|} (xi/(1-xi))^{|lam|} (dim lam / |lam|!) prod q^2`,
/// one has `M'_lam(rho) = M'_rho(lam)` exactly.
pub fn check_autoduality(k: &KerovData, xi: &Scalar, lam: VertexId, rho: VertexId) -> Result<IdentityCheck> {
    let pref = |v: VertexId| -> Scalar {
        let n = k.graph().level(v);
        let sign = if n % 2 == 0 { Scalar::one() } else { -Scalar::one() };
        sign * (xi.clone() / (Scalar::one() - xi.clone())).pow_i(n as i32)
            * (k.wg.dim(v).clone() / factorial(n))
            * k.prod_qsq(v).clone()
    };
    let mlam = meixner_fn(k, xi, lam)?;
    let mrho = meixner_fn(k, xi, rho)?;
    let lhs = mlam.evaluate(&k.wg, rho) / pref(lam);
    let rhs = mrho.evaluate(&k.wg, lam) / pref(rho);
    if lhs.approx_eq(&rhs, 1e-12) {
        Ok(IdentityCheck::Ok)
    } else {
        Ok(IdentityCheck::Failure { what: "autoduality".into(), lhs, rhs })
    }
}

/// Moment functional `phi(f) = <f, M_xi>` on the coefficient space, exactly:
/// `phi(P*_lam) = (xi/(1-xi))^{|lam|} (prod q^2) dim(lam)/|lam|!`.
pub fn moment_functional(k: &KerovData, xi: &Scalar, f: &AVector) -> Result<Scalar> {
    check_positive_t(k)?;
    check_xi(xi)?;
    let mut s = Scalar::zero();
    for (&mu, c) in &f.coeffs {
        let n = k.graph().level(mu);
        let phi = (xi.clone() / (Scalar::one() - xi.clone())).pow_i(n as i32)
            * k.prod_qsq(mu).clone()
            * k.wg.dim(mu).clone()
            / factorial(n);
        s = s + c.clone() * phi;
    }
    Ok(s)
}

/// Charlier-type eigenfunction on a Heisenberg graph:
/// `C_lam = sum_{mu <= lam} (-gamma r)^{|lam|-|mu|} dim(mu,lam)/(|lam|-|mu|)! P*_mu`.
pub fn charlier_fn(wg: &WeightedGraph, gamma: &Scalar, lam: VertexId) -> Result<AVector> {
    let r = heisenberg_constant(wg)?;
    let g = &wg.g;
    let n = g.level(lam);
    let gr = -(gamma.clone() * r);
    let mut out = AVector::zero();
    for lvl in 0..=n {
        for &mu in &g.levels[lvl as usize] {
            let rel = wg.rel_dim(mu, lam);
            if rel.is_zero() {
                continue;
            }
            out.add_term(mu, gr.pow_i((n - lvl) as i32) * rel / factorial(n - lvl));
        }
    }
    Ok(out)
}

/// `A^Poisson P*_mu = -|mu| P*_mu + gamma r sum_kappa kappa(kap, mu) P*_kap`.
pub fn poisson_generator_apply(wg: &WeightedGraph, gamma: &Scalar, f: &AVector) -> Result<AVector> {
    let r = heisenberg_constant(wg)?;
    let gr = gamma.clone() * r;
    let g = &wg.g;
    let mut out = AVector::zero();
    for (&mu, c) in &f.coeffs {
        out.add_term(mu, -Scalar::from_int(g.level(mu) as i64) * c.clone());
        for e in g.cocovers(mu) {
            let kap = e.to;
            let idx = g.up[kap as usize].iter().position(|ue| ue.to == mu).expect("edge");
            out.add_term(kap, gr.clone() * wg.kap(kap, idx).clone() * c.clone());
        }
    }
    Ok(out)
}

/// Degenerate-parameter reduction: the Meixner-type eigenfunction of the
/// row-count-weighted partition lattice at `(alpha, tau) = (-beta, N beta)`
/// equals the symmetrized product of one-variable monic Meixner
/// polynomials over distinct index choices, scaled by `r_lam^{-1/2}`.
pub fn kingman_degenerate_check(
    beta: &Scalar,
    nrows: u32,
    xi: &Scalar,
    lam: &[u32],
    nu: &[u32],
    tol: f64,
) -> Result<IdentityCheck> {
    if lam.len() > nrows as usize || nu.len() > nrows as usize {
        return Err(KerovError::OutOfRange("partition exceeds the row bound".into()));
    }
    let depth = nu.iter().sum::<u32>().max(lam.iter().sum()) + 1;
    let spec = KerovSpec::Kingman {
        alpha: -beta.clone(),
        tau: Scalar::from_int(nrows as i64) * beta.clone(),
    };
    let k = KerovData::new(spec, depth, true)?;
    let lam_id = k.graph().id_of(&Vertex::Partition(lam.to_vec())).ok_or(KerovError::NotInGraph)?;
    let nu_id = k.graph().id_of(&Vertex::Partition(nu.to_vec())).ok_or(KerovError::NotInGraph)?;
    let lhs = meixner_fn(&k, xi, lam_id)?.evaluate(&k.wg, nu_id);

    // symmetrized Meixner product from the independent recurrence oracle
    let poly = crate::orthopoly::PolySpec::Meixner { t: beta.clone(), xi: xi.clone() };
    let mut padded: Vec<u32> = nu.to_vec();
    padded.resize(nrows as usize, 0);
    let ell = lam.len();
    let mut total = Scalar::zero();
    let mut idx: Vec<usize> = Vec::new();
    fn rec(
        poly: &crate::orthopoly::PolySpec,
        lam: &[u32],
        padded: &[u32],
        ell: usize,
        idx: &mut Vec<usize>,
        total: &mut Scalar,
    ) -> Result<()> {
        if idx.len() == ell {
            let mut prod = Scalar::one();
            for (j, &i) in idx.iter().enumerate() {
                prod = prod * poly.eval_monic(lam[j], &Scalar::from_int(padded[i] as i64))?;
            }
            *total = total.clone() + prod;
            return Ok(());
        }
        for i in 0..padded.len() {
            if !idx.contains(&i) {
                idx.push(i);
                rec(poly, lam, padded, ell, idx, total)?;
                idx.pop();
            }
        }
        Ok(())
    }
    rec(&poly, lam, &padded, ell, &mut idx, &mut total)?;
    // r_lam = prod over row lengths of (row count)!
    let mut rlam = Scalar::one();
    let mut seen = std::collections::BTreeMap::new();
    for &p in lam {
        *seen.entry(p).or_insert(0u32) += 1;
    }
    for (_, c) in seen {
        rlam = rlam * factorial(c);
    }
    let rhs = total / rlam.sqrt();
    if lhs.approx_eq(&rhs, tol) {
        Ok(IdentityCheck::Ok)
    } else {
        Ok(IdentityCheck::Failure { what: format!("lam={lam:?}, nu={nu:?}"), lhs, rhs })
    }
}

/// Exact agreement of the product-of-lattices measures with the direct
/// rim-hook-weight measures through the given level, plus the diagonal
/// commutator of the direct model.
pub fn rimhook_check(r: u16, z: &Scalar, zp: &Scalar, depth: u32) -> Result<IdentityCheck> {
    let k = KerovData::new(KerovSpec::RimHook { r, z: z.clone(), zp: zp.clone() }, depth, true)?;
    let direct = crate::rimhook::DirectRimHook::build(r as u32, z.clone(), zp.clone(), depth);
    if !direct.check_commutator(depth.saturating_sub(1))? {
        return Ok(IdentityCheck::Failure {
            what: "direct commutator not diagonal with expected eigenvalue".into(),
            lhs: Scalar::zero(),
            rhs: Scalar::zero(),
        });
    }
    if !k.t_param().approx_eq(&direct.t_param(), 1e-12) {
        return Ok(IdentityCheck::Failure {
            what: "t mismatch".into(),
            lhs: k.t_param().clone(),
            rhs: direct.t_param(),
        });
    }
    for n in 0..=depth {
        let prod_m = coherent_measure(&k, n)?;
        let dir_m = direct.measure(n)?;
        for (lam, mass) in dir_m {
            let q = crate::rimhook::r_quotient(&lam, r as u32);
            let v = k
                .graph()
                .id_of(&Vertex::PartitionTuple(q))
                .ok_or(KerovError::NotInGraph)?;
            let pm = prod_m.get(&k, v);
            if !mass.approx_eq(&pm, 1e-12) {
                return Ok(IdentityCheck::Failure {
                    what: format!("measure mismatch at {lam:?}, level {n}"),
                    lhs: mass,
                    rhs: pm,
                });
            }
        }
    }
    Ok(IdentityCheck::Ok)
}
