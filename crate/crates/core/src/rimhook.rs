//! Rim-hook (border strip) moves on partitions via beta-numbers, the
//! direct weighted enumeration of r-decomposable diagrams, and the
//! r-quotient correspondence with the product-of-partition-lattices model.
//!
//! Beta-set convention: `b_i = lam_i - i` for `i = 1..len`, continued by
//! `-i` below; adding an r-rim-hook moves one beta value `b -> b + r`, and
//! the hook occupies diagonals `b+1, ..., b+r`, so its content sum is
//! `r b + r(r+1)/2`.

use crate::error::{KerovError, Result};
use crate::scalar::{factorial, pochhammer, Scalar};
use std::collections::BTreeMap;

/// Beta values `lam_i - i` for enough rows to cover all moves.
fn beta_set(lam: &[u32], want: usize, r: u32) -> Vec<i64> {
    // round the slot count up to a multiple of r so each beta runner holds
    // the same number of values as in the vacuum configuration
    let slots = want.div_ceil(r as usize) * r as usize;
    (0..slots)
        .map(|i| {
            let part = lam.get(i).copied().unwrap_or(0) as i64;
            part - (i as i64 + 1)
        })
        .collect()
}

fn partition_from_beta(mut betas: Vec<i64>) -> Vec<u32> {
    betas.sort_unstable_by(|a, b| b.cmp(a));
    let mut out = Vec::new();
    for (i, b) in betas.iter().enumerate() {
        let part = b + (i as i64 + 1);
        if part > 0 {
            out.push(part as u32);
        }
    }
    out
}

/// All partitions reachable by adding one `r`-rim-hook, with the beta value
/// moved (the hook has content sum `r b + r(r+1)/2`).
pub fn hook_additions(lam: &[u32], r: u32) -> Vec<(Vec<u32>, i64)> {
    let betas = beta_set(lam, lam.len() + r as usize + 2, r);
    let mut out = Vec::new();
    for (i, &b) in betas.iter().enumerate() {
        let target = b + r as i64;
        if betas.contains(&target) {
            continue;
        }
        let mut nb = betas.clone();
        nb[i] = target;
        out.push((partition_from_beta(nb), b));
    }
    out
}

/// The `r`-quotient: component partitions read off the beta runners.
/// Runner `s` (residue of `b` mod `r`) corresponds to component
/// `i = r - s` for `s >= 1` and `i = r` for `s = 0`; this matches the
/// content shift of the one-box moves under the hook correspondence.
pub fn r_quotient(lam: &[u32], r: u32) -> Vec<Vec<u32>> {
    let betas = beta_set(lam, lam.len() + r as usize + 2, r);
    let mut runners: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &b in &betas {
        let s = b.rem_euclid(r as i64);
        runners.entry(s).or_default().push((b - s) / r as i64);
    }
    let mut out = vec![Vec::new(); r as usize];
    for (s, mut ms) in runners {
        ms.sort_unstable_by(|a, b| b.cmp(a));
        let comp = if s == 0 { r as usize } else { (r as i64 - s) as usize };
        let mut parts = Vec::new();
        for (i, m) in ms.iter().enumerate() {
            let part = m + (i as i64 + 1);
            if part > 0 {
                parts.push(part as u32);
            }
        }
        out[comp - 1] = parts;
    }
    out
}

/// Is `lam` r-decomposable (empty r-core)?
pub fn is_r_decomposable(lam: &[u32], r: u32) -> bool {
    let total: u32 = lam.iter().sum();
    if total % r != 0 {
        return false;
    }
    let q = r_quotient(lam, r);
    let qsum: u32 = q.iter().map(|p| p.iter().sum::<u32>()).sum();
    qsum * r == total
}

/// Direct weighted model on r-decomposable diagrams: raising weight
/// `u(hook) = z + (content sum)/r^2` and lowering weight with `zp`.
pub struct DirectRimHook {
    pub r: u32,
    pub z: Scalar,
    pub zp: Scalar,
    /// Levels of r-decomposable diagrams (level n has n hooks, rn cells).
    pub levels: Vec<Vec<Vec<u32>>>,
    /// `A(lam) = sum over hook paths of prod u`, `B` with `zp`.
    pub a: Vec<BTreeMap<Vec<u32>, Scalar>>,
    pub b: Vec<BTreeMap<Vec<u32>, Scalar>>,
}

impl DirectRimHook {
    pub fn build(r: u32, z: Scalar, zp: Scalar, depth: u32) -> Self {
        let mut levels: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new()]];
        let mut a: Vec<BTreeMap<Vec<u32>, Scalar>> = vec![BTreeMap::from([(Vec::new(), Scalar::one())])];
        let mut b: Vec<BTreeMap<Vec<u32>, Scalar>> = vec![BTreeMap::from([(Vec::new(), Scalar::one())])];
        for n in 1..=depth {
            let mut na: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
            let mut nb: BTreeMap<Vec<u32>, Scalar> = BTreeMap::new();
            for lam in &levels[(n - 1) as usize] {
                for (nu, bval) in hook_additions(lam, r) {
                    let (u, d) = self_weights(r, &z, &zp, bval);
                    let ea = na.entry(nu.clone()).or_insert_with(Scalar::zero);
                    *ea = ea.clone() + a[(n - 1) as usize][lam].clone() * u;
                    let eb = nb.entry(nu).or_insert_with(Scalar::zero);
                    *eb = eb.clone() + b[(n - 1) as usize][lam].clone() * d;
                }
            }
            levels.push(na.keys().cloned().collect());
            a.push(na);
            b.push(nb);
        }
        DirectRimHook { r, z, zp, levels, a, b }
    }

    /// `M_n(lam) = A(lam) B(lam) / (n! (t)_n)` with
    /// `t = r z zp + (r^2 - 1)/(12 r)`.
    pub fn measure(&self, n: u32) -> Result<BTreeMap<Vec<u32>, Scalar>> {
        if n as usize >= self.levels.len() {
            return Err(KerovError::Truncated { level: n, depth: self.levels.len() as u32 - 1 });
        }
        let t = self.t_param();
        let zn = factorial(n) * pochhammer(&t, n);
        let mut out = BTreeMap::new();
        for lam in &self.levels[n as usize] {
            let m = self.a[n as usize][lam].clone() * self.b[n as usize][lam].clone() / zn.clone();
            out.insert(lam.clone(), m);
        }
        Ok(out)
    }

    pub fn t_param(&self) -> Scalar {
        let r = self.r as i64;
        Scalar::from_int(r) * self.z.clone() * self.zp.clone() + Scalar::ratio(r * r - 1, 12 * r)
    }

    /// Check that the commutator of the weighted lowering/raising operators
    /// acts diagonally with eigenvalue `2 n + t` at hook-level `n`.
    pub fn check_commutator(&self, max_level: u32) -> Result<bool> {
        let top = max_level.min(self.levels.len() as u32 - 2);
        for n in 0..=top {
            for lam in &self.levels[n as usize] {
                // diagonal: sum over covers u*d - sum over cocovers u*d
                let mut diag = Scalar::zero();
                for (_, bval) in hook_additions(lam, self.r) {
                    let (u, d) = self_weights(self.r, &self.z, &self.zp, bval);
                    diag = diag + u * d;
                }
                if n > 0 {
                    for mu in &self.levels[(n - 1) as usize] {
                        for (nu, bval) in hook_additions(mu, self.r) {
                            if &nu == lam {
                                let (u, d) = self_weights(self.r, &self.z, &self.zp, bval);
                                diag = diag - u * d;
                            }
                        }
                    }
                }
                let expect = Scalar::from_int(2 * n as i64) + self.t_param();
                if !diag.approx_eq(&expect, 1e-10) {
                    return Ok(false);
                }
                // off-diagonal coefficients vanish
                for lam2 in &self.levels[n as usize] {
                    if lam2 == lam {
                        continue;
                    }
                    let mut coeff = Scalar::zero();
                    for (nu, bval) in hook_additions(lam, self.r) {
                        for (nu2, bval2) in hook_additions(lam2, self.r) {
                            if nu == nu2 {
                                let (u, _) = self_weights(self.r, &self.z, &self.zp, bval);
                                let (_, d) = self_weights(self.r, &self.z, &self.zp, bval2);
                                coeff = coeff + u * d;
                            }
                        }
                    }
                    if n > 0 {
                        for mu in &self.levels[(n - 1) as usize] {
                            let mut to1 = None;
                            let mut to2 = None;
                            for (nu, bval) in hook_additions(mu, self.r) {
                                if &nu == lam {
                                    to1 = Some(bval);
                                }
                                if &nu == lam2 {
                                    to2 = Some(bval);
                                }
                            }
                            if let (Some(b1), Some(b2)) = (to1, to2) {
                                // subtract u(lam2/mu) d(lam/mu)
                                let (u2, _) = self_weights(self.r, &self.z, &self.zp, b2);
                                let (_, d1) = self_weights(self.r, &self.z, &self.zp, b1);
                                coeff = coeff - u2 * d1;
                            }
                        }
                    }
                    if !coeff.is_zero() && !coeff.approx_eq(&Scalar::zero(), 1e-12) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

fn self_weights(r: u32, z: &Scalar, zp: &Scalar, beta: i64) -> (Scalar, Scalar) {
    // content sum / r^2 = b/r + (r+1)/(2r)
    let shift = Scalar::ratio(beta, r as i64) + Scalar::ratio(r as i64 + 1, 2 * r as i64);
    (z.clone() + shift.clone(), zp.clone() + shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sc(n: i64, d: i64) -> Scalar {
        Scalar::ratio(n, d)
    }

    #[test]
    fn hook_additions_from_empty() {
        let hups = hook_additions(&[], 2);
        let shapes: Vec<Vec<u32>> = hups.iter().map(|(p, _)| p.clone()).collect();
        assert!(shapes.contains(&vec![2]));
        assert!(shapes.contains(&vec![1, 1]));
        assert_eq!(shapes.len(), 2);
        // content sums: (2) -> 1, (1,1) -> -1
        for (p, b) in hups {
            let cs = 2 * b + 3;
            if p == vec![2] {
                assert_eq!(cs, 1);
            } else {
                assert_eq!(cs, -1);
            }
        }
    }

    #[test]
    fn quotient_roundtrip_counts() {
        // 2-decomposable diagrams of size 2n correspond to pairs of
        // partitions with |a| + |b| = n
        let d = DirectRimHook::build(2, sc(2, 1), sc(3, 1), 4);
        let pairs = |n: u32| -> usize {
            let parts = |m: u32| crate::graph::BranchingGraph::build(crate::graph::Family::Young, m)
                .unwrap()
                .levels[m as usize]
                .len();
            (0..=n).map(|k| parts(k) * parts(n - k)).sum()
        };
        for n in 0..=4u32 {
            assert_eq!(d.levels[n as usize].len(), pairs(n), "level {n}");
            for lam in &d.levels[n as usize] {
                assert!(is_r_decomposable(lam, 2));
                let q = r_quotient(lam, 2);
                let total: u32 = q.iter().map(|p| p.iter().sum::<u32>()).sum();
                assert_eq!(total, n);
            }
        }
    }

    #[test]
    fn quotient_level_one_orientation() {
        // (2) carries content sum +1, so it must sit in component 1
        let q = r_quotient(&[2], 2);
        assert_eq!(q, vec![vec![1], vec![]]);
        let q = r_quotient(&[1, 1], 2);
        assert_eq!(q, vec![vec![], vec![1]]);
    }

    #[test]
    fn commutator_diagonal_small() {
        let d = DirectRimHook::build(2, sc(2, 1), sc(3, 1), 3);
        assert!(d.check_commutator(2).unwrap());
        // t at the initial vertex equals sum z_i z_i'
        let t = d.t_param();
        let z1 = sc(2, 1) + sc(1, 4);
        let z2 = sc(2, 1) - sc(1, 4);
        let zp1 = sc(3, 1) + sc(1, 4);
        let zp2 = sc(3, 1) - sc(1, 4);
        assert_eq!(t, z1 * zp1 + z2 * zp2);
    }
}
