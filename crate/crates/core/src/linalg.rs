//! Exact rational linear algebra: elimination, affine solution sets,
//! determinants and ranks. Matrices here are small (dozens of rows), so
//! plain fraction-reduced `BigRational` elimination is fine.

use crate::scalar::Rat;
use num::{One, Zero};

#[derive(Clone, Debug)]
pub struct AffineFamily {
    /// Number of unknowns.
    pub n: usize,
    /// Indices of free unknowns.
    pub free: Vec<usize>,
    /// For every unknown, an affine expression over the free ones.
    pub exprs: Vec<LinExpr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinExpr {
    pub c0: Rat,
    /// Sparse coefficients indexed by position in `AffineFamily::free`.
    pub coeffs: Vec<(usize, Rat)>,
}

impl LinExpr {
    pub fn constant(c: Rat) -> Self {
        LinExpr { c0: c, coeffs: Vec::new() }
    }
    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.coeffs.iter().all(|(_, c)| c.is_zero())
    }
    pub fn eval(&self, params: &[Rat]) -> Rat {
        let mut v = self.c0.clone();
        for (i, c) in &self.coeffs {
            v += c * &params[*i];
        }
        v
    }
    /// Render as `c0 + c1*p1 + ...` in the tiny linear-expression grammar.
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        if !self.c0.is_zero() || self.coeffs.is_empty() {
            parts.push(format!("{}", self.c0));
        }
        for (i, c) in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            parts.push(format!("{}*p{}", c, i + 1));
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

pub enum SolveOutcome {
    Consistent(AffineFamily),
    /// Index of the first input row certifying inconsistency.
    Inconsistent { row: usize },
}

/// Solve `A x = b` over the rationals, reporting the full affine solution
/// set or the first row at which the system becomes inconsistent.
pub fn solve_affine(rows: &[(Vec<Rat>, Rat)], n: usize) -> SolveOutcome {
    // carry originating row ids into the elimination so the inconsistency
    // report points at an input equation
    let mut mat: Vec<(Vec<Rat>, Rat, usize)> =
        rows.iter().enumerate().map(|(i, (a, b))| (a.clone(), b.clone(), i)).collect();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n]; // col -> row in echelon
    let mut echelon: Vec<(Vec<Rat>, Rat, usize)> = Vec::new();

    for (mut a, mut b, rid) in mat.drain(..) {
        // reduce against existing pivots
        for (prow, (pa, pb, _)) in echelon.iter().enumerate() {
            let pc = echelon_pivot_col(pa);
            if let Some(col) = pc {
                if !a[col].is_zero() {
                    let f = a[col].clone() / pa[col].clone();
                    for j in 0..n {
                        let d = &f * &pa[j];
                        a[j] -= d;
                    }
                    b -= &f * pb;
                }
            }
            let _ = prow;
        }
        if let Some(col) = echelon_pivot_col(&a) {
            pivot_of_col[col] = Some(echelon.len());
            echelon.push((a, b, rid));
        } else if !b.is_zero() {
            return SolveOutcome::Inconsistent { row: rid };
        }
    }

    // back-substitute to reduced echelon form
    for i in (0..echelon.len()).rev() {
        let col = echelon_pivot_col(&echelon[i].0).unwrap();
        let (head, tail) = echelon.split_at_mut(i);
        let (pa, pb, _) = &tail[0];
        for (ha, hb, _) in head.iter_mut() {
            if !ha[col].is_zero() {
                let f = ha[col].clone() / pa[col].clone();
                for j in 0..pa.len() {
                    let d = &f * &pa[j];
                    ha[j] -= d;
                }
                *hb -= &f * pb;
            }
        }
    }

    let free: Vec<usize> = (0..n).filter(|c| pivot_of_col[*c].is_none()).collect();
    let free_pos = |c: usize| free.iter().position(|&f| f == c).unwrap();
    let mut exprs = Vec::with_capacity(n);
    for c in 0..n {
        match pivot_of_col[c] {
            None => exprs.push(LinExpr {
                c0: Rat::zero(),
                coeffs: vec![(free_pos(c), Rat::one())],
            }),
            Some(r) => {
                let (a, b, _) = &echelon[r];
                let piv = a[c].clone();
                let mut coeffs = Vec::new();
                for &fc in &free {
                    if !a[fc].is_zero() {
                        coeffs.push((free_pos(fc), -(a[fc].clone() / piv.clone())));
                    }
                }
                exprs.push(LinExpr { c0: b.clone() / piv, coeffs });
            }
        }
    }
    SolveOutcome::Consistent(AffineFamily { n, free, exprs })
}

fn echelon_pivot_col(a: &[Rat]) -> Option<usize> {
    a.iter().position(|x| !x.is_zero())
}

/// Determinant by Gaussian elimination.
pub fn det(mat: &[Vec<Rat>]) -> Rat {
    let n = mat.len();
    let mut m: Vec<Vec<Rat>> = mat.to_vec();
    let mut d = Rat::one();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => return Rat::zero(),
        };
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= &m[col][col].clone();
        let pv = m[col][col].clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone() / pv.clone();
            for c in col..n {
                let sub = &f * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    d
}

pub fn rank(mat: &[Vec<Rat>]) -> usize {
    if mat.is_empty() {
        return 0;
    }
    let ncols = mat[0].len();
    let mut m: Vec<Vec<Rat>> = mat.to_vec();
    let mut r = 0;
    for col in 0..ncols {
        let piv = (r..m.len()).find(|&i| !m[i][col].is_zero());
        let piv = match piv {
            Some(p) => p,
            None => continue,
        };
        m.swap(piv, r);
        let pv = m[r][col].clone();
        for i in r + 1..m.len() {
            if m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone() / pv.clone();
            for c in col..ncols {
                let sub = &f * &m[r][c];
                m[i][c] -= sub;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    #[test]
    fn affine_solution_set() {
        // x + y = 3, x - y = 1  => x = 2, y = 1
        let rows = vec![
            (vec![int(1), int(1)], int(3)),
            (vec![int(1), int(-1)], int(1)),
        ];
        match solve_affine(&rows, 2) {
            SolveOutcome::Consistent(f) => {
                assert!(f.free.is_empty());
                assert_eq!(f.exprs[0].c0, int(2));
                assert_eq!(f.exprs[1].c0, int(1));
            }
            _ => panic!("consistent"),
        }
    }

    #[test]
    fn underdetermined_and_inconsistent() {
        // x + y + z = 1 — two free unknowns
        let rows = vec![(vec![int(1), int(1), int(1)], int(1))];
        match solve_affine(&rows, 3) {
            SolveOutcome::Consistent(f) => {
                assert_eq!(f.free.len(), 2);
                let params = vec![rat(1, 2), rat(1, 3)];
                let vals: Vec<_> = f.exprs.iter().map(|e| e.eval(&params)).collect();
                assert_eq!(vals[0].clone() + vals[1].clone() + vals[2].clone(), int(1));
            }
            _ => panic!("consistent"),
        }
        let rows = vec![
            (vec![int(1), int(1)], int(1)),
            (vec![int(2), int(2)], int(3)),
        ];
        match solve_affine(&rows, 2) {
            SolveOutcome::Inconsistent { row } => assert_eq!(row, 1),
            _ => panic!("inconsistent"),
        }
    }

    #[test]
    fn det_and_rank() {
        let m = vec![vec![int(2), int(1)], vec![int(1), int(1)]];
        assert_eq!(det(&m), int(1));
        assert_eq!(rank(&m), 2);
        let s = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(det(&s), int(0));
        assert_eq!(rank(&s), 1);
    }
}
