//! Exact linear algebra over `Q`, `F_p` and the discrete valuation ring `Z_(p)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::padic::{self, PadicError};

pub type QMatrix = Vec<Vec<BigRational>>;

/// Reduced row echelon form over `Q`, eliminating columns in the given order.
/// Returns the nonzero rows and the pivot column of each row.
pub fn rref_with_order(rows: &[Vec<BigRational>], order: &[usize]) -> (QMatrix, Vec<usize>) {
    let mut m: QMatrix = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for &col in order {
        if top == m.len() {
            break;
        }
        let Some(found) = (top..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(top, found);
        let inv = m[top][col].recip();
        for x in m[top].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[top].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == top || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &factor * y;
                }
            }
        }
        pivots.push(col);
        top += 1;
    }
    m.truncate(top);
    (m, pivots)
}

pub fn rref(rows: &[Vec<BigRational>]) -> (QMatrix, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let order: Vec<usize> = (0..ncols).collect();
    rref_with_order(rows, &order)
}

pub fn rank(rows: &[Vec<BigRational>]) -> usize {
    rref(rows).1.len()
}

/// Rank of an integer matrix over `F_p`.
pub fn rank_mod_p(rows: &[Vec<BigInt>], p: u64) -> usize {
    let pm = BigInt::from(p);
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let v = ((x % &pm) + &pm) % &pm;
                    i128::try_from(v).expect("residue fits")
                })
                .collect()
        })
        .collect();
    let p = p as i128;
    let ncols = m.first().map_or(0, Vec::len);
    let mut top = 0;
    for col in 0..ncols {
        let Some(found) = (top..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(top, found);
        let inv = inverse_mod(m[top][col], p);
        for x in m[top].iter_mut() {
            *x = *x * inv % p;
        }
        let pivot_row = m[top].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != top && row[col] != 0 {
                let f = row[col];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (*x - f * y).rem_euclid(p);
                }
            }
        }
        top += 1;
    }
    top
}

fn inverse_mod(x: i128, p: i128) -> i128 {
    let (mut r0, mut r1) = (p, x.rem_euclid(p));
    let (mut s0, mut s1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(p)
}

/// Matrix product over `Q`.
pub fn mat_mul(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> QMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner)
                        .filter(|&k| !row[k].is_zero() && !b[k][j].is_zero())
                        .fold(BigRational::zero(), |acc, k| acc + &row[k] * &b[k][j])
                })
                .collect()
        })
        .collect()
}

/// A full-rank-or-not `Z_(p)`-lattice in `Q^n` given by an echelon basis whose
/// pivots are exact powers of `p`.
#[derive(Debug, Clone)]
pub struct PLattice {
    p: u64,
    dim: usize,
    rows: Vec<(usize, u32, Vec<BigRational>)>,
}

impl PLattice {
    /// Hermite-style echelon form over the valuation ring: at each column the
    /// generator of least valuation becomes the pivot, scaled by a unit so that
    /// the pivot entry is exactly `p^v`.
    pub fn from_generators(p: u64, dim: usize, generators: &[Vec<BigRational>]) -> Result<Self, PadicError> {
        let mut work: Vec<Vec<BigRational>> = generators
            .iter()
            .filter(|g| g.iter().any(|x| !x.is_zero()))
            .cloned()
            .collect();
        let mut rows = Vec::new();
        for col in 0..dim {
            let best = work
                .iter()
                .enumerate()
                .filter_map(|(i, r)| padic::val_p(&r[col], p).finite().map(|v| (v, i)))
                .min();
            let Some((v, idx)) = best else { continue };
            if v < 0 {
                // only lattices inside Z_(p)^n are needed
                return Err(PadicError::NotIntegral(work[idx][col].to_string()));
            }
            let mut pivot = work.swap_remove(idx);
            let scale = padic::p_power(p, v) / &pivot[col];
            for x in pivot.iter_mut() {
                *x *= &scale;
            }
            for r in work.iter_mut() {
                if !r[col].is_zero() {
                    let f = r[col].clone() / &pivot[col];
                    for (x, y) in r.iter_mut().zip(&pivot) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
            }
            work.retain(|r| r.iter().any(|x| !x.is_zero()));
            rows.push((col, v as u32, pivot));
        }
        Ok(Self { p, dim, rows })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Pivot exponents `v` (pivot entry `p^v`) in column order.
    pub fn pivot_exponents(&self) -> Vec<(usize, u32)> {
        self.rows.iter().map(|(c, v, _)| (*c, *v)).collect()
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        let mut x = x.to_vec();
        for (col, v, row) in &self.rows {
            if x[*col].is_zero() {
                continue;
            }
            let f = x[*col].clone() / padic::p_power(self.p, *v as i64);
            if !padic::is_p_integral(&f, self.p) {
                return false;
            }
            for (a, b) in x.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        x.iter().all(Zero::is_zero)
    }

    /// Canonical representative of `x` modulo the lattice: each pivot
    /// coordinate is reduced into `[0, p^v)`. `x` must be p-integral.
    pub fn reduce(&self, x: &[BigRational]) -> Result<Vec<BigRational>, PadicError> {
        let mut x = x.to_vec();
        for (col, v, row) in &self.rows {
            let r = padic::residue_rational(&x[*col], self.p, *v)?;
            let f = (x[*col].clone() - r) / padic::p_power(self.p, *v as i64);
            if f.is_zero() {
                continue;
            }
            for (a, b) in x.iter_mut().zip(row) {
                if !b.is_zero() {
                    *a -= &f * b;
                }
            }
        }
        Ok(x)
    }
}

pub fn identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn rank_over_q_and_fp() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)], vec![q(0), q(3)]];
        assert_eq!(rank(&m), 2);
        let z = vec![vec![BigInt::from(1), BigInt::from(2)], vec![BigInt::from(3), BigInt::from(1)]];
        // det = -5
        assert_eq!(rank_mod_p(&z, 5), 1);
        assert_eq!(rank_mod_p(&z, 3), 2);
    }

    #[test]
    fn lattice_membership_and_reduction() {
        // lattice spanned by (3, 1) and (0, 9) at p = 3
        let l = PLattice::from_generators(3, 2, &[vec![q(3), q(1)], vec![q(0), q(9)]]).unwrap();
        assert_eq!(l.rank(), 2);
        assert!(l.contains(&[q(6), q(2)]));
        assert!(!l.contains(&[q(1), q(0)]));
        let a = l.reduce(&[q(7), q(5)]).unwrap();
        let b = l.reduce(&[q(7) + q(3), q(5) + q(1)]).unwrap();
        assert_eq!(a, b);
    }
}
