//! The Aomoto complex: the Orlik-Solomon algebra with differential `w ∧ -`
//! for `w = sum_i a_i e_i`.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::arrangement::{euler, OSAlgebra, OSElement};
use crate::linalg::{self, QMatrix};
use crate::padic::{self, Valuation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AomotoError {
    #[error("expected {expected} weights, got {got}")]
    WeightCount { expected: usize, got: usize },
}

#[derive(Debug, Clone)]
pub struct AomotoComplex {
    os: OSAlgebra,
    weights: Vec<BigRational>,
    /// `matrices[k]` maps degree `k` to degree `k + 1`; column `j` is the
    /// image of the `j`-th basis element
    matrices: Vec<QMatrix>,
}

impl AomotoComplex {
    pub fn build(os: &OSAlgebra, weights: &[BigRational]) -> Result<Self, AomotoError> {
        let n = os.arrangement().len();
        if weights.len() != n {
            return Err(AomotoError::WeightCount { expected: n, got: weights.len() });
        }
        let mut omega = OSElement::zero(1);
        for (i, a) in weights.iter().enumerate() {
            omega = omega.add(&OSElement::tuple(&[i]).scale(a));
        }
        let top = os.top_degree();
        let matrices = (0..top)
            .map(|k| {
                let cols: Vec<Vec<BigRational>> =
                    (0..os.dim(k)).map(|j| os.coordinates(&omega.wedge(&os.basis_element(k, j)))).collect();
                // transpose into rows of the target degree
                (0..os.dim(k + 1)).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
            })
            .collect();
        Ok(Self { os: os.clone(), weights: weights.to_vec(), matrices })
    }

    pub fn os(&self) -> &OSAlgebra {
        &self.os
    }

    pub fn weights(&self) -> &[BigRational] {
        &self.weights
    }

    pub fn matrix(&self, k: usize) -> Option<&QMatrix> {
        self.matrices.get(k)
    }

    fn rank(&self, k: usize) -> usize {
        self.matrices.get(k).map_or(0, |m| linalg::rank(m))
    }

    /// `dim ker - dim im` in each degree.
    pub fn cohomology_dims(&self) -> Vec<usize> {
        (0..=self.os.top_degree())
            .map(|k| {
                let below = if k == 0 { 0 } else { self.rank(k - 1) };
                self.os.dim(k) - self.rank(k) - below
            })
            .collect()
    }

    /// Every composite of consecutive differentials vanishes.
    pub fn squares_to_zero(&self) -> bool {
        self.matrices.windows(2).all(|w| {
            let (a, b) = (&w[0], &w[1]);
            if a.is_empty() || b.is_empty() || a[0].is_empty() {
                return true;
            }
            linalg::mat_mul(b, a).iter().all(|r| r.iter().all(Zero::is_zero))
        })
    }

    pub fn report(&self, p: Option<u64>) -> AomotoReport {
        let mut dims = self.cohomology_dims();
        dims.truncate(self.os.dims().len());
        AomotoReport {
            dims: dims.clone(),
            euler: euler(&dims),
            os_dims: self.os.dims(),
            weights: self.weights.iter().map(ToString::to_string).collect(),
            valuations: p.map(|p| {
                self.weights
                    .iter()
                    .map(|a| match padic::val_p(a, p) {
                        Valuation::Finite(v) => Some(v),
                        Valuation::Infinite => None,
                    })
                    .collect()
            }),
            squares_to_zero: self.squares_to_zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AomotoReport {
    pub dims: Vec<usize>,
    pub euler: i64,
    pub os_dims: Vec<usize>,
    pub weights: Vec<String>,
    /// p-adic valuations of the weights, `null` for a zero weight
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuations: Option<Vec<Option<i64>>>,
    pub squares_to_zero: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{fixture, points_on_line};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn zero_weights_give_os_dims() {
        let os = OSAlgebra::build(&fixture("threelines").unwrap()).unwrap();
        let cx = AomotoComplex::build(&os, &[q(0), q(0), q(0)]).unwrap();
        assert_eq!(cx.cohomology_dims(), vec![1, 3, 2]);
    }

    #[test]
    fn single_hyperplane_is_scalar() {
        let os = OSAlgebra::build(&fixture("single").unwrap()).unwrap();
        let cx = AomotoComplex::build(&os, &[q(7)]).unwrap();
        assert_eq!(cx.matrix(0).unwrap(), &vec![vec![q(7)]]);
    }

    #[test]
    fn generic_weights() {
        let os = OSAlgebra::build(&fixture("threelines").unwrap()).unwrap();
        let cx = AomotoComplex::build(&os, &[q(1), q(1), q(-3)]).unwrap();
        assert!(cx.squares_to_zero());
        assert_eq!(cx.cohomology_dims(), vec![0, 0, 0]);
        let os = OSAlgebra::build(&points_on_line(4)).unwrap();
        let cx = AomotoComplex::build(&os, &[q(1), q(2), q(3), q(5)]).unwrap();
        assert_eq!(cx.cohomology_dims(), vec![0, 3]);
    }

    #[test]
    fn wrong_weight_count() {
        let os = OSAlgebra::build(&fixture("single").unwrap()).unwrap();
        assert!(AomotoComplex::build(&os, &[]).is_err());
    }
}
