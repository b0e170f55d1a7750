//! Weighted families of subspaces and their frame bounds.
//!
//! For a family `(W_i, w_i)` the synthesis operator maps the block space
//! `⊕ W_i` into the ambient space by `g ↦ Σ w_i g_i`. In coordinates it is
//! the block-column matrix `[w_1 Q_1 | w_2 Q_2 | ...]` where `Q_i` is the
//! orthonormal basis of `W_i`; the i-th column block is the canonical copy
//! `E_i` of `W_i`. The frame operator is `S = Σ w_i² P_{W_i}` and the optimal
//! bounds are its extreme eigenvalues on `span(∪ W_i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, c64, Matrix, Tolerance};
use crate::subspaces::Subspace;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSubspace {
    pub subspace: Subspace,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedFamily {
    ambient_dim: usize,
    items: Vec<WeightedSubspace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    FusionFrame,
    FusionFrameSequence,
    Degenerate,
}

/// Optimal frame bounds of a family on the span of its subspaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameAnalysis {
    pub lower: f64,
    pub upper: f64,
    pub span_dim: usize,
    pub ambient_dim: usize,
    pub classification: Classification,
}

impl WeightedFamily {
    pub fn new(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            items: Vec::new(),
        }
    }

    pub fn from_items(
        ambient_dim: usize,
        items: impl IntoIterator<Item = (Subspace, f64)>,
    ) -> Result<Self> {
        let mut family = Self::new(ambient_dim);
        for (s, w) in items {
            family.push(s, w)?;
        }
        Ok(family)
    }

    pub fn push(&mut self, subspace: Subspace, weight: f64) -> Result<()> {
        if subspace.ambient_dim() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                context: "WeightedFamily::push",
                expected: self.ambient_dim,
                actual: subspace.ambient_dim(),
            });
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::InvalidInput(format!(
                "weight {} at index {} must be positive and finite",
                weight,
                self.items.len()
            )));
        }
        self.items.push(WeightedSubspace { subspace, weight });
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[WeightedSubspace] {
        &self.items
    }

    pub fn weights(&self) -> Vec<f64> {
        self.items.iter().map(|it| it.weight).collect()
    }

    /// Same subspaces with every weight replaced.
    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.len() {
            return Err(Error::DimensionMismatch {
                context: "with_weights",
                expected: self.len(),
                actual: weights.len(),
            });
        }
        Self::from_items(
            self.ambient_dim,
            self.items
                .iter()
                .zip(weights)
                .map(|(it, &w)| (it.subspace.clone(), w)),
        )
    }

    /// Column ranges `(offset, len)` of each block `E_i` in the synthesis domain.
    pub fn block_ranges(&self) -> Vec<(usize, usize)> {
        let mut offset = 0;
        self.items
            .iter()
            .map(|it| {
                let r = (offset, it.subspace.dim());
                offset += it.subspace.dim();
                r
            })
            .collect()
    }

    /// Dimension of `⊕ W_i`.
    pub fn block_dim(&self) -> usize {
        self.items.iter().map(|it| it.subspace.dim()).sum()
    }

    /// Orthogonal projector onto the block `E_i` of `⊕ W_i`.
    pub fn block_projector(&self, index: usize) -> Matrix {
        let total = self.block_dim();
        let (offset, len) = self.block_ranges()[index];
        Matrix::from_fn(total, total, |i, j| {
            if i == j && i >= offset && i < offset + len {
                c64(1.0, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        })
    }

    pub fn synthesis_matrix(&self) -> Result<Matrix> {
        if self.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let mut out = Matrix::zeros(self.ambient_dim, self.block_dim());
        for (it, (offset, len)) in self.items.iter().zip(self.block_ranges()) {
            out.columns_mut(offset, len)
                .copy_from(&(it.subspace.basis() * c64(it.weight, 0.0)));
        }
        Ok(out)
    }

    pub fn analysis_matrix(&self) -> Result<Matrix> {
        Ok(self.synthesis_matrix()?.adjoint())
    }

    /// `S = Σ w_i² P_{W_i}`, summed in index order.
    pub fn frame_operator(&self) -> Result<Matrix> {
        if self.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let mut s = Matrix::zeros(self.ambient_dim, self.ambient_dim);
        for it in &self.items {
            s += it.subspace.projector() * c64(it.weight * it.weight, 0.0);
        }
        Ok(s)
    }

    /// Optimal bounds from the squared singular values of the synthesis
    /// matrix (the nonzero eigenvalues of `S`).
    pub fn frame_bounds(&self, tol: &Tolerance) -> Result<FrameAnalysis> {
        let synthesis = self.synthesis_matrix()?;
        if synthesis.ncols() == 0 {
            return Ok(FrameAnalysis {
                lower: 0.0,
                upper: 0.0,
                span_dim: 0,
                ambient_dim: self.ambient_dim,
                classification: Classification::Degenerate,
            });
        }
        let dec = numerics::svd(&synthesis)?;
        let span_dim = dec.rank(synthesis.nrows(), synthesis.ncols(), tol);
        let upper = dec.sigma_max().powi(2);
        let lower = if span_dim == 0 {
            0.0
        } else {
            dec.singular_values[span_dim - 1].powi(2)
        };
        let classification = if span_dim == 0 {
            Classification::Degenerate
        } else if span_dim == self.ambient_dim {
            Classification::FusionFrame
        } else {
            Classification::FusionFrameSequence
        };
        Ok(FrameAnalysis {
            lower,
            upper,
            span_dim,
            ambient_dim: self.ambient_dim,
            classification,
        })
    }

    /// Orthonormal basis of `span(∪ W_i)`.
    pub fn span(&self, tol: &Tolerance) -> Result<Subspace> {
        Subspace::from_generators(&self.synthesis_matrix()?, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::C64;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn span(n: usize, vecs: &[Vec<f64>]) -> Subspace {
        let cols = Matrix::from_fn(n, vecs.len(), |i, j| c64(vecs[j][i], 0.0));
        Subspace::from_generators(&cols, &tol()).unwrap()
    }

    fn coordinate_lines(n: usize) -> WeightedFamily {
        WeightedFamily::from_items(
            n,
            (0..n).map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                (span(n, &[v]), 1.0)
            }),
        )
        .unwrap()
    }

    #[test]
    fn synthesis_examples() {
        let f = WeightedFamily::from_items(3, [(Subspace::full(3), 1.0)]).unwrap();
        assert_eq!(f.synthesis_matrix().unwrap(), numerics::identity(3));
        let f = WeightedFamily::from_items(2, [(span(2, &[vec![1.0, 0.0]]), 2.0)]).unwrap();
        let t = f.synthesis_matrix().unwrap();
        assert_eq!(t.shape(), (2, 1));
        assert!((t[(0, 0)] - c64(2.0, 0.0)).norm() < 1e-15);
        assert!(t[(1, 0)].norm() < 1e-15);
        assert_eq!(f.analysis_matrix().unwrap(), t.adjoint());
    }

    #[test]
    fn empty_family_is_an_error() {
        let f = WeightedFamily::new(3);
        assert_eq!(f.synthesis_matrix().unwrap_err(), Error::EmptyFamily);
        assert_eq!(f.frame_bounds(&tol()).unwrap_err(), Error::EmptyFamily);
    }

    #[test]
    fn invalid_weights_rejected() {
        let mut f = WeightedFamily::new(2);
        assert!(f.push(Subspace::full(2), 0.0).is_err());
        assert!(f.push(Subspace::full(2), f64::NAN).is_err());
        assert!(f.push(Subspace::full(3), 1.0).is_err());
    }

    #[test]
    fn frame_operator_examples() {
        let s = coordinate_lines(4).frame_operator().unwrap();
        assert!((s - numerics::identity(4)).norm() < 1e-15);

        let w = span(3, &[vec![1.0, 1.0, 0.0]]);
        let f = WeightedFamily::from_items(3, [(w.clone(), 1.0), (w.clone(), 1.0)]).unwrap();
        let s = f.frame_operator().unwrap();
        assert!((s - w.projector() * c64(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn frame_operator_of_example_block() {
        // one block: E = span{e1, sin θ e2 + cos θ e3}, F = span{e1, (e2 + e3)/√2}
        let th = PI / 8.0;
        let e_k = span(3, &[vec![1.0, 0.0, 0.0], vec![0.0, th.sin(), th.cos()]]);
        let f_k = span(
            3,
            &[vec![1.0, 0.0, 0.0], vec![0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2]],
        );
        let fam = WeightedFamily::from_items(3, [(e_k, 1.0), (f_k, 1.0)]).unwrap();
        let eig = numerics::hermitian_eigen(&fam.frame_operator().unwrap()).unwrap();
        let r = (0.5 + th.cos() * th.sin()).sqrt();
        let want = [1.0 - r, 1.0 + r, 2.0];
        for (got, want) in eig.eigenvalues.iter().zip(want) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let fa = fam.frame_bounds(&tol()).unwrap();
        assert!((fa.lower - (1.0 - r)).abs() < 1e-12);
        assert!((fa.upper - 2.0).abs() < 1e-12);
        assert_eq!(fa.classification, Classification::FusionFrame);
    }

    #[test]
    fn frame_bounds_examples() {
        let fa = coordinate_lines(3).frame_bounds(&tol()).unwrap();
        assert!((fa.lower - 1.0).abs() < 1e-14 && (fa.upper - 1.0).abs() < 1e-14);
        assert_eq!(fa.classification, Classification::FusionFrame);

        let f = WeightedFamily::from_items(2, [(span(2, &[vec![1.0, 0.0]]), 1.0)]).unwrap();
        let fa = f.frame_bounds(&tol()).unwrap();
        assert_eq!((fa.lower, fa.upper, fa.span_dim), (1.0, 1.0, 1));
        assert_eq!(fa.classification, Classification::FusionFrameSequence);

        let f = WeightedFamily::from_items(2, [(Subspace::zero(2), 1.0)]).unwrap();
        let fa = f.frame_bounds(&tol()).unwrap();
        assert_eq!(fa.classification, Classification::Degenerate);
        assert_eq!((fa.lower, fa.upper), (0.0, 0.0));
    }

    #[test]
    fn synthesis_times_analysis_is_frame_operator() {
        let f = WeightedFamily::from_items(
            3,
            [
                (span(3, &[vec![1.0, 2.0, 0.0], vec![0.0, 1.0, -1.0]]), 0.7),
                (span(3, &[vec![0.3, 0.0, 1.0]]), 1.9),
            ],
        )
        .unwrap();
        let t = f.synthesis_matrix().unwrap();
        let s = f.frame_operator().unwrap();
        assert!((&t * t.adjoint() - &s).norm() < 1e-12 * s.norm());
    }

    #[test]
    fn block_projector_selects_block() {
        let f = WeightedFamily::from_items(
            3,
            [
                (Subspace::full(3), 1.0),
                (span(3, &[vec![1.0, 0.0, 0.0]]), 1.0),
            ],
        )
        .unwrap();
        assert_eq!(f.block_ranges(), vec![(0, 3), (3, 1)]);
        let p = f.block_projector(1);
        assert_eq!(p.shape(), (4, 4));
        assert_eq!(p[(3, 3)], c64(1.0, 0.0));
        assert_eq!(p.iter().filter(|z| **z != C64::default()).count(), 1);
    }
}
