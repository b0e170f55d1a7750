//! Deterministic instance generators.
//!
//! Randomized generators draw from a `ChaCha8Rng` seeded with
//! `seed_from_u64(seed)`; complex Gaussian entries take the real part first,
//! then the imaginary part, column by column. The same seed therefore gives
//! the same matrices on every platform.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use nalgebra::linalg::QR;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion_frames::WeightedFamily;
use crate::numerics::{c64, Matrix};
use crate::subspaces::Subspace;

pub const DEFAULT_THETA0: f64 = PI / 8.0;

/// Finite truncation of the block example: `K` blocks with angles `θ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockExampleSpec {
    thetas: Vec<f64>,
}

impl BlockExampleSpec {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(Error::InvalidInput("need at least one block".into()));
        }
        if thetas[0].is_nan() || thetas[0] >= FRAC_PI_4 {
            return Err(Error::InvalidInput(format!(
                "theta_0 = {} must be below pi/4",
                thetas[0]
            )));
        }
        for (k, &t) in thetas.iter().enumerate() {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::InvalidInput(format!(
                    "theta_{k} = {t} must be positive"
                )));
            }
            if k > 0 && t > thetas[k - 1] {
                return Err(Error::InvalidInput(format!(
                    "theta must be nonincreasing, theta_{k} = {t} > theta_{} = {}",
                    k - 1,
                    thetas[k - 1]
                )));
            }
        }
        Ok(Self { thetas })
    }

    /// `θ_k = θ_0 / 2^k` for `k = 0..blocks`.
    pub fn geometric(blocks: usize, theta0: f64) -> Result<Self> {
        Self::new((0..blocks).map(|k| theta0 / 2f64.powi(k as i32)).collect())
    }

    pub fn num_blocks(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// `3K + 1`; block `k` lives on the 0-based coordinates `3k, 3k+1, 3k+2`.
    pub fn ambient_dim(&self) -> usize {
        3 * self.num_blocks() + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockExample {
    pub family: WeightedFamily,
    /// Orthogonal projector onto the coordinates `≡ 1, 2 (mod 3)` (1-based).
    pub operator: Matrix,
}

fn two_plane(n: usize, offset: usize, second: [f64; 2]) -> Subspace {
    let mut basis = Matrix::zeros(n, 2);
    basis[(offset, 0)] = c64(1.0, 0.0);
    basis[(offset + 1, 1)] = c64(second[0], 0.0);
    basis[(offset + 2, 1)] = c64(second[1], 0.0);
    Subspace::from_orthonormal_unchecked(basis)
}

/// `E_k = span{e_{3k+1}, sin θ_k e_{3k+2} + cos θ_k e_{3k+3}}`.
pub fn block_e(n: usize, k: usize, theta: f64) -> Subspace {
    two_plane(n, 3 * k, [theta.sin(), theta.cos()])
}

/// `F_k = span{e_{3k+1}, (e_{3k+2} + e_{3k+3})/√2}`.
pub fn block_f(n: usize, k: usize) -> Subspace {
    two_plane(n, 3 * k, [FRAC_1_SQRT_2, FRAC_1_SQRT_2])
}

/// Family `W_{2k+1} = E_k`, `W_{2k+2} = F_k` with unit weights, and the
/// projector `T` onto the closed span of `e_{3k+1}, e_{3k+2}`.
pub fn block_example(spec: &BlockExampleSpec) -> BlockExample {
    let n = spec.ambient_dim();
    let mut family = WeightedFamily::new(n);
    for (k, &theta) in spec.thetas().iter().enumerate() {
        family.push(block_e(n, k, theta), 1.0).expect("valid block");
        family.push(block_f(n, k), 1.0).expect("valid block");
    }
    let operator = Matrix::from_fn(n, n, |i, j| {
        if i == j && (i + 1) % 3 != 0 {
            c64(1.0, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    BlockExample { family, operator }
}

/// A single block `{E, F}` in its own 3-dimensional space.
pub fn single_block_family(theta: f64) -> WeightedFamily {
    let mut family = WeightedFamily::new(3);
    family.push(block_e(3, 0, theta), 1.0).expect("valid block");
    family.push(block_f(3, 0), 1.0).expect("valid block");
    family
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix of independent standard complex Gaussians `(x + iy)/√2`.
pub fn gaussian_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            m[(i, j)] = c64(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2);
        }
    }
    m
}

fn orthonormal_columns(rows: usize, cols: usize, rng: &mut impl Rng) -> Matrix {
    if cols == 0 {
        return Matrix::zeros(rows, 0);
    }
    QR::new(gaussian_matrix(rows, cols, rng)).q()
}

pub fn random_unitary(n: usize, rng: &mut impl Rng) -> Matrix {
    orthonormal_columns(n, n, rng)
}

pub fn random_subspace_with(
    ambient_dim: usize,
    dim: usize,
    rng: &mut impl Rng,
) -> Result<Subspace> {
    if dim > ambient_dim {
        return Err(Error::InvalidInput(format!(
            "subspace dimension {dim} exceeds ambient dimension {ambient_dim}"
        )));
    }
    Ok(Subspace::from_orthonormal_unchecked(orthonormal_columns(
        ambient_dim,
        dim,
        rng,
    )))
}

/// Haar-distributed `dim`-dimensional subspace.
pub fn random_subspace(ambient_dim: usize, dim: usize, seed: u64) -> Result<Subspace> {
    random_subspace_with(ambient_dim, dim, &mut rng(seed))
}

/// Random subspace of `within` of the given dimension.
pub fn random_subspace_inside(
    within: &Subspace,
    dim: usize,
    rng: &mut impl Rng,
) -> Result<Subspace> {
    if dim > within.dim() {
        return Err(Error::InvalidInput(format!(
            "cannot pick a {dim}-dimensional subspace of a {}-dimensional one",
            within.dim()
        )));
    }
    let coords = orthonormal_columns(within.dim(), dim, rng);
    Ok(Subspace::from_orthonormal_unchecked(
        within.basis() * coords,
    ))
}

/// Hermitian PSD matrix together with its exact kernel.
#[derive(Debug, Clone)]
pub struct PsdInstance {
    pub matrix: Matrix,
    pub kernel: Subspace,
    pub eigenvalues: Vec<f64>,
}

pub fn random_psd_instance(
    ambient_dim: usize,
    null_dim: usize,
    spectrum_range: (f64, f64),
    rng: &mut impl Rng,
) -> Result<PsdInstance> {
    let (lo, hi) = spectrum_range;
    if null_dim >= ambient_dim {
        return Err(Error::InvalidInput(format!(
            "null dimension {null_dim} must be below ambient dimension {ambient_dim}"
        )));
    }
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "spectrum range ({lo}, {hi}) must satisfy 0 < lo <= hi"
        )));
    }
    let u = random_unitary(ambient_dim, rng);
    let eigenvalues: Vec<f64> = (0..ambient_dim)
        .map(|i| {
            if i < null_dim {
                0.0
            } else if lo == hi {
                lo
            } else {
                rng.gen_range(lo..=hi)
            }
        })
        .collect();
    let d = Matrix::from_fn(ambient_dim, ambient_dim, |i, j| {
        if i == j {
            c64(eigenvalues[i], 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    let a = &u * d * u.adjoint();
    let matrix = (&a + a.adjoint()) * c64(0.5, 0.0);
    let kernel = Subspace::from_orthonormal_unchecked(u.columns(0, null_dim).into_owned());
    Ok(PsdInstance {
        matrix,
        kernel,
        eigenvalues,
    })
}

/// Hermitian PSD matrix with exactly `null_dim` zero eigenvalues and the
/// rest in `spectrum_range`.
pub fn random_psd_with_nullspace(
    ambient_dim: usize,
    null_dim: usize,
    spectrum_range: (f64, f64),
    seed: u64,
) -> Result<Matrix> {
    Ok(random_psd_instance(ambient_dim, null_dim, spectrum_range, &mut rng(seed))?.matrix)
}

/// `rows x cols` matrix of rank `rank` with singular values in `[lo, hi]`.
pub fn random_operator_with_rank(
    rows: usize,
    cols: usize,
    rank: usize,
    spectrum_range: (f64, f64),
    rng: &mut impl Rng,
) -> Result<Matrix> {
    let (lo, hi) = spectrum_range;
    if rank > rows.min(cols) {
        return Err(Error::InvalidInput(format!(
            "rank {rank} exceeds min({rows}, {cols})"
        )));
    }
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "spectrum range ({lo}, {hi}) must satisfy 0 < lo <= hi"
        )));
    }
    let u = orthonormal_columns(rows, rank, rng);
    let v = orthonormal_columns(cols, rank, rng);
    let s = Matrix::from_fn(rank, rank, |i, j| {
        if i == j {
            c64(if lo == hi { lo } else { rng.gen_range(lo..=hi) }, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    Ok(u * s * v.adjoint())
}

/// Parameters for [`random_family`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub ambient_dim: usize,
    /// Dimension of each subspace; its length is the family size.
    pub dims: Vec<usize>,
    pub weights_range: (f64, f64),
    /// Draw mutually orthogonal subspaces from one random unitary.
    pub orthonormal: bool,
}

pub fn random_family_with(spec: &FamilySpec, rng: &mut impl Rng) -> Result<WeightedFamily> {
    let n = spec.ambient_dim;
    let (lo, hi) = spec.weights_range;
    if spec.dims.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "weights range ({lo}, {hi}) must satisfy 0 < lo <= hi"
        )));
    }
    if let Some(&d) = spec.dims.iter().find(|&&d| d > n) {
        return Err(Error::InvalidInput(format!(
            "subspace dimension {d} exceeds ambient dimension {n}"
        )));
    }
    let total: usize = spec.dims.iter().sum();
    if spec.orthonormal && total > n {
        return Err(Error::InvalidInput(format!(
            "orthonormal family needs sum of dims {total} <= {n}"
        )));
    }
    let shared = spec.orthonormal.then(|| random_unitary(n, rng));
    let mut family = WeightedFamily::new(n);
    let mut offset = 0;
    for &d in &spec.dims {
        let subspace = match &shared {
            Some(u) => {
                let s = Subspace::from_orthonormal_unchecked(u.columns(offset, d).into_owned());
                offset += d;
                s
            }
            None => random_subspace_with(n, d, rng)?,
        };
        let w = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
        family.push(subspace, w)?;
    }
    Ok(family)
}

pub fn random_family(spec: &FamilySpec, seed: u64) -> Result<WeightedFamily> {
    random_family_with(spec, &mut rng(seed))
}
