//! Seeded samplers for random states and unitaries.
//!
//! Every sampler draws from an [`RngStream`], a ChaCha8 generator keyed by a
//! 64-bit master seed and selected by a 64-bit stream index. ChaCha is a
//! counter-based cipher, so the stream for `(seed, index)` is a fixed
//! function of those two numbers on every platform and independent of how
//! work is scheduled across threads. Gaussian variates come from Box–Muller
//! on the stream's uniform doubles.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{c, kron_vec, qr, vec_norm, BipartiteDims, ComplexMatrix, C64};
use crate::states::{DensityOperator, PureState};

/// A reproducible random stream identified by `(master_seed, stream_index)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_index);
        Self {
            master_seed,
            stream_index,
            rng,
            spare: None,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Standard normal variate.
    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let (z0, z1) = self.box_muller();
        self.spare = Some(z1);
        z0
    }

    fn box_muller(&mut self) -> (f64, f64) {
        // 1 - u lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        (r * theta.cos(), r * theta.sin())
    }

    /// Complex normal with independent real and imaginary parts of
    /// variance 1/2 each.
    pub fn complex_normal(&mut self) -> C64 {
        let (x, y) = self.box_muller();
        c(x, y) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Standard complex Gaussian vector of length `d`, normalized.
pub fn haar_vector(d: usize, rng: &mut RngStream) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..d).map(|_| rng.complex_normal()).collect();
        let n = vec_norm(&v);
        if n > 0.0 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Haar-random pure state on the full bipartite space.
pub fn haar_pure(dims: BipartiteDims, rng: &mut RngStream) -> PureState {
    PureState::from_parts_unchecked(dims, haar_vector(dims.d(), rng))
}

/// `d x d` matrix of i.i.d. standard complex Gaussians.
pub fn ginibre(d: usize, rng: &mut RngStream) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| rng.complex_normal())
}

/// Haar unitary: QR of a Ginibre matrix with each column of `Q` multiplied
/// by the phase of the matching diagonal entry of `R`.
pub fn haar_unitary(d: usize, rng: &mut RngStream) -> ComplexMatrix {
    let (mut q, r) = qr(&ginibre(d, rng));
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { c(1., 0.) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `G G† / Tr(G G†)` for a Ginibre `G`; distributed by the Hilbert–Schmidt measure.
pub fn hs_mixed(dims: BipartiteDims, rng: &mut RngStream) -> DensityOperator {
    DensityOperator::from_matrix_unchecked(dims, hs_mixed_matrix(dims.d(), rng))
}

/// [`hs_mixed`] for any dimension `d`, without a bipartition.
pub fn hs_mixed_matrix(d: usize, rng: &mut RngStream) -> ComplexMatrix {
    normalized_gram(&ginibre(d, rng))
}

/// `(1 + U) G G† (1 + U)† / Tr(...)`; distributed by the Bures measure.
pub fn bures_mixed(dims: BipartiteDims, rng: &mut RngStream) -> DensityOperator {
    DensityOperator::from_matrix_unchecked(dims, bures_mixed_matrix(dims.d(), rng))
}

/// [`bures_mixed`] for any dimension `d`, without a bipartition.
pub fn bures_mixed_matrix(d: usize, rng: &mut RngStream) -> ComplexMatrix {
    let g = ginibre(d, rng);
    let u = haar_unitary(d, rng);
    let one_plus_u = &ComplexMatrix::identity(d) + &u;
    normalized_gram(&one_plus_u.matmul(&g))
}

/// Mean purity `2d / (d² + 1)` under the Hilbert–Schmidt measure.
pub fn hs_mean_purity(d: usize) -> f64 {
    let d = d as f64;
    2.0 * d / (d * d + 1.0)
}

/// Mean purity `(5d² + 1) / (2d(d² + 2))` under the Bures measure.
pub fn bures_mean_purity(d: usize) -> f64 {
    let d = d as f64;
    (5.0 * d * d + 1.0) / (2.0 * d * (d * d + 2.0))
}

fn normalized_gram(a: &ComplexMatrix) -> ComplexMatrix {
    let m = a.matmul(&a.adjoint()).hermitian_part();
    let tr = m.trace().re;
    m.scale(1.0 / tr)
}

/// `|a> ⊗ |b>` with both factors Haar-random on their subsystem.
pub fn random_product_pure(dims: BipartiteDims, rng: &mut RngStream) -> PureState {
    let a = haar_vector(dims.d1(), rng);
    let b = haar_vector(dims.d2(), rng);
    PureState::from_parts_unchecked(dims, kron_vec(&a, &b))
}

/// `(U1 ⊗ U2)` applied to the maximally entangled state, `U1, U2` Haar.
pub fn random_maximally_entangled(dims: BipartiteDims, rng: &mut RngStream) -> PureState {
    let u1 = haar_unitary(dims.d1(), rng);
    let u2 = haar_unitary(dims.d2(), rng);
    PureState::maximally_entangled(dims)
        .local_transformed(&u1, &u2)
        .expect("unitary preserves the norm")
}

/// Conjugates `rho` by a Haar unitary, preserving its spectrum.
pub fn haar_conjugate(rho: &DensityOperator, rng: &mut RngStream) -> DensityOperator {
    let u = haar_unitary(rho.dims().d(), rng);
    let m = u.matmul(rho.matrix()).matmul(&u.adjoint()).hermitian_part();
    DensityOperator::from_matrix_unchecked(rho.dims(), m)
}
