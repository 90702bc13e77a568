//! Entanglement witnesses as unit-trace positive operators with a
//! separability threshold, plus closed-form detection statistics.
//!
//! A [`Witness`] fires on `ρ` when `Tr(ρ W) > μ`. All separable states stay
//! at or below `μ`; the threshold-at-zero witness of the usual convention is
//! recovered as `μ·1 − W` up to normalization.

use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, partial_transpose, BipartiteDims, ComplexMatrix, C64};
use crate::states::{schmidt, DensityOperator, PureState, StandardFormParams, ENTANGLEMENT_TOL};

/// Slack on the strict inequality `Tr(ρW) > μ`; boundary cases do not fire.
pub const DETECTION_SLACK: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct Witness {
    op: DensityOperator,
    threshold: f64,
}

impl Witness {
    pub fn new(op: DensityOperator, threshold: f64) -> Self {
        Self { op, threshold }
    }

    pub fn op(&self) -> &DensityOperator {
        &self.op
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn dims(&self) -> BipartiteDims {
        self.op.dims()
    }

    /// `Tr(ρ W)`.
    pub fn mean_value(&self, rho: &ComplexMatrix) -> f64 {
        self.op.matrix().trace_product(rho).re
    }

    /// `Tr(ρ W) − μ`; positive values detect.
    pub fn margin(&self, rho: &ComplexMatrix) -> f64 {
        self.mean_value(rho) - self.threshold
    }

    pub(crate) fn fires(&self, rho: &ComplexMatrix) -> bool {
        self.margin(rho) > DETECTION_SLACK
    }

    pub(crate) fn fires_pure(&self, psi: &[C64]) -> bool {
        self.op.matrix().expectation(psi) - self.threshold > DETECTION_SLACK
    }
}

/// `|ψ><ψ|` with threshold `λ₁`, the largest squared Schmidt coefficient.
pub fn pure_state_witness(psi: &PureState) -> Result<Witness> {
    let s = schmidt(psi);
    let w = s.weights();
    if 2.0 * (w[0] * w[1]).max(0.0).sqrt() <= ENTANGLEMENT_TOL {
        return Err(Error::Separable);
    }
    Ok(Witness::new(psi.density(), s.lambda1()))
}

pub fn detects(w: &Witness, rho: &DensityOperator) -> Result<bool> {
    if w.dims() != rho.dims() {
        return Err(Error::DimensionMismatch {
            expected: w.dims().d(),
            got: rho.dims().d(),
        });
    }
    Ok(w.fires(rho.matrix()))
}

/// The optimal witness built from the partial transpose of an entangled
/// pure state: `ρ_w = (λ_max·1 − ψ^{T2}) / (d·λ_max − 1)` with threshold
/// `λ_max / (d·λ_max − 1)`. It fires exactly when `Tr(ρ ψ^{T2}) < 0`.
pub fn pt_witness(psi: &PureState) -> Result<Witness> {
    let dims = psi.dims();
    let pt = psi.density().partial_transpose();
    let ev = eigvalsh(&pt);
    if ev[0] >= -ENTANGLEMENT_TOL {
        return Err(Error::Separable);
    }
    let lambda_max = *ev.last().expect("nonempty");
    Ok(pt_witness_from_parts(dims, &pt, lambda_max))
}

/// Shared construction for [`pt_witness`] and the WOM outcomes, which use a
/// common `λ_max` across outcomes.
pub(crate) fn pt_witness_from_parts(
    dims: BipartiteDims,
    pt: &ComplexMatrix,
    lambda_max: f64,
) -> Witness {
    let d = dims.d();
    let norm = d as f64 * lambda_max - 1.0;
    let op = (&ComplexMatrix::identity(d).scale(lambda_max) - pt).scale(1.0 / norm);
    Witness::new(
        DensityOperator::from_matrix_unchecked(dims, op.hermitian_part()),
        lambda_max / norm,
    )
}

/// Eigenvalue groups of `Q = (λ₁·1 − |ψ><ψ|)^{T2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QSpectrum {
    /// `λ₁ − λ_i` on `|ii>`, `d1` entries.
    pub diagonal: Vec<f64>,
    /// `λ₁ − sqrt(λ_i λ_j)` on the symmetric combinations, `i < j`.
    pub symmetric: Vec<f64>,
    /// `λ₁ + sqrt(λ_i λ_j)` on the antisymmetric combinations, `i < j`.
    pub antisymmetric: Vec<f64>,
    /// `λ₁` on `|ij>` with `j ≥ d1`, multiplicity `d1 (d2 − d1)`.
    pub remainder: Vec<f64>,
}

impl QSpectrum {
    pub fn from_schmidt_weights(lambdas: &[f64], dims: BipartiteDims) -> Self {
        let l1 = lambdas.iter().cloned().fold(f64::MIN, f64::max);
        let d1 = lambdas.len();
        let mut symmetric = Vec::new();
        let mut antisymmetric = Vec::new();
        for i in 0..d1 {
            for j in i + 1..d1 {
                let g = (lambdas[i] * lambdas[j]).max(0.0).sqrt();
                symmetric.push(l1 - g);
                antisymmetric.push(l1 + g);
            }
        }
        Self {
            diagonal: lambdas.iter().map(|l| l1 - l).collect(),
            symmetric,
            antisymmetric,
            remainder: vec![l1; d1 * (dims.d2() - dims.d1())],
        }
    }

    /// All groups merged, ascending.
    pub fn sorted(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .diagonal
            .iter()
            .chain(&self.symmetric)
            .chain(&self.antisymmetric)
            .chain(&self.remainder)
            .copied()
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }
}

/// `Q = (λ₁·1 − |ψ><ψ|)^{T2}` and its predicted spectrum.
pub fn q_operator(psi: &PureState) -> (ComplexMatrix, QSpectrum) {
    let dims = psi.dims();
    let s = schmidt(psi);
    let l1 = s.lambda1();
    let w = &ComplexMatrix::identity(dims.d()).scale(l1) - &psi.projector();
    let q = partial_transpose(&w, dims).expect("dims match by construction");
    (q, QSpectrum::from_schmidt_weights(&s.weights(), dims))
}

/// Fraction of Haar-random pure states detected by a pure-state witness
/// with largest squared Schmidt coefficient `λ₁`: `(1 − λ₁)^{d1 d2 − 1}`.
pub fn pure_witness_detection_ratio(lambda1: f64, dims: BipartiteDims) -> Result<f64> {
    let lo = 1.0 / dims.d1() as f64;
    if !(lambda1 >= lo - 1e-12 && lambda1 <= 1.0 + 1e-12) {
        return Err(Error::OutOfRange(format!(
            "lambda1 = {lambda1} not in [{lo}, 1]"
        )));
    }
    let base = (1.0 - lambda1).clamp(0.0, 1.0);
    Ok(base.powi(dims.d() as i32 - 1))
}

/// Mean and variance of `<Φ|Q^{T2}|Φ>` over Haar-random `Φ`:
/// `1/d` and `Tr((Q − 1/d)²) / (d (d + 1))`.
pub fn q_mean_var(q: &DensityOperator) -> (f64, f64) {
    let d = q.dims().d() as f64;
    let purity = q.matrix().hs_inner(q.matrix()).re;
    (1.0 / d, (purity - 1.0 / d) / (d * (d + 1.0)))
}

/// Fraction of Haar-random pure states detected by the partial-transpose
/// witness of a maximally entangled state in `d1 ⊗ d1`:
///
/// `Γ(d1²) / (2^{d1²} Γ(d1(d1+1)/2)) · Σ_k C(d1,k) (−1)^k Γ((k+1)/2) / Γ((d1(d1−1)+k+1)/2)`
///
/// With `m = d1(d1−1)/2` both Gamma ratios are finite products, so term `k`
/// is `C(d1,k) 2^{−d1²} Π_{j<m} (d1(d1+1)/2 + j) / ((k+1)/2 + j)`. The
/// products are renormalized by exact powers of two as they accumulate and
/// the alternating sum is compensated.
pub fn me_pt_witness_detection_ratio(d1: usize) -> Result<f64> {
    if d1 < 2 {
        return Err(Error::OutOfRange(format!("d1 = {d1} < 2")));
    }
    let n = d1 as f64;
    let m = d1 * (d1 - 1) / 2;
    let a = n * (n + 1.0) / 2.0;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut binom = 1.0f64;
    for k in 0..=d1 {
        if k > 0 {
            binom = binom * (d1 - k + 1) as f64 / k as f64;
        }
        let x = (k as f64 + 1.0) / 2.0;
        let (mut v, mut e2) = libm::frexp(binom);
        e2 -= (d1 * d1) as i32;
        for j in 0..m {
            let (mant, ex) = libm::frexp(v * (a + j as f64) / (x + j as f64));
            v = mant;
            e2 += ex;
        }
        let mag = libm::ldexp(v, e2);
        let term = if k % 2 == 0 { mag } else { -mag };
        // Neumaier summation.
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    Ok(sum + comp)
}

/// `(1 − Φ(1))`, the large-`d1` limit of [`me_pt_witness_detection_ratio`].
pub fn me_pt_witness_limit() -> f64 {
    0.5 * libm::erfc(std::f64::consts::FRAC_1_SQRT_2)
}

fn check_alpha(alpha: f64) -> Result<StandardFormParams> {
    StandardFormParams::from_alpha(alpha)
}

/// `Tr(ρ(α₁) ρ(α₂)) − cos²α₂ = sin α₁ sin(2α₂ − α₁)`: how far the aligned
/// pure-state witness `ρ(α₂)` sits above its threshold on `ρ(α₁)`.
pub fn aligned_pure_margin(alpha1: f64, alpha2: f64) -> Result<f64> {
    check_alpha(alpha1)?;
    check_alpha(alpha2)?;
    Ok(alpha1.sin() * (2.0 * alpha2 - alpha1).sin())
}

/// Whether the pure-state witness `ρ(α₂)` detects the aligned state
/// `ρ(α₁)`, i.e. `2α₂ > α₁`.
pub fn detects_aligned_pure(alpha1: f64, alpha2: f64) -> Result<bool> {
    Ok(aligned_pure_margin(alpha1, alpha2)? > DETECTION_SLACK)
}

/// `Tr(ρ_w(α₁) ρ(α₂)^{T2}) = sin α₂ sin(α₂ − 2α₁) / (1 + 2p₁)`.
pub fn aligned_witness_pt_trace(alpha1: f64, alpha2: f64) -> Result<f64> {
    let p1 = check_alpha(alpha1)?.p;
    check_alpha(alpha2)?;
    Ok(alpha2.sin() * (alpha2 - 2.0 * alpha1).sin() / (1.0 + 2.0 * p1))
}

/// `Tr(ρ_w(α₁) ρ_w(α₂)) − μ(α₂)`, which equals
/// `−Tr(ρ_w(α₁) ρ(α₂)^{T2}) / (1 + 2p₂)`.
pub fn aligned_witness_margin(alpha1: f64, alpha2: f64) -> Result<f64> {
    let p2 = check_alpha(alpha2)?.p;
    Ok(-aligned_witness_pt_trace(alpha1, alpha2)? / (1.0 + 2.0 * p2))
}

/// Whether the optimal witness `ρ_w(α₂)` detects the aligned state
/// `ρ_w(α₁)`, i.e. `2α₁ > α₂`.
pub fn detects_aligned_witness(alpha1: f64, alpha2: f64) -> Result<bool> {
    Ok(aligned_witness_margin(alpha1, alpha2)? > DETECTION_SLACK)
}
