//! Bipartite pure and mixed states and the entanglement quantities used
//! throughout the crate.
//!
//! Negativity is reported as `‖ρ^{T2}‖₁ − 1`, i.e. twice the magnitude of
//! the summed negative partial-transpose eigenvalues. A Bell state has
//! negativity 1 under this convention.

use crate::error::{Error, Result};
use crate::linalg::{
    c, eigh, eigvalsh, inner, kron, partial_trace, partial_transpose, vec_norm, BipartiteDims,
    ComplexMatrix, Subsystem, C64, HERMITIAN_TOL,
};

pub const NORM_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Pure states with concurrence at or below this are treated as products.
pub const ENTANGLEMENT_TOL: f64 = 1e-9;
/// Mixed two-qubit states whose partial transpose has a minimum eigenvalue
/// at or above `-PPT_TOL` are treated as separable.
pub const PPT_TOL: f64 = 1e-9;
const ALIGNMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: BipartiteDims,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(dims: BipartiteDims, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != dims.d() {
            return Err(Error::DimensionMismatch {
                expected: dims.d(),
                got: amplitudes.len(),
            });
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::NonFinite);
        }
        let n = vec_norm(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { dims, amplitudes })
    }

    /// Normalizes `amplitudes` first; fails only on a zero vector or wrong length.
    pub fn normalized(dims: BipartiteDims, mut amplitudes: Vec<C64>) -> Result<Self> {
        let n = vec_norm(&amplitudes);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n));
        }
        for z in &mut amplitudes {
            *z /= n;
        }
        Self::new(dims, amplitudes)
    }

    pub(crate) fn from_parts_unchecked(dims: BipartiteDims, amplitudes: Vec<C64>) -> Self {
        Self { dims, amplitudes }
    }

    /// Product basis state `|i, j>`.
    pub fn basis(dims: BipartiteDims, i: usize, j: usize) -> Self {
        let mut a = vec![c(0., 0.); dims.d()];
        a[dims.index(i, j)] = c(1., 0.);
        Self {
            dims,
            amplitudes: a,
        }
    }

    /// `Σ_i |ii> / sqrt(d1)`.
    pub fn maximally_entangled(dims: BipartiteDims) -> Self {
        let s = 1.0 / (dims.d1() as f64).sqrt();
        let mut a = vec![c(0., 0.); dims.d()];
        for i in 0..dims.d1() {
            a[dims.index(i, i)] = c(s, 0.);
        }
        Self {
            dims,
            amplitudes: a,
        }
    }

    /// `Σ_i sqrt(λ_i) |ii>` for the given squared Schmidt coefficients.
    pub fn from_schmidt_weights(dims: BipartiteDims, lambdas: &[f64]) -> Result<Self> {
        if lambdas.len() != dims.d1() {
            return Err(Error::DimensionMismatch {
                expected: dims.d1(),
                got: lambdas.len(),
            });
        }
        let mut a = vec![c(0., 0.); dims.d()];
        for (i, &l) in lambdas.iter().enumerate() {
            if l < 0.0 {
                return Err(Error::OutOfRange(format!("negative Schmidt weight {l}")));
            }
            a[dims.index(i, i)] = c(l.sqrt(), 0.);
        }
        Self::new(dims, a)
    }

    /// Two-qubit standard form `cos α |00> + sin α |11>`.
    pub fn standard_form(alpha: f64) -> Self {
        let dims = BipartiteDims::two_qubits();
        Self {
            dims,
            amplitudes: vec![c(alpha.cos(), 0.), c(0., 0.), c(0., 0.), c(alpha.sin(), 0.)],
        }
    }

    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        let dims = BipartiteDims::new(a.len(), b.len())?;
        Self::normalized(dims, kron_amplitudes(a, b))
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.amplitudes)
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator {
            dims: self.dims,
            matrix: self.projector(),
        }
    }

    /// `U ψ` for a unitary `U` on the full space.
    pub fn transformed(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.dims.d() || u.cols() != self.dims.d() {
            return Err(Error::DimensionMismatch {
                expected: self.dims.d(),
                got: u.rows(),
            });
        }
        Self::normalized(self.dims, u.mul_vec(&self.amplitudes))
    }

    /// Applies `U1 ⊗ U2`.
    pub fn local_transformed(&self, u1: &ComplexMatrix, u2: &ComplexMatrix) -> Result<Self> {
        self.transformed(&kron(u1, u2))
    }

    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(&self.projector(), self.dims, keep).expect("dims match by construction")
    }

    /// Entangled in the sense of a nonzero second Schmidt weight.
    pub fn is_entangled(&self) -> bool {
        let w = schmidt(self).weights();
        2.0 * (w[0] * w[1]).max(0.0).sqrt() > ENTANGLEMENT_TOL
    }
}

fn kron_amplitudes(a: &[C64], b: &[C64]) -> Vec<C64> {
    crate::linalg::kron_vec(a, b)
}

/// A unit-trace positive operator on a bipartite space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    dims: BipartiteDims,
    matrix: ComplexMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(dims: BipartiteDims, matrix: ComplexMatrix) -> Result<Self> {
        let d = dims.d();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.rows(),
            });
        }
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min = eigvalsh(&matrix)[0];
        if min < -POSITIVITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self {
            dims,
            matrix: matrix.hermitian_part(),
        })
    }

    /// Skips validation; for samplers whose output satisfies the
    /// invariants by construction.
    pub(crate) fn from_matrix_unchecked(dims: BipartiteDims, matrix: ComplexMatrix) -> Self {
        Self { dims, matrix }
    }

    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let d = dims.d();
        Self {
            dims,
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
        }
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn partial_transpose(&self) -> ComplexMatrix {
        partial_transpose(&self.matrix, self.dims).expect("dims match by construction")
    }

    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(&self.matrix, self.dims, keep).expect("dims match by construction")
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigvalsh(&self.matrix)
    }

    /// `Tr(ρ A)` for Hermitian `A`.
    pub fn expectation(&self, a: &ComplexMatrix) -> f64 {
        self.matrix.trace_product(a).re
    }
}

/// Schmidt decomposition `ψ = Σ_i s_i |u_i> ⊗ |v_i>`.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    /// `s_i = sqrt(λ_i)`, nonincreasing, length `d1`.
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<Vec<C64>>,
    pub right_basis: Vec<Vec<C64>>,
}

impl SchmidtForm {
    /// Squared coefficients `λ_i`.
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|s| s * s).collect()
    }

    /// Largest squared coefficient `λ₁`.
    pub fn lambda1(&self) -> f64 {
        self.coefficients[0] * self.coefficients[0]
    }

    pub fn reconstruct(&self) -> Vec<C64> {
        let d1 = self.left_basis[0].len();
        let d2 = self.right_basis[0].len();
        let mut out = vec![c(0., 0.); d1 * d2];
        for (k, &s) in self.coefficients.iter().enumerate() {
            for i in 0..d1 {
                for j in 0..d2 {
                    out[i * d2 + j] += self.left_basis[k][i] * self.right_basis[k][j] * s;
                }
            }
        }
        out
    }
}

/// Schmidt decomposition via the eigenvectors of the subsystem-1 reduced
/// operator.
pub fn schmidt(psi: &PureState) -> SchmidtForm {
    let dims = psi.dims;
    let (d1, d2) = (dims.d1(), dims.d2());
    let a = &psi.amplitudes;
    // ρ_A[i,k] = Σ_j a_ij conj(a_kj)
    let rho_a = ComplexMatrix::from_fn(d1, d1, |i, k| {
        (0..d2).map(|j| a[i * d2 + j] * a[k * d2 + j].conj()).sum()
    });
    let eig = eigh(&rho_a);
    let mut coefficients = Vec::with_capacity(d1);
    let mut left_basis = Vec::with_capacity(d1);
    let mut right_basis: Vec<Vec<C64>> = Vec::with_capacity(d1);
    for k in (0..d1).rev() {
        let u = eig.eigenvector(k);
        // v_j = Σ_i conj(u_i) a_ij / s with s = |u† A|. Taking s from the
        // vector rather than sqrt(λ) keeps small coefficients accurate to
        // machine precision instead of sqrt(machine precision).
        let mut v: Vec<C64> = (0..d2)
            .map(|j| (0..d1).map(|i| u[i].conj() * a[i * d2 + j]).sum())
            .collect();
        let vn = vec_norm(&v);
        let s = vn;
        if vn > 1e-12 {
            for z in &mut v {
                *z /= vn;
            }
        } else {
            v = complete_orthonormal(&right_basis, d2);
        }
        coefficients.push(s);
        left_basis.push(u);
        right_basis.push(v);
    }
    let total: f64 = coefficients.iter().map(|s| s * s).sum();
    if total > 0.0 {
        let r = total.sqrt();
        for s in &mut coefficients {
            *s /= r;
        }
    }
    SchmidtForm {
        coefficients,
        left_basis,
        right_basis,
    }
}

/// A unit vector orthogonal to every vector in `basis`.
fn complete_orthonormal(basis: &[Vec<C64>], n: usize) -> Vec<C64> {
    for e in 0..n {
        let mut v = vec![c(0., 0.); n];
        v[e] = c(1., 0.);
        for _ in 0..2 {
            for b in basis {
                let p = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-6 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
    unreachable!("basis of {} vectors cannot span dimension {n}", basis.len())
}

fn require_two_qubit(dims: BipartiteDims) -> Result<()> {
    if dims.is_two_qubit() {
        Ok(())
    } else {
        Err(Error::NotTwoQubit {
            d1: dims.d1(),
            d2: dims.d2(),
        })
    }
}

/// `2 |a00 a11 − a01 a10|`, which equals `2 sqrt(λ₁λ₂)`.
pub fn pure_concurrence(psi: &PureState) -> Result<f64> {
    require_two_qubit(psi.dims)?;
    Ok(two_qubit_concurrence(&psi.amplitudes))
}

#[inline]
pub(crate) fn two_qubit_concurrence(a: &[C64]) -> f64 {
    ((a[0] * a[3] - a[1] * a[2]) * 2.0).norm().min(1.0)
}

/// Parameters `(α, q, p)` of `cos α |00> + sin α |11>`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct StandardFormParams {
    pub alpha: f64,
    pub q: f64,
    pub p: f64,
}

impl StandardFormParams {
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        let quarter = std::f64::consts::FRAC_PI_4;
        if !(alpha > 0.0 && alpha <= quarter + 1e-12) {
            return Err(Error::OutOfRange(format!(
                "alpha = {alpha} not in (0, π/4]"
            )));
        }
        let alpha = alpha.min(quarter);
        Ok(Self::from_concurrence_unchecked((2.0 * alpha).sin(), alpha))
    }

    pub fn from_concurrence(q: f64) -> Result<Self> {
        if !(q > ENTANGLEMENT_TOL && q <= 1.0 + 1e-12) {
            return Err(Error::OutOfRange(format!("concurrence {q} not in (0, 1]")));
        }
        let q = q.min(1.0);
        Ok(Self::from_concurrence_unchecked(q, 0.5 * q.asin()))
    }

    fn from_concurrence_unchecked(q: f64, alpha: f64) -> Self {
        Self {
            alpha,
            q,
            p: (1.0 - q * q).max(0.0).sqrt(),
        }
    }
}

/// Reduces an entangled two-qubit pure state to its standard-form parameters.
pub fn standard_form(psi: &PureState) -> Result<StandardFormParams> {
    require_two_qubit(psi.dims)?;
    let q = two_qubit_concurrence(&psi.amplitudes);
    if q <= ENTANGLEMENT_TOL {
        return Err(Error::Separable);
    }
    // atan2 of the Schmidt coefficients stays accurate near α = π/4, where
    // arcsin(q) is ill-conditioned.
    let s = schmidt(psi);
    let alpha = s.coefficients[1].atan2(s.coefficients[0]);
    Ok(StandardFormParams {
        alpha,
        q: (2.0 * alpha).sin(),
        p: (2.0 * alpha).cos(),
    })
}

fn sigma_y_sigma_y() -> ComplexMatrix {
    let y = ComplexMatrix::from_vec(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
        .expect("2x2");
    kron(&y, &y)
}

/// Wootters concurrence `max(0, μ₁ − μ₂ − μ₃ − μ₄)`, the `μ_i` being the
/// decreasing square roots of the eigenvalues of `ρ (σy⊗σy) ρ* (σy⊗σy)`.
/// Computed from the Hermitian form `sqrt(ρ) ρ̃ sqrt(ρ)`, which shares that spectrum.
pub fn wootters_concurrence(rho: &DensityOperator) -> Result<f64> {
    require_two_qubit(rho.dims)?;
    Ok(wootters_matrix(&rho.matrix))
}

pub(crate) fn wootters_matrix(rho: &ComplexMatrix) -> f64 {
    let yy = sigma_y_sigma_y();
    let tilde = yy.matmul(&rho.conj()).matmul(&yy);
    let eig = eigh(rho);
    let n = 4;
    let sqrt_rho = ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n)
            .map(|k| {
                let l = eig.eigenvalues[k].max(0.0).sqrt();
                eig.eigenvectors[(i, k)] * eig.eigenvectors[(j, k)].conj() * l
            })
            .sum()
    });
    let r = sqrt_rho.matmul(&tilde).matmul(&sqrt_rho);
    let ev = eigvalsh(&r);
    let mu: Vec<f64> = ev.iter().rev().map(|x| x.max(0.0).sqrt()).collect();
    (mu[0] - mu[1] - mu[2] - mu[3]).max(0.0)
}

/// `‖ρ^{T2}‖₁ − 1`.
pub fn negativity(rho: &DensityOperator) -> f64 {
    let ev = eigvalsh(&rho.partial_transpose());
    let trace_norm: f64 = ev.iter().map(|x| x.abs()).sum();
    (trace_norm - 1.0).max(0.0)
}

pub fn purity(rho: &DensityOperator) -> f64 {
    rho.matrix.hs_inner(&rho.matrix).re
}

/// `|<ψ|φ>|²`.
pub fn fidelity(psi: &PureState, phi: &PureState) -> f64 {
    inner(&psi.amplitudes, &phi.amplitudes).norm_sqr()
}

fn bloch_vector(rho: &ComplexMatrix) -> [f64; 3] {
    [
        2.0 * rho[(0, 1)].re,
        -2.0 * rho[(0, 1)].im,
        (rho[(0, 0)] - rho[(1, 1)]).re,
    ]
}

fn parallel(a: [f64; 3], b: [f64; 3]) -> bool {
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let cross_len = cross.iter().map(|x| x * x).sum::<f64>().sqrt();
    cross_len.atan2(dot) <= ALIGNMENT_TOL
}

/// Uhlmann fidelity of two qubit density matrices.
fn qubit_fidelity(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let det = |m: &ComplexMatrix| (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]).re.max(0.0);
    a.trace_product(b).re + 2.0 * (det(a) * det(b)).sqrt()
}

/// Whether two two-qubit pure states are aligned: one local unitary takes
/// both to standard form. Checked as parallel reduced Bloch vectors on both
/// subsystems plus equality of the global and reduced fidelities. A state
/// with vanishing Bloch vector (maximally entangled) counts as aligned with
/// every state.
pub fn is_aligned(psi: &PureState, phi: &PureState) -> Result<bool> {
    require_two_qubit(psi.dims)?;
    require_two_qubit(phi.dims)?;
    let p1 = [
        psi.reduced(Subsystem::First),
        psi.reduced(Subsystem::Second),
    ];
    let p2 = [
        phi.reduced(Subsystem::First),
        phi.reduced(Subsystem::Second),
    ];
    let b1: Vec<[f64; 3]> = p1.iter().map(bloch_vector).collect();
    let b2: Vec<[f64; 3]> = p2.iter().map(bloch_vector).collect();
    let len = |b: &[f64; 3]| b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len(&b1[0]) < ALIGNMENT_TOL || len(&b2[0]) < ALIGNMENT_TOL {
        return Ok(true);
    }
    if !(parallel(b1[0], b2[0]) && parallel(b1[1], b2[1])) {
        return Ok(false);
    }
    let global = fidelity(psi, phi);
    let reduced = qubit_fidelity(&p1[0], &p2[0]);
    Ok((global - reduced).abs() <= 1e-8)
}

/// PPT test, exact for two qubits.
pub fn is_separable_2x2(rho: &DensityOperator) -> Result<bool> {
    require_two_qubit(rho.dims)?;
    Ok(eigvalsh(&rho.partial_transpose())[0] >= -PPT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};

    fn bell() -> PureState {
        PureState::maximally_entangled(BipartiteDims::two_qubits())
    }

    #[test]
    fn pure_state_validation() {
        let dims = BipartiteDims::two_qubits();
        assert!(matches!(
            PureState::new(dims, vec![c(1., 0.); 4]),
            Err(Error::NotNormalized(_))
        ));
        assert!(PureState::new(dims, vec![c(1., 0.); 3]).is_err());
        assert!(PureState::normalized(dims, vec![c(0., 0.); 4]).is_err());
    }

    #[test]
    fn density_validation() {
        let dims = BipartiteDims::two_qubits();
        let m = ComplexMatrix::from_real_diag(&[0.5, 0.5, 0.5, -0.5]);
        assert!(matches!(
            DensityOperator::new(dims, m),
            Err(Error::NotPositive(_))
        ));
        let m = ComplexMatrix::from_real_diag(&[0.5, 0.5, 0.5, 0.5]);
        assert!(matches!(
            DensityOperator::new(dims, m),
            Err(Error::InvalidTrace(_))
        ));
        let mut m = ComplexMatrix::identity(4).scale(0.25);
        m[(0, 1)] = c(0.1, 0.);
        assert!(matches!(
            DensityOperator::new(dims, m),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn schmidt_examples() {
        let dims = BipartiteDims::two_qubits();
        let s = schmidt(&PureState::basis(dims, 0, 0));
        assert!((s.coefficients[0] - 1.0).abs() < 1e-12 && s.coefficients[1].abs() < 1e-12);

        let s = schmidt(&bell());
        for x in &s.coefficients {
            assert!((x - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }

        let s = schmidt(&PureState::standard_form(FRAC_PI_6));
        assert!((s.coefficients[0] - FRAC_PI_6.cos()).abs() < 1e-12);
        assert!((s.coefficients[1] - FRAC_PI_6.sin()).abs() < 1e-12);
    }

    #[test]
    fn schmidt_product_state_reconstructs() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let psi = PureState::basis(dims, 1, 2);
        let s = schmidt(&psi);
        let rec = s.reconstruct();
        assert!(inner(&rec, psi.amplitudes()).norm() > 1.0 - 1e-10);
        assert_eq!(s.right_basis.len(), 2);
        assert!(inner(&s.right_basis[0], &s.right_basis[1]).norm() < 1e-10);
    }

    #[test]
    fn concurrence_examples() {
        let dims = BipartiteDims::two_qubits();
        assert!((pure_concurrence(&bell()).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            pure_concurrence(&PureState::basis(dims, 0, 1))
                .unwrap()
                .abs()
                < 1e-12
        );
        let q = pure_concurrence(&PureState::standard_form(FRAC_PI_6)).unwrap();
        assert!((q - 3f64.sqrt() / 2.0).abs() < 1e-12);
        let big = BipartiteDims::new(2, 3).unwrap();
        assert!(matches!(
            pure_concurrence(&PureState::maximally_entangled(big)),
            Err(Error::NotTwoQubit { .. })
        ));
    }

    #[test]
    fn standard_form_examples() {
        let p = standard_form(&bell()).unwrap();
        assert!((p.alpha - FRAC_PI_4).abs() < 1e-9);
        assert!((p.q - 1.0).abs() < 1e-12 && p.p.abs() < 1e-6);

        let p = StandardFormParams::from_concurrence((0.4f64).sqrt()).unwrap();
        assert!((p.p - (0.6f64).sqrt()).abs() < 1e-12);
        assert!((p.q - (2.0 * p.alpha).sin()).abs() < 1e-12);

        let dims = BipartiteDims::two_qubits();
        assert_eq!(
            standard_form(&PureState::basis(dims, 1, 1)),
            Err(Error::Separable)
        );
        assert!(StandardFormParams::from_alpha(0.0).is_err());
        assert!(StandardFormParams::from_alpha(1.0).is_err());
    }

    #[test]
    fn wootters_examples() {
        let dims = BipartiteDims::two_qubits();
        assert!((wootters_concurrence(&bell().density()).unwrap() - 1.0).abs() < 1e-9);
        let mixed = DensityOperator::maximally_mixed(dims);
        assert!(wootters_concurrence(&mixed).unwrap().abs() < 1e-12);
    }

    #[test]
    fn negativity_examples() {
        let dims = BipartiteDims::two_qubits();
        assert!((negativity(&bell().density()) - 1.0).abs() < 1e-12);
        assert!(negativity(&PureState::basis(dims, 0, 1).density()).abs() < 1e-12);
    }

    #[test]
    fn purity_and_fidelity() {
        let dims = BipartiteDims::two_qubits();
        assert!((purity(&DensityOperator::maximally_mixed(dims)) - 0.25).abs() < 1e-15);
        let (a1, a2) = (0.3, 0.7);
        let f = fidelity(&PureState::standard_form(a1), &PureState::standard_form(a2));
        assert!((f - (a1 - a2).cos().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn alignment_of_standard_forms() {
        let a = PureState::standard_form(0.2);
        let b = PureState::standard_form(0.6);
        assert!(is_aligned(&a, &b).unwrap());
        // |01>-type Schmidt basis on the second qubit breaks alignment.
        let dims = BipartiteDims::two_qubits();
        let flipped = PureState::new(
            dims,
            vec![
                c(0., 0.),
                c(0.6f64.cos(), 0.),
                c(0.6f64.sin(), 0.),
                c(0., 0.),
            ],
        )
        .unwrap();
        assert!(!is_aligned(&a, &flipped).unwrap());
        // Relative phase between the Schmidt terms also breaks alignment.
        let phased = PureState::new(
            dims,
            vec![
                c(0.6f64.cos(), 0.),
                c(0., 0.),
                c(0., 0.),
                c(0., 0.6f64.sin()),
            ],
        )
        .unwrap();
        assert!(!is_aligned(&a, &phased).unwrap());
        assert!(is_aligned(&a, &bell()).unwrap());
    }

    #[test]
    fn ppt_examples() {
        let dims = BipartiteDims::two_qubits();
        assert!(!is_separable_2x2(&bell().density()).unwrap());
        assert!(is_separable_2x2(&PureState::basis(dims, 1, 0).density()).unwrap());
        assert!(is_separable_2x2(&DensityOperator::maximally_mixed(dims)).unwrap());
    }

    #[test]
    fn standard_form_pt_spectrum() {
        for alpha in [FRAC_PI_8, FRAC_PI_6, 0.1, FRAC_PI_4] {
            let prm = StandardFormParams::from_alpha(alpha).unwrap();
            let ev = PureState::standard_form(alpha)
                .density()
                .partial_transpose();
            let ev = eigvalsh(&ev);
            let mut want = [
                (1.0 + prm.p) / 2.0,
                (1.0 - prm.p) / 2.0,
                prm.q / 2.0,
                -prm.q / 2.0,
            ];
            want.sort_by(f64::total_cmp);
            for (a, b) in ev.iter().zip(want) {
                assert!((a - b).abs() < 1e-9, "alpha={alpha}: {ev:?} vs {want:?}");
            }
        }
    }
}
