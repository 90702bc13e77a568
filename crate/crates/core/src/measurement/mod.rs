//! Probability operator measurements (POMs) and witness operator
//! measurements (WOMs).
//!
//! A WOM is built from a rank-one POM `{w_i |ψ_i><ψ_i|}` whose states are all
//! entangled. Each outcome becomes
//! `O'_i = w_i (λ_max·1 − ρ_i^{T2}) / (d·λ_max − 1)` with a common `λ_max`,
//! the largest eigenvalue found among the `ρ_i^{T2}`. Completeness survives
//! because `Σ w_i ρ_i^{T2} = 1^{T2} = 1`.

mod sic;
mod weyl;

pub use sic::{
    frame_potential, frame_potential_floor, sic_fiducial_search, sic_pom_from_fiducial, Fiducial,
    SearchOptions, SHIPPED_D4_FIDUCIAL, SIC_OVERLAP_TOL, UNIFORM_CONCURRENCE_TOL,
};
pub use weyl::heisenberg_weyl;

use crate::error::{Error, Result};
use crate::linalg::{
    eigvalsh, hermitian_eig, partial_transpose, BipartiteDims, ComplexMatrix, C64,
};
use crate::states::{DensityOperator, PureState, ENTANGLEMENT_TOL};
use crate::witness::{pt_witness_from_parts, Witness, DETECTION_SLACK};

pub const PSD_TOL: f64 = 1e-9;
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Relative singular-value cutoff for the informational-completeness rank.
pub const IC_RANK_CUTOFF: f64 = 1e-8;

/// Rank-one structure `O_i = w_i |ψ_i><ψ_i|`.
#[derive(Debug, Clone)]
pub struct RankOne {
    pub weights: Vec<f64>,
    pub states: Vec<Vec<C64>>,
}

#[derive(Debug, Clone)]
pub struct Pom {
    dim: usize,
    dims: Option<BipartiteDims>,
    outcomes: Vec<ComplexMatrix>,
    rank_one: Option<RankOne>,
}

impl Pom {
    /// Validates positivity of every outcome and completeness.
    pub fn new(
        dim: usize,
        dims: Option<BipartiteDims>,
        outcomes: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if let Some(dm) = dims {
            if dm.d() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: dm.d(),
                });
            }
        }
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for o in &outcomes {
            if o.rows() != dim || o.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: o.rows(),
                });
            }
            let min = hermitian_eig(o)?.min();
            if min < -PSD_TOL {
                return Err(Error::NotPositive(min));
            }
            sum = &sum + o;
        }
        let dev = sum.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > COMPLETENESS_TOL {
            return Err(Error::Incomplete(dev));
        }
        Ok(Self {
            dim,
            dims,
            outcomes,
            rank_one: None,
        })
    }

    /// Rank-one POM from weights and (normalized) state vectors.
    pub fn rank_one(
        dim: usize,
        dims: Option<BipartiteDims>,
        weights: Vec<f64>,
        states: Vec<Vec<C64>>,
    ) -> Result<Self> {
        if weights.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: states.len(),
            });
        }
        let wsum: f64 = weights.iter().sum();
        if (wsum - dim as f64).abs() > COMPLETENESS_TOL {
            return Err(Error::Incomplete((wsum - dim as f64).abs()));
        }
        let outcomes = weights
            .iter()
            .zip(&states)
            .map(|(&w, v)| ComplexMatrix::projector(v).scale(w))
            .collect();
        let mut pom = Self::new(dim, dims, outcomes)?;
        pom.rank_one = Some(RankOne { weights, states });
        Ok(pom)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dims(&self) -> Option<BipartiteDims> {
        self.dims
    }

    pub fn outcomes(&self) -> &[ComplexMatrix] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn rank_one_form(&self) -> Option<&RankOne> {
        self.rank_one.as_ref()
    }

    /// Born probabilities `Tr(ρ O_i)`.
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.outcomes
            .iter()
            .map(|o| o.trace_product(rho).re)
            .collect()
    }

    /// `G_ij = Tr(O_i O_j)`, real symmetric for Hermitian outcomes.
    pub fn gram(&self) -> Vec<f64> {
        let n = self.outcomes.len();
        let mut g = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.outcomes[i].hs_inner(&self.outcomes[j]).re;
                g[i * n + j] = v;
                g[j * n + i] = v;
            }
        }
        g
    }

    /// Dimension of the operator space spanned by the outcomes.
    pub fn operator_rank(&self) -> usize {
        let n = self.outcomes.len();
        if n == 0 {
            return 0;
        }
        let g = self.gram();
        let gm = ComplexMatrix::from_fn(n, n, |i, j| C64::new(g[i * n + j], 0.0));
        let ev = eigvalsh(&gm);
        let sv: Vec<f64> = ev.iter().map(|x| x.max(0.0).sqrt()).collect();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        sv.iter().filter(|&&s| s > IC_RANK_CUTOFF * top).count()
    }
}

/// Whether the outcomes span the full `d²`-dimensional operator space.
pub fn is_ic(pom: &Pom) -> bool {
    pom.operator_rank() == pom.dim * pom.dim
}

/// Witness operator measurement with a shared `λ_max`.
#[derive(Debug, Clone)]
pub struct Wom {
    source: Pom,
    lambda_max: f64,
    pom: Pom,
    witnesses: Vec<Witness>,
    pts: Vec<ComplexMatrix>,
}

impl Wom {
    pub fn source(&self) -> &Pom {
        &self.source
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// `d·λ_max − 1`.
    pub fn normalization(&self) -> f64 {
        self.source.dim as f64 * self.lambda_max - 1.0
    }

    /// Common witness threshold `λ_max / (d·λ_max − 1)`.
    pub fn threshold(&self) -> f64 {
        self.lambda_max / self.normalization()
    }

    pub fn outcomes(&self) -> &[ComplexMatrix] {
        self.pom.outcomes()
    }

    /// The WOM as a plain POM, for tomography and rank checks.
    pub fn as_pom(&self) -> &Pom {
        &self.pom
    }

    pub fn witnesses(&self) -> &[Witness] {
        &self.witnesses
    }

    /// The partial transposes `ρ_i^{T2}` of the source projectors.
    pub fn partial_transposes(&self) -> &[ComplexMatrix] {
        &self.pts
    }
}

pub fn wom_from_rank_one(pom: &Pom) -> Result<Wom> {
    let dims = pom.dims.ok_or(Error::NotBipartite)?;
    let r1 = pom.rank_one.as_ref().ok_or(Error::NotRankOne)?;
    let d = dims.d();
    let mut pts = Vec::with_capacity(r1.states.len());
    let mut lambda_max = f64::MIN;
    for (index, v) in r1.states.iter().enumerate() {
        let pt = partial_transpose(&ComplexMatrix::projector(v), dims)?;
        let ev = eigvalsh(&pt);
        if ev[0] >= -ENTANGLEMENT_TOL {
            return Err(Error::SeparableOutcome { index });
        }
        lambda_max = lambda_max.max(*ev.last().expect("nonempty"));
        pts.push(pt);
    }
    let witnesses: Vec<Witness> = pts
        .iter()
        .map(|pt| pt_witness_from_parts(dims, pt, lambda_max))
        .collect();
    let outcomes = witnesses
        .iter()
        .zip(&r1.weights)
        .map(|(w, &wi)| w.op().matrix().scale(wi))
        .collect();
    let wom_pom = Pom::new(d, Some(dims), outcomes)?;
    Ok(Wom {
        source: pom.clone(),
        lambda_max,
        pom: wom_pom,
        witnesses,
        pts,
    })
}

/// Per-outcome detection flags and their disjunction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WomDetection {
    pub any: bool,
    pub flags: Vec<bool>,
}

/// Each WOM witness acting separately: outcome `i` fires when
/// `Tr(ρ ρ_iw) > μ`, evaluated as `−Tr(ρ ρ_i^{T2}) / (d·λ_max − 1) > slack`.
pub fn wom_detects(wom: &Wom, rho: &DensityOperator) -> Result<WomDetection> {
    let d = wom.source.dim;
    if rho.dims().d() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho.dims().d(),
        });
    }
    let flags: Vec<bool> = (0..wom.pts.len())
        .map(|i| wom.outcome_fires(i, rho.matrix()))
        .collect();
    Ok(WomDetection {
        any: flags.iter().any(|&f| f),
        flags,
    })
}

impl Wom {
    #[inline]
    pub(crate) fn outcome_fires(&self, i: usize, rho: &ComplexMatrix) -> bool {
        -self.pts[i].trace_product(rho).re / self.normalization() > DETECTION_SLACK
    }

    #[inline]
    pub(crate) fn outcome_fires_pure(&self, i: usize, psi: &[C64]) -> bool {
        -self.pts[i].expectation(psi) / self.normalization() > DETECTION_SLACK
    }
}

/// Pure-state witnesses `(|ψ_i><ψ_i|, λ₁(ψ_i))` of a rank-one bipartite POM.
pub fn pure_state_witnesses(pom: &Pom) -> Result<Vec<Witness>> {
    let dims = pom.dims.ok_or(Error::NotBipartite)?;
    let r1 = pom.rank_one.as_ref().ok_or(Error::NotRankOne)?;
    r1.states
        .iter()
        .enumerate()
        .map(|(index, v)| {
            let psi = PureState::normalized(dims, v.clone())?;
            crate::witness::pure_state_witness(&psi).map_err(|e| match e {
                Error::Separable => Error::SeparableOutcome { index },
                other => other,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    fn bell_basis() -> Vec<Vec<C64>> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0., 0.);
        vec![
            vec![c(s, 0.), z, z, c(s, 0.)],
            vec![c(s, 0.), z, z, c(-s, 0.)],
            vec![z, c(s, 0.), c(s, 0.), z],
            vec![z, c(s, 0.), c(-s, 0.), z],
        ]
    }

    #[test]
    fn pom_validation() {
        let id = ComplexMatrix::identity(2);
        assert!(Pom::new(2, None, vec![id.scale(0.5), id.scale(0.5)]).is_ok());
        assert!(matches!(
            Pom::new(2, None, vec![id.scale(0.5)]),
            Err(Error::Incomplete(_))
        ));
        assert!(matches!(
            Pom::new(2, None, vec![id.scale(1.5), id.scale(-0.5)]),
            Err(Error::NotPositive(_))
        ));
    }

    #[test]
    fn projective_measurement_is_not_ic() {
        let basis: Vec<Vec<C64>> = (0..4)
            .map(|k| {
                (0..4)
                    .map(|i| c(if i == k { 1. } else { 0. }, 0.))
                    .collect()
            })
            .collect();
        let pom = Pom::rank_one(4, Some(BipartiteDims::two_qubits()), vec![1.0; 4], basis).unwrap();
        assert!(!is_ic(&pom));
        assert_eq!(pom.operator_rank(), 4);
        // Product basis states cannot serve as witnesses.
        assert!(matches!(
            wom_from_rank_one(&pom),
            Err(Error::SeparableOutcome { index: 0 })
        ));
    }

    #[test]
    fn bell_basis_wom() {
        let dims = BipartiteDims::two_qubits();
        let pom = Pom::rank_one(4, Some(dims), vec![1.0; 4], bell_basis()).unwrap();
        let wom = wom_from_rank_one(&pom).unwrap();
        assert!((wom.lambda_max() - 0.5).abs() < 1e-12);
        assert!((wom.normalization() - 1.0).abs() < 1e-12);
        let mut sum = ComplexMatrix::zeros(4, 4);
        for (o, v) in wom.outcomes().iter().zip(bell_basis()) {
            let pt = partial_transpose(&ComplexMatrix::projector(&v), dims).unwrap();
            let want = &ComplexMatrix::identity(4).scale(0.5) - &pt;
            assert!(o.max_abs_diff(&want) < 1e-12);
            let ev = eigvalsh(o);
            assert!(ev[..3].iter().all(|x| x.abs() < 1e-12) && (ev[3] - 1.0).abs() < 1e-12);
            sum = &sum + o;
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn wom_requires_rank_one_bipartite() {
        let id = ComplexMatrix::identity(4);
        let pom = Pom::new(4, Some(BipartiteDims::two_qubits()), vec![id]).unwrap();
        assert!(matches!(wom_from_rank_one(&pom), Err(Error::NotRankOne)));
        let pom = Pom::rank_one(4, None, vec![1.0; 4], bell_basis()).unwrap();
        assert!(matches!(wom_from_rank_one(&pom), Err(Error::NotBipartite)));
    }
}
