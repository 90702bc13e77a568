//! Linear-inversion tomography with a minimal informationally complete POM.
//!
//! For `d²` linearly independent outcomes `O_i` the dual frame `R_i` with
//! `Tr(O_i R_j) = δ_ij` is unique, and `ρ̂ = Σ_i f_i R_i` (with `f_i` the
//! observed frequencies) is the unbiased linear estimator. No projection onto
//! the positive cone is applied.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::RngStream;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, C64};
use crate::measurement::Pom;
use crate::stats::Moments;

/// Largest accepted condition number of the Gram matrix.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Debug, Clone)]
pub struct DualFrame {
    duals: Vec<ComplexMatrix>,
    condition_number: f64,
}

impl DualFrame {
    /// Inverts the Gram matrix `G_ij = Tr(O_i O_j)` and sets
    /// `R_i = Σ_j (G⁻¹)_ij O_j`.
    pub fn new(pom: &Pom) -> Result<Self> {
        let d = pom.dim();
        let n = pom.len();
        if n != d * d {
            return Err(Error::NotMinimalIc(format!(
                "{n} outcomes, need exactly {}",
                d * d
            )));
        }
        let g = pom.gram();
        let gm = ComplexMatrix::from_fn(n, n, |i, j| C64::new(g[i * n + j], 0.0));
        let eig = hermitian_eig(&gm)?;
        let (lo, hi) = (eig.min(), eig.max());
        if lo <= 0.0 {
            return Err(Error::NotMinimalIc("rank-deficient outcomes".into()));
        }
        let condition_number = hi / lo;
        if condition_number > MAX_CONDITION {
            return Err(Error::IllConditioned(condition_number));
        }
        let v = &eig.eigenvectors;
        let inv = |i: usize, j: usize| -> f64 {
            (0..n)
                .map(|k| (v[(i, k)] * v[(j, k)].conj()).re / eig.eigenvalues[k])
                .sum()
        };
        let outcomes = pom.outcomes();
        let duals = (0..n)
            .map(|i| {
                let mut r = ComplexMatrix::zeros(d, d);
                for (j, o) in outcomes.iter().enumerate() {
                    r = &r + &o.scale(inv(i, j));
                }
                r.hermitian_part()
            })
            .collect();
        Ok(Self {
            duals,
            condition_number,
        })
    }

    pub fn duals(&self) -> &[ComplexMatrix] {
        &self.duals
    }

    pub fn condition_number(&self) -> f64 {
        self.condition_number
    }

    /// `Σ_i Tr(O_i A) R_i`; reproduces any operator `A` for a matching POM.
    pub fn expand(&self, pom: &Pom, a: &ComplexMatrix) -> ComplexMatrix {
        let d = a.rows();
        pom.outcomes()
            .iter()
            .zip(&self.duals)
            .fold(ComplexMatrix::zeros(d, d), |acc, (o, r)| {
                &acc + &r.scale_complex(o.trace_product(a))
            })
    }
}

/// Multinomial outcome counts for `n` copies of `rho`, sampled by inverse
/// CDF on the cumulative Born probabilities.
pub fn simulate_counts(
    pom: &Pom,
    rho: &ComplexMatrix,
    n: u64,
    rng: &mut RngStream,
) -> Result<Vec<u64>> {
    let probs = pom.probabilities(rho);
    let cdf = cumulative(&probs)?;
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..n {
        counts[draw(&cdf, rng.uniform())] += 1;
    }
    Ok(counts)
}

fn cumulative(probs: &[f64]) -> Result<Vec<f64>> {
    if let Some(&bad) = probs.iter().find(|&&p| p < -1e-10) {
        return Err(Error::NegativeProbability(bad));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::ProbabilitySum(total));
    }
    let mut acc = 0.0;
    Ok(probs
        .iter()
        .map(|p| {
            acc += p.max(0.0) / total;
            acc
        })
        .collect())
}

#[inline]
fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// `ρ̂ = Σ_i (n_i / N) R_i`.
pub fn reconstruct(counts: &[u64], dual: &DualFrame) -> Result<ComplexMatrix> {
    if counts.len() != dual.duals.len() {
        return Err(Error::DimensionMismatch {
            expected: dual.duals.len(),
            got: counts.len(),
        });
    }
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::NoCounts);
    }
    let d = dual.duals[0].rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for (&k, r) in counts.iter().zip(&dual.duals) {
        if k > 0 {
            out = &out + &r.scale(k as f64 / total as f64);
        }
    }
    Ok(out)
}

/// Closed-form mean squared Hilbert–Schmidt error of linear inversion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MseModel {
    /// `(d² + d − 1 − Tr ρ²) / N`.
    Sic,
    /// `((1/d)[(d+1)²(d−1)(dλ_max − 1)² + 1] − Tr ρ²) / N`.
    Wom { lambda_max: f64 },
}

pub fn mse_formula(model: MseModel, d: usize, purity: f64, n: u64) -> f64 {
    let df = d as f64;
    let nf = n as f64;
    match model {
        MseModel::Sic => (df * df + df - 1.0 - purity) / nf,
        MseModel::Wom { lambda_max } => {
            let k = df * lambda_max - 1.0;
            (((df + 1.0).powi(2) * (df - 1.0) * k * k + 1.0) / df - purity) / nf
        }
    }
}

/// Exact MSE of the linear estimator for any minimal IC POM:
/// `(Σ_i p_i Tr(R_i²) − Tr ρ²) / N`.
pub fn linear_inversion_mse(pom: &Pom, dual: &DualFrame, rho: &ComplexMatrix, n: u64) -> f64 {
    let probs = pom.probabilities(rho);
    let s: f64 = probs
        .iter()
        .zip(&dual.duals)
        .map(|(p, r)| p * r.hs_inner(r).re)
        .sum();
    (s - rho.hs_inner(rho).re) / n as f64
}

/// Outcome of repeated simulated tomography runs.
#[derive(Debug, Clone, Serialize)]
pub struct TomographyRun {
    pub pom_kind: String,
    pub d: usize,
    #[serde(rename = "N")]
    pub n: u64,
    pub trials: usize,
    pub state_label: String,
    pub empirical_mse: f64,
    pub formula_mse: f64,
    /// Standard error of `empirical_mse` across trials.
    pub stderr: f64,
}

/// Inputs to [`mse_experiment`].
#[derive(Debug, Clone, Copy)]
pub struct MseJob<'a> {
    pub pom: &'a Pom,
    pub dual: &'a DualFrame,
    pub rho: &'a ComplexMatrix,
    pub n: u64,
    pub trials: usize,
    pub seed: u64,
    pub model: MseModel,
    pub pom_kind: &'a str,
    pub state_label: &'a str,
}

/// Runs `trials` independent tomography experiments of `n` copies each,
/// trial `t` drawing from `RngStream::new(seed, t)`.
pub fn mse_experiment(job: MseJob<'_>) -> Result<TomographyRun> {
    let MseJob {
        pom,
        dual,
        rho,
        n,
        trials,
        seed,
        model,
        ..
    } = job;
    if n == 0 || trials == 0 {
        return Err(Error::OutOfRange("need n >= 1 and trials >= 1".into()));
    }
    let cdf = cumulative(&pom.probabilities(rho))?;
    let errors: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = RngStream::new(seed, t as u64);
            let mut counts = vec![0u64; cdf.len()];
            for _ in 0..n {
                counts[draw(&cdf, rng.uniform())] += 1;
            }
            let est = reconstruct(&counts, dual).expect("n >= 1");
            (&est - rho).hs_norm().powi(2)
        })
        .collect();
    let m = Moments::from_slice(&errors);
    let (mean, stderr) = (m.mean(), m.mean_stderr());
    let d = pom.dim();
    let purity = rho.hs_inner(rho).re;
    Ok(TomographyRun {
        pom_kind: job.pom_kind.to_string(),
        d,
        n,
        trials,
        state_label: job.state_label.to_string(),
        empirical_mse: mean,
        formula_mse: mse_formula(model, d, purity, n),
        stderr,
    })
}

/// Radius `sqrt(1 / ((d−1) d))` of the largest ball of separable states
/// around the maximally mixed state.
pub fn separable_ball_radius(d: usize) -> Result<f64> {
    if d < 4 {
        return Err(Error::OutOfRange(format!("d = {d} < 4")));
    }
    let df = d as f64;
    Ok((1.0 / ((df - 1.0) * df)).sqrt())
}

/// Order-of-magnitude copy count `d⁸` for deciding separability by SIC
/// tomography: HS accuracy `~1/d³` inside a ball of radius `~1/d`, with MSE
/// `~d²/N`. A heuristic scale, not a bound.
pub fn required_copies_estimate(d: usize) -> Result<f64> {
    if d < 4 {
        return Err(Error::OutOfRange(format!("d = {d} < 4")));
    }
    Ok((d as f64).powi(8))
}
