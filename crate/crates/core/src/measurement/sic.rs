//! Heisenberg–Weyl covariant SIC fiducials.
//!
//! A unit vector `ψ` is a SIC fiducial when `|<ψ|D|ψ>|² = 1/(d+1)` for every
//! nontrivial displacement `D`. The frame potential
//! `Σ_{D≠1} |<ψ|D|ψ>|⁴` is bounded below by `(d−1)/(d+1)`, with equality
//! exactly at fiducials. Because `Σ_{D≠1} |<ψ|D|ψ>|² = d − 1` for every unit
//! vector, the excess over that floor equals
//! `Σ_{D≠1} (|<ψ|D|ψ>|² − 1/(d+1))²`, so the search minimizes the potential
//! as a least-squares problem with Levenberg–Marquardt steps.

use std::fmt::Write as _;
use std::path::Path;

use crate::ensembles::RngStream;
use crate::error::{Error, Result};
use crate::linalg::{c, inner, solve_spd, vec_norm, BipartiteDims, ComplexMatrix, C64};
use crate::measurement::{heisenberg_weyl, Pom};
use crate::states::two_qubit_concurrence;

/// Tolerance on every orbit overlap `|<ψ_a|ψ_b>|² − 1/(d+1)`.
pub const SIC_OVERLAP_TOL: f64 = 1e-8;
/// Tolerance for the uniform orbit concurrence `sqrt(2/5)` in `d = 4`.
pub const UNIFORM_CONCURRENCE_TOL: f64 = 1e-9;

/// Checked-in `d = 4` fiducial whose orbit has uniform concurrence `sqrt(2/5)`.
pub const SHIPPED_D4_FIDUCIAL: &str = include_str!("../../data/sic_d4_fiducial.txt");

#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    /// In `d = 4`, keep only fiducials whose 16 orbit states all have
    /// two-qubit concurrence `sqrt(2/5)`.
    pub require_uniform_concurrence: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            restarts: 200,
            max_iterations: 400,
            require_uniform_concurrence: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Fiducial {
    dim: usize,
    amplitudes: Vec<C64>,
    /// `|<ψ_a|ψ_b>|²` for all orbit pairs `a < b`.
    overlaps: Vec<f64>,
    frame_potential: f64,
}

impl Fiducial {
    /// Verifies that the orbit of `amplitudes` is symmetric informationally complete.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 {
            return Err(Error::OutOfRange(format!("dimension {dim} < 2")));
        }
        let n = vec_norm(&amplitudes);
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(n));
        }
        let ops = heisenberg_weyl(dim);
        let orbit: Vec<Vec<C64>> = ops.iter().map(|d| d.mul_vec(&amplitudes)).collect();
        let mut overlaps = Vec::with_capacity(orbit.len() * (orbit.len() - 1) / 2);
        for a in 0..orbit.len() {
            for b in a + 1..orbit.len() {
                overlaps.push(inner(&orbit[a], &orbit[b]).norm_sqr());
            }
        }
        let target = 1.0 / (dim as f64 + 1.0);
        let worst = overlaps
            .iter()
            .map(|o| (o - target).abs())
            .fold(0.0, f64::max);
        if worst > SIC_OVERLAP_TOL {
            return Err(Error::NotSic(worst));
        }
        let frame_potential = frame_potential(&amplitudes, &ops);
        Ok(Self {
            dim,
            amplitudes,
            overlaps,
            frame_potential,
        })
    }

    /// The shipped `d = 4` fiducial.
    pub fn shipped_d4() -> Self {
        Self::from_cache_str(SHIPPED_D4_FIDUCIAL).expect("shipped fiducial is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn overlaps(&self) -> &[f64] {
        &self.overlaps
    }

    pub fn frame_potential(&self) -> f64 {
        self.frame_potential
    }

    pub fn frame_potential_floor(&self) -> f64 {
        frame_potential_floor(self.dim)
    }

    pub fn max_overlap_deviation(&self) -> f64 {
        let target = 1.0 / (self.dim as f64 + 1.0);
        self.overlaps
            .iter()
            .map(|o| (o - target).abs())
            .fold(0.0, f64::max)
    }

    /// `D_{jk} ψ` in displacement order.
    pub fn orbit(&self) -> Vec<Vec<C64>> {
        heisenberg_weyl(self.dim)
            .iter()
            .map(|d| d.mul_vec(&self.amplitudes))
            .collect()
    }

    /// Two-qubit concurrences of the orbit under the identification
    /// `|e0..e3> = |00>, |01>, |10>, |11>`; `None` unless `d = 4`.
    pub fn orbit_concurrences(&self) -> Option<Vec<f64>> {
        (self.dim == 4).then(|| {
            self.orbit()
                .iter()
                .map(|v| two_qubit_concurrence(v))
                .collect()
        })
    }

    pub fn has_uniform_concurrence(&self) -> bool {
        let target = 0.4f64.sqrt();
        self.orbit_concurrences().is_some_and(|cs| {
            cs.iter()
                .all(|q| (q - target).abs() <= UNIFORM_CONCURRENCE_TOL)
        })
    }

    /// `d=N` followed by one `re im` line per amplitude, 17 significant digits.
    pub fn to_cache_string(&self) -> String {
        let mut s = format!("d={}\n", self.dim);
        for z in &self.amplitudes {
            writeln!(s, "{:.16e} {:.16e}", z.re, z.im).expect("write to string");
        }
        s
    }

    pub fn from_cache_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Cache("empty file".into()))?;
        let dim: usize = header
            .strip_prefix("d=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Cache(format!("bad header {header:?}")))?;
        let mut amps = Vec::with_capacity(dim);
        for line in lines {
            let mut parts = line.split_whitespace();
            let mut next = || -> Result<f64> {
                parts
                    .next()
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| Error::Cache(format!("bad amplitude line {line:?}")))
            };
            let re = next()?;
            let im = next()?;
            amps.push(c(re, im));
        }
        if amps.len() != dim {
            return Err(Error::Cache(format!(
                "expected {dim} amplitudes, found {}",
                amps.len()
            )));
        }
        Self::from_amplitudes(amps)
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_cache_string()).map_err(|e| Error::Cache(e.to_string()))
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Cache(e.to_string()))?;
        Self::from_cache_str(&text)
    }
}

/// `Σ_{D≠1} |<ψ|D|ψ>|⁴` for a unit vector.
pub fn frame_potential(psi: &[C64], ops: &[ComplexMatrix]) -> f64 {
    ops[1..]
        .iter()
        .map(|d| inner(psi, &d.mul_vec(psi)).norm_sqr().powi(2))
        .sum()
}

/// `(d − 1) / (d + 1)`.
pub fn frame_potential_floor(d: usize) -> f64 {
    (d as f64 - 1.0) / (d as f64 + 1.0)
}

/// Residuals `|<ψ|D|ψ>|²/‖ψ‖⁴ − 1/(d+1)` and their Jacobian with respect to
/// the real coordinates `(Re ψ, Im ψ)`.
fn residuals_and_jacobian(x: &[f64], ops: &[ComplexMatrix]) -> (Vec<f64>, Vec<f64>) {
    let d = x.len() / 2;
    let psi: Vec<C64> = (0..d).map(|i| c(x[i], x[d + i])).collect();
    let n = psi.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let target = 1.0 / (d as f64 + 1.0);
    let m = ops.len() - 1;
    let mut r = Vec::with_capacity(m);
    let mut jac = Vec::with_capacity(m * 2 * d);
    for op in &ops[1..] {
        let dpsi = op.mul_vec(&psi);
        let ddag_psi = op.adjoint().mul_vec(&psi);
        let a = inner(&psi, &dpsi);
        let a2 = a.norm_sqr();
        r.push(a2 / (n * n) - target);
        let grad: Vec<C64> = (0..d)
            .map(|i| {
                (a.conj() * dpsi[i] + a * ddag_psi[i]) / (n * n) - psi[i] * (2.0 * a2 / (n * n * n))
            })
            .collect();
        jac.extend(grad.iter().map(|g| 2.0 * g.re));
        jac.extend(grad.iter().map(|g| 2.0 * g.im));
    }
    (r, jac)
}

fn sum_sq(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Levenberg–Marquardt descent on the frame-potential excess from `x0`.
fn minimize_frame_potential(mut x: Vec<f64>, ops: &[ComplexMatrix], max_iter: usize) -> Vec<f64> {
    let p = x.len();
    let (mut r, mut jac) = residuals_and_jacobian(&x, ops);
    let mut cost = sum_sq(&r);
    let mut mu = 1e-3;
    for _ in 0..max_iter {
        if cost < 1e-30 {
            break;
        }
        let m = r.len();
        let mut jtj = vec![0.0; p * p];
        let mut jtr = vec![0.0; p];
        for k in 0..m {
            let row = &jac[k * p..(k + 1) * p];
            for a in 0..p {
                jtr[a] += row[a] * r[k];
                for b in 0..p {
                    jtj[a * p + b] += row[a] * row[b];
                }
            }
        }
        let mut improved = false;
        while mu < 1e12 {
            let mut lhs = jtj.clone();
            for a in 0..p {
                lhs[a * p + a] += mu;
            }
            let rhs: Vec<f64> = jtr.iter().map(|g| -g).collect();
            let Some(step) = solve_spd(&lhs, &rhs) else {
                mu *= 4.0;
                continue;
            };
            let mut trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let tn = trial.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut trial {
                *v /= tn;
            }
            let (tr, tj) = residuals_and_jacobian(&trial, ops);
            let tc = sum_sq(&tr);
            if tc < cost {
                x = trial;
                r = tr;
                jac = tj;
                cost = tc;
                mu = (mu / 3.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 4.0;
        }
        if !improved {
            break;
        }
    }
    x
}

/// Fixes the global phase so the first non-negligible amplitude is real positive.
fn canonical_phase(mut psi: Vec<C64>) -> Vec<C64> {
    let n = vec_norm(&psi);
    for z in &mut psi {
        *z /= n;
    }
    if let Some(pivot) = psi.iter().find(|z| z.norm() > 1e-3).copied() {
        let ph = pivot.conj() / pivot.norm();
        for z in &mut psi {
            *z *= ph;
        }
    }
    psi
}

/// Random-restart search for a SIC fiducial in dimension `d ∈ 2..=6`.
/// Restart `i` draws its starting point from `RngStream::new(seed, i)`.
pub fn sic_fiducial_search(d: usize, seed: u64, opts: &SearchOptions) -> Result<Fiducial> {
    if !(2..=6).contains(&d) {
        return Err(Error::OutOfRange(format!(
            "SIC search supports 2 <= d <= 6, got {d}"
        )));
    }
    let ops = heisenberg_weyl(d);
    let floor = frame_potential_floor(d);
    let want_uniform = d == 4 && opts.require_uniform_concurrence;
    let mut best_excess = f64::INFINITY;
    let mut found = 0usize;
    for restart in 0..opts.restarts {
        let mut rng = RngStream::new(seed, restart as u64);
        let x0: Vec<f64> = (0..2 * d).map(|_| rng.normal()).collect();
        let x = minimize_frame_potential(x0, &ops, opts.max_iterations);
        let psi = canonical_phase((0..d).map(|i| c(x[i], x[d + i])).collect());
        let excess = frame_potential(&psi, &ops) - floor;
        best_excess = best_excess.min(excess);
        let Ok(fid) = Fiducial::from_amplitudes(psi) else {
            continue;
        };
        found += 1;
        if !want_uniform || fid.has_uniform_concurrence() {
            return Ok(fid);
        }
    }
    if found > 0 {
        Err(Error::NoUniformConcurrence {
            restarts: opts.restarts,
            found,
        })
    } else {
        Err(Error::SearchFailed {
            restarts: opts.restarts,
            best_excess,
        })
    }
}

fn bipartition(d: usize) -> Option<BipartiteDims> {
    (2..d)
        .find(|f| d.is_multiple_of(*f) && *f <= d / f)
        .and_then(|f| BipartiteDims::new(f, d / f).ok())
}

/// Rank-one POM `{(1/d) |ψ_{jk}><ψ_{jk}|}` from the fiducial orbit. Composite
/// dimensions get the bipartite structure `d1 ⊗ d2` with the smallest
/// nontrivial factor as `d1`.
pub fn sic_pom_from_fiducial(fid: &Fiducial) -> Pom {
    let d = fid.dim;
    let orbit = fid.orbit();
    let weights = vec![1.0 / d as f64; orbit.len()];
    Pom::rank_one(d, bipartition(d), weights, orbit).expect("SIC orbit is a complete POM")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_sic_is_a_tetrahedron() {
        let fid = sic_fiducial_search(2, 1, &SearchOptions::default()).unwrap();
        assert_eq!(fid.overlaps().len(), 6);
        assert!(fid.max_overlap_deviation() < 1e-8);
        for o in fid.overlaps() {
            assert!((o - 1.0 / 3.0).abs() < 1e-8);
        }
    }

    #[test]
    fn search_finds_d3_and_d5() {
        for d in [3, 5] {
            let fid = sic_fiducial_search(d, 9, &SearchOptions::default()).unwrap();
            assert!(fid.max_overlap_deviation() < 1e-8);
            let excess = fid.frame_potential() - fid.frame_potential_floor();
            assert!(excess.abs() < 1e-12, "d={d} excess={excess}");
        }
    }

    #[test]
    fn unsupported_dimension() {
        assert!(matches!(
            sic_fiducial_search(7, 0, &SearchOptions::default()),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let opts = SearchOptions {
            restarts: 2,
            max_iterations: 0,
            require_uniform_concurrence: true,
        };
        assert!(matches!(
            sic_fiducial_search(4, 0, &opts),
            Err(Error::SearchFailed { restarts: 2, .. })
        ));
    }

    #[test]
    fn cache_round_trip_is_exact() {
        let fid = Fiducial::shipped_d4();
        let text = fid.to_cache_string();
        assert!(text.starts_with("d=4\n"));
        assert_eq!(text.lines().count(), 5);
        let back = Fiducial::from_cache_str(&text).unwrap();
        assert_eq!(back.amplitudes(), fid.amplitudes());
    }

    #[test]
    fn cache_parse_errors() {
        assert!(matches!(Fiducial::from_cache_str(""), Err(Error::Cache(_))));
        assert!(matches!(
            Fiducial::from_cache_str("d=4\n1 0\n"),
            Err(Error::Cache(_))
        ));
        assert!(matches!(
            Fiducial::from_cache_str("dim 4\n"),
            Err(Error::Cache(_))
        ));
        // Normalized but not a fiducial.
        assert!(matches!(
            Fiducial::from_cache_str("d=2\n1 0\n0 0\n"),
            Err(Error::NotSic(_))
        ));
    }
}
