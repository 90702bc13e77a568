//! Seeded Monte Carlo drivers: detection-ratio histograms over concurrence,
//! the formula check suite, and detection against purity.
//!
//! Work is split into fixed chunks of [`CHUNK`] samples; chunk `k` draws
//! from `RngStream::new(seed, k)`. Results depend only on the seed and the
//! sample count, not on the number of worker threads.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensembles::{
    bures_mean_purity, bures_mixed_matrix, haar_pure, haar_vector, hs_mean_purity, hs_mixed,
    hs_mixed_matrix, random_maximally_entangled, RngStream,
};
use crate::error::{Error, Result};
use crate::linalg::{eigvalsh, partial_transpose, BipartiteDims, ComplexMatrix, C64};
use crate::measurement::{
    pure_state_witnesses, sic_pom_from_fiducial, wom_from_rank_one, Fiducial, Wom,
};
use crate::states::{two_qubit_concurrence, wootters_matrix, PureState, ENTANGLEMENT_TOL, PPT_TOL};
use crate::stats::{binomial_stderr, Moments};
use crate::witness::{
    me_pt_witness_detection_ratio, pt_witness, pure_state_witness, pure_witness_detection_ratio,
    q_mean_var, Witness,
};

/// Samples per RNG stream.
pub const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateClass {
    /// Haar-random two-qubit pure states.
    PureHaar,
    /// Two-qubit mixed states from the Hilbert–Schmidt measure.
    MixedHs,
    /// Bell states under Haar-random local unitaries.
    BellLocal,
}

/// A set of witnesses applied to each sampled state; detection means at
/// least one fires.
#[derive(Debug, Clone)]
pub enum Detector {
    Witnesses {
        name: String,
        witnesses: Vec<Witness>,
    },
    Wom {
        name: String,
        wom: Box<Wom>,
    },
}

impl Detector {
    /// Pure-state witnesses `(|ψ_i><ψ_i|, λ₁)` of the SIC-POM outcomes.
    pub fn sic_pom(fid: &Fiducial) -> Result<Self> {
        let witnesses = pure_state_witnesses(&sic_pom_from_fiducial(fid))?;
        Ok(Self::Witnesses {
            name: "sic-pom".into(),
            witnesses,
        })
    }

    /// The witness operator measurement derived from the SIC-POM.
    pub fn sic_wom(fid: &Fiducial) -> Result<Self> {
        let wom = wom_from_rank_one(&sic_pom_from_fiducial(fid))?;
        Ok(Self::Wom {
            name: "sic-wom".into(),
            wom: Box::new(wom),
        })
    }

    pub fn custom(name: impl Into<String>, witnesses: Vec<Witness>) -> Result<Self> {
        let first = witnesses
            .first()
            .ok_or_else(|| Error::OutOfRange("empty witness set".into()))?
            .dims();
        if let Some(w) = witnesses.iter().find(|w| w.dims() != first) {
            return Err(Error::DimensionMismatch {
                expected: first.d(),
                got: w.dims().d(),
            });
        }
        Ok(Self::Witnesses {
            name: name.into(),
            witnesses,
        })
    }

    pub fn name(&self) -> &str {
        match self {
            Self::Witnesses { name, .. } | Self::Wom { name, .. } => name,
        }
    }

    pub fn dims(&self) -> BipartiteDims {
        match self {
            Self::Witnesses { witnesses, .. } => witnesses[0].dims(),
            Self::Wom { wom, .. } => wom.as_pom().dims().expect("WOM is bipartite"),
        }
    }

    pub fn fires(&self, rho: &ComplexMatrix) -> bool {
        match self {
            Self::Witnesses { witnesses, .. } => witnesses.iter().any(|w| w.fires(rho)),
            Self::Wom { wom, .. } => (0..wom.outcomes().len()).any(|i| wom.outcome_fires(i, rho)),
        }
    }

    pub fn fires_pure(&self, psi: &[C64]) -> bool {
        match self {
            Self::Witnesses { witnesses, .. } => witnesses.iter().any(|w| w.fires_pure(psi)),
            Self::Wom { wom, .. } => {
                (0..wom.outcomes().len()).any(|i| wom.outcome_fires_pure(i, psi))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub samples: u64,
    pub bins: usize,
    pub state_class: StateClass,
    /// Worker threads; 0 uses the ambient rayon pool.
    pub workers: usize,
    /// Bins with fewer samples report no ratio.
    pub min_bin_count: u64,
}

impl ExperimentConfig {
    pub fn new(seed: u64, samples: u64, state_class: StateClass) -> Self {
        Self {
            seed,
            samples,
            bins: 20,
            state_class,
            workers: 0,
            min_bin_count: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub total: u64,
    pub detected: u64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionHistogram {
    pub bins: Vec<HistogramBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionSummary {
    pub overall_ratio: Option<f64>,
    pub ratio_conc_gt_half: Option<f64>,
    pub samples: u64,
    pub seed: u64,
    pub detector: String,
    pub state_class: StateClass,
    /// Samples with nonzero concurrence.
    pub entangled: u64,
    /// Entangled samples detected.
    pub detected: u64,
    pub entangled_conc_gt_half: u64,
    pub detected_conc_gt_half: u64,
    /// PPT (hence separable) samples that were flagged.
    pub false_positives: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub histogram: DetectionHistogram,
    pub summary: DetectionSummary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    total: Vec<u64>,
    detected: Vec<u64>,
    entangled: u64,
    detected_entangled: u64,
    gt_half: u64,
    detected_gt_half: u64,
    false_positives: u64,
}

impl Tally {
    fn new(bins: usize) -> Self {
        Self {
            total: vec![0; bins],
            detected: vec![0; bins],
            entangled: 0,
            detected_entangled: 0,
            gt_half: 0,
            detected_gt_half: 0,
            false_positives: 0,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.total.iter_mut().zip(other.total) {
            *a += b;
        }
        for (a, b) in self.detected.iter_mut().zip(other.detected) {
            *a += b;
        }
        self.entangled += other.entangled;
        self.detected_entangled += other.detected_entangled;
        self.gt_half += other.gt_half;
        self.detected_gt_half += other.detected_gt_half;
        self.false_positives += other.false_positives;
        self
    }

    fn record(&mut self, conc: f64, detected: bool, is_ppt: impl FnOnce() -> bool) {
        if conc <= ENTANGLEMENT_TOL {
            if detected && is_ppt() {
                self.false_positives += 1;
            }
            return;
        }
        let bins = self.total.len();
        let b = ((conc * bins as f64) as usize).min(bins - 1);
        self.total[b] += 1;
        self.entangled += 1;
        if conc > 0.5 {
            self.gt_half += 1;
        }
        if detected {
            self.detected[b] += 1;
            self.detected_entangled += 1;
            if conc > 0.5 {
                self.detected_gt_half += 1;
            }
        }
    }
}

fn is_ppt(rho: &ComplexMatrix, dims: BipartiteDims) -> bool {
    let pt = partial_transpose(rho, dims).expect("dims match");
    eigvalsh(&pt)[0] >= -PPT_TOL
}

/// Runs `f` on a pool with `workers` threads, or on the ambient pool when
/// `workers == 0`.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::OutOfRange(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Maps chunk `k` (of size at most [`CHUNK`]) with `RngStream::new(seed,
/// stream_base + k)` and folds the results with `merge`.
fn chunked<T, F, M>(seed: u64, stream_base: u64, samples: u64, identity: T, f: F, merge: M) -> T
where
    T: Send + Clone + Sync,
    F: Fn(&mut RngStream, u64) -> T + Sync,
    M: Fn(T, T) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = RngStream::new(seed, stream_base + k);
            let n = CHUNK.min(samples - k * CHUNK);
            f(&mut rng, n)
        })
        .reduce(|| identity.clone(), &merge)
}

/// Histogram of detection ratio against concurrence for a two-qubit
/// detector. Separable samples are skipped in the bins but checked for
/// false positives.
pub fn detection_ratio_experiment(
    cfg: &ExperimentConfig,
    detector: &Detector,
) -> Result<DetectionReport> {
    let dims = detector.dims();
    if !dims.is_two_qubit() {
        return Err(Error::NotTwoQubit {
            d1: dims.d1(),
            d2: dims.d2(),
        });
    }
    if cfg.samples == 0 || cfg.bins < 2 {
        return Err(Error::OutOfRange("need samples >= 1 and bins >= 2".into()));
    }
    let bins = cfg.bins;
    let class = cfg.state_class;
    let tally = with_workers(cfg.workers, || {
        chunked(
            cfg.seed,
            0,
            cfg.samples,
            Tally::new(bins),
            |rng, n| {
                let mut t = Tally::new(bins);
                for _ in 0..n {
                    match class {
                        StateClass::PureHaar | StateClass::BellLocal => {
                            let psi = match class {
                                StateClass::PureHaar => haar_vector(4, rng),
                                _ => random_maximally_entangled(dims, rng).amplitudes().to_vec(),
                            };
                            let conc = two_qubit_concurrence(&psi);
                            let hit = detector.fires_pure(&psi);
                            t.record(conc, hit, || is_ppt(&ComplexMatrix::projector(&psi), dims));
                        }
                        StateClass::MixedHs => {
                            let rho = hs_mixed_matrix(4, rng);
                            let conc = wootters_matrix(&rho);
                            let hit = detector.fires(&rho);
                            t.record(conc, hit, || is_ppt(&rho, dims));
                        }
                    }
                }
                t
            },
            Tally::merge,
        )
    })?;

    let width = 1.0 / bins as f64;
    let hist = DetectionHistogram {
        bins: (0..bins)
            .map(|b| HistogramBin {
                bin_lo: b as f64 * width,
                bin_hi: if b + 1 == bins {
                    1.0
                } else {
                    (b + 1) as f64 * width
                },
                total: tally.total[b],
                detected: tally.detected[b],
                ratio: ratio_or_none(tally.detected[b], tally.total[b], cfg.min_bin_count),
            })
            .collect(),
    };
    let summary = DetectionSummary {
        overall_ratio: ratio_or_none(tally.detected_entangled, tally.entangled, 1),
        ratio_conc_gt_half: ratio_or_none(tally.detected_gt_half, tally.gt_half, 1),
        samples: cfg.samples,
        seed: cfg.seed,
        detector: detector.name().to_string(),
        state_class: class,
        entangled: tally.entangled,
        detected: tally.detected_entangled,
        entangled_conc_gt_half: tally.gt_half,
        detected_conc_gt_half: tally.detected_gt_half,
        false_positives: tally.false_positives,
    };
    Ok(DetectionReport {
        histogram: hist,
        summary,
    })
}

fn ratio_or_none(k: u64, n: u64, min: u64) -> Option<f64> {
    (n >= min.max(1)).then(|| k as f64 / n as f64)
}

/// One comparison of a sampled statistic with its closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub value: f64,
    pub reference: f64,
    pub stderr: f64,
    /// `|value − reference| <= 3 stderr`.
    pub pass: bool,
}

impl CheckLine {
    fn new(name: &str, value: f64, reference: f64, stderr: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            reference,
            stderr,
            pass: (value - reference).abs() <= 3.0 * stderr,
        }
    }
}

/// Fraction of `samples` Haar pure states in `dims` for which `hit` holds,
/// with its binomial standard error.
pub fn sampled_fraction(
    seed: u64,
    stream_base: u64,
    samples: u64,
    dims: BipartiteDims,
    hit: impl Fn(&PureState) -> bool + Sync,
) -> (f64, f64) {
    let k = chunked(
        seed,
        stream_base,
        samples,
        0u64,
        |rng, n| (0..n).filter(|_| hit(&haar_pure(dims, rng))).count() as u64,
        |a, b| a + b,
    );
    let p = k as f64 / samples as f64;
    (p, binomial_stderr(p, samples))
}

/// Moments of `g(rng)` over `samples` draws.
pub fn sampled_moments(
    seed: u64,
    stream_base: u64,
    samples: u64,
    g: impl Fn(&mut RngStream) -> f64 + Sync,
) -> Moments {
    chunked(
        seed,
        stream_base,
        samples,
        Moments::new(),
        |rng, n| {
            let mut m = Moments::new();
            for _ in 0..n {
                m.push(g(rng));
            }
            m
        },
        |a, b| a.merge(&b),
    )
}

/// Stream offset separating the check lines; chunk indices stay below it.
const LINE_STREAM: u64 = 1 << 32;

/// Sampled values of the detection ratios, the `Q^{T2}` mean and variance,
/// the mean purities and the maximally entangled partial-transpose ratio,
/// each against its closed form.
pub fn formula_check_suite(seed: u64, samples: u64) -> Result<Vec<CheckLine>> {
    if samples < 2 {
        return Err(Error::OutOfRange("need samples >= 2".into()));
    }
    let mut lines = Vec::new();
    let mut line_id = 0u64;
    let mut next = || {
        line_id += 1;
        line_id * LINE_STREAM
    };

    for (label, d1, d2) in [
        ("pure witness ratio, Bell 2x2", 2, 2),
        ("pure witness ratio, maximally entangled 2x3", 2, 3),
        ("pure witness ratio, maximally entangled 3x3", 3, 3),
    ] {
        let dims = BipartiteDims::new(d1, d2)?;
        let w = pure_state_witness(&PureState::maximally_entangled(dims))?;
        let reference = pure_witness_detection_ratio(w.threshold(), dims)?;
        let (p, se) = sampled_fraction(seed, next(), samples, dims, |phi| {
            w.fires_pure(phi.amplitudes())
        });
        lines.push(CheckLine::new(label, p, reference, se));
    }

    let dims = BipartiteDims::two_qubits();
    let q = hs_mixed(dims, &mut RngStream::new(seed, next()));
    let qpt = q.partial_transpose();
    let (mean, var) = q_mean_var(&q);
    let m = sampled_moments(seed, next(), samples, |rng| {
        qpt.expectation(&haar_vector(4, rng))
    });
    lines.push(CheckLine::new(
        "Q^T2 mean, d=4",
        m.mean(),
        mean,
        m.mean_stderr(),
    ));
    lines.push(CheckLine::new(
        "Q^T2 variance, d=4",
        m.variance(),
        var,
        m.variance_stderr(),
    ));

    for d in [2usize, 4] {
        let m = sampled_moments(seed, next(), samples, |rng| {
            let r = hs_mixed_matrix(d, rng);
            r.hs_inner(&r).re
        });
        lines.push(CheckLine::new(
            &format!("HS mean purity, d={d}"),
            m.mean(),
            hs_mean_purity(d),
            m.mean_stderr(),
        ));
        let m = sampled_moments(seed, next(), samples, |rng| {
            let r = bures_mixed_matrix(d, rng);
            r.hs_inner(&r).re
        });
        lines.push(CheckLine::new(
            &format!("Bures mean purity, d={d}"),
            m.mean(),
            bures_mean_purity(d),
            m.mean_stderr(),
        ));
    }

    let w = pt_witness(&PureState::maximally_entangled(dims))?;
    let (p, se) = sampled_fraction(seed, next(), samples, dims, |phi| {
        w.fires_pure(phi.amplitudes())
    });
    lines.push(CheckLine::new(
        "maximally entangled PT witness ratio, d1=2",
        p,
        me_pt_witness_detection_ratio(2)?,
        se,
    ));
    Ok(lines)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurityRow {
    pub purity_lo: f64,
    pub purity_hi: f64,
    pub entangled: u64,
    pub detected: u64,
    pub fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurityTable {
    pub rows: Vec<PurityRow>,
    /// Whether the populated fractions never decrease with purity.
    pub monotone: bool,
}

/// Detection of HS-random two-qubit states by the Bell partial-transpose
/// witness, binned by purity over `[1/4, 1]`; fractions are among
/// entangled states.
pub fn mixed_detection_vs_purity(seed: u64, samples: u64, bins: usize) -> Result<PurityTable> {
    if samples == 0 || bins < 2 {
        return Err(Error::OutOfRange("need samples >= 1 and bins >= 2".into()));
    }
    let dims = BipartiteDims::two_qubits();
    let w = pt_witness(&PureState::maximally_entangled(dims))?;
    let lo = 0.25;
    let width = (1.0 - lo) / bins as f64;
    let (ent, det) = chunked(
        seed,
        0,
        samples,
        (vec![0u64; bins], vec![0u64; bins]),
        |rng, n| {
            let mut ent = vec![0u64; bins];
            let mut det = vec![0u64; bins];
            for _ in 0..n {
                let rho = hs_mixed_matrix(4, rng);
                if wootters_matrix(&rho) <= ENTANGLEMENT_TOL {
                    continue;
                }
                let p = rho.hs_inner(&rho).re;
                let b = (((p - lo) / width).max(0.0) as usize).min(bins - 1);
                ent[b] += 1;
                if w.fires(&rho) {
                    det[b] += 1;
                }
            }
            (ent, det)
        },
        |(mut e1, mut d1), (e2, d2)| {
            for (a, b) in e1.iter_mut().zip(e2) {
                *a += b;
            }
            for (a, b) in d1.iter_mut().zip(d2) {
                *a += b;
            }
            (e1, d1)
        },
    );
    let rows: Vec<PurityRow> = (0..bins)
        .map(|b| PurityRow {
            purity_lo: lo + b as f64 * width,
            purity_hi: if b + 1 == bins {
                1.0
            } else {
                lo + (b + 1) as f64 * width
            },
            entangled: ent[b],
            detected: det[b],
            fraction: ratio_or_none(det[b], ent[b], 1),
        })
        .collect();
    let fr: Vec<f64> = rows.iter().filter_map(|r| r.fraction).collect();
    let monotone = fr.windows(2).all(|w| w[1] >= w[0]);
    Ok(PurityTable { rows, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(class: StateClass, samples: u64) -> ExperimentConfig {
        ExperimentConfig::new(7, samples, class)
    }

    #[test]
    fn histogram_shape_and_counts() {
        let det = Detector::sic_wom(&Fiducial::shipped_d4()).unwrap();
        let r = detection_ratio_experiment(&cfg(StateClass::MixedHs, 5000), &det).unwrap();
        let bins = &r.histogram.bins;
        assert_eq!(bins.len(), 20);
        assert_eq!(bins[0].bin_lo, 0.0);
        assert_eq!(bins[19].bin_hi, 1.0);
        for w in bins.windows(2) {
            assert_eq!(w[0].bin_hi, w[1].bin_lo);
        }
        let total: u64 = bins.iter().map(|b| b.total).sum();
        assert_eq!(total, r.summary.entangled);
        assert!(bins.iter().all(|b| b.detected <= b.total));
        assert!(bins.iter().all(|b| b.ratio.is_none() == (b.total < 100)));
        assert_eq!(r.summary.false_positives, 0);
    }

    #[test]
    fn independent_of_worker_count() {
        let det = Detector::sic_wom(&Fiducial::shipped_d4()).unwrap();
        let mut c = cfg(StateClass::PureHaar, 3 * CHUNK + 17);
        c.workers = 1;
        let a = detection_ratio_experiment(&c, &det).unwrap();
        c.workers = 3;
        let b = detection_ratio_experiment(&c, &det).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_config() {
        let det = Detector::sic_pom(&Fiducial::shipped_d4()).unwrap();
        let mut c = cfg(StateClass::PureHaar, 10);
        c.bins = 1;
        assert!(detection_ratio_experiment(&c, &det).is_err());
        let dims = BipartiteDims::new(2, 3).unwrap();
        let w = pure_state_witness(&PureState::maximally_entangled(dims)).unwrap();
        let custom = Detector::custom("me", vec![w]).unwrap();
        assert!(matches!(
            detection_ratio_experiment(&cfg(StateClass::PureHaar, 10), &custom),
            Err(Error::NotTwoQubit { .. })
        ));
        assert!(Detector::custom("none", vec![]).is_err());
    }

    #[test]
    fn bell_states_are_all_binned_at_the_top() {
        let det = Detector::sic_wom(&Fiducial::shipped_d4()).unwrap();
        let r = detection_ratio_experiment(&cfg(StateClass::BellLocal, 500), &det).unwrap();
        assert_eq!(r.histogram.bins[19].total, 500);
    }

    #[test]
    fn maximally_mixed_never_detected_by_bell_pt_witness() {
        let w = pt_witness(&PureState::maximally_entangled(BipartiteDims::two_qubits())).unwrap();
        assert!(!w.fires(&ComplexMatrix::identity(4).scale(0.25)));
    }

    #[test]
    fn purity_table_shape() {
        let t = mixed_detection_vs_purity(3, 4000, 5).unwrap();
        assert_eq!(t.rows.len(), 5);
        assert_eq!(t.rows[0].purity_lo, 0.25);
        assert_eq!(t.rows[4].purity_hi, 1.0);
        assert!(t.rows.iter().all(|r| r.detected <= r.entangled));
    }

    #[test]
    fn check_suite_small_run() {
        let lines = formula_check_suite(1, 2000).unwrap();
        assert_eq!(lines.len(), 10);
        assert!(lines.iter().all(|l| l.stderr.is_finite() && l.stderr > 0.0));
    }
}
