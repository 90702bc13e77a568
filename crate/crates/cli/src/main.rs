mod args;
mod output;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{
    CheckCommand, Cli, Command, DetectCommand, DetectorArg, Format, GlobalOpts, PomArg, SicCommand,
    StateArg, StatesArg, TomoCommand, WitnessCommand, WomCommand,
};
use output::{csv_f64, csv_opt, emit, to_json};
use wom_core::ensembles::{hs_mixed_matrix, RngStream};
use wom_core::experiments::{
    detection_ratio_experiment, formula_check_suite, with_workers, CheckLine, DetectionReport,
    Detector, ExperimentConfig, StateClass,
};
use wom_core::linalg::{hermitian_eig, BipartiteDims, ComplexMatrix};
use wom_core::measurement::{
    is_ic, sic_fiducial_search, sic_pom_from_fiducial, wom_from_rank_one, Fiducial, SearchOptions,
    SIC_OVERLAP_TOL,
};
use wom_core::states::{negativity, wootters_concurrence, PureState, StandardFormParams};
use wom_core::tomography::{mse_experiment, DualFrame, MseJob, MseModel, TomographyRun};
use wom_core::witness::pt_witness;
use wom_core::Error;

/// Structural checks on constructed objects use this tolerance.
const VERIFY_TOL: f64 = 1e-8;

enum Failure {
    /// Bad argument values not caught by the parser; exit 2.
    Usage(String),
    /// A search, verification or computation failed; exit 1.
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange(_) => Failure::Usage(e.to_string()),
            other => Failure::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

/// Rendered output plus whether every verification in it passed.
struct Report {
    text: String,
    ok: bool,
    /// Extra line for stderr, e.g. a summary next to CSV rows.
    note: Option<String>,
}

impl Report {
    fn new(text: String, ok: bool) -> Self {
        Self {
            text,
            ok,
            note: None,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Sic(SicCommand::Build { d, cache }) => sic_build(g, *d as usize, cache.as_deref()),
        Command::Wom(WomCommand::Build) => wom_build(g),
        Command::Detect(DetectCommand::Ratio { states, detector }) => {
            detect_ratio(g, *states, *detector)
        }
        Command::Tomo(TomoCommand::Mse {
            pom,
            state,
            n,
            trials,
        }) => tomo_mse(g, *pom, *state, *n, *trials as usize),
        Command::Check(CheckCommand::Formulas) => check_formulas(g),
        Command::Witness(WitnessCommand::Info { alpha }) => witness_info(g, *alpha),
    };
    match result {
        Ok(report) => {
            if let Err(e) = emit(g.out.as_deref(), &report.text) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if let Some(note) = report.note {
                eprintln!("{note}");
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: verification failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn workers(g: &GlobalOpts) -> usize {
    g.workers
        .map(|w| w as usize)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn json_only(g: &GlobalOpts, what: &str) -> Result<(), Failure> {
    match g.format {
        Some(Format::Csv) => Err(Failure::Usage(format!(
            "{what} supports only --format json"
        ))),
        _ => Ok(()),
    }
}

fn line(s: String) -> String {
    s + "\n"
}

#[derive(Serialize)]
struct SicReport {
    d: usize,
    seed: u64,
    source: &'static str,
    frame_potential: f64,
    frame_potential_floor: f64,
    max_overlap_deviation: f64,
    orbit_concurrences: Option<Vec<f64>>,
    uniform_concurrence: Option<bool>,
    amplitudes: Vec<[f64; 2]>,
    verified: bool,
}

fn sic_build(g: &GlobalOpts, d: usize, cache: Option<&Path>) -> Outcome {
    json_only(g, "sic build")?;
    let opts = SearchOptions::default();
    let (fid, source) = match cache {
        Some(p) if p.exists() => (Fiducial::read_cache(p)?, "cache"),
        _ => {
            let fid = sic_fiducial_search(d, g.seed, &opts)?;
            if let Some(p) = cache {
                fid.write_cache(p)?;
            }
            (fid, "search")
        }
    };
    if fid.dim() != d {
        return Err(Failure::Failed(format!(
            "cached fiducial has d={}, requested d={d}",
            fid.dim()
        )));
    }
    let uniform = (d == 4).then(|| fid.has_uniform_concurrence());
    let verified = fid.max_overlap_deviation() <= SIC_OVERLAP_TOL
        && (!opts.require_uniform_concurrence || uniform != Some(false));
    let report = SicReport {
        d,
        seed: g.seed,
        source,
        frame_potential: fid.frame_potential(),
        frame_potential_floor: fid.frame_potential_floor(),
        max_overlap_deviation: fid.max_overlap_deviation(),
        orbit_concurrences: fid.orbit_concurrences(),
        uniform_concurrence: uniform,
        amplitudes: fid.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        verified,
    };
    Ok(Report::new(line(to_json(&report)), verified))
}

#[derive(Serialize)]
struct WomReport {
    lambda_max: f64,
    lambda_max_closed_form: f64,
    threshold: f64,
    normalization: f64,
    outcomes: usize,
    completeness_deviation: f64,
    informationally_complete: bool,
    pairwise_hs_inner: f64,
    pairwise_hs_spread: f64,
    outcome_spectra: Vec<Vec<f64>>,
    verified: bool,
}

fn wom_build(g: &GlobalOpts) -> Outcome {
    json_only(g, "wom build")?;
    let wom = wom_from_rank_one(&sic_pom_from_fiducial(&Fiducial::shipped_d4()))?;
    let d = 4;
    let sum = wom
        .outcomes()
        .iter()
        .fold(ComplexMatrix::zeros(d, d), |a, b| &a + b);
    let completeness = sum.max_abs_diff(&ComplexMatrix::identity(d));
    let gram = wom.as_pom().gram();
    let gram = &gram;
    let n = wom.outcomes().len();
    let off: Vec<f64> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| gram[i * n + j]))
        .collect();
    let lo = off.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = off.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spectra = wom
        .outcomes()
        .iter()
        .map(|o| hermitian_eig(o).map(|e| e.eigenvalues))
        .collect::<Result<Vec<_>, _>>()?;
    let closed = 0.5 * (1.0 + 0.6f64.sqrt());
    let ic = is_ic(wom.as_pom());
    let verified = completeness <= VERIFY_TOL
        && ic
        && hi - lo <= VERIFY_TOL
        && (wom.lambda_max() - closed).abs() <= VERIFY_TOL;
    let report = WomReport {
        lambda_max: wom.lambda_max(),
        lambda_max_closed_form: closed,
        threshold: wom.threshold(),
        normalization: wom.normalization(),
        outcomes: n,
        completeness_deviation: completeness,
        informationally_complete: ic,
        pairwise_hs_inner: 0.5 * (hi + lo),
        pairwise_hs_spread: hi - lo,
        outcome_spectra: spectra,
        verified,
    };
    Ok(Report::new(line(to_json(&report)), verified))
}

fn detect_ratio(g: &GlobalOpts, states: StatesArg, detector: DetectorArg) -> Outcome {
    let fid = Fiducial::shipped_d4();
    let det = match detector {
        DetectorArg::Pom => Detector::sic_pom(&fid)?,
        DetectorArg::Wom => Detector::sic_wom(&fid)?,
    };
    let class = match states {
        StatesArg::Pure => StateClass::PureHaar,
        StatesArg::Mixed => StateClass::MixedHs,
    };
    let mut cfg = ExperimentConfig::new(g.seed, g.samples, class);
    cfg.bins = g.bins as usize;
    cfg.workers = workers(g);
    let report = detection_ratio_experiment(&cfg, &det)?;
    let ok = report.summary.false_positives == 0;
    Ok(match g.format.unwrap_or(Format::Csv) {
        Format::Json => Report::new(line(to_json(&report)), ok),
        Format::Csv => Report {
            text: histogram_csv(&report),
            ok,
            note: Some(to_json(&report.summary)),
        },
    })
}

fn histogram_csv(r: &DetectionReport) -> String {
    let mut s = String::from("bin_lo,bin_hi,total,detected,ratio\n");
    for b in &r.histogram.bins {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_f64(b.bin_lo),
            csv_f64(b.bin_hi),
            b.total,
            b.detected,
            csv_opt(b.ratio)
        ));
    }
    s
}

fn tomo_mse(g: &GlobalOpts, pom: PomArg, state: StateArg, n: u64, trials: usize) -> Outcome {
    let sic = sic_pom_from_fiducial(&Fiducial::shipped_d4());
    let wom = wom_from_rank_one(&sic)?;
    let (measurement, model, kind) = match pom {
        PomArg::Sic => (&sic, MseModel::Sic, "sic"),
        PomArg::Wom => (
            wom.as_pom(),
            MseModel::Wom {
                lambda_max: wom.lambda_max(),
            },
            "wom",
        ),
    };
    let dims = BipartiteDims::two_qubits();
    let (rho, label) = match state {
        StateArg::Mixed => (ComplexMatrix::identity(4).scale(0.25), "mixed"),
        StateArg::Bell => (PureState::maximally_entangled(dims).projector(), "bell"),
        StateArg::Random => (
            hs_mixed_matrix(4, &mut RngStream::new(g.seed, u64::MAX)),
            "random",
        ),
    };
    let dual = DualFrame::new(measurement)?;
    let run = with_workers(workers(g), || {
        mse_experiment(MseJob {
            pom: measurement,
            dual: &dual,
            rho: &rho,
            n,
            trials,
            seed: g.seed,
            model,
            pom_kind: kind,
            state_label: label,
        })
    })??;
    Ok(match g.format.unwrap_or(Format::Json) {
        Format::Json => Report::new(line(to_json(&run)), true),
        Format::Csv => Report::new(tomo_csv(&run), true),
    })
}

fn tomo_csv(r: &TomographyRun) -> String {
    format!(
        "pom_kind,d,N,trials,state_label,empirical_mse,formula_mse,stderr\n{},{},{},{},{},{},{},{}\n",
        r.pom_kind,
        r.d,
        r.n,
        r.trials,
        r.state_label,
        csv_f64(r.empirical_mse),
        csv_f64(r.formula_mse),
        csv_f64(r.stderr)
    )
}

#[derive(Serialize)]
struct CheckReport<'a> {
    seed: u64,
    samples: u64,
    lines: &'a [CheckLine],
    all_pass: bool,
}

fn check_formulas(g: &GlobalOpts) -> Outcome {
    let lines = with_workers(workers(g), || formula_check_suite(g.seed, g.samples))??;
    let all_pass = lines.iter().all(|l| l.pass);
    let text = match g.format.unwrap_or(Format::Json) {
        Format::Json => line(to_json(&CheckReport {
            seed: g.seed,
            samples: g.samples,
            lines: &lines,
            all_pass,
        })),
        Format::Csv => {
            let mut s = String::from("name,value,reference,stderr,pass\n");
            for l in &lines {
                s.push_str(&format!(
                    "\"{}\",{},{},{},{}\n",
                    l.name,
                    csv_f64(l.value),
                    csv_f64(l.reference),
                    csv_f64(l.stderr),
                    l.pass
                ));
            }
            s
        }
    };
    Ok(Report::new(text, all_pass))
}

#[derive(Serialize)]
struct WitnessReport {
    alpha: f64,
    q: f64,
    p: f64,
    lambda_max: f64,
    pure_witness_threshold: f64,
    threshold: f64,
    threshold_closed_form: f64,
    witness_concurrence: f64,
    witness_concurrence_closed_form: f64,
    witness_negativity: f64,
    witness_negativity_closed_form: f64,
    verified: bool,
}

fn witness_info(g: &GlobalOpts, alpha: f64) -> Outcome {
    json_only(g, "witness info")?;
    let StandardFormParams { alpha, q, p } = StandardFormParams::from_alpha(alpha)?;
    let w = pt_witness(&PureState::standard_form(alpha))?;
    let conc = wootters_concurrence(w.op())?;
    let neg = negativity(w.op());
    let mu = (1.0 + p) / (2.0 + 4.0 * p);
    let conc_cf = q / (1.0 + 2.0 * p);
    let neg_cf = (1.0 - p) / (1.0 + 2.0 * p);
    let verified = (w.threshold() - mu).abs() <= VERIFY_TOL
        && (conc - conc_cf).abs() <= VERIFY_TOL
        && (neg - neg_cf).abs() <= VERIFY_TOL;
    let report = WitnessReport {
        alpha,
        q,
        p,
        lambda_max: 0.5 * (1.0 + p),
        pure_witness_threshold: alpha.cos().powi(2),
        threshold: w.threshold(),
        threshold_closed_form: mu,
        witness_concurrence: conc,
        witness_concurrence_closed_form: conc_cf,
        witness_negativity: neg,
        witness_negativity_closed_form: neg_cf,
        verified,
    };
    Ok(Report::new(line(to_json(&report)), verified))
}
