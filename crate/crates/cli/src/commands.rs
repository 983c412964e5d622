use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ehom_core::counting::{fs_cs_counting_matrix, CountingParams, CountingResult};
use ehom_core::distributions::DEFAULT_CNL_SLACK;
use ehom_core::quadrature::{Estimate, QuadratureSettings};
use ehom_core::spacetime::{
    fs_cs_interference_quadrature, hom_total_broadened_quadrature, hom_total_vs_tau_quadrature,
};
use ehom_core::{
    apply_efficiency, cnl_scan, enumerate_diagrams, fs_cs_total_vs_tau, hom_total_broadened, hom_total_vs_tau,
    joint_distribution, make_coherent, make_fock, make_thermal, mirror_pair_check, BipartiteInput, CnlReport, CwMode,
    Error, GaussianMode, JointDistribution, ScatteringMatrix, Truncation,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{ScenarioConfig, SweepParameter, TimeModel, TimeScanSpec};
use crate::error::CliError;
use crate::output::{emit, json, matrix_csv, Format};

/// Options shared by every subcommand.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub format: Format,
    pub cutoff: Option<usize>,
    pub tol: Option<f64>,
    pub expect_cnl: bool,
}

fn with_tolerance(mut cfg: ScenarioConfig, opts: &Options) -> ScenarioConfig {
    if opts.tol.is_some() {
        cfg.tolerance = opts.tol;
    }
    if opts.cutoff.is_some() {
        cfg.cutoff = opts.cutoff;
    }
    cfg
}

/// The output distribution of a scenario, thinned when a detector is given.
pub fn compute_full(cfg: &ScenarioConfig) -> Result<JointDistribution, CliError> {
    let input = cfg.input()?;
    let j = joint_distribution(&input, &cfg.splitter()?);
    Ok(match cfg.detector_model()? {
        Some(det) => apply_efficiency(&j, &det),
        None => j,
    })
}

fn cut(j: JointDistribution, cutoff: Option<usize>) -> JointDistribution {
    match cutoff {
        Some(max) => j.truncated(max),
        None => j,
    }
}

/// [`compute_full`] restricted to the configured output cutoff.
pub fn compute_joint(cfg: &ScenarioConfig) -> Result<JointDistribution, CliError> {
    Ok(cut(compute_full(cfg)?, cfg.cutoff))
}

pub fn joint_dist(cfg: ScenarioConfig, opts: &Options) -> Result<(), CliError> {
    let j = compute_joint(&with_tolerance(cfg, opts))?;
    let text = match opts.format {
        Format::Csv => matrix_csv(j.matrix(), None),
        Format::Json => json(&j)?,
    };
    emit(opts.out.as_deref(), &text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnlScanOutput {
    pub distribution: JointDistribution,
    pub report: CnlReport,
}

pub fn cnl_scan_cmd(cfg: ScenarioConfig, opts: &Options) -> Result<(), CliError> {
    let cfg = with_tolerance(cfg, opts);
    // judge the full grid; the cutoff only shapes what is written
    let full = compute_full(&cfg)?;
    let report = cnl_scan(&full, DEFAULT_CNL_SLACK);
    let distribution = cut(full, cfg.cutoff);
    eprintln!(
        "central nodal line {} (max diagonal {:e}, threshold {:e})",
        if report.present { "present" } else { "absent" },
        report.max_diagonal,
        report.threshold
    );
    let present = report.present;
    let text = match opts.format {
        Format::Csv => matrix_csv(distribution.matrix(), None),
        Format::Json => json(&CnlScanOutput { distribution, report })?,
    };
    emit(opts.out.as_deref(), &text)?;
    if opts.expect_cnl && !present {
        return Err(CliError::CnlAbsent);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeScanRow {
    pub value: f64,
    pub probability: f64,
    pub estimated_error: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeScanOutput {
    pub spec: TimeScanSpec,
    pub rows: Vec<TimeScanRow>,
}

fn quadrature_or_partial(r: ehom_core::Result<Estimate>) -> Result<(Estimate, bool), CliError> {
    match r {
        Ok(e) => Ok((e, true)),
        Err(Error::QuadratureNotConverged { value, estimate, .. }) => Ok((Estimate { value, error: estimate }, false)),
        Err(e) => Err(e.into()),
    }
}

fn time_point(spec: &TimeScanSpec, settings: &QuadratureSettings) -> Result<TimeScanRow, CliError> {
    let s = spec;
    let (closed, reference, quad) = match s.model {
        TimeModel::Hom => {
            let closed = hom_total_vs_tau(s.tau, s.delay, s.detuning);
            let (q, ok) = quadrature_or_partial(hom_total_vs_tau_quadrature(s.tau, s.delay, s.detuning, settings))?;
            (closed, closed, (q, ok))
        }
        TimeModel::HomBroadened => {
            let closed = hom_total_broadened(s.delay, s.broadening)?;
            let (q, ok) = quadrature_or_partial(hom_total_broadened_quadrature(s.delay, s.broadening, settings))?;
            (closed, closed, (q, ok))
        }
        TimeModel::FsCs => {
            let photon = GaussianMode::new(s.detuning, 0.0, s.coherence_time)?;
            let laser = CwMode::new(s.flux, 0.0, 0.0)?;
            let closed = fs_cs_total_vs_tau(s.tau, &photon, &laser, s.mean)?;
            // the constant pair term has no finite t0 integral; check the interference part
            let (q, ok) =
                quadrature_or_partial(fs_cs_interference_quadrature(s.tau, &photon, &laser, s.mean, settings))?;
            (closed.total, closed.interference_term, (q, ok))
        }
    };
    let (q, converged) = quad;
    Ok(TimeScanRow {
        value: 0.0,
        probability: closed,
        estimated_error: q.error.max((reference - q.value).abs()),
        converged,
    })
}

fn allowed(model: TimeModel, p: SweepParameter) -> bool {
    use SweepParameter as P;
    match model {
        TimeModel::Hom => matches!(p, P::Tau | P::Delay | P::Detuning),
        TimeModel::HomBroadened => matches!(p, P::Delay | P::Broadening),
        TimeModel::FsCs => matches!(p, P::Tau | P::Detuning),
    }
}

pub fn compute_time_scan(cfg: &ScenarioConfig, tol: Option<f64>) -> Result<TimeScanOutput, CliError> {
    let spec = cfg
        .time_scan
        .ok_or_else(|| CliError::Config("missing [time_scan]".into()))?;
    if !allowed(spec.model, spec.sweep.parameter) {
        return Err(CliError::Config(format!(
            "model {:?} cannot sweep {}",
            spec.model,
            spec.sweep.parameter.name()
        )));
    }
    let mut settings = QuadratureSettings::default();
    if let Some(t) = tol.or(cfg.tolerance) {
        if !(t > 0.0) {
            return Err(CliError::Config(format!("tolerance must be positive, got {t}")));
        }
        settings.abs_tol = t;
    }
    let mut rows = Vec::new();
    for value in spec.sweep.points() {
        let mut point = spec;
        match spec.sweep.parameter {
            SweepParameter::Tau => point.tau = value,
            SweepParameter::Delay => point.delay = value,
            SweepParameter::Detuning => point.detuning = value,
            SweepParameter::Broadening => point.broadening = value,
        }
        let row = time_point(&point, &settings)?;
        rows.push(TimeScanRow { value, ..row });
    }
    Ok(TimeScanOutput { spec, rows })
}

pub fn time_scan(cfg: ScenarioConfig, opts: &Options) -> Result<(), CliError> {
    let out = compute_time_scan(&cfg, opts.tol)?;
    let text = match opts.format {
        Format::Csv => {
            let mut s = format!("{},probability,estimated_error\n", out.spec.sweep.parameter.name());
            for r in &out.rows {
                let _ = writeln!(s, "{:e},{:e},{:e}", r.value, r.probability, r.estimated_error);
            }
            s
        }
        Format::Json => json(&out)?,
    };
    emit(opts.out.as_deref(), &text)?;
    let failed: Vec<String> = out
        .rows
        .iter()
        .filter(|r| !r.converged)
        .map(|r| format!("{:e}", r.value))
        .collect();
    if !failed.is_empty() {
        return Err(CliError::NotConverged(format!(
            "quadrature did not converge at {} = {}",
            out.spec.sweep.parameter.name(),
            failed.join(", ")
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingCell {
    pub n1: u32,
    pub n2: u32,
    pub result: CountingResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingOutput {
    pub params: CountingParams,
    pub cells: Vec<CountingCell>,
}

pub fn compute_counting(cfg: &ScenarioConfig, opts: &Options) -> Result<CountingOutput, CliError> {
    let spec = cfg
        .counting
        .ok_or_else(|| CliError::Config("missing [counting]".into()))?;
    let params = spec.params(opts.tol.or(cfg.tolerance))?;
    let max = opts.cutoff.or(cfg.cutoff).map_or(spec.max_count, |c| c as u32);
    let grid = fs_cs_counting_matrix(&params, max)?;
    let cells = grid
        .into_iter()
        .enumerate()
        .flat_map(|(n1, row)| {
            row.into_iter().enumerate().map(move |(n2, result)| CountingCell {
                n1: n1 as u32,
                n2: n2 as u32,
                result,
            })
        })
        .collect();
    Ok(CountingOutput { params, cells })
}

pub fn counting(cfg: ScenarioConfig, opts: &Options) -> Result<(), CliError> {
    let out = compute_counting(&cfg, opts)?;
    let text = match opts.format {
        Format::Csv => {
            let side = (out.cells.len() as f64).sqrt().round() as usize;
            let mut p = vec![vec![0.0; side]; side];
            let mut e = vec![vec![0.0; side]; side];
            for c in &out.cells {
                p[c.n1 as usize][c.n2 as usize] = c.result.total();
                e[c.n1 as usize][c.n2 as usize] = c.result.series_error_bound;
            }
            matrix_csv(&p, Some(&e))
        }
        Format::Json => json(&out)?,
    };
    emit(opts.out.as_deref(), &text)
}

/// Text listing of the coincidence diagrams of `|n, m>` with their exact
/// amplitudes and mirror-pair verdicts.
pub fn diagrams_report(n: u32, m: u32) -> Result<String, CliError> {
    if (n + m) % 2 == 1 {
        return Err(CliError::Config(format!(
            "n + m = {} is odd: no coincident output exists",
            n + m
        )));
    }
    let out = (n + m) / 2;
    let s = ScatteringMatrix::balanced();
    let mut text = format!("|{n},{m}> -> |{out},{out}> at a balanced beamsplitter\n");
    let mut total = 0.0;
    for d in enumerate_diagrams(n, m, out, out)? {
        let a = d.amplitude_exact(&s).expect("balanced splitter is exact");
        total += a.to_f64();
        let _ = writeln!(text, "  {d}  A_k = {a}");
    }
    let (lo, hi) = (n.min(m), n.max(m));
    let report = mirror_pair_check(lo, hi)?;
    if lo != n {
        let _ = writeln!(text, "mirror pairs of the port-exchanged input |{lo},{hi}>:");
    }
    for p in &report.pairs {
        let verdict = if p.cancels() {
            "cancel"
        } else if p.reinforces() {
            "reinforce"
        } else {
            "partial"
        };
        let _ = writeln!(
            text,
            "  pair ({}, {}): {} + {} = {}  {verdict}",
            p.k, p.partner, p.amplitude_k, p.amplitude_partner, p.sum
        );
    }
    if let Some((k, a)) = &report.unpaired_middle {
        let _ = writeln!(text, "  middle term k={k}: {a}");
    }
    let _ = writeln!(text, "total amplitude: {} ({total:e})", report.total);
    Ok(text)
}

pub fn diagrams(n: u32, m: u32, opts: &Options) -> Result<(), CliError> {
    emit(opts.out.as_deref(), &diagrams_report(n, m)?)
}

/// Joint distributions for Fock `n ∈ {0,1,2,3}` against coherent and thermal
/// light of mean `mean`, one file per panel, plus a verdict table on stdout.
pub fn cnl_gallery(mean: f64, opts: &Options) -> Result<(), CliError> {
    let dir = opts
        .out
        .as_deref()
        .ok_or_else(|| CliError::Config("cnl-gallery needs --out DIR".into()))?;
    std::fs::create_dir_all(dir)?;
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(CliError::Config(format!("mean must be non-negative, got {mean}")));
    }
    let trunc = match opts.tol {
        Some(t) => Truncation::with_tolerance(t),
        None => Truncation::default(),
    };
    let partners = [
        ("coherent", make_coherent(Complex64::new(mean.sqrt(), 0.0), &trunc)?),
        ("thermal", make_thermal(mean, &trunc)?),
    ];
    let mut table = String::from("fock,partner,cnl,max_diagonal,truncation_bound,file\n");
    for (name, partner) in &partners {
        for n in 0..=3u32 {
            let input = BipartiteInput::new(make_fock(n), partner.clone());
            let full = joint_distribution(&input, &ScatteringMatrix::balanced());
            let report = cnl_scan(&full, DEFAULT_CNL_SLACK);
            let j = cut(full, opts.cutoff);
            let file = panel_path(dir, n, name, opts.format);
            let text = match opts.format {
                Format::Csv => matrix_csv(j.matrix(), None),
                Format::Json => json(&CnlScanOutput {
                    distribution: j.clone(),
                    report: report.clone(),
                })?,
            };
            std::fs::write(&file, text)?;
            let _ = writeln!(
                table,
                "{n},{name},{},{:e},{:e},{}",
                if report.present { "present" } else { "absent" },
                report.max_diagonal,
                j.truncation_bound(),
                file.display()
            );
        }
    }
    emit(None, &table)
}

fn panel_path(dir: &Path, n: u32, partner: &str, format: Format) -> PathBuf {
    let ext = match format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    dir.join(format!("fock{n}_{partner}.{ext}"))
}
