//! `qsep` command-line front end.
//!
//! [`run`] does all the work and returns the process exit code, so the binary is a
//! thin wrapper and tests can drive the CLI in-process.

pub mod document;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qsep_core::states::{
    pure_to_density, random_mixed, random_pure, random_separable, schmidt_decompose, seeded_rng,
    werner,
};
use qsep_core::{
    certify, chsh_max, concurrence, expansion_coefficients, expectation_identity_check,
    hefei_margins, verify_algebra, AlgebraReport64, DensityMatrix64, EulerAngles64, LocalFrame64,
    SearchConfig, Verdict,
};

pub use document::{ReportDocument, StateDocument};

pub const EXIT_SEPARABLE: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_ENTANGLED: i32 = 3;
pub const EXIT_BOUNDARY: i32 = 4;

/// Residual bound for `verify`.
pub const VERIFY_BOUND: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("invalid state: {0}")]
    State(String),
    #[error("invalid argument: {0}")]
    Usage(String),
}

pub fn verdict_exit_code(v: Verdict) -> i32 {
    match v {
        Verdict::Separable => EXIT_SEPARABLE,
        Verdict::Entangled => EXIT_ENTANGLED,
        Verdict::Boundary => EXIT_BOUNDARY,
    }
}

const EXIT_HELP: &str = "\
Exit codes:
  0  separable (or command succeeded)
  1  input error: unreadable/malformed file, invalid state, bad argument
  2  check failure: verify residual above 1e-9, or bench verdict disagreement
  3  entangled
  4  boundary: |min m_plus| within the violation threshold";

#[derive(Debug, Parser)]
#[command(
    name = "qsep",
    version,
    about = "Two-qubit entanglement certification over local frames, checked against PPT"
)]
#[command(after_help = EXIT_HELP)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Emit JSON instead of text/CSV
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for all randomness
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Tolerance for state validation and the PPT boundary band
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Grid points per Euler angle in the frame search
    #[arg(long, global = true, default_value_t = 8)]
    pub grid: usize,
    /// Suppress human-readable output (JSON is still printed with --json)
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze a state file ({"kind": "pure"|"density", "data": ...})
    #[command(after_help = EXIT_HELP)]
    Analyze { path: PathBuf },
    /// Werner family rho = (1-beta)/4 + beta |singlet><singlet|
    Werner(WernerArgs),
    /// Compare the frame search against PPT on a random ensemble
    Bench(BenchArgs),
    /// Check the gamma-matrix algebra and trace identities numerically
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct WernerArgs {
    /// Analyze a single beta in [-1/3, 1]
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// CSV scan "from,to,steps" (steps points, endpoints included)
    #[arg(long, value_parser = parse_scan, allow_hyphen_values = true)]
    pub scan: Option<Scan>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scan {
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl Scan {
    pub fn betas(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let d = (self.to - self.from) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.from + d * i as f64).collect()
    }
}

fn parse_scan(s: &str) -> Result<Scan, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected from,to,steps, got {s:?}"));
    }
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    let steps = parts[2]
        .parse::<usize>()
        .map_err(|e| format!("steps {:?}: {e}", parts[2]))?;
    if steps == 0 {
        return Err("steps must be >= 1".into());
    }
    Ok(Scan {
        from: num(parts[0])?,
        to: num(parts[1])?,
        steps,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// Haar-random pure states
    Pure,
    /// Hilbert-Schmidt mixed states, rank 1 + (index mod 4)
    Mixed,
    /// Mixtures of 1 + (index mod 8) random product states
    Separable,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = Ensemble::Mixed)]
    pub ensemble: Ensemble,
    /// States with |PPT min eigenvalue| <= band are excluded from the agreement rate
    #[arg(long, default_value_t = 1e-3)]
    pub band: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Use only the identity frame
    #[arg(long)]
    pub identity_only: bool,
}

impl GlobalOpts {
    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            grid_points_per_angle: self.grid,
            ppt_tolerance: self.tol,
            ..SearchConfig::default()
        }
    }
}

/// Parses `args` (including the program name), runs the command, returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_INPUT_ERROR
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let g = &cli.global;
    let result = match &cli.command {
        Command::Analyze { path } => cmd_analyze(path, g, out),
        Command::Werner(w) => match (w.beta, w.scan) {
            (Some(beta), _) => cmd_werner_single(beta, g, out),
            (None, Some(scan)) => cmd_werner_scan(scan, g, out),
            (None, None) => Err(CliError::Usage(
                "one of --beta or --scan is required".into(),
            )),
        },
        Command::Bench(b) => cmd_bench(b, g, out),
        Command::Verify(v) => cmd_verify(v, g, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "qsep: {e}");
            EXIT_INPUT_ERROR
        }
    }
}

fn check_config(cfg: &SearchConfig) -> Result<(), CliError> {
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))
}

fn analyze_state(
    source: &str,
    rho: &DensityMatrix64,
    g: &GlobalOpts,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let cfg = g.search_config();
    check_config(&cfg)?;
    let rep = certify(rho, &cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    let doc = ReportDocument::build(source, g.seed, &cfg, rho, &rep);
    if g.json {
        let _ = writeln!(out, "{}", doc.to_json());
    } else if !g.quiet {
        let _ = write!(out, "{}", doc.to_text());
    }
    Ok(verdict_exit_code(rep.verdict))
}

pub fn cmd_analyze(path: &Path, g: &GlobalOpts, out: &mut dyn Write) -> Result<i32, CliError> {
    let doc = StateDocument::load(path)?;
    let rho = doc
        .to_density(g.tol)
        .map_err(|e| CliError::State(format!("{}: {}", path.display(), e)))?;
    analyze_state(&path.display().to_string(), &rho, g, out)
}

fn werner_state(beta: f64) -> Result<DensityMatrix64, CliError> {
    werner(beta).map_err(|e| CliError::Usage(format!("beta {beta}: {e}")))
}

pub fn cmd_werner_single(beta: f64, g: &GlobalOpts, out: &mut dyn Write) -> Result<i32, CliError> {
    let rho = werner_state(beta)?;
    analyze_state(&format!("werner(beta={beta})"), &rho, g, out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub beta: f64,
    pub m_plus_identity_frame: f64,
    pub ppt_min_eig: f64,
    pub verdict: String,
    pub concurrence: f64,
    pub chsh_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanDocument {
    pub rows: Vec<ScanRow>,
    /// First beta whose verdict is entangled after a non-entangled one.
    pub flip_beta: Option<f64>,
    pub flip_bracket: Option<[f64; 2]>,
}

pub fn werner_scan(scan: Scan, cfg: &SearchConfig) -> Result<ScanDocument, CliError> {
    let betas = scan.betas();
    let states: Vec<DensityMatrix64> = betas
        .iter()
        .map(|&b| werner_state(b))
        .collect::<Result<_, _>>()?;
    let rows: Vec<ScanRow> = betas
        .par_iter()
        .zip(states.par_iter())
        .map(|(&beta, rho)| {
            let rep = certify(rho, cfg).expect("config validated");
            ScanRow {
                beta,
                m_plus_identity_frame: hefei_margins(rho, &LocalFrame64::identity()).m_plus,
                ppt_min_eig: rep.ppt.min_eigenvalue,
                verdict: rep.verdict.to_string(),
                concurrence: concurrence(rho),
                chsh_max: chsh_max(rho),
            }
        })
        .collect();
    let ent = Verdict::Entangled.as_str();
    let flip = (1..rows.len()).find(|&i| rows[i].verdict == ent && rows[i - 1].verdict != ent);
    Ok(ScanDocument {
        flip_beta: flip.map(|i| rows[i].beta),
        flip_bracket: flip.map(|i| [rows[i - 1].beta, rows[i].beta]),
        rows,
    })
}

/// Shortest representation is not used on purpose: CSV numbers always carry 17 significant digits.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn cmd_werner_scan(scan: Scan, g: &GlobalOpts, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = g.search_config();
    check_config(&cfg)?;
    let doc = werner_scan(scan, &cfg)?;
    if g.json {
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&doc).expect("plain data")
        );
        return Ok(0);
    }
    let _ = writeln!(
        out,
        "beta,m_plus_identity_frame,ppt_min_eig,verdict,concurrence,chsh_max"
    );
    for r in &doc.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            sig17(r.beta),
            sig17(r.m_plus_identity_frame),
            sig17(r.ppt_min_eig),
            r.verdict,
            sig17(r.concurrence),
            sig17(r.chsh_max)
        );
    }
    match (doc.flip_beta, doc.flip_bracket) {
        (Some(b), Some([lo, hi])) => {
            let _ = writeln!(out, "# flip_beta={}", sig17(b));
            let _ = writeln!(out, "# flip_bracket={},{}", sig17(lo), sig17(hi));
        }
        _ => {
            let _ = writeln!(out, "# flip_beta=none");
        }
    }
    Ok(0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub index: usize,
    pub hefei_verdict: String,
    pub ppt_verdict: String,
    pub min_m_plus: f64,
    pub ppt_min_eig: f64,
    pub min_m_minus_observed: f64,
    pub in_band: bool,
    pub agreement: bool,
    pub converged: bool,
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSummary {
    pub ensemble: Ensemble,
    pub seed: u64,
    pub count: usize,
    pub band: f64,
    pub compared: usize,
    pub band_exclusions: usize,
    pub agreements: usize,
    pub agreement_rate: f64,
    pub hefei_violations: usize,
    pub ppt_entangled: usize,
    pub unconverged: usize,
    pub min_m_minus_observed: f64,
    pub wall_seconds_total: f64,
    pub wall_ms_mean: f64,
    pub wall_ms_max: f64,
}

pub fn bench_state(ensemble: Ensemble, seed: u64, index: usize) -> DensityMatrix64 {
    let mut rng = seeded_rng(seed, index as u64);
    match ensemble {
        Ensemble::Pure => pure_to_density(&random_pure(&mut rng)),
        Ensemble::Mixed => random_mixed(&mut rng, 1 + index % 4).expect("rank in range"),
        Ensemble::Separable => random_separable(&mut rng, 1 + index % 8).expect("terms >= 1"),
    }
}

pub fn bench(
    ensemble: Ensemble,
    count: usize,
    seed: u64,
    band: f64,
    cfg: &SearchConfig,
) -> (Vec<BenchRow>, BenchSummary) {
    let start = Instant::now();
    let rows: Vec<BenchRow> = (0..count)
        .into_par_iter()
        .map(|i| {
            let t = Instant::now();
            let rho = bench_state(ensemble, seed, i);
            let rep = certify(&rho, cfg).expect("config validated");
            let in_band = rep.ppt.min_eigenvalue.abs() <= band;
            BenchRow {
                index: i,
                hefei_verdict: rep.verdict.to_string(),
                ppt_verdict: rep.ppt.verdict.to_string(),
                min_m_plus: rep.min_m_plus,
                ppt_min_eig: rep.ppt.min_eigenvalue,
                min_m_minus_observed: rep.min_m_minus_observed,
                in_band,
                agreement: rep.agreement,
                converged: rep.converged,
                seconds: t.elapsed().as_secs_f64(),
            }
        })
        .collect();
    let wall = start.elapsed().as_secs_f64();
    let compared: Vec<&BenchRow> = rows.iter().filter(|r| !r.in_band).collect();
    let agreements = compared
        .iter()
        .filter(|r| r.hefei_verdict == r.ppt_verdict)
        .count();
    let ent = Verdict::Entangled.as_str();
    let summary = BenchSummary {
        ensemble,
        seed,
        count,
        band,
        compared: compared.len(),
        band_exclusions: count - compared.len(),
        agreements,
        agreement_rate: if compared.is_empty() {
            1.0
        } else {
            agreements as f64 / compared.len() as f64
        },
        hefei_violations: rows.iter().filter(|r| r.hefei_verdict == ent).count(),
        ppt_entangled: rows.iter().filter(|r| r.ppt_verdict == ent).count(),
        unconverged: rows.iter().filter(|r| !r.converged).count(),
        min_m_minus_observed: rows
            .iter()
            .map(|r| r.min_m_minus_observed)
            .fold(f64::INFINITY, f64::min),
        wall_seconds_total: wall,
        wall_ms_mean: rows.iter().map(|r| r.seconds).sum::<f64>() * 1e3 / count as f64,
        wall_ms_max: rows.iter().map(|r| r.seconds).fold(0.0, f64::max) * 1e3,
    };
    (rows, summary)
}

pub fn cmd_bench(b: &BenchArgs, g: &GlobalOpts, out: &mut dyn Write) -> Result<i32, CliError> {
    if b.count == 0 {
        return Err(CliError::Usage("--count must be >= 1".into()));
    }
    if !(b.band >= 0.0) {
        return Err(CliError::Usage(format!(
            "--band must be >= 0, got {}",
            b.band
        )));
    }
    let cfg = g.search_config();
    check_config(&cfg)?;
    let (rows, s) = bench(b.ensemble, b.count, g.seed, b.band, &cfg);
    if g.json {
        #[derive(Serialize)]
        struct Doc<'a> {
            rows: &'a [BenchRow],
            summary: &'a BenchSummary,
        }
        let doc = Doc {
            rows: &rows,
            summary: &s,
        };
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&doc).expect("plain data")
        );
    } else {
        let _ = writeln!(
            out,
            "index,hefei_verdict,ppt_verdict,min_m_plus,ppt_min_eig,min_m_minus_observed,in_band,agreement,converged"
        );
        for r in &rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.index,
                r.hefei_verdict,
                r.ppt_verdict,
                sig17(r.min_m_plus),
                sig17(r.ppt_min_eig),
                sig17(r.min_m_minus_observed),
                r.in_band,
                r.agreement,
                r.converged
            );
        }
        let ens = serde_json::to_value(s.ensemble).expect("plain data");
        let lines = [
            ("ensemble", ens.as_str().unwrap_or_default().to_string()),
            ("seed", s.seed.to_string()),
            ("count", s.count.to_string()),
            ("band", sig17(s.band)),
            ("compared", s.compared.to_string()),
            ("band_exclusions", s.band_exclusions.to_string()),
            ("agreements", s.agreements.to_string()),
            ("agreement_rate", sig17(s.agreement_rate)),
            ("hefei_violations", s.hefei_violations.to_string()),
            ("ppt_entangled", s.ppt_entangled.to_string()),
            ("unconverged", s.unconverged.to_string()),
            ("min_m_minus_observed", sig17(s.min_m_minus_observed)),
            ("wall_seconds_total", format!("{:.3}", s.wall_seconds_total)),
            ("wall_ms_mean", format!("{:.3}", s.wall_ms_mean)),
            ("wall_ms_max", format!("{:.3}", s.wall_ms_max)),
        ];
        for (k, v) in lines {
            let _ = writeln!(out, "# {k}={v}");
        }
    }
    Ok(if s.agreements == s.compared {
        0
    } else {
        EXIT_CHECK_FAILED
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub identity: String,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyDocument {
    pub trials: usize,
    pub seed: u64,
    pub identity_only: bool,
    pub residuals: Vec<Residual>,
    pub pass: bool,
}

/// Runs every identity suite `trials` times; frames, states and angles all come from `seed`.
pub fn verify(trials: usize, seed: u64, identity_only: bool) -> VerifyDocument {
    use rand::Rng;
    use std::f64::consts::PI;
    let mut rng = seeded_rng(seed, 0);
    let mut alg = AlgebraReport64::default();
    let (mut direct, mut pt) = (0.0f64, 0.0f64);
    let (mut fid, mut norm, mut recon) = (0.0f64, 0.0f64, 0.0f64);
    let angle = |rng: &mut qsep_core::states::StateRng, hi: f64| rng.random_range(0.0..hi);
    for i in 0..trials {
        let frame = if identity_only {
            LocalFrame64::identity()
        } else {
            LocalFrame64::from_angles(
                EulerAngles64::new(
                    angle(&mut rng, 2.0 * PI),
                    angle(&mut rng, PI),
                    angle(&mut rng, 2.0 * PI),
                ),
                EulerAngles64::new(
                    angle(&mut rng, 2.0 * PI),
                    angle(&mut rng, PI),
                    angle(&mut rng, 2.0 * PI),
                ),
            )
        };
        alg = alg.merge(&verify_algebra(&frame));

        let rho = random_mixed(&mut rng, 1 + i % 4).expect("rank in range");
        let (theta, phi) = (angle(&mut rng, PI), angle(&mut rng, 2.0 * PI));
        let r = expectation_identity_check(&rho, &frame, theta, phi);
        direct = direct.max(r.direct);
        pt = pt.max(r.partial_transpose);

        let p = random_pure::<f64, _>(&mut rng);
        let s = schmidt_decompose(&p);
        fid = fid.max(1.0 - s.reconstruct().fidelity(&p));
        match expansion_coefficients(&pure_to_density(&p), &s.frame()) {
            Ok(e) => {
                let n: f64 = e.coefficients.iter().map(|a| a * a).sum();
                norm = norm.max((n - 1.0).abs());
                recon = recon.max(e.residual);
            }
            Err(_) => {
                norm = f64::INFINITY;
                recon = f64::INFINITY;
            }
        }
    }
    let residuals: Vec<Residual> = alg
        .entries()
        .iter()
        .map(|&(name, v)| (name.to_string(), v))
        .chain([
            ("expectation_direct".to_string(), direct),
            ("expectation_partial_transpose".to_string(), pt),
            ("schmidt_fidelity_defect".to_string(), fid),
            ("expansion_norm".to_string(), norm),
            ("expansion_reconstruction".to_string(), recon),
        ])
        .map(|(identity, max_residual)| Residual {
            pass: max_residual < VERIFY_BOUND && max_residual.is_finite(),
            identity,
            max_residual,
        })
        .collect();
    VerifyDocument {
        trials,
        seed,
        identity_only,
        pass: residuals.iter().all(|r| r.pass),
        residuals,
    }
}

pub fn cmd_verify(v: &VerifyArgs, g: &GlobalOpts, out: &mut dyn Write) -> Result<i32, CliError> {
    if v.trials == 0 {
        return Err(CliError::Usage("--trials must be >= 1".into()));
    }
    let doc = verify(v.trials, g.seed, v.identity_only);
    if g.json {
        let _ = writeln!(
            out,
            "{}",
            serde_json::to_string_pretty(&doc).expect("plain data")
        );
    } else if !g.quiet {
        let w = doc
            .residuals
            .iter()
            .map(|r| r.identity.len())
            .max()
            .unwrap_or(0);
        for r in &doc.residuals {
            let status = if r.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{:<w$}  {}  {status}",
                r.identity,
                sig17(r.max_residual)
            );
        }
    }
    Ok(if doc.pass { 0 } else { EXIT_CHECK_FAILED })
}
