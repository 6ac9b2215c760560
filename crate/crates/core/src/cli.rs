//! Command-line front end: one subcommand per pipeline stage.
//!
//! Settings come from built-in defaults, then an optional `--config` file
//! (TOML, or JSON such as the `config` block embedded in any output), then
//! command-line flags. The fully resolved settings are written into every
//! output file.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::betafit::{
    fit_beta, residuals, residuals_uniform_nu, write_residual_csv, FitOptions, FitReport, GModel,
};
use crate::estimator::{
    estimate_f_with_progress, json_sidecar, load_fgrid, save_fgrid, total_volume,
    write_meta_footer, EstimationConfig, FGrid, OutputMeta, Progress,
};
use crate::jacobian::{table, write_table_csv};
use crate::qmc::{dump_points, SequenceSpec};
use crate::verify::{Verifier, VerifyOptions};
use crate::volume::{volume_report, VolumeReport, DEFAULT_SERIES_TERMS};
use crate::{Case, Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_MALFORMED: i32 = 4;
pub const EXIT_NUMERIC: i32 = 5;

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_)
        | Error::InvalidSequence(_)
        | Error::EmptyCampaign
        | Error::InvalidNu(_)
        | Error::InvalidJacobian(_) => EXIT_USAGE,
        Error::Io { .. } => EXIT_IO,
        Error::Malformed { .. } | Error::Json(_) | Error::TooFewPoints { .. } => EXIT_MALFORMED,
        Error::QuadratureDiverged { .. }
        | Error::BetaDomain { .. }
        | Error::NegativeDiagonal { .. }
        | Error::TraceNotUnit { .. }
        | Error::OutOfRegion(_)
        | Error::DimensionMismatch { .. } => EXIT_NUMERIC,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "sepvol",
    version,
    about = "Hilbert–Schmidt separable volumes of two-qubit states"
)]
struct Cli {
    /// TOML or JSON file supplying defaults; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// More diagnostics on standard error (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    /// No progress or informational output.
    #[arg(short, long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Emit a (ν, Jac_real, Jac_complex) CSV table.
    Jacobian(JacobianArgs),
    /// Estimate F(ν) on a μ-grid and write the FGrid CSV.
    Estimate(EstimateArgs),
    /// Fit c·B_ν(a,b) to an FGrid CSV.
    Fit(FitArgs),
    /// Separable volume, probability and hyperarea for a model.
    Integrate(IntegrateArgs),
    /// Estimate, fit and integrate in one run.
    Pipeline(EstimateArgs),
    /// Run the desk-scale acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args, Default)]
struct JacobianArgs {
    /// Number of rows.
    #[arg(long)]
    rows: Option<usize>,
    /// Largest ν in the table.
    #[arg(long)]
    nu_max: Option<f64>,
    /// Output path; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
struct CampaignArgs {
    #[arg(long, value_parser = parse_case)]
    case: Option<Case>,
    /// Number of QMC points N.
    #[arg(long)]
    points: Option<u64>,
    /// Number of μ-grid values G.
    #[arg(long)]
    grid: Option<usize>,
    /// Scrambling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Use the unscrambled Faure sequence.
    #[arg(long)]
    no_scramble: bool,
    /// Leading sequence points to discard.
    #[arg(long)]
    skip: Option<u64>,
    /// Worker threads (0 = all cores); results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug, Args, Default)]
struct EstimateArgs {
    #[command(flatten)]
    campaign: CampaignArgs,
    /// Output file (estimate) or directory (pipeline).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Checkpoint file; an existing one is resumed.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    #[arg(long)]
    checkpoint_interval: Option<u64>,
    /// Also write the raw points as little-endian f64, row-major.
    #[arg(long)]
    dump_points: Option<PathBuf>,
    /// Series terms for the cross-check integral (pipeline only).
    #[arg(long)]
    series_terms: Option<usize>,
}

#[derive(Debug, Args, Default)]
struct FitArgs {
    /// FGrid CSV written by `estimate`.
    #[arg(long)]
    input: Option<PathBuf>,
    /// FitReport JSON path; the residual CSV goes next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Interpolate residuals onto this many uniform ν values (0 = grid values).
    #[arg(long)]
    uniform_nu: Option<usize>,
}

#[derive(Debug, Args, Default)]
struct IntegrateArgs {
    #[arg(long, value_parser = parse_case)]
    case: Option<Case>,
    /// `paper` or `fitted:PATH` (a FitReport JSON).
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    series_terms: Option<usize>,
    /// VolumeReport JSON path; the text table always goes to standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
struct VerifyArgs {
    #[command(flatten)]
    campaign: CampaignArgs,
    /// Comma-separated criterion ids; all by default.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
    /// Outcomes as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_case(s: &str) -> std::result::Result<Case, String> {
    s.parse()
}

/// Settings as they may appear in a config file: everything optional.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Overrides {
    pub command: Option<String>,
    pub case: Option<Case>,
    pub points: Option<u64>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
    pub scramble: Option<bool>,
    pub skip: Option<u64>,
    pub workers: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_interval: Option<u64>,
    pub dump_points: Option<PathBuf>,
    pub model: Option<String>,
    pub series_terms: Option<usize>,
    pub rows: Option<usize>,
    pub nu_max: Option<f64>,
    pub uniform_nu: Option<usize>,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub criteria: Option<Vec<u8>>,
}

impl Overrides {
    /// Fields of `self` win over `base`.
    fn over(self, base: Overrides) -> Overrides {
        Overrides {
            command: self.command.or(base.command),
            case: self.case.or(base.case),
            points: self.points.or(base.points),
            grid: self.grid.or(base.grid),
            seed: self.seed.or(base.seed),
            scramble: self.scramble.or(base.scramble),
            skip: self.skip.or(base.skip),
            workers: self.workers.or(base.workers),
            checkpoint: self.checkpoint.or(base.checkpoint),
            checkpoint_interval: self.checkpoint_interval.or(base.checkpoint_interval),
            dump_points: self.dump_points.or(base.dump_points),
            model: self.model.or(base.model),
            series_terms: self.series_terms.or(base.series_terms),
            rows: self.rows.or(base.rows),
            nu_max: self.nu_max.or(base.nu_max),
            uniform_nu: self.uniform_nu.or(base.uniform_nu),
            input: self.input.or(base.input),
            out: self.out.or(base.out),
            criteria: self.criteria.or(base.criteria),
        }
    }

    fn from_campaign(c: CampaignArgs) -> Overrides {
        Overrides {
            case: c.case,
            points: c.points,
            grid: c.grid,
            seed: c.seed,
            scramble: c.no_scramble.then_some(false),
            skip: c.skip,
            workers: c.workers,
            ..Overrides::default()
        }
    }
}

/// Fully resolved settings; echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub version: String,
    pub case: Case,
    pub points: u64,
    pub grid: usize,
    pub seed: u64,
    pub scramble: bool,
    pub skip: u64,
    pub workers: usize,
    pub checkpoint: Option<PathBuf>,
    pub checkpoint_interval: u64,
    pub dump_points: Option<PathBuf>,
    pub model: String,
    pub series_terms: usize,
    pub rows: usize,
    pub nu_max: f64,
    pub uniform_nu: usize,
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub criteria: Vec<u8>,
}

impl RunConfig {
    fn resolve(command: &str, o: Overrides) -> Result<RunConfig> {
        let case = o.case.unwrap_or(Case::Real);
        let desk = EstimationConfig::desk(case);
        let cfg = RunConfig {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            case,
            points: o.points.unwrap_or(desk.points()),
            grid: o.grid.unwrap_or(desk.grid_points),
            seed: o.seed.unwrap_or(1),
            scramble: o.scramble.unwrap_or(true),
            skip: o.skip.unwrap_or(0),
            workers: o.workers.unwrap_or(0),
            checkpoint: o.checkpoint,
            checkpoint_interval: o.checkpoint_interval.unwrap_or(desk.checkpoint_interval),
            dump_points: o.dump_points,
            model: o.model.unwrap_or_else(|| "paper".into()),
            series_terms: o.series_terms.unwrap_or(DEFAULT_SERIES_TERMS),
            rows: o.rows.unwrap_or(1001),
            nu_max: o.nu_max.unwrap_or(3.0),
            uniform_nu: o.uniform_nu.unwrap_or(0),
            input: o.input,
            out: o.out,
            criteria: o
                .criteria
                .filter(|c| !c.is_empty())
                .unwrap_or_else(|| (1..=10).collect()),
        };
        if cfg.points == 0 {
            return Err(Error::InvalidConfig("--points must be positive".into()));
        }
        if cfg.grid < 2 {
            return Err(Error::InvalidConfig("--grid must be at least 2".into()));
        }
        if cfg.checkpoint_interval == 0 {
            return Err(Error::InvalidConfig(
                "--checkpoint-interval must be positive".into(),
            ));
        }
        if let Some(bad) = cfg.criteria.iter().find(|&&c| !(1..=10).contains(&c)) {
            return Err(Error::InvalidConfig(format!(
                "no criterion {bad}; valid ids are 1–10"
            )));
        }
        Ok(cfg)
    }

    fn sequence(&self) -> SequenceSpec {
        SequenceSpec::for_case(
            self.case,
            self.scramble.then_some(self.seed),
            self.skip,
            self.points,
        )
    }

    pub fn estimation_config(&self) -> EstimationConfig {
        EstimationConfig {
            case: self.case,
            grid_points: self.grid,
            sequence: self.sequence(),
            workers: self.workers,
            checkpoint: self.checkpoint.clone(),
            checkpoint_interval: self.checkpoint_interval,
        }
    }

    /// Hash of the settings that determine the data, excluding workers and paths.
    pub fn run_id(&self) -> String {
        let mut v = serde_json::to_value(self).expect("RunConfig serializes");
        if let Some(m) = v.as_object_mut() {
            for k in ["workers", "checkpoint", "dump_points", "out"] {
                m.remove(k);
            }
        }
        let digest = Sha256::digest(v.to_string().as_bytes());
        hex::encode(&digest[..6])
    }

    fn meta(&self) -> OutputMeta {
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        OutputMeta {
            run_id: self.run_id(),
            created: format!("unix:{created}"),
            config: serde_json::to_value(self).expect("RunConfig serializes"),
        }
    }
}

fn load_overrides(path: &Path) -> Result<Overrides> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |reason: String| Error::Malformed {
        kind: "config",
        path: path.to_path_buf(),
        reason,
    };
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| bad(e.to_string()))
    } else {
        toml::from_str(&text).map_err(|e| bad(e.to_string()))
    }
}

struct Ui {
    verbose: u8,
    quiet: bool,
}

impl Ui {
    fn info(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn debug(&self, msg: impl AsRef<str>) {
        if self.verbose > 0 && !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let ui = Ui {
        verbose: cli.verbose,
        quiet: cli.quiet,
    };
    match dispatch(cli, &ui) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli, ui: &Ui) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => load_overrides(p)?,
        None => Overrides::default(),
    };
    match cli.command {
        Command::Jacobian(a) => {
            let o = Overrides {
                rows: a.rows,
                nu_max: a.nu_max,
                out: a.out,
                ..Default::default()
            };
            cmd_jacobian(&RunConfig::resolve("jacobian", o.over(file))?, ui)
        }
        Command::Estimate(a) => {
            let cfg = RunConfig::resolve("estimate", estimate_overrides(a).over(file))?;
            cmd_estimate(&cfg, ui).map(|_| EXIT_OK)
        }
        Command::Fit(a) => {
            let o = Overrides {
                input: a.input,
                out: a.out,
                uniform_nu: a.uniform_nu,
                ..Default::default()
            };
            let merged = o.over(file);
            let case = match &merged.input {
                Some(p) => Some(load_fgrid(p)?.0.case),
                None => None,
            };
            let cfg = RunConfig::resolve("fit", Overrides { case, ..merged })?;
            cmd_fit(&cfg, ui).map(|_| EXIT_OK)
        }
        Command::Integrate(a) => {
            let o = Overrides {
                case: a.case,
                model: a.model,
                series_terms: a.series_terms,
                out: a.out,
                ..Default::default()
            };
            let mut merged = o.over(file);
            if merged.case.is_none() {
                if let Some(path) = merged
                    .model
                    .as_deref()
                    .and_then(|m| m.strip_prefix("fitted:"))
                {
                    merged.case = Some(load_fit(Path::new(path))?.case);
                }
            }
            cmd_integrate(&RunConfig::resolve("integrate", merged)?, ui).map(|_| EXIT_OK)
        }
        Command::Pipeline(a) => {
            let cfg = RunConfig::resolve("pipeline", estimate_overrides(a).over(file))?;
            cmd_pipeline(&cfg, ui)
        }
        Command::Verify(a) => {
            let o = Overrides {
                criteria: (!a.only.is_empty()).then_some(a.only),
                out: a.out,
                ..Overrides::from_campaign(a.campaign)
            };
            let restricted = o.case.is_some() || file.case.is_some();
            let cfg = RunConfig::resolve("verify", o.over(file))?;
            cmd_verify(&cfg, restricted, ui)
        }
    }
}

fn estimate_overrides(a: EstimateArgs) -> Overrides {
    Overrides {
        out: a.out,
        checkpoint: a.checkpoint,
        checkpoint_interval: a.checkpoint_interval,
        dump_points: a.dump_points,
        series_terms: a.series_terms,
        ..Overrides::from_campaign(a.campaign)
    }
}

fn create(path: &Path) -> Result<io::BufWriter<fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::File::create(path)
        .map(io::BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn cmd_jacobian(cfg: &RunConfig, ui: &Ui) -> Result<i32> {
    let rows = table(cfg.rows, cfg.nu_max)?;
    let meta = cfg.meta();
    let emit = |w: &mut dyn Write, name: &Path| -> Result<()> {
        write_table_csv(&rows, &mut *w).map_err(|e| Error::io(name, io::Error::other(e)))?;
        write_meta_footer(&mut *w, &meta)?;
        w.flush().map_err(|e| Error::io(name, e))
    };
    match &cfg.out {
        Some(p) => {
            emit(&mut create(p)?, p)?;
            ui.info(format!("wrote {} rows to {}", rows.len(), p.display()));
        }
        None => emit(&mut io::stdout().lock(), Path::new("<stdout>"))?,
    }
    Ok(EXIT_OK)
}

fn run_estimate(cfg: &RunConfig, ui: &Ui) -> Result<FGrid> {
    let ec = cfg.estimation_config();
    ec.validate()?;
    if let Some(p) = &cfg.dump_points {
        let mut w = create(p)?;
        dump_points(&ec.sequence, &mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(p, e))?;
        ui.info(format!("wrote {} points to {}", ec.points(), p.display()));
    }
    ui.debug(format!("run {} · {}", cfg.run_id(), ec.sequence.describe()));
    let start = Instant::now();
    let report = |p: Progress| {
        ui.info(format!(
            "{}: {}/{} points, {} PSD, {:.1}s",
            cfg.case,
            p.processed,
            p.total,
            p.n_psd,
            start.elapsed().as_secs_f64()
        ));
    };
    let g = estimate_f_with_progress(
        &ec,
        (!ui.quiet).then_some(&report as &(dyn Fn(Progress) + Sync)),
    )?;
    for w in g.warnings() {
        ui.info(format!("warning: {w}"));
    }
    Ok(g)
}

fn cmd_estimate(cfg: &RunConfig, ui: &Ui) -> Result<FGrid> {
    let g = run_estimate(cfg, ui)?;
    let meta = cfg.meta();
    let tv = total_volume(&g)?;
    match &cfg.out {
        Some(p) => {
            save_fgrid(&g, &meta, p)?;
            ui.info(format!(
                "wrote {} and {}",
                p.display(),
                json_sidecar(p).display()
            ));
        }
        None => {
            crate::estimator::write_fgrid_csv(&g, &meta, io::stdout().lock())?;
        }
    }
    ui.info(format!(
        "total volume 2·F_tot·∫Jac = {tv:.8e} (exact {:.8e}, rel {:+.2e})",
        cfg.case.total_volume(),
        tv / cfg.case.total_volume() - 1.0
    ));
    Ok(g)
}

/// JSON written by `fit`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitOutput {
    pub case: Case,
    pub input: Option<PathBuf>,
    pub source_run_id: Option<String>,
    pub report: FitReport,
    pub run_id: String,
    pub created: String,
    pub config: serde_json::Value,
}

fn load_fit(path: &Path) -> Result<FitOutput> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Malformed {
        kind: "FitReport JSON",
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

fn residual_path(json: &Path) -> PathBuf {
    json.with_extension("residuals.csv")
}

fn fit_grid(
    cfg: &RunConfig,
    g: &FGrid,
    source: Option<&OutputMeta>,
    out: Option<&Path>,
    ui: &Ui,
) -> Result<FitOutput> {
    let rep = fit_beta(g, GModel::initial_guess(&g.f), &FitOptions::default())?;
    if !rep.converged {
        ui.info(
            "warning: fit did not meet the convergence criteria; reporting the best model found",
        );
    }
    ui.info(format!(
        "fitted c = {:.10}, a = {:.10}, b = {:.10} (SSE {:.4e}, max |residual| {:.4})",
        rep.model.scale,
        rep.model.a,
        rep.model.b,
        rep.sse,
        rep.max_abs_residual()
    ));
    let meta = cfg.meta();
    let out_json = FitOutput {
        case: g.case,
        input: cfg.input.clone(),
        source_run_id: source.map(|m| m.run_id.clone()),
        report: rep.clone(),
        run_id: meta.run_id.clone(),
        created: meta.created.clone(),
        config: meta.config.clone(),
    };
    let (nu, res) = if cfg.uniform_nu > 0 {
        residuals_uniform_nu(g, &rep.model, cfg.uniform_nu)?
    } else {
        (g.nu.clone(), residuals(g, &rep.model)?)
    };
    match out {
        Some(p) => {
            write_json(p, &out_json)?;
            let rp = residual_path(p);
            let mut w = create(&rp)?;
            write_residual_csv(&nu, &res, &mut w)?;
            write_meta_footer(&mut w, &meta)?;
            w.flush().map_err(|e| Error::io(&rp, e))?;
            ui.info(format!("wrote {} and {}", p.display(), rp.display()));
        }
        None => {
            serde_json::to_writer_pretty(io::stdout().lock(), &out_json)?;
            println!();
        }
    }
    Ok(out_json)
}

fn cmd_fit(cfg: &RunConfig, ui: &Ui) -> Result<FitOutput> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("fit needs --input FGRID.csv".into()))?;
    let (g, meta) = load_fgrid(input)?;
    fit_grid(cfg, &g, meta.as_ref(), cfg.out.as_deref(), ui)
}

fn resolve_model(cfg: &RunConfig) -> Result<GModel> {
    if cfg.model == "paper" {
        return Ok(GModel::closed_form(cfg.case));
    }
    let Some(path) = cfg.model.strip_prefix("fitted:") else {
        return Err(Error::InvalidConfig(format!(
            "--model must be `paper` or `fitted:PATH`, got `{}`",
            cfg.model
        )));
    };
    let fit = load_fit(Path::new(path))?;
    if fit.case != cfg.case {
        return Err(Error::InvalidConfig(format!(
            "model file {path} is for the {} case, not {}",
            fit.case, cfg.case
        )));
    }
    Ok(fit.report.model)
}

/// JSON written by `integrate`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VolumeOutput {
    pub report: VolumeReport,
    pub run_id: String,
    pub created: String,
    pub config: serde_json::Value,
}

fn integrate_model(
    cfg: &RunConfig,
    model: &GModel,
    out: Option<&Path>,
    ui: &Ui,
) -> Result<VolumeReport> {
    let rep = volume_report(cfg.case, model, cfg.series_terms)?;
    print!("{rep}");
    if let Some(p) = out {
        let meta = cfg.meta();
        write_json(
            p,
            &VolumeOutput {
                report: rep.clone(),
                run_id: meta.run_id,
                created: meta.created,
                config: meta.config,
            },
        )?;
        ui.info(format!("wrote {}", p.display()));
    }
    Ok(rep)
}

fn cmd_integrate(cfg: &RunConfig, ui: &Ui) -> Result<VolumeReport> {
    let model = resolve_model(cfg)?;
    integrate_model(cfg, &model, cfg.out.as_deref(), ui)
}

fn cmd_pipeline(cfg: &RunConfig, ui: &Ui) -> Result<i32> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let stem = |s: &str| dir.join(format!("{}_{s}", cfg.case));

    let g = run_estimate(cfg, ui)?;
    let meta = cfg.meta();
    save_fgrid(&g, &meta, &stem("fgrid.csv"))?;
    let tv = total_volume(&g)?;
    ui.info(format!(
        "total volume {tv:.8e} vs exact {:.8e} (rel {:+.2e})",
        cfg.case.total_volume(),
        tv / cfg.case.total_volume() - 1.0
    ));

    let fit = fit_grid(cfg, &g, Some(&meta), Some(&stem("fit.json")), ui)?;
    println!("-- fitted model");
    let fitted = integrate_model(
        cfg,
        &fit.report.model,
        Some(&stem("volume_fitted.json")),
        ui,
    )?;
    println!("-- recognized model");
    let known = integrate_model(
        cfg,
        &GModel::closed_form(cfg.case),
        Some(&stem("volume_closed_form.json")),
        ui,
    )?;
    println!(
        "fitted vs recognized V_sep: {:+.3e} relative",
        fitted.v_sep / known.v_sep - 1.0
    );
    Ok(EXIT_OK)
}

/// JSON written by `verify --out`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub passed: bool,
    pub outcomes: Vec<crate::verify::CriterionOutcome>,
    pub options: VerifyOptions,
    pub run_id: String,
    pub created: String,
    pub config: serde_json::Value,
}

fn cmd_verify(cfg: &RunConfig, restricted: bool, ui: &Ui) -> Result<i32> {
    let defaults = VerifyOptions::default();
    let case = restricted.then_some(cfg.case);
    let opts = VerifyOptions {
        case,
        real_points: if case == Some(Case::Real) {
            cfg.points
        } else {
            defaults.real_points
        },
        complex_points: if case == Some(Case::Complex) {
            cfg.points
        } else {
            defaults.complex_points
        },
        grid_points: cfg.grid,
        scramble_seed: cfg.scramble.then_some(cfg.seed),
        skip: cfg.skip,
        workers: cfg.workers,
        ..defaults
    };
    let verifier = Verifier::new(opts.clone());
    let mut outcomes = Vec::new();
    for &id in &cfg.criteria {
        let t = Instant::now();
        let o = verifier.criterion(id)?;
        print!("{o}");
        ui.debug(format!("criterion {id}: {:.2}s", t.elapsed().as_secs_f64()));
        outcomes.push(o);
    }
    let passed = outcomes.iter().all(|o| o.passed());
    println!(
        "{} of {} criteria passed{}",
        outcomes.iter().filter(|o| o.passed()).count(),
        outcomes.len(),
        if passed { "" } else { "; see FAIL lines above" }
    );
    if let Some(p) = &cfg.out {
        let meta = cfg.meta();
        write_json(
            p,
            &VerifyOutput {
                passed,
                outcomes,
                options: opts,
                run_id: meta.run_id,
                created: meta.created,
                config: meta.config,
            },
        )?;
        ui.info(format!("wrote {}", p.display()));
    }
    Ok(if passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_and_defaults_materialize() {
        let file = Overrides {
            case: Some(Case::Complex),
            points: Some(10),
            grid: Some(5),
            ..Default::default()
        };
        let flags = Overrides {
            points: Some(20),
            ..Default::default()
        };
        let cfg = RunConfig::resolve("estimate", flags.over(file)).unwrap();
        assert_eq!(cfg.case, Case::Complex);
        assert_eq!(cfg.points, 20);
        assert_eq!(cfg.grid, 5);
        assert!(cfg.scramble);
        assert_eq!(cfg.criteria.len(), 10);
    }

    #[test]
    fn desk_defaults_depend_on_case() {
        let r = RunConfig::resolve("estimate", Overrides::default()).unwrap();
        assert_eq!((r.case, r.points, r.grid), (Case::Real, 1_000_000, 201));
        let c = RunConfig::resolve(
            "estimate",
            Overrides {
                case: Some(Case::Complex),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(c.points, 2_000_000);
    }

    #[test]
    fn resolved_config_round_trips_as_a_config_file() {
        let cfg = RunConfig::resolve("estimate", Overrides::default()).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: Overrides = serde_json::from_str(&text).unwrap();
        assert_eq!(RunConfig::resolve("estimate", back).unwrap(), cfg);
    }

    #[test]
    fn run_id_ignores_worker_count() {
        let a = RunConfig::resolve("estimate", Overrides::default()).unwrap();
        let b = RunConfig {
            workers: 8,
            ..a.clone()
        };
        let c = RunConfig {
            seed: 2,
            ..a.clone()
        };
        assert_eq!(a.run_id(), b.run_id());
        assert_ne!(a.run_id(), c.run_id());
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run(["sepvol", "estimate", "--points", "0"]), EXIT_USAGE);
        assert_eq!(
            run(["sepvol", "estimate", "--case", "quaternion"]),
            EXIT_USAGE
        );
        assert_eq!(run(["sepvol", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["sepvol", "-q", "verify", "--only", "11"]), EXIT_USAGE);
    }
}
