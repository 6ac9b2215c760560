//! Quasi-Monte Carlo estimation of `F(ν)` on a grid uniform in `μ = √ν`.
//!
//! Every point of one shared low-discrepancy stream is mapped to the Bloore
//! cube, tested once for positivity (which does not depend on the diagonal)
//! and, if positive, tested for PPT at every grid value of `μ`. Separability
//! is not monotone in `μ` along a fixed `z`, so no grid value is skipped.
//!
//! Counts are 64-bit integers merged by addition, which makes the result
//! independent of block scheduling and of the number of workers.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bloore::{a3_quartic_coeffs, BlooreVector, CanonicalScales, NuRatio};
use crate::jacobian::{jac_integral, JacobianCase};
use crate::qmc::{map_to_bloore, AnyBloore, FaureGenerator, SequenceSpec, BLOCK_SIZE};
use crate::{Case, Error, Result};

pub const DEFAULT_CHECKPOINT_INTERVAL: u64 = 10_000_000;

/// Progress callbacks fire at multiples of this many points.
pub const PROGRESS_INTERVAL: u64 = 1_000_000;

/// Inputs of one campaign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub case: Case,
    /// Number of grid values of `μ`, endpoints included.
    pub grid_points: usize,
    /// The point stream; `sequence.count` is the number of points `N`.
    pub sequence: SequenceSpec,
    /// Worker threads; 0 uses all available cores. Does not affect results.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub checkpoint: Option<PathBuf>,
    #[serde(default = "default_checkpoint_interval")]
    pub checkpoint_interval: u64,
}

fn default_checkpoint_interval() -> u64 {
    DEFAULT_CHECKPOINT_INTERVAL
}

impl EstimationConfig {
    /// Desk-scale defaults: 10⁶ real or 2·10⁶ complex points, 201 grid values.
    pub fn desk(case: Case) -> Self {
        let points = match case {
            Case::Real => 1_000_000,
            Case::Complex => 2_000_000,
        };
        EstimationConfig {
            case,
            grid_points: 201,
            sequence: SequenceSpec::for_case(case, Some(1), 0, points),
            workers: 0,
            checkpoint: None,
            checkpoint_interval: DEFAULT_CHECKPOINT_INTERVAL,
        }
    }

    pub fn with_points(mut self, points: u64) -> Self {
        self.sequence.count = points;
        self
    }

    pub fn points(&self) -> u64 {
        self.sequence.count
    }

    pub fn validate(&self) -> Result<()> {
        if self.sequence.count == 0 {
            return Err(Error::EmptyCampaign);
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidConfig(format!(
                "grid needs at least 2 points, got {}",
                self.grid_points
            )));
        }
        if self.sequence.dimension != self.case.dimension() {
            return Err(Error::InvalidConfig(format!(
                "{} case needs a {}-dimensional sequence, got {}",
                self.case,
                self.case.dimension(),
                self.sequence.dimension
            )));
        }
        if self.checkpoint_interval == 0 {
            return Err(Error::InvalidConfig(
                "checkpoint interval must be positive".into(),
            ));
        }
        self.sequence.validate()
    }

    /// `μ_k = k / (G − 1)`.
    pub fn mu_grid(&self) -> Vec<f64> {
        let g = self.grid_points;
        (0..g).map(|k| k as f64 / (g - 1) as f64).collect()
    }

    /// Hash of everything that determines the counters.
    pub fn fingerprint(&self) -> String {
        let key = serde_json::json!({
            "case": self.case,
            "grid_points": self.grid_points,
            "sequence": self.sequence,
        });
        let digest = Sha256::digest(key.to_string().as_bytes());
        hex::encode(&digest[..8])
    }
}

/// Raw integer counters of a campaign (or of part of one).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub processed: u64,
    pub n_psd: u64,
    pub n_sep: Vec<u64>,
}

impl Counters {
    pub fn zero(grid: usize) -> Self {
        Counters {
            processed: 0,
            n_psd: 0,
            n_sep: vec![0; grid],
        }
    }

    pub fn merge(mut self, other: Counters) -> Self {
        self.processed += other.processed;
        self.n_psd += other.n_psd;
        for (a, b) in self.n_sep.iter_mut().zip(other.n_sep) {
            *a += b;
        }
        self
    }
}

/// Estimated `F(ν)` values on the μ-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FGrid {
    pub case: Case,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub n_sep: Vec<u64>,
    pub f: Vec<f64>,
    pub n_psd: u64,
    pub f_tot: f64,
    pub points: u64,
    pub dimension: usize,
    pub sequence: SequenceSpec,
}

impl FGrid {
    /// Scale from counts to `F`: `metric · 2^d / N`.
    pub fn count_scale(case: Case, points: u64) -> f64 {
        case.metric_factor() * case.cube_volume() / points as f64
    }

    pub fn from_counters(config: &EstimationConfig, c: &Counters) -> Self {
        let scale = Self::count_scale(config.case, c.processed);
        let mu = config.mu_grid();
        FGrid {
            case: config.case,
            nu: mu.iter().map(|m| m * m).collect(),
            mu,
            f: c.n_sep.iter().map(|&n| n as f64 * scale).collect(),
            n_sep: c.n_sep.clone(),
            n_psd: c.n_psd,
            f_tot: c.n_psd as f64 * scale,
            points: c.processed,
            dimension: config.case.dimension(),
            sequence: config.sequence.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    /// `F` at the grid value nearest to `μ`.
    pub fn f_at_mu(&self, mu: f64) -> f64 {
        let k = self
            .mu
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - mu).abs().total_cmp(&(b.1 - mu).abs()))
            .map(|(k, _)| k)
            .unwrap_or(0);
        self.f[k]
    }

    /// Diagnostics that are expected but not guaranteed at finite sample size.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let (Some(&last), Some(&max)) =
            (self.f.last(), self.f.iter().max_by(|a, b| a.total_cmp(b)))
        {
            if last < max {
                out.push(format!(
                    "F at μ = 1 ({last}) is below the grid maximum ({max})"
                ));
            }
        }
        if self.f.first().is_some_and(|&f0| f0 != 0.0) {
            out.push(format!("F at μ = 0 is {} rather than 0", self.f[0]));
        }
        out
    }
}

fn count_block(
    gen: &FaureGenerator,
    case: Case,
    start: u64,
    len: u64,
    mus: &[f64],
    scales: &[CanonicalScales],
) -> Counters {
    let mut c = Counters::zero(mus.len());
    let mut cur = gen.cursor(start);
    let mut u = [0.0f64; 12];
    let u = &mut u[..case.dimension()];
    for _ in 0..len {
        cur.next_into(u);
        let z = map_to_bloore(u, case).expect("dimension matches case");
        if !z.is_psd() {
            continue;
        }
        c.n_psd += 1;
        match z {
            AnyBloore::Real(zr) => {
                let q = a3_quartic_coeffs(&zr);
                for (n, &mu) in c.n_sep.iter_mut().zip(mus) {
                    if q.eval(mu) >= 0.0 {
                        *n += 1;
                    }
                }
            }
            AnyBloore::Complex(zc) => {
                for (n, s) in c.n_sep.iter_mut().zip(scales) {
                    if zc.pt_determinant(s) >= 0.0 {
                        *n += 1;
                    }
                }
            }
        }
    }
    c.processed = len;
    c
}

/// Progress report passed to the optional callback.
#[derive(Debug, Clone, Copy)]
pub struct Progress {
    pub processed: u64,
    pub total: u64,
    pub n_psd: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    counters: Counters,
}

fn load_checkpoint(path: &Path, config: &EstimationConfig) -> Result<Option<Counters>> {
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let ck: Checkpoint = serde_json::from_str(&text).map_err(|e| Error::Malformed {
        kind: "checkpoint",
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    if ck.fingerprint != config.fingerprint() {
        return Err(Error::Malformed {
            kind: "checkpoint",
            path: path.to_path_buf(),
            reason: "written by a different campaign configuration".into(),
        });
    }
    if ck.counters.n_sep.len() != config.grid_points || ck.counters.processed > config.points() {
        return Err(Error::Malformed {
            kind: "checkpoint",
            path: path.to_path_buf(),
            reason: "counter shape does not match the configuration".into(),
        });
    }
    Ok(Some(ck.counters))
}

fn save_checkpoint(path: &Path, config: &EstimationConfig, c: &Counters) -> Result<()> {
    let ck = Checkpoint {
        fingerprint: config.fingerprint(),
        counters: c.clone(),
    };
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, serde_json::to_vec(&ck)?).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Counts PSD and PSD∧PPT points at arbitrary values of `μ`.
pub fn count_at(
    config: &EstimationConfig,
    mus: &[f64],
    progress: Option<&(dyn Fn(Progress) + Sync)>,
) -> Result<Counters> {
    config.validate()?;
    let gen = FaureGenerator::new(&config.sequence)?;
    let scales: Vec<CanonicalScales> = mus
        .iter()
        .map(|&m| NuRatio::from_mu(m).map(CanonicalScales::new))
        .collect::<Result<_>>()?;
    let total = config.points();
    let mut counters = match &config.checkpoint {
        Some(p) => load_checkpoint(p, config)?.unwrap_or_else(|| Counters::zero(mus.len())),
        None => Counters::zero(mus.len()),
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    let skip = config.sequence.skip;
    let step = config.checkpoint_interval.min(PROGRESS_INTERVAL);
    while counters.processed < total {
        let chunk_start = counters.processed;
        let chunk_end = ((chunk_start / step + 1) * step).min(total);
        let blocks: Vec<(u64, u64)> = (chunk_start..chunk_end)
            .step_by(BLOCK_SIZE as usize)
            .map(|s| (s, BLOCK_SIZE.min(chunk_end - s)))
            .collect();
        let part = pool.install(|| {
            blocks
                .par_iter()
                .map(|&(s, len)| count_block(&gen, config.case, skip + s, len, mus, &scales))
                .reduce(|| Counters::zero(mus.len()), Counters::merge)
        });
        counters = counters.merge(part);
        if let Some(p) = &config.checkpoint {
            let crossed =
                chunk_end / config.checkpoint_interval > chunk_start / config.checkpoint_interval;
            if crossed || chunk_end == total {
                save_checkpoint(p, config, &counters)?;
            }
        }
        if let Some(cb) = progress {
            cb(Progress {
                processed: counters.processed,
                total,
                n_psd: counters.n_psd,
            });
        }
    }
    Ok(counters)
}

/// Runs the campaign over the configured μ-grid.
pub fn estimate_f(config: &EstimationConfig) -> Result<FGrid> {
    estimate_f_with_progress(config, None)
}

pub fn estimate_f_with_progress(
    config: &EstimationConfig,
    progress: Option<&(dyn Fn(Progress) + Sync)>,
) -> Result<FGrid> {
    let counters = count_at(config, &config.mu_grid(), progress)?;
    Ok(FGrid::from_counters(config, &counters))
}

/// `2 · F_tot · ∫₀¹ Jac(ν) dν`, which should equal the exact total volume.
pub fn total_volume(fgrid: &FGrid) -> Result<f64> {
    if fgrid.points == 0 {
        return Err(Error::EmptyCampaign);
    }
    let j = jac_integral(&JacobianCase::new(fgrid.case))?;
    Ok(2.0 * fgrid.f_tot * j.value)
}

/// `F` at `ν` and at `1/ν` from one shared point set.
pub fn symmetry_check(config: &EstimationConfig, nu_probe: f64) -> Result<(f64, f64)> {
    if !(nu_probe > 0.0) || !nu_probe.is_finite() {
        return Err(Error::InvalidNu(nu_probe));
    }
    let mu = nu_probe.sqrt();
    let c = count_at(config, &[mu, 1.0 / mu], None)?;
    let scale = FGrid::count_scale(config.case, c.processed);
    Ok((c.n_sep[0] as f64 * scale, c.n_sep[1] as f64 * scale))
}

/// Provenance written alongside every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputMeta {
    pub run_id: String,
    pub created: String,
    /// The fully resolved run configuration, as compact JSON.
    pub config: serde_json::Value,
}

/// Footer block mirrored as JSON next to the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FGridSummary {
    pub case: Case,
    pub points: u64,
    pub dimension: usize,
    pub n_psd: u64,
    pub f_tot: f64,
    pub metric_factor: f64,
    pub grid_points: usize,
    pub sequence: SequenceSpec,
    pub run_id: String,
    pub created: String,
    pub config: serde_json::Value,
}

impl FGridSummary {
    pub fn new(g: &FGrid, meta: &OutputMeta) -> Self {
        FGridSummary {
            case: g.case,
            points: g.points,
            dimension: g.dimension,
            n_psd: g.n_psd,
            f_tot: g.f_tot,
            metric_factor: g.case.metric_factor(),
            grid_points: g.len(),
            sequence: g.sequence.clone(),
            run_id: meta.run_id.clone(),
            created: meta.created.clone(),
            config: meta.config.clone(),
        }
    }
}

/// CSV with header `mu,nu,n_sep,F`, one row per grid value, then `# key=value`
/// footer lines.
pub fn write_fgrid_csv<W: Write>(g: &FGrid, meta: &OutputMeta, mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::io("<fgrid csv>", e);
    {
        let mut wtr = csv::Writer::from_writer(&mut w);
        let csv_err = |e: csv::Error| Error::io("<fgrid csv>", std::io::Error::other(e));
        wtr.write_record(["mu", "nu", "n_sep", "F"])
            .map_err(csv_err)?;
        for k in 0..g.len() {
            wtr.write_record(&[
                g.mu[k].to_string(),
                g.nu[k].to_string(),
                g.n_sep[k].to_string(),
                g.f[k].to_string(),
            ])
            .map_err(csv_err)?;
        }
        wtr.flush().map_err(io)?;
    }
    let seq = serde_json::to_string(&g.sequence)?;
    writeln!(w, "# case={}", g.case).map_err(io)?;
    writeln!(w, "# points={}", g.points).map_err(io)?;
    writeln!(w, "# dimension={}", g.dimension).map_err(io)?;
    writeln!(w, "# n_psd={}", g.n_psd).map_err(io)?;
    writeln!(w, "# f_tot={}", g.f_tot).map_err(io)?;
    writeln!(w, "# metric_factor={}", g.case.metric_factor()).map_err(io)?;
    writeln!(w, "# sequence={seq}").map_err(io)?;
    write_meta_footer(w, meta)
}

/// `# run_id=…`, `# created=…` and `# config=…` lines.
pub fn write_meta_footer<W: Write>(mut w: W, meta: &OutputMeta) -> Result<()> {
    let io = |e: std::io::Error| Error::io("<footer>", e);
    writeln!(w, "# run_id={}", meta.run_id).map_err(io)?;
    writeln!(w, "# created={}", meta.created).map_err(io)?;
    writeln!(w, "# config={}", meta.config).map_err(io)?;
    Ok(())
}

/// Writes `path` and its JSON mirror `path.json`.
pub fn save_fgrid(g: &FGrid, meta: &OutputMeta, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_fgrid_csv(g, meta, std::io::BufWriter::new(f))?;
    let json_path = json_sidecar(path);
    let text = serde_json::to_string_pretty(&FGridSummary::new(g, meta))?;
    fs::write(&json_path, text + "\n").map_err(|e| Error::io(&json_path, e))
}

pub fn json_sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Parses a file written by [`write_fgrid_csv`].
pub fn read_fgrid_csv<R: Read>(r: R, path: &Path) -> Result<(FGrid, Option<OutputMeta>)> {
    let bad = |reason: String| Error::Malformed {
        kind: "FGrid CSV",
        path: path.to_path_buf(),
        reason,
    };
    let mut body = String::new();
    let mut footer = Vec::new();
    for line in BufReader::new(r).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        match line.strip_prefix('#') {
            Some(rest) => {
                let rest = rest.trim();
                let (k, v) = rest
                    .split_once('=')
                    .ok_or_else(|| bad(format!("footer line without `=`: {line}")))?;
                footer.push((k.trim().to_string(), v.trim().to_string()));
            }
            None => {
                body.push_str(&line);
                body.push('\n');
            }
        }
    }
    let get = |key: &str| {
        footer
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| bad(format!("missing footer key `{key}`")))
    };
    let parse_num = |key: &str| -> Result<f64> {
        get(key)?
            .parse::<f64>()
            .map_err(|e| bad(format!("footer `{key}`: {e}")))
    };
    let case: Case = get("case")?.parse().map_err(bad)?;
    let points = get("points")?
        .parse::<u64>()
        .map_err(|e| bad(format!("footer `points`: {e}")))?;
    let n_psd = get("n_psd")?
        .parse::<u64>()
        .map_err(|e| bad(format!("footer `n_psd`: {e}")))?;
    let f_tot = parse_num("f_tot")?;
    let sequence: SequenceSpec = serde_json::from_str(get("sequence")?)
        .map_err(|e| bad(format!("footer `sequence`: {e}")))?;

    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let headers = rdr.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["mu", "nu", "n_sep", "F"] {
        return Err(bad(format!("unexpected header {headers:?}")));
    }
    let (mut mu, mut nu, mut n_sep, mut f) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| {
            rec.get(i)
                .ok_or_else(|| bad(format!("row {row}: missing column {i}")))
        };
        let num = |i: usize| -> Result<f64> {
            field(i)?
                .parse::<f64>()
                .map_err(|e| bad(format!("row {row}: {e}")))
        };
        mu.push(num(0)?);
        nu.push(num(1)?);
        n_sep.push(
            field(2)?
                .parse::<u64>()
                .map_err(|e| bad(format!("row {row}: {e}")))?,
        );
        f.push(num(3)?);
    }
    if mu.is_empty() {
        return Err(bad("no data rows".into()));
    }
    let meta = match (get("run_id"), get("created"), get("config")) {
        (Ok(run_id), Ok(created), Ok(config)) => Some(OutputMeta {
            run_id: run_id.to_string(),
            created: created.to_string(),
            config: serde_json::from_str(config)
                .map_err(|e| bad(format!("footer `config`: {e}")))?,
        }),
        _ => None,
    };
    Ok((
        FGrid {
            case,
            mu,
            nu,
            n_sep,
            f,
            n_psd,
            f_tot,
            points,
            dimension: case.dimension(),
            sequence,
        },
        meta,
    ))
}

pub fn load_fgrid(path: &Path) -> Result<(FGrid, Option<OutputMeta>)> {
    let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_fgrid_csv(f, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(case: Case, points: u64) -> EstimationConfig {
        EstimationConfig {
            grid_points: 11,
            ..EstimationConfig::desk(case).with_points(points)
        }
    }

    #[test]
    fn empty_campaign_is_rejected() {
        let cfg = small(Case::Real, 0);
        assert!(matches!(estimate_f(&cfg), Err(Error::EmptyCampaign)));
        let mut g = estimate_f(&small(Case::Real, 100)).unwrap();
        g.points = 0;
        assert!(matches!(total_volume(&g), Err(Error::EmptyCampaign)));
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = small(Case::Real, 10);
        cfg.grid_points = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = small(Case::Complex, 10);
        cfg.sequence.dimension = 6;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn counters_respect_bounds_and_zero_endpoint() {
        for case in [Case::Real, Case::Complex] {
            let g = estimate_f(&small(case, 50_000)).unwrap();
            assert_eq!(g.points, 50_000);
            assert!(g.n_psd > 0 && g.n_psd <= g.points);
            assert!(g.n_sep.iter().all(|&n| n <= g.n_psd));
            assert_eq!(g.n_sep[0], 0);
            assert_eq!(g.mu[0], 0.0);
            assert_eq!(*g.mu.last().unwrap(), 1.0);
            assert!(g.f.iter().all(|&f| f <= g.f_tot));
        }
    }

    #[test]
    fn symmetry_check_at_one_is_identical() {
        let (a, b) = symmetry_check(&small(Case::Real, 20_000), 1.0).unwrap();
        assert_eq!(a, b);
        assert!(symmetry_check(&small(Case::Real, 10), -1.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let g = estimate_f(&small(Case::Complex, 20_000)).unwrap();
        let meta = OutputMeta {
            run_id: "abc".into(),
            created: "0".into(),
            config: serde_json::json!({"k": 1}),
        };
        let mut buf = Vec::new();
        write_fgrid_csv(&g, &meta, &mut buf).unwrap();
        let (back, m) = read_fgrid_csv(&buf[..], Path::new("mem")).unwrap();
        assert_eq!(back, g);
        assert_eq!(m.unwrap(), meta);
    }

    #[test]
    fn malformed_csv_is_reported() {
        let text = "mu,nu,n_sep,F\n0,0,0,0\n# case=real\n";
        assert!(matches!(
            read_fgrid_csv(text.as_bytes(), Path::new("x.csv")),
            Err(Error::Malformed { .. })
        ));
        let text = "mu,nu,n_sep,F\n0,zero,0,0\n";
        assert!(read_fgrid_csv(text.as_bytes(), Path::new("x.csv")).is_err());
    }

    #[test]
    fn checkpoint_resume_matches_straight_run() {
        let dir = tempfile::tempdir().unwrap();
        let ck = dir.path().join("ck.json");
        let mut cfg = small(Case::Real, 150_000);
        cfg.checkpoint_interval = 40_000;
        let straight = estimate_f(&cfg).unwrap();

        // Simulate an interrupted run: a checkpoint covering the first part.
        let mut partial_cfg = cfg.clone();
        partial_cfg.sequence.count = 80_000;
        let partial = count_at(&partial_cfg, &cfg.mu_grid(), None).unwrap();
        save_checkpoint(&ck, &cfg, &partial).unwrap();

        cfg.checkpoint = Some(ck.clone());
        let resumed = estimate_f(&cfg).unwrap();
        assert_eq!(resumed, straight);

        // A different configuration must not pick the checkpoint up.
        let mut other = cfg.clone();
        other.sequence.scramble_seed = Some(99);
        assert!(matches!(estimate_f(&other), Err(Error::Malformed { .. })));
    }
}
