//! Experiment runner behind the `clusterrank` binary.
//!
//! A run is described by an [`ExperimentConfig`], usually read from a TOML
//! file and patched by command-line flags. Three commands exist:
//!
//! * `rank` ranks a dataset, bipartite or clustered, and writes
//!   `rankings.csv`, `reputations.csv`, `run.csv` and, when clustered,
//!   `clusters.csv` and `cluster_rankings.csv`;
//! * `attack-eval` compares clean and attacked runs for each method and
//!   attacker fraction and writes `attack_eval.csv`;
//! * `stats` prints dataset counts.
//!
//! CSV files have a header row, a fixed column order and numbers rendered
//! with 15 significant digits; undefined values are written as `NA`. Given the
//! same inputs, configuration and seed every file is byte-identical across
//! runs. Wall-clock timings are only written to `timings.csv` on request.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::attacks::{apply_attack, most_voted_item, AttackKind, AttackSpec, Attacked};
use crate::clustering::{rank_multipartite, MultipartiteOutcome};
use crate::dataset::{dataset_stats, k_core_filter, load_ratings, CoreMode, DatasetStats, RatingDataset, RatingScale};
use crate::error::{Error, Result};
use crate::metrics::robustness;
use crate::ranker::{run_fixed_point, RankerConfig};
use crate::similarity::{Measure, SimilarityConfig};
use crate::{scores_by_id, Scores};

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Bipartite,
    Multipartite,
}

/// Ranking method compared by `attack-eval`. Serialized as its label; parsing
/// ignores case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Method {
    /// Arithmetic average (bipartite, `lambda = 0`).
    Average,
    /// Bipartite weighted average with the configured ranker.
    Bwa,
    /// Clustered ranking with the given similarity.
    Clustered(Measure),
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Average,
        Method::Bwa,
        Method::Clustered(Measure::Linear),
        Method::Clustered(Measure::Kolmogorov),
        Method::Clustered(Measure::Compression),
    ];

    pub fn label(self) -> &'static str {
        match self {
            Method::Average => "AA",
            Method::Bwa => "BWA",
            Method::Clustered(m) => m.label(),
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "AA" => Ok(Method::Average),
            "BWA" => Ok(Method::Bwa),
            other => other.parse().map(Method::Clustered),
        }
    }
}

impl TryFrom<String> for Method {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Method> for String {
    fn from(m: Method) -> String {
        m.label().to_string()
    }
}

/// Attacker fractions swept when none are configured.
pub fn default_sweep() -> Vec<f64> {
    (0..=6).map(|i| f64::from(i) * 0.125).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub scale: RatingScale,
    /// Optional core filter applied right after loading.
    pub k_core: Option<usize>,
    pub core_mode: CoreMode,
    pub ranker: RankerConfig,
    pub similarity: SimilarityConfig,
    pub alpha: f64,
    pub mode: Mode,
    /// Communities smaller than this are left out of clustered rankings.
    pub min_cluster_size: usize,
    pub attack: Option<AttackSpec>,
    pub sweep: Option<Vec<f64>>,
    pub methods: Vec<Method>,
    /// Output directory; `rank` and `attack-eval` default to `out`.
    pub output: Option<PathBuf>,
    /// Seed for attack generation; overrides `attack.seed`.
    pub seed: u64,
    /// Also write `timings.csv` (not reproducible byte for byte).
    pub timings: bool,
    /// Also write every attacked dataset in the input CSV format.
    pub export_attacked: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: PathBuf::new(),
            scale: RatingScale::default(),
            k_core: None,
            core_mode: CoreMode::BothSides,
            ranker: RankerConfig::bwa(0.3),
            similarity: SimilarityConfig::default(),
            alpha: 0.8,
            mode: Mode::Bipartite,
            min_cluster_size: 1,
            attack: None,
            sweep: None,
            methods: Method::ALL.to_vec(),
            output: None,
            seed: 0,
            timings: false,
            export_attacked: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml_str(&text)?;
        // relative paths are relative to the config file
        if let Some(dir) = path.parent() {
            if cfg.dataset.is_relative() && !cfg.dataset.as_os_str().is_empty() {
                cfg.dataset = dir.join(&cfg.dataset);
            }
            if let Some(out) = cfg.output.as_mut().filter(|o| o.is_relative()) {
                *out = dir.join(&*out);
            }
        }
        Ok(cfg)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn validate(&self) -> Result<()> {
        if self.dataset.as_os_str().is_empty() {
            return Err(Error::config("no dataset path given"));
        }
        self.ranker.validate(self.scale.delta_norm())?;
        self.similarity.validate()?;
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::config(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        if let Some(k) = self.k_core {
            if k == 0 {
                return Err(Error::config("k_core must be at least 1"));
            }
        }
        if let Some(spec) = &self.attack {
            spec.validate()?;
        }
        for &f in self.sweep.iter().flatten() {
            AttackSpec {
                fraction: f,
                ..Default::default()
            }
            .validate()?;
        }
        Ok(())
    }

    pub fn load_dataset(&self) -> Result<RatingDataset> {
        let d = load_ratings(&self.dataset, self.scale)?;
        Ok(match self.k_core {
            Some(k) => k_core_filter(&d, k, self.core_mode),
            None => d,
        })
    }
}

/// Renders a number with 15 significant digits in plain decimal notation.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return "NA".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.14e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    let decimals = (14 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

fn format_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), format_number)
}

fn create(dir: &Path, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn finish(mut w: csv::Writer<BufWriter<File>>, dir: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(dir, e))
}

/// Result of ranking one dataset with one method.
#[derive(Debug, Clone)]
pub struct MethodRun {
    /// Bipartite rankings or displayed rankings.
    pub displayed: Scores,
    pub reputations: Scores,
    pub iterations: usize,
    pub converged: bool,
    pub clusters: Option<MultipartiteOutcome>,
}

impl MethodRun {
    /// Members of every community, as user ids.
    fn cluster_members(&self, d: &RatingDataset) -> Vec<Vec<String>> {
        self.clusters.as_ref().map_or_else(Vec::new, |mp| {
            mp.partition
                .components()
                .iter()
                .map(|c| c.iter().map(|&u| d.users()[u].clone()).collect())
                .collect()
        })
    }
}

pub fn run_method(d: &RatingDataset, method: Method, cfg: &ExperimentConfig) -> Result<MethodRun> {
    let bipartite = |ranker: &RankerConfig| -> Result<MethodRun> {
        let out = run_fixed_point(d, ranker)?;
        Ok(MethodRun {
            displayed: scores_by_id(d.items(), &out.state.rankings),
            reputations: scores_by_id(d.users(), &out.state.reputations),
            iterations: out.iterations,
            converged: out.converged,
            clusters: None,
        })
    };
    match method {
        Method::Average => bipartite(&RankerConfig {
            lambda: 0.0,
            ..cfg.ranker
        }),
        Method::Bwa => bipartite(&cfg.ranker),
        Method::Clustered(measure) => {
            let sim = SimilarityConfig {
                measure,
                ..cfg.similarity
            };
            let mp = rank_multipartite(d, &sim, cfg.alpha, &cfg.ranker, cfg.min_cluster_size)?;
            Ok(MethodRun {
                displayed: mp.result.displayed.clone(),
                reputations: mp.result.reputations(),
                iterations: mp.result.max_iterations(),
                converged: mp.result.converged(),
                clusters: Some(mp),
            })
        }
    }
}

/// What `rank` reports besides its files.
#[derive(Debug, Clone)]
pub struct RankSummary {
    pub iterations: usize,
    pub converged: bool,
    pub clusters: Option<usize>,
}

/// Ranks the configured dataset and writes the result files.
pub fn run_rank(cfg: &ExperimentConfig) -> Result<RankSummary> {
    cfg.validate()?;
    let d = cfg.load_dataset()?;
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let method = match cfg.mode {
        Mode::Bipartite => Method::Bwa,
        Mode::Multipartite => Method::Clustered(cfg.similarity.measure),
    };
    let run = run_method(&d, method, cfg)?;

    let mut w = create(&dir, "rankings.csv")?;
    w.write_record(["item", "ranking"])?;
    for (item, r) in &run.displayed {
        w.write_record([item.as_str(), &format_number(*r)])?;
    }
    finish(w, &dir)?;

    let mut w = create(&dir, "reputations.csv")?;
    w.write_record(["user", "reputation"])?;
    for (user, c) in &run.reputations {
        w.write_record([user.as_str(), &format_number(*c)])?;
    }
    finish(w, &dir)?;

    let mut w = create(&dir, "run.csv")?;
    w.write_record(["mode", "cluster_id", "size", "iterations", "converged"])?;
    match &run.clusters {
        None => {
            w.write_record([
                "bipartite",
                "NA",
                &d.num_users().to_string(),
                &run.iterations.to_string(),
                &run.converged.to_string(),
            ])?;
        }
        Some(mp) => {
            for c in &mp.result.per_cluster {
                w.write_record([
                    "multipartite",
                    &c.cluster.to_string(),
                    &c.size.to_string(),
                    &c.iterations.to_string(),
                    &c.converged.to_string(),
                ])?;
            }
        }
    }
    finish(w, &dir)?;

    if let Some(mp) = &run.clusters {
        let path = dir.join("clusters.csv");
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        mp.partition.write_csv(&d, BufWriter::new(file))?;
        let mut w = create(&dir, "cluster_rankings.csv")?;
        w.write_record(["cluster_id", "item", "ranking"])?;
        for c in &mp.result.per_cluster {
            for (item, r) in &c.rankings {
                w.write_record([&c.cluster.to_string(), item.as_str(), &format_number(*r)])?;
            }
        }
        finish(w, &dir)?;
    }

    Ok(RankSummary {
        iterations: run.iterations,
        converged: run.converged,
        clusters: run.clusters.as_ref().map(|mp| mp.partition.len()),
    })
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

/// `rank` command: 0 on success, 1 on configuration errors, 2 on runtime
/// failures or when the iteration did not converge (files are still
/// written, and `run.csv` flags the offending runs).
pub fn cmd_rank(cfg: &ExperimentConfig) -> i32 {
    match run_rank(cfg) {
        Ok(s) => {
            match s.clusters {
                Some(n) => println!("clusters: {n}"),
                None => println!("mode: bipartite"),
            }
            println!("iterations: {}", s.iterations);
            println!("converged: {}", s.converged);
            if s.converged {
                EXIT_OK
            } else {
                warn!("ranking did not converge within {} iterations", cfg.ranker.max_iters);
                EXIT_RUNTIME
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// One `attack_eval.csv` row.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRow {
    pub method: Method,
    pub fraction: f64,
    pub attackers: usize,
    pub robustness: Option<f64>,
    pub target: Option<String>,
    pub target_clean: Option<f64>,
    pub target_attacked: Option<f64>,
    /// Target ranking in the largest clean community that rated it.
    pub target_cluster_clean: Option<f64>,
    /// Target ranking in the attacked community overlapping that one most.
    pub target_cluster_attacked: Option<f64>,
    pub iterations_clean: usize,
    pub iterations_attacked: usize,
    pub converged: bool,
    pub wall_ms: f64,
}

pub const EVAL_HEADER: [&str; 12] = [
    "method",
    "fraction",
    "attackers",
    "robustness",
    "target",
    "target_clean",
    "target_attacked",
    "target_cluster_clean",
    "target_cluster_attacked",
    "iterations_clean",
    "iterations_attacked",
    "converged",
];

impl EvalRow {
    fn record(&self) -> Vec<String> {
        vec![
            self.method.label().to_string(),
            format_number(self.fraction),
            self.attackers.to_string(),
            format_opt(self.robustness),
            self.target.clone().unwrap_or_else(|| "NA".into()),
            format_opt(self.target_clean),
            format_opt(self.target_attacked),
            format_opt(self.target_cluster_clean),
            format_opt(self.target_cluster_attacked),
            self.iterations_clean.to_string(),
            self.iterations_attacked.to_string(),
            self.converged.to_string(),
        ]
    }
}

/// Largest clean community containing a rater of `target`, and its ranking
/// of the target.
fn largest_rating_cluster(run: &MethodRun, target: &str) -> Option<(usize, f64)> {
    let mp = run.clusters.as_ref()?;
    mp.result
        .per_cluster
        .iter()
        .filter_map(|c| c.rankings.get(target).map(|&r| (c.cluster, c.size, r)))
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(k, _, r)| (k, r))
}

/// Ranking of `target` in the attacked community sharing the most members
/// with `clean_members`.
fn matched_cluster_ranking(run: &MethodRun, d: &RatingDataset, clean_members: &[String], target: &str) -> Option<f64> {
    let mp = run.clusters.as_ref()?;
    let mut overlap: HashMap<usize, usize> = HashMap::new();
    for id in clean_members {
        if let Some(u) = d.user_index(id) {
            *overlap.entry(mp.partition.cluster_of(u)).or_insert(0) += 1;
        }
    }
    let best = overlap.into_iter().max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))?.0;
    mp.result.run_for(best)?.rankings.get(target).copied()
}

/// Target item and in-largest-cluster measurements shared by every row.
struct CleanView<'a> {
    dataset: &'a RatingDataset,
    run: MethodRun,
}

/// Runs every configured method on clean and attacked data for each
/// attacker fraction. Rows come back in `(fraction, method)` order.
pub fn evaluate_attacks(cfg: &ExperimentConfig, d: &RatingDataset) -> Result<Vec<EvalRow>> {
    let mut spec = cfg.attack.unwrap_or_default();
    spec.seed = cfg.seed;
    let fractions = match (&cfg.sweep, &cfg.attack) {
        (Some(s), _) => s.clone(),
        (None, Some(a)) => vec![a.fraction],
        (None, None) => default_sweep(),
    };
    let target = most_voted_item(d).map(|j| d.items()[j].clone());

    let clean: Vec<CleanView<'_>> = cfg
        .methods
        .par_iter()
        .map(|&m| {
            Ok(CleanView {
                dataset: d,
                run: run_method(d, m, cfg)?,
            })
        })
        .collect::<Result<_>>()?;

    // Attacks that do not look at rankings are shared across methods.
    let shared: Vec<Option<Attacked>> = fractions
        .par_iter()
        .map(|&f| {
            let s = AttackSpec { fraction: f, ..spec };
            match s.kind {
                AttackKind::ReputationAttack => Ok(None),
                _ => apply_attack(d, &s, None).map(Some),
            }
        })
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, usize)> = (0..fractions.len())
        .flat_map(|fi| (0..cfg.methods.len()).map(move |mi| (fi, mi)))
        .collect();
    let rows: Vec<(EvalRow, Option<Attacked>)> = tasks
        .par_iter()
        .map(|&(fi, mi)| -> Result<(EvalRow, Option<Attacked>)> {
            let started = Instant::now();
            let method = cfg.methods[mi];
            let clean_view = &clean[mi];
            let s = AttackSpec {
                fraction: fractions[fi],
                ..spec
            };
            let own;
            let attacked = match &shared[fi] {
                Some(a) => a,
                None => {
                    own = apply_attack(d, &s, Some(&clean_view.run.displayed))?;
                    &own
                }
            };
            let run = run_method(&attacked.dataset, method, cfg)?;
            let tgt = attacked.target.clone().or_else(|| target.clone());
            let (cluster_clean, cluster_attacked) = match tgt
                .as_deref()
                .and_then(|t| largest_rating_cluster(&clean_view.run, t).map(|(k, r)| (t, k, r)))
            {
                Some((t, k, r)) => {
                    let members = &clean_view.run.cluster_members(clean_view.dataset)[k];
                    (Some(r), matched_cluster_ranking(&run, &attacked.dataset, members, t))
                }
                None => (None, None),
            };
            let robust = match robustness(&clean_view.run.displayed, &run.displayed) {
                Ok(t) => Some(t),
                Err(Error::UndefinedMetric(msg)) => {
                    warn!("{} at fraction {}: {msg}", method.label(), s.fraction);
                    None
                }
                Err(e) => return Err(e),
            };
            let row = EvalRow {
                method,
                fraction: s.fraction,
                attackers: attacked.attackers.len(),
                robustness: robust,
                target_clean: tgt.as_ref().and_then(|t| clean_view.run.displayed.get(t).copied()),
                target_attacked: tgt.as_ref().and_then(|t| run.displayed.get(t).copied()),
                target: tgt,
                target_cluster_clean: cluster_clean,
                target_cluster_attacked: cluster_attacked,
                iterations_clean: clean_view.run.iterations,
                iterations_attacked: run.iterations,
                converged: clean_view.run.converged && run.converged,
                wall_ms: started.elapsed().as_secs_f64() * 1e3,
            };
            let keep = (shared[fi].is_none() && cfg.export_attacked).then(|| attacked.clone());
            Ok((row, keep))
        })
        .collect::<Result<_>>()?;

    if cfg.export_attacked {
        let dir = cfg.output_dir();
        for (fi, a) in shared.iter().enumerate() {
            if let Some(a) = a {
                write_dataset(
                    &dir,
                    &format!("attacked_{}.csv", format_number(fractions[fi])),
                    &a.dataset,
                )?;
            }
        }
        for (row, a) in &rows {
            if let Some(a) = a {
                let name = format!("attacked_{}_{}.csv", row.method.label(), format_number(row.fraction));
                write_dataset(&dir, &name, &a.dataset)?;
            }
        }
    }
    Ok(rows.into_iter().map(|(r, _)| r).collect())
}

fn write_dataset(dir: &Path, name: &str, d: &RatingDataset) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    d.write_csv(BufWriter::new(file))
}

/// Writes `attack_eval.csv` (and `timings.csv` when enabled) for the
/// configured dataset.
pub fn run_attack_eval(cfg: &ExperimentConfig) -> Result<Vec<EvalRow>> {
    cfg.validate()?;
    if cfg.attack.is_none() && cfg.sweep.is_none() {
        return Err(Error::config("attack-eval needs an attack or a sweep"));
    }
    if cfg.methods.is_empty() {
        return Err(Error::config("no methods selected"));
    }
    let d = cfg.load_dataset()?;
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let rows = evaluate_attacks(cfg, &d)?;

    let mut w = create(&dir, "attack_eval.csv")?;
    w.write_record(EVAL_HEADER)?;
    for row in &rows {
        w.write_record(row.record())?;
    }
    finish(w, &dir)?;
    if cfg.timings {
        let mut w = create(&dir, "timings.csv")?;
        w.write_record(["method", "fraction", "wall_ms"])?;
        for row in &rows {
            w.write_record([
                row.method.label(),
                &format_number(row.fraction),
                &format!("{:.3}", row.wall_ms),
            ])?;
        }
        finish(w, &dir)?;
    }
    Ok(rows)
}

/// `attack-eval` command. Undefined metrics become `NA` cells; the exit code
/// is nonzero only for configuration, I/O or numerical failures.
pub fn cmd_attack_eval(cfg: &ExperimentConfig) -> i32 {
    match run_attack_eval(cfg) {
        Ok(rows) => {
            info!("wrote {} rows", rows.len());
            println!("rows: {}", rows.len());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StatsFormat {
    #[default]
    Csv,
    Json,
}

pub fn write_stats<W: Write>(stats: &DatasetStats, format: StatsFormat, mut out: W) -> Result<()> {
    match format {
        StatsFormat::Csv => {
            writeln!(out, "users,items,ratings")
                .and_then(|_| writeln!(out, "{},{},{}", stats.users, stats.items, stats.ratings))
        }
        .map_err(|e| Error::io("<stdout>", e)),
        StatsFormat::Json => {
            serde_json::to_writer_pretty(&mut out, stats).map_err(|e| Error::io("<stdout>", e.into()))?;
            writeln!(out).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

/// Counts for the configured dataset (after the optional core filter). With
/// an output directory, also writes `stats.csv` and `ratings_per_item.csv`.
pub fn run_stats(cfg: &ExperimentConfig) -> Result<DatasetStats> {
    if cfg.dataset.as_os_str().is_empty() {
        return Err(Error::config("no dataset path given"));
    }
    let stats = dataset_stats(&cfg.load_dataset()?);
    if let Some(dir) = &cfg.output {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut w = create(dir, "stats.csv")?;
        w.write_record(["users", "items", "ratings"])?;
        w.write_record([
            stats.users.to_string(),
            stats.items.to_string(),
            stats.ratings.to_string(),
        ])?;
        finish(w, dir)?;
        let mut w = create(dir, "ratings_per_item.csv")?;
        w.write_record(["item", "ratings"])?;
        for (item, n) in &stats.ratings_per_item {
            w.write_record([item.as_str(), &n.to_string()])?;
        }
        finish(w, dir)?;
    }
    Ok(stats)
}

/// `stats` command; prints the summary to stdout.
pub fn cmd_stats(cfg: &ExperimentConfig, format: StatsFormat) -> i32 {
    let res = run_stats(cfg).and_then(|s| write_stats(&s, format, std::io::stdout().lock()));
    match res {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
