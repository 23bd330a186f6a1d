//! Command-line surface: seeded construction, analysis, and experiment
//! runs behind flat key=value config files with flag overrides.
//!
//! Exit codes: 0 on success, 1 when the verify gate or a strict-mode
//! guard fails, 2 on usage or config errors. Reports go to stdout unless
//! `--out` names a file; nothing else is written anywhere.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::analysis::{bad_pairs, bad_sequences, cleanup, CleanupCertificate};
use crate::construct::{build_multi, params, Model, ModelInputs, ModelParams};
use crate::gf::{Field, Fq};
use crate::lab::{
    dichotomy_probe, emit_report, expectation_suite, moment_sweep, scaling_fit, vanishing_mc,
    vanishing_prob_exact, LabError, MomentReport, Report, ReportFormat,
};

// ---------------------------------------------------------------------------
// Errors and exit codes
// ---------------------------------------------------------------------------

#[derive(Debug)]
enum CliError {
    /// Bad flags, bad config file, missing required fields.
    Usage(String),
    /// The run itself failed (infeasible parameters, io).
    Run(String),
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> CliError {
        CliError::Run(e.to_string())
    }
}

const USAGE: &str = "\
usage: turanlab <command> [--flag value]...

commands:
  construct   build one seeded multigraph and emit it in HGR v1 text
  analyze     detect over-threshold structures, clean up, certify
  expect      per-trial edge/multi-edge/structure statistics
  moments     completion-count moments across field orders
  dichotomy   histogram of completion counts over sampled sequences
  scaling     log-log fit of post-cleanup edges against vertex count
  lemma22     exact (and optional Monte Carlo) vanishing probability
  verify      run the full acceptance gate

flags (config file keys use the same names, without the dashes):
  --model A|B|C    --r N         --s a,b,..   --t N        --l N
  --q N            --qs a,b,..   --h N        --d N        --usize N
  --samples N      --exponent N  --seed N     --trials N   --threshold a,b,..
  --degree-override N            --threads N  --out PATH   --format json|csv
  --config PATH    --strict

`--config` loads key=value lines first; explicit flags override the file.
Defaults: r 2 (3 for models B/C), h 1, d 8, usize 2, samples 0,
exponent 1, seed 0, trials 100, threshold 4, format json.";

// ---------------------------------------------------------------------------
// RunConfig: flat key=value config with flag overrides
// ---------------------------------------------------------------------------

/// Everything a subcommand can consume. `model`, the model inputs
/// (`s`/`t`/`l`), and `q` have no defaults; every other field does.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Option<Model>,
    pub r: Option<usize>,
    /// Model A part sizes.
    pub s: Vec<usize>,
    pub t: Option<usize>,
    pub l: Option<usize>,
    pub q: Option<u64>,
    /// Field-order list for sweeps; falls back to `q` alone.
    pub qs: Vec<u64>,
    pub h: usize,
    /// Degree bound for `lemma22`.
    pub d: usize,
    /// Tuple-set size for `lemma22`.
    pub usize_: usize,
    /// Monte Carlo sample count for `lemma22`; 0 means exact only.
    pub samples: usize,
    pub exponent: u32,
    pub seed: u64,
    pub trials: usize,
    pub thresholds: Vec<u64>,
    pub degree_override: Option<usize>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
    pub strict: bool,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            model: None,
            r: None,
            s: Vec::new(),
            t: None,
            l: None,
            q: None,
            qs: Vec::new(),
            h: 1,
            d: 8,
            usize_: 2,
            samples: 0,
            exponent: 1,
            seed: 0,
            trials: 100,
            thresholds: vec![4],
            degree_override: None,
            threads: None,
            out: None,
            format: ReportFormat::Json,
            strict: false,
        }
    }
}

fn parse_field<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value.parse().map_err(|_| format!("field `{key}`: cannot parse {value:?}"))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, String> {
    value
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse().map_err(|_| format!("field `{key}`: cannot parse {value:?}")))
        .collect()
}

impl RunConfig {
    /// Set one field by its config key. Errors name the field.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "model" => {
                self.model = Some(match value {
                    "A" | "a" => Model::A,
                    "B" | "b" => Model::B,
                    "C" | "c" => Model::C,
                    _ => return Err(format!("field `model`: expected A, B, or C, got {value:?}")),
                })
            }
            "r" => self.r = Some(parse_field(key, value)?),
            "s" => self.s = parse_list(key, value)?,
            "t" => self.t = Some(parse_field(key, value)?),
            "l" => self.l = Some(parse_field(key, value)?),
            "q" => self.q = Some(parse_field(key, value)?),
            "qs" => self.qs = parse_list(key, value)?,
            "h" => self.h = parse_field(key, value)?,
            "d" => self.d = parse_field(key, value)?,
            "usize" => self.usize_ = parse_field(key, value)?,
            "samples" => self.samples = parse_field(key, value)?,
            "exponent" => self.exponent = parse_field(key, value)?,
            "seed" => self.seed = parse_field(key, value)?,
            "trials" => self.trials = parse_field(key, value)?,
            "threshold" => self.thresholds = parse_list(key, value)?,
            "degree-override" => self.degree_override = Some(parse_field(key, value)?),
            "threads" => self.threads = Some(parse_field(key, value)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "format" => {
                self.format = value
                    .parse()
                    .map_err(|_| format!("field `format`: expected json or csv, got {value:?}"))?
            }
            "strict" => {
                self.strict = match value {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    _ => return Err(format!("field `strict`: expected true or false, got {value:?}")),
                }
            }
            _ => return Err(format!("unknown field `{key}`")),
        }
        Ok(())
    }

    /// Key=value lines for every field that differs from the default, in a
    /// fixed order. `parse(serialize(c)) == c`.
    pub fn serialize(&self) -> String {
        let def = RunConfig::default();
        let mut s = String::new();
        if let Some(m) = self.model {
            let _ = writeln!(s, "model={m:?}");
        }
        if let Some(r) = self.r {
            let _ = writeln!(s, "r={r}");
        }
        if !self.s.is_empty() {
            let _ = writeln!(s, "s={}", join(&self.s));
        }
        if let Some(t) = self.t {
            let _ = writeln!(s, "t={t}");
        }
        if let Some(l) = self.l {
            let _ = writeln!(s, "l={l}");
        }
        if let Some(q) = self.q {
            let _ = writeln!(s, "q={q}");
        }
        if !self.qs.is_empty() {
            let _ = writeln!(s, "qs={}", join(&self.qs));
        }
        if self.h != def.h {
            let _ = writeln!(s, "h={}", self.h);
        }
        if self.d != def.d {
            let _ = writeln!(s, "d={}", self.d);
        }
        if self.usize_ != def.usize_ {
            let _ = writeln!(s, "usize={}", self.usize_);
        }
        if self.samples != def.samples {
            let _ = writeln!(s, "samples={}", self.samples);
        }
        if self.exponent != def.exponent {
            let _ = writeln!(s, "exponent={}", self.exponent);
        }
        if self.seed != def.seed {
            let _ = writeln!(s, "seed={}", self.seed);
        }
        if self.trials != def.trials {
            let _ = writeln!(s, "trials={}", self.trials);
        }
        if self.thresholds != def.thresholds {
            let _ = writeln!(s, "threshold={}", join(&self.thresholds));
        }
        if let Some(o) = self.degree_override {
            let _ = writeln!(s, "degree-override={o}");
        }
        if let Some(n) = self.threads {
            let _ = writeln!(s, "threads={n}");
        }
        if let Some(p) = &self.out {
            let _ = writeln!(s, "out={}", p.display());
        }
        if self.format != def.format {
            let _ = writeln!(s, "format=csv");
        }
        if self.strict {
            let _ = writeln!(s, "strict=true");
        }
        s
    }

    /// Parse key=value lines over the defaults. `#` starts a comment.
    pub fn parse(text: &str) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("config line {}: expected key=value, got {raw:?}", idx + 1))?;
            cfg.apply(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

// ---------------------------------------------------------------------------
// Flag parsing
// ---------------------------------------------------------------------------

fn parse_args(rest: &[String]) -> Result<RunConfig, CliError> {
    // Config files first, so explicit flags always override them.
    let mut cfg = RunConfig::default();
    let mut i = 0;
    while i < rest.len() {
        if rest[i] == "--config" {
            let path = rest
                .get(i + 1)
                .ok_or_else(|| CliError::Usage("--config needs a path".into()))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("config {path}: {e}")))?;
            cfg = RunConfig::parse(&text).map_err(CliError::Usage)?;
            i += 2;
        } else {
            i += if rest[i] == "--strict" { 1 } else { 2 };
        }
    }
    let mut i = 0;
    while i < rest.len() {
        let flag = &rest[i];
        let key = flag
            .strip_prefix("--")
            .ok_or_else(|| CliError::Usage(format!("expected a --flag, got {flag:?}")))?;
        if key == "strict" {
            cfg.strict = true;
            i += 1;
            continue;
        }
        let value = rest
            .get(i + 1)
            .ok_or_else(|| CliError::Usage(format!("--{key} needs a value")))?;
        if key != "config" {
            cfg.apply(key, value).map_err(CliError::Usage)?;
        }
        i += 2;
    }
    Ok(cfg)
}

// ---------------------------------------------------------------------------
// Shared pieces
// ---------------------------------------------------------------------------

/// Factor a prime power: 25 -> (5, 2). Anything else is a config error.
fn parse_order(q: u64) -> Result<(u64, u32), CliError> {
    if q < 2 {
        return Err(CliError::Usage(format!("field `q`: order {q} is below 2")));
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut k = 0u32;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest != 1 {
        return Err(CliError::Usage(format!("field `q`: {q} is not a prime power")));
    }
    Ok((p, k))
}

fn field_for(q: u64) -> Result<Field, CliError> {
    let (p, k) = parse_order(q)?;
    Field::new(p, k).map_err(|e| CliError::Run(e.to_string()))
}

fn need_q(cfg: &RunConfig) -> Result<u64, CliError> {
    cfg.q.ok_or_else(|| CliError::Usage("field `q` is required".into()))
}

fn need_model(cfg: &RunConfig) -> Result<(ModelInputs, usize), CliError> {
    let model = cfg
        .model
        .ok_or_else(|| CliError::Usage("field `model` is required".into()))?;
    let inputs = match model {
        Model::A => {
            if cfg.s.is_empty() {
                return Err(CliError::Usage("field `s`: model A needs part sizes".into()));
            }
            ModelInputs::A { part_sizes: cfg.s.clone() }
        }
        Model::B => ModelInputs::B {
            t: cfg.t.ok_or_else(|| CliError::Usage("field `t`: model B needs it".into()))?,
        },
        Model::C => ModelInputs::C {
            ell: cfg.l.ok_or_else(|| CliError::Usage("field `l`: model C needs it".into()))?,
        },
    };
    let r = cfg.r.unwrap_or(match model {
        Model::A => 2,
        Model::B | Model::C => 3,
    });
    Ok((inputs, r))
}

fn model_params(cfg: &RunConfig) -> Result<(ModelParams, Field), CliError> {
    let (inputs, r) = need_model(cfg)?;
    let q = need_q(cfg)?;
    let p = params(&inputs, r, q, cfg.h, cfg.degree_override)
        .map_err(|e| CliError::Run(e.to_string()))?;
    Ok((p, field_for(q)?))
}

fn install_threads(cfg: &RunConfig) {
    if let Some(n) = cfg.threads {
        // First initialization wins; per-trial derived streams keep
        // results independent of the pool size anyway.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Print to stdout or write to `--out`.
fn deliver<R: Report>(report: &R, cfg: &RunConfig) -> Result<(), CliError> {
    match &cfg.out {
        Some(path) => {
            emit_report(report, cfg.format, path)?;
            println!("wrote {}", path.display());
            Ok(())
        }
        None => {
            match cfg.format {
                ReportFormat::Json => print!("{}", report.json()),
                ReportFormat::Csv => print!("{}", report.csv()),
            }
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

fn cmd_construct(cfg: &RunConfig) -> Result<i32, CliError> {
    let (p, field) = model_params(cfg)?;
    let (g, _) = build_multi(&p, &field, cfg.seed).map_err(|e| CliError::Run(e.to_string()))?;
    let text = g.serialize();
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, &text).map_err(|e| CliError::Run(e.to_string()))?;
            println!(
                "wrote {} ({} vertices, {} edges, {} layers)",
                path.display(),
                g.n(),
                g.edge_count(),
                g.layers()
            );
        }
        None => print!("{text}"),
    }
    Ok(0)
}

/// Detection plus cleanup in one report.
#[derive(Debug, Clone, Serialize)]
struct AnalyzeReport {
    params: ModelParams,
    master_seed: u64,
    threshold: u64,
    edges: usize,
    multi_sets: usize,
    bad_structures: usize,
    certificate: CleanupCertificate,
}

impl Report for AnalyzeReport {
    fn csv(&self) -> String {
        let mut s = String::from(
            "threshold,edges,multi_sets,bad_structures,removed,edges_after\n",
        );
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            self.threshold,
            self.edges,
            self.multi_sets,
            self.bad_structures,
            self.certificate.vertices_removed.len(),
            self.certificate.edges_after
        );
        s
    }
}

fn cmd_analyze(cfg: &RunConfig) -> Result<i32, CliError> {
    let (p, field) = model_params(cfg)?;
    let threshold = cfg.thresholds.first().copied().unwrap_or(4);
    let (g, _) = build_multi(&p, &field, cfg.seed).map_err(|e| CliError::Run(e.to_string()))?;
    let bad_structures = match p.model {
        Model::C => bad_pairs(&g, p.ell, threshold).map_err(|e| CliError::Run(e.to_string()))?.len(),
        _ => bad_sequences(&g, &p, threshold).map_err(|e| CliError::Run(e.to_string()))?.len(),
    };
    let multi_sets = g.multiplicity_map().values().filter(|&&m| m >= 2).count();
    let (_, certificate) = cleanup(&g, &p, threshold).map_err(|e| CliError::Run(e.to_string()))?;
    let report = AnalyzeReport {
        params: p,
        master_seed: cfg.seed,
        threshold,
        edges: g.edge_count(),
        multi_sets,
        bad_structures,
        certificate,
    };
    deliver(&report, cfg)?;
    Ok(0)
}

fn cmd_expect(cfg: &RunConfig) -> Result<i32, CliError> {
    let (p, field) = model_params(cfg)?;
    let report = expectation_suite(&p, &field, cfg.trials, &cfg.thresholds, cfg.seed)?;
    for note in &report.guard_notes {
        eprintln!("note: {note}");
    }
    deliver(&report, cfg)?;
    Ok(0)
}

/// Moment reports across a field-order sweep.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
struct MomentSweepReport {
    reports: Vec<MomentReport>,
}

impl Report for MomentSweepReport {
    fn csv(&self) -> String {
        let mut s = String::from("q,exponent,trials,mean,stderr\n");
        for r in &self.reports {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.params.q, r.exponent, r.trials, r.mean, r.stderr
            );
        }
        s
    }
}

fn sweep_fields(cfg: &RunConfig) -> Result<Vec<Field>, CliError> {
    let orders = if cfg.qs.is_empty() {
        vec![need_q(cfg).map_err(|_| {
            CliError::Usage("field `qs` (or `q`) is required for a sweep".into())
        })?]
    } else {
        cfg.qs.clone()
    };
    orders.into_iter().map(field_for).collect()
}

fn cmd_moments(cfg: &RunConfig) -> Result<i32, CliError> {
    let (inputs, r) = need_model(cfg)?;
    let fields = sweep_fields(cfg)?;
    let reports = moment_sweep(
        &inputs,
        r,
        cfg.h,
        &fields,
        cfg.exponent,
        cfg.trials,
        cfg.seed,
        cfg.degree_override,
    )?;
    deliver(&MomentSweepReport { reports }, cfg)?;
    Ok(0)
}

fn cmd_dichotomy(cfg: &RunConfig) -> Result<i32, CliError> {
    let (p, field) = model_params(cfg)?;
    let report = dichotomy_probe(&p, &field, cfg.trials, cfg.seed)?;
    deliver(&report, cfg)?;
    Ok(0)
}

fn cmd_scaling(cfg: &RunConfig) -> Result<i32, CliError> {
    let (inputs, r) = need_model(cfg)?;
    let fields = sweep_fields(cfg)?;
    let threshold = cfg.thresholds.first().copied().unwrap_or(4);
    let report =
        scaling_fit(&inputs, r, cfg.h, &fields, threshold, cfg.trials, cfg.seed, cfg.degree_override)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!("slope {:.4}, intercept {:.4}", report.slope, report.intercept);
    deliver(&report, cfg)?;
    Ok(0)
}

/// Smallest pool with enough r-subsets for the requested tuple count.
fn lemma22_tuples(
    field: &Field,
    r: usize,
    t: usize,
    u_size: usize,
    seed: u64,
) -> Result<Vec<Vec<Vec<Fq>>>, CliError> {
    use rand::{Rng, SeedableRng};
    let mut pool_len = r;
    while crate::sympoly::binomial(pool_len as u64, r as u64) < u_size as u128 {
        pool_len += 1;
        if pool_len as u128 > (1 << 24) {
            return Err(CliError::Usage("field `usize`: too many tuples requested".into()));
        }
    }
    let vectors = (field.q() as u128).saturating_pow(t as u32);
    if (pool_len as u128) > vectors {
        return Err(CliError::Usage(format!(
            "field `usize`: needs {pool_len} distinct points but F_q^{t} has only {vectors}"
        )));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<Vec<Fq>> = Vec::with_capacity(pool_len);
    while pool.len() < pool_len {
        let p: Vec<Fq> = (0..t)
            .map(|_| field.element(rng.gen_range(0..field.q())).expect("in range"))
            .collect();
        if !pool.contains(&p) {
            pool.push(p);
        }
    }
    // First u_size r-subsets of the pool in lexicographic order.
    let mut tuples = Vec::with_capacity(u_size);
    let mut combo: Vec<usize> = (0..r).collect();
    loop {
        tuples.push(combo.iter().map(|&i| pool[i].clone()).collect::<Vec<_>>());
        if tuples.len() == u_size {
            return Ok(tuples);
        }
        let mut i = r;
        loop {
            if i == 0 {
                return Err(CliError::Usage("field `usize`: pool exhausted".into()));
            }
            i -= 1;
            if combo[i] != i + pool_len - r {
                break;
            }
        }
        combo[i] += 1;
        for j in i + 1..r {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

fn cmd_lemma22(cfg: &RunConfig) -> Result<i32, CliError> {
    let q = need_q(cfg)?;
    let field = field_for(q)?;
    let r = cfg.r.unwrap_or(2);
    let t = cfg.t.unwrap_or(2);
    let tuples = lemma22_tuples(&field, r, t, cfg.usize_, cfg.seed)?;
    let exact = vanishing_prob_exact(&field, r, t, cfg.d, &tuples)?;
    println!(
        "P[vanishing on {} tuples] = {q}^-{} = {}",
        exact.u_len, exact.rank, exact.probability
    );
    for note in &exact.guard_notes {
        eprintln!("warning: {note}");
    }
    if cfg.samples > 0 {
        let mc = vanishing_mc(&field, r, t, cfg.d, &tuples, cfg.samples, cfg.seed)?;
        println!(
            "empirical frequency {} over {} samples ({} hits)",
            mc.frequency, mc.samples, mc.hits
        );
        if cfg.out.is_some() {
            deliver(&mc, cfg)?;
        }
    } else if cfg.out.is_some() {
        deliver(&exact, cfg)?;
    }
    if cfg.strict && !exact.guards_ok {
        eprintln!("strict mode: guard violations are failures");
        return Ok(1);
    }
    Ok(0)
}

fn cmd_verify(cfg: &RunConfig) -> Result<i32, CliError> {
    let results = crate::acceptance::run_all();
    let mut text = String::new();
    for r in &results {
        let _ = writeln!(text, "{}", r.line());
    }
    print!("{text}");
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", results.len());
    if let Some(path) = &cfg.out {
        std::fs::write(path, &text).map_err(|e| CliError::Run(e.to_string()))?;
    }
    Ok(if passed == results.len() { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Run one command; returns the process exit code.
pub fn run(args: Vec<String>) -> i32 {
    let command = match args.first().map(String::as_str) {
        None => {
            eprintln!("{USAGE}");
            return 2;
        }
        Some("help") | Some("--help") | Some("-h") => {
            println!("{USAGE}");
            return 0;
        }
        Some(c) => c.to_string(),
    };
    let body = || -> Result<i32, CliError> {
        let cfg = parse_args(&args[1..])?;
        install_threads(&cfg);
        match command.as_str() {
            "construct" => cmd_construct(&cfg),
            "analyze" => cmd_analyze(&cfg),
            "expect" => cmd_expect(&cfg),
            "moments" => cmd_moments(&cfg),
            "dichotomy" => cmd_dichotomy(&cfg),
            "scaling" => cmd_scaling(&cfg),
            "lemma22" => cmd_lemma22(&cfg),
            "verify" => cmd_verify(&cfg),
            other => Err(CliError::Usage(format!("unknown command {other:?}"))),
        }
    };
    match body() {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `turanlab help` for usage");
            2
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            2
        }
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_the_file_format() {
        let mut cfg = RunConfig::default();
        assert_eq!(RunConfig::parse(&cfg.serialize()).unwrap(), cfg);

        cfg.model = Some(Model::A);
        cfg.s = vec![2, 3];
        cfg.q = Some(25);
        cfg.qs = vec![3, 5, 7];
        cfg.h = 2;
        cfg.seed = 99;
        cfg.trials = 7;
        cfg.thresholds = vec![4, 8];
        cfg.degree_override = Some(6);
        cfg.threads = Some(2);
        cfg.out = Some(PathBuf::from("/tmp/report.json"));
        cfg.format = ReportFormat::Csv;
        cfg.strict = true;
        assert_eq!(RunConfig::parse(&cfg.serialize()).unwrap(), cfg);

        let mut other = RunConfig::default();
        other.model = Some(Model::C);
        other.l = Some(2);
        other.t = Some(4);
        other.r = Some(3);
        other.d = 12;
        other.usize_ = 3;
        other.samples = 1000;
        other.exponent = 4;
        assert_eq!(RunConfig::parse(&other.serialize()).unwrap(), other);
    }

    #[test]
    fn config_parser_reports_field_names() {
        let err = RunConfig::parse("q=banana\n").unwrap_err();
        assert!(err.contains("`q`"), "{err}");
        let err = RunConfig::parse("mystery=1\n").unwrap_err();
        assert!(err.contains("`mystery`"), "{err}");
        let err = RunConfig::parse("just a line\n").unwrap_err();
        assert!(err.contains("line 1"), "{err}");
        // Comments and blanks are fine.
        let cfg = RunConfig::parse("# comment\n\nq=5\n").unwrap();
        assert_eq!(cfg.q, Some(5));
    }

    #[test]
    fn prime_power_orders_factor() {
        assert_eq!(parse_order(7).unwrap(), (7, 1));
        assert_eq!(parse_order(25).unwrap(), (5, 2));
        assert_eq!(parse_order(256).unwrap(), (2, 8));
        assert!(parse_order(12).is_err());
        assert!(parse_order(1).is_err());
        assert!(parse_order(0).is_err());
    }

    #[test]
    fn usage_errors_exit_with_2() {
        let run_v = |args: &[&str]| run(args.iter().map(|s| s.to_string()).collect());
        assert_eq!(run_v(&[]), 2);
        assert_eq!(run_v(&["frobnicate"]), 2);
        assert_eq!(run_v(&["construct"]), 2); // model missing
        assert_eq!(run_v(&["construct", "--model", "A", "--s", "2"]), 2); // q missing
        assert_eq!(run_v(&["construct", "--model", "D", "--q", "5"]), 2);
        assert_eq!(run_v(&["construct", "--model"]), 2); // value missing
        assert_eq!(run_v(&["expect", "--model", "A", "--s", "2", "--q", "12"]), 2);
        assert_eq!(run_v(&["help"]), 0);
    }

    #[test]
    fn flags_override_config_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "model=A\ns=2\nq=5\nseed=7\ntrials=3\n").unwrap();
        let args: Vec<String> = ["--config", path.to_str().unwrap(), "--seed", "9"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let cfg = parse_args(&args).unwrap();
        assert_eq!(cfg.q, Some(5));
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.trials, 3);
        // Flag order does not matter: config is always the base layer.
        let args: Vec<String> = ["--seed", "9", "--config", path.to_str().unwrap()]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let cfg = parse_args(&args).unwrap();
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn lemma22_pools_are_minimal_and_guarded() {
        let field = Field::new(11, 1).unwrap();
        let tuples = lemma22_tuples(&field, 2, 2, 2, 0).unwrap();
        assert_eq!(tuples.len(), 2);
        // 2 tuples need a 3-point pool: C(3,2) = 3 >= 2.
        let mut points: Vec<&Vec<Fq>> = tuples.iter().flatten().collect();
        points.sort();
        points.dedup();
        assert_eq!(points.len(), 3);
        let report = vanishing_prob_exact(&field, 2, 2, 8, &tuples).unwrap();
        assert!(report.guards_ok);
        assert_eq!(report.rank, 2);
    }
}
