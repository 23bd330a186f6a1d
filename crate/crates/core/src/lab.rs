//! Experiment harness: exact vanishing probabilities by rank, Monte Carlo
//! estimation suites, the variety-size dichotomy probe, moment estimates,
//! log-log scaling fits, and report emission.
//!
//! Every run is seeded: trial streams are derived from a master seed, so a
//! report is a pure function of its inputs, independent of thread count.
//! Tolerances are expressed in standard errors computed from the trials.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    bad_pairs, bad_sequences, berge_paths, cleanup, sequence_completions, AnalysisError,
    CleanupCertificate,
};
use crate::construct::{build_multi, derive_seed, params, ConstructError, Model, ModelInputs, ModelParams};
use crate::gf::{Field, Fq, FqMatrix, GfError};
use crate::sympoly::{binomial, sample_symmetric, PolySpace, SymPolyError};

/// Stream tag separating per-trial seeds from polynomial streams.
const TRIAL_TAG: u64 = 0x545249414C;
/// Stream tag for structure sampling inside a trial.
const STRUCT_TAG: u64 = 0x534551;
/// Stream tag folding a field order into a multi-q sweep.
const FIELD_TAG: u64 = 0x514F5244;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug)]
#[non_exhaustive]
pub enum LabError {
    BadInput(String),
    InsufficientPoints(String),
    Field(GfError),
    Poly(SymPolyError),
    Build(ConstructError),
    Analysis(AnalysisError),
    Io(std::io::Error),
}

impl std::fmt::Display for LabError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabError::BadInput(msg) => write!(f, "bad input: {msg}"),
            LabError::InsufficientPoints(msg) => write!(f, "insufficient points: {msg}"),
            LabError::Field(e) => write!(f, "field error: {e}"),
            LabError::Poly(e) => write!(f, "polynomial error: {e}"),
            LabError::Build(e) => write!(f, "construction error: {e}"),
            LabError::Analysis(e) => write!(f, "analysis error: {e}"),
            LabError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for LabError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            LabError::Field(e) => Some(e),
            LabError::Poly(e) => Some(e),
            LabError::Build(e) => Some(e),
            LabError::Analysis(e) => Some(e),
            LabError::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<GfError> for LabError {
    fn from(e: GfError) -> LabError {
        LabError::Field(e)
    }
}
impl From<SymPolyError> for LabError {
    fn from(e: SymPolyError) -> LabError {
        LabError::Poly(e)
    }
}
impl From<ConstructError> for LabError {
    fn from(e: ConstructError) -> LabError {
        LabError::Build(e)
    }
}
impl From<AnalysisError> for LabError {
    fn from(e: AnalysisError) -> LabError {
        LabError::Analysis(e)
    }
}
impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> LabError {
        LabError::Io(e)
    }
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// Sample mean and standard error of the mean. Zero-filled when no data:
/// reports with zero trials stay finite and serializable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len();
        if n == 0 {
            return Stat { mean: 0.0, stderr: 0.0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Stat { mean, stderr: 0.0 };
        }
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        Stat { mean, stderr: (var / n as f64).sqrt() }
    }
}

// ---------------------------------------------------------------------------
// Report plumbing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<ReportFormat, String> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format {other:?}, expected json or csv")),
        }
    }
}

/// A serializable experiment result with a stable CSV rendering. Identical
/// reports emit byte-identical text in both formats.
pub trait Report: Serialize {
    /// One data row per record, with a header line.
    fn csv(&self) -> String;

    fn json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

pub fn emit_report<R: Report>(report: &R, format: ReportFormat, path: &Path) -> Result<(), LabError> {
    let text = match format {
        ReportFormat::Json => report.json(),
        ReportFormat::Csv => report.csv(),
    };
    fs::write(path, text)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Exact vanishing probability
// ---------------------------------------------------------------------------

/// Exact probability that a uniform symmetric polynomial vanishes on every
/// tuple of U, reported as q^(-rank) of the stacked evaluation rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingReport {
    pub q: u64,
    pub u_len: usize,
    /// Rank of the |U| x (orbit count) evaluation matrix.
    pub rank: usize,
    /// Exactly q^(-rank); the (q, rank) pair is the exact rational.
    pub probability: f64,
    pub probability_formula: String,
    /// All interpolation guards hold: C(|U|,2) < q, C(|V|,2) < q, |U| <= d.
    pub guards_ok: bool,
    pub guard_notes: Vec<String>,
}

impl Report for VanishingReport {
    fn csv(&self) -> String {
        let mut s = String::from("q,u_len,rank,probability,guards_ok\n");
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            self.q, self.u_len, self.rank, self.probability, self.guards_ok
        );
        s
    }
}

/// Vanishing on a fixed tuple is one linear constraint on the orbit
/// coefficients, so the probability over the uniform family is exactly
/// q^(-rank). When the guards hold the rank equals |U|.
///
/// Each tuple is r points of t coordinates; tuples must be distinct as
/// unordered point sets. Guard violations are reported in the result, not
/// fatal: the returned probability is exact either way.
pub fn vanishing_prob_exact(
    field: &Field,
    r: usize,
    t: usize,
    d: usize,
    tuples: &[Vec<Vec<Fq>>],
) -> Result<VanishingReport, LabError> {
    let q = field.q();
    let mut normalized: Vec<Vec<Vec<Fq>>> = Vec::with_capacity(tuples.len());
    for tuple in tuples {
        if tuple.len() != r {
            return Err(LabError::BadInput(format!(
                "tuple has {} points, expected {r}",
                tuple.len()
            )));
        }
        for point in tuple {
            if point.len() != t {
                return Err(LabError::BadInput(format!(
                    "point has {} coordinates, expected {t}",
                    point.len()
                )));
            }
            for &c in point {
                if c.value() as u64 >= q {
                    return Err(LabError::BadInput(format!(
                        "coordinate {} outside the field of order {q}",
                        c.value()
                    )));
                }
            }
        }
        let mut sorted = tuple.clone();
        sorted.sort();
        normalized.push(sorted);
    }
    let mut dedup = normalized.clone();
    dedup.sort();
    dedup.dedup();
    if dedup.len() != normalized.len() {
        return Err(LabError::BadInput(
            "tuples must be distinct as unordered point sets".into(),
        ));
    }

    let mut guard_notes = Vec::new();
    let u_len = tuples.len();
    if binomial(u_len as u64, 2) >= q as u128 {
        guard_notes.push(format!("C(|U|,2) = {} not below q = {q}", binomial(u_len as u64, 2)));
    }
    let mut points: Vec<&Vec<Fq>> = normalized.iter().flatten().collect();
    points.sort();
    points.dedup();
    if binomial(points.len() as u64, 2) >= q as u128 {
        guard_notes.push(format!(
            "C(|V|,2) = {} not below q = {q}",
            binomial(points.len() as u64, 2)
        ));
    }
    if u_len > d {
        guard_notes.push(format!("|U| = {u_len} exceeds the degree bound d = {d}"));
    }
    let guards_ok = guard_notes.is_empty();

    let rank = if u_len == 0 {
        0
    } else {
        let space = Arc::new(PolySpace::new(r, t, d)?);
        let mut rows = Vec::with_capacity(u_len);
        for tuple in &normalized {
            let refs: Vec<&[Fq]> = tuple.iter().map(|p| p.as_slice()).collect();
            rows.push(space.evaluation_row(field, &refs)?);
        }
        field.rank(&FqMatrix::from_rows(rows))?
    };
    // The interpolation argument is exact, not asymptotic: under the
    // guards the constraints are linearly independent.
    debug_assert!(!guards_ok || rank == u_len, "guards hold but rank {rank} != |U| {u_len}");

    Ok(VanishingReport {
        q,
        u_len,
        rank,
        // q^rank is an exact integer in f64 range for realistic ranks, so
        // the reciprocal is the correctly rounded probability.
        probability: (q as f64).powi(rank as i32).recip(),
        probability_formula: format!("q^-{rank} at q = {q}"),
        guards_ok,
        guard_notes,
    })
}

/// Monte Carlo companion: empirical vanishing frequency over sampled
/// polynomials, with the exact probability for reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VanishingMcReport {
    pub q: u64,
    pub u_len: usize,
    pub samples: usize,
    pub hits: usize,
    pub frequency: f64,
    pub exact_probability: f64,
}

impl Report for VanishingMcReport {
    fn csv(&self) -> String {
        let mut s = String::from("q,u_len,samples,hits,frequency,exact_probability\n");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            self.q, self.u_len, self.samples, self.hits, self.frequency, self.exact_probability
        );
        s
    }
}

pub fn vanishing_mc(
    field: &Field,
    r: usize,
    t: usize,
    d: usize,
    tuples: &[Vec<Vec<Fq>>],
    samples: usize,
    seed: u64,
) -> Result<VanishingMcReport, LabError> {
    let exact = vanishing_prob_exact(field, r, t, d, tuples)?;
    let space = Arc::new(PolySpace::new(r, t, d)?);
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(tuples.len());
    for tuple in tuples {
        let refs: Vec<&[Fq]> = tuple.iter().map(|p| p.as_slice()).collect();
        rows.push(space.evaluation_row(field, &refs)?.iter().map(|f| f.value()).collect());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs: Vec<u32> = Vec::with_capacity(space.orbits.len());
    let mut hits = 0usize;
    for _ in 0..samples {
        let poly = sample_symmetric(field, &space, &mut rng);
        coeffs.clear();
        coeffs.extend(poly.coeffs.iter().map(|f| f.value()));
        if rows.iter().all(|row| field.dot_reduce(&coeffs, row) == 0) {
            hits += 1;
        }
    }
    Ok(VanishingMcReport {
        q: field.q(),
        u_len: tuples.len(),
        samples,
        hits,
        frequency: if samples == 0 { 0.0 } else { hits as f64 / samples as f64 },
        exact_probability: exact.probability,
    })
}

// ---------------------------------------------------------------------------
// Expectation suite
// ---------------------------------------------------------------------------

/// Closed-form reference values the empirical means are compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticReferences {
    /// Candidate r-sets per layer: C(N,r), or the cross tuples of the
    /// partite model.
    pub tuple_count: f64,
    /// Per-tuple, per-layer edge probability.
    pub edge_probability: f64,
    pub expected_edges: f64,
    pub expected_edges_formula: String,
    /// Union bound on the expected number of vertex sets with
    /// multiplicity at least 2.
    pub multi_edge_bound: f64,
    pub multi_edge_bound_formula: String,
}

fn references(p: &ModelParams) -> AnalyticReferences {
    let q = p.q as f64;
    let (tuple_count, edge_probability, tuple_formula) = match p.model {
        Model::A | Model::B => (
            binomial(p.n_vectors as u64, p.r as u64) as f64,
            1.0 / q,
            format!("C({}, {}) tuples at probability 1/{}", p.n_vectors, p.r, p.q),
        ),
        Model::C => (
            (q).powi((p.r * p.ell) as i32),
            q.powi(1 - (p.ell * (p.r - 1)) as i32),
            format!(
                "{}^{} cross tuples at probability {}^{}",
                p.q,
                p.r * p.ell,
                p.q,
                1 - (p.ell * (p.r - 1)) as i64
            ),
        ),
    };
    let expected_edges = p.h as f64 * tuple_count * edge_probability;
    let mut multi_edge_bound = 0.0;
    for i in 2..=p.h {
        multi_edge_bound +=
            binomial(p.h as u64, i as u64) as f64 * edge_probability.powi(i as i32);
    }
    multi_edge_bound *= tuple_count;
    AnalyticReferences {
        tuple_count,
        edge_probability,
        expected_edges,
        expected_edges_formula: format!("h * tuple_count * edge_probability; {tuple_formula}, h = {}", p.h),
        multi_edge_bound,
        multi_edge_bound_formula: format!(
            "tuple_count * sum over i in 2..=h of C(h,i) * edge_probability^i; h = {}",
            p.h
        ),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// Union edge count, parallel copies included.
    pub edges: usize,
    /// Distinct vertex sets with multiplicity at least 2.
    pub multi_sets: usize,
    /// Structure counts aligned with the report's threshold list.
    pub bad_structures: Vec<usize>,
    /// Simple edge count after cleanup at the first threshold.
    pub post_cleanup_edges: Option<usize>,
    pub certificate: Option<CleanupCertificate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub edges: Stat,
    pub multi_sets: Stat,
    pub bad_structures: Vec<Stat>,
    pub post_cleanup_edges: Option<Stat>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub params: ModelParams,
    pub master_seed: u64,
    pub trials: usize,
    pub thresholds: Vec<u64>,
    pub records: Vec<TrialRecord>,
    pub aggregates: Aggregates,
    pub references: AnalyticReferences,
    pub guard_notes: Vec<String>,
}

impl Report for TrialReport {
    fn csv(&self) -> String {
        let mut s = String::from("trial,seed,edges,multi_sets");
        for t in &self.thresholds {
            let _ = write!(s, ",bad_at_{t}");
        }
        s.push_str(",post_cleanup_edges\n");
        for rec in &self.records {
            let _ = write!(s, "{},{},{},{}", rec.trial, rec.seed, rec.edges, rec.multi_sets);
            for c in &rec.bad_structures {
                let _ = write!(s, ",{c}");
            }
            match rec.post_cleanup_edges {
                Some(e) => {
                    let _ = writeln!(s, ",{e}");
                }
                None => s.push_str(",\n"),
            }
        }
        s
    }
}

fn structure_count(
    g: &crate::hypergraph::MultiHypergraph,
    p: &ModelParams,
    threshold: u64,
) -> Result<usize, AnalysisError> {
    match p.model {
        Model::A | Model::B => Ok(bad_sequences(g, p, threshold)?.len()),
        Model::C => Ok(bad_pairs(g, p.ell, threshold)?.len()),
    }
}

/// Builds `trials` independent multi-hypergraphs, counts structures at
/// each threshold, and cleans up at the first threshold (when any is
/// given). Trials run concurrently on derived streams; the aggregation is
/// a deterministic reduction of the per-trial records.
pub fn expectation_suite(
    p: &ModelParams,
    field: &Field,
    trials: usize,
    thresholds: &[u64],
    master_seed: u64,
) -> Result<TrialReport, LabError> {
    let records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<TrialRecord, LabError> {
            let seed = derive_seed(master_seed, &[TRIAL_TAG, i as u64]);
            let (g, _) = build_multi(p, field, seed)?;
            let edges = g.edge_count();
            let multi_sets = g.multiplicity_map().values().filter(|&&m| m >= 2).count();
            let mut bad = Vec::with_capacity(thresholds.len());
            for &t in thresholds {
                bad.push(structure_count(&g, p, t)?);
            }
            let (post, cert) = match thresholds.first() {
                Some(&t) => {
                    let (out, cert) = cleanup(&g, p, t)?;
                    (Some(out.edge_count()), Some(cert))
                }
                None => (None, None),
            };
            Ok(TrialRecord {
                trial: i,
                seed,
                edges,
                multi_sets,
                bad_structures: bad,
                post_cleanup_edges: post,
                certificate: cert,
            })
        })
        .collect::<Result<_, _>>()?;

    let collect = |f: &dyn Fn(&TrialRecord) -> f64| -> Vec<f64> { records.iter().map(f).collect() };
    let aggregates = Aggregates {
        edges: Stat::of(&collect(&|r| r.edges as f64)),
        multi_sets: Stat::of(&collect(&|r| r.multi_sets as f64)),
        bad_structures: (0..thresholds.len())
            .map(|k| Stat::of(&collect(&|r| r.bad_structures[k] as f64)))
            .collect(),
        post_cleanup_edges: thresholds
            .first()
            .map(|_| Stat::of(&collect(&|r| r.post_cleanup_edges.unwrap_or(0) as f64))),
    };
    let mut guard_notes = Vec::new();
    if thresholds.is_empty() {
        guard_notes.push("no thresholds supplied; detection and cleanup skipped".into());
    }
    if p.h == 1 {
        guard_notes.push("single layer: multi-set counts are identically zero".into());
    }
    Ok(TrialReport {
        params: p.clone(),
        master_seed,
        trials,
        thresholds: thresholds.to_vec(),
        records,
        aggregates,
        references: references(p),
        guard_notes,
    })
}

// ---------------------------------------------------------------------------
// Structure sampling
// ---------------------------------------------------------------------------

/// Uniform canonical sequence: distinct vertices split into the model's
/// groups, each group ascending, equal-size groups ordered by first
/// vertex. Every canonical family has the same number of ordered
/// preimages, so the result is uniform over families.
fn sample_canonical_sequence(group_sizes: &[usize], n: usize, rng: &mut impl Rng) -> Vec<u32> {
    let total: usize = group_sizes.iter().sum();
    debug_assert!(total <= n);
    let mut picked: Vec<u32> = Vec::with_capacity(total);
    while picked.len() < total {
        let v = rng.gen_range(0..n as u32);
        if !picked.contains(&v) {
            picked.push(v);
        }
    }
    let mut groups: Vec<Vec<u32>> = Vec::with_capacity(group_sizes.len());
    let mut offset = 0;
    for &s in group_sizes {
        let mut g = picked[offset..offset + s].to_vec();
        g.sort_unstable();
        groups.push(g);
        offset += s;
    }
    let mut sizes_seen: Vec<usize> = group_sizes.to_vec();
    sizes_seen.sort_unstable();
    sizes_seen.dedup();
    for size in sizes_seen {
        let idx: Vec<usize> = (0..groups.len()).filter(|&i| group_sizes[i] == size).collect();
        let mut block: Vec<Vec<u32>> = idx.iter().map(|&i| groups[i].clone()).collect();
        block.sort();
        for (&i, g) in idx.iter().zip(block) {
            groups[i] = g;
        }
    }
    groups.into_iter().flatten().collect()
}

fn model_group_sizes(p: &ModelParams) -> Vec<usize> {
    match p.model {
        Model::A => p.part_sizes.clone(),
        Model::B => vec![p.r - 1; p.t],
        Model::C => Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Moment estimates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub params: ModelParams,
    pub exponent: u32,
    pub trials: usize,
    pub master_seed: u64,
    /// Per-trial completions^exponent (path counts for the partite model).
    pub values: Vec<f64>,
    pub mean: f64,
    pub stderr: f64,
}

impl Report for MomentReport {
    fn csv(&self) -> String {
        let mut s = String::from("trial,value\n");
        for (i, v) in self.values.iter().enumerate() {
            let _ = writeln!(s, "{i},{v}");
        }
        s
    }
}

/// Mean of completions^exponent over fresh graphs and uniformly sampled
/// structures: one random canonical sequence per trial for models A and B,
/// one random vertex pair (counting short Berge paths) for model C.
pub fn moment_estimate(
    p: &ModelParams,
    field: &Field,
    exponent: u32,
    trials: usize,
    master_seed: u64,
) -> Result<MomentReport, LabError> {
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<f64, LabError> {
            let seed = derive_seed(master_seed, &[TRIAL_TAG, i as u64]);
            let (g, _) = build_multi(p, field, seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[STRUCT_TAG]));
            let count = match p.model {
                Model::A | Model::B => {
                    let seq = sample_canonical_sequence(&model_group_sizes(p), g.n(), &mut rng);
                    sequence_completions(&g, p, &seq)?
                }
                Model::C => {
                    let x = rng.gen_range(0..g.n() as u32);
                    let y = loop {
                        let y = rng.gen_range(0..g.n() as u32);
                        if y != x {
                            break y;
                        }
                    };
                    berge_paths(&g, x, y, p.ell)
                }
            };
            Ok((count as f64).powi(exponent as i32))
        })
        .collect::<Result<_, _>>()?;
    let stat = Stat::of(&values);
    Ok(MomentReport {
        params: p.clone(),
        exponent,
        trials,
        master_seed,
        values,
        mean: stat.mean,
        stderr: stat.stderr,
    })
}

/// Moment trend across field orders: one report per field, on seeds
/// derived from the field order so the list order does not matter.
pub fn moment_sweep(
    inputs: &ModelInputs,
    r: usize,
    h: usize,
    fields: &[Field],
    exponent: u32,
    trials: usize,
    master_seed: u64,
    degree_override: Option<usize>,
) -> Result<Vec<MomentReport>, LabError> {
    fields
        .iter()
        .map(|field| {
            let p = params(inputs, r, field.q(), h, degree_override)?;
            let seed = derive_seed(master_seed, &[FIELD_TAG, field.q()]);
            moment_estimate(&p, field, exponent, trials, seed)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Dichotomy probe
// ---------------------------------------------------------------------------

/// Histogram of single-layer completion counts over random sequences.
/// The gap report brackets the observed values against the q/2 cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyHistogram {
    /// Parameters of the probed single layer.
    pub params: ModelParams,
    pub trials: usize,
    pub master_seed: u64,
    pub sequence_len: usize,
    /// Observed completion count -> frequency; frequencies sum to trials.
    pub counts: std::collections::BTreeMap<u64, u64>,
    /// Largest observed value strictly below q/2.
    pub largest_below_half_q: Option<u64>,
    /// Smallest observed value at or above q/2.
    pub smallest_at_or_above_half_q: Option<u64>,
}

impl Report for DichotomyHistogram {
    fn csv(&self) -> String {
        let mut s = String::from("completions,frequency\n");
        for (v, c) in &self.counts {
            let _ = writeln!(s, "{v},{c}");
        }
        s
    }
}

/// For each trial: build one fresh layer, fix a random canonical sequence,
/// and record how many vertices complete it within that layer. The
/// expected shape is a small cluster and a cluster at or above q/2 with an
/// empty band between; the gap is reported, never asserted, because small
/// q may sit outside the dichotomy's regime.
pub fn dichotomy_probe(
    p: &ModelParams,
    field: &Field,
    trials: usize,
    master_seed: u64,
) -> Result<DichotomyHistogram, LabError> {
    if p.model == Model::C {
        return Err(LabError::BadInput(
            "the dichotomy probe applies to the non-partite models".into(),
        ));
    }
    let mut single = p.clone();
    single.h = 1;
    let group_sizes = model_group_sizes(&single);
    let sequence_len: usize = group_sizes.iter().sum();

    let observations: Vec<u64> = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<u64, LabError> {
            let seed = derive_seed(master_seed, &[TRIAL_TAG, i as u64]);
            let (g, _) = build_multi(&single, field, seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[STRUCT_TAG]));
            let seq = sample_canonical_sequence(&group_sizes, g.n(), &mut rng);
            Ok(sequence_completions(&g, &single, &seq)?)
        })
        .collect::<Result<_, _>>()?;

    let mut counts = std::collections::BTreeMap::new();
    for v in &observations {
        *counts.entry(*v).or_insert(0u64) += 1;
    }
    // Integer-exact split at q/2: v < q/2 iff 2v < q.
    let largest_below_half_q = counts.keys().copied().filter(|v| 2 * v < p.q).max();
    let smallest_at_or_above_half_q = counts.keys().copied().filter(|v| 2 * v >= p.q).min();
    Ok(DichotomyHistogram {
        params: single,
        trials,
        master_seed,
        sequence_len,
        counts,
        largest_below_half_q,
        smallest_at_or_above_half_q,
    })
}

// ---------------------------------------------------------------------------
// Scaling fit
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub q: u64,
    pub n_vertices: usize,
    pub mean_post_cleanup_edges: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub model: Model,
    pub h: usize,
    pub threshold: u64,
    pub trials: usize,
    pub master_seed: u64,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of log(mean post-cleanup edges) vs log(vertices).
    pub slope: f64,
    pub intercept: f64,
    pub warnings: Vec<String>,
}

impl Report for ScalingReport {
    fn csv(&self) -> String {
        let mut s = String::from("q,n_vertices,mean_post_cleanup_edges,stderr\n");
        for p in &self.points {
            let _ = writeln!(s, "{},{},{},{}", p.q, p.n_vertices, p.mean_post_cleanup_edges, p.stderr);
        }
        s
    }
}

/// Fits the growth exponent of the cleaned construction: mean post-cleanup
/// edge counts across field orders, least squares on the log-log points.
/// Two points determine a line; fewer is an error, fewer than four earns a
/// warning because the fit is then fragile.
pub fn scaling_fit(
    inputs: &ModelInputs,
    r: usize,
    h: usize,
    fields: &[Field],
    threshold: u64,
    trials: usize,
    master_seed: u64,
    degree_override: Option<usize>,
) -> Result<ScalingReport, LabError> {
    if fields.len() < 2 {
        return Err(LabError::InsufficientPoints(format!(
            "a scaling fit needs at least 2 field orders, got {}",
            fields.len()
        )));
    }
    let mut warnings = Vec::new();
    if fields.len() < 4 {
        warnings.push(format!(
            "only {} field orders; the fitted slope is fragile below 4",
            fields.len()
        ));
    }

    let mut points = Vec::with_capacity(fields.len());
    let mut model = None;
    let mut threshold_echo = threshold;
    for field in fields {
        let p = params(inputs, r, field.q(), h, degree_override)?;
        model = Some(p.model);
        threshold_echo = threshold;
        let field_seed = derive_seed(master_seed, &[FIELD_TAG, field.q()]);
        let values: Vec<f64> = (0..trials)
            .into_par_iter()
            .map(|i| -> Result<f64, LabError> {
                let seed = derive_seed(field_seed, &[TRIAL_TAG, i as u64]);
                let (g, _) = build_multi(&p, field, seed)?;
                let (out, _) = cleanup(&g, &p, threshold)?;
                Ok(out.edge_count() as f64)
            })
            .collect::<Result<_, _>>()?;
        let stat = Stat::of(&values);
        if stat.mean <= 0.0 {
            return Err(LabError::BadInput(format!(
                "no edges survive cleanup at q = {}; the log-log fit is undefined",
                field.q()
            )));
        }
        points.push(ScalingPoint {
            q: field.q(),
            n_vertices: p.n_vertices,
            mean_post_cleanup_edges: stat.mean,
            stderr: stat.stderr,
        });
    }

    let xs: Vec<f64> = points.iter().map(|p| (p.n_vertices as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_post_cleanup_edges.ln()).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let slope = sxy / sxx;
    Ok(ScalingReport {
        model: model.unwrap(),
        h,
        threshold: threshold_echo,
        trials,
        master_seed,
        points,
        slope,
        intercept: ym - slope * xm,
        warnings,
    })
}

// ---------------------------------------------------------------------------
