//! Acceptance gate: ten end-to-end checks with tolerances pinned in code.
//!
//! Every runner returns a [`CriterionResult`] instead of panicking, so the
//! `verify` subcommand can print the full scoreboard even when an early
//! criterion fails. The integration test target wraps each runner in an
//! assertion. Statistical checks use seeded streams and standard-error
//! windows; exact checks compare bit-for-bit.

use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::ThreadPoolBuilder;

use crate::analysis::{
    bad_pairs, bad_sequences, berge_paths, contains_berge_theta, count_complete_bipartite_r,
    count_complete_rpartite, reference_berge_paths, FreenessCheck,
};
use crate::construct::{build_multi, derive_seed, params, ModelInputs, ModelParams};
use crate::gf::{Field, Fq};
use crate::hypergraph::{MultiHypergraph, SimpleHypergraph};
use crate::lab::{
    dichotomy_probe, expectation_suite, scaling_fit, vanishing_mc, vanishing_prob_exact, Report,
};
use crate::sympoly::{sample_symmetric, PolySpace};

// ---------------------------------------------------------------------------
// Scoreboard plumbing
// ---------------------------------------------------------------------------

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    /// One-line scoreboard entry.
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} [{}] {} ({:.1}s): {}",
            self.index,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.detail
        )
    }
}

fn run(index: usize, name: &'static str, body: impl FnOnce() -> Result<String, String>) -> CriterionResult {
    let started = Instant::now();
    let (passed, detail) = match body() {
        Ok(detail) => (true, detail),
        Err(detail) => (false, detail),
    };
    CriterionResult { index, name, passed, detail, seconds: started.elapsed().as_secs_f64() }
}

/// Run the full gate in order.
pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}

fn fail<T>(msg: String) -> Result<T, String> {
    Err(msg)
}

// ---------------------------------------------------------------------------
// Criterion 1: exact vanishing probability at full rank
// ---------------------------------------------------------------------------

const C1_SEED: u64 = 0xACC1;
const C1_SETS_PER_FIELD: usize = 50;
// A pool of 5 points keeps C(|V|,2) = 10 below both field orders.
const C1_POOL: usize = 5;

/// Sample `count` distinct points of F_q^t.
fn distinct_points(field: &Field, t: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Fq>> {
    let q = field.q();
    let mut pool: Vec<Vec<Fq>> = Vec::with_capacity(count);
    while pool.len() < count {
        let p: Vec<Fq> =
            (0..t).map(|_| field.element(rng.gen_range(0..q)).expect("in range")).collect();
        if !pool.contains(&p) {
            pool.push(p);
        }
    }
    pool
}

/// For r=2, t=2, d=8: 50 random tuple sets per field with |U| in 1..=4,
/// built from a 5-point pool so the interpolation guards hold by
/// construction. Rank must equal |U| and the probability must be exactly
/// q^-|U| every single time.
pub fn criterion_1() -> CriterionResult {
    run(1, "exact vanishing probability", || {
        let (r, t, d) = (2usize, 2usize, 8usize);
        let mut checked = 0usize;
        for q in [11u64, 13] {
            let field = Field::new(q, 1).map_err(|e| e.to_string())?;
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(C1_SEED, &[q]));
            for set in 0..C1_SETS_PER_FIELD {
                let u_len = set % 4 + 1;
                let pool = distinct_points(&field, t, C1_POOL, &mut rng);
                let mut index_pairs: Vec<(usize, usize)> = (0..C1_POOL)
                    .flat_map(|i| (i + 1..C1_POOL).map(move |j| (i, j)))
                    .collect();
                index_pairs.shuffle(&mut rng);
                let tuples: Vec<Vec<Vec<Fq>>> = index_pairs[..u_len]
                    .iter()
                    .map(|&(i, j)| vec![pool[i].clone(), pool[j].clone()])
                    .collect();
                let report =
                    vanishing_prob_exact(&field, r, t, d, &tuples).map_err(|e| e.to_string())?;
                if !report.guards_ok {
                    return fail(format!(
                        "q={q} set {set}: guards violated: {:?}",
                        report.guard_notes
                    ));
                }
                if report.rank != u_len {
                    return fail(format!(
                        "q={q} set {set}: rank {} != |U| = {u_len}",
                        report.rank
                    ));
                }
                let expected = (q as f64).powi(u_len as i32).recip();
                if report.probability != expected {
                    return fail(format!(
                        "q={q} set {set}: probability {} != q^-{u_len} = {expected}",
                        report.probability
                    ));
                }
                checked += 1;
            }
        }
        Ok(format!("{checked} tuple sets at q in {{11, 13}}, rank = |U| and P = q^-|U| in all"))
    })
}

// ---------------------------------------------------------------------------
// Criterion 2: Monte Carlo consistency
// ---------------------------------------------------------------------------

const C2_SEED: u64 = 0xACC2;
const C2_SAMPLES: usize = 100_000;

/// q=5, |U|=2 sharing one point: exact probability 1/25; the empirical
/// frequency over 10^5 sampled polynomials must land within 4 binomial
/// standard errors.
pub fn criterion_2() -> CriterionResult {
    run(2, "Monte Carlo vanishing frequency", || {
        let field = Field::new(5, 1).map_err(|e| e.to_string())?;
        let e = |v: u64| field.element(v).expect("in range");
        let p1 = vec![e(0), e(1)];
        let p2 = vec![e(1), e(0)];
        let p3 = vec![e(1), e(1)];
        let tuples = vec![vec![p1.clone(), p2], vec![p1, p3]];
        let report = vanishing_mc(&field, 2, 2, 8, &tuples, C2_SAMPLES, C2_SEED)
            .map_err(|e| e.to_string())?;
        let p = 1.0 / 25.0;
        if report.exact_probability != p {
            return fail(format!("exact probability {} != 1/25", report.exact_probability));
        }
        let se = (p * (1.0 - p) / C2_SAMPLES as f64).sqrt();
        let dev = (report.frequency - p).abs();
        if dev <= 4.0 * se {
            Ok(format!(
                "frequency {:.5} vs 1/25, deviation {:.2} SE over {} samples",
                report.frequency,
                dev / se,
                C2_SAMPLES
            ))
        } else {
            fail(format!("frequency {:.5} deviates {:.2} SE > 4 SE", report.frequency, dev / se))
        }
    })
}

// ---------------------------------------------------------------------------
// Criterion 3: per-tuple edge density across models
// ---------------------------------------------------------------------------

const C3_SEED: u64 = 0xACC3;
const C3_TRIALS: usize = 100;
const C3_LAYERS_PER_TRIAL: usize = 2;

/// Mean per-tuple edge rate within 5 standard errors of the design
/// probability, pooled over 200 independent layers per case.
pub fn criterion_3() -> CriterionResult {
    run(3, "layer edge density", || {
        let cases: Vec<(&str, ModelInputs, usize, u64)> = vec![
            ("A q=3", ModelInputs::A { part_sizes: vec![2] }, 2, 3),
            ("A q=5", ModelInputs::A { part_sizes: vec![2] }, 2, 5),
            ("A q=7", ModelInputs::A { part_sizes: vec![2] }, 2, 7),
            ("B q=3", ModelInputs::B { t: 2 }, 3, 3),
            ("B q=5", ModelInputs::B { t: 2 }, 3, 5),
            ("B q=7", ModelInputs::B { t: 2 }, 3, 7),
            ("C q=3", ModelInputs::C { ell: 2 }, 3, 3),
        ];
        let mut details = Vec::new();
        for (label, inputs, r, q) in cases {
            let p = params(&inputs, r, q, C3_LAYERS_PER_TRIAL, None).map_err(|e| e.to_string())?;
            let field = Field::new(q, 1).map_err(|e| e.to_string())?;
            let seed = derive_seed(C3_SEED, &[q, r as u64, p.model as u64]);
            let report = expectation_suite(&p, &field, C3_TRIALS, &[], seed)
                .map_err(|e| e.to_string())?;
            let per_trial_tuples =
                C3_LAYERS_PER_TRIAL as f64 * report.references.tuple_count;
            let rate = report.aggregates.edges.mean / per_trial_tuples;
            let se = report.aggregates.edges.stderr / per_trial_tuples;
            let target = report.references.edge_probability;
            let dev = (rate - target).abs();
            if se == 0.0 || dev > 5.0 * se {
                return fail(format!(
                    "{label}: rate {rate:.6} vs {target:.6}, deviation {:.2} SE",
                    if se > 0.0 { dev / se } else { f64::INFINITY }
                ));
            }
            details.push(format!("{label} {:.1} SE", dev / se));
        }
        Ok(format!("200 layers per case, all within 5 SE ({})", details.join(", ")))
    })
}

// ---------------------------------------------------------------------------
// Criterion 4: expected edges and multi-edges at desk scale
// ---------------------------------------------------------------------------

const C4_SEED: u64 = 0xACC4;
const C4_TRIALS: usize = 200;

/// Two-layer pair model at q=5: mean edges within 5% of the exact
/// expectation (2/5)C(25,2) = 120; mean multi-edge count at most 12 plus
/// three standard errors.
pub fn criterion_4() -> CriterionResult {
    run(4, "expected edges and multi-edges", || {
        let inputs = ModelInputs::A { part_sizes: vec![2] };
        let p = params(&inputs, 2, 5, 2, None).map_err(|e| e.to_string())?;
        let field = Field::new(5, 1).map_err(|e| e.to_string())?;
        let report =
            expectation_suite(&p, &field, C4_TRIALS, &[], C4_SEED).map_err(|e| e.to_string())?;
        if (report.references.expected_edges - 120.0).abs() > 1e-9 {
            return fail(format!(
                "reference expectation {} != 120",
                report.references.expected_edges
            ));
        }
        let edges = &report.aggregates.edges;
        let multi = &report.aggregates.multi_sets;
        if (edges.mean - 120.0).abs() > 6.0 {
            return fail(format!("mean edges {:.2} outside 120 +- 6", edges.mean));
        }
        if multi.mean > 12.0 + 3.0 * multi.stderr {
            return fail(format!(
                "mean multi-edges {:.3} exceeds 12 + 3 SE = {:.3}",
                multi.mean,
                12.0 + 3.0 * multi.stderr
            ));
        }
        Ok(format!(
            "mean edges {:.2} (target 120 +- 6), mean multi-edges {:.3} (bound {:.3})",
            edges.mean,
            multi.mean,
            12.0 + 3.0 * multi.stderr
        ))
    })
}

// ---------------------------------------------------------------------------
// Criterion 5: block symmetry of sampled polynomials
// ---------------------------------------------------------------------------

const C5_SEED: u64 = 0xACC5;
const C5_POLYS: usize = 1000;
const C5_TUPLES: usize = 100;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, rest: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (0..n).collect(), &mut out);
    out
}

/// 1000 sampled polynomials evaluated at 100 random 3-block tuples under
/// all 6 block permutations: zero violations of permutation invariance.
pub fn criterion_5() -> CriterionResult {
    run(5, "block permutation symmetry", || {
        let (r, t, d) = (3usize, 2usize, 4usize);
        let field = Field::new(5, 1).map_err(|e| e.to_string())?;
        let space = Arc::new(PolySpace::new(r, t, d).map_err(|e| e.to_string())?);
        let mut rng = ChaCha8Rng::seed_from_u64(C5_SEED);
        let perms = permutations(r);

        // Evaluation rows per tuple and permutation, shared by all polys.
        let mut rows: Vec<Vec<Vec<u32>>> = Vec::with_capacity(C5_TUPLES);
        for _ in 0..C5_TUPLES {
            let points: Vec<Vec<Fq>> = (0..r)
                .map(|_| {
                    (0..t)
                        .map(|_| field.element(rng.gen_range(0..field.q())).expect("in range"))
                        .collect()
                })
                .collect();
            let mut per_perm = Vec::with_capacity(perms.len());
            for perm in &perms {
                let refs: Vec<&[Fq]> = perm.iter().map(|&i| points[i].as_slice()).collect();
                let row = space.evaluation_row(&field, &refs).map_err(|e| e.to_string())?;
                per_perm.push(row.iter().map(|f| f.value()).collect::<Vec<u32>>());
            }
            rows.push(per_perm);
        }

        let mut evaluations = 0usize;
        let mut violations = 0usize;
        for _ in 0..C5_POLYS {
            let poly = sample_symmetric(&field, &space, &mut rng);
            let coeffs: Vec<u32> = poly.coeffs.iter().map(|c| c.value()).collect();
            for per_perm in &rows {
                let base = field.dot_reduce(&per_perm[0], &coeffs);
                for row in &per_perm[1..] {
                    evaluations += 1;
                    if field.dot_reduce(row, &coeffs) != base {
                        violations += 1;
                    }
                }
            }
        }
        if violations == 0 {
            Ok(format!(
                "{C5_POLYS} polynomials x {C5_TUPLES} tuples x {} permutations, {evaluations} comparisons, 0 violations",
                perms.len()
            ))
        } else {
            fail(format!("{violations} violations out of {evaluations} comparisons"))
        }
    })
}

// ---------------------------------------------------------------------------
// Criterion 6: path counter against the reference enumerator
// ---------------------------------------------------------------------------

const C6_SEED: u64 = 0xACC6;
const C6_GRAPHS: usize = 100;

/// The DFS path counter agrees with brute-force enumeration on 100 random
/// layered 3-uniform multigraphs with n <= 12 and length bound <= 3, on
/// every vertex pair.
pub fn criterion_6() -> CriterionResult {
    run(6, "path counter oracle equivalence", || {
        let mut rng = ChaCha8Rng::seed_from_u64(C6_SEED);
        let mut comparisons = 0usize;
        for round in 0..C6_GRAPHS {
            let n = rng.gen_range(4..=12usize);
            let layer_count = rng.gen_range(1..=2usize);
            let mut layers = Vec::with_capacity(layer_count);
            for _ in 0..layer_count {
                let mut edges = Vec::new();
                for _ in 0..rng.gen_range(0..=6usize) {
                    let mut verts: Vec<u32> = (0..n as u32).collect();
                    for i in 0..3 {
                        let j = rng.gen_range(i..n);
                        verts.swap(i, j);
                    }
                    edges.push(verts[..3].to_vec());
                }
                layers.push(SimpleHypergraph::new(n, 3, 0, edges).map_err(|e| e.to_string())?);
            }
            let g = MultiHypergraph::union(&layers).map_err(|e| e.to_string())?;
            let lmax = rng.gen_range(1..=3usize);
            for x in 0..n as u32 {
                for y in x + 1..n as u32 {
                    let fast = berge_paths(&g, x, y, lmax);
                    let slow = reference_berge_paths(&g, x, y, lmax);
                    comparisons += 1;
                    if fast != slow {
                        return fail(format!(
                            "graph {round}: paths({x},{y},{lmax}) = {fast} but reference says {slow}"
                        ));
                    }
                }
            }
        }
        Ok(format!("{C6_GRAPHS} graphs, {comparisons} pair counts, 100% agreement"))
    })
}

// ---------------------------------------------------------------------------
// Criterion 7: deletion soundness and freeness certificates
// ---------------------------------------------------------------------------

const C7_SEED: u64 = 0xACC7;
const C7_RUNS: usize = 20;
const C7_THRESHOLD: u64 = 4;

fn certified_free(check: &FreenessCheck) -> bool {
    matches!(check, FreenessCheck::CertifiedFree { .. })
}

/// 20 seeded build/cleanup pipelines per model at desk scale. After
/// cleanup, re-detection at the same threshold finds nothing, and
/// independent exhaustive counters confirm the forbidden pattern is gone.
pub fn criterion_7() -> CriterionResult {
    run(7, "deletion soundness and freeness", || {
        // Pair model: forbidden pattern is the complete bipartite graph
        // with parts 2 and 4.
        let p_a = params(&ModelInputs::A { part_sizes: vec![2] }, 2, 5, 2, None)
            .map_err(|e| e.to_string())?;
        let f5 = Field::new(5, 1).map_err(|e| e.to_string())?;
        for run_idx in 0..C7_RUNS {
            let seed = derive_seed(C7_SEED, &[0, run_idx as u64]);
            let (g, _) = build_multi(&p_a, &f5, seed).map_err(|e| e.to_string())?;
            let (clean, cert) =
                crate::analysis::cleanup(&g, &p_a, C7_THRESHOLD).map_err(|e| e.to_string())?;
            if !certified_free(&cert.freeness) {
                return fail(format!("model A run {run_idx}: no freeness certificate"));
            }
            let redetect = bad_sequences(&clean.to_multi(), &p_a, C7_THRESHOLD)
                .map_err(|e| e.to_string())?;
            if !redetect.is_empty() {
                return fail(format!(
                    "model A run {run_idx}: {} structures survive cleanup",
                    redetect.len()
                ));
            }
            let copies = count_complete_rpartite(&clean, &[2, 4]).map_err(|e| e.to_string())?;
            if copies != 0 {
                return fail(format!("model A run {run_idx}: {copies} forbidden copies remain"));
            }
        }

        // Group model: forbidden pattern has 2 disjoint pairs joined to a
        // 4-set.
        let p_b =
            params(&ModelInputs::B { t: 2 }, 3, 3, 2, None).map_err(|e| e.to_string())?;
        let f3 = Field::new(3, 1).map_err(|e| e.to_string())?;
        for run_idx in 0..C7_RUNS {
            let seed = derive_seed(C7_SEED, &[1, run_idx as u64]);
            let (g, _) = build_multi(&p_b, &f3, seed).map_err(|e| e.to_string())?;
            let (clean, cert) =
                crate::analysis::cleanup(&g, &p_b, C7_THRESHOLD).map_err(|e| e.to_string())?;
            if !certified_free(&cert.freeness) {
                return fail(format!("model B run {run_idx}: no freeness certificate"));
            }
            let redetect = bad_sequences(&clean.to_multi(), &p_b, C7_THRESHOLD)
                .map_err(|e| e.to_string())?;
            if !redetect.is_empty() {
                return fail(format!(
                    "model B run {run_idx}: {} structures survive cleanup",
                    redetect.len()
                ));
            }
            let copies =
                count_complete_bipartite_r(&clean, C7_THRESHOLD as usize, 2)
                    .map_err(|e| e.to_string())?;
            if copies != 0 {
                return fail(format!("model B run {run_idx}: {copies} forbidden copies remain"));
            }
        }

        // Partite path model: bad-pair emptiness certifies theta freeness;
        // the explicit theta search cross-checks both directions at small
        // strand counts, on the raw and the cleaned graph.
        let p_c =
            params(&ModelInputs::C { ell: 2 }, 3, 3, 2, None).map_err(|e| e.to_string())?;
        for run_idx in 0..C7_RUNS {
            let seed = derive_seed(C7_SEED, &[2, run_idx as u64]);
            let (g, _) = build_multi(&p_c, &f3, seed).map_err(|e| e.to_string())?;
            let (clean, cert) =
                crate::analysis::cleanup(&g, &p_c, C7_THRESHOLD).map_err(|e| e.to_string())?;
            if !certified_free(&cert.freeness) {
                return fail(format!("model C run {run_idx}: no freeness certificate"));
            }
            let redetect =
                bad_pairs(&clean.to_multi(), 2, C7_THRESHOLD).map_err(|e| e.to_string())?;
            if !redetect.is_empty() {
                return fail(format!(
                    "model C run {run_idx}: {} bad pairs survive cleanup",
                    redetect.len()
                ));
            }
            for strands in 2..=3u64 {
                for (label, graph) in [("raw", &g), ("clean", &clean.to_multi())] {
                    let pairs =
                        bad_pairs(graph, 2, strands).map_err(|e| e.to_string())?;
                    let simple_view = if label == "raw" {
                        // Theta search works on a deduplicated edge set.
                        SimpleHypergraph::new(
                            graph.n(),
                            graph.r(),
                            graph.partite(),
                            graph.multiplicity_map().keys().cloned().collect(),
                        )
                        .map_err(|e| e.to_string())?
                    } else {
                        clean.clone()
                    };
                    let theta = contains_berge_theta(&simple_view, 2, strands as usize)
                        .map_err(|e| e.to_string())?;
                    if pairs.is_empty() && theta.is_some() {
                        return fail(format!(
                            "model C run {run_idx} ({label}): theta with {strands} strands found despite bad-pair emptiness"
                        ));
                    }
                    if let Some(w) = &theta {
                        // A witness pair must carry at least `strands` paths.
                        let count = berge_paths(graph, w.x, w.y, 2);
                        if count < strands {
                            return fail(format!(
                                "model C run {run_idx} ({label}): witness pair ({}, {}) has only {count} paths",
                                w.x, w.y
                            ));
                        }
                    }
                }
            }
        }
        Ok(format!(
            "{C7_RUNS} runs per model at threshold {C7_THRESHOLD}: re-detection empty, exhaustive counters zero, theta cross-checks consistent"
        ))
    })
}

// ---------------------------------------------------------------------------
// Criterion 8: density scaling exponents
// ---------------------------------------------------------------------------

const C8_SEED_A: u64 = 0xACC8A;
const C8_SEED_C: u64 = 0xACC8C;
const C8_TRIALS_A: usize = 16;
const C8_TRIALS_C: usize = 24;
// Cleanup thresholds: high enough that deletions stay marginal at these
// field orders (the regime the exponent statement lives in), low enough
// that cleanup still bites on degenerate layers. Single-layer runs keep
// multi-edge effects out of the fit.
const C8_THRESHOLD_A: u64 = 8;
const C8_THRESHOLD_C: u64 = 30;

/// Log-log slope of post-cleanup edges against vertex count: the pair
/// model over q in {3,5,7,11,13} must sit within 1.5 +- 0.15, the partite
/// path model over q in {3,5,7} within 1.5 +- 0.2.
pub fn criterion_8() -> CriterionResult {
    run(8, "density scaling exponents", || {
        let fields_a: Vec<Field> = [3u64, 5, 7, 11, 13]
            .iter()
            .map(|&q| Field::new(q, 1))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let rep_a = scaling_fit(
            &ModelInputs::A { part_sizes: vec![2] },
            2,
            1,
            &fields_a,
            C8_THRESHOLD_A,
            C8_TRIALS_A,
            C8_SEED_A,
            None,
        )
        .map_err(|e| e.to_string())?;
        if (rep_a.slope - 1.5).abs() > 0.15 {
            return fail(format!("pair model slope {:.4} outside 1.5 +- 0.15", rep_a.slope));
        }

        let fields_c: Vec<Field> = [3u64, 5, 7]
            .iter()
            .map(|&q| Field::new(q, 1))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let rep_c = scaling_fit(
            &ModelInputs::C { ell: 2 },
            3,
            1,
            &fields_c,
            C8_THRESHOLD_C,
            C8_TRIALS_C,
            C8_SEED_C,
            None,
        )
        .map_err(|e| e.to_string())?;
        if (rep_c.slope - 1.5).abs() > 0.2 {
            return fail(format!(
                "partite path model slope {:.4} outside 1.5 +- 0.2",
                rep_c.slope
            ));
        }
        Ok(format!(
            "pair model slope {:.3} (band 1.5 +- 0.15), partite path model slope {:.3} (band 1.5 +- 0.2)",
            rep_a.slope, rep_c.slope
        ))
    })
}

// ---------------------------------------------------------------------------
// Criterion 9: completion count dichotomy report
// ---------------------------------------------------------------------------

const C9_SEED: u64 = 0xACC9;
const C9_TRIALS: usize = 2000;

/// Pair model at q=25, 2000 sampled pairs: the histogram report must be
/// internally consistent (counts sum to trials, gap summary recomputes
/// from the histogram, small cluster present). The gap shape itself is an
/// observation, not an assertion: mass at or above q/2 requires a
/// degenerate pair, which a uniform sample may legitimately never hit.
pub fn criterion_9() -> CriterionResult {
    run(9, "completion dichotomy report", || {
        let p = params(&ModelInputs::A { part_sizes: vec![2] }, 2, 25, 1, None)
            .map_err(|e| e.to_string())?;
        let field = Field::new(5, 2).map_err(|e| e.to_string())?;
        let report = dichotomy_probe(&p, &field, C9_TRIALS, C9_SEED).map_err(|e| e.to_string())?;
        let total: u64 = report.counts.values().sum();
        if total != C9_TRIALS as u64 {
            return fail(format!("histogram mass {total} != {C9_TRIALS} trials"));
        }
        let q = 25u64;
        let below = report.counts.keys().filter(|&&v| 2 * v < q).max().copied();
        let above = report.counts.keys().filter(|&&v| 2 * v >= q).min().copied();
        if below != report.largest_below_half_q || above != report.smallest_at_or_above_half_q {
            return fail(format!(
                "band edges ({:?}, {:?}) disagree with histogram ({below:?}, {above:?})",
                report.largest_below_half_q, report.smallest_at_or_above_half_q
            ));
        }
        let lo = match below {
            Some(lo) => lo,
            None => return fail("no observations below q/2; histogram is empty".into()),
        };
        let parsed: crate::lab::DichotomyHistogram =
            serde_json::from_str(&report.json()).map_err(|e| e.to_string())?;
        if parsed != report {
            return fail("report does not survive a JSON round trip".into());
        }
        let band = match above {
            Some(hi) => format!("middle band ({lo}, {hi}) empty"),
            None => format!("small cluster tops out at {lo}, no mass at or above q/2 = 12.5"),
        };
        Ok(format!("2000 pairs at q=25: counts sum, gap summary consistent, {band}"))
    })
}

// ---------------------------------------------------------------------------
// Criterion 10: determinism across repeats and thread counts
// ---------------------------------------------------------------------------

const C10_SEED: u64 = 0xACC10;
const C10_TRIALS: usize = 12;

/// Identical seeds give byte-identical serialized graphs and JSON reports,
/// including when the work runs on thread pools of different sizes.
pub fn criterion_10() -> CriterionResult {
    run(10, "seeded determinism", || {
        let p = params(&ModelInputs::A { part_sizes: vec![2] }, 2, 5, 2, None)
            .map_err(|e| e.to_string())?;
        let field = Field::new(5, 1).map_err(|e| e.to_string())?;
        let one_pass = |p: &ModelParams, field: &Field| -> Result<(String, String), String> {
            let (g, _) = build_multi(p, field, C10_SEED).map_err(|e| e.to_string())?;
            let report = expectation_suite(p, field, C10_TRIALS, &[C7_THRESHOLD], C10_SEED)
                .map_err(|e| e.to_string())?;
            Ok((g.serialize(), report.json()))
        };
        let (hgr_1, json_1) = one_pass(&p, &field)?;
        let (hgr_2, json_2) = one_pass(&p, &field)?;
        if hgr_1 != hgr_2 {
            return fail("repeat build produced a different serialized graph".into());
        }
        if json_1 != json_2 {
            return fail("repeat run produced a different JSON report".into());
        }
        for threads in [1usize, 2] {
            let pool = ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| e.to_string())?;
            let (hgr_t, json_t) = pool.install(|| one_pass(&p, &field))?;
            if hgr_t != hgr_1 {
                return fail(format!("{threads}-thread pool changed the serialized graph"));
            }
            if json_t != json_1 {
                return fail(format!("{threads}-thread pool changed the JSON report"));
            }
        }
        Ok(format!(
            "graph ({} bytes) and report ({} bytes) byte-identical across repeats and 1/2-thread pools",
            hgr_1.len(),
            json_1.len()
        ))
    })
}
