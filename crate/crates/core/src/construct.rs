//! Parameter derivation and layer builders for the three random models.
//!
//! Each model fixes a coordinate dimension (so vertices are vectors over
//! the field), a polynomial degree bound, and a number of defining
//! polynomials per layer:
//!
//! * model A: inputs s_1..s_{r-1}; blocks of b = prod(s_i) variables,
//!   degree d = b * (b*(sum(s_i) - 1) + 2), one polynomial, vertices F^b;
//! * model B: input t; blocks of t variables, degree d = ((r-1)t^2 - t + 2) * t,
//!   one polynomial, vertices F^t;
//! * model C: input l; blocks of l variables, degree d = r*l^2,
//!   l*(r-1) - 1 polynomials, r-partite on r copies of F^l.
//!
//! A tuple of distinct vertices (cross-part for model C) is an edge exactly
//! when every defining polynomial vanishes on it. A multi-hypergraph is the
//! union of h layers built from independently seeded polynomial draws.
//! Layer sweeps share contraction work across tuples with a common prefix.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gf::{Field, GfError, MAX_ORDER, MAX_VECTORS};
use crate::hypergraph::{HgError, MultiHypergraph, SimpleHypergraph};
use crate::sympoly::{
    binomial, sample_symmetric, ContractionCache, PolySpace, SymPolyError, SymmetricPolynomial,
    BASIS_CAP, ORBIT_CAP, TENSOR_CAP,
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug)]
#[non_exhaustive]
pub enum ConstructError {
    /// Model inputs out of their domain.
    BadInputs(String),
    /// Derived sizes exceed the enumeration or basis guards.
    InfeasibleSize(String),
    Field(GfError),
    Poly(SymPolyError),
    Graph(HgError),
}

impl std::fmt::Display for ConstructError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstructError::BadInputs(msg) => write!(f, "bad inputs: {msg}"),
            ConstructError::InfeasibleSize(msg) => write!(f, "infeasible size: {msg}"),
            ConstructError::Field(e) => write!(f, "field error: {e}"),
            ConstructError::Poly(e) => write!(f, "polynomial error: {e}"),
            ConstructError::Graph(e) => write!(f, "graph error: {e}"),
        }
    }
}

impl std::error::Error for ConstructError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            ConstructError::Field(e) => Some(e),
            ConstructError::Poly(e) => Some(e),
            ConstructError::Graph(e) => Some(e),
            _ => None,
        }
    }
}

impl From<GfError> for ConstructError {
    fn from(e: GfError) -> Self {
        ConstructError::Field(e)
    }
}

impl From<SymPolyError> for ConstructError {
    fn from(e: SymPolyError) -> Self {
        ConstructError::Poly(e)
    }
}

impl From<HgError> for ConstructError {
    fn from(e: HgError) -> Self {
        ConstructError::Graph(e)
    }
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Model {
    A,
    B,
    C,
}

impl Model {
    /// Seed-derivation tag: the ASCII code of the model letter.
    pub fn tag(self) -> u64 {
        match self {
            Model::A => 0x41,
            Model::B => 0x42,
            Model::C => 0x43,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Model::A => 'A',
            Model::B => 'B',
            Model::C => 'C',
        }
    }
}

/// Raw per-model inputs, before derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelInputs {
    /// Part sizes s_1..s_{r-1} of the forbidden complete r-partite pattern.
    A { part_sizes: Vec<usize> },
    /// Smaller side t of the forbidden complete bipartite pattern.
    B { t: usize },
    /// Path length bound l of the forbidden theta pattern.
    C { ell: usize },
}

/// Derived construction parameters. Fields that do not apply to the model
/// are zero (or empty).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelParams {
    pub model: Model,
    pub r: usize,
    pub q: u64,
    pub h: usize,
    /// Model A input sizes s_1..s_{r-1}.
    pub part_sizes: Vec<usize>,
    /// Model B input.
    pub t: usize,
    /// Model C input.
    pub ell: usize,
    /// Model A: product of the part sizes.
    pub b: usize,
    /// Model A: sum of the part sizes.
    pub t_sum: usize,
    /// Model A: b * (t_sum - 1) + 2.
    pub s: usize,
    /// Model B: (r - 1) t^2 - t + 2.
    pub m: usize,
    /// Defining polynomials per layer (1 for A and B).
    pub npolys: usize,
    /// Degree bound from the model formulas.
    pub d_model: usize,
    /// Effective degree bound used for sampling.
    pub d_used: usize,
    pub degree_overridden: bool,
    /// Coordinates per vertex (= variables per polynomial block).
    pub block_vars: usize,
    /// Vectors per coordinate pool: q^block_vars.
    pub n_vectors: usize,
    /// Total vertices (r pools for model C).
    pub n_vertices: usize,
    /// 0 for models A and B; r for model C.
    pub partite: usize,
}

/// Derives all model parameters and checks the feasibility guards.
///
/// `degree_override` replaces the model's degree bound, which can bring an
/// otherwise infeasible polynomial space under the caps; the coordinate
/// guard q^block_vars <= 2^24 is structural and cannot be overridden.
pub fn params(
    inputs: &ModelInputs,
    r: usize,
    q: u64,
    h: usize,
    degree_override: Option<usize>,
) -> Result<ModelParams, ConstructError> {
    if r < 2 {
        return Err(ConstructError::BadInputs(format!("r must be at least 2, got {r}")));
    }
    if q < 2 || q > MAX_ORDER {
        return Err(ConstructError::BadInputs(format!("field order {q} outside 2..={MAX_ORDER}")));
    }
    if h == 0 {
        return Err(ConstructError::BadInputs("layer count h must be at least 1".into()));
    }

    let mut p = ModelParams {
        model: Model::A,
        r,
        q,
        h,
        part_sizes: Vec::new(),
        t: 0,
        ell: 0,
        b: 0,
        t_sum: 0,
        s: 0,
        m: 0,
        npolys: 1,
        d_model: 0,
        d_used: 0,
        degree_overridden: false,
        block_vars: 0,
        n_vectors: 0,
        n_vertices: 0,
        partite: 0,
    };

    match inputs {
        ModelInputs::A { part_sizes } => {
            if part_sizes.len() != r - 1 {
                return Err(ConstructError::BadInputs(format!(
                    "model A needs r-1 = {} part sizes, got {}",
                    r - 1,
                    part_sizes.len()
                )));
            }
            if part_sizes.iter().any(|&s| s == 0) {
                return Err(ConstructError::BadInputs("part sizes must be positive".into()));
            }
            p.model = Model::A;
            p.part_sizes = part_sizes.clone();
            p.b = part_sizes.iter().product();
            p.t_sum = part_sizes.iter().sum();
            p.s = p.b * (p.t_sum - 1) + 2;
            p.d_model = p.b * p.s;
            p.block_vars = p.b;
        }
        ModelInputs::B { t } => {
            if *t == 0 {
                return Err(ConstructError::BadInputs("t must be positive".into()));
            }
            p.model = Model::B;
            p.t = *t;
            p.m = (r - 1) * t * t - t + 2;
            p.d_model = p.m * t;
            p.block_vars = *t;
        }
        ModelInputs::C { ell } => {
            if *ell == 0 {
                return Err(ConstructError::BadInputs("l must be positive".into()));
            }
            if ell * (r - 1) < 2 {
                return Err(ConstructError::BadInputs(format!(
                    "model C needs l*(r-1) >= 2 polynomials, got l={ell}, r={r}"
                )));
            }
            p.model = Model::C;
            p.ell = *ell;
            p.npolys = ell * (r - 1) - 1;
            p.d_model = r * ell * ell;
            p.block_vars = *ell;
            p.partite = r;
        }
    }

    p.d_used = degree_override.unwrap_or(p.d_model);
    p.degree_overridden = degree_override.is_some() && p.d_used != p.d_model;

    // Coordinate pool guard.
    let mut n_vectors: u64 = 1;
    for _ in 0..p.block_vars {
        n_vectors = n_vectors.saturating_mul(q);
        if n_vectors > MAX_VECTORS {
            return Err(ConstructError::InfeasibleSize(format!(
                "q^{} = {}^{} exceeds the vector guard {MAX_VECTORS}",
                p.block_vars, q, p.block_vars
            )));
        }
    }
    p.n_vectors = n_vectors as usize;
    p.n_vertices = if p.partite == 0 { p.n_vectors } else { r * p.n_vectors };

    // Polynomial space guards at the effective degree.
    let hint = if degree_override.is_none() { "; pass a degree override to shrink the space" } else { "" };
    let basis = binomial((p.block_vars + p.d_used) as u64, p.block_vars as u64);
    if basis > BASIS_CAP as u128 {
        return Err(ConstructError::InfeasibleSize(format!(
            "monomial basis for {} variables at degree {} has {basis} elements, cap {BASIS_CAP}{hint}",
            p.block_vars, p.d_used
        )));
    }
    let orbits = binomial(basis as u64 + r as u64 - 1, r as u64);
    if orbits > ORBIT_CAP as u128 {
        return Err(ConstructError::InfeasibleSize(format!(
            "orbit count {orbits} exceeds the cap {ORBIT_CAP}{hint}"
        )));
    }
    let tensor = (basis as u128).saturating_pow(r as u32);
    if tensor > TENSOR_CAP as u128 {
        return Err(ConstructError::InfeasibleSize(format!(
            "expanded tensor needs {tensor} entries, cap {TENSOR_CAP}{hint}"
        )));
    }

    Ok(p)
}

impl ModelParams {
    /// The polynomial family all layers draw from.
    pub fn poly_space(&self) -> Result<Arc<PolySpace>, ConstructError> {
        Ok(Arc::new(PolySpace::new(self.r, self.block_vars, self.d_used)?))
    }
}

// ---------------------------------------------------------------------------
// Seed derivation
// ---------------------------------------------------------------------------

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a master seed and a word path. Each word is
/// folded in with the splitmix64 finalizer, so distinct paths give
/// independent-looking streams and the derivation is order-sensitive.
pub fn derive_seed(master: u64, words: &[u64]) -> u64 {
    let mut x = splitmix_finalize(master.wrapping_add(0x9E37_79B9_7F4A_7C15));
    for &w in words {
        x = splitmix_finalize(x ^ w.wrapping_add(0x9E37_79B9_7F4A_7C15));
    }
    x
}

/// The rng stream id for one defining polynomial: mixes master seed, model
/// tag, layer index, and polynomial index.
pub fn poly_stream_id(master: u64, model: Model, layer: usize, poly: usize) -> u64 {
    derive_seed(master, &[model.tag(), layer as u64, poly as u64])
}

// ---------------------------------------------------------------------------
// Layer sweeps
// ---------------------------------------------------------------------------

/// Walks candidate tuples with prefix-shared contractions and collects the
/// tuples where every polynomial vanishes. In pool mode the tuples are
/// ascending index r-subsets of one pool; in cross mode they take one index
/// per part, all parts sharing the coordinate pool.
struct Sweep<'a> {
    field: &'a Field,
    cache: &'a ContractionCache,
    r: usize,
    pool: usize,
    cross: bool,
    /// partials[level][poly]: the level's contracted tensor per polynomial.
    partials: Vec<Vec<Vec<u32>>>,
    acc: Vec<u64>,
    tuple: Vec<usize>,
    edges: Vec<Vec<u32>>,
}

impl<'a> Sweep<'a> {
    fn new(field: &'a Field, cache: &'a ContractionCache, pool: usize, cross: bool) -> Sweep<'a> {
        let r = cache.space.r();
        let basis = cache.space.basis.len();
        let npolys = cache.n_polys();
        let partials = (0..r.saturating_sub(1))
            .map(|level| vec![vec![0u32; basis.pow((r - 1 - level) as u32)]; npolys])
            .collect();
        Sweep {
            field,
            cache,
            r,
            pool,
            cross,
            partials,
            acc: Vec::new(),
            tuple: vec![0; r],
            edges: Vec::new(),
        }
    }

    fn run(mut self) -> Vec<Vec<u32>> {
        self.descend(0);
        self.edges
    }

    fn descend(&mut self, level: usize) {
        let start = if self.cross || level == 0 { 0 } else { self.tuple[level - 1] + 1 };
        let npolys = self.cache.n_polys();
        if level == self.r - 1 {
            for v in start..self.pool {
                let row = self.cache.mono_row(v);
                // Short-circuit on the first polynomial that does not vanish.
                let vanish = (0..npolys).all(|p| {
                    let src = if level == 0 { self.cache.tensor(p) } else { &self.partials[level - 1][p] };
                    self.field.dot_reduce(row, src) == 0
                });
                if vanish {
                    self.tuple[level] = v;
                    self.edges.push(self.globalize());
                }
            }
            return;
        }
        for v in start..self.pool {
            self.tuple[level] = v;
            for poly in 0..npolys {
                // Split borrows: the source is either the cache tensor or an
                // earlier level, never the level being written.
                let (head, tail) = self.partials.split_at_mut(level);
                let src: &[u32] =
                    if level == 0 { self.cache.tensor(poly) } else { &head[level - 1][poly] };
                self.field.contract_into(
                    src,
                    self.cache.mono_row(v),
                    &mut tail[0][poly],
                    &mut self.acc,
                );
            }
            self.descend(level + 1);
        }
    }

    fn globalize(&self) -> Vec<u32> {
        if self.cross {
            self.tuple
                .iter()
                .enumerate()
                .map(|(part, &v)| (part * self.pool + v) as u32)
                .collect()
        } else {
            self.tuple.iter().map(|&v| v as u32).collect()
        }
    }
}

fn check_poly_shape(params: &ModelParams, polys: &[&SymmetricPolynomial]) -> Result<(), ConstructError> {
    if polys.len() != params.npolys {
        return Err(ConstructError::BadInputs(format!(
            "model {} needs {} defining polynomials, got {}",
            params.model.letter(),
            params.npolys,
            polys.len()
        )));
    }
    for poly in polys {
        let space = &poly.space;
        if space.r() != params.r
            || space.basis.t() != params.block_vars
            || space.basis.d() != params.d_used
        {
            return Err(ConstructError::BadInputs(format!(
                "polynomial shape (r={}, vars={}, degree={}) does not match params (r={}, vars={}, degree={})",
                space.r(),
                space.basis.t(),
                space.basis.d(),
                params.r,
                params.block_vars,
                params.d_used
            )));
        }
    }
    Ok(())
}

/// Builds one layer over a single vertex pool (models A and B): vertices
/// are the vectors of F^block_vars and an ascending r-subset is an edge
/// exactly when every polynomial vanishes on it.
fn build_pool_layer(
    params: &ModelParams,
    field: &Field,
    polys: &[&SymmetricPolynomial],
) -> Result<SimpleHypergraph, ConstructError> {
    check_poly_shape(params, polys)?;
    let vertices = field.enumerate_vectors(params.block_vars)?;
    let cache = ContractionCache::build(field, &polys[0].space, polys, &vertices)?;
    let edges = Sweep::new(field, &cache, vertices.len(), false).run();
    Ok(SimpleHypergraph::new(params.n_vertices, params.r, 0, edges)?)
}

/// Builds one model C layer: r parts, each a copy of the vectors of F^l
/// with part-major vertex ids, and a cross-part tuple is an edge exactly
/// when all defining polynomials vanish on it.
fn build_cross_layer(
    params: &ModelParams,
    field: &Field,
    polys: &[&SymmetricPolynomial],
) -> Result<SimpleHypergraph, ConstructError> {
    check_poly_shape(params, polys)?;
    let vertices = field.enumerate_vectors(params.block_vars)?;
    let cache = ContractionCache::build(field, &polys[0].space, polys, &vertices)?;
    let edges = Sweep::new(field, &cache, vertices.len(), true).run();
    Ok(SimpleHypergraph::new(params.n_vertices, params.r, params.r, edges)?)
}

fn expect_model(params: &ModelParams, model: Model) -> Result<(), ConstructError> {
    if params.model != model {
        return Err(ConstructError::BadInputs(format!(
            "params are for model {}, expected model {}",
            params.model.letter(),
            model.letter()
        )));
    }
    Ok(())
}

/// Model A layer from a fixed defining polynomial.
pub fn build_layer_a_with(
    params: &ModelParams,
    field: &Field,
    poly: &SymmetricPolynomial,
) -> Result<SimpleHypergraph, ConstructError> {
    expect_model(params, Model::A)?;
    build_pool_layer(params, field, &[poly])
}

/// Model A layer with the polynomial drawn from the stream.
pub fn build_layer_a(
    params: &ModelParams,
    field: &Field,
    stream: &mut impl Rng,
) -> Result<SimpleHypergraph, ConstructError> {
    expect_model(params, Model::A)?;
    let space = params.poly_space()?;
    let poly = sample_symmetric(field, &space, stream);
    build_pool_layer(params, field, &[&poly])
}

/// Model B layer from a fixed defining polynomial.
pub fn build_layer_b_with(
    params: &ModelParams,
    field: &Field,
    poly: &SymmetricPolynomial,
) -> Result<SimpleHypergraph, ConstructError> {
    expect_model(params, Model::B)?;
    build_pool_layer(params, field, &[poly])
}

/// Model B layer with the polynomial drawn from the stream.
pub fn build_layer_b(
    params: &ModelParams,
    field: &Field,
    stream: &mut impl Rng,
) -> Result<SimpleHypergraph, ConstructError> {
    expect_model(params, Model::B)?;
    let space = params.poly_space()?;
    let poly = sample_symmetric(field, &space, stream);
    build_pool_layer(params, field, &[&poly])
}

/// Model C layer from fixed defining polynomials.
pub fn build_layer_c_with(
    params: &ModelParams,
    field: &Field,
    polys: &[&SymmetricPolynomial],
) -> Result<SimpleHypergraph, ConstructError> {
    expect_model(params, Model::C)?;
    build_cross_layer(params, field, polys)
}

/// Model C layer with all defining polynomials drawn in order from the
/// stream.
pub fn build_layer_c(
    params: &ModelParams,
    field: &Field,
    stream: &mut impl Rng,
) -> Result<SimpleHypergraph, ConstructError> {
    expect_model(params, Model::C)?;
    let space = params.poly_space()?;
    let polys: Vec<SymmetricPolynomial> =
        (0..params.npolys).map(|_| sample_symmetric(field, &space, stream)).collect();
    let refs: Vec<&SymmetricPolynomial> = polys.iter().collect();
    build_cross_layer(params, field, &refs)
}

// ---------------------------------------------------------------------------
// Multi-layer union
// ---------------------------------------------------------------------------

/// The layers behind a multi-hypergraph, with their defining polynomials
/// and the rng stream ids they were drawn from.
pub struct LayerBundle {
    pub layers: Vec<SimpleHypergraph>,
    /// polys[layer][poly_index].
    pub polys: Vec<Vec<SymmetricPolynomial>>,
    /// stream_ids[layer][poly_index], from [`poly_stream_id`].
    pub stream_ids: Vec<Vec<u64>>,
}

/// Builds h independent layers and their union. Each defining polynomial
/// draws from its own derived stream, so the result depends only on
/// (params, field, master_seed), not on thread count.
pub fn build_multi(
    params: &ModelParams,
    field: &Field,
    master_seed: u64,
) -> Result<(MultiHypergraph, LayerBundle), ConstructError> {
    let space = params.poly_space()?;
    let built: Vec<(SimpleHypergraph, Vec<SymmetricPolynomial>, Vec<u64>)> = (0..params.h)
        .into_par_iter()
        .map(|layer| {
            let mut polys = Vec::with_capacity(params.npolys);
            let mut ids = Vec::with_capacity(params.npolys);
            for poly in 0..params.npolys {
                let sid = poly_stream_id(master_seed, params.model, layer, poly);
                let mut rng = ChaCha8Rng::seed_from_u64(sid);
                polys.push(sample_symmetric(field, &space, &mut rng));
                ids.push(sid);
            }
            let refs: Vec<&SymmetricPolynomial> = polys.iter().collect();
            let graph = match params.model {
                Model::A | Model::B => build_pool_layer(params, field, &refs)?,
                Model::C => build_cross_layer(params, field, &refs)?,
            };
            Ok((graph, polys, ids))
        })
        .collect::<Result<_, ConstructError>>()?;

    let mut layers = Vec::with_capacity(params.h);
    let mut polys = Vec::with_capacity(params.h);
    let mut stream_ids = Vec::with_capacity(params.h);
    for (g, p, s) in built {
        layers.push(g);
        polys.push(p);
        stream_ids.push(s);
    }
    let multi = MultiHypergraph::union(&layers)?;
    Ok((multi, LayerBundle { layers, polys, stream_ids }))
}

// ---------------------------------------------------------------------------
