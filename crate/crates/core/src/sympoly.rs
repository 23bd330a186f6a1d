//! Symmetric block polynomials over finite fields.
//!
//! A polynomial here takes r argument blocks of t variables each, with
//! degree at most d in every block, and is invariant under permuting the
//! blocks. The monomial space per block is the set of exponent vectors of
//! total degree at most d; an r-fold product of block monomials is indexed
//! by an r-tuple of basis indices, and block symmetry partitions those
//! tuples into orbits under coordinate permutation. A symmetric polynomial
//! is one coefficient per orbit, and a uniformly random member of the
//! family is sampled by drawing every orbit coefficient independently and
//! uniformly from the field.
//!
//! Evaluation supports two routes kept deliberately independent: a direct
//! orbit-by-orbit sum, and a cached route ([`ContractionCache`]) that
//! expands the coefficient tensor once and contracts it against per-vertex
//! monomial value vectors, which is what the bulk constructions use.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::gf::{Field, Fq};

/// Cap on per-block monomial basis size, C(t+d, t).
pub const BASIS_CAP: u64 = 1 << 22;

/// Cap on the number of coefficient orbits.
pub const ORBIT_CAP: u64 = 1 << 24;

/// Cap on expanded coefficient tensor entries, basis^r.
pub const TENSOR_CAP: u64 = 1 << 27;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum SymPolyError {
    /// Basis or orbit space exceeds its cap.
    BasisTooLarge { what: &'static str, count: u128, cap: u64 },
    /// Expanded tensor would exceed `TENSOR_CAP` entries.
    TensorTooLarge { entries: u128 },
    /// A point tuple does not match the block shape.
    DimensionMismatch { expected: usize, got: usize },
    /// An element encoding is outside the field.
    InvalidElement { value: u64, q: u64 },
    /// Shape parameters out of range (r, t >= 1; r <= 16).
    BadShape(&'static str),
}

impl fmt::Display for SymPolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymPolyError::BasisTooLarge { what, count, cap } => {
                write!(f, "{what} has {count} entries, above the cap {cap}")
            }
            SymPolyError::TensorTooLarge { entries } => {
                write!(f, "coefficient tensor needs {entries} entries, above the cap {TENSOR_CAP}")
            }
            SymPolyError::DimensionMismatch { expected, got } => {
                write!(f, "expected {expected} coordinates/blocks, got {got}")
            }
            SymPolyError::InvalidElement { value, q } => {
                write!(f, "encoding {value} is not an element of a field of order {q}")
            }
            SymPolyError::BadShape(msg) => write!(f, "bad shape: {msg}"),
        }
    }
}

impl std::error::Error for SymPolyError {}

// ---------------------------------------------------------------------------
// Small combinatorics helpers
// ---------------------------------------------------------------------------

/// Exact binomial coefficient in u128 (saturating).
pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Advances `a` to its next lexicographic permutation; false once sorted
/// descending. Starting from sorted ascending, this visits every distinct
/// arrangement of a multiset exactly once.
pub(crate) fn next_permutation<T: Ord + Copy>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

// ---------------------------------------------------------------------------
// Monomial basis
// ---------------------------------------------------------------------------

/// Exponent vectors of t variables with total degree at most d, in graded
/// order: by total degree, then lexicographically descending within a
/// degree (the leading variable carries the most weight first).
#[derive(Debug)]
pub struct MonomialBasis {
    t: usize,
    d: usize,
    count: usize,
    /// Flat exponent storage, `count * t` entries.
    exps: Vec<u32>,
}

impl MonomialBasis {
    pub fn new(t: usize, d: usize) -> Result<MonomialBasis, SymPolyError> {
        if t == 0 {
            return Err(SymPolyError::BadShape("t must be at least 1"));
        }
        let count = binomial((t + d) as u64, t as u64);
        if count > BASIS_CAP as u128 {
            return Err(SymPolyError::BasisTooLarge {
                what: "monomial basis",
                count,
                cap: BASIS_CAP,
            });
        }
        let count = count as usize;
        let mut exps = Vec::with_capacity(count * t);
        let mut current = vec![0u32; t];
        for degree in 0..=d {
            fill_compositions(&mut exps, &mut current, 0, degree as u32);
        }
        debug_assert_eq!(exps.len(), count * t);
        Ok(MonomialBasis { t, d, count, exps })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Exponent vector of monomial `i`.
    pub fn exp(&self, i: usize) -> &[u32] {
        &self.exps[i * self.t..(i + 1) * self.t]
    }

    /// Values of every basis monomial at one point, as encodings.
    pub fn monomial_values(&self, field: &Field, point: &[Fq]) -> Result<Vec<u32>, SymPolyError> {
        if point.len() != self.t {
            return Err(SymPolyError::DimensionMismatch { expected: self.t, got: point.len() });
        }
        for &c in point {
            if c.value() as u64 >= field.q() {
                return Err(SymPolyError::InvalidElement { value: c.value() as u64, q: field.q() });
            }
        }
        // Power tables per coordinate, then one product per monomial.
        let mut pows = vec![0u32; self.t * (self.d + 1)];
        for (j, &c) in point.iter().enumerate() {
            let row = &mut pows[j * (self.d + 1)..(j + 1) * (self.d + 1)];
            row[0] = 1;
            for a in 1..=self.d {
                row[a] = field.mul(Fq(row[a - 1]), c).value();
            }
        }
        let mut out = Vec::with_capacity(self.count);
        for i in 0..self.count {
            let mut v = Fq::ONE;
            for (j, &e) in self.exp(i).iter().enumerate() {
                if e > 0 {
                    v = field.mul(v, Fq(pows[j * (self.d + 1) + e as usize]));
                }
            }
            out.push(v.value());
        }
        Ok(out)
    }
}

/// Appends all exponent vectors of exact remaining degree, first coordinate
/// largest first.
fn fill_compositions(out: &mut Vec<u32>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.extend_from_slice(current);
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_compositions(out, current, pos + 1, remaining - e);
    }
}

// ---------------------------------------------------------------------------
// Orbits of monomial index tuples
// ---------------------------------------------------------------------------

/// Orbits of r-tuples of monomial indices under block permutation. Each
/// orbit is stored by its canonical representative, the non-decreasing
/// tuple, and reps are listed in lexicographic order.
#[derive(Debug)]
pub struct OrbitBasis {
    r: usize,
    count: usize,
    /// Flat representative storage, `count * r` entries.
    reps: Vec<u32>,
}

impl OrbitBasis {
    pub fn new(r: usize, basis: &MonomialBasis) -> Result<OrbitBasis, SymPolyError> {
        if r == 0 || r > 16 {
            return Err(SymPolyError::BadShape("r must be in 1..=16"));
        }
        let b = basis.len() as u64;
        let count = binomial(b + r as u64 - 1, r as u64);
        if count > ORBIT_CAP as u128 {
            return Err(SymPolyError::BasisTooLarge {
                what: "orbit basis",
                count,
                cap: ORBIT_CAP,
            });
        }
        let count = count as usize;
        let mut reps = Vec::with_capacity(count * r);
        let mut cur = vec![0u32; r];
        loop {
            reps.extend_from_slice(&cur);
            // Odometer over non-decreasing tuples.
            let mut pos = r;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                if cur[pos] + 1 < b as u32 {
                    let v = cur[pos] + 1;
                    for slot in cur.iter_mut().skip(pos) {
                        *slot = v;
                    }
                    break;
                }
                if pos == 0 {
                    debug_assert_eq!(reps.len(), count * r);
                    return Ok(OrbitBasis { r, count, reps });
                }
            }
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// Canonical (non-decreasing) representative of orbit `o`.
    pub fn rep(&self, o: usize) -> &[u32] {
        &self.reps[o * self.r..(o + 1) * self.r]
    }

    /// Number of distinct arrangements of the representative.
    pub fn orbit_size(&self, o: usize) -> u64 {
        let rep = self.rep(o);
        let mut size = factorial(self.r as u64);
        let mut run = 1u64;
        for i in 1..rep.len() {
            if rep[i] == rep[i - 1] {
                run += 1;
            } else {
                size /= factorial(run);
                run = 1;
            }
        }
        size / factorial(run)
    }
}

fn factorial(n: u64) -> u64 {
    (2..=n).product::<u64>().max(1)
}

// ---------------------------------------------------------------------------
// Polynomial space and polynomials
// ---------------------------------------------------------------------------

/// Shared shape data for one family of symmetric polynomials: the per-block
/// monomial basis and the orbit structure for r blocks.
#[derive(Debug)]
pub struct PolySpace {
    pub basis: MonomialBasis,
    pub orbits: OrbitBasis,
}

impl PolySpace {
    pub fn new(r: usize, t: usize, d: usize) -> Result<PolySpace, SymPolyError> {
        let basis = MonomialBasis::new(t, d)?;
        let orbits = OrbitBasis::new(r, &basis)?;
        Ok(PolySpace { basis, orbits })
    }

    pub fn r(&self) -> usize {
        self.orbits.r()
    }

    /// One evaluation-matrix row: entry o is the orbit-sum of monomial
    /// products at the given block points. The dot product of a coefficient
    /// vector with this row is the polynomial value at the tuple.
    pub fn evaluation_row(&self, field: &Field, points: &[&[Fq]]) -> Result<Vec<Fq>, SymPolyError> {
        let monos = self.point_monomials(field, points)?;
        let b = self.basis.len();
        let mut row = Vec::with_capacity(self.orbits.len());
        let mut arrangement = vec![0u32; self.r()];
        for o in 0..self.orbits.len() {
            arrangement.copy_from_slice(self.orbits.rep(o));
            let mut sum = Fq::ZERO;
            loop {
                let mut prod = Fq::ONE;
                for (j, &mono_idx) in arrangement.iter().enumerate() {
                    prod = field.mul(prod, Fq(monos[j * b + mono_idx as usize]));
                }
                sum = field.add(sum, prod);
                if !next_permutation(&mut arrangement) {
                    break;
                }
            }
            row.push(sum);
        }
        Ok(row)
    }

    /// Per-block monomial value vectors, flattened r x basis.
    fn point_monomials(&self, field: &Field, points: &[&[Fq]]) -> Result<Vec<u32>, SymPolyError> {
        if points.len() != self.r() {
            return Err(SymPolyError::DimensionMismatch {
                expected: self.r(),
                got: points.len(),
            });
        }
        let b = self.basis.len();
        let mut monos = Vec::with_capacity(self.r() * b);
        for &pt in points {
            monos.extend(self.basis.monomial_values(field, pt)?);
        }
        Ok(monos)
    }
}

/// A symmetric polynomial: one field coefficient per orbit, in orbit order.
#[derive(Clone)]
pub struct SymmetricPolynomial {
    pub space: Arc<PolySpace>,
    pub coeffs: Vec<Fq>,
}

impl SymmetricPolynomial {
    pub fn zero(space: &Arc<PolySpace>) -> SymmetricPolynomial {
        SymmetricPolynomial { space: space.clone(), coeffs: vec![Fq::ZERO; space.orbits.len()] }
    }

    /// The constant polynomial with value `c`.
    pub fn constant(space: &Arc<PolySpace>, c: Fq) -> SymmetricPolynomial {
        let mut poly = SymmetricPolynomial::zero(space);
        // The all-zero exponent tuple is orbit 0 in graded order.
        poly.coeffs[0] = c;
        poly
    }

    /// Direct evaluation: orbit-by-orbit symmetrized monomial sums. Kept
    /// independent of the cached route so the two can cross-check.
    pub fn evaluate(&self, field: &Field, points: &[&[Fq]]) -> Result<Fq, SymPolyError> {
        let monos = self.space.point_monomials(field, points)?;
        let b = self.space.basis.len();
        let mut acc = Fq::ZERO;
        let mut arrangement = vec![0u32; self.space.r()];
        for o in 0..self.space.orbits.len() {
            let c = self.coeffs[o];
            if c.is_zero() {
                continue;
            }
            arrangement.copy_from_slice(self.space.orbits.rep(o));
            let mut sum = Fq::ZERO;
            loop {
                let mut prod = Fq::ONE;
                for (j, &mono_idx) in arrangement.iter().enumerate() {
                    prod = field.mul(prod, Fq(monos[j * b + mono_idx as usize]));
                }
                sum = field.add(sum, prod);
                if !next_permutation(&mut arrangement) {
                    break;
                }
            }
            acc = field.add(acc, field.mul(c, sum));
        }
        Ok(acc)
    }
}

/// Uniform sample from the family: every orbit coefficient independent and
/// uniform. Consumes exactly `space.orbits.len()` draws in orbit order, so
/// a fixed stream yields a fixed polynomial.
pub fn sample_symmetric(
    field: &Field,
    space: &Arc<PolySpace>,
    rng: &mut impl Rng,
) -> SymmetricPolynomial {
    let q = field.q();
    let coeffs = (0..space.orbits.len()).map(|_| Fq(rng.gen_range(0..q) as u32)).collect();
    SymmetricPolynomial { space: space.clone(), coeffs }
}

// ---------------------------------------------------------------------------
// Contraction cache
// ---------------------------------------------------------------------------

/// Bulk-evaluation state: per-vertex monomial value vectors plus each
/// polynomial's coefficient tensor expanded to the full basis^r grid.
/// Evaluating on a tuple is then r successive tensor contractions, and
/// sweeps over many tuples share the contractions of common prefixes.
#[derive(Debug)]
pub struct ContractionCache {
    pub space: Arc<PolySpace>,
    n_vertices: usize,
    /// Flat `n_vertices * basis` monomial values.
    vertex_monomials: Vec<u32>,
    /// One expanded tensor per polynomial, each `basis^r` entries.
    tensors: Vec<Vec<u32>>,
}

impl ContractionCache {
    pub fn build(
        field: &Field,
        space: &Arc<PolySpace>,
        polys: &[&SymmetricPolynomial],
        vertices: &[Vec<Fq>],
    ) -> Result<ContractionCache, SymPolyError> {
        let b = space.basis.len() as u128;
        let entries = b.pow(space.r() as u32);
        if entries > TENSOR_CAP as u128 {
            return Err(SymPolyError::TensorTooLarge { entries });
        }
        let mut vertex_monomials = Vec::with_capacity(vertices.len() * space.basis.len());
        for v in vertices {
            vertex_monomials.extend(space.basis.monomial_values(field, v)?);
        }
        let tensors = polys.iter().map(|p| expand_tensor(space, p)).collect();
        Ok(ContractionCache {
            space: space.clone(),
            n_vertices: vertices.len(),
            vertex_monomials,
            tensors,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_polys(&self) -> usize {
        self.tensors.len()
    }

    /// Monomial value vector of one vertex.
    pub fn mono_row(&self, vertex: usize) -> &[u32] {
        let b = self.space.basis.len();
        &self.vertex_monomials[vertex * b..(vertex + 1) * b]
    }

    /// Expanded coefficient tensor of one polynomial.
    pub fn tensor(&self, poly: usize) -> &[u32] {
        &self.tensors[poly]
    }

    /// Cached evaluation at an r-tuple of vertex indices.
    pub fn eval_cached(&self, field: &Field, poly: usize, vertex_ids: &[usize]) -> Fq {
        assert_eq!(vertex_ids.len(), self.space.r());
        let b = self.space.basis.len();
        let mut cur: Vec<u32> = self.tensors[poly].clone();
        let mut acc = Vec::new();
        for &v in &vertex_ids[..vertex_ids.len() - 1] {
            let stride = cur.len() / b;
            let mut next = vec![0u32; stride];
            field.contract_into(&cur, self.mono_row(v), &mut next, &mut acc);
            cur = next;
        }
        let last = vertex_ids[vertex_ids.len() - 1];
        Fq(field.dot_reduce(self.mono_row(last), &cur))
    }
}

/// Writes every arrangement of every orbit representative into a dense
/// basis^r tensor of coefficient encodings.
fn expand_tensor(space: &PolySpace, poly: &SymmetricPolynomial) -> Vec<u32> {
    let b = space.basis.len();
    let r = space.r();
    let mut tensor = vec![0u32; b.pow(r as u32)];
    let mut arrangement = vec![0u32; r];
    for o in 0..space.orbits.len() {
        let c = poly.coeffs[o].value();
        if c == 0 {
            continue;
        }
        arrangement.copy_from_slice(space.orbits.rep(o));
        loop {
            let mut idx = 0usize;
            for &m in &arrangement {
                idx = idx * b + m as usize;
            }
            tensor[idx] = c;
            if !next_permutation(&mut arrangement) {
                break;
            }
        }
    }
    tensor
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn space(r: usize, t: usize, d: usize) -> Arc<PolySpace> {
        Arc::new(PolySpace::new(r, t, d).unwrap())
    }

    fn random_point(field: &Field, t: usize, rng: &mut StdRng) -> Vec<Fq> {
        use rand::Rng;
        (0..t).map(|_| Fq(rng.gen_range(0..field.q()) as u32)).collect()
    }

    #[test]
    fn basis_t1_d2_is_graded() {
        let b = MonomialBasis::new(1, 2).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.exp(0), &[0]);
        assert_eq!(b.exp(1), &[1]);
        assert_eq!(b.exp(2), &[2]);
    }

    #[test]
    fn basis_t2_d8_counts_and_order() {
        let b = MonomialBasis::new(2, 8).unwrap();
        // Stars and bars, checked against a plain double loop.
        let mut brute = 0;
        for e0 in 0..=8 {
            for e1 in 0..=8 {
                if e0 + e1 <= 8 {
                    brute += 1;
                }
            }
        }
        assert_eq!(b.len(), brute);
        assert_eq!(b.len(), 45);
        // Graded order, leading variable first within a degree.
        assert_eq!(b.exp(0), &[0, 0]);
        assert_eq!(b.exp(1), &[1, 0]);
        assert_eq!(b.exp(2), &[0, 1]);
        assert_eq!(b.exp(3), &[2, 0]);
        assert_eq!(b.exp(4), &[1, 1]);
        assert_eq!(b.exp(5), &[0, 2]);
    }

    #[test]
    fn basis_degree_zero_and_guard() {
        assert_eq!(MonomialBasis::new(2, 0).unwrap().len(), 1);
        assert!(matches!(
            MonomialBasis::new(2, 3000).unwrap_err(),
            SymPolyError::BasisTooLarge { .. }
        ));
        assert!(matches!(MonomialBasis::new(0, 3).unwrap_err(), SymPolyError::BadShape(_)));
    }

    #[test]
    fn orbit_counts_match_multiset_formula_and_burnside() {
        let b = MonomialBasis::new(2, 8).unwrap();
        assert_eq!(OrbitBasis::new(1, &b).unwrap().len(), 45);
        let o2 = OrbitBasis::new(2, &b).unwrap();
        // Burnside over the swap group: (45^2 + 45) / 2.
        assert_eq!(o2.len(), (45 * 45 + 45) / 2);
        assert_eq!(o2.len(), 1035);
    }

    #[test]
    fn orbit_reps_for_two_blocks_one_variable() {
        let b = MonomialBasis::new(1, 1).unwrap();
        let o = OrbitBasis::new(2, &b).unwrap();
        assert_eq!(o.len(), 3);
        assert_eq!(o.rep(0), &[0, 0]);
        assert_eq!(o.rep(1), &[0, 1]);
        assert_eq!(o.rep(2), &[1, 1]);
    }

    #[test]
    fn orbit_sizes_partition_the_tuple_space() {
        for (r, t, d) in [(2, 2, 8), (3, 1, 2), (4, 1, 1)] {
            let b = MonomialBasis::new(t, d).unwrap();
            let o = OrbitBasis::new(r, &b).unwrap();
            let total: u64 = (0..o.len()).map(|i| o.orbit_size(i)).sum();
            assert_eq!(total, (b.len() as u64).pow(r as u32));
        }
    }

    #[test]
    fn sampling_is_stream_deterministic() {
        let f = Field::new(5, 1).unwrap();
        let sp = space(2, 2, 3);
        let a = sample_symmetric(&f, &sp, &mut StdRng::seed_from_u64(42));
        let b = sample_symmetric(&f, &sp, &mut StdRng::seed_from_u64(42));
        let c = sample_symmetric(&f, &sp, &mut StdRng::seed_from_u64(43));
        assert_eq!(a.coeffs, b.coeffs);
        assert_ne!(a.coeffs, c.coeffs);
    }

    #[test]
    fn sampled_coefficients_are_uniform() {
        let f = Field::new(5, 1).unwrap();
        let sp = space(2, 1, 1);
        let mut rng = StdRng::seed_from_u64(9);
        let trials = 10_000;
        let mut freq = [0u32; 5];
        for _ in 0..trials {
            let p = sample_symmetric(&f, &sp, &mut rng);
            freq[p.coeffs[1].value() as usize] += 1;
        }
        // 5 sigma around trials/5 for a Bernoulli(1/5) count.
        let sigma = (trials as f64 * 0.2 * 0.8).sqrt();
        for &count in &freq {
            assert!((count as f64 - trials as f64 / 5.0).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn evaluate_zero_constant_and_product_orbit() {
        let f = Field::new(5, 1).unwrap();
        let sp = space(2, 1, 1);
        let pts: Vec<Vec<Fq>> = vec![vec![Fq(2)], vec![Fq(3)]];
        let refs: Vec<&[Fq]> = pts.iter().map(|p| p.as_slice()).collect();

        assert_eq!(SymmetricPolynomial::zero(&sp).evaluate(&f, &refs).unwrap(), Fq::ZERO);
        assert_eq!(
            SymmetricPolynomial::constant(&sp, Fq(4)).evaluate(&f, &refs).unwrap(),
            Fq(4)
        );
        // Coefficient 1 on the (x, x) orbit: value 2 * 3 = 6 = 1 mod 5.
        let mut prod = SymmetricPolynomial::zero(&sp);
        prod.coeffs[2] = Fq::ONE;
        assert_eq!(prod.evaluate(&f, &refs).unwrap(), Fq(1));
    }

    #[test]
    fn evaluation_row_at_zero_hits_only_the_constant_orbit() {
        let f = Field::new(7, 1).unwrap();
        let sp = space(2, 2, 3);
        let z = vec![Fq::ZERO, Fq::ZERO];
        let row = sp.evaluation_row(&f, &[&z, &z]).unwrap();
        assert_eq!(row[0], Fq(1));
        assert!(row[1..].iter().all(|&v| v.is_zero()));
    }

    #[test]
    fn evaluation_row_matches_symbolic_expansion() {
        // r=2, t=1, d=1: orbits (1,1), (1,x), (x,x) give (1, a+b, ab).
        let f = Field::new(7, 1).unwrap();
        let sp = space(2, 1, 1);
        for a in 0..7u32 {
            for b in 0..7u32 {
                let pa = vec![Fq(a)];
                let pb = vec![Fq(b)];
                let row = sp.evaluation_row(&f, &[&pa[..], &pb[..]]).unwrap();
                assert_eq!(row[0], Fq(1));
                assert_eq!(row[1], f.add(Fq(a), Fq(b)));
                assert_eq!(row[2], f.mul(Fq(a), Fq(b)));
            }
        }
    }

    #[test]
    fn row_dot_coefficients_equals_direct_evaluation() {
        let f = Field::new(5, 1).unwrap();
        let sp = space(2, 2, 3);
        let mut rng = StdRng::seed_from_u64(17);
        for _ in 0..100 {
            let poly = sample_symmetric(&f, &sp, &mut rng);
            let a = random_point(&f, 2, &mut rng);
            let b = random_point(&f, 2, &mut rng);
            let row = sp.evaluation_row(&f, &[&a, &b]).unwrap();
            let mut dot = Fq::ZERO;
            for (&c, &r) in poly.coeffs.iter().zip(&row) {
                dot = f.add(dot, f.mul(c, r));
            }
            assert_eq!(dot, poly.evaluate(&f, &[&a, &b]).unwrap());
        }
    }

    #[test]
    fn evaluation_is_block_symmetric() {
        let f = Field::new(2, 2).unwrap();
        let sp = space(3, 1, 2);
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..200 {
            let poly = sample_symmetric(&f, &sp, &mut rng);
            let pts: Vec<Vec<Fq>> = (0..3).map(|_| random_point(&f, 1, &mut rng)).collect();
            let mut order = [0usize, 1, 2];
            let base = poly
                .evaluate(&f, &[&pts[0], &pts[1], &pts[2]])
                .unwrap();
            loop {
                let perm: Vec<&[Fq]> = order.iter().map(|&i| pts[i].as_slice()).collect();
                assert_eq!(poly.evaluate(&f, &perm).unwrap(), base);
                if !next_permutation(&mut order) {
                    break;
                }
            }
        }
    }

    #[test]
    fn value_at_fixed_tuple_is_uniform_over_polynomials() {
        let f = Field::new(5, 1).unwrap();
        let sp = space(2, 2, 3);
        let mut rng = StdRng::seed_from_u64(31);
        let a = vec![Fq(1), Fq(2)];
        let b = vec![Fq(3), Fq(3)];
        let trials = 10_000;
        let mut freq = [0u32; 5];
        for _ in 0..trials {
            let poly = sample_symmetric(&f, &sp, &mut rng);
            freq[poly.evaluate(&f, &[&a, &b]).unwrap().value() as usize] += 1;
        }
        let sigma = (trials as f64 * 0.2 * 0.8).sqrt();
        for &count in &freq {
            assert!((count as f64 - trials as f64 / 5.0).abs() < 5.0 * sigma);
        }
    }

    #[test]
    fn evaluation_is_linear_in_coefficients() {
        let f = Field::new(7, 1).unwrap();
        let sp = space(2, 2, 2);
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..50 {
            let p1 = sample_symmetric(&f, &sp, &mut rng);
            let p2 = sample_symmetric(&f, &sp, &mut rng);
            let sum = SymmetricPolynomial {
                space: sp.clone(),
                coeffs: p1.coeffs.iter().zip(&p2.coeffs).map(|(&a, &b)| f.add(a, b)).collect(),
            };
            let a = random_point(&f, 2, &mut rng);
            let b = random_point(&f, 2, &mut rng);
            let lhs = sum.evaluate(&f, &[&a, &b]).unwrap();
            let rhs = f.add(
                p1.evaluate(&f, &[&a, &b]).unwrap(),
                p2.evaluate(&f, &[&a, &b]).unwrap(),
            );
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn cached_evaluation_matches_direct() {
        use rand::Rng;
        for (p, k, r, t, d) in [(5u64, 1u32, 2usize, 2usize, 3usize), (3, 1, 3, 1, 2), (2, 2, 3, 1, 2)] {
            let f = Field::new(p, k).unwrap();
            let sp = space(r, t, d);
            let mut rng = StdRng::seed_from_u64(41);
            let n = 30.min(f.vector_count(t).unwrap() as usize);
            let vertices: Vec<Vec<Fq>> =
                (0..n).map(|i| f.vector_at(i as u64, t)).collect();
            let polys: Vec<SymmetricPolynomial> =
                (0..2).map(|_| sample_symmetric(&f, &sp, &mut rng)).collect();
            let poly_refs: Vec<&SymmetricPolynomial> = polys.iter().collect();
            let cache = ContractionCache::build(&f, &sp, &poly_refs, &vertices).unwrap();
            for _ in 0..1000 {
                let ids: Vec<usize> = (0..r).map(|_| rng.gen_range(0..n)).collect();
                let pts: Vec<&[Fq]> = ids.iter().map(|&i| vertices[i].as_slice()).collect();
                let pi = rng.gen_range(0..polys.len());
                assert_eq!(
                    cache.eval_cached(&f, pi, &ids),
                    polys[pi].evaluate(&f, &pts).unwrap()
                );
            }
        }
    }

    #[test]
    fn tensor_cap_is_enforced_but_admits_the_working_sizes() {
        let f = Field::new(3, 1).unwrap();
        // Working size: three blocks of two variables, degree 16.
        let sp = space(3, 2, 16);
        assert_eq!(sp.basis.len(), 153);
        let poly = SymmetricPolynomial::zero(&sp);
        let vertices: Vec<Vec<Fq>> = (0..9).map(|i| f.vector_at(i, 2)).collect();
        assert!(ContractionCache::build(&f, &sp, &[&poly], &vertices).is_ok());

        // 43^5 entries is past the cap (guard fires before any allocation).
        let sp_big = space(5, 1, 42);
        assert_eq!(sp_big.basis.len(), 43);
        let poly_big = SymmetricPolynomial::zero(&sp_big);
        let vertices1: Vec<Vec<Fq>> = (0..3).map(|i| f.vector_at(i, 1)).collect();
        assert!(matches!(
            ContractionCache::build(&f, &sp_big, &[&poly_big], &vertices1).unwrap_err(),
            SymPolyError::TensorTooLarge { .. }
        ));
    }
}
