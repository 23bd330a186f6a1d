//! Finite field arithmetic for GF(p^k), q = p^k <= 2^16.
//!
//! Elements are stored in a canonical integer encoding: the element with
//! polynomial coefficients c_0..c_{k-1} over GF(p) is the integer
//! sum c_i * p^i. Extension fields carry an explicit monic irreducible
//! modulus; the default modulus for a given (p, k) is the irreducible
//! polynomial with the smallest canonical encoding, so two runs agree on
//! the field without consulting external tables.

use std::fmt;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 16;

/// Cap on q^dim for full vector-space enumeration.
pub const MAX_VECTORS: u64 = 1 << 24;

/// Field orders at or below this get dense add/mul lookup tables.
const TABLE_LIMIT: u64 = 256;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum GfError {
    /// The characteristic passed to a constructor is not prime.
    NotPrime(u64),
    /// p^k exceeds `MAX_ORDER` (or k = 0).
    OrderTooLarge { p: u64, k: u32 },
    /// Modulus is not a monic degree-k polynomial with coefficients in GF(p).
    InvalidModulus,
    /// Modulus factors over GF(p).
    Reducible,
    /// Multiplicative inverse of zero.
    DivisionByZero,
    /// An encoding outside [0, q) was presented as an element of this field.
    FieldMismatch { value: u64, q: u64 },
    /// q^dim exceeds `MAX_VECTORS`.
    TooManyVectors { q: u64, dim: usize },
}

impl fmt::Display for GfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GfError::NotPrime(p) => write!(f, "{p} is not prime"),
            GfError::OrderTooLarge { p, k } => {
                write!(f, "field order {p}^{k} out of range (need k >= 1 and p^k <= {MAX_ORDER})")
            }
            GfError::InvalidModulus => {
                write!(f, "modulus must be monic of degree k with coefficients in [0, p)")
            }
            GfError::Reducible => write!(f, "modulus is reducible over GF(p)"),
            GfError::DivisionByZero => write!(f, "division by zero"),
            GfError::FieldMismatch { value, q } => {
                write!(f, "encoding {value} is not an element of a field of order {q}")
            }
            GfError::TooManyVectors { q, dim } => {
                write!(f, "{q}^{dim} vectors exceed the enumeration cap {MAX_VECTORS}")
            }
        }
    }
}

impl std::error::Error for GfError {}

// ---------------------------------------------------------------------------
// Elements
// ---------------------------------------------------------------------------

/// A field element in canonical integer encoding, 0 <= value < q.
///
/// `Fq` does not remember its field; operations live on [`Field`], which
/// validates encodings at construction boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fq(pub(crate) u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

// ---------------------------------------------------------------------------
// Field
// ---------------------------------------------------------------------------

enum Kernel {
    /// k = 1: plain modular arithmetic, inner loops defer the reduction.
    Prime,
    /// k >= 2 and q <= 256: dense q*q lookup tables.
    Tables { add: Vec<u32>, mul: Vec<u32> },
    /// k >= 2 and q > 256: digit-array polynomial arithmetic per operation.
    Generic,
}

/// GF(p^k) with a fixed modulus. All element operations go through this.
pub struct Field {
    p: u64,
    k: u32,
    q: u64,
    /// Monic irreducible of degree k, little-endian, length k+1. Empty for k = 1.
    modulus: Vec<u64>,
    kernel: Kernel,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl Field {
    /// GF(p^k) with the default modulus: the monic irreducible of degree k
    /// whose canonical encoding is smallest.
    pub fn new(p: u64, k: u32) -> Result<Field, GfError> {
        let q = checked_order(p, k)?;
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if k == 1 {
            return Ok(Field::assemble(p, k, q, Vec::new()));
        }
        let mut coeffs = vec![0u64; k as usize + 1];
        coeffs[k as usize] = 1;
        for enc in 0..p.pow(k) {
            let mut rest = enc;
            for c in coeffs.iter_mut().take(k as usize) {
                *c = rest % p;
                rest /= p;
            }
            if is_irreducible(&coeffs, p) {
                return Ok(Field::assemble(p, k, q, coeffs));
            }
        }
        unreachable!("an irreducible polynomial of every degree exists over GF(p)")
    }

    /// GF(p^k) with an explicit modulus, little-endian coefficients of
    /// length k+1, monic, irreducible over GF(p).
    pub fn with_modulus(p: u64, k: u32, modulus: &[u64]) -> Result<Field, GfError> {
        let q = checked_order(p, k)?;
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        if k == 1 {
            return Ok(Field::assemble(p, k, q, Vec::new()));
        }
        if modulus.len() != k as usize + 1
            || modulus[k as usize] != 1
            || modulus.iter().any(|&c| c >= p)
        {
            return Err(GfError::InvalidModulus);
        }
        if !is_irreducible(modulus, p) {
            return Err(GfError::Reducible);
        }
        Ok(Field::assemble(p, k, q, modulus.to_vec()))
    }

    fn assemble(p: u64, k: u32, q: u64, modulus: Vec<u64>) -> Field {
        let mut field = Field { p, k, q, modulus, kernel: Kernel::Prime };
        if k >= 2 {
            field.kernel = Kernel::Generic;
            if q <= TABLE_LIMIT {
                let n = q as usize;
                let mut add = vec![0u32; n * n];
                let mut mul = vec![0u32; n * n];
                for a in 0..n {
                    for b in 0..n {
                        add[a * n + b] = field.add_raw(a as u32, b as u32);
                        mul[a * n + b] = field.mul_raw(a as u32, b as u32);
                    }
                }
                field.kernel = Kernel::Tables { add, mul };
            }
        }
        field
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Modulus coefficients (little-endian, length k+1); `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u64]> {
        if self.k == 1 {
            None
        } else {
            Some(&self.modulus)
        }
    }

    /// Validates an encoding and wraps it.
    pub fn element(&self, value: u64) -> Result<Fq, GfError> {
        if value < self.q {
            Ok(Fq(value as u32))
        } else {
            Err(GfError::FieldMismatch { value, q: self.q })
        }
    }

    /// All q elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.q).map(|v| Fq(v as u32))
    }

    // -- arithmetic ---------------------------------------------------------

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        debug_assert!(self.contains(a) && self.contains(b));
        Fq(match &self.kernel {
            Kernel::Prime => {
                let s = a.0 as u64 + b.0 as u64;
                (if s >= self.q { s - self.q } else { s }) as u32
            }
            Kernel::Tables { add, .. } => add[a.0 as usize * self.q as usize + b.0 as usize],
            Kernel::Generic => self.add_raw(a.0, b.0),
        })
    }

    pub fn neg(&self, a: Fq) -> Fq {
        debug_assert!(self.contains(a));
        match &self.kernel {
            Kernel::Prime => Fq(if a.0 == 0 { 0 } else { (self.q - a.0 as u64) as u32 }),
            _ => {
                let mut digits = self.decode(a.0);
                for d in digits.iter_mut() {
                    *d = (self.p - *d) % self.p;
                }
                Fq(self.encode(&digits))
            }
        }
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        debug_assert!(self.contains(a) && self.contains(b));
        Fq(match &self.kernel {
            Kernel::Prime => ((a.0 as u64 * b.0 as u64) % self.q) as u32,
            Kernel::Tables { mul, .. } => mul[a.0 as usize * self.q as usize + b.0 as usize],
            Kernel::Generic => self.mul_raw(a.0, b.0),
        })
    }

    pub fn pow(&self, a: Fq, mut e: u64) -> Fq {
        let mut base = a;
        let mut acc = Fq::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via a^(q-2); the unit group has order q-1.
    pub fn inv(&self, a: Fq) -> Result<Fq, GfError> {
        if a.is_zero() {
            return Err(GfError::DivisionByZero);
        }
        Ok(self.pow(a, self.q - 2))
    }

    fn contains(&self, a: Fq) -> bool {
        (a.0 as u64) < self.q
    }

    // -- raw (encoding-level) extension arithmetic --------------------------

    fn decode(&self, enc: u32) -> Vec<u64> {
        let mut rest = enc as u64;
        let mut digits = vec![0u64; self.k as usize];
        for d in digits.iter_mut() {
            *d = rest % self.p;
            rest /= self.p;
        }
        digits
    }

    fn encode(&self, digits: &[u64]) -> u32 {
        let mut enc = 0u64;
        for &d in digits.iter().rev() {
            enc = enc * self.p + d;
        }
        enc as u32
    }

    fn add_raw(&self, a: u32, b: u32) -> u32 {
        let da = self.decode(a);
        let db = self.decode(b);
        let sum: Vec<u64> = da.iter().zip(&db).map(|(x, y)| (x + y) % self.p).collect();
        self.encode(&sum)
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        let da = self.decode(a);
        let db = self.decode(b);
        let k = self.k as usize;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        // Reduce by the monic modulus from the top coefficient down.
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for (j, &m) in self.modulus.iter().enumerate().take(k) {
                let idx = i - k + j;
                prod[idx] = (prod[idx] + self.p * self.p - (c * m) % (self.p * self.p)) % self.p;
            }
        }
        self.encode(&prod[..k])
    }

    // -- bulk kernels for evaluation inner loops -----------------------------

    /// out[j] = sum_i weights[i] * tensor[i * out.len() + j], in the field.
    /// `acc` is caller-held scratch, resized as needed.
    pub(crate) fn contract_into(
        &self,
        tensor: &[u32],
        weights: &[u32],
        out: &mut [u32],
        acc: &mut Vec<u64>,
    ) {
        let stride = out.len();
        debug_assert_eq!(tensor.len(), weights.len() * stride);
        match &self.kernel {
            Kernel::Prime => {
                acc.clear();
                acc.resize(stride, 0);
                for (i, &w) in weights.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    let w = w as u64;
                    let row = &tensor[i * stride..(i + 1) * stride];
                    for (a, &t) in acc.iter_mut().zip(row) {
                        *a += w * t as u64;
                    }
                }
                for (o, &a) in out.iter_mut().zip(acc.iter()) {
                    *o = (a % self.q) as u32;
                }
            }
            Kernel::Tables { add, mul } => {
                let n = self.q as usize;
                out.fill(0);
                for (i, &w) in weights.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    let mrow = &mul[w as usize * n..(w as usize + 1) * n];
                    let row = &tensor[i * stride..(i + 1) * stride];
                    for (o, &t) in out.iter_mut().zip(row) {
                        *o = add[*o as usize * n + mrow[t as usize] as usize];
                    }
                }
            }
            Kernel::Generic => {
                out.fill(0);
                for (i, &w) in weights.iter().enumerate() {
                    if w == 0 {
                        continue;
                    }
                    let row = &tensor[i * stride..(i + 1) * stride];
                    for (o, &t) in out.iter_mut().zip(row) {
                        *o = self.add(Fq(*o), self.mul(Fq(w), Fq(t))).0;
                    }
                }
            }
        }
    }

    /// sum_i a[i] * b[i], in the field.
    pub(crate) fn dot_reduce(&self, a: &[u32], b: &[u32]) -> u32 {
        debug_assert_eq!(a.len(), b.len());
        match &self.kernel {
            Kernel::Prime => {
                let mut acc = 0u64;
                for (&x, &y) in a.iter().zip(b) {
                    acc += x as u64 * y as u64;
                }
                (acc % self.q) as u32
            }
            Kernel::Tables { add, mul } => {
                let n = self.q as usize;
                let mut acc = 0u32;
                for (&x, &y) in a.iter().zip(b) {
                    acc = add[acc as usize * n + mul[x as usize * n + y as usize] as usize];
                }
                acc
            }
            Kernel::Generic => {
                let mut acc = Fq::ZERO;
                for (&x, &y) in a.iter().zip(b) {
                    acc = self.add(acc, self.mul(Fq(x), Fq(y)));
                }
                acc.0
            }
        }
    }

    // -- linear algebra ------------------------------------------------------

    /// Rank of a matrix over this field, by Gaussian elimination.
    pub fn rank(&self, m: &FqMatrix) -> Result<usize, GfError> {
        for &e in &m.data {
            if !self.contains(e) {
                return Err(GfError::FieldMismatch { value: e.0 as u64, q: self.q });
            }
        }
        let mut data = m.data.clone();
        let (rows, cols) = (m.rows, m.cols);
        let at = |d: &Vec<Fq>, i: usize, j: usize| d[i * cols + j];
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(pivot) = (rank..rows).find(|&i| !at(&data, i, col).is_zero()) else {
                continue;
            };
            for j in 0..cols {
                data.swap(rank * cols + j, pivot * cols + j);
            }
            let inv = self.inv(at(&data, rank, col)).expect("pivot is nonzero");
            for i in rank + 1..rows {
                let factor = self.mul(at(&data, i, col), inv);
                if factor.is_zero() {
                    continue;
                }
                for j in col..cols {
                    let delta = self.mul(factor, at(&data, rank, j));
                    data[i * cols + j] = self.sub(at(&data, i, j), delta);
                }
            }
            rank += 1;
        }
        Ok(rank)
    }

    // -- vector spaces -------------------------------------------------------

    /// Number of vectors in F_q^dim, guarded by `MAX_VECTORS`.
    pub fn vector_count(&self, dim: usize) -> Result<u64, GfError> {
        let mut n = 1u64;
        for _ in 0..dim {
            n = n.saturating_mul(self.q);
            if n > MAX_VECTORS {
                return Err(GfError::TooManyVectors { q: self.q, dim });
            }
        }
        Ok(n)
    }

    /// Vector at enumeration index: coordinate j is the field element encoded
    /// by the j-th base-q digit of `index` (little-endian).
    pub fn vector_at(&self, mut index: u64, dim: usize) -> Vec<Fq> {
        let mut v = Vec::with_capacity(dim);
        for _ in 0..dim {
            v.push(Fq((index % self.q) as u32));
            index /= self.q;
        }
        v
    }

    /// Inverse of [`Field::vector_at`].
    pub fn vector_index(&self, v: &[Fq]) -> u64 {
        let mut idx = 0u64;
        for &c in v.iter().rev() {
            idx = idx * self.q + c.0 as u64;
        }
        idx
    }

    /// All vectors of F_q^dim in index order.
    pub fn enumerate_vectors(&self, dim: usize) -> Result<Vec<Vec<Fq>>, GfError> {
        let n = self.vector_count(dim)?;
        Ok((0..n).map(|i| self.vector_at(i, dim)).collect())
    }
}

// ---------------------------------------------------------------------------
// Matrices
// ---------------------------------------------------------------------------

/// Row-major matrix of field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Fq>,
}

impl FqMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Fq>) -> FqMatrix {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        FqMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Fq>>) -> FqMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix rows");
        FqMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> Fq {
        self.data[i * self.cols + j]
    }

    pub fn swap_rows(&mut self, i: usize, j: usize) {
        for col in 0..self.cols {
            self.data.swap(i * self.cols + col, j * self.cols + col);
        }
    }
}

// ---------------------------------------------------------------------------
// Primality and irreducibility
// ---------------------------------------------------------------------------

fn checked_order(p: u64, k: u32) -> Result<u64, GfError> {
    if k == 0 || p < 2 {
        return Err(GfError::OrderTooLarge { p, k });
    }
    let mut q = 1u64;
    for _ in 0..k {
        q = q.saturating_mul(p);
        if q > MAX_ORDER {
            return Err(GfError::OrderTooLarge { p, k });
        }
    }
    Ok(q)
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Irreducibility over GF(p) by trial division: a monic polynomial of degree
/// k is reducible iff it has a monic divisor of degree in [1, k/2].
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let k = poly.len() - 1;
    let mut divisor = Vec::new();
    for dd in 1..=k / 2 {
        divisor.resize(dd + 1, 0);
        divisor[dd] = 1;
        for enc in 0..p.pow(dd as u32) {
            let mut rest = enc;
            for c in divisor.iter_mut().take(dd) {
                *c = rest % p;
                rest /= p;
            }
            if divides(&divisor, poly, p) {
                return false;
            }
        }
    }
    true
}

/// Whether monic `divisor` divides `poly`, coefficients over GF(p).
fn divides(divisor: &[u64], poly: &[u64], p: u64) -> bool {
    let dd = divisor.len() - 1;
    let mut rem = poly.to_vec();
    for i in (dd..rem.len()).rev() {
        let c = rem[i];
        if c == 0 {
            continue;
        }
        rem[i] = 0;
        for (j, &m) in divisor.iter().enumerate().take(dd) {
            let idx = i - dd + j;
            rem[idx] = (rem[idx] + p * p - (c * m) % (p * p)) % p;
        }
    }
    rem[..dd].iter().all(|&c| c == 0)
}

// ---------------------------------------------------------------------------
