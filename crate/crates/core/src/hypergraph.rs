//! Layered r-uniform multi-hypergraphs and the HGR v1 text format.
//!
//! An edge is an unordered set of r distinct vertices; a multi-hypergraph
//! is a union of single layers, and a vertex set's multiplicity is the
//! number of layers carrying it. Partite graphs split the vertex range
//! into r equal contiguous parts and every edge takes exactly one vertex
//! per part. All stored edge tuples are ascending and edge lists are kept
//! sorted, so equal graphs have equal representations and serialization
//! is byte-deterministic.

use std::collections::BTreeMap;
use std::fmt;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
#[non_exhaustive]
pub enum HgError {
    /// Shape parameters out of range or inconsistent.
    BadShape(String),
    /// An edge violates the graph's invariants.
    BadEdge(String),
    /// Layers being unioned disagree on n, r, or partite structure.
    LayerMismatch(String),
    /// Text did not parse as HGR v1.
    Parse { line: usize, msg: String },
}

impl fmt::Display for HgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HgError::BadShape(msg) => write!(f, "bad shape: {msg}"),
            HgError::BadEdge(msg) => write!(f, "bad edge: {msg}"),
            HgError::LayerMismatch(msg) => write!(f, "layer mismatch: {msg}"),
            HgError::Parse { line, msg } => write!(f, "parse error at line {line}: {msg}"),
        }
    }
}

impl std::error::Error for HgError {}

// ---------------------------------------------------------------------------
// Validation shared by both graph kinds
// ---------------------------------------------------------------------------

fn check_shape(n: usize, r: usize, partite: usize) -> Result<(), HgError> {
    if r == 0 {
        return Err(HgError::BadShape("r must be at least 1".into()));
    }
    if partite != 0 && partite != r {
        return Err(HgError::BadShape(format!("partite must be 0 or r, got {partite}")));
    }
    if partite == r && n % r != 0 {
        return Err(HgError::BadShape(format!("{n} vertices cannot split into {r} equal parts")));
    }
    Ok(())
}

/// Sorts a tuple and checks membership invariants; returns the canonical
/// ascending form.
fn canonical_edge(mut verts: Vec<u32>, n: usize, r: usize, partite: usize) -> Result<Vec<u32>, HgError> {
    if verts.len() != r {
        return Err(HgError::BadEdge(format!("edge has {} vertices, expected {r}", verts.len())));
    }
    verts.sort_unstable();
    if verts.windows(2).any(|w| w[0] == w[1]) {
        return Err(HgError::BadEdge(format!("repeated vertex in edge {verts:?}")));
    }
    if let Some(&max) = verts.last() {
        if max as usize >= n {
            return Err(HgError::BadEdge(format!("vertex {max} out of range 0..{n}")));
        }
    }
    if partite == r {
        let part = n / r;
        for (i, &v) in verts.iter().enumerate() {
            if (v as usize) / part != i {
                return Err(HgError::BadEdge(format!(
                    "edge {verts:?} does not take one vertex per part"
                )));
            }
        }
    }
    Ok(verts)
}

// ---------------------------------------------------------------------------
// Simple hypergraphs
// ---------------------------------------------------------------------------

/// One layer: an r-uniform hypergraph without multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleHypergraph {
    n: usize,
    r: usize,
    partite: usize,
    /// Ascending tuples, sorted and deduplicated.
    edges: Vec<Vec<u32>>,
}

impl SimpleHypergraph {
    pub fn new(
        n: usize,
        r: usize,
        partite: usize,
        edges: Vec<Vec<u32>>,
    ) -> Result<SimpleHypergraph, HgError> {
        check_shape(n, r, partite)?;
        let mut canon = edges
            .into_iter()
            .map(|e| canonical_edge(e, n, r, partite))
            .collect::<Result<Vec<_>, _>>()?;
        canon.sort_unstable();
        canon.dedup();
        Ok(SimpleHypergraph { n, r, partite, edges: canon })
    }

    pub fn empty(n: usize, r: usize, partite: usize) -> Result<SimpleHypergraph, HgError> {
        SimpleHypergraph::new(n, r, partite, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn partite(&self) -> usize {
        self.partite
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, set: &[u32]) -> bool {
        let mut key = set.to_vec();
        key.sort_unstable();
        self.edges.binary_search_by(|e| e.as_slice().cmp(key.as_slice())).is_ok()
    }

    /// View as a one-layer multi-hypergraph.
    pub fn to_multi(&self) -> MultiHypergraph {
        MultiHypergraph {
            n: self.n,
            r: self.r,
            layers: 1,
            partite: self.partite,
            edges: self.edges.iter().map(|e| (0, e.clone())).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// Multi-hypergraphs
// ---------------------------------------------------------------------------

/// A union of layers; an edge is a (layer, vertex set) pair and a set's
/// multiplicity is the number of layers carrying it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiHypergraph {
    n: usize,
    r: usize,
    layers: usize,
    partite: usize,
    /// (layer, ascending tuple), sorted and deduplicated.
    edges: Vec<(u32, Vec<u32>)>,
}

/// Result of a vertex-deletion pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeletionOutcome {
    pub graph: SimpleHypergraph,
    /// Deleted vertices, original ids, ascending.
    pub removed: Vec<u32>,
    /// Original id of each new vertex: `old_of_new[new] = old`.
    pub old_of_new: Vec<u32>,
    /// Distinct vertex sets discarded for multiplicity >= 2.
    pub multi_sets_dropped: usize,
}

impl MultiHypergraph {
    /// Unions layers into a multi-hypergraph; layer index is list position.
    pub fn union(layers: &[SimpleHypergraph]) -> Result<MultiHypergraph, HgError> {
        let Some(first) = layers.first() else {
            return Err(HgError::LayerMismatch("cannot union zero layers".into()));
        };
        for (i, layer) in layers.iter().enumerate() {
            if layer.n != first.n || layer.r != first.r || layer.partite != first.partite {
                return Err(HgError::LayerMismatch(format!(
                    "layer {i} has shape (n={}, r={}, partite={}), expected (n={}, r={}, partite={})",
                    layer.n, layer.r, layer.partite, first.n, first.r, first.partite
                )));
            }
        }
        let mut edges = Vec::with_capacity(layers.iter().map(|l| l.edges.len()).sum());
        for (i, layer) in layers.iter().enumerate() {
            for e in &layer.edges {
                edges.push((i as u32, e.clone()));
            }
        }
        edges.sort_unstable();
        Ok(MultiHypergraph { n: first.n, r: first.r, layers: layers.len(), partite: first.partite, edges })
    }

    /// Direct construction, used by the parser.
    pub fn new(
        n: usize,
        r: usize,
        layers: usize,
        partite: usize,
        edges: Vec<(u32, Vec<u32>)>,
    ) -> Result<MultiHypergraph, HgError> {
        check_shape(n, r, partite)?;
        let mut canon = Vec::with_capacity(edges.len());
        for (layer, verts) in edges {
            if layer as usize >= layers {
                return Err(HgError::BadEdge(format!("layer {layer} out of range 0..{layers}")));
            }
            canon.push((layer, canonical_edge(verts, n, r, partite)?));
        }
        canon.sort_unstable();
        let before = canon.len();
        canon.dedup();
        if canon.len() != before {
            return Err(HgError::BadEdge("duplicate (layer, vertex set) pair".into()));
        }
        Ok(MultiHypergraph { n, r, layers, partite, edges: canon })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn partite(&self) -> usize {
        self.partite
    }

    pub fn edges(&self) -> &[(u32, Vec<u32>)] {
        &self.edges
    }

    /// Total edges counted with multiplicity.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Multiplicity of every distinct vertex set, ordered.
    pub fn multiplicity_map(&self) -> BTreeMap<Vec<u32>, u32> {
        let mut map = BTreeMap::new();
        for (_, e) in &self.edges {
            *map.entry(e.clone()).or_insert(0) += 1;
        }
        map
    }

    /// Distinct vertex sets with multiplicity >= 2, ascending with counts.
    pub fn multi_edges(&self) -> Vec<(Vec<u32>, u32)> {
        self.multiplicity_map().into_iter().filter(|&(_, m)| m >= 2).collect()
    }

    /// Removes vertices (and optionally all multiplicity >= 2 sets), then
    /// compacts ids. Surviving vertices keep their relative order. The
    /// output stays partite only if every part lost equally many vertices.
    pub fn delete(&self, vertices: &[u32], drop_multi: bool) -> DeletionOutcome {
        let mut removed: Vec<u32> = vertices
            .iter()
            .copied()
            .filter(|&v| (v as usize) < self.n)
            .collect();
        removed.sort_unstable();
        removed.dedup();

        let mut gone = vec![false; self.n];
        for &v in &removed {
            gone[v as usize] = true;
        }
        let mut new_id = vec![u32::MAX; self.n];
        let mut old_of_new = Vec::with_capacity(self.n - removed.len());
        for old in 0..self.n {
            if !gone[old] {
                new_id[old] = old_of_new.len() as u32;
                old_of_new.push(old as u32);
            }
        }

        let mult = self.multiplicity_map();
        let mut multi_sets_dropped = 0;
        let mut kept: Vec<Vec<u32>> = Vec::new();
        let mut seen_multi: std::collections::BTreeSet<&[u32]> = Default::default();
        for (_, e) in &self.edges {
            if drop_multi && mult[e] >= 2 {
                if seen_multi.insert(e.as_slice()) {
                    multi_sets_dropped += 1;
                }
                continue;
            }
            if e.iter().any(|&v| gone[v as usize]) {
                continue;
            }
            kept.push(e.iter().map(|&v| new_id[v as usize]).collect());
        }
        kept.sort_unstable();
        kept.dedup();

        let partite = if self.partite == self.r && self.partite > 0 {
            let part = self.n / self.r;
            let mut losses = vec![0usize; self.r];
            for &v in &removed {
                losses[v as usize / part] += 1;
            }
            if losses.iter().all(|&l| l == losses[0]) { self.r } else { 0 }
        } else {
            0
        };

        let graph = SimpleHypergraph {
            n: self.n - removed.len(),
            r: self.r,
            partite,
            edges: kept,
        };
        DeletionOutcome { graph, removed, old_of_new, multi_sets_dropped }
    }

    // -- HGR v1 ---------------------------------------------------------------

    /// Canonical HGR v1 text: two header lines, then one line per edge,
    /// lines sorted lexicographically as strings, LF endings, no trailing
    /// whitespace. Equal graphs serialize to identical bytes.
    pub fn serialize(&self) -> String {
        let mut lines: Vec<String> = self
            .edges
            .iter()
            .map(|(layer, e)| {
                let verts: Vec<String> = e.iter().map(|v| v.to_string()).collect();
                format!("e {layer} {}", verts.join(" "))
            })
            .collect();
        lines.sort_unstable();
        let mut out = format!(
            "HGR v1\nn={} r={} layers={} partite={}\n",
            self.n, self.r, self.layers, self.partite
        );
        for line in lines {
            out.push_str(&line);
            out.push('\n');
        }
        out
    }

    /// Parses HGR v1 text. Inverse of [`MultiHypergraph::serialize`] on
    /// graph values; edge line order is not significant on input.
    pub fn parse(text: &str) -> Result<MultiHypergraph, HgError> {
        let mut lines = text.split('\n').enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| HgError::Parse { line: 1, msg: "empty input".into() })?;
        if header != "HGR v1" {
            return Err(HgError::Parse { line: 1, msg: format!("expected 'HGR v1', got {header:?}") });
        }
        let (_, shape) = lines
            .next()
            .ok_or_else(|| HgError::Parse { line: 2, msg: "missing shape line".into() })?;
        let fields: Vec<&str> = shape.split(' ').collect();
        let keys = ["n", "r", "layers", "partite"];
        if fields.len() != 4 {
            return Err(HgError::Parse { line: 2, msg: "expected 'n=.. r=.. layers=.. partite=..'".into() });
        }
        let mut vals = [0usize; 4];
        for (i, (field, key)) in fields.iter().zip(keys).enumerate() {
            let rest = field
                .strip_prefix(key)
                .and_then(|s| s.strip_prefix('='))
                .ok_or_else(|| HgError::Parse { line: 2, msg: format!("expected {key}=<int>, got {field:?}") })?;
            vals[i] = rest
                .parse()
                .map_err(|_| HgError::Parse { line: 2, msg: format!("bad integer in {field:?}") })?;
        }
        let [n, r, layers, partite] = vals;

        let mut edges = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            let mut tokens = line.split(' ');
            if tokens.next() != Some("e") {
                return Err(HgError::Parse { line: lineno, msg: format!("expected edge line, got {line:?}") });
            }
            let nums: Vec<u32> = tokens
                .map(|t| t.parse::<u32>())
                .collect::<Result<_, _>>()
                .map_err(|_| HgError::Parse { line: lineno, msg: format!("bad integer in {line:?}") })?;
            if nums.len() != r + 1 {
                return Err(HgError::Parse {
                    line: lineno,
                    msg: format!("edge line has {} vertices, expected {r}", nums.len().saturating_sub(1)),
                });
            }
            if !nums[1..].windows(2).all(|w| w[0] < w[1]) {
                return Err(HgError::Parse { line: lineno, msg: "vertices must be strictly ascending".into() });
            }
            edges.push((nums[0], nums[1..].to_vec()));
        }
        MultiHypergraph::new(n, r, layers, partite, edges).map_err(|e| HgError::Parse {
            line: 0,
            msg: e.to_string(),
        })
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn layer(n: usize, r: usize, edges: &[&[u32]]) -> SimpleHypergraph {
        SimpleHypergraph::new(n, r, 0, edges.iter().map(|e| e.to_vec()).collect()).unwrap()
    }

    #[test]
    fn union_counts_multiplicities() {
        let l0 = layer(4, 2, &[&[0, 1], &[1, 2]]);
        let l1 = layer(4, 2, &[&[1, 0]]);
        let g = MultiHypergraph::union(&[l0, l1]).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.layers(), 2);
        assert_eq!(g.multiplicity_map()[&vec![0, 1]], 2);
        assert_eq!(g.multi_edges(), vec![(vec![0, 1], 2)]);
    }

    #[test]
    fn union_rejects_mismatched_layers() {
        let l0 = layer(4, 2, &[]);
        let l1 = layer(5, 2, &[]);
        assert!(matches!(
            MultiHypergraph::union(&[l0, l1]).unwrap_err(),
            HgError::LayerMismatch(_)
        ));
        assert!(MultiHypergraph::union(&[]).is_err());
    }

    #[test]
    fn single_layer_has_no_multi_edges() {
        let g = layer(5, 3, &[&[0, 1, 2], &[1, 2, 3]]).to_multi();
        assert!(g.multi_edges().is_empty());
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn edge_validation() {
        assert!(matches!(
            SimpleHypergraph::new(4, 2, 0, vec![vec![1, 1]]).unwrap_err(),
            HgError::BadEdge(_)
        ));
        assert!(matches!(
            SimpleHypergraph::new(4, 2, 0, vec![vec![1, 4]]).unwrap_err(),
            HgError::BadEdge(_)
        ));
        assert!(matches!(
            SimpleHypergraph::new(4, 2, 0, vec![vec![1]]).unwrap_err(),
            HgError::BadEdge(_)
        ));
        // Partite: one vertex per part.
        assert!(SimpleHypergraph::new(6, 3, 3, vec![vec![0, 2, 4]]).is_ok());
        assert!(matches!(
            SimpleHypergraph::new(6, 3, 3, vec![vec![0, 1, 4]]).unwrap_err(),
            HgError::BadEdge(_)
        ));
    }

    #[test]
    fn delete_removes_incident_edges_and_relabels() {
        let g = layer(5, 2, &[&[0, 1], &[1, 2], &[2, 3], &[3, 4]]).to_multi();
        let out = g.delete(&[1], false);
        assert_eq!(out.removed, vec![1]);
        assert_eq!(out.old_of_new, vec![0, 2, 3, 4]);
        assert_eq!(out.graph.n(), 4);
        // Surviving edges {2,3} and {3,4} relabel to {1,2} and {2,3}.
        assert_eq!(out.graph.edges(), &[vec![1, 2], vec![2, 3]]);
    }

    #[test]
    fn delete_can_drop_multi_edges() {
        let l0 = layer(4, 2, &[&[0, 1], &[2, 3]]);
        let l1 = layer(4, 2, &[&[0, 1]]);
        let g = MultiHypergraph::union(&[l0, l1]).unwrap();
        let kept = g.delete(&[], false);
        assert_eq!(kept.graph.edge_count(), 2);
        assert_eq!(kept.multi_sets_dropped, 0);
        let dropped = g.delete(&[], true);
        assert_eq!(dropped.graph.edges(), &[vec![2, 3]]);
        assert_eq!(dropped.multi_sets_dropped, 1);
    }

    #[test]
    fn delete_preserves_partite_only_when_balanced() {
        let g = SimpleHypergraph::new(6, 2, 2, vec![vec![0, 3], vec![1, 4], vec![2, 5]])
            .unwrap()
            .to_multi();
        let balanced = g.delete(&[0, 3], false);
        assert_eq!(balanced.graph.partite(), 2);
        assert_eq!(balanced.graph.edges(), &[vec![0, 2], vec![1, 3]]);
        let ragged = g.delete(&[0], false);
        assert_eq!(ragged.graph.partite(), 0);
    }

    #[test]
    fn serialize_empty_graph_is_two_lines() {
        let g = SimpleHypergraph::empty(4, 3, 0).unwrap().to_multi();
        assert_eq!(g.serialize(), "HGR v1\nn=4 r=3 layers=1 partite=0\n");
    }

    #[test]
    fn serialize_sorts_lines_as_strings() {
        let g = layer(12, 2, &[&[0, 2], &[0, 10]]).to_multi();
        let text = g.serialize();
        let lines: Vec<&str> = text.lines().collect();
        // "e 0 0 10" precedes "e 0 0 2" in byte order.
        assert_eq!(lines[2], "e 0 0 10");
        assert_eq!(lines[3], "e 0 0 2");
    }

    #[test]
    fn parse_round_trips_and_validates() {
        let l0 = layer(5, 2, &[&[0, 1], &[3, 4]]);
        let l1 = layer(5, 2, &[&[0, 1]]);
        let g = MultiHypergraph::union(&[l0, l1]).unwrap();
        let text = g.serialize();
        let back = MultiHypergraph::parse(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.serialize(), text);

        assert!(MultiHypergraph::parse("HGR v2\nn=1 r=1 layers=1 partite=0\n").is_err());
        assert!(MultiHypergraph::parse("HGR v1\nn=4 r=2 layers=1\n").is_err());
        let bad_vertex = "HGR v1\nn=4 r=2 layers=1 partite=0\ne 0 1 9\n";
        assert!(MultiHypergraph::parse(bad_vertex).is_err());
        let bad_layer = "HGR v1\nn=4 r=2 layers=1 partite=0\ne 3 1 2\n";
        assert!(MultiHypergraph::parse(bad_layer).is_err());
        let dup = "HGR v1\nn=4 r=2 layers=1 partite=0\ne 0 1 2\ne 0 1 2\n";
        assert!(MultiHypergraph::parse(dup).is_err());
        let unsorted = "HGR v1\nn=4 r=2 layers=1 partite=0\ne 0 2 1\n";
        assert!(MultiHypergraph::parse(unsorted).is_err());
    }

    proptest! {
        #[test]
        fn serialization_round_trips(
            n in 1usize..12,
            r in 1usize..4,
            layer_count in 1usize..4,
            seed in 0u64..1000,
        ) {
            prop_assume!(r <= n);
            use rand::{Rng, SeedableRng};
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let mut layers = Vec::new();
            for _ in 0..layer_count {
                let mut edges = Vec::new();
                for _ in 0..rng.gen_range(0..6) {
                    let mut verts: Vec<u32> = (0..n as u32).collect();
                    for i in 0..r {
                        let j = rng.gen_range(i..n);
                        verts.swap(i, j);
                    }
                    edges.push(verts[..r].to_vec());
                }
                layers.push(SimpleHypergraph::new(n, r, 0, edges).unwrap());
            }
            let g = MultiHypergraph::union(&layers).unwrap();
            let text = g.serialize();
            let back = MultiHypergraph::parse(&text).unwrap();
            prop_assert_eq!(&back, &g);
            prop_assert_eq!(back.serialize(), text);
        }
    }
}
