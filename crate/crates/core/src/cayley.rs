//! Cayley networks over Z_2^d with the dressed generating sets S^l_d.

use std::collections::VecDeque;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bits::{BitVector, MAX_DIM};
use crate::error::{check_range, Error, Result};

/// Dense integer adjacency matrix. Only materialized on request.
pub type Adjacency = DMatrix<i64>;

/// Generating set S^l_d = H^1_d ∪ H^2_d.
///
/// H^1_d holds the d unit vectors; H^2_d holds every nonzero vector supported
/// on the first `l` coordinates. The union overlaps in the `l` unit vectors of
/// the prefix, which gives `2^l + d - l - 1` elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratingSet {
    d: usize,
    l: usize,
    elements: Vec<BitVector>,
}

/// Size of S^l_d.
pub fn generating_set_size(d: usize, l: usize) -> usize {
    (1usize << l) + d - l - 1
}

/// Builds S^l_d. Elements are ordered unit vectors first, then the extra
/// prefix vectors by increasing prefix value.
pub fn build_generating_set(d: usize, l: usize) -> Result<GeneratingSet> {
    check_range("d", d, 1, MAX_DIM)?;
    check_range("l", l, 1, d)?;
    let mut elements: Vec<BitVector> = (1..=d)
        .map(|i| BitVector::from_coords(&[i], d))
        .collect::<Result<_>>()?;
    for prefix in 1usize..(1 << l) {
        if prefix.count_ones() >= 2 {
            elements.push(BitVector::new(prefix << (d - l), d)?);
        }
    }
    debug_assert_eq!(elements.len(), generating_set_size(d, l));
    Ok(GeneratingSet { d, l, elements })
}

impl GeneratingSet {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> usize {
        self.l
    }

    pub fn elements(&self) -> &[BitVector] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, v: BitVector) -> bool {
        self.elements.contains(&v)
    }
}

/// Generators read as Kronecker-factor masks: a 1 in slot `i` puts the swap
/// matrix C in factor `i`, a 0 puts the 2x2 identity.
pub fn generator_masks(gen: &GeneratingSet) -> Vec<BitVector> {
    gen.elements.clone()
}

/// Permutation of the coordinates {1..d}: coordinate `i` moves to `image(i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CoordPerm(Vec<usize>);

impl CoordPerm {
    pub fn identity(d: usize) -> Self {
        Self((1..=d).collect())
    }

    /// Validates a 1-based image list.
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let d = images.len();
        let bad = || Error::InvalidPermutation {
            perm: images.clone(),
            d,
        };
        if d == 0 || d > MAX_DIM {
            return Err(bad());
        }
        let mut seen = vec![false; d + 1];
        for &p in &images {
            if p == 0 || p > d || seen[p] {
                return Err(bad());
            }
            seen[p] = true;
        }
        Ok(Self(images))
    }

    /// Parses "3,1,2".
    pub fn parse(s: &str) -> Result<Self> {
        let images = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Invalid(format!("bad permutation entry '{t}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }

    /// Sends the first `dressed.len()` coordinates onto `dressed` (in the
    /// order given) and the rest, in ascending order, onto the complement.
    pub fn with_dressed_first(dressed: &[usize], d: usize) -> Result<Self> {
        let mut images = dressed.to_vec();
        images.extend((1..=d).filter(|c| !dressed.contains(c)));
        Self::new(images)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn image(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| p == i + 1)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.dim()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p - 1] = i + 1;
        }
        Self(inv)
    }

    /// `y_{image(i)} = x_i`.
    pub fn apply(&self, v: BitVector) -> BitVector {
        assert_eq!(v.dim(), self.dim(), "permutation dimension mismatch");
        let d = self.dim();
        let mut index = 0usize;
        for i in 1..=d {
            if v.bit(i) == 1 {
                index |= 1 << (d - self.image(i));
            }
        }
        BitVector::new(index, d).expect("permuted vector stays in range")
    }
}

impl TryFrom<Vec<usize>> for CoordPerm {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<CoordPerm> for Vec<usize> {
    fn from(p: CoordPerm) -> Self {
        p.0
    }
}

impl fmt::Display for CoordPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// The network Z_2^d(l), possibly rotated by a coordinate permutation and
/// relabelled by an XOR translation. Held as permuted generator masks; edges
/// are enumerated on demand.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    gen: GeneratingSet,
    perm: CoordPerm,
    translation: BitVector,
    masks: Vec<usize>,
}

pub fn build_cayley_graph(
    gen: &GeneratingSet,
    perm: &CoordPerm,
    translation: BitVector,
) -> Result<CayleyGraph> {
    if perm.dim() != gen.dim() {
        return Err(Error::InvalidPermutation {
            perm: perm.images().to_vec(),
            d: gen.dim(),
        });
    }
    if translation.dim() != gen.dim() {
        return Err(Error::DimensionMismatch {
            expected: gen.dim(),
            actual: translation.dim(),
        });
    }
    let masks = gen.elements.iter().map(|&g| perm.apply(g).index()).collect();
    Ok(CayleyGraph {
        gen: gen.clone(),
        perm: perm.clone(),
        translation,
        masks,
    })
}

/// Shorthand for the un-rotated Z_2^d(l).
pub fn standard_graph(d: usize, l: usize) -> Result<CayleyGraph> {
    let gen = build_generating_set(d, l)?;
    build_cayley_graph(&gen, &CoordPerm::identity(d), BitVector::zero(d)?)
}

impl CayleyGraph {
    pub fn dim(&self) -> usize {
        self.gen.dim()
    }

    pub fn level(&self) -> usize {
        self.gen.level()
    }

    pub fn generating_set(&self) -> &GeneratingSet {
        &self.gen
    }

    pub fn coord_perm(&self) -> &CoordPerm {
        &self.perm
    }

    pub fn translation(&self) -> BitVector {
        self.translation
    }

    pub fn node_count(&self) -> usize {
        1 << self.dim()
    }

    pub fn degree(&self) -> usize {
        self.masks.len()
    }

    /// Generator masks after the coordinate permutation, as node-index XORs.
    pub fn edge_masks(&self) -> &[usize] {
        &self.masks
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = usize> + '_ {
        self.masks.iter().map(move |&m| node ^ m)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.masks.contains(&(i ^ j))
    }

    /// Unordered edges `(i, j)` with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(self.node_count() * self.degree() / 2);
        for i in 0..self.node_count() {
            for &m in &self.masks {
                let j = i ^ m;
                if i < j {
                    edges.push((i, j));
                }
            }
        }
        edges.sort_unstable();
        edges
    }

    pub fn neighbor_lists(&self) -> Vec<Vec<usize>> {
        (0..self.node_count())
            .map(|i| {
                let mut n: Vec<usize> = self.neighbors(i).collect();
                n.sort_unstable();
                n
            })
            .collect()
    }
}

/// Dense adjacency from the edge set.
pub fn adjacency_matrix(graph: &CayleyGraph) -> Adjacency {
    let n = graph.node_count();
    let mut a = Adjacency::zeros(n, n);
    for (i, j) in graph.edges() {
        a[(i, j)] = 1;
        a[(j, i)] = 1;
    }
    a
}

fn swap_matrix() -> Adjacency {
    Adjacency::from_row_slice(2, 2, &[0, 1, 1, 0])
}

/// rho(a) = X_1 ⊗ ... ⊗ X_d with X_i = C where a_i = 1, identity otherwise.
pub fn kronecker_term(mask: BitVector) -> Adjacency {
    let c = swap_matrix();
    let id = Adjacency::identity(2, 2);
    let mut out = Adjacency::identity(1, 1);
    for i in 1..=mask.dim() {
        let factor = if mask.bit(i) == 1 { &c } else { &id };
        out = out.kronecker(factor);
    }
    out
}

/// Sum of Kronecker terms over a list of masks.
pub fn kronecker_sum(masks: &[BitVector], d: usize) -> Adjacency {
    let n = 1 << d;
    masks
        .iter()
        .fold(Adjacency::zeros(n, n), |acc, &m| acc + kronecker_term(m))
}

fn validate_simple_adjacency(a: &Adjacency) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Invalid("adjacency matrix is not square".into()));
    }
    for i in 0..a.nrows() {
        if a[(i, i)] != 0 {
            return Err(Error::Invalid(format!("self-loop at node {i}")));
        }
        for j in 0..i {
            let v = a[(i, j)];
            if v != a[(j, i)] || !(v == 0 || v == 1) {
                return Err(Error::Invalid(format!(
                    "entry ({i}, {j}) breaks the symmetric 0/1 form"
                )));
            }
        }
    }
    Ok(())
}

/// A(G x H) = A(G) ⊗ I + I ⊗ A(H).
pub fn cartesian_product(a: &Adjacency, b: &Adjacency) -> Result<Adjacency> {
    validate_simple_adjacency(a)?;
    validate_simple_adjacency(b)?;
    let ia = Adjacency::identity(a.nrows(), a.nrows());
    let ib = Adjacency::identity(b.nrows(), b.nrows());
    Ok(a.kronecker(&ib) + ia.kronecker(b))
}

/// Homogeneous nearest-neighbour chain on `n` nodes.
pub fn build_path_graph(n: usize) -> Result<Adjacency> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "path length",
            value: n as i64,
            min: 2,
            max: i64::MAX,
        });
    }
    let mut a = Adjacency::zeros(n, n);
    for i in 0..n - 1 {
        a[(i, i + 1)] = 1;
        a[(i + 1, i)] = 1;
    }
    Ok(a)
}

/// Neighbour lists of a dense adjacency.
pub fn adjacency_to_lists(a: &Adjacency) -> Vec<Vec<usize>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).filter(|&j| a[(i, j)] != 0).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnarViolation {
    IntraColumnEdge { column: usize, a: usize, b: usize },
    NonAdjacentColumnEdge { a: usize, b: usize },
    NonUniformForwardDegree { column: usize },
    NonUniformBackwardDegree { column: usize },
    /// Some nodes are unreachable from the source.
    Disconnected,
}

impl fmt::Display for ColumnarViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::IntraColumnEdge { column, a, b } => {
                write!(f, "intra-column edge ({a}, {b}) in column {column}")
            }
            Self::NonAdjacentColumnEdge { a, b } => {
                write!(f, "edge ({a}, {b}) joins non-adjacent columns")
            }
            Self::NonUniformForwardDegree { column } => {
                write!(f, "non-uniform forward degree in column {column}")
            }
            Self::NonUniformBackwardDegree { column } => {
                write!(f, "non-uniform backward degree in column {column}")
            }
            Self::Disconnected => write!(f, "graph is not connected"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColumnarReport {
    pub is_columnar: bool,
    pub columns: Vec<Vec<usize>>,
    pub violation: Option<ColumnarViolation>,
}

impl ColumnarReport {
    pub fn column_sizes(&self) -> Vec<usize> {
        self.columns.iter().map(Vec::len).collect()
    }
}

/// BFS-layers the graph from `source` and tests the column conditions: no
/// intra-column edges, edges only between adjacent columns, and uniform
/// forward and backward degrees within each column.
pub fn check_columnar_lists(neighbors: &[Vec<usize>], source: usize) -> Result<ColumnarReport> {
    let n = neighbors.len();
    check_range("source node", source, 0, n.saturating_sub(1))?;
    let mut layer = vec![usize::MAX; n];
    let mut columns: Vec<Vec<usize>> = Vec::new();
    let mut queue = VecDeque::from([source]);
    layer[source] = 0;
    while let Some(u) = queue.pop_front() {
        let lu = layer[u];
        if columns.len() <= lu {
            columns.push(Vec::new());
        }
        columns[lu].push(u);
        for &v in &neighbors[u] {
            if layer[v] == usize::MAX {
                layer[v] = lu + 1;
                queue.push_back(v);
            }
        }
    }
    for c in &mut columns {
        c.sort_unstable();
    }
    let report = |violation: Option<ColumnarViolation>, columns: Vec<Vec<usize>>| ColumnarReport {
        is_columnar: violation.is_none(),
        columns,
        violation,
    };
    if layer.contains(&usize::MAX) {
        return Ok(report(Some(ColumnarViolation::Disconnected), columns));
    }

    // Edge placement first, over every edge once.
    for (u, nbrs) in neighbors.iter().enumerate() {
        for &v in nbrs.iter().filter(|&&v| v > u) {
            let (lu, lv) = (layer[u], layer[v]);
            if lu == lv {
                let violation = ColumnarViolation::IntraColumnEdge {
                    column: lu,
                    a: u,
                    b: v,
                };
                return Ok(report(Some(violation), columns));
            }
            if lu.abs_diff(lv) > 1 {
                let violation = ColumnarViolation::NonAdjacentColumnEdge { a: u, b: v };
                return Ok(report(Some(violation), columns));
            }
        }
    }

    for (ci, col) in columns.iter().enumerate() {
        let count = |u: usize, target: usize| {
            neighbors[u].iter().filter(|&&v| layer[v] == target).count()
        };
        let forward: Vec<usize> = col.iter().map(|&u| count(u, ci + 1)).collect();
        if forward.windows(2).any(|w| w[0] != w[1]) {
            let violation = ColumnarViolation::NonUniformForwardDegree { column: ci };
            return Ok(report(Some(violation), columns));
        }
        if ci > 0 {
            let backward: Vec<usize> = col.iter().map(|&u| count(u, ci - 1)).collect();
            if backward.windows(2).any(|w| w[0] != w[1]) {
                let violation = ColumnarViolation::NonUniformBackwardDegree { column: ci };
                return Ok(report(Some(violation), columns));
            }
        }
    }
    Ok(report(None, columns))
}

pub fn check_columnar(graph: &CayleyGraph, source: usize) -> Result<ColumnarReport> {
    check_columnar_lists(&graph.neighbor_lists(), source)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    fn set_strings(gen: &GeneratingSet) -> Vec<String> {
        let mut v: Vec<String> = gen.elements().iter().map(|b| b.to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn generating_sets_d3() {
        let s1 = build_generating_set(3, 1).unwrap();
        assert_eq!(set_strings(&s1), ["001", "010", "100"]);
        let s2 = build_generating_set(3, 2).unwrap();
        assert_eq!(set_strings(&s2), ["001", "010", "100", "110"]);
        let s3 = build_generating_set(3, 3).unwrap();
        assert_eq!(s3.len(), 7);
        assert!(!s3.contains(bv("000")));
    }

    #[test]
    fn generating_set_bounds() {
        assert!(build_generating_set(3, 0).is_err());
        assert!(build_generating_set(3, 4).is_err());
        assert!(build_generating_set(0, 0).is_err());
        assert!(build_generating_set(17, 1).is_err());
        assert_eq!(build_generating_set(16, 16).unwrap().len(), 65535);
    }

    #[test]
    fn generating_set_size_exhaustive() {
        for d in 1..=8 {
            for l in 1..=d {
                let gen = build_generating_set(d, l).unwrap();
                assert_eq!(gen.len(), (1 << l) + d - l - 1, "d={d} l={l}");
                let mut uniq = gen.elements().to_vec();
                uniq.sort();
                uniq.dedup();
                assert_eq!(uniq.len(), gen.len());
            }
        }
    }

    #[test]
    fn hypercube_neighbours_d3() {
        let g = standard_graph(3, 1).unwrap();
        let nb = |s: &str| {
            let mut v: Vec<String> = g
                .neighbors(bv(s).index())
                .map(|i| BitVector::new(i, 3).unwrap().to_string())
                .collect();
            v.sort();
            v
        };
        assert_eq!(nb("000"), ["001", "010", "100"]);
        assert_eq!(nb("110"), ["010", "100", "111"]);
    }

    #[test]
    fn smallest_hypercube() {
        let g = standard_graph(1, 1).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(
            adjacency_matrix(&g),
            Adjacency::from_row_slice(2, 2, &[0, 1, 1, 0])
        );
    }

    #[test]
    fn swapped_coordinates_relabel_edges() {
        let gen = build_generating_set(3, 2).unwrap();
        let swap = CoordPerm::new(vec![3, 2, 1]).unwrap();
        let rotated = build_cayley_graph(&gen, &swap, BitVector::zero(3).unwrap()).unwrap();
        let plain = standard_graph(3, 2).unwrap();
        let relabel = |i: usize| swap.apply(BitVector::new(i, 3).unwrap()).index();
        let mut mapped: Vec<(usize, usize)> = plain
            .edges()
            .into_iter()
            .map(|(i, j)| {
                let (a, b) = (relabel(i), relabel(j));
                (a.min(b), a.max(b))
            })
            .collect();
        mapped.sort_unstable();
        assert_eq!(mapped, rotated.edges());
        assert_ne!(plain.edges(), rotated.edges());
    }

    #[test]
    fn row_sums() {
        for (d, l, deg) in [(3, 1, 3), (3, 2, 4), (3, 3, 7)] {
            let a = adjacency_matrix(&standard_graph(d, l).unwrap());
            for i in 0..a.nrows() {
                assert_eq!(a.row(i).sum(), deg);
                assert_eq!(a[(i, i)], 0);
            }
            assert_eq!(a, a.transpose());
        }
    }

    #[test]
    fn kronecker_masks_d3() {
        let gen = build_generating_set(3, 2).unwrap();
        let masks: Vec<String> = generator_masks(&gen).iter().map(|m| m.to_string()).collect();
        assert_eq!(masks, ["100", "010", "001", "110"]);
        let c = swap_matrix();
        let id = Adjacency::identity(2, 2);
        assert_eq!(kronecker_term(bv("110")), c.kronecker(&c).kronecker(&id));
    }

    #[test]
    fn k4_from_masks() {
        let gen = build_generating_set(2, 2).unwrap();
        let a = kronecker_sum(&generator_masks(&gen), 2);
        let mut k4 = Adjacency::from_element(4, 4, 1);
        k4.fill_diagonal(0);
        assert_eq!(a, k4);
        assert_eq!(a, adjacency_matrix(&standard_graph(2, 2).unwrap()));
    }

    #[test]
    fn masks_sum_to_adjacency() {
        for d in 1..=6 {
            for l in 1..=d {
                let gen = build_generating_set(d, l).unwrap();
                let g = standard_graph(d, l).unwrap();
                assert_eq!(kronecker_sum(&generator_masks(&gen), d), adjacency_matrix(&g));
            }
        }
    }

    #[test]
    fn product_of_k2_is_square() {
        let k2 = build_path_graph(2).unwrap();
        let sq = cartesian_product(&k2, &k2).unwrap();
        let c4 = adjacency_matrix(&standard_graph(2, 1).unwrap());
        assert_eq!(sq, c4);
        // a 4-cycle: every node has degree 2
        assert!((0..4).all(|i| sq.row(i).sum() == 2));
    }

    #[test]
    fn cartesian_rejects_non_simple() {
        let mut bad = build_path_graph(3).unwrap();
        bad[(0, 0)] = 1;
        assert!(cartesian_product(&bad, &bad).is_err());
    }

    #[test]
    fn path_graph() {
        assert_eq!(
            build_path_graph(2).unwrap(),
            Adjacency::from_row_slice(2, 2, &[0, 1, 1, 0])
        );
        assert_eq!(build_path_graph(5).unwrap().sum(), 8);
        assert!(build_path_graph(1).is_err());
    }

    #[test]
    fn columnar_hypercube_d4() {
        let r = check_columnar(&standard_graph(4, 1).unwrap(), 0).unwrap();
        assert!(r.is_columnar);
        assert_eq!(r.column_sizes(), vec![1, 4, 6, 4, 1]);
    }

    #[test]
    fn columnar_dressed_fails() {
        let r = check_columnar(&standard_graph(3, 2).unwrap(), 0).unwrap();
        assert!(!r.is_columnar);
        // 100 and 010 both sit in column 1 and differ by the generator 110
        assert!(matches!(
            r.violation,
            Some(ColumnarViolation::IntraColumnEdge { column: 1, .. })
        ));
        let r = check_columnar(&standard_graph(3, 3).unwrap(), 0).unwrap();
        assert_eq!(r.column_sizes(), vec![1, 7]);
        assert!(matches!(
            r.violation,
            Some(ColumnarViolation::IntraColumnEdge { column: 1, .. })
        ));
    }

    #[test]
    fn columnar_path_and_disconnected() {
        let p = adjacency_to_lists(&build_path_graph(4).unwrap());
        let r = check_columnar_lists(&p, 0).unwrap();
        assert!(r.is_columnar);
        let r = check_columnar_lists(&p, 1).unwrap();
        // columns {1}, {0,2}, {3}: node 0 has no forward link, node 2 has one
        assert_eq!(
            r.violation,
            Some(ColumnarViolation::NonUniformForwardDegree { column: 1 })
        );
        let lists = vec![vec![1], vec![0], vec![]];
        let r = check_columnar_lists(&lists, 0).unwrap();
        assert_eq!(r.violation, Some(ColumnarViolation::Disconnected));
        assert!(check_columnar_lists(&lists, 3).is_err());
    }

    #[test]
    fn perm_validation() {
        assert!(CoordPerm::new(vec![1, 1, 2]).is_err());
        assert!(CoordPerm::new(vec![0, 1]).is_err());
        assert!(CoordPerm::parse("2,x").is_err());
        let p = CoordPerm::parse("2,3,1").unwrap();
        assert_eq!(p.apply(bv("100")).to_string(), "010");
        assert_eq!(p.inverse().apply(p.apply(bv("110"))), bv("110"));
        assert_eq!(
            CoordPerm::with_dressed_first(&[3, 1], 4).unwrap().images(),
            &[3, 1, 2, 4]
        );
        let gen = build_generating_set(3, 1).unwrap();
        assert!(build_cayley_graph(&gen, &CoordPerm::identity(4), bv("000")).is_err());
    }
}
