//! Ordered simplicial complexes, subdivision, edge-path presentations,
//! representations and twisted cochains.
//!
//! Vertices are indices `0..n` whose numeric order is the total order of
//! the complex; a simplex is a strictly increasing vertex tuple. Twisted
//! cochains of degree `q` with values in `Q^d` are vectors of length
//! `|K_q| * d`, indexed by `(simplex, basis vector)` lexicographically.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::detline::{BasedComplex, DetError};
use crate::exactlin::{determinant, rat, zero_vector, LinError, Matrix, Rational, Vector};

pub type Simplex = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplicialError {
    #[error(transparent)]
    Lin(#[from] LinError),
    #[error(transparent)]
    Det(#[from] DetError),
    #[error("empty simplex")]
    EmptySimplex,
    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
    #[error("vertex {0} repeated in a simplex")]
    RepeatedVertex(usize),
    #[error("duplicate vertex name {0}")]
    DuplicateName(String),
    #[error("complex is not connected")]
    Disconnected,
    #[error("edge set is not a spanning tree")]
    NotATree,
    #[error("{0:?} is not a simplex of the complex")]
    NotASimplex(Simplex),
    #[error("generator {0}: matrix is not {1}x{1}")]
    BadMatrix(usize, usize),
    #[error("generator {0}: matrix is not invertible")]
    NotInvertible(usize),
    #[error("expected {expected} generator matrices, found {found}")]
    GeneratorCount { expected: usize, found: usize },
    #[error("relator {0} does not evaluate to the identity")]
    RelatorFails(usize),
    #[error("vertex map does not send simplexes to simplexes")]
    NotSimplicial,
    #[error("vertex map is not order preserving")]
    NotOrderPreserving,
    #[error("cochain of degree {degree} has length {found}, expected {expected}")]
    BadCochain { degree: usize, expected: usize, found: usize },
    #[error("the subdivision carrier data is inconsistent")]
    CarrierInconsistent,
}

/// Finite simplicial complex with a total vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedComplex {
    names: Vec<String>,
    simplices: Vec<Vec<Simplex>>,
    index: Vec<BTreeMap<Simplex, usize>>,
}

impl OrderedComplex {
    /// Closes the given simplexes under faces. Each input simplex is a set
    /// of vertex indices in any order.
    pub fn new(names: Vec<String>, maximal: &[Vec<usize>]) -> Result<Self, SimplicialError> {
        let n = names.len();
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.clone()) {
                return Err(SimplicialError::DuplicateName(name.clone()));
            }
        }
        let mut sets: Vec<BTreeSet<Simplex>> = Vec::new();
        let add = |s: Simplex, sets: &mut Vec<BTreeSet<Simplex>>| {
            let q = s.len() - 1;
            if sets.len() <= q {
                sets.resize(q + 1, BTreeSet::new());
            }
            sets[q].insert(s);
        };
        for v in 0..n {
            add(vec![v], &mut sets);
        }
        for s in maximal {
            if s.is_empty() {
                return Err(SimplicialError::EmptySimplex);
            }
            let mut sorted = s.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(SimplicialError::RepeatedVertex(w[0]));
                }
            }
            if let Some(&v) = sorted.iter().find(|&&v| v >= n) {
                return Err(SimplicialError::UnknownVertex(v));
            }
            let k = sorted.len();
            for mask in 1u64..(1u64 << k) {
                let face: Simplex = (0..k).filter(|i| mask >> i & 1 == 1).map(|i| sorted[i]).collect();
                add(face, &mut sets);
            }
        }
        let simplices: Vec<Vec<Simplex>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let index =
            simplices.iter().map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        Ok(OrderedComplex { names, simplices, index })
    }

    fn numbered(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("{i}")).collect()
    }

    /// The full simplex on `n + 1` vertices.
    pub fn simplex(n: usize) -> Self {
        Self::new(Self::numbered(n + 1), &[(0..=n).collect()]).expect("valid simplex")
    }

    /// The boundary of the `n`-simplex, an `(n - 1)`-sphere.
    pub fn simplex_boundary(n: usize) -> Self {
        let faces: Vec<Vec<usize>> = (0..=n).map(|i| (0..=n).filter(|&v| v != i).collect()).collect();
        Self::new(Self::numbered(n + 1), &faces).expect("valid boundary")
    }

    /// Product triangulation: vertices are pairs in lexicographic order and
    /// each product of simplexes is cut into staircase simplexes.
    pub fn product(&self, other: &OrderedComplex) -> Self {
        let m = other.vertex_count();
        let names = self.names.iter().flat_map(|a| other.names.iter().map(move |b| format!("({a},{b})"))).collect();
        let mut tops = Vec::new();
        for s in self.maximal_simplices() {
            for t in other.maximal_simplices() {
                staircases(&s, &t, &mut Vec::new(), 0, 0, &mut |path: &[(usize, usize)]| {
                    tops.push(path.iter().map(|&(a, b)| a * m + b).collect::<Vec<_>>());
                });
            }
        }
        Self::new(names, &tops).expect("valid product")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn dimension(&self) -> usize {
        self.simplices.len().saturating_sub(1)
    }

    /// `K_q` in lexicographic order.
    pub fn simplices(&self, q: usize) -> &[Simplex] {
        self.simplices.get(q).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, q: usize) -> usize {
        self.simplices(q).len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s.len().checked_sub(1)?)?.get(s).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.index_of(s).is_some()
    }

    /// Simplexes that are not faces of larger ones.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for q in 0..self.simplices.len() {
            for s in &self.simplices[q] {
                let covered =
                    self.simplices.get(q + 1).is_some_and(|up| up.iter().any(|t| s.iter().all(|v| t.contains(v))));
                if !covered {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count()];
        for e in self.simplices(1) {
            adj[e[0]].push(e[1]);
            adj[e[1]].push(e[0]);
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
        }
        adj
    }

    /// Simplicial boundary `C_q -> C_{q-1}`, rows `K_{q-1}`, columns `K_q`.
    pub fn boundary_matrix(&self, q: usize) -> Matrix {
        if q == 0 {
            return Matrix::zeros(0, self.count(0));
        }
        let mut m = Matrix::zeros(self.count(q - 1), self.count(q));
        for (j, s) in self.simplices(q).iter().enumerate() {
            for i in 0..s.len() {
                let f = face(s, i);
                let r = self.index_of(&f).expect("closed under faces");
                m[(r, j)] = sign(i);
            }
        }
        m
    }

    /// The top-dimensional cycle with first coefficient 1, when the top
    /// homology is one-dimensional and the cycle has unit coefficients.
    pub fn orientation_cocycle(&self) -> Option<Cochain> {
        let q = self.dimension();
        let cs = crate::exactlin::column_space_analysis(&self.boundary_matrix(q));
        if cs.kernel_basis.len() != 1 {
            return None;
        }
        let v = &cs.kernel_basis[0];
        let first = v.iter().find(|x| !x.is_zero())?.clone();
        let values: Vector = v.iter().map(|x| x / &first).collect();
        if values.iter().any(|x| x.abs() != Rational::one()) {
            return None;
        }
        Some(Cochain { degree: q, values })
    }
}

fn staircases(
    s: &[usize],
    t: &[usize],
    path: &mut Vec<(usize, usize)>,
    i: usize,
    j: usize,
    out: &mut impl FnMut(&[(usize, usize)]),
) {
    path.push((s[i], t[j]));
    if i + 1 == s.len() && j + 1 == t.len() {
        out(path);
    }
    if i + 1 < s.len() {
        staircases(s, t, path, i + 1, j, out);
    }
    if j + 1 < t.len() {
        staircases(s, t, path, i, j + 1, out);
    }
    path.pop();
}

/// The face of `s` omitting position `i`.
pub fn face(s: &[usize], i: usize) -> Simplex {
    s.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).collect()
}

fn sign(i: usize) -> Rational {
    if i.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Simplicial chains over `Q` as a cochain-indexed complex: chains of
/// dimension `q` sit in degree `-q`, so the boundary raises degree.
pub fn chain_complex(k: &OrderedComplex) -> BasedComplex {
    let top = k.dimension();
    let dims = (0..=top).rev().map(|q| k.count(q)).collect();
    let diffs = (1..=top).rev().map(|q| k.boundary_matrix(q)).collect();
    BasedComplex::new(-(top as i64), dims, diffs).expect("boundary squares to zero")
}

/// Betti numbers `b_0, ..., b_dim`.
pub fn betti_numbers(k: &OrderedComplex) -> Vec<usize> {
    let mut dims = chain_complex(k).cohomology_dims();
    dims.reverse();
    dims
}

/// First barycentric subdivision together with the carrier of every new
/// simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    pub complex: OrderedComplex,
    /// The original simplex whose barycenter each new vertex is.
    pub barycenters: Vec<Simplex>,
}

impl Subdivision {
    /// The smallest original simplex containing a new simplex: the largest
    /// face in its chain.
    pub fn carrier(&self, s: &[usize]) -> Simplex {
        let last = *s.last().expect("nonempty simplex");
        self.barycenters[last].clone()
    }

    /// Barycentric coordinates of the vertices of `s` inside its carrier,
    /// one row per vertex of `s`.
    pub fn affine_data(&self, s: &[usize]) -> Vec<Vector> {
        let carrier = self.carrier(s);
        s.iter()
            .map(|&v| {
                let b = &self.barycenters[v];
                let w = Rational::new(1.into(), (b.len() as i64).into());
                carrier.iter().map(|c| if b.contains(c) { w.clone() } else { Rational::zero() }).collect()
            })
            .collect()
    }

    /// Subdivision chain map `C_q(K) -> C_q(K')`.
    pub fn chain_map(&self, original: &OrderedComplex, q: usize) -> Matrix {
        let sub = &self.complex;
        let mut m = Matrix::zeros(sub.count(q), original.count(q));
        let lookup: BTreeMap<&Simplex, usize> = self.barycenters.iter().enumerate().map(|(i, b)| (b, i)).collect();
        for (j, s) in original.simplices(q).iter().enumerate() {
            for perm in permutations(q + 1) {
                let mut chain = Vec::with_capacity(q + 1);
                for k in 0..=q {
                    let mut f: Simplex = perm[..=k].iter().map(|&i| s[i]).collect();
                    f.sort_unstable();
                    chain.push(lookup[&f]);
                }
                let r = sub.index_of(&chain).expect("flag is a simplex");
                m[(r, j)] = if permutation_sign(&perm) { rat(1) } else { rat(-1) };
            }
        }
        m
    }
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// `true` for even permutations.
pub fn permutation_sign(p: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

/// Vertices are the simplexes of `k`, ordered by dimension then
/// lexicographically; simplexes are chains of faces.
pub fn barycentric_subdivision(k: &OrderedComplex) -> Subdivision {
    let barycenters: Vec<Simplex> = (0..=k.dimension()).flat_map(|q| k.simplices(q).iter().cloned()).collect();
    let lookup: BTreeMap<&Simplex, usize> = barycenters.iter().enumerate().map(|(i, b)| (b, i)).collect();
    let names = barycenters
        .iter()
        .map(|b| {
            if b.len() == 1 {
                k.names[b[0]].clone()
            } else {
                let parts: Vec<&str> = b.iter().map(|&v| k.names[v].as_str()).collect();
                format!("[{}]", parts.join(","))
            }
        })
        .collect();
    let mut tops = Vec::new();
    for s in k.maximal_simplices() {
        for perm in permutations(s.len()) {
            let chain = (0..s.len())
                .map(|i| {
                    let mut f: Simplex = perm[..=i].iter().map(|&p| s[p]).collect();
                    f.sort_unstable();
                    lookup[&f]
                })
                .collect();
            tops.push(chain);
        }
    }
    let complex = OrderedComplex::new(names, &tops).expect("valid subdivision");
    Subdivision { complex, barycenters }
}

/// Simplicial map given on vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialMap {
    pub vertex_map: Vec<usize>,
}

impl SimplicialMap {
    pub fn new(
        source: &OrderedComplex,
        target: &OrderedComplex,
        vertex_map: Vec<usize>,
    ) -> Result<Self, SimplicialError> {
        if vertex_map.len() != source.vertex_count() {
            return Err(SimplicialError::NotSimplicial);
        }
        let f = SimplicialMap { vertex_map };
        for q in 0..=source.dimension() {
            for s in source.simplices(q) {
                if !target.contains(&f.image_set(s)) {
                    return Err(SimplicialError::NotSimplicial);
                }
            }
        }
        Ok(f)
    }

    /// Image vertex set, sorted and deduplicated.
    pub fn image_set(&self, s: &[usize]) -> Simplex {
        let mut out: Simplex = s.iter().map(|&v| self.vertex_map[v]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn is_degenerate_on(&self, s: &[usize]) -> bool {
        self.image_set(s).len() < s.len()
    }

    /// Weakly order preserving on every edge of `source`.
    pub fn is_order_preserving(&self, source: &OrderedComplex) -> bool {
        source.simplices(1).iter().all(|e| self.vertex_map[e[0]] <= self.vertex_map[e[1]])
    }

    pub fn compose(&self, first: &SimplicialMap) -> SimplicialMap {
        SimplicialMap { vertex_map: first.vertex_map.iter().map(|&v| self.vertex_map[v]).collect() }
    }

    /// Induced chain map `C_q(source) -> C_q(target)`; degenerate images
    /// vanish and reordered images carry the permutation sign.
    pub fn chain_map(&self, source: &OrderedComplex, target: &OrderedComplex, q: usize) -> Matrix {
        let mut m = Matrix::zeros(target.count(q), source.count(q));
        for (j, s) in source.simplices(q).iter().enumerate() {
            if self.is_degenerate_on(s) {
                continue;
            }
            let img: Vec<usize> = s.iter().map(|&v| self.vertex_map[v]).collect();
            let mut order: Vec<usize> = (0..img.len()).collect();
            order.sort_by_key(|&i| img[i]);
            let sorted: Simplex = order.iter().map(|&i| img[i]).collect();
            let r = target.index_of(&sorted).expect("simplicial map");
            m[(r, j)] = if permutation_sign(&order) { rat(1) } else { rat(-1) };
        }
        m
    }
}

/// Simplicial approximation to the identity: each barycenter goes to the
/// largest vertex of its simplex.
pub fn approx_identity(sub: &Subdivision, k: &OrderedComplex) -> Result<SimplicialMap, SimplicialError> {
    if sub.barycenters.len() != sub.complex.vertex_count() {
        return Err(SimplicialError::CarrierInconsistent);
    }
    let mut map = Vec::with_capacity(sub.barycenters.len());
    for b in &sub.barycenters {
        if !k.contains(b) {
            return Err(SimplicialError::CarrierInconsistent);
        }
        map.push(*b.last().ok_or(SimplicialError::CarrierInconsistent)?);
    }
    SimplicialMap::new(&sub.complex, k, map).map_err(|_| SimplicialError::CarrierInconsistent)
}

/// Element of the free group on the generators: `(generator, +1 or -1)`.
pub type Word = Vec<(usize, i8)>;

pub fn reduce_word(w: &[(usize, i8)]) -> Word {
    let mut out: Word = Vec::new();
    for &(g, e) in w {
        if let Some(&(h, f)) = out.last() {
            if h == g && f == -e {
                out.pop();
                continue;
            }
        }
        out.push((g, e));
    }
    out
}

pub fn invert_word(w: &[(usize, i8)]) -> Word {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

/// Edge-path presentation of the fundamental group from a spanning tree.
/// Generators are the non-tree edges `(a, b)`, `a < b`; the holonomy of a
/// tree edge is trivial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pi1Presentation {
    base: usize,
    tree: BTreeSet<(usize, usize)>,
    generators: Vec<(usize, usize)>,
    generator_index: BTreeMap<(usize, usize), usize>,
    relators: Vec<Word>,
    parent: Vec<Option<usize>>,
}

impl Pi1Presentation {
    /// `tree` lists edges `(a, b)` with `a < b`.
    pub fn from_spanning_tree(
        k: &OrderedComplex,
        base: usize,
        tree: &[(usize, usize)],
    ) -> Result<Self, SimplicialError> {
        let n = k.vertex_count();
        if base >= n {
            return Err(SimplicialError::UnknownVertex(base));
        }
        let tree: BTreeSet<(usize, usize)> = tree.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        if tree.len() + 1 != n || tree.iter().any(|&(a, b)| !k.contains(&[a, b])) {
            return Err(SimplicialError::NotATree);
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &tree {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[base] = true;
        let mut queue = VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(SimplicialError::NotATree);
        }
        let generators: Vec<(usize, usize)> =
            k.simplices(1).iter().map(|e| (e[0], e[1])).filter(|e| !tree.contains(e)).collect();
        let generator_index = generators.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut p = Pi1Presentation { base, tree, generators, generator_index, relators: Vec::new(), parent };
        p.relators = k
            .simplices(2)
            .iter()
            .map(|t| {
                let mut w = p.holonomy(t[0], t[1]);
                w.extend(p.holonomy(t[1], t[2]));
                w.extend(p.holonomy(t[2], t[0]));
                reduce_word(&w)
            })
            .collect();
        Ok(p)
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn generators(&self) -> &[(usize, usize)] {
        &self.generators
    }

    pub fn generator_of(&self, a: usize, b: usize) -> Option<usize> {
        self.generator_index.get(&(a.min(b), a.max(b))).copied()
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn tree(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.tree.iter()
    }

    /// Holonomy of the ordered edge `a -> b`.
    pub fn holonomy(&self, a: usize, b: usize) -> Word {
        match self.generator_index.get(&(a.min(b), a.max(b))) {
            Some(&g) => vec![(g, if a < b { 1 } else { -1 })],
            None => Vec::new(),
        }
    }

    /// Vertices on the tree path from the base to `v`, inclusive.
    pub fn tree_path(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

/// Spanning tree by breadth-first search from `base`, neighbours in vertex
/// order.
pub fn fundamental_group(k: &OrderedComplex, base: usize) -> Result<Pi1Presentation, SimplicialError> {
    if base >= k.vertex_count() {
        return Err(SimplicialError::UnknownVertex(base));
    }
    if !k.is_connected() {
        return Err(SimplicialError::Disconnected);
    }
    let adj = k.adjacency();
    let mut seen = vec![false; k.vertex_count()];
    seen[base] = true;
    let mut tree = Vec::new();
    let mut queue = VecDeque::from([base]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                tree.push((v.min(w), v.max(w)));
                queue.push_back(w);
            }
        }
    }
    Pi1Presentation::from_spanning_tree(k, base, &tree)
}

/// Representation of the presented group on `Q^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Representation {
    dim: usize,
    matrices: Vec<Matrix>,
    inverses: Vec<Matrix>,
}

impl Representation {
    pub fn new(p: &Pi1Presentation, dim: usize, matrices: Vec<Matrix>) -> Result<Self, SimplicialError> {
        if matrices.len() != p.generators.len() {
            return Err(SimplicialError::GeneratorCount { expected: p.generators.len(), found: matrices.len() });
        }
        let mut inverses = Vec::with_capacity(matrices.len());
        for (g, m) in matrices.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(SimplicialError::BadMatrix(g, dim));
            }
            inverses.push(m.inverse()?.ok_or(SimplicialError::NotInvertible(g))?);
        }
        let rho = Representation { dim, matrices, inverses };
        let id = Matrix::identity(dim);
        for (i, r) in p.relators.iter().enumerate() {
            if rho.evaluate(r) != id {
                return Err(SimplicialError::RelatorFails(i));
            }
        }
        Ok(rho)
    }

    pub fn trivial(p: &Pi1Presentation, dim: usize) -> Self {
        let id = Matrix::identity(dim);
        Representation { dim, matrices: vec![id.clone(); p.generators.len()], inverses: vec![id; p.generators.len()] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrices(&self) -> &[Matrix] {
        &self.matrices
    }

    /// Words are evaluated left to right as matrix products.
    pub fn evaluate(&self, w: &[(usize, i8)]) -> Matrix {
        let mut out = Matrix::identity(self.dim);
        for &(g, e) in w {
            let m = if e > 0 { &self.matrices[g] } else { &self.inverses[g] };
            out = out.mul(m).expect("square matrices");
        }
        out
    }

    /// `|det rho(g)| = 1` for every generator.
    pub fn is_unimodular(&self) -> bool {
        self.matrices.iter().all(|m| determinant(m).map(|d| d.abs().is_one()).unwrap_or(false))
    }

    pub fn holonomy_matrix(&self, p: &Pi1Presentation, a: usize, b: usize) -> Matrix {
        self.evaluate(&p.holonomy(a, b))
    }

    /// The same representation of the fundamental group, read through the
    /// presentation `target` of the same complex.
    pub fn transport(&self, source: &Pi1Presentation, target: &Pi1Presentation) -> Representation {
        let gamma = |v: usize| -> Word {
            let path = target.tree_path(v);
            let mut w = Vec::new();
            for e in path.windows(2) {
                w.extend(source.holonomy(e[0], e[1]));
            }
            w
        };
        let matrices: Vec<Matrix> = target
            .generators
            .iter()
            .map(|&(a, b)| {
                let mut w = gamma(a);
                w.extend(source.holonomy(a, b));
                w.extend(invert_word(&gamma(b)));
                self.evaluate(&reduce_word(&w))
            })
            .collect();
        let inverses = matrices.iter().map(|m| m.inverse().expect("square").expect("invertible")).collect();
        Representation { dim: self.dim, matrices, inverses }
    }
}

/// Scalar cochain of a fixed degree, one value per simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    pub degree: usize,
    pub values: Vector,
}

impl Cochain {
    pub fn zero(k: &OrderedComplex, degree: usize) -> Self {
        Cochain { degree, values: zero_vector(k.count(degree)) }
    }

    pub fn check(&self, k: &OrderedComplex) -> Result<(), SimplicialError> {
        let expected = k.count(self.degree);
        if self.values.len() != expected {
            return Err(SimplicialError::BadCochain { degree: self.degree, expected, found: self.values.len() });
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn value(&self, k: &OrderedComplex, s: &[usize]) -> Rational {
        k.index_of(s).map_or_else(Rational::zero, |i| self.values[i].clone())
    }

    /// Untwisted coboundary.
    pub fn coboundary(&self, k: &OrderedComplex) -> Cochain {
        let d = k.boundary_matrix(self.degree + 1).transpose();
        let values = if d.rows() == 0 { Vec::new() } else { d.mul_vec(&self.values).expect("shape") };
        Cochain { degree: self.degree + 1, values }
    }

    pub fn is_closed(&self, k: &OrderedComplex) -> bool {
        self.coboundary(k).is_zero()
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!(self.degree, other.degree);
        Cochain { degree: self.degree, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }
}

/// Untwisted Alexander–Whitney cup product.
pub fn scalar_cup(k: &OrderedComplex, a: &Cochain, b: &Cochain) -> Cochain {
    let (r, s) = (a.degree, b.degree);
    let q = r + s;
    let values = k.simplices(q).iter().map(|sigma| a.value(k, &sigma[..=r]) * b.value(k, &sigma[r..])).collect();
    Cochain { degree: q, values }
}

/// Local-coefficient cochains with the holonomy-twisted coboundary
/// `(dc)(v0..v_{q+1}) = rho(hol(v0 v1)) c(v1..) + sum_{j>=1} (-1)^j c(face_j)`.
pub fn twisted_cochain_complex(
    k: &OrderedComplex,
    p: &Pi1Presentation,
    rho: &Representation,
) -> Result<BasedComplex, SimplicialError> {
    let d = rho.dim();
    let top = k.dimension();
    let dims: Vec<usize> = (0..=top).map(|q| k.count(q) * d).collect();
    let diffs = (0..top).map(|q| twisted_coboundary(k, p, rho, q)).collect();
    Ok(BasedComplex::new(0, dims, diffs)?)
}

/// The twisted coboundary `C^q -> C^{q+1}`.
pub fn twisted_coboundary(k: &OrderedComplex, p: &Pi1Presentation, rho: &Representation, q: usize) -> Matrix {
    let d = rho.dim();
    let mut m = Matrix::zeros(k.count(q + 1) * d, k.count(q) * d);
    for (row, s) in k.simplices(q + 1).iter().enumerate() {
        for j in 0..s.len() {
            let col = k.index_of(&face(s, j)).expect("closed under faces");
            if j == 0 {
                let h = rho.holonomy_matrix(p, s[0], s[1]);
                for a in 0..d {
                    for b in 0..d {
                        m[(row * d + a, col * d + b)] += &h[(a, b)];
                    }
                }
            } else {
                let sg = sign(j);
                for a in 0..d {
                    m[(row * d + a, col * d + a)] += &sg;
                }
            }
        }
    }
    m
}

/// Matrix of `c -> theta ∪ c` from `C^s` to `C^{r+s}`; the back face value
/// is transported along the front path.
pub fn cup_matrix(k: &OrderedComplex, p: &Pi1Presentation, rho: &Representation, theta: &Cochain, s: usize) -> Matrix {
    let d = rho.dim();
    let r = theta.degree;
    let q = r + s;
    let mut m = Matrix::zeros(k.count(q) * d, k.count(s) * d);
    for (row, sigma) in k.simplices(q).iter().enumerate() {
        let t = theta.value(k, &sigma[..=r]);
        if t.is_zero() {
            continue;
        }
        let col = k.index_of(&sigma[r..]).expect("closed under faces");
        let mut w = Vec::new();
        for e in sigma[..=r].windows(2) {
            w.extend(p.holonomy(e[0], e[1]));
        }
        let h = rho.evaluate(&reduce_word(&w));
        for a in 0..d {
            for b in 0..d {
                let x = &h[(a, b)];
                if !x.is_zero() {
                    m[(row * d + a, col * d + b)] += &t * x;
                }
            }
        }
    }
    m
}

/// `theta ∪ c` for a twisted cochain `c` of degree `s`; zero (of length 0)
/// beyond the dimension.
pub fn cup(
    k: &OrderedComplex,
    p: &Pi1Presentation,
    rho: &Representation,
    theta: &Cochain,
    s: usize,
    c: &[Rational],
) -> Vector {
    let m = cup_matrix(k, p, rho, theta, s);
    if m.rows() == 0 {
        return Vec::new();
    }
    m.mul_vec(c).expect("cochain length")
}

/// Representation induced on `source` by an order-preserving map `g` into
/// `target`, with the per-vertex transport `gamma(v)` along the source tree
/// used to pull back cochains.
#[derive(Debug, Clone)]
pub struct PulledBack {
    pub presentation: Pi1Presentation,
    pub representation: Representation,
    gamma: Vec<Matrix>,
}

impl PulledBack {
    /// Builds the source presentation from `source_base`, which must map
    /// to the base of `target_p`.
    pub fn new(
        g: &SimplicialMap,
        source: &OrderedComplex,
        source_base: usize,
        target_p: &Pi1Presentation,
        rho: &Representation,
    ) -> Result<Self, SimplicialError> {
        let presentation = fundamental_group(source, source_base)?;
        Self::with_presentation(g, source, presentation, target_p, rho)
    }

    /// As [`PulledBack::new`] with a given presentation of the source.
    pub fn with_presentation(
        g: &SimplicialMap,
        source: &OrderedComplex,
        presentation: Pi1Presentation,
        target_p: &Pi1Presentation,
        rho: &Representation,
    ) -> Result<Self, SimplicialError> {
        if !g.is_order_preserving(source) {
            return Err(SimplicialError::NotOrderPreserving);
        }
        let source_base = presentation.base();
        let image_hol = |a: usize, b: usize| target_p.holonomy(g.vertex_map[a], g.vertex_map[b]);
        let mut gamma_words: Vec<Word> = Vec::with_capacity(source.vertex_count());
        for v in 0..source.vertex_count() {
            let path = presentation.tree_path(v);
            let mut w = Vec::new();
            for e in path.windows(2) {
                w.extend(image_hol(e[0], e[1]));
            }
            gamma_words.push(reduce_word(&w));
        }
        if g.vertex_map[source_base] != target_p.base() {
            let mut w = Vec::new();
            for e in target_p.tree_path(g.vertex_map[source_base]).windows(2) {
                w.extend(target_p.holonomy(e[0], e[1]));
            }
            for gw in gamma_words.iter_mut() {
                let mut full = w.clone();
                full.extend(gw.iter().copied());
                *gw = reduce_word(&full);
            }
        }
        let matrices = presentation
            .generators()
            .iter()
            .map(|&(a, b)| {
                let mut w = gamma_words[a].clone();
                w.extend(image_hol(a, b));
                w.extend(invert_word(&gamma_words[b]));
                rho.evaluate(&reduce_word(&w))
            })
            .collect();
        let representation = Representation::new(&presentation, rho.dim(), matrices)?;
        let gamma = gamma_words.iter().map(|w| rho.evaluate(w)).collect();
        Ok(PulledBack { presentation, representation, gamma })
    }

    /// Pullback `C^q(target) -> C^q(source)`:
    /// `(g*c)(s) = rho(gamma(s_0)) c(g(s))`, zero on degenerate images.
    pub fn cochain_map(&self, g: &SimplicialMap, source: &OrderedComplex, target: &OrderedComplex, q: usize) -> Matrix {
        let d = self.representation.dim();
        let mut m = Matrix::zeros(source.count(q) * d, target.count(q) * d);
        for (row, s) in source.simplices(q).iter().enumerate() {
            if g.is_degenerate_on(s) {
                continue;
            }
            let col = target.index_of(&g.image_set(s)).expect("simplicial map");
            let h = &self.gamma[s[0]];
            for a in 0..d {
                for b in 0..d {
                    m[(row * d + a, col * d + b)] = h[(a, b)].clone();
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::ratio;

    fn circle_rep(x: i64) -> (OrderedComplex, Pi1Presentation, Representation) {
        let k = OrderedComplex::simplex_boundary(2);
        let p = fundamental_group(&k, 0).unwrap();
        let rho = Representation::new(&p, 1, vec![Matrix::from_i64(&[&[x]])]).unwrap();
        (k, p, rho)
    }

    #[test]
    fn counts_of_standard_complexes() {
        assert_eq!(OrderedComplex::simplex(0).counts(), vec![1]);
        assert_eq!(OrderedComplex::simplex_boundary(2).counts(), vec![3, 3]);
        assert_eq!(OrderedComplex::simplex_boundary(4).counts(), vec![5, 10, 10, 5]);
        let s1 = OrderedComplex::simplex_boundary(2);
        let s2 = OrderedComplex::simplex_boundary(3);
        assert_eq!(s1.product(&s2).counts(), vec![12, 48, 72, 36]);
    }

    #[test]
    fn betti_numbers_of_spheres() {
        assert_eq!(betti_numbers(&OrderedComplex::simplex_boundary(2)), vec![1, 1]);
        assert_eq!(betti_numbers(&OrderedComplex::simplex_boundary(4)), vec![1, 0, 0, 1]);
        let s1 = OrderedComplex::simplex_boundary(2);
        let s2 = OrderedComplex::simplex_boundary(3);
        assert_eq!(betti_numbers(&s1.product(&s2)), vec![1, 1, 1, 1]);
    }

    #[test]
    fn subdivision_counts() {
        let sd = barycentric_subdivision(&OrderedComplex::simplex(1));
        assert_eq!(sd.complex.counts(), vec![3, 2]);
        let sd = barycentric_subdivision(&OrderedComplex::simplex(2));
        assert_eq!(sd.complex.counts(), vec![7, 12, 6]);
        let sd = barycentric_subdivision(&OrderedComplex::simplex_boundary(2));
        assert_eq!(sd.complex.counts(), vec![6, 6]);
    }

    #[test]
    fn approx_identity_max_vertex() {
        let k = OrderedComplex::simplex(1);
        let sd = barycentric_subdivision(&k);
        let g = approx_identity(&sd, &k).unwrap();
        assert_eq!(g.vertex_map, vec![0, 1, 1]);
        assert!(g.is_order_preserving(&sd.complex));
    }

    #[test]
    fn subdivision_chain_map_is_chain_map() {
        let k = OrderedComplex::simplex(3);
        let sd = barycentric_subdivision(&k);
        for q in 1..=3 {
            let lhs = sd.complex.boundary_matrix(q).mul(&sd.chain_map(&k, q)).unwrap();
            let rhs = sd.chain_map(&k, q - 1).mul(&k.boundary_matrix(q)).unwrap();
            assert_eq!(lhs, rhs, "degree {q}");
        }
        let g = approx_identity(&sd, &k).unwrap();
        for q in 0..=3 {
            let back = g.chain_map(&sd.complex, &k, q).mul(&sd.chain_map(&k, q)).unwrap();
            assert_eq!(back, Matrix::identity(k.count(q)));
        }
    }

    #[test]
    fn presentations() {
        let p = fundamental_group(&OrderedComplex::simplex(2), 0).unwrap();
        assert_eq!((p.generators().len(), p.relators().len()), (1, 1));
        assert_eq!(p.relators()[0], vec![(0, 1)]);
        let p = fundamental_group(&OrderedComplex::simplex_boundary(2), 0).unwrap();
        assert_eq!((p.generators().len(), p.relators().len()), (1, 0));
        let k = OrderedComplex::simplex_boundary(3);
        let p = fundamental_group(&k, 0).unwrap();
        assert!(Representation::new(&p, 1, vec![Matrix::from_i64(&[&[2]]); 3]).is_err());
        assert!(Representation::new(&p, 1, vec![Matrix::identity(1); 3]).is_ok());
    }

    #[test]
    fn disconnected_rejected() {
        let k = OrderedComplex::new(OrderedComplex::numbered(2), &[]).unwrap();
        assert_eq!(fundamental_group(&k, 0), Err(SimplicialError::Disconnected));
    }

    #[test]
    fn circle_twisted_cohomology() {
        let (k, p, rho) = circle_rep(3);
        let c = twisted_cochain_complex(&k, &p, &rho).unwrap();
        assert_eq!(c.cohomology_dims(), vec![0, 0]);
        assert!(!rho.is_unimodular());
        let (_, _, rho) = circle_rep(1);
        assert_eq!(twisted_cochain_complex(&k, &p, &rho).unwrap().cohomology_dims(), vec![1, 1]);
        let (_, _, rho) = circle_rep(-1);
        let c = twisted_cochain_complex(&k, &p, &rho).unwrap();
        assert_eq!(crate::exactlin::abs(&determinant(&c.differential(0)).unwrap()), rat(2));
    }

    #[test]
    fn cup_front_back() {
        let k = OrderedComplex::simplex(1);
        let p = fundamental_group(&k, 0).unwrap();
        let rho = Representation::trivial(&p, 1);
        let theta = Cochain { degree: 1, values: vec![rat(5)] };
        let c = vec![rat(2), rat(7)];
        assert_eq!(cup(&k, &p, &rho, &theta, 0, &c), vec![rat(35)]);
    }

    #[test]
    fn leibniz_on_sphere() {
        let k = OrderedComplex::simplex_boundary(4);
        let p = fundamental_group(&k, 0).unwrap();
        let rho = Representation::trivial(&p, 1);
        let theta = Cochain { degree: 1, values: (0..10).map(|i| ratio(i - 3, 2)).collect() };
        let theta = theta.coboundary(&k);
        for s in 0..=1 {
            let lhs = twisted_coboundary(&k, &p, &rho, s + 2).mul(&cup_matrix(&k, &p, &rho, &theta, s)).unwrap();
            let rhs = cup_matrix(&k, &p, &rho, &theta, s + 1).mul(&twisted_coboundary(&k, &p, &rho, s)).unwrap();
            assert_eq!(lhs, rhs, "s = {s}");
        }
    }

    #[test]
    fn unit_cocycle_of_sphere() {
        let k = OrderedComplex::simplex_boundary(4);
        let th = k.orientation_cocycle().unwrap();
        let expect: Vec<Rational> = [1, -1, 1, -1, 1].iter().map(|&x| rat(x)).collect();
        assert_eq!(th.values, expect);
    }

    #[test]
    fn transport_preserves_cohomology() {
        let k = OrderedComplex::simplex_boundary(2).product(&OrderedComplex::simplex_boundary(3));
        let p = fundamental_group(&k, 0).unwrap();
        let rho = Representation::new(&p, 1, vec![Matrix::from_i64(&[&[-1]]); p.generators().len()]);
        let rho = match rho {
            Ok(r) => r,
            Err(_) => Representation::trivial(&p, 1),
        };
        let q = fundamental_group(&k, 5).unwrap();
        let rho2 = rho.transport(&p, &q);
        let a = twisted_cochain_complex(&k, &p, &rho).unwrap().cohomology_dims();
        let b = twisted_cochain_complex(&k, &q, &rho2).unwrap().cohomology_dims();
        assert_eq!(a, b);
    }
}
