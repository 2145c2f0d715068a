//! The Farey tessellation of the upper half-plane: vertices `p/q`, unimodular
//! edges, ideal triangles, the dual tree rooted at `Δ₀ = (0, 1, ∞)`, and fans.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::geom::{BoundaryPoint, MobiusMap};
use crate::num::Scalar;

/// Largest depth accepted by [`tessellation_to_depth`].
pub const DEPTH_GUARD: u32 = 30;

/// Integer unimodular matrix `[a, b, c, d]` acting on vertices.
pub type IntMatrix = [BigInt; 4];

/// An extended rational `p/q` with `q ≥ 0`, `gcd(p, q) = 1`; `1/0` is `∞`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FareyVertex {
    p: BigInt,
    q: BigInt,
}

impl FareyVertex {
    /// Validating constructor; the pair must already be reduced with `q ≥ 0`.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<FareyVertex> {
        let (p, q) = (p.into(), q.into());
        let ok = if q.is_zero() {
            p.is_one()
        } else {
            q.is_positive() && p.gcd(&q).is_one()
        };
        if ok {
            Ok(FareyVertex { p, q })
        } else {
            Err(Error::InvalidVertex(format!("{p}/{q}")))
        }
    }

    /// Reduces an arbitrary nonzero vector `(p, q)` to its vertex.
    pub fn reduced(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<FareyVertex> {
        let (p, q) = (p.into(), q.into());
        if p.is_zero() && q.is_zero() {
            return Err(Error::InvalidVertex("0/0".into()));
        }
        let g = p.gcd(&q);
        Ok(Self::from_vector(p / &g, q / &g))
    }

    /// Sign-normalizes a primitive vector.
    fn from_vector(p: BigInt, q: BigInt) -> FareyVertex {
        if q.is_negative() || (q.is_zero() && p.is_negative()) {
            FareyVertex { p: -p, q: -q }
        } else {
            FareyVertex { p, q }
        }
    }

    pub fn infinity() -> FareyVertex {
        FareyVertex {
            p: BigInt::one(),
            q: BigInt::zero(),
        }
    }

    pub fn int(n: i64) -> FareyVertex {
        FareyVertex {
            p: n.into(),
            q: BigInt::one(),
        }
    }

    pub fn from_rational(r: &BigRational) -> FareyVertex {
        FareyVertex {
            p: r.numer().clone(),
            q: r.denom().clone(),
        }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn is_infinity(&self) -> bool {
        self.q.is_zero()
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_infinity() {
            None
        } else {
            Some(BigRational::new(self.p.clone(), self.q.clone()))
        }
    }

    pub fn to_boundary_point(&self) -> BoundaryPoint {
        match self.to_rational() {
            Some(r) => BoundaryPoint::Finite(Scalar::Exact(r)),
            None => BoundaryPoint::Infinity,
        }
    }

    /// `p_a q_b − q_a p_b`.
    pub fn det(&self, other: &FareyVertex) -> BigInt {
        &self.p * &other.q - &self.q * &other.p
    }

    pub fn is_neighbor(&self, other: &FareyVertex) -> bool {
        self.det(other).abs().is_one()
    }

    /// Order of the line, `∞` last.
    pub fn line_cmp(&self, other: &FareyVertex) -> Ordering {
        match (self.is_infinity(), other.is_infinity()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.p * &other.q).cmp(&(&other.p * &self.q)),
        }
    }

    /// File order: by `(q, p)`, `∞` last.
    pub fn file_cmp(&self, other: &FareyVertex) -> Ordering {
        match (self.is_infinity(), other.is_infinity()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (false, false) => (&self.q, &self.p).cmp(&(&other.q, &other.p)),
        }
    }

    /// Image under an integer matrix.
    pub fn transform(&self, m: &IntMatrix) -> FareyVertex {
        let [a, b, c, d] = m;
        FareyVertex::from_vector(a * &self.p + b * &self.q, c * &self.p + d * &self.q)
    }

    fn add(&self, other: &FareyVertex) -> FareyVertex {
        FareyVertex::from_vector(&self.p + &other.p, &self.q + &other.q)
    }

    fn sub(&self, other: &FareyVertex) -> FareyVertex {
        FareyVertex::from_vector(&self.p - &other.p, &self.q - &other.q)
    }
}

impl PartialOrd for FareyVertex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FareyVertex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.line_cmp(other)
    }
}

impl fmt::Display for FareyVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            f.write_str("inf")
        } else if self.q.is_one() {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl fmt::Debug for FareyVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Sign of the cyclic orientation of three vertices (see
/// [`crate::geom::cyclic_orientation`]).
pub fn orientation(a: &FareyVertex, b: &FareyVertex, c: &FareyVertex) -> i32 {
    let ab = a.line_cmp(b);
    let bc = b.line_cmp(c);
    let ca = c.line_cmp(a);
    if ab.is_eq() || bc.is_eq() || ca.is_eq() {
        return 0;
    }
    let descents = [ab, bc, ca].iter().filter(|o| o.is_gt()).count();
    if descents == 1 {
        1
    } else {
        -1
    }
}

/// `(p_a + p_b)/(q_a + q_b)` for Farey neighbours.
pub fn mediant(a: &FareyVertex, b: &FareyVertex) -> Result<FareyVertex> {
    if !a.is_neighbor(b) {
        return Err(Error::NotNeighbors(a.to_string(), b.to_string()));
    }
    Ok(a.add(b))
}

/// An edge of the tessellation, endpoints in line order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Edge {
    a: FareyVertex,
    b: FareyVertex,
}

impl Edge {
    pub fn new(x: FareyVertex, y: FareyVertex) -> Result<Edge> {
        if !x.is_neighbor(&y) {
            return Err(Error::NotNeighbors(x.to_string(), y.to_string()));
        }
        Ok(Edge::unchecked(x, y))
    }

    fn unchecked(x: FareyVertex, y: FareyVertex) -> Edge {
        if x.line_cmp(&y).is_lt() {
            Edge { a: x, b: y }
        } else {
            Edge { a: y, b: x }
        }
    }

    /// Convenience for small literals: `Edge::from_pairs((p1, q1), (p2, q2))`.
    pub fn from_pairs(x: (i64, i64), y: (i64, i64)) -> Result<Edge> {
        Edge::new(FareyVertex::new(x.0, x.1)?, FareyVertex::new(y.0, y.1)?)
    }

    /// The vertical edge `(n, ∞)`.
    pub fn vertical(n: i64) -> Edge {
        Edge {
            a: FareyVertex::int(n),
            b: FareyVertex::infinity(),
        }
    }

    pub fn a(&self) -> &FareyVertex {
        &self.a
    }

    pub fn b(&self) -> &FareyVertex {
        &self.b
    }

    pub fn endpoints(&self) -> [&FareyVertex; 2] {
        [&self.a, &self.b]
    }

    pub fn has_endpoint(&self, v: &FareyVertex) -> bool {
        &self.a == v || &self.b == v
    }

    pub fn other(&self, v: &FareyVertex) -> Option<&FareyVertex> {
        if &self.a == v {
            Some(&self.b)
        } else if &self.b == v {
            Some(&self.a)
        } else {
            None
        }
    }

    /// The two vertices forming triangles with this edge.
    pub fn apexes(&self) -> [FareyVertex; 2] {
        [self.a.add(&self.b), self.a.sub(&self.b)]
    }

    pub fn transform(&self, m: &IntMatrix) -> Edge {
        Edge::unchecked(self.a.transform(m), self.b.transform(m))
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// File order: smaller endpoint by `(q, p)`, then the other endpoint with `∞` last.
impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.a.file_cmp(&other.a).then_with(|| self.b.file_cmp(&other.b))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An ideal triangle, vertices in increasing circular order starting from the
/// smallest on the line.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Triangle {
    v: [FareyVertex; 3],
}

impl Triangle {
    pub fn new(x: FareyVertex, y: FareyVertex, z: FareyVertex) -> Result<Triangle> {
        for (s, t) in [(&x, &y), (&y, &z), (&x, &z)] {
            if !s.is_neighbor(t) {
                return Err(Error::NotNeighbors(s.to_string(), t.to_string()));
            }
        }
        Ok(Triangle::unchecked([x, y, z]))
    }

    fn unchecked(mut v: [FareyVertex; 3]) -> Triangle {
        v.sort();
        Triangle { v }
    }

    /// `Δ₀ = (0, 1, ∞)`.
    pub fn base() -> Triangle {
        Triangle {
            v: [FareyVertex::int(0), FareyVertex::int(1), FareyVertex::infinity()],
        }
    }

    pub fn vertices(&self) -> &[FareyVertex; 3] {
        &self.v
    }

    /// Sides in cyclic order `(v0,v1), (v1,v2), (v2,v0)`.
    pub fn edges(&self) -> [Edge; 3] {
        let [x, y, z] = &self.v;
        [
            Edge::unchecked(x.clone(), y.clone()),
            Edge::unchecked(y.clone(), z.clone()),
            Edge::unchecked(z.clone(), x.clone()),
        ]
    }

    pub fn has_vertex(&self, v: &FareyVertex) -> bool {
        self.v.contains(v)
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        self.has_vertex(&e.a) && self.has_vertex(&e.b)
    }

    pub fn third_vertex(&self, e: &Edge) -> Option<&FareyVertex> {
        if !self.has_edge(e) {
            return None;
        }
        self.v.iter().find(|v| !e.has_endpoint(v))
    }

    /// The triangle on the other side of the side `e`.
    pub fn neighbor_across(&self, e: &Edge) -> Option<Triangle> {
        let w = self.third_vertex(e)?;
        let [s, t] = e.apexes();
        let apex = if &s == w { t } else { s };
        Some(Triangle::unchecked([e.a.clone(), e.b.clone(), apex]))
    }

    /// Rotates the vertices so `v` comes first, keeping circular order.
    pub fn rotated_to(&self, v: &FareyVertex) -> Option<[FareyVertex; 3]> {
        let i = self.v.iter().position(|x| x == v)?;
        Some([
            self.v[i].clone(),
            self.v[(i + 1) % 3].clone(),
            self.v[(i + 2) % 3].clone(),
        ])
    }

    /// Side whose complementary boundary arc contains `x` (which must not be
    /// a vertex).
    fn side_facing(&self, x: &FareyVertex) -> Edge {
        let [a, b, c] = &self.v;
        if a < x && x < b {
            Edge::unchecked(a.clone(), b.clone())
        } else if b < x && x < c {
            Edge::unchecked(b.clone(), c.clone())
        } else {
            Edge::unchecked(c.clone(), a.clone())
        }
    }
}

impl fmt::Display for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.v[0], self.v[1], self.v[2])
    }
}

impl fmt::Debug for Triangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Walks the dual tree from `Δ₀` toward `target`, returning the visited
/// triangles (first is `Δ₀`) and the crossed edges.
fn descend(target: impl Fn(&Triangle) -> Option<FareyVertex>) -> (Vec<Triangle>, Vec<Edge>) {
    let mut tri = Triangle::base();
    let mut tris = vec![tri.clone()];
    let mut crossed = Vec::new();
    while let Some(x) = target(&tri) {
        let e = tri.side_facing(&x);
        tri = tri.neighbor_across(&e).expect("side of the current triangle");
        crossed.push(e);
        tris.push(tri.clone());
    }
    (tris, crossed)
}

/// The triangle in which `v` first appears when walking out from `Δ₀`, and
/// the edges crossed to get there.
pub fn anchor_triangle(v: &FareyVertex) -> (Triangle, Vec<Edge>) {
    let (mut tris, crossed) = descend(|t| (!t.has_vertex(v)).then(|| v.clone()));
    (tris.pop().expect("nonempty walk"), crossed)
}

/// Dual-tree path from `Δ₀` to any Farey triangle, independent of a built
/// tessellation.
pub fn path_to_triangle(t: &Triangle) -> Vec<Edge> {
    descend(|cur| {
        if cur == t {
            None
        } else {
            t.v.iter().find(|x| !cur.has_vertex(x)).cloned()
        }
    })
    .1
}

/// Depth of a vertex: the dual distance of its anchor triangle from `Δ₀`.
pub fn vertex_depth(v: &FareyVertex) -> u32 {
    anchor_triangle(v).1.len() as u32
}

#[derive(Clone, Debug)]
pub struct TriangleNode {
    pub triangle: Triangle,
    pub parent: Option<usize>,
    pub crossed: Option<Edge>,
    pub depth: u32,
}

/// All triangles within dual distance `depth` of `Δ₀`, in breadth-first order.
#[derive(Clone, Debug)]
pub struct Tessellation {
    depth: u32,
    nodes: Vec<TriangleNode>,
    index: HashMap<Triangle, usize>,
    level_starts: Vec<usize>,
    crossed_by: HashMap<Edge, usize>,
}

/// Builds the tessellation to depth `d` by expanding the dual tree.
pub fn tessellation_to_depth(d: u32) -> Result<Tessellation> {
    if d > DEPTH_GUARD {
        return Err(Error::DepthLimit {
            depth: d,
            guard: DEPTH_GUARD,
        });
    }
    let mut tess = Tessellation {
        depth: d,
        nodes: Vec::new(),
        index: HashMap::new(),
        level_starts: vec![0],
        crossed_by: HashMap::new(),
    };
    tess.insert(TriangleNode {
        triangle: Triangle::base(),
        parent: None,
        crossed: None,
        depth: 0,
    })?;
    let mut frontier = vec![0usize];
    for level in 1..=d {
        tess.level_starts.push(tess.nodes.len());
        let mut next = Vec::with_capacity(frontier.len() * 2 + 1);
        for &i in &frontier {
            let node = tess.nodes[i].clone();
            for e in node.triangle.edges() {
                if node.crossed.as_ref() == Some(&e) {
                    continue;
                }
                let child = node.triangle.neighbor_across(&e).expect("own side");
                let j = tess.insert(TriangleNode {
                    triangle: child,
                    parent: Some(i),
                    crossed: Some(e),
                    depth: level,
                })?;
                next.push(j);
            }
        }
        frontier = next;
    }
    tess.level_starts.push(tess.nodes.len());
    Ok(tess)
}

impl Tessellation {
    fn insert(&mut self, node: TriangleNode) -> Result<usize> {
        if self.index.contains_key(&node.triangle) {
            return Err(Error::NotATree(format!("triangle {} reached twice", node.triangle)));
        }
        let i = self.nodes.len();
        self.index.insert(node.triangle.clone(), i);
        if let Some(e) = &node.crossed {
            self.crossed_by.insert(e.clone(), i);
        }
        self.nodes.push(node);
        Ok(i)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TriangleNode] {
        &self.nodes
    }

    pub fn triangles(&self) -> impl Iterator<Item = &Triangle> {
        self.nodes.iter().map(|n| &n.triangle)
    }

    /// Node indices of triangles at exactly dual distance `level`.
    pub fn level(&self, level: u32) -> std::ops::Range<usize> {
        let l = level as usize;
        self.level_starts[l]..self.level_starts[l + 1]
    }

    pub fn index_of(&self, t: &Triangle) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn contains(&self, t: &Triangle) -> bool {
        self.index.contains_key(t)
    }

    /// Every side of every triangle, in file order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut set: Vec<Edge> = self.nodes.iter().flat_map(|n| n.triangle.edges()).collect();
        set.sort();
        set.dedup();
        set
    }

    /// Sides of triangles at depth `≤ d`, in file order.
    pub fn edges_to_depth(&self, d: u32) -> Vec<Edge> {
        let end = self.level_starts[(d.min(self.depth) + 1) as usize];
        let mut set: Vec<Edge> = self.nodes[..end].iter().flat_map(|n| n.triangle.edges()).collect();
        set.sort();
        set.dedup();
        set
    }

    /// Vertices of triangles at depth `≤ d`, sorted on the line.
    pub fn vertices_to_depth(&self, d: u32) -> Vec<FareyVertex> {
        let end = self.level_starts[(d.min(self.depth) + 1) as usize];
        let mut vs: Vec<FareyVertex> = self.nodes[..end]
            .iter()
            .flat_map(|n| n.triangle.vertices().iter().cloned())
            .collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn vertices(&self) -> Vec<FareyVertex> {
        self.vertices_to_depth(self.depth)
    }

    /// The two triangles of the tessellation sharing `e`, parent side first.
    pub fn adjacent_triangles(&self, e: &Edge) -> Option<(usize, usize)> {
        let child = *self.crossed_by.get(e)?;
        Some((self.nodes[child].parent.expect("crossed implies parent"), child))
    }

    /// Crossed edges from `Δ₀` to `t`; empty for `Δ₀`.
    pub fn dual_path(&self, t: &Triangle) -> Result<Vec<Edge>> {
        let mut i = self.index_of(t).ok_or_else(|| Error::UnknownTriangle(t.to_string()))?;
        let mut path = Vec::with_capacity(self.nodes[i].depth as usize);
        while let Some(e) = &self.nodes[i].crossed {
            path.push(e.clone());
            i = self.nodes[i].parent.expect("crossed implies parent");
        }
        path.reverse();
        Ok(path)
    }
}

/// Free-function form of [`Tessellation::dual_path`].
pub fn dual_path(t: &Triangle, tess: &Tessellation) -> Result<Vec<Edge>> {
    tess.dual_path(t)
}

fn int_matrix(a: i64, b: i64, c: i64, d: i64) -> IntMatrix {
    [a.into(), b.into(), c.into(), d.into()]
}

pub fn int_identity() -> IntMatrix {
    int_matrix(1, 0, 0, 1)
}

/// Inverse of a determinant-one integer matrix.
pub fn int_inverse(m: &IntMatrix) -> IntMatrix {
    let [a, b, c, d] = m;
    [d.clone(), -b, -c, a.clone()]
}

pub fn int_compose(m: &IntMatrix, n: &IntMatrix) -> IntMatrix {
    let [a, b, c, d] = m;
    let [e, f, g, h] = n;
    [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h]
}

pub fn int_to_mobius(m: &IntMatrix) -> MobiusMap {
    let [a, b, c, d] = m.clone().map(Scalar::from_bigint);
    MobiusMap::new(a, b, c, d).expect("determinant one")
}

/// Integer matrix with determinant one sending `tip ↦ ∞` and its anchor
/// triangle `(tip, x, y)` (circular order) to `(∞, 0, 1)`.
pub fn canonical_conjugator_int(tip: &FareyVertex) -> IntMatrix {
    if tip.is_infinity() {
        return int_identity();
    }
    let (anchor, _) = anchor_triangle(tip);
    let [t, x, _] = anchor.rotated_to(tip).expect("anchor contains tip");
    // rows are (q_x, -p_x) and (q_t, -p_t), scaled so the determinant is one
    let s = x.det(&t);
    [&s * &x.q, -(&s * &x.p), t.q.clone(), -t.p.clone()]
}

pub fn canonical_conjugator(tip: &FareyVertex) -> MobiusMap {
    int_to_mobius(&canonical_conjugator_int(tip))
}

/// The edges at `tip`, indexed by the integer their conjugated image ends at.
#[derive(Clone, Debug)]
pub struct Fan {
    tip: FareyVertex,
    conjugator: IntMatrix,
    inverse: IntMatrix,
    k_min: i64,
    k_max: i64,
}

impl Fan {
    pub fn at(tip: &FareyVertex) -> Fan {
        let conjugator = canonical_conjugator_int(tip);
        let inverse = int_inverse(&conjugator);
        Fan {
            tip: tip.clone(),
            conjugator,
            inverse,
            k_min: 0,
            k_max: 0,
        }
    }

    pub fn tip(&self) -> &FareyVertex {
        &self.tip
    }

    pub fn conjugator(&self) -> &IntMatrix {
        &self.conjugator
    }

    pub fn conjugator_map(&self) -> MobiusMap {
        int_to_mobius(&self.conjugator)
    }

    pub fn range(&self) -> std::ops::RangeInclusive<i64> {
        self.k_min..=self.k_max
    }

    /// `C⁻¹(n)`: the far endpoint of `f_n`.
    pub fn spoke(&self, n: i64) -> FareyVertex {
        FareyVertex::int(n).transform(&self.inverse)
    }

    pub fn edge(&self, n: i64) -> Edge {
        Edge::unchecked(self.tip.clone(), self.spoke(n))
    }

    /// Edges of the window, lowest index first.
    pub fn edges(&self) -> Vec<Edge> {
        self.range().map(|n| self.edge(n)).collect()
    }

    /// Index `n` with `e = f_n`, if `e` has the tip as an endpoint.
    pub fn index_of(&self, e: &Edge) -> Option<i64> {
        let other = e.other(&self.tip)?;
        let img = other.transform(&self.conjugator);
        debug_assert!(img.q.is_one());
        i64::try_from(&img.p).ok()
    }
}

/// Fan at `tip` restricted to indices `k_min..=k_max`.
pub fn fan_window(tip: &FareyVertex, k_min: i64, k_max: i64) -> Result<Fan> {
    if k_min > k_max {
        return Err(Error::InvalidArgument(format!("empty window [{k_min}, {k_max}]")));
    }
    let mut fan = Fan::at(tip);
    fan.k_min = k_min;
    fan.k_max = k_max;
    Ok(fan)
}
