use std::cmp::Ordering;
use std::collections::HashMap;

use rayon::prelude::*;

use super::{ShearFunction, VertexMap};
use crate::error::{Error, Result};
use crate::farey::{self, anchor_triangle, tessellation_to_depth, Edge, FareyVertex, Triangle};
use crate::geom::{translation_matrix, BoundaryPoint, Horocycle, MobiusMap, OrientedGeodesic};
use crate::num::Scalar;

/// Relative tolerance for images of a vertex reached through different
/// triangles, and for the two endpoint readings of a shear.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Translation by `a` along `e`, oriented so that `w` (a vertex on the side of
/// `Δ₀`) lies to the left. `None` when `a` is exactly zero.
pub fn oriented_translation(e: &Edge, w: &FareyVertex, a: &Scalar, prec: usize) -> Option<MobiusMap> {
    if a.is_exact() && a.is_zero() {
        return None;
    }
    let (i, t) = if farey::orientation(e.a(), e.b(), w) > 0 {
        (e.a(), e.b())
    } else {
        (e.b(), e.a())
    };
    let axis = OrientedGeodesic::new(i.to_boundary_point(), t.to_boundary_point()).expect("distinct endpoints");
    Some(translation_matrix(&axis, a, prec))
}

fn compose_step(
    composite: &MobiusMap,
    parent: &Triangle,
    crossed: &Edge,
    s: &ShearFunction,
) -> Result<MobiusMap> {
    let w = parent.third_vertex(crossed).expect("crossed edge is a side of the parent");
    let a = s.get(crossed)?;
    Ok(match oriented_translation(crossed, w, &a, s.precision()) {
        Some(t) => composite.compose(&t),
        None => composite.clone(),
    })
}

/// Images of the tessellation vertices under the developing map of a shear
/// function, normalized to fix `0`, `1` and `∞`.
#[derive(Clone, Debug)]
pub struct DevelopedMap {
    depth: u32,
    precision: usize,
    images: HashMap<FareyVertex, BoundaryPoint>,
}

impl DevelopedMap {
    /// Wraps a precomputed table (e.g. one read from disk).
    pub fn from_images(
        depth: u32,
        precision: usize,
        images: impl IntoIterator<Item = (FareyVertex, BoundaryPoint)>,
    ) -> DevelopedMap {
        DevelopedMap {
            depth,
            precision,
            images: images.into_iter().collect(),
        }
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn get(&self, v: &FareyVertex) -> Option<&BoundaryPoint> {
        self.images.get(v)
    }

    /// Vertex/image pairs sorted along the line.
    pub fn sorted(&self) -> Vec<(&FareyVertex, &BoundaryPoint)> {
        let mut out: Vec<_> = self.images.iter().collect();
        out.sort_by(|a, b| a.0.cmp(b.0));
        out
    }

    /// The fixed normalization points `0, 1, ∞`.
    pub fn fixed_points() -> [FareyVertex; 3] {
        [FareyVertex::int(0), FareyVertex::int(1), FareyVertex::infinity()]
    }

    /// True when every image agrees exactly with its vertex.
    pub fn is_exact_identity(&self) -> bool {
        self.images.iter().all(|(v, x)| {
            x.is_exact() && x.line_cmp(&v.to_boundary_point()) == Ordering::Equal
        })
    }

    /// Checks that the images are in the same cyclic order as the vertices.
    pub fn check_order(&self) -> Result<()> {
        let sorted = self.sorted();
        let n = sorted.len();
        if n < 3 {
            return Ok(());
        }
        // strictly increasing cyclic sequence: exactly one descent around the circle
        let mut descents = 0;
        for i in 0..n {
            let (v, x) = sorted[i];
            let (w, y) = sorted[(i + 1) % n];
            match x.line_cmp(y) {
                Ordering::Less => {}
                Ordering::Greater => descents += 1,
                Ordering::Equal => {
                    return Err(Error::OrderViolation(format!("{v} and {w} share the image {x}")));
                }
            }
        }
        if descents == 1 {
            Ok(())
        } else {
            Err(Error::OrderViolation(format!("{descents} descents among {n} images")))
        }
    }
}

impl VertexMap for DevelopedMap {
    fn image(&self, v: &FareyVertex) -> Option<BoundaryPoint> {
        self.images.get(v).cloned()
    }
}

fn record(
    images: &mut HashMap<FareyVertex, BoundaryPoint>,
    v: &FareyVertex,
    x: BoundaryPoint,
) -> Result<()> {
    match images.get(v) {
        Some(old) => {
            if !old.approx_eq(&x, CONSISTENCY_TOL) {
                return Err(Error::ConsistencyFailure(format!(
                    "vertex {v} develops to {old} and to {x}"
                )));
            }
        }
        None => {
            images.insert(v.clone(), x);
        }
    }
    Ok(())
}

/// Composite at one triangle and the images it contributes.
type LevelStep = (MobiusMap, Vec<(FareyVertex, BoundaryPoint)>);

/// Develops `s` over every triangle within dual distance `depth` of `Δ₀`.
pub fn develop(s: &ShearFunction, depth: u32) -> Result<DevelopedMap> {
    let tess = tessellation_to_depth(depth)?;
    let nodes = tess.nodes();
    let mut composites: Vec<Option<MobiusMap>> = vec![None; nodes.len()];
    composites[0] = Some(MobiusMap::identity());
    let mut images = HashMap::new();
    for v in Triangle::base().vertices() {
        images.insert(v.clone(), v.to_boundary_point());
    }
    for level in 1..=depth {
        let range = tess.level(level);
        let step: Vec<Result<LevelStep>> = range
            .clone()
            .into_par_iter()
            .map(|i| {
                let node = &nodes[i];
                let parent = node.parent.expect("non-root");
                let crossed = node.crossed.as_ref().expect("non-root");
                let base = composites[parent].as_ref().expect("parent level done");
                let m = compose_step(base, &nodes[parent].triangle, crossed, s)?;
                let imgs = node
                    .triangle
                    .vertices()
                    .iter()
                    .map(|v| (v.clone(), m.apply(&v.to_boundary_point())))
                    .collect();
                Ok((m, imgs))
            })
            .collect();
        for (i, r) in range.zip(step) {
            let (m, imgs) = r?;
            for (v, x) in imgs {
                record(&mut images, &v, x)?;
            }
            composites[i] = Some(m);
        }
    }
    Ok(DevelopedMap {
        depth,
        precision: s.precision(),
        images,
    })
}

/// Develops along the dual path to individual triangles, caching the
/// composite at every triangle visited.
pub struct PathDeveloper<'a> {
    s: &'a ShearFunction,
    cache: HashMap<Triangle, MobiusMap>,
}

impl<'a> PathDeveloper<'a> {
    pub fn new(s: &'a ShearFunction) -> PathDeveloper<'a> {
        let mut cache = HashMap::new();
        cache.insert(Triangle::base(), MobiusMap::identity());
        PathDeveloper { s, cache }
    }

    /// Composite of translations along the dual path from `Δ₀` to `t`.
    pub fn composite(&mut self, t: &Triangle) -> Result<MobiusMap> {
        if let Some(m) = self.cache.get(t) {
            return Ok(m.clone());
        }
        let path = farey::path_to_triangle(t);
        let mut cur = Triangle::base();
        let mut m = MobiusMap::identity();
        for e in path {
            let next = cur.neighbor_across(&e).expect("path edge is a side");
            m = match self.cache.get(&next) {
                Some(c) => c.clone(),
                None => {
                    let c = compose_step(&m, &cur, &e, self.s)?;
                    self.cache.insert(next.clone(), c.clone());
                    c
                }
            };
            cur = next;
        }
        Ok(m)
    }

    /// Image of a single vertex, developed through its anchor triangle.
    pub fn image(&mut self, v: &FareyVertex) -> Result<BoundaryPoint> {
        let (t, _) = anchor_triangle(v);
        Ok(self.composite(&t)?.apply(&v.to_boundary_point()))
    }
}

fn image_of(h: &dyn VertexMap, v: &FareyVertex) -> Result<BoundaryPoint> {
    h.image(v).ok_or_else(|| Error::MissingVertexImage(v.to_string()))
}

/// Shear of `h` at `f` read at the endpoint `u`: both apexes' arcs on the
/// horocycle at `h(u)`, the later one over the earlier one.
fn shear_at_endpoint(
    hu: &BoundaryPoint,
    hv: &BoundaryPoint,
    hw: [&BoundaryPoint; 2],
    prec: usize,
) -> Result<Scalar> {
    let k = Horocycle::unit(hu.clone()).conjugator();
    let x = |p: &BoundaryPoint| match k.apply(p) {
        BoundaryPoint::Finite(x) => Ok(x),
        BoundaryPoint::Infinity => Err(Error::OrderViolation("image points coincide".into())),
    };
    let xv = x(hv)?;
    let x0 = x(hw[0])?;
    let x1 = x(hw[1])?;
    let d0 = (&x0 - &xv).abs();
    let d1 = (&x1 - &xv).abs();
    let (first, second) = if x0.cmp_value(&x1) == Ordering::Less { (d0, d1) } else { (d1, d0) };
    (second / first).ln(prec)
}

/// `log(δ₁/δ₂)` for the two image triangles adjacent to `h(f)`, checked to be
/// independent of the endpoint used.
pub fn shear_from_map(h: &dyn VertexMap, f: &Edge, prec: usize) -> Result<Scalar> {
    let (u, v) = (f.a(), f.b());
    let [w0, w1] = f.apexes();
    let hu = image_of(h, u)?;
    let hv = image_of(h, v)?;
    let hw0 = image_of(h, &w0)?;
    let hw1 = image_of(h, &w1)?;
    let dom = [u, &w0, v, &w1];
    let img = [&hu, &hw0, &hv, &hw1];
    for (i, j, k) in [(0, 1, 2), (0, 2, 3), (0, 1, 3), (1, 2, 3)] {
        let want = farey::orientation(dom[i], dom[j], dom[k]);
        let got = crate::geom::cyclic_orientation(img[i], img[j], img[k]);
        if want != got {
            return Err(Error::OrderViolation(format!(
                "quadrilateral {u}, {w0}, {v}, {w1} maps to {hu}, {hw0}, {hv}, {hw1}"
            )));
        }
    }
    let su = shear_at_endpoint(&hu, &hv, [&hw0, &hw1], prec)?;
    let sv = shear_at_endpoint(&hv, &hu, [&hw0, &hw1], prec)?;
    let gap = (&su - &sv).abs().to_f64();
    if gap > CONSISTENCY_TOL * su.abs().to_f64().max(1.0) {
        return Err(Error::ConsistencyFailure(format!(
            "shear at {f} reads {su} at one endpoint and {sv} at the other"
        )));
    }
    Ok(su)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shear::IdentityMap;

    fn v(p: i64, q: i64) -> FareyVertex {
        FareyVertex::new(p, q).unwrap()
    }

    #[test]
    fn zero_shear_develops_to_exact_identity() {
        let dm = develop(&ShearFunction::zero(), 5).unwrap();
        assert!(dm.is_exact_identity());
        assert_eq!(dm.len(), 3 + 3 * ((1 << 5) - 1));
        dm.check_order().unwrap();
    }

    #[test]
    fn single_vertical_shear() {
        let sigma = 0.75;
        let s = ShearFunction::from_table([(Edge::vertical(1), Scalar::approx(sigma, 128))]);
        let dm = develop(&s, 3).unwrap();
        let h2 = dm.get(&v(2, 1)).unwrap();
        assert!(h2.approx_eq(&BoundaryPoint::finite(Scalar::approx(sigma.exp() + 1.0, 128)), 1e-15));
        let back = shear_from_map(&dm, &Edge::vertical(1), 128).unwrap();
        assert!((back.to_f64() - sigma).abs() < 1e-30_f64.max(1e-15));
        for e in [Edge::vertical(0), Edge::from_pairs((0, 1), (1, 1)).unwrap(), Edge::vertical(2)] {
            assert!(shear_from_map(&dm, &e, 128).unwrap().to_f64().abs() < 1e-30);
        }
    }

    #[test]
    fn geometric_sum_along_fan() {
        let sigma = 0.3;
        let c = 5;
        let s = ShearFunction::from_table((1..c).map(|n| (Edge::vertical(n), Scalar::approx(sigma, 128))));
        let mut pd = PathDeveloper::new(&s);
        let got = pd.image(&v(c, 1)).unwrap().to_f64();
        let want = ((c as f64 * sigma).exp() - 1.0) / (sigma.exp() - 1.0);
        assert!((got - want).abs() < 1e-12 * want);
    }

    #[test]
    fn identity_map_has_zero_shear() {
        for e in [Edge::vertical(0), Edge::from_pairs((1, 3), (1, 2)).unwrap()] {
            let s = shear_from_map(&IdentityMap, &e, 128).unwrap();
            assert!(s.is_exact() && s.is_zero());
        }
    }

    #[test]
    fn missing_and_misordered_images() {
        let dm = develop(&ShearFunction::zero(), 1).unwrap();
        assert!(matches!(
            shear_from_map(&dm, &Edge::vertical(2), 128),
            Err(Error::MissingVertexImage(_))
        ));
        let flip = crate::shear::FnMap(|x: &FareyVertex| {
            let b = x.to_boundary_point();
            Some(match b {
                BoundaryPoint::Finite(r) => {
                    if r.cmp_value(&Scalar::ratio(1, 2)) == Ordering::Equal {
                        BoundaryPoint::finite(Scalar::from_int(3))
                    } else {
                        BoundaryPoint::Finite(r)
                    }
                }
                inf => inf,
            })
        });
        assert!(matches!(
            shear_from_map(&flip, &Edge::from_pairs((0, 1), (1, 1)).unwrap(), 128),
            Err(Error::OrderViolation(_))
        ));
    }
}
