//! Boundary points of the upper half-plane, Möbius maps acting on them,
//! cross-ratios, hyperbolic translations and horocyclic arc lengths.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{Num, One, Zero};

use crate::error::{Error, Result};
use crate::num::{Real, Scalar};

/// A point of the extended real line `ℝ ∪ {∞}`.
#[derive(Clone, Debug)]
pub enum BoundaryPoint {
    Finite(Scalar),
    Infinity,
}

impl BoundaryPoint {
    pub fn finite(x: impl Into<Scalar>) -> BoundaryPoint {
        BoundaryPoint::Finite(x.into())
    }

    pub fn int(n: i64) -> BoundaryPoint {
        BoundaryPoint::Finite(Scalar::from_int(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }

    pub fn is_exact(&self) -> bool {
        match self {
            BoundaryPoint::Finite(x) => x.is_exact(),
            BoundaryPoint::Infinity => true,
        }
    }

    pub fn value(&self) -> Option<&Scalar> {
        match self {
            BoundaryPoint::Finite(x) => Some(x),
            BoundaryPoint::Infinity => None,
        }
    }

    /// Order of the line with `∞` placed after every finite point. Read
    /// cyclically this is the positive orientation of the boundary.
    pub fn line_cmp(&self, other: &BoundaryPoint) -> Ordering {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => Ordering::Equal,
            (BoundaryPoint::Infinity, _) => Ordering::Greater,
            (_, BoundaryPoint::Infinity) => Ordering::Less,
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => a.cmp_value(b),
        }
    }

    pub fn same_point(&self, other: &BoundaryPoint) -> bool {
        self.line_cmp(other) == Ordering::Equal
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            BoundaryPoint::Finite(x) => x.to_f64(),
            BoundaryPoint::Infinity => f64::INFINITY,
        }
    }

    /// Relative closeness; `∞` is only close to itself.
    pub fn approx_eq(&self, other: &BoundaryPoint, rel_tol: f64) -> bool {
        match (self, other) {
            (BoundaryPoint::Infinity, BoundaryPoint::Infinity) => true,
            (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) => {
                let diff = (a - b).abs();
                diff.is_zero() || (diff / &Scalar::one().max_value(a.abs()).max_value(b.abs())).to_f64() <= rel_tol
            }
            _ => false,
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Finite(x) => write!(f, "{x}"),
            BoundaryPoint::Infinity => f.write_str("inf"),
        }
    }
}

/// Sign of the cyclic orientation of three boundary points: `1` when they
/// occur in the positive (increasing, through `∞`) direction, `-1` for the
/// reverse, `0` if two coincide.
pub fn cyclic_orientation(a: &BoundaryPoint, b: &BoundaryPoint, c: &BoundaryPoint) -> i32 {
    let ab = a.line_cmp(b);
    let bc = b.line_cmp(c);
    let ca = c.line_cmp(a);
    if ab == Ordering::Equal || bc == Ordering::Equal || ca == Ordering::Equal {
        return 0;
    }
    // exactly one "descent" for a positively ordered triple
    let descents = [ab, bc, ca].iter().filter(|o| **o == Ordering::Greater).count();
    if descents == 1 {
        1
    } else {
        -1
    }
}

/// `cr(a,b,c,d) = (c-b)(d-a) / ((b-a)(d-c))`, with the two factors that
/// contain `∞` cancelled when one argument is infinite.
pub fn cross_ratio(
    a: &BoundaryPoint,
    b: &BoundaryPoint,
    c: &BoundaryPoint,
    d: &BoundaryPoint,
) -> Result<Scalar> {
    let pts = [a, b, c, d];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i].same_point(pts[j]) {
                return Err(Error::DegenerateQuadruple);
            }
        }
    }
    use BoundaryPoint::{Finite as F, Infinity as I};
    Ok(match (a, b, c, d) {
        (I, F(b), F(c), F(d)) => (c - b) / (d - c),
        (F(a), I, F(c), F(d)) => -((d - a) / (d - c)),
        (F(a), F(b), I, F(d)) => -((d - a) / (b - a)),
        (F(a), F(b), F(c), I) => (c - b) / (b - a),
        (F(a), F(b), F(c), F(d)) => ((c - b) * (d - a)) / ((b - a) * (d - c)),
        _ => unreachable!("at most one point is infinite"),
    })
}

/// Orientation-preserving fractional-linear map `x ↦ (ax+b)/(cx+d)`.
///
/// Float matrices are scaled to determinant one. Exact matrices are scaled
/// when the determinant is a rational square and otherwise kept as an exact
/// representative of the same map.
#[derive(Clone, Debug)]
pub struct MobiusMap {
    a: Scalar,
    b: Scalar,
    c: Scalar,
    d: Scalar,
}

impl MobiusMap {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<MobiusMap> {
        let det = &a * &d - &b * &c;
        if det.signum() <= 0 {
            return Err(Error::NonPositiveDeterminant);
        }
        if det.is_one() {
            return Ok(MobiusMap { a, b, c, d });
        }
        let prec = [&a, &b, &c, &d]
            .iter()
            .filter_map(|x| x.precision())
            .max()
            .unwrap_or(crate::num::DEFAULT_PRECISION);
        let root = det.sqrt(prec)?;
        if !root.is_exact() && det.is_exact() && [&a, &b, &c, &d].iter().all(|x| x.is_exact()) {
            return Ok(MobiusMap { a, b, c, d });
        }
        Ok(MobiusMap {
            a: &a / &root,
            b: &b / &root,
            c: &c / &root,
            d: &d / &root,
        })
    }

    /// Builds from integer entries.
    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<MobiusMap> {
        MobiusMap::new(a.into(), b.into(), c.into(), d.into())
    }

    pub(crate) fn from_entries_unchecked(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> MobiusMap {
        MobiusMap { a, b, c, d }
    }

    pub fn identity() -> MobiusMap {
        MobiusMap {
            a: Scalar::one(),
            b: Scalar::zero(),
            c: Scalar::zero(),
            d: Scalar::one(),
        }
    }

    /// `x ↦ x + t`.
    pub fn shift(t: Scalar) -> MobiusMap {
        MobiusMap {
            a: Scalar::one(),
            b: t,
            c: Scalar::zero(),
            d: Scalar::one(),
        }
    }

    pub fn entries(&self) -> [&Scalar; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn determinant(&self) -> Scalar {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_exact(&self) -> bool {
        self.entries().iter().all(|x| x.is_exact())
    }

    /// Integer entries with determinant one, if the map has such a form.
    pub fn integer_entries(&self) -> Option<[BigInt; 4]> {
        let mut out = Vec::with_capacity(4);
        for x in self.entries() {
            match x {
                Scalar::Exact(r) if r.is_integer() => out.push(r.to_integer()),
                _ => return None,
            }
        }
        let [a, b, c, d]: [BigInt; 4] = out.try_into().ok()?;
        if &a * &d - &b * &c == BigInt::one() {
            Some([a, b, c, d])
        } else {
            None
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    pub fn inverse(&self) -> MobiusMap {
        let det = self.determinant();
        if det.is_one() {
            MobiusMap {
                a: self.d.clone(),
                b: -&self.b,
                c: -&self.c,
                d: self.a.clone(),
            }
        } else {
            // adjugate represents the same map projectively
            MobiusMap {
                a: &self.d / &det,
                b: -&self.b / &det,
                c: -&self.c / &det,
                d: &self.a / &det,
            }
        }
    }

    pub fn apply(&self, x: &BoundaryPoint) -> BoundaryPoint {
        match x {
            BoundaryPoint::Infinity => {
                if self.c.is_zero() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite(&self.a / &self.c)
                }
            }
            BoundaryPoint::Finite(x) => {
                let den = &self.c * x + &self.d;
                if den.is_zero() {
                    BoundaryPoint::Infinity
                } else {
                    BoundaryPoint::Finite((&self.a * x + &self.b) / den)
                }
            }
        }
    }

    /// Entry-wise relative closeness of the two normalized representatives
    /// (up to the global sign ambiguity of PSL(2,ℝ)).
    pub fn approx_eq(&self, other: &MobiusMap, tol: f64) -> bool {
        let close = |sign: i64| {
            let s = Scalar::from_int(sign);
            self.entries()
                .iter()
                .zip(other.entries())
                .all(|(x, y)| (*x - &(&s * y)).abs().to_f64() <= tol * (1.0 + y.abs().to_f64()))
        };
        close(1) || close(-1)
    }
}

/// Raw matrix sending the given triple to `(0, 1, ∞)`; the determinant is
/// nonzero but its sign follows the orientation of the triple.
fn to_standard_triple(z: [&BoundaryPoint; 3]) -> Result<[Scalar; 4]> {
    use BoundaryPoint::{Finite as F, Infinity as I};
    if z[0].same_point(z[1]) || z[1].same_point(z[2]) || z[0].same_point(z[2]) {
        return Err(Error::DegenerateTriple);
    }
    Ok(match (z[0], z[1], z[2]) {
        (I, F(z2), F(z3)) => [Scalar::zero(), z2 - z3, Scalar::one(), -z3],
        (F(z1), I, F(z3)) => [Scalar::one(), -z1, Scalar::one(), -z3],
        (F(z1), F(z2), I) => [Scalar::one(), -z1, Scalar::zero(), z2 - z1],
        (F(z1), F(z2), F(z3)) => {
            let k = z2 - z3;
            let l = z2 - z1;
            [k.clone(), -(z1 * &k), l.clone(), -(z3 * &l)]
        }
        _ => unreachable!("distinct points"),
    })
}

/// The unique Möbius map sending `src[i] ↦ dst[i]`.
pub fn mobius_from_triples(src: [&BoundaryPoint; 3], dst: [&BoundaryPoint; 3]) -> Result<MobiusMap> {
    let so = cyclic_orientation(src[0], src[1], src[2]);
    let to = cyclic_orientation(dst[0], dst[1], dst[2]);
    if so == 0 || to == 0 {
        return Err(Error::DegenerateTriple);
    }
    if so != to {
        return Err(Error::OrientationMismatch);
    }
    let [sa, sb, sc, sd] = to_standard_triple(src)?;
    let [ta, tb, tc, td] = to_standard_triple(dst)?;
    // adj(T) · S; both determinants carry the same sign
    let (ia, ib, ic, id) = (td, -tb, -tc, ta);
    MobiusMap::new(
        &ia * &sa + &ib * &sc,
        &ia * &sb + &ib * &sd,
        &ic * &sa + &id * &sc,
        &ic * &sb + &id * &sd,
    )
}

/// Geodesic of ℍ with an orientation from `initial` to `terminal`.
#[derive(Clone, Debug)]
pub struct OrientedGeodesic {
    initial: BoundaryPoint,
    terminal: BoundaryPoint,
}

impl OrientedGeodesic {
    pub fn new(initial: BoundaryPoint, terminal: BoundaryPoint) -> Result<OrientedGeodesic> {
        if initial.same_point(&terminal) {
            return Err(Error::DegenerateAxis);
        }
        Ok(OrientedGeodesic { initial, terminal })
    }

    pub fn initial(&self) -> &BoundaryPoint {
        &self.initial
    }

    pub fn terminal(&self) -> &BoundaryPoint {
        &self.terminal
    }

    pub fn reversed(&self) -> OrientedGeodesic {
        OrientedGeodesic {
            initial: self.terminal.clone(),
            terminal: self.initial.clone(),
        }
    }

    pub fn has_endpoint(&self, p: &BoundaryPoint) -> bool {
        self.initial.same_point(p) || self.terminal.same_point(p)
    }

    /// The endpoint other than `p`.
    pub fn other_endpoint(&self, p: &BoundaryPoint) -> Option<&BoundaryPoint> {
        if self.initial.same_point(p) {
            Some(&self.terminal)
        } else if self.terminal.same_point(p) {
            Some(&self.initial)
        } else {
            None
        }
    }

    /// A map with positive determinant sending `initial ↦ 0`, `terminal ↦ ∞`.
    fn normalizer(&self) -> MobiusMap {
        match (&self.initial, &self.terminal) {
            (BoundaryPoint::Finite(i), BoundaryPoint::Infinity) => {
                MobiusMap::from_entries_unchecked(Scalar::one(), -i, Scalar::zero(), Scalar::one())
            }
            (BoundaryPoint::Infinity, BoundaryPoint::Finite(t)) => {
                MobiusMap::from_entries_unchecked(Scalar::zero(), Scalar::from_int(-1), Scalar::one(), -t)
            }
            (BoundaryPoint::Finite(i), BoundaryPoint::Finite(t)) => {
                // det of [[1,-i],[1,-t]] is i - t; flip the top row when negative
                let sign = if (i - t).signum() > 0 { 1 } else { -1 };
                let s = Scalar::from_int(sign);
                MobiusMap::from_entries_unchecked(s.clone(), -(&s * i), Scalar::one(), -t)
            }
            _ => unreachable!("distinct endpoints"),
        }
    }
}

/// Hyperbolic translation along `axis` by signed length `a`. For `a ≥ 0` the
/// initial endpoint is repelling.
pub fn translation_matrix(axis: &OrientedGeodesic, a: &Scalar, prec: usize) -> MobiusMap {
    if a.is_zero() {
        return MobiusMap::identity();
    }
    let half = (a / &Scalar::from_int(2)).exp(prec);
    let half_inv = half.recip();
    let n = axis.normalizer();
    let [na, nb, nc, nd] = n.entries();
    let det = n.determinant();
    // adj(N) · diag(λ, 1/λ) · N / det(N)
    let (a11, a12, a21, a22) = (nd.clone(), -nb, -nc, na.clone());
    let m11 = &a11 * &half;
    let m12 = &a12 * &half_inv;
    let m21 = &a21 * &half;
    let m22 = &a22 * &half_inv;
    MobiusMap::from_entries_unchecked(
        (&m11 * na + &m12 * nc) / &det,
        (&m11 * nb + &m12 * nd) / &det,
        (&m21 * na + &m22 * nc) / &det,
        (&m21 * nb + &m22 * nd) / &det,
    )
}

/// The integer unimodular matrix `[[a, b], [q, -p]]` sending `p/q ↦ ∞`, with
/// the upper row fixed by `0 ≤ a < q`. Returns the identity for `q = 0`.
pub fn integer_conjugator_to_infinity(p: &BigInt, q: &BigInt) -> [BigInt; 4] {
    if q.is_zero() {
        return [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()];
    }
    // a(-p) - b q = 1
    let e = (-p).extended_gcd(q);
    debug_assert!(e.gcd.is_one(), "p/q must be reduced");
    let (mut a, mut b) = (e.x, -e.y);
    let k = a.div_floor(q);
    a -= &k * q;
    b += &k * p;
    [a, b, q.clone(), -p]
}

/// A horocycle, given by its base point and its Euclidean height after the
/// base is moved to `∞` by the canonical conjugation.
#[derive(Clone, Debug)]
pub struct Horocycle {
    base: BoundaryPoint,
    scale: Scalar,
}

impl Horocycle {
    pub fn new(base: BoundaryPoint, scale: Scalar) -> Result<Horocycle> {
        if scale.signum() <= 0 {
            return Err(Error::NonPositiveScale);
        }
        Ok(Horocycle { base, scale })
    }

    pub fn unit(base: BoundaryPoint) -> Horocycle {
        Horocycle {
            base,
            scale: Scalar::one(),
        }
    }

    pub fn base(&self) -> &BoundaryPoint {
        &self.base
    }

    pub fn scale(&self) -> &Scalar {
        &self.scale
    }

    /// Canonical map sending the base to `∞`: the identity at `∞`, the integer
    /// conjugator at an exact rational, `x ↦ -1/(x-β)` at an inexact point.
    pub fn conjugator(&self) -> MobiusMap {
        match &self.base {
            BoundaryPoint::Infinity => MobiusMap::identity(),
            BoundaryPoint::Finite(Scalar::Exact(r)) => {
                let [a, b, c, d] = integer_conjugator_to_infinity(r.numer(), r.denom());
                MobiusMap::from_entries_unchecked(
                    Scalar::from_bigint(a),
                    Scalar::from_bigint(b),
                    Scalar::from_bigint(c),
                    Scalar::from_bigint(d),
                )
            }
            BoundaryPoint::Finite(beta) => MobiusMap::from_entries_unchecked(
                Scalar::zero(),
                Scalar::from_int(-1),
                Scalar::one(),
                -beta,
            ),
        }
    }
}

/// Length of the arc of `h` between two geodesics ending at its base.
pub fn horocyclic_arc_length(
    h: &Horocycle,
    g1: &OrientedGeodesic,
    g2: &OrientedGeodesic,
) -> Result<Scalar> {
    let o1 = g1.other_endpoint(&h.base).ok_or(Error::NotBasedAtTip)?;
    let o2 = g2.other_endpoint(&h.base).ok_or(Error::NotBasedAtTip)?;
    let k = h.conjugator();
    let (x1, x2) = match (k.apply(o1), k.apply(o2)) {
        (BoundaryPoint::Finite(x1), BoundaryPoint::Finite(x2)) => (x1, x2),
        _ => return Err(Error::NotBasedAtTip),
    };
    Ok((x1 - x2).abs() / &h.scale)
}

/// Complex-entry Möbius map, used only for the disk model.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMobius<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub c: Complex<T>,
    pub d: Complex<T>,
}

impl<T: Clone + Num + std::ops::Neg<Output = T>> ComplexMobius<T> {
    /// `None` stands for `∞`.
    pub fn apply(&self, z: Option<&Complex<T>>) -> Option<Complex<T>> {
        match z {
            None => {
                if self.c.is_zero() {
                    None
                } else {
                    Some(self.a.clone() / self.c.clone())
                }
            }
            Some(z) => {
                let den = self.c.clone() * z.clone() + self.d.clone();
                if den.is_zero() {
                    None
                } else {
                    Some((self.a.clone() * z.clone() + self.b.clone()) / den)
                }
            }
        }
    }
}

/// The fixed change of model `z ↦ (i - z)/(i + z)` sending `(0, 1, ∞)` to
/// `(1, i, -1)`.
pub fn model_map_halfplane_to_disk<T: Clone + Num + std::ops::Neg<Output = T>>() -> ComplexMobius<T> {
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    ComplexMobius {
        a: -one.clone(),
        b: i.clone(),
        c: one,
        d: i,
    }
}

/// Disk-model image of a boundary point as an `f64` pair on the unit circle.
pub fn disk_point(x: &BoundaryPoint) -> (f64, f64) {
    match x {
        BoundaryPoint::Infinity => (-1.0, 0.0),
        BoundaryPoint::Finite(v) => {
            let t = v.to_f64();
            // (i - t)/(i + t) = (1 - t^2 + 2ti)/(1 + t^2)
            let den = 1.0 + t * t;
            if !den.is_finite() {
                return (-1.0, 0.0);
            }
            ((1.0 - t * t) / den, 2.0 * t / den)
        }
    }
}

/// Cross-ratio of four points of the Riemann sphere (`None` is `∞`).
pub fn cross_ratio_complex<T: Clone + Num + std::ops::Neg<Output = T>>(
    a: Option<&Complex<T>>,
    b: Option<&Complex<T>>,
    c: Option<&Complex<T>>,
    d: Option<&Complex<T>>,
) -> Result<Complex<T>> {
    let pts = [a, b, c, d];
    for i in 0..4 {
        for j in i + 1..4 {
            if pts[i] == pts[j] {
                return Err(Error::DegenerateQuadruple);
            }
        }
    }
    let sub = |x: &Complex<T>, y: &Complex<T>| x.clone() - y.clone();
    Ok(match (a, b, c, d) {
        (None, Some(b), Some(c), Some(d)) => sub(c, b) / sub(d, c),
        (Some(a), None, Some(c), Some(d)) => -(sub(d, a) / sub(d, c)),
        (Some(a), Some(b), None, Some(d)) => -(sub(d, a) / sub(b, a)),
        (Some(a), Some(b), Some(c), None) => sub(c, b) / sub(b, a),
        (Some(a), Some(b), Some(c), Some(d)) => (sub(c, b) * sub(d, a)) / (sub(b, a) * sub(d, c)),
        _ => unreachable!("at most one point is infinite"),
    })
}

/// Signed hyperbolic translation length convenience for tests and callers
/// that hold an `f64`.
pub fn translation_matrix_f64(axis: &OrientedGeodesic, a: f64, prec: usize) -> MobiusMap {
    translation_matrix(axis, &Scalar::Approx(Real::from_f64(a, prec)), prec)
}
