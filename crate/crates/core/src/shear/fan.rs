use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{ShearFunction, VertexMap};
use crate::error::{Error, Result};
use crate::farey::{Edge, Fan, FareyVertex};
use crate::geom::{BoundaryPoint, Horocycle};
use crate::num::Scalar;

use super::develop::DevelopedMap;

/// Agreement required between the two ways of computing fan arcs.
const DELTA_TOL: f64 = 1e-9;

/// The developing map of a shear function supported on the fan at `∞`,
/// restricted to the real line: identity on `[0, 1]`, affine on each
/// `[n, n+1]`, with `h(n+1) − h(n) = e^{s(f_1)+⋯+s(f_n)}` to the right of 1
/// and `h(n) − h(n−1) = e^{−s(f_n)−⋯−s(f_0)}` to the left of 0.
#[derive(Clone, Debug)]
pub struct SingleFanMap {
    s: ShearFunction,
    lo: i64,
    /// `h(lo), h(lo+1), …, h(hi)`
    values: Vec<Scalar>,
}

impl SingleFanMap {
    /// Precomputes breakpoints at every integer in `[-bound, bound]`.
    pub fn new(s: &ShearFunction, bound: u32) -> Result<SingleFanMap> {
        for e in s.table().keys() {
            if !e.b().is_infinity() {
                return Err(Error::NotSingleFan(e.to_string()));
            }
        }
        if !s.default_value().is_zero() {
            return Err(Error::NotSingleFan(format!("default value {}", s.default_value())));
        }
        let n = bound as i64;
        let prec = s.precision();
        let mut right = vec![Scalar::zero()];
        let mut partial = Scalar::zero();
        for k in 0..n {
            if k > 0 {
                partial = &partial + &s.get(&Edge::vertical(k))?;
            }
            let step = partial.exp(prec);
            let next = right.last().expect("nonempty") + &step;
            right.push(next);
        }
        let mut left = Vec::with_capacity(n as usize);
        let mut partial = Scalar::zero();
        let mut h = Scalar::zero();
        for k in (-n + 1..=0).rev() {
            // arc between f_{k-1} and f_k
            partial = &partial - &s.get(&Edge::vertical(k))?;
            h = &h - &partial.exp(prec);
            left.push(h.clone());
        }
        left.reverse();
        left.extend(right);
        Ok(SingleFanMap {
            s: s.clone(),
            lo: -n,
            values: left,
        })
    }

    pub fn bound(&self) -> i64 {
        -self.lo
    }

    /// `h(n)` at an integer, extending the table on the fly when outside it.
    pub fn at_integer(&self, n: i64) -> Result<Scalar> {
        let hi = self.lo + self.values.len() as i64 - 1;
        if (self.lo..=hi).contains(&n) {
            return Ok(self.values[(n - self.lo) as usize].clone());
        }
        let wider = SingleFanMap::new(&self.s, n.unsigned_abs() as u32)?;
        wider.at_integer(n)
    }

    /// `h(x)` for a finite real `x`.
    pub fn eval(&self, x: &Scalar) -> Result<Scalar> {
        let r = x.to_rational();
        let n = r.numer().div_floor(r.denom());
        let n = n
            .to_i64()
            .ok_or_else(|| Error::InvalidArgument(format!("{x} is out of range")))?;
        let hn = self.at_integer(n)?;
        let frac = x - &Scalar::from_int(n);
        if frac.is_zero() {
            return Ok(hn);
        }
        let hn1 = self.at_integer(n + 1)?;
        Ok(&hn + &(&frac * &(&hn1 - &hn)))
    }

    pub fn eval_point(&self, x: &BoundaryPoint) -> Result<BoundaryPoint> {
        match x {
            BoundaryPoint::Infinity => Ok(BoundaryPoint::Infinity),
            BoundaryPoint::Finite(v) => Ok(BoundaryPoint::Finite(self.eval(v)?)),
        }
    }
}

impl VertexMap for SingleFanMap {
    fn image(&self, v: &FareyVertex) -> Option<BoundaryPoint> {
        self.eval_point(&v.to_boundary_point()).ok()
    }
}

/// Evaluates the single-fan developing map at one point.
pub fn single_fan_map(s: &ShearFunction, x: &Scalar) -> Result<Scalar> {
    let r = x.to_rational();
    let bound = r
        .numer()
        .div_floor(r.denom())
        .magnitude()
        .to_u32()
        .ok_or_else(|| Error::InvalidArgument(format!("{x} is out of range")))?;
    SingleFanMap::new(s, bound + 1)?.eval(x)
}

/// Arc lengths between consecutive edges of a fan on the horocycle at the
/// image of its tip, scaled so that the arc at index 0 has length 1.
#[derive(Clone, Debug)]
pub struct FanDeltas {
    pub tip: FareyVertex,
    pub k_min: i64,
    /// `δ_{k_min}, …, δ_{k_max}`
    pub deltas: Vec<Scalar>,
    /// Raw arc length of `δ_0` on the unit horocycle; dividing by it gives
    /// the normalization above.
    pub scale: Scalar,
}

impl FanDeltas {
    pub fn get(&self, k: i64) -> Option<&Scalar> {
        usize::try_from(k - self.k_min).ok().and_then(|i| self.deltas.get(i))
    }
}

/// Fan arcs computed from the developed images and checked against the
/// recurrence `δ_k = δ_{k−1} e^{s(f_k)}`.
pub fn fan_deltas(
    s: &ShearFunction,
    dm: &DevelopedMap,
    tip: &FareyVertex,
    k_min: i64,
    k_max: i64,
) -> Result<FanDeltas> {
    if k_min > k_max {
        return Err(Error::InvalidArgument(format!("empty window [{k_min}, {k_max}]")));
    }
    let fan = Fan::at(tip);
    let lo = k_min.min(0);
    let hi = k_max.max(0) + 1;
    let missing = || Error::WindowExceedsDepth(tip.to_string());
    let ht = dm.get(tip).ok_or_else(missing)?;
    let k = Horocycle::unit(ht.clone()).conjugator();
    let mut xs = Vec::with_capacity((hi - lo + 1) as usize);
    for n in lo..=hi {
        let img = dm.get(&fan.spoke(n)).ok_or_else(missing)?;
        match k.apply(img) {
            BoundaryPoint::Finite(x) => xs.push(x),
            BoundaryPoint::Infinity => {
                return Err(Error::OrderViolation(format!("spoke {n} at {tip} maps onto the tip")))
            }
        }
    }
    let raw = |n: i64| {
        let i = (n - lo) as usize;
        (&xs[i + 1] - &xs[i]).abs()
    };
    let scale = raw(0);
    let prec = s.precision();
    // recurrence from index 0 outward
    let mut rec = vec![Scalar::zero(); (hi - lo) as usize];
    rec[(-lo) as usize] = Scalar::one();
    for n in 1..hi {
        let prev = rec[(n - 1 - lo) as usize].clone();
        rec[(n - lo) as usize] = &prev * &s.get(&fan.edge(n))?.exp(prec);
    }
    for n in (lo..0).rev() {
        let next = rec[(n + 1 - lo) as usize].clone();
        rec[(n - lo) as usize] = &next * &(-s.get(&fan.edge(n + 1))?).exp(prec);
    }
    let mut deltas = Vec::with_capacity((k_max - k_min + 1) as usize);
    for n in k_min..=k_max {
        let direct = raw(n) / &scale;
        let r = &rec[(n - lo) as usize];
        if !direct.approx_eq(r, DELTA_TOL) {
            return Err(Error::ConsistencyFailure(format!(
                "arc {n} at {tip}: developed {direct}, recurrence {r}"
            )));
        }
        deltas.push(direct);
    }
    Ok(FanDeltas {
        tip: tip.clone(),
        k_min,
        deltas,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shear::develop;

    #[test]
    fn zero_shears_give_identity() {
        let m = SingleFanMap::new(&ShearFunction::zero(), 5).unwrap();
        for x in [Scalar::ratio(-7, 2), Scalar::zero(), Scalar::ratio(1, 3), Scalar::from_int(4)] {
            assert_eq!(m.eval(&x).unwrap().cmp_value(&x), std::cmp::Ordering::Equal);
        }
    }

    #[test]
    fn one_shear_each_side() {
        let sigma = 0.4;
        let s = ShearFunction::from_table([(Edge::vertical(1), Scalar::approx(sigma, 128))]);
        let h2 = single_fan_map(&s, &Scalar::from_int(2)).unwrap().to_f64();
        assert!((h2 - (sigma.exp() + 1.0)).abs() < 1e-15);
        let s = ShearFunction::from_table([(Edge::vertical(0), Scalar::approx(sigma, 128))]);
        let hm1 = single_fan_map(&s, &Scalar::from_int(-1)).unwrap().to_f64();
        assert!((hm1 + (-sigma).exp()).abs() < 1e-15);
    }

    #[test]
    fn rejects_off_fan_support() {
        let s = ShearFunction::from_table([(Edge::from_pairs((0, 1), (1, 1)).unwrap(), Scalar::one())]);
        assert!(matches!(SingleFanMap::new(&s, 3), Err(Error::NotSingleFan(_))));
    }

    #[test]
    fn fan_deltas_for_zero_and_constant() {
        let dm = develop(&ShearFunction::zero(), 4).unwrap();
        let fd = fan_deltas(&ShearFunction::zero(), &dm, &FareyVertex::infinity(), -2, 2).unwrap();
        assert!(fd.deltas.iter().all(|d| d.is_one()));
        let c = 0.25;
        let s = ShearFunction::from_table((-6..=6).map(|n| (Edge::vertical(n), Scalar::approx(c, 128))));
        let dm = develop(&s, 7).unwrap();
        let fd = fan_deltas(&s, &dm, &FareyVertex::infinity(), -3, 3).unwrap();
        for k in -3..=3 {
            let want = (k as f64 * c).exp();
            assert!((fd.get(k).unwrap().to_f64() - want).abs() < 1e-12 * want);
        }
        assert!(matches!(
            fan_deltas(&s, &dm, &FareyVertex::infinity(), -3, 30),
            Err(Error::WindowExceedsDepth(_))
        ));
    }
}
