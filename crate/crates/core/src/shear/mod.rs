//! Shear functions on the edges of the tessellation, the developing map they
//! define, shear extraction from boundary maps, and the fan-sum condition.

mod condition;
mod develop;
mod fan;

pub use condition::{check_condition, fan_ratios, ConditionReport, FanRatios, FanWorst, WindowRatio};
pub use develop::{
    develop, oriented_translation, shear_from_map, DevelopedMap, PathDeveloper, CONSISTENCY_TOL,
};
pub use fan::{fan_deltas, single_fan_map, FanDeltas, SingleFanMap};

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::farey::{Edge, FareyVertex, IntMatrix};
use crate::geom::{BoundaryPoint, MobiusMap};
use crate::num::{Scalar, DEFAULT_PRECISION};

/// Procedurally defined shear values.
pub type ShearRule = Arc<dyn Fn(&Edge) -> Result<Scalar> + Send + Sync>;

/// A shear value for every edge: a finite table, then an optional rule, then
/// a constant default.
#[derive(Clone)]
pub struct ShearFunction {
    table: BTreeMap<Edge, Scalar>,
    rule: Option<ShearRule>,
    default: Scalar,
    precision: usize,
}

impl fmt::Debug for ShearFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShearFunction")
            .field("table", &self.table)
            .field("rule", &self.rule.is_some())
            .field("default", &self.default)
            .field("precision", &self.precision)
            .finish()
    }
}

impl Default for ShearFunction {
    fn default() -> Self {
        ShearFunction::zero()
    }
}

impl ShearFunction {
    pub fn zero() -> ShearFunction {
        ShearFunction {
            table: BTreeMap::new(),
            rule: None,
            default: Scalar::zero(),
            precision: DEFAULT_PRECISION,
        }
    }

    pub fn from_table(entries: impl IntoIterator<Item = (Edge, Scalar)>) -> ShearFunction {
        let mut s = ShearFunction::zero();
        for (e, v) in entries {
            s.table.insert(e, v);
        }
        s
    }

    pub fn from_rule(rule: impl Fn(&Edge) -> Result<Scalar> + Send + Sync + 'static) -> ShearFunction {
        ShearFunction {
            rule: Some(Arc::new(rule)),
            ..ShearFunction::zero()
        }
    }

    pub fn with_default(mut self, default: Scalar) -> ShearFunction {
        self.default = default;
        self
    }

    pub fn with_precision(mut self, bits: usize) -> ShearFunction {
        self.precision = bits;
        self
    }

    pub fn with_rule(mut self, rule: ShearRule) -> ShearFunction {
        self.rule = Some(rule);
        self
    }

    /// Sets a table entry, returning the previous one.
    pub fn insert(&mut self, e: Edge, v: Scalar) -> Option<Scalar> {
        self.table.insert(e, v)
    }

    pub fn table(&self) -> &BTreeMap<Edge, Scalar> {
        &self.table
    }

    pub fn rule(&self) -> Option<&ShearRule> {
        self.rule.as_ref()
    }

    pub fn default_value(&self) -> &Scalar {
        &self.default
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Table entries with nonzero value.
    pub fn support(&self) -> impl Iterator<Item = (&Edge, &Scalar)> {
        self.table.iter().filter(|(_, v)| !v.is_zero())
    }

    /// True when only finitely many edges carry a nonzero value.
    pub fn is_finitely_supported(&self) -> bool {
        self.rule.is_none() && self.default.is_zero()
    }

    pub fn get(&self, e: &Edge) -> Result<Scalar> {
        if let Some(v) = self.table.get(e) {
            return Ok(v.clone());
        }
        if let Some(rule) = &self.rule {
            return rule(e);
        }
        Ok(self.default.clone())
    }
}

/// `s ∘ A` for an integer unimodular `A`.
pub fn pullback(s: &ShearFunction, a: &MobiusMap) -> Result<ShearFunction> {
    let m: IntMatrix = a.integer_entries().ok_or(Error::NotFareyAutomorphism)?;
    let inv = crate::farey::int_inverse(&m);
    let table = s.table.iter().map(|(e, v)| (e.transform(&inv), v.clone())).collect();
    let rule: Option<ShearRule> = s.rule.clone().map(|r| {
        let rule: ShearRule = Arc::new(move |e: &Edge| r(&e.transform(&m)));
        rule
    });
    Ok(ShearFunction {
        table,
        rule,
        default: s.default.clone(),
        precision: s.precision,
    })
}

/// A boundary map known at (some) Farey vertices.
pub trait VertexMap: Send + Sync {
    fn image(&self, v: &FareyVertex) -> Option<BoundaryPoint>;
}

/// The identity on vertices, exactly.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityMap;

impl VertexMap for IdentityMap {
    fn image(&self, v: &FareyVertex) -> Option<BoundaryPoint> {
        Some(v.to_boundary_point())
    }
}

/// Wraps a closure as a [`VertexMap`].
pub struct FnMap<F>(pub F);

impl<F> VertexMap for FnMap<F>
where
    F: Fn(&FareyVertex) -> Option<BoundaryPoint> + Send + Sync,
{
    fn image(&self, v: &FareyVertex) -> Option<BoundaryPoint> {
        (self.0)(v)
    }
}

impl<T: VertexMap + ?Sized> VertexMap for Arc<T> {
    fn image(&self, v: &FareyVertex) -> Option<BoundaryPoint> {
        (**self).image(v)
    }
}

impl<T: VertexMap + ?Sized> VertexMap for &T {
    fn image(&self, v: &FareyVertex) -> Option<BoundaryPoint> {
        (**self).image(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_priority() {
        let e = Edge::vertical(3);
        let mut s = ShearFunction::from_rule(|e: &Edge| {
            Ok(if e.b().is_infinity() { Scalar::from_int(5) } else { Scalar::zero() })
        })
        .with_default(Scalar::from_int(9));
        assert_eq!(s.get(&e).unwrap().to_f64(), 5.0);
        s.insert(e.clone(), Scalar::from_int(2));
        assert_eq!(s.get(&e).unwrap().to_f64(), 2.0);
        let plain = ShearFunction::zero().with_default(Scalar::from_int(9));
        assert_eq!(plain.get(&e).unwrap().to_f64(), 9.0);
    }

    #[test]
    fn pullback_by_translation_moves_support() {
        let s = ShearFunction::from_table([(Edge::vertical(0), Scalar::ratio(1, 3))]);
        let a = MobiusMap::from_ints(1, 1, 0, 1).unwrap();
        let t = pullback(&s, &a).unwrap();
        let keys: Vec<_> = t.table().keys().cloned().collect();
        assert_eq!(keys, vec![Edge::vertical(-1)]);
        assert!(t.get(&Edge::vertical(0)).unwrap().is_zero());
        let id = pullback(&s, &MobiusMap::identity()).unwrap();
        assert_eq!(id.table().len(), 1);
        assert!(id.get(&Edge::vertical(0)).unwrap().is_exact());
    }

    #[test]
    fn pullback_rejects_non_integer() {
        let s = ShearFunction::zero();
        let a = MobiusMap::new(Scalar::ratio(1, 2), Scalar::zero(), Scalar::zero(), Scalar::from_int(2)).unwrap();
        assert_eq!(pullback(&s, &a).unwrap_err(), Error::NotFareyAutomorphism);
    }
}
