use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use super::ShearFunction;
use crate::error::{Error, Result};
use crate::farey::{tessellation_to_depth, Edge, Fan, FareyVertex};
use crate::num::{CompensatedSum, Scalar};

/// Largest window length accepted by [`check_condition`].
pub const WINDOW_GUARD: u32 = 1 << 16;

/// One ratio `(δ_m + ⋯ + δ_{m+k}) / (δ_{m−1} + ⋯ + δ_{m−k−1})`.
#[derive(Clone, Debug)]
pub struct WindowRatio {
    pub m: i64,
    pub k: u32,
    pub ratio: Scalar,
}

/// Every ratio of one fan whose arcs lie in `δ_lo, …, δ_hi`.
#[derive(Clone, Debug)]
pub struct FanRatios {
    pub tip: FareyVertex,
    pub lo: i64,
    pub hi: i64,
    pub ratios: Vec<WindowRatio>,
}

/// Visits every representable `(m, k)` in ascending `m`, then `k`.
///
/// `shears[i]` is `s(f_{lo+1+i})`; arcs are `δ_n = e^{s(f_{lo+1})+⋯+s(f_n)}`,
/// which differ from any other normalization by a common factor.
fn for_each_ratio(
    lo: i64,
    shears: &[Scalar],
    k_max: u32,
    prec: usize,
    mut visit: impl FnMut(i64, u32, Scalar),
) {
    let mut e = Vec::with_capacity(shears.len() + 1);
    let mut partial = Scalar::zero();
    e.push(Scalar::one());
    for s in shears {
        partial = &partial + s;
        e.push(partial.exp(prec));
    }
    let hi = lo + shears.len() as i64;
    for m in lo + 1..=hi {
        let mut num = CompensatedSum::new();
        let mut den = CompensatedSum::new();
        for k in 0..=k_max {
            let top = m + k as i64;
            let bottom = m - 1 - k as i64;
            if top > hi || bottom < lo {
                break;
            }
            num.add(&e[(top - lo) as usize]);
            den.add(&e[(bottom - lo) as usize]);
            visit(m, k, num.value() / den.value());
        }
    }
}

fn window_shears(s: &ShearFunction, fan: &Fan, lo: i64, hi: i64) -> Result<Vec<Scalar>> {
    (lo + 1..=hi).map(|n| s.get(&fan.edge(n))).collect()
}

/// All fan-sum ratios at `tip` with arcs indexed in `[lo, hi]` and `k ≤ k_max`.
pub fn fan_ratios(s: &ShearFunction, tip: &FareyVertex, lo: i64, hi: i64, k_max: u32) -> Result<FanRatios> {
    if lo >= hi {
        return Err(Error::InvalidArgument(format!("window [{lo}, {hi}] holds no ratio")));
    }
    let fan = Fan::at(tip);
    let shears = window_shears(s, &fan, lo, hi)?;
    let mut ratios = Vec::new();
    for_each_ratio(lo, &shears, k_max, s.precision(), |m, k, ratio| {
        ratios.push(WindowRatio { m, k, ratio })
    });
    Ok(FanRatios {
        tip: tip.clone(),
        lo,
        hi,
        ratios,
    })
}

/// The most distorted ratio of one fan.
#[derive(Clone, Debug)]
pub struct FanWorst {
    pub tip: FareyVertex,
    /// `max(r, 1/r)` at the witness
    pub worst: Scalar,
    pub m: i64,
    pub k: u32,
    pub ratio: Scalar,
}

/// Result of [`check_condition`]: a lower bound for the constant `M` over
/// the fans and windows that were examined.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub depth: u32,
    pub window: u32,
    /// Arcs `δ_n` with `|n| ≤ span` were examined at every tip.
    pub span: i64,
    pub fans: Vec<FanWorst>,
    pub m: Scalar,
    /// Index into `fans` of the first fan attaining `m`.
    pub witness: usize,
    pub pairs: u64,
}

impl ConditionReport {
    pub fn witness_fan(&self) -> &FanWorst {
        &self.fans[self.witness]
    }

    pub fn fan(&self, tip: &FareyVertex) -> Option<&FanWorst> {
        self.fans.iter().find(|f| &f.tip == tip)
    }
}

fn pairs_in_window(lo: i64, hi: i64, k_max: u32) -> u64 {
    (lo + 1..=hi)
        .map(|m| {
            let room = (hi - m).min(m - 1 - lo);
            (room.min(k_max as i64) + 1) as u64
        })
        .sum()
}

/// Evaluates the fan-sum condition for every fan whose tip is a vertex of
/// the depth-`d` tessellation, all windows with `k ≤ k_max` and arcs within
/// `|n| ≤ d + k_max + 1`.
pub fn check_condition(s: &ShearFunction, d: u32, k_max: u32) -> Result<ConditionReport> {
    if k_max > WINDOW_GUARD {
        return Err(Error::InvalidArgument(format!("window {k_max} exceeds {WINDOW_GUARD}")));
    }
    let tess = tessellation_to_depth(d)?;
    let tips = tess.vertices();
    let span = (d + k_max + 1) as i64;
    let (lo, hi) = (-span, span);
    let fans: Vec<Fan> = tips.iter().map(Fan::at).collect();

    let mut needed: HashSet<Edge> = HashSet::new();
    for fan in &fans {
        needed.extend((lo + 1..=hi).map(|n| fan.edge(n)));
    }
    let mut needed: Vec<Edge> = needed.into_iter().collect();
    needed.sort();
    let values: Vec<Scalar> = needed.par_iter().map(|e| s.get(e)).collect::<Result<_>>()?;
    let table: HashMap<Edge, Scalar> = needed.into_iter().zip(values).collect();

    let prec = s.precision();
    let per_fan: Vec<FanWorst> = fans
        .par_iter()
        .map(|fan| {
            let shears: Vec<Scalar> = (lo + 1..=hi).map(|n| table[&fan.edge(n)].clone()).collect();
            if shears.iter().all(|x| x.is_exact() && x.is_zero()) {
                return FanWorst {
                    tip: fan.tip().clone(),
                    worst: Scalar::one(),
                    m: lo + 1,
                    k: 0,
                    ratio: Scalar::one(),
                };
            }
            let mut best: Option<FanWorst> = None;
            for_each_ratio(lo, &shears, k_max, prec, |m, k, ratio| {
                let worst = ratio.symmetric_magnitude();
                let better = match &best {
                    None => true,
                    Some(b) => worst.cmp_value(&b.worst) == Ordering::Greater,
                };
                if better {
                    best = Some(FanWorst {
                        tip: fan.tip().clone(),
                        worst,
                        m,
                        k,
                        ratio,
                    });
                }
            });
            best.expect("window holds at least one ratio")
        })
        .collect();

    let mut witness = 0;
    for (i, f) in per_fan.iter().enumerate() {
        if f.worst.cmp_value(&per_fan[witness].worst) == Ordering::Greater {
            witness = i;
        }
    }
    Ok(ConditionReport {
        depth: d,
        window: k_max,
        span,
        m: per_fan[witness].worst.clone(),
        witness,
        pairs: pairs_in_window(lo, hi, k_max) * per_fan.len() as u64,
        fans: per_fan,
    })
}
