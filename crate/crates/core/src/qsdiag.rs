//! Quasisymmetry diagnostics: Beurling–Ahlfors ratios, sampled cross-ratio
//! distortion, and finite-window scans for the two ways a developing map can
//! fail to be a homeomorphism.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::farey::{int_inverse, tessellation_to_depth, Edge, Fan, FareyVertex};
use crate::geom::cross_ratio;
use crate::num::{CompensatedSum, Scalar};
use crate::shear::{check_condition, shear_from_map, ConditionReport, DevelopedMap, ShearFunction, VertexMap};

/// `(h(x+t) − h(x)) / (h(x) − h(x−t))`.
pub fn ba_ratio<F>(h: F, x: &Scalar, t: &Scalar) -> Result<Scalar>
where
    F: Fn(&Scalar) -> Result<Scalar>,
{
    if t.signum() <= 0 {
        return Err(Error::InvalidArgument(format!("step {t} must be positive")));
    }
    let hx = h(x)?;
    let num = h(&(x + t))? - &hx;
    let den = &hx - &h(&(x - t))?;
    if den.is_zero() {
        return Err(Error::NonMonotone);
    }
    let q = num / den;
    if q.signum() <= 0 {
        return Err(Error::NonMonotone);
    }
    Ok(q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SampleMethod {
    /// Progressions `x−t, x, x+t` on the line with the fourth point at `∞`.
    SymmetricTriples,
    /// The same progressions moved to a random tip by its fan conjugator.
    #[default]
    MobiusQuadruples,
}

impl fmt::Display for SampleMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SampleMethod::SymmetricTriples => "symmetric-triples",
            SampleMethod::MobiusQuadruples => "mobius-quadruples",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SamplerConfig {
    pub seed: u64,
    pub samples: usize,
    pub method: SampleMethod,
}

impl SamplerConfig {
    pub fn new(seed: u64, samples: usize) -> SamplerConfig {
        SamplerConfig {
            seed,
            samples,
            method: SampleMethod::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct QsEstimate {
    /// Largest `max(cr, 1/cr)` over the image quadruples.
    pub m_observed: Scalar,
    pub samples: usize,
    /// Domain quadruple (cross-ratio one) where the maximum occurred.
    pub witness: [FareyVertex; 4],
    pub witness_cross_ratio: Scalar,
    pub method: SampleMethod,
}

/// Half-integers `j/2` with `|j| ≤ GRID` are used as progression points.
const GRID: i64 = 128;

/// Grid points, in units of 1/2, that have images, for one tip.
struct TipGrid {
    fan: Fan,
    available: Vec<bool>,
    points: Vec<i64>,
}

impl TipGrid {
    fn new(dm: &DevelopedMap, tip: &FareyVertex) -> TipGrid {
        let fan = Fan::at(tip);
        let inv = int_inverse(fan.conjugator());
        let mut available = vec![false; (2 * GRID + 1) as usize];
        let mut points = Vec::new();
        for j in -GRID..=GRID {
            let v = FareyVertex::reduced(j, 2).expect("nonzero").transform(&inv);
            if dm.get(&v).is_some() {
                available[(j + GRID) as usize] = true;
                points.push(j);
            }
        }
        TipGrid { fan, available, points }
    }

    fn has(&self, j: i64) -> bool {
        (-GRID..=GRID).contains(&j) && self.available[(j + GRID) as usize]
    }

    fn vertex(&self, j: i64) -> FareyVertex {
        FareyVertex::reduced(j, 2)
            .expect("nonzero")
            .transform(&int_inverse(self.fan.conjugator()))
    }

    /// A random progression `(x−t, x, x+t)` inside the grid.
    fn progression(&self, rng: &mut ChaCha8Rng) -> Option<(i64, i64, i64)> {
        if self.points.len() < 3 {
            return None;
        }
        for _ in 0..16 {
            let x = self.points[rng.gen_range(0..self.points.len())];
            let ts: Vec<i64> = (1..=2 * GRID).filter(|t| self.has(x - t) && self.has(x + t)).collect();
            if !ts.is_empty() {
                let t = ts[rng.gen_range(0..ts.len())];
                return Some((x - t, x, x + t));
            }
        }
        None
    }
}

fn image_cross_ratio(dm: &DevelopedMap, q: &[FareyVertex; 4]) -> Result<Scalar> {
    let img = |v: &FareyVertex| dm.get(v).cloned().ok_or_else(|| Error::InsufficientDepth(v.to_string()));
    let (a, b, c, d) = (img(&q[0])?, img(&q[1])?, img(&q[2])?, img(&q[3])?);
    let cr = cross_ratio(&a, &b, &c, &d)?;
    if cr.signum() <= 0 {
        return Err(Error::NonMonotone);
    }
    Ok(cr)
}

/// Largest cross-ratio distortion of `dm` over seeded samples of
/// cross-ratio-one quadruples. Sample 0 is always `(0, 1, 2, ∞)`; sample `i`
/// depends only on `(seed, i)`.
pub fn estimate_qs_constant(dm: &DevelopedMap, cfg: &SamplerConfig) -> Result<QsEstimate> {
    if cfg.samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let tips: Vec<FareyVertex> = match cfg.method {
        SampleMethod::SymmetricTriples => vec![FareyVertex::infinity()],
        SampleMethod::MobiusQuadruples => dm.sorted().into_iter().map(|(v, _)| v.clone()).collect(),
    };
    let grids: Vec<TipGrid> = tips.par_iter().map(|t| TipGrid::new(dm, t)).collect();
    let reference = [FareyVertex::int(0), FareyVertex::int(1), FareyVertex::int(2), FareyVertex::infinity()];

    let sample = |i: usize| -> Result<([FareyVertex; 4], Scalar)> {
        if i == 0 {
            return Ok((reference.clone(), image_cross_ratio(dm, &reference)?));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        for _ in 0..64 {
            let g = &grids[rng.gen_range(0..grids.len())];
            if let Some((a, b, c)) = g.progression(&mut rng) {
                let q = [g.vertex(a), g.vertex(b), g.vertex(c), g.fan.tip().clone()];
                return Ok((q.clone(), image_cross_ratio(dm, &q)?));
            }
        }
        Err(Error::InsufficientDepth("no tip has three grid points with images".into()))
    };

    let results: Vec<Result<([FareyVertex; 4], Scalar)>> = (0..cfg.samples).into_par_iter().map(sample).collect();
    let mut best: Option<(Scalar, [FareyVertex; 4], Scalar)> = None;
    for r in results {
        let (q, cr) = r?;
        let mag = cr.symmetric_magnitude();
        let better = match &best {
            None => true,
            Some((m, _, _)) => mag.cmp_value(m) == Ordering::Greater,
        };
        if better {
            best = Some((mag, q, cr));
        }
    }
    let (m, witness, cr) = best.expect("at least one sample");
    Ok(QsEstimate {
        m_observed: m,
        samples: cfg.samples,
        witness,
        witness_cross_ratio: cr,
        method: cfg.method,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegenerationMode {
    ArcSummability,
    ShearBlowup,
    NoneDetected,
}

impl fmt::Display for DegenerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegenerationMode::ArcSummability => "arc-summability",
            DegenerationMode::ShearBlowup => "shear-blowup",
            DegenerationMode::NoneDetected => "none-detected",
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Thresholds {
    /// Flag shear blow-up when some `|s|` exceeds this.
    pub blowup: f64,
    /// Flag arc summability when a head/tail ratio exceeds this.
    pub head_tail: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            blowup: 10.0,
            head_tail: 1e3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DegenerationReport {
    pub mode: DegenerationMode,
    pub depth: u32,
    pub window: u32,
    /// Largest `max(head/tail, tail/head)` and where it occurred.
    pub head_tail: Scalar,
    pub head_tail_tip: FareyVertex,
    pub head_tail_split: (i64, u32),
    pub head_sum: Scalar,
    pub tail_sum: Scalar,
    /// Largest `|s|` on an interior edge of the tessellation.
    pub max_abs_shear: Scalar,
    pub max_shear_edge: Option<Edge>,
    pub blowup_flagged: bool,
}

struct ArcWitness {
    stat: Scalar,
    tip: FareyVertex,
    split: (i64, u32),
    head: Scalar,
    tail: Scalar,
}

/// Head/tail scan on one fan: arcs `δ_n`, `|n| ≤ 2K`, compared as
/// `δ_{m−k}+⋯+δ_{m−1}` against `δ_m+⋯+δ_{m+k−1}` for `|m| ≤ K`, `1 ≤ k ≤ K`.
fn scan_fan(s: &ShearFunction, tip: &FareyVertex, k_max: u32) -> Result<Option<ArcWitness>> {
    let fan = Fan::at(tip);
    let w = 2 * k_max as i64;
    let shears: Vec<Scalar> = (-w + 1..=w).map(|n| s.get(&fan.edge(n))).collect::<Result<_>>()?;
    if shears.iter().all(|x| x.is_exact() && x.is_zero()) {
        return Ok(None);
    }
    let prec = s.precision();
    let mut delta = Vec::with_capacity(shears.len() + 1);
    let mut partial = Scalar::zero();
    delta.push(Scalar::one());
    for x in &shears {
        partial = &partial + x;
        delta.push(partial.exp(prec));
    }
    let at = |n: i64| &delta[(n + w) as usize];
    let mut best: Option<ArcWitness> = None;
    for m in -(k_max as i64)..=k_max as i64 {
        let mut head = CompensatedSum::new();
        let mut tail = CompensatedSum::new();
        for k in 1..=k_max {
            head.add(at(m - k as i64));
            tail.add(at(m + k as i64 - 1));
            let (h, t) = (head.value(), tail.value());
            let stat = (&h / &t).symmetric_magnitude();
            if best.as_ref().is_none_or(|b| stat.cmp_value(&b.stat) == Ordering::Greater) {
                best = Some(ArcWitness {
                    stat,
                    tip: tip.clone(),
                    split: (m, k),
                    head: h,
                    tail: t,
                });
            }
        }
    }
    Ok(best)
}

/// Finite-window heuristic for the two degenerations of the developing map.
pub fn degeneration_scan(s: &ShearFunction, d: u32, k_max: u32, th: &Thresholds) -> Result<DegenerationReport> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let tess = tessellation_to_depth(d)?;
    let tips = tess.vertices();
    let scans: Vec<Option<ArcWitness>> = tips
        .par_iter()
        .map(|t| scan_fan(s, t, k_max))
        .collect::<Result<_>>()?;
    let mut arc: Option<ArcWitness> = None;
    for w in scans.into_iter().flatten() {
        if arc.as_ref().is_none_or(|b| w.stat.cmp_value(&b.stat) == Ordering::Greater) {
            arc = Some(w);
        }
    }
    let arc = arc.unwrap_or(ArcWitness {
        stat: Scalar::one(),
        tip: FareyVertex::infinity(),
        split: (0, 1),
        head: Scalar::one(),
        tail: Scalar::one(),
    });

    let mut max_abs = Scalar::zero();
    let mut max_edge = None;
    for e in tess.edges() {
        if tess.adjacent_triangles(&e).is_none() {
            continue;
        }
        let a = s.get(&e)?.abs();
        if a.cmp_value(&max_abs) == Ordering::Greater {
            max_abs = a;
            max_edge = Some(e);
        }
    }
    let blowup_flagged = max_abs.to_f64() > th.blowup;
    let mode = if arc.stat.to_f64() >= th.head_tail {
        DegenerationMode::ArcSummability
    } else if blowup_flagged {
        DegenerationMode::ShearBlowup
    } else {
        DegenerationMode::NoneDetected
    };
    Ok(DegenerationReport {
        mode,
        depth: d,
        window: k_max,
        head_tail: arc.stat,
        head_tail_tip: arc.tip,
        head_tail_split: arc.split,
        head_sum: arc.head,
        tail_sum: arc.tail,
        max_abs_shear: max_abs,
        max_shear_edge: max_edge,
        blowup_flagged,
    })
}

/// Extracts the shears of `h` lazily and runs the condition checker on them.
pub fn necessity_experiment(
    h: Arc<dyn VertexMap>,
    d: u32,
    k_max: u32,
    prec: usize,
) -> Result<ConditionReport> {
    let s = ShearFunction::from_rule(move |e: &Edge| shear_from_map(&*h, e, prec)).with_precision(prec);
    check_condition(&s, d, k_max)
}
