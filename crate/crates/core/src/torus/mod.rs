//! Kronecker flow on the two-torus `[0, 2pi)^2`: flow segments, polygonal open sets, visit times,
//! and the outer-function construction driven by them.

use std::f64::consts::{LN_2, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::series::LN_3;

mod experiments;
pub mod geometry;
mod ss;

pub use experiments::{gap_experiment, oscillation_experiment, GapOutcome, GapSpec, NfTrace, OscillationReport, OscillationSpec, XiTrace};
pub use geometry::{ConvexPolygon, Pt};
pub use ss::{ss_outer_construct, SsConstruction, SsOptions};

/// Flow direction in the unwrapped plane per unit of `tau` (negated).
pub const DIRECTION: Pt = [LN_2, LN_3];
const MIN_SEGMENT: f64 = 1e-12;

fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Unwrapped angles of `(2^{-i tau}, 3^{-i tau})`.
pub fn unwrapped_point(tau: f64) -> Pt {
    [-tau * LN_2, -tau * LN_3]
}

/// Angles of `(2^{-i tau}, 3^{-i tau})` reduced to `[0, 2pi)`.
pub fn kronecker_point(tau: f64) -> Pt {
    let [a, b] = unwrapped_point(tau);
    [wrap(a), wrap(b)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSegment {
    pub tau0: f64,
    pub tau1: f64,
    pub start: Pt,
    pub end: Pt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowSegmentList {
    pub segments: Vec<FlowSegment>,
}

/// Number of `k` with `2 pi k / l` strictly inside `(a, b)`.
fn crossings(a: f64, b: f64, l: f64) -> Vec<f64> {
    let k0 = (a * l / TAU).floor() as i64 + 1;
    let k1 = (b * l / TAU).ceil() as i64 - 1;
    (k0..=k1).map(|k| TAU * k as f64 / l).filter(|&t| t > a && t < b).collect()
}

/// The flow trajectory for `tau_min <= tau <= tau_max`, cut at the edges of the fundamental square.
pub fn line_segments(tau_min: f64, tau_max: f64) -> Result<FlowSegmentList> {
    if !(tau_min < tau_max) || !tau_min.is_finite() || !tau_max.is_finite() {
        return Err(LabError::InvalidParameter(format!("need tau_min < tau_max, got {tau_min}, {tau_max}")));
    }
    // coordinate p wraps when tau log p is a multiple of 2 pi
    let mut cuts = crossings(tau_min, tau_max, LN_2);
    cuts.extend(crossings(tau_min, tau_max, LN_3));
    cuts.push(tau_min);
    cuts.push(tau_max);
    cuts.sort_by(f64::total_cmp);
    let mut segments = Vec::with_capacity(cuts.len());
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 < MIN_SEGMENT {
            continue;
        }
        let mid = unwrapped_point(0.5 * (t0 + t1));
        let shift = [TAU * (mid[0] / TAU).floor(), TAU * (mid[1] / TAU).floor()];
        let clamp = |p: Pt| [(p[0] - shift[0]).clamp(0.0, TAU), (p[1] - shift[1]).clamp(0.0, TAU)];
        segments.push(FlowSegment {
            tau0: t0,
            tau1: t1,
            start: clamp(unwrapped_point(t0)),
            end: clamp(unwrapped_point(t1)),
        });
    }
    Ok(FlowSegmentList { segments })
}

/// Finite union of convex polygons on the torus, stored as disjoint pieces inside the
/// fundamental square.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TorusSet {
    pieces: Vec<ConvexPolygon>,
    /// Smallest short diagonal of the parallelograms the set was built from, if any.
    #[serde(default)]
    pub feature_width: Option<f64>,
}

fn reduce(p: &ConvexPolygon) -> Vec<ConvexPolygon> {
    let (lo, hi) = p.bbox();
    let k = |x: f64| (x / TAU).floor() as i64;
    let mut out = Vec::new();
    for i in k(lo[0])..=k(hi[0]) {
        for j in k(lo[1])..=k(hi[1]) {
            let o = [TAU * i as f64, TAU * j as f64];
            if let Some(c) = p.clip_box(o, [o[0] + TAU, o[1] + TAU]) {
                out.push(c.translate([-o[0], -o[1]]));
            }
        }
    }
    out
}

fn subtract_all(frags: Vec<ConvexPolygon>, pieces: &[ConvexPolygon]) -> Vec<ConvexPolygon> {
    pieces.iter().fold(frags, |acc, e| acc.iter().flat_map(|f| f.difference(e)).collect())
}

impl TorusSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        let sq = ConvexPolygon::new(vec![[0.0, 0.0], [TAU, 0.0], [TAU, TAU], [0.0, TAU]]).unwrap();
        Self { pieces: vec![sq], feature_width: None }
    }

    /// Projection of convex polygons given in unwrapped coordinates.
    pub fn from_polygons(polys: Vec<Vec<Pt>>) -> Result<Self> {
        let mut set = Self::empty();
        for (i, v) in polys.into_iter().enumerate() {
            let p = ConvexPolygon::new(v)
                .ok_or_else(|| LabError::InvalidParameter(format!("polygon {i} is degenerate or not convex")))?;
            set.insert(&p);
        }
        Ok(set)
    }

    fn insert(&mut self, p: &ConvexPolygon) {
        for piece in reduce(p) {
            let frags = subtract_all(vec![piece], &self.pieces);
            self.pieces.extend(frags);
        }
    }

    pub fn pieces(&self) -> &[ConvexPolygon] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Area in `[0, (2pi)^2]`.
    pub fn area(&self) -> f64 {
        self.pieces.iter().map(|p| p.area()).sum()
    }

    /// Haar measure `area / (2pi)^2`.
    pub fn measure(&self) -> f64 {
        self.area() / (TAU * TAU)
    }

    /// Membership of the closure; the point is reduced mod `2pi` first.
    pub fn contains(&self, p: Pt) -> bool {
        let q = [wrap(p[0]), wrap(p[1])];
        self.pieces.iter().any(|c| c.contains(q))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for p in &other.pieces {
            let frags = subtract_all(vec![p.clone()], &out.pieces);
            out.pieces.extend(frags);
        }
        out.feature_width = min_opt(self.feature_width, other.feature_width);
        out
    }

    /// `self` minus the closure of `other` (the boundary is null, so only the pieces change).
    pub fn difference(&self, other: &Self) -> Self {
        Self {
            pieces: subtract_all(self.pieces.clone(), &other.pieces),
            feature_width: min_opt(self.feature_width, other.feature_width),
        }
    }

    /// Disjoint `tau`-intervals inside `[tau_min, tau_max]` during which the flow is in the set.
    pub fn flow_intervals(&self, tau_min: f64, tau_max: f64) -> Result<Vec<(f64, f64)>> {
        let segs = line_segments(tau_min, tau_max)?;
        let boxes: Vec<_> = self.pieces.iter().map(|p| p.bbox()).collect();
        let mut out = Vec::new();
        for s in &segs.segments {
            let lo = [s.start[0].min(s.end[0]), s.start[1].min(s.end[1])];
            let hi = [s.start[0].max(s.end[0]), s.start[1].max(s.end[1])];
            for (p, (b0, b1)) in self.pieces.iter().zip(&boxes) {
                if b0[0] > hi[0] || b1[0] < lo[0] || b0[1] > hi[1] || b1[1] < lo[1] {
                    continue;
                }
                if let Some((a, b)) = p.clip_segment(s.start, s.end) {
                    let len = s.tau1 - s.tau0;
                    out.push((s.tau0 + a * len, s.tau0 + b * len));
                }
            }
        }
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(out)
    }

    /// Largest `r` such that the flow stays in the closure for `|tau| < r`, searched up to `limit`.
    pub fn exit_time(&self, limit: f64) -> Result<f64> {
        let ivs = self.flow_intervals(-limit, limit)?;
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (a, b) in ivs {
            match merged.last_mut() {
                Some(last) if a <= last.1 + 1e-9 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Ok(merged
            .iter()
            .find(|(a, b)| *a <= 0.0 && *b >= 0.0)
            .map(|(a, b)| (-a).min(*b))
            .unwrap_or(0.0))
    }
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Rhombus with long diagonal on the unwrapped flow for `|tau| < half_length` and a perpendicular
/// short diagonal of length `width`, in unwrapped coordinates.
pub fn rhombus(half_length: f64, width: f64) -> Vec<Pt> {
    let norm = DIRECTION[0].hypot(DIRECTION[1]);
    let d = [DIRECTION[0] * half_length, DIRECTION[1] * half_length];
    let perp = [-DIRECTION[1] / norm * width / 2.0, DIRECTION[0] / norm * width / 2.0];
    vec![d, perp, [-d[0], -d[1]], [-perp[0], -perp[1]]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub set: TorusSet,
    /// Area of the rhombus before projection: `n |(log 2, log 3)| width`.
    pub area_bound: f64,
    /// Sampled flow points with `|tau| < n` that were found inside.
    pub contained: usize,
    pub sampled: usize,
}

pub const COVER_SAMPLES: usize = 1000;

/// Open cover of the flow segment `|tau| < n` by one projected rhombus.
pub fn parallelogram_cover<R: Rng>(n: f64, width: f64, rng: &mut R) -> Result<Cover> {
    if !(n > 0.0) || !(width > 0.0) || !n.is_finite() || !width.is_finite() {
        return Err(LabError::InvalidParameter(format!("cover needs n > 0 and width > 0, got {n}, {width}")));
    }
    let mut set = TorusSet::from_polygons(vec![rhombus(n, width)])?;
    set.feature_width = Some(width);
    let contained = (0..COVER_SAMPLES)
        .filter(|_| set.contains(kronecker_point(rng.gen_range(-n..n))))
        .count();
    let area_bound = n * DIRECTION[0].hypot(DIRECTION[1]) * width;
    Ok(Cover { set, area_bound, contained, sampled: COVER_SAMPLES })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Visit {
    /// `(1/2T) |{tau in (-T, T) : flow(tau) in U}|`.
    pub fraction: f64,
    /// Haar measure of `U`.
    pub measure: f64,
}

/// Time average of the indicator of `U` along the flow, computed from the exact entry and exit times.
pub fn visit_fraction(u: &TorusSet, t: f64) -> Result<Visit> {
    if !(t > 0.0) {
        return Err(LabError::InvalidParameter(format!("T = {t} must be positive")));
    }
    let time: f64 = u.flow_intervals(-t, t)?.iter().map(|(a, b)| b - a).sum();
    Ok(Visit { fraction: time / (2.0 * t), measure: u.measure() })
}

/// Random convex polygon set: `count` polygons with 3 to 6 vertices on circles of random radius.
pub fn random_polygon_set<R: Rng>(count: usize, rng: &mut R) -> TorusSet {
    let mut polys = Vec::with_capacity(count);
    while polys.len() < count {
        let c = [rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)];
        let r = rng.gen_range(0.3..2.0);
        let k = rng.gen_range(3..=6);
        let mut angles: Vec<f64> = (0..k).map(|_| rng.gen_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let v: Vec<Pt> = angles.iter().map(|a| [c[0] + r * a.cos(), c[1] + r * a.sin()]).collect();
        if ConvexPolygon::new(v.clone()).is_some_and(|p| p.area() > 0.05) {
            polys.push(v);
        }
    }
    TorusSet::from_polygons(polys).expect("convexity checked")
}
