//! Convex polygons in the plane: clipping, differences, segment intersection.

use serde::{Deserialize, Serialize};

pub type Pt = [f64; 2];

const AREA_FLOOR: f64 = 1e-14;
const EPS: f64 = 1e-12;

fn cross(o: Pt, a: Pt, b: Pt) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn signed_area(v: &[Pt]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1]).sum::<f64>() / 2.0
}

/// Convex polygon with counterclockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Pt>,
}

impl ConvexPolygon {
    /// Accepts either orientation; returns `None` for degenerate or non-convex input.
    pub fn new(mut vertices: Vec<Pt>) -> Option<Self> {
        if vertices.len() < 3 || vertices.iter().flatten().any(|x| !x.is_finite()) {
            return None;
        }
        let a = signed_area(&vertices);
        if a.abs() < AREA_FLOOR {
            return None;
        }
        if a < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        let scale = vertices.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        for i in 0..n {
            if cross(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) < -EPS * scale * scale {
                return None;
            }
        }
        Some(Self { vertices })
    }

    pub fn vertices(&self) -> &[Pt] {
        &self.vertices
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn bbox(&self) -> (Pt, Pt) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Closed containment with a small absolute slack.
    pub fn contains(&self, p: Pt) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            cross(a, b, p) >= -EPS * len
        })
    }

    pub fn translate(&self, d: Pt) -> Self {
        Self { vertices: self.vertices.iter().map(|v| [v[0] + d[0], v[1] + d[1]]).collect() }
    }

    /// Part on the left of the directed line `a -> b` (or on the right if `left` is false).
    pub fn clip(&self, a: Pt, b: Pt, left: bool) -> Option<Self> {
        let sign = if left { 1.0 } else { -1.0 };
        let side = |p: Pt| sign * cross(a, b, p);
        let n = self.vertices.len();
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let (sp, sq) = (side(p), side(q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        out.dedup_by(|x, y| (x[0] - y[0]).abs() < 1e-15 && (x[1] - y[1]).abs() < 1e-15);
        if out.len() > 1 && out[0] == out[out.len() - 1] {
            out.pop();
        }
        if out.len() < 3 || signed_area(&out) < AREA_FLOOR {
            return None;
        }
        Some(Self { vertices: out })
    }

    pub fn clip_box(&self, lo: Pt, hi: Pt) -> Option<Self> {
        self.clip(lo, [hi[0], lo[1]], true)?
            .clip([hi[0], lo[1]], hi, true)?
            .clip(hi, [lo[0], hi[1]], true)?
            .clip([lo[0], hi[1]], lo, true)
    }

    fn edges(&self) -> impl Iterator<Item = (Pt, Pt)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    fn bbox_overlaps(&self, other: &Self) -> bool {
        let (a0, a1) = self.bbox();
        let (b0, b1) = other.bbox();
        a0[0] < b1[0] && b0[0] < a1[0] && a0[1] < b1[1] && b0[1] < a1[1]
    }

    pub fn intersection(&self, other: &Self) -> Option<Self> {
        if !self.bbox_overlaps(other) {
            return None;
        }
        other.edges().try_fold(self.clone(), |acc, (a, b)| acc.clip(a, b, true))
    }

    /// `self \ other` as disjoint convex pieces.
    pub fn difference(&self, other: &Self) -> Vec<Self> {
        if !self.bbox_overlaps(other) {
            return vec![self.clone()];
        }
        let mut out = Vec::new();
        let mut rest = Some(self.clone());
        for (a, b) in other.edges() {
            let Some(r) = rest.take() else { break };
            if let Some(outside) = r.clip(a, b, false) {
                out.push(outside);
            }
            rest = r.clip(a, b, true);
        }
        out
    }

    /// Parameter range `[t0, t1]` within `[0, 1]` of the segment `p + t (q - p)` inside the polygon.
    pub fn clip_segment(&self, p: Pt, q: Pt) -> Option<(f64, f64)> {
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        let d = [q[0] - p[0], q[1] - p[1]];
        for (a, b) in self.edges() {
            // inside: cross(a, b, x) >= 0, linear in t
            let f0 = cross(a, b, p);
            let df = (b[0] - a[0]) * d[1] - (b[1] - a[1]) * d[0];
            if df.abs() < 1e-300 {
                if f0 < 0.0 {
                    return None;
                }
                continue;
            }
            let t = -f0 / df;
            if df > 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
            if t0 >= t1 {
                return None;
            }
        }
        Some((t0, t1))
    }

    /// `y`-range of the polygon on the vertical line at `x`, if it meets it.
    pub fn vertical_range(&self, x: f64) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (a, b) in self.edges() {
            let (x0, x1) = (a[0].min(b[0]), a[0].max(b[0]));
            if x < x0 || x > x1 {
                continue;
            }
            let ys = if (b[0] - a[0]).abs() < 1e-300 {
                [a[1], b[1]]
            } else {
                let y = a[1] + (x - a[0]) / (b[0] - a[0]) * (b[1] - a[1]);
                [y, y]
            };
            for y in ys {
                lo = lo.min(y);
                hi = hi.max(y);
            }
        }
        (lo <= hi).then_some((lo, hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(x0: f64, y0: f64, s: f64) -> ConvexPolygon {
        ConvexPolygon::new(vec![[x0, y0], [x0 + s, y0], [x0 + s, y0 + s], [x0, y0 + s]]).unwrap()
    }

    #[test]
    fn orientation_and_area() {
        let p = ConvexPolygon::new(vec![[0.0, 0.0], [0.0, 2.0], [3.0, 0.0]]).unwrap();
        assert_eq!(p.area(), 3.0);
        assert!(ConvexPolygon::new(vec![[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]).is_none());
        let dart = vec![[0.0, 0.0], [2.0, 1.0], [0.0, 2.0], [1.0, 1.0]];
        assert!(ConvexPolygon::new(dart).is_none());
    }

    #[test]
    fn difference_is_disjoint_and_exact() {
        let a = square(0.0, 0.0, 2.0);
        let b = square(1.0, 1.0, 2.0);
        let d = a.difference(&b);
        let total: f64 = d.iter().map(|p| p.area()).sum();
        assert!((total - 3.0).abs() < 1e-14);
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                assert!(d[i].intersection(&d[j]).is_none());
            }
        }
        assert!((a.intersection(&b).unwrap().area() - 1.0).abs() < 1e-14);
        assert!(a.difference(&square(-1.0, -1.0, 4.0)).is_empty());
    }

    #[test]
    fn segment_clipping() {
        let a = square(0.0, 0.0, 1.0);
        let (t0, t1) = a.clip_segment([-1.0, 0.5], [3.0, 0.5]).unwrap();
        assert!((t0 - 0.25).abs() < 1e-15 && (t1 - 0.5).abs() < 1e-15);
        assert!(a.clip_segment([-1.0, 2.0], [3.0, 2.0]).is_none());
        let (y0, y1) = a.vertical_range(0.3).unwrap();
        assert_eq!((y0, y1), (0.0, 1.0));
        assert!(a.vertical_range(1.5).is_none());
    }
}
