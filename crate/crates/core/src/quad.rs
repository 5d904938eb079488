//! Quadrature kernels: Gauss-Legendre rules, adaptive Gauss-Kronrod on composite panels,
//! and equispaced torus averages. All reductions use pairwise summation so results do not
//! depend on evaluation order.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use crate::error::{LabError, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One Gauss-Kronrod 7/15 step: `(K15 estimate, |K15 - G7|)`.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    /// Absolute error target for the whole integral.
    pub abs_tol: f64,
    /// Initial panel length.
    pub panel: f64,
    pub max_depth: u32,
    /// Accept unresolved panels at maximum depth, charging `2 h (1 + log(1/h))` to the error
    /// budget (the mass of a logarithmic singularity on a panel of width `h`).
    pub log_singular: bool,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, panel: 1.0, max_depth: 20, log_singular: false }
    }
}

impl QuadOptions {
    pub fn log_integrand(abs_tol: f64, panel: f64) -> Self {
        Self { abs_tol, panel, max_depth: 24, log_singular: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Globally adaptive Gauss-Kronrod: the range is cut into panels of length about `opts.panel`,
/// then the panel with the largest error estimate is bisected until the summed estimate meets
/// `abs_tol`. A cell's value is the K15 sum over its two halves; its error is the larger of
/// the halves' `|K15 - G7|` and the gap between that sum and K15 on the whole cell, so a kink
/// that fools one rule pair is caught by the other.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Result<QuadResult> {
    if b == a {
        return Ok(QuadResult { value: 0.0, error: 0.0 });
    }
    let len = b - a;
    let panels = (len.abs() / opts.panel).ceil().max(1.0) as usize;
    let h = len / panels as f64;
    let mut cells: Vec<Cell> = Vec::with_capacity(2 * panels);
    let mut heap = BinaryHeap::with_capacity(2 * panels);
    for i in 0..panels {
        let lo = a + h * i as f64;
        let hi = if i + 1 == panels { b } else { lo + h };
        let whole = gk15(&mut f, lo, hi).0;
        push_cell(&mut f, &mut cells, &mut heap, lo, hi, whole, 0)?;
    }
    let mut total_err: f64 = cells.iter().map(|c| c.err).sum();
    let mut frozen_err = 0.0;
    while total_err > opts.abs_tol {
        let Some(Reverse((_, idx))) = heap.pop() else {
            break;
        };
        let cell = cells[idx];
        if cell.err <= 1e-15 * cell.value.abs() {
            continue;
        }
        if cell.depth >= opts.max_depth {
            if opts.log_singular {
                let w = (cell.b - cell.a).abs();
                total_err -= cell.err;
                frozen_err += cell.err.max(2.0 * w * (1.0 + (1.0 / w).ln()));
                continue;
            }
            return Err(LabError::QuadratureNonconvergence { achieved: total_err, wanted: opts.abs_tol });
        }
        cells[idx].live = false;
        total_err -= cell.err;
        let m = 0.5 * (cell.a + cell.b);
        let l = push_cell(&mut f, &mut cells, &mut heap, cell.a, m, cell.left, cell.depth + 1)?;
        let r = push_cell(&mut f, &mut cells, &mut heap, m, cell.b, cell.right, cell.depth + 1)?;
        total_err += l + r;
        if total_err <= opts.abs_tol {
            break;
        }
    }
    let values: Vec<f64> = cells.iter().filter(|c| c.live).map(|c| c.value).collect();
    Ok(QuadResult { value: pairwise_sum(&values), error: total_err.max(0.0) + frozen_err })
}

/// [`integrate`] on each piece between consecutive sorted `breaks` inside `(a, b)`, with the
/// tolerance shared in proportion to length.
pub fn integrate_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult> {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    let len = b - a;
    let mut values = Vec::with_capacity(pts.len());
    let mut error = 0.0;
    for w in pts.windows(2) {
        let sub = QuadOptions { abs_tol: opts.abs_tol * (w[1] - w[0]) / len, ..opts };
        let r = integrate(&mut f, w[0], w[1], sub)?;
        values.push(r.value);
        error += r.error;
    }
    Ok(QuadResult { value: pairwise_sum(&values), error })
}

/// Points in `[a, b)` where the integer-valued `count` changes, located by scanning `n` cells
/// and bisecting each change to within `1e-14`.
pub fn locate_jumps<C: FnMut(f64) -> usize>(mut count: C, a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    let mut out = Vec::new();
    let mut prev = count(a);
    for i in 1..=n {
        let x = a + h * i as f64;
        let cur = count(x);
        if cur != prev {
            let (mut lo, mut hi) = (x - h, x);
            while hi - lo > 1e-14 {
                let mid = 0.5 * (lo + hi);
                if count(mid) == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        prev = cur;
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    a: f64,
    b: f64,
    value: f64,
    left: f64,
    right: f64,
    err: f64,
    depth: u32,
    live: bool,
}

/// Min-heap on the negated error, so the largest error pops first; the cell index breaks ties.
type HeapItem = Reverse<(OrdF64, usize)>;

#[derive(Debug, Clone, Copy, PartialEq)]
struct OrdF64(f64);

impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

#[allow(clippy::too_many_arguments)]
fn push_cell<F: FnMut(f64) -> f64>(
    f: &mut F,
    cells: &mut Vec<Cell>,
    heap: &mut BinaryHeap<HeapItem>,
    a: f64,
    b: f64,
    whole: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (left, el) = gk15(f, a, m);
    let (right, er) = gk15(f, m, b);
    let value = left + right;
    if !value.is_finite() {
        return Err(LabError::QuadratureNonconvergence { achieved: f64::INFINITY, wanted: 0.0 });
    }
    let err = (el + er).max((whole - value).abs());
    cells.push(Cell { a, b, value, left, right, err, depth, live: true });
    heap.push(Reverse((OrdF64(-err), cells.len() - 1)));
    Ok(err)
}

/// Streaming pairwise summation: blocks of 64 are summed directly and combined along a
/// binary carry chain, so the result matches a balanced tree independent of chunking.
#[derive(Debug, Default)]
pub struct PairwiseSum {
    stack: Vec<(u32, f64)>,
    block: f64,
    in_block: usize,
}

impl PairwiseSum {
    pub fn add(&mut self, x: f64) {
        self.block += x;
        self.in_block += 1;
        if self.in_block == 64 {
            let mut item = (0u32, self.block);
            while let Some(&(lvl, v)) = self.stack.last() {
                if lvl != item.0 {
                    break;
                }
                self.stack.pop();
                item = (lvl + 1, v + item.1);
            }
            self.stack.push(item);
            self.block = 0.0;
            self.in_block = 0;
        }
    }

    pub fn total(&self) -> f64 {
        let mut acc = self.block;
        for &(_, v) in self.stack.iter().rev() {
            acc += v;
        }
        acc
    }
}

/// Equispaced `m^d`-point average of `g` over `[0, 2pi)^d`, nodes at `(k + shift) 2pi/m`.
/// Exact for trigonometric polynomials of degree below `m` in each variable.
pub fn torus_average<G: FnMut(&[f64]) -> f64>(d: usize, m: usize, shift: f64, mut g: G) -> f64 {
    let total = m.pow(d as u32);
    let step = TAU / m as f64;
    let mut theta = vec![0.0; d];
    let mut acc = PairwiseSum::default();
    for idx in 0..total {
        let mut r = idx;
        for th in theta.iter_mut() {
            *th = ((r % m) as f64 + shift) * step;
            r /= m;
        }
        acc.add(g(&theta));
    }
    acc.total() / total as f64
}

pub const TORUS_MAX_POINTS: usize = 1 << 24;

#[derive(Debug, Clone)]
pub struct TorusAverage {
    pub value: f64,
    pub nodes_per_dim: usize,
    /// `(nodes per dimension, value)` for every resolution tried.
    pub trace: Vec<(usize, f64)>,
}

/// Torus average with resolution doubling from 32 nodes per dimension until two successive
/// values agree to `tol`; the returned value is never coarser than 64 nodes.
pub fn torus_average_stable<G: FnMut(&[f64]) -> f64>(d: usize, tol: f64, shift: f64, mut g: G) -> Result<TorusAverage> {
    if d == 0 {
        let v = g(&[]);
        return Ok(TorusAverage { value: v, nodes_per_dim: 1, trace: vec![(1, v)] });
    }
    let mut m = 32;
    let mut prev = torus_average(d, m, shift, &mut g);
    let mut trace = vec![(m, prev)];
    loop {
        m *= 2;
        if m.checked_pow(d as u32).map_or(true, |n| n > TORUS_MAX_POINTS) {
            let last = trace[trace.len() - 1].1;
            let diff = (last - trace[trace.len().saturating_sub(2)].1).abs();
            return Err(LabError::QuadratureNonconvergence { achieved: diff, wanted: tol });
        }
        let v = torus_average(d, m, shift, &mut g);
        trace.push((m, v));
        if (v - prev).abs() <= tol {
            return Ok(TorusAverage { value: v, nodes_per_dim: m, trace });
        }
        prev = v;
    }
}

/// Value at `h = 0` of the interpolating polynomial through `(h_i, v_i)` (Neville).
pub fn extrapolate_to_zero(points: &[(f64, f64)]) -> f64 {
    let n = points.len();
    let mut p: Vec<f64> = points.iter().map(|q| q.1).collect();
    for k in 1..n {
        for i in 0..n - k {
            let (hi, hk) = (points[i].0, points[i + k].0);
            p[i] = (hk * p[i] - hi * p[i + 1]) / (hk - hi);
        }
    }
    p[0]
}

/// Intercept at `x = 0` of the least-squares line through the points.
pub fn linear_intercept(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return my;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    my - sxy / sxx * mx
}
