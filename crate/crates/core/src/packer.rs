//! Packing constructions: squares, Type 1 rectangles, strips and the Type 2
//! and Type 3 trapezoids they leave behind.

use crate::config::PackConfig;
use crate::construct::{child, grid_block, local_run, trapezoid, type3_top, BuildError, Builder};
use crate::geometry::{gceil, gfloor, gfrac, Frame, Quad, Region, RegionKind, Vec2};
use crate::plan::{Mode, Plan, PlanNode, RegionType};
use crate::tilt::solve_stack_tilt;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, SQRT_2};

pub use crate::construct::pack_base;

/// Rectangle of length `x` and width `x_prime`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Type1Spec {
    pub x: f64,
    pub x_prime: f64,
    pub c: f64,
}

impl Type1Spec {
    pub fn new(x: f64, x_prime: f64) -> Self {
        Self { x, x_prime, c: 7.0 }
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        let ok = self.x.is_finite()
            && self.x >= 1.0
            && self.c <= 7.0
            && self.x_prime >= self.x.powf(0.75) * (1.0 - 1e-12)
            && self.x_prime <= self.c * self.x;
        if ok {
            Ok(())
        } else {
            Err(BuildError::Spec(format!(
                "Type 1 needs x^(3/4) <= x' <= c*x with c <= 7, got x={} x'={} c={}",
                self.x, self.x_prime, self.c
            )))
        }
    }
}

/// Right trapezoid of height `x`, top edge `top` and slant `theta` from the
/// vertical side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Type2Spec {
    pub x: f64,
    pub top: f64,
    pub theta: f64,
}

/// The largest slant a Type 2 or Type 3 trapezoid at scale `x` may have.
pub fn max_slant(x: f64) -> f64 {
    SQRT_2 / x.sqrt()
}

fn slant_ok(theta: f64, x: f64) -> bool {
    theta >= 0.0 && theta <= max_slant(x) * (1.0 + 1e-12)
}

impl Type2Spec {
    pub fn validate(&self) -> Result<(), BuildError> {
        let r = self.x.sqrt();
        if self.x.is_finite()
            && self.x >= 1.0
            && slant_ok(self.theta, self.x)
            && self.top >= 1.5 * r
            && self.top <= 2.5 * r
        {
            Ok(())
        } else {
            Err(BuildError::Spec(format!(
                "Type 2 needs 0 <= theta <= sqrt(2/x) and top within [1.5, 2.5]*sqrt(x), got x={} top={} theta={}",
                self.x, self.top, self.theta
            )))
        }
    }

    pub fn bottom(&self) -> f64 {
        self.top + self.x * self.theta.tan()
    }
}

/// Right trapezoid at scale `x` with height `h`, integer top `a` and slant
/// `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Type3Spec {
    pub x: f64,
    pub h: f64,
    pub a: f64,
    pub theta: f64,
    pub mode: Mode,
}

impl Type3Spec {
    /// Spec with the top edge fixed by `x` and `mode`.
    pub fn new(x: f64, h: f64, theta: f64, mode: Mode) -> Self {
        Self {
            x,
            h,
            a: type3_top(mode, x),
            theta,
            mode,
        }
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        let r = self.x.sqrt();
        if self.x.is_finite()
            && self.x > 8.0
            && self.a == type3_top(self.mode, self.x)
            && self.a >= 1.0
            && slant_ok(self.theta, self.x)
            && self.h >= 0.4 * r
            && self.h <= 0.6 * r
        {
            Ok(())
        } else {
            Err(BuildError::Spec(format!(
                "Type 3 needs a = {} and h within [0.4, 0.6]*sqrt(x), got x={} h={} a={} theta={}",
                type3_top(self.mode, self.x),
                self.x,
                self.h,
                self.a,
                self.theta
            )))
        }
    }

    pub fn bottom(&self) -> f64 {
        self.a + self.h * self.theta.tan()
    }
}

/// Band `k` of a Type 3 partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandInfo {
    pub k: u32,
    /// Width of the grid block `C_k` at the vertical side.
    pub c: f64,
    /// Width of the stacked band `D_k`.
    pub d: f64,
    /// Fractional part dropped by the floor in `c_k`.
    pub r: f64,
    /// Stack tilt in the band; zero when `d` is an integer.
    pub alpha: f64,
}

/// Band decomposition of a Type 3 trapezoid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Type3Partition {
    pub a: f64,
    pub h1: f64,
    /// Number of stacked bands.
    pub t: u32,
    pub r_prime: f64,
    pub bands: Vec<BandInfo>,
    pub f1: f64,
    pub h2: f64,
}

/// `⌊x^{1/3} + (√2 ∓ k)·x^{1/6}⌋` for packing (`-k`) or covering (`+k`).
pub(crate) fn band_floor(mode: Mode, x: f64, k: f64) -> f64 {
    let (x3, x6) = (x.cbrt(), x.powf(1.0 / 6.0));
    match mode {
        Mode::Pack => gfloor(x3 + (SQRT_2 - k) * x6),
        Mode::Cover => gfloor(x3 - (SQRT_2 + k) * x6),
    }
}

/// Band height `h1` and number of full bands for a Type 3 trapezoid; the
/// count stops early where bands would become too narrow for stacks.
pub(crate) fn band_layout(mode: Mode, x: f64, h: f64, slope: f64) -> Option<(f64, f64, usize)> {
    let ratio = 1.0 / (x.powf(1.0 / 6.0) * slope);
    let h1 = gfloor(ratio);
    if !(h1 >= 1.0) {
        return None;
    }
    let mut full = gfloor(h / h1) as usize;
    // packing band 0 is a plain grid; the stacked bands end at `last`
    let last = |n: usize| match mode {
        Mode::Pack => n.saturating_sub(1),
        Mode::Cover => n,
    };
    while last(full) >= 1 && band_floor(mode, x, last(full) as f64) < 2.0 {
        full -= 1;
    }
    Some((h1, ratio - h1, full))
}

/// Band structure of a packing Type 3 trapezoid.
pub fn type3_partition(spec: &Type3Spec) -> Result<Type3Partition, BuildError> {
    spec.validate()?;
    if spec.mode != Mode::Pack {
        return Err(BuildError::Spec("packing partition of a covering spec".into()));
    }
    let slope = spec.theta.tan();
    let (h1, r_prime, full) = band_layout(Mode::Pack, spec.x, spec.h, slope)
        .ok_or_else(|| BuildError::Spec(format!("band height below 1 for theta={}", spec.theta)))?;
    let mut bands = Vec::new();
    let x3x6 = spec.x.cbrt() + SQRT_2 * spec.x.powf(1.0 / 6.0);
    for k in 1..full {
        let kf = k as f64;
        let fl = band_floor(Mode::Pack, spec.x, kf);
        let d = fl + kf * h1 * slope;
        bands.push(BandInfo {
            k: k as u32,
            c: spec.a - fl,
            d,
            r: gfrac(x3x6 - kf * spec.x.powf(1.0 / 6.0)),
            alpha: solve_stack_tilt(d)?.theta,
        });
    }
    Ok(Type3Partition {
        a: spec.a,
        h1,
        t: bands.len() as u32,
        r_prime,
        bands,
        f1: spec.a + full as f64 * h1 * slope,
        h2: spec.h - full as f64 * h1,
    })
}

/// Lowest and highest y of a convex quad on the vertical line `x`, with `x`
/// clamped into the quad's extent.
pub(crate) fn vertical_extent(q: &Quad, x: f64) -> (f64, f64) {
    let xmin = q.iter().map(|p| p.x).fold(f64::INFINITY, f64::min);
    let xmax = q.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max);
    let x = x.clamp(xmin, xmax);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..4 {
        let (a, b) = (q[i], q[(i + 1) % 4]);
        if (a.x - x) * (b.x - x) > 0.0 {
            continue;
        }
        if a.x == b.x {
            lo = lo.min(a.y.min(b.y));
            hi = hi.max(a.y.max(b.y));
        } else {
            let y = a.y + (x - a.x) / (b.x - a.x) * (b.y - a.y);
            lo = lo.min(y);
            hi = hi.max(y);
        }
    }
    (lo, hi)
}

fn x_range(q: &Quad) -> (f64, f64) {
    (
        q.iter().map(|p| p.x).fold(f64::INFINITY, f64::min),
        q.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max),
    )
}

/// Stack of `n` squares falling to the right at `alpha`, lower-left corner
/// `(c, y)`.
fn band_stack(c: f64, y: f64, n: u64, alpha: f64) -> Quad {
    let (s, co) = alpha.sin_cos();
    let bl = Vec2::new(c, y);
    let br = bl + Vec2::new(co, -s) * n as f64;
    let up = Vec2::new(s, co);
    [bl, br, br + up, bl + up]
}

struct Band {
    y_top: f64,
    y_bot: f64,
    c: f64,
    w: f64,
    d: f64,
    n: u64,
    alpha: f64,
}

const EDGE: f64 = 1e-9;

/// The stacked part of a packing Type 3 trapezoid is the staircase union of
/// `[c_k, w_k] × band k`. These are its ceiling and floor as step functions.
impl Band {
    fn ceiling(bands: &[Band], x: f64) -> f64 {
        bands
            .iter()
            .find(|b| b.w >= x - EDGE)
            .map_or(f64::NEG_INFINITY, |b| b.y_top)
    }

    fn floor(bands: &[Band], x: f64) -> f64 {
        let j = bands.iter().rposition(|b| b.c <= x + EDGE).unwrap_or(0);
        bands.get(j + 1).map_or(bands[j].y_bot, |b| b.y_top)
    }
}

/// Highest offset `Y` for which `q + (0, Y)` stays under the ceiling.
fn ceiling_room(bands: &[Band], q: &Quad) -> f64 {
    let (xmin, xmax) = x_range(q);
    let mut room = f64::INFINITY;
    for p in q {
        room = room.min(Band::ceiling(bands, p.x) - vertical_extent(q, p.x).1);
    }
    for (j, b) in bands.iter().enumerate() {
        if b.w > xmin + EDGE && b.w < xmax - EDGE {
            let bound = bands.get(j + 1).map_or(f64::NEG_INFINITY, |n| n.y_top);
            room = room.min(bound - vertical_extent(q, b.w).1);
        }
    }
    room
}

/// Lowest offset `Y` for which `q + (0, Y)` stays above the floor.
fn floor_room(bands: &[Band], q: &Quad) -> f64 {
    let (xmin, xmax) = x_range(q);
    let mut room = f64::NEG_INFINITY;
    for p in q {
        room = room.max(Band::floor(bands, p.x) - vertical_extent(q, p.x).0);
    }
    for b in bands.iter().skip(1) {
        if b.c > xmin + EDGE && b.c < xmax - EDGE {
            room = room.max(b.y_top - vertical_extent(q, b.c).0);
        }
    }
    room
}

/// Highest offset `Y` for which `q + (0, Y)` stays below `above`.
fn clearance(above: &Quad, q: &Quad) -> f64 {
    let (a0, a1) = x_range(above);
    let (q0, q1) = x_range(q);
    let (lo, hi) = (a0.max(q0), a1.min(q1));
    if lo >= hi {
        return f64::INFINITY;
    }
    let xs = above.iter().chain(q.iter()).map(|p| p.x).filter(|&x| x > lo && x < hi);
    [lo, hi]
        .into_iter()
        .chain(xs)
        .map(|x| vertical_extent(above, x).0 - vertical_extent(q, x).1)
        .fold(f64::INFINITY, f64::min)
}

/// Top offset and stack count per family.
struct ChainLayout {
    families: Vec<(f64, u64)>,
}

fn layout_chain(bands: &[Band], g_top: f64, g_bot: f64) -> Option<ChainLayout> {
    let mut families = Vec::new();
    let mut lowest: Vec<Quad> = Vec::new();
    let last = bands.len() - 1;
    for (k, b) in bands.iter().enumerate() {
        let q = band_stack(b.c, 0.0, b.n, b.alpha);
        let (s, co) = b.alpha.sin_cos();
        let mut hi = ceiling_room(bands, &q);
        for prev in &lowest {
            hi = hi.min(clearance(prev, &q));
        }
        if k == 0 {
            hi = hi.min(b.y_top - g_top - 1.0 / co);
        }
        let mut lo = floor_room(bands, &q);
        if k == last {
            lo = lo.max(b.y_bot + g_bot + b.d * s / co);
        }
        if !(hi >= lo) {
            return None;
        }
        let count = gfloor((hi - lo) * co + 1e-9) as u64 + 1;
        lowest.push(band_stack(b.c, hi - (count - 1) as f64 / co, b.n, b.alpha));
        families.push((hi, count));
    }
    Some(ChainLayout { families })
}

/// Type 3 trapezoid `trap(h, a, a + h·slope)` in `frame`, packing mode.
pub(crate) fn type3_node(b: &Builder, frame: &Frame, x: f64, h: f64, a: f64, slope: f64, label: &str) -> PlanNode {
    let region = Region::new(trapezoid(h, a, a + h * slope), *frame);
    let Some((h1, _, full)) = band_layout(Mode::Pack, x, h, slope) else {
        return b.base(frame, region.kind, label);
    };
    let at = |dx: f64, dy: f64| child(frame, dx, dy, 0.0, false);
    let width = |k: f64| a + k * h1 * slope;
    let mut children = Vec::new();
    let mut bands = Vec::new();
    for k in 0..full {
        let kf = k as f64;
        let y_top = h - kf * h1;
        let y_bot = y_top - h1;
        let c = gfloor(a) - band_floor(Mode::Pack, x, kf);
        if k == 0 {
            children.push(PlanNode::grid(
                "D0",
                Region::new(RegionKind::Rect { w: a, h: h1 }, at(0.0, y_bot)),
                grid_block(frame, 0.0, y_bot, a as u64, h1 as u64),
            ));
        } else if c >= 1.0 {
            children.push(PlanNode::grid(
                format!("C{k}"),
                Region::new(RegionKind::Rect { w: c, h: h1 }, at(0.0, y_bot)),
                grid_block(frame, 0.0, y_bot, c as u64, h1 as u64),
            ));
        }
        children.push(PlanNode::waste(
            format!("E{k}"),
            Region::new(RegionKind::RightTriangle { u: h1 * slope, v: h1 }, at(width(kf), y_bot)),
            "slant sliver of band",
        ));
        if k > 0 {
            let w = width(kf);
            let d = w - c;
            let alpha = solve_stack_tilt(d).map(|t| t.theta).unwrap_or(0.0);
            bands.push(Band {
                y_top,
                y_bot,
                c,
                w,
                d,
                n: gceil(d) as u64,
                alpha,
            });
        }
    }
    if !bands.is_empty() {
        children.push(pack_chain(b, frame, &bands));
    }
    let h2 = h - full as f64 * h1;
    if h2 > 1e-12 {
        let f1 = width(full as f64);
        let f1_frame = at(0.0, 0.0);
        let node = if h2 <= x.cbrt() {
            pack_base(&f1_frame, &RegionKind::Rect { w: f1, h: h2 }, "F1")
        } else {
            let strip = b.strip(&child(frame, f1, 0.0, FRAC_PI_2, false), f1, h2, "F1");
            PlanNode::split(
                "F1",
                Region::new(RegionKind::Rect { w: f1, h: h2 }, f1_frame),
                vec![strip],
            )
        };
        children.push(node);
        children.push(PlanNode::waste(
            "F2",
            Region::new(RegionKind::RightTriangle { u: h2 * slope, v: h2 }, at(f1, 0.0)),
            "slant sliver below the bands",
        ));
    }
    PlanNode::split(label, region, children)
}

/// Staircase outline of the stacked bands, counterclockwise.
pub(crate) fn staircase_outline(tops: &[f64], bots: &[f64], lefts: &[f64], rights: &[f64]) -> Vec<Vec2> {
    let mut pts = Vec::new();
    for k in 0..tops.len() {
        pts.push(Vec2::new(lefts[k], tops[k]));
        pts.push(Vec2::new(lefts[k], bots[k]));
    }
    for k in (0..tops.len()).rev() {
        pts.push(Vec2::new(rights[k], bots[k]));
        pts.push(Vec2::new(rights[k], tops[k]));
    }
    pts.dedup_by(|p, q| (*p - *q).norm() < 1e-12);
    pts
}

fn pack_chain(b: &Builder, frame: &Frame, bands: &[Band]) -> PlanNode {
    let outline = staircase_outline(
        &bands.iter().map(|b| b.y_top).collect::<Vec<_>>(),
        &bands.iter().map(|b| b.y_bot).collect::<Vec<_>>(),
        &bands.iter().map(|b| b.c).collect::<Vec<_>>(),
        &bands.iter().map(|b| b.w).collect::<Vec<_>>(),
    );
    let region = Region::new(RegionKind::Polygon { points: outline }, *frame);
    let (first, last) = (&bands[0], &bands[bands.len() - 1]);
    let stackable = bands.iter().all(|b| b.alpha > 0.0 && b.d >= 2.0);
    let layout = if stackable {
        [(2.0 * first.d.sqrt(), 2.0 * last.d.sqrt()), (0.0, 0.0)]
            .into_iter()
            .find_map(|(gt, gb)| layout_chain(bands, gt, gb))
    } else {
        None
    };
    let Some(layout) = layout else {
        let rows = bands
            .iter()
            .enumerate()
            .map(|(k, band)| {
                pack_base(
                    &child(frame, band.c, band.y_bot, 0.0, false),
                    &RegionKind::Rect {
                        w: band.d,
                        h: band.y_top - band.y_bot,
                    },
                    &format!("D{}", k + 1),
                )
            })
            .collect();
        return PlanNode::split("D", region, rows);
    };
    let mut runs = Vec::new();
    for (k, (band, &(top, count))) in bands.iter().zip(&layout.families).enumerate() {
        let (s, co) = band.alpha.sin_cos();
        runs.push(local_run(
            frame,
            Vec2::new(band.c, top),
            -band.alpha,
            band.n,
            Vec2::new(co, -s),
            count,
            Vec2::new(0.0, -1.0 / co),
            &format!("D{}", k + 1),
        ));
    }
    let (top0, _) = layout.families[0];
    let (s, co) = first.alpha.sin_cos();
    let short = (first.y_top - top0 - 1.0 / co).max(0.0);
    let upper = b.type2(
        &child(frame, first.w, first.y_top, FRAC_PI_2, true),
        first.d,
        short,
        short + first.d * s / co,
        "D11",
    );
    let (top_last, count_last) = layout.families[bands.len() - 1];
    let (s, co) = last.alpha.sin_cos();
    let long = top_last - (count_last - 1) as f64 / co - last.y_bot;
    let lower = b.type2(
        &child(frame, last.c, last.y_bot, -FRAC_PI_2, true),
        last.d,
        (long - last.d * s / co).max(0.0),
        long,
        "Dt1",
    );
    PlanNode::stacks("D", region, runs, Vec::new(), vec![upper, lower])
}

fn finish(b: &Builder, plan: Plan) -> Plan {
    Plan {
        levels: b.levels(),
        ..plan
    }
}

/// Packing of the square `[0,x]²`.
pub fn pack_square(x: f64, cfg: &PackConfig) -> Result<Plan, BuildError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(BuildError::Spec(format!("side must be positive, got {x}")));
    }
    let b = Builder::new(cfg, Mode::Pack);
    let root = b.rect(&Frame::IDENTITY, x, x, "square");
    Ok(finish(&b, Plan::new(Mode::Pack, x, RegionType::Square, cfg.c, root)))
}

/// Cuts of a Type 1 rectangle: `T1'` at the origin, `S1` along its top and
/// `S2` across the full height at the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Type1Partition {
    pub s1: Region,
    pub s2: Region,
    pub core: Region,
    pub m1: f64,
    pub m2: f64,
}

pub fn partition_type1(spec: &Type1Spec) -> Result<Type1Partition, BuildError> {
    spec.validate()?;
    let (w, h) = (spec.x, spec.x_prime);
    let m = w.powf(0.75);
    let (core_w, core_h) = (gfloor(w - m), gfloor(h - m));
    if core_w < 1.0 || core_h < 1.0 {
        return Err(BuildError::Spec(format!("no integer core in {w} x {h}")));
    }
    let (m2, m1) = (w - core_w, h - core_h);
    Ok(Type1Partition {
        s1: Region::new(RegionKind::Rect { w: core_w, h: m1 }, Frame::translation(0.0, core_h)),
        s2: Region::new(
            RegionKind::Rect { w: h, h: m2 },
            Frame::new(Vec2::new(w, 0.0), FRAC_PI_2, false),
        ),
        core: Region::rect(core_w, core_h),
        m1,
        m2,
    })
}

pub fn pack_type1(spec: &Type1Spec, cfg: &PackConfig) -> Result<Plan, BuildError> {
    spec.validate()?;
    let b = Builder::new(cfg, Mode::Pack);
    let root = b.rect(&Frame::IDENTITY, spec.x, spec.x_prime, "T1");
    Ok(finish(&b, Plan::new(Mode::Pack, spec.x, RegionType::T1, spec.c, root)))
}

/// Strip `[0,l] × [0,m]`.
pub fn pack_strip(m: f64, l: f64, cfg: &PackConfig) -> Result<Plan, BuildError> {
    if !(m > 0.0 && l > 0.0) {
        return Err(BuildError::Spec(format!("strip {l} x {m} is empty")));
    }
    let b = Builder::new(cfg, Mode::Pack);
    let root = b.strip(&Frame::IDENTITY, m, l, "strip");
    Ok(finish(&b, Plan::new(Mode::Pack, l.max(m), RegionType::T1, cfg.c, root)))
}

pub fn pack_type2(spec: &Type2Spec, cfg: &PackConfig) -> Result<Plan, BuildError> {
    spec.validate()?;
    let b = Builder::new(cfg, Mode::Pack);
    let root = b.type2(&Frame::IDENTITY, spec.x, spec.top, spec.bottom(), "T2");
    Ok(finish(&b, Plan::new(Mode::Pack, spec.x, RegionType::T2, cfg.c, root)))
}

pub fn pack_type3(spec: &Type3Spec, cfg: &PackConfig) -> Result<Plan, BuildError> {
    spec.validate()?;
    if spec.mode != Mode::Pack {
        return Err(BuildError::Spec("pack_type3 needs a packing spec".into()));
    }
    if band_layout(Mode::Pack, spec.x, spec.h, spec.theta.tan()).is_none() && spec.theta > 0.0 {
        return Err(BuildError::Spec(format!(
            "band height below 1 for theta={}",
            spec.theta
        )));
    }
    let b = Builder::new(cfg, Mode::Pack);
    let root = b.type3(&Frame::IDENTITY, spec.x, spec.h, spec.a, spec.theta.tan(), "T3");
    Ok(finish(&b, Plan::new(Mode::Pack, spec.x, RegionType::T3, cfg.c, root)))
}

/// Grid base case for a region given in its own frame.
pub fn pack_base_grid(region: &Region) -> PlanNode {
    pack_base(&region.frame, &region.kind, "base")
}
