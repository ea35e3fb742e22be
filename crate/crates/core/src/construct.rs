//! Recursive machinery shared by the packing and covering constructions.
//!
//! Every sub-region is built in its own canonical coordinates and placed in
//! the world through a [`Frame`]. Packing and covering differ only in the
//! base case, the strip tilt and the Type 3 band layout.

use crate::config::PackConfig;
use crate::geometry::{gceil, gfloor, normalize_quarter, Frame, Pose, Region, RegionKind, Vec2};
use crate::plan::{GridFill, Mode, PlanError, PlanNode, StackRun};
use crate::tilt::{solve_cover_tilt, solve_pack_tilt, TiltError};
use crate::{coverer, packer};
use std::cell::Cell;
use std::f64::consts::{PI, SQRT_2};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("invalid specification: {0}")]
    Spec(String),
    #[error(transparent)]
    Tilt(#[from] TiltError),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Frame of a sub-region whose canonical origin sits at local `(x, y)`.
pub(crate) fn child(frame: &Frame, x: f64, y: f64, angle: f64, mirror: bool) -> Frame {
    frame.compose(&Frame::new(Vec2::new(x, y), angle, mirror))
}

pub(crate) fn trapezoid(h: f64, top: f64, bottom: f64) -> RegionKind {
    RegionKind::RightTrapezoid { h, top, bottom }
}

/// Axis-aligned block of `cols × rows` squares whose local lower-left corner
/// is `(ox, oy)`, re-expressed as a world grid with angle in `[-π/4, π/4)`.
pub(crate) fn grid_block(frame: &Frame, ox: f64, oy: f64, cols: u64, rows: u64) -> GridFill {
    let corner = frame.apply(Vec2::new(ox, oy));
    let ux = frame.apply_vec(Vec2::new(1.0, 0.0));
    let uy = frame.apply_vec(Vec2::new(0.0, 1.0));
    let a0 = normalize_quarter(ux.y.atan2(ux.x));
    let e1 = Vec2::new(1.0, 0.0).rotate(a0);
    let e2 = Vec2::new(0.0, 1.0).rotate(a0);
    let far_x = ux * cols as f64;
    let far_y = uy * rows as f64;
    let corners = [corner, corner + far_x, corner + far_y, corner + far_x + far_y];
    let s1 = corners.iter().map(|p| p.dot(e1)).fold(f64::INFINITY, f64::min);
    let s2 = corners.iter().map(|p| p.dot(e2)).fold(f64::INFINITY, f64::min);
    let origin = e1 * s1 + e2 * s2;
    let (cols, rows) = if ux.dot(e1).abs() > 0.5 {
        (cols, rows)
    } else {
        (rows, cols)
    };
    GridFill {
        origin: Pose::new(origin.x, origin.y, a0),
        rows,
        cols,
    }
}

/// Stack run given in local coordinates.
#[allow(clippy::too_many_arguments)]
pub(crate) fn local_run(
    frame: &Frame,
    corner: Vec2,
    angle: f64,
    count: u64,
    step: Vec2,
    repeat: u64,
    pitch: Vec2,
    label: &str,
) -> StackRun {
    let base = frame.map_pose(&Pose::new(corner.x, corner.y, angle));
    StackRun::single(base, count, frame.apply_vec(step), label).repeated(repeat, frame.apply_vec(pitch))
}

/// Rows of a staircase: `(row index, columns)` merged into grid blocks.
fn staircase(frame: &Frame, rows: impl Iterator<Item = u64>) -> Vec<GridFill> {
    let mut out = Vec::new();
    let mut start = 0u64;
    let mut current = 0u64;
    let mut i = 0u64;
    for cols in rows {
        if cols != current {
            if current > 0 {
                out.push(grid_block(frame, 0.0, start as f64, current, i - start));
            }
            start = i;
            current = cols;
        }
        i += 1;
    }
    if current > 0 {
        out.push(grid_block(frame, 0.0, start as f64, current, i - start));
    }
    out
}

fn fill_node(label: &str, region: Region, mut grids: Vec<GridFill>, reason: &str) -> PlanNode {
    match grids.len() {
        0 => PlanNode::waste(label, region, reason),
        1 => PlanNode::grid(label, region, grids.pop().unwrap()),
        _ => PlanNode::stacks(label, region, Vec::new(), grids, Vec::new()),
    }
}

fn count(v: f64) -> u64 {
    if v > 0.0 {
        v as u64
    } else {
        0
    }
}

/// Grid base case for packing: axis-aligned rows anchored at the right-angle
/// corner, each as wide as the region allows over its full height.
pub fn pack_base(frame: &Frame, kind: &RegionKind, label: &str) -> PlanNode {
    let region = Region::new(kind.clone(), *frame);
    let grids = match *kind {
        RegionKind::Rect { w, h } => {
            let (c, r) = (count(gfloor(w)), count(gfloor(h)));
            if c > 0 && r > 0 {
                vec![grid_block(frame, 0.0, 0.0, c, r)]
            } else {
                Vec::new()
            }
        }
        RegionKind::RightTrapezoid { h, top, bottom } => {
            let slope = (bottom - top) / h;
            let rows = count(gfloor(h));
            staircase(
                frame,
                (0..rows).map(move |i| count(gfloor(bottom - (i as f64 + 1.0) * slope))),
            )
        }
        RegionKind::RightTriangle { u, v } => {
            let rows = count(gfloor(v));
            staircase(
                frame,
                (0..rows).map(move |i| count(gfloor(u * (1.0 - (i as f64 + 1.0) / v)))),
            )
        }
        RegionKind::Polygon { .. } => Vec::new(),
    };
    fill_node(label, region, grids, "too thin for a unit square")
}

/// Grid base case for covering: rows of `⌈width⌉` squares over `⌈height⌉`
/// rows, each row as wide as the region's widest point in it.
pub fn cover_base(frame: &Frame, kind: &RegionKind, label: &str) -> PlanNode {
    let region = Region::new(kind.clone(), *frame);
    let grids = match kind {
        RegionKind::Rect { w, h } => vec![grid_block(frame, 0.0, 0.0, count(gceil(*w)), count(gceil(*h)))],
        RegionKind::RightTrapezoid { h, top, bottom } => {
            let (h, top, bottom) = (*h, *top, *bottom);
            let slope = (bottom - top) / h;
            staircase(
                frame,
                (0..count(gceil(h))).map(move |i| count(gceil(bottom - i as f64 * slope))),
            )
        }
        RegionKind::RightTriangle { u, v } => {
            let (u, v) = (*u, *v);
            staircase(
                frame,
                (0..count(gceil(v))).map(move |i| count(gceil(u * (1.0 - i as f64 / v)))),
            )
        }
        RegionKind::Polygon { points } => {
            let (mut lo, mut hi) = (
                Vec2::new(f64::INFINITY, f64::INFINITY),
                Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
            );
            for p in points {
                lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
            vec![grid_block(
                frame,
                lo.x,
                lo.y,
                count(gceil(hi.x - lo.x)),
                count(gceil(hi.y - lo.y)),
            )]
        }
    };
    fill_node(label, region, grids, "empty")
}

/// Integer top edge of the Type 3 pieces cut from a Type 2 trapezoid of
/// height `x`.
pub fn type3_top(mode: Mode, x: f64) -> f64 {
    let (x3, x6) = (x.cbrt(), x.powf(1.0 / 6.0));
    match mode {
        Mode::Pack => gfloor(x3 + SQRT_2 * x6),
        Mode::Cover => gfloor(x3 - SQRT_2 * x6),
    }
}

/// Heights of the `s` horizontal bands of a Type 2 trapezoid, top first.
/// All but the bottom band have integer height.
pub fn band_heights(h: f64, s: u64) -> Vec<f64> {
    let total = gfloor(h) as u64;
    let (q, rem) = (total / s, total % s);
    let mut out: Vec<f64> = (0..s).map(|i| (q + u64::from(i < rem)) as f64).collect();
    if let Some(last) = out.last_mut() {
        *last += h - total as f64;
    }
    out
}

pub(crate) struct Builder<'a> {
    pub cfg: &'a PackConfig,
    pub mode: Mode,
    level: Cell<u32>,
    max_level: Cell<u32>,
}

impl<'a> Builder<'a> {
    pub fn new(cfg: &'a PackConfig, mode: Mode) -> Self {
        Self {
            cfg,
            mode,
            level: Cell::new(0),
            max_level: Cell::new(0),
        }
    }

    pub fn levels(&self) -> u32 {
        self.max_level.get()
    }

    pub fn nested<T>(&self, f: impl FnOnce() -> T) -> T {
        let l = self.level.get() + 1;
        self.level.set(l);
        self.max_level.set(self.max_level.get().max(l));
        let out = f();
        self.level.set(l - 1);
        out
    }

    pub fn base(&self, frame: &Frame, kind: RegionKind, label: &str) -> PlanNode {
        match self.mode {
            Mode::Pack => pack_base(frame, &kind, label),
            Mode::Cover => cover_base(frame, &kind, label),
        }
    }

    /// Type 1 rectangle `[0,w] × [0,h]`.
    pub fn rect(&self, frame: &Frame, w: f64, h: f64, label: &str) -> PlanNode {
        let kind = RegionKind::Rect { w, h };
        if w.min(h) <= self.cfg.base_cutoff {
            return self.base(frame, kind, label);
        }
        self.nested(|| {
            let region = Region::new(kind, *frame);
            let m = w.max(h).powf(0.75);
            let (core_w, core_h) = (gfloor(w - m), gfloor(h - m));
            let (m2, m1) = (w - core_w, h - core_h);
            let too_short = core_w < 2.0 * gceil(m1) || h < 2.0 * gceil(m2);
            if core_w < 1.0 || core_h < 1.0 || too_short {
                // no room for two strips: run one strip along the long side
                let strip = if w >= h {
                    self.strip(frame, h, w, "strip")
                } else {
                    self.strip(&child(frame, w, 0.0, PI / 2.0, false), w, h, "strip")
                };
                return PlanNode::split(label, region, vec![strip]);
            }
            let core = PlanNode::grid(
                "T1'",
                Region::new(RegionKind::Rect { w: core_w, h: core_h }, *frame),
                grid_block(frame, 0.0, 0.0, core_w as u64, core_h as u64),
            );
            let s1 = self.strip(&child(frame, 0.0, core_h, 0.0, false), m1, core_w, "S1");
            let s2 = self.strip(&child(frame, w, 0.0, PI / 2.0, false), m2, h, "S2");
            PlanNode::split(label, region, vec![core, s1, s2])
        })
    }

    /// Strip `[0,L] × [0,m]` filled by tilted stacks of `⌈m⌉` squares with
    /// a Type 2 trapezoid left at each end.
    pub fn strip(&self, frame: &Frame, m: f64, l: f64, label: &str) -> PlanNode {
        let kind = RegionKind::Rect { w: l, h: m };
        if !(m >= 2.0) || l < 2.0 * gceil(m) {
            return self.base(frame, kind, label);
        }
        let tilt = match self.mode {
            Mode::Pack => solve_pack_tilt(m),
            Mode::Cover => solve_cover_tilt(m),
        };
        let tilt = match tilt {
            Ok(t) if t.theta > 0.0 => t,
            _ => return self.base(frame, kind, label),
        };
        let (s, c) = tilt.theta.sin_cos();
        let tan = s / c;
        let g = 2.0 * m.sqrt();
        // left line of the first stack crosses y = 0 at x0 and y = m at g
        let x0 = g + m * tan;
        let n_stacks = gfloor((l - x0 - g) * c);
        if n_stacks < 1.0 {
            return self.base(frame, kind, label);
        }
        let run_len = n_stacks / c;
        let g_right = l - x0 - run_len;
        let corner = match self.mode {
            Mode::Pack => Vec2::new(x0, 0.0),
            Mode::Cover => Vec2::new(x0 + s * tan, -s),
        };
        let run = local_run(
            frame,
            corner,
            tilt.theta,
            tilt.n,
            Vec2::new(-s, c),
            n_stacks as u64,
            Vec2::new(1.0 / c, 0.0),
            "stack",
        );
        let band = Region::new(
            RegionKind::Polygon {
                points: vec![
                    Vec2::new(x0, 0.0),
                    Vec2::new(x0 + run_len, 0.0),
                    Vec2::new(x0 + run_len - m * tan, m),
                    Vec2::new(x0 - m * tan, m),
                ],
            },
            *frame,
        );
        let stacks = PlanNode::stacks("stacks", band, vec![run], Vec::new(), Vec::new());
        let left = self.type2(frame, m, g, g + m * tan, "end");
        let right = self.type2(&child(frame, l, m, PI, false), m, g_right, g_right + m * tan, "end");
        PlanNode::split(label, Region::new(kind, *frame), vec![left, stacks, right])
    }

    /// Type 2 trapezoid of height `h`: horizontal bands, each split into a
    /// rectangle `A_i` and a Type 3 trapezoid `B_i` against the slant.
    pub fn type2(&self, frame: &Frame, h: f64, top: f64, bottom: f64, label: &str) -> PlanNode {
        let kind = trapezoid(h, top, bottom);
        let slope = (bottom - top) / h;
        if slope <= 1e-15 {
            return self.rect(frame, top, h, label);
        }
        if h <= self.cfg.base_cutoff {
            return self.base(frame, kind, label);
        }
        self.nested(|| {
            let s = ((2.0 * h.sqrt()).round() as u64).max(1);
            let a = type3_top(self.mode, h);
            let mut children = Vec::new();
            let mut y_top = h;
            for (i, hb) in band_heights(h, s).into_iter().enumerate() {
                let y_bot = y_top - hb;
                let w_top = top + (h - y_top) * slope;
                let band_kind = trapezoid(hb, w_top, w_top + hb * slope);
                if a < 1.0 || w_top - a < 1.0 {
                    children.push(self.base(&child(frame, 0.0, y_bot, 0.0, false), band_kind, "band"));
                } else {
                    // Whole-number width for A; B's top takes the fraction.
                    let rest = match self.mode {
                        Mode::Pack => gfloor(w_top - a),
                        Mode::Cover => w_top - a,
                    };
                    children.push(self.rect(&child(frame, 0.0, y_bot, 0.0, false), rest, hb, &format!("A{i}")));
                    children.push(self.type3(
                        &child(frame, rest, y_bot, 0.0, false),
                        h,
                        hb,
                        w_top - rest,
                        slope,
                        &format!("B{i}"),
                    ));
                }
                y_top = y_bot;
            }
            PlanNode::split(label, Region::new(kind, *frame), children)
        })
    }

    /// Type 3 trapezoid at scale `x`: height `h`, top `a`, slant
    /// `slope = tanθ`.
    pub fn type3(&self, frame: &Frame, x: f64, h: f64, a: f64, slope: f64, label: &str) -> PlanNode {
        if slope <= 1e-15 {
            return self.rect(frame, a, h, label);
        }
        self.nested(|| match self.mode {
            Mode::Pack => packer::type3_node(self, frame, x, h, a, slope, label),
            Mode::Cover => coverer::type3_node(self, frame, x, h, a, slope, label),
        })
    }
}
