//! Covering constructions. The decomposition follows the packing one; stacks
//! overshoot the strip or band they cover and every leftover is covered by
//! whole rows of squares.

use crate::config::PackConfig;
use crate::construct::{child, cover_base, grid_block, local_run, trapezoid, BuildError, Builder};
use crate::geometry::{gceil, gfrac, Frame, Region, RegionKind, Vec2};
use crate::packer::{band_floor, band_layout, staircase_outline, BandInfo, Type1Spec, Type2Spec, Type3Spec};
use crate::plan::{GridFill, Mode, Plan, PlanNode, RegionType};
use crate::tilt::solve_cover_tilt;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

/// Band structure of a covering Type 3 trapezoid. Bands are numbered from
/// the top, `k = 1..=t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverPartition {
    pub a: f64,
    pub h1: f64,
    pub t: u32,
    pub r_prime: f64,
    pub bands: Vec<BandInfo>,
    pub f1: f64,
    pub h2: f64,
}

pub fn cover_partition(spec: &Type3Spec) -> Result<CoverPartition, BuildError> {
    spec.validate()?;
    if spec.mode != Mode::Cover {
        return Err(BuildError::Spec("covering partition of a packing spec".into()));
    }
    let slope = spec.theta.tan();
    let (h1, r_prime, full) = band_layout(Mode::Cover, spec.x, spec.h, slope)
        .ok_or_else(|| BuildError::Spec(format!("band height below 1 for theta={}", spec.theta)))?;
    let x6 = spec.x.powf(1.0 / 6.0);
    let mut bands = Vec::new();
    for k in 1..=full {
        let kf = k as f64;
        let fl = band_floor(Mode::Cover, spec.x, kf);
        let d = fl + kf * h1 * slope;
        bands.push(BandInfo {
            k: k as u32,
            c: spec.a - fl,
            d,
            r: gfrac(spec.x.cbrt() - (SQRT_2 + kf) * x6),
            alpha: solve_cover_tilt(d)?.theta,
        });
    }
    Ok(CoverPartition {
        a: spec.a,
        h1,
        t: full as u32,
        r_prime,
        bands,
        f1: spec.a + spec.h * slope,
        h2: spec.h - full as f64 * h1,
    })
}

struct Band {
    y_top: f64,
    y_bot: f64,
    c: f64,
    /// Right end of the band at its bottom edge.
    r: f64,
    d: f64,
    n: u64,
    alpha: f64,
}

impl Band {
    fn trig(&self) -> (f64, f64, f64) {
        let (s, c) = self.alpha.sin_cos();
        (s, c, s / c)
    }

    /// Bottom line of a stack family whose lowest stack has its lower-left
    /// corner at height `y`.
    fn bottom_line(&self, y: f64, x: f64) -> f64 {
        let (s, _, t) = self.trig();
        y - (x - self.c + s) * t
    }
}

/// Type 3 trapezoid `trap(h, a, a + h·slope)` in `frame`, covering mode.
pub(crate) fn type3_node(b: &Builder, frame: &Frame, x: f64, h: f64, a: f64, slope: f64, label: &str) -> PlanNode {
    let region = Region::new(trapezoid(h, a, a + h * slope), *frame);
    let Some((h1, _, full)) = band_layout(Mode::Cover, x, h, slope) else {
        return b.base(frame, region.kind, label);
    };
    let at = |dx: f64, dy: f64, angle: f64| child(frame, dx, dy, angle, false);
    let mut children = Vec::new();
    let mut overshoot = Vec::new();
    let mut bands = Vec::new();
    for k in 1..=full {
        let kf = k as f64;
        let y_top = h - (kf - 1.0) * h1;
        let y_bot = y_top - h1;
        let c = a - band_floor(Mode::Cover, x, kf);
        let r = a + kf * h1 * slope;
        if c >= 1.0 {
            children.push(PlanNode::grid(
                format!("C{k}"),
                Region::new(RegionKind::Rect { w: c, h: h1 }, at(0.0, y_bot, 0.0)),
                grid_block(frame, 0.0, y_bot, c as u64, h1 as u64),
            ));
        }
        overshoot.push(Region::new(
            RegionKind::RightTriangle { u: h1 * slope, v: h1 },
            at(r, y_top, PI),
        ));
        let d = r - c;
        bands.push(Band {
            y_top,
            y_bot,
            c,
            r,
            d,
            n: gceil(d) as u64,
            alpha: solve_cover_tilt(d).map(|t| t.theta).unwrap_or(0.0),
        });
    }
    if !bands.is_empty() {
        children.push(cover_chain(b, frame, h, &bands));
    }
    let h2 = h - full as f64 * h1;
    if h2 > 1e-12 {
        let f1 = a + h * slope;
        let f1_region = Region::new(RegionKind::Rect { w: f1, h: h2 }, *frame);
        let node = if h2 <= x.cbrt() {
            cover_base(frame, &f1_region.kind, "F1")
        } else {
            let strip = b.strip(&at(f1, 0.0, FRAC_PI_2), f1, h2, "F1");
            PlanNode::split("F1", f1_region, vec![strip])
        };
        children.push(node);
        overshoot.push(Region::new(
            RegionKind::RightTriangle { u: h2 * slope, v: h2 },
            at(f1, h2, PI),
        ));
    }
    PlanNode::split_with_overshoot(label, region, children, overshoot)
}

/// Stacked bands covered bottom-up. Each family starts low enough to meet
/// the family below over their common columns; the columns only the upper
/// band has get a block of whole rows.
fn cover_chain(b: &Builder, frame: &Frame, h: f64, bands: &[Band]) -> PlanNode {
    let outline = staircase_outline(
        &bands.iter().map(|b| b.y_top).collect::<Vec<_>>(),
        &bands.iter().map(|b| b.y_bot).collect::<Vec<_>>(),
        &bands.iter().map(|b| b.c).collect::<Vec<_>>(),
        &bands.iter().map(|b| b.r).collect::<Vec<_>>(),
    );
    let region = Region::new(RegionKind::Polygon { points: outline }, *frame);
    if !bands.iter().all(|b| b.alpha > 0.0 && b.d >= 2.0) {
        let rows = bands
            .iter()
            .enumerate()
            .map(|(k, band)| {
                cover_base(
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
    }
    let t = bands.len();
    let mut runs = Vec::new();
    let mut grids: Vec<GridFill> = Vec::new();
    let mut leftovers = Vec::new();
    // (corner height of the lowest stack, stack count) of the family below
    let mut below: Option<(usize, f64, u64)> = None;
    let mut lowest_bottom = 0.0;
    for k in (0..t).rev() {
        let band = &bands[k];
        let (s, co, tan) = band.trig();
        let y0 = match below {
            None => {
                let g = 2.0 * band.d.sqrt();
                let y = band.y_bot + g + (band.r - band.c + s) * tan;
                lowest_bottom = g;
                y
            }
            Some((j, yj, nj)) => {
                let lower = &bands[j];
                let top = |x: f64| lower.bottom_line(yj, x) + nj as f64 / lower.trig().1;
                let y = [lower.c, band.r]
                    .into_iter()
                    .map(|x| top(x) + (x - band.c + s) * tan)
                    .fold(f64::INFINITY, f64::min);
                let rise = band.bottom_line(y, band.c) - band.y_bot;
                let cols = lower.c - band.c;
                if rise > 0.0 && cols >= 1.0 {
                    grids.push(grid_block(frame, band.c, band.y_bot, cols as u64, gceil(rise) as u64));
                }
                y
            }
        };
        // rise until the family reaches the lower right corner of the band
        // above, or leaves a short gap under the top edge for the first band
        let (target, at_x) = if k > 0 {
            (band.y_top, bands[k - 1].r)
        } else {
            (h - 2.0 * band.d.sqrt(), band.c)
        };
        let need = (target - band.bottom_line(y0, at_x)) * co;
        let count = if need > 0.0 {
            gceil(need - 1e-12).max(1.0) as u64
        } else {
            1
        };
        runs.push(local_run(
            frame,
            Vec2::new(band.c - s, y0),
            -band.alpha,
            band.n,
            Vec2::new(co, -s),
            count,
            Vec2::new(0.0, 1.0 / co),
            &format!("D{}", k + 1),
        ));
        below = Some((k, y0, count));
    }
    // bottom leftover under the lowest family
    let last = &bands[t - 1];
    let tan = last.trig().2;
    leftovers.push(b.type2(
        &child(frame, last.c, last.y_bot, -FRAC_PI_2, true),
        last.d,
        lowest_bottom,
        lowest_bottom + last.d * tan,
        "Dt1",
    ));
    // top leftover over the highest family
    let (_, y1, n1) = below.expect("at least one band");
    let first = &bands[0];
    let (_, co, tan) = first.trig();
    let top = |x: f64| first.bottom_line(y1, x) + n1 as f64 / co;
    let short = h - top(first.c);
    if short >= 0.0 {
        leftovers.push(b.type2(
            &child(frame, first.r, h, FRAC_PI_2, true),
            first.d,
            short,
            short + first.d * tan,
            "D11",
        ));
    } else if top(first.r) < h {
        let x_hit = first.c - short / tan;
        leftovers.push(cover_base(
            &child(frame, first.r, h, PI, false),
            &RegionKind::RightTriangle {
                u: first.r - x_hit,
                v: h - top(first.r),
            },
            "D11",
        ));
    }
    PlanNode::stacks("D", region, runs, grids, leftovers)
}

fn finish(b: &Builder, plan: Plan) -> Plan {
    Plan {
        levels: b.levels(),
        ..plan
    }
}

/// Covering of the square `[0,x]²`.
pub fn cover_square(x: f64, cfg: &PackConfig) -> Result<Plan, BuildError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(BuildError::Spec(format!("side must be positive, got {x}")));
    }
    let b = Builder::new(cfg, Mode::Cover);
    let root = b.rect(&Frame::IDENTITY, x, x, "square");
    Ok(finish(&b, Plan::new(Mode::Cover, x, RegionType::Square, cfg.c, root)))
}

pub fn cover_type1(spec: &Type1Spec, cfg: &PackConfig) -> Result<Plan, BuildError> {
    spec.validate()?;
    let b = Builder::new(cfg, Mode::Cover);
    let root = b.rect(&Frame::IDENTITY, spec.x, spec.x_prime, "T1");
    Ok(finish(&b, Plan::new(Mode::Cover, spec.x, RegionType::T1, spec.c, root)))
}

/// Strip `[0,l] × [0,m]`.
pub fn cover_strip(m: f64, l: f64, cfg: &PackConfig) -> Result<Plan, BuildError> {
    if !(m > 0.0 && l > 0.0) {
        return Err(BuildError::Spec(format!("strip {l} x {m} is empty")));
    }
    let b = Builder::new(cfg, Mode::Cover);
    let root = b.strip(&Frame::IDENTITY, m, l, "strip");
    Ok(finish(
        &b,
        Plan::new(Mode::Cover, l.max(m), RegionType::T1, cfg.c, root),
    ))
}

pub fn cover_type2(spec: &Type2Spec, cfg: &PackConfig) -> Result<Plan, BuildError> {
    spec.validate()?;
    let b = Builder::new(cfg, Mode::Cover);
    let root = b.type2(&Frame::IDENTITY, spec.x, spec.top, spec.bottom(), "T2");
    Ok(finish(&b, Plan::new(Mode::Cover, spec.x, RegionType::T2, cfg.c, root)))
}

pub fn cover_type3(spec: &Type3Spec, cfg: &PackConfig) -> Result<Plan, BuildError> {
    spec.validate()?;
    if spec.mode != Mode::Cover {
        return Err(BuildError::Spec("cover_type3 needs a covering spec".into()));
    }
    if band_layout(Mode::Cover, spec.x, spec.h, spec.theta.tan()).is_none() && spec.theta > 0.0 {
        return Err(BuildError::Spec(format!(
            "band height below 1 for theta={}",
            spec.theta
        )));
    }
    let b = Builder::new(cfg, Mode::Cover);
    let root = b.type3(&Frame::IDENTITY, spec.x, spec.h, spec.a, spec.theta.tan(), "T3");
    Ok(finish(&b, Plan::new(Mode::Cover, spec.x, RegionType::T3, cfg.c, root)))
}

/// Grid base case for a region given in its own frame.
pub fn cover_base_grid(region: &Region) -> PlanNode {
    cover_base(&region.frame, &region.kind, "base")
}
