//! Independent checks of a plan's placements against its target region.
//! Nothing here reads the plan's accounting except to compare counts.

use crate::config::PackConfig;
use crate::geometry::{point_in_quad, point_in_region, quads_disjoint, Pose, Quad, Region, UnitSquarePlacement, Vec2};
use crate::plan::{enumerate_node, Mode, Plan, PlanError, PlanNode};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::time::Instant;

/// Violations kept in a report; the total is always counted.
pub const MAX_LISTED: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Overlap,
    Escape,
    Uncovered,
    Count,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    #[serde(rename = "type")]
    pub kind: ViolationKind,
    pub location: Vec2,
    pub magnitude: f64,
    /// Indices of the squares involved, in enumeration order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub squares: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub kind: Mode,
    pub square_count: u64,
    pub checked_squares: u64,
    pub violation_count: u64,
    pub violations: Vec<Violation>,
    pub sampled_points: u64,
    /// Only part of the plan was enumerated.
    pub partial: bool,
    pub passed: bool,
    /// Wall time; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub runtime_ms: f64,
}

impl VerifyReport {
    fn finish(mut self, mut violations: Vec<Violation>, start: Instant) -> Self {
        violations.sort_by(|a, b| {
            (a.kind as u8, &a.squares, a.location.x, a.location.y)
                .partial_cmp(&(b.kind as u8, &b.squares, b.location.x, b.location.y))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        self.violation_count = violations.len() as u64;
        violations.truncate(MAX_LISTED);
        self.passed = violations.is_empty();
        self.violations = violations;
        self.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        self
    }
}

/// Placements to check: the whole plan when it fits the limit, otherwise
/// random subtrees, and random windows of large leaves, until the budget is
/// used.
fn gather(plan: &Plan, cfg: &PackConfig) -> Result<(Vec<Pose>, bool), PlanError> {
    if plan.square_count() <= cfg.limit {
        return Ok((enumerate_node(&plan.root, cfg.limit)?, false));
    }
    let piece = (cfg.limit / 16).max(1);
    let mut pieces: Vec<&PlanNode> = Vec::new();
    fn split<'a>(n: &'a PlanNode, piece: u64, out: &mut Vec<&'a PlanNode>) {
        if n.squares <= piece || n.children().is_empty() {
            out.push(n);
        } else {
            for c in n.children() {
                split(c, piece, out);
            }
        }
    }
    split(&plan.root, piece, &mut pieces);
    // leaves far beyond the budget would take too long even to skim
    pieces.retain(|n| n.squares > 0 && n.squares <= piece.saturating_mul(64));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    pieces.shuffle(&mut rng);
    let mut out = Vec::new();
    for n in pieces {
        let take = n.squares.min(piece);
        if out.len() as u64 + take > cfg.limit {
            continue;
        }
        if take == n.squares {
            out.extend(enumerate_node(n, cfg.limit)?);
        } else {
            let start = rng.gen_range(0..=n.squares - take);
            let mut i = 0u64;
            n.for_each_placement(&mut |p| {
                if i >= start && i < start + take {
                    out.push(p);
                }
                i += 1;
            });
        }
    }
    Ok((out, true))
}

fn quads(poses: &[Pose]) -> Vec<Quad> {
    poses
        .par_iter()
        .map(|p| UnitSquarePlacement::new(*p).corners())
        .collect()
}

fn cell(p: Vec2, size: f64) -> (i64, i64) {
    ((p.x / size).floor() as i64, (p.y / size).floor() as i64)
}

/// Pairs of squares whose interiors meet, found through a spatial hash of
/// centers with cell size 2.
pub fn overlapping_pairs(poses: &[Pose], tau: f64) -> Vec<(usize, usize)> {
    let qs = quads(poses);
    let centers: Vec<Vec2> = poses.iter().map(Pose::center).collect();
    let mut hash: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, c) in centers.iter().enumerate() {
        hash.entry(cell(*c, 2.0)).or_default().push(i);
    }
    let reach = std::f64::consts::SQRT_2 + 1e-9;
    let mut pairs: Vec<(usize, usize)> = (0..poses.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (cx, cy) = cell(centers[i], 2.0);
            let mut found = Vec::new();
            for dx in -1..=1 {
                for dy in -1..=1 {
                    let Some(list) = hash.get(&(cx + dx, cy + dy)) else {
                        continue;
                    };
                    for &j in list {
                        if j > i && (centers[i] - centers[j]).norm() < reach && !quads_disjoint(&qs[i], &qs[j], tau) {
                            found.push((i, j));
                        }
                    }
                }
            }
            found
        })
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Every pair checked directly; for cross-checking the hashed search.
pub fn overlapping_pairs_naive(poses: &[Pose], tau: f64) -> Vec<(usize, usize)> {
    let qs = quads(poses);
    let mut out = Vec::new();
    for i in 0..qs.len() {
        for j in i + 1..qs.len() {
            if !quads_disjoint(&qs[i], &qs[j], tau) {
                out.push((i, j));
            }
        }
    }
    out
}

pub fn verify_packing(plan: &Plan, region: &Region, cfg: &PackConfig) -> Result<VerifyReport, PlanError> {
    let start = Instant::now();
    let (poses, partial) = gather(plan, cfg)?;
    let mut violations = Vec::new();
    for (i, j) in overlapping_pairs(&poses, cfg.tau) {
        let (a, b) = (poses[i].center(), poses[j].center());
        violations.push(Violation {
            kind: ViolationKind::Overlap,
            location: (a + b) * 0.5,
            magnitude: std::f64::consts::SQRT_2 - (a - b).norm(),
            squares: vec![i, j],
        });
    }
    let qs = quads(&poses);
    let escapes: Vec<Violation> = qs
        .par_iter()
        .enumerate()
        .filter_map(|(i, q)| {
            let out: Vec<&Vec2> = q.iter().filter(|c| !point_in_region(region, **c, cfg.tau)).collect();
            out.first().map(|c| Violation {
                kind: ViolationKind::Escape,
                location: **c,
                magnitude: out.len() as f64,
                squares: vec![i],
            })
        })
        .collect();
    violations.extend(escapes);
    if !partial && poses.len() as u64 != plan.square_count() {
        violations.push(Violation {
            kind: ViolationKind::Count,
            location: Vec2::ZERO,
            magnitude: poses.len() as f64 - plan.square_count() as f64,
            squares: Vec::new(),
        });
    }
    let report = VerifyReport {
        kind: Mode::Pack,
        square_count: plan.square_count(),
        checked_squares: poses.len() as u64,
        violation_count: 0,
        violations: Vec::new(),
        sampled_points: 0,
        partial,
        passed: false,
        runtime_ms: 0.0,
    };
    Ok(report.finish(violations, start))
}

/// Points to test for coverage: uniform in the region, then a tenth as many
/// within 0.1 of the plan's internal seams.
pub fn coverage_samples(plan: &Plan, region: &Region, samples: u64, seed: u64) -> Vec<Vec2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = region.bounds();
    let mut pts = Vec::with_capacity((samples + samples / 10) as usize);
    let mut tries = 0u64;
    while (pts.len() as u64) < samples && tries < samples * 100 {
        tries += 1;
        let p = Vec2::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        if point_in_region(region, p, 0.0) {
            pts.push(p);
        }
    }
    let seams: Vec<(Vec2, Vec2)> = plan
        .seams()
        .into_iter()
        .filter(|(a, b)| (*b - *a).norm() > 0.0)
        .collect();
    if seams.is_empty() {
        return pts;
    }
    let mut acc = Vec::with_capacity(seams.len());
    let mut total = 0.0;
    for (a, b) in &seams {
        total += (*b - *a).norm();
        acc.push(total);
    }
    let want = pts.len() as u64 + samples / 10;
    let mut tries = 0u64;
    while (pts.len() as u64) < want && tries < samples * 10 + 100 {
        tries += 1;
        let r = rng.gen_range(0.0..total);
        let k = acc.partition_point(|&v| v < r).min(seams.len() - 1);
        let (a, b) = seams[k];
        let t: f64 = rng.gen_range(0.0..=1.0);
        let off = Vec2::new(rng.gen_range(-0.1..=0.1), rng.gen_range(-0.1..=0.1));
        if off.norm() > 0.1 {
            continue;
        }
        let p = a + (b - a) * t + off;
        if point_in_region(region, p, 0.0) {
            pts.push(p);
        }
    }
    pts
}

pub fn verify_covering(plan: &Plan, region: &Region, cfg: &PackConfig) -> Result<VerifyReport, PlanError> {
    let start = Instant::now();
    let (poses, partial) = gather(plan, cfg)?;
    let qs = quads(&poses);
    let mut hash: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, q) in qs.iter().enumerate() {
        let (mut a, mut b) = ((i64::MAX, i64::MAX), (i64::MIN, i64::MIN));
        for c in q {
            let k = cell(*c, 1.0);
            a = (a.0.min(k.0), a.1.min(k.1));
            b = (b.0.max(k.0), b.1.max(k.1));
        }
        for x in a.0..=b.0 {
            for y in a.1..=b.1 {
                hash.entry((x, y)).or_default().push(i);
            }
        }
    }
    let pts = coverage_samples(plan, region, cfg.samples, cfg.seed);
    let violations: Vec<Violation> = pts
        .par_iter()
        .filter(|p| {
            !hash
                .get(&cell(**p, 1.0))
                .is_some_and(|list| list.iter().any(|&i| point_in_quad(&qs[i], **p, cfg.tau)))
        })
        .map(|p| Violation {
            kind: ViolationKind::Uncovered,
            location: *p,
            magnitude: 0.0,
            squares: Vec::new(),
        })
        .collect();
    let mut violations = violations;
    if !partial && poses.len() as u64 != plan.square_count() {
        violations.push(Violation {
            kind: ViolationKind::Count,
            location: Vec2::ZERO,
            magnitude: poses.len() as f64 - plan.square_count() as f64,
            squares: Vec::new(),
        });
    }
    let report = VerifyReport {
        kind: Mode::Cover,
        square_count: plan.square_count(),
        checked_squares: poses.len() as u64,
        violation_count: 0,
        violations: Vec::new(),
        sampled_points: pts.len() as u64,
        partial,
        passed: false,
        runtime_ms: 0.0,
    };
    Ok(report.finish(violations, start))
}

/// Runs the check that matches the plan's kind against its own region.
pub fn verify(plan: &Plan, cfg: &PackConfig) -> Result<VerifyReport, PlanError> {
    match plan.kind {
        Mode::Pack => verify_packing(plan, &plan.region, cfg),
        Mode::Cover => verify_covering(plan, &plan.region, cfg),
    }
}
