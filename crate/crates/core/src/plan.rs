//! Plan trees: region decompositions whose leaves are grid fills, stack runs
//! or conceded regions, with exact area/count bookkeeping at every node.

use crate::geometry::{region_area, Pose, Region, Vec2};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub const PLAN_VERSION: u32 = 1;

/// Default cap on materialized placements.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 10_000_000;

const REL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Pack,
    Cover,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Pack => "pack",
            Mode::Cover => "cover",
        })
    }
}

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("plan has {count} squares, above the enumeration limit {limit}")]
    OverLimit { count: u64, limit: u64 },
    #[error("malformed plan at `{label}`: {reason}")]
    Malformed { label: String, reason: String },
    #[error("negative waste {0}: accounting bug")]
    NegativeWaste(f64),
    #[error("unknown region type `{0}`")]
    UnknownRegionType(String),
    #[error("unsupported plan version {0}")]
    Version(u32),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// `count` unit squares in a line: square `j` sits at `base + j·step`. A run
/// may be repeated `repeat` times, copy `i` shifted by `i·pitch`, which is how
/// the parallel stacks of a strip are stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StackRun {
    pub base: Pose,
    pub count: u64,
    pub step: Vec2,
    pub label: String,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub repeat: u64,
    #[serde(default, skip_serializing_if = "is_zero_vec")]
    pub pitch: Vec2,
}

fn one() -> u64 {
    1
}

fn is_one(v: &u64) -> bool {
    *v == 1
}

fn is_zero_vec(v: &Vec2) -> bool {
    v.x == 0.0 && v.y == 0.0
}

impl StackRun {
    pub fn single(base: Pose, count: u64, step: Vec2, label: impl Into<String>) -> Self {
        Self {
            base,
            count,
            step,
            label: label.into(),
            repeat: 1,
            pitch: Vec2::ZERO,
        }
    }

    pub fn repeated(mut self, repeat: u64, pitch: Vec2) -> Self {
        self.repeat = repeat;
        self.pitch = if repeat > 1 { pitch } else { Vec2::ZERO };
        self
    }

    pub fn squares(&self) -> u64 {
        self.count * self.repeat
    }

    pub fn placements(&self) -> impl Iterator<Item = Pose> + '_ {
        (0..self.repeat).flat_map(move |i| {
            (0..self.count).map(move |j| {
                let off = self.pitch * i as f64 + self.step * j as f64;
                Pose::new(self.base.tx + off.x, self.base.ty + off.y, self.base.angle)
            })
        })
    }
}

/// `rows × cols` grid of unit squares; square `(i, j)` has its reference
/// corner at `origin + R(angle)·(j, i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFill {
    pub origin: Pose,
    pub rows: u64,
    pub cols: u64,
}

impl GridFill {
    pub fn squares(&self) -> u64 {
        self.rows * self.cols
    }

    pub fn placements(&self) -> impl Iterator<Item = Pose> + '_ {
        let ex = Vec2::new(1.0, 0.0).rotate(self.origin.angle);
        let ey = Vec2::new(0.0, 1.0).rotate(self.origin.angle);
        (0..self.rows).flat_map(move |i| {
            (0..self.cols).map(move |j| {
                let p = self.origin.corner() + ex * j as f64 + ey * i as f64;
                Pose::new(p.x, p.y, self.origin.angle)
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NodeKind {
    /// Children tile the node's region. In covering plans the children may
    /// reach past it; the parts outside are listed as `overshoot`.
    Split {
        children: Vec<PlanNode>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        overshoot: Vec<Region>,
    },
    Grid(GridFill),
    /// Tilted stacks plus the sub-regions they leave, which are planned
    /// separately.
    Stacks {
        runs: Vec<StackRun>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        grids: Vec<GridFill>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        leftovers: Vec<PlanNode>,
    },
    DeclaredWaste {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanNode {
    pub label: String,
    pub region: Region,
    pub area: f64,
    pub squares: u64,
    #[serde(flatten)]
    pub kind: NodeKind,
}

impl PlanNode {
    pub fn split(label: impl Into<String>, region: Region, children: Vec<PlanNode>) -> Self {
        Self::split_with_overshoot(label, region, children, Vec::new())
    }

    pub fn split_with_overshoot(
        label: impl Into<String>,
        region: Region,
        children: Vec<PlanNode>,
        overshoot: Vec<Region>,
    ) -> Self {
        let squares = children.iter().map(|c| c.squares).sum();
        Self {
            label: label.into(),
            area: region_area(&region),
            region,
            squares,
            kind: NodeKind::Split { children, overshoot },
        }
    }

    pub fn grid(label: impl Into<String>, region: Region, grid: GridFill) -> Self {
        Self {
            label: label.into(),
            area: region_area(&region),
            region,
            squares: grid.squares(),
            kind: NodeKind::Grid(grid),
        }
    }

    pub fn stacks(
        label: impl Into<String>,
        region: Region,
        runs: Vec<StackRun>,
        grids: Vec<GridFill>,
        leftovers: Vec<PlanNode>,
    ) -> Self {
        let squares = runs.iter().map(StackRun::squares).sum::<u64>()
            + grids.iter().map(GridFill::squares).sum::<u64>()
            + leftovers.iter().map(|c| c.squares).sum::<u64>();
        Self {
            label: label.into(),
            area: region_area(&region),
            region,
            squares,
            kind: NodeKind::Stacks { runs, grids, leftovers },
        }
    }

    pub fn waste(label: impl Into<String>, region: Region, reason: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            area: region_area(&region),
            region,
            squares: 0,
            kind: NodeKind::DeclaredWaste { reason: reason.into() },
        }
    }

    /// Waste (packing) or excess (covering) of this subtree.
    pub fn slack(&self, mode: Mode) -> f64 {
        match mode {
            Mode::Pack => self.area - self.squares as f64,
            Mode::Cover => self.squares as f64 - self.area,
        }
    }

    pub fn children(&self) -> &[PlanNode] {
        match &self.kind {
            NodeKind::Split { children, .. } => children,
            NodeKind::Stacks { leftovers, .. } => leftovers,
            _ => &[],
        }
    }

    /// Depth-first visit of every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a PlanNode)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// Calls `f` on every placed square of the subtree.
    pub fn for_each_placement(&self, f: &mut impl FnMut(Pose)) {
        match &self.kind {
            NodeKind::Split { children, .. } => children.iter().for_each(|c| c.for_each_placement(f)),
            NodeKind::Grid(g) => g.placements().for_each(&mut *f),
            NodeKind::Stacks { runs, grids, leftovers } => {
                runs.iter().for_each(|r| r.placements().for_each(&mut *f));
                grids.iter().for_each(|g| g.placements().for_each(&mut *f));
                leftovers.iter().for_each(|c| c.for_each_placement(f));
            }
            NodeKind::DeclaredWaste { .. } => {}
        }
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(PlanNode::depth).max().unwrap_or(0)
    }
}

/// Shape class whose waste bound a plan is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionType {
    Square,
    T1,
    T2,
    T3,
}

impl FromStr for RegionType {
    type Err = PlanError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "square" => Ok(RegionType::Square),
            "t1" => Ok(RegionType::T1),
            "t2" => Ok(RegionType::T2),
            "t3" => Ok(RegionType::T3),
            _ => Err(PlanError::UnknownRegionType(s.to_string())),
        }
    }
}

impl RegionType {
    /// `(constant, exponent)` of the waste bound for this shape class.
    pub fn bound_parameters(self, c: f64) -> (f64, f64) {
        match self {
            RegionType::Square => (16.0 * SQRT_2 + 38.0, 5.0 / 8.0),
            RegionType::T1 => ((15.0 + c) * SQRT_2 + 38.0, 5.0 / 8.0),
            RegionType::T2 => (19.0 / 2.0 + 7.0 * SQRT_2 / 2.0, 5.0 / 6.0),
            RegionType::T3 => (19.0 / 4.0 + 7.0 * SQRT_2 / 4.0, 1.0 / 3.0),
        }
    }
}

/// A complete plan document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Plan {
    pub version: u32,
    pub kind: Mode,
    /// Scale parameter `x` of the planned shape.
    pub scale: f64,
    pub region_type: RegionType,
    /// Aspect constant `c` used for Type 1 bounds.
    pub aspect: f64,
    pub region: Region,
    /// Nesting depth of the recursive shape decomposition that built this plan.
    #[serde(default)]
    pub levels: u32,
    pub root: PlanNode,
}

impl Plan {
    pub fn new(kind: Mode, scale: f64, region_type: RegionType, aspect: f64, root: PlanNode) -> Self {
        Self {
            version: PLAN_VERSION,
            kind,
            scale,
            region_type,
            aspect,
            region: root.region.clone(),
            levels: 0,
            root,
        }
    }

    pub fn square_count(&self) -> u64 {
        self.root.squares
    }

    pub fn to_json(&self) -> Result<String, PlanError> {
        let mut s = serde_json::to_string(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Plan, PlanError> {
        let plan: Plan = serde_json::from_str(s)?;
        if plan.version != PLAN_VERSION {
            return Err(PlanError::Version(plan.version));
        }
        Ok(plan)
    }

    /// Every internal seam: the boundary segments of all node regions.
    pub fn seams(&self) -> Vec<(Vec2, Vec2)> {
        let mut out = Vec::new();
        self.root.walk(&mut |n| {
            let poly = n.region.polygon();
            for i in 0..poly.len() {
                out.push((poly[i], poly[(i + 1) % poly.len()]));
            }
        });
        out
    }
}

pub fn enumerate_placements(plan: &Plan, limit: u64) -> Result<Vec<Pose>, PlanError> {
    enumerate_node(&plan.root, limit)
}

pub fn enumerate_node(node: &PlanNode, limit: u64) -> Result<Vec<Pose>, PlanError> {
    if node.squares > limit {
        return Err(PlanError::OverLimit {
            count: node.squares,
            limit,
        });
    }
    let mut out = Vec::with_capacity(node.squares as usize);
    node.for_each_placement(&mut |p| out.push(p));
    Ok(out)
}

/// Aggregated ledger line for all nodes sharing a label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub label: String,
    pub nodes: u64,
    pub area: f64,
    pub squares: u64,
    /// Waste or excess created at these nodes themselves, excluding what
    /// their sub-plans account for.
    pub own: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub region_type: RegionType,
    pub constant: f64,
    pub exponent: f64,
    pub value: f64,
    pub bound_value: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WasteReport {
    pub x: f64,
    pub kind: Mode,
    pub region_type: RegionType,
    pub area: f64,
    pub square_count: u64,
    pub waste_or_excess: f64,
    pub bound_value: f64,
    pub bound_constant: f64,
    pub bound_exponent: f64,
    pub passed: bool,
    pub depth: usize,
    pub per_region: Vec<LedgerEntry>,
}

fn malformed(node: &PlanNode, reason: impl Into<String>) -> PlanError {
    PlanError::Malformed {
        label: node.label.clone(),
        reason: reason.into(),
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Recomputes the subtree's accounting bottom-up and checks it against what
/// the nodes carry. Returns the recomputed `(area, squares)`.
fn audit(node: &PlanNode, mode: Mode, ledger: &mut BTreeMap<String, LedgerEntry>) -> Result<(f64, u64), PlanError> {
    if !node.region.is_valid() && node.area > 0.0 {
        return Err(malformed(node, format!("invalid region {:?}", node.region.kind)));
    }
    let area = region_area(&node.region);
    if !close(area, node.area) {
        return Err(malformed(
            node,
            format!("stored area {} != region area {area}", node.area),
        ));
    }
    let mut child_slack = 0.0;
    let squares = match &node.kind {
        NodeKind::Split { children, overshoot } => {
            let mut sum_area = 0.0;
            let mut sum_sq = 0;
            for c in children {
                let (a, s) = audit(c, mode, ledger)?;
                sum_area += a;
                sum_sq += s;
                child_slack += c.slack(mode);
            }
            let over: f64 = overshoot.iter().map(region_area).sum();
            if mode == Mode::Pack && !overshoot.is_empty() {
                return Err(malformed(node, "packing split with overshoot"));
            }
            if !children.is_empty() && !close(sum_area - over, area) {
                return Err(malformed(
                    node,
                    format!("children area {sum_area} - overshoot {over} != {area}"),
                ));
            }
            sum_sq
        }
        NodeKind::Grid(g) => g.squares(),
        NodeKind::Stacks { runs, grids, leftovers } => {
            let mut s =
                runs.iter().map(StackRun::squares).sum::<u64>() + grids.iter().map(GridFill::squares).sum::<u64>();
            for c in leftovers {
                let (_, cs) = audit(c, mode, ledger)?;
                s += cs;
                child_slack += c.slack(mode);
            }
            s
        }
        NodeKind::DeclaredWaste { .. } => 0,
    };
    if squares != node.squares {
        return Err(malformed(node, format!("stored count {} != {squares}", node.squares)));
    }
    let slack = node.slack(mode);
    if slack < -REL_TOL * area.max(1.0) {
        return Err(malformed(node, format!("negative {mode} slack {slack}")));
    }
    let e = ledger.entry(node.label.clone()).or_insert_with(|| LedgerEntry {
        label: node.label.clone(),
        nodes: 0,
        area: 0.0,
        squares: 0,
        own: 0.0,
    });
    e.nodes += 1;
    e.area += area;
    e.squares += squares;
    e.own += slack - child_slack;
    Ok((area, squares))
}

pub fn check_bound(report: &WasteReport, region_type: RegionType, c: f64) -> Result<BoundCheck, PlanError> {
    if report.waste_or_excess < -REL_TOL * report.area.max(1.0) {
        return Err(PlanError::NegativeWaste(report.waste_or_excess));
    }
    let (constant, exponent) = region_type.bound_parameters(c);
    let bound_value = constant * report.x.powf(exponent);
    Ok(BoundCheck {
        region_type,
        constant,
        exponent,
        value: report.waste_or_excess,
        bound_value,
        passed: report.waste_or_excess <= bound_value,
    })
}

/// Exact bottom-up accounting of a plan, with its bound verdict.
pub fn account(plan: &Plan) -> Result<WasteReport, PlanError> {
    let mut ledger = BTreeMap::new();
    let (area, squares) = audit(&plan.root, plan.kind, &mut ledger)?;
    let waste_or_excess = plan.root.slack(plan.kind);
    let mut report = WasteReport {
        x: plan.scale,
        kind: plan.kind,
        region_type: plan.region_type,
        area,
        square_count: squares,
        waste_or_excess,
        bound_value: 0.0,
        bound_constant: 0.0,
        bound_exponent: 0.0,
        passed: false,
        depth: plan.root.depth(),
        per_region: ledger.into_values().collect(),
    };
    let check = check_bound(&report, plan.region_type, plan.aspect)?;
    report.bound_value = check.bound_value;
    report.bound_constant = check.constant;
    report.bound_exponent = check.exponent;
    report.passed = check.passed;
    Ok(report)
}
