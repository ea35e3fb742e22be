//! SVG drawings of plans. Output depends only on the plan and the options.

use crate::geometry::{Region, UnitSquarePlacement, Vec2};
use crate::plan::{NodeKind, Plan, PlanError, PlanNode};
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    /// Draw only the region tree, no squares.
    pub outline_only: bool,
    /// Most squares drawn before giving up.
    pub limit: u64,
    /// Width of the drawing in pixels.
    pub width: f64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            outline_only: false,
            limit: 1_000_000,
            width: 1000.0,
        }
    }
}

struct View {
    lo: Vec2,
    hi: Vec2,
    scale: f64,
}

impl View {
    fn point(&self, p: Vec2, out: &mut String) {
        let x = (p.x - self.lo.x) * self.scale;
        let y = (self.hi.y - p.y) * self.scale;
        let _ = write!(out, "{x:.3},{y:.3} ");
    }

    fn polygon(&self, pts: &[Vec2], class: &str, out: &mut String) {
        out.push_str("<polygon class=\"");
        out.push_str(class);
        out.push_str("\" points=\"");
        for p in pts {
            self.point(*p, out);
        }
        out.pop();
        out.push_str("\"/>\n");
    }
}

fn outlines(node: &PlanNode, view: &View, out: &mut String) {
    let class = match node.kind {
        NodeKind::DeclaredWaste { .. } => "waste",
        _ => "region",
    };
    view.polygon(&node.region.polygon(), class, out);
    if let NodeKind::Split { overshoot, .. } = &node.kind {
        for r in overshoot {
            view.polygon(&r.polygon(), "overshoot", out);
        }
    }
    for c in node.children() {
        outlines(c, view, out);
    }
}

pub fn render_svg(plan: &Plan, opts: &RenderOptions) -> Result<String, PlanError> {
    if !opts.outline_only && plan.square_count() > opts.limit {
        return Err(PlanError::OverLimit {
            count: plan.square_count(),
            limit: opts.limit,
        });
    }
    let (lo, hi) = bounds(plan);
    let pad = 0.02 * (hi.x - lo.x).max(hi.y - lo.y);
    let lo = Vec2::new(lo.x - pad, lo.y - pad);
    let hi = Vec2::new(hi.x + pad, hi.y + pad);
    let scale = opts.width / (hi.x - lo.x);
    let view = View { lo, hi, scale };
    let (w, h) = ((hi.x - lo.x) * scale, (hi.y - lo.y) * scale);
    let stroke = 0.6_f64.min(0.25 * scale).max(0.05);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">"
    );
    let _ = writeln!(
        out,
        "<style>polygon{{stroke-width:{stroke:.3};stroke-linejoin:round}}\
         .region{{fill:none;stroke:#1f4e79}}\
         .waste{{fill:#d9d9d9;stroke:#7f7f7f}}\
         .overshoot{{fill:#f4b183;fill-opacity:0.5;stroke:#c55a11}}\
         .square{{fill:#9dc3e6;stroke:#2e75b6}}</style>"
    );
    let _ = writeln!(out, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    if !opts.outline_only {
        out.push_str("<g>\n");
        plan.root.for_each_placement(&mut |p| {
            view.polygon(&UnitSquarePlacement::new(p).corners(), "square", &mut out);
        });
        out.push_str("</g>\n");
    }
    out.push_str("<g>\n");
    outlines(&plan.root, &view, &mut out);
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

fn bounds(plan: &Plan) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut grow = |r: &Region| {
        let (a, b) = r.bounds();
        lo = Vec2::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Vec2::new(hi.x.max(b.x), hi.y.max(b.y));
    };
    grow(&plan.region);
    plan.root.walk(&mut |n| {
        if let NodeKind::Split { overshoot, .. } = &n.kind {
            overshoot.iter().for_each(&mut grow);
        }
    });
    (lo, hi)
}
