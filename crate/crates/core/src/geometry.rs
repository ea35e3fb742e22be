//! Planar primitives: vectors, poses of unit squares, region shapes and the
//! predicates the verifier builds on.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use std::f64::consts::FRAC_PI_4;
use std::ops::{Add, Mul, Neg, Sub};

/// Tolerance used by the geometric predicates.
pub const TAU: f64 = 1e-9;

const ROUND_GUARD: f64 = 1e-12;

/// `floor` that ignores representation noise just below an integer.
pub fn gfloor(v: f64) -> f64 {
    (v + ROUND_GUARD * v.abs().max(1.0)).floor()
}

/// `ceil` that ignores representation noise just above an integer.
pub fn gceil(v: f64) -> f64 {
    (v - ROUND_GUARD * v.abs().max(1.0)).ceil()
}

/// Fractional part relative to [`gfloor`].
pub fn gfrac(v: f64) -> f64 {
    (v - gfloor(v)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn rotate(self, angle: f64) -> Vec2 {
        let (s, c) = angle.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Rigid placement of a unit square: the square's reference corner sits at
/// `(tx, ty)` and its edges are the unit axes rotated by `angle`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub tx: f64,
    pub ty: f64,
    pub angle: f64,
}

impl Pose {
    pub const fn new(tx: f64, ty: f64, angle: f64) -> Self {
        Self { tx, ty, angle }
    }

    pub fn corner(&self) -> Vec2 {
        Vec2::new(self.tx, self.ty)
    }

    pub fn is_valid(&self) -> bool {
        self.tx.is_finite() && self.ty.is_finite() && self.angle.is_finite() && self.angle.abs() <= FRAC_PI_2 + 1e-12
    }

    pub fn center(&self) -> Vec2 {
        self.corner() + Vec2::new(0.5, 0.5).rotate(self.angle)
    }

    /// Pose of the unit square with the given center and orientation. The
    /// angle is reduced modulo a quarter turn into `[-π/4, π/4)`.
    pub fn from_center(center: Vec2, angle: f64) -> Self {
        let angle = normalize_quarter(angle);
        let corner = center - Vec2::new(0.5, 0.5).rotate(angle);
        Self::new(corner.x, corner.y, angle)
    }
}

pub(crate) fn normalize_quarter(angle: f64) -> f64 {
    let k = ((angle + FRAC_PI_4) / FRAC_PI_2).floor();
    let a = angle - k * FRAC_PI_2;
    if a >= FRAC_PI_4 {
        a - FRAC_PI_2
    } else {
        a
    }
}

/// One unit square of a packing or covering.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSquarePlacement {
    pub pose: Pose,
}

impl UnitSquarePlacement {
    pub fn new(pose: Pose) -> Self {
        Self { pose }
    }

    pub fn corners(&self) -> Quad {
        square_corners(self)
    }
}

/// Four points in counterclockwise order.
pub type Quad = [Vec2; 4];

/// Corners of the placed unit square, counterclockwise from the reference
/// corner.
pub fn square_corners(p: &UnitSquarePlacement) -> Quad {
    let o = p.pose.corner();
    let (s, c) = p.pose.angle.sin_cos();
    let ex = Vec2::new(c, s);
    let ey = Vec2::new(-s, c);
    [o, o + ex, o + ex + ey, o + ey]
}

fn centroid(q: &Quad) -> Vec2 {
    (q[0] + q[1] + q[2] + q[3]) * 0.25
}

fn shrink(q: &Quad, tau: f64) -> Quad {
    let c = centroid(q);
    let mut out = *q;
    for p in out.iter_mut() {
        let d = *p - c;
        let len = d.norm();
        if len > 0.0 {
            *p = c + d * ((len - tau).max(0.0) / len);
        }
    }
    out
}

fn separated_along(axis: Vec2, a: &Quad, b: &Quad) -> bool {
    let (mut amin, mut amax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut bmin, mut bmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in a {
        let v = axis.dot(*p);
        amin = amin.min(v);
        amax = amax.max(v);
    }
    for p in b {
        let v = axis.dot(*p);
        bmin = bmin.min(v);
        bmax = bmax.max(v);
    }
    amax <= bmin || bmax <= amin
}

/// True iff the interiors of the two convex quads, each shrunk by `tau`
/// toward its centroid, are disjoint.
pub fn quads_disjoint(q1: &Quad, q2: &Quad, tau: f64) -> bool {
    let a = shrink(q1, tau);
    let b = shrink(q2, tau);
    for quad in [&a, &b] {
        for i in 0..4 {
            let edge = quad[(i + 1) % 4] - quad[i];
            if separated_along(edge.perp(), &a, &b) {
                return true;
            }
        }
    }
    false
}

/// Inside test for a convex counterclockwise quad, inflated by `tau`.
pub fn point_in_quad(q: &Quad, p: Vec2, tau: f64) -> bool {
    for i in 0..4 {
        let a = q[i];
        let e = q[(i + 1) % 4] - a;
        let len = e.norm();
        if e.cross(p - a) < -tau * len {
            return false;
        }
    }
    true
}

/// Orientation-preserving or mirrored rigid motion placing a canonical
/// region shape in the world. World point = `origin + R(angle)·M·p`, where
/// `M` negates x when `mirror` is set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub origin: Vec2,
    pub angle: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub mirror: bool,
}

impl Default for Frame {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Frame {
    pub const IDENTITY: Frame = Frame {
        origin: Vec2::ZERO,
        angle: 0.0,
        mirror: false,
    };

    pub fn new(origin: Vec2, angle: f64, mirror: bool) -> Self {
        Self { origin, angle, mirror }
    }

    pub fn translation(x: f64, y: f64) -> Self {
        Self::new(Vec2::new(x, y), 0.0, false)
    }

    /// Linear part applied to a direction.
    pub fn apply_vec(&self, v: Vec2) -> Vec2 {
        let v = if self.mirror { Vec2::new(-v.x, v.y) } else { v };
        v.rotate(self.angle)
    }

    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.origin + self.apply_vec(p)
    }

    pub fn inverse_apply(&self, p: Vec2) -> Vec2 {
        let v = (p - self.origin).rotate(-self.angle);
        if self.mirror {
            Vec2::new(-v.x, v.y)
        } else {
            v
        }
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &Frame) -> Frame {
        let angle = if self.mirror {
            self.angle - inner.angle
        } else {
            self.angle + inner.angle
        };
        Frame::new(self.apply(inner.origin), angle, self.mirror ^ inner.mirror)
    }

    /// World pose of a unit square given in this frame's local coordinates.
    pub fn map_pose(&self, local: &Pose) -> Pose {
        let angle = if self.mirror {
            self.angle - local.angle
        } else {
            self.angle + local.angle
        };
        Pose::from_center(self.apply(local.center()), angle)
    }
}

/// Canonical shape of a region in its own frame.
///
/// * `Rect`: `[0,w] × [0,h]`.
/// * `RightTrapezoid`: vertical side on `x = 0`, bottom edge of length
///   `bottom` on `y = 0`, top edge of length `top` on `y = h`, slanted side
///   on the right.
/// * `RightTriangle`: legs `u` along x and `v` along y from the origin.
/// * `Polygon`: a simple counterclockwise polygon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum RegionKind {
    Rect { w: f64, h: f64 },
    RightTrapezoid { h: f64, top: f64, bottom: f64 },
    RightTriangle { u: f64, v: f64 },
    Polygon { points: Vec<Vec2> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub kind: RegionKind,
    pub frame: Frame,
}

impl Region {
    pub fn new(kind: RegionKind, frame: Frame) -> Self {
        Self { kind, frame }
    }

    pub fn rect(w: f64, h: f64) -> Self {
        Self::new(RegionKind::Rect { w, h }, Frame::IDENTITY)
    }

    pub fn square(x: f64) -> Self {
        Self::rect(x, x)
    }

    pub fn trapezoid(h: f64, top: f64, bottom: f64) -> Self {
        Self::new(RegionKind::RightTrapezoid { h, top, bottom }, Frame::IDENTITY)
    }

    pub fn triangle(u: f64, v: f64) -> Self {
        Self::new(RegionKind::RightTriangle { u, v }, Frame::IDENTITY)
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    /// Slant angle measured from the vertical side, for trapezoids.
    pub fn slant_angle(&self) -> Option<f64> {
        match self.kind {
            RegionKind::RightTrapezoid { h, top, bottom } => Some(((bottom - top) / h).atan()),
            _ => None,
        }
    }

    pub fn is_valid(&self) -> bool {
        match &self.kind {
            RegionKind::Rect { w, h } => *w > 0.0 && *h > 0.0,
            RegionKind::RightTrapezoid { h, top, bottom } => *h > 0.0 && *top >= 0.0 && *bottom > 0.0 && bottom >= top,
            RegionKind::RightTriangle { u, v } => *u > 0.0 && *v > 0.0,
            RegionKind::Polygon { points } => points.len() >= 3 && shoelace(points) > 0.0,
        }
    }

    pub fn local_polygon(&self) -> Vec<Vec2> {
        match &self.kind {
            RegionKind::Rect { w, h } => vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(*w, 0.0),
                Vec2::new(*w, *h),
                Vec2::new(0.0, *h),
            ],
            RegionKind::RightTrapezoid { h, top, bottom } => vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(*bottom, 0.0),
                Vec2::new(*top, *h),
                Vec2::new(0.0, *h),
            ],
            RegionKind::RightTriangle { u, v } => vec![Vec2::new(0.0, 0.0), Vec2::new(*u, 0.0), Vec2::new(0.0, *v)],
            RegionKind::Polygon { points } => points.clone(),
        }
    }

    /// World-frame polygon, counterclockwise.
    pub fn polygon(&self) -> Vec<Vec2> {
        let mut pts: Vec<Vec2> = self.local_polygon().into_iter().map(|p| self.frame.apply(p)).collect();
        if self.frame.mirror {
            pts.reverse();
        }
        pts
    }

    /// Axis-aligned world bounding box `(min, max)`.
    pub fn bounds(&self) -> (Vec2, Vec2) {
        let pts = self.polygon();
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in pts {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (lo, hi)
    }
}

/// Signed area of a polygon (positive when counterclockwise).
pub fn shoelace(points: &[Vec2]) -> f64 {
    let n = points.len();
    let mut acc = 0.0;
    for i in 0..n {
        acc += points[i].cross(points[(i + 1) % n]);
    }
    0.5 * acc
}

pub fn region_area(r: &Region) -> f64 {
    match &r.kind {
        RegionKind::Rect { w, h } => w * h,
        RegionKind::RightTrapezoid { h, top, bottom } => h * (top + bottom) / 2.0,
        RegionKind::RightTriangle { u, v } => u * v / 2.0,
        RegionKind::Polygon { points } => shoelace(points),
    }
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    let t = if len2 > 0.0 {
        ((p - a).dot(ab) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p - (a + ab * t)).norm()
}

fn polygon_contains(points: &[Vec2], p: Vec2) -> bool {
    let n = points.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (points[i], points[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// True iff `p` lies in `r` grown by `tau` (`tau > 0`) or shrunk by `-tau`
/// (`tau < 0`).
pub fn point_in_region(r: &Region, p: Vec2, tau: f64) -> bool {
    let local = r.frame.inverse_apply(p);
    let pts = r.local_polygon();
    let inside = polygon_contains(&pts, local);
    let n = pts.len();
    let dist = (0..n)
        .map(|i| segment_distance(local, pts[i], pts[(i + 1) % n]))
        .fold(f64::INFINITY, f64::min);
    if tau >= 0.0 {
        inside || dist <= tau
    } else {
        inside && dist >= -tau
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn sq(tx: f64, ty: f64, a: f64) -> Quad {
        square_corners(&UnitSquarePlacement::new(Pose::new(tx, ty, a)))
    }

    fn close(a: Vec2, b: Vec2) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn identity_and_quarter_turn_corners() {
        let q = sq(0.0, 0.0, 0.0);
        let want = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        for (p, w) in q.iter().zip(want) {
            assert!(close(*p, Vec2::new(w.0, w.1)));
        }
        let q = sq(0.0, 0.0, PI / 2.0);
        let want = [(0.0, 0.0), (0.0, 1.0), (-1.0, 1.0), (-1.0, 0.0)];
        for (p, w) in q.iter().zip(want) {
            assert!(close(*p, Vec2::new(w.0, w.1)));
        }
    }

    #[test]
    fn tilted_corners_match_rotation_matrix() {
        let a: f64 = 0.4056;
        let q = sq(2.0, 3.0, a);
        // [cos -sin; sin cos] applied to the unit square's corners
        let m = [[a.cos(), -a.sin()], [a.sin(), a.cos()]];
        let local = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        for (p, (lx, ly)) in q.iter().zip(local) {
            let want = Vec2::new(2.0 + m[0][0] * lx + m[0][1] * ly, 3.0 + m[1][0] * lx + m[1][1] * ly);
            assert!((*p - want).norm() < 1e-12);
        }
    }

    fn sampled_overlap(a: &Quad, b: &Quad) -> bool {
        // dense grid over a's bounding box
        let n = 100;
        let (lo, hi) = a.iter().fold(
            (Vec2::new(f64::MAX, f64::MAX), Vec2::new(f64::MIN, f64::MIN)),
            |(lo, hi), p| {
                (
                    Vec2::new(lo.x.min(p.x), lo.y.min(p.y)),
                    Vec2::new(hi.x.max(p.x), hi.y.max(p.y)),
                )
            },
        );
        for i in 0..n {
            for j in 0..n {
                let p = Vec2::new(
                    lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / n as f64,
                    lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / n as f64,
                );
                if point_in_quad(a, p, -1e-12) && point_in_quad(b, p, -1e-12) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn disjointness_examples() {
        assert!(quads_disjoint(&sq(0.0, 0.0, 0.0), &sq(1.0, 0.0, 0.0), TAU));
        assert!(!quads_disjoint(&sq(0.0, 0.0, 0.0), &sq(0.5, 0.5, 0.0), TAU));
        let a = sq(0.0, 0.0, 0.0);
        let b = sq(1.2, 0.0, PI / 6.0);
        assert_eq!(quads_disjoint(&a, &b, TAU), !sampled_overlap(&a, &b));
    }

    #[test]
    fn region_examples() {
        assert!(point_in_region(&Region::rect(10.0, 5.0), Vec2::new(5.0, 2.5), 0.0));
        assert!(!point_in_region(
            &Region::rect(10.0, 5.0),
            Vec2::new(10.0 + 1e-6, 2.5),
            TAU
        ));
        // midpoint of the slant edge from (5,0) to (3,4)
        let t = Region::trapezoid(4.0, 3.0, 5.0);
        assert!(point_in_region(&t, Vec2::new(4.0, 2.0), TAU));
        assert_eq!(region_area(&Region::rect(10.5, 4.0)), 42.0);
        assert_eq!(region_area(&t), 16.0);
        assert_eq!(region_area(&Region::triangle(3.0, 4.0)), 6.0);
    }

    #[test]
    fn deflated_containment_rejects_boundary() {
        let r = Region::rect(2.0, 2.0);
        assert!(point_in_region(&r, Vec2::new(0.0, 1.0), 0.0));
        assert!(!point_in_region(&r, Vec2::new(0.0, 1.0), -TAU));
    }

    #[test]
    fn guarded_rounding() {
        assert_eq!(gfloor(3.0 - 1e-14), 3.0);
        assert_eq!(gceil(3.0 + 1e-14), 3.0);
        assert_eq!(gfloor(2.7), 2.0);
        assert_eq!(gceil(2.2), 3.0);
    }

    #[test]
    fn frame_composition_matches_sequential_application() {
        let outer = Frame::new(Vec2::new(3.0, -1.0), 0.7, true);
        let inner = Frame::new(Vec2::new(-2.0, 5.0), -1.1, true);
        let both = outer.compose(&inner);
        let p = Vec2::new(0.3, 0.9);
        assert!((both.apply(p) - outer.apply(inner.apply(p))).norm() < 1e-12);
        assert!((both.inverse_apply(both.apply(p)) - p).norm() < 1e-12);
    }

    #[test]
    fn mapped_pose_covers_the_same_square() {
        let f = Frame::new(Vec2::new(1.0, 2.0), 2.5, true);
        let local = Pose::new(0.2, 0.4, 0.3);
        let world = f.map_pose(&local);
        assert!(world.is_valid());
        let mapped: Vec<Vec2> = sq(local.tx, local.ty, local.angle)
            .iter()
            .map(|p| f.apply(*p))
            .collect();
        let got = sq(world.tx, world.ty, world.angle);
        for p in &mapped {
            assert!(got.iter().any(|q| (*q - *p).norm() < 1e-12));
        }
    }

    fn arb_region() -> impl Strategy<Value = Region> {
        let frame = (-50.0..50.0f64, -50.0..50.0f64, -3.0..3.0f64, any::<bool>())
            .prop_map(|(x, y, a, m)| Frame::new(Vec2::new(x, y), a, m));
        let kind = prop_oneof![
            (0.1..100.0f64, 0.1..100.0f64).prop_map(|(w, h)| RegionKind::Rect { w, h }),
            (0.1..100.0f64, 0.0..50.0f64, 0.0..50.0f64).prop_map(|(h, top, extra)| {
                RegionKind::RightTrapezoid {
                    h,
                    top,
                    bottom: top + extra + 0.01,
                }
            }),
            (0.1..100.0f64, 0.1..100.0f64).prop_map(|(u, v)| RegionKind::RightTriangle { u, v }),
        ];
        (kind, frame).prop_map(|(k, f)| Region::new(k, f))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn corners_form_a_unit_square(tx in -1e3..1e3f64, ty in -1e3..1e3f64, a in -FRAC_PI_2..FRAC_PI_2) {
            let q = sq(tx, ty, a);
            for i in 0..4 {
                prop_assert!(((q[(i + 1) % 4] - q[i]).norm() - 1.0).abs() < 1e-12);
            }
            let rel: Vec<Vec2> = q.iter().map(|p| *p - q[0]).collect();
            prop_assert!((shoelace(&rel) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn disjointness_is_symmetric(
            a in (-2.0..2.0f64, -2.0..2.0f64, -1.5..1.5f64),
            b in (-2.0..2.0f64, -2.0..2.0f64, -1.5..1.5f64),
        ) {
            let qa = sq(a.0, a.1, a.2);
            let qb = sq(b.0, b.1, b.2);
            prop_assert_eq!(quads_disjoint(&qa, &qb, TAU), quads_disjoint(&qb, &qa, TAU));
        }

        #[test]
        fn region_area_matches_shoelace(r in arb_region()) {
            let a = region_area(&r);
            let s = shoelace(&r.polygon());
            prop_assert!((a - s).abs() <= 1e-9 * a.max(1e-300));
        }
    }

    #[test]
    fn disjointness_agrees_with_sampling_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for _ in 0..1000 {
            let a = sq(0.0, 0.0, rng.gen_range(-1.5..1.5));
            let b = sq(
                rng.gen_range(-1.6..1.6),
                rng.gen_range(-1.6..1.6),
                rng.gen_range(-1.5..1.5),
            );
            let sampled = sampled_overlap(&a, &b);
            let disjoint = quads_disjoint(&a, &b, TAU);
            // the grid oracle resolves overlaps of area above ~1e-3 reliably
            if sampled {
                assert!(!disjoint, "oracle sees overlap, predicate says disjoint");
                checked += 1;
            } else if !disjoint {
                let area = overlap_area_estimate(&a, &b);
                assert!(area < 1e-3, "predicate overlap with no sampled evidence, area {area}");
            }
        }
        assert!(checked > 100);
    }

    fn overlap_area_estimate(a: &Quad, b: &Quad) -> f64 {
        let n = 400;
        let mut hits = 0;
        for i in 0..n {
            for j in 0..n {
                let p = Vec2::new(
                    -1.5 + 3.0 * (i as f64 + 0.5) / n as f64,
                    -1.5 + 3.0 * (j as f64 + 0.5) / n as f64,
                );
                if point_in_quad(a, p, 0.0) && point_in_quad(b, p, 0.0) {
                    hits += 1;
                }
            }
        }
        hits as f64 * 9.0 / (n * n) as f64
    }
}
