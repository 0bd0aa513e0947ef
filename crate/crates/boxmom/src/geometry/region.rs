use super::vec2::{Dir2, Vec2};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{FRAC_PI_2, PI};

/// Shape of a bounded region.
#[derive(Debug, Clone)]
pub enum RegionKind {
    /// 1D interval [a, b].
    Interval { a: f64, b: f64 },
    /// Axis-aligned rectangle, sides Lx × Ly, lower-left corner at `origin`.
    Rectangle { origin: Vec2, lx: f64, ly: f64 },
    /// Simple polygon, counterclockwise vertex order. `convex` is validated
    /// at construction.
    Polygon { vertices: Vec<Vec2>, convex: bool },
    /// Rectangle with quarter-circle corner fillets of radius r.
    RoundedRectangle {
        origin: Vec2,
        lx: f64,
        ly: f64,
        radius: f64,
    },
}

/// One piece of a boundary decomposition.
///
/// Segment ids are stable labels used by boundary fields. Rectangles use
/// 1 = bottom, 2 = right, 3 = top, 4 = left; rounded rectangles add arcs
/// 5..8 counterclockwise starting from the bottom-right corner; polygons
/// number edges 1..n from the first vertex; intervals use 1 = left point,
/// 2 = right point.
#[derive(Debug, Clone)]
pub struct Segment {
    pub id: usize,
    pub geom: SegmentGeom,
}

#[derive(Debug, Clone)]
pub enum SegmentGeom {
    Line {
        start: Vec2,
        end: Vec2,
    },
    /// Counterclockwise circular arc; the outward normal is radial.
    Arc {
        center: Vec2,
        radius: f64,
        theta0: f64,
        theta1: f64,
    },
    /// 1D boundary point with outward normal ±1.
    Point1d {
        x: f64,
        normal: f64,
    },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match &self.geom {
            SegmentGeom::Line { start, end } => (*end - *start).norm(),
            SegmentGeom::Arc {
                radius,
                theta0,
                theta1,
                ..
            } => radius * (theta1 - theta0),
            SegmentGeom::Point1d { .. } => 0.0,
        }
    }

    /// Point at arclength s from the segment start.
    pub fn point(&self, s: f64) -> Vec2 {
        match &self.geom {
            SegmentGeom::Line { start, end } => {
                let len = (*end - *start).norm();
                *start + (*end - *start) * (s / len)
            }
            SegmentGeom::Arc {
                center,
                radius,
                theta0,
                ..
            } => {
                let th = theta0 + s / radius;
                *center + Vec2::new(th.cos(), th.sin()) * *radius
            }
            SegmentGeom::Point1d { x, .. } => Vec2::new(*x, 0.0),
        }
    }

    /// Unit outward normal at arclength s.
    pub fn normal(&self, s: f64) -> Vec2 {
        match &self.geom {
            SegmentGeom::Line { start, end } => {
                let t = *end - *start;
                let n = t.norm();
                // CCW boundary: outward normal is the tangent rotated -90°.
                Vec2::new(t.y / n, -t.x / n)
            }
            SegmentGeom::Arc { radius, theta0, .. } => {
                let th = theta0 + s / radius;
                Vec2::new(th.cos(), th.sin())
            }
            SegmentGeom::Point1d { normal, .. } => Vec2::new(*normal, 0.0),
        }
    }
}

/// Scalar field on ∂Ω: constant, constant per segment, or a per-segment
/// sampled table in arclength with linear interpolation.
#[derive(Debug, Clone)]
pub enum ScalarBoundaryField {
    Constant(f64),
    PerSegment {
        default: f64,
        values: BTreeMap<usize, f64>,
    },
    Table {
        default: f64,
        /// segment id → sorted (arclength, value) samples
        tables: BTreeMap<usize, Vec<(f64, f64)>>,
    },
}

impl ScalarBoundaryField {
    pub fn eval(&self, segment_id: usize, s: f64) -> f64 {
        match self {
            ScalarBoundaryField::Constant(v) => *v,
            ScalarBoundaryField::PerSegment { default, values } => {
                values.get(&segment_id).copied().unwrap_or(*default)
            }
            ScalarBoundaryField::Table { default, tables } => match tables.get(&segment_id) {
                None => *default,
                Some(t) => interp_linear(t, s),
            },
        }
    }

    /// True when the field takes a single value on the given segment.
    pub fn is_constant_on(&self, segment_id: usize) -> bool {
        match self {
            ScalarBoundaryField::Constant(_) | ScalarBoundaryField::PerSegment { .. } => true,
            ScalarBoundaryField::Table { tables, .. } => match tables.get(&segment_id) {
                None => true,
                Some(t) => t.iter().all(|(_, v)| (*v - t[0].1).abs() < 1e-15),
            },
        }
    }
}

fn interp_linear(table: &[(f64, f64)], s: f64) -> f64 {
    assert!(!table.is_empty());
    if s <= table[0].0 {
        return table[0].1;
    }
    if s >= table[table.len() - 1].0 {
        return table[table.len() - 1].1;
    }
    let idx = table.partition_point(|(x, _)| *x <= s);
    let (x0, v0) = table[idx - 1];
    let (x1, v1) = table[idx];
    v0 + (v1 - v0) * (s - x0) / (x1 - x0)
}

/// λ boundary field for one measurement direction. Values are the real α in
/// λ = iα.
#[derive(Debug, Clone)]
pub struct LambdaField {
    pub direction: Dir2,
    pub field: ScalarBoundaryField,
}

/// A bounded region with its boundary decomposition and extension-parameter
/// fields. Immutable after construction; all operations are pure.
#[derive(Debug, Clone)]
pub struct Region {
    kind: RegionKind,
    segments: Vec<Segment>,
    gamma: ScalarBoundaryField,
    dirichlet: BTreeSet<usize>,
    lambda: Vec<LambdaField>,
    id: String,
}

impl Region {
    pub fn interval(a: f64, b: f64) -> Result<Region> {
        if !(b - a > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Geometry(format!(
                "interval [{a}, {b}] must have positive length"
            )));
        }
        let segments = vec![
            Segment {
                id: 1,
                geom: SegmentGeom::Point1d { x: a, normal: -1.0 },
            },
            Segment {
                id: 2,
                geom: SegmentGeom::Point1d { x: b, normal: 1.0 },
            },
        ];
        Ok(Region {
            kind: RegionKind::Interval { a, b },
            segments,
            gamma: ScalarBoundaryField::Constant(0.0),
            dirichlet: BTreeSet::new(),
            lambda: Vec::new(),
            id: format!("interval[{a},{b}]"),
        })
    }

    pub fn rectangle(origin: Vec2, lx: f64, ly: f64) -> Result<Region> {
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::Geometry("rectangle sides must be positive".into()));
        }
        let o = origin;
        let v = [
            o,
            o + Vec2::new(lx, 0.0),
            o + Vec2::new(lx, ly),
            o + Vec2::new(0.0, ly),
        ];
        let segments = (0..4)
            .map(|i| Segment {
                id: i + 1,
                geom: SegmentGeom::Line {
                    start: v[i],
                    end: v[(i + 1) % 4],
                },
            })
            .collect();
        Ok(Region {
            kind: RegionKind::Rectangle { origin, lx, ly },
            segments,
            gamma: ScalarBoundaryField::Constant(0.0),
            dirichlet: BTreeSet::new(),
            lambda: Vec::new(),
            id: format!("rectangle[{lx}x{ly}]"),
        })
    }

    /// Simple polygon from a counterclockwise vertex list. Clockwise input is
    /// reversed; self-intersecting input is rejected.
    pub fn polygon(mut vertices: Vec<Vec2>) -> Result<Region> {
        if vertices.len() < 3 {
            return Err(Error::Geometry("polygon needs at least 3 vertices".into()));
        }
        let area2 = signed_area2(&vertices);
        if area2.abs() < 1e-14 {
            return Err(Error::Geometry("polygon has zero area".into()));
        }
        if area2 < 0.0 {
            vertices.reverse();
        }
        if self_intersects(&vertices) {
            return Err(Error::Geometry("polygon boundary self-intersects".into()));
        }
        let convex = is_convex(&vertices);
        let n = vertices.len();
        let segments = (0..n)
            .map(|i| Segment {
                id: i + 1,
                geom: SegmentGeom::Line {
                    start: vertices[i],
                    end: vertices[(i + 1) % n],
                },
            })
            .collect();
        let id = format!("polygon[{n}]");
        Ok(Region {
            kind: RegionKind::Polygon { vertices, convex },
            segments,
            gamma: ScalarBoundaryField::Constant(0.0),
            dirichlet: BTreeSet::new(),
            lambda: Vec::new(),
            id,
        })
    }

    /// Polygon that must be convex.
    pub fn convex_polygon(vertices: Vec<Vec2>) -> Result<Region> {
        let r = Region::polygon(vertices)?;
        match &r.kind {
            RegionKind::Polygon { convex: true, .. } => Ok(r),
            _ => Err(Error::Geometry("polygon is not convex".into())),
        }
    }

    pub fn rounded_rectangle(origin: Vec2, lx: f64, ly: f64, radius: f64) -> Result<Region> {
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::Geometry("rectangle sides must be positive".into()));
        }
        if !(radius > 0.0) || 2.0 * radius >= lx.min(ly) {
            return Err(Error::Geometry(
                "corner radius must satisfy 0 < 2r < min(Lx, Ly)".into(),
            ));
        }
        let o = origin;
        let (r, w, h) = (radius, lx, ly);
        let seg = |id, start, end| Segment {
            id,
            geom: SegmentGeom::Line { start, end },
        };
        let arc = |id, center, theta0: f64, theta1: f64| Segment {
            id,
            geom: SegmentGeom::Arc {
                center,
                radius: r,
                theta0,
                theta1,
            },
        };
        let segments = vec![
            seg(1, o + Vec2::new(r, 0.0), o + Vec2::new(w - r, 0.0)),
            arc(5, o + Vec2::new(w - r, r), -FRAC_PI_2, 0.0),
            seg(2, o + Vec2::new(w, r), o + Vec2::new(w, h - r)),
            arc(6, o + Vec2::new(w - r, h - r), 0.0, FRAC_PI_2),
            seg(3, o + Vec2::new(w - r, h), o + Vec2::new(r, h)),
            arc(7, o + Vec2::new(r, h - r), FRAC_PI_2, PI),
            seg(4, o + Vec2::new(0.0, h - r), o + Vec2::new(0.0, r)),
            arc(8, o + Vec2::new(r, r), PI, 1.5 * PI),
        ];
        Ok(Region {
            kind: RegionKind::RoundedRectangle {
                origin,
                lx,
                ly,
                radius,
            },
            segments,
            gamma: ScalarBoundaryField::Constant(0.0),
            dirichlet: BTreeSet::new(),
            lambda: Vec::new(),
            id: format!("rounded_rectangle[{lx}x{ly},r={radius}]"),
        })
    }

    pub fn with_gamma(mut self, gamma: ScalarBoundaryField) -> Region {
        self.gamma = gamma;
        self
    }

    pub fn with_dirichlet_segments(mut self, segments: impl IntoIterator<Item = usize>) -> Region {
        self.dirichlet = segments.into_iter().collect();
        self
    }

    /// Registers the λ field for a measurement direction, replacing any field
    /// previously attached to the same direction.
    pub fn with_lambda(mut self, direction: Dir2, field: ScalarBoundaryField) -> Region {
        self.lambda
            .retain(|lf| (lf.direction.vec() - direction.vec()).norm() > 1e-12);
        self.lambda.push(LambdaField { direction, field });
        self
    }

    pub fn kind(&self) -> &RegionKind {
        &self.kind
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn segment(&self, id: usize) -> Option<&Segment> {
        self.segments.iter().find(|s| s.id == id)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn is_1d(&self) -> bool {
        matches!(self.kind, RegionKind::Interval { .. })
    }

    pub fn is_convex(&self) -> bool {
        match &self.kind {
            RegionKind::Interval { .. }
            | RegionKind::Rectangle { .. }
            | RegionKind::RoundedRectangle { .. } => true,
            RegionKind::Polygon { convex, .. } => *convex,
        }
    }

    pub fn perimeter(&self) -> f64 {
        self.segments.iter().map(|s| s.length()).sum()
    }

    pub fn gamma_field(&self) -> &ScalarBoundaryField {
        &self.gamma
    }

    /// Robin γ at a boundary point; None on Dirichlet segments.
    pub fn gamma_at(&self, segment_id: usize, s: f64) -> Option<f64> {
        if self.dirichlet.contains(&segment_id) {
            None
        } else {
            Some(self.gamma.eval(segment_id, s))
        }
    }

    pub fn is_dirichlet(&self, segment_id: usize) -> bool {
        self.dirichlet.contains(&segment_id)
    }

    pub fn lambda_fields(&self) -> &[LambdaField] {
        &self.lambda
    }

    /// λ field attached to `dir` (match within 1e-12); defaults to λ = 0.
    pub fn lambda_field_for(&self, dir: Dir2) -> ScalarBoundaryField {
        self.lambda
            .iter()
            .find(|lf| (lf.direction.vec() - dir.vec()).norm() < 1e-12)
            .map(|lf| lf.field.clone())
            .unwrap_or(ScalarBoundaryField::Constant(0.0))
    }

    /// λ = iα at a boundary point for the given direction.
    pub fn lambda_at(&self, dir: Dir2, segment_id: usize, s: f64) -> Complex64 {
        Complex64::new(0.0, self.lambda_field_for(dir).eval(segment_id, s))
    }

    /// Point-in-region test (boundary points count as inside up to rounding).
    pub fn contains(&self, p: Vec2) -> bool {
        match &self.kind {
            RegionKind::Interval { a, b } => p.y == 0.0 && *a <= p.x && p.x <= *b,
            RegionKind::Rectangle { origin, lx, ly } => {
                p.x >= origin.x && p.x <= origin.x + lx && p.y >= origin.y && p.y <= origin.y + ly
            }
            RegionKind::Polygon { vertices, .. } => point_in_polygon(vertices, p),
            RegionKind::RoundedRectangle {
                origin,
                lx,
                ly,
                radius,
            } => {
                let q = p - *origin;
                if q.x < 0.0 || q.x > *lx || q.y < 0.0 || q.y > *ly {
                    return false;
                }
                let r = *radius;
                // clamp to the inner rectangle of corner centers
                let cx = q.x.clamp(r, lx - r);
                let cy = q.y.clamp(r, ly - r);
                (q - Vec2::new(cx, cy)).norm() <= r
            }
        }
    }

    /// Distance from a point to ∂Ω.
    pub fn distance_to_boundary(&self, p: Vec2) -> f64 {
        self.segments
            .iter()
            .map(|seg| match &seg.geom {
                SegmentGeom::Line { start, end } => {
                    let d = *end - *start;
                    let len2 = d.dot(d);
                    let t = ((p - *start).dot(d) / len2).clamp(0.0, 1.0);
                    (p - (*start + d * t)).norm()
                }
                SegmentGeom::Arc {
                    center,
                    radius,
                    theta0,
                    theta1,
                } => {
                    let v = p - *center;
                    let th = v.y.atan2(v.x);
                    // wrap th into [theta0, theta0 + 2π)
                    let mut thw = th;
                    while thw < *theta0 {
                        thw += 2.0 * PI;
                    }
                    if thw <= *theta1 {
                        (v.norm() - radius).abs()
                    } else {
                        let p0 = *center + Vec2::new(theta0.cos(), theta0.sin()) * *radius;
                        let p1 = *center + Vec2::new(theta1.cos(), theta1.sin()) * *radius;
                        (p - p0).norm().min((p - p1).norm())
                    }
                }
                SegmentGeom::Point1d { x, .. } => (p - Vec2::new(*x, 0.0)).norm(),
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Transverse extent of the region for scan lines in direction `dir`.
    pub fn transverse_extent(&self, dir: Dir2) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for tau in self.transverse_breakpoints(dir) {
            lo = lo.min(tau);
            hi = hi.max(tau);
        }
        (lo, hi)
    }

    /// Transverse coordinates at which the section structure can change:
    /// segment junctions plus arc points where the boundary is tangent to the
    /// scan direction. Sorted and deduplicated.
    pub fn transverse_breakpoints(&self, dir: Dir2) -> Vec<f64> {
        let mut taus: Vec<f64> = Vec::new();
        for seg in &self.segments {
            match &seg.geom {
                SegmentGeom::Line { start, end } => {
                    taus.push(dir.across(*start));
                    taus.push(dir.across(*end));
                }
                SegmentGeom::Arc {
                    center,
                    radius,
                    theta0,
                    theta1,
                } => {
                    taus.push(dir.across(seg_arc_point(*center, *radius, *theta0)));
                    taus.push(dir.across(seg_arc_point(*center, *radius, *theta1)));
                    // tangency angles: radial direction aligned ± with t̂
                    let t = dir.transverse().vec();
                    let base = t.y.atan2(t.x);
                    for cand in [base, base + PI] {
                        let mut th = cand;
                        while th < *theta0 {
                            th += 2.0 * PI;
                        }
                        while th - 2.0 * PI >= *theta0 {
                            th -= 2.0 * PI;
                        }
                        if th >= *theta0 && th <= *theta1 {
                            taus.push(dir.across(seg_arc_point(*center, *radius, th)));
                        }
                    }
                }
                SegmentGeom::Point1d { x, .. } => taus.push(dir.across(Vec2::new(*x, 0.0))),
            }
        }
        taus.sort_by(|a, b| a.partial_cmp(b).unwrap());
        taus.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        taus
    }
}

fn seg_arc_point(center: Vec2, radius: f64, theta: f64) -> Vec2 {
    center + Vec2::new(theta.cos(), theta.sin()) * radius
}

fn signed_area2(v: &[Vec2]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum()
}

fn is_convex(v: &[Vec2]) -> bool {
    let n = v.len();
    (0..n).all(|i| {
        let a = v[(i + 1) % n] - v[i];
        let b = v[(i + 2) % n] - v[(i + 1) % n];
        a.cross(b) > -1e-12
    })
}

/// Segment-pair intersection scan; adjacent edges share only their common
/// vertex by construction, so any other contact is a defect.
fn self_intersects(v: &[Vec2]) -> bool {
    let n = v.len();
    for i in 0..n {
        let (a1, a2) = (v[i], v[(i + 1) % n]);
        for j in i + 1..n {
            if j == i || (j + 1) % n == i || (i + 1) % n == j {
                continue;
            }
            let (b1, b2) = (v[j], v[(j + 1) % n]);
            if segments_properly_intersect(a1, a2, b1, b2) {
                return true;
            }
        }
    }
    false
}

fn segments_properly_intersect(a1: Vec2, a2: Vec2, b1: Vec2, b2: Vec2) -> bool {
    let d1 = (a2 - a1).cross(b1 - a1);
    let d2 = (a2 - a1).cross(b2 - a1);
    let d3 = (b2 - b1).cross(a1 - b1);
    let d4 = (b2 - b1).cross(a2 - b1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Half-open crossing-number containment test.
fn point_in_polygon(v: &[Vec2], p: Vec2) -> bool {
    let n = v.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        if (a.y <= p.y) != (b.y <= p.y) {
            let x_cross = a.x + (b.x - a.x) * (p.y - a.y) / (b.y - a.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
    }
    inside
}
