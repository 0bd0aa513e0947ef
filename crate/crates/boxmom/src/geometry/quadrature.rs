use super::region::{Region, Segment, SegmentGeom};
use super::vec2::{Dir2, Vec2};
use super::TANGENCY_TOL;
use crate::error::{Error, Result};
use crate::numerics::gauss::Quad1;

/// One node of a boundary quadrature rule.
#[derive(Debug, Clone)]
pub struct BoundaryNode {
    pub point: Vec2,
    pub normal: Vec2,
    pub weight: f64,
    pub segment_id: usize,
    /// Arclength within the segment.
    pub s: f64,
}

/// Composite Gauss–Legendre quadrature over ∂Ω with roughly `n_points` nodes
/// distributed proportionally to segment length. Weights sum to the
/// perimeter; 1D intervals return their two endpoints with unit weight
/// (counting measure).
pub fn boundary_quadrature(region: &Region, n_points: usize) -> Result<Vec<BoundaryNode>> {
    if n_points < 8 {
        return Err(Error::InvalidArgument(
            "boundary quadrature needs n_points >= 8".into(),
        ));
    }
    if region.is_1d() {
        return Ok(region
            .segments()
            .iter()
            .map(|seg| BoundaryNode {
                point: seg.point(0.0),
                normal: seg.normal(0.0),
                weight: 1.0,
                segment_id: seg.id,
                s: 0.0,
            })
            .collect());
    }
    let total = region.perimeter();
    let order = 8;
    let mut nodes = Vec::new();
    for seg in region.segments() {
        let len = seg.length();
        let share = (n_points as f64 * len / total).ceil() as usize;
        let panels = share.div_ceil(order).max(1);
        let q = Quad1::gauss(0.0, len, order, panels);
        for (&s, &w) in q.nodes.iter().zip(&q.weights) {
            nodes.push(BoundaryNode {
                point: seg.point(s),
                normal: seg.normal(s),
                weight: w,
                segment_id: seg.id,
                s,
            });
        }
    }
    Ok(nodes)
}

/// Partition of ∂Ω by the sign of n·l̂.
#[derive(Debug, Clone)]
pub struct BoundaryPartition {
    pub positive: Vec<Segment>,
    pub negative: Vec<Segment>,
    /// Pieces where n·l̂ = 0 on a set of nonzero measure (flat sides parallel
    /// to l̂); isolated tangent points on arcs carry no measure and are not
    /// listed.
    pub zero: Vec<Segment>,
}

/// Splits the boundary into the subsets n·l̂ > 0, n·l̂ < 0 and n·l̂ = 0.
/// Arcs are cut at their tangency angles so each returned piece has a
/// definite sign.
pub fn partition_boundary(region: &Region, dir: Dir2) -> BoundaryPartition {
    let mut out = BoundaryPartition {
        positive: Vec::new(),
        negative: Vec::new(),
        zero: Vec::new(),
    };
    for seg in region.segments() {
        match &seg.geom {
            SegmentGeom::Line { .. } | SegmentGeom::Point1d { .. } => {
                let nd = dir.dot(seg.normal(0.0));
                if nd.abs() < TANGENCY_TOL {
                    out.zero.push(seg.clone());
                } else if nd > 0.0 {
                    out.positive.push(seg.clone());
                } else {
                    out.negative.push(seg.clone());
                }
            }
            SegmentGeom::Arc {
                center,
                radius,
                theta0,
                theta1,
            } => {
                // n·l̂ = cos(θ - angle(l̂)): vanishes at two angles per turn
                let base = dir.vec().y.atan2(dir.vec().x);
                let mut cuts = vec![*theta0, *theta1];
                for k in [0.5, 1.5, 2.5, -0.5] {
                    let th = base + k * std::f64::consts::PI;
                    if th > *theta0 + 1e-12 && th < *theta1 - 1e-12 {
                        cuts.push(th);
                    }
                }
                cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
                cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
                for w in cuts.windows(2) {
                    let mid = 0.5 * (w[0] + w[1]);
                    let n = Vec2::new(mid.cos(), mid.sin());
                    let piece = Segment {
                        id: seg.id,
                        geom: SegmentGeom::Arc {
                            center: *center,
                            radius: *radius,
                            theta0: w[0],
                            theta1: w[1],
                        },
                    };
                    if dir.dot(n) > 0.0 {
                        out.positive.push(piece);
                    } else {
                        out.negative.push(piece);
                    }
                }
            }
        }
    }
    out
}

/// Transverse quadrature rule for line-scan integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransverseRule {
    /// Composite Gauss–Legendre between geometric breakpoints. Accurate for
    /// smooth integrands; the default.
    GaussPanels,
    /// Plain midpoint cells across the full transverse extent.
    Midpoint,
}

/// Area quadrature for a region, built from line sections: nodes along scan
/// lines in a fixed direction, weighted by a transverse rule.
#[derive(Debug, Clone)]
pub struct AreaQuad {
    pub points: Vec<Vec2>,
    pub weights: Vec<f64>,
}

impl AreaQuad {
    pub fn integrate(&self, mut f: impl FnMut(Vec2) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }
}

/// Builds an area quadrature with `n_lines` scan lines in direction `dir`
/// and composite Gauss–Legendre nodes along each section interval.
///
/// With `TransverseRule::GaussPanels`, the lines are Gauss nodes placed
/// between the transverse breakpoints of the region, so the rule converges
/// spectrally for smooth integrands on piecewise-smooth regions. 1D
/// intervals reduce to a single Gauss rule.
pub fn region_quadrature(
    region: &Region,
    dir: Dir2,
    n_lines: usize,
    rule: TransverseRule,
    line_order: usize,
    line_panels: usize,
) -> Result<AreaQuad> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    if region.is_1d() {
        let sec = region.line_section(Dir2::X, 0.0)?;
        let iv = &sec.intervals[0];
        let q = Quad1::gauss(iv.x_minus, iv.x_plus, line_order, line_panels);
        for (&x, &w) in q.nodes.iter().zip(&q.weights) {
            points.push(Vec2::new(x, 0.0));
            weights.push(w);
        }
        return Ok(AreaQuad { points, weights });
    }

    let breaks = region.transverse_breakpoints(dir);
    if breaks.len() < 2 {
        return Err(Error::Geometry("region has no transverse extent".into()));
    }
    let (lo, hi) = (breaks[0], breaks[breaks.len() - 1]);
    let transverse = match rule {
        TransverseRule::Midpoint => Quad1::midpoint(lo, hi, n_lines),
        TransverseRule::GaussPanels => {
            // spread the line budget across pieces proportionally to width
            let order = 8usize.min(n_lines.max(2));
            let width = hi - lo;
            let mut nodes = Vec::new();
            let mut ws = Vec::new();
            for w in breaks.windows(2) {
                let piece = w[1] - w[0];
                if piece < 1e-12 {
                    continue;
                }
                let share = (n_lines as f64 * piece / width).ceil() as usize;
                let panels = share.div_ceil(order).max(1);
                let q = Quad1::gauss(w[0], w[1], order, panels);
                nodes.extend(q.nodes);
                ws.extend(q.weights);
            }
            Quad1 { nodes, weights: ws }
        }
    };

    for (&y0, &wt) in transverse.nodes.iter().zip(&transverse.weights) {
        let sec = region.line_section(dir, y0)?;
        for iv in &sec.intervals {
            let q = Quad1::gauss(iv.x_minus, iv.x_plus, line_order, line_panels);
            for (&t, &wl) in q.nodes.iter().zip(&q.weights) {
                points.push(dir.line_point(y0, t));
                weights.push(wt * wl);
            }
        }
    }
    Ok(AreaQuad { points, weights })
}
