use super::region::{Region, RegionKind, SegmentGeom};
use super::vec2::{Dir2, Vec2};
use super::TANGENCY_TOL;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// One maximal open interval of a line inside Ω, with the λ values at its
/// piercing points.
#[derive(Debug, Clone)]
pub struct SectionInterval {
    pub x_minus: f64,
    pub x_plus: f64,
    pub lambda_minus: Complex64,
    pub lambda_plus: Complex64,
}

impl SectionInterval {
    pub fn length(&self) -> f64 {
        self.x_plus - self.x_minus
    }
}

/// Intersection of the line {y₀·t̂ + t·l̂} with a region: ordered, disjoint
/// intervals in the longitudinal coordinate t.
#[derive(Debug, Clone)]
pub struct LineSection {
    pub direction: Dir2,
    pub anchor: f64,
    pub intervals: Vec<SectionInterval>,
}

impl LineSection {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// 2D point at longitudinal coordinate t on this line.
    pub fn point(&self, t: f64) -> Vec2 {
        self.direction.line_point(self.anchor, t)
    }
}

struct Crossing {
    t: f64,
    segment_id: usize,
    s: f64,
}

impl Region {
    /// All maximal intervals of the line with direction `dir` and transverse
    /// anchor `y0` inside the region. Piercing points tangent to the boundary
    /// (|n·l̂| < 1e-9) are excluded; an empty interval list means the line
    /// misses the region.
    pub fn line_section(&self, dir: Dir2, y0: f64) -> Result<LineSection> {
        match self.kind() {
            RegionKind::Interval { a, b } => {
                if dir.vec().y.abs() > 1e-12 {
                    return Err(Error::InvalidArgument(
                        "1D interval sections are defined along the x axis".into(),
                    ));
                }
                let lm = self.lambda_at(dir, 1, 0.0);
                let lp = self.lambda_at(dir, 2, 0.0);
                Ok(LineSection {
                    direction: dir,
                    anchor: 0.0,
                    intervals: vec![SectionInterval {
                        x_minus: *a,
                        x_plus: *b,
                        lambda_minus: lm,
                        lambda_plus: lp,
                    }],
                })
            }
            _ => self.line_section_2d(dir, y0),
        }
    }

    fn line_section_2d(&self, dir: Dir2, y0: f64) -> Result<LineSection> {
        let mut crossings: Vec<Crossing> = Vec::new();
        for seg in self.segments() {
            match &seg.geom {
                SegmentGeom::Line { start, end } => {
                    let n = seg.normal(0.0);
                    if dir.dot(n).abs() < TANGENCY_TOL {
                        continue; // parallel side: no boundary condition, no piercing
                    }
                    let s0 = dir.across(*start) - y0;
                    let s1 = dir.across(*end) - y0;
                    let crosses = (s0 <= 0.0 && s1 > 0.0) || (s1 <= 0.0 && s0 > 0.0);
                    if !crosses {
                        continue;
                    }
                    let u = s0 / (s0 - s1); // fraction along the edge
                    let t0 = dir.along(*start);
                    let t1 = dir.along(*end);
                    crossings.push(Crossing {
                        t: t0 + (t1 - t0) * u,
                        segment_id: seg.id,
                        s: u * seg.length(),
                    });
                }
                SegmentGeom::Arc {
                    center,
                    radius,
                    theta0,
                    theta1,
                } => {
                    // |y0 t̂ + t l̂ - c|² = r², quadratic in t
                    let rel = dir.transverse().vec() * y0 - *center;
                    let b = dir.dot(rel);
                    let c = rel.dot(rel) - radius * radius;
                    let disc = b * b - c;
                    if disc <= TANGENCY_TOL * radius * radius {
                        continue; // missing or tangent
                    }
                    let sq = disc.sqrt();
                    for t in [-b - sq, -b + sq] {
                        let p = dir.line_point(y0, t);
                        let v = p - *center;
                        let mut th = v.y.atan2(v.x);
                        while th < *theta0 {
                            th += 2.0 * std::f64::consts::PI;
                        }
                        // half-open arc range to avoid double counting junctions
                        if th >= *theta0 && th < *theta1 {
                            let normal = Vec2::new(th.cos(), th.sin());
                            if dir.dot(normal).abs() < TANGENCY_TOL {
                                continue;
                            }
                            crossings.push(Crossing {
                                t,
                                segment_id: seg.id,
                                s: (th - theta0) * radius,
                            });
                        }
                    }
                }
                SegmentGeom::Point1d { .. } => unreachable!("1D handled above"),
            }
        }

        crossings.sort_by(|a, b| a.t.partial_cmp(&b.t).unwrap());
        crossings.dedup_by(|a, b| (a.t - b.t).abs() < 1e-12);

        if crossings.len() % 2 != 0 {
            return Err(Error::Geometry(format!(
                "line section parity failure at anchor {y0}: {} crossings",
                crossings.len()
            )));
        }

        let lambda_field = self.lambda_field_for(dir);
        let mut intervals = Vec::new();
        for pair in crossings.chunks(2) {
            let (cm, cp) = (&pair[0], &pair[1]);
            if cp.t - cm.t < 1e-12 {
                continue;
            }
            // reject pairs whose midpoint is outside (grazing contact)
            let mid = dir.line_point(y0, 0.5 * (cm.t + cp.t));
            if !self.contains(mid) {
                continue;
            }
            intervals.push(SectionInterval {
                x_minus: cm.t,
                x_plus: cp.t,
                lambda_minus: Complex64::new(0.0, lambda_field.eval(cm.segment_id, cm.s)),
                lambda_plus: Complex64::new(0.0, lambda_field.eval(cp.segment_id, cp.s)),
            });
        }
        Ok(LineSection {
            direction: dir,
            anchor: y0,
            intervals,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ScalarBoundaryField;
    use std::collections::BTreeMap;

    fn l_shape() -> Region {
        Region::polygon(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(3.0, 0.0),
            Vec2::new(3.0, 1.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(2.0, 2.0),
            Vec2::new(0.0, 2.0),
        ])
        .unwrap()
    }

    #[test]
    fn rectangle_full_width_section() {
        let mut values = BTreeMap::new();
        values.insert(4usize, 0.5);
        values.insert(2usize, -0.25);
        let r = Region::rectangle(Vec2::ZERO, 2.0, 1.0)
            .unwrap()
            .with_lambda(
                Dir2::X,
                ScalarBoundaryField::PerSegment {
                    default: 0.0,
                    values,
                },
            );
        let sec = r.line_section(Dir2::X, 0.5).unwrap();
        assert_eq!(sec.intervals.len(), 1);
        let iv = &sec.intervals[0];
        assert!((iv.x_minus - 0.0).abs() < 1e-12);
        assert!((iv.x_plus - 2.0).abs() < 1e-12);
        // left endpoint carries the segment-4 value, right the segment-2 value
        assert!((iv.lambda_minus - Complex64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((iv.lambda_plus - Complex64::new(0.0, -0.25)).norm() < 1e-15);
    }

    #[test]
    fn rectangle_line_outside() {
        let r = Region::rectangle(Vec2::ZERO, 2.0, 1.0).unwrap();
        let sec = r.line_section(Dir2::X, 1.5).unwrap();
        assert!(sec.is_empty());
    }

    #[test]
    fn l_shape_vertical_sections() {
        let r = l_shape();
        // x = 2.5 crosses only the foot of the L
        let sec = r.line_section(Dir2::Y, -2.5).unwrap();
        assert_eq!(sec.intervals.len(), 1);
        assert!((sec.intervals[0].x_minus - 0.0).abs() < 1e-12);
        assert!((sec.intervals[0].x_plus - 1.0).abs() < 1e-12);
        // x = 1.0 crosses the tall part
        let sec = r.line_section(Dir2::Y, -1.0).unwrap();
        assert_eq!(sec.intervals.len(), 1);
        assert!((sec.intervals[0].x_plus - 2.0).abs() < 1e-12);
    }

    #[test]
    fn l_shape_horizontal_two_intervals() {
        // a horizontal line at y = 0.5 crosses the foot in one piece, but a
        // line at y = 1.5 only crosses the tall part
        let r = l_shape();
        let sec = r.line_section(Dir2::X, 0.5).unwrap();
        assert_eq!(sec.intervals.len(), 1);
        assert!((sec.intervals[0].x_plus - 3.0).abs() < 1e-12);
        let sec = r.line_section(Dir2::X, 1.5).unwrap();
        assert_eq!(sec.intervals.len(), 1);
        assert!((sec.intervals[0].x_plus - 2.0).abs() < 1e-12);
    }

    #[test]
    fn anchor_for_vertical_scan_is_negated_x() {
        // for dir = ŷ the transverse axis is t̂ = (-1, 0), so anchor = -x
        let r = Region::rectangle(Vec2::ZERO, 2.0, 1.0).unwrap();
        let sec = r.line_section(Dir2::Y, -0.7).unwrap();
        assert_eq!(sec.intervals.len(), 1);
        let p = sec.point(0.5);
        assert!((p.x - 0.7).abs() < 1e-12);
        assert!((p.y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn oblique_section_endpoints_on_boundary() {
        let r = l_shape();
        let dir = Dir2::new(2.0, 1.0).unwrap();
        for k in 0..40 {
            let y0 = -2.0 + 0.1 * k as f64;
            let sec = r.line_section(dir, y0).unwrap();
            for iv in &sec.intervals {
                for t in [iv.x_minus, iv.x_plus] {
                    let p = sec.point(t);
                    assert!(r.distance_to_boundary(p) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn rounded_rectangle_sections() {
        let r = Region::rounded_rectangle(Vec2::ZERO, 2.0, 1.0, 0.2).unwrap();
        // mid-height line spans the full width
        let sec = r.line_section(Dir2::X, 0.5).unwrap();
        assert_eq!(sec.intervals.len(), 1);
        assert!((sec.intervals[0].x_minus - 0.0).abs() < 1e-12);
        assert!((sec.intervals[0].x_plus - 2.0).abs() < 1e-12);
        // line through the fillet band is shortened by the corner arcs
        let sec = r.line_section(Dir2::X, 0.1).unwrap();
        assert_eq!(sec.intervals.len(), 1);
        let cut = 0.2 - (0.2f64 * 0.2 - 0.1 * 0.1).sqrt();
        assert!((sec.intervals[0].x_minus - cut).abs() < 1e-10);
        assert!((sec.intervals[0].x_plus - (2.0 - cut)).abs() < 1e-10);
    }
}
