//! Two-component wave functions: physical-sector embedding, grids,
//! closed-form states, norms, probability current and boundary flux.
//!
//! Physical states have Ψ_e = Ψ_o = ψ/√2, so the doubled norm equals the
//! single-component norm of ψ. Grid states are vertex-centered with nodes on
//! ∂Ω and use the trapezoid inner product; closed-form states carry analytic
//! gradients and are integrated with the geometry quadratures.

use crate::error::{Error, Result};
use crate::geometry::{boundary_quadrature, Region, Vec2};
use crate::modes::LineState;
use crate::numerics::I;
use num_complex::Complex64;
use std::io::{BufRead, Write};
use std::sync::Arc;

/// Scalar complex field on a 1D interval with an analytic derivative.
pub trait ScalarField1: Send + Sync {
    fn value(&self, x: f64) -> Complex64;
    fn deriv(&self, x: f64) -> Complex64;
}

/// Scalar complex field on a 2D region with an analytic gradient.
pub trait ScalarField2: Send + Sync {
    fn value(&self, p: Vec2) -> Complex64;
    fn gradient(&self, p: Vec2) -> [Complex64; 2];
}

/// Gaussian packet exp(−|r−c|²/(4s²) + i k·r), unnormalized.
#[derive(Debug, Clone)]
pub struct GaussianPacket {
    pub center: Vec2,
    pub width: f64,
    pub momentum: Vec2,
}

impl ScalarField2 for GaussianPacket {
    fn value(&self, p: Vec2) -> Complex64 {
        let d = p - self.center;
        let arg = -d.dot(d) / (4.0 * self.width * self.width);
        (Complex64::new(arg, 0.0) + I * self.momentum.dot(p)).exp()
    }
    fn gradient(&self, p: Vec2) -> [Complex64; 2] {
        let d = p - self.center;
        let v = self.value(p);
        let s2 = 2.0 * self.width * self.width;
        [
            v * (Complex64::new(-d.x / s2, 0.0) + I * self.momentum.x),
            v * (Complex64::new(-d.y / s2, 0.0) + I * self.momentum.y),
        ]
    }
}

/// 1D Gaussian packet exp(−(x−c)²/(4s²) + ikx).
#[derive(Debug, Clone)]
pub struct GaussianPacket1 {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
}

impl ScalarField1 for GaussianPacket1 {
    fn value(&self, x: f64) -> Complex64 {
        let d = x - self.center;
        (Complex64::new(-d * d / (4.0 * self.width * self.width), 0.0) + I * self.momentum * x)
            .exp()
    }
    fn deriv(&self, x: f64) -> Complex64 {
        let d = x - self.center;
        self.value(x)
            * (Complex64::new(-d / (2.0 * self.width * self.width), 0.0) + I * self.momentum)
    }
}

/// Complex linear combination of 2D fields; stays analytic.
pub struct Superposition2 {
    pub terms: Vec<(Complex64, Arc<dyn ScalarField2>)>,
}

impl ScalarField2 for Superposition2 {
    fn value(&self, p: Vec2) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.value(p)).sum()
    }
    fn gradient(&self, p: Vec2) -> [Complex64; 2] {
        let mut g = [Complex64::default(); 2];
        for (c, f) in &self.terms {
            let fg = f.gradient(p);
            g[0] += c * fg[0];
            g[1] += c * fg[1];
        }
        g
    }
}

/// Complex linear combination of 1D fields.
pub struct Superposition1 {
    pub terms: Vec<(Complex64, Arc<dyn ScalarField1>)>,
}

impl ScalarField1 for Superposition1 {
    fn value(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.value(x)).sum()
    }
    fn deriv(&self, x: f64) -> Complex64 {
        self.terms.iter().map(|(c, f)| c * f.deriv(x)).sum()
    }
}

/// Physical state restricted to a line through a 2D region; implements the
/// two-component line interface with Ψ_e = Ψ_o = ψ/√2.
pub struct FieldOnLine<'a> {
    pub field: &'a dyn ScalarField2,
    pub direction: crate::geometry::Dir2,
    pub anchor: f64,
}

impl LineState for FieldOnLine<'_> {
    fn e(&self, x: f64) -> Complex64 {
        self.field.value(self.direction.line_point(self.anchor, x)) / 2.0_f64.sqrt()
    }
    fn o(&self, x: f64) -> Complex64 {
        self.e(x)
    }
}

/// Uniform vertex-centered grid samples of the two components on an interval
/// or rectangle. Boundary nodes lie exactly on ∂Ω.
#[derive(Debug, Clone)]
pub enum StateData {
    Grid1 {
        a: f64,
        h: f64,
        e: Vec<Complex64>,
        o: Vec<Complex64>,
    },
    Grid2 {
        origin: Vec2,
        h: f64,
        nx: usize,
        ny: usize,
        /// row-major [ix * ny + iy]
        e: Vec<Complex64>,
        o: Vec<Complex64>,
    },
}

/// A two-component wave function sampled on a grid over a region.
#[derive(Debug, Clone)]
pub struct WaveState {
    pub region: Region,
    pub data: StateData,
    pub physical: bool,
}

impl WaveState {
    /// Embeds a scalar field ψ as a physical doubled state Ψ_e = Ψ_o = ψ/√2
    /// on a 1D grid with n nodes.
    pub fn embed_physical_1d(
        region: &Region,
        n: usize,
        psi: impl Fn(f64) -> Complex64,
    ) -> Result<WaveState> {
        let (a, b) = match region.kind() {
            crate::geometry::RegionKind::Interval { a, b } => (*a, *b),
            _ => {
                return Err(Error::InvalidArgument(
                    "expected a 1D interval region".into(),
                ))
            }
        };
        if n < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 nodes".into()));
        }
        let h = (b - a) / (n - 1) as f64;
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let e: Vec<Complex64> = (0..n).map(|i| psi(a + i as f64 * h) * inv_sqrt2).collect();
        Ok(WaveState {
            region: region.clone(),
            data: StateData::Grid1 {
                a,
                h,
                o: e.clone(),
                e,
            },
            physical: true,
        })
    }

    /// Embeds a scalar field on a rectangle grid with nx × ny nodes
    /// (boundary nodes included). The spacing must be equal in x and y.
    pub fn embed_physical_2d(
        region: &Region,
        nx: usize,
        ny: usize,
        psi: impl Fn(Vec2) -> Complex64,
    ) -> Result<WaveState> {
        let (origin, lx, ly) = match region.kind() {
            crate::geometry::RegionKind::Rectangle { origin, lx, ly } => (*origin, *lx, *ly),
            _ => return Err(Error::InvalidArgument("expected a rectangle region".into())),
        };
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidArgument(
                "grid needs at least 2x2 nodes".into(),
            ));
        }
        let hx = lx / (nx - 1) as f64;
        let hy = ly / (ny - 1) as f64;
        if (hx - hy).abs() > 1e-12 * hx.max(hy) {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be uniform: hx = {hx}, hy = {hy}"
            )));
        }
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let mut e = vec![Complex64::default(); nx * ny];
        for ix in 0..nx {
            for iy in 0..ny {
                let p = origin + Vec2::new(ix as f64 * hx, iy as f64 * hy);
                e[ix * ny + iy] = psi(p) * inv_sqrt2;
            }
        }
        Ok(WaveState {
            region: region.clone(),
            data: StateData::Grid2 {
                origin,
                h: hx,
                nx,
                ny,
                o: e.clone(),
                e,
            },
            physical: true,
        })
    }

    pub fn grid_spacing(&self) -> f64 {
        match &self.data {
            StateData::Grid1 { h, .. } => *h,
            StateData::Grid2 { h, .. } => *h,
        }
    }

    /// Trapezoid weight of node i (1D) or (ix, iy) collapsed (2D helper below).
    fn weight1(n: usize, i: usize, h: f64) -> f64 {
        if i == 0 || i == n - 1 {
            0.5 * h
        } else {
            h
        }
    }

    /// Doubled norm² = ∫(|Ψ_e|² + |Ψ_o|²) dV via the trapezoid rule.
    pub fn norm_sqr(&self) -> f64 {
        match &self.data {
            StateData::Grid1 { h, e, o, .. } => {
                let n = e.len();
                (0..n)
                    .map(|i| Self::weight1(n, i, *h) * (e[i].norm_sqr() + o[i].norm_sqr()))
                    .sum()
            }
            StateData::Grid2 {
                h, nx, ny, e, o, ..
            } => {
                let mut acc = 0.0;
                for ix in 0..*nx {
                    let wx = Self::weight1(*nx, ix, *h);
                    for iy in 0..*ny {
                        let wy = Self::weight1(*ny, iy, *h);
                        let idx = ix * ny + iy;
                        acc += wx * wy * (e[idx].norm_sqr() + o[idx].norm_sqr());
                    }
                }
                acc
            }
        }
    }

    /// Doubled inner product ⟨self|other⟩ on matching grids.
    pub fn inner(&self, other: &WaveState) -> Result<Complex64> {
        match (&self.data, &other.data) {
            (
                StateData::Grid1 { h, e, o, .. },
                StateData::Grid1 {
                    e: e2,
                    o: o2,
                    h: h2,
                    ..
                },
            ) => {
                if e.len() != e2.len() || (h - h2).abs() > 1e-15 {
                    return Err(Error::Domain("grids do not match".into()));
                }
                let n = e.len();
                Ok((0..n)
                    .map(|i| Self::weight1(n, i, *h) * (e[i].conj() * e2[i] + o[i].conj() * o2[i]))
                    .sum())
            }
            (
                StateData::Grid2 {
                    h, nx, ny, e, o, ..
                },
                StateData::Grid2 {
                    e: e2,
                    o: o2,
                    nx: nx2,
                    ny: ny2,
                    ..
                },
            ) => {
                if nx != nx2 || ny != ny2 {
                    return Err(Error::Domain("grids do not match".into()));
                }
                let mut acc = Complex64::default();
                for ix in 0..*nx {
                    let wx = Self::weight1(*nx, ix, *h);
                    for iy in 0..*ny {
                        let wy = Self::weight1(*ny, iy, *h);
                        let idx = ix * ny + iy;
                        acc += wx * wy * (e[idx].conj() * e2[idx] + o[idx].conj() * o2[idx]);
                    }
                }
                Ok(acc)
            }
            _ => Err(Error::Domain("grid dimensionalities differ".into())),
        }
    }

    /// Scales the state so the doubled norm is 1. Errors on a zero field.
    pub fn normalize(&mut self) -> Result<()> {
        let n2 = self.norm_sqr();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::Numerical(
                "cannot normalize a zero or non-finite state".into(),
            ));
        }
        let s = 1.0 / n2.sqrt();
        match &mut self.data {
            StateData::Grid1 { e, o, .. } => {
                for v in e.iter_mut().chain(o.iter_mut()) {
                    *v *= s;
                }
            }
            StateData::Grid2 { e, o, .. } => {
                for v in e.iter_mut().chain(o.iter_mut()) {
                    *v *= s;
                }
            }
        }
        Ok(())
    }

    /// Single-component values ψ = √2 Ψ_e of a physical state (1D).
    pub fn psi_1d(&self) -> Result<Vec<Complex64>> {
        if !self.physical {
            return Err(Error::Domain("state is not in the physical sector".into()));
        }
        match &self.data {
            StateData::Grid1 { e, .. } => Ok(e.iter().map(|v| v * 2.0_f64.sqrt()).collect()),
            _ => Err(Error::Domain("not a 1D grid state".into())),
        }
    }
}

/// Probability current j = (1/2mi)(ψ*∇ψ − ∇ψ*ψ) of a physical grid state,
/// sampled on the same grid. Second-order centered stencils inside,
/// one-sided at the boundary.
#[derive(Debug, Clone)]
pub struct CurrentField {
    pub mass: f64,
    /// 1D: jx only; 2D: (jx, jy) row-major [ix * ny + iy].
    pub jx: Vec<f64>,
    pub jy: Vec<f64>,
    pub nx: usize,
    pub ny: usize,
    pub h: f64,
}

/// First derivative along a 1D array of complex samples, 2nd order.
pub fn derivative_1d(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len();
    assert!(n >= 3);
    let mut d = vec![Complex64::default(); n];
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    d
}

pub fn probability_current(state: &WaveState, mass: f64) -> Result<CurrentField> {
    if !state.physical {
        return Err(Error::Domain(
            "probability current is defined for physical states".into(),
        ));
    }
    match &state.data {
        StateData::Grid1 { h, e, .. } => {
            let psi: Vec<Complex64> = e.iter().map(|v| v * 2.0_f64.sqrt()).collect();
            let dpsi = derivative_1d(&psi, *h);
            let jx: Vec<f64> = psi
                .iter()
                .zip(&dpsi)
                .map(|(p, d)| (p.conj() * d).im / mass)
                .collect();
            Ok(CurrentField {
                mass,
                nx: jx.len(),
                ny: 1,
                jx,
                jy: Vec::new(),
                h: *h,
            })
        }
        StateData::Grid2 { h, nx, ny, e, .. } => {
            let s = 2.0_f64.sqrt();
            let mut jx = vec![0.0; nx * ny];
            let mut jy = vec![0.0; nx * ny];
            // x-derivatives along rows of fixed iy, y-derivatives along columns
            let mut col = vec![Complex64::default(); *nx];
            for iy in 0..*ny {
                for ix in 0..*nx {
                    col[ix] = e[ix * ny + iy] * s;
                }
                let d = derivative_1d(&col, *h);
                for ix in 0..*nx {
                    jx[ix * ny + iy] = (col[ix].conj() * d[ix]).im / mass;
                }
            }
            let mut row = vec![Complex64::default(); *ny];
            for ix in 0..*nx {
                for iy in 0..*ny {
                    row[iy] = e[ix * ny + iy] * s;
                }
                let d = derivative_1d(&row, *h);
                for iy in 0..*ny {
                    jy[ix * ny + iy] = (row[iy].conj() * d[iy]).im / mass;
                }
            }
            Ok(CurrentField {
                mass,
                nx: *nx,
                ny: *ny,
                jx,
                jy,
                h: *h,
            })
        }
    }
}

/// ∮ |n·j| dS over ∂Ω; bounded by C·h² for states compatible with the Robin
/// boundary conditions.
pub fn boundary_flux(state: &WaveState, mass: f64) -> Result<f64> {
    let current = probability_current(state, mass)?;
    match &state.data {
        StateData::Grid1 { .. } => {
            let n = current.jx.len();
            Ok(current.jx[0].abs() + current.jx[n - 1].abs())
        }
        StateData::Grid2 { nx, ny, h, .. } => {
            // trapezoid along each side; outward normal picks the component
            let mut acc = 0.0;
            let trap = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            for iy in 0..*ny {
                let w = trap(iy, *ny) * h;
                acc += w * current.jx[iy].abs(); // left side, n = -x̂
                acc += w * current.jx[(nx - 1) * ny + iy].abs(); // right
            }
            for ix in 0..*nx {
                let w = trap(ix, *nx) * h;
                acc += w * current.jy[ix * ny].abs(); // bottom, n = -ŷ
                acc += w * current.jy[ix * ny + ny - 1].abs(); // top
            }
            Ok(acc)
        }
    }
}

/// ⟨p_I⟩ along k̂ of a closed-form physical state: −½ ∮ (n·k̂) |ψ|² dS.
pub fn expect_pi_field(
    field: &dyn ScalarField2,
    region: &Region,
    dir: crate::geometry::Dir2,
    n_boundary: usize,
) -> Result<f64> {
    let quad = boundary_quadrature(region, n_boundary)?;
    Ok(quad
        .iter()
        .map(|node| -0.5 * node.weight * dir.dot(node.normal) * field.value(node.point).norm_sqr())
        .sum())
}

/// Writes a grid state as CSV: a header line with the region id, grid shape
/// and spacing, then one row per node.
pub fn save_state_csv(state: &WaveState, w: &mut impl Write) -> Result<()> {
    match &state.data {
        StateData::Grid1 { a, h, e, o } => {
            writeln!(
                w,
                "# region={} dims={} h={:.17e} a={:.17e}",
                state.region.id(),
                e.len(),
                h,
                a
            )?;
            writeln!(w, "index,e_re,e_im,o_re,o_im")?;
            for (i, (ev, ov)) in e.iter().zip(o).enumerate() {
                writeln!(
                    w,
                    "{i},{:.16e},{:.16e},{:.16e},{:.16e}",
                    ev.re, ev.im, ov.re, ov.im
                )?;
            }
        }
        StateData::Grid2 {
            origin,
            h,
            nx,
            ny,
            e,
            o,
        } => {
            writeln!(
                w,
                "# region={} dims={}x{} h={:.17e} origin={:.17e},{:.17e}",
                state.region.id(),
                nx,
                ny,
                h,
                origin.x,
                origin.y
            )?;
            writeln!(w, "index,e_re,e_im,o_re,o_im")?;
            for (i, (ev, ov)) in e.iter().zip(o).enumerate() {
                writeln!(
                    w,
                    "{i},{:.16e},{:.16e},{:.16e},{:.16e}",
                    ev.re, ev.im, ov.re, ov.im
                )?;
            }
        }
    }
    Ok(())
}

/// Reads component rows written by [`save_state_csv`]; the caller supplies
/// the region/grid context.
pub fn load_state_rows(r: &mut impl BufRead) -> Result<Vec<(Complex64, Complex64)>> {
    let mut rows = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.starts_with('#') || line.starts_with("index") || line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::Config(format!("bad state row: {line}")));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad number {s}")))
        };
        rows.push((
            Complex64::new(num(parts[1])?, num(parts[2])?),
            Complex64::new(num(parts[3])?, num(parts[4])?),
        ));
    }
    Ok(rows)
}
