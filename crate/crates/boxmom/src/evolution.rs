//! Discretization of H = −(1/2m)Δ + V with Robin boundary conditions on 1D
//! intervals and 2D rectangles, and unitary Crank–Nicolson time stepping.
//!
//! Grids are vertex-centered with boundary nodes on ∂Ω. The Robin condition
//! γΨ + n·∇Ψ = 0 enters through ghost-node elimination; the resulting
//! operator is self-adjoint under the trapezoid inner product, and a
//! diagonal similarity (boundary nodes scaled by √2) turns it into an
//! explicitly symmetric matrix. All stepping happens in that symmetric
//! basis, so Crank–Nicolson is unitary to solver accuracy.
//!
//! One Crank–Nicolson step solves (1 + i·dt/2·H)Ψ' = (1 − i·dt/2·H)Ψ. In 1D
//! this is a direct tridiagonal solve. In 2D the shipped potentials separate
//! per axis, so the Cayley map is applied exactly in the eigenbasis of the
//! two axis operators; a conjugate-orthogonal CG solver for the same system
//! is kept alongside and cross-checked in tests.

use crate::error::{Error, Result};
use crate::geometry::{Region, RegionKind, Vec2};
use crate::numerics::gemm::{gemm, transpose};
use crate::numerics::tridiag::{
    cocg, eig_sym_tridiag, mul_sym_tridiag, mul_sym_tridiag_real_off, solve_sym_tridiag,
};
use crate::numerics::I;
use crate::state::{StateData, WaveState};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Boundary condition for the Hamiltonian at one boundary piece, stored in
/// the angle parameterization cos(α)Ψ + sin(α)·n·∇Ψ = 0 to avoid infinite γ:
/// α = 0 is Dirichlet, α = π/2 Neumann, tan(α) = 1/γ otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RobinBc {
    Dirichlet,
    /// Finite extension parameter γ; complex values are representable so the
    /// Hermiticity diagnostics can exercise the invalid case, but stepping
    /// rejects them.
    Robin {
        gamma_re: f64,
        gamma_im: f64,
    },
}

impl RobinBc {
    pub fn robin(gamma: f64) -> RobinBc {
        RobinBc::Robin {
            gamma_re: gamma,
            gamma_im: 0.0,
        }
    }

    pub fn neumann() -> RobinBc {
        RobinBc::robin(0.0)
    }

    pub fn from_angle(alpha: f64) -> RobinBc {
        if alpha.abs() < 1e-14 {
            RobinBc::Dirichlet
        } else {
            RobinBc::robin(alpha.cos() / alpha.sin())
        }
    }

    pub fn gamma(&self) -> Option<Complex64> {
        match self {
            RobinBc::Dirichlet => None,
            RobinBc::Robin { gamma_re, gamma_im } => Some(Complex64::new(*gamma_re, *gamma_im)),
        }
    }
}

/// Potential catalog; every entry separates into per-axis parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    Zero,
    /// ½ m ω² |x − c|²
    Harmonic {
        omega: f64,
        center: [f64; 2],
    },
    /// g·x
    LinearTilt {
        g: f64,
    },
}

impl Potential {
    pub fn value(&self, mass: f64, p: Vec2) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Harmonic { omega, center } => {
                let d = p - Vec2::new(center[0], center[1]);
                0.5 * mass * omega * omega * d.dot(d)
            }
            Potential::LinearTilt { g } => g * p.x,
        }
    }

    /// Analytic gradient ∇V.
    pub fn gradient(&self, mass: f64, p: Vec2) -> Vec2 {
        match self {
            Potential::Zero => Vec2::ZERO,
            Potential::Harmonic { omega, center } => {
                (p - Vec2::new(center[0], center[1])) * (mass * omega * omega)
            }
            Potential::LinearTilt { g } => Vec2::new(*g, 0.0),
        }
    }

    /// The part of V depending on the given axis coordinate only.
    fn axis_value(&self, mass: f64, axis: usize, coord: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Harmonic { omega, center } => {
                let d = coord - center[axis];
                0.5 * mass * omega * omega * d * d
            }
            Potential::LinearTilt { g } => {
                if axis == 0 {
                    g * coord
                } else {
                    0.0
                }
            }
        }
    }
}

/// The discretized operator along one axis: a symmetric tridiagonal matrix
/// over the active nodes, plus the bookkeeping to map between natural grid
/// values and the symmetric basis.
#[derive(Debug, Clone)]
pub struct AxisOp {
    pub origin: f64,
    pub h: f64,
    pub n_full: usize,
    pub mass: f64,
    pub bc_minus: RobinBc,
    pub bc_plus: RobinBc,
    /// First full-grid node carried as an unknown (1 when the minus end is
    /// Dirichlet, else 0).
    pub active_start: usize,
    pub n_active: usize,
    /// Symmetric-basis diagonal; imaginary parts appear only for invalid
    /// complex γ and are caught by the stepping validation.
    pub diag: Vec<Complex64>,
    pub off: Vec<f64>,
    /// Natural-to-symmetric scale per active node (√2 weight at Robin
    /// boundary nodes).
    pub scale: Vec<f64>,
}

impl AxisOp {
    pub fn build(
        origin: f64,
        length: f64,
        n_full: usize,
        mass: f64,
        bc_minus: RobinBc,
        bc_plus: RobinBc,
        potential: impl Fn(f64) -> f64,
    ) -> Result<AxisOp> {
        if n_full < 5 {
            return Err(Error::Resolution("axis needs at least 5 nodes".into()));
        }
        if !(mass > 0.0) {
            return Err(Error::InvalidArgument("mass must be positive".into()));
        }
        let h = length / (n_full - 1) as f64;
        let active_start = usize::from(bc_minus == RobinBc::Dirichlet);
        let trim_plus = usize::from(bc_plus == RobinBc::Dirichlet);
        let n_active = n_full - active_start - trim_plus;
        let kin = 1.0 / (2.0 * mass * h * h);

        let mut diag = vec![Complex64::default(); n_active];
        let mut off = vec![-kin; n_active.saturating_sub(1)];
        let mut scale = vec![1.0; n_active];
        for (j, d) in diag.iter_mut().enumerate() {
            let x = origin + (active_start + j) as f64 * h;
            let v = potential(x);
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "potential is singular at x = {x}"
                )));
            }
            *d = Complex64::new(2.0 * kin + v, 0.0);
        }
        // ghost elimination at Robin ends: diag picks up 2hγ·kin, the
        // boundary coupling doubles, and the √2 similarity restores symmetry
        if let Some(g) = bc_minus.gamma() {
            diag[0] += 2.0 * h * kin * g;
            off[0] = -kin * 2.0_f64.sqrt();
            scale[0] = 1.0 / 2.0_f64.sqrt();
        }
        if let Some(g) = bc_plus.gamma() {
            let last = n_active - 1;
            diag[last] += 2.0 * h * kin * g;
            off[last - 1] = -kin * 2.0_f64.sqrt();
            scale[last] = 1.0 / 2.0_f64.sqrt();
        }
        Ok(AxisOp {
            origin,
            h,
            n_full,
            mass,
            bc_minus,
            bc_plus,
            active_start,
            n_active,
            diag,
            off,
            scale,
        })
    }

    /// Max entrywise |H − H†| of the assembled matrix; zero for real γ,
    /// growing linearly with any imaginary part injected into γ.
    pub fn hermiticity_residual(&self) -> f64 {
        // off-diagonals are real and symmetric by construction; asymmetry can
        // only sit on the diagonal
        self.diag
            .iter()
            .map(|d| 2.0 * d.im.abs())
            .fold(0.0, f64::max)
    }

    fn require_self_adjoint(&self) -> Result<()> {
        let r = self.hermiticity_residual();
        if r > 1e-12 {
            return Err(Error::SelfAdjointness(format!(
                "Hamiltonian matrix asymmetry {r:.3e}: γ must be real"
            )));
        }
        Ok(())
    }

    fn real_diag(&self) -> Vec<f64> {
        self.diag.iter().map(|d| d.re).collect()
    }

    pub fn eigen(&self) -> Result<AxisEigen> {
        self.require_self_adjoint()?;
        let (evals, q) = eig_sym_tridiag(&self.real_diag(), &self.off)?;
        let qt = transpose(self.n_active, self.n_active, &q);
        Ok(AxisEigen {
            evals,
            q,
            qt,
            n: self.n_active,
        })
    }

    /// Natural-basis grid coordinates of the active nodes.
    pub fn active_coords(&self) -> Vec<f64> {
        (0..self.n_active)
            .map(|j| self.origin + (self.active_start + j) as f64 * self.h)
            .collect()
    }
}

/// Eigendecomposition of one axis operator (symmetric basis).
#[derive(Debug, Clone)]
pub struct AxisEigen {
    pub evals: Vec<f64>,
    /// q[i * n + j] = node i of eigenvector j
    pub q: Vec<f64>,
    pub qt: Vec<f64>,
    pub n: usize,
}

/// Assembled Hamiltonian on an interval or rectangle.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    pub region: Region,
    pub potential: Potential,
    pub mass: f64,
    pub x: AxisOp,
    pub y: Option<AxisOp>,
}

/// Boundary conditions for the Hamiltonian, one per rectangle side
/// (1 = bottom, 2 = right, 3 = top, 4 = left) or interval end (1, 2).
#[derive(Debug, Clone, Copy)]
pub struct BcSet {
    pub sides: [RobinBc; 4],
}

impl BcSet {
    pub fn uniform(bc: RobinBc) -> BcSet {
        BcSet { sides: [bc; 4] }
    }

    pub fn dirichlet() -> BcSet {
        BcSet::uniform(RobinBc::Dirichlet)
    }
}

/// Builds the Hamiltonian for an interval (n nodes) or rectangle (nx × ny
/// nodes, equal spacing). γ per side must be constant; tables are not
/// supported by the evolution grids.
pub fn build_hamiltonian(
    region: &Region,
    nodes: (usize, usize),
    mass: f64,
    potential: Potential,
    bcs: &BcSet,
) -> Result<Hamiltonian> {
    match region.kind() {
        RegionKind::Interval { a, b } => {
            let axis = AxisOp::build(*a, b - a, nodes.0, mass, bcs.sides[0], bcs.sides[1], |x| {
                potential.axis_value(mass, 0, x)
            })?;
            Ok(Hamiltonian {
                region: region.clone(),
                potential,
                mass,
                x: axis,
                y: None,
            })
        }
        RegionKind::Rectangle { origin, lx, ly } => {
            let hx = lx / (nodes.0 - 1) as f64;
            let hy = ly / (nodes.1 - 1) as f64;
            if (hx - hy).abs() > 1e-12 * hx.max(hy) {
                return Err(Error::InvalidArgument(format!(
                    "rectangle grid must have equal spacing (hx = {hx}, hy = {hy})"
                )));
            }
            let x = AxisOp::build(
                origin.x,
                *lx,
                nodes.0,
                mass,
                bcs.sides[3], // left
                bcs.sides[1], // right
                |x| potential.axis_value(mass, 0, x),
            )?;
            let y = AxisOp::build(
                origin.y,
                *ly,
                nodes.1,
                mass,
                bcs.sides[0], // bottom
                bcs.sides[2], // top
                |yv| potential.axis_value(mass, 1, yv),
            )?;
            Ok(Hamiltonian {
                region: region.clone(),
                potential,
                mass,
                x,
                y: Some(y),
            })
        }
        _ => Err(Error::InvalidArgument(
            "time evolution supports intervals and rectangles only".into(),
        )),
    }
}

impl Hamiltonian {
    /// Max entrywise |H − H†| of the assembled matrix.
    pub fn hermiticity_residual(&self) -> f64 {
        let rx = self.x.hermiticity_residual();
        match &self.y {
            None => rx,
            Some(y) => rx.max(y.hermiticity_residual()),
        }
    }
}

/// Crank–Nicolson evolver on a 1D interval (direct tridiagonal solves).
pub struct Evolver1 {
    pub op: Hamiltonian,
    pub dt: f64,
    /// Symmetric-basis state over active nodes.
    pub phi: Vec<Complex64>,
    a_diag: Vec<Complex64>,
    a_off: Vec<Complex64>,
    b_diag: Vec<Complex64>,
    b_off: Vec<Complex64>,
}

impl Evolver1 {
    pub fn new(op: Hamiltonian, dt: f64, psi0: impl Fn(f64) -> Complex64) -> Result<Evolver1> {
        if op.y.is_some() {
            return Err(Error::InvalidArgument("expected a 1D Hamiltonian".into()));
        }
        op.x.require_self_adjoint()?;
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        let tau = Complex64::new(0.0, 0.5 * dt);
        let a_diag: Vec<Complex64> = op.x.diag.iter().map(|d| 1.0 + tau * d).collect();
        let a_off: Vec<Complex64> = op.x.off.iter().map(|&o| tau * o).collect();
        let b_diag: Vec<Complex64> = op.x.diag.iter().map(|d| 1.0 - tau * d).collect();
        let b_off: Vec<Complex64> = op.x.off.iter().map(|&o| -tau * o).collect();
        let mut phi: Vec<Complex64> =
            op.x.active_coords()
                .iter()
                .zip(&op.x.scale)
                .map(|(&xv, &s)| psi0(xv) * s)
                .collect();
        // normalize in the trapezoid norm: h Σ|φ|² = 1
        let n2: f64 = phi.iter().map(|z| z.norm_sqr()).sum::<f64>() * op.x.h;
        if !(n2 > 0.0) {
            return Err(Error::Numerical("initial state has zero norm".into()));
        }
        let s = 1.0 / n2.sqrt();
        phi.iter_mut().for_each(|z| *z *= s);
        Ok(Evolver1 {
            op,
            dt,
            phi,
            a_diag,
            a_off,
            b_diag,
            b_off,
        })
    }

    pub fn step(&mut self) -> Result<()> {
        let rhs = mul_sym_tridiag(&self.b_diag, &self.b_off, &self.phi);
        self.phi = solve_sym_tridiag(&self.a_diag, &self.a_off, &rhs)?;
        Ok(())
    }

    /// Current state as a physical grid wave function (natural basis, full
    /// grid with pinned Dirichlet nodes).
    pub fn state(&self) -> WaveState {
        let n = self.op.x.n_full;
        let mut psi = vec![Complex64::default(); n];
        for (j, &v) in self.phi.iter().enumerate() {
            psi[self.op.x.active_start + j] = v / self.op.x.scale[j];
        }
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let e: Vec<Complex64> = psi.iter().map(|&z| z * inv_sqrt2).collect();
        WaveState {
            region: self.op.region.clone(),
            data: StateData::Grid1 {
                a: self.op.x.origin,
                h: self.op.x.h,
                o: e.clone(),
                e,
            },
            physical: true,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.phi.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.op.x.h
    }

    pub fn energy(&self) -> f64 {
        let h_phi = mul_sym_tridiag_real_off(&self.op.x.diag, &self.op.x.off, &self.phi);
        let num: f64 = self
            .phi
            .iter()
            .zip(&h_phi)
            .map(|(p, hp)| (p.conj() * hp).re)
            .sum::<f64>()
            * self.op.x.h;
        num / self.norm_sqr()
    }
}

/// Crank–Nicolson evolver on a rectangle. The state is kept in the joint
/// eigenbasis of the two axis operators; each step multiplies by the exact
/// Cayley factors, so norm and energy are conserved to rounding.
pub struct Evolver2 {
    pub op: Hamiltonian,
    pub dt: f64,
    ex: AxisEigen,
    ey: AxisEigen,
    /// Spectral coefficients, row-major [ix * ny + iy], split re/im.
    gre: Vec<f64>,
    gim: Vec<f64>,
    /// Cayley factors per eigenpair.
    cay: Vec<Complex64>,
}

impl Evolver2 {
    pub fn new(op: Hamiltonian, dt: f64, psi0: impl Fn(Vec2) -> Complex64) -> Result<Evolver2> {
        let yop =
            op.y.as_ref()
                .ok_or_else(|| Error::InvalidArgument("expected a 2D Hamiltonian".into()))?;
        if !(dt > 0.0) {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        let ex = op.x.eigen()?;
        let ey = yop.eigen()?;
        let (nx, ny) = (op.x.n_active, yop.n_active);

        // sample, scale into the symmetric basis, normalize (h² Σ|φ|² = 1)
        let xs = op.x.active_coords();
        let ys = yop.active_coords();
        let mut fre = vec![0.0; nx * ny];
        let mut fim = vec![0.0; nx * ny];
        let mut n2 = 0.0;
        for ix in 0..nx {
            for iy in 0..ny {
                let v = psi0(Vec2::new(xs[ix], ys[iy])) * op.x.scale[ix] * yop.scale[iy];
                fre[ix * ny + iy] = v.re;
                fim[ix * ny + iy] = v.im;
                n2 += v.norm_sqr();
            }
        }
        n2 *= op.x.h * op.x.h;
        if !(n2 > 0.0) {
            return Err(Error::Numerical("initial state has zero norm".into()));
        }
        let s = 1.0 / n2.sqrt();
        fre.iter_mut().for_each(|v| *v *= s);
        fim.iter_mut().for_each(|v| *v *= s);

        // G = Qxᵀ F Qy
        let (gre, gim) = sandwich(&ex.qt, &fre, &fim, &ey.q, nx, ny);

        let tau = 0.5 * dt;
        let mut cay = vec![Complex64::default(); nx * ny];
        for ix in 0..nx {
            for iy in 0..ny {
                let e = ex.evals[ix] + ey.evals[iy];
                cay[ix * ny + iy] = (1.0 - I * tau * e) / (1.0 + I * tau * e);
            }
        }
        Ok(Evolver2 {
            op,
            dt,
            ex,
            ey,
            gre,
            gim,
            cay,
        })
    }

    pub fn step(&mut self) {
        for (i, c) in self.cay.iter().enumerate() {
            let z = Complex64::new(self.gre[i], self.gim[i]) * c;
            self.gre[i] = z.re;
            self.gim[i] = z.im;
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        let h = self.op.x.h;
        self.gre
            .iter()
            .zip(&self.gim)
            .map(|(r, i)| r * r + i * i)
            .sum::<f64>()
            * h
            * h
    }

    pub fn energy(&self) -> f64 {
        let h = self.op.x.h;
        let (nx, ny) = (self.ex.n, self.ey.n);
        let mut acc = 0.0;
        for ix in 0..nx {
            for iy in 0..ny {
                let idx = ix * ny + iy;
                acc += (self.ex.evals[ix] + self.ey.evals[iy])
                    * (self.gre[idx] * self.gre[idx] + self.gim[idx] * self.gim[idx]);
            }
        }
        acc * h * h / self.norm_sqr()
    }

    /// Current state on the full grid (natural basis), physical sector.
    pub fn state(&self) -> WaveState {
        let yop = self.op.y.as_ref().unwrap();
        let (nx, ny) = (self.op.x.n_active, yop.n_active);
        // F = Qx G Qyᵀ
        let (fre, fim) = sandwich(&self.ex.q, &self.gre, &self.gim, &self.ey.qt, nx, ny);
        let (nfx, nfy) = (self.op.x.n_full, yop.n_full);
        let mut e = vec![Complex64::default(); nfx * nfy];
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        for ix in 0..nx {
            for iy in 0..ny {
                let idx = ix * ny + iy;
                let psi =
                    Complex64::new(fre[idx], fim[idx]) / (self.op.x.scale[ix] * yop.scale[iy]);
                let gx = self.op.x.active_start + ix;
                let gy = yop.active_start + iy;
                e[gx * nfy + gy] = psi * inv_sqrt2;
            }
        }
        let origin = match self.op.region.kind() {
            RegionKind::Rectangle { origin, .. } => *origin,
            _ => unreachable!(),
        };
        WaveState {
            region: self.op.region.clone(),
            data: StateData::Grid2 {
                origin,
                h: self.op.x.h,
                nx: nfx,
                ny: nfy,
                o: e.clone(),
                e,
            },
            physical: true,
        }
    }

    /// One Crank–Nicolson step via the iterative solver, operating on a
    /// natural-ordering active-node vector. Used to validate the eigenbasis
    /// path; tolerance 1e-12.
    pub fn step_cocg_reference(&self, phi: &[Complex64]) -> Result<Vec<Complex64>> {
        let yop = self.op.y.as_ref().unwrap();
        let (nx, ny) = (self.op.x.n_active, yop.n_active);
        assert_eq!(phi.len(), nx * ny);
        let tau = Complex64::new(0.0, 0.5 * self.dt);
        let apply_h = |v: &[Complex64]| -> Vec<Complex64> {
            let mut out = vec![Complex64::default(); nx * ny];
            // Hx along x for each iy
            for iy in 0..ny {
                let col: Vec<Complex64> = (0..nx).map(|ix| v[ix * ny + iy]).collect();
                let hc = mul_sym_tridiag_real_off(&self.op.x.diag, &self.op.x.off, &col);
                for ix in 0..nx {
                    out[ix * ny + iy] += hc[ix];
                }
            }
            // Hy along y for each ix
            for ix in 0..nx {
                let row = &v[ix * ny..(ix + 1) * ny];
                let hr = mul_sym_tridiag_real_off(&yop.diag, &yop.off, row);
                for iy in 0..ny {
                    out[ix * ny + iy] += hr[iy];
                }
            }
            out
        };
        let hphi = apply_h(phi);
        let rhs: Vec<Complex64> = phi.iter().zip(&hphi).map(|(p, hp)| p - tau * hp).collect();
        cocg(
            |v| {
                let hv = apply_h(v);
                v.iter().zip(&hv).map(|(x, hx)| x + tau * hx).collect()
            },
            &rhs,
            1e-12,
            20_000,
        )
    }

    /// Natural-ordering active vector of the current symmetric-basis state.
    pub fn phi_active(&self) -> Vec<Complex64> {
        let yop = self.op.y.as_ref().unwrap();
        let (nx, ny) = (self.op.x.n_active, yop.n_active);
        let (fre, fim) = sandwich(&self.ex.q, &self.gre, &self.gim, &self.ey.qt, nx, ny);
        (0..nx * ny)
            .map(|i| Complex64::new(fre[i], fim[i]))
            .collect()
    }

    pub fn load_phi_active(&mut self, phi: &[Complex64]) {
        let yop = self.op.y.as_ref().unwrap();
        let (nx, ny) = (self.op.x.n_active, yop.n_active);
        let fre: Vec<f64> = phi.iter().map(|z| z.re).collect();
        let fim: Vec<f64> = phi.iter().map(|z| z.im).collect();
        let (gre, gim) = sandwich(&self.ex.qt, &fre, &fim, &self.ey.q, nx, ny);
        self.gre = gre;
        self.gim = gim;
    }
}

/// Computes A · M · B for real A (nx×nx), complex M (nx×ny split), real B
/// (ny×ny): four real GEMMs.
fn sandwich(
    a: &[f64],
    mre: &[f64],
    mim: &[f64],
    b: &[f64],
    nx: usize,
    ny: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut t1 = vec![0.0; nx * ny];
    let mut t2 = vec![0.0; nx * ny];
    gemm(nx, nx, ny, a, mre, &mut t1);
    gemm(nx, nx, ny, a, mim, &mut t2);
    let mut ore = vec![0.0; nx * ny];
    let mut oim = vec![0.0; nx * ny];
    gemm(nx, ny, ny, &t1, b, &mut ore);
    gemm(nx, ny, ny, &t2, b, &mut oim);
    (ore, oim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn interval_h(n: usize, bc: RobinBc, v: Potential) -> Hamiltonian {
        let region = Region::interval(0.0, PI).unwrap();
        build_hamiltonian(&region, (n, 1), 1.0, v, &BcSet::uniform(bc)).unwrap()
    }

    #[test]
    fn dirichlet_box_ground_energy() {
        let op = interval_h(401, RobinBc::Dirichlet, Potential::Zero);
        let eig = op.x.eigen().unwrap();
        // particle in a box: E₁ = 1²/2 on [0, π]
        assert!((eig.evals[0] - 0.5).abs() < 1e-4, "E0 = {}", eig.evals[0]);
    }

    #[test]
    fn neumann_ground_state_is_constant() {
        let op = interval_h(201, RobinBc::neumann(), Potential::Zero);
        let eig = op.x.eigen().unwrap();
        assert!(eig.evals[0].abs() < 1e-10);
        // eigenvector in natural basis is constant: undo the boundary scaling
        let n = op.x.n_active;
        let v0: Vec<f64> = (0..n).map(|i| eig.q[i * n] / op.x.scale[i]).collect();
        let mean = v0.iter().sum::<f64>() / n as f64;
        for v in &v0 {
            assert!((v - mean).abs() < 1e-9 * mean.abs());
        }
    }

    #[test]
    fn robin_limit_approaches_dirichlet() {
        let op_d = interval_h(201, RobinBc::Dirichlet, Potential::Zero);
        let op_r = interval_h(201, RobinBc::robin(1e7), Potential::Zero);
        let e_d = op_d.x.eigen().unwrap().evals[0];
        let e_r = op_r.x.eigen().unwrap().evals[0];
        assert!((e_d - e_r).abs() < 1e-4, "{e_d} vs {e_r}");
    }

    #[test]
    fn hermiticity_residual_real_and_complex_gamma() {
        let op = interval_h(101, RobinBc::robin(1.7), Potential::Zero);
        assert!(op.hermiticity_residual() < 1e-12);

        let region = Region::interval(0.0, PI).unwrap();
        let make = |gim: f64| {
            build_hamiltonian(
                &region,
                (101, 1),
                1.0,
                Potential::Zero,
                &BcSet::uniform(RobinBc::Robin {
                    gamma_re: 0.5,
                    gamma_im: gim,
                }),
            )
            .unwrap()
        };
        let r1 = make(0.1).hermiticity_residual();
        let r2 = make(0.2).hermiticity_residual();
        assert!(r1 > 1e-3);
        assert!((r2 / r1 - 2.0).abs() < 1e-10); // linear in Im γ
                                                // stepping rejects the invalid operator
        assert!(Evolver1::new(make(0.1), 1e-3, |_| Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn cn_rotates_eigenstate_phase() {
        let op = interval_h(120, RobinBc::Dirichlet, Potential::Zero);
        let eig = op.x.eigen().unwrap();
        let (e0, n) = (eig.evals[0], op.x.n_active);
        let v0: Vec<f64> = (0..n).map(|i| eig.q[i * n]).collect();
        let dt = 1e-3;
        // start from the discrete eigenvector (natural basis)
        let coords = op.x.active_coords();
        let scale = op.x.scale.clone();
        let mut ev = Evolver1::new(op, dt, |x| {
            let j = ((x - coords[0]) / (coords[1] - coords[0])).round() as usize;
            Complex64::new(v0[j] / scale[j], 0.0)
        })
        .unwrap();
        let before = ev.phi.clone();
        for _ in 0..10 {
            ev.step().unwrap();
        }
        // Cayley phase of the discrete eigenvalue, 10 steps
        let cay = (1.0 - I * 0.5 * dt * e0) / (1.0 + I * 0.5 * dt * e0);
        let expect = cay.powu(10);
        for (a, b) in ev.phi.iter().zip(&before) {
            assert!((a - b * expect).norm() < 1e-12);
        }
        // and the Cayley phase matches e^{-iE dt} to O(dt³) per step
        assert!((cay - (-I * e0 * dt).exp()).norm() < (e0 * dt).powi(3));
    }

    #[test]
    fn cn_norm_and_energy_drift_1d() {
        let op = interval_h(
            150,
            RobinBc::robin(0.8),
            Potential::Harmonic {
                omega: 3.0,
                center: [1.2, 0.0],
            },
        );
        let mut ev = Evolver1::new(op, 2e-3, |x| {
            (Complex64::new(-(x - 1.5) * (x - 1.5) / 0.08, 0.0) + I * 2.0 * x).exp()
        })
        .unwrap();
        let n0 = ev.norm_sqr();
        let e0 = ev.energy();
        for _ in 0..1000 {
            ev.step().unwrap();
        }
        assert!((ev.norm_sqr() - n0).abs() < 1e-10, "norm drift");
        assert!(((ev.energy() - e0) / e0).abs() < 1e-8, "energy drift");
    }

    #[test]
    fn evolver2_matches_cocg_reference() {
        let region = Region::rectangle(Vec2::ZERO, 1.0, 1.0).unwrap();
        let op = build_hamiltonian(
            &region,
            (24, 24),
            1.0,
            Potential::Harmonic {
                omega: 2.0,
                center: [0.5, 0.5],
            },
            &BcSet {
                sides: [
                    RobinBc::robin(0.7),
                    RobinBc::Dirichlet,
                    RobinBc::neumann(),
                    RobinBc::robin(-0.4),
                ],
            },
        )
        .unwrap();
        let mut ev = Evolver2::new(op, 5e-3, |p| {
            (Complex64::new(
                -(p - Vec2::new(0.4, 0.6)).dot(p - Vec2::new(0.4, 0.6)) / 0.05,
                0.0,
            ) + I * (2.0 * p.x - 1.0 * p.y))
                .exp()
        })
        .unwrap();
        let phi0 = ev.phi_active();
        let reference = ev.step_cocg_reference(&phi0).unwrap();
        ev.step();
        let spectral = ev.phi_active();
        let mut max_diff = 0.0f64;
        for (a, b) in spectral.iter().zip(&reference) {
            max_diff = max_diff.max((a - b).norm());
        }
        assert!(max_diff < 1e-10, "max diff {max_diff}");
    }

    #[test]
    fn evolver2_norm_conservation() {
        let region = Region::rectangle(Vec2::ZERO, 1.0, 1.0).unwrap();
        let op = build_hamiltonian(&region, (32, 32), 2.0, Potential::Zero, &BcSet::dirichlet())
            .unwrap();
        let mut ev = Evolver2::new(op, 1e-3, |p| {
            (Complex64::new(
                -(p - Vec2::new(0.5, 0.5)).dot(p - Vec2::new(0.5, 0.5)) / 0.02,
                0.0,
            ) + I * 8.0 * p.x)
                .exp()
        })
        .unwrap();
        let n0 = ev.norm_sqr();
        let e0 = ev.energy();
        for _ in 0..1000 {
            ev.step();
        }
        assert!((ev.norm_sqr() - n0).abs() < 1e-12);
        assert!(((ev.energy() - e0) / e0).abs() < 1e-12);
    }

    #[test]
    fn free_packet_moves_at_group_velocity() {
        // mid-box free flight: d⟨x⟩/dt = ⟨p⟩/m before boundary contact
        let region = Region::interval(0.0, 1.0).unwrap();
        let op = build_hamiltonian(&region, (257, 1), 4.0, Potential::Zero, &BcSet::dirichlet())
            .unwrap();
        let k = 5.0;
        let mut ev = Evolver1::new(op, 1e-3, |x| {
            (Complex64::new(-(x - 0.4) * (x - 0.4) / (4.0 * 0.01), 0.0) + I * k * x).exp()
        })
        .unwrap();
        let xmean = |ev: &Evolver1| {
            let st = ev.state();
            if let StateData::Grid1 { a, h, e, .. } = &st.data {
                let n = e.len();
                let mut num = 0.0;
                let mut den = 0.0;
                for i in 0..n {
                    let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 } * h;
                    let x = a + i as f64 * h;
                    num += w * x * 2.0 * e[i].norm_sqr();
                    den += w * 2.0 * e[i].norm_sqr();
                }
                num / den
            } else {
                unreachable!()
            }
        };
        let x0 = xmean(&ev);
        let steps = 40;
        for _ in 0..steps {
            ev.step().unwrap();
        }
        let x1 = xmean(&ev);
        let v_measured = (x1 - x0) / (steps as f64 * 1e-3);
        let v_expect = k / 4.0;
        assert!(
            (v_measured - v_expect).abs() < 1e-3 * v_expect,
            "v = {v_measured}, expected {v_expect}"
        );
    }
}
