//! Expectation values and their identities: the ⟨−i∇⟩ = ⟨p_R⟩ + i⟨p_I⟩
//! decomposition, spectral momentum sums over line sections, the
//! momentum-position correlator computed along two independent routes,
//! Ehrenfest residuals with the quantum boundary force, and the measurable
//! uncertainty inequality.
//!
//! Two evaluation paths coexist. Closed-form states (with analytic
//! gradients) use the geometry quadratures and reach near machine accuracy;
//! grid states from evolution runs use second-order finite differences, so
//! their residual contracts are O(dt² + h²).

use crate::error::{Error, Result};
use crate::evolution::{Evolver1, Evolver2, Hamiltonian, RobinBc};
use crate::geometry::{
    boundary_quadrature, region_quadrature, Dir2, Region, SectionInterval, TransverseRule, Vec2,
};
use crate::modes::{build_mode, project, LineState};
use crate::numerics::gauss::Quad1;
use crate::numerics::I;
use crate::state::{
    boundary_flux, derivative_1d, FieldOnLine, ScalarField1, ScalarField2, StateData, WaveState,
};
use num_complex::Complex64;
use serde::Serialize;

pub use crate::state::expect_pi_field;

/// Quadrature configuration for closed-form observables.
#[derive(Debug, Clone)]
pub struct FieldQuad {
    pub scan_dir: Dir2,
    pub n_lines: usize,
    pub line_order: usize,
    pub line_panels: usize,
    pub n_boundary: usize,
    pub rule: TransverseRule,
}

impl Default for FieldQuad {
    fn default() -> Self {
        FieldQuad {
            scan_dir: Dir2::X,
            n_lines: 64,
            line_order: 8,
            line_panels: 16,
            n_boundary: 512,
            rule: TransverseRule::GaussPanels,
        }
    }
}

/// ⟨−i k̂·∇⟩ of a closed-form physical state by volume quadrature; complex in
/// general, Re = ⟨k̂·p_R⟩ and Im = ⟨k̂·p_I⟩.
pub fn expect_gradient_field(
    field: &dyn ScalarField2,
    region: &Region,
    dir: Dir2,
    q: &FieldQuad,
) -> Result<Complex64> {
    let quad = region_quadrature(
        region,
        q.scan_dir,
        q.n_lines,
        q.rule,
        q.line_order,
        q.line_panels,
    )?;
    let mut acc = Complex64::default();
    let mut norm = 0.0;
    for (&p, &w) in quad.points.iter().zip(&quad.weights) {
        let v = field.value(p);
        let g = field.gradient(p);
        let gk = g[0] * dir.vec().x + g[1] * dir.vec().y;
        acc += w * v.conj() * (-I) * gk;
        norm += w * v.norm_sqr();
    }
    Ok(acc / norm)
}

/// 1D version of [`expect_gradient_field`] on an interval region.
pub fn expect_gradient_field_1d(
    field: &dyn ScalarField1,
    region: &Region,
    q: &FieldQuad,
) -> Result<Complex64> {
    let sec = region.line_section(Dir2::X, 0.0)?;
    let iv = &sec.intervals[0];
    let quad = Quad1::gauss(iv.x_minus, iv.x_plus, q.line_order, q.line_panels.max(32));
    let mut acc = Complex64::default();
    let mut norm = 0.0;
    for (&x, &w) in quad.nodes.iter().zip(&quad.weights) {
        let v = field.value(x);
        acc += w * v.conj() * (-I) * field.deriv(x);
        norm += w * v.norm_sqr();
    }
    Ok(acc / norm)
}

/// Spectral momentum expectation with truncation metadata.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralValue {
    pub value: f64,
    /// Contribution of the outer 10% of the ladder, as a tail estimate.
    pub tail: f64,
    /// Set when the tail exceeds 1e-3 of the total.
    pub warn: bool,
    pub n_modes: i64,
    pub n_lines: usize,
}

/// Per-line spectral sum Σ_n k_n |⟨Φ_n|Ψ⟩|² over one section interval.
/// Returns (sum, tail contribution of the outer decile).
pub fn line_pr_sum(
    interval: &SectionInterval,
    state: &impl LineState,
    n_max: i64,
) -> Result<(f64, f64)> {
    let quad = crate::modes::interval_quad(interval, n_max);
    let mut sum = 0.0;
    let mut tail = 0.0;
    let tail_from = ((0.9 * n_max as f64) as i64).max(1);
    for n in -n_max..=n_max {
        let mode = build_mode(interval, 0.0, n)?;
        let c = project(&mode, state, &quad);
        let term = mode.k * c.norm_sqr();
        sum += term;
        if n.abs() >= tail_from {
            tail += term.abs();
        }
    }
    Ok((sum, tail))
}

/// Gauss-panel transverse rule between the region's breakpoints for `dir`.
fn transverse_quad(
    region: &Region,
    dir: Dir2,
    n_lines: usize,
    rule: TransverseRule,
) -> Result<Quad1> {
    let breaks = region.transverse_breakpoints(dir);
    if breaks.len() < 2 {
        return Err(Error::Geometry("region has no transverse extent".into()));
    }
    let (lo, hi) = (breaks[0], breaks[breaks.len() - 1]);
    Ok(match rule {
        TransverseRule::Midpoint => Quad1::midpoint(lo, hi, n_lines),
        TransverseRule::GaussPanels => {
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
                let sub = Quad1::gauss(w[0], w[1], order, panels);
                nodes.extend(sub.nodes);
                ws.extend(sub.weights);
            }
            Quad1 { nodes, weights: ws }
        }
    })
}

/// ⟨l̂·p_R⟩ of a closed-form physical state via transverse quadrature over
/// line sections and per-line mode sums. The value is independent of the λ
/// field attached to the region; λ only reshuffles the eigenbasis.
pub fn expect_pr_spectral_field(
    field: &dyn ScalarField2,
    region: &Region,
    dir: Dir2,
    n_modes: i64,
    q: &FieldQuad,
) -> Result<SpectralValue> {
    let transverse = transverse_quad(region, dir, q.n_lines, q.rule)?;
    // normalize over the same line-scan structure so numerator and
    // denominator share quadrature errors
    let mut value = 0.0;
    let mut tail = 0.0;
    let mut norm = 0.0;
    let mut n_lines_used = 0;
    for (&y0, &wt) in transverse.nodes.iter().zip(&transverse.weights) {
        let sec = region.line_section(dir, y0)?;
        if sec.is_empty() {
            continue;
        }
        n_lines_used += 1;
        for interval in &sec.intervals {
            let line = FieldOnLine {
                field,
                direction: dir,
                anchor: y0,
            };
            let (s, t) = line_pr_sum(interval, &line, n_modes)?;
            value += wt * s;
            tail += wt * t;
            let quad = crate::modes::interval_quad(interval, 8);
            for (&x, &w) in quad.nodes.iter().zip(&quad.weights) {
                norm += wt * w * 2.0 * line.e(x).norm_sqr();
            }
        }
    }
    if norm <= 0.0 {
        return Err(Error::Domain("state has no support in the region".into()));
    }
    let value = value / norm;
    let tail = tail / norm;
    Ok(SpectralValue {
        value,
        tail,
        warn: tail > 1e-3 * value.abs().max(1e-12),
        n_modes,
        n_lines: n_lines_used,
    })
}

/// 1D spectral ⟨p_R⟩ on an interval region.
pub fn expect_pr_spectral_field_1d(
    field: &dyn ScalarField1,
    region: &Region,
    n_modes: i64,
) -> Result<SpectralValue> {
    let sec = region.line_section(Dir2::X, 0.0)?;
    let interval = &sec.intervals[0];
    struct Line1<'a> {
        f: &'a dyn ScalarField1,
    }
    impl LineState for Line1<'_> {
        fn e(&self, x: f64) -> Complex64 {
            self.f.value(x) / 2.0_f64.sqrt()
        }
        fn o(&self, x: f64) -> Complex64 {
            self.e(x)
        }
    }
    let line = Line1 { f: field };
    let (s, t) = line_pr_sum(interval, &line, n_modes)?;
    let quad = crate::modes::interval_quad(interval, 8);
    let norm: f64 = quad
        .nodes
        .iter()
        .zip(&quad.weights)
        .map(|(&x, &w)| w * 2.0 * line.e(x).norm_sqr())
        .sum();
    Ok(SpectralValue {
        value: s / norm,
        tail: t / norm,
        warn: t.abs() > 1e-3 * s.abs().max(1e-12),
        n_modes,
        n_lines: 1,
    })
}

/// The correlator ⟨(l̂·p_R)(m̂·x)⟩ computed along two routes.
#[derive(Debug, Clone, Serialize)]
pub struct CorrelatorReport {
    /// Route (a): Σ_n k_n ⟨Ψ|Φ_n⟩⟨Φ_n|(m̂·x)|Ψ⟩ integrated over lines.
    pub spectral_re: f64,
    pub spectral_im: f64,
    /// Route (b): ⟨(m̂·x)(−i l̂·∇)⟩ − i(l̂·m̂) + (i/2)⟨(n·l̂)(m̂·x)⟩_∂Ω.
    pub identity_re: f64,
    pub identity_im: f64,
    pub difference: f64,
    pub n_modes: i64,
}

impl CorrelatorReport {
    pub fn spectral(&self) -> Complex64 {
        Complex64::new(self.spectral_re, self.spectral_im)
    }
    pub fn identity(&self) -> Complex64 {
        Complex64::new(self.identity_re, self.identity_im)
    }
}

/// Computes ⟨(l̂·p_R)(m̂·x)⟩ by the spectral route and by the volume-boundary
/// identity, and cross-checks them. Disagreement beyond 1e-4 is an error:
/// it flags inadequate quadrature or truncation.
pub fn pr_position_correlator(
    field: &dyn ScalarField2,
    region: &Region,
    l_dir: Dir2,
    m_dir: Dir2,
    n_modes: i64,
    q: &FieldQuad,
) -> Result<CorrelatorReport> {
    // route (a): spectral sums along l̂-sections
    let transverse = transverse_quad(region, l_dir, q.n_lines, q.rule)?;
    let mut spectral = Complex64::default();
    let mut norm = 0.0;
    let t_hat = l_dir.transverse();
    for (&y0, &wt) in transverse.nodes.iter().zip(&transverse.weights) {
        let sec = region.line_section(l_dir, y0)?;
        for interval in &sec.intervals {
            let line = FieldOnLine {
                field,
                direction: l_dir,
                anchor: y0,
            };
            let quad = crate::modes::interval_quad(interval, n_modes);
            // x_m along the line: m̂·(y₀ t̂ + x l̂)
            let xm0 = y0 * m_dir.dot(t_hat.vec());
            let xm_slope = m_dir.dot(l_dir.vec());
            for n in -n_modes..=n_modes {
                let mode = build_mode(interval, y0, n)?;
                let c = project(&mode, &line, &quad);
                // d = ⟨Φ| x_m |Ψ⟩
                let mut d = Complex64::default();
                for (&x, &w) in quad.nodes.iter().zip(&quad.weights) {
                    let xm = xm0 + xm_slope * x;
                    d += (mode.eval_e(x).conj() * line.e(x) + mode.eval_o(x).conj() * line.o(x))
                        * xm
                        * w;
                }
                spectral += wt * mode.k * c.conj() * d;
            }
            for (&x, &w) in quad.nodes.iter().zip(&quad.weights) {
                norm += wt * w * 2.0 * line.e(x).norm_sqr();
            }
        }
    }
    spectral /= norm;

    // route (b): ⟨x_m(−i l̂·∇)⟩ − i(l̂·m̂) + (i/2)⟨(n·l̂)x_m⟩_∂Ω
    let quad = region_quadrature(
        region,
        q.scan_dir,
        q.n_lines,
        q.rule,
        q.line_order,
        q.line_panels,
    )?;
    let mut xm_grad = Complex64::default();
    let mut vnorm = 0.0;
    for (&p, &w) in quad.points.iter().zip(&quad.weights) {
        let v = field.value(p);
        let g = field.gradient(p);
        let gl = g[0] * l_dir.vec().x + g[1] * l_dir.vec().y;
        let xm = m_dir.dot(p);
        xm_grad += w * v.conj() * xm * (-I) * gl;
        vnorm += w * v.norm_sqr();
    }
    xm_grad /= vnorm;
    let bq = boundary_quadrature(region, q.n_boundary)?;
    let mut bterm = 0.0;
    for node in &bq {
        let rho = field.value(node.point).norm_sqr();
        bterm += node.weight * l_dir.dot(node.normal) * m_dir.dot(node.point) * rho;
    }
    bterm /= vnorm;
    let lm = l_dir.dot(m_dir.vec());
    let identity = xm_grad - I * lm + I * 0.5 * bterm;

    let difference = (spectral - identity).norm();
    if difference > 1e-4 {
        return Err(Error::Consistency(format!(
            "correlator routes disagree by {difference:.3e} (spectral {spectral}, identity {identity})"
        )));
    }
    Ok(CorrelatorReport {
        spectral_re: spectral.re,
        spectral_im: spectral.im,
        identity_re: identity.re,
        identity_im: identity.im,
        difference,
        n_modes,
    })
}

/// Everything entering the summed uncertainty inequality, with quadrature
/// metadata. `lhs` is 2m⟨T⟩; `slack` = lhs − rhs must be ≥ −1e-8.
#[derive(Debug, Clone, Serialize)]
pub struct UncertaintyReport {
    pub mass: f64,
    pub directions: Vec<String>,
    pub x_mean: f64,
    pub delta_x: f64,
    /// ∫|∇ψ|² dV (= Σ_k ⟨A_k†A_k⟩)
    pub grad_norm_sqr: f64,
    /// ∮ γ |ψ|² dS
    pub gamma_boundary: f64,
    pub lhs: f64,
    pub kinetic_t: f64,
    pub pr: Vec<f64>,
    pub pi: Vec<f64>,
    /// Boundary-route ⟨k̂·p_I⟩ = −½⟨n·k̂⟩_∂Ω, as a cross-check of `pi`.
    pub pi_boundary: Vec<f64>,
    /// ½⟨{k̂·p_R, x_m}⟩ per direction.
    pub anticommutator: Vec<f64>,
    pub bracket_re: Vec<f64>,
    pub bracket_im: Vec<f64>,
    /// Boundary-route geometric bracket (k̂·m̂) − ⟨(n·k̂)x_m⟩ + ⟨x_m⟩⟨n·k̂⟩,
    /// which equals −2·bracket_im up to quadrature error.
    pub geo_bracket: Vec<f64>,
    pub geo_bracket_residual: Vec<f64>,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
    pub quadrature_nodes: usize,
    pub boundary_nodes: usize,
}

/// Numerical floor for the inequality assertion.
pub const UNCERTAINTY_EPS: f64 = 1e-8;

struct SampledState {
    weights: Vec<f64>,
    psi: Vec<Complex64>,
    /// gradient component per direction, directions.len() × nodes
    grads: Vec<Vec<Complex64>>,
    xm: Vec<f64>,
}

fn uncertainty_core(
    sample: &SampledState,
    region: &Region,
    directions: &[(String, Dir2)],
    m_dir: Dir2,
    mass: f64,
    rho_boundary: impl Fn(Vec2) -> f64,
    n_boundary: usize,
) -> Result<UncertaintyReport> {
    let nn = sample.weights.len();
    let mut norm = 0.0;
    for i in 0..nn {
        norm += sample.weights[i] * sample.psi[i].norm_sqr();
    }
    if !(norm > 0.0) {
        return Err(Error::Domain("state has no support in the region".into()));
    }

    let mean = |f: &dyn Fn(usize) -> Complex64| -> Complex64 {
        let mut acc = Complex64::default();
        for i in 0..nn {
            acc += sample.weights[i] * f(i);
        }
        acc / norm
    };

    let x_mean = mean(&|i| Complex64::from(sample.xm[i] * sample.psi[i].norm_sqr())).re;
    let x2_mean =
        mean(&|i| Complex64::from(sample.xm[i] * sample.xm[i] * sample.psi[i].norm_sqr())).re;
    let delta_x = (x2_mean - x_mean * x_mean).max(0.0).sqrt();
    if delta_x < 1e-12 {
        return Err(Error::Numerical(
            "position spread too small: uncertainty denominators degenerate".into(),
        ));
    }

    // boundary integrals
    let bq = boundary_quadrature(region, n_boundary)?;
    let mut gamma_boundary = 0.0;
    let mut n_moment = vec![0.0; directions.len()];
    let mut nx_moment = vec![0.0; directions.len()];
    for node in &bq {
        let rho = rho_boundary(node.point) / norm;
        if let Some(g) = region.gamma_at(node.segment_id, node.s) {
            gamma_boundary += node.weight * g * rho;
        }
        for (kidx, (_, kdir)) in directions.iter().enumerate() {
            let nk = kdir.dot(node.normal);
            n_moment[kidx] += node.weight * nk * rho;
            nx_moment[kidx] += node.weight * nk * m_dir.dot(node.point) * rho;
        }
    }

    let mut grad_norm_sqr = 0.0;
    let mut pr = Vec::new();
    let mut pi = Vec::new();
    let mut pi_boundary = Vec::new();
    let mut anticommutator = Vec::new();
    let mut bracket_re = Vec::new();
    let mut bracket_im = Vec::new();
    let mut geo_bracket = Vec::new();
    let mut geo_res = Vec::new();
    let mut bracket_sq = 0.0;
    let mut p_sq = 0.0;

    for (kidx, (_, kdir)) in directions.iter().enumerate() {
        let a = &sample.grads[kidx];
        let aak = mean(&|i| Complex64::new(a[i].norm_sqr(), 0.0)).re;
        grad_norm_sqr += aak;
        let a_mean = mean(&|i| sample.psi[i].conj() * (-I) * a[i]);
        pr.push(a_mean.re);
        pi.push(a_mean.im);
        pi_boundary.push(-0.5 * n_moment[kidx]);
        let ab = mean(&|i| ((-I) * a[i]).conj() * sample.xm[i] * sample.psi[i]);
        anticommutator.push(ab.re);
        let bracket = ab - a_mean.conj() * x_mean;
        bracket_re.push(bracket.re);
        bracket_im.push(bracket.im);
        let lm = kdir.dot(m_dir.vec());
        let geo = lm - nx_moment[kidx] + x_mean * n_moment[kidx];
        geo_bracket.push(geo);
        geo_res.push((geo - (-2.0 * bracket.im)).abs());
        bracket_sq += bracket.norm_sqr();
        p_sq += a_mean.norm_sqr();
    }

    let lhs = grad_norm_sqr + gamma_boundary;
    let rhs = bracket_sq / (delta_x * delta_x) + gamma_boundary + p_sq;
    let slack = lhs - rhs;

    Ok(UncertaintyReport {
        mass,
        directions: directions.iter().map(|(n, _)| n.clone()).collect(),
        x_mean,
        delta_x,
        grad_norm_sqr,
        gamma_boundary,
        lhs,
        kinetic_t: lhs / (2.0 * mass),
        pr,
        pi,
        pi_boundary,
        anticommutator,
        bracket_re,
        bracket_im,
        geo_bracket,
        geo_bracket_residual: geo_res,
        rhs,
        slack,
        pass: slack >= -UNCERTAINTY_EPS,
        quadrature_nodes: nn,
        boundary_nodes: bq.len(),
    })
}

/// Uncertainty report for a closed-form 2D state over the basis {x̂, ŷ}.
pub fn uncertainty_report_2d(
    field: &dyn ScalarField2,
    region: &Region,
    m_dir: Dir2,
    mass: f64,
    q: &FieldQuad,
) -> Result<UncertaintyReport> {
    let quad = region_quadrature(
        region,
        q.scan_dir,
        q.n_lines,
        q.rule,
        q.line_order,
        q.line_panels,
    )?;
    let nn = quad.points.len();
    let mut psi = Vec::with_capacity(nn);
    let mut gx = Vec::with_capacity(nn);
    let mut gy = Vec::with_capacity(nn);
    let mut xm = Vec::with_capacity(nn);
    for &p in &quad.points {
        psi.push(field.value(p));
        let g = field.gradient(p);
        gx.push(g[0]);
        gy.push(g[1]);
        xm.push(m_dir.dot(p));
    }
    let sample = SampledState {
        weights: quad.weights.clone(),
        psi,
        grads: vec![gx, gy],
        xm,
    };
    uncertainty_core(
        &sample,
        region,
        &[("x".into(), Dir2::X), ("y".into(), Dir2::Y)],
        m_dir,
        mass,
        |p| field.value(p).norm_sqr(),
        q.n_boundary,
    )
}

/// Uncertainty report for a closed-form 1D state on an interval.
pub fn uncertainty_report_1d(
    field: &dyn ScalarField1,
    region: &Region,
    mass: f64,
    q: &FieldQuad,
) -> Result<UncertaintyReport> {
    let sec = region.line_section(Dir2::X, 0.0)?;
    let interval = &sec.intervals[0];
    let quad = Quad1::gauss(
        interval.x_minus,
        interval.x_plus,
        q.line_order,
        q.line_panels.max(64),
    );
    let nn = quad.nodes.len();
    let mut psi = Vec::with_capacity(nn);
    let mut g = Vec::with_capacity(nn);
    let mut xm = Vec::with_capacity(nn);
    for &x in &quad.nodes {
        psi.push(field.value(x));
        g.push(field.deriv(x));
        xm.push(x);
    }
    let sample = SampledState {
        weights: quad.weights.clone(),
        psi,
        grads: vec![g],
        xm,
    };
    uncertainty_core(
        &sample,
        region,
        &[("x".into(), Dir2::X)],
        Dir2::X,
        mass,
        |p| field.value(p.x).norm_sqr(),
        16,
    )
}

// ---------------------------------------------------------------------------
// grid-state observables and evolution runs
// ---------------------------------------------------------------------------

/// Per-step observable record of an evolution run.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesRow {
    pub t: f64,
    pub x_mean: f64,
    pub y_mean: f64,
    /// Re ⟨−i∂_c⟩ per axis.
    pub pr: [f64; 2],
    /// Im ⟨−i∂_c⟩ per axis (volume route).
    pub pi: [f64; 2],
    /// −½ ∮ (n·ê_c)|ψ|² dS per axis (boundary route).
    pub pi_boundary: [f64; 2],
    pub energy: f64,
    pub norm: f64,
    /// ∮ |n·j| dS
    pub flux: f64,
    /// Boundary force per axis.
    pub f_b: [f64; 2],
    /// ⟨∂_c V⟩ per axis (analytic gradient).
    pub grad_v: [f64; 2],
}

/// Recorded time series of an evolution run.
#[derive(Debug, Clone)]
pub struct RunSeries {
    pub dt: f64,
    pub mass: f64,
    pub rows: Vec<SeriesRow>,
}

/// Observables of a grid state needed per recorded step.
fn grid_row(
    t: f64,
    state: &WaveState,
    ham: &Hamiltonian,
    energy: f64,
    norm: f64,
) -> Result<SeriesRow> {
    let mass = ham.mass;
    match &state.data {
        StateData::Grid1 { a, h, e, .. } => {
            let n = e.len();
            let psi: Vec<Complex64> = e.iter().map(|v| v * 2.0_f64.sqrt()).collect();
            let dpsi = derivative_1d(&psi, *h);
            let w = |i: usize| if i == 0 || i == n - 1 { 0.5 * h } else { *h };
            let mut norm2 = 0.0;
            let mut xm = 0.0;
            let mut grad = Complex64::default();
            let mut gv = 0.0;
            for i in 0..n {
                let x = a + i as f64 * h;
                let rho = psi[i].norm_sqr();
                norm2 += w(i) * rho;
                xm += w(i) * x * rho;
                grad += w(i) * psi[i].conj() * (-I) * dpsi[i];
                gv += w(i) * rho * ham.potential.gradient(mass, Vec2::new(x, 0.0)).x;
            }
            let moment = psi[n - 1].norm_sqr() - psi[0].norm_sqr();
            let fb = boundary_force_grid(state, ham)?;
            Ok(SeriesRow {
                t,
                x_mean: xm / norm2,
                y_mean: 0.0,
                pr: [grad.re / norm2, 0.0],
                pi: [grad.im / norm2, 0.0],
                pi_boundary: [-0.5 * moment / norm2, 0.0],
                energy,
                norm,
                flux: boundary_flux(state, mass)?,
                f_b: [fb.x, fb.y],
                grad_v: [gv / norm2, 0.0],
            })
        }
        StateData::Grid2 {
            origin,
            h,
            nx,
            ny,
            e,
            ..
        } => {
            let s = 2.0_f64.sqrt();
            let w1 = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 * h } else { *h };
            let mut norm2 = 0.0;
            let mut xm = 0.0;
            let mut ym = 0.0;
            let mut grad = [Complex64::default(); 2];
            let mut gv = [0.0; 2];
            let mut col = vec![Complex64::default(); *nx];
            let mut dx = vec![Complex64::default(); nx * ny];
            for iy in 0..*ny {
                for ix in 0..*nx {
                    col[ix] = e[ix * ny + iy] * s;
                }
                let d = derivative_1d(&col, *h);
                for ix in 0..*nx {
                    dx[ix * ny + iy] = d[ix];
                }
            }
            let mut row_buf = vec![Complex64::default(); *ny];
            let mut dy = vec![Complex64::default(); nx * ny];
            for ix in 0..*nx {
                for iy in 0..*ny {
                    row_buf[iy] = e[ix * ny + iy] * s;
                }
                let d = derivative_1d(&row_buf, *h);
                for iy in 0..*ny {
                    dy[ix * ny + iy] = d[iy];
                }
            }
            for ix in 0..*nx {
                for iy in 0..*ny {
                    let idx = ix * ny + iy;
                    let p = *origin + Vec2::new(ix as f64 * h, iy as f64 * h);
                    let psi = e[idx] * s;
                    let rho = psi.norm_sqr();
                    let w = w1(ix, *nx) * w1(iy, *ny);
                    norm2 += w * rho;
                    xm += w * p.x * rho;
                    ym += w * p.y * rho;
                    grad[0] += w * psi.conj() * (-I) * dx[idx];
                    grad[1] += w * psi.conj() * (-I) * dy[idx];
                    let gvec = ham.potential.gradient(mass, p);
                    gv[0] += w * rho * gvec.x;
                    gv[1] += w * rho * gvec.y;
                }
            }
            let mut moment = [0.0; 2];
            for iy in 0..*ny {
                let w = w1(iy, *ny);
                let right = e[(nx - 1) * ny + iy].norm_sqr() * 2.0;
                let left = e[iy].norm_sqr() * 2.0;
                moment[0] += w * (right - left);
            }
            for ix in 0..*nx {
                let w = w1(ix, *nx);
                let top = e[ix * ny + ny - 1].norm_sqr() * 2.0;
                let bottom = e[ix * ny].norm_sqr() * 2.0;
                moment[1] += w * (top - bottom);
            }
            let fb = boundary_force_grid(state, ham)?;
            Ok(SeriesRow {
                t,
                x_mean: xm / norm2,
                y_mean: ym / norm2,
                pr: [grad[0].re / norm2, grad[1].re / norm2],
                pi: [grad[0].im / norm2, grad[1].im / norm2],
                pi_boundary: [-0.5 * moment[0] / norm2, -0.5 * moment[1] / norm2],
                energy,
                norm,
                flux: boundary_flux(state, mass)?,
                f_b: [fb.x, fb.y],
                grad_v: [gv[0] / norm2, gv[1] / norm2],
            })
        }
    }
}

/// Quantum boundary force (1/2m)∮[γ∇(ψψ*) + n(∇²(ψψ*) − ∇ψ*·∇ψ)] dS of a
/// physical grid state. On Dirichlet segments the γ-term carries its Robin
/// limit −2|∂_nψ|² n̂: the boundary density gradient vanishes there, so the
/// literal product γ·∇ρ is an ∞·0 form with that finite inward limit.
pub fn boundary_force_grid(state: &WaveState, ham: &Hamiltonian) -> Result<Vec2> {
    let mass = ham.mass;
    match &state.data {
        StateData::Grid1 { h, e, .. } => {
            let n = e.len();
            if n < 5 {
                return Err(Error::Resolution(
                    "boundary force needs at least 5 nodes inward".into(),
                ));
            }
            let psi: Vec<Complex64> = e.iter().map(|v| v * 2.0_f64.sqrt()).collect();
            let rho: Vec<f64> = psi.iter().map(|p| p.norm_sqr()).collect();
            let mut force = 0.0;
            for (end, bc) in [(false, ham.x.bc_minus), (true, ham.x.bc_plus)] {
                let idx = |j: usize| if end { n - 1 - j } else { j };
                let sgn = if end { -1.0 } else { 1.0 }; // inward-to-x conversion
                let dpsi_in = (-11.0 * psi[idx(0)] + 18.0 * psi[idx(1)] - 9.0 * psi[idx(2)]
                    + 2.0 * psi[idx(3)])
                    / (6.0 * h);
                let drho_in = (-11.0 * rho[idx(0)] + 18.0 * rho[idx(1)] - 9.0 * rho[idx(2)]
                    + 2.0 * rho[idx(3)])
                    / (6.0 * h);
                let d2rho = (35.0 * rho[idx(0)] - 104.0 * rho[idx(1)] + 114.0 * rho[idx(2)]
                    - 56.0 * rho[idx(3)]
                    + 11.0 * rho[idx(4)])
                    / (12.0 * h * h);
                let dpsi_x = dpsi_in * sgn;
                let drho_x = sgn * drho_in;
                let n_x = if end { 1.0 } else { -1.0 };
                let gamma_term = match bc.gamma() {
                    Some(g) => g.re * drho_x,
                    None => -2.0 * dpsi_x.norm_sqr() * n_x,
                };
                force += gamma_term + n_x * (d2rho - dpsi_x.norm_sqr());
            }
            Ok(Vec2::new(force / (2.0 * mass), 0.0))
        }
        StateData::Grid2 { h, nx, ny, e, .. } => {
            if *nx < 5 || *ny < 5 {
                return Err(Error::Resolution(
                    "boundary force needs at least 5 nodes inward".into(),
                ));
            }
            let yop = ham
                .y
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("2D state with 1D Hamiltonian".into()))?;
            let s = 2.0_f64.sqrt();
            let psi = |ix: usize, iy: usize| e[ix * ny + iy] * s;
            let rho = |ix: usize, iy: usize| psi(ix, iy).norm_sqr();
            let mut force = Vec2::ZERO;
            let trap = |i: usize, n: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };

            struct Side {
                normal: Vec2,
                bc: RobinBc,
                vertical: bool, // side runs along y (left/right walls)
                at_end: bool,   // wall at the max index of the normal axis
            }
            let sides = [
                Side {
                    normal: Vec2::new(-1.0, 0.0),
                    bc: ham.x.bc_minus,
                    vertical: true,
                    at_end: false,
                },
                Side {
                    normal: Vec2::new(1.0, 0.0),
                    bc: ham.x.bc_plus,
                    vertical: true,
                    at_end: true,
                },
                Side {
                    normal: Vec2::new(0.0, -1.0),
                    bc: yop.bc_minus,
                    vertical: false,
                    at_end: false,
                },
                Side {
                    normal: Vec2::new(0.0, 1.0),
                    bc: yop.bc_plus,
                    vertical: false,
                    at_end: true,
                },
            ];

            for side in &sides {
                let (n_along, n_in) = if side.vertical {
                    (*ny, *nx)
                } else {
                    (*nx, *ny)
                };
                let at = |j: usize, depth: usize| -> (Complex64, f64) {
                    let d = if side.at_end { n_in - 1 - depth } else { depth };
                    let (ix, iy) = if side.vertical { (d, j) } else { (j, d) };
                    (psi(ix, iy), rho(ix, iy))
                };
                let inward_sign = if side.at_end { -1.0 } else { 1.0 };
                let axis = if side.vertical {
                    Vec2::new(1.0, 0.0)
                } else {
                    Vec2::new(0.0, 1.0)
                };
                let t_axis = if side.vertical {
                    Vec2::new(0.0, 1.0)
                } else {
                    Vec2::new(1.0, 0.0)
                };
                for j in 0..n_along {
                    let w = trap(j, n_along) * h;
                    let (p0, r0) = at(j, 0);
                    let (p1, r1) = at(j, 1);
                    let (p2, r2) = at(j, 2);
                    let (p3, r3) = at(j, 3);
                    let (_, r4) = at(j, 4);
                    // derivatives along the fixed coordinate axis of the normal
                    let dpsi_ax =
                        (-11.0 * p0 + 18.0 * p1 - 9.0 * p2 + 2.0 * p3) * (inward_sign / (6.0 * h));
                    let drho_ax =
                        inward_sign * (-11.0 * r0 + 18.0 * r1 - 9.0 * r2 + 2.0 * r3) / (6.0 * h);
                    let d2rho_n = (35.0 * r0 - 104.0 * r1 + 114.0 * r2 - 56.0 * r3 + 11.0 * r4)
                        / (12.0 * h * h);
                    // tangential derivatives along the side
                    let (dpsi_t, drho_t, d2rho_t) = if j == 0 {
                        let (pa, ra) = at(0, 0);
                        let (pb, rb) = at(1, 0);
                        let (pc, rc) = at(2, 0);
                        let (_, rd) = at(3, 0);
                        (
                            (-3.0 * pa + 4.0 * pb - pc) / (2.0 * h),
                            (-3.0 * ra + 4.0 * rb - rc) / (2.0 * h),
                            (2.0 * ra - 5.0 * rb + 4.0 * rc - rd) / (h * h),
                        )
                    } else if j == n_along - 1 {
                        let (pa, ra) = at(n_along - 1, 0);
                        let (pb, rb) = at(n_along - 2, 0);
                        let (pc, rc) = at(n_along - 3, 0);
                        let (_, rd) = at(n_along - 4, 0);
                        (
                            (3.0 * pa - 4.0 * pb + pc) / (2.0 * h),
                            (3.0 * ra - 4.0 * rb + rc) / (2.0 * h),
                            (2.0 * ra - 5.0 * rb + 4.0 * rc - rd) / (h * h),
                        )
                    } else {
                        let (pm, rm) = at(j - 1, 0);
                        let (pp, rp) = at(j + 1, 0);
                        (
                            (pp - pm) / (2.0 * h),
                            (rp - rm) / (2.0 * h),
                            (rp - 2.0 * r0 + rm) / (h * h),
                        )
                    };
                    let grad_sq = dpsi_ax.norm_sqr() + dpsi_t.norm_sqr();
                    let lap_rho = d2rho_n + d2rho_t;
                    let gamma_vec = match side.bc.gamma() {
                        Some(g) => (axis * drho_ax + t_axis * drho_t) * g.re,
                        None => side.normal * (-2.0 * dpsi_ax.norm_sqr()),
                    };
                    let n_vec = side.normal * (lap_rho - grad_sq);
                    force = force + (gamma_vec + n_vec) * w;
                }
            }
            Ok(force * (1.0 / (2.0 * mass)))
        }
    }
}

/// Runs a 1D Crank–Nicolson evolution for `steps` steps, recording one row
/// per step (plus the initial state).
pub fn run_1d(ev: &mut Evolver1, steps: usize) -> Result<RunSeries> {
    let mut rows = Vec::with_capacity(steps + 1);
    let ham = ev.op.clone();
    rows.push(grid_row(
        0.0,
        &ev.state(),
        &ham,
        ev.energy(),
        ev.norm_sqr(),
    )?);
    for s in 1..=steps {
        ev.step()?;
        rows.push(grid_row(
            s as f64 * ev.dt,
            &ev.state(),
            &ham,
            ev.energy(),
            ev.norm_sqr(),
        )?);
    }
    Ok(RunSeries {
        dt: ev.dt,
        mass: ham.mass,
        rows,
    })
}

/// Runs a 2D evolution, recording every `record_every`-th step.
pub fn run_2d(ev: &mut Evolver2, steps: usize, record_every: usize) -> Result<RunSeries> {
    let every = record_every.max(1);
    let mut rows = Vec::new();
    let ham = ev.op.clone();
    rows.push(grid_row(
        0.0,
        &ev.state(),
        &ham,
        ev.energy(),
        ev.norm_sqr(),
    )?);
    for s in 1..=steps {
        ev.step();
        if s % every == 0 {
            rows.push(grid_row(
                s as f64 * ev.dt,
                &ev.state(),
                &ham,
                ev.energy(),
                ev.norm_sqr(),
            )?);
        }
    }
    Ok(RunSeries {
        dt: ev.dt * every as f64,
        mass: ham.mass,
        rows,
    })
}

/// |m·d⟨x⟩/dt − ⟨p_R⟩| per interior sample time (centered differences).
pub fn ehrenfest_position_residual(run: &RunSeries, axis: usize) -> Result<Vec<(f64, f64)>> {
    if run.rows.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least 3 recorded steps for a centered derivative".into(),
        ));
    }
    let mut out = Vec::new();
    for i in 1..run.rows.len() - 1 {
        let xdot = (pick(&run.rows[i + 1], axis) - pick(&run.rows[i - 1], axis)) / (2.0 * run.dt);
        let res = (run.mass * xdot - run.rows[i].pr[axis]).abs();
        out.push((run.rows[i].t, res));
    }
    Ok(out)
}

fn pick(row: &SeriesRow, axis: usize) -> f64 {
    if axis == 0 {
        row.x_mean
    } else {
        row.y_mean
    }
}

/// |d⟨p_R⟩/dt + ⟨∂V⟩ − F_B| per interior sample time; `include_force`
/// toggles the boundary term (its ablation breaks the balance during wall
/// contact).
pub fn ehrenfest_momentum_residual(
    run: &RunSeries,
    axis: usize,
    include_force: bool,
) -> Result<Vec<(f64, f64)>> {
    if run.rows.len() < 3 {
        return Err(Error::InvalidArgument(
            "need at least 3 recorded steps for a centered derivative".into(),
        ));
    }
    let mut out = Vec::new();
    for i in 1..run.rows.len() - 1 {
        let pdot = (run.rows[i + 1].pr[axis] - run.rows[i - 1].pr[axis]) / (2.0 * run.dt);
        let fb = if include_force {
            run.rows[i].f_b[axis]
        } else {
            0.0
        };
        let res = (pdot + run.rows[i].grad_v[axis] - fb).abs();
        out.push((run.rows[i].t, res));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{build_hamiltonian, BcSet, Potential};
    use crate::state::{GaussianPacket, GaussianPacket1};
    use std::f64::consts::PI;

    fn rect_2x1() -> Region {
        Region::rectangle(Vec2::ZERO, 2.0, 1.0).unwrap()
    }

    #[test]
    fn gradient_of_real_state_is_boundary_term_only() {
        // real ψ: Re⟨−i∇⟩ = 0; Im = −½∮(n·k̂)|ψ|² / norm
        struct RealBump;
        impl ScalarField2 for RealBump {
            fn value(&self, p: Vec2) -> Complex64 {
                Complex64::new((-((p.x - 0.7) * (p.x - 0.7) + p.y * p.y) / 0.1).exp(), 0.0)
            }
            fn gradient(&self, p: Vec2) -> [Complex64; 2] {
                let v = self.value(p);
                [v * (-2.0 * (p.x - 0.7) / 0.1), v * (-2.0 * p.y / 0.1)]
            }
        }
        let region = rect_2x1();
        let q = FieldQuad::default();
        let quad =
            region_quadrature(&region, Dir2::X, 64, TransverseRule::GaussPanels, 8, 16).unwrap();
        let norm = quad.integrate(|p| RealBump.value(p).norm_sqr());
        for dir in [Dir2::X, Dir2::Y] {
            let g = expect_gradient_field(&RealBump, &region, dir, &q).unwrap();
            assert!(g.re.abs() < 1e-12);
            let pi = expect_pi_field(&RealBump, &region, dir, q.n_boundary).unwrap();
            assert!(
                (g.im - pi / norm).abs() < 1e-8,
                "volume {} vs boundary {}",
                g.im,
                pi / norm
            );
        }
    }

    #[test]
    fn gradient_decomposition_1d_offset_gaussian() {
        // packet leaning on the right wall: Im⟨−i∂⟩ = −½(ρ(1) − ρ(0)) / norm
        let field = GaussianPacket1 {
            center: 0.75,
            width: 0.18,
            momentum: 3.0,
        };
        let region = Region::interval(0.0, 1.0).unwrap();
        let g = expect_gradient_field_1d(&field, &region, &FieldQuad::default()).unwrap();
        let quad = Quad1::gauss(0.0, 1.0, 8, 64);
        let norm = quad.integrate(|x| field.value(x).norm_sqr());
        let expect = -0.5 * (field.value(1.0).norm_sqr() - field.value(0.0).norm_sqr()) / norm;
        assert!((g.im - expect).abs() < 1e-8, "{} vs {}", g.im, expect);
    }

    #[test]
    fn spectral_pr_matches_gradient_on_rectangle() {
        let field = GaussianPacket {
            center: Vec2::new(0.9, 0.55),
            width: 0.11,
            momentum: Vec2::new(2.0, -1.0),
        };
        let region = rect_2x1();
        let q = FieldQuad::default();
        for dir in [Dir2::X, Dir2::Y] {
            let grad = expect_gradient_field(&field, &region, dir, &q).unwrap();
            let spectral = expect_pr_spectral_field(&field, &region, dir, 64, &q).unwrap();
            assert!(
                (grad.re - spectral.value).abs() < 1e-5,
                "dir {:?}: gradient {} vs spectral {}",
                dir,
                grad.re,
                spectral.value
            );
        }
    }

    #[test]
    fn spectral_pr_is_lambda_invariant() {
        use crate::geometry::ScalarBoundaryField;
        let field = GaussianPacket {
            center: Vec2::new(1.1, 0.4),
            width: 0.15,
            momentum: Vec2::new(3.0, 0.0),
        };
        let plain = rect_2x1();
        let decorated = rect_2x1().with_lambda(Dir2::X, ScalarBoundaryField::Constant(0.8));
        let q = FieldQuad::default();
        let a = expect_pr_spectral_field(&field, &plain, Dir2::X, 48, &q).unwrap();
        let b = expect_pr_spectral_field(&field, &decorated, Dir2::X, 48, &q).unwrap();
        assert!(
            (a.value - b.value).abs() < 1e-6,
            "{} vs {}",
            a.value,
            b.value
        );
    }

    #[test]
    fn spectral_pr_1d_single_mode_is_eigenvalue() {
        // a momentum eigenmode fed through the spectral sum returns its k
        let interval = SectionInterval {
            x_minus: 0.0,
            x_plus: 1.0,
            lambda_minus: Complex64::new(0.0, 0.6),
            lambda_plus: Complex64::new(0.0, -0.2),
        };
        let mode = build_mode(&interval, 0.0, 2).unwrap();
        let (sum, _) = line_pr_sum(&interval, &mode, 12).unwrap();
        assert!((sum - mode.k).abs() < 1e-10, "{} vs {}", sum, mode.k);
    }

    #[test]
    fn correlator_routes_agree_and_factorize() {
        let field = GaussianPacket {
            center: Vec2::new(0.8, 0.45),
            width: 0.12,
            momentum: Vec2::new(2.0, 1.0),
        };
        let region = rect_2x1();
        let q = FieldQuad::default();
        // l̂ ⊥ m̂ on a product state: ⟨(x̂·p_R)(ŷ·x)⟩ = ⟨p_R,x⟩⟨y⟩
        let rep = pr_position_correlator(&field, &region, Dir2::X, Dir2::Y, 64, &q).unwrap();
        assert!(rep.difference < 1e-5);
        let grad = expect_gradient_field(&field, &region, Dir2::X, &q).unwrap();
        let quad =
            region_quadrature(&region, Dir2::X, 64, TransverseRule::GaussPanels, 8, 16).unwrap();
        let norm = quad.integrate(|p| field.value(p).norm_sqr());
        let y_mean = quad.integrate(|p| p.y * field.value(p).norm_sqr()) / norm;
        let expect = grad.re * y_mean;
        assert!(
            (rep.spectral_re - expect).abs() < 1e-6,
            "{} vs {}",
            rep.spectral_re,
            expect
        );
        // Im of the correlator is −(l̂·m̂)/2 identically
        assert!((rep.spectral_im - 0.0).abs() < 1e-6);
        let rep_xx = pr_position_correlator(&field, &region, Dir2::X, Dir2::X, 64, &q).unwrap();
        assert!((rep_xx.spectral_im + 0.5).abs() < 1e-5);
    }

    #[test]
    fn correlator_real_state_has_zero_anticommutator_part() {
        struct RealBump;
        impl ScalarField2 for RealBump {
            fn value(&self, p: Vec2) -> Complex64 {
                Complex64::new(
                    (-((p.x - 1.0) * (p.x - 1.0) / 0.06 + (p.y - 0.5) * (p.y - 0.5) / 0.04)).exp(),
                    0.0,
                )
            }
            fn gradient(&self, p: Vec2) -> [Complex64; 2] {
                let v = self.value(p);
                [
                    v * (-2.0 * (p.x - 1.0) / 0.06),
                    v * (-2.0 * (p.y - 0.5) / 0.04),
                ]
            }
        }
        let rep = pr_position_correlator(
            &RealBump,
            &rect_2x1(),
            Dir2::X,
            Dir2::X,
            48,
            &FieldQuad::default(),
        )
        .unwrap();
        assert!(rep.spectral_re.abs() < 1e-8, "Re {}", rep.spectral_re);
    }

    #[test]
    fn uncertainty_dirichlet_ground_state_1d() {
        struct Ground;
        impl ScalarField1 for Ground {
            fn value(&self, x: f64) -> Complex64 {
                Complex64::new(2.0_f64.sqrt() * (PI * x).sin(), 0.0)
            }
            fn deriv(&self, x: f64) -> Complex64 {
                Complex64::new(2.0_f64.sqrt() * PI * (PI * x).cos(), 0.0)
            }
        }
        let region = Region::interval(0.0, 1.0)
            .unwrap()
            .with_dirichlet_segments([1, 2]);
        let rep = uncertainty_report_1d(&Ground, &region, 1.0, &FieldQuad::default()).unwrap();
        // boundary density vanishes: lhs = ∫|ψ'|² = π², finite positive slack
        assert!((rep.lhs - PI * PI).abs() < 1e-8);
        assert!(rep.gamma_boundary.abs() < 1e-12);
        assert!(rep.slack > 0.0);
        assert!(rep.pass);
    }

    #[test]
    fn uncertainty_random_states_hold() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let region = rect_2x1().with_gamma(crate::geometry::ScalarBoundaryField::Constant(0.8));
        for _ in 0..6 {
            let field = GaussianPacket {
                center: Vec2::new(rng.gen_range(0.5..1.5), rng.gen_range(0.3..0.7)),
                width: rng.gen_range(0.1..0.2),
                momentum: Vec2::new(rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)),
            };
            let rep = uncertainty_report_2d(&field, &region, Dir2::X, 1.0, &FieldQuad::default())
                .unwrap();
            assert!(rep.slack >= -UNCERTAINTY_EPS, "slack {}", rep.slack);
            assert!(rep.pass);
            for v in rep
                .pr
                .iter()
                .chain(&rep.pi)
                .chain(&rep.anticommutator)
                .chain(&rep.geo_bracket)
            {
                assert!(v.is_finite());
            }
            // volume and boundary routes agree
            for r in &rep.geo_bracket_residual {
                assert!(*r < 1e-6, "geo residual {r}");
            }
            for (a, b) in rep.pi.iter().zip(&rep.pi_boundary) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn uncertainty_symmetric_real_state_geo_bracket_is_km() {
        // interior-supported symmetric real state: boundary moments vanish
        // and the geometric bracket reduces to k̂·m̂
        struct Bump;
        impl ScalarField2 for Bump {
            fn value(&self, p: Vec2) -> Complex64 {
                let d = p - Vec2::new(1.0, 0.5);
                Complex64::new((-d.dot(d) / 0.01).exp(), 0.0)
            }
            fn gradient(&self, p: Vec2) -> [Complex64; 2] {
                let d = p - Vec2::new(1.0, 0.5);
                let v = self.value(p);
                [v * (-2.0 * d.x / 0.01), v * (-2.0 * d.y / 0.01)]
            }
        }
        let rep =
            uncertainty_report_2d(&Bump, &rect_2x1(), Dir2::X, 1.0, &FieldQuad::default()).unwrap();
        assert!((rep.geo_bracket[0] - 1.0).abs() < 1e-8); // x̂·x̂
        assert!((rep.geo_bracket[1] - 0.0).abs() < 1e-8); // ŷ·x̂
        assert!(rep.pass);
    }

    #[test]
    fn degenerate_position_spread_rejected() {
        // a state confined to a sub-1e-12-wide interval has Δx below the
        // degeneracy floor
        struct Flat;
        impl ScalarField1 for Flat {
            fn value(&self, _: f64) -> Complex64 {
                Complex64::new(1.0, 0.0)
            }
            fn deriv(&self, _: f64) -> Complex64 {
                Complex64::default()
            }
        }
        let region = Region::interval(0.5 - 1e-13, 0.5 + 1e-13).unwrap();
        assert!(matches!(
            uncertainty_report_1d(&Flat, &region, 1.0, &FieldQuad::default()),
            Err(Error::Numerical(_))
        ));
    }

    #[test]
    fn stationary_state_has_tiny_residuals() {
        // Dirichlet eigenstate: both Ehrenfest sides vanish
        let region = Region::interval(0.0, 1.0).unwrap();
        let op = build_hamiltonian(&region, (201, 1), 1.0, Potential::Zero, &BcSet::dirichlet())
            .unwrap();
        let mut ev = Evolver1::new(op, 1e-3, |x| Complex64::new((PI * x).sin(), 0.0)).unwrap();
        let run = run_1d(&mut ev, 40).unwrap();
        for (_, r) in ehrenfest_position_residual(&run, 0).unwrap() {
            assert!(r < 1e-8, "residual {r}");
        }
        for (_, r) in ehrenfest_momentum_residual(&run, 0, true).unwrap() {
            assert!(r < 1e-6, "residual {r}");
        }
        for row in &run.rows {
            assert!(row.f_b[0].abs() < 1e-6);
        }
    }

    #[test]
    fn too_short_series_rejected() {
        let run = RunSeries {
            dt: 1e-3,
            mass: 1.0,
            rows: vec![],
        };
        assert!(ehrenfest_position_residual(&run, 0).is_err());
    }

    #[test]
    fn robin_ground_state_net_force_zero() {
        // symmetric Robin well: ground state force cancels by parity
        let region = Region::interval(0.0, 1.0).unwrap();
        let op = build_hamiltonian(
            &region,
            (401, 1),
            1.0,
            Potential::Zero,
            &BcSet::uniform(RobinBc::robin(1.0)),
        )
        .unwrap();
        let eig = op.x.eigen().unwrap();
        let n = op.x.n_active;
        let v0: Vec<f64> = (0..n).map(|i| eig.q[i * n]).collect();
        let scale = op.x.scale.clone();
        let h = op.x.h;
        let mut ev = Evolver1::new(op, 1e-3, |x| {
            let j = (x / h).round() as usize;
            Complex64::new(v0[j] / scale[j], 0.0)
        })
        .unwrap();
        let run = run_1d(&mut ev, 4).unwrap();
        for row in &run.rows {
            assert!(row.f_b[0].abs() < 1e-5, "net force {}", row.f_b[0]);
        }
    }

    #[test]
    fn free_packet_momentum_residual_small_without_walls() {
        let region = Region::interval(0.0, 1.0).unwrap();
        let op = build_hamiltonian(&region, (257, 1), 4.0, Potential::Zero, &BcSet::dirichlet())
            .unwrap();
        let mut ev = Evolver1::new(op, 1e-4, |x| {
            (Complex64::new(-(x - 0.45) * (x - 0.45) / (4.0 * 0.0025), 0.0) + I * 6.0 * x).exp()
        })
        .unwrap();
        let run = run_1d(&mut ev, 150).unwrap();
        for (_, r) in ehrenfest_momentum_residual(&run, 0, true).unwrap() {
            assert!(r < 1e-4, "residual {r}");
        }
        for (_, r) in ehrenfest_position_residual(&run, 0).unwrap() {
            assert!(r < 1e-4, "residual {r}");
        }
    }

    #[test]
    fn harmonic_packet_obeys_classical_force() {
        // d⟨p⟩/dt ≈ −mω²(⟨x⟩−x₀) away from walls
        let region = Region::interval(0.0, 2.0).unwrap();
        let omega = 60.0;
        let op = build_hamiltonian(
            &region,
            (2049, 1),
            1.0,
            Potential::Harmonic {
                omega,
                center: [1.0, 0.0],
            },
            &BcSet::dirichlet(),
        )
        .unwrap();
        // coherent width σ² = 1/(2mω): the packet swings without breathing
        let w2 = 1.0 / (2.0 * omega);
        let mut ev = Evolver1::new(op, 1e-4, |x| {
            Complex64::new((-(x - 1.3) * (x - 1.3) / (4.0 * w2)).exp(), 0.0)
        })
        .unwrap();
        let run = run_1d(&mut ev, 300).unwrap();
        for i in 1..run.rows.len() - 1 {
            let pdot = (run.rows[i + 1].pr[0] - run.rows[i - 1].pr[0]) / (2.0 * run.dt);
            let expect = -omega * omega * (run.rows[i].x_mean - 1.0);
            assert!(
                (pdot - expect).abs() < 1e-3 * expect.abs().max(1.0),
                "{pdot} vs {expect}"
            );
        }
    }

    #[test]
    fn bounce_momentum_balance_1d() {
        // packet reflecting off the right Dirichlet wall: ∫F_B dt = Δ⟨p_R⟩ ≈ −2p₀
        let region = Region::interval(0.0, 1.0).unwrap();
        let m = 10.0;
        let k0 = 40.0;
        let op =
            build_hamiltonian(&region, (513, 1), m, Potential::Zero, &BcSet::dirichlet()).unwrap();
        let mut ev = Evolver1::new(op, 2.5e-4, |x| {
            (Complex64::new(-(x - 0.45) * (x - 0.45) / (4.0 * 0.0081), 0.0) + I * k0 * x).exp()
        })
        .unwrap();
        let steps = 1100;
        let run = run_1d(&mut ev, steps).unwrap();
        let p_first = run.rows[1].pr[0];
        let p_last = run.rows[run.rows.len() - 2].pr[0];
        let mut impulse = 0.0;
        for i in 0..run.rows.len() {
            let w = if i == 0 || i == run.rows.len() - 1 {
                0.5
            } else {
                1.0
            };
            impulse += w * run.dt * run.rows[i].f_b[0];
        }
        let dp = p_last - p_first;
        assert!(
            (impulse - dp).abs() < 0.02 * dp.abs(),
            "impulse {impulse} vs Δp {dp}"
        );
        assert!(
            (dp + 2.0 * p_first).abs() < 0.02 * (2.0 * p_first).abs(),
            "Δp {dp} vs −2p₀ {}",
            -2.0 * p_first
        );
        // ablation: dropping F_B breaks the balance during the bounce
        let with_f = ehrenfest_momentum_residual(&run, 0, true).unwrap();
        let without_f = ehrenfest_momentum_residual(&run, 0, false).unwrap();
        let max_with = with_f.iter().map(|(_, r)| *r).fold(0.0, f64::max);
        let max_without = without_f.iter().map(|(_, r)| *r).fold(0.0, f64::max);
        assert!(
            max_without > 100.0 * max_with,
            "ablation ratio {}",
            max_without / max_with
        );
    }
}
