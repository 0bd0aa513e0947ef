//! Simultaneous measurability of momentum components in different
//! directions.
//!
//! Two momentum components can only share eigenfunctions when every boundary
//! piece is parallel to one of the two directions and the λ fields are
//! constant per piece, i.e. on an axis-aligned rectangle. Everywhere else at
//! least one boundary point carries conditions for both components at once,
//! and the joint conditions admit only the zero vector. The diagnostics here
//! make that quantitative: joint eigenmode candidates are built on the
//! rectangle ladders and their boundary-condition violations are measured on
//! the actual region.
//!
//! Two doublings are implemented. `Tensor` doubles per direction
//! (ℂ²⊗ℂ², four components), which realizes exact separability on the
//! rectangle. `Literal` keeps a single ℂ² doubling with the two-term plane
//! wave combination; its transverse phase factors do not drop out of the
//! side conditions, so its residual is reported alongside.

use crate::error::{Error, Result};
use crate::geometry::{
    boundary_quadrature, BoundaryNode, Dir2, Region, RegionKind, ScalarBoundaryField,
    SectionInterval, SegmentGeom, Vec2, TANGENCY_TOL,
};
use crate::modes::{build_mode, MomentumMode};
use crate::numerics::I;
use num_complex::Complex64;
use serde::Serialize;

/// Doubling convention used for a joint-mode candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DoublingVariant {
    LiteralC2,
    TensorC4,
}

/// A candidate simultaneous eigenfunction of the momentum components along
/// x̂ and ŷ with eigenvalue pair μ.
#[derive(Debug, Clone)]
pub enum JointMode {
    /// Product of two 1D modes; four components φ_{sx}(x)·χ_{sy}(y).
    Tensor { x: MomentumMode, y: MomentumMode },
    /// Two-term combination A e^{iμ·r} ± B e^{−iμ·r} in a single ℂ² doubling.
    Literal {
        mu: [f64; 2],
        a: Complex64,
        b: Complex64,
    },
}

impl JointMode {
    pub fn variant(&self) -> DoublingVariant {
        match self {
            JointMode::Tensor { .. } => DoublingVariant::TensorC4,
            JointMode::Literal { .. } => DoublingVariant::LiteralC2,
        }
    }

    pub fn mu(&self) -> [f64; 2] {
        match self {
            JointMode::Tensor { x, y } => [x.k, y.k],
            JointMode::Literal { mu, .. } => *mu,
        }
    }

    /// Violation of the boundary condition for the axis direction at a
    /// point, given the λ value that applies there.
    pub fn bc_violation(&self, dir_axis: usize, p: Vec2, lambda: Complex64) -> f64 {
        match self {
            JointMode::Tensor { x, y } => {
                let (active, passive_sq) = if dir_axis == 0 {
                    (
                        (x.eval_o(p.x) - lambda * x.eval_e(p.x)).norm(),
                        y.eval_e(p.y).norm_sqr() + y.eval_o(p.y).norm_sqr(),
                    )
                } else {
                    (
                        (y.eval_o(p.y) - lambda * y.eval_e(p.y)).norm(),
                        x.eval_e(p.x).norm_sqr() + x.eval_o(p.x).norm_sqr(),
                    )
                };
                active * passive_sq.sqrt()
            }
            JointMode::Literal { mu, a, b } => {
                let phase = mu[0] * p.x + mu[1] * p.y;
                let plus = a * (I * phase).exp();
                let minus = b * (-I * phase).exp();
                let e = plus + minus;
                let o = plus - minus;
                (o - lambda * e).norm()
            }
        }
    }

    /// Euclidean norm of all components at a point.
    pub fn amplitude(&self, p: Vec2) -> f64 {
        match self {
            JointMode::Tensor { x, y } => ((x.eval_e(p.x).norm_sqr() + x.eval_o(p.x).norm_sqr())
                * (y.eval_e(p.y).norm_sqr() + y.eval_o(p.y).norm_sqr()))
            .sqrt(),
            JointMode::Literal { mu, a, b } => {
                let phase = mu[0] * p.x + mu[1] * p.y;
                let plus = a * (I * phase).exp();
                let minus = b * (-I * phase).exp();
                ((plus + minus).norm_sqr() + (plus - minus).norm_sqr()).sqrt()
            }
        }
    }
}

/// λ values on the four rectangle sides (1 = bottom, 2 = right, 3 = top,
/// 4 = left), given as the real α in λ = iα.
#[derive(Debug, Clone, Copy)]
pub struct SideLambdas {
    pub bottom: f64,
    pub right: f64,
    pub top: f64,
    pub left: f64,
}

impl SideLambdas {
    pub fn x_interval(&self, origin: Vec2, lx: f64) -> SectionInterval {
        SectionInterval {
            x_minus: origin.x,
            x_plus: origin.x + lx,
            lambda_minus: Complex64::new(0.0, self.left),
            lambda_plus: Complex64::new(0.0, self.right),
        }
    }

    pub fn y_interval(&self, origin: Vec2, ly: f64) -> SectionInterval {
        SectionInterval {
            x_minus: origin.y,
            x_plus: origin.y + ly,
            lambda_minus: Complex64::new(0.0, self.bottom),
            lambda_plus: Complex64::new(0.0, self.top),
        }
    }
}

/// Joint modes on a rectangle: μ_x from the (λ₄, λ₂) ladder over Lx, μ_y
/// from (λ₁, λ₃) over Ly. The `Tensor` variant satisfies all four boundary
/// conditions identically; the `Literal` variant anchors B/A at the origin
/// corner and leaves transverse phases in the side conditions.
pub fn joint_modes_rectangle(
    region: &Region,
    lambdas: SideLambdas,
    n_x: impl IntoIterator<Item = i64> + Clone,
    n_y: impl IntoIterator<Item = i64> + Clone,
    variant: DoublingVariant,
) -> Result<Vec<JointMode>> {
    let (origin, lx, ly) = match region.kind() {
        RegionKind::Rectangle { origin, lx, ly } => (*origin, *lx, *ly),
        RegionKind::RoundedRectangle { origin, lx, ly, .. } => (*origin, *lx, *ly),
        _ => {
            return Err(Error::InvalidArgument(
                "joint modes are built on rectangle ladders".into(),
            ))
        }
    };
    let ivx = lambdas.x_interval(origin, lx);
    let ivy = lambdas.y_interval(origin, ly);
    let mut out = Vec::new();
    for nx in n_x.clone() {
        for ny in n_y.clone() {
            let mx = build_mode(&ivx, 0.0, nx)?;
            let my = build_mode(&ivy, 0.0, ny)?;
            match variant {
                DoublingVariant::TensorC4 => out.push(JointMode::Tensor { x: mx, y: my }),
                DoublingVariant::LiteralC2 => {
                    // B/A from the left-side condition at the anchor corner
                    let lam4 = Complex64::new(0.0, lambdas.left);
                    let a = Complex64::new(1.0, 0.0);
                    let b = (1.0 - lam4) / (1.0 + lam4)
                        * (2.0 * I * (mx.k * origin.x + my.k * origin.y)).exp();
                    out.push(JointMode::Literal {
                        mu: [mx.k, my.k],
                        a,
                        b,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Residual statistics of a joint candidate against the boundary conditions
/// of both directions on a region.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualStats {
    /// Max over ∂Ω of the joint violation, normalized by the boundary
    /// amplitude of the mode.
    pub max: f64,
    /// Amplitude-normalized RMS over ∂Ω.
    pub rms: f64,
    /// For regions with corner arcs: max over arcs of (max violation on the
    /// arc)/(arc length), amplitude-normalized. The pointwise violation on a
    /// short arc scales with the arc length, so this density is the
    /// radius-independent measure of the obstruction.
    pub corner_density: Option<f64>,
    pub boundary_nodes: usize,
}

/// Evaluates |Ψ_o − λΨ_e| for both directions at every boundary node where
/// the respective condition applies (n·k̂ ≠ 0), and aggregates.
pub fn joint_bc_residual(
    region: &Region,
    mode: &JointMode,
    lambda_x: &ScalarBoundaryField,
    lambda_y: &ScalarBoundaryField,
    n_boundary: usize,
) -> Result<ResidualStats> {
    let nodes = boundary_quadrature(region, n_boundary)?;
    let mut amp: f64 = 0.0;
    for node in &nodes {
        amp = amp.max(mode.amplitude(node.point));
    }
    if amp == 0.0 {
        return Err(Error::Domain("mode vanishes on the boundary".into()));
    }
    let violation = |node: &BoundaryNode| -> f64 {
        let mut v: f64 = 0.0;
        if Dir2::X.dot(node.normal).abs() >= TANGENCY_TOL {
            let lam = Complex64::new(0.0, lambda_x.eval(node.segment_id, node.s));
            v = v.max(mode.bc_violation(0, node.point, lam));
        }
        if Dir2::Y.dot(node.normal).abs() >= TANGENCY_TOL {
            let lam = Complex64::new(0.0, lambda_y.eval(node.segment_id, node.s));
            v = v.max(mode.bc_violation(1, node.point, lam));
        }
        v
    };

    let mut max: f64 = 0.0;
    let mut sq = 0.0;
    let mut len = 0.0;
    for node in &nodes {
        let v = violation(node);
        max = max.max(v);
        sq += node.weight * v * v;
        len += node.weight;
    }

    // per-arc violation density
    let mut corner_density: Option<f64> = None;
    for seg in region.segments() {
        if let SegmentGeom::Arc { .. } = seg.geom {
            let seg_len = seg.length();
            let mut seg_max: f64 = 0.0;
            for node in nodes.iter().filter(|n| n.segment_id == seg.id) {
                seg_max = seg_max.max(violation(node));
            }
            let density = seg_max / (seg_len * amp);
            corner_density = Some(corner_density.map_or(density, |d: f64| d.max(density)));
        }
    }

    Ok(ResidualStats {
        max: max / amp,
        rms: (sq / len).sqrt() / amp,
        corner_density,
        boundary_nodes: nodes.len(),
    })
}

/// Max and RMS of one direction's violation on a single boundary segment.
pub fn residual_on_segment(
    region: &Region,
    mode: &JointMode,
    dir_axis: usize,
    lambda: &ScalarBoundaryField,
    segment_id: usize,
    n_boundary: usize,
) -> Result<(f64, f64)> {
    let nodes = boundary_quadrature(region, n_boundary)?;
    let mut amp: f64 = 0.0;
    for node in &nodes {
        amp = amp.max(mode.amplitude(node.point));
    }
    let mut max: f64 = 0.0;
    let mut sq = 0.0;
    let mut len = 0.0;
    for node in nodes.iter().filter(|n| n.segment_id == segment_id) {
        let lam = Complex64::new(0.0, lambda.eval(node.segment_id, node.s));
        let v = mode.bc_violation(dir_axis, node.point, lam);
        max = max.max(v);
        sq += node.weight * v * v;
        len += node.weight;
    }
    Ok((max / amp, (sq / len).sqrt() / amp))
}

/// Verdict of the simultaneous-measurability classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    SeparableParallelepiped,
    IncompatibleBc,
    TrivialDomain,
}

/// Classification record with residual evidence.
#[derive(Debug, Clone, Serialize)]
pub struct CommutabilityVerdict {
    pub region: String,
    pub directions: [String; 2],
    pub verdict: Verdict,
    pub reason: String,
    pub variant: DoublingVariant,
    /// Residual statistics of a probe family of tensor modes (absent for
    /// trivial domains and regions without rectangle ladders).
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    pub corner_density: Option<f64>,
}

/// Decides whether the momenta along `l_dir` and `m_dir` can be
/// simultaneously diagonalized on the region: every boundary segment must be
/// parallel to one of the two directions with a constant λ per segment.
/// Generic and rounded regions are classified incompatible, with residual
/// evidence from probe tensor modes attached.
pub fn classify_region(region: &Region, l_dir: Dir2, m_dir: Dir2) -> Result<CommutabilityVerdict> {
    let dir_names = [
        format!("[{},{}]", l_dir.vec().x, l_dir.vec().y),
        format!("[{},{}]", m_dir.vec().x, m_dir.vec().y),
    ];
    if region.is_1d() {
        return Ok(CommutabilityVerdict {
            region: region.id().to_string(),
            directions: dir_names,
            verdict: Verdict::TrivialDomain,
            reason: "a 1D interval has a single momentum direction".into(),
            variant: DoublingVariant::TensorC4,
            max_residual: None,
            mean_residual: None,
            corner_density: None,
        });
    }

    let lambda_l = region.lambda_field_for(l_dir);
    let lambda_m = region.lambda_field_for(m_dir);

    let mut reason = String::new();
    let mut separable = true;
    for seg in region.segments() {
        match &seg.geom {
            SegmentGeom::Line { start, end } => {
                let t = *end - *start;
                let parallel_l = t.cross(l_dir.vec()).abs() < 1e-9 * t.norm();
                let parallel_m = t.cross(m_dir.vec()).abs() < 1e-9 * t.norm();
                if !(parallel_l || parallel_m) {
                    separable = false;
                    reason = format!(
                        "segment {} is parallel to neither direction, so both boundary conditions apply on it",
                        seg.id
                    );
                    break;
                }
                // the condition active on this segment belongs to the
                // direction the segment is NOT parallel to
                let field = if parallel_l { &lambda_m } else { &lambda_l };
                if !field.is_constant_on(seg.id) {
                    separable = false;
                    reason = format!("λ varies along segment {}", seg.id);
                    break;
                }
            }
            SegmentGeom::Arc { .. } => {
                separable = false;
                reason = format!(
                    "segment {} is curved: both boundary conditions apply on a set of nonzero measure",
                    seg.id
                );
                break;
            }
            SegmentGeom::Point1d { .. } => unreachable!(),
        }
    }

    if separable {
        return Ok(CommutabilityVerdict {
            region: region.id().to_string(),
            directions: dir_names,
            verdict: Verdict::SeparableParallelepiped,
            reason: "every boundary segment is parallel to one direction with constant λ".into(),
            variant: DoublingVariant::TensorC4,
            max_residual: Some(0.0),
            mean_residual: Some(0.0),
            corner_density: None,
        });
    }

    // incompatible: attach residual evidence from probe tensor modes built on
    // the bounding rectangle ladders where those exist
    let lambdas = SideLambdas {
        bottom: field_probe(&lambda_m),
        right: field_probe(&lambda_l),
        top: field_probe(&lambda_m),
        left: field_probe(&lambda_l),
    };
    let (mut max_r, mut sum_r, mut count, mut density): (f64, f64, usize, Option<f64>) =
        (0.0, 0.0, 0, None);
    if matches!(
        region.kind(),
        RegionKind::Rectangle { .. } | RegionKind::RoundedRectangle { .. }
    ) {
        let modes = joint_modes_rectangle(
            region,
            lambdas,
            [-2, -1, 1, 2],
            [-2, -1, 1, 2],
            DoublingVariant::TensorC4,
        )?;
        for mode in &modes {
            let st = joint_bc_residual(region, mode, &lambda_l, &lambda_m, 512)?;
            max_r = max_r.max(st.max);
            sum_r += st.rms;
            count += 1;
            if let Some(d) = st.corner_density {
                density = Some(density.map_or(d, |x: f64| x.max(d)));
            }
        }
    }
    Ok(CommutabilityVerdict {
        region: region.id().to_string(),
        directions: dir_names,
        verdict: Verdict::IncompatibleBc,
        reason,
        variant: DoublingVariant::TensorC4,
        max_residual: (count > 0).then_some(max_r),
        mean_residual: (count > 0).then(|| sum_r / count as f64),
        corner_density: density,
    })
}

fn field_probe(field: &ScalarBoundaryField) -> f64 {
    match field {
        ScalarBoundaryField::Constant(v) => *v,
        ScalarBoundaryField::PerSegment { default, .. } => *default,
        ScalarBoundaryField::Table { default, .. } => *default,
    }
}

/// Commutation of k̂·p_R with m̂·x, with a numeric witness: the commutator on
/// differentiable doubled states equals −i(k̂·m̂)σ₁, so its normalized norm is
/// |k̂·m̂|.
#[derive(Debug, Clone, Serialize)]
pub struct CommuteWitness {
    pub commutes: bool,
    /// Max over probe states of ‖[k̂·p_R, m̂·x]Ψ‖ / ‖Ψ‖.
    pub witness: f64,
    pub states_probed: usize,
}

/// Tests [k̂·p_R, m̂·x] = 0 ⟺ k̂·m̂ = 0 on random differentiable doubled
/// states built from longitudinal modes times transverse plane waves.
pub fn position_momentum_commutes(
    l_dir: Dir2,
    m_dir: Dir2,
    region: &Region,
    n_states: usize,
    seed: u64,
) -> Result<CommuteWitness> {
    use rand::prelude::*;
    let (origin, lx, ly) = match region.kind() {
        RegionKind::Rectangle { origin, lx, ly } => (*origin, *lx, *ly),
        _ => {
            return Err(Error::InvalidArgument(
                "the commutator witness runs on a rectangle".into(),
            ))
        }
    };
    if (l_dir.vec() - Dir2::X.vec()).norm() > 1e-12 {
        return Err(Error::InvalidArgument(
            "the witness is implemented for l̂ = x̂ probes".into(),
        ));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let interval = SectionInterval {
        x_minus: origin.x,
        x_plus: origin.x + lx,
        lambda_minus: Complex64::new(0.0, rng.gen_range(-1.0..1.0)),
        lambda_plus: Complex64::new(0.0, rng.gen_range(-1.0..1.0)),
    };
    let quad_x = crate::modes::interval_quad(&interval, 8);
    let quad_y = crate::numerics::gauss::Quad1::gauss(origin.y, origin.y + ly, 8, 8);

    let mut witness: f64 = 0.0;
    for _ in 0..n_states {
        // Ψ = Σ c · φ_mode(x) ⊗ e^{iqy}: satisfies the x̂ boundary conditions
        let terms: Vec<(Complex64, MomentumMode, f64)> = (0..4)
            .map(|_| {
                let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                let n = rng.gen_range(-3..4);
                let q = rng.gen_range(-4.0..4.0);
                Ok((c, build_mode(&interval, 0.0, n)?, q))
            })
            .collect::<Result<_>>()?;
        // commutator = p_R(x_m Ψ) − x_m (p_R Ψ); derivatives are analytic
        let mut comm_sq = 0.0;
        let mut norm_sq = 0.0;
        for (&x, &wx) in quad_x.nodes.iter().zip(&quad_x.weights) {
            for (&y, &wy) in quad_y.nodes.iter().zip(&quad_y.weights) {
                let p = Vec2::new(x, y);
                let xm = m_dir.dot(p);
                let mut e = Complex64::default();
                let mut o = Complex64::default();
                let mut de = Complex64::default();
                let mut d_o = Complex64::default();
                for (c, mode, q) in &terms {
                    let ph = (I * *q * y).exp();
                    e += c * mode.eval_e(x) * ph;
                    o += c * mode.eval_o(x) * ph;
                    de += c * mode.deriv_e(x) * ph;
                    d_o += c * mode.deriv_o(x) * ph;
                }
                // p_R swaps components: p_R Ψ = −i σ₁ ∂_x Ψ
                let pr_e = -I * d_o;
                let pr_o = -I * de;
                // ∂_x(x_m Ψ) = (m̂·x̂)Ψ + x_m ∂_x Ψ
                let mx = m_dir.dot(Dir2::X.vec());
                let pxm_e = -I * (mx * o + xm * d_o);
                let pxm_o = -I * (mx * e + xm * de);
                let ce = pxm_e - xm * pr_e;
                let co = pxm_o - xm * pr_o;
                let w = wx * wy;
                comm_sq += w * (ce.norm_sqr() + co.norm_sqr());
                norm_sq += w * (e.norm_sqr() + o.norm_sqr());
            }
        }
        witness = witness.max((comm_sq / norm_sq).sqrt());
    }
    Ok(CommuteWitness {
        commutes: l_dir.dot(m_dir.vec()).abs() < 1e-12 && witness < 1e-8,
        witness,
        states_probed: n_states,
    })
}
