//! Quantized momentum spectra and generalized eigenfunctions on line
//! sections.
//!
//! On an interval (x₋, x₊) of length L with boundary values λ₋, λ₊ ∈ iℝ, the
//! spectrum of the longitudinal momentum is the ladder k_n = πn/L + θ, where
//! exp(2iθL) equals the Möbius ratio (1+λ₊)(1−λ₋) / ((1−λ₊)(1+λ₋)). The
//! ratio has unit modulus exactly because λ is purely imaginary, so θ is
//! real. Each eigenvalue carries a two-component eigenfunction with a
//! unit-modulus reflection coefficient σ fixed at the left endpoint.

use crate::error::{Error, Result};
use crate::geometry::{LineSection, SectionInterval};
use crate::numerics::gauss::Quad1;
use crate::numerics::{fejer_mean, I};
use num_complex::Complex64;
use std::f64::consts::PI;

const IMAG_TOL: f64 = 1e-12;

fn check_imaginary(name: &str, lambda: Complex64) -> Result<()> {
    if lambda.re.abs() > IMAG_TOL {
        return Err(Error::SelfAdjointness(format!(
            "{name} must be purely imaginary, got {lambda}"
        )));
    }
    Ok(())
}

/// The unit-modulus ratio (1+λ₊)(1−λ₋) / ((1−λ₊)(1+λ₋)).
pub fn mobius_ratio(lambda_minus: Complex64, lambda_plus: Complex64) -> Complex64 {
    ((1.0 + lambda_plus) * (1.0 - lambda_minus)) / ((1.0 - lambda_plus) * (1.0 + lambda_minus))
}

/// The unique θ ∈ [0, π/L) with exp(2iθL) = Möbius ratio.
pub fn theta_offset(lambda_minus: Complex64, lambda_plus: Complex64, length: f64) -> Result<f64> {
    check_imaginary("lambda_minus", lambda_minus)?;
    check_imaginary("lambda_plus", lambda_plus)?;
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "interval length must be positive, got {length}"
        )));
    }
    let ratio = mobius_ratio(lambda_minus, lambda_plus);
    debug_assert!((ratio.norm() - 1.0).abs() < 1e-10);
    let mut theta = ratio.arg() / (2.0 * length);
    let step = PI / length;
    if theta < 0.0 {
        theta += step;
    }
    if theta >= step {
        theta -= step;
    }
    Ok(theta)
}

/// The eigenvalue ladder k_n = πn/L + θ on one section interval.
#[derive(Debug, Clone)]
pub struct SpectrumLadder {
    pub theta: f64,
    pub length: f64,
    pub lambda_minus: Complex64,
    pub lambda_plus: Complex64,
    pub n_min: i64,
    pub n_max: i64,
}

impl SpectrumLadder {
    pub fn new(interval: &SectionInterval, n_min: i64, n_max: i64) -> Result<SpectrumLadder> {
        if n_min > n_max {
            return Err(Error::InvalidArgument("n_min must not exceed n_max".into()));
        }
        let theta = theta_offset(
            interval.lambda_minus,
            interval.lambda_plus,
            interval.length(),
        )?;
        Ok(SpectrumLadder {
            theta,
            length: interval.length(),
            lambda_minus: interval.lambda_minus,
            lambda_plus: interval.lambda_plus,
            n_min,
            n_max,
        })
    }

    pub fn k(&self, n: i64) -> f64 {
        PI * n as f64 / self.length + self.theta
    }

    pub fn ks(&self) -> Vec<f64> {
        (self.n_min..=self.n_max).map(|n| self.k(n)).collect()
    }

    /// |exp(2ikL) − Möbius ratio|, zero for ladder members.
    pub fn quantization_residual(&self, k: f64) -> f64 {
        let lhs = (2.0 * I * k * self.length).exp();
        (lhs - mobius_ratio(self.lambda_minus, self.lambda_plus)).norm()
    }
}

/// Evaluation interface for two-component states restricted to a line.
pub trait LineState {
    fn e(&self, x: f64) -> Complex64;
    fn o(&self, x: f64) -> Complex64;
}

/// A physical single-component wave function ψ embedded on a line:
/// Ψ_e = Ψ_o = ψ/√2.
pub struct PhysicalLine<F: Fn(f64) -> Complex64> {
    pub psi: F,
}

impl<F: Fn(f64) -> Complex64> LineState for PhysicalLine<F> {
    fn e(&self, x: f64) -> Complex64 {
        (self.psi)(x) / 2.0_f64.sqrt()
    }
    fn o(&self, x: f64) -> Complex64 {
        self.e(x)
    }
}

/// One generalized eigenfunction of the longitudinal momentum on one section
/// interval, normalized so the doubled-space norm over the interval is 1.
#[derive(Debug, Clone)]
pub struct MomentumMode {
    pub interval: SectionInterval,
    pub anchor: f64,
    pub n: i64,
    pub k: f64,
    pub sigma: Complex64,
    /// 1/(2√L)
    pub norm_const: f64,
}

/// Builds the mode with ladder index n on the given interval.
///
/// σ = exp(2ik·x₋)(1−λ₋)/(1+λ₋) anchors the left boundary condition; the
/// right condition then holds because k sits on the ladder.
pub fn build_mode(interval: &SectionInterval, anchor: f64, n: i64) -> Result<MomentumMode> {
    let ladder = SpectrumLadder::new(interval, n, n)?;
    let k = ladder.k(n);
    let lm = interval.lambda_minus;
    let denom = 1.0 + lm;
    debug_assert!(denom.norm() >= 1.0); // |1 + iα| ≥ 1
    let sigma = (2.0 * I * k * interval.x_minus).exp() * (1.0 - lm) / denom;
    Ok(MomentumMode {
        interval: interval.clone(),
        anchor,
        n,
        k,
        sigma,
        norm_const: 0.5 / interval.length().sqrt(),
    })
}

impl MomentumMode {
    pub fn eval_e(&self, x: f64) -> Complex64 {
        self.norm_const * ((I * self.k * x).exp() + self.sigma * (-I * self.k * x).exp())
    }

    pub fn eval_o(&self, x: f64) -> Complex64 {
        self.norm_const * ((I * self.k * x).exp() - self.sigma * (-I * self.k * x).exp())
    }

    /// d/dx of the components: (Ψ_e', Ψ_o') = ik(Ψ_o, Ψ_e).
    pub fn deriv_e(&self, x: f64) -> Complex64 {
        I * self.k * self.eval_o(x)
    }

    pub fn deriv_o(&self, x: f64) -> Complex64 {
        I * self.k * self.eval_e(x)
    }

    /// Physical-sector profile e^{ikx}/√L used in boundary sums.
    pub fn plus_component(&self, x: f64) -> Complex64 {
        (I * self.k * x).exp() / self.interval.length().sqrt()
    }

    /// Max violation of Ψ_o = λΨ_e over both endpoints.
    pub fn bc_residual(&self) -> f64 {
        let at = |x: f64, lambda: Complex64| (self.eval_o(x) - lambda * self.eval_e(x)).norm();
        at(self.interval.x_minus, self.interval.lambda_minus)
            .max(at(self.interval.x_plus, self.interval.lambda_plus))
    }
}

impl LineState for MomentumMode {
    fn e(&self, x: f64) -> Complex64 {
        self.eval_e(x)
    }
    fn o(&self, x: f64) -> Complex64 {
        self.eval_o(x)
    }
}

/// Doubled-space inner product ⟨Φ|Ψ⟩ = ∫(Φ_e*Ψ_e + Φ_o*Ψ_o) dx over the
/// mode's interval.
pub fn project(mode: &MomentumMode, state: &impl LineState, quad: &Quad1) -> Complex64 {
    let mut acc = Complex64::default();
    for (&x, &w) in quad.nodes.iter().zip(&quad.weights) {
        acc += (mode.eval_e(x).conj() * state.e(x) + mode.eval_o(x).conj() * state.o(x)) * w;
    }
    acc
}

/// Quadrature rule spanning a mode's interval, resolving oscillation up to
/// the given maximum |n|.
pub fn interval_quad(interval: &SectionInterval, n_max: i64) -> Quad1 {
    let panels = (n_max.unsigned_abs() as usize).max(4);
    Quad1::gauss(interval.x_minus, interval.x_plus, 8, panels)
}

/// One mode of a union spectrum: supported on a single interval of a
/// (possibly non-convex) section and zero on the others.
#[derive(Debug, Clone)]
pub struct UnionMode {
    pub interval_index: usize,
    pub mode: MomentumMode,
}

#[derive(Debug, Clone)]
pub struct UnionSpectrum {
    pub modes: Vec<UnionMode>,
    /// Pairs of indices into `modes` from different intervals whose
    /// eigenvalues collide within 1e-9.
    pub degeneracies: Vec<(usize, usize)>,
}

/// Momentum spectrum of a whole line section: the union of the per-interval
/// ladders, with cross-interval degeneracies flagged.
pub fn union_spectrum(section: &LineSection, n_min: i64, n_max: i64) -> Result<UnionSpectrum> {
    let mut modes = Vec::new();
    for (idx, iv) in section.intervals.iter().enumerate() {
        for n in n_min..=n_max {
            modes.push(UnionMode {
                interval_index: idx,
                mode: build_mode(iv, section.anchor, n)?,
            });
        }
    }
    let mut degeneracies = Vec::new();
    for i in 0..modes.len() {
        for j in i + 1..modes.len() {
            if modes[i].interval_index != modes[j].interval_index
                && (modes[i].mode.k - modes[j].mode.k).abs() < 1e-9
            {
                degeneracies.push((i, j));
            }
        }
    }
    Ok(UnionSpectrum {
        modes,
        degeneracies,
    })
}

/// Which endpoint of an interval a boundary sum is evaluated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Minus,
    Plus,
}

/// Result of a truncated boundary sum.
#[derive(Debug, Clone)]
pub struct PoissonSum {
    /// Fejér-averaged value; converges to ½ψ*(endpoint).
    pub value: Complex64,
    /// Raw symmetric partial sum at the truncation.
    pub raw: Complex64,
    pub n_used: i64,
}

/// Fejér-averaged boundary sum Σ_{|n|≤N} c̄_n Φ̄_{n,+}(x₀)/√2 for a physical
/// state ψ on the interval. The ladder sums act as δ-functions at the
/// boundary, so the result converges to ½ψ*(x₀) as N grows.
pub fn poisson_boundary_sum(
    interval: &SectionInterval,
    psi: &impl Fn(f64) -> Complex64,
    endpoint: Endpoint,
    n_max: i64,
) -> Result<PoissonSum> {
    if n_max < 0 {
        return Err(Error::InvalidArgument("n_max must be nonnegative".into()));
    }
    let x0 = match endpoint {
        Endpoint::Minus => interval.x_minus,
        Endpoint::Plus => interval.x_plus,
    };
    let quad = interval_quad(interval, n_max + 1);
    let state = PhysicalLine { psi };
    let sqrt2 = 2.0_f64.sqrt();

    let term = |n: i64| -> Result<Complex64> {
        let mode = build_mode(interval, 0.0, n)?;
        let c = project(&mode, &state, &quad);
        Ok(c.conj() * mode.plus_component(x0).conj() / sqrt2)
    };

    let mut partial = Vec::with_capacity(n_max as usize + 1);
    let mut s = term(0)?;
    partial.push(s);
    for m in 1..=n_max {
        s += term(m)? + term(-m)?;
        partial.push(s);
    }
    Ok(PoissonSum {
        value: fejer_mean(&partial),
        raw: s,
        n_used: n_max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lm: f64, lp: f64, a: f64, b: f64) -> SectionInterval {
        SectionInterval {
            x_minus: a,
            x_plus: b,
            lambda_minus: Complex64::new(0.0, lm),
            lambda_plus: Complex64::new(0.0, lp),
        }
    }

    #[test]
    fn theta_zero_for_equal_lambdas() {
        // identical λ at both ends cancels in the ratio
        for alpha in [0.0, 0.7, -2.3] {
            let l = Complex64::new(0.0, alpha);
            let theta = theta_offset(l, l, 1.7).unwrap();
            assert!(theta.abs() < 1e-14);
        }
    }

    #[test]
    fn theta_half_step_for_opposite_units() {
        // λ₋ = -i, λ₊ = +i gives ratio (1+i)(1+i)/((1-i)(1-i)) = -1
        let theta = theta_offset(Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), 1.0).unwrap();
        assert!((theta - PI / 2.0).abs() < 1e-14);
        // substituting k = π(n + 1/2) satisfies the quantization condition
        let ladder = SpectrumLadder::new(&iv(-1.0, 1.0, 0.0, 1.0), 0, 2).unwrap();
        for k in ladder.ks() {
            assert!(ladder.quantization_residual(k) < 1e-12);
        }
        assert_eq!(ladder.ks().len(), 3);
        assert!((ladder.k(0) - PI / 2.0).abs() < 1e-14);
        assert!((ladder.k(1) - 1.5 * PI).abs() < 1e-14);
        assert!((ladder.k(2) - 2.5 * PI).abs() < 1e-14);
    }

    #[test]
    fn neumann_ladder_on_pi_interval() {
        let ladder = SpectrumLadder::new(&iv(0.0, 0.0, 0.0, PI), -2, 2).unwrap();
        let ks = ladder.ks();
        for (k, expect) in ks.iter().zip([-2.0, -1.0, 0.0, 1.0, 2.0]) {
            assert!((k - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn ladder_spacing_is_exact() {
        let ladder = SpectrumLadder::new(&iv(0.31, -1.7, 0.2, 2.9), -20, 20).unwrap();
        let step = PI / ladder.length;
        let ks = ladder.ks();
        for w in ks.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-13 * (1.0 + w[1].abs()));
        }
    }

    #[test]
    fn non_imaginary_lambda_rejected() {
        let err = theta_offset(Complex64::new(0.1, 0.0), Complex64::new(0.0, 0.0), 1.0);
        assert!(matches!(err, Err(Error::SelfAdjointness(_))));
        assert!(theta_offset(Complex64::new(0.0, 1.0), Complex64::new(0.0, 1.0), -1.0).is_err());
    }

    #[test]
    fn sigma_is_identity_for_neumann_left_end() {
        let mode = build_mode(&iv(0.0, 0.4, 0.0, 1.3), 0.0, 1).unwrap();
        assert!((mode.sigma - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        // Ψ_e ∝ cos(kx), Ψ_o ∝ i sin(kx)
        let x = 0.37;
        let e = mode.eval_e(x);
        let o = mode.eval_o(x);
        assert!(
            (e - 2.0 * mode.norm_const * Complex64::new((mode.k * x).cos(), 0.0)).norm() < 1e-14
        );
        assert!(
            (o - 2.0 * mode.norm_const * Complex64::new(0.0, (mode.k * x).sin())).norm() < 1e-14
        );
    }

    #[test]
    fn sigma_unimodular_and_bcs_hold() {
        for (lm, lp) in [(0.9, -0.2), (-3.0, 0.0), (0.0, 5.0), (1.0, 1.0)] {
            let interval = iv(lm, lp, -0.4, 1.9);
            for n in [-3, 0, 2, 7] {
                let mode = build_mode(&interval, 0.0, n).unwrap();
                assert!((mode.sigma.norm() - 1.0).abs() < 1e-14);
                assert!(
                    mode.bc_residual() < 1e-12,
                    "bc residual {}",
                    mode.bc_residual()
                );
            }
        }
    }

    #[test]
    fn doubled_norm_is_one() {
        let interval = iv(0.8, -0.3, 0.25, 1.75);
        let mode = build_mode(&interval, 0.0, 3).unwrap();
        let quad = Quad1::gauss(interval.x_minus, interval.x_plus, 8, 128);
        let norm: f64 = quad
            .nodes
            .iter()
            .zip(&quad.weights)
            .map(|(&x, &w)| w * (mode.eval_e(x).norm_sqr() + mode.eval_o(x).norm_sqr()))
            .sum();
        assert!((norm - 1.0).abs() < 1e-10);
    }

    #[test]
    fn modes_orthonormal() {
        let interval = iv(-0.6, 1.2, 0.0, 1.0);
        let quad = interval_quad(&interval, 8);
        for n in -2..=2 {
            for m in -2..=2 {
                let a = build_mode(&interval, 0.0, n).unwrap();
                let b = build_mode(&interval, 0.0, m).unwrap();
                let ip = project(&a, &b, &quad);
                let expect = if n == m { 1.0 } else { 0.0 };
                assert!(
                    (ip - Complex64::new(expect, 0.0)).norm() < 1e-10,
                    "⟨{n}|{m}⟩ = {ip}"
                );
            }
        }
    }

    #[test]
    fn time_reversal_flips_spectrum() {
        // negating λ (complex conjugation) maps the ladder set to its negative
        let a = SpectrumLadder::new(&iv(0.37, -1.1, 0.0, 1.6), -30, 30).unwrap();
        let b = SpectrumLadder::new(&iv(-0.37, 1.1, 0.0, 1.6), -30, 30).unwrap();
        let mut neg: Vec<f64> = a.ks().iter().map(|k| -k).collect();
        neg.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let bs = b.ks();
        // compare on the common bulk (end rungs shift by one ladder step)
        for (x, y) in neg.iter().skip(1).zip(bs.iter()) {
            assert!((x - y).abs() < 1e-11, "{x} vs {y}");
        }
    }

    #[test]
    fn reflection_swaps_lambdas_and_flips_spectrum() {
        let a = SpectrumLadder::new(&iv(0.9, 0.2, 0.0, 0.8), -30, 30).unwrap();
        let b = SpectrumLadder::new(&iv(0.2, 0.9, 0.0, 0.8), -30, 30).unwrap();
        let mut neg: Vec<f64> = a.ks().iter().map(|k| -k).collect();
        neg.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in neg.iter().skip(1).zip(b.ks().iter()) {
            assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn theta_perturbation_matches_analytic_derivative() {
        let lm = Complex64::new(0.0, 0.4);
        let lp = Complex64::new(0.0, -0.9);
        let length = 1.3;
        let eps = 1e-5;
        let t0 = theta_offset(lm, lp, length).unwrap();
        let t1 = theta_offset(lm, lp + Complex64::new(0.0, eps), length).unwrap();
        let fd = (t1 - t0) / eps;
        // dθ/dα₊ = Im(i r'/r) / (2L) with r' = 2 (1-λ₋) / ((1-λ₊)² (1+λ₋))
        let r = mobius_ratio(lm, lp);
        let rp = 2.0 * (1.0 - lm) / ((1.0 - lp) * (1.0 - lp) * (1.0 + lm));
        let analytic = (I * rp / r).im / (2.0 * length);
        assert!(
            (fd - analytic).abs() < 1e-4,
            "fd {fd} vs analytic {analytic}"
        );
    }

    #[test]
    fn union_of_commensurate_intervals_flags_degeneracies() {
        // lengths 1 and 2 with θ = 0: every even rung of the longer ladder
        // collides with a rung of the shorter one
        let section = LineSection {
            direction: crate::geometry::Dir2::X,
            anchor: 0.0,
            intervals: vec![iv(0.0, 0.0, 0.0, 1.0), iv(0.0, 0.0, 3.0, 5.0)],
        };
        let union = union_spectrum(&section, -6, 6).unwrap();
        assert_eq!(union.modes.len(), 26);
        // k = πn from interval 1 hits rung 2n of interval 2 for |2n| ≤ 6
        let expected = 7;
        assert_eq!(union.degeneracies.len(), expected);
        for (i, j) in &union.degeneracies {
            assert!((union.modes[*i].mode.k - union.modes[*j].mode.k).abs() < 1e-9);
            assert_ne!(
                union.modes[*i].interval_index,
                union.modes[*j].interval_index
            );
        }
    }

    #[test]
    fn union_of_incommensurate_intervals_has_no_degeneracies() {
        // lengths 1 and √2 share only the k = 0 rung (both ladders have θ = 0)
        let section = LineSection {
            direction: crate::geometry::Dir2::X,
            anchor: 0.0,
            intervals: vec![iv(0.0, 0.0, 0.0, 1.0), iv(0.0, 0.0, 2.0, 2.0 + 2f64.sqrt())],
        };
        let union = union_spectrum(&section, -50, 50).unwrap();
        assert_eq!(union.degeneracies.len(), 1);
        let (i, j) = union.degeneracies[0];
        assert!(union.modes[i].mode.k.abs() < 1e-12 && union.modes[j].mode.k.abs() < 1e-12);
        // a θ offset on one interval removes even that collision
        let section = LineSection {
            direction: crate::geometry::Dir2::X,
            anchor: 0.0,
            intervals: vec![
                iv(0.0, 0.0, 0.0, 1.0),
                iv(0.3, -0.8, 2.0, 2.0 + 2f64.sqrt()),
            ],
        };
        let union = union_spectrum(&section, -50, 50).unwrap();
        assert!(union.degeneracies.is_empty());
    }

    #[test]
    fn poisson_sum_constant_state() {
        // ψ ≡ 1 on [0,1]: every symmetric partial sum equals 1/2 exactly
        let interval = iv(0.0, 0.0, 0.0, 1.0);
        let sum = poisson_boundary_sum(
            &interval,
            &|_| Complex64::new(1.0, 0.0),
            Endpoint::Minus,
            64,
        )
        .unwrap();
        assert!((sum.value - Complex64::new(0.5, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn poisson_sum_vanishing_state() {
        let interval = iv(0.3, -0.8, 0.0, 1.0);
        let psi = |x: f64| Complex64::new((PI * x).sin().powi(2) * x * (1.0 - x), 0.0);
        let sum = poisson_boundary_sum(&interval, &psi, Endpoint::Plus, 64).unwrap();
        assert!(sum.value.norm() < 5e-3, "sum {}", sum.value.norm());
    }

    #[test]
    fn poisson_sum_gaussian_bump_converges_to_half() {
        let interval = iv(0.0, 0.0, 0.0, 1.0);
        let psi = |x: f64| {
            Complex64::new(
                (-(x - 0.5) * (x - 0.5) / (2.0 * 0.2 * 0.2)).exp() + 0.6,
                0.1 * x,
            )
        };
        let target_minus = 0.5 * psi(0.0).conj();
        let target_plus = 0.5 * psi(1.0).conj();
        let mut errs = Vec::new();
        for n in [32, 64, 128] {
            let s = poisson_boundary_sum(&interval, &psi, Endpoint::Minus, n).unwrap();
            errs.push((s.value - target_minus).norm());
        }
        assert!(errs[2] < 0.02 * target_minus.norm(), "err {}", errs[2]);
        assert!(errs[2] <= errs[0]);
        let s = poisson_boundary_sum(&interval, &psi, Endpoint::Plus, 128).unwrap();
        assert!((s.value - target_plus).norm() < 0.02 * target_plus.norm());
    }

    #[test]
    fn parseval_partial_sums_nondecreasing() {
        let interval = iv(0.5, 0.5, 0.0, 1.0);
        let psi = |x: f64| Complex64::new((-(x - 0.45) * (x - 0.45) / 0.02).exp(), 0.0);
        let state = PhysicalLine { psi };
        let quad = interval_quad(&interval, 80);
        let norm: f64 = quad
            .nodes
            .iter()
            .zip(&quad.weights)
            .map(|(&x, &w)| w * (state.e(x).norm_sqr() + state.o(x).norm_sqr()))
            .sum();
        let mut prev = 0.0;
        let mut last = 0.0;
        for nmax in [8, 16, 32, 64] {
            let mut total = 0.0;
            for n in -nmax..=nmax {
                let mode = build_mode(&interval, 0.0, n).unwrap();
                total += project(&mode, &state, &quad).norm_sqr();
            }
            assert!(total >= prev - 1e-12);
            prev = total;
            last = total;
        }
        assert!((last - norm).abs() < 1e-6 * norm, "{last} vs {norm}");
    }

    #[test]
    fn momentum_matrix_is_hermitian_and_diagonal() {
        let interval = iv(-0.8, 0.45, 0.0, 1.4);
        let quad = interval_quad(&interval, 14);
        let modes: Vec<MomentumMode> = (-6..6)
            .map(|n| build_mode(&interval, 0.0, n).unwrap())
            .collect();
        // M_mn = ⟨Φ_m| -iσ₁ d/dx |Φ_n⟩; the operator swaps components
        let mut m = vec![Complex64::default(); modes.len() * modes.len()];
        for (a, ma) in modes.iter().enumerate() {
            for (b, mb) in modes.iter().enumerate() {
                let mut acc = Complex64::default();
                for (&x, &w) in quad.nodes.iter().zip(&quad.weights) {
                    let pe = -I * mb.deriv_o(x);
                    let po = -I * mb.deriv_e(x);
                    acc += (ma.eval_e(x).conj() * pe + ma.eval_o(x).conj() * po) * w;
                }
                m[a * modes.len() + b] = acc;
            }
        }
        let nm = modes.len();
        for a in 0..nm {
            for b in 0..nm {
                let asym = (m[a * nm + b] - m[b * nm + a].conj()).norm();
                assert!(asym < 1e-8, "asymmetry {asym} at ({a},{b})");
                let expect = if a == b {
                    Complex64::new(modes[a].k, 0.0)
                } else {
                    Complex64::default()
                };
                assert!((m[a * nm + b] - expect).norm() < 1e-8);
            }
        }
    }
}
