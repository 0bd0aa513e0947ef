//! Experiment drivers: each consumes a parsed config and writes CSV/JSON
//! artifacts into the output directory. Floats are written with 17
//! significant digits so reruns are byte-identical.

use super::config::{ExperimentConfig, ExperimentKind, StateSpec};
use crate::commutability::{
    classify_region, joint_bc_residual, joint_modes_rectangle, DoublingVariant, SideLambdas,
};
use crate::error::{Error, Result};
use crate::evolution::{build_hamiltonian, Evolver1, Evolver2, Potential};
use crate::geometry::RegionKind;
use crate::geometry::{Dir2, Region, Vec2};
use crate::modes::union_spectrum;
use crate::numerics::parallel_map;
use crate::observables::{
    ehrenfest_momentum_residual, ehrenfest_position_residual, expect_gradient_field,
    expect_gradient_field_1d, expect_pr_spectral_field, expect_pr_spectral_field_1d, run_1d,
    run_2d, uncertainty_report_1d, uncertainty_report_2d, FieldQuad, RunSeries, UncertaintyReport,
};
use crate::state::{GaussianPacket, GaussianPacket1, ScalarField2, Superposition1, Superposition2};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

pub struct RunOptions {
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub threads: usize,
}

/// Runs the configured experiment; returns the list of artifact files
/// (manifest excluded).
pub fn run_experiment(
    cfg: &ExperimentConfig,
    kind: ExperimentKind,
    opts: &RunOptions,
) -> Result<Vec<PathBuf>> {
    if cfg.experiment != kind {
        return Err(Error::Config(format!(
            "config declares experiment '{}', but the '{kind}' subcommand was invoked",
            cfg.experiment
        )));
    }
    fs::create_dir_all(&opts.out_dir)?;
    let seed = opts.seed.unwrap_or(cfg.seed);
    match kind {
        ExperimentKind::Spectrum => spectrum(cfg, opts),
        ExperimentKind::Modes => modes(cfg, opts),
        ExperimentKind::Evolve => evolve(cfg, opts, seed),
        ExperimentKind::Ehrenfest => ehrenfest(cfg, opts, seed),
        ExperimentKind::Uncertainty => uncertainty(cfg, opts, seed),
        ExperimentKind::Commute => commute(cfg, opts),
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents)?;
    Ok(())
}

fn spectrum(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let section_cfg = cfg
        .spectrum
        .as_ref()
        .ok_or_else(|| Error::Config("spectrum experiment needs a 'spectrum' section".into()))?;
    let region = cfg.build_region()?;
    let dir = ExperimentConfig::direction(&section_cfg.direction)?;
    let mut csv = String::from("y0,interval,n,k,sigma_re,sigma_im\n");
    let mut degeneracies = Vec::new();
    for &y0 in &section_cfg.anchors {
        let section = region.line_section(dir, y0)?;
        let union = union_spectrum(&section, section_cfg.n_min, section_cfg.n_max)?;
        for um in &union.modes {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                fmt_f(y0),
                um.interval_index,
                um.mode.n,
                fmt_f(um.mode.k),
                fmt_f(um.mode.sigma.re),
                fmt_f(um.mode.sigma.im)
            );
        }
        for (i, j) in &union.degeneracies {
            degeneracies.push(json!({
                "y0": y0,
                "k": union.modes[*i].mode.k,
                "intervals": [union.modes[*i].interval_index, union.modes[*j].interval_index],
                "indices": [union.modes[*i].mode.n, union.modes[*j].mode.n],
            }));
        }
    }
    let csv_path = opts.out_dir.join("spectrum.csv");
    write_file(&csv_path, &csv)?;
    let report_path = opts.out_dir.join("report.json");
    write_file(
        &report_path,
        &serde_json::to_string_pretty(&json!({
            "region": region.id(),
            "degeneracies": degeneracies,
        }))?,
    )?;
    Ok(vec![csv_path, report_path])
}

fn modes(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let section_cfg = cfg
        .modes
        .as_ref()
        .ok_or_else(|| Error::Config("modes experiment needs a 'modes' section".into()))?;
    let region = cfg.build_region()?;
    let dir = ExperimentConfig::direction(&section_cfg.direction)?;
    let section = region.line_section(dir, section_cfg.anchor)?;
    if section.is_empty() {
        return Err(Error::Config(
            "the configured line misses the region".into(),
        ));
    }
    let mut files = Vec::new();
    for &n in &section_cfg.indices {
        for (idx, interval) in section.intervals.iter().enumerate() {
            let mode = crate::modes::build_mode(interval, section_cfg.anchor, n)?;
            let mut csv = String::from("x,e_re,e_im,o_re,o_im\n");
            let m = section_cfg.samples.max(2);
            for s in 0..m {
                let x = interval.x_minus
                    + (interval.x_plus - interval.x_minus) * s as f64 / (m - 1) as f64;
                let e = mode.eval_e(x);
                let o = mode.eval_o(x);
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    fmt_f(x),
                    fmt_f(e.re),
                    fmt_f(e.im),
                    fmt_f(o.re),
                    fmt_f(o.im)
                );
            }
            let name = if section.intervals.len() > 1 {
                format!("mode_n{n}_interval{idx}.csv")
            } else {
                format!("mode_n{n}.csv")
            };
            let path = opts.out_dir.join(name);
            write_file(&path, &csv)?;
            files.push(path);
        }
    }
    Ok(files)
}

fn series_csv(run: &RunSeries) -> String {
    let mut csv = String::from("t,x_mean,y_mean,pr_x,pr_y,pi_x,pi_y,energy,norm,flux,fb_x,fb_y\n");
    for row in &run.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f(row.t),
            fmt_f(row.x_mean),
            fmt_f(row.y_mean),
            fmt_f(row.pr[0]),
            fmt_f(row.pr[1]),
            fmt_f(row.pi[0]),
            fmt_f(row.pi[1]),
            fmt_f(row.energy),
            fmt_f(row.norm),
            fmt_f(row.flux),
            fmt_f(row.f_b[0]),
            fmt_f(row.f_b[1])
        );
    }
    csv
}

struct EvolutionSetup {
    run: RunSeries,
    final_state: crate::state::WaveState,
    region_id: String,
}

fn make_gaussian_2d(center: [f64; 2], width: f64, momentum: [f64; 2]) -> GaussianPacket {
    GaussianPacket {
        center: Vec2::new(center[0], center[1]),
        width,
        momentum: Vec2::new(momentum[0], momentum[1]),
    }
}

fn run_evolution(cfg: &ExperimentConfig, seed: u64) -> Result<EvolutionSetup> {
    let region = cfg.build_region()?;
    let h = cfg
        .numerics
        .h
        .ok_or_else(|| Error::Config("evolution needs numerics.h".into()))?;
    let dt = cfg
        .numerics
        .dt
        .ok_or_else(|| Error::Config("evolution needs numerics.dt".into()))?;
    let steps = cfg
        .numerics
        .steps
        .ok_or_else(|| Error::Config("evolution needs numerics.steps".into()))?;
    let mass = cfg.numerics.mass;
    let potential = cfg.numerics.potential.unwrap_or(Potential::Zero);
    let bcs = cfg.build_bcs()?;
    let nodes_for = |length: f64| -> Result<usize> {
        let n = (length / h).round();
        if ((length / h) - n).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "grid spacing h = {h} does not divide the side length {length}"
            )));
        }
        Ok(n as usize + 1)
    };
    let state_spec = cfg
        .state
        .as_ref()
        .ok_or_else(|| Error::Config("evolution needs a 'state' section".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    match region.kind() {
        RegionKind::Interval { a, b } => {
            let n = nodes_for(b - a)?;
            let op = build_hamiltonian(&region, (n, 1), mass, potential, &bcs)?;
            let psi: Box<dyn Fn(f64) -> Complex64> = match state_spec {
                StateSpec::Gaussian {
                    center,
                    width,
                    momentum,
                } => {
                    let g = GaussianPacket1 {
                        center: center[0],
                        width: *width,
                        momentum: momentum[0],
                    };
                    Box::new(move |x| crate::state::ScalarField1::value(&g, x))
                }
                StateSpec::Eigenmode { n: idx } => {
                    let eig = op.x.eigen()?;
                    let k = *idx;
                    if k >= op.x.n_active {
                        return Err(Error::Config(format!("eigenmode index {k} out of range")));
                    }
                    let na = op.x.n_active;
                    let v: Vec<f64> = (0..na).map(|i| eig.q[i * na + k] / op.x.scale[i]).collect();
                    let h = op.x.h;
                    let a0 = op.x.origin + op.x.active_start as f64 * h;
                    Box::new(move |x| {
                        let j = ((x - a0) / h).round() as i64;
                        if j < 0 || j as usize >= v.len() {
                            Complex64::default()
                        } else {
                            Complex64::new(v[j as usize], 0.0)
                        }
                    })
                }
                StateSpec::CustomCsv { path } => {
                    let text = fs::read_to_string(path)?;
                    let rows =
                        crate::state::load_state_rows(&mut std::io::Cursor::new(text.as_bytes()))?;
                    if rows.len() != n {
                        return Err(Error::Config(format!(
                            "state CSV has {} rows, grid needs {n}",
                            rows.len()
                        )));
                    }
                    let vals: Vec<Complex64> =
                        rows.iter().map(|(e, _)| e * 2.0_f64.sqrt()).collect();
                    let (a0, hh) = (*a, h);
                    Box::new(move |x| {
                        let j = ((x - a0) / hh).round() as usize;
                        vals[j.min(vals.len() - 1)]
                    })
                }
                StateSpec::RandomMixture { packets } => {
                    let terms: Vec<(Complex64, Arc<dyn crate::state::ScalarField1>)> = (0
                        ..*packets)
                        .map(|_| {
                            let c =
                                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                            let g = GaussianPacket1 {
                                center: rng.gen_range(a + 0.3 * (b - a)..a + 0.7 * (b - a)),
                                width: rng.gen_range(0.05..0.1) * (b - a),
                                momentum: rng.gen_range(-5.0..5.0),
                            };
                            (c, Arc::new(g) as Arc<dyn crate::state::ScalarField1>)
                        })
                        .collect();
                    let sup = Superposition1 { terms };
                    Box::new(move |x| crate::state::ScalarField1::value(&sup, x))
                }
            };
            let mut ev = Evolver1::new(op, dt, psi)?;
            let run = run_1d(&mut ev, steps)?;
            Ok(EvolutionSetup {
                run,
                final_state: ev.state(),
                region_id: region.id().to_string(),
            })
        }
        RegionKind::Rectangle { lx, ly, .. } => {
            let nx = nodes_for(*lx)?;
            let ny = nodes_for(*ly)?;
            let op = build_hamiltonian(&region, (nx, ny), mass, potential, &bcs)?;
            let psi: Box<dyn Fn(Vec2) -> Complex64> = match state_spec {
                StateSpec::Gaussian {
                    center,
                    width,
                    momentum,
                } => {
                    let g = make_gaussian_2d(*center, *width, *momentum);
                    Box::new(move |p| g.value(p))
                }
                StateSpec::RandomMixture { packets } => {
                    let terms: Vec<(Complex64, Arc<dyn ScalarField2>)> = (0..*packets)
                        .map(|_| {
                            let c =
                                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                            let g = make_gaussian_2d(
                                [
                                    rng.gen_range(0.3 * lx..0.7 * lx),
                                    rng.gen_range(0.3 * ly..0.7 * ly),
                                ],
                                rng.gen_range(0.05..0.1) * lx.min(*ly),
                                [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
                            );
                            (c, Arc::new(g) as Arc<dyn ScalarField2>)
                        })
                        .collect();
                    let sup = Superposition2 { terms };
                    Box::new(move |p| sup.value(p))
                }
                _ => {
                    return Err(Error::Config(
                        "2D evolution supports gaussian and random_mixture states".into(),
                    ))
                }
            };
            let mut ev = Evolver2::new(op, dt, psi)?;
            let run = run_2d(&mut ev, steps, 1)?;
            Ok(EvolutionSetup {
                run,
                final_state: ev.state(),
                region_id: region.id().to_string(),
            })
        }
        _ => Err(Error::InvalidArgument(
            "time evolution supports intervals and rectangles only".into(),
        )),
    }
}

fn evolve(cfg: &ExperimentConfig, opts: &RunOptions, seed: u64) -> Result<Vec<PathBuf>> {
    let setup = run_evolution(cfg, seed)?;
    let series_path = opts.out_dir.join("series.csv");
    write_file(&series_path, &series_csv(&setup.run))?;
    let state_path = opts.out_dir.join("final_state.csv");
    let mut buf = Vec::new();
    crate::state::save_state_csv(&setup.final_state, &mut buf)?;
    fs::write(&state_path, &buf)?;

    let norms: Vec<f64> = setup.run.rows.iter().map(|r| r.norm).collect();
    let energies: Vec<f64> = setup.run.rows.iter().map(|r| r.energy).collect();
    let norm_drift = norms
        .iter()
        .map(|n| (n - norms[0]).abs())
        .fold(0.0, f64::max);
    let energy_drift = energies
        .iter()
        .map(|e| (e - energies[0]).abs() / energies[0].abs().max(1e-300))
        .fold(0.0, f64::max);
    let max_flux = setup.run.rows.iter().map(|r| r.flux).fold(0.0, f64::max);
    let report_path = opts.out_dir.join("report.json");
    write_file(
        &report_path,
        &serde_json::to_string_pretty(&json!({
            "region": setup.region_id,
            "steps": setup.run.rows.len() - 1,
            "dt": setup.run.dt,
            "norm_drift": norm_drift,
            "energy_drift_rel": energy_drift,
            "max_boundary_flux": max_flux,
            "pass": {
                "norm_drift_below_1e8": norm_drift < 1e-8,
            }
        }))?,
    )?;
    Ok(vec![series_path, state_path, report_path])
}

#[derive(Serialize)]
struct EhrenfestReport {
    region: String,
    dt: f64,
    max_position_residual: [f64; 2],
    max_momentum_residual: [f64; 2],
    max_momentum_residual_without_force: [f64; 2],
    norm_drift: f64,
    max_boundary_flux: f64,
    /// max |d⟨p_I⟩/dt + ½ d/dt ∮(n·k̂)|ψ|²| consistency residual per axis
    pi_rate_residual: [f64; 2],
    pass_norm: bool,
}

fn ehrenfest(cfg: &ExperimentConfig, opts: &RunOptions, seed: u64) -> Result<Vec<PathBuf>> {
    let setup = run_evolution(cfg, seed)?;
    let run = &setup.run;
    let series_path = opts.out_dir.join("series.csv");
    write_file(&series_path, &series_csv(run))?;

    let axes = if run.rows[0].pr[1] == 0.0 && run.rows[0].y_mean == 0.0 {
        1
    } else {
        2
    };
    let mut csv = String::from("t,pos_res_x,pos_res_y,mom_res_x,mom_res_y\n");
    let pos_x = ehrenfest_position_residual(run, 0)?;
    let mom_x = ehrenfest_momentum_residual(run, 0, true)?;
    let (pos_y, mom_y) = if axes == 2 {
        (
            ehrenfest_position_residual(run, 1)?,
            ehrenfest_momentum_residual(run, 1, true)?,
        )
    } else {
        (Vec::new(), Vec::new())
    };
    for i in 0..pos_x.len() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            fmt_f(pos_x[i].0),
            fmt_f(pos_x[i].1),
            fmt_f(pos_y.get(i).map_or(0.0, |v| v.1)),
            fmt_f(mom_x[i].1),
            fmt_f(mom_y.get(i).map_or(0.0, |v| v.1)),
        );
    }
    let residual_path = opts.out_dir.join("residuals.csv");
    write_file(&residual_path, &csv)?;

    let maxr = |v: &[(f64, f64)]| v.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    let norm_drift = run
        .rows
        .iter()
        .map(|r| (r.norm - run.rows[0].norm).abs())
        .fold(0.0, f64::max);
    // d⟨p_I⟩/dt vs the boundary-density rate
    let mut pi_rate = [0.0f64; 2];
    for axis in 0..axes {
        for i in 1..run.rows.len() - 1 {
            let dpi = (run.rows[i + 1].pi[axis] - run.rows[i - 1].pi[axis]) / (2.0 * run.dt);
            let dbnd = (run.rows[i + 1].pi_boundary[axis] - run.rows[i - 1].pi_boundary[axis])
                / (2.0 * run.dt);
            pi_rate[axis] = pi_rate[axis].max((dpi - dbnd).abs());
        }
    }
    let report = EhrenfestReport {
        region: setup.region_id,
        dt: run.dt,
        max_position_residual: [maxr(&pos_x), if axes == 2 { maxr(&pos_y) } else { 0.0 }],
        max_momentum_residual: [maxr(&mom_x), if axes == 2 { maxr(&mom_y) } else { 0.0 }],
        max_momentum_residual_without_force: [
            maxr(&ehrenfest_momentum_residual(run, 0, false)?),
            if axes == 2 {
                maxr(&ehrenfest_momentum_residual(run, 1, false)?)
            } else {
                0.0
            },
        ],
        norm_drift,
        max_boundary_flux: run.rows.iter().map(|r| r.flux).fold(0.0, f64::max),
        pi_rate_residual: pi_rate,
        pass_norm: norm_drift < 1e-8,
    };
    let report_path = opts.out_dir.join("report.json");
    write_file(&report_path, &serde_json::to_string_pretty(&report)?)?;
    Ok(vec![series_path, residual_path, report_path])
}

/// Seeded smooth random state: a mixture of Gaussian packets kept away from
/// the boundary.
pub fn random_smooth_state_2d(region: &Region, rng: &mut ChaCha8Rng) -> Superposition2 {
    // bounding box with a margin
    let breaks_x = region.transverse_breakpoints(Dir2::Y);
    let breaks_y = region.transverse_breakpoints(Dir2::X);
    // transverse of ŷ is −x̂, so x-range comes out negated
    let (x_lo, x_hi) = (-breaks_x[breaks_x.len() - 1], -breaks_x[0]);
    let (y_lo, y_hi) = (breaks_y[0], breaks_y[breaks_y.len() - 1]);
    let w = (x_hi - x_lo).min(y_hi - y_lo);
    let n_packets = rng.gen_range(2..4);
    let mut terms: Vec<(Complex64, Arc<dyn ScalarField2>)> = Vec::new();
    for _ in 0..n_packets {
        // rejection-sample interior centers
        let mut center = Vec2::new(0.5 * (x_lo + x_hi), 0.5 * (y_lo + y_hi));
        for _ in 0..64 {
            let c = Vec2::new(rng.gen_range(x_lo..x_hi), rng.gen_range(y_lo..y_hi));
            if region.contains(c) && region.distance_to_boundary(c) > 0.28 * w {
                center = c;
                break;
            }
        }
        let packet = GaussianPacket {
            center,
            width: rng.gen_range(0.06..0.11) * w,
            momentum: Vec2::new(rng.gen_range(-6.0..6.0), rng.gen_range(-6.0..6.0)),
        };
        let coeff = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        terms.push((coeff, Arc::new(packet)));
    }
    Superposition2 { terms }
}

pub fn random_smooth_state_1d(a: f64, b: f64, rng: &mut ChaCha8Rng) -> Superposition1 {
    let w = b - a;
    let n_packets = rng.gen_range(2..4);
    let terms: Vec<(Complex64, Arc<dyn crate::state::ScalarField1>)> = (0..n_packets)
        .map(|_| {
            let g = GaussianPacket1 {
                center: rng.gen_range(a + 0.3 * w..a + 0.7 * w),
                width: rng.gen_range(0.05..0.09) * w,
                momentum: rng.gen_range(-6.0..6.0),
            };
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (c, Arc::new(g) as Arc<dyn crate::state::ScalarField1>)
        })
        .collect();
    Superposition1 { terms }
}

#[derive(Serialize)]
struct UncertaintyRun {
    state_index: usize,
    report: UncertaintyReport,
    /// Decomposition cross-check: |Re⟨−i∇⟩ − spectral ⟨p_R⟩| per direction.
    spectral_cross_check: Vec<f64>,
}

fn uncertainty(cfg: &ExperimentConfig, opts: &RunOptions, seed: u64) -> Result<Vec<PathBuf>> {
    let section = cfg.uncertainty.as_ref().ok_or_else(|| {
        Error::Config("uncertainty experiment needs an 'uncertainty' section".into())
    })?;
    let region = cfg.build_region()?;
    let m_dir = ExperimentConfig::direction(&section.m_direction)?;
    let quad = FieldQuad {
        n_lines: cfg.numerics.lines,
        n_boundary: cfg.numerics.boundary_points,
        ..FieldQuad::default()
    };
    let mass = cfg.numerics.mass;
    let n_modes = cfg.numerics.modes;

    let mut runs: Vec<UncertaintyRun> = Vec::new();
    if region.is_1d() {
        let (a, b) = match region.kind() {
            RegionKind::Interval { a, b } => (*a, *b),
            _ => unreachable!(),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for idx in 0..section.count {
            let state = random_smooth_state_1d(a, b, &mut rng);
            let report = uncertainty_report_1d(&state, &region, mass, &quad)?;
            let grad = expect_gradient_field_1d(&state, &region, &quad)?;
            let spectral = expect_pr_spectral_field_1d(&state, &region, n_modes)?;
            runs.push(UncertaintyRun {
                state_index: idx,
                report,
                spectral_cross_check: vec![(grad.re - spectral.value).abs()],
            });
        }
    } else {
        // states are drawn sequentially for determinism, then analyzed in
        // parallel
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let states: Vec<Superposition2> = (0..section.count)
            .map(|_| random_smooth_state_2d(&region, &mut rng))
            .collect();
        let results = parallel_map(
            states.into_iter().enumerate().collect(),
            opts.threads,
            |(idx, state)| -> Result<UncertaintyRun> {
                let report = uncertainty_report_2d(&state, &region, m_dir, mass, &quad)?;
                let mut cross = Vec::new();
                for dir in [Dir2::X, Dir2::Y] {
                    let grad = expect_gradient_field(&state, &region, dir, &quad)?;
                    let spectral = expect_pr_spectral_field(&state, &region, dir, n_modes, &quad)?;
                    cross.push((grad.re - spectral.value).abs());
                }
                Ok(UncertaintyRun {
                    state_index: idx,
                    report,
                    spectral_cross_check: cross,
                })
            },
        );
        for r in results {
            runs.push(r?);
        }
    }

    let min_slack = runs
        .iter()
        .map(|r| r.report.slack)
        .fold(f64::INFINITY, f64::min);
    let all_pass = runs.iter().all(|r| r.report.pass);
    let report_path = opts.out_dir.join("report.json");
    write_file(
        &report_path,
        &serde_json::to_string_pretty(&json!({
            "region": region.id(),
            "states": runs,
            "min_slack": min_slack,
            "pass": all_pass,
        }))?,
    )?;
    Ok(vec![report_path])
}

fn commute(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    let section = cfg
        .commute
        .as_ref()
        .ok_or_else(|| Error::Config("commute experiment needs a 'commute' section".into()))?;
    let region = cfg.build_region()?;
    let l_dir = ExperimentConfig::direction(&section.l_direction)?;
    let m_dir = ExperimentConfig::direction(&section.m_direction)?;
    let verdict = classify_region(&region, l_dir, m_dir)?;

    // residual table for configured mode indices, both doubling variants
    let mut residual_rows = Vec::new();
    if matches!(
        region.kind(),
        RegionKind::Rectangle { .. } | RegionKind::RoundedRectangle { .. }
    ) && !section.n_x.is_empty()
        && !section.n_y.is_empty()
    {
        let lambda_x = region.lambda_field_for(Dir2::X);
        let lambda_y = region.lambda_field_for(Dir2::Y);
        let lam = SideLambdas {
            bottom: lambda_y.eval(1, 0.0),
            right: lambda_x.eval(2, 0.0),
            top: lambda_y.eval(3, 0.0),
            left: lambda_x.eval(4, 0.0),
        };
        for variant in [DoublingVariant::TensorC4, DoublingVariant::LiteralC2] {
            let modes = joint_modes_rectangle(
                &region,
                lam,
                section.n_x.iter().copied(),
                section.n_y.iter().copied(),
                variant,
            )?;
            for mode in &modes {
                let st = joint_bc_residual(
                    &region,
                    mode,
                    &lambda_x,
                    &lambda_y,
                    cfg.numerics.boundary_points,
                )?;
                residual_rows.push(json!({
                    "variant": mode.variant(),
                    "mu": mode.mu(),
                    "max": st.max,
                    "rms": st.rms,
                    "corner_density": st.corner_density,
                }));
            }
        }
    }

    let path = opts.out_dir.join("verdict.json");
    write_file(
        &path,
        &serde_json::to_string_pretty(&json!({
            "verdict": verdict,
            "mode_residuals": residual_rows,
        }))?,
    )?;
    Ok(vec![path])
}
