//! Run orchestration: executes the configured pipeline and emits artifacts.

use crate::config::{Ansatz, Mode, RunConfig};
use crate::continuation::{
    branch_start, extract_branch_curve, locate_apex, trace_branch, BranchControls,
};
use crate::error::{Error, Result};
use crate::geometry::{FermiChart, NodalCurve};
use crate::pde::{
    balancing_flux, build_approximate_solution, growth_rate_fit, monotonicity_check, newton_solve,
    AxiGrid,
};
use crate::profile::{self, Constants};
use crate::reduced::{
    integrate_reduced, jacobi_fields_full, nonexistence_probe, toda_residual, ProbeControls,
    StepControl, TodaSolution,
};
use crate::report::*;
use crate::util::Rng;
use std::f64::consts::SQRT_2;
use std::fs;
use std::path::Path;

/// Worker cap from the environment (`TWO_END_LAB_THREADS`), default: the
/// machine's parallelism.
pub fn worker_count() -> usize {
    match std::env::var("TWO_END_LAB_THREADS") {
        Ok(v) => v.parse::<usize>().unwrap_or(1).max(1),
        Err(_) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    /// All enabled assertions passed (exit code 0).
    pub pass: bool,
}

pub fn run(cfg: &RunConfig, out_dir: &Path, quiet: bool) -> Result<RunOutcome> {
    fs::create_dir_all(out_dir)?;
    let constants = Constants::get();
    let mut report = Report::new(cfg.mode.as_str(), cfg.seed, constants.c0, constants.c1);
    let say = |line: &str| {
        if !quiet {
            println!("{line}");
        }
    };

    let pass = match cfg.mode {
        Mode::Verify => run_verify(cfg, constants, &mut report, &say),
        Mode::Solve => run_solve(cfg, out_dir, constants, &mut report, &say)?,
        Mode::Continue => run_continue(cfg, out_dir, &mut report, &say)?,
        Mode::Reduced => run_reduced(cfg, out_dir, constants, &mut report, &say)?,
        Mode::Probe => run_probe(cfg, constants, &mut report, &say)?,
    };

    // Effective config next to the report, for reproducibility.
    fs::write(out_dir.join("config.effective"), cfg.emit())?;
    fs::write(out_dir.join("report.json"), report.to_json())?;
    Ok(RunOutcome { report, pass })
}

fn push_check(report: &mut Report, say: &dyn Fn(&str), name: &str, pass: bool, detail: String) {
    say(&format!(
        "{} {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    ));
    report.checks.push(CheckJson {
        name: name.to_string(),
        pass,
        detail,
    });
}

/// Oracle suite over the profile, geometry and reduced modules.
fn run_verify(
    cfg: &RunConfig,
    constants: Constants,
    report: &mut Report,
    say: &dyn Fn(&str),
) -> bool {
    // constants against the closed forms
    let c0_err = (constants.c0 - profile::C0_CLOSED).abs();
    push_check(
        report,
        say,
        "constants.c0",
        c0_err < 1e-10,
        format!("|c0 - 2sqrt(2)/3| = {c0_err:.3e}"),
    );
    let c1_err = (constants.c1 - profile::C1_CLOSED).abs();
    push_check(
        report,
        say,
        "constants.c1",
        c1_err < 1e-8,
        format!("|c1 - 8| = {c1_err:.3e}"),
    );

    // profile ODE and first integral
    let mut ode: f64 = 0.0;
    let mut equi: f64 = 0.0;
    for i in 0..=800 {
        let t = -20.0 + 0.05 * i as f64;
        ode = ode.max((profile::h2(t) + profile::h(t) - profile::h(t).powi(3)).abs());
        equi =
            equi.max((profile::h1(t).powi(2) - 0.5 * (1.0 - profile::h(t).powi(2)).powi(2)).abs());
    }
    push_check(
        report,
        say,
        "profile.ode",
        ode < 1e-12,
        format!("max residual {ode:.3e}"),
    );
    push_check(
        report,
        say,
        "profile.first_integral",
        equi < 1e-12,
        format!("max defect {equi:.3e}"),
    );

    // explicit Toda solution
    let mut toda_worst: f64 = 0.0;
    for eps in [1.0, 0.1, 0.01] {
        let sol = TodaSolution::new(eps, constants).unwrap();
        for r in [0.1, 1.0, 10.0, 100.0] {
            toda_worst = toda_worst.max(toda_residual(|r, o| sol.eval(r, o), r, constants).abs());
        }
    }
    push_check(
        report,
        say,
        "toda.explicit_residual",
        toda_worst < 1e-9,
        format!("max |residual| {toda_worst:.3e}"),
    );

    // Fermi identities on catenoid and Toda charts
    let fermi = fermi_identity_worst(cfg.seed, constants);
    match fermi {
        Ok((metric, roundtrip)) => {
            push_check(
                report,
                say,
                "fermi.metric_identity",
                metric < 1e-12,
                format!("max |A - (1+f'^2)B^2| = {metric:.3e}"),
            );
            push_check(
                report,
                say,
                "fermi.round_trip",
                roundtrip < 1e-10,
                format!("max drift {roundtrip:.3e}"),
            );
        }
        Err(e) => {
            push_check(report, say, "fermi.identities", false, e.to_string());
        }
    }

    // Jacobi fields
    let mut jac_res: f64 = 0.0;
    let mut wronsk: f64 = 0.0;
    for i in 0..=400 {
        let z = -10.0 + 0.05 * i as f64;
        let (x1, x2, w) = jacobi_fields_full(z);
        for (v, dv, ddv) in [x1, x2] {
            let res = ddv - 2.0 * z.tanh() * dv + v;
            jac_res = jac_res.max(res.abs() / 1.0f64.max(v.abs() + dv.abs() + ddv.abs()));
        }
        let c2 = z.cosh().powi(2);
        wronsk = wronsk.max((w - c2).abs() / c2);
    }
    push_check(
        report,
        say,
        "jacobi.ode_residual",
        jac_res < 1e-10,
        format!("max relative residual {jac_res:.3e}"),
    );
    push_check(
        report,
        say,
        "jacobi.wronskian",
        wronsk < 1e-10,
        format!("max relative defect {wronsk:.3e}"),
    );

    report.checks.iter().all(|c| c.pass)
}

/// Worst metric-identity and round-trip defects over seeded samples on a
/// catenoid chart and a Toda chart (shared by `verify` mode and the
/// acceptance suite).
pub fn fermi_identity_worst(seed: u64, constants: Constants) -> Result<(f64, f64)> {
    let mut worst_metric: f64 = 0.0;
    let mut worst_rt: f64 = 0.0;
    let charts = [
        FermiChart::new(&NodalCurve::catenoid(2.0, 0.0)?, (2.0, 40.0))?,
        FermiChart::new(&NodalCurve::toda(0.1, constants)?, (0.0, 40.0))?,
    ];
    let mut rng = Rng::new(seed.wrapping_add(0x5eed));
    for chart in &charts {
        let (lo, hi) = chart.range();
        let mut metric_done = 0usize;
        let mut rt_done = 0usize;
        while metric_done < 5000 || rt_done < 500 {
            let r1 = rng.uniform(lo + 0.05, hi.min(30.0));
            let d = chart.half_width(r1);
            if d <= 1e-3 {
                continue;
            }
            let z1 = rng.uniform(-0.95 * d, 0.95 * d);
            if metric_done < 5000 {
                let (a, b) = chart.metric_factors(r1, z1)?;
                let fp = chart.curve().eval(r1, 1)?;
                worst_metric = worst_metric.max((a - (1.0 + fp * fp) * b * b).abs());
                metric_done += 1;
            }
            if rt_done < 500 {
                let (r, z) = chart.forward(r1, z1)?;
                let (r1b, z1b) = chart.inverse(r, z)?;
                worst_rt = worst_rt.max((r1 - r1b).abs().max((z1 - z1b).abs()));
                rt_done += 1;
            }
        }
    }
    Ok((worst_metric, worst_rt))
}

fn ansatz_pieces(
    cfg: &RunConfig,
    grid: &AxiGrid,
    constants: Constants,
) -> Result<(NodalCurve, FermiChart)> {
    let curve = match cfg.ansatz {
        Ansatz::Catenoid => NodalCurve::catenoid(cfg.k, cfg.b)?,
        Ansatz::Toda => NodalCurve::toda(cfg.epsilon, constants)?,
    };
    let lo = curve.domain().0;
    let chart = FermiChart::new(&curve, (lo, grid.r_extent + 5.0))?;
    Ok((curve, chart))
}

fn run_solve(
    cfg: &RunConfig,
    out_dir: &Path,
    constants: Constants,
    report: &mut Report,
    say: &dyn Fn(&str),
) -> Result<bool> {
    let grid = AxiGrid::new(cfg.domain_r, cfg.domain_z, cfg.spacing)?;
    let (curve, chart) = ansatz_pieces(cfg, &grid, constants)?;
    let ansatz = build_approximate_solution(&curve, &chart, &grid)?;
    say(&format!(
        "solving {} ansatz on {}x{} grid (h = {})",
        cfg.ansatz.as_str(),
        grid.n_r,
        grid.n_z,
        grid.h_r
    ));
    let out = newton_solve(&ansatz, cfg.newton_tol, cfg.newton_max_iter)?;
    report.residual_history = Some(out.residual_history.clone());
    say(&format!(
        "Newton converged in {} iterations, residual {:.3e}",
        out.iters, out.final_residual
    ));

    let apex = locate_apex(&out.field)?;
    let nodal = extract_branch_curve(&out.field, &apex)?;
    let window = (0.5 * grid.r_extent, grid.r_extent - 2.0 * grid.h_r);
    let fit = growth_rate_fit(&nodal, window)?;
    report.growth_fit = Some(GrowthFitJson {
        k: fit.k,
        c: fit.c,
        rms: fit.rms,
        short_window: fit.short_window,
    });
    let mono = monotonicity_check(&out.field);
    report.monotonicity = Some(MonotonicityJson {
        pass: mono.pass,
        tol: mono.tol,
        worst_ur: mono.worst_ur,
        worst_uz: mono.worst_uz,
    });
    for scale in [0.3, 0.45, 0.6] {
        let r_rect = (0.5 * scale * grid.r_extent, scale * grid.r_extent + 4.0);
        let z_top = scale * grid.z_extent;
        let (value, warn) = balancing_flux(&out.field, r_rect, z_top)?;
        report.flux.push(FluxJson {
            r_lo: r_rect.0,
            r_hi: r_rect.1,
            z_top,
            value,
            boundary_warning: warn,
        });
    }

    fs::write(out_dir.join("field.txt"), out.field.dump())?;
    fs::write(out_dir.join("curve.csv"), nodal.to_csv(512))?;

    let mut pass = mono.pass;
    if cfg.ansatz == Ansatz::Catenoid {
        let rel = (fit.k - cfg.k).abs() / cfg.k;
        let ok = rel <= 0.1;
        say(&format!(
            "growth rate fit k = {:.4} (target {}, rel. error {:.3})",
            fit.k, cfg.k, rel
        ));
        pass &= ok;
    }
    say(&format!(
        "monotonicity: {}",
        if mono.pass { "pass" } else { "FAIL" }
    ));
    Ok(pass)
}

fn branch_rows(report: &mut Report, branch: &crate::continuation::SolutionBranch) {
    for p in &branch.points {
        report.branch.push(BranchRowJson {
            s: p.s,
            k: p.k,
            c: p.c,
            apex_axis: p.apex.axis.as_str().to_string(),
            apex_dist: p.apex.dist,
            newton_iters: p.newton_iters,
            residual_norm: p.residual_norm,
            monotonicity_pass: p.monotonicity_pass,
            flux: p.flux,
        });
    }
    report.branch_termination = Some(branch.termination.as_str().to_string());
}

fn run_continue(
    cfg: &RunConfig,
    out_dir: &Path,
    report: &mut Report,
    say: &dyn Fn(&str),
) -> Result<bool> {
    if cfg.ansatz != Ansatz::Catenoid {
        return Err(Error::CannotStart(
            "continuation starts from a catenoid ansatz".into(),
        ));
    }
    let grid = AxiGrid::new(cfg.domain_r, cfg.domain_z, cfg.spacing)?;
    say(&format!(
        "continuation from k = {} on {}x{} grid, direction {}",
        cfg.k, grid.n_r, grid.n_z, cfg.direction
    ));
    let start = branch_start(&grid, cfg.k)?;
    let controls = BranchControls {
        initial_step: cfg.step_initial,
        min_step: cfg.step_min,
        max_step: cfg.step_max,
        k_floor: cfg.k_floor,
        max_points: cfg.max_points,
        ..Default::default()
    };
    let branch = trace_branch(&start, cfg.direction, &controls)?;
    say(&format!(
        "branch has {} points, termination: {}",
        branch.points.len(),
        branch.termination.as_str()
    ));
    fs::write(out_dir.join("branch.csv"), branch.to_csv())?;
    if cfg.dump_fields {
        for (i, p) in branch.points.iter().enumerate() {
            fs::write(out_dir.join(format!("point_{i:03}.txt")), p.field.dump())?;
        }
    }
    branch_rows(report, &branch);
    let pass = branch.points.len() >= 2
        && branch
            .points
            .iter()
            .all(|p| p.monotonicity_pass && p.residual_norm < 1e-8);
    Ok(pass)
}

fn run_reduced(
    cfg: &RunConfig,
    out_dir: &Path,
    constants: Constants,
    report: &mut Report,
    say: &dyn Fn(&str),
) -> Result<bool> {
    let traj = integrate_reduced(
        cfg.p0,
        cfg.slope0,
        cfg.r0,
        cfg.r_end,
        StepControl {
            i2_amplitude: cfg.i2_amplitude,
            ..Default::default()
        },
        constants,
    )?;
    let check = traj.integral_identity_error(constants);
    say(&format!(
        "reduced trajectory: {} nodes, terminal flux {:.6}, identity error {:.3e}",
        traj.r.len(),
        traj.mu.last().unwrap(),
        check.error
    ));
    fs::write(out_dir.join("trajectory.csv"), traj.to_csv())?;
    report.reduced = Some(ReducedJson {
        r0: cfg.r0,
        r_end: cfg.r_end,
        p0: cfg.p0,
        slope0: cfg.slope0,
        mu_final: *traj.mu.last().unwrap(),
        integral_identity_error: check.error,
        steps_accepted: traj.steps_accepted,
    });
    Ok(check.error < 1e-8)
}

fn run_probe(
    cfg: &RunConfig,
    constants: Constants,
    report: &mut Report,
    say: &dyn Fn(&str),
) -> Result<bool> {
    let controls = ProbeControls {
        trials: cfg.trials,
        r_end: cfg.r_end,
        i2_amplitude: cfg.i2_amplitude,
        workers: worker_count(),
        ..Default::default()
    };
    let probe = nonexistence_probe(cfg.k_target, &controls, constants)?;
    say(&format!(
        "probe k_target = {:.4}: verdict {}, settled {}/{} (delta_obs {:?})",
        probe.k_target,
        probe.verdict(),
        probe.settled,
        probe.trials.len(),
        probe.delta_obs
    ));
    let pass = probe.verdict() == "no-two-end-regime"
        && probe.delta_obs.map(|d| d > 0.0).unwrap_or(false)
        && probe.failed == 0;
    report.probe = Some(ProbeJson {
        k_target: probe.k_target,
        threshold: SQRT_2 / 2.0,
        verdict: probe.verdict().to_string(),
        delta_obs: probe.delta_obs,
        settled: probe.settled,
        rising: probe.rising,
        not_reached: probe.not_reached,
        failed: probe.failed,
        trials: probe
            .trials
            .iter()
            .map(|t| ProbeTrialJson {
                p0: t.p0,
                slope0: t.slope0,
                status: t.status.as_str().to_string(),
                mu_final: t.mu_final,
                mu_gain: t.mu_gain,
                tail_estimate: t.tail_estimate,
                failure: t.failure.clone(),
            })
            .collect(),
    });
    Ok(pass)
}
