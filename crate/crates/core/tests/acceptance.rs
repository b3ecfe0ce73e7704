//! Acceptance suite. Prints one PASS/FAIL line per criterion and fails at
//! the end if any criterion failed, so every line is always reported.

use std::time::{Duration, Instant};

use cascade_core::criteria::symplectic_smallest_direct;
use cascade_core::oracle::{degenerate_grid, random_grid};
use cascade_core::scenario::{TimeGrid, PRESET_IDS};
use cascade_core::{
    compare, covariance, moments_at, preset, propagator, report, report_from_moments, run,
    steady_state_moments, symplectic_smallest, HzFlag, Model, Regime, ResultTable, SecondMoments,
    SystemParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Slack on "monotone" and "extremum" decisions; V_s curves carry
/// overshoots of order 1e-6 that are not oscillations.
const MONOTONE_TOL: f64 = 1e-5;

struct Outcome {
    id: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { id, pass, detail }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

type Curve = (Option<f64>, Vec<(f64, f64)>);

/// Curves of one preset keyed by sweep value: (t, value) pairs.
fn curves(table: &ResultTable, column: &str) -> Vec<Curve> {
    let sv = table.column("sweep_value").unwrap();
    let t = table.column("t").unwrap();
    let col = table.column(column).unwrap();
    let mut out: Vec<Curve> = Vec::new();
    for row in &table.rows {
        let key = row[sv].as_f64();
        let point = (
            row[t].as_f64().unwrap(),
            row[col].as_f64().unwrap_or(f64::NAN),
        );
        match out.last_mut() {
            Some((k, pts)) if *k == key => pts.push(point),
            _ => out.push((key, vec![point])),
        }
    }
    out
}

/// Interior local extrema whose depth on both sides exceeds `tol`.
fn extrema(values: &[f64], tol: f64) -> usize {
    // collapse the sequence into alternating runs, ignoring moves below tol
    let mut count = 0;
    let mut anchor = values[0];
    let mut dir = 0i8;
    for &v in &values[1..] {
        let step = v - anchor;
        if step.abs() <= tol {
            continue;
        }
        let d = if step > 0.0 { 1 } else { -1 };
        if dir != 0 && d != dir {
            count += 1;
        }
        if d != dir || (d > 0 && v > anchor) || (d < 0 && v < anchor) {
            anchor = v;
        }
        dir = d;
    }
    count
}

fn run_preset(id: &str) -> ResultTable {
    run(&preset(id).unwrap()).unwrap()
}

fn c1_steady_anchor_a() -> Outcome {
    let (v_s, took) = timed(|| {
        let sm = steady_state_moments(&SystemParams::new(0.5, 1.0, 0.0, 0.0, 10.0)).unwrap();
        report_from_moments(&sm).unwrap().v_s
    });
    let pass = (v_s - 0.5).abs() <= 0.05 && took < Duration::from_secs(1);
    outcome(
        "1 steady-state anchor A",
        pass,
        format!("V_s(inf)={v_s:.5}, target 0.5+-0.05, {took:?}"),
    )
}

fn c2_steady_anchor_b() -> Outcome {
    let (vals, took) = timed(|| {
        let mut vals = Vec::new();
        for id in ["fig5", "fig6", "fig7"] {
            let table = run_preset(id);
            for (key, pts) in curves(&table, "v_s") {
                vals.push((id, key.unwrap(), pts.last().unwrap().1));
            }
        }
        vals
    });
    let bad: Vec<String> = vals
        .iter()
        .filter(|(_, _, v)| (v - 0.4).abs() > 0.05)
        .map(|(id, k, v)| format!("{id}@{k}:{v:.3}"))
        .collect();
    let pass = bad.is_empty() && took < Duration::from_secs(1);
    outcome(
        "2 steady-state anchor B",
        pass,
        format!(
            "{} of {} curves outside 0.4+-0.05 at t=50 [{}], {took:?}",
            bad.len(),
            vals.len(),
            bad.join(" ")
        ),
    )
}

fn c3_oracle() -> Outcome {
    let ((generic, degenerate), took) = timed(|| {
        (
            compare(&random_grid(1, 100, 10, 20.0), 1e-6),
            compare(&degenerate_grid(2, 20, 10, 20.0), 1e-5),
        )
    });
    let pass = generic.pass && degenerate.pass && took < Duration::from_secs(30);
    outcome(
        "3 oracle equivalence",
        pass,
        format!(
            "generic max rel err {:.2e} (tol 1e-6), degenerate {:.2e} (tol 1e-5), {took:?}",
            generic.max_error(),
            degenerate.max_error()
        ),
    )
}

fn c4_degenerate_continuity() -> Outcome {
    let mut worst = 0.0f64;
    let mut kink = 0.0f64;
    let mut finite = true;
    for t in [0.1, 1.0, 5.0, 20.0, 50.0] {
        let at = |chi: f64| {
            let sm = moments_at(
                &Model::new(SystemParams::new(0.5, chi, 0.0, 0.0, 10.0)).unwrap(),
                t,
            )
            .unwrap();
            let v = report_from_moments(&sm).unwrap().v_s;
            [sm.n_a, sm.n_b, sm.c_ab, v]
        };
        let centre = at(1.0);
        finite &= centre.iter().all(|x| x.is_finite());
        let (lo, hi) = (at(1.0 - 1e-7), at(1.0 + 1e-7));
        for k in 0..4 {
            worst = worst.max(rel(lo[k], centre[k])).max(rel(hi[k], centre[k]));
            // second difference: zero for a smooth curve, O(1) for a jump
            kink = kink.max((lo[k] + hi[k] - 2.0 * centre[k]).abs() / centre[k].abs());
        }
    }
    outcome(
        "4 degenerate continuity",
        finite && worst <= 1e-5,
        format!("max rel diff {worst:.2e} (tol 1e-5), second difference {kink:.1e}, finite at chi=1: {finite}"),
    )
}

fn c5_regime_dichotomy() -> Outcome {
    let grid = TimeGrid::new(50.0, 2001).times();
    let (mut points, mut class_bad, mut extremum_bad, mut eval_err) = (0, 0, Vec::new(), 0);
    for i in 0..20 {
        for j in 0..20 {
            let chi = (i + 1) as f64 / 10.0;
            let theta = 1.5 * j as f64 / 19.0;
            let model = Model::new(SystemParams::new(0.5, chi, 0.0, theta, 10.0)).unwrap();
            points += 1;
            let osc = model.spectrum.regime == Regime::Oscillatory;
            if osc != (chi < (-theta).exp()) {
                class_bad += 1;
            }
            let v: Result<Vec<f64>, _> = grid[1..]
                .iter()
                .map(|&t| {
                    moments_at(&model, t)
                        .and_then(|sm| report_from_moments(&sm))
                        .map(|r| r.v_s)
                })
                .collect();
            match v {
                Ok(v) => {
                    if (extrema(&v, MONOTONE_TOL) >= 1) != osc {
                        extremum_bad.push((chi, theta, osc));
                    }
                }
                Err(_) => eval_err += 1,
            }
        }
    }
    let non_osc_with_extremum = extremum_bad.iter().filter(|(_, _, o)| !o).count();
    outcome(
        "5 regime dichotomy",
        class_bad == 0 && extremum_bad.is_empty() && eval_err == 0,
        format!(
            "{points} points: classification mismatches {class_bad}; extremum-iff-oscillatory mismatches {} \
             ({non_osc_with_extremum} non-oscillatory curves with a V_s extremum); evaluation errors {eval_err}",
            extremum_bad.len()
        ),
    )
}

fn random_stable(rng: &mut ChaCha8Rng) -> Model {
    loop {
        let omega = if rng.gen_bool(0.3) {
            0.0
        } else {
            rng.gen_range(0.0..15.0)
        };
        let p = SystemParams::new(
            rng.gen_range(0.2..2.0),
            rng.gen_range(0.3..2.0),
            omega,
            rng.gen_range(0.0..1.5),
            rng.gen_range(1.0..30.0),
        );
        let m = Model::new(p).unwrap();
        if m.spectrum.stable && m.spectrum.regime != Regime::Degenerate {
            return m;
        }
    }
}

fn c6_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = [0.0f64; 4];
    for _ in 0..1000 {
        let model = random_stable(&mut rng);
        let s = &model.spectrum;
        let (p, qp, qm) = (
            s.p_raw.unwrap(),
            s.q_plus_raw.unwrap(),
            s.q_minus_raw.unwrap(),
        );
        worst[0] = worst[0].max((p * p + qp * qm - 1.0).norm());

        let t: f64 = rng.gen_range(0.0..10.0);
        let u: f64 = rng.gen_range(0.0..10.0);
        let g = |t| propagator(s, t).unwrap().matrix();
        // entries grow like e^{|Δ|t/2} while the determinant decays, so the
        // residual is measured against the products that cancel
        let gt = g(t);
        let terms = (gt.get(0, 0) * gt.get(1, 1)).abs() + (gt.get(0, 1) * gt.get(1, 0)).abs();
        worst[1] = worst[1].max((gt.det() - (-s.mu_sum * t).exp()).abs() / terms);
        let lhs = g(t + u);
        let rhs = g(t).mul(&g(u));
        worst[2] = worst[2].max(lhs.sub(&rhs).max_abs() / lhs.max_abs().max(rhs.max_abs()));

        let sm = moments_at(&model, t).unwrap();
        let normal =
            16.0 * (0.25 + 0.5 * (sm.n_a + sm.n_b) + sm.n_a * sm.n_b - sm.c_ab * sm.c_ab).powi(2);
        let cv = covariance(&sm).unwrap();
        let block = (cv.m * cv.n - cv.c * cv.c).powi(2);
        let scale = (cv.m * cv.n).powi(2) + cv.c.powi(4);
        worst[3] = worst[3]
            .max((normal - block).abs() / scale)
            .max((cv.det_xi - block).abs() / scale);
    }
    outcome(
        "6 algebraic identities",
        worst.iter().all(|w| *w <= 1e-9),
        format!(
            "1000 draws: p^2+q+q- {:.1e}, det G {:.1e}, semigroup {:.1e}, det Xi routes {:.1e} (tol 1e-9)",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn c7_vacuum() -> Outcome {
    let mut bad = Vec::new();
    for id in PRESET_IDS {
        let config = preset(id).unwrap();
        for (_, params) in config.parameter_sets() {
            let r = report(&params, 0.0).unwrap();
            if !(r.v_s == 1.0 && r.e_n == 0.0 && r.dgcz == 2.0 && r.hz_flag == HzFlag::Undefined) {
                bad.push(id);
            }
        }
    }
    outcome(
        "7 vacuum start",
        bad.is_empty(),
        format!("presets off vacuum at t=0: {bad:?}"),
    )
}

fn first_minimum(pts: &[(f64, f64)]) -> f64 {
    pts.windows(3)
        .find(|w| w[1].1 < w[0].1 && w[1].1 <= w[2].1)
        .map_or(pts.last().unwrap().1, |w| w[1].1)
}

fn c8a_fig1_ordering() -> Outcome {
    let mins: Vec<(f64, f64)> = curves(&run_preset("fig1"), "v_s")
        .into_iter()
        .map(|(k, pts)| (k.unwrap(), first_minimum(&pts)))
        .collect();
    let pass = mins.windows(2).all(|w| w[0].1 < w[1].1);
    let shown: Vec<String> = mins
        .iter()
        .map(|(k, v)| format!("chi={k}:{v:.4}"))
        .collect();
    outcome(
        "8a fig1 ordering",
        pass,
        format!("first V_s minima {}", shown.join(" ")),
    )
}

fn c8b_fig7_ordering() -> Outcome {
    let ends: Vec<(f64, f64)> = curves(&run_preset("fig7"), "v_s")
        .into_iter()
        .map(|(k, pts)| (k.unwrap(), pts.last().unwrap().1))
        .collect();
    let pass = ends.windows(2).all(|w| w[0].1 > w[1].1);
    let shown: Vec<String> = ends
        .iter()
        .map(|(k, v)| format!("theta={k}:{v:.4}"))
        .collect();
    outcome(
        "8b fig7 ordering",
        pass,
        format!("V_s(50) {}", shown.join(" ")),
    )
}

fn c8c_no_oscillation() -> Outcome {
    // an oscillation needs at least two turning points; a single shallow dip
    // before the plateau is reported but not counted
    let mut oscillating = Vec::new();
    let mut dips = 0;
    let mut worst_rise = 0.0f64;
    for id in ["fig5", "fig6", "fig7", "fig8"] {
        for (k, pts) in curves(&run_preset(id), "v_s") {
            let v: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let lowest = v.iter().copied().fold(f64::INFINITY, f64::min);
            worst_rise = worst_rise.max(v.last().unwrap() - lowest);
            match extrema(&v, MONOTONE_TOL) {
                0 => {}
                1 => dips += 1,
                _ => oscillating.push(format!("{id}@{}", k.unwrap())),
            }
        }
    }
    outcome(
        "8c no oscillation at omega=10",
        oscillating.is_empty(),
        format!(
            "oscillating curves {oscillating:?}; {dips} curves with one shallow minimum, \
             largest rise after it {worst_rise:.1e}"
        ),
    )
}

fn c8d_fig9_sign_agreement() -> Outcome {
    let table = run_preset("fig9");
    let v = curves(&table, "v_s").remove(0).1;
    let h = curves(&table, "half_dgcz").remove(0).1;
    let steps = v.len() - 1;
    let agree = (0..steps)
        .filter(|&i| (v[i + 1].1 - v[i].1).signum() == (h[i + 1].1 - h[i].1).signum())
        .count();
    let frac = agree as f64 / steps as f64;
    outcome(
        "8d fig9 derivative signs",
        frac >= 0.95,
        format!(
            "sign agreement {:.1}% over {steps} steps on t in [0, 50] (need 95%)",
            100.0 * frac
        ),
    )
}

fn c8e_fig10_divergence() -> Outcome {
    let table = run_preset("fig10");
    let v = curves(&table, "v_s").remove(0).1;
    let h = curves(&table, "half_dgcz").remove(0).1;
    let (v_end, dgcz_end) = (v.last().unwrap().1, 2.0 * h.last().unwrap().1);
    outcome(
        "8e fig10 criteria diverge",
        dgcz_end > 2.0 && v_end < 1.0,
        format!("at t=50: dgcz={dgcz_end:.3e}, V_s={v_end:.3}"),
    )
}

fn c9_hz_positivity() -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for id in PRESET_IDS {
        let config = preset(id).unwrap();
        for (_, params) in config.parameter_sets() {
            let model = Model::new(params).unwrap();
            for t in config.t_grid.times().into_iter().filter(|t| *t > 1.0) {
                let sm = moments_at(&model, t).unwrap();
                let r = report_from_moments(&sm).unwrap();
                checked += 1;
                if r.hz_flag == HzFlag::Defined
                    && r.hz_excess.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater)
                {
                    bad.push(format!("{id} {params:?} t={t:.2} g-2={:.3e}", r.hz_excess));
                }
            }
        }
    }
    outcome(
        "9 HZ positivity",
        bad.is_empty(),
        format!(
            "{checked} rows with t > 1, violations {}: {:?}",
            bad.len(),
            bad.iter().take(3).collect::<Vec<_>>()
        ),
    )
}

fn symmetric_gap(sm: &SecondMoments) -> Option<f64> {
    let cv = covariance(sm).unwrap();
    if (cv.m - cv.n).abs() >= 1e-9 {
        return None;
    }
    let r = report_from_moments(sm).unwrap();
    Some((r.dgcz - 2.0 * r.v_s).abs())
}

fn c10_symmetric_bridge() -> Outcome {
    let mut from_runs = Vec::new();
    for id in PRESET_IDS {
        let config = preset(id).unwrap();
        for (_, params) in config.parameter_sets() {
            let model = Model::new(params).unwrap();
            for t in config.t_grid.times() {
                from_runs.extend(symmetric_gap(&moments_at(&model, t).unwrap()));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let synthetic: Vec<f64> = (0..1000)
        .filter_map(|_| {
            let n: f64 = rng.gen_range(0.0..50.0);
            let c = rng.gen_range(0.0..1.0) * (n * (n + 1.0)).sqrt();
            symmetric_gap(&SecondMoments::new(1.0, n, n, c))
        })
        .collect();
    let worst = from_runs
        .iter()
        .chain(&synthetic)
        .fold(0.0f64, |m, g| m.max(*g));
    outcome(
        "10 symmetric-state bridge",
        worst <= 1e-8,
        format!(
            "{} symmetric preset states + {} synthetic, max |dgcz - 2 V_s| {worst:.1e} (tol 1e-8)",
            from_runs.len(),
            synthetic.len()
        ),
    )
}

#[test]
fn acceptance() {
    let results = [
        c1_steady_anchor_a(),
        c2_steady_anchor_b(),
        c3_oracle(),
        c4_degenerate_continuity(),
        c5_regime_dichotomy(),
        c6_identities(),
        c7_vacuum(),
        c8a_fig1_ordering(),
        c8b_fig7_ordering(),
        c8c_no_oscillation(),
        c8d_fig9_sign_agreement(),
        c8e_fig10_divergence(),
        c9_hz_positivity(),
        c10_symmetric_bridge(),
    ];
    for r in &results {
        println!(
            "criterion {:<32} {}  {}",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn rationalized_and_direct_symplectic_agree_on_presets() {
    for id in ["fig1", "fig5"] {
        let config = preset(id).unwrap();
        for (_, params) in config.parameter_sets() {
            for t in [0.5, 5.0, 20.0] {
                let cv = covariance(&moments_at(&Model::new(params).unwrap(), t).unwrap()).unwrap();
                let a = symplectic_smallest(&cv).unwrap();
                let b = symplectic_smallest_direct(&cv).unwrap();
                assert!(
                    (a - b).abs() <= 1e-6 * a.max(1e-3),
                    "{id} t={t}: {a} vs {b}"
                );
            }
        }
    }
}

#[test]
fn extremum_counter() {
    assert_eq!(extrema(&[3.0, 2.0, 1.0, 1.0 + 1e-7, 0.5], 1e-5), 0);
    assert_eq!(extrema(&[3.0, 1.0, 2.0], 1e-5), 1);
    assert_eq!(extrema(&[0.0, 1.0, 0.0, 1.0, 0.0], 1e-5), 3);
}
