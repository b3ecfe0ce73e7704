//! Independent check of the closed-form moments.
//!
//! The moment matrix N = [[n_a, c_ab], [c_ab, n_b]] of (α, β*) obeys the
//! linear equation dN/dt = −ΛN − NΛᵀ + D, with Λ the drift matrix and
//! D = [[A·L/B, A·M/2B], [A·M/2B, 0]]. This module integrates it with
//! classical RK4 from the vacuum. Nothing here touches the closed-form
//! moment expressions.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{drift_matrix, moments_at, SecondMoments};
use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::params::{DiffusionData, Model, Regime, SystemParams};
use crate::scenario::fmt_float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    pub t: f64,
    pub n_a: f64,
    pub n_b: f64,
    pub c_ab: f64,
}

impl MomentState {
    pub fn vacuum() -> Self {
        Self {
            t: 0.0,
            n_a: 0.0,
            n_b: 0.0,
            c_ab: 0.0,
        }
    }

    fn as_array(&self) -> [f64; 3] {
        [self.n_a, self.n_b, self.c_ab]
    }

    fn from_array(t: f64, v: [f64; 3]) -> Self {
        Self {
            t,
            n_a: v[0],
            n_b: v[1],
            c_ab: v[2],
        }
    }
}

/// Time derivative of (n_a, n_b, c_ab).
pub fn moment_rhs(lambda: &Mat2, d: &DiffusionData, s: &MomentState) -> [f64; 3] {
    let [[l11, l12], [l21, l22]] = lambda.0;
    [
        -2.0 * l11 * s.n_a - 2.0 * l12 * s.c_ab + d.d_aa,
        -2.0 * l22 * s.n_b - 2.0 * l21 * s.c_ab + d.d_bb(),
        -(l11 + l22) * s.c_ab - l21 * s.n_a - l12 * s.n_b + d.d_ab,
    ]
}

fn rk4_step(lambda: &Mat2, d: &DiffusionData, s: &MomentState, h: f64) -> MomentState {
    let y = s.as_array();
    let shifted = |k: [f64; 3], f: f64| {
        MomentState::from_array(s.t, [y[0] + f * k[0], y[1] + f * k[1], y[2] + f * k[2]])
    };
    let k1 = moment_rhs(lambda, d, s);
    let k2 = moment_rhs(lambda, d, &shifted(k1, 0.5 * h));
    let k3 = moment_rhs(lambda, d, &shifted(k2, 0.5 * h));
    let k4 = moment_rhs(lambda, d, &shifted(k3, h));
    let mut next = [0.0; 3];
    for i in 0..3 {
        next[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    MomentState::from_array(s.t + h, next)
}

/// Largest step accepted by [`integrate_moments`].
pub fn step_limit(model: &Model) -> f64 {
    let s = &model.spectrum;
    0.1 / s
        .mu_plus
        .norm()
        .max(s.mu_minus.norm())
        .max(model.params.kappa)
}

/// Step used by [`compare`]: small against the largest drift entry, since a
/// strongly non-normal Λ sets the RK4 error well above its eigenvalues.
pub fn oracle_step(model: &Model) -> f64 {
    let lambda = drift_matrix(&model.spectrum);
    (0.01f64)
        .min(0.01 / lambda.max_abs())
        .min(step_limit(model))
}

/// RK4 trajectory on [0, t_end] from the vacuum, with the step shrunk so the
/// last point lands on `t_end`.
pub fn integrate_moments(p: &SystemParams, t_end: f64, dt: f64) -> Result<Vec<MomentState>> {
    let model = Model::new(*p)?;
    if !(t_end >= 0.0) {
        return Err(Error::NegativeTime(t_end));
    }
    let limit = step_limit(&model);
    if !(dt > 0.0 && dt <= limit) {
        return Err(Error::StepTooLarge { dt, limit });
    }
    let mut out = vec![MomentState::vacuum()];
    if t_end == 0.0 {
        return Ok(out);
    }
    let lambda = drift_matrix(&model.spectrum);
    let steps = (t_end / dt).ceil() as usize;
    let h = t_end / steps as f64;
    out.reserve(steps);
    let mut state = MomentState::vacuum();
    for i in 1..=steps {
        state = rk4_step(&lambda, &model.noise, &state, h);
        state.t = i as f64 * h;
        out.push(state);
    }
    Ok(out)
}

/// Integrates to a single time without keeping the trajectory.
pub fn integrate_to(model: &Model, t: f64, dt: f64) -> MomentState {
    let lambda = drift_matrix(&model.spectrum);
    let steps = (t / dt).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut state = MomentState::vacuum();
    for _ in 0..steps {
        state = rk4_step(&lambda, &model.noise, &state, h);
    }
    state.t = t;
    state
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub params: SystemParams,
    pub t: f64,
}

/// Outcome of running both evaluation paths over a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub grid: Vec<GridPoint>,
    /// Per point, relative error of (n_a, n_b, c_ab) against 1 + |closed form|.
    pub errors: Vec<[f64; 3]>,
    pub max_rel_err: [f64; 3],
    /// Grid index where each component's worst error occurred.
    pub worst_point: [usize; 3],
    pub tolerance: f64,
    pub pass: bool,
}

pub const COMPONENTS: [&str; 3] = ["n_a", "n_b", "c_ab"];

impl ComparisonReport {
    pub fn max_error(&self) -> f64 {
        self.max_rel_err.iter().copied().fold(0.0, f64::max)
    }

    /// Components whose worst error exceeds the tolerance.
    pub fn failing_components(&self) -> Vec<&'static str> {
        COMPONENTS
            .iter()
            .zip(self.max_rel_err.iter())
            .filter(|(_, e)| !(**e <= self.tolerance))
            .map(|(name, _)| *name)
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "kappa,gamma,omega,theta,gain_a,t,err_n_a,err_n_b,err_c_ab"
        )?;
        for (g, e) in self.grid.iter().zip(self.errors.iter()) {
            let p = g.params;
            let cells = [
                p.kappa, p.gamma, p.omega, p.theta, p.gain_a, g.t, e[0], e[1], e[2],
            ];
            let line: Vec<String> = cells.iter().map(|x| fmt_float(*x)).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

pub fn compare(grid: &[GridPoint], tolerance: f64) -> ComparisonReport {
    compare_with(grid, tolerance, moments_at)
}

/// [`compare`] against an arbitrary closed-form evaluator.
pub fn compare_with<F>(grid: &[GridPoint], tolerance: f64, closed_form: F) -> ComparisonReport
where
    F: Fn(&Model, f64) -> Result<SecondMoments> + Sync,
{
    let errors: Vec<[f64; 3]> = grid
        .par_iter()
        .map(|g| {
            let Ok(model) = Model::new(g.params) else {
                return [f64::NAN; 3];
            };
            let Ok(cf) = closed_form(&model, g.t) else {
                return [f64::NAN; 3];
            };
            let ode = integrate_to(&model, g.t, oracle_step(&model));
            let rel = |a: f64, b: f64| (a - b).abs() / (1.0 + a.abs());
            [
                rel(cf.n_a, ode.n_a),
                rel(cf.n_b, ode.n_b),
                rel(cf.c_ab, ode.c_ab),
            ]
        })
        .collect();

    let mut max_rel_err = [0.0f64; 3];
    let mut worst_point = [0usize; 3];
    for (i, e) in errors.iter().enumerate() {
        for k in 0..3 {
            // NaN counts as worst
            if !(e[k] <= max_rel_err[k]) {
                max_rel_err[k] = if e[k].is_nan() { f64::INFINITY } else { e[k] };
                worst_point[k] = i;
            }
        }
    }
    let pass = !grid.is_empty() && max_rel_err.iter().all(|e| *e <= tolerance);
    ComparisonReport {
        grid: grid.to_vec(),
        errors,
        max_rel_err,
        worst_point,
        tolerance,
        pass,
    }
}

/// Draws stable parameter sets away from the degenerate band, each paired
/// with `times` uniformly drawn times in (0, t_max].
pub fn random_grid(seed: u64, draws: usize, times: usize, t_max: f64) -> Vec<GridPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = Vec::with_capacity(draws * times);
    let mut accepted = 0;
    while accepted < draws {
        let omega = if rng.gen_bool(0.3) {
            0.0
        } else {
            rng.gen_range(0.0..15.0)
        };
        let params = SystemParams::new(
            rng.gen_range(0.2..2.0),
            rng.gen_range(0.3..2.0),
            omega,
            rng.gen_range(0.0..1.5),
            rng.gen_range(1.0..30.0),
        );
        let Ok(model) = Model::new(params) else {
            continue;
        };
        if !model.spectrum.stable || model.spectrum.regime == Regime::Degenerate {
            continue;
        }
        accepted += 1;
        for _ in 0..times {
            grid.push(GridPoint {
                params,
                t: t_max * (1.0 - rng.gen::<f64>()),
            });
        }
    }
    grid
}

/// Draws from inside the degenerate band (Ω = 0, γ within 10⁻⁹·e^{−θ} of
/// e^{−θ}).
pub fn degenerate_grid(seed: u64, draws: usize, times: usize, t_max: f64) -> Vec<GridPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grid = Vec::with_capacity(draws * times);
    let mut accepted = 0;
    while accepted < draws {
        let theta: f64 = rng.gen_range(0.0..1.5);
        let offset: f64 = rng.gen_range(-4e-10..4e-10);
        let params = SystemParams::new(
            rng.gen_range(0.2..2.0),
            (-theta).exp() * (1.0 + offset),
            0.0,
            theta,
            rng.gen_range(1.0..30.0),
        );
        let Ok(model) = Model::new(params) else {
            continue;
        };
        if model.spectrum.regime != Regime::Degenerate {
            continue;
        }
        accepted += 1;
        for _ in 0..times {
            grid.push(GridPoint {
                params,
                t: t_max * (1.0 - rng.gen::<f64>()),
            });
        }
    }
    grid
}
