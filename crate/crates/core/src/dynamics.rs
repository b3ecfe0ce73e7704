//! Propagator and second moments of the two cavity modes.
//!
//! The printed coefficients p and q± diverge where μ₊ = μ₋, but only the
//! products p·Δ, q±·Δ and the ratio sinh(Δt/2)/Δ reach the observables. Both
//! the propagator and the near-degenerate moment path are written in terms of
//! those finite combinations.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::params::{Model, Regime, SpectralData, SystemParams};

/// |Δt/2| below which sinh(z)/z is summed from its Taylor series.
const SINHC_SERIES_RADIUS: f64 = 1e-4;

/// |Δ|/Σ below which the moments use the regrouped series instead of the
/// verbatim three-exponential sums.
pub const NEAR_DEGENERATE_RATIO: f64 = 1e-2;

/// sinh(z)/z, finite at the origin.
pub fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < SINHC_SERIES_RADIUS {
        let w = z * z;
        // 1 + w/3! + w²/5! + w³/7! + w⁴/9!
        Complex64::new(1.0, 0.0)
            + w * (1.0 / 6.0 + w * (1.0 / 120.0 + w * (1.0 / 5040.0 + w * (1.0 / 362_880.0))))
    } else {
        z.sinh() / z
    }
}

/// Entries of G(t) = [[C₊, D₊], [D₋, C₋]], the map from initial to current
/// amplitudes of (α, β*).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorCoeffs {
    pub t: f64,
    pub c_plus: Complex64,
    pub c_minus: Complex64,
    pub d_plus: Complex64,
    pub d_minus: Complex64,
}

impl PropagatorCoeffs {
    pub fn max_imag(&self) -> f64 {
        [self.c_plus, self.c_minus, self.d_plus, self.d_minus]
            .iter()
            .map(|c| c.im.abs())
            .fold(0.0, f64::max)
    }

    /// True when every imaginary part sits within roundoff of zero.
    pub fn is_real(&self) -> bool {
        [self.c_plus, self.c_minus, self.d_plus, self.d_minus]
            .iter()
            .all(|c| c.im.abs() <= 1e-10 * (1.0 + c.norm()))
    }

    /// Real parts as a 2×2 matrix.
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(
            self.c_plus.re,
            self.d_plus.re,
            self.d_minus.re,
            self.c_minus.re,
        )
    }

    pub fn det(&self) -> Complex64 {
        self.c_plus * self.c_minus - self.d_plus * self.d_minus
    }
}

pub fn propagator(s: &SpectralData, t: f64) -> Result<PropagatorCoeffs> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let envelope = (-0.5 * s.mu_sum * t).exp();
    let z = s.mu_diff * (0.5 * t);
    let ch = z.cosh() * envelope;
    // sinh(Δt/2)/Δ
    let sh = sinhc(z) * (0.5 * t * envelope);
    Ok(PropagatorCoeffs {
        t,
        c_plus: ch + sh * s.p_times_diff,
        c_minus: ch - sh * s.p_times_diff,
        d_plus: -sh * s.qp_times_diff,
        d_minus: -sh * s.qm_times_diff,
    })
}

/// Generator Λ of the amplitude dynamics, G(t) = exp(−Λt).
pub fn drift_matrix(s: &SpectralData) -> Mat2 {
    let half_sum = 0.5 * s.mu_sum;
    Mat2::new(
        half_sum - 0.5 * s.p_times_diff,
        0.5 * s.qp_times_diff,
        0.5 * s.qm_times_diff,
        half_sum + 0.5 * s.p_times_diff,
    )
}

/// Normally ordered second moments at time `t` (`t = ∞` for the stationary
/// limit).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    pub t: f64,
    /// ⟨α*α⟩
    pub n_a: f64,
    /// ⟨β*β⟩
    pub n_b: f64,
    /// ⟨αβ⟩ = ⟨α*β*⟩
    pub c_ab: f64,
    /// n_a·n_b − c_ab², evaluated without cancellation where the dynamics
    /// allows it.
    pub det: f64,
}

impl SecondMoments {
    pub fn new(t: f64, n_a: f64, n_b: f64, c_ab: f64) -> Self {
        Self {
            t,
            n_a,
            n_b,
            c_ab,
            det: n_a * n_b - c_ab * c_ab,
        }
    }

    pub fn vacuum() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0)
    }

    pub fn is_steady_state(&self) -> bool {
        self.t == f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy)]
enum Horizon {
    Finite(f64),
    Infinite,
}

impl Horizon {
    fn time(self) -> f64 {
        match self {
            Horizon::Finite(t) => t,
            Horizon::Infinite => f64::INFINITY,
        }
    }

    /// 1 − e^{−x t}
    fn rise(self, x: Complex64) -> Complex64 {
        match self {
            Horizon::Finite(t) => Complex64::new(1.0, 0.0) - (-x * t).exp(),
            Horizon::Infinite => Complex64::new(1.0, 0.0),
        }
    }

    /// ∫₀ᵗ e^{−xτ} dτ for real x.
    fn integral(self, x: f64) -> f64 {
        match self {
            Horizon::Finite(t) if x == 0.0 => t,
            Horizon::Finite(t) => -(-x * t).exp_m1() / x,
            Horizon::Infinite => 1.0 / x,
        }
    }
}

/// Second moments at time `t` for raw parameters.
pub fn second_moments(p: &SystemParams, t: f64) -> Result<SecondMoments> {
    moments_at(&Model::new(*p)?, t)
}

/// Second moments for an already derived model.
pub fn moments_at(model: &Model, t: f64) -> Result<SecondMoments> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if t == f64::INFINITY {
        model.spectrum.ensure_stable()?;
        return Ok(evaluate(model, Horizon::Infinite));
    }
    if t == 0.0 {
        return Ok(SecondMoments::vacuum());
    }
    Ok(evaluate(model, Horizon::Finite(t)))
}

/// The t → ∞ limit; only defined for a stable spectrum.
pub fn steady_state_moments(p: &SystemParams) -> Result<SecondMoments> {
    let model = Model::new(*p)?;
    model.spectrum.ensure_stable()?;
    Ok(evaluate(&model, Horizon::Infinite))
}

fn uses_series(s: &SpectralData) -> bool {
    s.regime == Regime::Degenerate
        || s.mu_diff_sq.abs() <= (NEAR_DEGENERATE_RATIO * s.mu_sum).powi(2)
}

fn evaluate(model: &Model, horizon: Horizon) -> SecondMoments {
    let s = &model.spectrum;
    let (n_a, n_b, c_ab) = if uses_series(s) {
        regrouped(model, horizon)
    } else {
        verbatim(model, horizon)
    };
    let det = if s.stable {
        n_a * n_b - c_ab * c_ab
    } else {
        projected_det(model, horizon)
    };
    SecondMoments {
        t: horizon.time(),
        n_a,
        n_b,
        c_ab,
        det,
    }
}

/// The three-exponential closed forms with complex p, q±.
fn verbatim(model: &Model, horizon: Horizon) -> (f64, f64, f64) {
    let s = &model.spectrum;
    let (Some(p), Some(qp), Some(qm)) = (s.p_raw, s.q_plus_raw, s.q_minus_raw) else {
        unreachable!("verbatim path requires a non-degenerate spectrum");
    };
    let a = model.params.gain_a;
    let b = model.derived.b_coef;
    let l = model.noise.l_coef;
    let m = model.noise.m_coef;
    let mp = s.mu_plus;
    let mm = s.mu_minus;
    let sum = Complex64::new(s.mu_sum, 0.0);
    let one = Complex64::new(1.0, 0.0);

    let r_plus = horizon.rise(2.0 * mp);
    let r_minus = horizon.rise(2.0 * mm);
    let r_sum = horizon.rise(sum);

    let n_a = a * (l * (one - p).powi(2) + m * qp * (one - p)) / (8.0 * b * mp) * r_plus
        + a * (l * (one + p).powi(2) - m * qp * (one + p)) / (8.0 * b * mm) * r_minus
        + a * (l * (one - p * p) + m * qp * p) / (2.0 * b * sum) * r_sum;

    let n_b = a * (l * qm * qm + m * qm * (one + p)) / (8.0 * b * mp) * r_plus
        + a * (l * qm * qm - m * qm * (one - p)) / (8.0 * b * mm) * r_minus
        - a * (l * qm * qm + m * qm * p) / (2.0 * b * sum) * r_sum;

    let mix = one - p * p + qm * qp;
    let c_ab = a * (2.0 * l * qm * (one - p) + m * mix) / (16.0 * b * mp) * r_plus
        - a * (2.0 * l * qm * (one + p) - m * mix) / (16.0 * b * mm) * r_minus
        + a * (2.0 * l * qm * p + m * (one + p * p - qm * qp)) / (4.0 * b * sum) * r_sum;

    (n_a.re, n_b.re, c_ab.re)
}

/// Regularized lower incomplete gamma P(a, x) for integer a ≥ 1.
fn lower_gamma_ratio(a: u32, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    let af = f64::from(a);
    if x < af + 1.0 {
        // e^{−x} x^a / a! · Σ x^k / ((a+1)⋯(a+k))
        let mut lead = (-x).exp();
        for j in 1..=a {
            lead *= x / f64::from(j);
        }
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1.0;
        while term > 1e-17 * sum {
            term *= x / (af + k);
            sum += term;
            k += 1.0;
        }
        lead * sum
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..a {
            term *= x / f64::from(j);
            sum += term;
        }
        1.0 - (-x).exp() * sum
    }
}

/// Moments rewritten on e^{−Στ}·{cosh², cosh·sinh/Δ, sinh²/Δ²} integrals,
/// summed as series in Δ²/Σ². Finite and cancellation-free through μ₊ = μ₋.
fn regrouped(model: &Model, horizon: Horizon) -> (f64, f64, f64) {
    let s = &model.spectrum;
    let sigma = s.mu_sum;
    let diff_sq = s.mu_diff_sq;
    let ratio = diff_sq / (sigma * sigma);
    let x = sigma * horizon.time();

    let j0 = lower_gamma_ratio(1, x) / sigma;
    let mut js = 0.0;
    let mut kss = 0.0;
    let mut power = 1.0;
    for k in 0..16u32 {
        let dj = power * lower_gamma_ratio(2 * k + 2, x);
        let dk = power * lower_gamma_ratio(2 * k + 3, x);
        js += dj;
        kss += dk;
        if dj.abs() <= 1e-18 * js.abs() && dk.abs() <= 1e-18 * kss.abs() {
            break;
        }
        power *= ratio;
    }
    js /= sigma * sigma;
    kss /= sigma * sigma * sigma;

    let i_cc = j0 + 0.5 * diff_sq * kss;
    let i_cs = 0.5 * js;
    let i_ss = 0.5 * kss;

    let pd = s.p_times_diff;
    let qp = s.qp_times_diff;
    let qm = s.qm_times_diff;
    let daa = model.noise.d_aa;
    let dab = model.noise.d_ab;

    let n_a = daa * (i_cc + 2.0 * pd * i_cs + pd * pd * i_ss) - 2.0 * dab * qp * (i_cs + pd * i_ss);
    let n_b = daa * qm * qm * i_ss - 2.0 * dab * qm * (i_cs - pd * i_ss);
    let c_ab = -daa * qm * (i_cs + pd * i_ss) + dab * (i_cc + (qp * qm - pd * pd) * i_ss);
    (n_a, n_b, c_ab)
}

/// n_a·n_b − c_ab² in the basis of the rank-one spectral projectors of G.
///
/// Only used for real, well separated μ±: there the growing mode makes the
/// naive product cancel to leading order.
fn projected_det(model: &Model, horizon: Horizon) -> f64 {
    let s = &model.spectrum;
    let delta = s.mu_diff.re;
    let p = s.p_times_diff / delta;
    let qp = s.qp_times_diff / delta;
    let qm = s.qm_times_diff / delta;
    let mu_p = s.mu_plus.re;
    let mu_m = s.mu_minus.re;
    let daa = model.noise.d_aa;
    let dab = model.noise.d_ab;

    // G(τ) = e^{−μ₊τ} u₊w₊ᵀ + e^{−μ₋τ} u₋w₋ᵀ
    let w_plus = [0.5 * qm / (1.0 + p), 0.5];
    let w_minus = [0.5, -0.5 * qp / (1.0 + p)];
    let quad = |x: [f64; 2], y: [f64; 2]| x[0] * (daa * y[0] + dab * y[1]) + x[1] * (dab * y[0]);
    let k_pp = quad(w_plus, w_plus) * horizon.integral(2.0 * mu_p);
    let k_mm = quad(w_minus, w_minus) * horizon.integral(2.0 * mu_m);
    let k_pm = quad(w_plus, w_minus) * horizon.integral(mu_p + mu_m);
    4.0 * (1.0 + p) * (1.0 + p) * (k_pp * k_mm - k_pm * k_pm)
}
