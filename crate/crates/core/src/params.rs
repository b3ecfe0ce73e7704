//! Physical inputs, dimensionless groups, the spectrum of the mode dynamics
//! and the noise strengths.
//!
//! All rates are measured in units of the spontaneous decay rate Γ, which is
//! fixed to 1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative width of the band around `disc = 0` that is tagged degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-9;

/// Raw physical rates for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity damping rate κ.
    pub kappa: f64,
    /// Decay rate γ of the injected atomic coherence.
    pub gamma: f64,
    /// Amplitude Ω of the external drive.
    pub omega: f64,
    /// Phase-fluctuation deviation θ.
    pub theta: f64,
    /// Linear gain coefficient A.
    pub gain_a: f64,
}

impl SystemParams {
    pub fn new(kappa: f64, gamma: f64, omega: f64, theta: f64, gain_a: f64) -> Self {
        Self {
            kappa,
            gamma,
            omega,
            theta,
            gain_a,
        }
    }

    pub fn validate(self) -> Result<Self> {
        validate_params(self)
    }
}

/// Checks every invariant of [`SystemParams`] and hands the value back.
pub fn validate_params(raw: SystemParams) -> Result<SystemParams> {
    let fields = [
        ("kappa", raw.kappa),
        ("gamma", raw.gamma),
        ("omega", raw.omega),
        ("theta", raw.theta),
        ("gain_a", raw.gain_a),
    ];
    for (name, value) in fields {
        if !value.is_finite() {
            return Err(Error::NonFinite(name));
        }
    }
    if raw.kappa <= 0.0 {
        return Err(Error::NonPositiveKappa(raw.kappa));
    }
    if raw.gamma <= 0.0 {
        return Err(Error::NonPositiveGamma(raw.gamma));
    }
    if raw.omega < 0.0 {
        return Err(Error::NegativeOmega(raw.omega));
    }
    if raw.theta < 0.0 {
        return Err(Error::NegativeTheta(raw.theta));
    }
    if raw.gain_a <= 0.0 {
        return Err(Error::NonPositiveGain(raw.gain_a));
    }
    Ok(raw)
}

/// Dimensionless groups built from [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    /// ζ = Ω/γ
    pub zeta: f64,
    /// ζ′ = Ω/Γ
    pub zeta_p: f64,
    /// χ = γ/Γ
    pub chi: f64,
    /// B = (4 + ζ²)(1 + ζ′ζ)
    pub b_coef: f64,
    /// e^{−θ}
    pub exp_mtheta: f64,
}

pub fn derive_dimensionless(p: &SystemParams) -> DerivedParams {
    let zeta = p.omega / p.gamma;
    let zeta_p = p.omega;
    DerivedParams {
        zeta,
        zeta_p,
        chi: p.gamma,
        b_coef: (4.0 + zeta * zeta) * (1.0 + zeta_p * zeta),
        exp_mtheta: (-p.theta).exp(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// μ± real and distinct.
    Overdamped,
    /// μ₊ = μ₋ within [`DEGENERACY_THRESHOLD`].
    Degenerate,
    /// μ± a complex-conjugate pair.
    Oscillatory,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Overdamped => "overdamped",
            Regime::Degenerate => "degenerate",
            Regime::Oscillatory => "oscillatory",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Decay rates of the two normal modes and the root-free products that stay
/// finite through the degenerate point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralData {
    pub mu_plus: Complex64,
    pub mu_minus: Complex64,
    /// Σ = μ₊ + μ₋, always real.
    pub mu_sum: f64,
    /// Δ = μ₊ − μ₋, real or purely imaginary.
    pub mu_diff: Complex64,
    /// Δ², real in every regime.
    pub mu_diff_sq: f64,
    /// Discriminant under the square root of the decay rates.
    pub disc: f64,
    /// Sum of magnitudes of the discriminant's additive terms.
    pub disc_scale: f64,
    /// p·Δ
    pub p_times_diff: f64,
    /// q₊·Δ
    pub qp_times_diff: f64,
    /// q₋·Δ
    pub qm_times_diff: f64,
    pub regime: Regime,
    /// Both decay rates have positive real part.
    pub stable: bool,
    pub p_raw: Option<Complex64>,
    pub q_plus_raw: Option<Complex64>,
    pub q_minus_raw: Option<Complex64>,
}

impl SpectralData {
    pub fn min_decay_rate(&self) -> f64 {
        self.mu_plus.re.min(self.mu_minus.re)
    }

    pub fn ensure_stable(&self) -> Result<()> {
        if self.stable {
            Ok(())
        } else {
            Err(Error::UnstableSystem {
                re_plus: self.mu_plus.re,
                re_minus: self.mu_minus.re,
            })
        }
    }
}

pub fn spectral_data(d: &DerivedParams, p: &SystemParams) -> SpectralData {
    let DerivedParams {
        zeta,
        zeta_p,
        chi,
        b_coef,
        exp_mtheta,
    } = *d;
    let gain = p.gain_a / b_coef;

    let drive_term = zeta_p * (1.0 + zeta * zeta_p);
    let coherence_term = 2.0 * (zeta_p * zeta_p + chi);
    let phase_term = (2.0 - zeta_p * zeta) * exp_mtheta;

    let t1 = drive_term * drive_term;
    let t2 = coherence_term * coherence_term;
    let t3 = phase_term * phase_term;
    let disc = t1 + t2 - t3;
    let disc_scale = t1 + t2 + t3;

    let root = Complex64::new(disc, 0.0).sqrt();
    let centre = 0.5 * p.kappa + 0.5 * gain * (2.0 * zeta_p + zeta) * exp_mtheta;
    let mu_plus = Complex64::new(centre, 0.0) + 0.5 * gain * root;
    let mu_minus = Complex64::new(centre, 0.0) - 0.5 * gain * root;
    let mu_diff = gain * root;

    let p_times_diff = gain * coherence_term;
    let qp_times_diff = gain * (-drive_term + phase_term);
    let qm_times_diff = gain * (-drive_term - phase_term);

    let regime = if disc.abs() <= DEGENERACY_THRESHOLD * disc_scale {
        Regime::Degenerate
    } else if disc < 0.0 {
        Regime::Oscillatory
    } else {
        Regime::Overdamped
    };

    let (p_raw, q_plus_raw, q_minus_raw) = match regime {
        Regime::Degenerate => (None, None, None),
        _ => (
            Some(Complex64::new(p_times_diff, 0.0) / mu_diff),
            Some(Complex64::new(qp_times_diff, 0.0) / mu_diff),
            Some(Complex64::new(qm_times_diff, 0.0) / mu_diff),
        ),
    };

    SpectralData {
        mu_plus,
        mu_minus,
        mu_sum: 2.0 * centre,
        mu_diff,
        mu_diff_sq: gain * gain * disc,
        disc,
        disc_scale,
        p_times_diff,
        qp_times_diff,
        qm_times_diff,
        regime,
        stable: mu_plus.re > 0.0 && mu_minus.re > 0.0,
        p_raw,
        q_plus_raw,
        q_minus_raw,
    }
}

/// Strengths of the delta-correlated noise forces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionData {
    /// L = 2ζ′² + 2χ − (2ζ′ + ζ)e^{−θ}
    pub l_coef: f64,
    /// M = ζ′(1 + ζ′ζ) + (2 − ζ′ζ)e^{−θ}
    pub m_coef: f64,
    /// ⟨f_a f_a*⟩ = A·L/B
    pub d_aa: f64,
    /// ⟨f_b f_a⟩ = A·M/(2B)
    pub d_ab: f64,
}

impl DiffusionData {
    /// ⟨f_b f_b*⟩, identically zero.
    pub fn d_bb(&self) -> f64 {
        0.0
    }
}

pub fn noise_strengths(d: &DerivedParams, p: &SystemParams) -> DiffusionData {
    let e = d.exp_mtheta;
    let l_coef = 2.0 * d.zeta_p * d.zeta_p + 2.0 * d.chi - (2.0 * d.zeta_p + d.zeta) * e;
    let m_coef = d.zeta_p * (1.0 + d.zeta_p * d.zeta) + (2.0 - d.zeta_p * d.zeta) * e;
    DiffusionData {
        l_coef,
        m_coef,
        d_aa: p.gain_a * l_coef / d.b_coef,
        d_ab: p.gain_a * m_coef / (2.0 * d.b_coef),
    }
}

/// Everything the dynamics needs, derived once from validated inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub params: SystemParams,
    pub derived: DerivedParams,
    pub spectrum: SpectralData,
    pub noise: DiffusionData,
}

impl Model {
    pub fn new(raw: SystemParams) -> Result<Self> {
        let params = validate_params(raw)?;
        let derived = derive_dimensionless(&params);
        Ok(Self {
            params,
            derived,
            spectrum: spectral_data(&derived, &params),
            noise: noise_strengths(&derived, &params),
        })
    }
}
