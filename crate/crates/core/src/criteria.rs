//! Two-mode covariance matrix and the three entanglement tests built on it.
//!
//! Quadratures are X₁ = a + a†, X₂ = i(a† − a), X₃ = b + b†, X₄ = i(b† − b),
//! so the vacuum has unit variance and V_s < 1 signals entanglement.

use serde::Serialize;

use crate::dynamics::{moments_at, SecondMoments};
use crate::error::{Error, Result};
use crate::params::{Model, SystemParams};

/// Agreement required between the two determinant routes, relative to the
/// magnitude of the terms they combine.
pub const DET_ROUTE_TOLERANCE: f64 = 1e-8;

/// Radicand floor below which the state is reported unphysical instead of
/// clamped (relative to ξ²).
pub const RADICAND_FLOOR: f64 = -1e-10;

/// Absolute floor on n_a·n_b for the photon-number correlation.
pub const HZ_EPSILON: f64 = 1e-12;

/// Entries and determinants of the covariance matrix
///
/// ```text
/// ⎡ m  0  c  0 ⎤
/// ⎢ 0  m  0 −c ⎥
/// ⎢ c  0  n  0 ⎥
/// ⎣ 0 −c  0  n ⎦
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceSummary {
    pub m: f64,
    pub n: f64,
    pub c: f64,
    pub det_a: f64,
    pub det_b: f64,
    pub det_ab: f64,
    pub det_xi: f64,
    /// mn − c², the signed square root of det Ξ; finite where det Ξ overflows.
    pub root_det_xi: f64,
    /// ξ = det σ_A + det σ_B − 2 det σ_AB
    pub xi: f64,
}

pub fn covariance(sm: &SecondMoments) -> Result<CovarianceSummary> {
    let SecondMoments {
        n_a,
        n_b,
        c_ab,
        det,
        ..
    } = *sm;
    let m = 1.0 + 2.0 * n_a;
    let n = 1.0 + 2.0 * n_b;
    let c = 2.0 * c_ab;
    let det_a = 1.0 + 4.0 * n_a * (n_a + 1.0);
    let det_b = 1.0 + 4.0 * n_b * (n_b + 1.0);
    let det_ab = -4.0 * c_ab * c_ab;

    // Three evaluations of sqrt(det Ξ) = mn − c²: the normally ordered form,
    // the block form from m, n, c, and the one using the cancellation-free
    // moment determinant. Compared after dividing by k², k the largest
    // magnitude, so runaway moments do not overflow.
    let k = m.abs().max(n.abs()).max(c.abs());
    let (mk, nk, ck) = (m / k, n / k, c / k);
    let (ak, bk, abk) = (n_a / k, n_b / k, c_ab / k);
    let normal_ordered = 4.0 * ((0.25 / k + 0.5 * (n_a + n_b) / k) / k + ak * bk - abk * abk);
    let block = mk * nk - ck * ck;
    let root = 1.0 + 2.0 * (n_a + n_b) + 4.0 * det;
    let root_k = (1.0 / k + 2.0 * (n_a + n_b) / k) / k + 4.0 * (det / k) / k;

    let scale = (mk * nk).abs() + ck * ck;
    for (route_a, route_b) in [(normal_ordered, block), (normal_ordered, root_k)] {
        if !((route_a - route_b).abs() <= DET_ROUTE_TOLERANCE * scale) {
            return Err(Error::InconsistentMoments { route_a, route_b });
        }
    }
    let det_xi = root * root;

    Ok(CovarianceSummary {
        m,
        n,
        c,
        det_a,
        det_b,
        det_ab,
        det_xi,
        root_det_xi: root,
        xi: det_a + det_b - 2.0 * det_ab,
    })
}

/// r = 2 sqrt(det Ξ)/ξ and 1 − r², so that ξ² − 4 det Ξ = ξ²(1 − r²).
/// Works on m, n, c scaled by their largest magnitude k; returns k too.
fn scaled_radicand(cv: &CovarianceSummary) -> Result<(f64, f64, f64)> {
    let k = cv.m.abs().max(cv.n.abs()).max(cv.c.abs());
    let xi_k = (cv.m / k).powi(2) + (cv.n / k).powi(2) + 2.0 * (cv.c / k).powi(2);
    let r = 2.0 * (cv.root_det_xi.abs() / k) / (k * xi_k);
    let rad = (1.0 - r) * (1.0 + r);
    if rad < RADICAND_FLOOR {
        return Err(Error::UnphysicalCovariance(rad));
    }
    Ok((k, r, rad.max(0.0)))
}

/// Smallest symplectic eigenvalue of the partially transposed covariance
/// matrix, V_s = sqrt[(ξ − sqrt(ξ² − 4 det Ξ))/2].
///
/// Evaluated as sqrt[sqrt(det Ξ)·r / (1 + sqrt(1 − r²))] with
/// r = 2 sqrt(det Ξ)/ξ. This keeps full relative accuracy when V_s ≪ sqrt(ξ)
/// and never forms ξ or det Ξ, which overflow for the moments of long
/// unstable runs.
pub fn symplectic_smallest(cv: &CovarianceSummary) -> Result<f64> {
    let (_, r, rad) = scaled_radicand(cv)?;
    Ok((cv.root_det_xi.abs() * r / (1.0 + rad.sqrt())).sqrt())
}

/// The printed difference form of V_s; loses digits when V_s is small.
pub fn symplectic_smallest_direct(cv: &CovarianceSummary) -> Result<f64> {
    let (k, _, rad) = scaled_radicand(cv)?;
    let xi_k = (cv.m / k).powi(2) + (cv.n / k).powi(2) + 2.0 * (cv.c / k).powi(2);
    Ok(k * (0.5 * xi_k * (1.0 - rad.sqrt())).max(0.0).sqrt())
}

/// E_N = max(0, −log₂ V_s)
pub fn log_negativity(v_s: f64) -> Result<f64> {
    if !(v_s > 0.0) {
        return Err(Error::NonPositiveEigenvalue(v_s));
    }
    Ok((-v_s.log2()).max(0.0))
}

/// Δu² + Δv² for u = (X₁ − X₃)/√2, v = (X₂ + X₄)/√2; separable states give
/// at least 2.
pub fn dgcz_sum(cv: &CovarianceSummary) -> f64 {
    cv.m + cv.n - 2.0 * cv.c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HzFlag {
    Defined,
    /// n_a·n_b vanishes while ⟨αβ⟩² does not.
    Divergent,
    /// 0/0, e.g. the vacuum.
    Undefined,
}

/// Photon-number correlation g = 1 + ⟨αβ⟩²/(⟨α*α⟩⟨β*β⟩).
pub fn hz_correlation(sm: &SecondMoments) -> (f64, HzFlag) {
    let product = sm.n_a * sm.n_b;
    let numerator = sm.c_ab * sm.c_ab;
    if product.abs() > HZ_EPSILON {
        (1.0 + numerator / product, HzFlag::Defined)
    } else if numerator > HZ_EPSILON {
        (f64::INFINITY, HzFlag::Divergent)
    } else {
        (f64::NAN, HzFlag::Undefined)
    }
}

/// One output row: every criterion evaluated on the same moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    pub t: f64,
    pub v_s: f64,
    pub e_n: f64,
    pub dgcz: f64,
    pub hz_g: f64,
    /// g − 2 = −det/(n_a·n_b) from the cancellation-free determinant; keeps
    /// its sign where g itself rounds to 2.
    pub hz_excess: f64,
    pub hz_flag: HzFlag,
    pub entangled_neg: bool,
    pub entangled_dgcz: bool,
    pub entangled_hz: bool,
    pub moments: SecondMoments,
}

impl EntanglementReport {
    /// ½(Δu² + Δv²), directly comparable with V_s.
    pub fn half_dgcz(&self) -> f64 {
        0.5 * self.dgcz
    }
}

pub fn report(p: &SystemParams, t: f64) -> Result<EntanglementReport> {
    let model = Model::new(*p)?;
    report_from_moments(&moments_at(&model, t)?)
}

pub fn report_from_moments(sm: &SecondMoments) -> Result<EntanglementReport> {
    let cv = covariance(sm)?;
    let v_s = symplectic_smallest(&cv)?;
    let e_n = log_negativity(v_s)?;
    let dgcz = dgcz_sum(&cv);
    let (hz_g, hz_flag) = hz_correlation(sm);
    let hz_excess = match hz_flag {
        HzFlag::Defined => -sm.det / (sm.n_a * sm.n_b),
        HzFlag::Divergent => f64::INFINITY,
        HzFlag::Undefined => f64::NAN,
    };
    let entangled_hz = match hz_flag {
        HzFlag::Defined => hz_excess > 0.0,
        HzFlag::Divergent => true,
        HzFlag::Undefined => false,
    };
    let entangled_neg = v_s < 1.0;
    debug_assert_eq!(entangled_neg, e_n > 0.0);
    Ok(EntanglementReport {
        t: sm.t,
        v_s,
        e_n,
        dgcz,
        hz_g,
        hz_excess,
        hz_flag,
        entangled_neg,
        entangled_dgcz: dgcz < 2.0,
        entangled_hz,
        moments: *sm,
    })
}
