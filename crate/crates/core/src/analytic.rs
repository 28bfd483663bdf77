//! Closed-form strong-coupling (`Γ ≫ 1`) results.
//!
//! In this limit the pair amplitude is sharply peaked at `q = q' = ω₀` and
//! the one-photon amplitudes can be frozen at the packet centre. Everything
//! then depends on `T`, `R` and two overlap integrals of the incoming pair:
//! the coherence factor `ν` and the interaction weight `ζ`.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Geometry, PairAmplitude};
use crate::quadrature::{integrate_1d, QuadratureRule};
use crate::single_photon::amplitudes;
use crate::two_photon::rule_for;

const PROBABILITY_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    GaussianClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceFactors {
    pub nu: f64,
    pub zeta: f64,
    pub provenance: Provenance,
}

/// Two readings of the HOM interaction correction. They differ by a factor
/// of 2; at the balance point `T = R = ½`:
///
/// * [`HomCorrection::Literal`], `-2ζT²(1 - 4R)`, gives `ζ/2`;
/// * [`HomCorrection::Normalized`], `-4ζT²(1 - 4R)`, gives `ζ`.
///
/// The exact scattering calculation selects `Normalized` (see the oracle
/// audit), which is therefore the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomCorrection {
    Literal,
    #[default]
    Normalized,
}

impl HomCorrection {
    pub const BOTH: [HomCorrection; 2] = [HomCorrection::Literal, HomCorrection::Normalized];

    fn prefactor(self) -> f64 {
        match self {
            HomCorrection::Literal => -2.0,
            HomCorrection::Normalized => -4.0,
        }
    }
}

fn check_pair(t: f64, r: f64) -> Result<()> {
    if (t + r - 1.0).abs() > PROBABILITY_SUM_TOL || t < 0.0 || r < 0.0 {
        return Err(Error::InvalidParams(format!("T + R must equal 1, got T={t}, R={r}")));
    }
    Ok(())
}

/// Interaction-free anti-bunching for monochromatic photons: `(T - R)²`.
pub fn p0_hom_monochromatic(t: f64, r: f64) -> Result<f64> {
    check_pair(t, r)?;
    Ok((t - r).powi(2))
}

/// Interaction-free anti-bunching with partial overlap: `T² + R² - 2νTR`.
pub fn p0_hom_delayed(t: f64, r: f64, nu: f64) -> Result<f64> {
    check_pair(t, r)?;
    if !(-1e-12..=1.0 + 1e-12).contains(&nu) {
        return Err(Error::InvalidParams(format!("coherence factor must lie in [0, 1], got {nu}")));
    }
    Ok(t * t + r * r - 2.0 * nu * t * r)
}

/// HOM dip of a balanced splitter with Gaussian photons: `½(1 - e^{-Δ²})`.
pub fn p0_hom_gaussian(delay: f64) -> f64 {
    0.5 * (1.0 - (-delay * delay).exp())
}

pub fn nu_gaussian(delay: f64) -> f64 {
    (-delay * delay).exp()
}

/// `ζ₁₂ = e^{-Δ²}/(√π Γ)` for Gaussian photons in different channels.
pub fn zeta_hom_gaussian(gamma: f64, delay: f64) -> f64 {
    (-delay * delay).exp() / (PI.sqrt() * gamma)
}

/// `ζ_bl = 1/(√π Γ (1 + e^{Δ²}))`, the blockade weight for Gaussian photons
/// sharing a channel.
pub fn zeta_blockade(gamma: f64, delay: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParams(format!("gamma must be positive, got {gamma}")));
    }
    // exp(Δ²) overflows near Δ ≈ 26.6; the weight is zero well before that.
    let e = (delay * delay).exp();
    Ok(if e.is_finite() { 1.0 / (PI.sqrt() * gamma * (1.0 + e)) } else { 0.0 })
}

/// Closed forms for identical Gaussian photons.
pub fn gaussian_factors(gamma: f64, delay: f64, same_channel: bool) -> Result<CoherenceFactors> {
    let zeta = if same_channel {
        zeta_blockade(gamma, delay)?
    } else {
        zeta_hom_gaussian(gamma, delay)
    };
    Ok(CoherenceFactors {
        nu: nu_gaussian(delay),
        zeta,
        provenance: Provenance::GaussianClosedForm,
    })
}

fn first_error<T>(slot: RefCell<Option<Error>>, value: T) -> Result<T> {
    match slot.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

fn inner_rule(rule: &QuadratureRule) -> QuadratureRule {
    match rule {
        QuadratureRule::AdaptivePanel(a) => QuadratureRule::AdaptivePanel(a.with_tolerance(0.1 * a.abs_tol)),
        gh => gh.clone(),
    }
}

/// `ν = Re ∫∫ B̄(ε, ξ) B(ε, -ξ) dε dξ / ∫∫ |B|² dε dξ`.
pub fn coherence_nu(pair: &PairAmplitude, rule: &QuadratureRule) -> Result<f64> {
    let rule = rule_for(pair, rule);
    let inner = inner_rule(&rule);
    let d = pair.domains();
    let failure = RefCell::new(None);
    let [overlap, norm] = integrate_1d(
        |eps| {
            integrate_1d(
                |xi| {
                    let b = pair.eval_relative(eps, xi);
                    [(b.conj() * pair.eval_relative(eps, -xi)).re, b.norm_sqr()]
                },
                &inner,
                d.xi_squared,
                &[],
            )
            .unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                [0.0; 2]
            })
        },
        &rule,
        d.eps,
        &[],
    )?;
    first_error(failure, overlap / norm)
}

/// `ζ = ∫ dε |∫ dξ B(ε, ξ)|² / (2πΓ N)` with `N = (1 + δ_{ββ'}) ∫∫ |B|²`.
pub fn zeta_weight(pair: &PairAmplitude, gamma: f64, rule: &QuadratureRule) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParams(format!("gamma must be positive, got {gamma}")));
    }
    let rule = rule_for(pair, rule);
    let inner = inner_rule(&rule);
    let d = pair.domains();
    let failure = RefCell::new(None);
    let record = |e: Error| {
        failure.borrow_mut().get_or_insert(e);
    };
    let [projected, norm] = integrate_1d(
        |eps| {
            let amp = integrate_1d(|xi| pair.eval_relative(eps, xi), &inner, d.xi, &[])
                .unwrap_or_else(|e| {
                    record(e);
                    Default::default()
                });
            let n = integrate_1d(|xi| pair.eval_relative(eps, xi).norm_sqr(), &inner, d.xi_squared, &[])
                .unwrap_or_else(|e| {
                    record(e);
                    0.0
                });
            [amp.norm_sqr(), n]
        },
        &rule,
        d.eps,
        &[],
    )?;
    let multiplicity = if pair.symmetrized() { 2.0 } else { 1.0 };
    first_error(failure, projected / (2.0 * PI * gamma * multiplicity * norm))
}

/// Quadrature counterpart of [`gaussian_factors`].
pub fn quadrature_factors(pair: &PairAmplitude, gamma: f64, rule: &QuadratureRule) -> Result<CoherenceFactors> {
    Ok(CoherenceFactors {
        nu: coherence_nu(pair, rule)?,
        zeta: zeta_weight(pair, gamma, rule)?,
        provenance: Provenance::Quadrature,
    })
}

/// Interaction correction to the HOM anti-bunching probability.
pub fn delta_p_hom(zeta: f64, t: f64, r: f64, reading: HomCorrection) -> Result<f64> {
    check_pair(t, r)?;
    Ok(reading.prefactor() * zeta * t * t * (1.0 - 4.0 * r))
}

/// Interaction correction in the resonance geometry: `ζ₁₁T²(1 - 4R)`.
pub fn delta_p_res(zeta: f64, t: f64, r: f64) -> Result<f64> {
    check_pair(t, r)?;
    Ok(zeta * t * t * (1.0 - 4.0 * r))
}

/// Strong-coupling estimate of `P_HOM` for Gaussian photons centred at
/// `center`: `T² + R² - 2νTR + δP_HOM`.
pub fn p_hom_asymptotic(gamma: f64, delay: f64, center: f64, reading: HomCorrection) -> Result<f64> {
    let s = amplitudes(center, gamma, Geometry::HomSplit);
    let (t, r) = (s.transmission(), 1.0 - s.transmission());
    let f = gaussian_factors(gamma, delay, false)?;
    Ok(p0_hom_delayed(t, r, f.nu)? + delta_p_hom(f.zeta, t, r, reading)?)
}

/// Strong-coupling estimate of `P_res` for Gaussian photons sharing a
/// channel: `2TR + ζ₁₁T²(1 - 4R)`, with `T` the crossing probability of
/// the link (the reflector is its dual and gives the same `P_res`).
pub fn p_res_asymptotic(gamma: f64, delay: f64, center: f64) -> Result<f64> {
    let s = amplitudes(center, gamma, Geometry::ResonantLink);
    let (t, r) = (s.transmission(), 1.0 - s.transmission());
    let zeta = zeta_blockade(gamma, delay)?;
    Ok(2.0 * t * r + delta_p_res(zeta, t, r)?)
}
