//! Exact two-photon scattering.
//!
//! The outgoing amplitude for photons leaving in channels `(α, α')` with
//! momenta `(k, k')` is `F = F⁰ - i F_int`:
//!
//! * `F⁰` scatters each photon independently with the one-photon matrix,
//!   `s_{αβ}(k) s_{α'β'}(k') B(k, k') + s_{αβ'}(k) s_{α'β}(k') B(k', k)`;
//! * `F_int` is the bound (photon–photon) term. It conserves the total
//!   energy `ε`, so after the energy delta is consumed it reduces to one
//!   integral over the incoming relative momentum,
//!   `F_int = -(4Γ²Ω/A) ∫ dξ/(2π) B(ε, ξ)/(Ω² - ξ²)`.
//!
//! The emitter couples only to the even channel combination
//! `(b₁ + b₂)/√2`, so the bound term is identical for every channel pair
//! and carries weight 1 in this normalisation. That weight is what makes
//! the interacting probability table sum to one.
//!
//! Probabilities are integrated in `(ε, ξ_k)` coordinates. `|F_int|²` is
//! spread over `|ξ_k| ~ Γ` with power-law tails, so its `ξ_k` integral is
//! taken in closed form, `∫ dξ |Ω² - ξ²|⁻² = π / (2Γ|Ω|²)`, while the
//! localised parts `|F⁰|²` and `2 Re(F⁰* F_int)` go through the quadrature
//! rule.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{make_pair_amplitude, Channel, ModelParams, PairAmplitude, PairKinematics};
use crate::quadrature::{integrate_1d, QuadratureRule, RuleKind};
use crate::single_photon::{amplitudes, ScatteringMatrix};

/// Smallest `Γ` the quadrature is trusted for: the scattering poles sit at
/// distance `Γ` from the real axis.
pub const MIN_GAMMA: f64 = 0.1;

/// Weight of the bound term relative to the form written above.
pub const INTERACTION_WEIGHT: f64 = 1.0;

/// Interacting tables whose probabilities miss 1 by more than this get a
/// warning attached.
pub const UNITARITY_WARNING: f64 = 1e-2;

/// Outgoing channel pairs, unordered.
pub const OUTGOING_PAIRS: [(Channel, Channel); 3] = [
    (Channel::One, Channel::One),
    (Channel::One, Channel::Two),
    (Channel::Two, Channel::Two),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Settings {
    pub independent: bool,
    pub interaction: bool,
    pub interaction_weight: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            independent: true,
            interaction: true,
            interaction_weight: INTERACTION_WEIGHT,
        }
    }
}

impl Settings {
    pub fn interaction_off() -> Self {
        Settings {
            interaction: false,
            ..Settings::default()
        }
    }

    pub fn with_weight(weight: f64) -> Self {
        Settings {
            interaction_weight: weight,
            ..Settings::default()
        }
    }
}

/// Rule the library picks when the caller has no preference: Gauss–Hermite
/// for Gaussian packets well inside the strong-coupling regime, adaptive
/// panels otherwise.
pub fn default_rule(params: &ModelParams) -> QuadratureRule {
    if params.gamma >= 2.0 {
        QuadratureRule::gauss_hermite(64)
    } else {
        QuadratureRule::adaptive(1e-10)
    }
}

pub(crate) fn rule_for(pair: &PairAmplitude, rule: &QuadratureRule) -> QuadratureRule {
    if rule.kind() == RuleKind::GaussHermite && pair.gaussian_center().is_none() {
        QuadratureRule::adaptive(1e-10)
    } else {
        rule.clone()
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma < MIN_GAMMA {
        return Err(Error::Unsupported(format!(
            "gamma = {gamma} is below the supported minimum {MIN_GAMMA}"
        )));
    }
    Ok(())
}

fn independent_from(
    alpha: Channel,
    alpha_p: Channel,
    incoming: (Channel, Channel),
    sk: &ScatteringMatrix,
    skp: &ScatteringMatrix,
    direct: Complex64,
    exchanged: Complex64,
) -> Complex64 {
    let (beta, beta_p) = incoming;
    sk.entry(alpha, beta) * skp.entry(alpha_p, beta_p) * direct
        + sk.entry(alpha, beta_p) * skp.entry(alpha_p, beta) * exchanged
}

/// `F⁰` for outgoing channels `(alpha, alpha_p)` at momenta `(k, kp)`.
pub fn independent_amplitude(
    alpha: Channel,
    alpha_p: Channel,
    pair: &PairAmplitude,
    k: f64,
    kp: f64,
    params: &ModelParams,
) -> Complex64 {
    let sk = amplitudes(k, params.gamma, params.geometry);
    let skp = amplitudes(kp, params.gamma, params.geometry);
    independent_from(alpha, alpha_p, params.incoming, &sk, &skp, pair.eval(k, kp), pair.eval(kp, k))
}

/// `∫ dξ B(ε/2 + ξ, ε/2 - ξ) / (Ω² - ξ²)` with `Ω = ε/2 + iΓ`.
fn relative_integral(eps: f64, pair: &PairAmplitude, gamma: f64, rule: &QuadratureRule) -> Result<Complex64> {
    let omega = Complex64::new(0.5 * eps, gamma);
    let omega2 = omega * omega;
    let domains = pair.domains();
    integrate_1d(
        |xi| pair.eval_relative(eps, xi) / (omega2 - xi * xi),
        rule,
        domains.xi,
        &[-0.5 * eps, 0.5 * eps],
    )
}

/// Prefactor `-(4Γ²Ω/A)/(2π)` multiplying the relative integral.
fn bound_prefactor(kin: &PairKinematics, gamma: f64) -> Complex64 {
    -(4.0 * gamma * gamma / (2.0 * PI)) * kin.omega / kin.a_prod
}

/// Bound-term matrix element at outgoing momenta `(k, kp)`:
/// `-(4Γ²Ω/A) ∫ dξ/(2π) B(ε, ξ)/(Ω² - ξ²)`. Enters the amplitude as `-i·T`.
pub fn interaction_amplitude(
    k: f64,
    kp: f64,
    pair: &PairAmplitude,
    params: &ModelParams,
    rule: &QuadratureRule,
) -> Result<Complex64> {
    check_gamma(params.gamma)?;
    let rule = rule_for(pair, rule);
    let kin = PairKinematics::new(k, kp, params.gamma);
    let integral = relative_integral(kin.eps, pair, params.gamma, &rule)?;
    Ok(bound_prefactor(&kin, params.gamma) * integral)
}

/// Outgoing two-photon amplitude for a fixed channel pair.
#[derive(Debug, Clone)]
pub struct OutgoingAmplitude<'a> {
    pub outgoing: (Channel, Channel),
    pub settings: Settings,
    pair: &'a PairAmplitude,
    params: ModelParams,
    rule: QuadratureRule,
}

impl OutgoingAmplitude<'_> {
    pub fn eval(&self, k: f64, kp: f64) -> Result<Complex64> {
        let mut f = Complex64::new(0.0, 0.0);
        if self.settings.independent {
            f += independent_amplitude(self.outgoing.0, self.outgoing.1, self.pair, k, kp, &self.params);
        }
        if self.settings.interaction {
            let t = interaction_amplitude(k, kp, self.pair, &self.params, &self.rule)?;
            f += Complex64::new(0.0, -self.settings.interaction_weight) * t;
        }
        Ok(f)
    }
}

pub fn outgoing_amplitude<'a>(
    alpha: Channel,
    alpha_p: Channel,
    pair: &'a PairAmplitude,
    params: &ModelParams,
    rule: &QuadratureRule,
    settings: Settings,
) -> OutgoingAmplitude<'a> {
    OutgoingAmplitude {
        outgoing: (alpha, alpha_p),
        settings,
        pair,
        params: *params,
        rule: rule.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelProbability {
    pub outgoing: (Channel, Channel),
    /// Full probability, both photons counted once.
    pub total: f64,
    /// Interaction-free part `P⁰`.
    pub independent: f64,
    /// `δP = P - P⁰`.
    pub interaction: f64,
}

/// Normalised channel-resolved probabilities for one incoming pair.
///
/// Entries are per unordered outgoing pair: `(1,2)` holds the full
/// anti-bunching probability `P_{12|ββ'} + P_{21|ββ'}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityTable {
    pub incoming: (Channel, Channel),
    pub entries: [ChannelProbability; 3],
    /// `(1 + δ_{ββ'}) ∫∫ |B|² dq dq'`.
    pub norm: f64,
    pub rule: RuleKind,
    pub warnings: Vec<String>,
}

impl ProbabilityTable {
    pub(crate) fn from_integrals(
        incoming: (Channel, Channel),
        independent: [f64; 3],
        total: [f64; 3],
        norm: f64,
        rule: RuleKind,
    ) -> Self {
        let entries = std::array::from_fn(|i| {
            let (a, b) = OUTGOING_PAIRS[i];
            let f = if a == b { 0.5 } else { 1.0 };
            let p0 = f * independent[i] / norm;
            let p = f * total[i] / norm;
            ChannelProbability {
                outgoing: (a, b),
                total: p,
                independent: p0,
                interaction: p - p0,
            }
        });
        let mut table = ProbabilityTable {
            incoming,
            entries,
            norm,
            rule,
            warnings: Vec::new(),
        };
        let defect = table.unitarity_defect();
        if defect > UNITARITY_WARNING {
            table
                .warnings
                .push(format!("probabilities sum to 1 only within {defect:.3e}"));
        }
        if let Some(e) = table.entries.iter().find(|e| e.total < -1e-9 || e.total > 1.0 + UNITARITY_WARNING) {
            table.warnings.push(format!(
                "entry {}{} = {:.6e} outside [0, 1]",
                e.outgoing.0, e.outgoing.1, e.total
            ));
        }
        table
    }

    /// Entry for an unordered outgoing pair.
    pub fn entry(&self, a: Channel, b: Channel) -> &ChannelProbability {
        let key = if a.index() <= b.index() { (a, b) } else { (b, a) };
        self.entries
            .iter()
            .find(|e| e.outgoing == key)
            .expect("table holds every unordered pair")
    }

    /// `P_{αα'|ββ'}` with ordered outgoing channels.
    pub fn ordered(&self, a: Channel, b: Channel) -> f64 {
        let e = self.entry(a, b);
        if a == b {
            e.total
        } else {
            0.5 * e.total
        }
    }

    /// Probability that the photons leave through different channels.
    pub fn anti_bunching(&self) -> &ChannelProbability {
        self.entry(Channel::One, Channel::Two)
    }

    /// `P_HOM`, defined when the photons came in through different channels.
    pub fn p_hom(&self) -> Option<f64> {
        (self.incoming.0 != self.incoming.1).then(|| self.anti_bunching().total)
    }

    /// `P_res`, defined when both photons came in through one channel.
    pub fn p_res(&self) -> Option<f64> {
        (self.incoming.0 == self.incoming.1).then(|| self.anti_bunching().total)
    }

    pub fn total_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.total).sum()
    }

    pub fn independent_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.independent).sum()
    }

    pub fn unitarity_defect(&self) -> f64 {
        (self.total_sum() - 1.0).abs()
    }

    pub fn independent_unitarity_defect(&self) -> f64 {
        (self.independent_sum() - 1.0).abs()
    }
}

/// Probability table with the interaction on at its derived weight.
pub fn probability_table(
    pair: &PairAmplitude,
    params: &ModelParams,
    rule: &QuadratureRule,
) -> Result<ProbabilityTable> {
    probability_table_with(pair, params, rule, Settings::default())
}

pub fn probability_table_with(
    pair: &PairAmplitude,
    params: &ModelParams,
    rule: &QuadratureRule,
    settings: Settings,
) -> Result<ProbabilityTable> {
    check_gamma(params.gamma)?;
    let rule = rule_for(pair, rule);
    let inner = match &rule {
        QuadratureRule::AdaptivePanel(a) => QuadratureRule::AdaptivePanel(a.with_tolerance(0.1 * a.abs_tol)),
        gh => gh.clone(),
    };
    let gamma = params.gamma;
    let weight = settings.interaction_weight;
    let domains = pair.domains();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let record = |e: Error| {
        failure.borrow_mut().get_or_insert(e);
    };

    // Components: |F⁰|² for 11, 12, 22; the localised part of |F|² for the
    // same; |B|².
    let row = |eps: f64| -> [f64; 7] {
        let omega = Complex64::new(0.5 * eps, gamma);
        let relative = if settings.interaction {
            relative_integral(eps, pair, gamma, &inner).unwrap_or_else(|e| {
                record(e);
                Complex64::new(0.0, 0.0)
            })
        } else {
            Complex64::new(0.0, 0.0)
        };
        let local = integrate_1d(
            |xi: f64| {
                let (k, kp) = (0.5 * eps + xi, 0.5 * eps - xi);
                let direct = pair.eval(k, kp);
                let exchanged = pair.eval(kp, k);
                let mut out = [0.0; 7];
                out[6] = direct.norm_sqr();
                let f_int = if settings.interaction {
                    let kin = PairKinematics { eps, xi, omega, a_prod: omega * omega - xi * xi };
                    Complex64::new(0.0, -weight) * bound_prefactor(&kin, gamma) * relative
                } else {
                    Complex64::new(0.0, 0.0)
                };
                if settings.independent {
                    let sk = amplitudes(k, gamma, params.geometry);
                    let skp = amplitudes(kp, gamma, params.geometry);
                    for (c, &(a, b)) in OUTGOING_PAIRS.iter().enumerate() {
                        let f0 = independent_from(a, b, params.incoming, &sk, &skp, direct, exchanged);
                        out[c] = f0.norm_sqr();
                        out[3 + c] = out[c] + 2.0 * (f0.conj() * f_int).re;
                    }
                }
                out
            },
            &inner,
            domains.xi_squared,
            &[-0.5 * eps, 0.5 * eps],
        );
        let mut local = local.unwrap_or_else(|e| {
            record(e);
            [0.0; 7]
        });
        if settings.interaction {
            // ∫ dξ_k |F_int|² in closed form.
            let tail = weight * weight * 2.0 * gamma.powi(3) / PI * relative.norm_sqr();
            for v in &mut local[3..6] {
                *v += tail;
            }
        }
        local
    };

    let sums: [f64; 7] = integrate_1d(row, &rule, domains.eps, &[])?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let multiplicity = if params.same_input_channel() { 2.0 } else { 1.0 };
    let norm = multiplicity * sums[6];
    if !(norm > 0.0) {
        return Err(Error::InvalidParams("incoming pair amplitude has zero norm".into()));
    }
    let independent = [sums[0], sums[1], sums[2]];
    let total = [sums[3], sums[4], sums[5]];
    Ok(ProbabilityTable::from_integrals(
        params.incoming,
        independent,
        total,
        norm,
        rule.kind(),
    ))
}

fn table_for(params: &ModelParams, rule: &QuadratureRule) -> Result<ProbabilityTable> {
    probability_table(&make_pair_amplitude(params), params, rule)
}

/// `P_HOM = P_{12|12} + P_{21|12}` for identical Gaussian photons.
pub fn p_hom(params: &ModelParams, rule: &QuadratureRule) -> Result<f64> {
    if params.same_input_channel() {
        return Err(Error::InvalidParams("p_hom needs distinct input channels".into()));
    }
    Ok(table_for(params, rule)?.anti_bunching().total)
}

/// `P_res = P_{12|ββ} + P_{21|ββ}` for identical Gaussian photons.
pub fn p_res(params: &ModelParams, rule: &QuadratureRule) -> Result<f64> {
    if !params.same_input_channel() {
        return Err(Error::InvalidParams("p_res needs a shared input channel".into()));
    }
    Ok(table_for(params, rule)?.anti_bunching().total)
}
