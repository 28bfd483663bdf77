//! Domain types and incoming photon states.
//!
//! Units: every frequency and momentum is measured in units of the packet
//! width σ and every time in units of 1/σ, so the emitter linewidth only
//! ever appears as the ratio `Γ = γ/σ` and the delay as `Δ = στ`.
//! Momenta are normalised with the plain `dq` measure; the 2π factors of
//! other conventions cancel in every normalised probability.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{Domain, TRUNCATION};

/// Waveguide channel label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Channel {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

impl Channel {
    pub const ALL: [Channel; 2] = [Channel::One, Channel::Two];

    pub fn from_index(i: u8) -> Result<Self> {
        match i {
            1 => Ok(Channel::One),
            2 => Ok(Channel::Two),
            _ => Err(Error::InvalidParams(format!("channel must be 1 or 2, got {i}"))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Channel::One => 1,
            Channel::Two => 2,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Channel::One => Channel::Two,
            Channel::Two => Channel::One,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Scattering geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// Photons enter through different channels; the emitter acts as a
    /// beam splitter.
    HomSplit,
    /// Emitter embedded in a single waveguide: resonant photons reflect.
    EmbeddedReflector,
    /// Emitter bridging two waveguides: resonant photons cross over.
    ResonantLink,
}

impl Geometry {
    pub fn needs_distinct_inputs(self) -> bool {
        matches!(self, Geometry::HomSplit)
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            Geometry::HomSplit => "hom",
            Geometry::EmbeddedReflector => "reflector",
            Geometry::ResonantLink => "link",
        }
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for Geometry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hom" | "hom_split" => Ok(Geometry::HomSplit),
            "reflector" | "embedded_reflector" => Ok(Geometry::EmbeddedReflector),
            "link" | "resonant_link" => Ok(Geometry::ResonantLink),
            other => Err(Error::InvalidParams(format!("unknown geometry '{other}'"))),
        }
    }
}

/// Validated parameter bundle, in σ-units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// `Γ = γ/σ`.
    pub gamma: f64,
    /// `Δ = στ`.
    pub delay: f64,
    /// Packet centre detuning `ω₀/σ`.
    pub center: f64,
    pub geometry: Geometry,
    pub incoming: (Channel, Channel),
}

impl ModelParams {
    pub fn new(
        gamma: f64,
        delay: f64,
        center: f64,
        geometry: Geometry,
        first: Channel,
        second: Channel,
    ) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParams(format!("gamma must be positive, got {gamma}")));
        }
        if !delay.is_finite() || !center.is_finite() {
            return Err(Error::InvalidParams("delay and center must be finite".into()));
        }
        match (geometry.needs_distinct_inputs(), first == second) {
            (true, true) => {
                return Err(Error::InvalidParams(
                    "HOM geometry needs photons in different input channels".into(),
                ))
            }
            (false, false) => {
                return Err(Error::InvalidParams(format!(
                    "{geometry} geometry needs both photons in the same input channel"
                )))
            }
            _ => {}
        }
        Ok(ModelParams {
            gamma,
            delay,
            center,
            geometry,
            incoming: (first, second),
        })
    }

    /// HOM geometry centred on the balance point `ω₀ = γ`.
    pub fn balanced_hom(gamma: f64, delay: f64) -> Result<Self> {
        Self::new(gamma, delay, gamma, Geometry::HomSplit, Channel::One, Channel::Two)
    }

    /// Both photons in channel 1, tuned to the emitter resonance.
    pub fn resonance(gamma: f64, delay: f64, geometry: Geometry) -> Result<Self> {
        Self::new(gamma, delay, 0.0, geometry, Channel::One, Channel::One)
    }

    pub fn with_gamma(self, gamma: f64) -> Result<Self> {
        Self::new(gamma, self.delay, self.center, self.geometry, self.incoming.0, self.incoming.1)
    }

    pub fn with_delay(self, delay: f64) -> Result<Self> {
        Self::new(self.gamma, delay, self.center, self.geometry, self.incoming.0, self.incoming.1)
    }

    pub fn with_center(self, center: f64) -> Result<Self> {
        Self::new(self.gamma, self.delay, center, self.geometry, self.incoming.0, self.incoming.1)
    }

    pub fn same_input_channel(&self) -> bool {
        self.incoming.0 == self.incoming.1
    }
}

/// Builds and validates a [`ModelParams`] from raw channel indices.
pub fn make_params(
    gamma: f64,
    delay: f64,
    center: f64,
    geometry: Geometry,
    first: u8,
    second: u8,
) -> Result<ModelParams> {
    ModelParams::new(
        gamma,
        delay,
        center,
        geometry,
        Channel::from_index(first)?,
        Channel::from_index(second)?,
    )
}

/// Natural cubic spline through `(x, y)`.
#[derive(Debug, Clone, PartialEq)]
struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal system for the interior second derivatives.
            let mut diag = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            let mut upper = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 2..n - 1 {
                let w = (x[i] - x[i - 1]) / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            for i in (1..n - 1).rev() {
                m[i] = (rhs[i] - upper[i] * m[i + 1]) / diag[i];
            }
        }
        CubicSpline { x, y, m }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t < self.x[0] || t > self.x[n - 1] {
            return 0.0;
        }
        let i = match self.x.partition_point(|&v| v <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// Spectral profile sampled on a grid, interpolated by cubic splines on the
/// real and imaginary parts and renormalised to unit L² norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedProfile {
    re: CubicSpline,
    im: CubicSpline,
    norm_factor: f64,
    center: f64,
    width: f64,
}

const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

impl TabulatedProfile {
    pub fn new(samples: &[(f64, Complex64)]) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::InvalidParams("tabulated profile needs at least 3 samples".into()));
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParams(
                "tabulated profile grid must be strictly increasing".into(),
            ));
        }
        if samples.iter().any(|(q, g)| !q.is_finite() || !g.re.is_finite() || !g.im.is_finite()) {
            return Err(Error::InvalidParams("tabulated profile has non-finite samples".into()));
        }
        let x: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let re = CubicSpline::new(x.clone(), samples.iter().map(|s| s.1.re).collect());
        let im = CubicSpline::new(x.clone(), samples.iter().map(|s| s.1.im).collect());
        let mut profile = TabulatedProfile {
            re,
            im,
            norm_factor: 1.0,
            center: 0.0,
            width: 0.0,
        };

        // |spline|² is piecewise degree 6, so 4-point Gauss–Legendre per
        // interval is exact.
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for w in x.windows(2) {
            let (c, h) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
            for (u, wt) in GL4_NODES.iter().zip(GL4_WEIGHTS) {
                let q = c + h * u;
                let p = profile.raw(q).norm_sqr() * wt * h;
                m0 += p;
                m1 += p * q;
                m2 += p * q * q;
            }
        }
        if !(m0 > 0.0) {
            return Err(Error::InvalidParams("tabulated profile has zero norm".into()));
        }
        profile.norm_factor = m0.sqrt().recip();
        profile.center = m1 / m0;
        profile.width = (m2 / m0 - profile.center * profile.center).max(0.0).sqrt();
        Ok(profile)
    }

    fn raw(&self, q: f64) -> Complex64 {
        Complex64::new(self.re.eval(q), self.im.eval(q))
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        self.raw(q) * self.norm_factor
    }

    pub fn support(&self) -> (f64, f64) {
        (self.re.x[0], *self.re.x.last().expect("non-empty grid"))
    }

    /// Interior sample points; useful as quadrature breakpoints.
    pub fn knots(&self) -> &[f64] {
        &self.re.x
    }
}

/// One-photon spectral amplitude `g(q)`.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralProfile {
    /// `g(q) = (2π)^{-1/4} exp(-(q - center)²/4)`: `|g|²` is a normal
    /// density of unit variance, so σ is the rms width of the photon
    /// spectrum.
    Gaussian { center: f64 },
    Tabulated(TabulatedProfile),
}

impl SpectralProfile {
    pub fn gaussian(center: f64) -> Self {
        SpectralProfile::Gaussian { center }
    }

    pub fn tabulated(samples: &[(f64, Complex64)]) -> Result<Self> {
        TabulatedProfile::new(samples).map(SpectralProfile::Tabulated)
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        match self {
            SpectralProfile::Gaussian { center } => {
                let d = q - center;
                Complex64::new((2.0 * PI).powf(-0.25) * (-0.25 * d * d).exp(), 0.0)
            }
            SpectralProfile::Tabulated(t) => t.eval(q),
        }
    }

    /// Mean of `|g|²`.
    pub fn center(&self) -> f64 {
        match self {
            SpectralProfile::Gaussian { center } => *center,
            SpectralProfile::Tabulated(t) => t.center,
        }
    }

    /// Rms width of `|g|²`; 1 for the Gaussian by construction of the units.
    pub fn width(&self) -> f64 {
        match self {
            SpectralProfile::Gaussian { .. } => 1.0,
            SpectralProfile::Tabulated(t) => t.width,
        }
    }

    /// Interval outside which `g` is negligible (Gaussian) or zero.
    pub fn support(&self) -> (f64, f64) {
        match self {
            SpectralProfile::Gaussian { center } => (center - TRUNCATION, center + TRUNCATION),
            SpectralProfile::Tabulated(t) => t.support(),
        }
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self, SpectralProfile::Gaussian { .. })
    }
}

/// Integration domains in relative coordinates `ε = q + q'`, `ξ = (q - q')/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDomains {
    /// For integrands carrying `|B|²` (or `B` twice) in `ε`.
    pub eps: Domain,
    /// For integrands carrying `|B|²` in `ξ`.
    pub xi_squared: Domain,
    /// For integrands carrying a single power of `B` in `ξ`.
    pub xi: Domain,
}

/// Two-photon incoming amplitude `B(q, q')`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairAmplitude {
    first: SpectralProfile,
    second: SpectralProfile,
    delay: f64,
    symmetrized: bool,
}

impl PairAmplitude {
    /// `B(q, q') = g_a(q) g_b(q') exp(iqΔ)`, averaged over `q ↔ q'` when
    /// `symmetrized` (both photons in one channel).
    pub fn new(first: SpectralProfile, second: SpectralProfile, delay: f64, symmetrized: bool) -> Self {
        PairAmplitude {
            first,
            second,
            delay,
            symmetrized,
        }
    }

    fn product(&self, q: f64, qp: f64) -> Complex64 {
        self.first.eval(q) * self.second.eval(qp) * Complex64::from_polar(1.0, q * self.delay)
    }

    pub fn eval(&self, q: f64, qp: f64) -> Complex64 {
        if self.symmetrized {
            0.5 * (self.product(q, qp) + self.product(qp, q))
        } else {
            self.product(q, qp)
        }
    }

    /// `B` at `q = ε/2 + ξ`, `q' = ε/2 - ξ`.
    pub fn eval_relative(&self, eps: f64, xi: f64) -> Complex64 {
        self.eval(0.5 * eps + xi, 0.5 * eps - xi)
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn symmetrized(&self) -> bool {
        self.symmetrized
    }

    pub fn profiles(&self) -> (&SpectralProfile, &SpectralProfile) {
        (&self.first, &self.second)
    }

    /// Common centre when both profiles are Gaussians centred together,
    /// the case Gauss–Hermite rules can handle.
    pub fn gaussian_center(&self) -> Option<f64> {
        match (&self.first, &self.second) {
            (SpectralProfile::Gaussian { center: a }, SpectralProfile::Gaussian { center: b })
                if a == b =>
            {
                Some(*a)
            }
            _ => None,
        }
    }

    pub fn domains(&self) -> PairDomains {
        if let Some(c) = self.gaussian_center() {
            // |B|² ∝ exp(-(ε - 2c)²/4 - ξ²) and B ∝ exp(-(ε - 2c)²/8 - ξ²/2).
            return PairDomains {
                eps: Domain::gaussian(2.0 * c, 2.0),
                xi_squared: Domain::gaussian(0.0, 1.0),
                xi: Domain::gaussian(0.0, 2f64.sqrt()),
            };
        }
        let (a0, a1) = self.first.support();
        let (b0, b1) = self.second.support();
        let half = 0.5 * (a1 - b0).max(b1 - a0);
        let xi = Domain::interval(-half, half);
        PairDomains {
            eps: Domain::interval(a0 + b0, a1 + b1),
            xi_squared: xi,
            xi,
        }
    }
}

/// Incoming pair for a parameter point: identical Gaussian photons, the
/// delay phase on the first photon, symmetrised when both share a channel.
pub fn make_pair_amplitude(params: &ModelParams) -> PairAmplitude {
    let g = SpectralProfile::gaussian(params.center);
    PairAmplitude::new(g.clone(), g, params.delay, params.same_input_channel())
}

/// Kinematic variables of an outgoing momentum pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairKinematics {
    /// `ε = k + k'`.
    pub eps: f64,
    /// `ξ = (k - k')/2`.
    pub xi: f64,
    /// `Ω = ε/2 + iΓ`.
    pub omega: Complex64,
    /// `A = (k + iΓ)(k' + iΓ)`.
    pub a_prod: Complex64,
}

impl PairKinematics {
    pub fn new(k: f64, kp: f64, gamma: f64) -> Self {
        let eps = k + kp;
        PairKinematics {
            eps,
            xi: 0.5 * (k - kp),
            omega: Complex64::new(0.5 * eps, gamma),
            a_prod: Complex64::new(k, gamma) * Complex64::new(kp, gamma),
        }
    }
}

pub fn pair_kinematics(k: f64, kp: f64, gamma: f64) -> PairKinematics {
    PairKinematics::new(k, kp, gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::AdaptivePanel;
    use proptest::prelude::*;

    fn l2_norm(profile: &SpectralProfile) -> f64 {
        let (lo, hi) = profile.support();
        let mut breaks = Vec::new();
        if let SpectralProfile::Tabulated(t) = profile {
            breaks.extend_from_slice(t.knots());
        }
        AdaptivePanel::new(1e-13)
            .integrate(|q| profile.eval(q).norm_sqr(), lo, hi, &breaks)
            .unwrap()
            .value
    }

    #[test]
    fn make_params_examples() {
        let p = make_params(10.0, 0.0, 10.0, Geometry::HomSplit, 1, 2).unwrap();
        assert_eq!(p.center, p.gamma);
        assert!(make_params(10.0, 0.0, 0.0, Geometry::ResonantLink, 1, 1).is_ok());
        assert!(make_params(-1.0, 0.0, 0.0, Geometry::ResonantLink, 1, 1).is_err());
        assert!(make_params(0.0, 0.0, 0.0, Geometry::ResonantLink, 1, 1).is_err());
    }

    #[test]
    fn channel_geometry_compatibility() {
        assert!(make_params(1.0, 0.0, 1.0, Geometry::HomSplit, 1, 1).is_err());
        assert!(make_params(1.0, 0.0, 0.0, Geometry::ResonantLink, 1, 2).is_err());
        assert!(make_params(1.0, 0.0, 0.0, Geometry::EmbeddedReflector, 2, 1).is_err());
        assert!(make_params(1.0, 0.0, 0.0, Geometry::EmbeddedReflector, 2, 2).is_ok());
        assert!(make_params(1.0, 0.0, 0.0, Geometry::EmbeddedReflector, 3, 3).is_err());
        assert!(make_params(1.0, f64::NAN, 0.0, Geometry::ResonantLink, 1, 1).is_err());
    }

    #[test]
    fn geometry_names_round_trip() {
        for g in [Geometry::HomSplit, Geometry::EmbeddedReflector, Geometry::ResonantLink] {
            assert_eq!(g.cli_name().parse::<Geometry>().unwrap(), g);
        }
        assert!("mirror".parse::<Geometry>().is_err());
    }

    #[test]
    fn gaussian_profile_is_normalised() {
        for c in [0.0, 3.5, -20.0] {
            assert!((l2_norm(&SpectralProfile::gaussian(c)) - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn tabulated_profile_is_renormalised() {
        // Deliberately unnormalised, chirped, asymmetric samples.
        let samples: Vec<(f64, Complex64)> = (0..121)
            .map(|i| {
                let q = -6.0 + 0.1 * i as f64;
                let amp = 3.0 * (-(q - 0.5) * (q - 0.5) / 3.0).exp() * (1.0 + 0.2 * q.tanh());
                (q, Complex64::from_polar(amp, 0.3 * q * q))
            })
            .collect();
        let p = SpectralProfile::tabulated(&samples).unwrap();
        assert!((l2_norm(&p) - 1.0).abs() < 1e-8);
        assert!(p.width() > 0.5 && p.width() < 2.0);
        assert_eq!(p.eval(-7.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn tabulated_gaussian_matches_closed_form() {
        let exact = SpectralProfile::gaussian(0.0);
        let samples: Vec<(f64, Complex64)> = (0..=480)
            .map(|i| {
                let q = -12.0 + 0.05 * i as f64;
                (q, exact.eval(q))
            })
            .collect();
        let p = SpectralProfile::tabulated(&samples).unwrap();
        for q in [-2.0, -0.33, 0.0, 1.27, 3.0] {
            assert!((p.eval(q) - exact.eval(q)).norm() < 1e-6);
        }
        assert!(p.center().abs() < 1e-9);
        assert!((p.width() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn tabulated_profile_rejects_bad_grids() {
        let one = Complex64::new(1.0, 0.0);
        assert!(SpectralProfile::tabulated(&[(0.0, one), (1.0, one)]).is_err());
        assert!(SpectralProfile::tabulated(&[(0.0, one), (1.0, one), (1.0, one)]).is_err());
        let zero = Complex64::new(0.0, 0.0);
        assert!(SpectralProfile::tabulated(&[(0.0, zero), (1.0, zero), (2.0, zero)]).is_err());
    }

    #[test]
    fn pair_amplitude_examples() {
        let p0 = ModelParams::balanced_hom(10.0, 0.0).unwrap();
        let b0 = make_pair_amplitude(&p0);
        let b1 = make_pair_amplitude(&p0.with_delay(1.0).unwrap());
        let g = SpectralProfile::gaussian(10.0);
        for (q, qp) in [(10.0, 10.0), (9.1, 11.7), (12.0, 8.5)] {
            let v = b0.eval(q, qp);
            assert!(v.im == 0.0 && v.re > 0.0);
            assert!((v - g.eval(q) * g.eval(qp)).norm() < 1e-15);
            assert!((b1.eval(q, qp).norm() - v.norm()).abs() < 1e-15);
        }
        let pres = ModelParams::resonance(10.0, 1.3, Geometry::ResonantLink).unwrap();
        let bs = make_pair_amplitude(&pres);
        assert!(bs.symmetrized());
        for (q, qp) in [(0.3, -1.2), (2.0, 0.1)] {
            assert!((bs.eval(q, qp) - bs.eval(qp, q)).norm() < 1e-15);
        }
    }

    #[test]
    fn kinematics_examples() {
        let a = pair_kinematics(1.0, 1.0, 2.0);
        assert_eq!(a.eps, 2.0);
        assert_eq!(a.xi, 0.0);
        assert_eq!(a.omega, Complex64::new(1.0, 2.0));
        assert_eq!(a.a_prod, Complex64::new(-3.0, 4.0));

        let b = pair_kinematics(3.0, -1.0, 1.0);
        assert_eq!((b.eps, b.xi), (2.0, 2.0));
        assert_eq!(b.omega, Complex64::new(1.0, 1.0));
        assert_eq!(b.a_prod, Complex64::new(-4.0, 2.0));
        assert_eq!(b.omega * b.omega - b.xi * b.xi, b.a_prod);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn kinematic_identity(k in -1e3f64..1e3, kp in -1e3f64..1e3, gamma in 0.01f64..100.0) {
            let kin = pair_kinematics(k, kp, gamma);
            let lhs = kin.a_prod;
            let rhs = kin.omega * kin.omega - kin.xi * kin.xi;
            prop_assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
            prop_assert_eq!(kin.omega.im, gamma);
        }
    }

    proptest! {
        #[test]
        fn symmetrised_pair_is_exchange_symmetric(
            q in -15.0f64..15.0, qp in -15.0f64..15.0,
            delay in -5.0f64..5.0, center in -3.0f64..3.0,
        ) {
            let g = SpectralProfile::gaussian(center);
            let b = PairAmplitude::new(g.clone(), g, delay, true);
            prop_assert_eq!(b.eval(q, qp), b.eval(qp, q));
        }
    }
}
