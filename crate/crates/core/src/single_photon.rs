//! One-photon scattering off the emitter.
//!
//! For the resonant link the amplitudes are `r = w/(w + iΓ)` for staying in
//! the incoming channel and `t = -iΓ/(w + iΓ)` for crossing over; the
//! embedded reflector swaps them. The beam-splitter (HOM) geometry uses the
//! link amplitudes. The channel matrix is always
//!
//! ```text
//!     s = | r  t |
//!         | t  r |
//! ```
//!
//! i.e. reflection-symmetric (`r = r'`, `t = t'`).

use num_complex::Complex64;
use serde::Serialize;

use crate::model::{Channel, Geometry};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatteringMatrix {
    /// Same-channel amplitude.
    pub r: Complex64,
    /// Cross-channel amplitude.
    pub t: Complex64,
    /// Detuning `w = ω/σ` the amplitudes were evaluated at.
    pub detuning: f64,
}

impl ScatteringMatrix {
    pub fn transmission(&self) -> f64 {
        self.t.norm_sqr()
    }

    pub fn reflection(&self) -> f64 {
        self.r.norm_sqr()
    }

    /// `s_{αβ}`: amplitude for a photon entering in `beta` to leave in `alpha`.
    pub fn entry(&self, alpha: Channel, beta: Channel) -> Complex64 {
        if alpha == beta {
            self.r
        } else {
            self.t
        }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.r, self.t], [self.t, self.r]]
    }
}

/// Amplitudes at detuning `w` (σ-units) for linewidth ratio `gamma`.
pub fn amplitudes(w: f64, gamma: f64, geometry: Geometry) -> ScatteringMatrix {
    let denom = Complex64::new(w, gamma);
    let stay = Complex64::new(w, 0.0) / denom;
    let cross = Complex64::new(0.0, -gamma) / denom;
    let (r, t) = match geometry {
        Geometry::ResonantLink | Geometry::HomSplit => (stay, cross),
        Geometry::EmbeddedReflector => (cross, stay),
    };
    ScatteringMatrix { r, t, detuning: w }
}

/// Max-norm of `S†S - 1`.
pub fn unitarity_defect(s: &ScatteringMatrix) -> f64 {
    let m = s.matrix();
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let mut v = Complex64::new(0.0, 0.0);
            for row in &m {
                v += row[i].conj() * row[j];
            }
            if i == j {
                v -= 1.0;
            }
            worst = worst.max(v.norm());
        }
    }
    worst
}

/// Smooth factor `s_{αβ}(q)` of the one-photon S-matrix kernel; the
/// accompanying `δ(k - q)` is consumed by the two-photon integrals.
pub fn smatrix_kernel(alpha: Channel, beta: Channel, q: f64, gamma: f64, geometry: Geometry) -> Complex64 {
    amplitudes(q, gamma, geometry).entry(alpha, beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const ALL: [Geometry; 3] = [Geometry::HomSplit, Geometry::EmbeddedReflector, Geometry::ResonantLink];

    #[test]
    fn exact_resonance_link_transmits() {
        for gamma in [0.1, 1.0, 37.0] {
            let s = amplitudes(0.0, gamma, Geometry::ResonantLink);
            assert_eq!(s.r, Complex64::new(0.0, 0.0));
            assert!((s.t - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
            assert_eq!((s.transmission(), s.reflection()), (1.0, 0.0));
        }
    }

    #[test]
    fn balance_point() {
        for gamma in [0.5, 2.0, 10.0] {
            let s = amplitudes(gamma, gamma, Geometry::HomSplit);
            assert!((s.r - Complex64::new(0.5, -0.5)).norm() < 1e-15);
            assert!((s.t - Complex64::new(-0.5, -0.5)).norm() < 1e-15);
            assert!((s.transmission() - 0.5).abs() < 1e-12);
            assert!((s.reflection() - 0.5).abs() < 1e-12);
            assert!(unitarity_defect(&s) < 1e-12);
        }
    }

    #[test]
    fn far_detuned_photon_is_unaffected() {
        let s = amplitudes(1e9, 1.0, Geometry::ResonantLink);
        assert!((s.r - 1.0).norm() < 1e-8);
        assert!(s.t.norm() < 1e-8);
    }

    #[test]
    fn deliberate_violation_is_detected() {
        let mut s = amplitudes(0.7, 1.3, Geometry::ResonantLink);
        s.t *= 0.9;
        assert!(unitarity_defect(&s) > 0.1);
    }

    #[test]
    fn kernel_conventions() {
        let g = 2.0;
        for q in [-3.0, 0.0, 0.4, 5.0] {
            for geo in ALL {
                let s12 = smatrix_kernel(Channel::One, Channel::Two, q, g, geo);
                let s21 = smatrix_kernel(Channel::Two, Channel::One, q, g, geo);
                let s11 = smatrix_kernel(Channel::One, Channel::One, q, g, geo);
                assert_eq!(s12, s21);
                assert!((s11.norm_sqr() + s21.norm_sqr() - 1.0).abs() < 1e-14);
            }
            // Link: the same-channel entry is r, so resonant photons cross.
            let s = amplitudes(q, g, Geometry::ResonantLink);
            assert_eq!(smatrix_kernel(Channel::One, Channel::One, q, g, Geometry::ResonantLink), s.r);
        }
        assert!(smatrix_kernel(Channel::Two, Channel::One, 0.0, g, Geometry::ResonantLink).norm() > 0.999_999);
        assert!(smatrix_kernel(Channel::One, Channel::One, 0.0, g, Geometry::EmbeddedReflector).norm() > 0.999_999);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn unitarity_and_modulus_symmetry(w in -1e3f64..1e3, gamma in 1e-3f64..1e3) {
            for geo in ALL {
                let s = amplitudes(w, gamma, geo);
                prop_assert!((s.transmission() + s.reflection() - 1.0).abs() < 1e-12);
                prop_assert!(unitarity_defect(&s) < 1e-12);
                let m = amplitudes(-w, gamma, geo);
                prop_assert!((m.r.norm() - s.r.norm()).abs() < 1e-12);
            }
        }

        #[test]
        fn reflector_is_dual_of_link(w in -50.0f64..50.0, gamma in 1e-2f64..50.0) {
            let link = amplitudes(w, gamma, Geometry::ResonantLink);
            let refl = amplitudes(w, gamma, Geometry::EmbeddedReflector);
            prop_assert_eq!(link.r, refl.t);
            prop_assert_eq!(link.t, refl.r);
        }
    }
}
