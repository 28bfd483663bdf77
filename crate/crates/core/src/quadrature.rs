//! Quadrature engine for the wavepacket integrals.
//!
//! Two rule families are provided. [`GaussHermite`] is specialised to
//! integrands that carry a Gaussian envelope (every integral built from the
//! Gaussian spectral profile). [`AdaptivePanel`] is a globally adaptive
//! Gauss–Kronrod (7/15) bisection scheme for everything else: tabulated
//! profiles, small `Γ` where the scattering poles approach the real axis, and
//! cross-checks of the Gauss–Hermite path.
//!
//! Integrands may be real, complex, or fixed-size arrays of either, through
//! the [`Accumulate`] trait, so several related integrals can share one pass
//! over the nodes.

use std::cell::RefCell;
use std::collections::BinaryHeap;
use std::cmp::Ordering;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Half-width, in envelope scales, of the window used when a Gaussian
/// domain is truncated for a panel rule.
pub const TRUNCATION: f64 = 12.0;

/// Values that quadrature rules can accumulate.
pub trait Accumulate: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn scale(self, factor: f64) -> Self;
    /// Size used for error control (max-norm over components).
    fn magnitude(&self) -> f64;

    fn sub(self, other: Self) -> Self {
        self.add(other.scale(-1.0))
    }
}

impl Accumulate for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Accumulate for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
    fn magnitude(&self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

impl<T: Accumulate, const N: usize> Accumulate for [T; N] {
    fn zero() -> Self {
        [T::zero(); N]
    }
    fn add(mut self, other: Self) -> Self {
        for (a, b) in self.iter_mut().zip(other) {
            *a = a.add(b);
        }
        self
    }
    fn scale(mut self, factor: f64) -> Self {
        for a in self.iter_mut() {
            *a = a.scale(factor);
        }
        self
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(Accumulate::magnitude).fold(0.0, f64::max)
    }
}

/// Where an integrand lives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Domain {
    /// Whole real line; the integrand decays like `exp(-((x - center)/scale)^2)`.
    Gaussian { center: f64, scale: f64 },
    /// A finite interval outside which the integrand vanishes.
    Interval { lo: f64, hi: f64 },
}

impl Domain {
    pub fn gaussian(center: f64, scale: f64) -> Self {
        Domain::Gaussian { center, scale }
    }

    pub fn interval(lo: f64, hi: f64) -> Self {
        Domain::Interval { lo, hi }
    }

    /// Finite bounds used by panel rules.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Gaussian { center, scale } => {
                (center - TRUNCATION * scale, center + TRUNCATION * scale)
            }
            Domain::Interval { lo, hi } => (lo, hi),
        }
    }
}

/// Gauss–Hermite rule of fixed order for `∫ exp(-x²) f(x) dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// `weights[i] * exp(nodes[i]^2)`, evaluated without overflow.
    scaled_weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds the rule from the roots of the orthonormal Hermite
    /// recurrence.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Hermite order must be positive");
        let n = order;
        let pim4 = std::f64::consts::PI.powf(-0.25);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let mut scaled = vec![0.0; n];
        let nf = n as f64;

        // Returns (p_n(z), sqrt(2n) p_{n-1}(z)) for orthonormal polynomials
        // seeded with `p0`.
        let recur = |z: f64, p0: f64| {
            let (mut p1, mut p2) = (p0, 0.0);
            for j in 1..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
            }
            (p1, (2.0 * nf).sqrt() * p2)
        };

        // Positive roots: bracket sign changes of the Hermite function on a
        // grid finer than the smallest root spacing, then polish each by
        // safeguarded Newton.
        let hermite_fn = |z: f64| recur(z, pim4 * (-0.5 * z * z).exp()).0;
        let mut positive = Vec::with_capacity(n / 2);
        let h = 0.05 * std::f64::consts::PI / (2.0 * nf + 1.0).sqrt();
        let top = (2.0 * nf + 1.0).sqrt() + 2.0;
        let mut lo = 0.5 * h;
        let mut f_lo = hermite_fn(lo);
        while positive.len() < n / 2 && lo < top {
            let hi = lo + h;
            let f_hi = hermite_fn(hi);
            if f_lo == 0.0 || f_lo.signum() != f_hi.signum() {
                let (mut a, mut b) = (lo, hi);
                let mut z = 0.5 * (a + b);
                for _ in 0..100 {
                    let (p, dp) = recur(z, pim4);
                    let fa = hermite_fn(a);
                    if fa.signum() == p.signum() {
                        a = z;
                    } else {
                        b = z;
                    }
                    let newton = z - p / dp;
                    let next = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
                    let done = (next - z).abs() <= 1e-15 * z.max(1.0);
                    z = next;
                    if done {
                        break;
                    }
                }
                positive.push(z);
            }
            lo = hi;
            f_lo = f_hi;
        }
        assert_eq!(positive.len(), n / 2, "Gauss-Hermite root search failed for order {n}");
        let mut roots: Vec<f64> = positive.iter().rev().copied().collect();
        if n % 2 == 1 {
            roots.push(0.0);
        }
        for (i, &z) in roots.iter().enumerate() {
            let (_, pp) = recur(z, pim4);
            // Hermite functions carry exp(-z²/2), giving w·exp(z²) directly.
            let (_, dq) = recur(z, pim4 * (-0.5 * z * z).exp());
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
            scaled[i] = 2.0 / (dq * dq);
            scaled[n - 1 - i] = scaled[i];
        }
        nodes.reverse();
        weights.reverse();
        scaled.reverse();
        GaussHermite {
            nodes,
            weights,
            scaled_weights: scaled,
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ exp(-x²) f(x) dx`.
    pub fn integrate_weighted<V: Accumulate>(&self, mut f: impl FnMut(f64) -> V) -> V {
        self.nodes
            .iter()
            .zip(&self.weights)
            .fold(V::zero(), |acc, (&x, &w)| acc.add(f(x).scale(w)))
    }

    /// `∫ f(x) dx` for `f` with envelope `exp(-((x - center)/scale)^2)`.
    /// The caller passes `f` itself; the envelope is divided out here.
    pub fn integrate_envelope<V: Accumulate>(
        &self,
        center: f64,
        scale: f64,
        mut f: impl FnMut(f64) -> V,
    ) -> V {
        self.nodes
            .iter()
            .zip(&self.scaled_weights)
            .fold(V::zero(), |acc, (&u, &w)| {
                acc.add(f(center + scale * u).scale(w * scale))
            })
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
    pub panels: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<V: Accumulate>(f: &mut impl FnMut(f64) -> V, lo: f64, hi: f64) -> (V, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut kron = fc.scale(WGK[7]);
    let mut gauss = fc.scale(WG[3]);
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx).add(f(c + dx));
        kron = kron.add(pair.scale(WGK[j]));
        if j % 2 == 1 {
            gauss = gauss.add(pair.scale(WG[j / 2]));
        }
    }
    let kron = kron.scale(h);
    let gauss = gauss.scale(h);
    let err = kron.sub(gauss).magnitude();
    (kron, err)
}

struct Panel<V> {
    lo: f64,
    hi: f64,
    value: V,
    error: f64,
}

impl<V> PartialEq for Panel<V> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V> Eq for Panel<V> {}
impl<V> PartialOrd for Panel<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Panel<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) panel rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdaptivePanel {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
    /// Uniform panels each breakpoint-delimited piece starts with.
    pub initial_panels: usize,
}

impl AdaptivePanel {
    pub fn new(tol: f64) -> Self {
        AdaptivePanel {
            abs_tol: tol,
            rel_tol: 0.0,
            max_panels: 4000,
            initial_panels: 8,
        }
    }

    pub fn with_tolerance(self, tol: f64) -> Self {
        AdaptivePanel {
            abs_tol: tol,
            ..self
        }
    }

    /// `∫_lo^hi f`. Breakpoints inside `(lo, hi)` become panel edges; put
    /// them at the real parts of nearby poles.
    pub fn integrate<V: Accumulate>(
        &self,
        mut f: impl FnMut(f64) -> V,
        lo: f64,
        hi: f64,
        breakpoints: &[f64],
    ) -> Result<Estimate<V>> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite integration bounds [{lo}, {hi}]"
            )));
        }
        if lo == hi {
            return Ok(Estimate {
                value: V::zero(),
                error: 0.0,
                panels: 0,
            });
        }
        let (lo, hi, sign) = if lo < hi { (lo, hi, 1.0) } else { (hi, lo, -1.0) };

        let mut edges: Vec<f64> = vec![lo, hi];
        edges.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        edges.sort_by(f64::total_cmp);
        edges.dedup();

        let mut heap = BinaryHeap::new();
        let per_piece = self.initial_panels.max(1);
        for w in edges.windows(2) {
            let width = (w[1] - w[0]) / per_piece as f64;
            for j in 0..per_piece {
                let a = w[0] + j as f64 * width;
                let b = if j + 1 == per_piece { w[1] } else { a + width };
                let (value, error) = kronrod15(&mut f, a, b);
                heap.push(Panel {
                    lo: a,
                    hi: b,
                    value,
                    error,
                });
            }
        }

        let span = hi - lo;
        loop {
            let (total, err) = heap.iter().fold((V::zero(), 0.0), |(v, e), p| {
                (v.add(p.value), e + p.error)
            });
            let target = self.abs_tol.max(self.rel_tol * total.magnitude());
            if err <= target {
                return Ok(Estimate {
                    value: total.scale(sign),
                    error: err,
                    panels: heap.len(),
                });
            }
            if heap.len() >= self.max_panels {
                return Err(Error::NotConverged {
                    estimate: err,
                    panels: heap.len(),
                });
            }
            let worst = heap.pop().expect("heap holds at least one panel");
            let mid = 0.5 * (worst.lo + worst.hi);
            if worst.hi - worst.lo < 1e-13 * span {
                // Cannot refine further; accept the panel as is.
                heap.push(Panel { error: 0.0, ..worst });
                continue;
            }
            for (a, b) in [(worst.lo, mid), (mid, worst.hi)] {
                let (value, error) = kronrod15(&mut f, a, b);
                heap.push(Panel {
                    lo: a,
                    hi: b,
                    value,
                    error,
                });
            }
        }
    }

    /// `∫_{-∞}^{∞} f` through the substitution `x = s·t/(1 - t²)`.
    pub fn integrate_real_line<V: Accumulate>(
        &self,
        mut f: impl FnMut(f64) -> V,
        scale: f64,
    ) -> Result<Estimate<V>> {
        let g = |t: f64| {
            let d = 1.0 - t * t;
            if d <= 0.0 {
                return V::zero();
            }
            let x = scale * t / d;
            let jac = scale * (1.0 + t * t) / (d * d);
            if !jac.is_finite() {
                return V::zero();
            }
            f(x).scale(jac)
        };
        self.integrate(g, -1.0, 1.0, &[0.0])
    }
}

/// A quadrature rule selectable at run time.
#[derive(Debug, Clone, PartialEq)]
pub enum QuadratureRule {
    GaussHermite(GaussHermite),
    AdaptivePanel(AdaptivePanel),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    GaussHermite,
    AdaptivePanel,
    /// Uniform midpoint grid of the brute-force oracle.
    Grid,
}

impl QuadratureRule {
    pub fn gauss_hermite(order: usize) -> Self {
        QuadratureRule::GaussHermite(GaussHermite::new(order))
    }

    pub fn adaptive(tol: f64) -> Self {
        QuadratureRule::AdaptivePanel(AdaptivePanel::new(tol))
    }

    pub fn kind(&self) -> RuleKind {
        match self {
            QuadratureRule::GaussHermite(_) => RuleKind::GaussHermite,
            QuadratureRule::AdaptivePanel(_) => RuleKind::AdaptivePanel,
        }
    }

    /// Same rule, tightened or loosened for an inner integral.
    fn inner(&self) -> QuadratureRule {
        match self {
            QuadratureRule::GaussHermite(_) => self.clone(),
            QuadratureRule::AdaptivePanel(a) => {
                QuadratureRule::AdaptivePanel(a.with_tolerance(0.1 * a.abs_tol))
            }
        }
    }
}

/// `∫ f(x) dx` over `domain`.
///
/// Gauss–Hermite needs a [`Domain::Gaussian`]; the caller supplies `f`
/// itself and the rule divides out the envelope. `breakpoints` only affect
/// panel rules.
pub fn integrate_1d<V: Accumulate>(
    f: impl FnMut(f64) -> V,
    rule: &QuadratureRule,
    domain: Domain,
    breakpoints: &[f64],
) -> Result<V> {
    match (rule, domain) {
        (QuadratureRule::GaussHermite(gh), Domain::Gaussian { center, scale }) => {
            Ok(gh.integrate_envelope(center, scale, f))
        }
        (QuadratureRule::GaussHermite(_), Domain::Interval { .. }) => Err(Error::RuleMismatch(
            "Gauss-Hermite needs a Gaussian envelope; use an adaptive rule".into(),
        )),
        (QuadratureRule::AdaptivePanel(ap), d) => {
            let (lo, hi) = d.bounds();
            ap.integrate(f, lo, hi, breakpoints).map(|e| e.value)
        }
    }
}

/// `∫∫ f(x, y) dx dy`: tensor product for Gauss–Hermite, nested adaptive
/// panels otherwise (inner tolerance a tenth of the outer).
pub fn integrate_2d<V: Accumulate>(
    mut f: impl FnMut(f64, f64) -> V,
    rule: &QuadratureRule,
    x_domain: Domain,
    y_domain: Domain,
) -> Result<V> {
    let inner_rule = rule.inner();
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let outer = integrate_1d(
        |x| match integrate_1d(|y| f(x, y), &inner_rule, y_domain, &[]) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                V::zero()
            }
        },
        rule,
        x_domain,
        &[],
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}
