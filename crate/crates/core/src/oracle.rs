//! Brute-force cross-check of the quadrature path.
//!
//! Everything here is transcribed a second time from the scattering
//! formulas and integrated with plain midpoint sums on a uniform grid in
//! `(ε, ξ)`. Only the parameter and table types are shared with the rest of
//! the crate. The bound-term tail is summed out to a large cutoff instead
//! of being taken in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{zeta_hom_gaussian, HomCorrection};
use crate::error::{Error, Result};
use crate::model::{make_pair_amplitude, Channel, Geometry, ModelParams};
use crate::quadrature::{QuadratureRule, RuleKind};
use crate::two_photon::{default_rule, probability_table_with, ProbabilityTable, Settings, OUTGOING_PAIRS};

/// Uniform midpoint grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    /// Step in both `ε` and `ξ`.
    pub spacing: f64,
    /// Half-width, in packet widths, of the region where the packets live.
    pub extent: f64,
    /// The bound term is summed over `|ξ| ≤ tail_factor · max(Γ, 1)`.
    pub tail_factor: f64,
    pub interaction: bool,
    pub interaction_weight: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            spacing: 0.1,
            extent: 8.0,
            tail_factor: 200.0,
            interaction: true,
            interaction_weight: 1.0,
        }
    }
}

impl GridSpec {
    pub fn new(spacing: f64, extent: f64) -> Self {
        GridSpec {
            spacing,
            extent,
            ..GridSpec::default()
        }
    }

    pub fn interaction_off(self) -> Self {
        GridSpec {
            interaction: false,
            ..self
        }
    }

    pub fn with_weight(self, w: f64) -> Self {
        GridSpec {
            interaction_weight: w,
            ..self
        }
    }

    /// Half the spacing, twice the extent and cutoff.
    pub fn refined(self) -> Self {
        GridSpec {
            spacing: 0.5 * self.spacing,
            extent: 2.0 * self.extent,
            tail_factor: 2.0 * self.tail_factor,
            ..self
        }
    }
}

/// Change in any table entry tolerated between a grid and its refinement.
pub const GRID_CONVERGENCE_TOL: f64 = 1e-6;

/// Tolerance for oracle vs quadrature agreement.
pub const AGREEMENT_TOL: f64 = 1e-4;

fn packet(q: f64, center: f64) -> f64 {
    (-(q - center) * (q - center) / 4.0).exp() / (2.0 * PI).powf(0.25)
}

fn incoming(params: &ModelParams, q: f64, qp: f64) -> Complex64 {
    let c = params.center;
    let one = |a: f64, b: f64| Complex64::from_polar(packet(a, c) * packet(b, c), a * params.delay);
    if params.incoming.0 == params.incoming.1 {
        (one(q, qp) + one(qp, q)) * 0.5
    } else {
        one(q, qp)
    }
}

/// `s_{αβ}(k)`, written out per geometry.
fn one_photon(geometry: Geometry, gamma: f64, k: f64, alpha: Channel, beta: Channel) -> Complex64 {
    let d = Complex64::new(k, gamma);
    let pass = Complex64::new(k, 0.0) / d;
    let emit = Complex64::new(0.0, -gamma) / d;
    let same = alpha == beta;
    match (geometry, same) {
        (Geometry::EmbeddedReflector, true) => emit,
        (Geometry::EmbeddedReflector, false) => pass,
        (_, true) => pass,
        (_, false) => emit,
    }
}

fn midpoints(lo: f64, hi: f64, h: f64) -> impl Iterator<Item = f64> + Clone {
    let n = ((hi - lo) / h).round().max(1.0) as usize;
    let step = (hi - lo) / n as f64;
    (0..n).map(move |i| lo + (i as f64 + 0.5) * step)
}

fn step(lo: f64, hi: f64, h: f64) -> f64 {
    (hi - lo) / ((hi - lo) / h).round().max(1.0)
}

/// Channel-resolved table from midpoint sums on `grid`.
pub fn grid_probability(params: &ModelParams, grid: &GridSpec) -> Result<ProbabilityTable> {
    if !(grid.spacing > 0.0 && grid.extent > 0.0 && grid.tail_factor > 0.0) {
        return Err(Error::InvalidParams("grid spacing, extent and cutoff must be positive".into()));
    }
    let g = params.gamma;
    let e = grid.extent;
    let (beta, beta_p) = params.incoming;
    let (e_lo, e_hi) = (2.0 * params.center - 2.0 * e, 2.0 * params.center + 2.0 * e);
    let de = step(e_lo, e_hi, grid.spacing);
    let dx_in = step(-e, e, grid.spacing);
    // Without the bound term nothing lives outside the packet region.
    let cutoff = if grid.interaction { grid.tail_factor * g.max(1.0) } else { e };
    let dx_out = step(-cutoff, cutoff, grid.spacing);

    let eps_nodes: Vec<f64> = midpoints(e_lo, e_hi, grid.spacing).collect();
    let rows: Vec<[f64; 7]> = eps_nodes
        .par_iter()
        .map(|&eps| {
            let omega = Complex64::new(eps / 2.0, g);
            let bound_sum: Complex64 = if grid.interaction {
                midpoints(-e, e, grid.spacing)
                    .map(|x| incoming(params, eps / 2.0 + x, eps / 2.0 - x) / (omega * omega - x * x))
                    .sum::<Complex64>()
                    * dx_in
            } else {
                Complex64::new(0.0, 0.0)
            };
            let mut acc = [0.0; 7];
            for x in midpoints(-cutoff, cutoff, grid.spacing) {
                let (k, kp) = (eps / 2.0 + x, eps / 2.0 - x);
                let bound = if grid.interaction {
                    let a = Complex64::new(k, g) * Complex64::new(kp, g);
                    let t = -4.0 * g * g * omega / a * bound_sum / (2.0 * PI);
                    Complex64::new(0.0, -grid.interaction_weight) * t
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let inside = x.abs() <= e;
                let (b, bx) = if inside {
                    (incoming(params, k, kp), incoming(params, kp, k))
                } else {
                    (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
                };
                for (c, &(a1, a2)) in OUTGOING_PAIRS.iter().enumerate() {
                    let f0 = if inside {
                        one_photon(params.geometry, g, k, a1, beta) * one_photon(params.geometry, g, kp, a2, beta_p) * b
                            + one_photon(params.geometry, g, k, a1, beta_p) * one_photon(params.geometry, g, kp, a2, beta) * bx
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    acc[c] += f0.norm_sqr();
                    acc[3 + c] += (f0 + bound).norm_sqr();
                }
                acc[6] += b.norm_sqr();
            }
            acc.map(|v| v * dx_out)
        })
        .collect();

    let mut sums = [0.0; 7];
    for r in &rows {
        for (s, v) in sums.iter_mut().zip(r) {
            *s += v * de;
        }
    }
    let norm = if beta == beta_p { 2.0 } else { 1.0 } * sums[6];
    if !(norm > 0.0) {
        return Err(Error::InvalidParams("incoming pair has zero norm on the grid".into()));
    }
    Ok(ProbabilityTable::from_integrals(
        params.incoming,
        [sums[0], sums[1], sums[2]],
        [sums[3], sums[4], sums[5]],
        norm,
        RuleKind::Grid,
    ))
}

fn rule_or_default(rule: Option<&QuadratureRule>, params: &ModelParams) -> QuadratureRule {
    rule.cloned().unwrap_or_else(|| default_rule(params))
}

fn max_entry_change(a: &ProbabilityTable, b: &ProbabilityTable) -> f64 {
    a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| (x.total - y.total).abs().max((x.independent - y.independent).abs()))
        .fold(0.0, f64::max)
}

/// [`grid_probability`] on `grid` and on its refinement; fails with
/// [`Error::GridNotConverged`] if any entry moves by more than
/// [`GRID_CONVERGENCE_TOL`]. Returns the refined table.
pub fn grid_probability_checked(params: &ModelParams, grid: &GridSpec) -> Result<ProbabilityTable> {
    let coarse = grid_probability(params, grid)?;
    let fine = grid_probability(params, &grid.refined())?;
    let change = max_entry_change(&coarse, &fine);
    if change > GRID_CONVERGENCE_TOL {
        return Err(Error::GridNotConverged { change });
    }
    Ok(fine)
}

/// One oracle-vs-reference comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub label: String,
    pub params: ModelParams,
    pub oracle: f64,
    pub main: f64,
    pub abs_deviation: f64,
    pub rel_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl OracleReport {
    /// `tolerance` applies to the absolute deviation.
    pub fn absolute(label: impl Into<String>, params: ModelParams, oracle: f64, main: f64, tolerance: f64) -> Self {
        let abs = (oracle - main).abs();
        OracleReport {
            label: label.into(),
            params,
            oracle,
            main,
            abs_deviation: abs,
            rel_deviation: relative(abs, main),
            tolerance,
            pass: abs < tolerance,
        }
    }

    /// `tolerance` applies to the deviation relative to `main`.
    pub fn relative(label: impl Into<String>, params: ModelParams, oracle: f64, main: f64, tolerance: f64) -> Self {
        let r = Self::absolute(label, params, oracle, main, f64::INFINITY);
        OracleReport {
            tolerance,
            pass: r.rel_deviation < tolerance,
            ..r
        }
    }
}

fn relative(abs: f64, reference: f64) -> f64 {
    if reference == 0.0 {
        if abs == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        abs / reference.abs()
    }
}

/// Which reading of the balanced-HOM interaction correction the exact
/// calculation supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `δP_HOM = ζ` ([`HomCorrection::Normalized`]).
    Zeta,
    /// `δP_HOM = ζ/2` ([`HomCorrection::Literal`]).
    HalfZeta,
    Inconclusive,
}

impl Verdict {
    pub fn reading(self) -> Option<HomCorrection> {
        match self {
            Verdict::Zeta => Some(HomCorrection::Normalized),
            Verdict::HalfZeta => Some(HomCorrection::Literal),
            Verdict::Inconclusive => None,
        }
    }
}

/// Selection tolerance for a reading.
pub const VERDICT_TOL: f64 = 0.03;
/// Beyond this distance from both readings the audit is inconclusive.
pub const INCONCLUSIVE_TOL: f64 = 0.25;

/// Balanced HOM at `Δ = 0` for one `Γ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorRow {
    pub gamma: f64,
    pub p_hom: f64,
    pub p0: f64,
    /// `δP = p_hom - p0`.
    pub delta: f64,
    pub zeta: f64,
    pub dev_zeta: f64,
    pub dev_half_zeta: f64,
    /// Relative distance of the total `p_hom` from the asymptote `ζ`.
    pub dev_total: f64,
    pub verdict: Verdict,
    /// Bound-term weight that would make `δP` equal `ζ`, resp. `ζ/2`.
    pub weight_for_zeta: Option<f64>,
    pub weight_for_half_zeta: Option<f64>,
}

fn classify(dev_zeta: f64, dev_half: f64) -> Verdict {
    match (dev_zeta < VERDICT_TOL, dev_half < VERDICT_TOL) {
        (true, false) => Verdict::Zeta,
        (false, true) => Verdict::HalfZeta,
        (true, true) => Verdict::Inconclusive,
        (false, false) if dev_zeta.min(dev_half) > INCONCLUSIVE_TOL => Verdict::Inconclusive,
        (false, false) => {
            if dev_zeta < dev_half {
                Verdict::Zeta
            } else {
                Verdict::HalfZeta
            }
        }
    }
}

/// Solves `w·lin + w²·quad = target` for the root nearest 1.
fn weight_for(lin: f64, quad: f64, target: f64) -> Option<f64> {
    if quad.abs() < 1e-300 {
        return (lin != 0.0).then(|| target / lin);
    }
    let disc = lin * lin + 4.0 * quad * target;
    if disc < 0.0 {
        return None;
    }
    let s = disc.sqrt();
    let roots = [(-lin + s) / (2.0 * quad), (-lin - s) / (2.0 * quad)];
    roots
        .into_iter()
        .min_by(|a, b| (a - 1.0).abs().total_cmp(&(b - 1.0).abs()))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub const SLOPE_TARGET: f64 = -1.0;
pub const SLOPE_TOL: f64 = 0.05;
pub const SLOPE_WINDOW: (f64, f64) = (5.0, 50.0);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorAudit {
    pub rows: Vec<FactorRow>,
    /// Verdict at the largest audited `Γ`.
    pub verdict: Verdict,
    pub verdict_gamma: f64,
    /// Slopes of `δP` and of the total `p_hom` over [`SLOPE_WINDOW`].
    pub slope_delta: Option<f64>,
    pub slope_total: Option<f64>,
    pub slope_pass: bool,
    pub reports: Vec<OracleReport>,
}

/// Compares the exact balanced-HOM correction at `Δ = 0` with `ζ` and `ζ/2`
/// for each `Γ` (all `Γ ≥ 2`), using the grid oracle.
pub fn factor_audit(gammas: &[f64], grid: &GridSpec) -> Result<FactorAudit> {
    if gammas.is_empty() {
        return Err(Error::InvalidParams("factor audit needs at least one gamma".into()));
    }
    if let Some(g) = gammas.iter().find(|g| !(**g >= 2.0)) {
        return Err(Error::InvalidParams(format!("factor audit needs gamma >= 2, got {g}")));
    }
    let rows: Vec<FactorRow> = gammas
        .par_iter()
        .map(|&gamma| -> Result<FactorRow> {
            let params = ModelParams::balanced_hom(gamma, 0.0)?;
            let plus = *grid_probability(&params, grid)?.anti_bunching();
            let minus = *grid_probability(&params, &grid.with_weight(-grid.interaction_weight))?
                .anti_bunching();
            let w = grid.interaction_weight;
            // δP(w) = w·lin + w²·quad.
            let lin = (plus.interaction - minus.interaction) / (2.0 * w);
            let quad = (plus.interaction + minus.interaction) / (2.0 * w * w);
            let zeta = zeta_hom_gaussian(gamma, 0.0);
            let dev_zeta = (plus.interaction - zeta).abs() / zeta;
            let dev_half_zeta = (plus.interaction - zeta / 2.0).abs() / (zeta / 2.0);
            Ok(FactorRow {
                gamma,
                p_hom: plus.total,
                p0: plus.independent,
                delta: plus.interaction,
                zeta,
                dev_zeta,
                dev_half_zeta,
                dev_total: (plus.total - zeta).abs() / zeta,
                verdict: classify(dev_zeta, dev_half_zeta),
                weight_for_zeta: weight_for(lin, quad, zeta),
                weight_for_half_zeta: weight_for(lin, quad, zeta / 2.0),
            })
        })
        .collect::<Result<_>>()?;

    let last = rows
        .iter()
        .max_by(|a, b| a.gamma.total_cmp(&b.gamma))
        .expect("non-empty");
    let in_window = |r: &&FactorRow| r.gamma >= SLOPE_WINDOW.0 && r.gamma <= SLOPE_WINDOW.1;
    let delta_pts: Vec<_> = rows.iter().filter(in_window).map(|r| (r.gamma, r.delta)).collect();
    let total_pts: Vec<_> = rows.iter().filter(in_window).map(|r| (r.gamma, r.p_hom)).collect();
    let slope_delta = log_log_slope(&delta_pts);
    let slope_total = log_log_slope(&total_pts);
    let slope_pass = slope_delta.is_some_and(|s| (s - SLOPE_TARGET).abs() <= SLOPE_TOL);

    let reports = rows
        .iter()
        .map(|r| {
            let params = ModelParams::balanced_hom(r.gamma, 0.0).expect("validated above");
            let reference = match r.verdict {
                Verdict::HalfZeta => r.zeta / 2.0,
                _ => r.zeta,
            };
            OracleReport::relative(format!("delta_p_hom gamma={}", r.gamma), params, r.delta, reference, VERDICT_TOL)
        })
        .collect();

    Ok(FactorAudit {
        verdict: last.verdict,
        verdict_gamma: last.gamma,
        slope_delta,
        slope_total,
        slope_pass,
        rows,
        reports,
    })
}

pub const STANDARD_GAMMAS: [f64; 6] = [0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
pub const STANDARD_DELAYS: [f64; 3] = [0.0, 1.0, 3.0];
pub const AUDIT_GAMMAS: [f64; 7] = [2.0, 5.0, 10.0, 15.0, 20.0, 30.0, 50.0];

/// Balanced HOM plus both resonance geometries at every `(Γ, Δ)` of the
/// standard grid.
pub fn standard_sweep() -> Vec<ModelParams> {
    let mut out = Vec::new();
    for &gamma in &STANDARD_GAMMAS {
        for &delay in &STANDARD_DELAYS {
            out.push(ModelParams::balanced_hom(gamma, delay).expect("valid"));
            for geo in [Geometry::ResonantLink, Geometry::EmbeddedReflector] {
                out.push(ModelParams::resonance(gamma, delay, geo).expect("valid"));
            }
        }
    }
    out
}

/// Oracle vs quadrature on every entry (total and interaction-free) of one
/// table.
/// `rule` overrides the quadrature path's default rule.
pub fn compare_with_main(
    params: &ModelParams,
    grid: &GridSpec,
    settings: Settings,
    rule: Option<&QuadratureRule>,
) -> Result<Vec<OracleReport>> {
    let grid = GridSpec {
        interaction: settings.interaction,
        interaction_weight: settings.interaction_weight,
        ..*grid
    };
    let oracle = grid_probability(params, &grid)?;
    let main = probability_table_with(&make_pair_amplitude(params), params, &rule_or_default(rule, params), settings)?;
    let mut out = Vec::with_capacity(6);
    for (o, m) in oracle.entries.iter().zip(&main.entries) {
        let tag = format!("{}{}", o.outgoing.0, o.outgoing.1);
        out.push(OracleReport::absolute(format!("P{tag} total"), *params, o.total, m.total, AGREEMENT_TOL));
        out.push(OracleReport::absolute(format!("P{tag} independent"), *params, o.independent, m.independent, AGREEMENT_TOL));
    }
    Ok(out)
}

/// Unitarity defect of the quadrature path at one point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitarityPoint {
    pub params: ModelParams,
    pub interaction: bool,
    pub defect: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub const UNITARITY_OFF_TOL: f64 = 1e-9;
pub const UNITARITY_ON_TOL: f64 = 1e-2;

/// Defects with the interaction off (all points) and on (`Γ ≥ 2`).
pub fn unitarity_scan(points: &[ModelParams], rule: Option<&QuadratureRule>) -> Result<Vec<UnitarityPoint>> {
    let jobs: Vec<(ModelParams, bool)> = points
        .iter()
        .flat_map(|p| [(*p, false), (*p, true)])
        .filter(|(p, on)| !on || p.gamma >= 2.0)
        .collect();
    jobs.par_iter()
        .map(|&(params, on)| {
            let settings = if on { Settings::default() } else { Settings::interaction_off() };
            let table = probability_table_with(&make_pair_amplitude(&params), &params, &rule_or_default(rule, &params), settings)?;
            let (defect, tolerance) = if on {
                (table.unitarity_defect(), UNITARITY_ON_TOL)
            } else {
                (table.independent_unitarity_defect(), UNITARITY_OFF_TOL)
            };
            Ok(UnitarityPoint {
                params,
                interaction: on,
                defect,
                tolerance,
                pass: defect < tolerance,
            })
        })
        .collect()
}

/// Everything the audit command reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditSummary {
    pub grid: GridSpec,
    pub comparisons: Vec<OracleReport>,
    pub max_deviation: f64,
    pub unitarity: Vec<UnitarityPoint>,
    pub factor: FactorAudit,
    pub pass: bool,
}

/// Full oracle suite over the standard grid.
pub fn run_audit(grid: &GridSpec, rule: Option<&QuadratureRule>) -> Result<AuditSummary> {
    let points = standard_sweep();
    let comparisons: Vec<OracleReport> = points
        .par_iter()
        .map(|p| compare_with_main(p, grid, Settings::default(), rule))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let max_deviation = comparisons.iter().map(|r| r.abs_deviation).fold(0.0, f64::max);
    let unitarity = unitarity_scan(&points, rule)?;
    let factor = factor_audit(&AUDIT_GAMMAS, grid)?;
    let pass = comparisons.iter().all(|r| r.pass)
        && unitarity.iter().all(|u| u.pass)
        && factor.verdict != Verdict::Inconclusive;
    Ok(AuditSummary {
        grid: *grid,
        comparisons,
        max_deviation,
        unitarity,
        factor,
        pass,
    })
}
