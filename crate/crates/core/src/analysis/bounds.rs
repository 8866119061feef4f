use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{critical_margin, find_critical_gamma};
use crate::constants::{d2_intercept, integral_i};
use crate::error::{Error, Result};
use crate::evolution::AmplitudeSeries;
use crate::graph::{level_spectrum, GraphFamily, LevelSpectrum};
use crate::secular::{solve_lowest, solve_spectrum};

/// Slack on inequalities that hold up to dropped subleading terms.
pub const SMALL_TERMS_SLACK: f64 = 1.5;
/// Slack on two-dimensional finite-size comparisons.
pub const FINITE_N_SLACK: f64 = 2.0;
/// Points of the default time grid for amplitude bounds.
pub const FAILURE_GRID_POINTS: usize = 4096;
/// The default grid spans `[0, FAILURE_GRID_SPAN * sqrt N]`.
pub const FAILURE_GRID_SPAN: f64 = 16.0;

/// One checked inequality `lhs <= slack * rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub bound_id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl BoundReport {
    fn new(bound_id: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        BoundReport {
            bound_id: bound_id.to_string(),
            lhs,
            rhs,
            slack,
            pass: lhs <= slack * rhs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Above,
    Below,
}

/// Bounds checked at one coupling, plus the ones that did not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSuite {
    pub family: String,
    pub gamma: f64,
    pub gamma_c: f64,
    pub gamma_ref: f64,
    pub regime: Regime,
    pub bounds: Vec<BoundReport>,
    /// `bound_id: reason` for each inequality that was not applicable.
    pub skipped: Vec<String>,
}

impl BoundSuite {
    pub fn all_pass(&self) -> bool {
        self.bounds.iter().all(|b| b.pass)
    }
}

/// Coupling the asymptotic bounds are written against: `I_{1,d}` for
/// lattices with `d > 2`, `ln N / 4 pi + A` for `d = 2`, and the finite
/// `S_1` otherwise.
pub fn reference_coupling(g: &GraphFamily, ls: &LevelSpectrum) -> Result<f64> {
    match *g {
        GraphFamily::Lattice { dim, .. } if dim > 2 => Ok(integral_i(1, dim)?.value),
        GraphFamily::Lattice { dim: 2, .. } => {
            Ok((ls.num_vertices() as f64).ln() / (4.0 * PI) + d2_intercept()?.value)
        }
        _ => Ok(ls.inverse_moment(1)),
    }
}

struct Context {
    ls: LevelSpectrum,
    n: f64,
    gamma_c: f64,
    gamma_ref: f64,
    regime: Regime,
}

fn context(g: &GraphFamily, gamma: f64, gamma_c: Option<f64>) -> Result<Context> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let ls = level_spectrum(g)?;
    let gamma_c = match gamma_c {
        Some(v) => v,
        None => find_critical_gamma(g)?,
    };
    let margin = critical_margin(gamma_c, ls.num_vertices());
    if (gamma - gamma_c).abs() < margin {
        return Err(Error::WithinCriticalWindow {
            gamma,
            gamma_c,
            margin,
        });
    }
    let gamma_ref = reference_coupling(g, &ls)?;
    let n = ls.num_vertices() as f64;
    let regime = if gamma > gamma_c {
        Regime::Above
    } else {
        Regime::Below
    };
    Ok(Context {
        ls,
        n,
        gamma_c,
        gamma_ref,
        regime,
    })
}

/// Ground-state and first-excited-state bounds away from the critical point.
///
/// With `gamma_c` unset the critical coupling is located first.
pub fn verify_transition_bounds(
    g: &GraphFamily,
    gamma: f64,
    gamma_c: Option<f64>,
) -> Result<BoundSuite> {
    let ctx = context(g, gamma, gamma_c)?;
    let roots = solve_lowest(&ctx.ls, gamma, 2)?;
    let (e0, e1) = (roots[0].energy, roots[1].energy);
    let s1 = ctx.ls.inverse_moment(1);
    let s2 = ctx.ls.inverse_moment(2);
    let n = ctx.n;
    let mut bounds = Vec::new();
    let mut skipped = Vec::new();
    match ctx.regime {
        Regime::Above => {
            let deficit = 1.0 - roots[0].s_overlap_sq;
            if gamma > ctx.gamma_ref {
                let d = gamma - ctx.gamma_ref;
                bounds.push(BoundReport::new(
                    "ground_energy",
                    e0.abs(),
                    gamma / (n * d),
                    SMALL_TERMS_SLACK,
                ));
                bounds.push(BoundReport::new(
                    "ground_s_deficit",
                    deficit,
                    s2 / (n * d * d),
                    SMALL_TERMS_SLACK,
                ));
            } else {
                skipped.push("ground_energy: gamma below the reference coupling".into());
                skipped.push("ground_s_deficit: gamma below the reference coupling".into());
            }
            if gamma > s1 {
                bounds.push(BoundReport::new(
                    "ground_energy_finite_sum",
                    e0.abs(),
                    gamma / (n * (gamma - s1)),
                    1.0,
                ));
            } else {
                skipped.push("ground_energy_finite_sum: gamma below S_1".into());
            }
            bounds.push(BoundReport::new(
                "ground_s_deficit_exact",
                deficit,
                e0 * e0 * n * s2 / (gamma * gamma),
                1.0,
            ));
        }
        Regime::Below => {
            let deficit = 1.0 - roots[1].s_overlap_sq;
            if gamma < ctx.gamma_ref {
                let d = ctx.gamma_ref - gamma;
                bounds.push(BoundReport::new(
                    "excited_energy",
                    e1,
                    gamma / (n * d),
                    SMALL_TERMS_SLACK,
                ));
                bounds.push(BoundReport::new(
                    "excited_s_deficit",
                    deficit,
                    s2 / (n * d * d),
                    SMALL_TERMS_SLACK,
                ));
            } else {
                skipped.push("excited_energy: gamma above the reference coupling".into());
                skipped.push("excited_s_deficit: gamma above the reference coupling".into());
            }
            if gamma < s1 {
                bounds.push(BoundReport::new(
                    "excited_energy_finite_sum",
                    e1,
                    gamma / (n * (s1 - gamma)),
                    1.0,
                ));
            } else {
                skipped.push("excited_energy_finite_sum: gamma above S_1".into());
            }
        }
    }
    Ok(BoundSuite {
        family: g.label(),
        gamma,
        gamma_c: ctx.gamma_c,
        gamma_ref: ctx.gamma_ref,
        regime: ctx.regime,
        bounds,
        skipped,
    })
}

/// `FAILURE_GRID_POINTS` uniform times on `[0, FAILURE_GRID_SPAN sqrt N]`.
pub fn default_failure_grid(num_vertices: usize) -> Vec<f64> {
    let t_max = FAILURE_GRID_SPAN * (num_vertices as f64).sqrt();
    (0..FAILURE_GRID_POINTS)
        .map(|i| t_max * i as f64 / (FAILURE_GRID_POINTS - 1) as f64)
        .collect()
}

/// Lower bound `e*` on `|E_0|` in four dimensions below criticality: the
/// root of `I/gamma - (pi^2 e / 256 gamma^2) ln(1 + 16 gamma / e) = 1`.
fn four_dim_energy_floor(i14: f64, gamma: f64) -> f64 {
    let h = |e: f64| {
        i14 / gamma - PI * PI * e / (256.0 * gamma * gamma) * (16.0 * gamma / e).ln_1p() - 1.0
    };
    let mut lo = 1e-300;
    let mut hi = gamma;
    while h(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..2000 {
        let mid = (lo * hi).sqrt();
        if h(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    lo
}

/// Amplitude bounds on `max_t |<w|e^{-iHt}|s>|` over `t_grid`.
pub fn verify_failure_bounds(
    g: &GraphFamily,
    gamma: f64,
    gamma_c: Option<f64>,
    t_grid: &[f64],
) -> Result<BoundSuite> {
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t >= 0.0)) {
        return Err(Error::InvalidParameter(
            "time grid must be non-empty with t >= 0".into(),
        ));
    }
    let ctx = context(g, gamma, gamma_c)?;
    let spec = solve_spectrum(&ctx.ls, gamma)?;
    let series = AmplitudeSeries::new(&spec);
    let max_amp = t_grid
        .iter()
        .map(|&t| series.at(t).norm())
        .fold(0.0f64, f64::max);
    let ground = spec.ground();
    let e0 = ground.energy.abs();
    let sqrt_n = ctx.n.sqrt();
    let mut bounds = vec![
        BoundReport::new("global_ground_energy", max_amp, 2.0 * sqrt_n * e0, 1.0),
        BoundReport::new(
            "ground_weight",
            max_amp,
            (2.0 / (e0 * ground.secular_derivative) - 1.0) / sqrt_n,
            1.0,
        ),
    ];
    let mut skipped = Vec::new();
    let dim = match *g {
        GraphFamily::Lattice { dim, .. } => Some(dim),
        _ => None,
    };
    let gr = ctx.gamma_ref;
    match ctx.regime {
        Regime::Above => {
            if gamma > gr {
                let slack = if dim == Some(2) {
                    FINITE_N_SLACK
                } else {
                    SMALL_TERMS_SLACK
                };
                bounds.push(BoundReport::new(
                    "above_critical_amplitude",
                    max_amp,
                    2.0 * gamma / (sqrt_n * (gamma - gr)),
                    slack,
                ));
            } else {
                skipped.push("above_critical_amplitude: gamma below the reference coupling".into());
            }
        }
        Regime::Below => match dim {
            Some(2) => bounds.push(BoundReport::new(
                "below_critical_amplitude_d2",
                max_amp,
                8.0 * (e0 + PI * PI * gamma) / (PI * sqrt_n),
                FINITE_N_SLACK,
            )),
            Some(d) if gamma >= gr => {
                skipped.push(format!(
                    "below_critical_amplitude_d{}: gamma above the reference coupling",
                    d.min(5)
                ));
            }
            Some(3) => bounds.push(BoundReport::new(
                "below_critical_amplitude_d3",
                max_amp,
                2.0 * PI.powi(4) / (1024.0 * gamma * (gr - gamma).powi(2) * sqrt_n),
                SMALL_TERMS_SLACK,
            )),
            Some(4) => bounds.push(BoundReport::new(
                "below_critical_amplitude_d4",
                max_amp,
                2.0 / (sqrt_n * four_dim_energy_floor(gr, gamma)),
                SMALL_TERMS_SLACK,
            )),
            Some(d) if d > 4 => {
                let i2 = integral_i(2, d)?.value;
                bounds.push(BoundReport::new(
                    "below_critical_amplitude_d5plus",
                    max_amp,
                    2.0 * i2 / (sqrt_n * gamma * (gr - gamma)),
                    SMALL_TERMS_SLACK,
                ));
            }
            _ => skipped.push("below_critical_amplitude: no closed form for this family".into()),
        },
    }
    Ok(BoundSuite {
        family: g.label(),
        gamma,
        gamma_c: ctx.gamma_c,
        gamma_ref: gr,
        regime: ctx.regime,
        bounds,
        skipped,
    })
}
