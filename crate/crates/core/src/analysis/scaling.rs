use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bounds::FINITE_N_SLACK;
use super::find_critical_gamma;
use crate::constants::{d2_intercept, integral_i, solve_x0};
use crate::error::{Error, Result};
use crate::evolution::{default_t_max, find_optimal_time};
use crate::graph::{level_spectrum, GraphFamily};
use crate::secular::solve_spectrum;

/// Search performance at one size and coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    pub n: usize,
    pub gamma_used: f64,
    pub gap: f64,
    pub t_star: f64,
    pub p_star: f64,
    /// `t_star / p_star`, the expected time with classical repetition.
    pub runtime_metric: f64,
}

/// Solves at `gamma` and measures the best success probability on `[0, t_max]`.
pub fn measure_at(g: &GraphFamily, gamma: f64, t_max: f64) -> Result<ScalingRecord> {
    let ls = level_spectrum(g)?;
    let spec = solve_spectrum(&ls, gamma)?;
    let opt = find_optimal_time(&spec, t_max)?;
    Ok(ScalingRecord {
        n: ls.num_vertices(),
        gamma_used: gamma,
        gap: spec.roots[1].energy - spec.roots[0].energy,
        t_star: opt.t_star,
        p_star: opt.p_star,
        runtime_metric: opt.t_star / opt.p_star,
    })
}

/// Asymptotic predictions at criticality next to the solver's values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalPrediction {
    pub side: usize,
    pub n: usize,
    pub gamma_c: f64,
    pub e0: f64,
    pub e0_predicted: f64,
    pub e1: f64,
    pub e1_predicted: f64,
    pub gap: f64,
    pub gap_predicted: f64,
    pub fprime0: f64,
    pub fprime_predicted: f64,
    pub p_star: f64,
    pub p_predicted: f64,
    pub t_star: f64,
    pub t_predicted: f64,
}

impl CriticalPrediction {
    pub fn gap_deviation(&self) -> f64 {
        (self.gap - self.gap_predicted).abs() / self.gap_predicted
    }

    pub fn p_deviation(&self) -> f64 {
        (self.p_star - self.p_predicted).abs() / self.p_predicted
    }
}

/// Measured critical energies, `F'`, peak probability and peak time on
/// `d`-dimensional lattices, against the two-level predictions. In four
/// dimensions `I_{2,4}` is replaced by `ln N / 32 pi^2`.
pub fn critical_predictions(dim: u32, sides: &[usize]) -> Result<Vec<CriticalPrediction>> {
    if dim < 4 {
        return Err(Error::NotApplicable(format!(
            "critical predictions need d >= 4, got {dim}"
        )));
    }
    let i1 = integral_i(1, dim)?.value;
    let i2 = if dim > 4 {
        Some(integral_i(2, dim)?.value)
    } else {
        None
    };
    sides
        .iter()
        .map(|&side| {
            let g = GraphFamily::lattice(dim, side)?;
            let ls = level_spectrum(&g)?;
            let n = ls.num_vertices();
            let nf = n as f64;
            let i2_eff = i2.unwrap_or_else(|| nf.ln() / (32.0 * PI * PI));
            let gamma_c = find_critical_gamma(&g)?;
            let spec = solve_spectrum(&ls, gamma_c)?;
            let opt = find_optimal_time(&spec, default_t_max(n))?;
            let e = i1 / (i2_eff * nf).sqrt();
            let (r0, r1) = (spec.roots[0], spec.roots[1]);
            Ok(CriticalPrediction {
                side,
                n,
                gamma_c,
                e0: r0.energy,
                e0_predicted: -e,
                e1: r1.energy,
                e1_predicted: e,
                gap: r1.energy - r0.energy,
                gap_predicted: 2.0 * e,
                fprime0: r0.secular_derivative,
                fprime_predicted: 2.0 * i2_eff / (i1 * i1),
                p_star: opt.p_star,
                p_predicted: i1 * i1 / i2_eff,
                t_star: opt.t_star,
                t_predicted: 0.5 * PI / e,
            })
        })
        .collect()
}

/// Ceiling and runtime checks at one size below four dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CeilingCheck {
    pub n: usize,
    pub side: usize,
    pub gamma_c: f64,
    /// `sup_t |<w|e^{-iHt}|s>|` over `[0, 16 sqrt N]`.
    pub max_amp: f64,
    /// Ceiling with `x_0` taken at `a = 0`.
    pub ceiling_a0: f64,
    pub ceiling_a0_pass: bool,
    /// Rescaled offset of the measured critical coupling.
    pub a_measured: f64,
    /// `None` where `G(x) = a_measured` has no negative root.
    pub x0_measured: Option<f64>,
    pub ceiling_measured: Option<f64>,
    pub ceiling_measured_pass: Option<bool>,
    pub runtime_metric: f64,
    /// `sqrt N / max_amp`.
    pub runtime_floor: f64,
    pub runtime_floor_pass: bool,
    /// Asymptotic runtime floor from the `a = 0` ceiling.
    pub runtime_asymptotic_floor: f64,
    pub runtime_asymptotic_slack: f64,
    pub runtime_asymptotic_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubcriticalReport {
    pub dim: u32,
    pub x0_a0: f64,
    pub records: Vec<ScalingRecord>,
    pub checks: Vec<CeilingCheck>,
}

/// Peak-amplitude window for the ceiling, in units of `sqrt N`.
const CEILING_SPAN: f64 = 16.0;

/// Success probability, runtime and amplitude ceilings at the measured
/// critical coupling for `d = 2, 3`.
pub fn subcritical_scaling(dim: u32, sides: &[usize]) -> Result<SubcriticalReport> {
    if dim != 2 && dim != 3 {
        return Err(Error::NotApplicable(format!(
            "subcritical scaling covers d = 2, 3, got {dim}"
        )));
    }
    let x0_a0 = solve_x0(0.0, dim)?;
    let i13 = if dim == 3 {
        integral_i(1, 3)?.value
    } else {
        0.0
    };
    let a_const = if dim == 2 { d2_intercept()?.value } else { 0.0 };
    let mut records = Vec::new();
    let mut checks = Vec::new();
    for &side in sides {
        let g = GraphFamily::lattice(dim, side)?;
        let ls = level_spectrum(&g)?;
        let n = ls.num_vertices();
        let nf = n as f64;
        let sqrt_n = nf.sqrt();
        let gamma_c = find_critical_gamma(&g)?;
        let spec = solve_spectrum(&ls, gamma_c)?;
        let opt = find_optimal_time(&spec, default_t_max(n))?;
        let record = ScalingRecord {
            n,
            gamma_used: gamma_c,
            gap: spec.roots[1].energy - spec.roots[0].energy,
            t_star: opt.t_star,
            p_star: opt.p_star,
            runtime_metric: opt.t_star / opt.p_star,
        };
        let max_amp = find_optimal_time(&spec, CEILING_SPAN * sqrt_n)?
            .p_star
            .max(opt.p_star)
            .sqrt();
        let ceiling = |x0: f64| match dim {
            3 => 8.0 * PI * PI * i13 * x0.abs() * nf.powf(-1.0 / 6.0),
            _ => 4.0 * PI * x0.abs() * nf.ln() / sqrt_n,
        };
        let a_measured = match dim {
            3 => (gamma_c - i13) * nf.cbrt(),
            _ => gamma_c - nf.ln() / (4.0 * PI) - a_const,
        };
        let x0_measured = solve_x0(a_measured, dim).ok();
        let ceiling_measured = x0_measured.map(ceiling);
        let ceiling_a0 = ceiling(x0_a0);
        let runtime_floor = sqrt_n / max_amp;
        let (runtime_asymptotic_floor, runtime_asymptotic_slack) = match dim {
            3 => (
                nf.powf(2.0 / 3.0) / (8.0 * PI * PI * i13 * x0_a0.abs()),
                1.0,
            ),
            _ => (
                nf / (4.0 * PI * x0_a0.abs() * nf.ln()),
                1.0 / FINITE_N_SLACK,
            ),
        };
        checks.push(CeilingCheck {
            n,
            side,
            gamma_c,
            max_amp,
            ceiling_a0,
            ceiling_a0_pass: max_amp <= ceiling_a0,
            a_measured,
            x0_measured,
            ceiling_measured,
            ceiling_measured_pass: ceiling_measured.map(|c| max_amp <= c),
            runtime_metric: record.runtime_metric,
            runtime_floor,
            runtime_floor_pass: record.runtime_metric >= runtime_floor,
            runtime_asymptotic_floor,
            runtime_asymptotic_slack,
            runtime_asymptotic_pass: record.runtime_metric
                >= runtime_asymptotic_slack * runtime_asymptotic_floor,
        });
        records.push(record);
    }
    Ok(SubcriticalReport {
        dim,
        x0_a0,
        records,
        checks,
    })
}

/// Couplings on either side of `gamma_c` where the peak success probability
/// falls to half its critical value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowWidth {
    pub gamma_c: f64,
    pub p_center: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    /// Half the distance between `lower` and `upper` when both exist.
    pub half_width: Option<f64>,
}

const WINDOW_BISECTIONS: usize = 40;

pub fn window_half_width(g: &GraphFamily, gamma_c: f64) -> Result<WindowWidth> {
    let ls = level_spectrum(g)?;
    let t_max = default_t_max(ls.num_vertices());
    let peak = |gamma: f64| -> Result<f64> {
        Ok(find_optimal_time(&solve_spectrum(&ls, gamma)?, t_max)?.p_star)
    };
    let p_center = peak(gamma_c)?;
    let half = 0.5 * p_center;
    let crossing = |far: f64| -> Result<Option<f64>> {
        if peak(far)? > half {
            return Ok(None);
        }
        let (mut inside, mut outside) = (gamma_c, far);
        for _ in 0..WINDOW_BISECTIONS {
            let mid = 0.5 * (inside + outside);
            if peak(mid)? > half {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        Ok(Some(0.5 * (inside + outside)))
    };
    let lower = crossing(0.25 * gamma_c)?;
    let upper = crossing(4.0 * gamma_c)?;
    let half_width = match (lower, upper) {
        (Some(l), Some(u)) => Some(0.5 * (u - l)),
        _ => None,
    };
    Ok(WindowWidth {
        gamma_c,
        p_center,
        lower,
        upper,
        half_width,
    })
}
