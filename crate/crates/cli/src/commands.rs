//! One function per subcommand. Each builds its tables, writes them through
//! [`Artifacts`] and returns the resolved config for the manifest.

use serde::Serialize;
use walksearch::analysis::{
    critical_margin, critical_predictions, critical_scan_center, default_failure_grid,
    find_critical_gamma, measure_at, scan_gamma, subcritical_scaling, verify_failure_bounds,
    verify_transition_bounds, BoundSuite, ScanRecord,
};
use walksearch::constants::ConstantTable;
use walksearch::evolution::{default_t_max, find_optimal_time, AmplitudeSeries};
use walksearch::graph::level_spectrum;
use walksearch::numeric::linear_fit;
use walksearch::secular::{secular_value, solve_spectrum};
use walksearch::validation::{default_validation_families, validate};
use walksearch::GraphFamily;

use crate::config::{Command, RunConfig};
use crate::error::CliError;
use crate::graph_spec::parse_graph_spec;
use crate::output::Artifacts;
use crate::plot::{emit, Panel, PlotSpec};
use crate::table::{Cell, Table};

pub const CONSTANTS_COLUMNS: &[&str] = &[
    "kind",
    "j",
    "d",
    "n",
    "a",
    "value",
    "error_estimate",
    "method",
    "truncation",
];
pub const ROOTS_COLUMNS: &[&str] = &[
    "index",
    "energy",
    "secular_derivative",
    "w_overlap_sq",
    "s_overlap_sq",
    "residual",
];
pub const LEVELS_COLUMNS: &[&str] = &["index", "level", "multiplicity", "pole", "irrelevant"];
pub const SCAN_COLUMNS: &[&str] = &[
    "gamma",
    "e0",
    "e1",
    "gap",
    "overlap_s_psi0",
    "overlap_s_psi1",
    "overlap_w_psi0",
    "overlap_w_psi1",
];
pub const EVOLVE_COLUMNS: &[&str] = &["t", "amplitude_re", "amplitude_im", "probability"];
pub const OPTIMAL_COLUMNS: &[&str] = &["gamma", "t_max", "t_star", "p_star"];
pub const CRITICAL_COLUMNS: &[&str] = &[
    "family",
    "n",
    "gamma_c",
    "scan_center",
    "margin",
    "e0",
    "e1",
    "gap",
    "overlap_s_psi0",
    "overlap_s_psi1",
    "overlap_w_psi0",
    "overlap_w_psi1",
];
pub const SCALING_COLUMNS: &[&str] = &[
    "n",
    "gamma_used",
    "gap",
    "t_star",
    "p_star",
    "runtime_metric",
];
pub const PREDICTION_COLUMNS: &[&str] = &[
    "side",
    "n",
    "gamma_c",
    "e0",
    "e0_predicted",
    "e1",
    "e1_predicted",
    "gap",
    "gap_predicted",
    "fprime0",
    "fprime_predicted",
    "p_star",
    "p_predicted",
    "t_star",
    "t_predicted",
];
pub const CEILING_COLUMNS: &[&str] = &[
    "side",
    "n",
    "gamma_c",
    "max_amp",
    "ceiling_a0",
    "ceiling_a0_pass",
    "a_measured",
    "x0_measured",
    "ceiling_measured",
    "ceiling_measured_pass",
    "runtime_metric",
    "runtime_floor",
    "runtime_floor_pass",
    "runtime_asymptotic_floor",
    "runtime_asymptotic_slack",
    "runtime_asymptotic_pass",
];
pub const VALIDATE_COLUMNS: &[&str] = &[
    "family",
    "gamma",
    "t",
    "amplitude_delta",
    "eigenvalue_delta",
    "w_weight_delta",
    "s_weight_delta",
    "unmatched",
];
pub const SECULAR_COLUMNS: &[&str] = &["segment", "energy", "secular_value"];
pub const POLES_COLUMNS: &[&str] = &["energy", "multiplicity", "irrelevant"];

/// Families and file stems of the gap/overlap figures.
pub const FIGURE_SCANS: [(&str, &str); 6] = [
    ("complete:1024", "fig1_complete_1024"),
    ("hypercube:10", "fig2_hypercube_10"),
    ("lattice:5:4", "fig3_lattice_5_4"),
    ("lattice:4:6", "fig3_lattice_4_6"),
    ("lattice:3:10", "fig3_lattice_3_10"),
    ("lattice:2:32", "fig3_lattice_2_32"),
];
pub const FIGURE_SCAN_POINTS: usize = 201;
/// Figure scans cover `[0.5, 1.5] gamma_c`.
pub const FIGURE_SCAN_SPAN: (f64, f64) = (0.5, 1.5);
/// `F(E)` samples per pole-free interval in the secular figure.
pub const SECULAR_SAMPLES: usize = 400;

fn graph(cfg: &RunConfig) -> Result<GraphFamily, CliError> {
    let text = cfg
        .graph
        .first()
        .ok_or_else(|| CliError::Config("--graph is required".into()))?;
    Ok(parse_graph_spec(text)?)
}

fn scan_row(r: &ScanRecord) -> Vec<Cell> {
    vec![
        r.gamma.into(),
        r.e0.into(),
        r.e1.into(),
        r.gap.into(),
        r.overlap_s_psi0.into(),
        r.overlap_s_psi1.into(),
        r.overlap_w_psi0.into(),
        r.overlap_w_psi1.into(),
    ]
}

fn scan_plot(title: String) -> PlotSpec {
    PlotSpec {
        title,
        x: "gamma",
        panels: vec![
            Panel {
                ylabel: "gap",
                series: vec!["gap"],
                yrange: None,
            },
            Panel {
                ylabel: "squared overlap",
                series: vec![
                    "overlap_s_psi0",
                    "overlap_s_psi1",
                    "overlap_w_psi0",
                    "overlap_w_psi1",
                ],
                yrange: Some((0.0, 1.0)),
            },
        ],
        segment_by: None,
    }
}

pub fn constants(cfg: &mut RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let table = ConstantTable::standard()?;
    let mut t = Table::new(CONSTANTS_COLUMNS);
    for e in &table.entries {
        t.push(vec![
            e.kind.label().into(),
            e.j.into(),
            e.d.into(),
            e.n.into(),
            e.a.into(),
            e.value.into(),
            e.error_estimate.into(),
            e.method.as_str().into(),
            e.truncation.as_str().into(),
        ]);
    }
    out.table(cfg.command.name(), &t)?;
    Ok(())
}

pub fn spectrum(cfg: &mut RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let g = graph(cfg)?;
    let gamma = cfg.gamma.expect("checked");
    let ls = level_spectrum(&g)?;
    let spec = solve_spectrum(&ls, gamma)?;
    let mut roots = Table::new(ROOTS_COLUMNS);
    for (i, r) in spec.roots.iter().enumerate() {
        roots.push(vec![
            i.into(),
            r.energy.into(),
            r.secular_derivative.into(),
            r.w_overlap_sq.into(),
            r.s_overlap_sq.into(),
            r.residual.into(),
        ]);
    }
    let mut levels = Table::new(LEVELS_COLUMNS);
    for (i, l) in ls.levels().iter().enumerate() {
        levels.push(vec![
            i.into(),
            l.energy.into(),
            l.multiplicity.into(),
            (gamma * l.energy).into(),
            (l.multiplicity - 1).into(),
        ]);
    }
    out.table("spectrum", &roots)?;
    out.table("levels", &levels)?;
    Ok(())
}

pub fn scan(cfg: &mut RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let g = graph(cfg)?;
    let (lo, hi) = match cfg.gamma_range {
        Some(r) => r,
        None => {
            let gc = find_critical_gamma(&g)?;
            (FIGURE_SCAN_SPAN.0 * gc, FIGURE_SCAN_SPAN.1 * gc)
        }
    };
    cfg.gamma_range = Some((lo, hi));
    let points = cfg.points.expect("checked");
    let mut t = Table::new(SCAN_COLUMNS);
    for r in scan_gamma(&g, lo, hi, points)? {
        t.push(scan_row(&r));
    }
    let path = out.table("scan", &t)?;
    emit(cfg.plot, &scan_plot(g.label()), &path, "scan", out)
}

pub fn evolve(cfg: &mut RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let g = graph(cfg)?;
    let gamma = cfg.gamma.expect("checked");
    let n = g.num_vertices();
    let spec = solve_spectrum(&level_spectrum(&g)?, gamma)?;
    let series = AmplitudeSeries::new(&spec);
    let mut t = Table::new(EVOLVE_COLUMNS);
    let mut row = |time: f64| {
        let a = series.at(time);
        t.push(vec![
            time.into(),
            a.re.into(),
            a.im.into(),
            a.norm_sqr().into(),
        ]);
    };
    match cfg.time {
        Some(time) => row(time),
        None => {
            let (lo, hi) = cfg.time_range.unwrap_or((0.0, default_t_max(n)));
            cfg.time_range = Some((lo, hi));
            let points = cfg.points.expect("checked");
            let step = (hi - lo) / (points - 1) as f64;
            for i in 0..points {
                row(if i == points - 1 {
                    hi
                } else {
                    lo + i as f64 * step
                });
            }
        }
    }
    let t_max = default_t_max(n);
    let opt = find_optimal_time(&spec, t_max)?;
    let mut best = Table::new(OPTIMAL_COLUMNS);
    best.push(vec![
        gamma.into(),
        t_max.into(),
        opt.t_star.into(),
        opt.p_star.into(),
    ]);
    let path = out.table("evolve", &t)?;
    out.table("optimal", &best)?;
    if cfg.time.is_none() {
        let spec = PlotSpec {
            title: format!("{} at gamma = {gamma}", g.label()),
            x: "t",
            panels: vec![Panel {
                ylabel: "success probability",
                series: vec!["probability"],
                yrange: Some((0.0, 1.0)),
            }],
            segment_by: None,
        };
        emit(cfg.plot, &spec, &path, "evolve", out)?;
    }
    Ok(())
}

pub fn critical(cfg: &mut RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let g = graph(cfg)?;
    let n = g.num_vertices();
    let gc = find_critical_gamma(&g)?;
    let at = scan_gamma(&g, gc, gc * (1.0 + 1e-9), 2)?[0];
    let mut t = Table::new(CRITICAL_COLUMNS);
    let mut row = vec![
        g.label().into(),
        n.into(),
        gc.into(),
        critical_scan_center(&g)?.into(),
        critical_margin(gc, n).into(),
    ];
    row.extend(scan_row(&at).into_iter().skip(1));
    t.push(row);
    out.table("critical", &t)?;

    let gammas = match cfg.gamma {
        Some(x) => vec![x],
        None => vec![0.5 * gc, 2.0 * gc],
    };
    let grid = default_failure_grid(n);
    let mut suites: Vec<BoundSuite> = Vec::new();
    for gamma in gammas {
        suites.push(verify_transition_bounds(&g, gamma, Some(gc))?);
        suites.push(verify_failure_bounds(&g, gamma, Some(gc), &grid)?);
    }
    out.json("bounds.json", &suites)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ScalingSummary {
    dim: u32,
    sides: Vec<usize>,
    /// Least-squares slope of `ln t_star` against `ln N`.
    t_star_exponent: Option<f64>,
    x0_a0: Option<f64>,
}

pub fn scaling(cfg: &mut RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    let dim = cfg
        .dim
        .ok_or_else(|| CliError::Config("--dim is required".into()))?;
    let sides = cfg.sides.clone();
    let mut records = Table::new(SCALING_COLUMNS);
    let (mut ln_n, mut ln_t) = (Vec::new(), Vec::new());
    for &side in &sides {
        let g = GraphFamily::lattice(dim, side)?;
        let gc = find_critical_gamma(&g)?;
        let r = measure_at(&g, gc, default_t_max(g.num_vertices()))?;
        ln_n.push((r.n as f64).ln());
        ln_t.push(r.t_star.ln());
        records.push(vec![
            r.n.into(),
            r.gamma_used.into(),
            r.gap.into(),
            r.t_star.into(),
            r.p_star.into(),
            r.runtime_metric.into(),
        ]);
    }
    out.table("scaling", &records)?;
    let mut x0_a0 = None;
    if dim >= 4 {
        let mut t = Table::new(PREDICTION_COLUMNS);
        for p in critical_predictions(dim, &sides)? {
            t.push(vec![
                p.side.into(),
                p.n.into(),
                p.gamma_c.into(),
                p.e0.into(),
                p.e0_predicted.into(),
                p.e1.into(),
                p.e1_predicted.into(),
                p.gap.into(),
                p.gap_predicted.into(),
                p.fprime0.into(),
                p.fprime_predicted.into(),
                p.p_star.into(),
                p.p_predicted.into(),
                p.t_star.into(),
                p.t_predicted.into(),
            ]);
        }
        out.table("predictions", &t)?;
    } else if dim >= 2 {
        let report = subcritical_scaling(dim, &sides)?;
        x0_a0 = Some(report.x0_a0);
        let mut t = Table::new(CEILING_COLUMNS);
        for c in &report.checks {
            t.push(vec![
                c.side.into(),
                c.n.into(),
                c.gamma_c.into(),
                c.max_amp.into(),
                c.ceiling_a0.into(),
                c.ceiling_a0_pass.into(),
                c.a_measured.into(),
                c.x0_measured.into(),
                c.ceiling_measured.into(),
                c.ceiling_measured_pass.into(),
                c.runtime_metric.into(),
                c.runtime_floor.into(),
                c.runtime_floor_pass.into(),
                c.runtime_asymptotic_floor.into(),
                c.runtime_asymptotic_slack.into(),
                c.runtime_asymptotic_pass.into(),
            ]);
        }
        out.table("ceilings", &t)?;
    }
    let t_star_exponent = (sides.len() >= 2).then(|| linear_fit(&ln_n, &ln_t).1);
    out.json(
        "scaling.summary.json",
        &ScalingSummary {
            dim,
            sides,
            t_star_exponent,
            x0_a0,
        },
    )?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct ValidationSummary {
    seed: u64,
    oracle_cap: usize,
    draws: usize,
    tolerance: f64,
    comparisons: usize,
    max_delta: f64,
    pass: bool,
}

pub fn validate_cmd(
    cfg: &mut RunConfig,
    out: &mut Artifacts,
) -> Result<Option<CliError>, CliError> {
    let families = if cfg.graph.is_empty() {
        let fams = default_validation_families();
        cfg.graph = fams.iter().map(GraphFamily::label).collect();
        fams
    } else {
        cfg.graph
            .iter()
            .map(|s| parse_graph_spec(s))
            .collect::<Result<Vec<_>, _>>()?
    };
    let (seed, cap) = (cfg.seed.expect("set"), cfg.oracle_cap.expect("set"));
    let (draws, tolerance) = (cfg.draws.expect("set"), cfg.tolerance.expect("set"));
    let report = validate(&families, draws, seed, cap, tolerance)?;
    let mut t = Table::new(VALIDATE_COLUMNS);
    for c in &report.comparisons {
        t.push(vec![
            c.family.as_str().into(),
            c.gamma.into(),
            c.t.into(),
            c.amplitude_delta.into(),
            c.eigenvalue_delta.into(),
            c.w_weight_delta.into(),
            c.s_weight_delta.into(),
            c.unmatched.into(),
        ]);
    }
    out.table("validate", &t)?;
    out.json(
        "validate.summary.json",
        &ValidationSummary {
            seed,
            oracle_cap: cap,
            draws,
            tolerance,
            comparisons: report.comparisons.len(),
            max_delta: report.max_delta,
            pass: report.pass,
        },
    )?;
    let unmatched = report.comparisons.iter().map(|c| c.unmatched).sum();
    Ok((!report.pass).then_some(CliError::ValidationFailed {
        max_delta: report.max_delta,
        tolerance,
        unmatched,
    }))
}

/// Pole-free intervals of `F` for the secular figure: below the lowest pole,
/// between poles, and above the highest.
fn secular_segments(poles: &[f64]) -> Vec<(f64, f64)> {
    let mut v = vec![(poles[0] - 2.0, poles[0])];
    v.extend(poles.windows(2).map(|w| (w[0], w[1])));
    let last = poles[poles.len() - 1];
    v.push((last, last + 2.0));
    v
}

pub fn figures(cfg: &mut RunConfig, out: &mut Artifacts) -> Result<(), CliError> {
    for (spec, stem) in FIGURE_SCANS {
        let g = parse_graph_spec(spec)?;
        let gc = find_critical_gamma(&g)?;
        let mut t = Table::new(SCAN_COLUMNS);
        for r in scan_gamma(
            &g,
            FIGURE_SCAN_SPAN.0 * gc,
            FIGURE_SCAN_SPAN.1 * gc,
            FIGURE_SCAN_POINTS,
        )? {
            t.push(scan_row(&r));
        }
        let path = out.table(stem, &t)?;
        emit(
            cfg.plot,
            &scan_plot(format!("{spec}, gamma_c = {gc:.6}")),
            &path,
            stem,
            out,
        )?;
    }

    let g = parse_graph_spec("lattice:2:4")?;
    let gamma = 1.0;
    let ls = level_spectrum(&g)?;
    let poles: Vec<f64> = ls.levels().iter().map(|l| gamma * l.energy).collect();
    let mut samples = Table::new(SECULAR_COLUMNS);
    for (k, (a, b)) in secular_segments(&poles).into_iter().enumerate() {
        for i in 0..SECULAR_SAMPLES {
            // Midpoint rule keeps every sample off the poles.
            let e = a + (b - a) * (i as f64 + 0.5) / SECULAR_SAMPLES as f64;
            samples.push(vec![
                k.into(),
                e.into(),
                secular_value(&ls, gamma, e)?.into(),
            ]);
        }
    }
    let mut pole_table = Table::new(POLES_COLUMNS);
    for l in ls.levels() {
        pole_table.push(vec![
            (gamma * l.energy).into(),
            l.multiplicity.into(),
            (l.multiplicity - 1).into(),
        ]);
    }
    let stem = "fig4_lattice_2_4_secular";
    let path = out.table(stem, &samples)?;
    out.table("fig4_lattice_2_4_poles", &pole_table)?;
    let spec = PlotSpec {
        title: "F(E) for lattice:2:4 at gamma = 1; roots where F = 1".into(),
        x: "energy",
        panels: vec![Panel {
            ylabel: "F(E)",
            series: vec!["secular_value"],
            yrange: Some((-3.0, 4.0)),
        }],
        segment_by: Some("segment"),
    };
    emit(cfg.plot, &spec, &path, stem, out)
}

/// Dispatches `cfg` and writes the manifest; returns the artifact names.
/// A failed oracle comparison still writes its report before the error.
pub fn run(mut cfg: RunConfig) -> Result<Vec<String>, CliError> {
    let mut out = Artifacts::new(cfg.output.clone(), cfg.format);
    let mut deferred = None;
    match cfg.command {
        Command::Constants => constants(&mut cfg, &mut out)?,
        Command::Spectrum => spectrum(&mut cfg, &mut out)?,
        Command::Scan => scan(&mut cfg, &mut out)?,
        Command::Evolve => evolve(&mut cfg, &mut out)?,
        Command::Critical => critical(&mut cfg, &mut out)?,
        Command::Scaling => scaling(&mut cfg, &mut out)?,
        Command::Validate => deferred = validate_cmd(&mut cfg, &mut out)?,
        Command::Figures => figures(&mut cfg, &mut out)?,
    }
    let written = out.finish(&cfg)?;
    match deferred {
        Some(e) => Err(e),
        None => Ok(written),
    }
}
