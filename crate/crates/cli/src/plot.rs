//! Plot emission. Both backends read the CSV back from disk, so a figure can
//! be regenerated from the artifacts alone.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::CliError;
use crate::output::Artifacts;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PlotKind {
    None,
    Gnuplot,
    Svg,
}

#[derive(Debug, Clone)]
pub struct Panel {
    pub ylabel: &'static str,
    pub series: Vec<&'static str>,
    pub yrange: Option<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct PlotSpec {
    pub title: String,
    pub x: &'static str,
    pub panels: Vec<Panel>,
    /// Rows with different values in this column are not joined by lines.
    pub segment_by: Option<&'static str>,
}

struct Data {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Data {
    fn read(path: &Path) -> Result<Self, CliError> {
        let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
        let header = r
            .headers()
            .map_err(|e| csv_error(path, e))?
            .iter()
            .map(str::to_string)
            .collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| csv_error(path, e))?;
            rows.push(rec.iter().map(|f| f.parse().unwrap_or(f64::NAN)).collect());
        }
        Ok(Data { header, rows })
    }

    fn column(&self, name: &str) -> Result<usize, CliError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("plot column {name:?} not in CSV")))
    }
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::io(
        format!("reading {}", path.display()),
        std::io::Error::new(std::io::ErrorKind::InvalidData, e),
    )
}

/// Writes `<stem>.gp` or `<stem>.svg` next to `csv_path`.
pub fn emit(
    kind: PlotKind,
    spec: &PlotSpec,
    csv_path: &Path,
    stem: &str,
    out: &mut Artifacts,
) -> Result<(), CliError> {
    match kind {
        PlotKind::None => Ok(()),
        PlotKind::Gnuplot => {
            let script = gnuplot_script(spec, csv_path, stem)?;
            out.raw(&format!("{stem}.gp"), script.as_bytes())
                .map(|_| ())
        }
        PlotKind::Svg => {
            let svg = render_svg(spec, csv_path)?;
            out.raw(&format!("{stem}.svg"), svg.as_bytes()).map(|_| ())
        }
    }
}

fn gnuplot_script(spec: &PlotSpec, csv_path: &Path, stem: &str) -> Result<String, CliError> {
    let data = Data::read(csv_path)?;
    let file = csv_path
        .file_name()
        .and_then(|f| f.to_str())
        .unwrap_or_default();
    let x = data.column(spec.x)? + 1;
    let mut s = String::new();
    writeln!(s, "# Run `gnuplot {stem}.gp` in this directory.").ok();
    writeln!(s, "set datafile separator ','").ok();
    writeln!(
        s,
        "set terminal svg size 800,{} dynamic",
        320 * spec.panels.len()
    )
    .ok();
    writeln!(s, "set output '{stem}.gnuplot.svg'").ok();
    writeln!(
        s,
        "set multiplot layout {},1 title \"{}\"",
        spec.panels.len(),
        spec.title
    )
    .ok();
    writeln!(s, "set xlabel '{}'", spec.x).ok();
    let segments = match spec.segment_by {
        Some(col) => {
            let c = data.column(col)?;
            let mut seen: Vec<i64> = data.rows.iter().map(|r| r[c] as i64).collect();
            seen.sort_unstable();
            seen.dedup();
            Some((c + 1, seen))
        }
        None => None,
    };
    for panel in &spec.panels {
        writeln!(s, "set ylabel '{}'", panel.ylabel).ok();
        match panel.yrange {
            Some((lo, hi)) => writeln!(s, "set yrange [{lo}:{hi}]").ok(),
            None => writeln!(s, "set autoscale y").ok(),
        };
        let mut clauses = Vec::new();
        for name in &panel.series {
            let y = data.column(name)? + 1;
            match &segments {
                Some((c, ids)) => {
                    for (k, id) in ids.iter().enumerate() {
                        let title = if k == 0 {
                            format!("title '{name}'")
                        } else {
                            "notitle".into()
                        };
                        clauses.push(format!(
                            "'{file}' skip 1 using {x}:(${c}=={id} ? ${y} : NaN) with lines lc 1 {title}"
                        ));
                    }
                }
                None => clauses.push(format!(
                    "'{file}' skip 1 using {x}:{y} with lines title '{name}'"
                )),
            }
        }
        writeln!(s, "plot {}", clauses.join(", \\\n     ")).ok();
    }
    writeln!(s, "unset multiplot").ok();
    Ok(s)
}

const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];
const WIDTH: f64 = 800.0;
const PANEL_HEIGHT: f64 = 320.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn render_svg(spec: &PlotSpec, csv_path: &Path) -> Result<String, CliError> {
    let data = Data::read(csv_path)?;
    let xc = data.column(spec.x)?;
    let seg = spec.segment_by.map(|c| data.column(c)).transpose()?;
    let (x0, x1) = extent(data.rows.iter().map(|r| r[xc]));
    let height = PANEL_HEIGHT * spec.panels.len() as f64 + 30.0;
    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" font-family=\"sans-serif\" font-size=\"12\">"
    )
    .ok();
    writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").ok();
    writeln!(
        s,
        "<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>",
        WIDTH / 2.0,
        spec.title
    )
    .ok();
    for (p, panel) in spec.panels.iter().enumerate() {
        let top = 30.0 + p as f64 * PANEL_HEIGHT + MARGIN_TOP - 20.0;
        let bottom = 30.0 + (p + 1) as f64 * PANEL_HEIGHT - MARGIN_BOTTOM;
        let left = MARGIN_LEFT;
        let right = WIDTH - MARGIN_RIGHT;
        let cols = panel
            .series
            .iter()
            .map(|n| data.column(n))
            .collect::<Result<Vec<_>, _>>()?;
        let (y0, y1) = panel.yrange.unwrap_or_else(|| {
            extent(
                cols.iter()
                    .flat_map(|&c| data.rows.iter().map(move |r| r[c])),
            )
        });
        let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
        let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);
        writeln!(s, "<clipPath id=\"clip{p}\"><rect x=\"{left:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\"/></clipPath>", right - left, bottom - top).ok();
        writeln!(s, "<rect x=\"{left:.2}\" y=\"{top:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"black\"/>", right - left, bottom - top).ok();
        for k in 0..=4 {
            let fx = x0 + (x1 - x0) * k as f64 / 4.0;
            let fy = y0 + (y1 - y0) * k as f64 / 4.0;
            writeln!(
                s,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
                sx(fx),
                bottom + 16.0,
                tick(fx)
            )
            .ok();
            writeln!(
                s,
                "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
                left - 6.0,
                sy(fy) + 4.0,
                tick(fy)
            )
            .ok();
        }
        writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>",
            (left + right) / 2.0,
            bottom + 36.0,
            spec.x
        )
        .ok();
        writeln!(s, "<text transform=\"translate({:.2},{:.2}) rotate(-90)\" text-anchor=\"middle\">{}</text>", 18.0, (top + bottom) / 2.0, panel.ylabel).ok();
        for (i, (&c, name)) in cols.iter().zip(&panel.series).enumerate() {
            let color = COLORS[i % COLORS.len()];
            let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
            let mut last_seg = None;
            for r in &data.rows {
                let (x, y) = (r[xc], r[c]);
                let this_seg = seg.map(|sc| r[sc]);
                let broken = !(x.is_finite() && y.is_finite()) || this_seg != last_seg;
                if broken && !runs.last().is_none_or(Vec::is_empty) {
                    runs.push(Vec::new());
                }
                last_seg = this_seg;
                if x.is_finite() && y.is_finite() {
                    runs.last_mut().expect("non-empty").push((sx(x), sy(y)));
                }
            }
            for run in runs.iter().filter(|r| r.len() > 1) {
                let pts: Vec<String> = run.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
                writeln!(s, "<polyline clip-path=\"url(#clip{p})\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>", pts.join(" ")).ok();
            }
            let ly = top + 14.0 + 16.0 * i as f64;
            writeln!(s, "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{color}\" stroke-width=\"2\"/>", right + 10.0, right + 30.0).ok();
            writeln!(
                s,
                "<text x=\"{:.2}\" y=\"{:.2}\">{name}</text>",
                right + 34.0,
                ly + 4.0
            )
            .ok();
        }
    }
    writeln!(s, "</svg>").ok();
    Ok(s)
}

fn tick(v: f64) -> String {
    if v == 0.0 || (1e-3..1e4).contains(&v.abs()) {
        format!("{v:.4}")
            .trim_end_matches('0')
            .trim_end_matches('.')
            .to_string()
    } else {
        format!("{v:.2e}")
    }
}
