//! CSV tables, the JSON run manifest and SVG line plots.
//!
//! Numbers are written in shortest round-trip scientific notation, so a CSV
//! value parses back to the exact `f64` that produced it.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::scan::{DensityResult, ScanResult};
use crate::solve::{reconstruct_xi, ConvergenceReport, Spectrum};

/// Bumped whenever a CSV column layout changes.
pub const CSV_SCHEMA_VERSION: u32 = 1;

pub const SPECTRUM_HEADER: &str = "n_r,lambda,energy";
pub const SCAN_HEADER: &str = "axis_value,m,n_r,lambda,energy,converged";
pub const DENSITY_HEADER: &str = "r,rho,n_r,omega";
pub const CONVERGENCE_HEADER: &str =
    "m,n_r,lambda,refined_grid,enlarged_domain,reduced_cutoff,estimated_order,converged";
pub const FUNCTIONS_HEADER: &str = "r,n_r,f,xi";

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

fn flag(c: Option<bool>) -> &'static str {
    match c {
        Some(true) => "true",
        Some(false) => "false",
        None => "",
    }
}

pub fn spectrum_csv(s: &Spectrum) -> String {
    let mut out = format!("{SPECTRUM_HEADER}\n");
    for (n, (l, e)) in s.lambdas.iter().zip(&s.energies).enumerate() {
        let _ = writeln!(out, "{n},{},{}", num(*l), num(*e));
    }
    out
}

/// `f_n` and `ξ_n = f_n/√r` on every node, one block per level.
pub fn functions_csv(s: &Spectrum) -> String {
    let mut out = format!("{FUNCTIONS_HEADER}\n");
    let nodes = s.grid().nodes();
    for n in 0..s.lambdas.len() {
        let f = s.full_function(n);
        let xi = reconstruct_xi(&f, s.grid()).expect("full-node samples match the grid");
        for ((r, f), xi) in nodes.iter().zip(&f).zip(&xi) {
            let _ = writeln!(out, "{},{n},{},{}", num(*r), num(*f), num(*xi));
        }
    }
    out
}

pub fn scan_csv(res: &ScanResult) -> String {
    let mut out = format!("{SCAN_HEADER}\n");
    for r in &res.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            num(r.axis_value),
            r.m,
            r.n_r,
            num(r.lambda),
            num(r.energy),
            flag(r.converged)
        );
    }
    out
}

pub fn density_csv(res: &DensityResult) -> String {
    let mut out = format!("{DENSITY_HEADER}\n");
    for c in &res.curves {
        let omega = num(c.omega);
        for (r, rho) in c.r.iter().zip(&c.rho) {
            let _ = writeln!(out, "{},{},{},{omega}", num(*r), num(*rho), c.n_r);
        }
    }
    out
}

pub fn convergence_csv(reports: &[ConvergenceReport]) -> String {
    let mut out = format!("{CONVERGENCE_HEADER}\n");
    for rep in reports {
        let m = rep.baseline.spec.m;
        for n in 0..rep.converged.len() {
            let _ = writeln!(
                out,
                "{m},{n},{},{},{},{},{},{}",
                num(rep.baseline.lambdas[n]),
                num(rep.refined_grid[n]),
                num(rep.enlarged_domain[n]),
                num(rep.reduced_cutoff[n]),
                num(rep.estimated_order[n]),
                rep.converged[n]
            );
        }
    }
    out
}

/// Run manifest: the effective config plus everything needed to reproduce
/// the numbers.
pub struct Manifest<'a> {
    pub subcommand: &'a str,
    pub config: &'a RunConfig,
    pub workers: usize,
    pub created_unix: f64,
    pub convergence: Value,
    pub failures: Value,
    pub outputs: Vec<String>,
    pub extra: Value,
}

impl Manifest<'_> {
    pub fn to_json(&self) -> Value {
        let g = &self.config.grid;
        json!({
            "tool": "helix-sturm",
            "version": env!("CARGO_PKG_VERSION"),
            "csv_schema_version": CSV_SCHEMA_VERSION,
            "subcommand": self.subcommand,
            "created_unix": self.created_unix,
            "grid": {
                "r_min": g.r_min,
                "r_max": g.r_max,
                "n_intervals": g.n_intervals,
                "dr": (g.r_max - g.r_min) / g.n_intervals as f64,
            },
            "tolerances": self.config.solver,
            "workers": self.workers,
            "convergence": self.convergence,
            "failures": self.failures,
            "outputs": self.outputs,
            "details": self.extra,
            "config": self.config,
        })
    }
}

/// Writes `contents` to `dir/name` and returns the path.
pub fn write_file(dir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#000000", "#9467bd", "#ff7f0e", "#17becf", "#8c564b",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Minimal SVG line plot with a framed axis box and a legend.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let (w, h) = (720.0, 480.0);
    let (left, right, top, bottom) = (80.0, 170.0, 40.0, 60.0);
    let finite = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let pw = w - left - right;
    let ph = h - top - bottom;
    let sx = |x: f64| left + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| top + (1.0 - (y - y0) / (y1 - y0)) * ph;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        left + pw / 2.0,
        escape(title)
    );
    for i in 0..=4 {
        let t = f64::from(i) / 4.0;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.3}</text>"#,
            sx(xv),
            top + ph + 18.0,
            xv
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{:.4}</text>"#,
            left - 6.0,
            sy(yv) + 4.0,
            yv
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        left + pw / 2.0,
        h - 16.0,
        escape(x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        top + ph / 2.0,
        escape(y_label)
    );
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = top + 14.0 + 16.0 * i as f64;
        let lx = left + pw + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn scan_plot(res: &ScanResult) -> String {
    let mut series = Vec::new();
    for m in res.m_values() {
        for n in 0..res.levels {
            let pts = res.branch(m, n);
            if !pts.is_empty() {
                series.push(Series {
                    label: format!("m={m}, n_r={n}"),
                    points: pts,
                });
            }
        }
    }
    if res.axis.parameter == crate::model::Parameter::M {
        // One marker line per level across m.
        series = (0..res.levels)
            .map(|n| Series {
                label: format!("n_r={n}"),
                points: res
                    .rows
                    .iter()
                    .filter(|r| r.n_r == n)
                    .map(|r| (r.axis_value, r.energy))
                    .collect(),
            })
            .collect();
    }
    line_plot(
        &format!("E vs {}", res.axis.parameter),
        res.axis.parameter.name(),
        "E",
        &series,
    )
}

pub fn density_plot(res: &DensityResult) -> String {
    let series: Vec<Series> = res
        .curves
        .iter()
        .map(|c| Series {
            label: format!("ω={}, n_r={}", c.omega, c.n_r),
            points: c.r.iter().copied().zip(c.rho.iter().copied()).collect(),
        })
        .collect();
    line_plot(&format!("ρ(r), m={}", res.m), "r", "ρ", &series)
}

pub fn spectrum_plot(s: &Spectrum) -> String {
    let nodes = s.grid().nodes();
    let series: Vec<Series> = (0..s.lambdas.len())
        .map(|n| Series {
            label: format!("n_r={n}"),
            points: nodes.iter().copied().zip(s.density(n)).collect(),
        })
        .collect();
    line_plot(&format!("ρ(r), m={}", s.spec.m), "r", "ρ", &series)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.338107410459767, 1e-300, 3.0, f64::MAX] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::NAN), "NaN");
    }

    #[test]
    fn plot_is_well_formed() {
        let svg = line_plot(
            "t<1>",
            "x",
            "y",
            &[Series {
                label: "a&b".into(),
                points: vec![(0.0, 1.0), (1.0, f64::NAN), (2.0, 3.0)],
            }],
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("t&lt;1&gt;") && svg.contains("a&amp;b"));
        assert!(!svg.contains("NaN"));
        let empty = line_plot("e", "x", "y", &[]);
        assert!(empty.contains("</svg>"));
    }
}
