//! Static SVG plots of error curves on a logarithmic axis.

use std::fmt::Write;

use crate::bench::experiment::ExperimentTable;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// One named curve; non-positive or non-finite values are left out.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub values: Vec<f64>,
}

/// Line chart with a linear x axis and a log₁₀ y axis.
pub fn log_plot_svg(title: &str, x_label: &str, xs: &[f64], series: &[Series]) -> String {
    let positive = series
        .iter()
        .flat_map(|s| s.values.iter())
        .copied()
        .filter(|v| v.is_finite() && *v > 0.0);
    let (lo, hi) = positive.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (ylo, yhi) = if lo.is_finite() {
        let (a, b) = (lo.log10().floor(), hi.log10().ceil());
        if a == b { (a - 1.0, b + 1.0) } else { (a, b) }
    } else {
        (-1.0, 1.0)
    };
    let (xlo, xhi) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let (xlo, xhi) = if xlo.is_finite() && xhi > xlo { (xlo, xhi) } else { (xlo.min(0.0), xlo.max(0.0) + 1.0) };

    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - xlo) / (xhi - xlo) * pw;
    let py = |v: f64| TOP + (yhi - v.log10()) / (yhi - ylo) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);

    let mut decade = ylo;
    while decade <= yhi {
        let y = py(10f64.powf(decade));
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{y:.2}" x2="{}" y2="{y:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">1e{}</text>"#, LEFT - 6.0, y + 4.0, decade as i64);
        decade += 1.0;
    }
    for &x in xs {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{}</text>"#, px(x), TOP + ph + 18.0, x);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 10.0, escape(x_label));

    for (k, ser) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = xs
            .iter()
            .zip(&ser.values)
            .filter(|(_, v)| v.is_finite() && **v > 0.0)
            .map(|(&x, &v)| format!("{:.2},{:.2}", px(x), py(v)))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#, pts.join(" "));
            for p in &pts {
                let (x, y) = p.split_once(',').expect("formatted pair");
                let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>"#);
            }
        }
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 24.0);
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(&ser.label));
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The four error curves of a sweep against `m` (degree sweep) or `r̃`.
pub fn experiment_svg(table: &ExperimentTable) -> String {
    let degree = table.config.sweep.is_degree();
    let xs: Vec<f64> = table
        .rows
        .iter()
        .map(|r| if degree { r.m as f64 } else { r.r_tilde as f64 })
        .collect();
    let pick = |f: fn(&crate::bench::metrics::ErrorReport) -> f64| -> Vec<f64> {
        table
            .rows
            .iter()
            .map(|r| r.report.as_ref().map_or(f64::NAN, f))
            .collect()
    };
    let series = [
        Series { label: "MSE".into(), values: pick(|r| r.mse) },
        Series { label: "MaxAE".into(), values: pick(|r| r.max_ae) },
        Series { label: "MRE".into(), values: pick(|r| r.mre) },
        Series { label: "MaxRE".into(), values: pick(|r| r.max_re) },
    ];
    let title = format!("{} on the {}", table.config.function, table.config.domain.name());
    log_plot_svg(&title, if degree { "m" } else { "r~" }, &xs, &series)
}
