//! CSV and SVG emission for payoff clouds.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::arena::{ExperimentSpec, PayoffCloud};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "index,q1,q2,q3,q4,sx,sy,degenerate,method";

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// 17 significant digits, enough to recover every `f64` exactly.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn cloud_csv(cloud: &PayoffCloud) -> String {
    let mut out = String::with_capacity(cloud.points.len() * 160);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, p) in cloud.points.iter().enumerate() {
        let q = p.opponent.probs();
        let _ = writeln!(
            out,
            "{i},{},{},{},{},{},{},{},{}",
            num(q[0]),
            num(q[1]),
            num(q[2]),
            num(q[3]),
            num(p.sx),
            num(p.sy),
            p.degenerate,
            p.method.as_str()
        );
    }
    out
}

/// Reads the `(sx, sy)` columns back from [`cloud_csv`] output.
pub fn parse_csv_pairs(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        _ => return Err(Error::Config("missing or unexpected CSV header".into())),
    }
    lines
        .enumerate()
        .map(|(n, line)| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 9 {
                return Err(Error::Config(format!(
                    "CSV line {}: expected 9 columns",
                    n + 2
                )));
            }
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::Config(format!("CSV line {}: {e}", n + 2)))
            };
            Ok((parse(cols[5])?, parse(cols[6])?))
        })
        .collect()
}

pub fn write_cloud_csv(path: &Path, cloud: &PayoffCloud) -> Result<()> {
    fs::write(path, cloud_csv(cloud)).map_err(io_err(path))
}

const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn nice_ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = (hi - lo).max(1e-9);
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0]
        .iter()
        .map(|k| k * mag)
        .find(|s| span / s <= 6.0)
        .unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

/// Scatter plot with `s_X` on the horizontal and `s_Y` on the vertical axis.
pub fn scatter_svg(title: &str, series: &[(&str, &PayoffCloud)]) -> String {
    let (w, h) = (640.0, 520.0);
    let (left, right, top, bottom) = (70.0, 20.0, 40.0, 60.0);
    let pts = series.iter().flat_map(|(_, c)| c.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in pts {
        x0 = x0.min(p.sx);
        x1 = x1.max(p.sx);
        y0 = y0.min(p.sy);
        y1 = y1.max(p.sy);
    }
    if x0 > x1 {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    let pad = |a: f64, b: f64| {
        let d = ((b - a) * 0.05).max(0.05);
        (a - d, b + d)
    };
    let (x0, x1) = pad(x0, x1);
    let (y0, y1) = pad(y0, y1);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>"#,
        w / 2.0
    );
    let (ax, ay) = (px(x0), py(y0));
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{ax:.2}" y1="{ay:.2}" x2="{:.2}" y2="{ay:.2}"/><line x1="{ax:.2}" y1="{ay:.2}" x2="{ax:.2}" y2="{:.2}"/></g>"#,
        px(x1),
        py(y1)
    );
    let _ = writeln!(s, r#"<g font-family="sans-serif" font-size="11">"#);
    for t in nice_ticks(x0, x1) {
        let x = px(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{ay:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{t}</text>"#,
            ay + 5.0,
            ay + 18.0
        );
    }
    for t in nice_ticks(y0, y1) {
        let y = py(t);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{ax:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{t}</text>"#,
            ax - 5.0,
            ax - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13">s_X</text>"#,
        (left + w - right) / 2.0,
        h - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 18 {:.2})">s_Y</text>"#,
        (top + h - bottom) / 2.0,
        (top + h - bottom) / 2.0
    );
    for (k, (label, cloud)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let _ = writeln!(s, r#"<g fill="{color}" fill-opacity="0.35">"#);
        for p in &cloud.points {
            let _ = writeln!(
                s,
                r#"<circle cx="{:.2}" cy="{:.2}" r="1.2"/>"#,
                px(p.sx),
                py(p.sy)
            );
        }
        let _ = writeln!(s, "</g>");
        let ly = top + 16.0 * k as f64 + 8.0;
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{ly:.2}" r="4" fill="{color}"/><text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12">{label}</text>"#,
            w - right - 90.0,
            w - right - 80.0,
            ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

pub fn write_figure(
    out_dir: &Path,
    id: u8,
    clouds: &[(String, ExperimentSpec, PayoffCloud)],
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();
    for (label, _, cloud) in clouds {
        let name = if clouds.len() == 1 {
            "cloud.csv".to_string()
        } else {
            format!("cloud_{label}.csv")
        };
        let path = out_dir.join(name);
        write_cloud_csv(&path, cloud)?;
        written.push(path);
    }
    let labels: Vec<String> = clouds.iter().map(|(l, _, _)| l.to_uppercase()).collect();
    let series: Vec<(&str, &PayoffCloud)> = clouds
        .iter()
        .zip(labels.iter())
        .map(|((_, _, c), l)| (l.as_str(), c))
        .collect();
    let title = format!("Figure {id}: {} vs random opponents", labels.join(", "));
    let path = out_dir.join("cloud.svg");
    fs::write(&path, scatter_svg(&title, &series)).map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}
