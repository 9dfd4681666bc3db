//! CSV tables at twelve significant digits and minimal SVG line plots.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Column-oriented table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Self { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.headers.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

/// Twelve significant digits.
pub fn format_value(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn write_csv<W: Write>(table: &Table, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(&table.headers).map_err(csv_error)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|x| format_value(*x))).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: std::io::Read>(source: R) -> Result<Table> {
    let mut r = csv::Reader::from_reader(source);
    let headers = r.headers().map_err(csv_error)?.iter().map(str::to_string).collect();
    let mut table = Table { headers, rows: Vec::new() };
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_error)?;
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| Error::Parse { line: i + 2, msg: format!("`{s}`: {e}") }))
            .collect::<Result<Vec<_>>>()?;
        table.rows.push(row);
    }
    Ok(table)
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

/// Writes to `path`, or to stdout when `None`.
pub fn emit_csv(table: &Table, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) => write_csv(table, std::fs::File::create(p)?),
        None => write_csv(table, std::io::stdout().lock()),
    }
}

const WIDTH: f64 = 600.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;

/// One 600x400 line plot of `y` against `x`.
pub fn line_plot_svg(x: &[f64], y: &[f64], x_label: &str, y_label: &str) -> String {
    let finite = |v: &[f64]| {
        v.iter().filter(|a| a.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)))
    };
    let (mut x0, mut x1) = finite(x);
    let (mut y0, mut y1) = finite(y);
    if x0 >= x1 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y0 >= y1 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let px = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 1.5 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 1.5 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="400" viewBox="0 0 600 400">"#);
    let _ = writeln!(s, r#"<rect width="600" height="400" fill="white"/>"#);
    let (ax, ay) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{ax} {top} L{ax} {ay} L{right} {ay}" stroke="black" fill="none"/>"#,
        top = 0.5 * MARGIN,
        right = WIDTH - 0.5 * MARGIN
    );
    for (v, anchor_x) in [(x0, px(x0)), (x1, px(x1))] {
        let _ = writeln!(s, r#"<text x="{anchor_x:.1}" y="{:.1}" font-size="11" text-anchor="middle">{v:.3}</text>"#, ay + 15.0);
    }
    for (v, anchor_y) in [(y0, py(y0)), (y1, py(y1))] {
        let _ = writeln!(s, r#"<text x="{:.1}" y="{anchor_y:.1}" font-size="11" text-anchor="end">{v:.3}</text>"#, ax - 5.0);
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="13" text-anchor="middle">{x_label}</text>"#,
        0.5 * (WIDTH + MARGIN),
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.1}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {:.1})">{y_label}</text>"#,
        0.5 * HEIGHT,
        0.5 * HEIGHT
    );
    let points: Vec<String> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| a.is_finite() && b.is_finite())
        .map(|(a, b)| format!("{:.2},{:.2}", px(*a), py(*b)))
        .collect();
    let _ = writeln!(s, r#"<polyline points="{}" stroke="steelblue" fill="none"/>"#, points.join(" "));
    s.push_str("</svg>\n");
    s
}

/// `plot.svg` with column `n` becomes `plot_n.svg`.
pub fn svg_path_for(base: &Path, column: &str) -> PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let name = format!("{stem}_{column}.svg");
    base.with_file_name(name)
}

/// One plot per non-leading column against the first.
pub fn emit_svgs(table: &Table, base: &Path) -> Result<Vec<PathBuf>> {
    let x: Vec<f64> = table.rows.iter().map(|r| r[0]).collect();
    let mut written = Vec::new();
    for (k, name) in table.headers.iter().enumerate().skip(1) {
        let y: Vec<f64> = table.rows.iter().map(|r| r[k]).collect();
        let path = svg_path_for(base, name);
        std::fs::write(&path, line_plot_svg(&x, &y, &table.headers[0], name))?;
        written.push(path);
    }
    Ok(written)
}
