//! Report emission: JSON envelopes, CSV tables and SVG interval plots.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

/// One table cell.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::Real(x) => fmt_real(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::Int(n)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Text(b.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Real)
    }
}

/// 17 significant digits, `.` as the decimal mark.
pub fn fmt_real(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: impl Write) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Intervals drawn as rectangles: `(y, lo, hi)` with `y` in data units.
#[derive(Clone, Debug, Default)]
pub struct Plot {
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub rows: Vec<(f64, f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

impl Plot {
    pub fn to_svg(&self, width: u32, height: u32) -> String {
        let (w, h) = (width as f64, height as f64);
        let pad = 40.0;
        let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&(f64, f64, f64)) -> f64| {
            self.rows.iter().map(pick).fold(init, f)
        };
        let (x0, x1) = (fold(f64::min, f64::INFINITY, |r| r.1), fold(f64::max, f64::NEG_INFINITY, |r| r.2));
        let (y0, y1) = (fold(f64::min, f64::INFINITY, |r| r.0), fold(f64::max, f64::NEG_INFINITY, |r| r.0));
        let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
        let (sx, sy) = (span(x0, x1), span(y0, y1));
        let mut levels: Vec<f64> = self.rows.iter().map(|r| r.0).collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        let bar = ((h - 2.0 * pad) / (levels.len() as f64 + 1.0)).clamp(0.5, 20.0);

        let mut s = String::new();
        s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
        ));
        s.push_str(&format!("<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"));
        s.push_str("<g fill=\"black\">\n");
        for &(y, lo, hi) in &self.rows {
            let px = pad + (lo - x0.min(lo)) / sx * (w - 2.0 * pad);
            let pw = ((hi - lo) / sx * (w - 2.0 * pad)).max(0.25);
            let py = h - pad - if levels.len() > 1 { (y - y0) / sy * (h - 2.0 * pad) } else { (h - 2.0 * pad) / 2.0 };
            s.push_str(&format!(
                "<rect x=\"{px:.3}\" y=\"{:.3}\" width=\"{pw:.3}\" height=\"{bar:.3}\"/>\n",
                py - bar / 2.0
            ));
        }
        s.push_str("</g>\n");
        s.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            w / 2.0,
            h - 8.0,
            escape(self.x_label)
        ));
        s.push_str(&format!(
            "<text x=\"12\" y=\"{:.1}\" font-size=\"12\" transform=\"rotate(-90 12 {:.1})\" text-anchor=\"middle\">{}</text>\n",
            h / 2.0,
            h / 2.0,
            escape(self.y_label)
        ));
        s.push_str("</svg>\n");
        s
    }
}

/// The JSON envelope every command emits.
#[derive(Serialize)]
pub struct Report<'a> {
    pub command: &'a str,
    pub config: Value,
    pub results: Value,
    pub failures: Vec<String>,
    pub version: &'static str,
}

impl Report<'_> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable report");
        s.push('\n');
        s
    }
}
