use anyhow::{Context, Result};
use regsemi::verify::Tolerances;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// A CSV cell; numbers are written in round-trip exponent form.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// Output directory plus the provenance stamped on every file.
pub struct Sink {
    dir: PathBuf,
    pub digest: String,
    pub tolerances: Tolerances,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, digest: String, tolerances: Tolerances) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), digest, tolerances, written: Vec::new() })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn header(&self) -> String {
        format!("# config_digest={} tolerances={}", self.digest, serde_json::to_string(&self.tolerances).unwrap_or_default())
    }

    pub fn csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
        let path = self.dir.join(name);
        let mut buf = Vec::new();
        buf.extend_from_slice(self.header().as_bytes());
        buf.push(b'\n');
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(columns)?;
            for r in rows {
                w.write_record(r.iter().map(Cell::render))?;
            }
            w.flush()?;
        }
        std::fs::write(&path, buf).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    /// Writes `{"config_digest", "tolerances", ...value}`.
    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.dir.join(name);
        let mut obj = serde_json::Map::new();
        obj.insert("config_digest".into(), self.digest.clone().into());
        obj.insert("tolerances".into(), serde_json::to_value(self.tolerances)?);
        match serde_json::to_value(value)? {
            serde_json::Value::Object(m) => obj.extend(m),
            other => {
                obj.insert("data".into(), other);
            }
        }
        let text = serde_json::to_string_pretty(&serde_json::Value::Object(obj))?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        self.written.push(path);
        Ok(())
    }

    /// Plots never affect the exit code; failures are reported on stderr.
    pub fn svg(&mut self, name: &str, plot: &Plot) {
        let path = self.dir.join(name);
        match std::fs::write(&path, plot.render()) {
            Ok(()) => self.written.push(path),
            Err(e) => eprintln!("warning: could not write {}: {e}", path.display()),
        }
    }
}

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Draw markers instead of lines.
    pub scatter: bool,
}

const W: f64 = 640.0;
const H: f64 = 420.0;
const PAD: f64 = 56.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"];

impl Plot {
    pub fn lines(title: &str, x_label: &str, y_label: &str) -> Self {
        Self { title: title.into(), x_label: x_label.into(), y_label: y_label.into(), series: Vec::new(), scatter: false }
    }

    pub fn with(mut self, label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        self.series.push(Series { label: label.into(), points });
        self
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        let pts = self.series.iter().flat_map(|s| s.points.iter()).filter(|(x, y)| x.is_finite() && y.is_finite());
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        if !x0.is_finite() {
            return (0.0, 1.0, 0.0, 1.0);
        }
        let widen = |a: f64, b: f64| if b > a { (a, b) } else { (a - 0.5, b + 0.5) };
        let (x0, x1) = widen(x0, x1);
        let (y0, y1) = widen(y0, y1);
        (x0, x1, y0, y1)
    }

    pub fn render(&self) -> String {
        let (x0, x1, y0, y1) = self.bounds();
        let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
        let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
        let mut s = String::new();
        let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">"#);
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        let _ = writeln!(s, r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#, W - 2.0 * PAD, H - 2.0 * PAD);
        let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="13">{}</text>"#, W / 2.0, escape(&self.title));
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, H - 12.0, escape(&self.x_label));
        let _ = writeln!(s, r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}</text>"#, H / 2.0, H / 2.0, escape(&self.y_label));
        for (v, anchor, x, y) in [
            (x0, "start", PAD, H - PAD + 14.0),
            (x1, "end", W - PAD, H - PAD + 14.0),
        ] {
            let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}">{}</text>"#, tick(v));
        }
        for (v, y) in [(y0, H - PAD), (y1, PAD + 4.0)] {
            let _ = writeln!(s, r#"<text x="{}" y="{y}" text-anchor="end">{}</text>"#, PAD - 4.0, tick(v));
        }
        for (k, ser) in self.series.iter().enumerate() {
            let color = COLORS[k % COLORS.len()];
            let pts: Vec<(f64, f64)> = ser.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()).map(|&(x, y)| (sx(x), sy(y))).collect();
            if self.scatter {
                for (x, y) in &pts {
                    let _ = writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.2" fill="{color}"/>"#);
                }
            } else if !pts.is_empty() {
                let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{}"/>"#, path.join(" "));
            }
            let ly = PAD + 14.0 + 14.0 * k as f64;
            let _ = writeln!(s, r#"<text x="{}" y="{ly}" fill="{color}" text-anchor="end">{}</text>"#, W - PAD - 6.0, escape(&ser.label));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() < 1e-2 || v.abs() >= 1e4) { format!("{v:.2e}") } else { format!("{v:.3}") }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
