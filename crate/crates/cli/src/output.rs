use crate::error::CliError;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const TOOL: &str = "cone-ends";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Serialize)]
pub struct Header {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    header: &'a Header,
    report: &'a T,
}

/// Writes artifacts into one directory, each stamped with the run header.
pub struct ArtifactWriter {
    dir: PathBuf,
    header: Header,
    written: Vec<PathBuf>,
}

/// Fixed-width float formatting shared by every CSV cell.
pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

impl ArtifactWriter {
    pub fn new(dir: &Path, header: Header) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io("io/create-dir", format!("{}: {e}", dir.display())))?;
        Ok(ArtifactWriter { dir: dir.to_path_buf(), header, written: Vec::new() })
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn put(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, content).map_err(|e| CliError::io("io/write", format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    /// `{"header": …, "report": …}` with sorted keys.
    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<(), CliError> {
        let text = cone_ends::fields::io::to_json_string(&Document { header: &self.header, report })?;
        self.put(name, &text)
    }

    /// A `#`-prefixed header line, then the column row and the data rows.
    pub fn csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
        let h = &self.header;
        let mut text = format!(
            "# tool={} version={} command={} config_hash={} seed={}\n",
            h.tool, h.version, h.command, h.config_hash, h.seed
        );
        text.push_str(&columns.join(","));
        text.push('\n');
        for row in rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        self.put(name, &text)
    }

    /// Writes a field file whose header carries the run header.
    pub fn fields(&mut self, name: &str, mut file: cone_ends::fields::io::FieldFile) -> Result<(), CliError> {
        file.header = Some(serde_json::to_value(&self.header).map_err(|e| CliError::io("io/serialize", e))?);
        let text = file.to_json()?;
        self.put(name, &text)
    }

    pub fn text(&mut self, name: &str, content: &str) -> Result<(), CliError> {
        self.put(name, content)
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 60.0;

fn span(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Line plot of `points` with labelled axes; the header goes in a comment.
pub fn line_plot_svg(header: &Header, title: &str, x_label: &str, y_label: &str, points: &[(f64, f64)]) -> String {
    let (x0, x1) = span(points.iter().map(|p| p.0));
    let (y0, y1) = span(points.iter().map(|p| p.1));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        s,
        "<!-- tool={} version={} command={} config_hash={} seed={} -->",
        header.tool, header.version, header.command, header.config_hash, header.seed
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="24" font-family="sans-serif" font-size="16" text-anchor="middle">{title}</text>"#,
        WIDTH / 2.0
    );
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<path d="M{left:.1} {top:.1} L{left:.1} {bottom:.1} L{right:.1} {bottom:.1}" stroke="black" fill="none"/>"#
    );
    for k in 0..=4 {
        let t = k as f64 / 4.0;
        let (xv, yv) = (x0 + t * (x1 - x0), y0 + t * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<path d="M{px:.1} {bottom:.1} L{px:.1} {:.1}" stroke="black"/><text x="{px:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{xv:.3}</text>"#,
            bottom + 5.0,
            bottom + 18.0
        );
        let _ = writeln!(
            s,
            r#"<path d="M{:.1} {py:.1} L{left:.1} {py:.1}" stroke="black"/><text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="end">{yv:.3}</text>"#,
            left - 5.0,
            left - 8.0,
            py + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.1}" font-family="sans-serif" font-size="13" text-anchor="middle" transform="rotate(-90 16 {:.1})">{y_label}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    if !points.is_empty() {
        let path: Vec<String> = points
            .iter()
            .enumerate()
            .map(|(i, p)| format!("{}{:.2} {:.2}", if i == 0 { "M" } else { "L" }, sx(p.0), sy(p.1)))
            .collect();
        let _ = writeln!(s, r#"<path d="{}" stroke="steelblue" stroke-width="2" fill="none"/>"#, path.join(" "));
        for p in points {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="steelblue"/>"#, sx(p.0), sy(p.1));
        }
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header() -> Header {
        Header { tool: TOOL, version: VERSION, command: "foliate", config_hash: "ab".into(), seed: 1 }
    }

    #[test]
    fn svg_is_well_formed_and_stamped() {
        let svg = line_plot_svg(&header(), "t", "x", "y", &[(0.0, 1.0), (1.0, 2.0), (2.0, 2.5)]);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("config_hash=ab"));
        assert_eq!(svg.matches("<circle").count(), 3);
        // a flat series still gets a non-degenerate axis
        let flat = line_plot_svg(&header(), "t", "x", "y", &[(0.0, 1.0), (1.0, 1.0)]);
        assert!(!flat.contains("NaN"));
    }

    #[test]
    fn numbers_have_fixed_format() {
        assert_eq!(num(1.0), "1.000000000000e0");
        assert_eq!(num(-0.125), "-1.250000000000e-1");
    }
}
