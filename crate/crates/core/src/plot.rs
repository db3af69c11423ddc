//! Static SVG charts rendered from the run CSVs: per-agent line plots and
//! the disposition-surface heatmap. Output is plain SVG text with fixed
//! numeric formatting, so the same CSV always renders the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::output::{write_file, AGENTS_CSV, GLOBAL_CSV, SURFACE_CSV};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 150.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 55.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// A parsed CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub path: PathBuf,
    pub headers: Vec<String>,
    /// Data rows with their 1-based line numbers.
    pub rows: Vec<(u64, Vec<String>)>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Table> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::parse(path, &bytes)
    }

    pub fn parse(path: &Path, bytes: &[u8]) -> Result<Table> {
        let data_err = |line: u64, message: String| Error::Data {
            path: path.to_path_buf(),
            line,
            message,
        };
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(bytes);
        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| data_err(1, e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        if headers.is_empty() || headers.iter().all(String::is_empty) {
            return Err(data_err(1, "missing header".into()));
        }
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                data_err(line, e.to_string())
            })?;
            let line = record.position().map_or(0, |p| p.line());
            rows.push((line, record.iter().map(str::to_string).collect()));
        }
        if rows.is_empty() {
            return Err(data_err(2, "no data rows".into()));
        }
        Ok(Table {
            path: path.to_path_buf(),
            headers,
            rows,
        })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Data {
                path: self.path.clone(),
                line: 1,
                message: format!("missing column `{name}`"),
            })
    }

    /// Numeric value of `col` on a row; empty fields are `None`.
    fn number(&self, line: u64, row: &[String], col: usize) -> Result<Option<f64>> {
        let field = row[col].trim();
        if field.is_empty() {
            return Ok(None);
        }
        field.parse::<f64>().map(Some).map_err(|_| Error::Data {
            path: self.path.clone(),
            line,
            message: format!("column `{}`: `{field}` is not a number", self.headers[col]),
        })
    }

    /// `(x, y)` pairs of two numeric columns, optionally grouped by a third
    /// column. Rows with an empty `y` are skipped.
    pub fn series(&self, x: &str, y: &str, group: Option<&str>) -> Result<Vec<Series>> {
        let xi = self.column(x)?;
        let yi = self.column(y)?;
        let gi = group.map(|g| self.column(g)).transpose()?;
        let mut groups: BTreeMap<(i64, String), Vec<(f64, f64)>> = BTreeMap::new();
        for (line, row) in &self.rows {
            let Some(xv) = self.number(*line, row, xi)? else {
                return Err(Error::Data {
                    path: self.path.clone(),
                    line: *line,
                    message: format!("column `{x}` is empty"),
                });
            };
            let Some(yv) = self.number(*line, row, yi)? else {
                continue;
            };
            let key = match gi {
                Some(g) => {
                    let label = row[g].clone();
                    (label.parse::<i64>().unwrap_or(i64::MAX), label)
                }
                None => (0, y.to_string()),
            };
            groups.entry(key).or_default().push((xv, yv));
        }
        Ok(groups
            .into_iter()
            .map(|((_, label), points)| Series {
                label: match group {
                    Some(g) => format!("{g} {label}"),
                    None => label,
                },
                points,
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// What to draw from which CSV.
#[derive(Debug, Clone, PartialEq)]
pub enum PlotSpec {
    /// One line per group (or one line per listed column when ungrouped).
    Lines {
        title: String,
        x: String,
        ys: Vec<String>,
        group: Option<String>,
    },
    Heatmap {
        title: String,
        x: String,
        y: String,
        z: String,
        /// Dashed overlay of the zero contour `x + y = level`.
        diagonal: Option<f64>,
    },
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Frame {
    fn px(&self, x: f64) -> f64 {
        MARGIN_L + (x - self.x0) / (self.x1 - self.x0) * (WIDTH - MARGIN_L - MARGIN_R)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN_B - (y - self.y0) / (self.y1 - self.y0) * (HEIGHT - MARGIN_T - MARGIN_B)
    }
}

fn axes(out: &mut String, f: &Frame, title: &str, x_label: &str, y_label: &str) {
    let (l, r) = (MARGIN_L, WIDTH - MARGIN_R);
    let (t, b) = (MARGIN_T, HEIGHT - MARGIN_B);
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        (l + r) / 2.0,
        esc(title)
    );
    let _ = writeln!(
        out,
        r##"<path d="M{l:.2},{t:.2} L{l:.2},{b:.2} L{r:.2},{b:.2}" fill="none" stroke="#000"/>"##
    );
    for k in 0..=4 {
        let fx = f.x0 + (f.x1 - f.x0) * k as f64 / 4.0;
        let fy = f.y0 + (f.y1 - f.y0) * k as f64 / 4.0;
        let (px, py) = (f.px(fx), f.py(fy));
        let _ = writeln!(
            out,
            r##"<line x1="{px:.2}" y1="{b:.2}" x2="{px:.2}" y2="{:.2}" stroke="#000"/><text x="{px:.2}" y="{:.2}" text-anchor="middle" font-size="11">{}</text>"##,
            b + 5.0,
            b + 18.0,
            tick_label(fx)
        );
        let _ = writeln!(
            out,
            r##"<line x1="{:.2}" y1="{py:.2}" x2="{l:.2}" y2="{py:.2}" stroke="#000"/><text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{}</text>"##,
            l - 5.0,
            l - 8.0,
            py + 4.0,
            tick_label(fy)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="13">{}</text>"#,
        (l + r) / 2.0,
        HEIGHT - 12.0,
        esc(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="18" y="{:.2}" text-anchor="middle" font-size="13" transform="rotate(-90 18 {:.2})">{}</text>"#,
        (t + b) / 2.0,
        (t + b) / 2.0,
        esc(y_label)
    );
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 100.0 || v.fract().abs() < 1e-9 {
        format!("{v:.0}")
    } else {
        format!("{v:.2}")
    }
}

fn svg_open() -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH:.0}\" height=\"{HEIGHT:.0}\" viewBox=\"0 0 {WIDTH:.0} {HEIGHT:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n"
    )
}

/// Line chart with one polyline per series.
pub fn line_chart_svg(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter());
    let (x0, x1) = extent(all().map(|p| p.0));
    let (y0, y1) = extent(all().map(|p| p.1));
    let f = Frame { x0, x1, y0, y1 };
    let mut out = svg_open();
    axes(&mut out, &f, title, x_label, y_label);
    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut pts = String::with_capacity(s.points.len() * 16);
        for (i, &(x, y)) in s.points.iter().enumerate() {
            if i > 0 {
                pts.push(' ');
            }
            let _ = write!(pts, "{:.2},{:.2}", f.px(x), f.py(y));
        }
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>"#
        );
        let ly = MARGIN_T + 10.0 + 18.0 * k as f64;
        let lx = WIDTH - MARGIN_R + 12.0;
        let _ = writeln!(
            out,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            esc(&s.label)
        );
    }
    out.push_str("</svg>\n");
    out
}

fn diverging(v: f64, scale: f64) -> String {
    let t = if scale > 0.0 {
        (v / scale).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let (r, g, b) = if t >= 0.0 {
        (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
    } else {
        (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
    };
    format!(
        "#{:02x}{:02x}{:02x}",
        r.round() as u8,
        g.round() as u8,
        b.round() as u8
    )
}

/// Heatmap over a regular grid. `values[i][j]` sits at `(xs[i], ys[j])`.
/// Positive cells are red, negative blue, zero white.
pub fn heatmap_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    xs: &[f64],
    ys: &[f64],
    values: &[Vec<f64>],
    diagonal: Option<f64>,
) -> String {
    let half = |v: &[f64]| {
        if v.len() > 1 {
            (v[1] - v[0]) / 2.0
        } else {
            0.5
        }
    };
    let (hx, hy) = (half(xs), half(ys));
    let f = Frame {
        x0: xs[0] - hx,
        x1: xs[xs.len() - 1] + hx,
        y0: ys[0] - hy,
        y1: ys[ys.len() - 1] + hy,
    };
    let scale = values.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out = svg_open();
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            let (px0, px1) = (f.px(x - hx), f.px(x + hx));
            let (py0, py1) = (f.py(y + hy), f.py(y - hy));
            let _ = writeln!(
                out,
                r#"<rect x="{px0:.2}" y="{py0:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                px1 - px0,
                py1 - py0,
                diverging(values[i][j], scale)
            );
        }
    }
    axes(&mut out, &f, title, x_label, y_label);
    if let Some(level) = diagonal {
        // clip x + y = level to the plotting box
        let mut pts = Vec::new();
        for &x in &[f.x0, f.x1] {
            let y = level - x;
            if (f.y0..=f.y1).contains(&y) {
                pts.push((x, y));
            }
        }
        for &y in &[f.y0, f.y1] {
            let x = level - y;
            if (f.x0..=f.x1).contains(&x) {
                pts.push((x, y));
            }
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup();
        if pts.len() >= 2 {
            let (a, b) = (pts[0], pts[pts.len() - 1]);
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000" stroke-width="1.5" stroke-dasharray="6 4"/>"##,
                f.px(a.0),
                f.py(a.1),
                f.px(b.0),
                f.py(b.1)
            );
        }
    }
    let lx = WIDTH - MARGIN_R + 15.0;
    for (k, (label, v)) in [("D > 0", scale), ("D = 0", 0.0), ("D < 0", -scale)]
        .iter()
        .enumerate()
    {
        let ly = MARGIN_T + 10.0 + 20.0 * k as f64;
        let _ = writeln!(
            out,
            r##"<rect x="{lx:.2}" y="{:.2}" width="14" height="14" fill="{}" stroke="#000"/><text x="{:.2}" y="{:.2}" font-size="11">{label}</text>"##,
            ly - 10.0,
            diverging(*v, scale),
            lx + 20.0,
            ly + 1.0
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Render one plot from a CSV file.
pub fn render_plot(csv: &Path, spec: &PlotSpec) -> Result<String> {
    let table = Table::read(csv)?;
    render_table(&table, spec)
}

fn render_table(table: &Table, spec: &PlotSpec) -> Result<String> {
    match spec {
        PlotSpec::Lines {
            title,
            x,
            ys,
            group,
        } => {
            let mut series = Vec::new();
            for y in ys {
                series.extend(table.series(x, y, group.as_deref())?);
            }
            let y_label = ys.join(", ");
            Ok(line_chart_svg(title, x, &y_label, &series))
        }
        PlotSpec::Heatmap {
            title,
            x,
            y,
            z,
            diagonal,
        } => {
            let (xi, yi, zi) = (table.column(x)?, table.column(y)?, table.column(z)?);
            let mut cells = Vec::with_capacity(table.rows.len());
            for (line, row) in &table.rows {
                let get = |c: usize| -> Result<f64> {
                    table.number(*line, row, c)?.ok_or_else(|| Error::Data {
                        path: table.path.clone(),
                        line: *line,
                        message: format!("column `{}` is empty", table.headers[c]),
                    })
                };
                cells.push((get(xi)?, get(yi)?, get(zi)?));
            }
            let mut xs: Vec<f64> = cells.iter().map(|c| c.0).collect();
            let mut ys: Vec<f64> = cells.iter().map(|c| c.1).collect();
            for v in [&mut xs, &mut ys] {
                v.sort_by(f64::total_cmp);
                v.dedup();
            }
            if xs.len() * ys.len() != cells.len() {
                return Err(Error::Data {
                    path: table.path.clone(),
                    line: 0,
                    message: format!(
                        "{} rows do not form a {}x{} grid",
                        cells.len(),
                        xs.len(),
                        ys.len()
                    ),
                });
            }
            let mut values = vec![vec![0.0; ys.len()]; xs.len()];
            for (cx, cy, cz) in cells {
                let i = xs.partition_point(|&v| v < cx);
                let j = ys.partition_point(|&v| v < cy);
                values[i][j] = cz;
            }
            Ok(heatmap_svg(title, x, y, &xs, &ys, &values, *diagonal))
        }
    }
}

fn per_agent(title: &str, column: &str) -> PlotSpec {
    PlotSpec::Lines {
        title: title.into(),
        x: "tick".into(),
        ys: vec![column.into()],
        group: Some("agent_id".into()),
    }
}

/// Heatmap of a `surface.csv` with the analytic boundary overlaid.
pub fn render_surface(csv: &Path, theta: f64, p_fixed: f64) -> Result<String> {
    render_plot(
        csv,
        &PlotSpec::Heatmap {
            title: "Disposition over affect and contagion".into(),
            x: "affect".into(),
            y: "contagion".into(),
            z: "disposition".into(),
            diagonal: Some(theta - p_fixed),
        },
    )
}

/// Render the standard plots of a run directory. All inputs are parsed
/// before anything is written, so a malformed CSV leaves no partial output.
pub fn render_run_plots(dir: &Path) -> Result<Vec<PathBuf>> {
    let agents = Table::read(&dir.join(AGENTS_CSV))?;
    let global = Table::read(&dir.join(GLOBAL_CSV))?;
    let surface_path = dir.join(SURFACE_CSV);
    let surface = if surface_path.exists() {
        Some(Table::read(&surface_path)?)
    } else {
        None
    };

    let mut rendered = vec![
        (
            "disposition.svg",
            render_table(&agents, &per_agent("Disposition over time", "disposition"))?,
        ),
        (
            "affect.svg",
            render_table(&agents, &per_agent("Affect over time", "affect"))?,
        ),
        (
            "probability.svg",
            render_table(&agents, &per_agent("Probability over time", "probability"))?,
        ),
        (
            "radius.svg",
            render_table(
                &agents,
                &per_agent("Destructive radius over time", "radius"),
            )?,
        ),
        (
            "network.svg",
            render_table(
                &global,
                &PlotSpec::Lines {
                    title: "Tie strength and contagion over time".into(),
                    x: "tick".into(),
                    ys: vec![
                        "avg_tie_strength".into(),
                        "tie_strength_dispersion".into(),
                        "mean_contagion".into(),
                    ],
                    group: None,
                },
            )?,
        ),
        (
            "destruction.svg",
            render_table(
                &global,
                &PlotSpec::Lines {
                    title: "Patch states over time".into(),
                    x: "tick".into(),
                    ys: vec!["destroyed_count".into(), "active_count".into()],
                    group: None,
                },
            )?,
        ),
    ];
    if let Some(table) = surface {
        let config_path = dir.join(crate::output::CONFIG_TOML);
        let diagonal = std::fs::read_to_string(&config_path)
            .ok()
            .and_then(|t| crate::config::SimConfig::from_toml(&t).ok())
            .map(|c| c.agents.theta_base - c.output.surface_p_fixed);
        rendered.push((
            "surface.svg",
            render_table(
                &table,
                &PlotSpec::Heatmap {
                    title: "Disposition over affect and contagion".into(),
                    x: "affect".into(),
                    y: "contagion".into(),
                    z: "disposition".into(),
                    diagonal,
                },
            )?,
        ));
    }
    let mut paths = Vec::with_capacity(rendered.len());
    for (name, svg) in rendered {
        let path = dir.join(name);
        write_file(&path, svg)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> Result<Table> {
        Table::parse(Path::new("t.csv"), text.as_bytes())
    }

    #[test]
    fn empty_body_rejected() {
        let err = table("tick,agent_id,disposition\n").unwrap_err();
        assert!(matches!(err, Error::Data { line: 2, .. }), "{err}");
    }

    #[test]
    fn bad_number_reports_line() {
        let t = table("tick,agent_id,disposition\n0,0,0.1\n1,0,oops\n").unwrap();
        let err = t
            .series("tick", "disposition", Some("agent_id"))
            .unwrap_err();
        assert!(matches!(err, Error::Data { line: 3, .. }), "{err}");
    }

    #[test]
    fn ragged_row_reports_line() {
        let err = table("a,b\n1,2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Data { line: 3, .. }), "{err}");
    }

    #[test]
    fn one_polyline_per_agent() {
        let t = table(
            "tick,agent_id,disposition\n0,0,0.1\n0,1,0.2\n0,2,-0.1\n1,0,0.3\n1,1,0.0\n1,2,0.5\n",
        )
        .unwrap();
        let svg = render_table(&t, &per_agent("D", "disposition")).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains(">tick<") && svg.contains(">disposition<"));
    }

    #[test]
    fn agent_ids_sort_numerically() {
        let t = table("tick,agent_id,v\n0,10,1\n0,2,1\n").unwrap();
        let s = t.series("tick", "v", Some("agent_id")).unwrap();
        assert_eq!(s[0].label, "agent_id 2");
        assert_eq!(s[1].label, "agent_id 10");
    }

    #[test]
    fn heatmap_grid_check() {
        let t = table("affect,contagion,disposition\n0,0,-1\n0,1,0\n1,0,0\n").unwrap();
        let spec = PlotSpec::Heatmap {
            title: "s".into(),
            x: "affect".into(),
            y: "contagion".into(),
            z: "disposition".into(),
            diagonal: None,
        };
        assert!(render_table(&t, &spec).is_err());
        let t = table("affect,contagion,disposition\n0,0,-1\n0,1,0\n1,0,0\n1,1,1\n").unwrap();
        let svg = render_table(&t, &spec).unwrap();
        assert_eq!(svg.matches("<rect x=").count(), 4 + 3);
    }

    #[test]
    fn diverging_endpoints() {
        assert_eq!(diverging(1.0, 1.0), "#ff0000");
        assert_eq!(diverging(0.0, 1.0), "#ffffff");
        assert_eq!(diverging(-1.0, 1.0), "#0000ff");
    }
}
