//! Static SVG line charts over the experiment CSV: one series per method,
//! mean y per x, optional log-scale y with a floor for exact zeros (BER
//! curves routinely hit zero at high SNR and would otherwise vanish from a
//! log axis).

use serde_json::Value;
use std::collections::BTreeMap;
use std::path::Path;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

#[derive(Debug, Clone)]
pub struct PlotSpec {
    /// CSV column providing x values (e.g. "snr_db", "n_tilde").
    pub x_column: String,
    /// Either a CSV column name, the derived column "ber"
    /// (bit_errors / bits), or "extra:<key>" to pull a number out of the
    /// extra_json column.
    pub y_column: String,
    pub log_y: bool,
    /// Values at or below this are drawn at the floor with an open marker
    /// when the y axis is logarithmic.
    pub y_floor: f64,
    pub title: String,
    /// Restrict to the aggregate rows (status == "summary"); otherwise all
    /// ok rows contribute and repeated x values are averaged.
    pub summary_only: bool,
}

impl Default for PlotSpec {
    fn default() -> Self {
        PlotSpec {
            x_column: "snr_db".into(),
            y_column: "ber".into(),
            log_y: true,
            y_floor: 1e-6,
            title: String::new(),
            summary_only: true,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PlotError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("csv is missing required column {0:?}")]
    MissingColumn(String),
    #[error("column {column:?} holds non-numeric value {value:?}")]
    BadNumber { column: String, value: String },
}

enum YSource {
    Column(usize),
    BitErrorRate { errors: usize, bits: usize },
    Extra { col: usize, key: String },
}

fn find_col(headers: &csv::StringRecord, name: &str) -> Result<usize, PlotError> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| PlotError::MissingColumn(name.to_string()))
}

fn parse_num(field: &str, column: &str) -> Result<f64, PlotError> {
    field.trim().parse::<f64>().map_err(|_| PlotError::BadNumber {
        column: column.to_string(),
        value: field.to_string(),
    })
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn fmt_tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-3) {
        format!("{v:.0e}")
    } else {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s.is_empty() { "0".into() } else { s.into() }
    }
}

struct Series {
    name: String,
    /// x → (sum, count); averaged at render time.
    points: BTreeMap<u64, (f64, f64, f64)>,
}

/// Renders a line chart of `csv_path` into `out_path`. Series are keyed by
/// the method column in first-appearance order; rows whose y accessor is
/// absent (e.g. a stat another method does not report) are skipped, but a
/// missing CSV column is a hard error.
pub fn emit_svg_plot(csv_path: &Path, out_path: &Path, spec: &PlotSpec) -> Result<(), PlotError> {
    let mut reader = csv::Reader::from_path(csv_path)?;
    let headers = reader.headers()?.clone();
    let x_col = find_col(&headers, &spec.x_column)?;
    let method_col = find_col(&headers, "method")?;
    let status_col = find_col(&headers, "status")?;
    let y_source = if spec.y_column == "ber" {
        YSource::BitErrorRate {
            errors: find_col(&headers, "bit_errors")?,
            bits: find_col(&headers, "bits")?,
        }
    } else if let Some(key) = spec.y_column.strip_prefix("extra:") {
        YSource::Extra {
            col: find_col(&headers, "extra_json")?,
            key: key.to_string(),
        }
    } else {
        YSource::Column(find_col(&headers, &spec.y_column)?)
    };

    let mut series: Vec<Series> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let status = record.get(status_col).unwrap_or("");
        if spec.summary_only {
            if status != "summary" {
                continue;
            }
        } else if status != "ok" {
            continue;
        }
        let x = parse_num(record.get(x_col).unwrap_or(""), &spec.x_column)?;
        let y = match &y_source {
            YSource::Column(c) => {
                let field = record.get(*c).unwrap_or("");
                if field.trim().eq_ignore_ascii_case("nan") {
                    continue;
                }
                parse_num(field, &spec.y_column)?
            }
            YSource::BitErrorRate { errors, bits } => {
                let e = parse_num(record.get(*errors).unwrap_or(""), "bit_errors")?;
                let b = parse_num(record.get(*bits).unwrap_or(""), "bits")?;
                if b <= 0.0 {
                    continue;
                }
                e / b
            }
            YSource::Extra { col, key } => {
                let raw = record.get(*col).unwrap_or("{}");
                let parsed: Value = serde_json::from_str(raw).unwrap_or(Value::Null);
                match parsed.get(key).and_then(Value::as_f64) {
                    Some(v) if v.is_finite() => v,
                    _ => continue,
                }
            }
        };
        if !x.is_finite() || !y.is_finite() {
            continue;
        }
        let name = record.get(method_col).unwrap_or("").to_string();
        let idx = match series.iter().position(|s| s.name == name) {
            Some(i) => i,
            None => {
                series.push(Series { name, points: BTreeMap::new() });
                series.len() - 1
            }
        };
        let slot = series[idx]
            .points
            .entry(ordered_bits(x))
            .or_insert((x, 0.0, 0.0));
        slot.1 += y;
        slot.2 += 1.0;
    }

    let svg = render(&series, spec);
    std::fs::write(out_path, svg)?;
    Ok(())
}

/// Order-preserving bit image of a finite f64, usable as a BTreeMap key.
fn ordered_bits(v: f64) -> u64 {
    let b = v.to_bits();
    if b >> 63 == 1 { !b } else { b | (1 << 63) }
}

fn render(series: &[Series], spec: &PlotSpec) -> String {
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for s in series {
        for &(x, sum, count) in s.points.values() {
            xs.push(x);
            ys.push(sum / count);
        }
    }
    let (x_min, x_max) = range_of(&xs, 0.0, 1.0);
    let floor = spec.y_floor.max(f64::MIN_POSITIVE);
    let (y_min, y_max) = if spec.log_y {
        let clamped: Vec<f64> = ys.iter().map(|&v| v.max(floor)).collect();
        let (lo, hi) = range_of(&clamped, floor, 1.0);
        (lo.max(floor), hi.max(floor * 10.0))
    } else {
        range_of(&ys, 0.0, 1.0)
    };

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let map_x = |v: f64| MARGIN_LEFT + (v - x_min) / x_span * plot_w;
    let map_y = |v: f64| -> f64 {
        let t = if spec.log_y {
            let lo = y_min.log10();
            let hi = y_max.log10();
            let span = if hi > lo { hi - lo } else { 1.0 };
            (v.max(floor).log10() - lo) / span
        } else {
            let span = if y_max > y_min { y_max - y_min } else { 1.0 };
            (v - y_min) / span
        };
        MARGIN_TOP + plot_h - t.clamp(0.0, 1.0) * plot_h
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    if !spec.title.is_empty() {
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
            MARGIN_LEFT + plot_w / 2.0,
            xml_escape(&spec.title)
        ));
    }
    // Axes.
    let x0 = MARGIN_LEFT;
    let y0 = MARGIN_TOP + plot_h;
    out.push_str(&format!(
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>\n",
        x0 + plot_w
    ));
    out.push_str(&format!(
        "<line x1=\"{x0:.1}\" y1=\"{:.1}\" x2=\"{x0:.1}\" y2=\"{y0:.1}\" stroke=\"black\"/>\n",
        MARGIN_TOP
    ));
    // X ticks.
    for i in 0..=4 {
        let v = x_min + x_span * i as f64 / 4.0;
        let px = map_x(v);
        out.push_str(&format!(
            "<line x1=\"{px:.1}\" y1=\"{y0:.1}\" x2=\"{px:.1}\" y2=\"{:.1}\" stroke=\"black\"/>\n",
            y0 + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
            y0 + 18.0,
            xml_escape(&fmt_tick(v))
        ));
    }
    // Y ticks.
    if spec.log_y {
        let lo = y_min.log10().floor() as i32;
        let hi = y_max.log10().ceil() as i32;
        for e in lo..=hi {
            let v = 10f64.powi(e);
            if v < y_min / 1.0001 || v > y_max * 1.0001 {
                continue;
            }
            let py = map_y(v);
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{x0:.1}\" y2=\"{py:.1}\" stroke=\"black\"/>\n",
                x0 - 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">1e{e}</text>\n",
                x0 - 8.0,
                py + 4.0
            ));
        }
    } else {
        for i in 0..=4 {
            let v = y_min + (y_max - y_min) * i as f64 / 4.0;
            let py = map_y(v);
            out.push_str(&format!(
                "<line x1=\"{:.1}\" y1=\"{py:.1}\" x2=\"{x0:.1}\" y2=\"{py:.1}\" stroke=\"black\"/>\n",
                x0 - 5.0
            ));
            out.push_str(&format!(
                "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"end\">{}</text>\n",
                x0 - 8.0,
                py + 4.0,
                xml_escape(&fmt_tick(v))
            ));
        }
    }
    // Axis labels.
    out.push_str(&format!(
        "<text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{}</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        xml_escape(&spec.x_column)
    ));
    out.push_str(&format!(
        "<text x=\"16\" y=\"{:.1}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1})\">{}</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0,
        xml_escape(&spec.y_column)
    ));

    let mut any_floored = false;
    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let mut path = String::new();
        let mut markers = String::new();
        for &(x, sum, count) in s.points.values() {
            let y = sum / count;
            let floored = spec.log_y && y <= floor;
            any_floored |= floored;
            let px = map_x(x);
            let py = map_y(if floored { floor } else { y });
            path.push_str(&format!("{px:.1},{py:.1} "));
            if floored {
                // Open marker flags a value at or below the display floor.
                markers.push_str(&format!(
                    "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"4\" fill=\"white\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n"
                ));
            } else {
                markers.push_str(&format!(
                    "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"3\" fill=\"{color}\"/>\n"
                ));
            }
        }
        if !path.is_empty() {
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
                path.trim_end()
            ));
            out.push_str(&markers);
        }
        // Legend entry.
        let ly = MARGIN_TOP + 10.0 + si as f64 * 18.0;
        let lx = MARGIN_LEFT + plot_w + 14.0;
        out.push_str(&format!(
            "<line x1=\"{lx:.1}\" y1=\"{ly:.1}\" x2=\"{:.1}\" y2=\"{ly:.1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            lx + 22.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\">{}</text>\n",
            lx + 28.0,
            ly + 4.0,
            xml_escape(&s.name)
        ));
    }
    if any_floored {
        out.push_str(&format!(
            "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" fill=\"#555\">open markers: value &lt;= {}</text>\n",
            MARGIN_LEFT,
            MARGIN_TOP - 8.0,
            xml_escape(&fmt_tick(floor))
        ));
    }
    out.push_str("</svg>\n");
    out
}

fn range_of(vals: &[f64], lo_default: f64, hi_default: f64) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in vals {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (lo_default, hi_default);
    }
    if lo == hi {
        // Degenerate span: pad so the single value sits mid-plot.
        let pad = if lo == 0.0 { 0.5 } else { lo.abs() * 0.5 };
        return (lo - pad, hi + pad);
    }
    (lo, hi)
}
