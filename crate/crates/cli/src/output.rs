//! Deterministic file artifacts: CSV tables at nine significant digits and
//! small self-contained SVG line plots. Neither writer embeds anything
//! nondeterministic, so repeated runs produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::CliResult;

/// Nine significant digits in scientific notation, negative zero folded
/// into zero. Parsing the result and reformatting it reproduces the string.
pub fn fmt_sig(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.8e}")
}

/// Short human form for values that name things (legend entries, column
/// headers); `Display` prints the shortest digits that round-trip.
pub fn fmt_axis(v: f64) -> String {
    format!("{v}")
}

/// Writes `t_g,<column>,...` rows over a shared time grid.
pub fn write_csv(
    path: &Path,
    columns: &[(String, &[f64])],
    times: &[f64],
) -> CliResult<()> {
    let mut text = String::from("t_g");
    for (name, col) in columns {
        assert_eq!(col.len(), times.len(), "column {name} length");
        text.push(',');
        text.push_str(name);
    }
    text.push('\n');
    for (i, &t) in times.iter().enumerate() {
        text.push_str(&fmt_sig(t));
        for (_, col) in columns {
            text.push(',');
            text.push_str(&fmt_sig(col[i]));
        }
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

/// Writes a reduced table with an arbitrary first column.
pub fn write_table(
    path: &Path,
    header: &[&str],
    rows: &[Vec<f64>],
) -> CliResult<()> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        assert_eq!(row.len(), header.len(), "row width");
        let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 32.0;
const MARGIN_B: f64 = 56.0;

const PALETTE: [&str; 6] =
    ["#1f6feb", "#d73a49", "#2da44e", "#8250df", "#e36209", "#57606a"];

fn px(v: f64) -> String {
    format!("{v:.2}")
}

/// Round tick spacing of roughly `span / 5`, snapped to 1, 2 or 5 times a
/// power of ten.
fn tick_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let norm = raw / mag;
    let snapped = if norm < 1.5 {
        1.0
    } else if norm < 3.5 {
        2.0
    } else if norm < 7.5 {
        5.0
    } else {
        10.0
    };
    snapped * mag
}

fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let step = tick_step(hi - lo);
    let mut t = (lo / step).ceil() * step;
    let mut out = Vec::new();
    while t <= hi + step * 1e-9 {
        // snap near-zero ticks so labels do not read -0
        out.push(if t.abs() < step * 1e-9 { 0.0 } else { t });
        t += step;
    }
    out
}

fn tick_label(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&a) {
        let s = format!("{v:.3}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        s.to_string()
    } else {
        format!("{v:.1e}")
    }
}

/// A minimal line plot: axes, ticks, one polyline per series, legend.
pub fn write_svg(
    path: &Path,
    x_label: &str,
    y_label: &str,
    series: &[(String, &[f64], &[f64])],
) -> CliResult<()> {
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for (_, xs, ys) in series {
        for &x in *xs {
            x_lo = x_lo.min(x);
            x_hi = x_hi.max(x);
        }
        for &y in *ys {
            y_lo = y_lo.min(y);
            y_hi = y_hi.max(y);
        }
    }
    if !(x_lo.is_finite() && y_lo.is_finite()) {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if x_hi == x_lo {
        x_hi = x_lo + 1.0;
    }
    if y_hi == y_lo {
        y_hi = y_lo + 1.0;
    }
    let pad = (y_hi - y_lo) * 0.05;
    let (y_lo, y_hi) = (y_lo - pad, y_hi + pad);

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         font-family=\"sans-serif\" font-size=\"13\">\n"
    ));
    svg.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));

    for tx in ticks(x_lo, x_hi) {
        let x = px(sx(tx));
        let y0 = px(MARGIN_T);
        let y1 = px(HEIGHT - MARGIN_B);
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{y0}\" x2=\"{x}\" y2=\"{y1}\" stroke=\"#dddddd\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{x}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
            px(HEIGHT - MARGIN_B + 20.0),
            tick_label(tx)
        ));
    }
    for ty in ticks(y_lo, y_hi) {
        let y = px(sy(ty));
        let x0 = px(MARGIN_L);
        let x1 = px(WIDTH - MARGIN_R);
        svg.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#dddddd\"/>\n"
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n",
            px(MARGIN_L - 8.0),
            px(sy(ty) + 4.0),
            tick_label(ty)
        ));
    }

    // axes on top of the grid
    svg.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"#333333\"/>\n\
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"#333333\"/>\n",
        l = px(MARGIN_L),
        r = px(WIDTH - MARGIN_R),
        t = px(MARGIN_T),
        b = px(HEIGHT - MARGIN_B),
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
        px(MARGIN_L + plot_w / 2.0),
        px(HEIGHT - 12.0),
        x_label
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">{}</text>\n",
        px(MARGIN_T + plot_h / 2.0),
        px(MARGIN_T + plot_h / 2.0),
        y_label
    ));

    for (k, (name, xs, ys)) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mut pts = String::new();
        for (x, y) in xs.iter().zip(ys.iter()) {
            if !pts.is_empty() {
                pts.push(' ');
            }
            pts.push_str(&format!("{},{}", px(sx(*x)), px(sy(*y))));
        }
        svg.push_str(&format!(
            "<polyline points=\"{pts}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n"
        ));
        let ly = MARGIN_T + 16.0 + 18.0 * k as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            px(WIDTH - MARGIN_R - 150.0),
            px(ly - 4.0),
            px(WIDTH - MARGIN_R - 126.0),
            px(ly - 4.0),
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\">{}</text>\n",
            px(WIDTH - MARGIN_R - 120.0),
            px(ly),
            name
        ));
    }

    svg.push_str("</svg>\n");
    let mut f = fs::File::create(path)?;
    f.write_all(svg.as_bytes())?;
    Ok(())
}
