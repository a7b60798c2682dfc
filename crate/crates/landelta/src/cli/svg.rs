//! Static SVG line/scatter plots written directly, with labeled axes and a
//! deterministic layout. No external renderer.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SvgError {
    #[error("no data series supplied")]
    EmptySeries,
}

pub struct Series {
    pub label: String,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Draw markers instead of a connected line.
    pub scatter: bool,
}

pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
    /// Optional horizontal reference line (drawn dashed, e.g. a target value).
    pub h_line: Option<(f64, String)>,
    /// Optional annotation placed under the title (e.g. a fitted slope).
    pub annotation: Option<String>,
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const ML: f64 = 74.0;
const MR: f64 = 22.0;
const MT: f64 = 46.0;
const MB: f64 = 56.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn tick_label(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else if (1e-3..1e4).contains(&v.abs()) {
        let s = format!("{v:.4}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.2e}")
    }
}

/// Render labeled series to an SVG document.
pub fn emit_plot(series: &[Series], style: &PlotStyle) -> Result<String, SvgError> {
    if series.is_empty() || series.iter().all(|s| s.xs.is_empty()) {
        return Err(SvgError::EmptySeries);
    }
    let tx = |v: f64| if style.log_x { v.max(1e-300).log10() } else { v };
    let ty = |v: f64| if style.log_y { v.max(1e-300).log10() } else { v };
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for (&x, &y) in s.xs.iter().zip(&s.ys) {
            if style.log_y && y <= 0.0 {
                continue;
            }
            let (u, v) = (tx(x), ty(y));
            x0 = x0.min(u);
            x1 = x1.max(u);
            y0 = y0.min(v);
            y1 = y1.max(v);
        }
    }
    if let Some((hv, _)) = &style.h_line {
        let v = ty(*hv);
        y0 = y0.min(v);
        y1 = y1.max(v);
    }
    if !x0.is_finite() || !y0.is_finite() {
        return Err(SvgError::EmptySeries);
    }
    if (x1 - x0).abs() < 1e-12 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if (y1 - y0).abs() < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let padx = 0.05 * (x1 - x0);
    let pady = 0.08 * (y1 - y0);
    let (x0, x1, y0, y1) = (x0 - padx, x1 + padx, y0 - pady, y1 + pady);
    let sx = |u: f64| ML + (u - x0) / (x1 - x0) * (W - ML - MR);
    let sy = |v: f64| H - MB - (v - y0) / (y1 - y0) * (H - MT - MB);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{}</text>\n",
        W / 2.0,
        style.title
    ));
    if let Some(note) = &style.annotation {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"40\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">{}</text>\n",
            W / 2.0,
            note
        ));
    }
    // frame
    svg.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#222\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    // ticks: 5 per axis
    for i in 0..=4 {
        let fu = i as f64 / 4.0;
        let u = x0 + fu * (x1 - x0);
        let px = sx(u);
        let label = if style.log_x {
            format!("1e{}", tick_label(u))
        } else {
            tick_label(u)
        };
        svg.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{}\" x2=\"{px:.2}\" y2=\"{}\" stroke=\"#999\" stroke-dasharray=\"2,4\"/>\n",
            MT,
            H - MB
        ));
        svg.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            H - MB + 18.0,
            label
        ));
        let v = y0 + fu * (y1 - y0);
        let py = sy(v);
        let label = if style.log_y {
            format!("1e{}", tick_label(v))
        } else {
            tick_label(v)
        };
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{py:.2}\" x2=\"{}\" y2=\"{py:.2}\" stroke=\"#999\" stroke-dasharray=\"2,4\"/>\n",
            W - MR
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            ML - 6.0,
            py + 4.0,
            label
        ));
    }
    // axis labels
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
        (ML + W - MR) / 2.0,
        H - 14.0,
        style.x_label
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        (MT + H - MB) / 2.0,
        (MT + H - MB) / 2.0,
        style.y_label
    ));
    // reference line
    if let Some((hv, hl)) = &style.h_line {
        let py = sy(ty(*hv));
        svg.push_str(&format!(
            "<line x1=\"{ML}\" y1=\"{py:.2}\" x2=\"{}\" y2=\"{py:.2}\" stroke=\"#555\" stroke-dasharray=\"6,4\"/>\n",
            W - MR
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{:.2}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#555\">{}</text>\n",
            W - MR - 4.0,
            py - 4.0,
            hl
        ));
    }
    // series
    for (si, s) in series.iter().enumerate() {
        let color = PALETTE[si % PALETTE.len()];
        let pts: Vec<(f64, f64)> = s
            .xs
            .iter()
            .zip(&s.ys)
            .filter(|(_, &y)| !(style.log_y && y <= 0.0))
            .map(|(&x, &y)| (sx(tx(x)), sy(ty(y))))
            .collect();
        if s.scatter {
            for (px, py) in &pts {
                svg.push_str(&format!(
                    "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"{color}\"/>\n"
                ));
            }
        } else {
            let path: Vec<String> = pts
                .iter()
                .enumerate()
                .map(|(i, (px, py))| {
                    format!("{}{:.2},{:.2}", if i == 0 { "M" } else { "L" }, px, py)
                })
                .collect();
            svg.push_str(&format!(
                "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.6\"/>\n",
                path.join(" ")
            ));
        }
        // legend entry
        let ly = MT + 16.0 + 16.0 * si as f64;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n",
            ML + 8.0,
            ly - 9.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{ly:.2}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
            ML + 22.0,
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_plot(
    path: &std::path::Path,
    series: &[Series],
    style: &PlotStyle,
) -> Result<(), Box<dyn std::error::Error>> {
    let body = emit_plot(series, style)?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, body)?;
    Ok(())
}
