//! Self-contained SVG emitters for the experiment outputs. No external
//! references; styles are inline and the resolved experiment config rides
//! along in a metadata element.

use std::fmt::Write as _;

const CELL: f64 = 36.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_TOP: f64 = 50.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn svg_open(out: &mut String, width: f64, height: f64, config_json: &str) {
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<metadata id="config">{}</metadata>"#,
        xml_escape(config_json)
    )
    .unwrap();
    writeln!(
        out,
        r#"<rect x="0" y="0" width="{width:.0}" height="{height:.0}" fill="white"/>"#
    )
    .unwrap();
}

fn text(out: &mut String, x: f64, y: f64, anchor: &str, size: f64, content: &str) {
    writeln!(
        out,
        r#"<text x="{x:.1}" y="{y:.1}" text-anchor="{anchor}" font-family="sans-serif" font-size="{size:.0}" fill="black">{}</text>"#,
        xml_escape(content)
    )
    .unwrap();
}

/// Grayscale grid of mean errors: white at zero, black at one or above,
/// proportional shades between. Rows are instance sizes (largest at the
/// top), columns are corruption probabilities. Cells with no data are
/// outlined in red.
pub fn heatmap_svg(
    q_values: &[f64],
    n_values: &[usize],
    means: &[Vec<f64>],
    title: &str,
    config_json: &str,
) -> String {
    let cols = q_values.len();
    let rows = n_values.len();
    let width = MARGIN_LEFT + CELL * cols as f64 + MARGIN_RIGHT;
    let height = MARGIN_TOP + CELL * rows as f64 + MARGIN_BOTTOM;
    let mut out = String::new();
    svg_open(&mut out, width, height, config_json);
    text(&mut out, width / 2.0, 24.0, "middle", 15.0, title);

    for (ni, &n) in n_values.iter().enumerate() {
        // Largest n on the top row.
        let row = rows - 1 - ni;
        let y = MARGIN_TOP + CELL * row as f64;
        for (qi, _) in q_values.iter().enumerate() {
            let x = MARGIN_LEFT + CELL * qi as f64;
            let v = means[ni][qi];
            if v.is_finite() {
                let clipped = v.clamp(0.0, 1.0);
                let shade = ((1.0 - clipped) * 255.0).round() as u8;
                writeln!(
                    out,
                    r##"<rect x="{x:.1}" y="{y:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="rgb({shade},{shade},{shade})" stroke="#888" stroke-width="0.5"/>"##
                )
                .unwrap();
            } else {
                writeln!(
                    out,
                    r#"<rect x="{x:.1}" y="{y:.1}" width="{CELL:.1}" height="{CELL:.1}" fill="white" stroke="red" stroke-width="1.5"/>"#
                )
                .unwrap();
            }
        }
        text(
            &mut out,
            MARGIN_LEFT - 8.0,
            y + CELL / 2.0 + 4.0,
            "end",
            12.0,
            &n.to_string(),
        );
    }
    for (qi, q) in q_values.iter().enumerate() {
        let x = MARGIN_LEFT + CELL * qi as f64 + CELL / 2.0;
        text(
            &mut out,
            x,
            MARGIN_TOP + CELL * rows as f64 + 18.0,
            "middle",
            11.0,
            &format!("{q:.2}"),
        );
    }
    text(
        &mut out,
        MARGIN_LEFT + CELL * cols as f64 / 2.0,
        height - 14.0,
        "middle",
        13.0,
        "corruption probability",
    );
    writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" font-family="sans-serif" font-size="13" fill="black" transform="rotate(-90 16 {:.1})">locations</text>"#,
        MARGIN_TOP + CELL * rows as f64 / 2.0,
        MARGIN_TOP + CELL * rows as f64 / 2.0
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

/// Log-log line plot of mean error against a positive sweep parameter.
/// Points at zero are dropped from the plot (they have no logarithm) but
/// remain in the CSV alongside.
pub fn loglog_line_svg(
    means: &[(f64, f64)],
    x_label: &str,
    y_label: &str,
    config_json: &str,
) -> String {
    let pts: Vec<(f64, f64)> = means
        .iter()
        .copied()
        .filter(|(s, m)| *s > 0.0 && m.is_finite() && *m > 0.0)
        .collect();
    let width = 480.0;
    let height = 360.0;
    let plot_w = width - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = height - MARGIN_TOP - MARGIN_BOTTOM;
    let mut out = String::new();
    svg_open(&mut out, width, height, config_json);
    text(&mut out, width / 2.0, 24.0, "middle", 15.0, y_label);

    if !pts.is_empty() {
        let x_lo = pts.iter().map(|p| p.0.log10()).fold(f64::INFINITY, f64::min).floor();
        let x_hi = pts
            .iter()
            .map(|p| p.0.log10())
            .fold(f64::NEG_INFINITY, f64::max)
            .ceil();
        let y_lo = pts.iter().map(|p| p.1.log10()).fold(f64::INFINITY, f64::min).floor();
        let y_hi = pts
            .iter()
            .map(|p| p.1.log10())
            .fold(f64::NEG_INFINITY, f64::max)
            .ceil();
        let x_span = (x_hi - x_lo).max(1.0);
        let y_span = (y_hi - y_lo).max(1.0);
        let to_px = |s: f64, m: f64| -> (f64, f64) {
            let x = MARGIN_LEFT + (s.log10() - x_lo) / x_span * plot_w;
            let y = MARGIN_TOP + (1.0 - (m.log10() - y_lo) / y_span) * plot_h;
            (x, y)
        };

        // Decade grid lines and tick labels.
        let mut dec = x_lo as i64;
        while dec <= x_hi as i64 {
            let x = MARGIN_LEFT + (dec as f64 - x_lo) / x_span * plot_w;
            writeln!(
                out,
                r##"<line x1="{x:.1}" y1="{MARGIN_TOP:.1}" x2="{x:.1}" y2="{:.1}" stroke="#ddd" stroke-width="1"/>"##,
                MARGIN_TOP + plot_h
            )
            .unwrap();
            text(
                &mut out,
                x,
                MARGIN_TOP + plot_h + 18.0,
                "middle",
                11.0,
                &format!("1e{dec}"),
            );
            dec += 1;
        }
        let mut dec = y_lo as i64;
        while dec <= y_hi as i64 {
            let y = MARGIN_TOP + (1.0 - (dec as f64 - y_lo) / y_span) * plot_h;
            writeln!(
                out,
                r##"<line x1="{MARGIN_LEFT:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd" stroke-width="1"/>"##,
                MARGIN_LEFT + plot_w
            )
            .unwrap();
            text(&mut out, MARGIN_LEFT - 6.0, y + 4.0, "end", 11.0, &format!("1e{dec}"));
            dec += 1;
        }

        let path: Vec<String> = pts
            .iter()
            .map(|&(s, m)| {
                let (x, y) = to_px(s, m);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
            path.join(" ")
        )
        .unwrap();
        for &(s, m) in &pts {
            let (x, y) = to_px(s, m);
            writeln!(out, r#"<circle cx="{x:.1}" cy="{y:.1}" r="3" fill="black"/>"#).unwrap();
        }
    } else {
        text(
            &mut out,
            width / 2.0,
            height / 2.0,
            "middle",
            12.0,
            "no positive data points",
        );
    }

    text(&mut out, width / 2.0, height - 14.0, "middle", 13.0, x_label);
    writeln!(
        out,
        r#"<rect x="{MARGIN_LEFT:.1}" y="{MARGIN_TOP:.1}" width="{plot_w:.1}" height="{plot_h:.1}" fill="none" stroke="black" stroke-width="1"/>"#
    )
    .unwrap();
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_metadata_payload() {
        let svg = heatmap_svg(
            &[0.0, 0.1],
            &[10, 20],
            &[vec![0.0, 0.5], vec![1.0, f64::NAN]],
            "title",
            r#"{"a":"<b>&\"c\""}"#,
        );
        assert!(svg.contains("&lt;b&gt;&amp;"));
        assert!(!svg.contains("<b>"));
        assert!(svg.contains("rgb(255,255,255)"));
        assert!(svg.contains("rgb(0,0,0)"));
    }
}
