//! Self-contained SVG line plots with a density axis on the left and a
//! pressure axis on the right.

use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct PlotStyle {
    pub width: u32,
    pub height: u32,
    pub title: String,
    pub x_label: String,
}

impl Default for PlotStyle {
    fn default() -> Self {
        PlotStyle {
            width: 640,
            height: 400,
            title: String::new(),
            x_label: "x".into(),
        }
    }
}

const DENSITY_TOP: f64 = 1.05;
const DENSITY_COLOR: &str = "#1f4e9c";
const PRESSURE_COLOR: &str = "#c0392b";
const MARGIN: (f64, f64, f64, f64) = (64.0, 72.0, 36.0, 48.0); // left, right, top, bottom

/// Round upper bound `1, 2, 2.5, 5 x 10^k` at or above `v`.
fn nice_ceiling(v: f64) -> f64 {
    if !(v > 0.0) || !v.is_finite() {
        return 1.0;
    }
    let base = 10f64.powf(v.log10().floor());
    for f in [1.0, 2.0, 2.5, 5.0, 10.0] {
        if f * base >= v * (1.0 - 1e-12) {
            return f * base;
        }
    }
    10.0 * base
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.3}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.to_string() }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Density (solid) on `[0, 1.05]` (or higher if the data exceeds it) and pressure (dashed) on an auto-scaled
/// right axis, both against `x`.
pub fn twin_axis_plot(x: &[f64], density: &[f64], pressure: &[f64], style: &PlotStyle) -> String {
    let (w, h) = (style.width as f64, style.height as f64);
    let (ml, mr, mt, mb) = MARGIN;
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let x0 = x.first().copied().unwrap_or(0.0);
    let x1 = x.last().copied().filter(|&v| v > x0).unwrap_or(x0 + 1.0);
    // the density axis grows past 1.05 only when the data does
    let d_max = density.iter().copied().fold(0.0, f64::max);
    let d_top = if d_max > DENSITY_TOP { (d_max / 0.05).ceil() * 0.05 } else { DENSITY_TOP };
    let p_top = nice_ceiling(pressure.iter().copied().fold(0.0, f64::max));
    let sx = |v: f64| ml + (v - x0) / (x1 - x0) * pw;
    let sy = |v: f64, top: f64| mt + ph * (1.0 - v.clamp(0.0, top) / top);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<?xml version="1.0" encoding="UTF-8"?>
<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">
<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );

    for k in 0..=5 {
        let f = k as f64 / 5.0;
        let xv = x0 + f * (x1 - x0);
        let px = sx(xv);
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            mt + ph,
            mt + ph + 5.0,
            mt + ph + 18.0,
            tick_label(xv)
        );
        let dv = f * d_top;
        let py = sy(dv, d_top);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{ml}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            ml - 5.0,
            ml - 8.0,
            py + 4.0,
            tick_label(dv)
        );
        let pv = f * p_top;
        let py = sy(pv, p_top);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{:.2}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="start">{}</text>"#,
            ml + pw,
            ml + pw + 5.0,
            ml + pw + 8.0,
            py + 4.0,
            tick_label(pv)
        );
    }

    let line = |vals: &[f64], top: f64| {
        x.iter()
            .zip(vals)
            .map(|(&a, &b)| format!("{:.2},{:.2}", sx(a), sy(b, top)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="{DENSITY_COLOR}" stroke-width="2" points="{}"/>"#,
        line(density, d_top)
    );
    let _ = writeln!(
        s,
        r#"<polyline fill="none" stroke="{PRESSURE_COLOR}" stroke-width="2" stroke-dasharray="6,4" points="{}"/>"#,
        line(pressure, p_top)
    );

    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        ml + 0.5 * pw,
        h - 10.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})" fill="{DENSITY_COLOR}">density</text>"#,
        mt + 0.5 * ph,
        mt + 0.5 * ph
    );
    let rx = w - 14.0;
    let _ = writeln!(
        s,
        r#"<text x="{rx:.2}" y="{:.2}" text-anchor="middle" transform="rotate(90 {rx:.2} {:.2})" fill="{PRESSURE_COLOR}">pressure</text>"#,
        mt + 0.5 * ph,
        mt + 0.5 * ph
    );
    if !style.title.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
            ml + 0.5 * pw,
            escape(&style.title)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceilings() {
        assert_eq!(nice_ceiling(0.0), 1.0);
        assert_eq!(nice_ceiling(0.87), 1.0);
        assert_eq!(nice_ceiling(1.2), 2.0);
        assert_eq!(nice_ceiling(2.1), 2.5);
        assert_eq!(nice_ceiling(30.0), 50.0);
    }

    #[test]
    fn plot_is_self_contained_and_dashed() {
        let x = [0.0, 0.5, 1.0];
        let style = PlotStyle {
            title: "t = 0.1 <a>".into(),
            ..PlotStyle::default()
        };
        let s = twin_axis_plot(&x, &[0.2, 1.0, 0.2], &[0.0, 3.0, 0.0], &style);
        assert!(s.starts_with("<?xml"));
        assert!(s.ends_with("</svg>\n"));
        assert_eq!(s.matches("<polyline").count(), 2);
        assert!(s.contains("stroke-dasharray"));
        assert!(s.contains("&lt;a&gt;"));
        assert!(!s.contains("href"));
        assert_eq!(s, twin_axis_plot(&x, &[0.2, 1.0, 0.2], &[0.0, 3.0, 0.0], &style));
    }
}
