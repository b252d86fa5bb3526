//! Standalone SVG charts of exposure vs distance, with regulatory guideline
//! overlays. No plotting runtime needed; the output is plain XML.

use crate::compliance::{Metric, RegulatoryLimit};
use crate::error::{Error, Result};

/// One polyline on the chart.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    /// (distance m, exposure value) pairs.
    pub points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

const SERIES_COLORS: [&str; 6] = ["#000000", "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Renders one chart: x-axis distance (linear), y-axis exposure (log10),
/// one polyline per series, dashed horizontal guideline per matching limit.
pub fn render_svg(
    series: &[Series],
    limits: &[RegulatoryLimit],
    metric: Metric,
    title: &str,
) -> Result<String> {
    let mut all: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|(_, y)| *y > 0.0 && y.is_finite())
        .collect();
    if all.is_empty() {
        return Err(Error::EmptyResult);
    }
    let limits: Vec<&RegulatoryLimit> = limits.iter().filter(|l| l.metric == metric).collect();
    for l in &limits {
        all.push((all[0].0, l.value));
    }

    let x_min = all.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let x_max = all.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let y_min = all.iter().map(|p| p.1.log10()).fold(f64::INFINITY, f64::min) - 0.2;
    let y_max = all.iter().map(|p| p.1.log10()).fold(f64::NEG_INFINITY, f64::max) + 0.2;
    let x_span = (x_max - x_min).max(1e-9);
    let y_span = (y_max - y_min).max(1e-9);

    let to_x = |x: f64| MARGIN_LEFT + (x - x_min) / x_span * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT);
    let to_y = |y: f64| {
        HEIGHT - MARGIN_BOTTOM
            - (y.log10() - y_min) / y_span * (HEIGHT - MARGIN_TOP - MARGIN_BOTTOM)
    };

    let unit = match metric {
        Metric::Pd => "PD (W/m²)",
        Metric::Sar => "SAR (W/kg)",
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        WIDTH / 2.0,
        escape(title)
    ));
    // axes
    svg.push_str(&format!(
        "  <line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"#333\"/>\n  <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"#333\"/>\n",
        l = MARGIN_LEFT,
        r = WIDTH - MARGIN_RIGHT,
        t = MARGIN_TOP,
        b = HEIGHT - MARGIN_BOTTOM,
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\">distance (m)</text>\n",
        WIDTH / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "  <text x=\"16\" y=\"{}\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 {})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(unit)
    ));
    // x tick labels at both ends
    for x in [x_min, x_max] {
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{x:.3}</text>\n",
            to_x(x),
            HEIGHT - MARGIN_BOTTOM + 18.0
        ));
    }
    // decade gridlines
    let mut decade = y_min.ceil() as i64;
    while (decade as f64) < y_max {
        let y = to_y(10f64.powi(decade as i32));
        svg.push_str(&format!(
            "  <line x1=\"{l}\" y1=\"{y}\" x2=\"{r}\" y2=\"{y}\" stroke=\"#ddd\"/>\n  <text x=\"{tx}\" y=\"{ty}\" text-anchor=\"end\" font-size=\"11\">1e{decade}</text>\n",
            l = MARGIN_LEFT,
            r = WIDTH - MARGIN_RIGHT,
            tx = MARGIN_LEFT - 6.0,
            ty = y + 4.0,
        ));
        decade += 1;
    }

    for (i, s) in series.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|(_, y)| *y > 0.0 && y.is_finite())
            .map(|(x, y)| format!("{:.2},{:.2}", to_x(*x), to_y(*y)))
            .collect();
        svg.push_str(&format!(
            "  <polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        svg.push_str(&format!(
            "  <text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{color}\">{}</text>\n",
            WIDTH - MARGIN_RIGHT - 120.0,
            MARGIN_TOP + 16.0 * (i as f64 + 1.0),
            escape(&s.name)
        ));
    }

    for l in &limits {
        let y = to_y(l.value);
        let label = format!("{:?} {} {}", l.authority, l.value, l.unit());
        svg.push_str(&format!(
            "  <line x1=\"{lx}\" y1=\"{y}\" x2=\"{rx}\" y2=\"{y}\" stroke=\"#b00\" stroke-dasharray=\"6,4\"/>\n  <text x=\"{tx}\" y=\"{ty}\" font-size=\"11\" fill=\"#b00\">{}</text>\n",
            escape(&label),
            lx = MARGIN_LEFT,
            rx = WIDTH - MARGIN_RIGHT,
            tx = MARGIN_LEFT + 6.0,
            ty = y - 4.0,
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compliance::limit_registry;

    fn pd_series(name: &str) -> Series {
        Series {
            name: name.into(),
            points: (1..=20).map(|i| (i as f64 * 50.0, 1.0 / (i as f64))).collect(),
        }
    }

    #[test]
    fn three_series_and_guideline_present() {
        let series = vec![pd_series("nr5g"), pd_series("lte4g"), pd_series("g39")];
        let svg = render_svg(&series, &limit_registry(), Metric::Pd, "downlink PD").unwrap();
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(svg.contains("Icnirp 10 W/m²"));
        assert!(!svg.contains("W/kg")); // SAR limits filtered out
    }

    #[test]
    fn sar_chart_carries_2_w_kg_guideline() {
        let svg = render_svg(&[pd_series("uplink")], &limit_registry(), Metric::Sar, "uplink SAR")
            .unwrap();
        assert!(svg.contains("Icnirp 2 W/kg"));
    }

    #[test]
    fn single_point_series_renders() {
        let s = Series {
            name: "point".into(),
            points: vec![(1.0, 3.0)],
        };
        let svg = render_svg(&[s], &[], Metric::Sar, "degenerate").unwrap();
        assert!(svg.contains("<polyline"));
    }

    #[test]
    fn empty_input_is_typed_error() {
        let s = Series {
            name: "none".into(),
            points: vec![],
        };
        assert!(matches!(render_svg(&[s], &[], Metric::Pd, "x"), Err(Error::EmptyResult)));
    }
}
