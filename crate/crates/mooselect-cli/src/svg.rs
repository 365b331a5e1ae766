//! Deterministic SVG scatter plot of the objective space: complexity (f2)
//! on the horizontal axis, fit (f1) on the vertical axis, dominated points
//! as open circles, frontier points filled and joined by a polyline, plus an
//! optional highlight ring for a criterion's top model.
//!
//! Output is byte-identical for identical input: fixed canvas geometry,
//! fixed iteration order, and fixed-precision coordinate formatting.

use mooselect::ObjectivePoint;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 36.0;
const MARGIN_BOTTOM: f64 = 64.0;

struct Axis {
    min: f64,
    max: f64,
    ticks: Vec<f64>,
}

/// Tick positions covering [min, max] with a 1-2-5 step ladder.
fn nice_axis(min: f64, max: f64) -> Axis {
    let (mut lo, mut hi) = (min, max);
    if hi <= lo || hi.is_nan() || lo.is_nan() {
        lo -= 1.0;
        hi += 1.0;
    }
    let raw_step = (hi - lo) / 5.0;
    let magnitude = 10f64.powf(raw_step.log10().floor());
    let normalized = raw_step / magnitude;
    let step = if normalized <= 1.0 {
        1.0
    } else if normalized <= 2.0 {
        2.0
    } else if normalized <= 5.0 {
        5.0
    } else {
        10.0
    } * magnitude;
    let start = (lo / step).floor() * step;
    let mut ticks = Vec::new();
    let mut t = start;
    while t <= hi + step * 0.5 {
        if t >= lo - step * 1e-9 {
            ticks.push(t);
        }
        t += step;
    }
    // Pad the data range by half a step on each side.
    Axis {
        min: lo - step * 0.5,
        max: hi + step * 0.5,
        ticks,
    }
}

fn format_tick(value: f64) -> String {
    if value == value.trunc() && value.abs() < 1e7 {
        format!("{}", value as i64)
    } else {
        format!("{value:.1}")
    }
}

/// Render the scatter plot. `frontier` must be sorted by f2 ascending;
/// `highlight` marks one model id with a ring and a legend entry.
pub fn render_scatter(
    points: &[ObjectivePoint],
    frontier: &[ObjectivePoint],
    highlight: Option<(&str, &str)>,
) -> String {
    let f2_min = points.iter().map(|p| p.f2).fold(f64::INFINITY, f64::min);
    let f2_max = points
        .iter()
        .map(|p| p.f2)
        .fold(f64::NEG_INFINITY, f64::max);
    let f1_min = points.iter().map(|p| p.f1).fold(f64::INFINITY, f64::min);
    let f1_max = points
        .iter()
        .map(|p| p.f1)
        .fold(f64::NEG_INFINITY, f64::max);
    let x_axis = nice_axis(f2_min, f2_max);
    let y_axis = nice_axis(f1_min, f1_max);

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x_of = |f2: f64| MARGIN_LEFT + (f2 - x_axis.min) / (x_axis.max - x_axis.min) * plot_w;
    // Smaller f1 (better fit) sits at the bottom of the figure.
    let y_of =
        |f1: f64| MARGIN_TOP + (1.0 - (f1 - y_axis.min) / (y_axis.max - y_axis.min)) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // Grid and ticks.
    for t in &x_axis.ticks {
        let x = x_of(*t);
        svg.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n",
            MARGIN_TOP,
            MARGIN_TOP + plot_h
        ));
        svg.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"middle\" fill=\"#333\">{}</text>\n",
            MARGIN_TOP + plot_h + 18.0,
            format_tick(*t)
        ));
    }
    for t in &y_axis.ticks {
        let y = y_of(*t);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n",
            MARGIN_LEFT,
            MARGIN_LEFT + plot_w
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"end\" fill=\"#333\">{}</text>\n",
            MARGIN_LEFT - 8.0,
            y + 4.0,
            format_tick(*t)
        ));
    }

    // Frame and axis titles.
    svg.push_str(&format!(
        "<rect x=\"{MARGIN_LEFT}\" y=\"{MARGIN_TOP}\" width=\"{plot_w}\" height=\"{plot_h}\" \
         fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\" fill=\"#000\">Complexity objective f2</text>\n",
        MARGIN_LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    ));
    svg.push_str(&format!(
        "<text x=\"20\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\" fill=\"#000\" transform=\"rotate(-90 20 {:.2})\">Fit objective f1</text>\n",
        MARGIN_TOP + plot_h / 2.0,
        MARGIN_TOP + plot_h / 2.0
    ));

    // Frontier polyline beneath the markers.
    if frontier.len() >= 2 {
        let coords: Vec<String> = frontier
            .iter()
            .map(|p| format!("{:.2},{:.2}", x_of(p.f2), y_of(p.f1)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"1.5\"/>\n",
            coords.join(" ")
        ));
    }

    // Point markers; frontier membership decides the glyph.
    let frontier_ids: Vec<&str> = frontier.iter().map(|p| p.model_id.as_str()).collect();
    for p in points {
        let x = x_of(p.f2);
        let y = y_of(p.f1);
        if frontier_ids.contains(&p.model_id.as_str()) {
            svg.push_str(&format!(
                "<circle class=\"frontier\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4.5\" \
                 fill=\"#1f6fb2\" stroke=\"none\"><title>{}</title></circle>\n",
                escape(&p.model_id)
            ));
        } else {
            svg.push_str(&format!(
                "<circle class=\"dominated\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" \
                 fill=\"none\" stroke=\"#777\" stroke-width=\"1.2\"><title>{}</title></circle>\n",
                escape(&p.model_id)
            ));
        }
    }

    // Highlight ring for a criterion's top model.
    if let Some((id, criterion)) = highlight {
        if let Some(p) = points.iter().find(|p| p.model_id == id) {
            let x = x_of(p.f2);
            let y = y_of(p.f1);
            svg.push_str(&format!(
                "<circle class=\"highlight\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"8.5\" \
                 fill=\"none\" stroke=\"#c23b22\" stroke-width=\"2\"><title>{} top model: {}</title></circle>\n",
                escape(criterion),
                escape(&p.model_id)
            ));
        }
    }

    // Legend, top right inside the frame.
    let legend_x = MARGIN_LEFT + plot_w - 190.0;
    let mut legend_y = MARGIN_TOP + 18.0;
    svg.push_str(&format!(
        "<circle cx=\"{legend_x:.2}\" cy=\"{legend_y:.2}\" r=\"4.5\" fill=\"#1f6fb2\"/>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#000\">Pareto frontier</text>\n",
        legend_x + 12.0,
        legend_y + 4.0
    ));
    legend_y += 20.0;
    svg.push_str(&format!(
        "<circle cx=\"{legend_x:.2}\" cy=\"{legend_y:.2}\" r=\"4\" fill=\"none\" stroke=\"#777\" stroke-width=\"1.2\"/>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#000\">Dominated</text>\n",
        legend_x + 12.0,
        legend_y + 4.0
    ));
    if let Some((_, criterion)) = highlight {
        legend_y += 20.0;
        svg.push_str(&format!(
            "<circle cx=\"{legend_x:.2}\" cy=\"{legend_y:.2}\" r=\"6\" fill=\"none\" stroke=\"#c23b22\" stroke-width=\"2\"/>\n\
             <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#000\">{} top model</text>\n",
            legend_x + 12.0,
            legend_y + 4.0,
            escape(criterion)
        ));
    }

    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
