//! Minimal SVG line plots: axes, polylines, and a text legend. CSV files
//! are the authoritative output; these exist for quick visual checks.

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 64.0;

pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
}

fn bounds(series: &[Series<'_>]) -> (f64, f64, f64, f64) {
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for s in series {
        for &(x, y) in s.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !x_min.is_finite() {
        return (0.0, 1.0, 0.0, 1.0);
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
        y_min -= 1.0;
    } else {
        let pad = 0.05 * (y_max - y_min);
        y_min -= pad;
        y_max += pad;
    }
    (x_min, x_max, y_min, y_max)
}

/// Renders a line plot of the given series.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, series: &[Series<'_>]) -> String {
    let (x_min, x_max, y_min, y_max) = bounds(series);
    let to_px = |x: f64, y: f64| {
        let px = MARGIN + (x - x_min) / (x_max - x_min) * (WIDTH - 2.0 * MARGIN);
        let py = HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * (HEIGHT - 2.0 * MARGIN);
        (px, py)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
        WIDTH / 2.0,
        title
    ));

    // Axes.
    let (x0, y0) = (MARGIN, HEIGHT - MARGIN);
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{}\" y2=\"{y0}\" stroke=\"black\"/>\n",
        WIDTH - MARGIN
    ));
    svg.push_str(&format!(
        "<line x1=\"{x0}\" y1=\"{y0}\" x2=\"{x0}\" y2=\"{MARGIN}\" stroke=\"black\"/>\n"
    ));
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        let x = x_min + frac * (x_max - x_min);
        let y = y_min + frac * (y_max - y_min);
        let (px, _) = to_px(x, y_min);
        let (_, py) = to_px(x_min, y);
        svg.push_str(&format!(
            "<text x=\"{px}\" y=\"{}\" text-anchor=\"middle\" font-size=\"11\">{:.3}</text>\n",
            y0 + 18.0,
            x
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{:.3}</text>\n",
            x0 - 6.0,
            py + 4.0,
            y
        ));
        svg.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{y0}\" x2=\"{px}\" y2=\"{}\" stroke=\"#dddddd\"/>\n",
            MARGIN
        ));
        svg.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{py}\" x2=\"{}\" y2=\"{py}\" stroke=\"#dddddd\"/>\n",
            WIDTH - MARGIN
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 16.0,
        x_label
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\" \
         transform=\"rotate(-90 18 {})\">{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        y_label
    ));

    for (i, s) in series.iter().enumerate() {
        if s.points.len() > 1 {
            let path: Vec<String> = s
                .points
                .iter()
                .map(|&(x, y)| {
                    let (px, py) = to_px(x, y);
                    format!("{px:.2},{py:.2}")
                })
                .collect();
            svg.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                s.color,
                path.join(" ")
            ));
        } else if let Some(&(x, y)) = s.points.first() {
            let (px, py) = to_px(x, y);
            svg.push_str(&format!(
                "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\" fill=\"{}\"/>\n",
                s.color
            ));
        }
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n",
            WIDTH - MARGIN - 150.0,
            MARGIN + 16.0 * i as f64,
            s.color,
            s.label
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_polylines_and_legend() {
        let a = [(0.0, 0.0), (1.0, 1.0)];
        let b = [(0.0, 1.0), (1.0, 0.5)];
        let svg = line_plot(
            "title",
            "x",
            "y",
            &[
                Series { label: "first", color: "#1f77b4", points: &a },
                Series { label: "second", color: "#d62728", points: &b },
            ],
        );
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("first") && svg.contains("second"));
    }

    #[test]
    fn degenerate_inputs_do_not_panic() {
        let single = [(2.0, 3.0)];
        let svg = line_plot("t", "x", "y", &[Series { label: "p", color: "red", points: &single }]);
        assert!(svg.contains("<circle"));
        let empty: [(f64, f64); 0] = [];
        line_plot("t", "x", "y", &[Series { label: "e", color: "red", points: &empty }]);
    }
}
