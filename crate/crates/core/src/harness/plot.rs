//! Minimal SVG output: learning curves with quartile bands and the
//! initial-vs-final density scatter. Hand-rolled so identical inputs always
//! produce identical bytes.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 160.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 50.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// One curve: per-epoch mean with its quartile band.
#[derive(Debug, Clone)]
pub struct CurveSeries {
    pub label: String,
    /// (epoch, mean, q25, q75), ascending in epoch.
    pub points: Vec<(f64, f64, f64, f64)>,
}

struct Scale {
    min: f64,
    max: f64,
    lo_px: f64,
    hi_px: f64,
}

impl Scale {
    fn map(&self, v: f64) -> f64 {
        let span = (self.max - self.min).max(1e-12);
        self.lo_px + (v - self.min) / span * (self.hi_px - self.lo_px)
    }

    fn ticks(&self, n: usize) -> Vec<f64> {
        (0..=n)
            .map(|i| self.min + (self.max - self.min) * i as f64 / n as f64)
            .collect()
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.2}")
}

fn tick_label(v: f64) -> String {
    if v.abs() >= 1000.0 {
        format!("{v:.0}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn svg_header(out: &mut String, title: &str) {
    let _ = write!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n\
         <text x=\"{x}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{title}</text>\n",
        x = (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
    );
}

fn axes(out: &mut String, xs: &Scale, ys: &Scale, x_label: &str, y_label: &str) {
    let bottom = HEIGHT - MARGIN_BOTTOM;
    let _ = write!(
        out,
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = fmt(MARGIN_LEFT),
        r = fmt(WIDTH - MARGIN_RIGHT),
        t = fmt(MARGIN_TOP),
        b = fmt(bottom),
    );
    for tick in xs.ticks(5) {
        let x = fmt(xs.map(tick));
        let _ = write!(
            out,
            "<line x1=\"{x}\" y1=\"{b}\" x2=\"{x}\" y2=\"{b2}\" stroke=\"black\"/>\n\
             <text x=\"{x}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">{label}</text>\n",
            b = fmt(bottom),
            b2 = fmt(bottom + 5.0),
            ty = fmt(bottom + 18.0),
            label = tick_label(tick),
        );
    }
    for tick in ys.ticks(5) {
        let y = fmt(ys.map(tick));
        let _ = write!(
            out,
            "<line x1=\"{l2}\" y1=\"{y}\" x2=\"{l}\" y2=\"{y}\" stroke=\"black\"/>\n\
             <text x=\"{tx}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{label}</text>\n",
            l = fmt(MARGIN_LEFT),
            l2 = fmt(MARGIN_LEFT - 5.0),
            tx = fmt(MARGIN_LEFT - 8.0),
            ty = fmt(ys.map(tick) + 4.0),
            label = tick_label(tick),
        );
    }
    let _ = write!(
        out,
        "<text x=\"{cx}\" y=\"{cy}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{x_label}</text>\n\
         <text x=\"16\" y=\"{my}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" \
         transform=\"rotate(-90 16 {my})\">{y_label}</text>\n",
        cx = fmt((MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0),
        cy = fmt(HEIGHT - 12.0),
        my = fmt((MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2.0),
    );
}

fn legend(out: &mut String, labels: &[&str]) {
    let x = WIDTH - MARGIN_RIGHT + 12.0;
    for (i, label) in labels.iter().enumerate() {
        let y = MARGIN_TOP + 14.0 + i as f64 * 18.0;
        let color = PALETTE[i % PALETTE.len()];
        let _ = write!(
            out,
            "<rect x=\"{x}\" y=\"{ry}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n\
             <text x=\"{tx}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"11\">{label}</text>\n",
            x = fmt(x),
            ry = fmt(y - 10.0),
            tx = fmt(x + 16.0),
            ty = fmt(y),
        );
    }
}

/// Learning-curve plot: one mean line and translucent quartile band per
/// series.
pub fn learning_curve_svg(metric: &str, series: &[CurveSeries]) -> String {
    let mut xs = (f64::INFINITY, f64::NEG_INFINITY);
    let mut ys = (f64::INFINITY, f64::NEG_INFINITY);
    for s in series {
        for &(e, m, lo, hi) in &s.points {
            xs = (xs.0.min(e), xs.1.max(e));
            ys = (ys.0.min(lo.min(m)), ys.1.max(hi.max(m)));
        }
    }
    if !xs.0.is_finite() {
        xs = (0.0, 1.0);
        ys = (0.0, 1.0);
    }
    let pad = ((ys.1 - ys.0) * 0.05).max(1e-9);
    let x_scale = Scale {
        min: xs.0,
        max: (xs.1 - xs.0 < 1e-12).then(|| xs.0 + 1.0).unwrap_or(xs.1),
        lo_px: MARGIN_LEFT,
        hi_px: WIDTH - MARGIN_RIGHT,
    };
    let y_scale = Scale {
        min: ys.0 - pad,
        max: ys.1 + pad,
        lo_px: HEIGHT - MARGIN_BOTTOM,
        hi_px: MARGIN_TOP,
    };

    let mut out = String::new();
    svg_header(&mut out, &format!("{metric} over training epochs"));
    axes(&mut out, &x_scale, &y_scale, "epoch", metric);

    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        if s.points.len() > 1 {
            let mut band = String::new();
            for &(e, _, _, hi) in &s.points {
                let _ = write!(band, "{},{} ", fmt(x_scale.map(e)), fmt(y_scale.map(hi)));
            }
            for &(e, _, lo, _) in s.points.iter().rev() {
                let _ = write!(band, "{},{} ", fmt(x_scale.map(e)), fmt(y_scale.map(lo)));
            }
            let _ = write!(
                out,
                "<polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.18\" stroke=\"none\"/>\n",
                band.trim_end()
            );
        }
        let mut line = String::new();
        for &(e, m, _, _) in &s.points {
            let _ = write!(line, "{},{} ", fmt(x_scale.map(e)), fmt(y_scale.map(m)));
        }
        let _ = write!(
            out,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.8\"/>\n",
            line.trim_end()
        );
    }
    let labels: Vec<&str> = series.iter().map(|s| s.label.as_str()).collect();
    legend(&mut out, &labels);
    out.push_str("</svg>\n");
    out
}

/// Initial-vs-final density scatter with the identity reference line.
/// `points` are (label, initial density, final density) per run.
pub fn density_scatter_svg(points: &[(String, f64, f64)]) -> String {
    let x_scale = Scale {
        min: 0.0,
        max: 1.0,
        lo_px: MARGIN_LEFT,
        hi_px: WIDTH - MARGIN_RIGHT,
    };
    let y_scale = Scale {
        min: 0.0,
        max: 1.0,
        lo_px: HEIGHT - MARGIN_BOTTOM,
        hi_px: MARGIN_TOP,
    };
    let mut out = String::new();
    svg_header(&mut out, "Initial vs final fraction of active connections");
    axes(
        &mut out,
        &x_scale,
        &y_scale,
        "initial density",
        "final density",
    );
    let _ = write!(
        out,
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#aaaaaa\" stroke-dasharray=\"4 3\"/>\n",
        fmt(x_scale.map(0.0)),
        fmt(y_scale.map(0.0)),
        fmt(x_scale.map(1.0)),
        fmt(y_scale.map(1.0)),
    );

    let mut labels: Vec<&str> = Vec::new();
    for (label, _, _) in points {
        if !labels.contains(&label.as_str()) {
            labels.push(label);
        }
    }
    for (label, initial, final_density) in points {
        let idx = labels.iter().position(|l| l == label).unwrap();
        let color = PALETTE[idx % PALETTE.len()];
        let _ = write!(
            out,
            "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{color}\" fill-opacity=\"0.75\"/>\n",
            fmt(x_scale.map(*initial)),
            fmt(y_scale.map(*final_density)),
        );
    }
    legend(&mut out, &labels);
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_series() -> Vec<CurveSeries> {
        vec![
            CurveSeries {
                label: "dense".into(),
                points: vec![(0.0, 5.0, 4.5, 5.5), (10.0, 3.0, 2.5, 3.5)],
            },
            CurveSeries {
                label: "learned".into(),
                points: vec![(0.0, 5.0, 4.8, 5.2), (10.0, 2.0, 1.8, 2.2)],
            },
        ]
    }

    #[test]
    fn identical_inputs_produce_identical_bytes() {
        let a = learning_curve_svg("nll", &demo_series());
        let b = learning_curve_svg("nll", &demo_series());
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
    }

    #[test]
    fn curves_and_legend_appear() {
        let svg = learning_curve_svg("nll", &demo_series());
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<polygon").count(), 2);
        assert!(svg.contains(">dense<"));
        assert!(svg.contains(">learned<"));
    }

    #[test]
    fn empty_series_still_renders_axes() {
        let svg = learning_curve_svg("nll", &[]);
        assert!(svg.contains("<line"));
    }

    #[test]
    fn scatter_renders_points_and_reference() {
        let pts = vec![
            ("p=0.1".to_string(), 0.1, 0.25),
            ("p=0.9".to_string(), 0.9, 0.6),
        ];
        let svg = density_scatter_svg(&pts);
        assert_eq!(svg.matches("<circle").count(), 2);
        assert!(svg.contains("stroke-dasharray"));
    }
}
