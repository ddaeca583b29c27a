//! Figure-style SVG rendering for planar scenes and CSV polyline export.
//!
//! Output is deterministic byte for byte: fixed-precision coordinates,
//! fixed element order.

use std::fmt::Write;

use transversal::hypersurface::ComponentKind;
use transversal::transversality::CrossingEvent;
use transversal::{ImplicitHypersurface, PiecewisePath};

/// Number of polyline samples used for rendered routes.
pub const ROUTE_SAMPLES: usize = 129;

struct Frame {
    min_x: f64,
    max_x: f64,
    min_y: f64,
    max_y: f64,
}

impl Frame {
    fn include(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.max_x = self.max_x.max(x);
        self.min_y = self.min_y.min(y);
        self.max_y = self.max_y.max(y);
    }

    fn pad(&mut self) {
        let pad_x = (0.1 * (self.max_x - self.min_x)).max(0.5);
        let pad_y = (0.1 * (self.max_y - self.min_y)).max(0.5);
        self.min_x -= pad_x;
        self.max_x += pad_x;
        self.min_y -= pad_y;
        self.max_y += pad_y;
    }

    fn diagonal(&self) -> f64 {
        ((self.max_x - self.min_x).powi(2) + (self.max_y - self.min_y).powi(2)).sqrt()
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// World coordinates carry y upward, SVG y grows downward.
fn svg_y(y: f64) -> f64 {
    -y
}

/// Renders the surface, the route polyline, and crossing markers
/// (transversal crossings hollow, violations filled) for a planar scene.
pub fn render_svg(
    surface: &ImplicitHypersurface,
    path: &PiecewisePath,
    events: &[CrossingEvent],
) -> String {
    assert_eq!(path.dimension(), 2, "SVG rendering is planar only");

    let samples = path.sample(ROUTE_SAMPLES);
    let mut frame = Frame {
        min_x: f64::INFINITY,
        max_x: f64::NEG_INFINITY,
        min_y: f64::INFINITY,
        max_y: f64::NEG_INFINITY,
    };
    for (_, p) in &samples {
        frame.include(p[0], p[1]);
    }
    for component in surface.components() {
        if let ComponentKind::Sphere { center, radius } = &component.kind {
            frame.include(center[0] - radius, center[1] - radius);
            frame.include(center[0] + radius, center[1] + radius);
        }
    }
    frame.include(0.0, 0.0);
    frame.pad();

    let hair = frame.diagonal() * 0.002;
    let stroke = frame.diagonal() * 0.004;
    let marker = frame.diagonal() * 0.008;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">",
        fmt(frame.min_x),
        fmt(svg_y(frame.max_y)),
        fmt(frame.max_x - frame.min_x),
        fmt(frame.max_y - frame.min_y),
    );

    // Axes.
    let _ = writeln!(
        svg,
        "  <g stroke=\"#bbbbbb\" stroke-width=\"{}\">\n    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>\n  </g>",
        fmt(hair),
        fmt(frame.min_x),
        fmt(svg_y(0.0)),
        fmt(frame.max_x),
        fmt(svg_y(0.0)),
        fmt(0.0),
        fmt(svg_y(frame.max_y)),
        fmt(0.0),
        fmt(svg_y(frame.min_y)),
    );

    // Surface components.
    let _ = writeln!(
        svg,
        "  <g fill=\"none\" stroke=\"#222222\" stroke-width=\"{}\">",
        fmt(stroke)
    );
    for component in surface.components() {
        match &component.kind {
            ComponentKind::Sphere { center, radius } => {
                let _ = writeln!(
                    svg,
                    "    <circle cx=\"{}\" cy=\"{}\" r=\"{}\"/>",
                    fmt(center[0]),
                    fmt(svg_y(center[1])),
                    fmt(*radius)
                );
            }
            ComponentKind::Hyperplane { normal, offset } => {
                // Base point offset*n/|n|^2, extended along the perpendicular.
                let n2 = normal[0] * normal[0] + normal[1] * normal[1];
                let (bx, by) = (normal[0] * offset / n2, normal[1] * offset / n2);
                let (dx, dy) = (-normal[1], normal[0]);
                let scale = frame.diagonal() / (dx * dx + dy * dy).sqrt();
                let _ = writeln!(
                    svg,
                    "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                    fmt(bx - dx * scale),
                    fmt(svg_y(by - dy * scale)),
                    fmt(bx + dx * scale),
                    fmt(svg_y(by + dy * scale)),
                );
            }
            ComponentKind::Parabola => {
                let pts: Vec<String> = (0..=128)
                    .map(|i| {
                        let x = frame.min_x + (frame.max_x - frame.min_x) * i as f64 / 128.0;
                        format!("{},{}", fmt(x), fmt(svg_y(x * x)))
                    })
                    .collect();
                let _ = writeln!(svg, "    <polyline points=\"{}\"/>", pts.join(" "));
            }
            ComponentKind::DiagonalLine => {
                let lo = frame.min_x.min(frame.min_y);
                let hi = frame.max_x.max(frame.max_y);
                let _ = writeln!(
                    svg,
                    "    <line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/>",
                    fmt(lo),
                    fmt(svg_y(lo)),
                    fmt(hi),
                    fmt(svg_y(hi)),
                );
            }
        }
    }
    let _ = writeln!(svg, "  </g>");

    // Route polyline.
    let pts: Vec<String> = samples
        .iter()
        .map(|(_, p)| format!("{},{}", fmt(p[0]), fmt(svg_y(p[1]))))
        .collect();
    let _ = writeln!(
        svg,
        "  <polyline fill=\"none\" stroke=\"#1f6fd0\" stroke-width=\"{}\" points=\"{}\"/>",
        fmt(stroke),
        pts.join(" ")
    );

    // Crossing markers.
    for event in events {
        let (fill, stroke_color) = if event.is_transversal() {
            ("none", "#1a8f3c")
        } else {
            ("#d03030", "#d03030")
        };
        let _ = writeln!(
            svg,
            "  <circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\"/>",
            fmt(event.point[0]),
            fmt(svg_y(event.point[1])),
            fmt(marker),
            fill,
            stroke_color,
            fmt(hair),
        );
    }

    svg.push_str("</svg>\n");
    svg
}

/// CSV rows `t,x1,...,xn` over evenly spaced samples.
pub fn polyline_csv(path: &PiecewisePath, samples: usize) -> String {
    let mut out = String::from("t");
    for axis in 1..=path.dimension() {
        let _ = write!(out, ",x{axis}");
    }
    out.push('\n');
    for (t, p) in path.sample(samples) {
        let _ = write!(out, "{t}");
        for axis in 0..path.dimension() {
            let _ = write!(out, ",{}", p[axis]);
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use transversal::planners::{two_circles_planner, Query};
    use transversal::transversality::{certify_semi_transversal, DetectionConfig};
    use transversal::Point;

    fn fixture() -> (ImplicitHypersurface, PiecewisePath, Vec<CrossingEvent>) {
        let planner = two_circles_planner();
        let surface = transversal::hypersurface::two_unit_circles();
        let q = Query::new(
            Point::new(vec![-2.5, 2.0]).unwrap(),
            Point::new(vec![1.5, -2.0]).unwrap(),
        )
        .unwrap();
        let path = planner.plan(&q).unwrap();
        let verdict =
            certify_semi_transversal(&path, &surface, &DetectionConfig::default()).unwrap();
        (surface, path, verdict.events)
    }

    #[test]
    fn svg_is_deterministic_and_well_formed() {
        let (surface, path, events) = fixture();
        let a = render_svg(&surface, &path, &events);
        let b = render_svg(&surface, &path, &events);
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<circle").count(), 2 + events.len());
        assert_eq!(a.matches("<polyline").count(), 1);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let (_, path, _) = fixture();
        let csv = polyline_csv(&path, 17);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x1,x2"));
        assert_eq!(lines.count(), 17);
        assert!(csv.lines().nth(1).unwrap().starts_with("0,"));
    }
}
