//! Two-feature scatter plots with the decision line, as standalone SVG.

use std::fmt::Write as _;

use thiserror::Error;

use crate::dataset::{BinaryDataset, ClassIndex};
use crate::linear::LinearDiscriminant;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const PAD: f64 = 48.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlotError {
    #[error("plots need exactly 2 features, the data has {0}; select two with --features")]
    NotTwoDimensional(usize),
    #[error("model has {model} features but the data has {data}")]
    Dimension { model: usize, data: usize },
    #[error("nothing to plot: the data set is empty")]
    Empty,
}

/// Axis-aligned box `[x_min, x_max] x [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Bounds {
    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a [f64]>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut b = Bounds {
            x_min: first[0],
            x_max: first[0],
            y_min: first[1],
            y_max: first[1],
        };
        for p in it {
            b.x_min = b.x_min.min(p[0]);
            b.x_max = b.x_max.max(p[0]);
            b.y_min = b.y_min.min(p[1]);
            b.y_max = b.y_max.max(p[1]);
        }
        Some(b)
    }
}

/// Part of `w0 + w1 x + w2 y = 0` inside `bounds`, or `None` when the line
/// misses the box (or `w1 = w2 = 0`).
pub fn clip_line(v: &[f64], bounds: &Bounds) -> Option<[(f64, f64); 2]> {
    let (w0, w1, w2) = (v[0], v[1], v[2]);
    let nn = w1 * w1 + w2 * w2;
    if nn == 0.0 {
        return None;
    }
    // Foot of the perpendicular from the origin, then walk along (-w2, w1).
    let (px, py) = (-w0 * w1 / nn, -w0 * w2 / nn);
    let (dx, dy) = (-w2, w1);
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for (p, d, min, max) in [
        (px, dx, bounds.x_min, bounds.x_max),
        (py, dy, bounds.y_min, bounds.y_max),
    ] {
        if d == 0.0 {
            if p < min || p > max {
                return None;
            }
            continue;
        }
        let (a, b) = ((min - p) / d, (max - p) / d);
        lo = lo.max(a.min(b));
        hi = hi.min(a.max(b));
    }
    if lo > hi {
        return None;
    }
    let at = |t: f64| {
        let x = if dx == 0.0 { px } else { px + t * dx };
        let y = if dy == 0.0 { py } else { py + t * dy };
        (
            x.clamp(bounds.x_min, bounds.x_max),
            y.clamp(bounds.y_min, bounds.y_max),
        )
    };
    Some([at(lo), at(hi)])
}

#[derive(Debug, Clone, PartialEq)]
pub struct Plot {
    pub svg: String,
    /// `kind,x,y,label` rows: the two line endpoints, then every point.
    pub csv: String,
    pub segment: Option<[(f64, f64); 2]>,
    pub warning: Option<String>,
}

pub fn render<M: LinearDiscriminant + ?Sized>(
    model: &M,
    ds: &BinaryDataset,
    title: &str,
) -> Result<Plot, PlotError> {
    if ds.dim() != 2 {
        return Err(PlotError::NotTwoDimensional(ds.dim()));
    }
    if model.dim() != 2 {
        return Err(PlotError::Dimension {
            model: model.dim(),
            data: ds.dim(),
        });
    }
    let bounds =
        Bounds::of_points(ds.samples().iter().map(|x| x.as_slice())).ok_or(PlotError::Empty)?;
    let segment = clip_line(model.augmented(), &bounds);
    let warning = segment
        .is_none()
        .then(|| "decision line lies outside the data bounding box; only points drawn".to_string());

    // Viewport: the data box, widened a little so edge markers are visible.
    let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
    let (sx, sy) = (span(bounds.x_min, bounds.x_max), span(bounds.y_min, bounds.y_max));
    let (vx0, vy0) = (bounds.x_min - 0.05 * sx, bounds.y_min - 0.05 * sy);
    let (vsx, vsy) = (1.1 * sx, 1.1 * sy);
    let px = |x: f64| PAD + (x - vx0) / vsx * (WIDTH - 2.0 * PAD);
    let py = |y: f64| HEIGHT - PAD - (y - vy0) / vsy * (HEIGHT - 2.0 * PAD);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#bbbbbb"/>"##,
        px(bounds.x_min),
        py(bounds.y_max),
        px(bounds.x_max) - px(bounds.x_min),
        py(bounds.y_min) - py(bounds.y_max)
    );
    let names = ds.feature_names();
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 12.0,
        escape(&names[0])
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 14 {})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(&names[1])
    );
    for (x, &class) in ds.samples().iter().zip(ds.classes()) {
        let (fill, css) = match class {
            ClassIndex::One => ("#1f77b4", "class-1"),
            ClassIndex::Two => ("#d62728", "class-2"),
        };
        let _ = writeln!(
            svg,
            r#"<circle class="{css}" cx="{:.2}" cy="{:.2}" r="3.5" fill="{fill}" fill-opacity="0.7"/>"#,
            px(x[0]),
            py(x[1])
        );
    }
    match segment {
        Some([(x1, y1), (x2, y2)]) => {
            let _ = writeln!(
                svg,
                r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black" stroke-width="1.5"/>"#,
                px(x1),
                py(y1),
                px(x2),
                py(y2)
            );
        }
        None => {
            let _ = writeln!(svg, "<!-- decision line outside the data bounding box -->");
        }
    }
    svg.push_str("</svg>\n");

    Ok(Plot {
        svg,
        csv: companion_csv(ds, segment),
        segment,
        warning,
    })
}

fn companion_csv(ds: &BinaryDataset, segment: Option<[(f64, f64); 2]>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ok = "writing to memory";
    w.write_record(["kind", "x", "y", "label"]).expect(ok);
    for (x, y) in segment.into_iter().flatten() {
        w.write_record(["line", &format!("{x:?}"), &format!("{y:?}"), ""]).expect(ok);
    }
    for (x, &class) in ds.samples().iter().zip(ds.classes()) {
        w.write_record([
            "point",
            &format!("{:?}", x[0]),
            &format!("{:?}", x[1]),
            ds.class_label(class),
        ])
        .expect(ok);
    }
    String::from_utf8(w.into_inner().expect(ok)).expect("csv output is UTF-8")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}
