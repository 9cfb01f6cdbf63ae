//! Static SVG heatmaps of bifrequency fields.
//!
//! All layers share one diverging blue-white-red map on `[-limit, limit]`.
//! For the real and imaginary layers `limit` is `max |B|` over the whole field,
//! so the two pictures are directly comparable; the ratio layer
//! `|Im B| / |B|` lives in `[0, 1]` and uses `limit = 1`.

use std::fmt::Write;

use bispec_core::BifrequencyField;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Real,
    Imaginary,
    ImaginaryFraction,
}

impl Layer {
    pub const ALL: [Layer; 3] = [Layer::Real, Layer::Imaginary, Layer::ImaginaryFraction];

    pub fn file_stem(self) -> &'static str {
        match self {
            Layer::Real => "re",
            Layer::Imaginary => "im",
            Layer::ImaginaryFraction => "im_fraction",
        }
    }

    fn title(self) -> &'static str {
        match self {
            Layer::Real => "Re B(w1, w2)",
            Layer::Imaginary => "Im B(w1, w2)",
            Layer::ImaginaryFraction => "|Im B| / |B|",
        }
    }
}

const CELL_AREA: f64 = 512.0;
const MARGIN: f64 = 48.0;
const BAR_WIDTH: f64 = 16.0;

/// `rgb(...)` for `t` in `[-1, 1]`; values outside are clamped.
pub fn diverging_color(t: f64) -> String {
    let t = if t.is_nan() { 0.0 } else { t.clamp(-1.0, 1.0) };
    // blue (-1) -> white (0) -> red (+1)
    let (from, to, s) = if t < 0.0 {
        ([255.0, 255.0, 255.0], [33.0, 102.0, 172.0], -t)
    } else {
        ([255.0, 255.0, 255.0], [178.0, 24.0, 43.0], t)
    };
    let c: Vec<u8> = (0..3)
        .map(|i| (from[i] + (to[i] - from[i]) * s).round() as u8)
        .collect();
    format!("rgb({},{},{})", c[0], c[1], c[2])
}

fn layer_value(field: &BifrequencyField, layer: Layer, j: usize, k: usize) -> f64 {
    let z = field.at(j, k);
    match layer {
        Layer::Real => z.re,
        Layer::Imaginary => z.im,
        Layer::ImaginaryFraction => {
            let n = z.norm();
            if n > 0.0 {
                z.im.abs() / n
            } else {
                0.0
            }
        }
    }
}

/// Renders one layer; `omega1` runs left to right, `omega2` bottom to top.
pub fn heatmap(field: &BifrequencyField, layer: Layer) -> String {
    let g = field.grid();
    let limit = match layer {
        Layer::ImaginaryFraction => 1.0,
        _ => field.max_abs(),
    };
    let cell = CELL_AREA / g as f64;
    let width = 2.0 * MARGIN + CELL_AREA + 3.0 * BAR_WIDTH + 60.0;
    let height = 2.0 * MARGIN + CELL_AREA;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" shape-rendering=\"crispEdges\">"
    );
    let _ = writeln!(s, "<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\" \
         text-anchor=\"middle\">{} (G = {g})</text>",
        MARGIN + CELL_AREA / 2.0,
        MARGIN / 2.0 + 5.0,
        layer.title()
    );
    for j in 0..g {
        for k in 0..g {
            let v = layer_value(field, layer, j, k);
            let t = if limit > 0.0 { v / limit } else { 0.0 };
            let x = MARGIN + j as f64 * cell;
            let y = MARGIN + (g - 1 - k) as f64 * cell;
            let _ = writeln!(
                s,
                "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"{}\"/>",
                diverging_color(t)
            );
        }
    }
    let _ = writeln!(
        s,
        "<rect x=\"{MARGIN}\" y=\"{MARGIN}\" width=\"{CELL_AREA}\" height=\"{CELL_AREA}\" \
         fill=\"none\" stroke=\"black\"/>"
    );
    let axis = |s: &mut String, x: f64, y: f64, anchor: &str, label: &str| {
        let _ = writeln!(
            s,
            "<text x=\"{x}\" y=\"{y}\" font-family=\"sans-serif\" font-size=\"12\" \
             text-anchor=\"{anchor}\">{label}</text>"
        );
    };
    let bottom = MARGIN + CELL_AREA;
    axis(&mut s, MARGIN, bottom + 16.0, "middle", "0");
    axis(&mut s, MARGIN + CELL_AREA / 2.0, bottom + 16.0, "middle", "π");
    axis(&mut s, MARGIN + CELL_AREA, bottom + 16.0, "middle", "2π");
    axis(&mut s, MARGIN + CELL_AREA / 2.0, bottom + 34.0, "middle", "w1");
    axis(&mut s, MARGIN - 6.0, bottom + 4.0, "end", "0");
    axis(&mut s, MARGIN - 6.0, MARGIN + CELL_AREA / 2.0 + 4.0, "end", "π");
    axis(&mut s, MARGIN - 6.0, MARGIN + 4.0, "end", "2π");
    axis(&mut s, MARGIN - 28.0, MARGIN + CELL_AREA / 2.0 + 20.0, "end", "w2");

    let bar_x = MARGIN + CELL_AREA + BAR_WIDTH;
    let steps = 64;
    let step_h = CELL_AREA / steps as f64;
    for i in 0..steps {
        let t = 1.0 - 2.0 * (i as f64 + 0.5) / steps as f64;
        let _ = writeln!(
            s,
            "<rect x=\"{bar_x}\" y=\"{}\" width=\"{BAR_WIDTH}\" height=\"{step_h}\" fill=\"{}\"/>",
            MARGIN + i as f64 * step_h,
            diverging_color(t)
        );
    }
    let label_x = bar_x + BAR_WIDTH + 4.0;
    axis(&mut s, label_x, MARGIN + 4.0, "start", &format!("{limit:.3e}"));
    axis(&mut s, label_x, MARGIN + CELL_AREA / 2.0 + 4.0, "start", "0");
    axis(&mut s, label_x, bottom + 4.0, "start", &format!("{:.3e}", -limit));
    s.push_str("</svg>\n");
    s
}
