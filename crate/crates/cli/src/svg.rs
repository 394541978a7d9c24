//! Deterministic SVG charts. No timestamps, no random jitter, fixed number
//! formatting, so identical data gives identical bytes.

use std::fmt::Write as _;

pub const PALETTE: [&str; 6] = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860"];
const TERCILE_COLOURS: [&str; 3] = ["#3b75af", "#bcbcbc", "#d1352b"];
const FONT: &str = "font-family=\"sans-serif\"";

pub fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn n(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Svg { width, height, body: String::new() }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str) {
        let _ = writeln!(self.body, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{fill}\"/>", n(x), n(y), n(w.max(0.0)), n(h.max(0.0)));
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) {
        let _ = writeln!(self.body, "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{stroke}\" stroke-width=\"1\"/>", n(x1), n(y1), n(x2), n(y2));
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str) {
        let _ = writeln!(self.body, "<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{fill}\" fill-opacity=\"0.8\"/>", n(cx), n(cy), n(r));
    }

    /// `anchor` is `start`, `middle` or `end`.
    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(self.body, "<text x=\"{}\" y=\"{}\" font-size=\"{}\" text-anchor=\"{anchor}\" {FONT}>{}</text>", n(x), n(y), n(size), escape(s));
    }

    pub fn rotated_text(&mut self, x: f64, y: f64, size: f64, s: &str) {
        let _ = writeln!(
            self.body,
            "<text x=\"{0}\" y=\"{1}\" font-size=\"{2}\" text-anchor=\"end\" transform=\"rotate(-45 {0} {1})\" {FONT}>{3}</text>",
            n(x),
            n(y),
            n(size),
            escape(s)
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{2}</svg>\n",
            n(self.width),
            n(self.height),
            self.body
        )
    }
}

/// Linear map from a data range onto a pixel range.
#[derive(Debug, Clone, Copy)]
struct Scale {
    d0: f64,
    d1: f64,
    p0: f64,
    p1: f64,
}

impl Scale {
    fn new(d0: f64, d1: f64, p0: f64, p1: f64) -> Self {
        let (d0, d1) = if (d1 - d0).abs() < 1e-12 { (d0 - 0.5, d1 + 0.5) } else { (d0, d1) };
        Scale { d0, d1, p0, p1 }
    }

    fn at(&self, v: f64) -> f64 {
        self.p0 + (v - self.d0) / (self.d1 - self.d0) * (self.p1 - self.p0)
    }
}

fn nice_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let span = (hi - lo).abs().max(1e-12);
    let raw = span / count.max(1) as f64;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 2.5, 5.0, 10.0].iter().map(|m| m * mag).find(|s| span / s <= count as f64).unwrap_or(10.0 * mag);
    let start = (lo / step).ceil() as i64;
    let end = (hi / step).floor() as i64;
    (start..=end).map(|k| k as f64 * step).collect()
}

fn y_axis(svg: &mut Svg, scale: &Scale, x: f64, x_end: f64, lo: f64, hi: f64) {
    svg.line(x, scale.p0, x, scale.p1, "#333");
    for t in nice_ticks(lo, hi, 5) {
        let y = scale.at(t);
        svg.line(x - 4.0, y, x, y, "#333");
        svg.line(x, y, x_end, y, "#eee");
        svg.text(x - 6.0, y + 4.0, 10.0, "end", &format!("{}", (t * 1000.0).round() / 1000.0));
    }
}

pub struct Series<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
    pub errors: Option<&'a [f64]>,
}

/// Grouped vertical bars, one group per category, optional ± error bars.
pub fn grouped_bars(title: &str, y_label: &str, categories: &[String], series: &[Series]) -> String {
    let (left, right, top, bottom) = (70.0, 20.0, 50.0, 110.0);
    let group_w = 18.0 * series.len().max(1) as f64 + 14.0;
    let width = left + right + group_w * categories.len().max(1) as f64;
    let height = 420.0;
    let mut svg = Svg::new(width, height);
    svg.text(width / 2.0, 22.0, 14.0, "middle", title);
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for s in series {
        for (i, v) in s.values.iter().enumerate() {
            let e = s.errors.map_or(0.0, |e| e[i]);
            lo = lo.min(v - e);
            hi = hi.max(v + e);
        }
    }
    if hi - lo < 1e-12 {
        hi = lo + 1.0;
    }
    let ys = Scale::new(lo, hi, height - bottom, top);
    y_axis(&mut svg, &ys, left, width - right, lo, hi);
    svg.rotated_text(16.0, top + 10.0, 11.0, y_label);
    let zero = ys.at(0.0);
    svg.line(left, zero, width - right, zero, "#333");
    for (g, cat) in categories.iter().enumerate() {
        let gx = left + g as f64 * group_w + 7.0;
        for (k, s) in series.iter().enumerate() {
            let v = s.values[g];
            let x = gx + k as f64 * 18.0;
            let y = ys.at(v);
            svg.rect(x, y.min(zero), 16.0, (zero - y).abs(), PALETTE[k % PALETTE.len()]);
            if let Some(err) = s.errors {
                let (a, b) = (ys.at(v - err[g]), ys.at(v + err[g]));
                svg.line(x + 8.0, a, x + 8.0, b, "#222");
                svg.line(x + 4.0, a, x + 12.0, a, "#222");
                svg.line(x + 4.0, b, x + 12.0, b, "#222");
            }
        }
        svg.rotated_text(gx + group_w / 2.0, height - bottom + 14.0, 10.0, cat);
    }
    legend(&mut svg, left + 8.0, 36.0, &series.iter().map(|s| s.name).collect::<Vec<_>>(), &PALETTE);
    svg.finish()
}

fn legend(svg: &mut Svg, x: f64, y: f64, names: &[&str], colours: &[&str]) {
    let mut cx = x;
    for (i, name) in names.iter().enumerate() {
        svg.rect(cx, y - 9.0, 10.0, 10.0, colours[i % colours.len()]);
        svg.text(cx + 14.0, y, 10.0, "start", name);
        cx += 24.0 + 6.5 * name.chars().count() as f64;
    }
}

/// One bar chart per panel, panels stacked vertically.
pub fn histogram_panels(title: &str, labels: &[String], panels: &[(String, Vec<f64>)]) -> String {
    let (left, panel_h, gap, top) = (60.0, 150.0, 40.0, 40.0);
    let bar_w = 40.0;
    let width = left + 30.0 + bar_w * 1.25 * labels.len().max(1) as f64;
    let height = top + (panel_h + gap) * panels.len().max(1) as f64;
    let mut svg = Svg::new(width, height);
    svg.text(width / 2.0, 22.0, 14.0, "middle", title);
    for (p, (name, counts)) in panels.iter().enumerate() {
        let y0 = top + p as f64 * (panel_h + gap) + 16.0;
        let y1 = y0 + panel_h - 30.0;
        let hi = counts.iter().copied().fold(0.0, f64::max).max(1.0);
        let ys = Scale::new(0.0, hi, y1, y0);
        svg.text(left, y0 - 4.0, 11.0, "start", name);
        y_axis(&mut svg, &ys, left, width - 10.0, 0.0, hi);
        svg.line(left, y1, width - 10.0, y1, "#333");
        for (i, c) in counts.iter().enumerate() {
            let x = left + 8.0 + i as f64 * bar_w * 1.25;
            svg.rect(x, ys.at(*c), bar_w, y1 - ys.at(*c), PALETTE[p % PALETTE.len()]);
            svg.text(x + bar_w / 2.0, y1 + 14.0, 10.0, "middle", &labels[i]);
        }
    }
    svg.finish()
}

/// Square matrix heatmap with cell counts.
pub fn heatmap(title: &str, row_label: &str, col_label: &str, labels: &[String], m: &[Vec<f64>]) -> String {
    let cell = 70.0;
    let (left, top) = (90.0, 60.0);
    let k = labels.len();
    let width = left + cell * k as f64 + 30.0;
    let height = top + cell * k as f64 + 50.0;
    let mut svg = Svg::new(width, height);
    svg.text(width / 2.0, 22.0, 14.0, "middle", title);
    let hi = m.iter().flatten().copied().fold(0.0, f64::max).max(1.0);
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let t = v / hi;
            let shade = (255.0 - 190.0 * t).round() as u8;
            let fill = format!("#{:02x}{:02x}ff", shade, shade);
            let (x, y) = (left + j as f64 * cell, top + i as f64 * cell);
            svg.rect(x, y, cell, cell, &fill);
            svg.text(x + cell / 2.0, y + cell / 2.0 + 5.0, 14.0, "middle", &format!("{v}"));
        }
        svg.text(left - 8.0, top + i as f64 * cell + cell / 2.0 + 4.0, 11.0, "end", &labels[i]);
    }
    for (j, l) in labels.iter().enumerate() {
        svg.text(left + j as f64 * cell + cell / 2.0, top - 8.0, 11.0, "middle", l);
    }
    svg.text(left + cell * k as f64 / 2.0, top + cell * k as f64 + 30.0, 12.0, "middle", col_label);
    svg.rotated_text(20.0, top + 20.0, 12.0, row_label);
    svg.finish()
}

/// One beeswarm row per feature: x is the SHAP value, colour the tercile
/// (0 weak, 1 moderate, 2 strong). Points are stacked deterministically
/// within x bins.
pub fn beeswarm(title: &str, features: &[String], points: &[Vec<(f64, usize)>]) -> String {
    let (left, right, top, row_h) = (150.0, 30.0, 50.0, 34.0);
    let width = 720.0;
    let height = top + row_h * features.len().max(1) as f64 + 60.0;
    let mut svg = Svg::new(width, height);
    svg.text(width / 2.0, 22.0, 14.0, "middle", title);
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    for p in points.iter().flatten() {
        lo = lo.min(p.0);
        hi = hi.max(p.0);
    }
    let span = (hi - lo).max(1e-9);
    let (lo, hi) = (lo - 0.05 * span, hi + 0.05 * span);
    let xs = Scale::new(lo, hi, left, width - right);
    let axis_y = top + row_h * features.len() as f64;
    svg.line(xs.at(0.0), top - 6.0, xs.at(0.0), axis_y, "#999");
    svg.line(left, axis_y, width - right, axis_y, "#333");
    for t in nice_ticks(lo, hi, 6) {
        let x = xs.at(t);
        svg.line(x, axis_y, x, axis_y + 4.0, "#333");
        svg.text(x, axis_y + 16.0, 10.0, "middle", &format!("{}", (t * 1000.0).round() / 1000.0));
    }
    svg.text((left + width - right) / 2.0, axis_y + 34.0, 11.0, "middle", "SHAP value (impact on model output)");
    for (f, name) in features.iter().enumerate() {
        let cy = top + row_h * (f as f64 + 0.5);
        svg.text(left - 8.0, cy + 4.0, 10.0, "end", name);
        let mut order: Vec<usize> = (0..points[f].len()).collect();
        order.sort_by(|&a, &b| points[f][a].0.total_cmp(&points[f][b].0).then(a.cmp(&b)));
        let mut bins: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
        for i in order {
            let (v, t) = points[f][i];
            let x = xs.at(v);
            let slot = bins.entry((x / 3.0).floor() as i64).or_insert(0);
            let k = *slot as f64;
            *slot += 1;
            let offset = if *slot % 2 == 0 { -1.0 } else { 1.0 } * (k / 2.0).ceil() * 2.5;
            let offset = offset.clamp(-row_h / 2.0 + 3.0, row_h / 2.0 - 3.0);
            svg.circle(x, cy + offset, 2.2, TERCILE_COLOURS[t.min(2)]);
        }
    }
    legend(&mut svg, left, 38.0, &["weak", "moderate", "strong"], &TERCILE_COLOURS);
    svg.finish()
}
