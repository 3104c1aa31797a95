//! Deterministic SVG figures: the λ-plane with singular points and loops,
//! and the harvested kernel translations projected to each factor.

use std::fmt::Write as _;

use num_complex::Complex64 as C;

use relmon_core::periods::SingularKind;

use crate::report::{ClassifyBody, MonodromyBody};

const SIZE: f64 = 640.0;
const MARGIN: f64 = 40.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

/// Affine map from a data box onto the square canvas, y pointing up.
struct Frame {
    lo: C,
    scale: f64,
}

impl Frame {
    fn fit(points: &[C]) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (-1.0f64, 1.0f64, -1.0f64, 1.0f64);
        for p in points {
            x0 = x0.min(p.re);
            x1 = x1.max(p.re);
            y0 = y0.min(p.im);
            y1 = y1.max(p.im);
        }
        let pad = 0.08 * (x1 - x0).max(y1 - y0);
        let span = (x1 - x0).max(y1 - y0) + 2.0 * pad;
        let cx = 0.5 * (x0 + x1);
        let cy = 0.5 * (y0 + y1);
        Frame {
            lo: C::new(cx - span / 2.0, cy - span / 2.0),
            scale: (SIZE - 2.0 * MARGIN) / span,
        }
    }

    fn map(&self, p: C) -> (f64, f64) {
        (
            MARGIN + (p.re - self.lo.re) * self.scale,
            SIZE - MARGIN - (p.im - self.lo.im) * self.scale,
        )
    }
}

fn header(s: &mut String, title: &str) {
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="0 0 {w} {w}" font-family="sans-serif" font-size="12">"#,
        w = SIZE
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" font-size="14">{}</text>"#, num(MARGIN), escape(title));
}

fn axes(s: &mut String, f: &Frame, lo: C, hi: C) {
    let (ax0, ay) = f.map(C::new(lo.re, 0.0));
    let (ax1, _) = f.map(C::new(hi.re, 0.0));
    let (bx, by0) = f.map(C::new(0.0, lo.im));
    let (_, by1) = f.map(C::new(0.0, hi.im));
    let _ = writeln!(
        s,
        r##"<g stroke="#bbbbbb" stroke-width="1"><line x1="{}" y1="{}" x2="{}" y2="{}"/><line x1="{}" y1="{}" x2="{}" y2="{}"/></g>"##,
        num(ax0),
        num(ay),
        num(ax1),
        num(ay),
        num(bx),
        num(by0),
        num(bx),
        num(by1)
    );
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn label(p: C) -> String {
    let r = |x: f64| {
        let v = (x * 1000.0).round() / 1000.0;
        if v == 0.0 {
            "0".to_string()
        } else {
            format!("{v}")
        }
    };
    if p.im.abs() < 1e-9 {
        r(p.re)
    } else {
        format!("{}{}{}i", r(p.re), if p.im < 0.0 { "-" } else { "+" }, r(p.im.abs()))
    }
}

/// λ-plane figure: loops as polylines, punctures as filled dots, section
/// branch points as open red circles and the base point as a square.
pub fn lambda_plane_svg(title: &str, mono: &MonodromyBody) -> String {
    let mut pts: Vec<C> = mono.singular_points.iter().map(|s| s.point).collect();
    pts.extend(mono.loops.iter().flat_map(|l| l.vertices.iter().copied()));
    pts.extend(mono.base_point);
    let f = Frame::fit(&pts);
    let span = (SIZE - 2.0 * MARGIN) / f.scale;
    let hi = f.lo + C::new(span, span);

    let mut s = String::new();
    header(&mut s, title);
    axes(&mut s, &f, f.lo, hi);
    for (i, l) in mono.loops.iter().enumerate() {
        let colour = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = l
            .vertices
            .iter()
            .map(|&v| {
                let (x, y) = f.map(v);
                format!("{},{}", num(x), num(y))
            })
            .collect();
        let dash = if l.error.is_some() { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.2" stroke-opacity="0.7"{dash} points="{}"><title>{}</title></polyline>"#,
            points.join(" "),
            escape(&l.name)
        );
    }
    for sp in &mono.singular_points {
        let (x, y) = f.map(sp.point);
        let mark = match sp.kind {
            SingularKind::Puncture => format!(r#"<circle cx="{}" cy="{}" r="5" fill="black"/>"#, num(x), num(y)),
            SingularKind::SectionBranch => format!(
                r##"<circle cx="{}" cy="{}" r="5" fill="white" stroke="#d62728" stroke-width="2"/>"##,
                num(x),
                num(y)
            ),
        };
        let _ = writeln!(s, "{mark}");
        let _ = writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, num(x + 7.0), num(y - 7.0), escape(&label(sp.point)));
    }
    if let Some(b) = mono.base_point {
        let (x, y) = f.map(b);
        let _ = writeln!(s, r#"<rect x="{}" y="{}" width="6" height="6" fill="black"/>"#, num(x - 3.0), num(y - 3.0));
    }
    s.push_str("</svg>\n");
    s
}

/// Two panels: first-factor parts `u` and second-factor parts `v` of the
/// sampled kernel translations (dots) and of the lattice basis (arrows).
pub fn translations_svg(title: &str, body: &ClassifyBody) -> String {
    let k = body.report.k;
    let parts = |w: &[i64], i: usize| -> C { C::new(w[2 * i] as f64, w[2 * i + 1] as f64) };
    let to_i64 = |v: &relmon_core::lattice::IntVector| -> Option<Vec<i64>> {
        v.0.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>()
    };
    let samples: Vec<Vec<i64>> = body
        .report
        .records_sample
        .iter()
        .filter_map(|r| to_i64(r.element.translation()))
        .collect();
    let basis: Vec<Vec<i64>> = body.report.lattice_basis.iter().filter_map(to_i64).collect();

    let mut s = String::new();
    header(&mut s, title);
    let panel = (SIZE - 2.0 * MARGIN) / k.max(1) as f64;
    for i in 0..k {
        let pts: Vec<C> = samples.iter().chain(&basis).map(|w| parts(w, i)).collect();
        let m = pts.iter().map(|p| p.re.abs().max(p.im.abs())).fold(1.0f64, f64::max) * 1.1;
        let x0 = MARGIN + i as f64 * panel;
        let mid = (x0 + panel / 2.0, SIZE / 2.0);
        let sc = (panel / 2.0 - 10.0) / m;
        let map = |p: C| (mid.0 + p.re * sc, mid.1 - p.im * sc);
        let _ = writeln!(
            s,
            r##"<g stroke="#bbbbbb"><line x1="{}" y1="{}" x2="{}" y2="{}"/><line x1="{}" y1="{}" x2="{}" y2="{}"/></g>"##,
            num(x0 + 10.0),
            num(mid.1),
            num(x0 + panel - 10.0),
            num(mid.1),
            num(mid.0),
            num(mid.1 - panel / 2.0 + 10.0),
            num(mid.0),
            num(mid.1 + panel / 2.0 - 10.0)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}">factor {} translations (scale ±{})</text>"#,
            num(x0 + 10.0),
            num(mid.1 - panel / 2.0),
            i + 1,
            num(m)
        );
        for w in &samples {
            let (x, y) = map(parts(w, i));
            let _ = writeln!(s, r##"<circle cx="{}" cy="{}" r="3" fill="#1f77b4"/>"##, num(x), num(y));
        }
        for w in &basis {
            let (x, y) = map(parts(w, i));
            let _ = writeln!(
                s,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#d62728" stroke-width="1.5"/>"##,
                num(mid.0),
                num(mid.1),
                num(x),
                num(y)
            );
        }
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}">verdict {} (rank {})</text>"#,
        num(MARGIN),
        num(SIZE - 12.0),
        body.report.verdict,
        body.report.rank_k
    );
    s.push_str("</svg>\n");
    s
}
