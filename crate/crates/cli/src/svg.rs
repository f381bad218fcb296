//! Standalone SVG scatter of heads in the PC1/PC2 plane.

use std::fmt::Write;

use brainspace_core::space::SpaceReport;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 8] = [
    "#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3", "#937860", "#da8bc3", "#8c8c8c",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-12 {
        return (lo - 1.0, hi + 1.0);
    }
    let pad = 0.05 * (hi - lo);
    (lo - pad, hi + pad)
}

/// One circle per head, coloured by cluster.
pub fn scatter(report: &SpaceReport) -> String {
    let heads = || report.models.iter().flat_map(|m| m.heads.iter().map(move |h| (m, h)));
    let (x0, x1) = range(heads().map(|(_, h)| h.pc1));
    let (y0, y1) = range(heads().map(|(_, h)| h.pc2));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<g stroke="black" stroke-width="1"><line x1="{m}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{m}" y1="{m}" x2="{m}" y2="{b}"/></g>"#,
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14">PC1</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="15" y="{}" text-anchor="middle" font-family="sans-serif" font-size="14" transform="rotate(-90 15 {})">PC2</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(s, r#"<g class="heads">"#);
    for (m, h) in heads() {
        let _ = writeln!(
            s,
            r#"<circle class="head" cx="{:.3}" cy="{:.3}" r="4" fill="{}" fill-opacity="0.8"><title>{} L{} H{} C{}</title></circle>"#,
            sx(h.pc1),
            sy(h.pc2),
            PALETTE[(h.cluster - 1) % PALETTE.len()],
            escape(&m.model_id),
            h.layer,
            h.head,
            h.cluster
        );
    }
    let _ = writeln!(s, "</g>");
    for c in 0..report.chosen_k {
        let y = MARGIN + 18.0 * c as f64;
        let _ = writeln!(
            s,
            r#"<g class="legend"><circle cx="{x}" cy="{y}" r="5" fill="{}"/><text x="{}" y="{}" font-family="sans-serif" font-size="12">C{}</text></g>"#,
            PALETTE[c % PALETTE.len()],
            WIDTH - MARGIN + 10.0,
            y + 4.0,
            c + 1,
            x = WIDTH - MARGIN + 2.0,
        );
    }
    s.push_str("</svg>\n");
    s
}
