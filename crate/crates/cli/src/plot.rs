//! Minimal static SVG line plots (profile `X–u` and phase portrait `u–u′`).

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 56.0;

fn bounds(v: &[f64]) -> (f64, f64) {
    let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    if !lo.is_finite() || !hi.is_finite() {
        return (-1.0, 1.0);
    }
    if hi - lo < 1e-300 {
        (lo - 0.5, hi + 0.5)
    } else {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    }
}

/// One polyline over framed axes with labelled extremes.
pub fn line_plot(title: &str, x_label: &str, y_label: &str, xs: &[f64], ys: &[f64]) -> String {
    let (x0, x1) = bounds(xs);
    let (y0, y1) = bounds(ys);
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    if y0 < 0.0 && y1 > 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{MARGIN}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="#bbb"/>"##,
            py(0.0),
            WIDTH - MARGIN
        );
    }
    let mut points = String::new();
    for (&x, &y) in xs.iter().zip(ys) {
        let _ = write!(points, "{:.2},{:.2} ", px(x), py(y));
    }
    let _ = writeln!(s, r##"<polyline fill="none" stroke="#1f4e9c" stroke-width="1.4" points="{}"/>"##, points.trim_end());
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, WIDTH / 2.0, HEIGHT - 12.0, escape(x_label));
    let _ = writeln!(
        s,
        r#"<text x="16" y="{0}" text-anchor="middle" transform="rotate(-90 16 {0})">{1}</text>"#,
        HEIGHT / 2.0,
        escape(y_label)
    );
    let tick = |v: f64| format!("{v:.3e}");
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}" text-anchor="start">{}</text>"#, HEIGHT - MARGIN + 16.0, tick(x0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, WIDTH - MARGIN, HEIGHT - MARGIN + 16.0, tick(x1));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 4.0, HEIGHT - MARGIN, tick(y0));
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, MARGIN - 4.0, MARGIN + 10.0, tick(y1));
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
