//! Minimal SVG line plot of frequency against time.

use std::fmt::Write;

use gridfreq_core::Trajectory;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

pub fn frequency_svg(traj: &Trajectory, threshold: f64) -> String {
    let t_max = traj
        .samples
        .last()
        .map_or(1.0, |s| s.t)
        .max(f64::MIN_POSITIVE);
    let (mut lo, mut hi) = traj
        .samples
        .iter()
        .fold((threshold, 60.0_f64), |(lo, hi), s| {
            (lo.min(s.f), hi.max(s.f))
        });
    let pad = ((hi - lo) * 0.05).max(0.01);
    lo -= pad;
    hi += pad;

    let x = |t: f64| MARGIN + t / t_max * (WIDTH - 2.0 * MARGIN);
    let y = |f: f64| HEIGHT - MARGIN - (f - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<line x1="{x0}" y1="{yt:.2}" x2="{x1}" y2="{yt:.2}" stroke="red" stroke-dasharray="4 4"/>"#,
        x0 = MARGIN,
        x1 = WIDTH - MARGIN,
        yt = y(threshold)
    );
    let points: Vec<String> = traj
        .samples
        .iter()
        .map(|s| format!("{:.2},{:.2}", x(s.t), y(s.f)))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="navy" stroke-width="1.5" points="{}"/>"#,
        points.join(" ")
    );
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{ty}" font-size="12">{hi:.3} Hz</text>"#,
        ty = MARGIN - 8.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{ty}" font-size="12">{lo:.3} Hz, 0 s to {t_max} s</text>"#,
        ty = HEIGHT - MARGIN + 20.0
    );
    svg.push_str("</svg>\n");
    svg
}
