//! Minimal SVG line chart of fail_rate against eps, one line per L.

use std::collections::BTreeMap;
use std::fmt::Write;

const W: f64 = 480.0;
const H: f64 = 320.0;
const PAD: f64 = 48.0;
const COLOURS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

/// Reads sweep CSV text. Both axes are logarithmic; zero rates sit on the
/// bottom edge.
pub fn svg_chart(csv: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap_or("").split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name);
    let mut series: BTreeMap<i64, Vec<(f64, f64)>> = BTreeMap::new();
    if let (Some(cl), Some(ce), Some(cf)) = (col("L"), col("eps"), col("fail_rate")) {
        for row in lines {
            let f: Vec<&str> = row.split(',').collect();
            let parse = |i: usize| f.get(i).and_then(|s| s.parse::<f64>().ok());
            if let (Some(l), Some(e), Some(r)) = (parse(cl), parse(ce), parse(cf)) {
                if e > 0.0 {
                    series.entry(l as i64).or_default().push((e, r));
                }
            }
        }
    }
    let pts: Vec<(f64, f64)> = series.values().flatten().copied().collect();
    let lx = |v: f64| v.log10();
    let (x0, x1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| (a.min(lx(p.0)), b.max(lx(p.0))));
    let positive: Vec<f64> = pts.iter().map(|p| p.1).filter(|&r| r > 0.0).collect();
    let y0 = positive.iter().map(|&r| r.log10()).fold(0.0f64, f64::min).floor().min(-1.0);
    let sx = |v: f64| {
        if x1 > x0 {
            PAD + (lx(v) - x0) / (x1 - x0) * (W - 2.0 * PAD)
        } else {
            W / 2.0
        }
    };
    let sy = |r: f64| {
        let v = if r > 0.0 { r.log10().max(y0) } else { y0 };
        H - PAD - (v - y0) / -y0 * (H - 2.0 * PAD)
    };

    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {} V{} H{}" stroke="black" fill="none"/>"#,
        PAD,
        H - PAD,
        W - PAD
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">eps</text>"#, W / 2.0, H - 12.0);
    let _ = writeln!(s, r#"<text x="12" y="{}" transform="rotate(-90 12 {})" text-anchor="middle">fail rate</text>"#, H / 2.0, H / 2.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">1e{}</text>"#, PAD - 4.0, H - PAD, y0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">1</text>"#, PAD - 4.0, PAD + 4.0);
    for (k, (l, pts)) in series.iter_mut().enumerate() {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let colour = COLOURS[k % COLOURS.len()];
        let d: Vec<String> = pts.iter().map(|&(e, r)| format!("{:.1},{:.1}", sx(e), sy(r))).collect();
        let _ = writeln!(s, r#"<polyline points="{}" stroke="{colour}" fill="none" stroke-width="1.5"/>"#, d.join(" "));
        for &(e, r) in pts.iter() {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="2.5" fill="{colour}"/>"#, sx(e), sy(r));
        }
        let _ = writeln!(s, r#"<text x="{}" y="{}" fill="{colour}">L={l}</text>"#, W - PAD + 4.0, PAD + 14.0 * k as f64);
    }
    s.push_str("</svg>\n");
    s
}
