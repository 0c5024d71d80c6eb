//! SVG output via barycentric placement of the planarization.

use std::fmt::Write;

use super::geometry::GeometricDrawing;
use super::plan::{NodeKind, NIL};
use super::CombinatorialDrawing;

const R: f64 = 100.0;

fn header(w: f64, h: f64) -> String {
    format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.1}\" height=\"{h:.1}\" viewBox=\"0 0 {w:.1} {h:.1}\">\n")
}

/// Node positions: one Tutte layout per component, components side by side.
fn layout(d: &CombinatorialDrawing) -> Vec<(f64, f64)> {
    let p = &d.plan;
    let n = p.node_count();
    let comp = p.components();
    let faces = p.faces();
    let mut pos = vec![(0.0, 0.0); n];
    let mut roots: Vec<usize> = (0..n).filter(|&x| p.kind[x] != NodeKind::Dead && comp[x] == x).collect();
    roots.sort_unstable();
    for (slot, &root) in roots.iter().enumerate() {
        let ox = R + 1.2 + slot as f64 * (2.0 * R + 20.0);
        let members: Vec<usize> = (0..n).filter(|&x| comp[x] == root && p.kind[x] != NodeKind::Dead).collect();
        if p.node_half[root] == NIL {
            pos[root] = (ox + 10.0, R + 10.0);
            continue;
        }
        // outer face: longest face of this component
        let mut best: Option<(usize, usize)> = None;
        let mut size = vec![0usize; faces.count];
        let mut first = vec![NIL; faces.count];
        for h in 0..p.half_count() {
            if p.alive(h) && comp[p.origin[h]] == root {
                let f = faces.face_of[h];
                size[f] += 1;
                if first[f] == NIL {
                    first[f] = h;
                }
            }
        }
        for f in 0..faces.count {
            if first[f] != NIL && best.map_or(true, |(_, s)| size[f] > s) {
                best = Some((f, size[f]));
            }
        }
        let (f, _) = best.unwrap();
        let mut ring = Vec::new();
        let mut on_ring = vec![false; n];
        let mut h = first[f];
        loop {
            let x = p.origin[h];
            if !on_ring[x] {
                on_ring[x] = true;
                ring.push(x);
            }
            h = p.face_next(h);
            if h == first[f] {
                break;
            }
        }
        for (i, &x) in ring.iter().enumerate() {
            let a = std::f64::consts::TAU * i as f64 / ring.len() as f64;
            pos[x] = (ox + 10.0 + R * a.cos(), R + 10.0 - R * a.sin());
        }
        let inner: Vec<usize> = members.iter().copied().filter(|&x| !on_ring[x]).collect();
        for &x in &inner {
            pos[x] = (ox + 10.0, R + 10.0);
        }
        for _ in 0..2000 {
            let mut delta = 0.0f64;
            for &x in &inner {
                let rot = p.rotation(x);
                let (mut sx, mut sy) = (0.0, 0.0);
                for &h in &rot {
                    let y = p.dest(h);
                    sx += pos[y].0;
                    sy += pos[y].1;
                }
                let k = rot.len() as f64;
                let q = (sx / k, sy / k);
                delta = delta.max((q.0 - pos[x].0).abs() + (q.1 - pos[x].1).abs());
                pos[x] = q;
            }
            if delta < 1e-6 {
                break;
            }
        }
    }
    pos
}

/// Renders the planarization: one polyline per drawn edge through its
/// crossing nodes, a glyph per vertex and a marker per crossing.
pub fn render_svg(d: &CombinatorialDrawing) -> String {
    let p = &d.plan;
    let pos = layout(d);
    let roots = {
        let comp = p.components();
        (0..p.node_count()).filter(|&x| p.kind[x] != NodeKind::Dead && comp[x] == x).count()
    };
    let w = 20.0 + roots.max(1) as f64 * (2.0 * R + 20.0);
    let mut s = header(w, 2.0 * R + 20.0);
    for e in 0..d.edges().len() {
        let ch = p.chain(e);
        if ch.is_empty() {
            continue;
        }
        let mut pts = vec![pos[p.origin[ch[0]]]];
        pts.extend(ch.iter().map(|&h| pos[p.dest(h)]));
        let txt: Vec<String> = pts.iter().map(|q| format!("{:.2},{:.2}", q.0, q.1)).collect();
        let (u, v) = d.edges()[e];
        writeln!(s, "<polyline class=\"edge\" data-edge=\"{u}-{v}\" fill=\"none\" stroke=\"black\" points=\"{}\"/>", txt.join(" ")).unwrap();
    }
    for x in p.crossing_nodes() {
        writeln!(s, "<circle class=\"crossing\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"2\" fill=\"red\"/>", pos[x].0, pos[x].1).unwrap();
    }
    for v in 0..d.graph().n() {
        writeln!(s, "<circle class=\"vertex\" data-v=\"{v}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"white\" stroke=\"black\"/>", pos[v].0, pos[v].1).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

pub fn render_svg_geometric(d: &GeometricDrawing) -> String {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &d.points {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    if d.points.is_empty() {
        return format!("{}</svg>\n", header(20.0, 20.0));
    }
    let scale = 2.0 * R / (x1 - x0).max(y1 - y0).max(1e-12);
    let map = |(x, y): (f64, f64)| (10.0 + (x - x0) * scale, 10.0 + (y1 - y) * scale);
    let mut s = header(2.0 * R + 20.0, 2.0 * R + 20.0);
    for ((u, v), pl) in &d.polylines {
        let txt: Vec<String> = pl.iter().map(|&q| map(q)).map(|q| format!("{:.2},{:.2}", q.0, q.1)).collect();
        writeln!(s, "<polyline class=\"edge\" data-edge=\"{u}-{v}\" fill=\"none\" stroke=\"black\" points=\"{}\"/>", txt.join(" ")).unwrap();
    }
    for (v, &q) in d.points.iter().enumerate() {
        let q = map(q);
        writeln!(s, "<circle class=\"vertex\" data-v=\"{v}\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"white\" stroke=\"black\"/>", q.0, q.1).unwrap();
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, WeightedGraph};

    fn count(s: &str, pat: &str) -> usize {
        s.matches(pat).count()
    }

    #[test]
    fn plane_k4_svg() {
        let d = CombinatorialDrawing::planar(&complete(4)).unwrap();
        let s = render_svg(&d);
        assert_eq!(count(&s, "class=\"vertex\""), 4);
        assert_eq!(count(&s, "<polyline"), 6);
        assert_eq!(count(&s, "class=\"crossing\""), 0);
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn k5_svg_has_one_marker() {
        let d = super::super::tests::k5_drawing();
        assert_eq!(count(&render_svg(&d), "class=\"crossing\""), 1);
    }

    #[test]
    fn empty_and_disconnected() {
        let s = render_svg(&CombinatorialDrawing::empty(&WeightedGraph::new(0)));
        assert!(s.contains("<svg") && s.contains("</svg>"));
        let mut g = WeightedGraph::new(6);
        for (u, v) in [(0, 1), (1, 2), (0, 2), (3, 4)] {
            g.set_weight(u, v, crate::weight::int(1)).unwrap();
        }
        let d = CombinatorialDrawing::planar(&g).unwrap();
        let s = render_svg(&d);
        assert_eq!(count(&s, "class=\"vertex\""), 6);
        assert_eq!(count(&s, "<polyline"), 4);
    }
}
