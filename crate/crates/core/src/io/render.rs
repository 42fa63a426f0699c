//! CSV tables, PGM rasters and SVG box dumps.

use std::fmt::Write as _;

use crate::engine::{BoxCover, SubsumValue, Window};
use crate::error::{Error, Result};

/// Plotted region. One-dimensional data is drawn on `y ∈ [-0.5, 0.5]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

fn planar(lo: &[f64], hi: &[f64]) -> ([f64; 2], [f64; 2]) {
    match lo.len() {
        1 => ([lo[0], -0.5], [hi[0], 0.5]),
        _ => ([lo[0], lo[1]], [hi[0], hi[1]]),
    }
}

impl Frame {
    /// The window when given, else the bounding box of the cover padded
    /// so neither side is degenerate.
    pub fn for_cover(cover: &BoxCover, window: Option<&Window>) -> Result<Self> {
        let m = cover.source.dimension;
        if !(1..=2).contains(&m) {
            return Err(Error::Unsupported(format!("cannot draw {m}-dimensional covers")));
        }
        if let Some(w) = window {
            if w.dimension() != m {
                return Err(Error::Parse("window dimension differs from the series".into()));
            }
            let (lo, hi) = planar(&w.lo, &w.hi);
            return Ok(Frame { lo, hi }.padded());
        }
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for b in &cover.boxes {
            let (l, h) = planar(&b.lo_f64(), &b.hi_f64());
            for i in 0..2 {
                lo[i] = lo[i].min(l[i]);
                hi[i] = hi[i].max(h[i]);
            }
        }
        if cover.boxes.is_empty() {
            (lo, hi) = ([0.0, -0.5], [1.0, 0.5]);
        }
        if lo.iter().chain(&hi).any(|v| !v.is_finite()) {
            return Err(Error::Unsupported("cover is unbounded; pass a window".into()));
        }
        Ok(Frame { lo, hi }.padded())
    }

    fn padded(mut self) -> Self {
        for i in 0..2 {
            if self.hi[i] - self.lo[i] <= 0.0 {
                let pad = 0.5 * (1.0 + self.lo[i].abs()) * 1e-3;
                self.lo[i] -= pad;
                self.hi[i] += pad;
            }
        }
        self
    }
}

/// One row per box: centers then halfwidths, as exact strings.
pub fn cover_csv(cover: &BoxCover) -> Result<String> {
    let m = cover.source.dimension;
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = (0..m)
        .map(|i| format!("center_{i}"))
        .chain((0..m).map(|i| format!("halfwidth_{i}")))
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    for b in &cover.boxes {
        w.write_record(b.center.iter().chain(&b.halfwidth).map(|s| s.to_string()))
            .map_err(csv_err)?;
    }
    finish_csv(w)
}

/// One row per distinct subsum.
pub fn enumeration_csv(values: &[SubsumValue], m: usize) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = (0..m)
        .map(|i| format!("x_{i}"))
        .chain(std::iter::once("multiplicity".to_string()))
        .collect();
    w.write_record(&header).map_err(csv_err)?;
    for v in values {
        w.write_record(
            v.value
                .iter()
                .map(|s| s.to_string())
                .chain(std::iter::once(v.multiplicity.to_string())),
        )
        .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(std::io::Error::other(e)))
}

/// Binary PGM. A pixel is black (0) iff some box meets its closed square.
pub fn cover_pgm(cover: &BoxCover, frame: &Frame, width: usize, height: usize) -> Result<Vec<u8>> {
    if width == 0 || height == 0 {
        return Err(Error::Parse("resolution must be positive".into()));
    }
    let dx = (frame.hi[0] - frame.lo[0]) / width as f64;
    let dy = (frame.hi[1] - frame.lo[1]) / height as f64;
    let col = |i: usize| (frame.lo[0] + i as f64 * dx, frame.lo[0] + (i + 1) as f64 * dx);
    // row 0 is the top
    let row = |j: usize| (frame.hi[1] - (j + 1) as f64 * dy, frame.hi[1] - j as f64 * dy);
    let mut pix = vec![255u8; width * height];
    for b in &cover.boxes {
        let (lo, hi) = planar(&b.lo_f64(), &b.hi_f64());
        if hi[0] < frame.lo[0] || lo[0] > frame.hi[0] || hi[1] < frame.lo[1] || lo[1] > frame.hi[1] {
            continue;
        }
        // candidate ranges widened by one, then tested against the exact
        // pixel edges used above
        let clamp = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        let i0 = clamp((lo[0] - frame.lo[0]) / dx - 1.0, width);
        let i1 = clamp((hi[0] - frame.lo[0]) / dx + 1.0, width);
        let j0 = clamp((frame.hi[1] - hi[1]) / dy - 1.0, height);
        let j1 = clamp((frame.hi[1] - lo[1]) / dy + 1.0, height);
        for j in j0..=j1 {
            let (y0, y1) = row(j);
            if hi[1] < y0 || lo[1] > y1 {
                continue;
            }
            for i in i0..=i1 {
                let (x0, x1) = col(i);
                if hi[0] >= x0 && lo[0] <= x1 {
                    pix[j * width + i] = 0;
                }
            }
        }
    }
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(pix);
    Ok(out)
}

/// SVG 1.1 in data coordinates (y up), one `rect` per box.
pub fn cover_svg(cover: &BoxCover, frame: &Frame) -> String {
    let w = frame.hi[0] - frame.lo[0];
    let h = frame.hi[1] - frame.lo[1];
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="{}" viewBox="{} {} {} {}" preserveAspectRatio="none">"#,
        (800.0 * h / w).clamp(100.0, 2000.0).round(),
        frame.lo[0],
        -frame.hi[1],
        w,
        h
    );
    let _ = writeln!(s, r#"<g fill="black" stroke="black" stroke-width="0.5" vector-effect="non-scaling-stroke">"#);
    for b in &cover.boxes {
        let (lo, hi) = planar(&b.lo_f64(), &b.hi_f64());
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{}" height="{}" vector-effect="non-scaling-stroke"/>"#,
            lo[0],
            -hi[1],
            hi[0] - lo[0],
            hi[1] - lo[1]
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{box_cover, enumerate_exact, Limits};
    use crate::series::catalog::catalog_get;

    fn cover(name: &str, n: u64) -> BoxCover {
        box_cover(&catalog_get(name).unwrap().spec, n, None, &Limits::default()).unwrap()
    }

    #[test]
    fn csv_rows_are_exact() {
        let c = cover("geometric-two-thirds", 1);
        let text = cover_csv(&c).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("center_0,halfwidth_0"));
        assert_eq!(lines.count(), c.boxes.len());
        assert!(text.contains("\n1/6,1/6\n5/6,1/6\n"));

        let spec = catalog_get("finite-123").unwrap().spec;
        let vals = enumerate_exact(&spec, 3, &Limits::default()).unwrap();
        let text = enumeration_csv(&vals, 1).unwrap();
        assert!(text.starts_with("x_0,multiplicity\n"));
        assert!(text.contains("\n3,2\n"));
    }

    #[test]
    fn pgm_header_and_painting() {
        let c = cover("geometric-two-thirds", 2);
        let f = Frame::for_cover(&c, None).unwrap();
        let img = cover_pgm(&c, &f, 9, 1).unwrap();
        let header = b"P5\n9 1\n255\n";
        assert_eq!(&img[..header.len()], header);
        let px = &img[header.len()..];
        assert_eq!(px.len(), 9);
        // boxes [0,1/9], [2/9,1/3], [2/3,7/9], [8/9,1] in the frame [0,1]
        assert_eq!(px[4], 255, "middle third is empty");
        assert_eq!(px[0], 0);
        assert_eq!(px[8], 0);
    }

    #[test]
    fn every_box_paints_a_pixel() {
        let c = cover("geometric-2d", 6);
        let f = Frame::for_cover(&c, None).unwrap();
        let (w, h) = (37, 23);
        let img = cover_pgm(&c, &f, w, h).unwrap();
        let px = &img[img.len() - w * h..];
        for b in &c.boxes {
            let lo = b.lo_f64();
            let cx = ((b.center[0].to_f64() - f.lo[0]) / (f.hi[0] - f.lo[0]) * w as f64) as usize;
            let cy = ((f.hi[1] - b.center[1].to_f64()) / (f.hi[1] - f.lo[1]) * h as f64) as usize;
            assert_eq!(px[cy.min(h - 1) * w + cx.min(w - 1)], 0, "box at {lo:?}");
        }
    }

    #[test]
    fn svg_has_one_rect_per_box() {
        let c = cover("geometric-2d", 4);
        let f = Frame::for_cover(&c, None).unwrap();
        let s = cover_svg(&c, &f);
        assert!(s.starts_with("<?xml"));
        assert_eq!(s.matches("<rect ").count(), c.boxes.len());
        assert!(s.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn wrong_window_dimension() {
        let c = cover("geometric-2d", 2);
        let w = Window::new(vec![0.0], vec![1.0]).unwrap();
        assert!(Frame::for_cover(&c, Some(&w)).is_err());
    }
}
