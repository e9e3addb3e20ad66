//! File formats: JSON curve and diagram bundles, matrix-market system
//! export, coefficient tables for candidate polynomials, CSV evolution
//! frames, and minimal SVG plots of planar projections.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::diagram::DiagramCurve;
use crate::dynamics::EvolutionFrame;
use crate::error::{Error, Result};
use crate::knot::GaussCode;
use crate::legendrify::{LegendrianR3Curve, S3Curve};
use crate::tangency::{PolyC2, TangencySystem};
use crate::trigpoly::TrigPoly;

/// On-disk form of a planar diagram input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramFile {
    pub x: TrigPoly,
    pub y: TrigPoly,
    #[serde(default)]
    pub target: GaussCode,
}

impl DiagramFile {
    pub fn into_diagram(self) -> DiagramCurve {
        DiagramCurve { x: self.x, y: self.y, target: self.target }
    }

    pub fn from_diagram(d: &DiagramCurve) -> Self {
        DiagramFile { x: d.x.clone(), y: d.y.clone(), target: d.target.clone() }
    }
}

/// On-disk form of a built curve: the planar-model coordinates and the
/// spherical numerators with their common denominator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveFile {
    pub x: TrigPoly,
    pub y: TrigPoly,
    pub z: TrigPoly,
    pub s3_num: Vec<TrigPoly>,
    pub s3_rho: TrigPoly,
}

impl CurveFile {
    pub fn new(c: &LegendrianR3Curve, s3: &S3Curve) -> Self {
        CurveFile {
            x: c.x.clone(),
            y: c.y.clone(),
            z: c.z.clone(),
            s3_num: s3.num.to_vec(),
            s3_rho: s3.rho.clone(),
        }
    }

    pub fn s3_curve(&self) -> Result<S3Curve> {
        let num: [TrigPoly; 4] = self
            .s3_num
            .clone()
            .try_into()
            .map_err(|_| Error::Parse("s3_num must hold exactly 4 polynomials".into()))?;
        Ok(S3Curve { num, rho: self.s3_rho.clone() })
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Parse(format!("serialize: {e}")))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

/// Matrix-market array export of the assembled system (dense, complex,
/// general), with the right-hand side appended as a second file when present.
pub fn matrix_market(sys: &TangencySystem) -> String {
    let (rows, cols) = (sys.a.nrows(), sys.a.ncols());
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array complex general\n");
    let _ = writeln!(out, "{rows} {cols}");
    for c in 0..cols {
        for r in 0..rows {
            let v = sys.a[(r, c)];
            let _ = writeln!(out, "{:.17e} {:.17e}", v.re, v.im);
        }
    }
    out
}

pub fn rhs_market(sys: &TangencySystem) -> Option<String> {
    let y = sys.y.as_ref()?;
    let mut out = String::new();
    out.push_str("%%MatrixMarket matrix array complex general\n");
    let _ = writeln!(out, "{} 1", y.len());
    for v in y.iter() {
        let _ = writeln!(out, "{:.17e} {:.17e}", v.re, v.im);
    }
    Some(out)
}

/// Candidate polynomial as a plain (i, j, re, im) coefficient table.
pub fn candidate_table(p: &PolyC2) -> String {
    let mut rows: Vec<_> = p.coeffs.clone();
    rows.sort_by_key(|&(i, j, _)| (i, j));
    let mut out = String::from("# i j re im\n");
    for (i, j, c) in rows {
        let _ = writeln!(out, "{i} {j} {:.17e} {:.17e}", c.re, c.im);
    }
    out
}

/// CSV export of evolution frames: t, sample index, position, flag.
pub fn frames_csv(frames: &[EvolutionFrame]) -> String {
    let mut out = String::from("t,index,x,y,z,converged\n");
    for f in frames {
        for (i, p) in f.points.iter().enumerate() {
            let _ = writeln!(
                out,
                "{},{},{:.17e},{:.17e},{:.17e},{}",
                f.t, i, p[0], p[1], p[2], f.converged[i]
            );
        }
    }
    out
}

/// Minimal SVG polyline plot of 2D points (closed curve), auto-scaled.
pub fn svg_polyline(points: &[[f64; 2]], size: f64) -> String {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let margin = 0.05 * size;
    let scale = (size - 2.0 * margin) / span;
    let mut path = String::new();
    for (k, p) in points.iter().enumerate() {
        let sx = margin + (p[0] - lo[0]) * scale;
        let sy = size - margin - (p[1] - lo[1]) * scale;
        let _ = write!(path, "{}{:.2},{:.2} ", if k == 0 { "M" } else { "L" }, sx, sy);
    }
    path.push('Z');
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" \
         viewBox=\"0 0 {size} {size}\">\n<rect width=\"{size}\" height=\"{size}\" \
         fill=\"white\"/>\n<path d=\"{path}\" fill=\"none\" stroke=\"black\" \
         stroke-width=\"1\"/>\n</svg>\n"
    )
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::tangency::{assemble_a, Parity};

    #[test]
    fn diagram_roundtrip() {
        let d = fixtures::figure_eight_diagram();
        let file = DiagramFile::from_diagram(&d);
        let text = serde_json::to_string(&file).unwrap();
        let back: DiagramFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.x, d.x);
        assert_eq!(back.target, d.target);
    }

    #[test]
    fn matrix_market_shape_header() {
        let c = fixtures::torus_23_s3curve();
        let sys = assemble_a(&c, 1, Parity::Auto);
        let text = matrix_market(&sys);
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("%%MatrixMarket"));
        let dims = lines.next().unwrap();
        assert_eq!(
            dims,
            format!("{} {}", sys.a.nrows(), sys.a.ncols())
        );
        // One body line per entry.
        assert_eq!(lines.count(), sys.a.nrows() * sys.a.ncols());
    }

    #[test]
    fn svg_and_csv_are_well_formed() {
        let pts = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]];
        let svg = svg_polyline(&pts, 400.0);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        let frames = vec![EvolutionFrame {
            t: 0.5,
            points: vec![[1.0, 2.0, 3.0]],
            converged: vec![true],
        }];
        let csv = frames_csv(&frames);
        assert!(csv.lines().count() == 2 && csv.contains("0.5,0,"));
    }
}
