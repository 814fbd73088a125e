//! Output files: CSV series, snapshot text, SVG drawings and a summary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::harness::record::RunRecord;
use crate::polycurve::PolyCurve;
use crate::vec2::Vec2;

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn bounds<'a>(curves: impl Iterator<Item = &'a PolyCurve>) -> (Vec2, Vec2) {
    let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in curves {
        for p in c.vertices() {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
    }
    (lo, hi)
}

fn polyline(out: &mut String, curve: &PolyCurve, style: &str) {
    out.push_str("  <polyline points=\"");
    let v = curve.vertices();
    for p in v.iter().chain(v.first()) {
        let _ = write!(out, "{:.9},{:.9} ", p.x, p.y);
    }
    out.pop();
    let _ = writeln!(out, "\" {style}/>");
}

/// One drawing with equal scaling on both axes, `y` pointing up.
pub fn svg(curve: &PolyCurve, reference: Option<&PolyCurve>, caption: &str) -> String {
    let (lo, hi) = bounds(std::iter::once(curve).chain(reference));
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE);
    let pad = 0.05 * span;
    let (w, h) = (hi.x - lo.x + 2.0 * pad, hi.y - lo.y + 2.0 * pad);
    let stroke = span / 400.0;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"{:.9} {:.9} {:.9} {:.9}\">",
        600.0 * w / w.max(h),
        600.0 * h / w.max(h),
        lo.x - pad,
        -(hi.y + pad),
        w,
        h
    );
    let _ = writeln!(out, "  <title>{caption}</title>");
    out.push_str("  <g transform=\"scale(1,-1)\">\n");
    if let Some(r) = reference {
        polyline(
            &mut out,
            r,
            &format!("fill=\"none\" stroke=\"#999\" stroke-width=\"{stroke:.9}\" stroke-dasharray=\"{:.9}\"", 4.0 * stroke),
        );
    }
    polyline(
        &mut out,
        curve,
        &format!("fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"{stroke:.9}\""),
    );
    out.push_str("  </g>\n</svg>\n");
    out
}

/// Which files [`emit`] produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub csv: bool,
    pub svg: bool,
    pub snapshots: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats {
            csv: true,
            svg: true,
            snapshots: true,
        }
    }
}

/// Writes `series.csv`, `snapshots/NNNNN.txt` and `svg/NNNNN.svg` into `dir`.
pub fn emit(
    record: &RunRecord,
    dir: &Path,
    formats: Formats,
    reference: Option<&PolyCurve>,
) -> Result<Vec<PathBuf>> {
    if record.rows.is_empty() {
        return Err(Error::Parse("record has no rows".into()));
    }
    let mut written = Vec::new();
    if formats.csv {
        let mut buf = Vec::new();
        record.write_csv(&mut buf)?;
        let path = dir.join("series.csv");
        write_atomic(&path, &buf)?;
        written.push(path);
    }
    for (k, snap) in record.snapshots.iter().enumerate() {
        if formats.snapshots {
            let mut text = format!("# t = {:.16e}, step = {}\n", snap.t, snap.step);
            text.push_str(&snap.curve.to_snapshot_text());
            let path = dir.join("snapshots").join(format!("{k:05}.txt"));
            write_atomic(&path, text.as_bytes())?;
            written.push(path);
        }
        if formats.svg {
            let caption = format!("t = {:.6}", snap.t);
            let path = dir.join("svg").join(format!("{k:05}.svg"));
            write_atomic(&path, svg(&snap.curve, reference, &caption).as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}
