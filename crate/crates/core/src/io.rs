//! PGRID field files and multi-field bundles.
//!
//! A PGRID file is one ASCII header line
//!
//! ```text
//! PGRID1 <n-1> <h> <origin x...> <origin t> <counts...> <periodic>\n
//! ```
//!
//! followed by little-endian `f64` samples, x fastest and t slowest. The
//! periodic flag is `0` (none), `1` (all axes) or `2` (time axis only).
//! Floats in the header are written in shortest round-trip form, so a write
//! followed by a read reproduces the grid bit for bit.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::grid::{GridSpec, ParabolicPoint, Periodicity, ScalarField};
use crate::{Error, Result};

const MAGIC: &str = "PGRID1";
const MAX_HEADER: usize = 4096;

pub fn encode(f: &ScalarField) -> Vec<u8> {
    let spec = &f.spec;
    let mut header = format!("{MAGIC} {} {:?}", spec.n_minus_1, spec.h);
    for v in &spec.origin.x {
        header.push_str(&format!(" {v:?}"));
    }
    header.push_str(&format!(" {:?}", spec.origin.t));
    for c in &spec.counts {
        header.push_str(&format!(" {c}"));
    }
    header.push_str(&format!(" {}\n", f.periodicity.code()));
    let mut out = header.into_bytes();
    out.reserve(8 * f.values.len());
    for v in &f.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8]) -> Result<ScalarField> {
    let nl = bytes
        .iter()
        .take(MAX_HEADER)
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::MalformedHeader("no header line".into()))?;
    let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| Error::MalformedHeader("header is not UTF-8".into()))?;
    let tok: Vec<&str> = header.split_ascii_whitespace().collect();
    if tok.first() != Some(&MAGIC) {
        return Err(Error::MalformedHeader("missing PGRID1 magic".into()));
    }
    let n: usize = tok
        .get(1)
        .ok_or_else(|| Error::MalformedHeader("missing n-1".into()))?
        .parse()
        .map_err(|_| Error::MalformedHeader("n-1 is not an integer".into()))?;
    if !(1..=2).contains(&n) {
        return Err(Error::DimensionMismatch(format!("unsupported n-1 = {n}")));
    }
    let expected = 6 + 2 * n;
    if tok.len() != expected {
        return Err(Error::DimensionMismatch(format!("n-1 = {n} needs {expected} header tokens, found {}", tok.len())));
    }
    let float = |s: &str| s.parse::<f64>().map_err(|_| Error::MalformedHeader(format!("bad number {s:?}")));
    let h = float(tok[2])?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::MalformedHeader(format!("h must be positive, got {h}")));
    }
    let x: Vec<f64> = tok[3..3 + n].iter().map(|s| float(s)).collect::<Result<_>>()?;
    let t = float(tok[3 + n])?;
    let counts: Vec<usize> = tok[4 + n..5 + 2 * n]
        .iter()
        .map(|s| s.parse::<usize>().map_err(|_| Error::MalformedHeader(format!("bad count {s:?}"))))
        .collect::<Result<_>>()?;
    let per = tok[expected - 1]
        .parse::<u8>()
        .ok()
        .and_then(Periodicity::from_code)
        .ok_or_else(|| Error::MalformedHeader("bad periodic flag".into()))?;
    let spec = GridSpec::new(n, h, ParabolicPoint::new(x, t), counts).map_err(|e| Error::MalformedHeader(e.to_string()))?;
    let payload = &bytes[nl + 1..];
    let need = spec.len() * 8;
    if payload.len() < need {
        return Err(Error::Truncated { expected: need, found: payload.len() });
    }
    if payload.len() > need {
        return Err(Error::DimensionMismatch(format!("payload has {} bytes, counts imply {need}", payload.len())));
    }
    let values = payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    ScalarField::new(spec, values, per)
}

pub fn write_field(f: &ScalarField, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode(f))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<ScalarField> {
    decode(&fs::read(path)?)
}

/// Manifest of a bundle directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleManifest {
    pub kind: String,
    pub fields: Vec<String>,
    pub meta: serde_json::Value,
}

/// Write several fields plus `manifest.json` into `dir`.
pub fn write_bundle(dir: impl AsRef<Path>, kind: &str, meta: serde_json::Value, fields: &[(&str, &ScalarField)]) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    for (name, f) in fields {
        write_field(f, dir.join(format!("{name}.pgrid")))?;
    }
    let manifest = BundleManifest {
        kind: kind.to_string(),
        fields: fields.iter().map(|(n, _)| n.to_string()).collect(),
        meta,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

pub fn read_bundle(dir: impl AsRef<Path>) -> Result<(BundleManifest, Vec<(String, ScalarField)>)> {
    let dir = dir.as_ref();
    let manifest: BundleManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    let fields = manifest
        .fields
        .iter()
        .map(|n| Ok((n.clone(), read_field(dir.join(format!("{n}.pgrid")))?)))
        .collect::<Result<_>>()?;
    Ok((manifest, fields))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScalarField {
        let spec = GridSpec::new(1, 0.1, ParabolicPoint::new(vec![-0.3], 1.0 / 3.0), vec![5, 7]).unwrap();
        ScalarField::from_fn(spec, Periodicity::Time, |x, t| (x[0] * 7.1).sin() + t.exp())
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let f = sample();
        let g = decode(&encode(&f)).unwrap();
        assert_eq!(f.spec, g.spec);
        assert_eq!(f.periodicity, g.periodicity);
        assert!(f.values.iter().zip(&g.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn distinct_errors() {
        let bytes = encode(&sample());
        assert!(matches!(decode(&bytes[..bytes.len() - 3]), Err(Error::Truncated { .. })));
        let mut long = bytes.clone();
        long.extend_from_slice(&[0u8; 8]);
        assert!(matches!(decode(&long), Err(Error::DimensionMismatch(_))));
        let neg = String::from_utf8_lossy(&bytes).replacen(" 0.1 ", " -0.1 ", 1);
        assert!(matches!(decode(neg.as_bytes()), Err(Error::MalformedHeader(_))));
        assert!(matches!(decode(b"PGRID1 1 0.1 0 0 5 0\n"), Err(Error::DimensionMismatch(_))));
        assert!(matches!(decode(b"PGRIDX 1 0.1 0 0 5 5 0\n"), Err(Error::MalformedHeader(_))));
    }
}
