//! Binary model container.
//!
//! ```text
//! "EIGF"  version:u32  width:u32  height:u32  M:u32  K:u32
//! psi              N    f64
//! eigenfaces       K×N  f64   (one face after another)
//! energyFractions  K    f64
//! classProjections M×K  f64   (one training image after another)
//! labels           M × (len:u32, UTF-8 bytes)
//! requestedK       u32
//! ```
//!
//! All integers and reals are little-endian.

use std::path::Path;

use crate::error::{io_error, Error, Result};
use crate::model::EigenfaceModel;

pub const MAGIC: &[u8; 4] = b"EIGF";
pub const VERSION: u32 = 1;

fn put_u32(out: &mut Vec<u8>, v: usize) -> Result<()> {
    let v = u32::try_from(v).map_err(|_| Error::Model(format!("{v} does not fit in u32")))?;
    out.extend_from_slice(&v.to_le_bytes());
    Ok(())
}

fn put_reals(out: &mut Vec<u8>, xs: &[f64]) {
    for x in xs {
        out.extend_from_slice(&x.to_le_bytes());
    }
}

pub fn encode_model(model: &EigenfaceModel) -> Result<Vec<u8>> {
    let (n, m, k) = (model.pixels(), model.training_count(), model.k());
    let mut out = Vec::with_capacity(24 + 8 * (n * (k + 1) + k * (m + 1)));
    out.extend_from_slice(MAGIC);
    put_u32(&mut out, VERSION as usize)?;
    for v in [model.width, model.height, m, k] {
        put_u32(&mut out, v)?;
    }
    put_reals(&mut out, &model.psi);
    for u in &model.eigenfaces {
        put_reals(&mut out, u);
    }
    put_reals(&mut out, &model.energy_fractions);
    for w in &model.class_projections {
        put_reals(&mut out, w);
    }
    for l in &model.labels {
        put_u32(&mut out, l.len())?;
        out.extend_from_slice(l.as_bytes());
    }
    put_u32(&mut out, model.requested_k)?;
    Ok(out)
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| Error::Model(format!("truncated while reading {what}")))?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()) as usize)
    }

    fn reals(&mut self, len: usize, what: &str) -> Result<Vec<f64>> {
        let bytes = len.checked_mul(8).ok_or_else(|| Error::Model(format!("{what} too large")))?;
        let b = self.take(bytes, what)?;
        Ok(b.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }
}

pub fn decode_model(data: &[u8]) -> Result<EigenfaceModel> {
    let mut r = Reader { data, pos: 0 };
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::Model("bad magic".into()));
    }
    let version = r.u32("version")?;
    if version != VERSION as usize {
        return Err(Error::Model(format!("unsupported version {version}")));
    }
    let width = r.u32("width")?;
    let height = r.u32("height")?;
    let m = r.u32("M")?;
    let k = r.u32("K")?;
    if width == 0 || height == 0 || k > m {
        return Err(Error::Model(format!("bad header {width}x{height}, M={m}, K={k}")));
    }
    let n = width * height;
    let psi = r.reals(n, "psi")?;
    let eigenfaces = (0..k).map(|_| r.reals(n, "eigenfaces")).collect::<Result<Vec<_>>>()?;
    let energy_fractions = r.reals(k, "energy fractions")?;
    let class_projections = (0..m).map(|_| r.reals(k, "class projections")).collect::<Result<Vec<_>>>()?;
    let labels = (0..m)
        .map(|_| {
            let len = r.u32("label length")?;
            let b = r.take(len, "label")?;
            String::from_utf8(b.to_vec()).map_err(|_| Error::Model("label is not UTF-8".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let requested_k = r.u32("requested K")?;
    if r.pos != data.len() {
        return Err(Error::Model(format!("{} trailing bytes", data.len() - r.pos)));
    }
    Ok(EigenfaceModel { width, height, psi, eigenfaces, energy_fractions, class_projections, labels, requested_k })
}

pub fn save_model(path: &Path, model: &EigenfaceModel) -> Result<()> {
    std::fs::write(path, encode_model(model)?).map_err(io_error(path))
}

pub fn load_model(path: &Path) -> Result<EigenfaceModel> {
    decode_model(&std::fs::read(path).map_err(io_error(path))?)
}
