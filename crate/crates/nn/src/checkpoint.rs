//! Versioned binary parameter blobs.
//!
//! Layout, little-endian: magic `DSXP`, format version `u32`, tensor count `u32`, then per
//! tensor its name (`u32` length and UTF-8 bytes), rows and cols (`u64` each), then all tensor
//! values as `f64` in table order.

use dirsimplex::{Matrix, Scalar};

use crate::error::{Error, Result};
use crate::model::Model;

const MAGIC: &[u8; 4] = b"DSXP";
pub const VERSION: u32 = 1;

pub fn save<T: Scalar>(model: &Model<T>) -> Vec<u8> {
    let mut b = Vec::new();
    b.extend_from_slice(MAGIC);
    b.extend_from_slice(&VERSION.to_le_bytes());
    b.extend_from_slice(&(model.params().len() as u32).to_le_bytes());
    for (name, p) in model.names().iter().zip(model.params()) {
        b.extend_from_slice(&(name.len() as u32).to_le_bytes());
        b.extend_from_slice(name.as_bytes());
        b.extend_from_slice(&(p.rows() as u64).to_le_bytes());
        b.extend_from_slice(&(p.cols() as u64).to_le_bytes());
    }
    for p in model.params() {
        for v in p.as_slice() {
            b.extend_from_slice(&v.to_f64_lossy().to_le_bytes());
        }
    }
    b
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let s = self.bytes.get(self.pos..self.pos + n).ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", self.pos)))?;
        self.pos += n;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Loads parameters into `model`; names and shapes must match its layout exactly.
pub fn load<T: Scalar>(model: &mut Model<T>, bytes: &[u8]) -> Result<()> {
    let mut c = Cursor { bytes, pos: 0 };
    if c.take(4)? != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let count = c.u32()? as usize;
    if count != model.params().len() {
        return Err(Error::Checkpoint(format!("{count} tensors, model has {}", model.params().len())));
    }
    let mut shapes = Vec::with_capacity(count);
    for i in 0..count {
        let len = c.u32()? as usize;
        let name = std::str::from_utf8(c.take(len)?).map_err(|_| Error::Checkpoint("tensor name is not UTF-8".into()))?;
        let shape = (c.u64()? as usize, c.u64()? as usize);
        if name != model.names()[i] || shape != model.params()[i].shape() {
            return Err(Error::Checkpoint(format!("tensor {i} is {name} {shape:?}, model expects {} {:?}", model.names()[i], model.params()[i].shape())));
        }
        shapes.push(shape);
    }
    let mut loaded = Vec::with_capacity(count);
    for (r, cols) in shapes {
        let data = (0..r * cols).map(|_| c.take(8).map(|s| T::from_f64_lossy(f64::from_le_bytes(s.try_into().unwrap())))).collect::<Result<Vec<T>>>()?;
        loaded.push(Matrix::from_vec(r, cols, data));
    }
    if c.pos != bytes.len() {
        return Err(Error::Checkpoint(format!("{} trailing bytes", bytes.len() - c.pos)));
    }
    model.params_mut().clone_from_slice(&loaded);
    Ok(())
}
