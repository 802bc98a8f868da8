//! Flat parameter vector serialization: a little-endian u64 length header
//! followed by little-endian f64 values. Used by checkpoints and archive
//! dumps.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub fn write_param_vector<W: Write>(w: &mut W, params: &[f64]) -> std::io::Result<()> {
    w.write_all(&(params.len() as u64).to_le_bytes())?;
    for &p in params {
        w.write_all(&p.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_param_vector<R: Read>(r: &mut R) -> Result<Vec<f64>> {
    let mut len_buf = [0u8; 8];
    r.read_exact(&mut len_buf)?;
    let len = u64::from_le_bytes(len_buf) as usize;
    if len > (1 << 32) {
        return Err(Error::Format(format!("implausible parameter count {len}")));
    }
    let mut params = Vec::with_capacity(len);
    let mut buf = [0u8; 8];
    for _ in 0..len {
        r.read_exact(&mut buf)?;
        params.push(f64::from_le_bytes(buf));
    }
    Ok(params)
}
