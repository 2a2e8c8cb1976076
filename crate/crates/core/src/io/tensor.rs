//! Binary feature tensors: magic `VXFT`, `u32` LE height, width, dim, then
//! `f64` LE values in row-major token order.

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::FeatureGrid;

use super::{read_bytes, write_bytes};

pub const TENSOR_MAGIC: &[u8; 4] = b"VXFT";
const HEADER_LEN: usize = 16;

pub fn write_tensor_bytes(grid: &FeatureGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * grid.data().len());
    out.extend_from_slice(TENSOR_MAGIC);
    for d in [grid.height(), grid.width(), grid.dim()] {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in grid.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn read_tensor_bytes(bytes: &[u8]) -> Result<FeatureGrid> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(None, "tensor file shorter than its header"));
    }
    if &bytes[..4] != TENSOR_MAGIC {
        return Err(Error::format(None, "bad tensor magic"));
    }
    let dim_at = |i: usize| {
        let b: [u8; 4] = bytes[4 + 4 * i..8 + 4 * i].try_into().expect("4 bytes");
        u32::from_le_bytes(b) as usize
    };
    let (h, w, d) = (dim_at(0), dim_at(1), dim_at(2));
    let n = h
        .checked_mul(w)
        .and_then(|x| x.checked_mul(d))
        .ok_or_else(|| Error::format(None, "tensor dimensions overflow"))?;
    let body = &bytes[HEADER_LEN..];
    if body.len() != n * 8 {
        return Err(Error::format(
            None,
            format!("expected {} data bytes for {h}×{w}×{d}, found {}", n * 8, body.len()),
        ));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    FeatureGrid::new(h, w, d, data).map_err(|e| Error::format(None, e.to_string()))
}

pub fn read_tensor(path: &Path) -> Result<FeatureGrid> {
    read_tensor_bytes(&read_bytes(path)?)
}

pub fn write_tensor(path: &Path, grid: &FeatureGrid) -> Result<()> {
    write_bytes(path, &write_tensor_bytes(grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_layout() {
        let g = FeatureGrid::new(1, 2, 1, vec![1.5, -2.0]).unwrap();
        let bytes = write_tensor_bytes(&g);
        assert_eq!(&bytes[..4], b"VXFT");
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(&bytes[16..24], &1.5f64.to_le_bytes());
        assert_eq!(read_tensor_bytes(&bytes).unwrap(), g);
    }

    #[test]
    fn rejects_malformed() {
        let g = FeatureGrid::new(1, 2, 1, vec![1.5, -2.0]).unwrap();
        let mut bytes = write_tensor_bytes(&g);
        assert!(read_tensor_bytes(&bytes[..20]).is_err());
        bytes.push(0);
        assert!(read_tensor_bytes(&bytes).is_err());
        let mut bad = write_tensor_bytes(&g);
        bad[0] = b'X';
        assert!(read_tensor_bytes(&bad).is_err());
        let mut nan = write_tensor_bytes(&g);
        nan[16..24].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(read_tensor_bytes(&nan).is_err());
    }
}
