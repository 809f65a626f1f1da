//! IDX reader for MNIST-style image and label files (uncompressed, big-endian).

use std::fs;
use std::path::Path;

use crate::error::{AganError, Result};
use crate::nn::Matrix;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| AganError::Format("truncated IDX header".into()))
}

/// Parses an image file into an `n × (rows·cols)` matrix of pixels scaled to [0, 1],
/// keeping at most `max_images` images.
pub fn parse_idx_images(bytes: &[u8], max_images: usize) -> Result<Matrix> {
    let magic = read_u32(bytes, 0)?;
    if magic != IMAGE_MAGIC {
        return Err(AganError::Format(format!("bad image magic {magic:#010x}")));
    }
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    let dim = rows * cols;
    let n = count.min(max_images);
    let body = &bytes[16..];
    if body.len() < n * dim {
        return Err(AganError::Format(format!(
            "truncated image data: need {} bytes, found {}",
            n * dim,
            body.len()
        )));
    }
    let data = body[..n * dim].iter().map(|&p| p as f64 / 255.0).collect();
    Matrix::from_vec(n, dim, data)
}

pub fn parse_idx_labels(bytes: &[u8], max_items: usize) -> Result<Vec<u8>> {
    let magic = read_u32(bytes, 0)?;
    if magic != LABEL_MAGIC {
        return Err(AganError::Format(format!("bad label magic {magic:#010x}")));
    }
    let n = (read_u32(bytes, 4)? as usize).min(max_items);
    let body = &bytes[8..];
    if body.len() < n {
        return Err(AganError::Format("truncated label data".into()));
    }
    Ok(body[..n].to_vec())
}

pub fn load_mnist_subset(path: &Path, max_images: usize) -> Result<Matrix> {
    parse_idx_images(&fs::read(path)?, max_images)
}

pub fn load_mnist_labels(path: &Path, max_items: usize) -> Result<Vec<u8>> {
    parse_idx_labels(&fs::read(path)?, max_items)
}

/// Serializes images (each `rows·cols` bytes) to the IDX image layout.
pub fn encode_idx_images(images: &[Vec<u8>], rows: usize, cols: usize) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    for v in [IMAGE_MAGIC, images.len() as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    for img in images {
        if img.len() != rows * cols {
            return Err(AganError::Dimension {
                expected: rows * cols,
                found: img.len(),
            });
        }
        out.extend_from_slice(img);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn header(magic: u32, dims: &[u32]) -> Vec<u8> {
        let mut b = magic.to_be_bytes().to_vec();
        for d in dims {
            b.extend_from_slice(&d.to_be_bytes());
        }
        b
    }

    #[test]
    fn accepts_standard_header() {
        let mut bytes = header(IMAGE_MAGIC, &[2, 28, 28]);
        bytes.extend(std::iter::repeat_n(255u8, 784));
        bytes.extend(std::iter::repeat_n(0u8, 784));
        let m = parse_idx_images(&bytes, 10).unwrap();
        assert_eq!(m.shape(), (2, 784));
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(1, 783), 0.0);
        assert_eq!(parse_idx_images(&bytes, 1).unwrap().rows(), 1);
    }

    #[test]
    fn rejects_wrong_magic_and_truncation() {
        let mut bytes = header(LABEL_MAGIC, &[1, 28, 28]);
        bytes.extend(vec![0u8; 784]);
        assert!(matches!(
            parse_idx_images(&bytes, 1),
            Err(AganError::Format(_))
        ));
        let mut bytes = header(IMAGE_MAGIC, &[1, 28, 28]);
        bytes.extend(vec![0u8; 100]);
        assert!(matches!(
            parse_idx_images(&bytes, 1),
            Err(AganError::Format(_))
        ));
        assert!(matches!(
            parse_idx_images(&bytes[..6], 1),
            Err(AganError::Format(_))
        ));
    }

    #[test]
    fn labels_parse() {
        let mut bytes = header(LABEL_MAGIC, &[3]);
        bytes.extend([7u8, 2, 1]);
        assert_eq!(parse_idx_labels(&bytes, 10).unwrap(), vec![7, 2, 1]);
        assert!(parse_idx_labels(&header(IMAGE_MAGIC, &[0]), 1).is_err());
    }

    #[test]
    fn encode_then_parse() {
        let imgs = vec![vec![0u8, 51, 102, 255], vec![255u8, 0, 0, 0]];
        let m = parse_idx_images(&encode_idx_images(&imgs, 2, 2).unwrap(), 5).unwrap();
        assert_eq!(m.row(0), &[0.0, 0.2, 0.4, 1.0]);
    }
}
