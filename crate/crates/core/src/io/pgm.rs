use std::path::{Path, PathBuf};

use super::IoError;

/// Decoded binary greymap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major samples, top row first.
    pub samples: Vec<u16>,
}

impl Pgm {
    /// Samples scaled to `[0, 1]`.
    pub fn normalized(&self) -> Vec<f64> {
        let m = self.maxval as f64;
        self.samples.iter().map(|&v| v as f64 / m).collect()
    }
}

fn skip_space_and_comments(bytes: &[u8], mut pos: usize) -> usize {
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'#' {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
        } else {
            return pos;
        }
    }
}

fn read_uint(bytes: &[u8], pos: usize) -> Result<(usize, usize), IoError> {
    let start = skip_space_and_comments(bytes, pos);
    let mut end = start;
    while end < bytes.len() && bytes[end].is_ascii_digit() {
        end += 1;
    }
    if end == start {
        return Err(IoError::format("PGM", "expected an unsigned integer in header"));
    }
    let text = std::str::from_utf8(&bytes[start..end]).expect("ascii digits");
    let v = text.parse().map_err(|_| IoError::format("PGM", format!("header value {text} out of range")))?;
    Ok((v, end))
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Pgm, IoError> {
    if !bytes.starts_with(b"P5") {
        return Err(IoError::format("PGM", "missing P5 magic"));
    }
    let (width, pos) = read_uint(bytes, 2)?;
    let (height, pos) = read_uint(bytes, pos)?;
    let (maxval, pos) = read_uint(bytes, pos)?;
    if width == 0 || height == 0 {
        return Err(IoError::format("PGM", "zero image dimension"));
    }
    if maxval == 0 || maxval > u16::MAX as usize {
        return Err(IoError::format("PGM", format!("maxval {maxval} outside 1..=65535")));
    }
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(IoError::format("PGM", "missing whitespace before raster"));
    }
    let raster = &bytes[pos + 1..];
    let count = width * height;
    let samples: Vec<u16> = if maxval < 256 {
        if raster.len() < count {
            return Err(IoError::format("PGM", "truncated 8-bit raster"));
        }
        raster[..count].iter().map(|&b| b as u16).collect()
    } else {
        if raster.len() < 2 * count {
            return Err(IoError::format("PGM", "truncated 16-bit raster"));
        }
        raster[..2 * count].chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect()
    };
    if samples.iter().any(|&s| s as usize > maxval) {
        return Err(IoError::format("PGM", "sample exceeds maxval"));
    }
    Ok(Pgm { width, height, maxval: maxval as u16, samples })
}

pub fn encode_pgm(image: &Pgm) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n{}\n", image.width, image.height, image.maxval).into_bytes();
    if image.maxval < 256 {
        out.extend(image.samples.iter().map(|&s| s as u8));
    } else {
        for &s in &image.samples {
            out.extend_from_slice(&s.to_be_bytes());
        }
    }
    out
}

pub fn read_pgm(path: &Path) -> Result<Pgm, IoError> {
    decode_pgm(&std::fs::read(path)?)
}

pub fn write_pgm(path: &Path, image: &Pgm) -> Result<(), IoError> {
    std::fs::write(path, encode_pgm(image))?;
    Ok(())
}

/// Linear min/max scaling of real values onto the 16-bit range.
///
/// Returns the image and the `(min, max)` that map to `0` and `65535`.
pub fn scale_to_u16(values: &[f64], width: usize, height: usize) -> (Pgm, (f64, f64)) {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let samples =
        values.iter().map(|&v| if span > 0.0 { ((v - lo) / span * 65535.0).round() as u16 } else { 0 }).collect();
    (Pgm { width, height, maxval: u16::MAX, samples }, (lo, hi))
}

/// 16-bit preview plus a `<path>.txt` sidecar holding the scaling.
pub fn write_preview(path: &Path, values: &[f64], width: usize, height: usize) -> Result<(f64, f64), IoError> {
    let (img, (lo, hi)) = scale_to_u16(values, width, height);
    write_pgm(path, &img)?;
    std::fs::write(sidecar_path(path), format!("min={lo}\nmax={hi}\nmaxval=65535\n"))?;
    Ok((lo, hi))
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".txt");
    s.into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_header_with_comments() {
        let mut bytes = b"P5\n# made by hand\n3 2\n# depth\n10\n".to_vec();
        bytes.extend([0, 5, 10, 1, 2, 3]);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!((img.width, img.height, img.maxval), (3, 2, 10));
        assert_eq!(&img.normalized()[..3], &[0.0, 0.5, 1.0]);
    }

    #[test]
    fn sixteen_bit_is_big_endian() {
        let mut bytes = b"P5 1 1 65535\n".to_vec();
        bytes.extend([0x12, 0x34]);
        assert_eq!(decode_pgm(&bytes).unwrap().samples, vec![0x1234]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(decode_pgm(b"P2 1 1 255\n\x00").is_err());
        assert!(decode_pgm(b"P5 2 2 255\n\x00").is_err());
        assert!(decode_pgm(b"P5 1 1 70000\n\x00\x00").is_err());
        assert!(decode_pgm(b"P5 1 1 10\n\x0b").is_err());
    }

    #[test]
    fn scaling_spans_full_range() {
        let (img, (lo, hi)) = scale_to_u16(&[-1.0, 0.0, 3.0, 1.0], 2, 2);
        assert_eq!((lo, hi), (-1.0, 3.0));
        assert_eq!(img.samples, vec![0, 16384, 65535, 32768]);
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(w in 1usize..9, h in 1usize..9, maxval in 1u16..=u16::MAX, seed in any::<u64>()) {
            let samples = (0..w * h).map(|i| ((seed.wrapping_mul(i as u64 + 7) >> 17) % (maxval as u64 + 1)) as u16).collect();
            let img = Pgm { width: w, height: h, maxval, samples };
            prop_assert_eq!(decode_pgm(&encode_pgm(&img)).unwrap(), img);
        }
    }
}
