use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::IoError;
use crate::optics::{ComplexField, GridSpec, IntensityMap};

/// Path of the text header that accompanies a raw dump: `name.f64` → `name.hdr`.
pub fn header_path(path: &Path) -> PathBuf {
    path.with_extension("hdr")
}

fn write_header(path: &Path, grid: &GridSpec, wavelength: Option<f64>, format: &str) -> Result<(), IoError> {
    let mut text = format!("format={format}\nnx={}\nny={}\npitch={}\n", grid.nx(), grid.ny(), grid.pitch());
    if let Some(w) = wavelength {
        text.push_str(&format!("wavelength={w}\n"));
    }
    std::fs::write(header_path(path), text)?;
    Ok(())
}

fn read_header(path: &Path) -> Result<BTreeMap<String, String>, IoError> {
    let text = std::fs::read_to_string(header_path(path))?;
    Ok(text
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect())
}

fn header_value<T: std::str::FromStr>(h: &BTreeMap<String, String>, key: &str) -> Result<T, IoError> {
    h.get(key)
        .ok_or_else(|| IoError::format("raw header", format!("missing {key}")))?
        .parse()
        .map_err(|_| IoError::format("raw header", format!("bad {key}")))
}

fn header_grid(h: &BTreeMap<String, String>) -> Result<GridSpec, IoError> {
    GridSpec::new(header_value(h, "nx")?, header_value(h, "ny")?, header_value(h, "pitch")?)
        .map_err(|e| IoError::format("raw header", e.to_string()))
}

/// Interleaved `(re, im)` little-endian float64, row-major.
pub fn write_complex_field(path: &Path, field: &ComplexField) -> Result<(), IoError> {
    let mut bytes = Vec::with_capacity(16 * field.data().len());
    for c in field.data() {
        bytes.extend_from_slice(&c.re.to_le_bytes());
        bytes.extend_from_slice(&c.im.to_le_bytes());
    }
    std::fs::write(path, bytes)?;
    write_header(path, field.grid(), Some(field.wavelength()), "complex-f64-le-interleaved")
}

pub fn read_complex_field(path: &Path) -> Result<ComplexField, IoError> {
    let h = read_header(path)?;
    let grid = header_grid(&h)?;
    let wavelength: f64 = header_value(&h, "wavelength")?;
    let bytes = std::fs::read(path)?;
    if bytes.len() != 16 * grid.len() {
        return Err(IoError::format("raw field", "byte count does not match header"));
    }
    let data = bytes
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    ComplexField::new(grid, wavelength, data).map_err(|e| IoError::format("raw field", e.to_string()))
}

/// Real map as little-endian float64, row-major.
pub fn write_real_map(path: &Path, map: &IntensityMap, wavelength: Option<f64>) -> Result<(), IoError> {
    let bytes: Vec<u8> = map.values().iter().flat_map(|v| v.to_le_bytes()).collect();
    std::fs::write(path, bytes)?;
    write_header(path, map.grid(), wavelength, "f64-le")
}

pub fn read_real_map(path: &Path) -> Result<IntensityMap, IoError> {
    let h = read_header(path)?;
    let grid = header_grid(&h)?;
    let bytes = std::fs::read(path)?;
    if bytes.len() != 8 * grid.len() {
        return Err(IoError::format("raw map", "byte count does not match header"));
    }
    let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    IntensityMap::new(grid, values).map_err(|e| IoError::format("raw map", e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::new(4, 2, 1.5e-5).unwrap();
        let f = ComplexField::from_fn(grid, 532e-9, |x, y| Complex64::new(x * 1e5 + 0.1, -y * 3e4)).unwrap();
        let p = dir.path().join("pump.f64");
        write_complex_field(&p, &f).unwrap();
        assert_eq!(std::fs::metadata(&p).unwrap().len(), 8 * 16);
        assert_eq!(read_complex_field(&p).unwrap(), f);
        let hdr = std::fs::read_to_string(header_path(&p)).unwrap();
        assert!(hdr.contains("nx=4\nny=2\npitch=0.000015\nwavelength=0.000000532"));
    }

    #[test]
    fn map_roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let grid = GridSpec::new(2, 2, 1.0).unwrap();
        let m = IntensityMap::new(grid, vec![0.1, -2.0, f64::MIN_POSITIVE, 7e300]).unwrap();
        let p = dir.path().join("g.f64");
        write_real_map(&p, &m, None).unwrap();
        assert_eq!(read_real_map(&p).unwrap(), m);
    }
}
