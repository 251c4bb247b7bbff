use std::path::Path;

use crate::io::pgm::{read_pgm, write_pgm, Pgm};
use crate::optics::{GridSpec, IntensityMap};

use super::{AtStage, ExperimentConfig, RunnerError, Stage};

/// Binary amplitude mask: 1 on pixels whose centers lie inside any of the
/// three discs, 0 elsewhere.
///
/// Every disc must lie entirely on the grid.
pub fn make_three_hole_mask(
    grid: &GridSpec,
    hole_diameter: f64,
    centers: &[(f64, f64); 3],
) -> Result<IntensityMap, RunnerError> {
    if !(hole_diameter.is_finite() && hole_diameter >= 0.0) {
        return Err(RunnerError::sanity(Stage::Mask, format!("hole diameter {hole_diameter} is not a length")));
    }
    let r = 0.5 * hole_diameter;
    let (xmin, ymin) = (grid.x(0) - 0.5 * grid.pitch(), grid.y(0) - 0.5 * grid.pitch());
    for &(cx, cy) in centers {
        if cx - r < xmin || cx + r > -xmin || cy - r < ymin || cy + r > -ymin {
            return Err(RunnerError::sanity(Stage::Mask, format!("hole at ({cx}, {cy}) does not fit on the grid")));
        }
    }
    let mut values = vec![0.0; grid.len()];
    for iy in 0..grid.ny() {
        for ix in 0..grid.nx() {
            let (x, y) = (grid.x(ix), grid.y(iy));
            if centers.iter().any(|&(cx, cy)| (x - cx).powi(2) + (y - cy).powi(2) < r * r) {
                values[grid.index(ix, iy)] = 1.0;
            }
        }
    }
    let mask = IntensityMap::new(*grid, values).at(Stage::Mask)?;
    check_not_empty(&mask)?;
    Ok(mask)
}

fn check_not_empty(mask: &IntensityMap) -> Result<(), RunnerError> {
    if mask.values().iter().all(|&v| v == 0.0) {
        return Err(RunnerError::sanity(Stage::Mask, "empty object"));
    }
    Ok(())
}

/// Writes a 0/1 mask as an 8-bit PGM (0 or 255).
pub fn write_mask(path: &Path, mask: &IntensityMap) -> Result<(), RunnerError> {
    let g = mask.grid();
    let img = Pgm {
        width: g.nx(),
        height: g.ny(),
        maxval: 255,
        samples: mask.values().iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u16).collect(),
    };
    write_pgm(path, &img).at(Stage::Mask)
}

/// Reads a PGM as an amplitude transmission in `[0, 1]`.
pub fn load_mask(path: &Path, grid: &GridSpec) -> Result<IntensityMap, RunnerError> {
    let img = read_pgm(path).at(Stage::Mask)?;
    if img.width != grid.nx() || img.height != grid.ny() {
        return Err(RunnerError::sanity(
            Stage::Mask,
            format!("mask is {}×{}, grid is {}×{}", img.width, img.height, grid.nx(), grid.ny()),
        ));
    }
    let mask = IntensityMap::new(*grid, img.normalized()).at(Stage::Mask)?;
    check_not_empty(&mask)?;
    Ok(mask)
}

/// The configured object: the mask file when given, the built-in three holes otherwise.
pub fn object_mask(cfg: &ExperimentConfig) -> Result<IntensityMap, RunnerError> {
    let grid = cfg.grid()?;
    match &cfg.mask_path {
        Some(p) => load_mask(p, &grid),
        None => make_three_hole_mask(&grid, cfg.hole_diameter, &cfg.hole_centers),
    }
}

/// `m(−x, −y)` on the periodic grid.
pub fn inverted(map: &IntensityMap) -> IntensityMap {
    let g = *map.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let mut out = vec![0.0; g.len()];
    for iy in 0..ny {
        for ix in 0..nx {
            out[g.index((nx - ix) % nx, (ny - iy) % ny)] = map.at(ix, iy);
        }
    }
    IntensityMap::new(g, out).expect("same grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(64, 64, 16e-6).unwrap()
    }

    #[test]
    fn zero_diameter_is_empty_object() {
        let err = make_three_hole_mask(&grid(), 0.0, &[(0.0, 0.0); 3]).unwrap_err();
        assert_eq!(err.stage, Stage::Mask);
        assert!(err.to_string().contains("empty object"));
    }

    #[test]
    fn overlapping_holes_form_a_union() {
        let one = make_three_hole_mask(&grid(), 256e-6, &[(8e-6, 8e-6); 3]).unwrap();
        let two = make_three_hole_mask(&grid(), 256e-6, &[(8e-6, 8e-6), (8e-6, 8e-6), (-8e-6, 8e-6)]).unwrap();
        assert!(two.sum() > one.sum());
        assert!(one.values().iter().zip(two.values()).all(|(a, b)| a <= b));
        assert!(one.values().iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn hole_off_grid_is_refused() {
        let err = make_three_hole_mask(&grid(), 256e-6, &[(0.0, 0.0), (0.0, 0.0), (450e-6, 0.0)]).unwrap_err();
        assert!(err.to_string().contains("does not fit"));
    }

    #[test]
    fn inversion_is_an_involution() {
        let m = make_three_hole_mask(&grid(), 100e-6, &[(-200e-6, 40e-6), (72e-6, -100e-6), (0.0, 0.0)]).unwrap();
        let inv = inverted(&m);
        assert_ne!(inv, m);
        assert_eq!(inverted(&inv), m);
        assert_eq!(inv.at(32 - 5, 32 + 3), m.at(32 + 5, 32 - 3));
    }

    #[test]
    fn mask_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("mask.pgm");
        let m = make_three_hole_mask(&grid(), 256e-6, &ExperimentConfig::default().hole_centers).unwrap();
        write_mask(&p, &m).unwrap();
        assert_eq!(load_mask(&p, &grid()).unwrap(), m);
        let small = GridSpec::new(32, 32, 16e-6).unwrap();
        assert!(load_mask(&p, &small).is_err());
    }
}
