use num_complex::Complex64;
pub use rustfft::FftDirection;
use rustfft::FftPlanner;

/// Unnormalized 2-D DFT of a row-major `nx`×`ny` buffer, in place.
pub(crate) fn fft2_in_place(data: &mut [Complex64], nx: usize, ny: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), nx * ny);
    let mut planner = FftPlanner::new();
    planner.plan_fft(nx, direction).process(data);
    let col = planner.plan_fft(ny, direction);
    let mut column = vec![Complex64::default(); ny];
    for ix in 0..nx {
        for (iy, c) in column.iter_mut().enumerate() {
            *c = data[iy * nx + ix];
        }
        col.process(&mut column);
        for (iy, c) in column.iter().enumerate() {
            data[iy * nx + ix] = *c;
        }
    }
}

/// Cyclic translation: sample `(ix, iy)` moves to `(ix + sx, iy + sy)` modulo the grid.
pub fn roll<T: Copy>(data: &[T], nx: usize, ny: usize, sx: isize, sy: isize) -> Vec<T> {
    let mut out = data.to_vec();
    let sx = sx.rem_euclid(nx as isize) as usize;
    let sy = sy.rem_euclid(ny as isize) as usize;
    for iy in 0..ny {
        let ty = (iy + sy) % ny;
        for ix in 0..nx {
            out[ty * nx + (ix + sx) % nx] = data[iy * nx + ix];
        }
    }
    out
}

/// DFT over centered indices:
/// `out[m] = Σ_i in[i] · exp(±2πi (m_x i_x / nx + m_y i_y / ny))`, with `i, m`
/// running over `[-n/2, n/2)` and the sign picked by `direction`
/// (`Forward` is `−`, `Inverse` is `+`). No normalization.
pub fn centered_dft2(data: &[Complex64], nx: usize, ny: usize, direction: FftDirection) -> Vec<Complex64> {
    let (hx, hy) = ((nx / 2) as isize, (ny / 2) as isize);
    let mut buf = roll(data, nx, ny, hx, hy);
    fft2_in_place(&mut buf, nx, ny, direction);
    roll(&buf, nx, ny, hx, hy)
}

/// Signed DFT frequency index for bin `k` of an `n`-point transform.
pub(crate) fn signed_bin(k: usize, n: usize) -> f64 {
    if k < n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Periodic translation by `(dx, dy)` samples using the Fourier shift theorem.
///
/// Integer shifts reduce to an exact [`roll`].
pub fn shift_periodic(data: &[Complex64], nx: usize, ny: usize, dx: f64, dy: f64) -> Vec<Complex64> {
    let (rx, ry) = (dx.round(), dy.round());
    if (dx - rx).abs() < 1e-9 && (dy - ry).abs() < 1e-9 {
        return roll(data, nx, ny, rx as isize, ry as isize);
    }
    let mut buf = data.to_vec();
    fft2_in_place(&mut buf, nx, ny, FftDirection::Forward);
    let tau = std::f64::consts::TAU;
    for ky in 0..ny {
        let vy = signed_bin(ky, ny) / ny as f64;
        for kx in 0..nx {
            let vx = signed_bin(kx, nx) / nx as f64;
            buf[ky * nx + kx] *= Complex64::cis(-tau * (vx * dx + vy * dy));
        }
    }
    fft2_in_place(&mut buf, nx, ny, FftDirection::Inverse);
    let norm = 1.0 / (nx * ny) as f64;
    buf.iter_mut().for_each(|c| *c *= norm);
    buf
}
