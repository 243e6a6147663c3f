//! Orthonormal DST-I and the matching cosine-series evaluation, both routed
//! through a length-2M complex FFT of the odd (resp. even) extension.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    // One planner per worker thread; rustfft caches plans internally.
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(buf: &mut [Complex64]) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    plan.process(buf);
}

/// Orthonormal DST-I of `data` (length M-1):
/// `out[n-1] = sqrt(2/M) * sum_m data[m-1] sin(pi n m / M)`.
///
/// The transform is its own inverse.
pub fn dst1(data: &[Complex64]) -> Vec<Complex64> {
    let m = data.len() + 1;
    let mut buf = vec![Complex64::new(0.0, 0.0); 2 * m];
    for (i, &v) in data.iter().enumerate() {
        buf[i + 1] = v;
        buf[2 * m - i - 1] = -v;
    }
    fft_in_place(&mut buf);
    // FFT of the odd extension gives -2i * sum g sin(...).
    let scale = Complex64::new(0.0, 0.5 * (2.0 / m as f64).sqrt());
    buf[1..m].iter().map(|&y| y * scale).collect()
}

/// Evaluates `sqrt(2/M) * sum_n coeffs[n-1] cos(pi n m / M)` at m = 1..M-1.
pub fn cosine_series(coeffs: &[Complex64]) -> Vec<Complex64> {
    let m = coeffs.len() + 1;
    let mut buf = vec![Complex64::new(0.0, 0.0); 2 * m];
    for (i, &v) in coeffs.iter().enumerate() {
        buf[i + 1] = v;
        buf[2 * m - i - 1] = v;
    }
    fft_in_place(&mut buf);
    let scale = 0.5 * (2.0 / m as f64).sqrt();
    buf[1..m].iter().map(|&y| y * scale).collect()
}
