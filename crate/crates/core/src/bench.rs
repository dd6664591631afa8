//! Timing of finite-chain decimation against dense inversion.

use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;

use crate::decim1::surface_gf_finite;
use crate::error::{Error, Result};
use crate::model::{build_dynamical_matrix, ChainParams};
use crate::oracle::dense_gf;

/// Agreement required between the two paths before anything is timed.
pub const CORRECTNESS_GATE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchPoint {
    pub n_sites: usize,
    pub decimation_seconds: f64,
    pub dense_seconds: f64,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub points: Vec<BenchPoint>,
    pub decimation_exponent: f64,
    pub dense_exponent: f64,
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Median seconds per call, timing batches long enough to resolve fast calls.
fn time_median<F: FnMut()>(repetitions: usize, mut f: F) -> f64 {
    let start = Instant::now();
    f();
    let once = start.elapsed().as_secs_f64().max(1e-9);
    let batch = ((2e-3 / once).ceil() as usize).clamp(1, 100_000);
    let samples = (0..repetitions)
        .map(|_| {
            let start = Instant::now();
            for _ in 0..batch {
                f();
            }
            start.elapsed().as_secs_f64() / batch as f64
        })
        .collect();
    median(samples)
}

pub fn run_bench(
    params: &ChainParams,
    sizes: &[usize],
    repetitions: usize,
    omega: Complex64,
) -> Result<BenchReport> {
    if repetitions == 0 {
        return Err(Error::InvalidParameter("repetitions must be positive".into()));
    }
    if sizes.len() < 2 {
        return Err(Error::InvalidParameter("need at least two sizes to fit a scaling".into()));
    }
    let mut points = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let d = build_dynamical_matrix(params, n)?;
        let row = surface_gf_finite(&d, omega)?;
        let dense = dense_gf(&d, omega)?;
        let scale = (0..n).map(|j| dense[(0, j)].norm()).fold(0.0, f64::max);
        let max_rel_error = (0..n)
            .map(|j| (row[j] - dense[(0, j)]).norm() / scale)
            .fold(0.0, f64::max);
        if !(max_rel_error < CORRECTNESS_GATE) {
            return Err(Error::InvalidParameter(format!(
                "decimation and dense inversion disagree by {max_rel_error:e} at N = {n}"
            )));
        }
        let decimation_seconds = time_median(repetitions, || {
            std::hint::black_box(surface_gf_finite(std::hint::black_box(&d), omega).ok());
        });
        let dense_seconds = time_median(repetitions, || {
            std::hint::black_box(dense_gf(std::hint::black_box(&d), omega).ok());
        });
        points.push(BenchPoint {
            n_sites: n,
            decimation_seconds,
            dense_seconds,
            max_rel_error,
        });
    }
    let ns: Vec<f64> = points.iter().map(|p| p.n_sites as f64).collect();
    let dec: Vec<f64> = points.iter().map(|p| p.decimation_seconds).collect();
    let den: Vec<f64> = points.iter().map(|p| p.dense_seconds).collect();
    Ok(BenchReport {
        decimation_exponent: log_log_slope(&ns, &dec),
        dense_exponent: log_log_slope(&ns, &den),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(3)).collect();
        assert!((log_log_slope(&x, &y) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_repetitions_rejected() {
        let p = ChainParams::coupled_cavity(0.0, 1.0, 0.2, 0.0);
        assert!(run_bench(&p, &[10, 20], 0, Complex64::new(0.3, 0.0)).is_err());
    }
}
