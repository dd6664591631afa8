//! Bessel functions of the first kind for integer order and complex argument.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 1000;
pub const MAX_ARG: f64 = 1000.0;

/// Arguments up to this modulus use the ascending series.
pub const SERIES_RADIUS: f64 = 8.0;

const RESCALE_ABOVE: f64 = 1e250;

/// `J_n(z)`.
pub fn bessel_j_complex(order: usize, z: Complex64) -> Result<Complex64> {
    if order > MAX_ORDER || !(z.norm() <= MAX_ARG) {
        return Err(Error::BesselDomain { order, z });
    }
    let v = if z.norm() <= SERIES_RADIUS {
        series(order, z)
    } else {
        miller(order, z)
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::BesselDomain { order, z })
    }
}

fn series(n: usize, z: Complex64) -> Complex64 {
    let half = z * 0.5;
    let mut lead = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        lead *= half / k as f64;
    }
    if lead == Complex64::new(0.0, 0.0) {
        return lead;
    }
    let q = -half * half;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    lead * sum
}

/// Backward recurrence from well above `max(n, |z|)`, normalised with the
/// generating-function identity `exp(-+ i z) = J_0 + 2 sum_k (-+ i)^k J_k`.
/// The sign is chosen so that `|exp(-+ i z)| >= 1`, which keeps the sum free
/// of cancellation.
fn miller(n: usize, z: Complex64) -> Complex64 {
    let r = z.norm();
    let top = (n as f64).max(r);
    let start = (top + 40.0 + (40.0 * top).sqrt()).ceil() as usize;
    let phase = if z.im >= 0.0 {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let two_over_z = 2.0 / z;

    let mut above = Complex64::new(0.0, 0.0);
    let mut current = Complex64::new(1e-30, 0.0);
    let mut power = phase.powu(start as u32);
    let mut norm_sum = Complex64::new(0.0, 0.0);
    let mut wanted = Complex64::new(0.0, 0.0);
    let mut shifts = 0i32;
    for k in (1..=start).rev() {
        norm_sum += 2.0 * power * current;
        if k == n {
            wanted = current;
        }
        let below = two_over_z * k as f64 * current - above;
        above = current;
        current = below;
        power /= phase;
        if current.norm() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            current *= s;
            above *= s;
            norm_sum *= s;
            if k <= n {
                shifts += 1;
            }
        }
    }
    norm_sum += current;
    if n == 0 {
        wanted = current;
    }
    if wanted == Complex64::new(0.0, 0.0) {
        return wanted;
    }
    // assembled in logs: the pieces can sit far outside the f64 range
    let log = wanted.ln() - norm_sum.ln() + phase * z - shifts as f64 * RESCALE_ABOVE.ln();
    log.exp()
}
