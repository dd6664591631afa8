//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use chaingf::model::{ChainParams, EffectiveCouplings};
use chaingf::transient::{growth_abscissa, TransientParams};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random chain with every kind of coupling switched on.
pub fn random_params(rng: &mut ChaCha8Rng) -> ChainParams {
    ChainParams {
        epsilon: rng.random_range(-1.0..1.0),
        t_c: rng.random_range(0.2..1.5),
        phi: rng.random_range(0.0..2.0 * PI),
        gamma: rng.random_range(0.0..2.0),
        pump: rng.random_range(0.0..2.0),
        gamma_nn: rng.random_range(0.0..0.5),
        pump_nn: rng.random_range(0.0..0.5),
    }
}

/// Random chain that is stable for every length: the open-chain continuum
/// stays in the closed lower half plane.
pub fn random_stable_params(rng: &mut ChaCha8Rng) -> ChainParams {
    loop {
        let p = random_params(rng);
        let tp = TransientParams::new(&chaingf::effective_couplings(&p), c(1.0, 0.0));
        if growth_abscissa(&tp) < -1e-3 {
            return p;
        }
    }
}

/// Winding of `omega - D(k)` around the origin, from the accumulated phase
/// of the Bloch symbol on a fine grid. No roots are involved.
pub fn bz_winding(couplings: &EffectiveCouplings, omega: f64, nk: usize) -> i32 {
    let f = |k: f64| Complex64::new(omega, 0.0) - couplings.bloch_symbol(k);
    let mut total = 0.0;
    let mut prev = f(0.0);
    for i in 1..=nk {
        let cur = f(2.0 * PI * i as f64 / nk as f64);
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / (2.0 * PI)).round() as i32
}

/// `(1/2pi) int dk e^{ikd} / (omega - omega_a - 2 t_c cos k)` by the
/// trapezoid rule, which converges geometrically for periodic integrands.
pub fn bz_bulk_gf(omega: Complex64, t_c: f64, omega_a: f64, d: i64, nk: usize) -> Complex64 {
    let mut acc = c(0.0, 0.0);
    for i in 0..nk {
        let k = 2.0 * PI * i as f64 / nk as f64;
        acc += Complex64::from_polar(1.0, k * d as f64) / (omega - omega_a - 2.0 * t_c * k.cos());
    }
    acc / nk as f64
}

/// `(n, z, J_n(z))` evaluated in 50-digit arithmetic.
pub const BESSEL_TABLE: &[(usize, (f64, f64), (f64, f64))] = &[
    (0, (0.0, 0.0), (1.0, 0.0)),
    (1, (0.0, 0.0), (0.0, 0.0)),
    (1, (2.0, 0.0), (0.576_724_807_756_873_387_2, 0.0)),
    (2, (1.0, 1.0), (0.041_579_886_943_962_122_083, 0.247_397_641_513_306_310_51)),
    (0, (3.5, -2.0), (-1.477_820_257_723_913_080_2, 0.274_050_367_178_019_030_29)),
    (5, (10.0, 0.5), (-0.257_642_378_282_837_379_35, -0.052_741_925_995_647_450_726)),
    (3, (-7.0, 4.0), (3.798_651_707_398_233_536_4, -4.572_728_003_424_613_848_4)),
    (12, (25.0, 3.0), (-0.541_515_975_616_860_350_41, -1.048_861_656_508_043_911_4)),
    (1, (60.0, -10.0), (424.802_913_673_290_761_57, 1_042.364_939_115_052_171_5)),
    (40, (30.0, 5.0), (-0.000_195_623_984_384_886_351_7, -0.000_781_575_170_181_029_673_38)),
    (0, (150.0, 20.0), (855_713.240_952_073_801_33, 15_712_453.188_453_446_67)),
    (100, (80.0, 1.0), (3.380_025_136_984_149_446e-6, 3.216_085_615_804_398_134_1e-6)),
    (7, (0.001, 0.002), (4.495_293_506_441_098_082_8e-26, 4.309_276_141_454_285_928_3e-25)),
    (20, (0.0, 5.0), (5.024_239_357_971_805_992_1e-11, 0.0)),
    (1, (8.5, 0.0), (0.273_121_963_674_053_744_27, 0.0)),
    (4, (19.5, -1.5), (0.397_876_378_211_221_800_53, 0.115_074_528_362_631_008_96)),
];

/// Laplace transform `int_0^inf e^{-st} f(t) dt` by composite 8-point
/// Gauss-Legendre panels, truncated once `e^{-s t}` falls below `1e-14`.
pub fn laplace_transform<F: Fn(f64) -> Complex64>(f: F, s: f64, panel: f64) -> Complex64 {
    const X: [f64; 4] = [
        0.183_434_642_495_649_8,
        0.525_532_409_916_329,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_3,
    ];
    const W: [f64; 4] = [
        0.362_683_783_378_362,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let t_end = 14.0 * 10f64.ln() / s;
    let panels = (t_end / panel).ceil() as usize;
    let mut acc = c(0.0, 0.0);
    for p in 0..panels {
        let a = p as f64 * panel;
        let mid = a + panel / 2.0;
        let half = panel / 2.0;
        for i in 0..4 {
            for sign in [-1.0, 1.0] {
                let t = mid + sign * half * X[i];
                acc += W[i] * half * (-s * t).exp() * f(t);
            }
        }
    }
    acc
}

/// Central difference of a complex function of one real variable.
pub fn central_difference<F: Fn(f64) -> Complex64>(f: F, x: f64, h: f64) -> Complex64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

pub fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Least-squares slope of `ys` against `xs`.
pub fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Dense resolvent of a chain whose hopping products are nonzero, computed
/// after the diagonal similarity `S D S^-1` that makes it complex symmetric.
/// Strongly non-reciprocal chains are exponentially ill-conditioned without it.
pub fn balanced_dense_gf(d: &chaingf::model::DynamicalMatrix, omega: Complex64) -> nalgebra::DMatrix<Complex64> {
    let n = d.n_sites();
    let mut s = vec![c(1.0, 0.0); n];
    for j in 0..n - 1 {
        s[j + 1] = s[j] * (d.upper()[j] / d.lower()[j]).sqrt();
    }
    let mut a = nalgebra::DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        a[(j, j)] = omega - d.diagonal()[j];
        if j + 1 < n {
            let h = (d.upper()[j] * d.lower()[j]).sqrt();
            a[(j, j + 1)] = -h;
            a[(j + 1, j)] = -h;
        }
    }
    let g = a.lu().try_inverse().expect("balanced resolvent");
    nalgebra::DMatrix::from_fn(n, n, |i, j| g[(i, j)] * s[j] / s[i])
}
