use std::f64::consts::PI;

use crate::error::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

fn lanczos_sum(z: f64) -> f64 {
    // z is the shifted argument x - 1
    let mut sum = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        sum += c / (z + i as f64);
    }
    sum
}

/// Γ(x) for real `x` away from the poles at the non-positive integers.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma_fn of NaN"));
    }
    if x <= 0.0 && x == x.floor() {
        return Err(Error::Pole(x));
    }
    if x.abs() >= 171.0 {
        return Err(Error::Overflow(x));
    }
    // exact factorials keep integer arguments bit-exact
    if x == x.floor() && x <= 25.0 {
        let n = x as u32;
        return Ok((1..n).fold(1.0, |acc, i| acc * i as f64));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma_fn(1.0 - x)?));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    // split the power to keep t^(z + 1/2) finite close to the overflow guard
    let half = t.powf(0.5 * (z + 0.5));
    Ok(SQRT_TWO_PI * half * (half * (-t).exp()) * lanczos_sum(z))
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("ln_gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// Taylor coefficients of 1/Γ(z) about z = 0 (c[0] multiplies z).
pub(crate) const RECIP_GAMMA_TAYLOR: [f64; 28] = [
    1.0,
    0.577_215_664_901_532_860_606_5,
    -0.655_878_071_520_253_881_077,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_501_7,
    -0.042_197_734_555_544_336_748_21,
    -0.009_621_971_527_876_973_562_115,
    0.007_218_943_246_663_099_542_395,
    -0.001_165_167_591_859_065_112_114,
    -0.000_215_241_674_114_950_972_815_7,
    0.000_128_050_282_388_116_186_153_2,
    -0.000_020_134_854_780_788_238_655_69,
    -0.000_001_250_493_482_142_670_657_345,
    0.000_001_133_027_231_981_695_882_374,
    -2.056_338_416_977_607_103_45e-7,
    6.116_095_104_481_415_817_862e-9,
    5.002_007_644_469_222_930_056e-9,
    -1.181_274_570_487_020_144_588e-9,
    1.043_426_711_691_100_510_492e-10,
    7.782_263_439_905_071_254_05e-12,
    -3.696_805_618_642_205_708_188e-12,
    5.100_370_287_454_475_979_015e-13,
    -2.058_326_053_566_506_783_222e-14,
    -5.348_122_539_423_017_982_37e-15,
    1.226_778_628_238_260_790_159e-15,
    -1.181_259_301_697_458_769_514e-16,
    1.186_692_254_751_600_332_58e-18,
    1.412_380_655_318_031_781_556e-18,
];

/// The Temme auxiliary functions for |mu| <= 1/2:
/// g1 = (1/Γ(1-mu) - 1/Γ(1+mu)) / (2 mu), g2 = (1/Γ(1-mu) + 1/Γ(1+mu)) / 2,
/// together with 1/Γ(1+mu) and 1/Γ(1-mu). Summed from the 1/Γ Taylor series so
/// that g1 has no cancellation as mu -> 0.
pub(crate) fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    // 1/Γ(1+x) = sum_k c_k x^(k-1)
    let mut g1 = 0.0;
    let mut g2 = 0.0;
    let mu2 = mu * mu;
    let mut p = 1.0;
    for pair in RECIP_GAMMA_TAYLOR.chunks(2) {
        g2 += pair[0] * p;
        if let Some(c) = pair.get(1) {
            g1 -= c * p;
        }
        p *= mu2;
    }
    let recip_plus = g2 - mu * g1;
    let recip_minus = g2 + mu * g1;
    (g1, g2, recip_plus, recip_minus)
}
