use crate::error::{domain, Result};

/// Taylor coefficients of 1/Gamma(1 + x) about x = 0.
const RECIP_GAMMA: [f64; 27] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
];

/// Gamma(x) for x > 0. Exact for small positive integers.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("gamma_fn requires a finite positive argument"));
    }
    if x <= 21.0 && x == libm::floor(x) {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return Ok(f);
    }
    Ok(libm::tgamma(x))
}

/// ln Gamma(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain("ln_gamma requires a finite positive argument"));
    }
    Ok(libm::lgamma_r(x).0)
}

/// The four Temme auxiliaries for |xmu| <= 1/2:
/// (gam1, gam2, 1/Gamma(1 + xmu), 1/Gamma(1 - xmu)).
pub(crate) fn temme_gammas(xmu: f64) -> (f64, f64, f64, f64) {
    let mut even = 0.0;
    let mut odd = 0.0;
    let mut pw = 1.0;
    for (k, c) in RECIP_GAMMA.iter().enumerate() {
        if k % 2 == 0 {
            even += c * pw;
        } else {
            odd += c * pw;
            pw *= xmu * xmu;
        }
    }
    // odd holds sum over odd k of c_k xmu^(k-1)
    let gampl = even + odd * xmu;
    let gammi = even - odd * xmu;
    (-odd, even, gampl, gammi)
}

pub(crate) fn digamma_int(n: u32) -> f64 {
    const EULER: f64 = 0.577_215_664_901_532_9;
    (1..n).fold(-EULER, |acc, k| acc + 1.0 / k as f64)
}
