//! Globally adaptive Gauss-Kronrod (10/21) quadrature over a list of panels.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_297_900,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

/// Tolerances and the subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-12, abs_tol: 0.0, max_intervals: 10_000 }
    }
}

/// One 21-point Kronrod rule on [a, b]: (estimate, |K21 - G10|).
pub fn gk21<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c)?;
    let mut k = fc * WGK[10];
    let mut g = 0.0;
    for j in 0..10 {
        let dx = h * XGK[j];
        let s = f(c - dx)? + f(c + dx)?;
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Ok((k * h, ((k - g) * h).abs()))
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Integrates `f` over consecutive panels `[b_0, b_1], [b_1, b_2], ...`,
/// bisecting the worst piece until the global error target is met.
pub fn integrate<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    breaks: &[f64],
    opts: QuadOptions,
) -> Result<QuadResult> {
    let mut heap = BinaryHeap::with_capacity(breaks.len());
    let mut value = 0.0;
    let mut error = 0.0;
    let mut frozen: alloc::vec::Vec<Piece> = alloc::vec::Vec::new();
    for w in breaks.windows(2) {
        let (v, e) = gk21(&mut f, w[0], w[1])?;
        value += v;
        error += e;
        heap.push(Piece { a: w[0], b: w[1], value: v, error: e });
    }
    let mut intervals = heap.len();
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            let value = heap.iter().chain(frozen.iter()).map(|p| p.value).sum();
            return Ok(QuadResult { value, error, intervals });
        }
        let Some(worst) = heap.pop() else {
            return Err(Error::Accuracy { value, error_estimate: error });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if intervals >= opts.max_intervals {
            return Err(Error::Accuracy { value, error_estimate: error });
        }
        if mid <= worst.a || mid >= worst.b {
            // cannot split further; keep its error but stop refining it
            let frozen_err: f64 = worst.error + frozen.iter().map(|p| p.error).sum::<f64>();
            if heap.is_empty() || frozen_err > target {
                return Err(Error::Accuracy { value, error_estimate: error });
            }
            frozen.push(worst);
            continue;
        }
        let (v1, e1) = gk21(&mut f, worst.a, mid)?;
        let (v2, e2) = gk21(&mut f, mid, worst.b)?;
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        intervals += 1;
        heap.push(Piece { a: worst.a, b: mid, value: v1, error: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, error: e2 });
    }
}
