use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::stats::{jackknife_se, least_squares};

/// Slope estimate with a symmetric 95% half-width; `estimate` is `None`
/// when the set is empty (or too sparse to fit).
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionEstimate {
    pub estimate: Option<f64>,
    pub half_width: f64,
    /// Box counts (or mean counts) per scale.
    pub counts: Vec<f64>,
}

const Z95: f64 = 1.959_963_984_540_054;

/// Box-counting slope of ln N(s) against -ln s. At scale s the cube
/// [-1, 1]^nu is split into half-open boxes of side 2s, so s = 1/m gives
/// m^nu boxes.
pub fn box_dimension(points: &[f64], nu: usize, scales: &[f64]) -> Result<DimensionEstimate> {
    if scales.len() < 2 {
        return Err(invalid("box counting needs at least two scales"));
    }
    if scales.iter().any(|&s| !(s > 0.0 && s <= 1.0)) {
        return Err(invalid("scales must lie in (0, 1]"));
    }
    if nu == 0 || !points.len().is_multiple_of(nu) {
        return Err(invalid("point buffer does not match the dimension"));
    }
    if points.is_empty() {
        return Ok(DimensionEstimate { estimate: None, half_width: f64::NAN, counts: alloc::vec![0.0; scales.len()] });
    }
    let mut counts = Vec::with_capacity(scales.len());
    for &s in scales {
        let side = 2.0 * s;
        let mut boxes = BTreeSet::new();
        for p in points.chunks_exact(nu) {
            let key: Vec<i64> = p.iter().map(|&x| libm::floor((x + 1.0) / side) as i64).collect();
            boxes.insert(key);
        }
        counts.push(boxes.len() as f64);
    }
    let x: Vec<f64> = scales.iter().map(|&s| -libm::log(s)).collect();
    let y: Vec<f64> = counts.iter().map(|&c| libm::log(c)).collect();
    let fit = least_squares(&x, &y).ok_or_else(|| invalid("scales must be distinct"))?;
    Ok(DimensionEstimate { estimate: Some(fit.slope), half_width: Z95 * fit.slope_se, counts })
}

fn mean_count_slope(x: &[f64], rows: &[Vec<usize>]) -> Option<f64> {
    let r = rows.len() as f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (k, &xk) in x.iter().enumerate() {
        let m = rows.iter().map(|c| c[k] as f64).sum::<f64>() / r;
        if m > 0.0 {
            xs.push(xk);
            ys.push(libm::log(m));
        }
    }
    least_squares(&xs, &ys).map(|f| f.slope)
}

/// Dimension from occupied-cell counts of many replicas: slope of the log
/// mean count against -ln r_n, with a jackknife half-width over replicas.
/// `counts[k][i]` is replica k's count at the level with radius
/// `exp(ln_radii[i])`.
pub fn dimension_from_counts(ln_radii: &[f64], counts: &[Vec<usize>]) -> Result<DimensionEstimate> {
    if ln_radii.len() < 2 {
        return Err(invalid("dimension needs at least two levels"));
    }
    if counts.iter().any(|c| c.len() != ln_radii.len()) {
        return Err(invalid("count rows do not match the levels"));
    }
    let x: Vec<f64> = ln_radii.iter().map(|l| -l).collect();
    let r = counts.len().max(1) as f64;
    let means = (0..x.len()).map(|k| counts.iter().map(|c| c[k] as f64).sum::<f64>() / r).collect();
    let estimate = mean_count_slope(&x, counts);
    let half_width = match estimate {
        Some(_) => jackknife_se(counts, |sub| mean_count_slope(&x, sub)).map_or(f64::NAN, |se| Z95 * se),
        None => f64::NAN,
    };
    Ok(DimensionEstimate { estimate, half_width, counts: means })
}
