//! Small estimators shared by the detectors and the measure experiments.

use alloc::vec::Vec;

/// Mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residuals; 0 for two points.
    pub slope_se: f64,
}

/// Ordinary least squares y = a + b x.
pub fn least_squares(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_se = if n > 2 {
        let rss: f64 = x.iter().zip(y).map(|(a, b)| {
            let e = b - intercept - slope * a;
            e * e
        }).sum();
        libm::sqrt(rss / (nf - 2.0) / sxx)
    } else {
        0.0
    };
    Some(LinearFit { slope, intercept, slope_se })
}

/// Jackknife standard error of `stat` over leave-one-out subsamples.
pub fn jackknife_se<T: Clone>(items: &[T], mut stat: impl FnMut(&[T]) -> Option<f64>) -> Option<f64> {
    let n = items.len();
    if n < 2 {
        return None;
    }
    let mut buf: Vec<T> = Vec::with_capacity(n - 1);
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        buf.clear();
        buf.extend(items[..i].iter().cloned());
        buf.extend(items[i + 1..].iter().cloned());
        vals.push(stat(&buf)?);
    }
    let m = vals.iter().sum::<f64>() / n as f64;
    let ss: f64 = vals.iter().map(|v| (v - m) * (v - m)).sum();
    Some(libm::sqrt(ss * (n as f64 - 1.0) / n as f64))
}

/// Pairwise (cascade) summation, independent of thread count.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}
