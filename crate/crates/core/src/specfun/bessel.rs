//! Bessel functions of real order and positive real argument.
//!
//! `I` and `K` use Temme's series below x = 2 and Steed's continued fraction
//! above it, both combined with a downward CF1 recurrence. `J` and `Y` use the
//! same scheme up to moderate arguments, Hankel's expansion beyond, and
//! closed spherical forms for half-integer orders.

use core::f64::consts::PI;

use super::gamma::temme_gammas;
use crate::error::{domain, Error, Result};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;
const XMIN: f64 = 2.0;

fn check(mu: f64, x: f64, name: &str) -> Result<()> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(domain(alloc::format!("{name}: order must be finite and >= 0, got {mu}")));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(domain(alloc::format!("{name}: argument must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// Returns (e^-x I_mu(x), e^x K_mu(x)) for x > 0.
pub(crate) fn ik_scaled(mu: f64, x: f64) -> Result<(f64, f64)> {
    let nl = libm::floor(mu + 0.5) as usize;
    let xmu = mu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;

    let mut h = (mu * xi).max(FPMIN);
    let mut b = xi2 * mu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Accuracy { value: f64::NAN, error_estimate: f64::INFINITY });
    }

    let mut ril = FPMIN;
    let mut ripl = h * ril;
    let ril1 = ril;
    let mut fact = mu * xi;
    for _ in 0..nl {
        let ritemp = fact * ril + ripl;
        fact -= xi;
        ripl = fact * ritemp + ril;
        ril = ritemp;
    }
    let f = ripl / ril;

    let (mut rkmu, mut rk1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / libm::sin(pimu) };
        let d = -libm::log(x2);
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { libm::sinh(e) / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = fact * (gam1 * libm::cosh(e) + gam2 * fact2 * d);
        let mut sum = ff;
        let e = libm::exp(e);
        let mut p = 0.5 * e / gampl;
        let mut q = 0.5 / (e * gammi);
        let mut c = 1.0;
        let d = x2 * x2;
        let mut sum1 = p;
        let mut i = 1.0;
        loop {
            ff = (i * ff + p + q) / (i * i - xmu2);
            c *= d / i;
            p /= i - xmu;
            q /= i + xmu;
            let del = c * ff;
            sum += del;
            sum1 += c * (p - i * ff);
            if del.abs() < sum.abs() * EPS || i > 1000.0 {
                break;
            }
            i += 1.0;
        }
        rkmu = sum;
        rk1 = sum1 * xi2;
    } else {
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut h = d;
        let mut delh = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - xmu2;
        let mut q = a1;
        let mut c = a1;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        let mut i = 2.0;
        loop {
            a -= 2.0 * (i - 1.0);
            c = -a * c / i;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh *= b * d - 1.0;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < EPS || i > MAXIT as f64 {
                break;
            }
            i += 1.0;
        }
        h *= a1;
        rkmu = libm::sqrt(PI / (2.0 * x)) / s;
        rk1 = rkmu * (xmu + x + 0.5 - h) * xi;
    }
    let rkmup = xmu * xi * rkmu - rk1;
    // I from the Wronskian, scaled consistently with K
    let rimu = xi / (f * rkmu - rkmup);
    let ri = rimu * ril1 / ril;
    for i in 1..=nl {
        let rktemp = (xmu + i as f64) * xi2 * rk1 + rkmu;
        rkmu = rk1;
        rk1 = rktemp;
    }
    // Steed's branch already works with e^x K, which makes I come out as e^-x I
    if x < XMIN {
        // the Wronskian loses digits here when xmu < 0; the series does not
        Ok((i_series(mu, x) * libm::exp(-x), rkmu * libm::exp(x)))
    } else {
        Ok((ri, rkmu))
    }
}

/// (J_mu, Y_mu) by Temme's series (x < 2) or Steed's method.
fn jy_steed(mu: f64, x: f64) -> Result<(f64, f64)> {
    let nl = if x < XMIN {
        libm::floor(mu + 0.5) as usize
    } else {
        libm::floor(mu - x + 1.5).max(0.0) as usize
    };
    let xmu = mu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    let mut isign = 1.0;
    let mut h = (mu * xi).max(FPMIN);
    let mut b = xi2 * mu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Accuracy { value: f64::NAN, error_estimate: f64::INFINITY });
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = mu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / libm::sin(pimu) };
        let d = -libm::log(x2);
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { libm::sinh(e) / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * libm::cosh(e) + gam2 * fact2 * d);
        let e = libm::exp(e);
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { libm::sin(pimu2) / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut i = 1.0;
        loop {
            ff = (i * ff + p + q) / (i * i - xmu2);
            c *= d / i;
            p /= i - xmu;
            q /= i + xmu;
            let del = c * (ff + r * q);
            sum += del;
            sum1 += c * p - i * del;
            if del.abs() < (1.0 + sum.abs()) * EPS || i > 1000.0 {
                break;
            }
            i += 1.0;
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut i = 2.0;
        loop {
            a += 2.0 * (i - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS || i > MAXIT as f64 {
                break;
            }
            i += 1.0;
        }
        let gam = (p - f) / q;
        let mag = libm::sqrt(w / ((p - f) * gam + q));
        rjmu = if rjl < 0.0 { -mag } else { mag };
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }
    let rj = rjl1 * (rjmu / rjl);
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    Ok((rj, rymu))
}

/// Hankel's asymptotic expansion, valid for x well above mu^2.
fn jy_hankel(mu: f64, x: f64) -> (f64, f64) {
    let four_mu2 = 4.0 * mu * mu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut k = 1usize;
    loop {
        let odd = (2 * k - 1) as f64;
        let next = term * (four_mu2 - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() > term.abs() || next == 0.0 {
            break;
        }
        term = next;
        let sign = if (k / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
        if k.is_multiple_of(2) {
            p += sign * term;
        } else {
            q += sign * term;
        }
        if term.abs() < 1e-18 || k > 200 {
            break;
        }
        k += 1;
    }
    // cos(x - phi) expanded so the reduction of x stays exact
    let phi = (0.5 * mu + 0.25) * PI;
    let (sx, cx) = (libm::sin(x), libm::cos(x));
    let (sp, cp) = (libm::sin(phi), libm::cos(phi));
    let cw = cx * cp + sx * sp;
    let sw = sx * cp - cx * sp;
    let amp = libm::sqrt(2.0 / (PI * x));
    (amp * (p * cw - q * sw), amp * (p * sw + q * cw))
}

fn j_series(mu: f64, x: f64) -> f64 {
    let pref = libm::exp(mu * libm::log(0.5 * x) - libm::lgamma_r(mu + 1.0).0);
    let y = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while k < 500.0 {
        term *= y / (k * (mu + k));
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
        k += 1.0;
    }
    pref * sum
}

fn i_series(mu: f64, x: f64) -> f64 {
    let pref = libm::exp(mu * libm::log(0.5 * x) - libm::lgamma_r(mu + 1.0).0);
    let y = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while k < 500.0 {
        term *= y / (k * (mu + k));
        sum += term;
        if term < EPS * sum {
            break;
        }
        k += 1.0;
    }
    pref * sum
}

fn is_half_integer(mu: f64) -> bool {
    let twice = 2.0 * mu;
    twice == libm::floor(twice) && libm::fmod(twice, 2.0) == 1.0
}

/// Spherical closed forms with upward recurrence; J falls back to its series
/// below the turning point where the recurrence is unstable.
fn jy_half_integer(mu: f64, x: f64) -> (f64, f64) {
    let amp = libm::sqrt(2.0 / (PI * x));
    let (s, c) = (libm::sin(x), libm::cos(x));
    let (mut jm, mut j) = (amp * c, amp * s);
    let (mut ym, mut y) = (amp * s, -amp * c);
    let mut order = 0.5;
    while order < mu {
        let f = 2.0 * order / x;
        let jn = f * j - jm;
        let yn = f * y - ym;
        jm = j;
        j = jn;
        ym = y;
        y = yn;
        order += 1.0;
    }
    if mu > 0.5 && x < mu + 1.0 {
        j = j_series(mu, x);
    }
    (j, y)
}

pub(crate) fn jy(mu: f64, x: f64) -> Result<(f64, f64)> {
    if is_half_integer(mu) && mu < 60.0 {
        Ok(jy_half_integer(mu, x))
    } else if x >= 25.0 + mu * mu {
        Ok(jy_hankel(mu, x))
    } else {
        jy_steed(mu, x)
    }
}

/// Bessel function of the first kind J_mu(x), mu >= 0, x >= 0.
pub fn bessel_j(mu: f64, x: f64) -> Result<f64> {
    check(mu, x, "bessel_j")?;
    if x == 0.0 {
        return Ok(if mu == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(jy(mu, x)?.0)
}

/// Bessel function of the second kind Y_mu(x), mu >= 0, x > 0.
pub fn bessel_y(mu: f64, x: f64) -> Result<f64> {
    check(mu, x, "bessel_y")?;
    if x == 0.0 {
        return Err(Error::Range { what: "bessel_y at 0", log_value: f64::INFINITY });
    }
    Ok(jy(mu, x)?.1)
}

/// e^-x I_mu(x).
pub fn bessel_i_scaled(mu: f64, x: f64) -> Result<f64> {
    check(mu, x, "bessel_i_scaled")?;
    if x == 0.0 {
        return Ok(if mu == 0.0 { 1.0 } else { 0.0 });
    }
    Ok(ik_scaled(mu, x)?.0)
}

/// e^x K_mu(x); infinite at x = 0.
pub fn bessel_k_scaled(mu: f64, x: f64) -> Result<f64> {
    check(mu, x, "bessel_k_scaled")?;
    if x == 0.0 {
        return Err(Error::Range { what: "bessel_k at 0", log_value: f64::INFINITY });
    }
    let k = ik_scaled(mu, x)?.1;
    if !k.is_finite() {
        return Err(Error::Range { what: "bessel_k", log_value: ln_k_small(mu, x) });
    }
    Ok(k)
}

/// Modified Bessel function I_mu(x).
pub fn bessel_i(mu: f64, x: f64) -> Result<f64> {
    let s = bessel_i_scaled(mu, x)?;
    if x > 700.0 {
        let ln = libm::log(s) + x;
        if ln > 709.0 {
            return Err(Error::Range { what: "bessel_i", log_value: ln });
        }
        return Ok(libm::exp(ln));
    }
    Ok(s * libm::exp(x))
}

/// Modified Bessel function K_mu(x), x > 0.
pub fn bessel_k(mu: f64, x: f64) -> Result<f64> {
    let s = bessel_k_scaled(mu, x)?;
    Ok(s * libm::exp(-x))
}

/// Leading small-argument behaviour of ln K_mu(x), mu > 0.
fn ln_k_small(mu: f64, x: f64) -> f64 {
    if mu == 0.0 {
        return libm::log(-libm::log(0.5 * x) - 0.577_215_664_901_532_9);
    }
    libm::lgamma_r(mu).0 + (mu - 1.0) * core::f64::consts::LN_2 - mu * libm::log(x)
}

/// ln I_mu(x), finite for every x > 0 including deep underflow.
pub fn ln_bessel_i(mu: f64, x: f64) -> Result<f64> {
    check(mu, x, "ln_bessel_i")?;
    if x == 0.0 {
        return Ok(if mu == 0.0 { 0.0 } else { f64::NEG_INFINITY });
    }
    if x < 1e-100 {
        return Ok(mu * libm::log(0.5 * x) - libm::lgamma_r(mu + 1.0).0);
    }
    Ok(libm::log(ik_scaled(mu, x)?.0) + x)
}

/// ln K_mu(x), finite for every x > 0 including where K overflows.
pub fn ln_bessel_k(mu: f64, x: f64) -> Result<f64> {
    check(mu, x, "ln_bessel_k")?;
    if x == 0.0 {
        return Err(Error::Range { what: "bessel_k at 0", log_value: f64::INFINITY });
    }
    if x < 1e-100 {
        return Ok(ln_k_small(mu, x));
    }
    let k = ik_scaled(mu, x)?.1;
    if !k.is_finite() {
        return Ok(ln_k_small(mu, x));
    }
    Ok(libm::log(k) - x)
}
