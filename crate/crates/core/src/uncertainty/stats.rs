//! Normal quantiles, truncated-Gaussian intervals and summary statistics.

use statrs::function::erf::erfc;

use super::UncertaintyError;

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile: Acklam's rational approximation (relative
/// error below 1.2e-9) polished by one Halley step.
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00, 3.754408661907416e+00];
    const P_LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let e = normal_cdf(x) - p;
    let u = e / normal_pdf(x);
    x - u / (1.0 + 0.5 * x * u)
}

/// Standard deviation that makes `nominal·(1 ± fraction)` the central
/// interval of probability `level`.
pub fn sigma_from_calibration(nominal: f64, fraction: f64, level: f64) -> Result<f64, UncertaintyError> {
    if !(nominal > 0.0) || !(fraction >= 0.0) || !(level > 0.0 && level < 1.0) {
        return Err(UncertaintyError::Calibration { nominal, fraction, level });
    }
    let z = normal_quantile(0.5 * (1.0 + level));
    Ok(fraction * nominal / z)
}

/// Normal(mean, sigma) conditioned on `x >= lower`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedNormal {
    pub mean: f64,
    pub sigma: f64,
    pub lower: f64,
}

impl TruncatedNormal {
    fn mass_below_lower(&self) -> f64 {
        normal_cdf((self.lower - self.mean) / self.sigma)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if self.sigma == 0.0 {
            return if x >= self.mean { 1.0 } else { 0.0 };
        }
        if x < self.lower {
            return 0.0;
        }
        let a = self.mass_below_lower();
        (normal_cdf((x - self.mean) / self.sigma) - a) / (1.0 - a)
    }

    pub fn quantile(&self, u: f64) -> f64 {
        if self.sigma == 0.0 {
            return self.mean;
        }
        let a = self.mass_below_lower();
        (self.mean + self.sigma * normal_quantile(a + u * (1.0 - a))).max(self.lower)
    }

    /// Equal-tailed interval holding probability `rho`.
    pub fn central_interval(&self, rho: f64) -> (f64, f64) {
        (self.quantile(0.5 * (1.0 - rho)), self.quantile(0.5 * (1.0 + rho)))
    }
}

/// Half-width of the normal-approximation 95% interval of a proportion.
pub fn binomial_radius95(p_hat: f64, n: usize) -> f64 {
    1.959963984540054 * (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

/// Mean and standard error; infinite samples propagate to an infinite mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if !mean.is_finite() || xs.len() < 2 {
        return (mean, if mean.is_finite() { 0.0 } else { f64::NAN });
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Linear-interpolation sample quantile on an ascending slice; +inf entries
/// sort last.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let (lo, hi) = (h.floor() as usize, h.ceil() as usize);
    if lo == hi || sorted[lo] == sorted[hi] {
        return sorted[lo];
    }
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}
