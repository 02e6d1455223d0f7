//! Small statistics kit: two-sample comparison and simple linear regression.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        None
    } else {
        Some(xs.iter().sum::<f64>() / xs.len() as f64)
    }
}

/// Unbiased sample variance; `None` below two observations.
pub fn sample_variance(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return Some(0.0);
    }
    let m = mean(xs)?;
    Some(xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64)
}

/// Two-sided tail probability of a Student t statistic.
pub fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * dist.sf(t.abs())).min(1.0)
}

/// Result of comparing two independent samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleComparison {
    pub mean_a: f64,
    pub mean_b: f64,
    /// Welch's t statistic.
    pub t: Option<f64>,
    /// Welch–Satterthwaite degrees of freedom.
    pub df: Option<f64>,
    /// Two-sided p-value of Welch's test.
    pub p_value: Option<f64>,
    /// Cohen's d with pooled standard deviation.
    pub cohens_d: Option<f64>,
}

/// Welch's two-sample t-test and Cohen's d for `a` against `b`.
///
/// Both samples must be non-empty. Test statistics need at least two
/// observations per sample; with zero spread in both samples the p-value is
/// 1 for equal means and 0 otherwise.
pub fn compare_samples(a: &[f64], b: &[f64]) -> SampleComparison {
    let (mean_a, mean_b) = (mean(a).unwrap_or(f64::NAN), mean(b).unwrap_or(f64::NAN));
    let mut out = SampleComparison {
        mean_a,
        mean_b,
        t: None,
        df: None,
        p_value: None,
        cohens_d: None,
    };
    let (Some(va), Some(vb)) = (sample_variance(a), sample_variance(b)) else {
        return out;
    };
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let diff = mean_a - mean_b;

    let pooled = (((na - 1.0) * va + (nb - 1.0) * vb) / (na + nb - 2.0)).sqrt();
    out.cohens_d = if pooled > 0.0 {
        Some(diff / pooled)
    } else if diff == 0.0 {
        Some(0.0)
    } else {
        None
    };

    let (sa, sb) = (va / na, vb / nb);
    let se = (sa + sb).sqrt();
    if se > 0.0 {
        let t = diff / se;
        let df = (sa + sb).powi(2) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
        out.t = Some(t);
        out.df = Some(df);
        out.p_value = Some(t_two_sided_p(t, df));
    } else {
        out.p_value = Some(if diff == 0.0 { 1.0 } else { 0.0 });
    }
    out
}

/// Ordinary least squares fit of `y` on `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub slope_se: f64,
    /// Two-sided p-value of the slope t statistic on `n - 2` degrees of
    /// freedom.
    pub p_value: f64,
    pub n: usize,
}

/// Fits `y = intercept + slope * x`. Needs at least three points with at
/// least two distinct `x` values.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<LinearFit> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return None;
    }
    let (mx, my) = (mean(x)?, mean(y)?);
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - intercept - slope * xi).powi(2))
        .sum();
    let df = (n - 2) as f64;
    let slope_se = (sse / df / sxx).sqrt();
    let p_value = if slope_se > 0.0 {
        t_two_sided_p(slope / slope_se, df)
    } else if slope == 0.0 {
        1.0
    } else {
        0.0
    };
    Some(LinearFit {
        slope,
        intercept,
        slope_se,
        p_value,
        n,
    })
}
