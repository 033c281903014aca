//! Statistics used by the experiment analyses: two-sample t-tests, Pearson
//! correlation, normal-approximation confidence bands and threshold
//! detection.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (two-pass).
pub fn sample_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Median of a slice; `None` when empty. NaNs sort last.
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

/// Least-squares slope of `ys` against `0..len`.
pub fn linear_slope(ys: &[f64]) -> Option<f64> {
    if ys.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64).collect();
    let (mx, my) = (mean(&xs), mean(ys));
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TTestMethod {
    Student,
    WelchFallback,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TTestReport {
    pub t_statistic: f64,
    pub p_value: f64,
    pub df: f64,
    /// Larger sample variance over the smaller one.
    pub variance_ratio: f64,
    pub method: TTestMethod,
    /// Both samples had zero variance.
    pub degenerate: bool,
}

/// Variance ratio at or above which the pooled test gives way to Welch's.
pub const MAX_POOLED_VARIANCE_RATIO: f64 = 4.0;

/// Two-sided two-sample t-test.
///
/// Uses the pooled-variance Student test while the variance ratio stays below
/// 4, Welch's test otherwise.
pub fn t_test(a: &[f64], b: &[f64]) -> Result<TTestReport> {
    if a.len() < 2 || b.len() < 2 {
        return Err(invalid("t-test needs at least two observations per sample"));
    }
    if a.iter().chain(b).any(|x| !x.is_finite()) {
        return Err(invalid("t-test samples must be finite"));
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let (va, vb) = (sample_variance(a), sample_variance(b));
    let (hi, lo) = if va >= vb { (va, vb) } else { (vb, va) };

    if hi == 0.0 {
        let diff = ma - mb;
        let t = if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        };
        return Ok(TTestReport {
            t_statistic: t,
            p_value: if diff == 0.0 { 1.0 } else { 0.0 },
            df: na + nb - 2.0,
            variance_ratio: 1.0,
            method: TTestMethod::Student,
            degenerate: true,
        });
    }

    let variance_ratio = if lo == 0.0 { f64::INFINITY } else { hi / lo };
    let (t, df, method) = if variance_ratio < MAX_POOLED_VARIANCE_RATIO {
        let df = na + nb - 2.0;
        let pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / df;
        let se = libm::sqrt(pooled * (1.0 / na + 1.0 / nb));
        ((ma - mb) / se, df, TTestMethod::Student)
    } else {
        let (sa, sb) = (va / na, vb / nb);
        let se2 = sa + sb;
        let df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
        ((ma - mb) / libm::sqrt(se2), df, TTestMethod::WelchFallback)
    };
    Ok(TTestReport {
        t_statistic: t,
        p_value: student_t_two_sided(t, df),
        df,
        variance_ratio,
        method,
        degenerate: false,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
pub fn student_t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = df / (df + t * t);
    regularized_incomplete_beta(x, 0.5 * df, 0.5).clamp(0.0, 1.0)
}

/// Regularized incomplete beta `I_x(a, b)`.
///
/// Evaluated with the modified Lentz algorithm on the standard continued
/// fraction, switching to `1 - I_{1-x}(b, a)` above the mean so the fraction
/// always converges quickly.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = libm::lgamma(a + b) - libm::lgamma(a) - libm::lgamma(b)
        + a * libm::log(x)
        + b * libm::log1p(-x);
    if x < (a + 1.0) / (a + b + 2.0) {
        libm::exp(ln_front) * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - libm::exp(ln_front) * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-16;
    const MAX_ITER: u32 = 10_000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = f64::from(m);
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Pearson product-moment correlation.
///
/// `Ok(None)` when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(invalid("correlation needs at least two points"));
    }
    let (mx, my) = (mean(x), mean(y));
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Band {
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Per-generation mean ± 1.96 standard errors across repeats.
///
/// `repeats[r][g]` is repeat `r` at generation `g`; all rows must share one
/// length.
pub fn ci95(repeats: &[Vec<f64>]) -> Result<Vec<Band>> {
    if repeats.len() < 2 {
        return Err(invalid("confidence bands need at least two repeats"));
    }
    let len = repeats[0].len();
    if let Some(row) = repeats.iter().find(|r| r.len() != len) {
        return Err(Error::LengthMismatch {
            left: len,
            right: row.len(),
        });
    }
    let k = repeats.len() as f64;
    let mut column = Vec::with_capacity(repeats.len());
    Ok((0..len)
        .map(|g| {
            column.clear();
            column.extend(repeats.iter().map(|r| r[g]));
            let m = mean(&column);
            let half = 1.96 * libm::sqrt(sample_variance(&column)) / libm::sqrt(k);
            Band {
                mean: m,
                lower: m - half,
                upper: m + half,
            }
        })
        .collect())
}

/// First index at which `series` reaches each threshold.
pub fn threshold_crossings(series: &[f64], thresholds: &[f64]) -> Vec<Option<usize>> {
    thresholds
        .iter()
        .map(|&t| series.iter().position(|&v| v >= t))
        .collect()
}

/// Means of consecutive `width`-long bins, skipping `None` entries. A bin
/// with no defined values yields `None`.
pub fn binned_means(values: &[Option<f64>], width: usize) -> Vec<Option<f64>> {
    values
        .chunks(width.max(1))
        .map(|chunk| {
            let defined: Vec<f64> = chunk.iter().flatten().copied().collect();
            (!defined.is_empty()).then(|| mean(&defined))
        })
        .collect()
}
