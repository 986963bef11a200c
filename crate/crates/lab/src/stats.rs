//! Replicate summaries with normal-approximation confidence half-widths.

use serde::Serialize;

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959963984540054;

/// Statistical slack used by every trend check, in combined half-widths.
pub const SLACK: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stddev: f64,
    pub n: usize,
    pub halfwidth: f64,
    /// Samples excluded from the mean because they were `+inf`.
    pub infinite: usize,
}

impl Estimate {
    /// Summarize finite samples; `None` entries count as infinite.
    pub fn from_samples(samples: &[Option<f64>]) -> Estimate {
        let finite: Vec<f64> = samples.iter().flatten().copied().collect();
        let infinite = samples.len() - finite.len();
        let n = finite.len();
        if n == 0 {
            return Estimate { mean: f64::NAN, stddev: f64::NAN, n, halfwidth: f64::NAN, infinite };
        }
        let mean = finite.iter().sum::<f64>() / n as f64;
        let stddev = if n < 2 {
            0.0
        } else {
            let ss: f64 = finite.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64).sqrt()
        };
        let halfwidth = Z95 * stddev / (n as f64).sqrt();
        Estimate { mean, stddev, n, halfwidth, infinite }
    }

    pub fn infinite_fraction(&self) -> f64 {
        let total = self.n + self.infinite;
        if total == 0 {
            0.0
        } else {
            self.infinite as f64 / total as f64
        }
    }
}

/// `sqrt(sum hw_i^2)` for independent-looking estimates.
pub fn combined_halfwidth(hws: &[f64]) -> f64 {
    hws.iter().map(|h| h * h).sum::<f64>().sqrt()
}

/// Binomial standard error of an empirical frequency.
pub fn binomial_sigma(freq: f64, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    (freq * (1.0 - freq) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_samples_have_zero_width() {
        let e = Estimate::from_samples(&[Some(2.0), Some(2.0), Some(2.0), None]);
        assert_eq!(e.mean, 2.0);
        assert_eq!(e.stddev, 0.0);
        assert_eq!(e.halfwidth, 0.0);
        assert_eq!((e.n, e.infinite), (3, 1));
    }

    #[test]
    fn sample_stddev_uses_n_minus_one() {
        let e = Estimate::from_samples(&[Some(1.0), Some(3.0)]);
        assert_eq!(e.mean, 2.0);
        assert!((e.stddev - 2f64.sqrt()).abs() < 1e-12);
        assert!((e.halfwidth - Z95).abs() < 1e-12);
    }

    #[test]
    fn combined_width() {
        assert!((combined_halfwidth(&[3.0, 4.0]) - 5.0).abs() < 1e-12);
    }
}
