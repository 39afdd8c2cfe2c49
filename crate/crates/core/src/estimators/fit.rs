use super::estimate::Estimate;
use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit<T> {
    /// Slope of `log P` against `log eps`; the scaling law predicts `2 - d`.
    pub slope: T,
    pub slope_stderr: T,
    pub intercept: T,
    /// Rungs that entered the fit.
    pub used: usize,
}

/// Weighted least squares of `log P` on `log eps` with weights `(P / se)^2`,
/// the inverse delta-method variance of `log P`. Rungs with zero mean are
/// dropped. When some surviving rung has zero error the fit is unweighted and
/// the slope error comes from the residuals.
///
/// The rungs of a ladder are nested events on the same paths and are
/// therefore positively correlated, so `slope_stderr` is optimistic.
pub fn exponent_fit<T: Real>(eps: &[T], probs: &[Estimate<T>]) -> Result<SlopeFit<T>> {
    if eps.len() != probs.len() {
        return Err(Error::InvalidArgument(format!("{} thresholds but {} estimates", eps.len(), probs.len())));
    }
    let pts: Vec<(T, T, T)> = eps
        .iter()
        .zip(probs)
        .filter(|(_, p)| p.mean > T::zero())
        .map(|(&e, p)| (e.ln(), p.mean.ln(), p.stderr / p.mean))
        .collect();
    if pts.len() < 4 {
        return Err(Error::TooFewSamples { need: 4, got: pts.len() });
    }
    let weighted = pts.iter().all(|p| p.2 > T::zero());
    let w = |p: &(T, T, T)| if weighted { T::one() / (p.2 * p.2) } else { T::one() };
    let sw = pts.iter().fold(T::zero(), |s, p| s + w(p));
    let xm = pts.iter().fold(T::zero(), |s, p| s + w(p) * p.0) / sw;
    let ym = pts.iter().fold(T::zero(), |s, p| s + w(p) * p.1) / sw;
    let sxx = pts.iter().fold(T::zero(), |s, p| s + w(p) * (p.0 - xm) * (p.0 - xm));
    let sxy = pts.iter().fold(T::zero(), |s, p| s + w(p) * (p.0 - xm) * (p.1 - ym));
    if sxx == T::zero() {
        return Err(Error::InvalidArgument("all thresholds coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let slope_stderr = if weighted {
        (T::one() / sxx).sqrt()
    } else {
        let rss = pts.iter().fold(T::zero(), |s, p| {
            let r = p.1 - intercept - slope * p.0;
            s + r * r
        });
        (rss / T::lit((pts.len() - 2) as f64) / sxx).sqrt()
    };
    Ok(SlopeFit { slope, slope_stderr, intercept, used: pts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let eps: Vec<f64> = (0..6).map(|k| 0.2 * 0.5f64.powi(k)).collect();
        let probs: Vec<_> = eps.iter().map(|e| Estimate::exact(e.powf(0.75))).collect();
        let fit = exponent_fit(&eps, &probs).unwrap();
        assert!((fit.slope - 0.75).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-10);
        assert!(fit.intercept.abs() < 1e-12);
    }

    #[test]
    fn zero_rungs_are_dropped() {
        let eps: Vec<f64> = (0..6).map(|k| 0.2 * 0.5f64.powi(k)).collect();
        let mut probs: Vec<_> = eps.iter().map(|e| Estimate::new(2.0 * e.powf(0.25), 0.01, 100)).collect();
        probs[5] = Estimate::bernoulli(0, 100);
        let fit = exponent_fit(&eps, &probs).unwrap();
        assert_eq!(fit.used, 5);
        assert!((fit.slope - 0.25).abs() < 1e-12);
        probs[4] = Estimate::bernoulli(0, 100);
        probs[3] = Estimate::bernoulli(0, 100);
        assert!(matches!(exponent_fit(&eps, &probs), Err(Error::TooFewSamples { got: 3, .. })));
    }
}
