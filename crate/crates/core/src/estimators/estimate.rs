use crate::real::Real;

/// A Monte Carlo estimate with its standard error and a 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub mean: T,
    pub stderr: T,
    pub n: u64,
    pub ci95: (T, T),
}

const Z95: f64 = 1.96;

/// Below this many successes (or failures) a Bernoulli estimate uses the Wilson interval.
pub const WILSON_BELOW: u64 = 30;

impl<T: Real> Estimate<T> {
    /// Normal-approximation interval `mean +- 1.96 stderr`.
    pub fn new(mean: T, stderr: T, n: u64) -> Self {
        let half = stderr * T::lit(Z95);
        Estimate { mean, stderr, n, ci95: (mean - half, mean + half) }
    }

    /// A value known without sampling error.
    pub fn exact(value: T) -> Self {
        Self::new(value, T::zero(), 0)
    }

    /// Fraction of `successes` among `n` trials.
    pub fn bernoulli(successes: u64, n: u64) -> Self {
        if n == 0 {
            return Self::new(T::nan(), T::nan(), 0);
        }
        let nf = T::lit(n as f64);
        let p = T::lit(successes as f64) / nf;
        let stderr = (p * (T::one() - p) / nf).sqrt();
        let mut est = Self::new(p, stderr, n);
        if successes < WILSON_BELOW || n - successes < WILSON_BELOW {
            est.ci95 = wilson(p, nf);
        }
        est
    }

    /// Multiplies mean, error and interval by a positive constant.
    pub fn scale(&self, c: T) -> Self {
        Estimate { mean: self.mean * c, stderr: self.stderr * c, n: self.n, ci95: (self.ci95.0 * c, self.ci95.1 * c) }
    }

    /// Widens the standard error to `sqrt(stderr^2 + extra^2)` and recentres the interval.
    pub fn widen(&self, extra: T) -> Self {
        let se = (self.stderr * self.stderr + extra * extra).sqrt();
        Self::new(self.mean, se, self.n)
    }

    /// `|self - other| / sqrt(se_1^2 + se_2^2)`, the discrepancy in combined standard errors.
    pub fn z_score(&self, other: &Self) -> T {
        let se = (self.stderr * self.stderr + other.stderr * other.stderr).sqrt();
        (self.mean - other.mean).abs() / se
    }

    /// Same as [`z_score`](Self::z_score) against a value with no error.
    pub fn z_score_to(&self, value: T) -> T {
        (self.mean - value).abs() / self.stderr
    }
}

fn wilson<T: Real>(p: T, n: T) -> (T, T) {
    let z = T::lit(Z95);
    let z2 = z * z;
    let denom = T::one() + z2 / n;
    let centre = (p + z2 / (T::lit(2.0) * n)) / denom;
    let half = z * (p * (T::one() - p) / n + z2 / (T::lit(4.0) * n * n)).sqrt() / denom;
    ((centre - half).max(T::zero()), (centre + half).min(T::one()))
}

/// Streaming mean and variance (Welford), mergeable with Chan's update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<T> {
    pub n: u64,
    pub mean: T,
    m2: T,
}

impl<T: Real> Default for Moments<T> {
    fn default() -> Self {
        Moments { n: 0, mean: T::zero(), m2: T::zero() }
    }
}

impl<T: Real> Moments<T> {
    pub fn push(&mut self, x: T) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean = self.mean + delta / T::lit(self.n as f64);
        self.m2 = self.m2 + delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let (na, nb, nf) = (T::lit(self.n as f64), T::lit(other.n as f64), T::lit(n as f64));
        let delta = other.mean - self.mean;
        self.mean = self.mean + delta * nb / nf;
        self.m2 = self.m2 + other.m2 + delta * delta * na * nb / nf;
        self.n = n;
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> T {
        if self.n < 2 {
            return T::zero();
        }
        self.m2 / T::lit((self.n - 1) as f64)
    }

    pub fn estimate(&self) -> Estimate<T> {
        let se = (self.variance() / T::lit(self.n.max(1) as f64)).sqrt();
        Estimate::new(self.mean, se, self.n)
    }
}

impl<T: Real> FromIterator<T> for Moments<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut m = Moments::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}
