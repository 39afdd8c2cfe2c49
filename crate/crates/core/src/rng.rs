//! Replayable Gaussian driving noise.
//!
//! Each replica draws from its own ChaCha stream selected by `(seed, replica)`;
//! ChaCha's block counter plays the role of the step index, so a replica's
//! increments do not depend on how replicas are scheduled across threads.

use std::marker::PhantomData;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::real::Real;

/// Independent random stream for one replica.
pub fn replica_stream(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Source of driving increments over a step of length `dt`.
pub trait Driver<T> {
    fn increment(&mut self, dt: T) -> T;
}

/// `B = 0`, for the deterministic oracles.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroDriver;

impl<T: Real> Driver<T> for ZeroDriver {
    #[inline]
    fn increment(&mut self, _dt: T) -> T {
        T::zero()
    }
}

/// Brownian driving function: increments are `sqrt(dt) N(0, 1)`.
#[derive(Debug, Clone)]
pub struct DrivingPath<T> {
    seed: u64,
    replica: u64,
    rng: ChaCha8Rng,
    _scalar: PhantomData<T>,
}

impl<T: Real> DrivingPath<T> {
    pub fn new(seed: u64, replica: u64) -> Self {
        DrivingPath { seed, replica, rng: replica_stream(seed, replica), _scalar: PhantomData }
    }

    /// A fresh copy positioned at the first increment.
    pub fn replay(&self) -> Self {
        Self::new(self.seed, self.replica)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn replica(&self) -> u64 {
        self.replica
    }

    /// Underlying generator, for consumers that need more than Gaussian increments.
    pub fn rng_mut(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

impl<T: Real> Driver<T> for DrivingPath<T> {
    #[inline]
    fn increment(&mut self, dt: T) -> T {
        dt.sqrt() * T::standard_normal(&mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_bit_identical() {
        let mut a = DrivingPath::<f64>::new(7, 3);
        let first: Vec<f64> = (0..1000).map(|i| a.increment(1e-3 * (1 + i % 5) as f64)).collect();
        let mut b = a.replay();
        let second: Vec<f64> = (0..1000).map(|i| b.increment(1e-3 * (1 + i % 5) as f64)).collect();
        assert_eq!(first, second);
    }

    #[test]
    fn replicas_are_distinct_streams() {
        let mut a = DrivingPath::<f64>::new(7, 0);
        let mut b = DrivingPath::<f64>::new(7, 1);
        let mut c = DrivingPath::<f64>::new(8, 0);
        let (x, y, z) = (a.increment(1.0), b.increment(1.0), c.increment(1.0));
        assert_ne!(x, y);
        assert_ne!(x, z);
    }

    #[test]
    fn increments_have_variance_dt() {
        let mut d = DrivingPath::<f64>::new(11, 0);
        let n = 200_000;
        let dt = 0.01;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = d.increment(dt);
            s += x;
            s2 += x * x;
        }
        let mean = s / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 4.0 * (dt / n as f64).sqrt());
        assert!((var / dt - 1.0).abs() < 0.02);
    }
}
