//! Critically damped second-order low-pass `1 / (τ s + 1)²`, realized as two
//! cascaded first-order stages and discretized exactly for a held input.
//!
//! Besides smoothing, the stage states give the analytic first and second
//! derivatives of the output, which is how reference rates and command
//! rates are produced.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondOrderFilter<T> {
    tau: T,
    first: T,
    second: T,
}

impl<T: Real> SecondOrderFilter<T> {
    /// Filter at rest at `initial` (both stages equal to it).
    pub fn new(tau: T, initial: T) -> Self {
        debug_assert!(tau > T::zero());
        Self {
            tau,
            first: initial,
            second: initial,
        }
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn reset(&mut self, value: T) {
        self.first = value;
        self.second = value;
    }

    /// Filtered output.
    pub fn value(&self) -> T {
        self.second
    }

    /// Time derivative of the output.
    pub fn rate(&self) -> T {
        (self.first - self.second) / self.tau
    }

    /// Second time derivative of the output when the input is `input`.
    pub fn acceleration(&self, input: T) -> T {
        (input - T::two() * self.first + self.second) / (self.tau * self.tau)
    }

    /// Advances both stages by `h` with `input` held constant.
    pub fn advance(&mut self, input: T, h: T) {
        let decay = (-h / self.tau).exp();
        let d1 = self.first - input;
        let d2 = self.second - input;
        self.second = input + decay * (d2 + d1 * h / self.tau);
        self.first = input + decay * d1;
    }

    /// Advances both stages by `h` with the input moving linearly from
    /// `from` to `to`.
    pub fn advance_ramp(&mut self, from: T, to: T, h: T) {
        let tau = self.tau;
        let slope = (to - from) / h;
        let decay = (-h / tau).exp();
        let d1 = self.first - from + slope * tau;
        let d2 = self.second - from + T::two() * slope * tau;
        self.second = to - T::two() * slope * tau + decay * (d2 + d1 * h / tau);
        self.first = to - slope * tau + decay * d1;
    }
}

/// Estimates a signal's first two derivatives from its samples, treating
/// the signal as linear between samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimator<T> {
    filter: SecondOrderFilter<T>,
    previous: Option<T>,
}

impl<T: Real> DerivativeEstimator<T> {
    pub fn new(tau: T) -> Self {
        Self {
            filter: SecondOrderFilter::new(tau, T::zero()),
            previous: None,
        }
    }

    /// Feeds a sample taken `h` after the previous one and returns
    /// `(rate, acceleration)` at this sample. The first sample primes the
    /// filter so that it starts with zero derivatives.
    pub fn update(&mut self, sample: T, h: T) -> (T, T) {
        match self.previous {
            None => self.filter.reset(sample),
            Some(prev) => self.filter.advance_ramp(prev, sample, h),
        }
        self.previous = Some(sample);
        (self.filter.rate(), self.filter.acceleration(sample))
    }
}
