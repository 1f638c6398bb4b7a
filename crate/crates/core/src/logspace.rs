//! Log-space accumulation helpers. Probability products over many cases
//! underflow quickly, so every sum of probabilities in this crate goes through
//! the log-sum-exp pattern.

/// log(Σ exp(v)) over a slice, max-shifted for stability.
///
/// Returns −∞ for an empty slice or when every entry is −∞.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

/// Streaming log-sum-exp accumulator for sums too large to buffer.
///
/// Maintains the running maximum and the sum of exponentials relative to it;
/// addition order is fixed by the caller, so results are reproducible.
#[derive(Debug, Clone, Copy)]
pub struct LogSumExp {
    max: f64,
    sum: f64,
}

impl LogSumExp {
    pub fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: 0.0,
        }
    }

    /// Adds one term given as a log-value. −∞ terms (zero probability) are a no-op.
    pub fn add(&mut self, log_value: f64) {
        if log_value == f64::NEG_INFINITY {
            return;
        }
        if log_value <= self.max {
            self.sum += (log_value - self.max).exp();
        } else {
            if self.max == f64::NEG_INFINITY {
                self.sum = 1.0;
            } else {
                self.sum = self.sum * (self.max - log_value).exp() + 1.0;
            }
            self.max = log_value;
        }
    }

    /// log of the accumulated sum; −∞ when nothing finite was added.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.ln()
        }
    }
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self::new()
    }
}
