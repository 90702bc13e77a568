//! Running sample moments that merge across parallel chunks.

/// Count, mean and central moments up to fourth order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_slice(xs: &[f64]) -> Self {
        let mut m = Self::new();
        for &x in xs {
            m.push(x);
        }
        m
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let t1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += t1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += t1;
    }

    /// Pairwise combination; exact up to rounding for any split.
    pub fn merge(&self, other: &Self) -> Self {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let mean = self.mean + delta * nb / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Self {
            n: self.n + other.n,
            mean,
            m2,
            m3,
            m4,
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        self.m2 / (self.n as f64 - 1.0)
    }

    pub fn mean_stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }

    /// Large-sample standard error of the variance, `sqrt((μ₄ − σ⁴) / n)`.
    pub fn variance_stderr(&self) -> f64 {
        let n = self.n as f64;
        let mu4 = self.m4 / n;
        let s2 = self.m2 / n;
        ((mu4 - s2 * s2).max(0.0) / n).sqrt()
    }
}

/// Binomial standard error `sqrt(p(1−p)/n)` of a fraction.
pub fn binomial_stderr(p: f64, n: u64) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(xs: &[f64]) -> (f64, f64, f64) {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>();
        let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>();
        (m, m2 / (n - 1.0), m4 / n)
    }

    #[test]
    fn matches_two_pass() {
        let xs: Vec<f64> = (0..257)
            .map(|i| ((i * 37 % 101) as f64).sqrt() - 3.0)
            .collect();
        let m = Moments::from_slice(&xs);
        let (mean, var, mu4) = naive(&xs);
        assert!((m.mean() - mean).abs() < 1e-12);
        assert!((m.variance() - var).abs() < 1e-10);
        assert!((m.m4 / xs.len() as f64 - mu4).abs() < 1e-9);
    }

    #[test]
    fn merge_equals_sequential() {
        let xs: Vec<f64> = (0..500)
            .map(|i| (i as f64 * 0.7).sin() * 4.0 + 1.0)
            .collect();
        let whole = Moments::from_slice(&xs);
        for split in [0, 1, 13, 250, 499, 500] {
            let a = Moments::from_slice(&xs[..split]);
            let b = Moments::from_slice(&xs[split..]);
            let m = a.merge(&b);
            assert_eq!(m.count(), whole.count());
            assert!((m.mean() - whole.mean()).abs() < 1e-12);
            assert!((m.m2 - whole.m2).abs() < 1e-9);
            assert!((m.m3 - whole.m3).abs() < 1e-8);
            assert!((m.m4 - whole.m4).abs() < 1e-7);
        }
    }

    #[test]
    fn binomial() {
        assert!((binomial_stderr(0.5, 100) - 0.05).abs() < 1e-15);
        assert!(binomial_stderr(0.5, 0).is_nan());
    }
}
