/// Mean and variance of a scalar observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

/// Running central moments up to fourth order, mergeable across chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct CentralMoments {
    pub n: f64,
    pub mean: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl CentralMoments {
    pub fn push(&mut self, x: f64) {
        self.merge(&CentralMoments {
            n: 1.0,
            mean: x,
            ..Default::default()
        });
    }

    /// Pairwise update of Pébay (2008).
    pub fn merge(&mut self, o: &CentralMoments) {
        if o.n == 0.0 {
            return;
        }
        if self.n == 0.0 {
            *self = *o;
            return;
        }
        let (na, nb) = (self.n, o.n);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d_n = d / n;
        let m2 = self.m2 + o.m2 + d * d_n * na * nb;
        let m3 = self.m3
            + o.m3
            + d * d_n * d_n * na * nb * (na - nb)
            + 3.0 * d_n * (na * o.m2 - nb * self.m2);
        let m4 = self.m4
            + o.m4
            + d * d_n * d_n * d_n * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * d_n * d_n * (na * na * o.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * o.m3 - nb * self.m3);
        *self = CentralMoments {
            n,
            mean: self.mean + d_n * nb,
            m2,
            m3,
            m4,
        };
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        self.m2 / (self.n - 1.0)
    }

    /// Large-sample standard error of the variance, √((μ₄ − σ⁴)/N).
    pub fn variance_std_error(&self) -> f64 {
        let s2 = self.m2 / self.n;
        let mu4 = self.m4 / self.n;
        ((mu4 - s2 * s2).max(0.0) / self.n).sqrt()
    }
}
