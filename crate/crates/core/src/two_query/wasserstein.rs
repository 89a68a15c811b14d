use rand::Rng;

use crate::{Error, Result};

/// The Rayleigh law with scale `sigma`: density `(r / sigma^2) exp(-r^2 / 2 sigma^2)`.
///
/// With `sigma = 1/sqrt(2)` it is the law of `|z|` for a standard complex Gaussian, and so
/// the limiting law of `sqrt(d) |u_x|` for Haar-random `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rayleigh {
    sigma: f64,
}

impl Rayleigh {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("Rayleigh scale must be positive, got {sigma}")));
        }
        Ok(Rayleigh { sigma })
    }

    /// Scale `1/sqrt(2)`, mean `sqrt(pi)/2`, variance `(4 - pi)/4`.
    pub fn complex_gaussian_modulus() -> Self {
        Rayleigh { sigma: std::f64::consts::FRAC_1_SQRT_2 }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mean(&self) -> f64 {
        self.sigma * (std::f64::consts::PI / 2.0).sqrt()
    }

    pub fn variance(&self) -> f64 {
        (4.0 - std::f64::consts::PI) / 2.0 * self.sigma * self.sigma
    }

    pub fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            0.0
        } else {
            -(-r * r / (2.0 * self.sigma * self.sigma)).exp_m1()
        }
    }

    pub fn quantile(&self, q: f64) -> f64 {
        if q <= 0.0 {
            0.0
        } else if q >= 1.0 {
            f64::INFINITY
        } else {
            self.sigma * (-2.0 * (-q).ln_1p()).sqrt()
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }

    /// `int_0^q Q(s) ds`.
    fn first_moment_to(&self, q: f64) -> f64 {
        let s = self.sigma;
        let half_pi = (std::f64::consts::PI / 2.0).sqrt();
        if q >= 1.0 {
            return s * half_pi;
        }
        let r = self.quantile(q);
        // int_0^r x f(x) dx = -r e^{-r^2/2s^2} + s sqrt(pi/2) erf(r / (s sqrt 2))
        -r * (1.0 - q) + s * half_pi * libm::erf(r / (s * std::f64::consts::SQRT_2))
    }

    /// `int_0^q Q(s)^2 ds = 2 sigma^2 (q + (1 - q) ln(1 - q))`.
    fn second_moment_to(&self, q: f64) -> f64 {
        let tail = if q >= 1.0 { 0.0 } else { (1.0 - q) * (-q).ln_1p() };
        2.0 * self.sigma * self.sigma * (q + tail)
    }
}

/// Squared 2-Wasserstein distance between the empirical law of `samples` and `reference`.
///
/// The optimal coupling on the line is monotone, so
/// `W_2^2 = sum_i int_{(i-1)/N}^{i/N} (x_(i) - Q(q))^2 dq`, each piece in closed form.
pub fn empirical_wasserstein2_squared(samples: &[f64], reference: &Rayleigh) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("Wasserstein distance needs at least one sample"));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("samples must be finite"));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut total = 0.0;
    let (mut m1_prev, mut m2_prev) = (0.0, 0.0);
    for (i, &x) in xs.iter().enumerate() {
        let q = (i + 1) as f64 / n;
        let (m1, m2) = (reference.first_moment_to(q), reference.second_moment_to(q));
        let piece = x * x / n - 2.0 * x * (m1 - m1_prev) + (m2 - m2_prev);
        total += piece.max(0.0);
        m1_prev = m1;
        m2_prev = m2;
    }
    Ok(total)
}

/// 2-Wasserstein distance; see [`empirical_wasserstein2_squared`].
pub fn empirical_wasserstein2(samples: &[f64], reference: &Rayleigh) -> Result<f64> {
    empirical_wasserstein2_squared(samples, reference).map(f64::sqrt)
}
