//! Gamma, Beta and Dirichlet variates.
//!
//! Gamma uses the Marsaglia-Tsang squeeze/rejection method for shape >= 1.
//! Shapes below one are boosted, `G(a) = G(a + 1) U^(1/a)`, with the power
//! taken in log space so tiny shapes never underflow to zero. Beta and
//! Dirichlet normalize independent Gammas from their logarithms.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::rng::uniform_open_low;
use crate::scalar::Real;
use crate::special::PositiveReal;

/// ln of a Gamma(shape, 1) variate.
fn ln_gamma_variate<T: Real, R: Rng + ?Sized>(shape: T, rng: &mut R) -> T {
    if shape < T::one() {
        let boost = uniform_open_low::<T, R>(rng).ln() / shape;
        return ln_gamma_variate(shape + T::one(), rng) + boost;
    }
    let third = T::lit(1.0 / 3.0);
    let d = shape - third;
    let c = third / d.sqrt();
    loop {
        let x = T::lit(rng.sample::<f64, _>(StandardNormal));
        let v = T::one() + c * x;
        if v <= T::zero() {
            continue;
        }
        let v = v * v * v;
        let u = uniform_open_low::<T, R>(rng);
        let x2 = x * x;
        if u < T::one() - T::lit(0.0331) * x2 * x2
            || u.ln() < T::lit(0.5) * x2 + d * (T::one() - v + v.ln())
        {
            return d.ln() + v.ln();
        }
    }
}

pub fn gamma_draw<T: Real, R: Rng + ?Sized>(shape: PositiveReal<T>, rng: &mut R) -> T {
    ln_gamma_variate(shape.get(), rng).exp()
}

/// `(x, 1 - x)` for x ~ Beta(a, b), each computed without cancellation.
pub(crate) fn beta_split<T: Real, R: Rng + ?Sized>(a: T, b: T, rng: &mut R) -> (T, T) {
    let la = ln_gamma_variate(a, rng);
    let lb = ln_gamma_variate(b, rng);
    // x = 1 / (1 + e^(lb - la))
    let x = (T::one() + (lb - la).exp()).recip();
    let y = (T::one() + (la - lb).exp()).recip();
    (x, y)
}

pub fn beta_draw<T: Real, R: Rng + ?Sized>(
    a: PositiveReal<T>,
    b: PositiveReal<T>,
    rng: &mut R,
) -> T {
    beta_split(a.get(), b.get(), rng).0
}

pub fn dirichlet_draw<T: Real, R: Rng + ?Sized>(alphas: &[PositiveReal<T>], rng: &mut R) -> Vec<T> {
    let logs: Vec<T> = alphas
        .iter()
        .map(|a| ln_gamma_variate(a.get(), rng))
        .collect();
    let top = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let mut out: Vec<T> = logs.iter().map(|&l| (l - top).exp()).collect();
    let total = out.iter().fold(T::zero(), |acc, &x| acc + x);
    for x in &mut out {
        *x = *x / total;
    }
    out
}
