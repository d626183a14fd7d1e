//! Prior and posterior expected entropy under PDP(α, θ), in closed form and
//! by sampling the posterior directly.
//!
//! Given counts π with n observations in k classes, the posterior masses are
//! `(p_1, .., p_k, r · π'')` where
//! `(p_1, .., p_k, r) ~ Dirichlet(π_1 − α, .., π_k − α, θ + αk)` and
//! `π'' ~ PDP(α, θ + αk)` independently. Taking expectations term by term
//! gives
//!
//! ```text
//! E[H | π] = ψ(θ + n + 1) − [(θ + αk) ψ(1 − α) + Σ (π_i − α) ψ(π_i − α + 1)] / (θ + n)
//! ```

use rand::Rng;

use super::params::PdpParams;
use super::stick::stick_breaking;
use super::variates::dirichlet_draw;
use crate::error::{Error, Result};
use crate::masses::{entropy_of_masses, RankedMasses};
use crate::partition::PartitionCounts;
use crate::scalar::Real;
use crate::special::{psi, PositiveReal};

/// E(H) = ψ(θ + 1) − ψ(1 − α).
pub fn prior_mean_entropy<T: Real>(params: &PdpParams<T>) -> T {
    psi(params.theta() + T::one()) - psi(T::one() - params.alpha())
}

/// The closed-form posterior mean entropy and its two sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PosteriorEntropyParts<T> {
    /// (θ + αk) ψ(1 − α)
    pub a_term: T,
    /// Σ (π_i − α) ψ(π_i − α + 1)
    pub b_term: T,
    pub value: T,
}

pub fn posterior_entropy<T: Real>(
    params: &PdpParams<T>,
    pi: &PartitionCounts,
) -> Result<PosteriorEntropyParts<T>> {
    let alpha = params.alpha();
    let theta = params.theta();
    if pi.is_empty() {
        if theta <= T::zero() {
            return Err(Error::InvalidArgument(format!(
                "posterior entropy of the empty state needs theta > 0, got {theta}"
            )));
        }
        return Ok(PosteriorEntropyParts {
            a_term: theta * psi(T::one() - alpha),
            b_term: T::zero(),
            value: prior_mean_entropy(params),
        });
    }

    let n = T::from_count(pi.n());
    let k = T::from_count(pi.k() as u64);
    let a_term = (theta + alpha * k) * psi(T::one() - alpha);
    let b_term = pi.counts().iter().fold(T::zero(), |acc, &c| {
        let shifted = T::from_count(c) - alpha;
        acc + shifted * psi(shifted + T::one())
    });
    let value = psi(theta + n + T::one()) - (a_term + b_term) / (theta + n);
    Ok(PosteriorEntropyParts {
        a_term,
        b_term,
        value,
    })
}

/// Expected entropy carried by the mass left unbroken after `sticks_drawn`
/// sticks of a PDP(α, θ) draw: the remainder is `tail` times an independent
/// PDP(α, θ + α K), so its contribution is
/// `tail (ψ(θ + αK + 1) − ψ(1 − α)) − tail ln tail`.
pub fn expected_tail_entropy<T: Real>(
    params: &PdpParams<T>,
    masses: &RankedMasses<T>,
    sticks_drawn: usize,
) -> T {
    let tail = masses.tail();
    if tail <= T::zero() {
        return T::zero();
    }
    let residual = params.shifted(sticks_drawn);
    tail * prior_mean_entropy(&residual) - tail * tail.ln()
}

/// One draw from the posterior over ranked masses.
#[derive(Clone, Debug)]
pub struct PosteriorDraw<T> {
    pub masses: RankedMasses<T>,
    /// PDP(α, θ + αk) of the unseen-class component.
    pub residual_params: PdpParams<T>,
    /// Sticks broken for the unseen-class component.
    pub residual_sticks: usize,
}

impl<T: Real> PosteriorDraw<T> {
    /// Entropy of the listed masses plus the expected contribution of the
    /// truncated remainder.
    pub fn tail_corrected_entropy(&self) -> T {
        entropy_of_masses(&self.masses)
            + expected_tail_entropy(&self.residual_params, &self.masses, self.residual_sticks)
    }
}

pub fn posterior_sample<T: Real, R: Rng + ?Sized>(
    params: &PdpParams<T>,
    pi: &PartitionCounts,
    tail_eps: T,
    rng: &mut R,
) -> Result<PosteriorDraw<T>> {
    if pi.is_empty() {
        return Err(Error::EmptyPartition);
    }
    let alpha = params.alpha();
    let residual_params = params.shifted(pi.k());
    let mut shapes: Vec<PositiveReal<T>> = pi
        .counts()
        .iter()
        .map(|&c| PositiveReal::assume(T::from_count(c) - alpha))
        .collect();
    shapes.push(PositiveReal::assume(residual_params.theta()));

    let mut p = dirichlet_draw(&shapes, rng);
    let r = p.pop().expect("k + 1 components");
    let unseen = stick_breaking(&residual_params, tail_eps, rng)?;

    p.extend(unseen.masses.weights().iter().map(|&w| r * w));
    let masses = RankedMasses::from_unsorted(p, r * unseen.masses.tail())?;
    Ok(PosteriorDraw {
        masses,
        residual_params,
        residual_sticks: unseen.sticks_drawn,
    })
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::rng::RandomStream;
    use crate::scalar::compensated_sum;
    use crate::special::try_digamma;

    fn pc(c: &[u64]) -> PartitionCounts {
        PartitionCounts::new(c.to_vec()).unwrap()
    }

    fn params(a: f64, t: f64) -> PdpParams<f64> {
        PdpParams::new(a, t).unwrap()
    }

    #[test]
    fn prior_mean_examples() {
        assert!((prior_mean_entropy(&params(0.0, 1.0)) - 1.0).abs() < 1e-14);
        assert!((prior_mean_entropy(&params(0.5, 0.5)) - 2.0).abs() < 1e-13);
        assert!(prior_mean_entropy(&params(0.0, 1e-9)).abs() < 1e-8);
    }

    #[test]
    fn empty_state_gives_prior_mean() {
        for (a, t) in [(0.0, 1.0), (0.5, 0.5), (0.3, 2.0), (0.75, 0.1)] {
            let p = params(a, t);
            let h = posterior_entropy(&p, &PartitionCounts::empty()).unwrap();
            assert_eq!(h.value, prior_mean_entropy(&p));
            // the general formula at k = 0 reduces to the same value
            let general = try_digamma(t + 1.0).unwrap() - h.a_term / t;
            assert!((general - h.value).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_state_needs_positive_theta() {
        let p = params(0.5, -0.2);
        assert!(posterior_entropy(&p, &PartitionCounts::empty()).is_err());
        assert!(posterior_entropy(&p, &pc(&[1])).is_ok());
    }

    #[test]
    fn single_observation_dp() {
        // ψ(3) − (ψ(1) + ψ(2))/2 = 1
        let h = posterior_entropy(&params(0.0, 1.0), &pc(&[1])).unwrap();
        assert!((h.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn matches_high_precision_reference() {
        // 50-digit evaluation of the same formula
        let h = posterior_entropy(&params(0.3, 2.0), &pc(&[3, 1])).unwrap();
        assert!((h.value - 1.851_911_530_252_984_387_195_316).abs() < 1e-12);
        let h = posterior_entropy(&params(0.5, 0.5), &pc(&[10, 5, 1])).unwrap();
        assert!((h.value - 1.304_893_557_720_057_319_916_47).abs() < 1e-12);
    }

    #[test]
    fn parts_are_consistent() {
        let p = params(0.3, 2.0);
        let pi = pc(&[7, 3, 3, 1]);
        let h = posterior_entropy(&p, &pi).unwrap();
        let n = pi.n() as f64;
        let again = try_digamma(2.0 + n + 1.0).unwrap() - (h.a_term + h.b_term) / (2.0 + n);
        assert!((again - h.value).abs() < 1e-12);
    }

    #[test]
    fn tail_entropy_examples() {
        let none = RankedMasses::new(vec![1.0], 0.0).unwrap();
        assert_eq!(expected_tail_entropy(&params(0.0, 1.0), &none, 3), 0.0);

        let tiny = RankedMasses::new(vec![1.0 - 1e-12], 1e-12).unwrap();
        let v = expected_tail_entropy(&params(0.0, 1.0), &tiny, 40);
        let want = 1e-12 * 1.0 - 1e-12 * (1e-12f64).ln();
        assert!((v - want).abs() < 1e-20);
        assert!((v - 2.9e-11).abs() < 1e-12);

        let half = RankedMasses::new(vec![0.5], 0.5).unwrap();
        let v = expected_tail_entropy(&params(0.0, 1.0), &half, 0);
        assert!((v - (0.5 + 0.5 * std::f64::consts::LN_2)).abs() < 1e-14);
    }

    #[test]
    fn posterior_draws_are_ranked_masses() {
        let mut rng = RandomStream::new(41, 0);
        for (a, t, c) in [
            (0.0, 1.0, vec![1]),
            (0.3, 2.0, vec![3, 1]),
            (0.5, 0.5, vec![10, 5, 1]),
        ] {
            let p = params(a, t);
            let pi = pc(&c);
            for _ in 0..50 {
                let d = posterior_sample(&p, &pi, 1e-3, &mut rng).unwrap();
                let w = d.masses.weights();
                assert!(w.windows(2).all(|x| x[0] >= x[1]));
                let s = compensated_sum(w.iter().copied().chain([d.masses.tail()]));
                assert!((s - 1.0).abs() < 1e-12);
                assert_eq!(d.residual_params.theta(), t + a * c.len() as f64);
            }
        }
        assert!(
            posterior_sample(&params(0.0, 1.0), &PartitionCounts::empty(), 1e-6, &mut rng).is_err()
        );
    }

    #[test]
    fn first_dirichlet_coordinate_uniform() {
        // α = 0, θ = 1, π = (1): (p_1, r) ~ Dirichlet(1, 1)
        let p = params(0.0, 1.0);
        let pi = pc(&[1]);
        let mut rng = RandomStream::new(42, 0);
        let shapes = [
            PositiveReal::new(1.0).unwrap(),
            PositiveReal::new(1.0).unwrap(),
        ];
        let v: Vec<f64> = (0..100_000)
            .map(|_| dirichlet_draw(&shapes, &mut rng)[0])
            .collect();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let se = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * se);
        // and the residual parameters are the DP(1) of the unseen classes
        let d = posterior_sample(&p, &pi, 1e-12, &mut rng).unwrap();
        assert_eq!(d.residual_params, params(0.0, 1.0));
    }

    #[test]
    fn posterior_sampler_matches_closed_form_dp() {
        let p = params(0.0, 1.0);
        let pi = pc(&[5]);
        let mut rng = RandomStream::new(43, 0);
        let v: Vec<f64> = (0..10_000)
            .map(|_| {
                posterior_sample(&p, &pi, 1e-12, &mut rng)
                    .unwrap()
                    .tail_corrected_entropy()
            })
            .collect();
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let se = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
        let closed = posterior_entropy(&p, &pi).unwrap().value;
        assert!(
            (mean - closed).abs() < 4.0 * se,
            "{mean} ± {se} vs {closed}"
        );
    }
}
