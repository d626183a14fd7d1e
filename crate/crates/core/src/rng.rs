//! Reproducible, splittable random streams.

use rand::{Error as RandError, Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::scalar::Real;

/// A ChaCha12 generator keyed by `(seed, stream_id)`.
///
/// Identical pairs replay bit-for-bit; distinct stream ids select disjoint
/// ChaCha streams under the same key. Parallel trials derive their stream with
/// [`RandomStream::substream`] so results never depend on scheduling.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Fresh stream `(seed, stream_id + offset)`.
    pub fn substream(&self, offset: u64) -> Self {
        Self::new(self.seed, self.stream_id.wrapping_add(offset))
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), RandError> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Uniform on [0, 1) in the target precision.
pub(crate) fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    let u = T::lit(rng.gen::<f64>());
    if u < T::one() {
        u
    } else {
        // f64 values just below one round up in f32
        T::one() - T::epsilon() / T::lit(2.0)
    }
}

/// Uniform on (0, 1], safe to take the logarithm of.
pub(crate) fn uniform_open_low<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::one() - uniform::<T, R>(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_pair_replays() {
        let a: Vec<u64> = (0..64)
            .map({
                let mut r = RandomStream::new(7, 3);
                move |_| r.next_u64()
            })
            .collect();
        let mut r = RandomStream::new(7, 3);
        let b: Vec<u64> = (0..64).map(|_| r.next_u64()).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn streams_differ() {
        let mut a = RandomStream::new(7, 3);
        let mut b = RandomStream::new(7, 4);
        let mut c = RandomStream::new(8, 3);
        let x = a.next_u64();
        assert_ne!(x, b.next_u64());
        assert_ne!(x, c.next_u64());
    }

    #[test]
    fn substream_is_offset_stream() {
        let base = RandomStream::new(11, 100);
        let mut s = base.substream(5);
        assert_eq!(s.stream_id(), 105);
        let mut t = RandomStream::new(11, 105);
        assert_eq!(s.next_u64(), t.next_u64());
    }

    #[test]
    fn neighbouring_streams_uncorrelated() {
        let n = 100_000;
        let mut a = RandomStream::new(1, 0);
        let mut b = RandomStream::new(1, 1);
        let (mut sxy, mut sx, mut sy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let x: f64 = a.gen();
            let y: f64 = b.gen();
            sxy += x * y;
            sx += x;
            sy += y;
            sxx += x * x;
            syy += y * y;
        }
        let nf = n as f64;
        let cov = sxy / nf - sx * sy / nf / nf;
        let r = cov / ((sxx / nf - (sx / nf).powi(2)) * (syy / nf - (sy / nf).powi(2))).sqrt();
        // sd of r under independence is 1/sqrt(n)
        assert!(r.abs() < 4.0 / nf.sqrt(), "r = {r}");
    }
}
