use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Counter-based random stream keyed by `(master_seed, stream_id)`.
///
/// Every draw call consumes one counter value and reads from a fixed window of
/// the ChaCha keystream at `(stream_id, counter)`, so a draw depends only on
/// those three numbers and never on which thread ran it or when.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    counter: u64,
    cipher: ChaCha12Rng,
}

/// Each counter value owns 2^36 keystream words.
const WINDOW_BITS: u32 = 36;
const MAX_WORDS_PER_DRAW: usize = 1 << 30;

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self::at(master_seed, stream_id, 0)
    }

    /// A stream positioned at an explicit counter value.
    pub fn at(master_seed: u64, stream_id: u64, counter: u64) -> Self {
        let mut cipher = ChaCha12Rng::seed_from_u64(master_seed);
        cipher.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            counter,
            cipher,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Sibling stream with the same master seed.
    pub fn derive(&self, stream_id: u64) -> RngStream {
        RngStream::new(self.master_seed, stream_id)
    }

    fn next_window(&mut self, len: usize) -> &mut ChaCha12Rng {
        assert!(
            len <= MAX_WORDS_PER_DRAW / 4,
            "draw of {len} values exceeds the per-call window"
        );
        assert!(
            self.counter < (1u64 << (68 - WINDOW_BITS)),
            "stream counter exhausted"
        );
        self.cipher
            .set_word_pos(u128::from(self.counter) << WINDOW_BITS);
        self.counter += 1;
        &mut self.cipher
    }

    /// I.i.d. `N(0, std²)` vector.
    pub fn gaussian_draw(&mut self, len: usize, std: f64) -> Vec<f64> {
        let mut out = vec![0.0; len];
        self.gaussian_fill(&mut out, std);
        out
    }

    /// Overwrites `out` with i.i.d. `N(0, std²)` values. Consumes one counter step.
    pub fn gaussian_fill(&mut self, out: &mut [f64], std: f64) {
        debug_assert!(std >= 0.0);
        let rng = self.next_window(out.len());
        if std == 0.0 {
            out.fill(0.0);
            return;
        }
        for v in out.iter_mut() {
            let s: f64 = rng.sample(StandardNormal);
            *v = std * s;
        }
    }

    /// I.i.d. uniform values on the closed interval `[lo, hi]`.
    pub fn uniform_draw(&mut self, len: usize, lo: f64, hi: f64) -> Vec<f64> {
        let rng = self.next_window(len);
        (0..len).map(|_| rng.random_range(lo..=hi)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_std_gives_zero_vector() {
        let mut s = RngStream::new(7, 0);
        assert_eq!(s.gaussian_draw(5, 0.0), vec![0.0; 5]);
        assert_eq!(s.counter(), 1);
    }

    #[test]
    fn identical_position_identical_draw() {
        let a = RngStream::at(11, 3, 42).gaussian_draw(8, 1.0);
        let b = RngStream::at(11, 3, 42).gaussian_draw(8, 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn counter_seek_matches_sequential() {
        let mut seq = RngStream::new(5, 2);
        let _ = seq.gaussian_draw(3, 1.0);
        let _ = seq.gaussian_draw(100, 1.0);
        let third = seq.gaussian_draw(4, 1.0);
        assert_eq!(third, RngStream::at(5, 2, 2).gaussian_draw(4, 1.0));
    }

    #[test]
    fn streams_differ() {
        let a = RngStream::new(1, 0).gaussian_draw(4, 1.0);
        let b = RngStream::new(1, 1).gaussian_draw(4, 1.0);
        let c = RngStream::new(2, 0).gaussian_draw(4, 1.0);
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn gaussian_moments() {
        let mut s = RngStream::new(2024, 9);
        let draws = s.gaussian_draw(100_000, 1.0);
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn uniform_in_range() {
        let mut s = RngStream::new(3, 0);
        let u = s.uniform_draw(1000, -1.0, 1.0);
        assert!(u.iter().all(|v| (-1.0..=1.0).contains(v)));
        assert!(u.iter().any(|v| *v < -0.5) && u.iter().any(|v| *v > 0.5));
    }
}
