//! Seedable, splittable pseudo-random generator used by every stochastic
//! routine in this crate.
//!
//! The generator is xoshiro256++ seeded through SplitMix64. Substreams are
//! derived by hashing `(seed, stream)` with SplitMix64 so that candidate
//! subsets, simulation cells, and replications each get an independent
//! stream whose output does not depend on scheduling order.

use std::f64::consts::TAU;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash a list of 64-bit words into one seed (SplitMix64 chaining).
///
/// Used to derive per-candidate and per-replication substream seeds.
pub fn derive_seed(words: &[u64]) -> u64 {
    let mut state = 0x6A09_E667_F3BC_C909; // golden-ratio-free arbitrary start
    let mut out = 0;
    for &w in words {
        state ^= w;
        out = splitmix64(&mut state);
    }
    out
}

/// xoshiro256++ stream.
#[derive(Clone, Debug)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    /// Expands a 64-bit seed into the full state with SplitMix64.
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for slot in &mut s {
            *slot = splitmix64(&mut sm);
        }
        // xoshiro must not start from the all-zero state
        if s == [0, 0, 0, 0] {
            s[0] = 0x9E37_79B9_7F4A_7C15;
        }
        Self { s }
    }

    /// Substream `stream` of master seed `seed`.
    pub fn substream(seed: u64, stream: u64) -> Self {
        Self::seed_from_u64(derive_seed(&[seed, stream]))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`, unbiased (widening-multiply rejection).
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below() requires n > 0");
        let n = n as u64;
        loop {
            let x = self.next_u64();
            let m = (x as u128).wrapping_mul(n as u128);
            let low = m as u64;
            if low >= n || low >= n.wrapping_neg() % n {
                return (m >> 64) as usize;
            }
        }
    }

    /// `k` distinct indices drawn uniformly without replacement from `0..n`,
    /// in draw order. Intended for small `k` (rejection on duplicates).
    pub fn sample_distinct(&mut self, k: usize, n: usize) -> Vec<usize> {
        assert!(k <= n, "cannot draw {k} distinct values from 0..{n}");
        let mut picked = Vec::with_capacity(k);
        while picked.len() < k {
            let c = self.below(n);
            if !picked.contains(&c) {
                picked.push(c);
            }
        }
        picked
    }

    /// Standard normal variate (Box-Muller, one variate per uniform pair).
    pub fn next_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64(); // (0, 1]: keeps ln() finite
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
    }
}
