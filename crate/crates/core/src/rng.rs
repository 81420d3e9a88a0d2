//! Counter-based random streams.
//!
//! Every Monte Carlo sample `k` draws from its own ChaCha8 stream keyed by the
//! master seed, so results do not depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Stream `index` of the generator keyed by `master`.
pub fn stream(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Derive a fresh master seed for a sub-experiment (e.g. one grid point).
pub fn derive(master: u64, tag: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Evaluate `f(k, rng_k)` for `k in 0..samples` in parallel and return the
/// results in sample order.
pub fn par_samples<T, F>(master: u64, samples: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream(master, k as u64);
            f(k, &mut rng)
        })
        .collect()
}
