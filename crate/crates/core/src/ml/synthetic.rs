//! Seeded synthetic classification data.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Blob centres in two dimensions.
pub const BLOB_CENTRES: [[f64; 2]; 3] = [[0.0, 0.0], [4.0, 0.0], [2.0, 3.5]];
pub const BLOB_SD: f64 = 0.5;

/// `n` points in three Gaussian blobs, classes assigned round-robin.
pub fn blobs(n: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, BLOB_SD).expect("valid sd");
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let k = i % 3;
        let c = BLOB_CENTRES[k];
        x.push(vec![c[0] + noise.sample(&mut rng), c[1] + noise.sample(&mut rng)]);
        y.push(k);
    }
    (x, y)
}

/// `labels` in a seeded random order.
pub fn shuffled(labels: &[usize], seed: u64) -> Vec<usize> {
    let mut out = labels.to_vec();
    out.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    out
}

/// One informative feature: class k draws from `[k, k + 0.8)` in column 0;
/// remaining columns are uniform noise in `[0, 1)`.
pub fn threshold_1d(n: usize, extra: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    use rand::Rng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let k = i % 3;
        let mut row = vec![k as f64 + rng.gen_range(0.0..0.8)];
        row.extend((0..extra).map(|_| rng.gen_range(0.0..1.0)));
        x.push(row);
        y.push(k);
    }
    (x, y)
}
