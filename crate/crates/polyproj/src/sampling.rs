//! Deterministic sampling streams and a small fork-join helper.
//!
//! Every random draw in the crate comes from a [`ChaCha8Rng`] seeded through
//! [`stream`], which mixes the user seed with an operation tag and two
//! position indices (typically shell index and sample index). A sample is
//! therefore a pure function of `(seed, tag, shell, index)`: reordering work,
//! changing the thread count, or resuming a subset of the samples cannot
//! change any value.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Operation tags keep streams for different sampling purposes disjoint even
/// when they share the seed and position indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamTag {
    FitPairA,
    FitPairB,
    FitPoint,
    Discontinuity,
    GraphProbe,
    LipschitzPair,
    Transplant,
    RcrcqSample,
    ActiveInclusion,
    Liminf,
    Equivalence,
    RankPersist,
    MfcqDecay,
    ExprProbe,
    BandProbe,
    BoundProbe,
}

impl StreamTag {
    fn code(self) -> u64 {
        match self {
            StreamTag::FitPairA => 0x11,
            StreamTag::FitPairB => 0x12,
            StreamTag::FitPoint => 0x13,
            StreamTag::Discontinuity => 0x21,
            StreamTag::GraphProbe => 0x22,
            StreamTag::LipschitzPair => 0x23,
            StreamTag::Transplant => 0x24,
            StreamTag::RcrcqSample => 0x31,
            StreamTag::ActiveInclusion => 0x32,
            StreamTag::Liminf => 0x33,
            StreamTag::Equivalence => 0x34,
            StreamTag::RankPersist => 0x35,
            StreamTag::MfcqDecay => 0x36,
            StreamTag::ExprProbe => 0x41,
            StreamTag::BandProbe => 0x42,
            StreamTag::BoundProbe => 0x43,
        }
    }
}

/// splitmix64 step; the standard finalizer with good avalanche behavior.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Independent generator for one `(seed, tag, shell, index)` position.
pub fn stream(seed: u64, tag: StreamTag, shell: u64, index: u64) -> ChaCha8Rng {
    let mut state = seed;
    let mut key = [0u8; 32];
    let words = [
        splitmix64(&mut state) ^ tag.code().wrapping_mul(0x9e3779b97f4a7c15),
        splitmix64(&mut state) ^ shell.wrapping_mul(0xd1342543de82ef95),
        splitmix64(&mut state) ^ index.wrapping_mul(0xaf251af3b0f025b5),
        splitmix64(&mut state),
    ];
    for (chunk, w) in key.chunks_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Standard normal draw via Box-Muller, consuming two uniforms.
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u: f64 = rng.gen::<f64>();
        if u > 0.0 {
            let v: f64 = rng.gen::<f64>();
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

/// Uniform direction on the unit sphere in `dim` dimensions.
pub fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = crate::numerics::norm(&v);
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// `center + radius * u` with `u` uniform on the unit sphere.
pub fn on_sphere(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    let u = unit_direction(rng, center.len());
    crate::numerics::add_scaled(center, radius, &u)
}

/// Uniform draw from the closed ball `center + radius * B`.
pub fn in_ball(rng: &mut ChaCha8Rng, center: &[f64], radius: f64) -> Vec<f64> {
    let dim = center.len();
    let u = unit_direction(rng, dim);
    let r = radius * rng.gen::<f64>().powf(1.0 / dim.max(1) as f64);
    crate::numerics::add_scaled(center, r, &u)
}

/// Optional spherical restriction on the parameter domain.
#[derive(Clone, Copy, Debug)]
pub struct DomainBall<'a> {
    pub center: &'a [f64],
    pub radius: f64,
}

impl DomainBall<'_> {
    pub fn contains(&self, p: &[f64]) -> bool {
        crate::numerics::dist(p, self.center) <= self.radius
    }

    /// Nearest point of the ball, for clamping rejected samples.
    pub fn clamp(&self, p: &[f64]) -> Vec<f64> {
        let d = crate::numerics::dist(p, self.center);
        if d <= self.radius {
            return p.to_vec();
        }
        let dir: Vec<f64> = p
            .iter()
            .zip(self.center)
            .map(|(x, c)| (x - c) / d)
            .collect();
        crate::numerics::add_scaled(self.center, self.radius, &dir)
    }
}

/// Draws from `sample_once` until the point lands in `domain`, up to 64
/// retries, then clamps the last draw onto the domain ball.
pub fn sample_in_domain(
    rng: &mut ChaCha8Rng,
    domain: Option<DomainBall<'_>>,
    mut sample_once: impl FnMut(&mut ChaCha8Rng) -> Vec<f64>,
) -> Vec<f64> {
    let Some(ball) = domain else {
        return sample_once(rng);
    };
    let mut last = sample_once(rng);
    for _ in 0..64 {
        if ball.contains(&last) {
            return last;
        }
        last = sample_once(rng);
    }
    ball.clamp(&last)
}

/// Worker count: `POLYPROJ_THREADS` when set to a positive integer, otherwise
/// the machine's available parallelism, capped at 16.
pub fn threads() -> usize {
    if let Ok(s) = std::env::var("POLYPROJ_THREADS") {
        if let Ok(n) = s.trim().parse::<usize>() {
            if n >= 1 {
                return n.min(64);
            }
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(16)
}

/// Applies `f` to every index in `0..count` across [`threads`] workers and
/// returns the results in index order. `f` must be deterministic per index;
/// the scheduling is invisible in the output.
pub fn par_map<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = threads().min(count.max(1));
    if workers <= 1 || count <= 1 {
        return (0..count).map(f).collect();
    }
    let mut slots: Vec<Option<T>> = (0..count).map(|_| None).collect();
    let mut chunks: Vec<(usize, &mut [Option<T>])> = Vec::new();
    let chunk_len = count.div_ceil(workers);
    let mut rest = slots.as_mut_slice();
    let mut start = 0;
    while !rest.is_empty() {
        let take = chunk_len.min(rest.len());
        let (head, tail) = rest.split_at_mut(take);
        chunks.push((start, head));
        start += take;
        rest = tail;
    }
    std::thread::scope(|scope| {
        for (offset, chunk) in chunks {
            let f = &f;
            scope.spawn(move || {
                for (k, slot) in chunk.iter_mut().enumerate() {
                    *slot = Some(f(offset + k));
                }
            });
        }
    });
    slots.into_iter().map(|s| s.expect("worker filled slot")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dist, norm};

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<f64> = {
            let mut r = stream(42, StreamTag::FitPairA, 3, 7);
            (0..4).map(|_| r.gen::<f64>()).collect()
        };
        let b: Vec<f64> = {
            let mut r = stream(42, StreamTag::FitPairA, 3, 7);
            (0..4).map(|_| r.gen::<f64>()).collect()
        };
        assert_eq!(a, b);
        let c: Vec<f64> = {
            let mut r = stream(42, StreamTag::FitPairB, 3, 7);
            (0..4).map(|_| r.gen::<f64>()).collect()
        };
        assert_ne!(a, c);
        let d: Vec<f64> = {
            let mut r = stream(43, StreamTag::FitPairA, 3, 7);
            (0..4).map(|_| r.gen::<f64>()).collect()
        };
        assert_ne!(a, d);
    }

    #[test]
    fn sphere_and_ball_respect_radius() {
        let mut r = stream(1, StreamTag::FitPoint, 0, 0);
        let c = [1.0, -2.0, 0.5];
        for _ in 0..50 {
            let s = on_sphere(&mut r, &c, 0.25);
            assert!((dist(&s, &c) - 0.25).abs() < 1e-12);
            let b = in_ball(&mut r, &c, 0.25);
            assert!(dist(&b, &c) <= 0.25 + 1e-12);
        }
    }

    #[test]
    fn unit_directions_have_unit_norm() {
        let mut r = stream(7, StreamTag::GraphProbe, 1, 2);
        for dim in [1usize, 2, 5] {
            let u = unit_direction(&mut r, dim);
            assert!((norm(&u) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn domain_rejection_falls_back_to_clamp() {
        let center = [0.0, 0.0];
        let ball = DomainBall {
            center: &center,
            radius: 0.1,
        };
        let mut r = stream(3, StreamTag::FitPoint, 0, 1);
        // Sampling far outside the domain forces the clamp path.
        let p = sample_in_domain(&mut r, Some(ball), |rng| on_sphere(rng, &[5.0, 5.0], 0.01));
        assert!((dist(&p, &center) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn par_map_matches_serial_order() {
        let serial: Vec<u64> = (0..37).map(|i| (i as u64) * 3 + 1).collect();
        let parallel = par_map(37, |i| (i as u64) * 3 + 1);
        assert_eq!(serial, parallel);
    }
}
