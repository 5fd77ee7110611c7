//! Seeded random primitives shared by every generator.
//!
//! Every stream is a ChaCha8 generator keyed by a 64-bit master seed and
//! positioned on its own 64-bit stream id, so `(master_seed, stream_id)`
//! fully determines the draw sequence and distinct ids never overlap.
//!
//! **Geometric convention:** `geo(p)` is supported on `{0, 1, 2, ...}` with
//! `P(geo(p) = k) = (1 - p)^k p`, i.e. it counts failures before the first
//! success. Many libraries count trials instead (support `{1, 2, ...}`);
//! every weight rule and rate function in this crate assumes the former.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// Identifies one reproducible random stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_id,
        }
    }

    /// Opens the stream at its first draw.
    pub fn stream(self) -> Stream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        Stream { rng }
    }

    /// Same master seed, stream id derived from `(name, index)`.
    pub fn derive(self, name: &str, index: u64) -> SeedSpec {
        SeedSpec::new(self.master_seed, stream_hash(name, index) ^ self.stream_id)
    }
}

/// Stable 64-bit hash of `(name, index)`: FNV-1a over the name bytes and the
/// little-endian index, followed by the splitmix64 finalizer.
pub fn stream_hash(name: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes().chain(index.to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h ^= h >> 30;
    h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h ^= h >> 27;
    h = h.wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// A cursor into one random stream. Not `Sync`-shared: one stream per trial.
#[derive(Clone, Debug)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    /// Uniform on the open interval `(0, 1)`, 53 bits of resolution.
    #[inline]
    pub fn open_unit(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..s`; `s` must be positive.
    #[inline]
    pub fn below(&mut self, s: usize) -> usize {
        self.rng.random_range(0..s)
    }

    #[inline]
    pub fn coin(&mut self) -> bool {
        self.rng.next_u64() >> 63 == 1
    }
}

/// `geo(p)` on `{0, 1, ...}`, sampled by inversion.
#[derive(Clone, Copy, Debug)]
pub struct Geometric {
    p: f64,
    log_q: f64,
}

impl Geometric {
    pub fn new(p: f64) -> Result<Self> {
        ensure(p > 0.0 && p <= 1.0, "p", p, "0 < p <= 1")?;
        Ok(Geometric {
            p,
            log_q: (-p).ln_1p(),
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `P(geo = k)`.
    pub fn pmf(&self, k: u64) -> f64 {
        ((k as f64) * self.log_q).exp() * self.p
    }

    /// Inversion from a uniform on `(0, 1)`.
    #[inline]
    pub fn from_uniform(&self, u: f64) -> u64 {
        if self.p == 1.0 {
            return 0;
        }
        (u.ln() / self.log_q).floor() as u64
    }

    /// Consumes exactly one uniform from the stream.
    #[inline]
    pub fn sample(&self, stream: &mut Stream) -> u64 {
        let u = stream.open_unit();
        self.from_uniform(u)
    }
}

/// The walk-length mixture `L(p, beta)`: `0` with probability `beta`,
/// otherwise `geo(p)`.
///
/// One uniform is consumed per draw; for `beta = 0` the draw coincides
/// bit-for-bit with [`Geometric::sample`] on the same stream.
#[derive(Clone, Copy, Debug)]
pub struct WalkLength {
    geo: Geometric,
    beta: f64,
}

impl WalkLength {
    pub fn new(p: f64, beta: f64) -> Result<Self> {
        ensure((0.0..=1.0).contains(&beta), "beta", beta, "0 <= beta <= 1")?;
        Ok(WalkLength {
            geo: Geometric::new(p)?,
            beta,
        })
    }

    #[inline]
    pub fn sample(&self, stream: &mut Stream) -> u64 {
        let u = stream.open_unit();
        if u < self.beta {
            0
        } else {
            self.geo.from_uniform((u - self.beta) / (1.0 - self.beta))
        }
    }
}

pub fn sample_geometric(p: f64, stream: &mut Stream) -> Result<u64> {
    Ok(Geometric::new(p)?.sample(stream))
}

/// Mean-one exponential; strictly positive.
#[inline]
pub fn sample_exponential(stream: &mut Stream) -> f64 {
    -stream.open_unit().ln()
}

pub fn sample_walk_length(p: f64, beta: f64, stream: &mut Stream) -> Result<u64> {
    Ok(WalkLength::new(p, beta)?.sample(stream))
}

pub fn sample_uniform_vertex(s: usize, stream: &mut Stream) -> Result<usize> {
    if s == 0 {
        return Err(Error::EmptyRange);
    }
    Ok(stream.below(s))
}
