//! Counter-based random number streams.
//!
//! Every draw is a pure function of (seed, replica, cell, draw index), so a
//! Monte Carlo run is reproducible bit-for-bit no matter how replicas are
//! scheduled across threads. The generator is the splitmix64 finalizer used
//! as a keyed counter permutation; stream keys are derived by chaining the
//! finalizer over the coordinate tuple.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A derived stream identity. Children are independent streams; the tree
/// (seed -> replica -> cell) gives every Monte Carlo cell its own stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey(u64);

impl StreamKey {
    pub fn new(seed: u64) -> Self {
        StreamKey(mix(seed ^ GOLDEN))
    }

    /// Derives the `index`-th child stream.
    pub fn child(self, index: u64) -> Self {
        StreamKey(mix(self.0 ^ GOLDEN.wrapping_mul(index.wrapping_add(1))))
    }

    /// Sequential generator over this stream.
    pub fn stream(self) -> CounterRng {
        CounterRng {
            key: self.0,
            counter: 0,
        }
    }
}

/// Stateless-in-principle counter generator: output i is mix(key + i*GOLDEN).
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn next_u64(&mut self) -> u64 {
        let v = mix(self.key.wrapping_add(self.counter.wrapping_mul(GOLDEN)));
        self.counter = self.counter.wrapping_add(1);
        v
    }

    /// Uniform draw strictly inside (0, 1): 53 mantissa bits offset by half
    /// a unit, so logs of either `u` or `1 - u` are always finite.
    pub fn uniform_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9007199254740992.0)
    }

    /// Standard normal draw via Box-Muller (two uniforms per draw).
    pub fn standard_normal(&mut self) -> f64 {
        let u1 = self.uniform_open();
        let u2 = self.uniform_open();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}
