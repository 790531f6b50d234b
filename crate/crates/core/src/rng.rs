use num_complex::Complex64;

/// Small deterministic generator (splitmix64). Used for reproducible start
/// vectors and test data; identical output on every platform for a given seed.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (-1, 1).
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    pub fn next_complex(&mut self) -> Complex64 {
        Complex64::new(self.next_signed(), self.next_signed())
    }
}

/// Dense complex vector with entries uniform in the unit square.
pub fn random_complex_vector(seed: u64, len: usize) -> Vec<Complex64> {
    let mut rng = SplitMix64::new(seed);
    (0..len).map(|_| rng.next_complex()).collect()
}
