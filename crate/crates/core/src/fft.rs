//! Thin FFT helpers on top of rustfft (which leaves both directions
//! unnormalized).

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Smallest 5-smooth integer >= n. Mixed-radix FFT lengths of this form avoid
/// the overhead of padding all the way to a power of two.
pub fn next_fast_len(n: usize) -> usize {
    let mut n = n.max(1);
    loop {
        let mut m = n;
        for p in [2usize, 3, 5] {
            while m % p == 0 {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

/// Full linear convolution of two complex sequences, length a + b - 1.
pub fn linear_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    // Direct sum is cheaper when one side is short.
    if a.len().min(b.len()) <= 16 {
        let (short, long) = if a.len() <= b.len() { (a, b) } else { (b, a) };
        let mut out = vec![Complex64::new(0.0, 0.0); out_len];
        for (i, s) in short.iter().enumerate() {
            for (j, l) in long.iter().enumerate() {
                out[i + j] += s * l;
            }
        }
        return out;
    }
    let m = next_fast_len(out_len);
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    let mut fa = vec![Complex64::new(0.0, 0.0); m];
    fa[..a.len()].copy_from_slice(a);
    fwd.process(&mut fa);
    let mut fb = vec![Complex64::new(0.0, 0.0); m];
    fb[..b.len()].copy_from_slice(b);
    fwd.process(&mut fb);

    for (x, y) in fa.iter_mut().zip(fb.iter()) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / m as f64;
    fa.truncate(out_len);
    for x in fa.iter_mut() {
        *x *= scale;
    }
    fa
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_len_is_5_smooth_and_minimal() {
        assert_eq!(next_fast_len(1), 1);
        assert_eq!(next_fast_len(7), 8);
        assert_eq!(next_fast_len(11), 12);
        assert_eq!(next_fast_len(121), 125);
        assert_eq!(next_fast_len(524289), 524880);
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let a: Vec<Complex64> = (0..97)
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let b: Vec<Complex64> = (0..53)
            .map(|i| Complex64::new((i as f64 * 1.3).cos(), (i as f64 * 0.9).sin()))
            .collect();
        let fast = linear_convolve(&a, &b);
        for k in 0..fast.len() {
            let mut direct = Complex64::new(0.0, 0.0);
            for i in 0..a.len() {
                if k >= i && k - i < b.len() {
                    direct += a[i] * b[k - i];
                }
            }
            assert!((fast[k] - direct).norm() < 1e-10, "k = {k}");
        }
    }
}
