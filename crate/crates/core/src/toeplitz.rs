//! Implicit Toeplitz operators with FFT-accelerated matvec via circulant
//! embedding, spectral-norm estimation, the triangle bound, and the
//! block-rearrangement utility.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::fft::next_fast_len;
use crate::krylov::{largest_singular_value, LinearOp, NormEstimate, NormOptions};
use crate::symbols::FHSymbol;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Full coefficient window a_k, k in [-(n-1), n-1], of an n x n Toeplitz
/// matrix (a_{j-k}).
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffWindow {
    n: usize,
    a: Vec<Complex64>, // a[idx] = a_{idx - (n-1)}
}

impl CoeffWindow {
    pub fn new(n: usize, a: Vec<Complex64>) -> Result<Self> {
        assert!(n >= 1);
        if a.len() != 2 * n - 1 {
            return Err(Error::WindowLength {
                expected: 2 * n - 1,
                got: a.len(),
            });
        }
        Ok(Self { n, a })
    }

    pub fn from_fn(n: usize, f: impl FnMut(i64) -> Complex64) -> Self {
        let half = n as i64 - 1;
        Self {
            n,
            a: (-half..=half).map(f).collect(),
        }
    }

    /// Window of the identity matrix: a_0 = 1, rest 0.
    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |k| {
            if k == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// a_k, zero outside the window.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k + self.n as i64 - 1;
        if idx < 0 || idx as usize >= self.a.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.a[idx as usize]
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.a
    }

    /// Sum of moduli; dominates the spectral norm since each diagonal alone
    /// has norm |a_k|.
    pub fn triangle_bound(&self) -> f64 {
        self.a.iter().map(|c| c.norm()).sum()
    }

    /// a_{-k} = conj(a_k) for all k.
    pub fn is_hermitian(&self) -> bool {
        let half = self.n as i64 - 1;
        (0..=half).all(|k| (self.coeff(-k) - self.coeff(k).conj()).norm() == 0.0)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.n, self.n, |i, j| self.coeff(i as i64 - j as i64))
    }
}

/// Implicit n x n Toeplitz matrix with O(n log n) matvec. The window is
/// embedded into a circulant of 5-smooth length >= 2n-1 whose transform is
/// precomputed once; the operator is immutable afterwards and safe to share
/// across threads.
pub struct ToeplitzOperator {
    window: CoeffWindow,
    len: usize,
    spectrum: Vec<Complex64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl ToeplitzOperator {
    pub fn new(window: CoeffWindow) -> Self {
        let n = window.n();
        let len = next_fast_len(2 * n - 1);
        let mut col = vec![Complex64::new(0.0, 0.0); len];
        col[0] = window.coeff(0);
        for j in 1..n {
            col[j] = window.coeff(j as i64);
            col[len - j] = window.coeff(-(j as i64));
        }
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let mut spectrum = col;
        fwd.process(&mut spectrum);
        Self {
            window,
            len,
            spectrum,
            fwd,
            inv,
        }
    }

    /// Operator of T_n(a) for the given symbol, with the truncation chosen
    /// automatically (exact for at most one factor).
    pub fn from_symbol(symbol: &FHSymbol, n: usize) -> Result<Self> {
        let trunc = symbol.default_trunc(n);
        Ok(Self::from_symbol_with_trunc(symbol, n, trunc)?.0)
    }

    /// Operator plus the reported truncation-tail estimate of its window.
    pub fn from_symbol_with_trunc(
        symbol: &FHSymbol,
        n: usize,
        trunc: i64,
    ) -> Result<(Self, f64)> {
        let (coeffs, tail) = symbol.window_with_trunc(n, trunc)?;
        Ok((Self::new(CoeffWindow::new(n, coeffs)?), tail))
    }

    pub fn n(&self) -> usize {
        self.window.n()
    }

    pub fn window(&self) -> &CoeffWindow {
        &self.window
    }

    fn circulant_apply(&self, x: &[Complex64], y: &mut [Complex64], adjoint: bool) {
        let n = self.n();
        assert_eq!(x.len(), n);
        assert_eq!(y.len(), n);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len];
        buf[..n].copy_from_slice(x);
        self.fwd.process(&mut buf);
        if adjoint {
            for (b, s) in buf.iter_mut().zip(self.spectrum.iter()) {
                *b *= s.conj();
            }
        } else {
            for (b, s) in buf.iter_mut().zip(self.spectrum.iter()) {
                *b *= s;
            }
        }
        self.inv.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        for (yi, bi) in y.iter_mut().zip(buf.iter()) {
            *yi = bi * scale;
        }
    }

    /// T v.
    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n()];
        self.circulant_apply(v, &mut y, false);
        y
    }

    /// T* v.
    pub fn matvec_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); self.n()];
        self.circulant_apply(v, &mut y, true);
        y
    }

    /// Largest singular value by matrix-free bidiagonalization.
    pub fn spectral_norm(&self, tol: f64, max_iter: usize) -> NormEstimate {
        self.spectral_norm_with(&NormOptions {
            tol,
            max_iter,
            ..Default::default()
        })
    }

    pub fn spectral_norm_with(&self, opts: &NormOptions) -> NormEstimate {
        largest_singular_value(self, opts)
    }
}

impl LinearOp for ToeplitzOperator {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.circulant_apply(x, y, false);
    }

    fn apply_adjoint_into(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.circulant_apply(x, y, true);
    }
}

/// Row-and-column rearrangement of T_n (n = m q) by residue classes mod q:
/// rows 0, q, 2q, ... first, then 1, q+1, ..., and the same for columns.
/// The result is block Toeplitz with m x m Toeplitz blocks
/// (j,k)-block entry (u,v) = a_{(j-k) + (u-v) q}, and the permutation
/// similarity preserves the spectral norm exactly.
pub fn block_rearrange(window: &CoeffWindow, q: usize) -> Result<(DenseMatrix, Vec<usize>)> {
    let n = window.n();
    if q == 0 || n % q != 0 {
        return Err(Error::NotDivisible { n, q });
    }
    let m = n / q;
    let mut perm = vec![0usize; n];
    for j in 0..q {
        for u in 0..m {
            perm[j * m + u] = u * q + j;
        }
    }
    let matrix = DenseMatrix::from_fn(n, n, |r, c| {
        window.coeff(perm[r] as i64 - perm[c] as i64)
    });
    Ok((matrix, perm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use crate::symbols::{pure_fh_coeff, FHFactor, SmoothPart};

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn random_window(seed: u64, n: usize) -> CoeffWindow {
        let mut rng = SplitMix64::new(seed);
        CoeffWindow::from_fn(n, |_| rng.next_complex())
    }

    fn dense_norm(m: &DenseMatrix) -> f64 {
        nalgebra::DMatrix::<Complex64>::from_fn(m.nrows(), m.ncols(), |i, j| m.get(i, j))
            .singular_values()
            .max()
    }

    #[test]
    fn matvec_matches_dense_columns() {
        for n in [1usize, 2, 3, 8, 17, 64] {
            let op = ToeplitzOperator::new(random_window(n as u64, n));
            let dense = op.window().to_dense();
            for j in 0..n {
                let mut e = vec![r(0.0); n];
                e[j] = r(1.0);
                let got = op.matvec(&e);
                for (i, g) in got.iter().enumerate() {
                    let want = dense.get(i, j);
                    assert!(
                        (g - want).norm() <= 1e-12 * want.norm().max(1.0),
                        "n={n} col {j} row {i}"
                    );
                }
            }
        }
    }

    #[test]
    fn matvec_matches_dense_on_random_vectors() {
        let n = 8;
        let op = ToeplitzOperator::new(random_window(99, n));
        let dense = op.window().to_dense();
        let v = crate::rng::random_complex_vector(7, n);
        let got = op.matvec(&v);
        let want = dense.matvec(&v);
        for (g, w) in got.iter().zip(want.iter()) {
            assert!((g - w).norm() <= 1e-12 * w.norm().max(1.0));
        }
    }

    #[test]
    fn identity_window_is_identity() {
        let op = ToeplitzOperator::new(CoeffWindow::identity(5));
        let v = crate::rng::random_complex_vector(3, 5);
        let got = op.matvec(&v);
        for (g, w) in got.iter().zip(v.iter()) {
            assert!((g - w).norm() < 1e-14);
        }
        let est = op.spectral_norm(1e-10, 100);
        assert!((est.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn first_column_from_unit_vector() {
        let op = ToeplitzOperator::new(CoeffWindow::from_fn(6, |_| r(1.0)));
        let mut e0 = vec![r(0.0); 6];
        e0[0] = r(1.0);
        let col = op.matvec(&e0);
        for v in col {
            assert!((v - r(1.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn adjoint_is_consistent_with_inner_products() {
        let n = 33;
        let op = ToeplitzOperator::new(random_window(5, n));
        let v = crate::rng::random_complex_vector(11, n);
        let w = crate::rng::random_complex_vector(12, n);
        let tv = op.matvec(&v);
        let tw = op.matvec_adjoint(&w);
        let lhs: Complex64 = tv.iter().zip(w.iter()).map(|(a, b)| a * b.conj()).sum();
        let rhs: Complex64 = v.iter().zip(tw.iter()).map(|(a, b)| a * b.conj()).sum();
        assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn single_superdiagonal_has_unit_norm() {
        let w = CoeffWindow::from_fn(12, |k| if k == 1 { r(1.0) } else { r(0.0) });
        let est = ToeplitzOperator::new(w).spectral_norm(1e-10, 200);
        assert!(est.converged);
        assert!((est.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn spectral_norm_matches_dense_svd() {
        for n in [4usize, 16, 48] {
            let w = random_window(1000 + n as u64, n);
            let want = dense_norm(&w.to_dense());
            let est = ToeplitzOperator::new(w).spectral_norm(1e-12, 1000);
            assert!(est.converged);
            assert!(
                (est.value - want).abs() <= 1e-8 * want,
                "n={n}: {} vs {want}",
                est.value
            );
        }
    }

    #[test]
    fn triangle_bound_dominates() {
        let w = CoeffWindow::from_fn(3, |k| if k.abs() == 1 { r(1.0) } else { r(0.0) });
        assert_eq!(w.triangle_bound(), 2.0);
        assert_eq!(CoeffWindow::identity(7).triangle_bound(), 1.0);
        let w = random_window(4242, 32);
        let bound = w.triangle_bound();
        let norm = dense_norm(&w.to_dense());
        assert!(norm <= bound + 1e-12);
    }

    #[test]
    fn from_symbol_single_factor_window() {
        let f = FHFactor::at_one(r(0.25), r(0.0)).unwrap();
        let sym = FHSymbol::single(f, SmoothPart::one());
        let op = ToeplitzOperator::from_symbol(&sym, 3).unwrap();
        for k in -2i64..=2 {
            let want = pure_fh_coeff(r(0.25), r(0.0), k).unwrap();
            assert_eq!(op.window().coeff(k), want);
        }
        // a_0 at n = 2: Gamma(1/2)/Gamma(3/4)^2.
        let op = ToeplitzOperator::from_symbol(&sym, 2).unwrap();
        assert!((op.window().coeff(0).re - 1.180340599016096226045).abs() < 1e-13);

        let sym = FHSymbol::constant_one();
        let op = ToeplitzOperator::from_symbol(&sym, 4).unwrap();
        for k in -3i64..=3 {
            let want = if k == 0 { 1.0 } else { 0.0 };
            assert_eq!(op.window().coeff(k), r(want));
        }
    }

    #[test]
    fn block_rearrange_is_a_norm_preserving_permutation() {
        let n = 6;
        let w = random_window(31, n);
        let dense = w.to_dense();
        let (m2, perm) = block_rearrange(&w, 2).unwrap();
        // Entry check: block (j,k), entry (u,v) = a_{(j-k) + (u-v) * 2}.
        let m = n / 2;
        for j in 0..2 {
            for k in 0..2 {
                for u in 0..m {
                    for v in 0..m {
                        let got = m2.get(j * m + u, k * m + v);
                        let want = w.coeff((j as i64 - k as i64) + (u as i64 - v as i64) * 2);
                        assert_eq!(got, want);
                    }
                }
            }
        }
        // Permutation consistency.
        for r_ in 0..n {
            for c_ in 0..n {
                assert_eq!(m2.get(r_, c_), dense.get(perm[r_], perm[c_]));
            }
        }
        let na = dense_norm(&dense);
        let nb = dense_norm(&m2);
        assert!((na - nb).abs() <= 1e-12 * na);
    }

    #[test]
    fn block_rearrange_edge_cases() {
        let w = random_window(8, 6);
        // q = 1: identity permutation.
        let (m1, perm) = block_rearrange(&w, 1).unwrap();
        assert_eq!(perm, (0..6).collect::<Vec<_>>());
        assert_eq!(m1, w.to_dense());
        // q = n: permutation is again the identity (m = 1).
        let (mn, perm) = block_rearrange(&w, 6).unwrap();
        assert_eq!(perm, (0..6).collect::<Vec<_>>());
        assert_eq!(mn, w.to_dense());
        // Non-divisor rejected.
        assert!(matches!(
            block_rearrange(&w, 4),
            Err(Error::NotDivisible { n: 6, q: 4 })
        ));
    }

    #[test]
    fn window_validation() {
        assert!(matches!(
            CoeffWindow::new(3, vec![r(0.0); 4]),
            Err(Error::WindowLength { expected: 5, got: 4 })
        ));
        let w = CoeffWindow::new(2, vec![r(1.0), r(2.0), r(3.0)]).unwrap();
        assert_eq!(w.coeff(-1), r(1.0));
        assert_eq!(w.coeff(0), r(2.0));
        assert_eq!(w.coeff(1), r(3.0));
        assert_eq!(w.coeff(2), r(0.0));
        assert!(!w.is_hermitian());
        let h = CoeffWindow::new(2, vec![Complex64::new(0.5, -0.25), r(2.0), Complex64::new(0.5, 0.25)]).unwrap();
        assert!(h.is_hermitian());
    }
}
