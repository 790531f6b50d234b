//! Cross-module invariants checked through the public API, with an
//! independent singularity-aware quadrature oracle for Fourier coefficients.

#![allow(clippy::excessive_precision)] // reference values keep full precision

use fhnorm::asymptotics::{convergence_study, predict_multi, StudyOptions};
use fhnorm::integral_ops::{kernel_norm, HomogeneousKernel};
use fhnorm::krylov::NormOptions;
use fhnorm::symbols::{Angle, FHFactor, FHSymbol, SmoothPart};
use fhnorm::toeplitz::ToeplitzOperator;
use num_complex::Complex64;
use std::f64::consts::PI;

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

// ---------------------------------------------------------------------------
// Quadrature oracle: (1/2pi) int a(e^{i theta}) e^{-i n theta} d theta with a
// power substitution that absorbs each |t - t_r|^{-2 Re alpha_r} singularity.
// Independent of the closed-form coefficient path it is used to check.
// ---------------------------------------------------------------------------

fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..60 {
            // Legendre recurrence for P_n and P_n'.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let mut p0 = 1.0;
        let mut p1 = x;
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64, gl: &(Vec<f64>, Vec<f64>)) -> Complex64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, w) in gl.0.iter().zip(gl.1.iter()) {
        acc += f(mid + half * x) * *w;
    }
    acc * half
}

fn wrap(theta: f64) -> f64 {
    fhnorm::symbols::wrap_angle(theta)
}

/// Factor value |e^{i delta} - 1|^{-2 alpha} exp(i beta arg(-e^{i delta})) at
/// a signed offset delta from its own angle. Working in offsets keeps the
/// integrand meaningful down to |delta| ~ 1e-18, far below what theta-space
/// evaluation can represent next to a nonzero angle.
fn factor_at_offset(alpha: Complex64, beta: Complex64, delta: f64) -> Complex64 {
    let modulus = 2.0 * (delta / 2.0).sin().abs();
    let power = (-2.0 * alpha * modulus.ln()).exp();
    let jump_arg = if delta > 0.0 { delta - PI } else { delta + PI };
    let jump = (Complex64::i() * beta * jump_arg).exp();
    power * jump
}

/// Symbol value at theta_r + delta where theta_r is the angle of factor r.
fn eval_near(symbol: &FHSymbol, r: usize, delta: f64) -> Complex64 {
    let theta_r = symbol.factors()[r].theta0();
    let theta = theta_r + delta;
    let mut v = symbol.smooth().eval(theta);
    for (rho, fac) in symbol.factors().iter().enumerate() {
        let d = if rho == r { delta } else { wrap(theta - fac.theta0()) };
        v *= factor_at_offset(fac.alpha(), fac.beta(), d);
    }
    v
}

/// Integrate the coefficient integrand from factor r outward over offsets
/// delta in (0, span], on the side given by `sign`. The substitution
/// delta = u^p with p (1 - 2 re_alpha) = 1 flattens the algebraic
/// singularity; panels are graded dyadically toward u = 0.
fn graded_half_arc(
    symbol: &FHSymbol,
    n: i64,
    r: usize,
    sign: f64,
    span: f64,
    gl: &(Vec<f64>, Vec<f64>),
) -> Complex64 {
    let theta_r = symbol.factors()[r].theta0();
    let re_alpha = symbol.factors()[r].alpha().re;
    let p = 1.0 / (1.0 - 2.0 * re_alpha);
    let u_max = span.powf(1.0 / p);
    let g = |u: f64| {
        let delta = sign * u.powf(p);
        eval_near(symbol, r, delta)
            * Complex64::from_polar(1.0, -(n as f64) * (theta_r + delta))
            / (2.0 * PI)
            * p
            * u.powf(p - 1.0)
    };
    let mut acc = Complex64::new(0.0, 0.0);
    let mut upper = u_max;
    for _ in 0..64 {
        let lower = upper * 0.5;
        // Three subpanels per dyadic slice keep the outer (wide) slices as
        // accurate as the graded inner ones.
        let third = (upper - lower) / 3.0;
        for s in 0..3 {
            let a = lower + s as f64 * third;
            acc += panel(&g, a, a + third, gl);
        }
        upper = lower;
        if upper < 1e-13 * u_max {
            break;
        }
    }
    acc
}

fn quadrature_coeff(symbol: &FHSymbol, n: i64) -> Complex64 {
    let gl = gauss_legendre(24);
    let mut order: Vec<usize> = (0..symbol.factors().len()).collect();
    order.sort_by(|&a, &b| {
        symbol.factors()[a]
            .theta0()
            .partial_cmp(&symbol.factors()[b].theta0())
            .unwrap()
    });
    if order.is_empty() {
        let f = |theta: f64| {
            symbol.eval(theta).expect("no singular angles")
                * Complex64::from_polar(1.0, -(n as f64) * theta)
                / (2.0 * PI)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        let k = 16;
        for i in 0..k {
            let a = -PI + 2.0 * PI * i as f64 / k as f64;
            let b = -PI + 2.0 * PI * (i + 1) as f64 / k as f64;
            acc += panel(&f, a, b, &gl);
        }
        return acc;
    }
    // Between consecutive singularities, split at the arc midpoint and
    // integrate each half outward from its own singular endpoint.
    let m = order.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        let left = order[i];
        let right = order[(i + 1) % m];
        let gap = if i + 1 < m {
            symbol.factors()[right].theta0() - symbol.factors()[left].theta0()
        } else {
            symbol.factors()[right].theta0() + 2.0 * PI - symbol.factors()[left].theta0()
        };
        acc += graded_half_arc(symbol, n, left, 1.0, 0.5 * gap, &gl);
        acc += graded_half_arc(symbol, n, right, -1.0, 0.5 * gap, &gl);
    }
    acc
}

// ---------------------------------------------------------------------------

#[test]
fn gauss_rule_integrates_polynomials_exactly() {
    let gl = gauss_legendre(24);
    for k in [0usize, 1, 5, 12, 31, 47] {
        let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
        let got = panel(&|x: f64| r(x.powi(k as i32)), -1.0, 1.0, &gl);
        assert!((got.re - exact).abs() < 1e-13, "x^{k}");
    }
}

#[test]
fn quadrature_oracle_matches_closed_form_coefficients() {
    // Pure singularity at t0 = 1 with a jump: references are the closed-form
    // sigma_n, so this validates the oracle and the formula conventions
    // against each other.
    let f = FHFactor::at_one(r(0.25), r(0.3)).unwrap();
    let sym = FHSymbol::single(f, SmoothPart::one());
    for n in [0i64, 3, -2, 7] {
        let want = fhnorm::pure_fh_coeff(r(0.25), r(0.3), n).unwrap();
        let got = quadrature_coeff(&sym, n);
        assert!(
            (got - want).norm() < 1e-9,
            "n = {n}: quadrature {got} vs exact {want}"
        );
    }
}

#[test]
fn quadrature_oracle_matches_external_references() {
    // Two factors (alpha = 0.2, beta = 0) at t0 = +-1; references computed
    // with an arbitrary-precision library.
    let sym = FHSymbol::new(
        vec![
            FHFactor::at_one(r(0.2), r(0.0)).unwrap(),
            FHFactor::new(Angle::from_fraction(1, 2).unwrap(), r(0.2), r(0.0)).unwrap(),
        ],
        SmoothPart::one(),
    )
    .unwrap();
    let a0 = quadrature_coeff(&sym, 0);
    assert!((a0.re - 1.098685539604399467838).abs() < 1e-8, "a0 = {a0}");
    let a2 = quadrature_coeff(&sym, 2);
    assert!((a2.re - 0.2746713849010998669595).abs() < 1e-8, "a2 = {a2}");
    // Odd coefficients vanish by the half-turn symmetry.
    let a1 = quadrature_coeff(&sym, 1);
    assert!(a1.norm() < 1e-9, "a1 = {a1}");
}

#[test]
fn truncated_convolution_agrees_with_quadrature() {
    // The study symbol of the multi-singularity law: alpha = 0.25 at both
    // t0 = 1 and t0 = -1.
    let sym = FHSymbol::new(
        vec![
            FHFactor::at_one(r(0.25), r(0.0)).unwrap(),
            FHFactor::new(Angle::from_fraction(1, 2).unwrap(), r(0.25), r(0.0)).unwrap(),
        ],
        SmoothPart::one(),
    )
    .unwrap();
    let trunc = sym.default_trunc(9);
    let (window, tail) = sym.window_with_trunc(9, trunc).unwrap();
    for n in [0i64, 2, -4, 8] {
        let want = quadrature_coeff(&sym, n);
        let got = window[(n + 8) as usize];
        assert!(
            (got - want).norm() < 1e-5,
            "n = {n}: convolution {got} vs quadrature {want} (tail {tail:e})"
        );
    }
}

#[test]
fn rotation_and_diagonal_similarity_at_small_sizes() {
    // T_n(a(t/t0)) = Lambda T_n(a) Lambda^{-1} with Lambda = diag(t0^{-j});
    // entries and norms must match.
    let alpha = r(0.3);
    let beta = r(0.15);
    let base = FHSymbol::single(FHFactor::at_one(alpha, beta).unwrap(), SmoothPart::one());
    let angle = Angle::from_fraction(1, 3).unwrap();
    let rotated = FHSymbol::single(
        FHFactor::new(angle, alpha, beta).unwrap(),
        SmoothPart::one(),
    );
    let n = 96;
    let base_op = ToeplitzOperator::from_symbol(&base, n).unwrap();
    let rot_op = ToeplitzOperator::from_symbol(&rotated, n).unwrap();
    // Entrywise: rotated a_{j-k} = t0^{-(j-k)} a^0_{j-k}.
    for k in [-(n as i64) + 1, -7, 0, 1, 50] {
        let phase = angle.phase_pow_neg(k);
        let want = phase * base_op.window().coeff(k);
        let got = rot_op.window().coeff(k);
        assert!((got - want).norm() < 1e-14 * want.norm().max(1.0));
    }
    let opts = NormOptions { tol: 1e-10, ..Default::default() };
    let nb = base_op.spectral_norm_with(&opts);
    let nr = rot_op.spectral_norm_with(&opts);
    assert!(nb.converged && nr.converged);
    assert!(
        (nb.value - nr.value).abs() <= 1e-8 * nb.value,
        "{} vs {}",
        nb.value,
        nr.value
    );
}

#[test]
fn dominant_singularity_controls_two_factor_studies() {
    // Re alpha_1 = 0.3 > Re alpha_2 = 0.2: the two-factor study converges to
    // the single-dominant prediction just like a pure study would.
    let sym = FHSymbol::new(
        vec![
            FHFactor::at_one(r(0.3), r(0.0)).unwrap(),
            FHFactor::new(Angle::from_fraction(1, 2).unwrap(), r(0.2), r(0.0)).unwrap(),
        ],
        SmoothPart::one(),
    )
    .unwrap();
    let prediction = predict_multi(&sym, true).unwrap();
    assert_eq!(prediction.exponent, 0.6);
    let grid: Vec<usize> = (8..=11).map(|k| 1usize << k).collect();
    let study = convergence_study(&sym, &grid, 0.05, &StudyOptions::default()).unwrap();
    let errs: Vec<f64> = study.rows.iter().map(|row| (row.ratio - 1.0).abs()).collect();
    // Shrinks like the pure single-singularity study until it reaches the
    // prediction constant's resolution.
    let floor = (4.0 * study.prediction.constant_resolution).max(2e-5);
    for pair in errs.windows(2) {
        assert!(pair[1] <= pair[0] * 1.05 || pair[1] < floor, "errors {errs:?}");
    }
    assert!(*errs.last().unwrap() < 5e-4, "errors {errs:?}");
}

#[test]
fn scaled_toeplitz_norms_approach_the_kernel_norm() {
    // Windows a_{+-k} = k^{-1/2} (a_0 = 1): n^{-1/2} ||T_n|| approaches the
    // norm of the homogeneous kernel with C = 1, gamma = -1/2, with strictly
    // decreasing discrepancy.
    let res = kernel_norm(&HomogeneousKernel::modulus_power(0.25).unwrap(), 11).unwrap();
    let opts = NormOptions::default();
    let mut prev = f64::INFINITY;
    let mut last = f64::INFINITY;
    for k in 8..=12 {
        let n = 1usize << k;
        let w = fhnorm::CoeffWindow::from_fn(n, |j| {
            if j == 0 {
                r(1.0)
            } else {
                r((j.abs() as f64).powf(-0.5))
            }
        });
        let est = ToeplitzOperator::new(w).spectral_norm_with(&opts);
        assert!(est.converged);
        let discrepancy = (est.value / (n as f64).sqrt() - res.richardson).abs();
        assert!(discrepancy < prev, "n = {n}: {discrepancy} vs {prev}");
        prev = discrepancy;
        last = discrepancy;
    }
    assert!(last < 0.05, "final discrepancy {last}");
}

#[test]
fn discretization_row_sums_match_the_closed_form_image_of_one() {
    // Row sums of the level-12 discretization are cell averages of
    // (K_alpha 1)(x) = (x^{2a} + (1-x)^{2a})/(2a) up to the midpoint error of
    // the far cells.
    let level = 12u32;
    let m = 1usize << level;
    for &alpha in &[0.1f64, 0.2, 0.3, 0.45] {
        let kernel = HomogeneousKernel::modulus_power(alpha).unwrap();
        let window = kernel.discretize_window(m);
        // Prefix sums of the window give each row sum in O(1).
        let half = m as i64 - 1;
        let coeffs: Vec<f64> = (-half..=half).map(|d| window.coeff(d).re).collect();
        let mut prefix = vec![0.0f64; coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            prefix[i + 1] = prefix[i] + c;
        }
        // Row i sums window entries d = i-(m-1) .. i.
        let cell_avg = |i: usize| -> f64 {
            let h = 1.0 / m as f64;
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let e = 2.0 * alpha + 1.0;
            let up = (b.powf(e) - a.powf(e)) / e;
            let down = ((1.0 - a).powf(e) - (1.0 - b).powf(e)) / e;
            (up + down) / (2.0 * alpha * h)
        };
        let mut max_err = 0.0f64;
        for i in 0..m {
            let row_sum = prefix[i + m] - prefix[i];
            max_err = max_err.max((row_sum - cell_avg(i)).abs());
        }
        assert!(max_err < 1e-3, "alpha = {alpha}: max err {max_err:e}");
    }
}
