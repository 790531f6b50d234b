//! Calibration runs backing the frozen tolerances in the acceptance suite.
//! Prints ratio trajectories for the convergence studies, the sandwich and
//! limit checks of the kernel-norm discretization, and the growth-regime
//! fits. Not part of the test suite; run with --release.

use fhnorm::asymptotics::{constant_profile, convergence_study, vanishing_factor_study, StudyOptions};
use fhnorm::integral_ops::{k_alpha_bounds, kernel_norm, HomogeneousKernel};
use fhnorm::krylov::NormOptions;
use fhnorm::symbols::{Angle, FHFactor, FHSymbol, SmoothPart};
use fhnorm::toeplitz::{CoeffWindow, ToeplitzOperator};
use num_complex::Complex64;

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn main() {
    let t0 = std::time::Instant::now();
    let args: Vec<String> = std::env::args().skip(1).collect();
    let what = args.first().map(String::as_str).unwrap_or("all");

    if what == "all" || what == "kernel" {
        println!("== kernel_norm on the modulus kernel, level 11, across alpha ==");
        for k in 1..=9 {
            let a = k as f64 * 0.05;
            let (lo, up) = k_alpha_bounds(a).unwrap();
            let res = kernel_norm(&HomogeneousKernel::modulus_power(a).unwrap(), 11).unwrap();
            println!(
                "alpha={a:.2}  est={:.8}  rich={:.8}  err={:.2e}  bounds=[{lo:.6}, {up:.6}]  inside={}",
                res.estimate,
                res.richardson,
                res.error_indicator,
                res.richardson >= lo - res.error_indicator && res.richardson <= up + res.error_indicator
            );
        }
        println!("\n== strip-end limits of alpha * ||K_alpha|| ==");
        for a in [0.02f64, 0.49] {
            let res = kernel_norm(&HomogeneousKernel::modulus_power(a).unwrap(), 11).unwrap();
            println!(
                "alpha={a}: est={:.8} rich={:.8} err={:.2e} alpha*rich={:.6} envelope(1/a-2)={:.4} |rich-1|={:.4}",
                res.estimate,
                res.richardson,
                res.error_indicator,
                a * res.richardson,
                1.0 / a - 2.0,
                (res.richardson - 1.0).abs()
            );
        }
        println!("\n== profile limits ==");
        let rows = constant_profile(&[0.01, 0.49], 11).unwrap();
        for row in rows {
            println!(
                "alpha={}: knorm={:.6} full={:.6} small_ref={} large_ref={:.6}",
                row.alpha, row.kernel_norm, row.full_constant, row.small_alpha_ref, row.large_alpha_ref
            );
        }
        println!("[kernel done at {:?}]", t0.elapsed());
    }

    if what == "all" || what == "study" {
        let grid: Vec<usize> = (8..=14).map(|k| 1usize << k).collect();
        println!("\n== pure-singularity studies ==");
        for (a, b) in [(0.25, 0.0), (0.3, 0.2), (0.4, 0.5)] {
            let sym = FHSymbol::single(FHFactor::at_one(r(a), r(b)).unwrap(), SmoothPart::one());
            let study = convergence_study(&sym, &grid, 1.0, &StudyOptions::default()).unwrap();
            println!("alpha={a}, beta={b}: constant={:.8}", study.prediction.constant);
            for row in &study.rows {
                println!(
                    "  n={:5}  norm={:14.6}  ratio={:.6}  |ratio-1|={:.4e}  conv={} ",
                    row.n,
                    row.computed_norm,
                    row.ratio,
                    (row.ratio - 1.0).abs(),
                    row.converged
                );
            }
            println!("  verdict(1.0): {}", study.verdict);
        }
        println!("[study done at {:?}]", t0.elapsed());
    }

    if what == "all" || what == "smooth" {
        println!("\n== smooth-part study (b = 2 + t + 1/t) ==");
        let grid: Vec<usize> = (8..=14).map(|k| 1usize << k).collect();
        let sym = FHSymbol::single(
            FHFactor::at_one(r(0.25), r(0.0)).unwrap(),
            SmoothPart::from_real_coeffs([(0, 2.0), (1, 1.0), (-1, 1.0)]),
        );
        let study = convergence_study(&sym, &grid, 1.0, &StudyOptions::default()).unwrap();
        println!("constant={:.8} (4*||K||)", study.prediction.constant);
        for row in &study.rows {
            println!(
                "  n={:5}  ratio={:.6}  |ratio-1|={:.4e}",
                row.n,
                row.ratio,
                (row.ratio - 1.0).abs()
            );
        }
        println!("[smooth done at {:?}]", t0.elapsed());
    }

    if what == "all" || what == "multi" {
        println!("\n== two-singularity study (factors at 0 and pi, alpha = 0.25) ==");
        let grid: Vec<usize> = (8..=14).map(|k| 1usize << k).collect();
        let sym = FHSymbol::new(
            vec![
                FHFactor::at_one(r(0.25), r(0.0)).unwrap(),
                FHFactor::new(Angle::from_fraction(1, 2).unwrap(), r(0.25), r(0.0)).unwrap(),
            ],
            SmoothPart::one(),
        )
        .unwrap();
        let study = convergence_study(&sym, &grid, 1.0, &StudyOptions::default()).unwrap();
        println!(
            "constant={:.8} exponent={} proven={}",
            study.prediction.constant, study.prediction.exponent, study.prediction.proven
        );
        for row in &study.rows {
            println!(
                "  n={:5}  ratio={:.6}  |ratio-1|={:.4e}",
                row.n,
                row.ratio,
                (row.ratio - 1.0).abs()
            );
        }
        println!("[multi done at {:?}]", t0.elapsed());
    }

    if what == "all" || what == "vanish" {
        println!("\n== vanishing-factor decay (c = t - 1, alpha = 0.25) ==");
        let grid: Vec<usize> = (8..=13).map(|k| 1usize << k).collect();
        let c = SmoothPart::from_real_coeffs([(0, -1.0), (1, 1.0)]);
        let study =
            vanishing_factor_study(r(0.25), r(0.0), &c, &grid, &StudyOptions::default()).unwrap();
        let mut prev = f64::INFINITY;
        for row in &study.rows {
            println!(
                "  n={:5}  normalized={:.6}  strictly_decreasing={}",
                row.n,
                row.ratio,
                row.ratio < prev
            );
            prev = row.ratio;
        }
        let first = study.rows.first().unwrap().ratio;
        let last = study.rows.last().unwrap().ratio;
        println!("  total decrease factor = {:.4}, verdict {}", first / last, study.verdict);
        println!("[vanish done at {:?}]", t0.elapsed());
    }

    if what == "all" || what == "regimes" {
        println!("\n== growth regimes a_k = |k|^g ==");
        let grid: Vec<usize> = (6..=13).map(|k| 1usize << k).collect();
        for g in [-1.5f64, -1.0, -0.5] {
            println!("gamma = {g}:");
            let mut norms = Vec::new();
            for &n in &grid {
                let w = CoeffWindow::from_fn(n, |k| {
                    if k == 0 {
                        r(1.0)
                    } else {
                        r((k.abs() as f64).powf(g))
                    }
                });
                let tb = w.triangle_bound();
                let est = ToeplitzOperator::new(w).spectral_norm_with(&NormOptions::default());
                norms.push((n, est.value, tb));
            }
            let (n0, v0, _) = norms[0];
            for &(n, v, tb) in &norms {
                let model = if g < -1.0 {
                    1.0
                } else if g == -1.0 {
                    (n as f64).ln() / (n0 as f64).ln()
                } else {
                    (n as f64 / n0 as f64).powf(g + 1.0)
                };
                println!(
                    "  n={:5} norm={:10.4} triangle={:10.4} norm/(C*model)={:.4}",
                    n,
                    v,
                    tb,
                    v / (v0 * model)
                );
            }
        }
        println!("[regimes done at {:?}]", t0.elapsed());
    }

    if what == "all" || what == "limitop" {
        println!("\n== scaled Toeplitz norms vs kernel norm (gamma = -1/2, C = 1) ==");
        let res = kernel_norm(&HomogeneousKernel::modulus_power(0.25).unwrap(), 11).unwrap();
        println!("kernel rich = {:.8} est = {:.8}", res.richardson, res.estimate);
        for k in 8..=14 {
            let n = 1usize << k;
            let w = CoeffWindow::from_fn(n, |j| {
                if j == 0 {
                    r(1.0)
                } else {
                    r((j.abs() as f64).powf(-0.5))
                }
            });
            let est = ToeplitzOperator::new(w).spectral_norm_with(&NormOptions::default());
            let scaled = est.value / (n as f64).sqrt();
            println!(
                "  n={:5} scaled={:.6} |scaled - rich|={:.4e}",
                n,
                scaled,
                (scaled - res.richardson).abs()
            );
        }
        println!("[limitop done at {:?}]", t0.elapsed());
    }

    if what == "all" || what == "volterra" {
        println!("\n== Volterra kernel refinement ==");
        let want = 2.0 / std::f64::consts::PI;
        for level in 5..=12 {
            let k = HomogeneousKernel::new(r(1.0), r(0.0), r(0.0)).unwrap();
            let res = kernel_norm(&k, level).unwrap();
            println!(
                "  level={level} est={:.10} rich={:.10} |rich-2/pi|={:.3e} err_ind={:.3e}",
                res.estimate,
                res.richardson,
                (res.richardson - want).abs(),
                res.error_indicator
            );
        }
        println!("[volterra done at {:?}]", t0.elapsed());
    }
}
