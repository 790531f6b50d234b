//! Fisher-Hartwig symbols: exact Fourier coefficients, asymptotic constants,
//! pointwise evaluation, and the smooth-part (trigonometric polynomial)
//! algebra.
//!
//! A factor `|t - t0|^{-2 alpha} * exp(i beta arg(-t/t0))` is admissible for
//! 0 < Re(alpha) < 1/2 and -1/2 < Re(beta) <= 1/2. At t0 = 1 its Fourier
//! coefficients have the closed form
//!
//! ```text
//! sigma_n = (-1)^n Gamma(1 - 2a) / (Gamma(-a + b + 1 - n) Gamma(-a - b + 1 + n))
//! ```
//!
//! with sigma_n := 0 for n < 0 if a = -b and sigma_n := 0 for n > 0 if a = b
//! (the denominator pole), and the large-n behavior sigma_{+-n} ~ C{+-} n^{2a-1}.

pub mod gamma;

use crate::error::{Error, Result};
use crate::fft::linear_convolve;
use gamma::{gamma as cgamma, ln_gamma, recip_gamma};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Raw Gamma-quotient form below this |n|, sine form with log-Gamma above.
/// Both branches stay well inside their accurate regimes at the switch.
const GAMMA_FORM_LIMIT: i64 = 30;

/// Wrap an angle into (-pi, pi].
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = theta % two_pi;
    if y <= -PI {
        y += two_pi;
    } else if y > PI {
        y -= two_pi;
    }
    y
}

/// Position of a singularity on the unit circle. Angles entered as rational
/// multiples of 2*pi stay exact, which is what makes the commensurability
/// hypothesis of the multi-singularity law checkable without floating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// theta = 2 pi num / den.
    TwoPiRational { num: i64, den: i64 },
    /// Plain radians; rationality of theta/(2 pi) is unknown.
    Radians(f64),
}

impl Angle {
    pub const ZERO: Angle = Angle::TwoPiRational { num: 0, den: 1 };

    pub fn from_fraction(num: i64, den: i64) -> Result<Angle> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs());
        if g > 1 {
            num /= g as i64;
            den /= g as i64;
        }
        // Reduce modulo a full turn.
        num = num.rem_euclid(den);
        Ok(Angle::TwoPiRational { num, den })
    }

    pub fn radians(&self) -> f64 {
        match *self {
            Angle::TwoPiRational { num, den } => {
                wrap_angle(2.0 * PI * (num as f64) / (den as f64))
            }
            Angle::Radians(t) => wrap_angle(t),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Angle::TwoPiRational { .. })
    }

    /// t0^{-n} = exp(-i n theta0), kept exact for rational angles so that
    /// phases do not drift at large n.
    pub fn phase_pow_neg(&self, n: i64) -> Complex64 {
        match *self {
            Angle::TwoPiRational { num, den } => {
                let m = ((n as i128 * num as i128).rem_euclid(den as i128)) as f64;
                Complex64::from_polar(1.0, -2.0 * PI * m / den as f64)
            }
            Angle::Radians(t) => Complex64::from_polar(1.0, -(n as f64) * wrap_angle(t)),
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

fn validate_strips(alpha: Complex64, beta: Complex64) -> Result<()> {
    if !(alpha.re > 0.0 && alpha.re < 0.5) {
        return Err(Error::AlphaOutOfStrip { alpha });
    }
    if !(beta.re > -0.5 && beta.re <= 0.5) {
        return Err(Error::BetaOutOfStrip { beta });
    }
    Ok(())
}

/// One Fisher-Hartwig singularity (t0, alpha, beta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FHFactor {
    angle: Angle,
    alpha: Complex64,
    beta: Complex64,
}

impl FHFactor {
    pub fn new(angle: Angle, alpha: Complex64, beta: Complex64) -> Result<Self> {
        validate_strips(alpha, beta)?;
        Ok(Self { angle, alpha, beta })
    }

    /// Factor at t0 = 1.
    pub fn at_one(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(Angle::ZERO, alpha, beta)
    }

    pub fn angle(&self) -> Angle {
        self.angle
    }

    pub fn theta0(&self) -> f64 {
        self.angle.radians()
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Fourier coefficient of this factor: t0^{-n} * sigma_n(alpha, beta).
    pub fn coeff(&self, n: i64) -> Complex64 {
        self.angle.phase_pow_neg(n) * pure_fh_coeff_unchecked(self.alpha, self.beta, n)
    }

    /// Pointwise value at angle theta (theta != theta0).
    pub fn eval(&self, theta: f64) -> Result<Complex64> {
        let delta = wrap_angle(theta - self.theta0());
        if delta == 0.0 {
            return Err(Error::SingularAngle { theta });
        }
        Ok(factor_point_value(self.alpha, self.beta, delta))
    }
}

/// |e^{i delta} - 1|^{-2 alpha} * exp(i beta arg(-e^{i delta})), delta != 0.
pub(crate) fn factor_point_value(alpha: Complex64, beta: Complex64, delta: f64) -> Complex64 {
    let modulus = 2.0 * (delta / 2.0).sin().abs();
    let power = (-2.0 * alpha * modulus.ln()).exp();
    // arg(-e^{i delta}) = delta -+ pi by the sign of delta; written piecewise
    // because wrap_angle(delta + pi) rounds onto the wrong branch for
    // |delta| below the float resolution at pi.
    let jump_arg = if delta > 0.0 { delta - PI } else { delta + PI };
    let jump = (Complex64::i() * beta * jump_arg).exp();
    power * jump
}

/// Fourier coefficient sigma_n of the pure singularity at t0 = 1.
pub fn pure_fh_coeff(alpha: Complex64, beta: Complex64, n: i64) -> Result<Complex64> {
    validate_strips(alpha, beta)?;
    Ok(pure_fh_coeff_unchecked(alpha, beta, n))
}

pub(crate) fn pure_fh_coeff_unchecked(alpha: Complex64, beta: Complex64, n: i64) -> Complex64 {
    // Degenerate conventions, detected by exact equality on purpose.
    if alpha == beta && n > 0 {
        return Complex64::new(0.0, 0.0);
    }
    if alpha == -beta && n < 0 {
        return Complex64::new(0.0, 0.0);
    }
    if n.abs() <= GAMMA_FORM_LIMIT {
        coeff_gamma_form(alpha, beta, n)
    } else {
        coeff_sine_form(alpha, beta, n)
    }
}

fn gamma_one_minus_two_alpha(alpha: Complex64) -> Complex64 {
    cgamma(Complex64::new(1.0, 0.0) - 2.0 * alpha)
        .expect("1 - 2 alpha stays off the poles inside the alpha strip")
}

/// (-1)^n Gamma(1-2a) / (Gamma(-a+b+1-n) Gamma(-a-b+1+n)).
fn coeff_gamma_form(alpha: Complex64, beta: Complex64, n: i64) -> Complex64 {
    let g = gamma_one_minus_two_alpha(alpha);
    let r1 = recip_gamma(Complex64::new(1.0 - n as f64, 0.0) - alpha + beta);
    let r2 = recip_gamma(Complex64::new(1.0 + n as f64, 0.0) - alpha - beta);
    let sign = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    sign * g * r1 * r2
}

/// Sine-rewritten form for large |n|:
///   n > 0: Gamma(1-2a) sin(pi(a-b)) / (pi (n+a-b)) * Gamma(n+1+a-b)/Gamma(n+1-a-b)
///   n < 0: same with m = -n and beta -> -beta.
fn coeff_sine_form(alpha: Complex64, beta: Complex64, n: i64) -> Complex64 {
    let g = gamma_one_minus_two_alpha(alpha);
    let (s, d, m) = if n > 0 {
        (alpha - beta, alpha + beta, n as f64)
    } else {
        (alpha + beta, alpha - beta, (-n) as f64)
    };
    let ln_num = ln_gamma(Complex64::new(m + 1.0, 0.0) + s)
        .expect("argument has large positive real part");
    let ln_den = ln_gamma(Complex64::new(m + 1.0, 0.0) - d)
        .expect("argument has large positive real part");
    g * (PI * s).sin() / (PI * (m + s)) * (ln_num - ln_den).exp()
}

/// Leading coefficients of sigma_{+-n} ~ C{+-} n^{2 alpha - 1}:
/// C{+-} = Gamma(1-2a) sin(pi(a -+ b)) / pi.
pub fn asymptotic_constants(alpha: Complex64, beta: Complex64) -> Result<(Complex64, Complex64)> {
    validate_strips(alpha, beta)?;
    let g = gamma_one_minus_two_alpha(alpha);
    let cplus = g * (PI * (alpha - beta)).sin() / PI;
    let cminus = g * (PI * (alpha + beta)).sin() / PI;
    Ok((cplus, cminus))
}

/// Trigonometric polynomial b(e^{i theta}) = sum b_k e^{i k theta} with finite
/// support.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothPart {
    coeffs: BTreeMap<i64, Complex64>,
}

impl SmoothPart {
    /// b identically 1.
    pub fn one() -> Self {
        Self::from_coeffs([(0, Complex64::new(1.0, 0.0))])
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (i64, Complex64)>) -> Self {
        let mut map = BTreeMap::new();
        for (k, v) in coeffs {
            if v != Complex64::new(0.0, 0.0) {
                *map.entry(k).or_insert(Complex64::new(0.0, 0.0)) += v;
            }
        }
        Self { coeffs: map }
    }

    pub fn from_real_coeffs(coeffs: impl IntoIterator<Item = (i64, f64)>) -> Self {
        Self::from_coeffs(coeffs.into_iter().map(|(k, v)| (k, Complex64::new(v, 0.0))))
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn bandwidth(&self) -> i64 {
        self.coeffs.keys().map(|k| k.abs()).max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.coeffs
            .iter()
            .map(|(&k, &v)| v * Complex64::from_polar(1.0, k as f64 * theta))
            .sum()
    }

    /// True for the multiplicative identity b = 1.
    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeff(0) == Complex64::new(1.0, 0.0)
    }
}

/// Product of Fisher-Hartwig factors at pairwise distinct angles times a
/// smooth trigonometric-polynomial part.
#[derive(Debug, Clone, PartialEq)]
pub struct FHSymbol {
    factors: Vec<FHFactor>,
    smooth: SmoothPart,
}

impl FHSymbol {
    pub fn new(factors: Vec<FHFactor>, smooth: SmoothPart) -> Result<Self> {
        for (i, f) in factors.iter().enumerate() {
            for g in factors.iter().skip(i + 1) {
                if wrap_angle(f.theta0() - g.theta0()) == 0.0 {
                    return Err(Error::DuplicateAngle { theta: f.theta0() });
                }
            }
        }
        Ok(Self { factors, smooth })
    }

    /// The constant symbol a = 1 (no factors, b = 1).
    pub fn constant_one() -> Self {
        Self {
            factors: Vec::new(),
            smooth: SmoothPart::one(),
        }
    }

    pub fn single(factor: FHFactor, smooth: SmoothPart) -> Self {
        Self {
            factors: vec![factor],
            smooth,
        }
    }

    pub fn factors(&self) -> &[FHFactor] {
        &self.factors
    }

    pub fn smooth(&self) -> &SmoothPart {
        &self.smooth
    }

    /// All factor positions certified as rational multiples of 2*pi.
    pub fn angles_commensurate(&self) -> bool {
        self.factors.iter().all(|f| f.angle.is_rational())
    }

    /// Pointwise value; singular at the factor angles.
    pub fn eval(&self, theta: f64) -> Result<Complex64> {
        let mut v = self.smooth.eval(theta);
        for f in &self.factors {
            let delta = wrap_angle(theta - f.theta0());
            if delta == 0.0 {
                return Err(Error::SingularAngle { theta });
            }
            v *= factor_point_value(f.alpha, f.beta, delta);
        }
        Ok(v)
    }

    /// Fourier coefficient a_n of the product symbol. Exact convolution with
    /// the smooth part; factor-factor products are truncated convolutions
    /// over |j| <= trunc (both inner indices), matching the batched window
    /// path bit for bit.
    pub fn coeff(&self, n: i64, trunc: i64) -> Result<Complex64> {
        Ok(self.coeff_with_tail(n, trunc)?.0)
    }

    /// Coefficient plus the reported tail-error estimate of the truncation.
    pub fn coeff_with_tail(&self, n: i64, trunc: i64) -> Result<(Complex64, f64)> {
        let needed = n.abs() + self.smooth.bandwidth();
        if trunc < needed {
            return Err(Error::TruncationTooSmall { needed, trunc });
        }
        match self.factors.len() {
            0 => Ok((self.smooth.coeff(n), 0.0)),
            1 => {
                let f = &self.factors[0];
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, b) in self.smooth.iter() {
                    acc += b * f.coeff(n - k);
                }
                Ok((acc, 0.0))
            }
            _ => {
                let half = n.unsigned_abs() as usize + 1;
                let (window, tail) = self.window_with_trunc(half, trunc)?;
                Ok((window[(n + (half as i64 - 1)) as usize], tail))
            }
        }
    }

    /// Coefficients a_k for |k| <= n-1 as one vector of length 2n-1
    /// (index k + n - 1), plus the truncation tail estimate.
    pub fn window_with_trunc(&self, n: usize, trunc: i64) -> Result<(Vec<Complex64>, f64)> {
        assert!(n >= 1);
        let half = n as i64 - 1;
        let bw = self.smooth.bandwidth();
        if trunc < half + bw {
            return Err(Error::TruncationTooSmall { needed: half + bw, trunc });
        }
        match self.factors.len() {
            0 => {
                let w = (-half..=half).map(|k| self.smooth.coeff(k)).collect();
                Ok((w, 0.0))
            }
            1 => {
                let f = &self.factors[0];
                let w = (-half..=half)
                    .map(|k| {
                        self.smooth
                            .iter()
                            .map(|(j, b)| b * f.coeff(k - j))
                            .sum()
                    })
                    .collect();
                Ok((w, 0.0))
            }
            _ => {
                let t = trunc;
                let mut acc = factor_sequence(&self.factors[0], t);
                for f in &self.factors[1..] {
                    let seq = factor_sequence(f, t);
                    acc = convolve_and_recenter(&acc, &seq, t);
                }
                let (seq, supp) = if self.smooth.is_one() {
                    (acc, t)
                } else {
                    let sm: Vec<Complex64> = (-bw..=bw).map(|k| self.smooth.coeff(k)).collect();
                    (linear_convolve(&acc, &sm), t + bw)
                };
                let mid = supp; // index of k = 0
                let w = (-half..=half)
                    .map(|k| seq[(mid + k) as usize])
                    .collect();
                Ok((w, self.tail_estimate(t)))
            }
        }
    }

    /// Default truncation for a window of half-width n-1: exact support for
    /// at most one factor, a generous floor for factor-factor convolutions.
    /// The 64x headroom keeps the window tail well below the norm-study
    /// resolution at the largest study sizes.
    pub fn default_trunc(&self, n: usize) -> i64 {
        let base = n as i64 - 1 + self.smooth.bandwidth();
        if self.factors.len() <= 1 {
            base.max(0)
        } else {
            (64 * (n as i64 + self.smooth.bandwidth())).max(1 << 17)
        }
    }

    /// Heuristic upper estimate for the coefficient mass dropped by the
    /// factor-factor truncation at |j| > trunc, from the power-law decay
    /// |sigma_j| ~ |C| |j|^{2 Re alpha - 1}. Cross terms between distinct
    /// angles oscillate; the Abel bound 1/|1 - e^{i d theta}| captures the
    /// resulting cancellation.
    fn tail_estimate(&self, trunc: i64) -> f64 {
        let t = trunc as f64;
        let mut est = 0.0f64;
        for (i, fi) in self.factors.iter().enumerate() {
            for fj in self.factors.iter().skip(i + 1) {
                let (cip, cim) = asymptotic_constants(fi.alpha, fi.beta)
                    .expect("factor validated at construction");
                let (cjp, cjm) = asymptotic_constants(fj.alpha, fj.beta)
                    .expect("factor validated at construction");
                let ci = cip.norm().max(cim.norm());
                let cj = cjp.norm().max(cjm.norm());
                let s = 2.0 * (fi.alpha.re + fj.alpha.re) - 2.0;
                // Abel bound on the oscillating cross tail; angles are
                // pairwise distinct so the phase step never degenerates.
                let osc = (Complex64::from_polar(1.0, fi.theta0() - fj.theta0())
                    - Complex64::new(1.0, 0.0))
                .norm()
                .max(1e-12);
                let oscillatory = 4.0 * ci * cj * t.powf(s) / osc;
                est += if s < -1.0 {
                    // Absolutely convergent tail as a fallback for close angles.
                    let absolute = 2.0 * ci * cj * t.powf(s + 1.0) / (-s - 1.0);
                    oscillatory.min(absolute)
                } else {
                    oscillatory
                };
            }
        }
        let smooth_mass: f64 = self.smooth.iter().map(|(_, v)| v.norm()).sum();
        est * smooth_mass.max(1.0)
    }
}

/// Factor coefficients on [-t, t] (index k + t).
fn factor_sequence(f: &FHFactor, t: i64) -> Vec<Complex64> {
    (-t..=t).map(|k| f.coeff(k)).collect()
}

/// Convolve two sequences supported on [-t, t] and slice the result back to
/// [-t, t]. Together with the per-factor truncation this realizes the
/// "both inner indices bounded by trunc" semantics.
fn convolve_and_recenter(a: &[Complex64], b: &[Complex64], t: i64) -> Vec<Complex64> {
    let full = linear_convolve(a, b); // support [-2t, 2t]
    let mid = 2 * t;
    ((mid - t)..=(mid + t)).map(|i| full[i as usize]).collect()
}
