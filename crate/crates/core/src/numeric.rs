//! Special functions and the arbitrary-length Fourier transform used by the
//! battery. Everything here is pure and allocation-light.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

/// Below this |x| erfc is computed as 1 - erf(x) from the Maclaurin series;
/// above it the Laplace continued fraction converges in a few dozen terms.
const ERFC_SERIES_LIMIT: f64 = 2.0;

/// Complementary error function.
///
/// Absolute error is below 1e-12 on |x| <= 10 and the result is exactly 2 - erfc(-x)
/// for negative arguments.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < ERFC_SERIES_LIMIT {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..MAX_ITER {
        term *= -x2 / n as f64;
        let contrib = term / (2 * n + 1) as f64;
        sum += contrib;
        if contrib.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum * 2.0 / PI.sqrt()
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    // evaluated with the modified Lentz method.
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..MAX_ITER {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() / f
}

/// Natural log of the gamma function for positive arguments (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_93,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    let t = x + 7.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Upper regularized incomplete gamma function Q(a, x).
///
/// Uses the power series for P(a, x) when x < a + 1 and the Legendre continued
/// fraction for Q(a, x) otherwise, so neither branch subtracts two nearly
/// equal numbers in the tail.
pub fn igamc(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("igamc requires a > 0, got {a}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("igamc requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let log_prefactor = a * x.ln() - x - ln_gamma(a);
    let q = if x < a + 1.0 {
        1.0 - lower_series(a, x) * log_prefactor.exp()
    } else {
        upper_continued_fraction(a, x) * log_prefactor.exp()
    };
    Ok(q.clamp(0.0, 1.0))
}

fn lower_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum
}

fn upper_continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Complex { re, im }
    }

    /// e^{i theta}
    pub fn cis(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Complex { re: c, im: s }
    }

    pub fn conj(self) -> Self {
        Complex {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm(self) -> f64 {
        self.re.hypot(self.im)
    }
}

impl Add for Complex {
    type Output = Complex;
    fn add(self, o: Complex) -> Complex {
        Complex::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    fn sub(self, o: Complex) -> Complex {
        Complex::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    fn mul(self, o: Complex) -> Complex {
        Complex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Mul<f64> for Complex {
    type Output = Complex;
    fn mul(self, s: f64) -> Complex {
        Complex::new(self.re * s, self.im * s)
    }
}

/// In-place forward radix-2 FFT. `data.len()` must be a power of two.
pub fn fft_pow2(data: &mut [Complex]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fft_pow2 needs a power-of-two length");
    if n <= 1 {
        return;
    }
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
    let twiddles: Vec<Complex> = (0..n / 2)
        .map(|k| Complex::cis(-2.0 * PI * k as f64 / n as f64))
        .collect();
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let w = twiddles[k * stride];
                let u = data[start + k];
                let v = data[start + k + half] * w;
                data[start + k] = u + v;
                data[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
}

fn ifft_pow2(data: &mut [Complex]) {
    for z in data.iter_mut() {
        *z = z.conj();
    }
    fft_pow2(data);
    let scale = 1.0 / data.len() as f64;
    for z in data.iter_mut() {
        *z = z.conj() * scale;
    }
}

/// Forward DFT of any length. Power-of-two lengths go straight to the radix-2
/// kernel; everything else is rewritten as a chirp-z convolution of length
/// `next_pow2(2n - 1)`, so no input value is truncated or padded into the result.
pub fn dft(input: &[Complex]) -> Vec<Complex> {
    let n = input.len();
    if n.is_power_of_two() || n == 0 {
        let mut out = input.to_vec();
        fft_pow2(&mut out);
        return out;
    }
    let m = (2 * n - 1).next_power_of_two();
    // chirp[k] = exp(-i pi k^2 / n); k^2 is reduced mod 2n to keep the angle exact.
    let two_n = 2 * n as u128;
    let chirp: Vec<Complex> = (0..n)
        .map(|k| {
            let k2 = (k as u128 * k as u128) % two_n;
            Complex::cis(-PI * k2 as f64 / n as f64)
        })
        .collect();

    let mut a = vec![Complex::ZERO; m];
    for (k, (x, w)) in input.iter().zip(&chirp).enumerate() {
        a[k] = *x * *w;
    }
    let mut b = vec![Complex::ZERO; m];
    b[0] = chirp[0].conj();
    for k in 1..n {
        b[k] = chirp[k].conj();
        b[m - k] = chirp[k].conj();
    }
    fft_pow2(&mut a);
    fft_pow2(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x = *x * *y;
    }
    ifft_pow2(&mut a);
    a.truncate(n);
    for (x, w) in a.iter_mut().zip(&chirp) {
        *x = *x * *w;
    }
    a
}

/// Moduli of the first `floor(n/2)` DFT coefficients of a real signal.
pub fn dft_moduli(signal: &[f64]) -> Result<Vec<f64>> {
    if signal.len() < 2 {
        return Err(Error::TooShort {
            what: "dft_moduli",
            needed: 2,
            got: signal.len(),
        });
    }
    if signal.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("dft_moduli input must be finite".into()));
    }
    let input: Vec<Complex> = signal.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let spectrum = dft(&input);
    Ok(spectrum[..signal.len() / 2].iter().map(|z| z.norm()).collect())
}
