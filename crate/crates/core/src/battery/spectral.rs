use super::constants::{SPECTRAL_FRACTION, SPECTRAL_MIN_BITS};
use super::{warn_if_short, TestKind, TestResult};
use crate::bits::BitSequence;
use crate::error::{Error, Result};
use crate::numeric::{dft_moduli, erfc};

/// Discrete Fourier transform (spectral) test on the full, unpadded sequence.
pub fn spectral(seq: &BitSequence) -> Result<TestResult> {
    let n = seq.len();
    if n < 2 {
        return Err(Error::TooShort {
            what: "spectral",
            needed: 2,
            got: n,
        });
    }
    let mut diagnostics = Vec::new();
    warn_if_short(&mut diagnostics, n, SPECTRAL_MIN_BITS);
    let signal: Vec<f64> = seq.as_slice().iter().map(|&b| 2.0 * b as f64 - 1.0).collect();
    let moduli = dft_moduli(&signal)?;
    let nf = n as f64;
    let threshold = ((1.0 / (1.0 - SPECTRAL_FRACTION)).ln() * nf).sqrt();
    let below = moduli.iter().filter(|&&m| m < threshold).count() as f64;
    let expected = SPECTRAL_FRACTION * nf / 2.0;
    let d = (below - expected) / (nf * SPECTRAL_FRACTION * (1.0 - SPECTRAL_FRACTION) / 4.0).sqrt();
    let p = erfc(d.abs() / std::f64::consts::SQRT_2);
    diagnostics.push(format!("threshold {threshold:.6}, {below} of {} peaks below", moduli.len()));
    TestResult::from_p_values(TestKind::Spectral, vec![p], d, n, diagnostics)
}
