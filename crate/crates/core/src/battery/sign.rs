use super::{TestKind, TestResult};
use crate::bits::IntegerSample;
use crate::error::{Error, Result};
use crate::numeric::erfc;

/// Sign test around the midpoint of the declared range (127.5 for 8-bit
/// samples). Values equal to the midpoint are excluded.
///
/// The midpoint rather than the sample median is used: a sample median splits
/// any sample evenly by construction, which would make the test vacuous.
pub fn sign_test(sample: &IntegerSample) -> Result<TestResult> {
    if sample.is_empty() {
        return Err(Error::TooShort {
            what: "sign",
            needed: 1,
            got: 0,
        });
    }
    let twice_median = sample.declared_max();
    let above = sample.values().iter().filter(|&&v| 2 * v > twice_median).count();
    let below = sample.values().iter().filter(|&&v| 2 * v < twice_median).count();
    let used = above + below;
    if used == 0 {
        return Err(Error::Domain(format!(
            "all {} values tie the reference median {}",
            sample.len(),
            twice_median as f64 / 2.0
        )));
    }
    let diff = above.abs_diff(below) as f64;
    let statistic = diff / (used as f64).sqrt();
    let p = erfc(diff / (2.0 * used as f64).sqrt());
    let diagnostics = vec![format!("{above} above, {below} below, {} ties", sample.len() - used)];
    TestResult::from_p_values(TestKind::Sign, vec![p], statistic, sample.len(), diagnostics)
}
