//! Bit sequences and the conversions that produce them.
//!
//! All conversions are most-significant-bit first per value. That order is
//! part of the file format: the same transcript always yields the same bits.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sources::SampleSource;

/// Immutable sequence of bits, one `u8` (0 or 1) per bit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitSequence {
    bits: Vec<u8>,
}

impl BitSequence {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidParameter(format!(
                "bit {pos} has value {}, expected 0 or 1",
                bits[pos]
            )));
        }
        Ok(BitSequence { bits })
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        BitSequence {
            bits: iter.into_iter().map(u8::from).collect(),
        }
    }

    /// Unpacks bytes MSB first.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        let mut bits = Vec::with_capacity(bytes.len() * 8);
        for &b in bytes {
            for shift in (0..8).rev() {
                bits.push((b >> shift) & 1);
            }
        }
        BitSequence { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    pub fn complement(&self) -> Self {
        BitSequence {
            bits: self.bits.iter().map(|b| b ^ 1).collect(),
        }
    }

    pub fn reversed(&self) -> Self {
        let mut bits = self.bits.clone();
        bits.reverse();
        BitSequence { bits }
    }

    /// Decodes consecutive `width`-bit chunks back into integers; a trailing
    /// partial chunk is ignored.
    pub fn to_integers(&self, width: u32) -> Vec<u64> {
        self.bits
            .chunks_exact(width as usize)
            .map(|chunk| chunk.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64))
            .collect()
    }
}

impl FromStr for BitSequence {
    type Err = Error;

    /// Parses a string of '0'/'1', ignoring ASCII whitespace.
    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(0),
                '1' => bits.push(1),
                c if c.is_ascii_whitespace() => {}
                other => return Err(Error::Parse(format!("unexpected character {other:?} in bit string"))),
            }
        }
        Ok(BitSequence { bits })
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b == 1 { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A transcript of nonnegative integers bounded by `declared_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegerSample {
    values: Vec<u64>,
    declared_max: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    source: Option<SampleSource>,
}

impl IntegerSample {
    pub fn new(values: Vec<u64>, declared_max: u64) -> Result<Self> {
        if declared_max < 1 {
            return Err(Error::InvalidParameter("declared_max must be at least 1".into()));
        }
        if let Some(&v) = values.iter().find(|&&v| v > declared_max) {
            return Err(Error::InvalidParameter(format!(
                "value {v} exceeds declared maximum {declared_max}"
            )));
        }
        Ok(IntegerSample {
            values,
            declared_max,
            source: None,
        })
    }

    pub fn with_source(mut self, source: SampleSource) -> Self {
        self.source = Some(source);
        self
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn declared_max(&self) -> u64 {
        self.declared_max
    }

    pub fn source(&self) -> Option<&SampleSource> {
        self.source.as_ref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Smallest width that holds `declared_max`.
    pub fn natural_width(&self) -> u32 {
        64 - self.declared_max.leading_zeros()
    }
}

/// Concatenates each value's fixed-width binary expansion, MSB first.
pub fn from_integers(sample: &IntegerSample, bit_width: u32) -> Result<BitSequence> {
    if !(1..=64).contains(&bit_width) {
        return Err(Error::InvalidParameter(format!("bit width {bit_width} outside 1..=64")));
    }
    let mut bits = Vec::with_capacity(sample.len() * bit_width as usize);
    for &value in sample.values() {
        if bit_width < 64 && value >> bit_width != 0 {
            return Err(Error::ValueOutOfRange {
                value,
                width: bit_width,
            });
        }
        for shift in (0..bit_width).rev() {
            bits.push(((value >> shift) & 1) as u8);
        }
    }
    Ok(BitSequence { bits })
}

/// Concatenates each character's code point as `encoding_width` bits (7 for
/// ASCII, 8 for Latin-1), passwords in order with no separator.
pub fn from_text<S: AsRef<str>>(passwords: &[S], encoding_width: u32) -> Result<BitSequence> {
    if encoding_width != 7 && encoding_width != 8 {
        return Err(Error::InvalidParameter(format!(
            "encoding width must be 7 or 8, got {encoding_width}"
        )));
    }
    let limit = 1u32 << encoding_width;
    let mut bits = Vec::new();
    for password in passwords {
        for c in password.as_ref().chars() {
            let code = c as u32;
            if code >= limit {
                return Err(Error::Unrepresentable(c));
            }
            for shift in (0..encoding_width).rev() {
                bits.push(((code >> shift) & 1) as u8);
            }
        }
    }
    Ok(BitSequence { bits })
}
