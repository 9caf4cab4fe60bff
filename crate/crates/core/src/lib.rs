//! Randomness evaluation toolkit.
//!
//! The crate bundles a nine-test statistical battery with a three-way
//! OK/SUSPECT/KO classification, a pairwise-distance entropy score for card
//! shuffles, character-level analysis of generated passwords, and local
//! reference generators used as positive and negative controls.
//!
//! Heavy loops (batteries over many samples, histogram accumulation, entropy
//! sweeps) go through [`par::Execution`]. With the default `parallel` feature
//! they run on rayon; without it every path is sequential and results are
//! identical either way.

pub mod battery;
pub mod bits;
pub mod chars;
pub mod error;
pub mod formats;
pub mod numeric;
pub mod par;
pub mod shuffle;
pub mod sources;
pub mod verdict;

pub use battery::{run_battery, BatteryConfig, TestKind, TestResult};
pub use bits::{BitSequence, IntegerSample};
pub use error::{Error, Result};
pub use par::Execution;
pub use shuffle::{DistanceHistogram, EntropyScore, PermutationTrialSet};
pub use sources::{SampleSource, SourceKind};
pub use verdict::{classify, BatteryReport, Label, Verdict};
