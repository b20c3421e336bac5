//! Gait analysis for dual-modality smart shoes: plantar pressure insoles plus
//! two IMUs per shoe. The crate parses recordings, derives frame, step and
//! whole-test features, selects features, and trains in-repo learners to
//! separate stroke patients from healthy walkers and to estimate lower-limb
//! muscle strength on the MRC scale.

pub mod cli;
pub mod error;
pub mod frame_features;
pub mod models;
pub mod pipeline;
pub mod preprocess;
pub mod recording;
pub mod report;
pub mod segmentation;
pub mod selection;
pub mod stats;
pub mod step_features;
pub mod synth;
pub mod table;
pub mod whole_features;

pub use error::{Error, Result};
