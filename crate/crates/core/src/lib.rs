//! Block-orthogonal space-time codes: construction, structure analysis,
//! QR-based M-algorithm decoding and Monte Carlo evaluation.

pub mod channel;
pub mod code;
pub mod codefile;
pub mod constellation;
pub mod constructions;
pub mod decoder;
pub mod error;
pub mod library;
pub mod linalg;
pub mod rng;
pub mod sim;
pub mod structure;

pub use channel::{equivalent_channel, sample_channel, ChannelRealization, SnrPoint};
pub use code::{DispersionCode, ValidationReport};
pub use codefile::{load_code, save_code};
pub use constellation::Pam;
pub use decoder::{decode, DecodeOutcome, DecoderConfig, DecoderKind};
pub use error::{Error, Result};
pub use linalg::{Complex, ComplexMatrix, RealMatrix};
pub use structure::{BlockProfile, ZeroPatternMask};
