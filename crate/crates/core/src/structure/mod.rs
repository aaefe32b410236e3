//! QR structure of equivalent channels: zero masks, block profiles and
//! numeric certificates.

mod certificate;
mod classify;
mod mask;
mod profile;
mod qr;

pub use certificate::{
    check_qoc, check_pair_split, check_block_split, check_unit_qoc, CertificateReport, Condition, CERTIFICATE_TOLERANCE,
};
pub use classify::{classify_code, code_profile, BlockCertificate, Classification, ClassifyOptions, CERTIFICATE_DRAWS};
pub use mask::{structural_zero_mask, ZeroPatternMask, MIN_DRAWS, ZERO_TOLERANCE};
pub use profile::{infer_profile, BlockProfile};
pub use qr::qr_decompose;
