//! Super- and subsolution envelopes, their shift functions, and residual
//! certification.

pub mod builders;
pub mod calibrate;
pub mod envelope;
pub mod sandwich;
pub mod shift;
pub mod verify;

pub use builders::{
    build_envelope_annihilating, build_envelope_c1, build_envelope_c2, build_envelope_monostable, AnnihilatingBand,
    AnnihilatingEnvelopes, C1Envelopes, C2Envelopes, MonostableEnvelopes, MonostableParams, MonostableVariant,
    UniformOrbit,
};
pub use calibrate::{calibrate_constant, Calibration};
pub use envelope::{Branch, BranchFn, BranchKind, Combine, Envelope, EnvelopeCase, Role};
pub use sandwich::{build_sandwich, SandwichDirection, SandwichParams};
pub use shift::{ShiftFunction, ShiftKind, ShiftSign};
pub use verify::{verify_inequality, ResidualReport, VerifyGrid};
