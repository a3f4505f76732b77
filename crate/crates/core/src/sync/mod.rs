//! Rotation synchronization within one class, and evaluation against truth.

mod align;
mod lud;

pub use align::{align_rotations, Alignment};
pub use lud::{lud_objective, lud_rotations, lud_rotations_with, refine, spectral_rotations, LudOptions, SyncResult, IRLS_DELTA};
