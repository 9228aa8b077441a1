//! The ring/harmonic matrix-vector product.
//!
//! With `φ̃(ρ, n)` the angular spectrum of the source on each ring, the
//! addition theorem turns the 2-D convolution with `(−j/4)H_0^(2)` into, per
//! harmonic,
//!
//! ```text
//! Ã(ρ, n) = (−jπ/2) [ H_n(k_bρ) ∫_0^ρ ρ′J_n φ̃ dρ′ + J_n(k_bρ) ∫_ρ^a ρ′H_n φ̃ dρ′ ]
//! ```
//!
//! With pulse basis functions in `ρ` both integrals become running sums of
//! precomputed ring integrals, swept once outward and once inward. A product
//! costs two batches of length-`N_φ` FFTs plus `O(M_ρN_φ)` sweep work.
//!
//! Ring `m` of a [`PolarGrid`](crate::model::PolarGrid) contributes its inner
//! half to the outward sum and its outer half to the inward sum at its own
//! midpoint.

mod operator;
mod spectrum;
mod table;

pub use crate::model::PolarField;
pub use operator::{
    accumulate_inward, accumulate_outward, count_mults_1d, exterior_spectrum, fft_mults, MultCounter, PolarOperator,
};
pub use spectrum::{
    angular_spectrum, bin_of_harmonic, half_cell_phase, harmonic_of_bin, inverse_angular_spectrum, synthesize,
    HarmonicField, RingFft,
};
pub use table::RingIntegralTable;
