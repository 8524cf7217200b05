//! Spectra of `H₀`, guided eigenvalue curves and bands, the modified
//! cylinder operator, and gap states.

mod gaps;
mod guided;
mod h0;

pub use gaps::{gap_states, GapState};
pub use guided::{
    assemble_guided_bands, compute_guided_bands, guided_eigenvalues, mu_spectrum,
    ConvergencePolicy, GuidedBand, GuidedBandSet, GuidedSpectrumAt, MuSpectrum, Reevaluator,
};
pub use h0::{essential_floor, fiber_band_ranges, h0_spectrum, BandStructure, EssentialFloor};
