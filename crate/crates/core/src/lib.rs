//! Scattering amplitudes, joint photon-number distributions and space-time
//! interference for Fock, coherent and thermal light at a lossless two-port
//! beamsplitter.

pub mod counting;
pub mod distributions;
pub mod error;
pub mod exact;
mod numeric;
pub mod quadrature;
pub mod scattering;
pub mod spacetime;
pub mod states;

pub use counting::{
    diagonal_tau0, fs_cs_counting_joint, fs_cs_counting_matrix, fs_cs_dc_term, operator_oracle, registered_mean,
    single_mode_counting, CountingParams, CountingResult, CountingTerms, ModeSamples, PhotonProfile, SeriesSettings,
};
pub use distributions::{
    analytic_fs_cs, apply_efficiency, cnl_scan, joint_distribution, CnlReport, DetectorModel, JointDistribution,
};
pub use error::{Error, Result};
pub use exact::{ExactAmplitude, ScaledAmplitude};
pub use scattering::{
    bs_amplitude, enumerate_diagrams, mirror_pair_check, total_output_probability, Amplitude, AmplitudeKernel,
    MirrorReport, Probability, ScatteringDiagram, ScatteringMatrix,
};
pub use spacetime::{
    fs_cs_joint_density, fs_cs_total_vs_tau, hom_joint_density, hom_total_broadened, hom_total_vs_tau, CwMode,
    FsCsDensity, FsCsTotal, GaussianMode, ModeFunction, ModeProfile, PulsedMode, TimingParams,
};
pub use states::{
    make_coherent, make_custom_mixed, make_custom_pure, make_fock, make_thermal, BipartiteInput, PhotonState,
    Truncation,
};
