//! Simulation and spectral analysis of active constrained layer (ACL)
//! sandwich beams under charge or voltage piezoelectric actuation with
//! collocated mechanical boundary feedback.
//!
//! The library builds the semi-discrete closed-loop system
//! `M q'' + D q' + K q = 0` for a clamped-free three-layer beam
//! (two longitudinal fields plus one bending field, coupled through core
//! shear and a nonlocal induced-potential stiffness term), steps it with
//! an energy-exact implicit midpoint rule, and analyses the closed-loop
//! quadratic eigenvalue pencil: spectrum, spectral abscissa, boundary
//! observability of eigenfunctions, decay-rate fits, and charge-vs-voltage
//! modal comparison. A multilayer generalization with any number of
//! alternating stiff/compliant layers reduces to the three-layer model.

pub mod assembly;
pub mod config;
pub mod dynamics;
pub mod element;
pub mod error;
pub mod export;
pub mod mesh;
pub mod model;
pub mod multilayer;
pub mod resolvent;
pub mod spectral;

pub use assembly::{assemble, DampingChannel, OperatorBundle};
pub use dynamics::{
    default_initial_state, energy, simulate, step_midpoint, EnergyTrace, InitialProfile,
    StateVector, Stepper,
};
pub use error::{CoreError, Violation};
pub use mesh::{DofLayout, Mesh};
pub use model::{
    derive_constants, Actuation, BeamConfig, CoreLayer, DerivedConstants, ElasticLayer,
    FeedbackGains, LayerStack, PiezoLayer,
};
pub use multilayer::{assemble_multilayer, MultilayerConfig};
pub use resolvent::NeumannResolvent;
pub use spectral::{
    compare_models, compute_spectrum, decay_rate_fit, observability_report, spectral_abscissa,
    SpectrumReport,
};
