//! Orthonormal lowest-Landau-level wavefunctions on magnetic lattices from
//! d-MRA filter banks.
//!
//! The pipeline: a finitely supported coefficient set {h_n} with dilation d
//! satisfying the orthonormality condition sum_n h_n conj(h_{n+dl}) =
//! delta_{l,0} defines a compactly supported generator T_d(s) on one lattice
//! period; the magnetic kernel maps it to a single-electron wavefunction
//! whose magnetic translates over the (Z, dZ) sublattice form an orthonormal
//! family at filling 1/d. Orthonormality is verifiable by two independent
//! routes - direct quadrature of the s-space overlaps and flatness of
//! J_d(k, q) in the Zak representation - and the resulting states feed a
//! Monte Carlo estimate of the quantum correction to the classical Wigner
//! crystal energy.
//!
//! Modules:
//! - [`filters`]: coefficient sets, builtins, validation
//! - [`lattice`]: magnetic lattices, rationality condition, sublattices
//! - [`generator`]: T_d, s-space orthonormality, inverse construction
//! - [`zak`]: Zak transform, inverse, J_d flatness
//! - [`landau`]: kernels, synthesis, magnetic translations, closed forms
//! - [`coulomb`]: Wigner energy, Monte Carlo direct/exchange integrals
//! - [`cerf`]: complex error function
//! - [`quad`], [`rng`]: quadrature rules and counter-based random streams

pub mod cerf;
pub mod coulomb;
pub mod error;
pub mod filters;
pub mod generator;
pub mod landau;
pub mod lattice;
pub mod quad;
pub mod rng;
pub mod zak;

pub use error::{Error, Result};
pub use filters::{builtin, load_filter, FilterBank, ValidatedFilterBank, ValidationReport};
pub use generator::{
    coefficients_from_function, onc_entry, onc_matrix, t_d_eval, GeneratorFunction, OncMatrix,
};
pub use landau::{
    haar2_square_closed_form, haar3_asymptotic, haar3_closed_form, kernel_eval, kernel_level,
    magnetic_translate, synthesize, ClosedFormWavefunction, KernelSpec, Level1Wavefunction,
    LevelWavefunction, StripRule, WaveField,
};
pub use lattice::{
    make_lattice, site_position, sublattice_sites, DecimationPattern, LatticeShape, LatticeSpec,
    SiteIndex,
};
pub use coulomb::{
    delta_e, direct_energy, exchange_energy, wigner_energy, DeltaEOptions, EnergyReport,
    MonteCarloConfig, MonteCarloTemplate, Sampler,
};
pub use zak::{inverse_zak, j_d, j_d_flatness, t_d_zak, zak_transform, ZakFunction};
