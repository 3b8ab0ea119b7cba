//! Thermodynamic function calculus on uniform grids, free of any coding
//! semantics.

pub mod equilibrium;
pub mod logmgf;
pub mod tabulated;
pub mod transform;

pub use equilibrium::{
    solve_equilibrium, spin_dominant_energy, two_level_dominant_energy, EquilibriumSolution,
    TOL_ROOT,
};
pub use logmgf::{Conjugate, MixtureLogMgf};
pub use tabulated::{ConcaveFunction, TabulatedFunction, DEFAULT_GRID, NEG_INF};
pub use transform::{
    clip_nonnegative, concave_envelope, derivative, legendre_inf, legendre_sup, sample_legendre,
    sup_convolution_table, weighted_sup_convolution, Extremum, DEFAULT_BETA_MAX,
};
