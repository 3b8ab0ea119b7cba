//! Wiretap and multiple-access calculators built on the single-user
//! machinery.

pub mod mac;
pub mod wiretap;

pub use mac::{
    mac_mi_user, mac_oracle, mac_oracle_with_budget, mac_phi, mac_phi_conditional, mac_rates,
    MacOracleReport, MacRates, MacSpec,
};
pub use wiretap::{
    eavesdropper_system, equivocation_bound, full_secrecy_rate, gamma, secrecy_capacity,
    GammaPoint, GammaSolver, WiretapSpec, DEFAULT_RESOLUTION,
};
