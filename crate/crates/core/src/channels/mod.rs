//! Quantum channels in Kraus form, covariance and passivity checks,
//! group twirling, instruments with a classical register, and generators of
//! passive covariant test channels.

mod channel;
mod covariance;
mod generators;
mod instrument;

pub use channel::{CpMap, QuantumChannel, CP_TOL, TP_TOL};
pub use covariance::{
    covariance_residual, covariance_residual_between, cp_covariance_residual, passivity_residual, twirl, twirl_between,
    COVARIANCE_TOL, PASSIVITY_TOL,
};
pub use generators::{
    make_delay, make_dephasing, make_energy_unitary, make_group_mixture, make_partial_dephasing, make_replace,
    make_thermalizing, random_energy_unitary, random_passive_covariant, random_passive_covariant_with,
};
pub use instrument::{instrument_channel, instrument_outcomes, random_covariant_instrument, weight_measurement};
