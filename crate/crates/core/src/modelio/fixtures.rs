//! Bundled models.

/// Two-site enzyme binding network.
pub const BINDING_CRN: &str = include_str!("../../fixtures/binding.crn");
/// Approximate-majority switch.
pub const AM_CRN: &str = include_str!("../../fixtures/am.crn");
/// Mutual-inhibition switch.
pub const MI_CRN: &str = include_str!("../../fixtures/mi.crn");
/// SIR epidemic on a five-node star with unit infection and recovery rates.
pub const SIR_STAR_ODE: &str = include_str!("../../fixtures/sir-star.ode");
/// Three copies of the linear chain `x → y → z`.
pub const CHAINS_ODE: &str = include_str!("../../fixtures/example15.ode");
