//! Simulator and routing compiler for quantum state transfer on spin networks.
//!
//! The crate covers the full pipeline from network construction to verified
//! transfer protocols:
//!
//! - [`network`]: weighted signed spin networks (chains, diamond chains) with
//!   document serialization.
//! - [`sector`]: exact single-excitation dynamics via Hermitian
//!   eigendecomposition, global phase pulses, pulse schedules, transfer
//!   amplitudes and average-fidelity formulas.
//! - [`oracle`]: brute-force full Hilbert-space dynamics used to validate the
//!   single-excitation reduction.
//! - [`pst`]: perfect-state-transfer chains with engineered couplings and the
//!   diamond quasi-1D chain with its pulse protocol.
//! - [`hexchip`]: hexagonal Hadamard-switch lattices in 2D/3D, route planning
//!   and pulse-schedule compilation.
//! - [`dualrail`]: conclusive transfer over paired disordered chains with
//!   repeated endpoint measurements.
//! - [`verify`]: a named battery of cross-checks wiring the above together.

pub mod dualrail;
pub mod hexchip;
pub mod network;
pub mod oracle;
pub mod pst;
pub mod sector;
pub mod verify;

pub use network::{
    build_diamond_chain, build_pst_chain, build_uniform_chain, Coupling, NetworkError, SiteId,
    SiteSelector, SpinNetwork, Violation,
};
pub use sector::{
    average_fidelity, peak_search, receiver_statistics, run_schedule, AverageFidelity, PulseEvent,
    Schedule, SectorError, SectorHamiltonian, SectorState,
};
