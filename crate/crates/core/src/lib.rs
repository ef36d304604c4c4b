//! Joint time and power allocation for a wireless-powered source helped by
//! a hybrid relay.
//!
//! An AP and a relay, both mains-powered, charge a battery-free source over
//! the downlink; the source then sends its data back to the AP. Two relay
//! behaviours are covered:
//!
//! * **E-C** ([`solver_ec`]): the relay only helps with charging.
//! * **D-C** ([`solver_dc`]): the relay also amplifies and forwards the
//!   source's uplink.
//!
//! [`protocols`] evaluates any allocation, [`oracle`] brute-forces the same
//! problems on a grid, and [`experiments`] runs seeded Monte Carlo sweeps.

pub mod channel;
pub mod error;
pub mod experiments;
pub mod oracle;
pub mod protocols;
pub mod search;
pub mod solver_dc;
pub mod solver_ec;

pub use channel::{sample_realization, ChannelRealization, NetworkConfig, UnitFading};
pub use error::{Error, Result};
pub use oracle::{oracle_dc, oracle_ec, GridSpec, OracleResult};
pub use protocols::{DcAllocation, EcAllocation};
pub use solver_dc::{optimize_dc, DcOptimum};
pub use solver_ec::{optimize_ec, EcOptimum};
