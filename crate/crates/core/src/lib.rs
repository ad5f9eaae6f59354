//! Downlink simulation of a multi-antenna base station served through
//! several reconfigurable intelligent surfaces (RIS).
//!
//! The crate draws Nakagami-m channels for a single cell, chooses the RIS
//! phase shifts and the BS beamformer for an opportunistically selected user
//! (joint optimization via semidefinite relaxation, or a closed-form
//! alternating optimization), and compares the resulting throughput with
//! TDMA and FDMA baselines over Monte-Carlo trials.
//!
//! ```
//! use multiris::{harness::run_montecarlo, schemes::Scheme, SystemConfig};
//!
//! let cfg = SystemConfig { trials: 4, ..SystemConfig::desk() };
//! let results = run_montecarlo(&cfg).unwrap();
//! assert_eq!(results.throughputs(Scheme::Tdma).len(), 4);
//! ```

pub mod ao;
pub mod beamforming;
pub mod channel;
pub mod config;
mod error;
pub mod harness;
pub mod numerics;
pub mod schemes;
pub mod sdr;

pub use config::{FdmaAnchor, SystemConfig};
pub use error::{Error, Result};
pub use schemes::Scheme;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/channel.md")]
    mod channel {}
    #[doc = include_str!("../../../book/src/selection.md")]
    mod selection {}
    #[doc = include_str!("../../../book/src/sdr.md")]
    mod sdr {}
    #[doc = include_str!("../../../book/src/ao.md")]
    mod ao {}
    #[doc = include_str!("../../../book/src/schemes.md")]
    mod schemes {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
