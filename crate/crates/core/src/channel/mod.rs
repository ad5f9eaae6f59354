//! Scenario geometry, path loss and i.n.i.d. Nakagami-m fading.

mod fading;
mod pathloss;
mod realization;
mod topology;

pub use crate::config::{FdmaAnchor, SystemConfig};
pub use fading::{sample_nakagami, Nakagami};
pub use pathloss::{db_to_linear, los_pathloss_db, noise_power_w, umi_pathloss_db};
pub use realization::{realize_channels, ChannelRealization, LinkBudget};
pub use topology::{draw_topology, surface_positions, Geometry, Point};
