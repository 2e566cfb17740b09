//! System-level downlink simulation of terrestrial 4G/5G cellular networks
//! and 5G base stations carried by high-altitude platforms with tri-sector
//! reflector antennas.
//!
//! The crate is organised along the simulation pipeline:
//!
//! - [`scenario`]: configuration, validation and radio constants
//! - [`geometry`]: the 19-site hexagonal layout, reflector tilt, UE drops
//! - [`antenna`]: reflector and sector-panel gain patterns
//! - [`channel`]: LoS probability, path loss, shadowing, Rician fading
//! - [`link`]: association, per-PRB SINR, effective SINR, rate
//! - [`experiment`]: drops, the altitude × aperture sweep, heatmaps
//! - [`io`]: config parsing and CSV/JSON outputs
//! - [`cli`]: the `skylink` command line
//!
//! ```no_run
//! use skylink::prelude::*;
//!
//! let cfg = ScenarioConfig::ntn(8_000.0, 25.0).validate()?;
//! let drops = Simulator::new(cfg).run()?;
//! let stats = aggregate_drops(&drops)?;
//! println!("mean throughput {:.1} Mbps", stats.mean_tput_mbps);
//! # Ok::<(), skylink::Error>(())
//! ```

pub mod antenna;
pub mod channel;
pub mod cli;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod io;
pub mod link;
pub mod rng;
pub mod scenario;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::antenna::{ReflectorAntenna, SectorAntenna};
    pub use crate::error::{Error, Result};
    pub use crate::experiment::{
        aggregate_drops, aggregate_stats, compare, run_sweep, sample_heatmap, AggregateStats, DropResult,
        HeatmapGrid, HeatmapSpec, Simulator, SweepGrid,
    };
    pub use crate::geometry::{build_hex_layout, compute_tilt, Deployment, Layout};
    pub use crate::scenario::{DeploymentKind, LosMode, ScenarioConfig, Steering, ValidatedConfig};
}
