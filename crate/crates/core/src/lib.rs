//! Anti-jamming optimisation for UAV swarms.
//!
//! A swarm of UAVs with steerable directional antennas shares a deployment
//! area with a jammer. This crate models the inter-UAV channel
//! ([`channel`]), routes traffic over the resulting capacity graph
//! ([`routing`]), searches layouts and beam directions with a nested genetic
//! algorithm ([`optimizer`]) and runs the three experiment types: fixed
//! positions, a fixed area and a moving area ([`scenario`]).

pub mod channel;
pub mod cli;
pub mod error;
pub mod optimizer;
pub mod routing;
pub mod scenario;
pub mod svg;

pub use error::{Error, Result};
