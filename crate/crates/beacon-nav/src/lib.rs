//! Host side of floor-beacon robot navigation.
//!
//! Builds on `beacon-nav-core` with everything that touches the outside
//! world: the beacon database file, the TCP robot bridge, map and stage files,
//! trial logs and questionnaires, report rendering, and the operator server.

#![deny(unsafe_code)]

pub mod bridge;
pub mod formats;
pub mod report;
pub mod robot;
pub mod server;
pub mod sim;
pub mod store;
