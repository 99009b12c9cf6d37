//! Core algorithms for floor-beacon robot navigation.
//!
//! The crate is `no_std` and only needs `alloc`. It holds everything that is
//! pure computation:
//!
//! - [`geometry`]: poses, quaternions and the conversion between the robot's
//!   right-handed map frame and the viewer's left-handed frame.
//! - [`beacon`]: the beacon lifecycle state machine (Off/Add/Move/Select/Delete
//!   with two-phase placement) emitting [`beacon::Effect`]s.
//! - [`navsim`]: occupancy grids, A* planning, a unicycle path follower and the
//!   experiment stage-area checker.
//! - [`evalkit`]: trial metrics, SUS scoring, Shapiro-Wilk and Wilcoxon
//!   signed-rank tests, and the two-system comparison.
//!
//! IO, wire formats, persistence and the server live in the `beacon-nav` crate.

#![no_std]
#![deny(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod beacon;
pub mod evalkit;
pub mod geometry;
pub mod navsim;

mod math;
