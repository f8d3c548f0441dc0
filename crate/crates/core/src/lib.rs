//! Frobenius manifolds from WDVV potentials: structure data, the principal
//! hierarchy, its two Legendre-type symmetries and hodograph solutions.

#![allow(clippy::needless_range_loop)]

pub mod frobenius;
pub mod hierarchy;
pub mod pipeline;
pub mod report;
pub mod solutions;
pub mod symmetries;
pub mod symring;
