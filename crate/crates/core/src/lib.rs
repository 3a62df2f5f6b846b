//! Classical simulation and just-in-time decoding for the D(S3) quantum double.

pub mod algebra;
pub mod chunks;
pub mod decoder;
pub mod geometry;
pub mod harness;
pub mod lab;
pub mod sim;
pub mod spacetime;
