//! Splittings of `TJ¹π` induced by a second-order connection and a slice
//! `(φ, v)`, the curvature operators they define, and checks of the
//! identities relating them.

pub mod applications;
pub mod connection;
pub mod curvature;
pub mod jetcalc;
pub mod oracle;
pub mod secondorder;
