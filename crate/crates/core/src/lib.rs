//! Exact computations in self-similar branch groups.
//!
//! The crate is organised bottom-up: [`tree`] for vertices and
//! transversals, [`wreath`] for groups given by wreath recursion,
//! [`permgrp`] for the finite level quotients, [`subgroups`] for finitely
//! generated subgroups, [`induction`] for transversal certificates and
//! block decompositions, and [`goursat`] for finite subdirect products.

pub mod error;
pub mod goursat;
pub mod induction;
pub mod permgrp;
pub mod subgroups;
pub mod tree;
pub mod wreath;

pub use error::{Error, Result};
