//! Core library for simulating and analysing random binary trees grown by
//! uniform leaf insertion, together with their continuous-time (binary
//! fission) embedding.
//!
//! The crate is organised around three kinds of machinery:
//!
//! * growth processes: the discrete insertion chain ([`bst`]), the
//!   continuous-time splitting process ([`yule`]) and their spine-marked,
//!   exponentially tilted variants ([`tilted`]);
//! * closed-form evaluators: profile polynomials, their normalising
//!   products, derivative families and critical constants ([`martingale`]);
//! * exact ground truth: big-integer level-count expectations, exact shape
//!   distributions for small trees and exact insertion/spine depth laws
//!   ([`exact`]), used as oracles by the statistical checks in [`stats`].
//!
//! Everything here is `no_std`-compatible (with `alloc`); IO, parallelism
//! and the command-line front end live in the companion `bstlab` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bst;
pub mod exact;
pub mod martingale;
pub mod special;
pub mod stats;
pub mod streams;
pub mod tilted;
pub mod tree;
pub mod word;
pub mod yule;

pub use tree::{BinaryTree, Profile};
pub use word::NodeWord;
