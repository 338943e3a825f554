//! Random graphs with minimum-degree constraints, k-cores along the random
//! graph process, matching peeling, and packing of edge-disjoint Hamilton
//! cycles driven by Pósa rotations and a uniform edge reservoir.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod graph;
pub mod kcore;
pub mod matching;
pub mod packer;
pub mod posa;
pub mod process;
pub mod random_models;
pub mod seed;
pub mod verifier;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, MultiGraph};
pub use kcore::{k_core, CoreResult};
pub use matching::{Matching, TwoMatching};
pub use packer::{PackerConfig, PackingCertificate};
pub use posa::PathCover;
pub use verifier::{Verdict, ViolationWitness};
