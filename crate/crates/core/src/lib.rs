//! Verification engine for paraquaternionic Kähler geometry with torsion.
//!
//! Structures are given by polynomial data on a chart of dimension `4n`.
//! Every connection, torsion, curvature and scalar invariant is evaluated
//! from exact Taylor jets, and each identity of the theory is reported as a
//! residual over seeded sample points.
//!
//! Layout:
//!
//! * tensor core: [`jet`], [`poly`], [`tensor`], [`linalg`], [`algebra`], [`frame`]
//! * [`structures`]: almost hyper-paracomplex data, Kähler forms, Nijenhuis tensors
//! * [`connections`]: Levi-Civita, complex-product, canonical and PQKT connections
//! * [`forms`]: Lee forms, `dF` splitting, classification predicates
//! * [`curvature`]: curvature tensors, Ricci forms, scalar curvatures, identity suite
//! * [`conformal`]: rescaling and direct transport of PQKT connections
//! * [`catalog`]: test models with known properties
//! * [`manifest`], [`report`], [`suite`]: manifest ingestion and residual reports
//!
//! Each capability has a runnable example: `cargo run --example <name>`.

pub mod algebra;
pub mod catalog;
pub mod conformal;
pub mod connections;
pub mod curvature;
pub mod error;
pub mod forms;
pub mod frame;
pub mod jet;
pub mod linalg;
pub mod manifest;
pub mod poly;
pub mod report;
pub mod structures;
pub mod suite;
pub mod tensor;

pub use error::{Error, Result};
