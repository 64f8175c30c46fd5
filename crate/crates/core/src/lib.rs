//! Normalised Dice Similarity Coefficient (nDSC) and classical DSC for binary
//! 3D segmentation masks, with tools to measure how strongly each metric is
//! biased by the positive-class (lesion) load across a cohort.
//!
//! ```
//! use ndsc::metrics::{evaluate_pair, MetricConfig};
//! use ndsc::volume::BinaryMask;
//!
//! let gt = BinaryMask::from_u8([5, 5, 1], &[
//!     1, 1, 0, 0, 0,
//!     0, 0, 0, 0, 0,
//!     0, 0, 0, 0, 0,
//!     0, 0, 0, 0, 0,
//!     0, 0, 0, 0, 0,
//! ]).unwrap();
//! let pred = BinaryMask::from_u8([5, 5, 1], &[
//!     1, 0, 0, 0, 0,
//!     1, 0, 0, 0, 0,
//!     0, 0, 0, 0, 0,
//!     0, 0, 0, 0, 0,
//!     0, 0, 0, 0, 0,
//! ]).unwrap();
//!
//! // with r equal to this subject's own load, kappa is exactly 1
//! let cfg = MetricConfig::new(2.0 / 25.0).unwrap();
//! let m = evaluate_pair(&gt, &pred, &cfg).unwrap();
//! assert_eq!(m.kappa, 1.0);
//! assert_eq!(m.dsc, m.ndsc);
//! ```
//!
//! Modules:
//! - [`volume`]: single-file NIfTI-1 I/O and mask validation
//! - [`metrics`]: confusion counts, DSC, nDSC, PR curves, threshold sweeps
//! - [`stats`]: Spearman, Kendall tau-b and rank regression
//! - [`cohort`]: manifests, reference estimation and the bias report
//! - [`synth`]: synthetic cohorts and the closed-form noise-model oracle
//! - [`cli`]: the `ndsc` command line

pub mod cli;
pub mod cohort;
pub mod error;
pub mod metrics;
pub mod stats;
pub mod synth;
pub mod volume;

pub use error::{Error, Result};
