//! One-bit MIMO detection toolkit.
//!
//! A receiver with one-bit ADCs observes only the sign pattern
//! `r = sgn(H x + v)` of a noisy linear measurement. This crate detects the
//! transmitted bipolar symbol vector `x ∈ {−1,+1}ᴺ` from such sign
//! observations:
//!
//! * [`model`] — synthetic instance generation under the probit observation
//!   model, complex-to-real stacking, SNR bookkeeping.
//! * [`links`] — the scalar convex per-measurement losses (probit
//!   log-likelihood, hinge, squared hinge) and numerically stable Gaussian
//!   tail primitives.
//! * [`lp`] — a dense bounded-variable simplex solver used for node
//!   relaxations.
//! * [`bnb`] — the global solver: outer-approximation branch-and-bound with
//!   delayed cut generation.
//! * [`abb`] — a fast approximate solver for the hinge loss: smoothing plus
//!   a concave penalty, driven by alternate Barzilai-Borwein steps with a
//!   nonmonotone line search.
//! * [`detectors`] — exhaustive search, quantized zero-forcing, a
//!   Bussgang-style linear initializer, and a dispatch façade.
//! * [`bench`] — Monte-Carlo experiment driver with CSV output.
//! * [`plot`] — static SVG charts from benchmark CSVs.

pub mod abb;
pub mod bench;
pub mod bnb;
pub mod detectors;
mod linalg;
pub mod links;
pub mod lp;
pub mod model;
pub mod plot;
