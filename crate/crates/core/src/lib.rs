//! Discrete Bayesian-network classification toolkit.
//!
//! The crate represents desk-scale discrete Bayesian networks with Dirichlet
//! priors and builds four things on top of the joint model:
//!
//! * [`network`] — the core types (structures, CPTs, priors, counts,
//!   datasets) and exact enumeration inference: joint, conditional, and
//!   marginal probabilities, conjugate updating, sequential predictives, and
//!   the marginal likelihood (chain rule and closed form, cross-checked on
//!   every call).
//! * [`softmax`] — conversion of a network's conditional p(y | x) into an
//!   explicit linear or polynomial softmax regression over state indicators,
//!   with a canonical monomial basis so coefficient sets are comparable.
//! * [`identifiability`] — the map from free CPT parameters to the joint
//!   input distribution, its central-difference Jacobian, and a seeded rank
//!   probe that measures how often the map is locally invertible.
//! * [`criteria`] / [`selection`] — prequential scoring (conditional node
//!   monitor, class sequential criterion in exact and Monte-Carlo form, log
//!   marginal likelihood) and exhaustive structure enumeration with Bayesian
//!   model averaging and top-k selection.
//!
//! All inference is by explicit enumeration and is intended for small
//! networks (tens of joint configurations, not millions). Every randomized
//! operation takes an explicit seed and uses the ChaCha8 generator, so
//! results are reproducible.

pub mod criteria;
pub mod error;
pub mod identifiability;
pub mod logspace;
pub mod network;
pub mod selection;
pub mod softmax;

pub use error::{Error, Result};
