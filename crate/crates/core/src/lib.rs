//! Classical sample learning for the hidden subgroup problem.
//!
//! The crate provides finite group arithmetic ([`group`]), subgroup algebra
//! over `F_p` ([`subgroup`], [`linalg`]), a coset-labeling oracle that hands
//! out uniform examples `(x, f(x))` ([`oracle`]), the collision-based learner
//! ([`learner`]), closed-form sample-complexity bounds ([`bounds`]),
//! exhaustive ground truth for tiny instances ([`bruteforce`]) and a
//! Monte-Carlo harness ([`experiment`], [`acceptance`]).

pub mod acceptance;
pub mod bounds;
pub mod bruteforce;
pub mod error;
pub mod experiment;
pub mod family;
pub mod group;
pub mod learner;
pub mod linalg;
pub mod oracle;
pub mod rng;
pub mod subgroup;
pub mod text;

pub use error::{HspError, Result};
pub use family::{FamilyDescriptor, FamilyKind};
pub use group::{Component, GroupElement, GroupSpec};
pub use learner::{CollisionPair, LearnerPlan};
pub use oracle::{Example, HspInstance, MeteredSampler, RahspParams};
pub use rng::RngStream;
pub use subgroup::Subgroup;
