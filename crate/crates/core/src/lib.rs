//! Core algorithms for sentence-guided multi-object tracking.
//!
//! A *sentence tracker* decodes, jointly, one detection track per sentence
//! participant and one state sequence per word recognizer, maximizing
//!
//! ```text
//!   Σ_l ( Σ_t f(b_l^t) + Σ_t g(b_l^{t-1}, b_l^t) )        detection + coherence
//! + Σ_w ( Σ_t h_w(k_w^t, b_{θ_w}^t) + Σ_t a_w(k_w^{t-1}, k_w^t) )   word lattices
//! ```
//!
//! over the cross product of all per-participant detection lattices and
//! per-word finite-state recognizers. On top of the decoder sit three
//! applications: focus of attention (which tracks a sentence picks out),
//! sentence generation by beam search, and sentential video retrieval.
//!
//! The crate is `no_std`-compatible (with `alloc`); all float
//! transcendentals go through `libm` so results do not depend on the
//! platform's libm or on feature flags.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod clip;
pub mod features;
pub mod generate;
pub mod lattice;
pub mod lexicon;
pub mod linguistics;
pub mod math;
pub mod oracle;
pub mod recognizer;
pub mod regex;
pub mod retrieve;
pub mod rng;

pub use clip::{BBox, Clip, Detection, Frame, Track};
pub use features::{Atom, Constants};
pub use lattice::{ScoredResult, SentenceTrackResult, TrackerConfig};
pub use lexicon::{Lexicon, Pos, Role};
pub use recognizer::Recognizer;
pub use retrieve::{Judgment, RankedList, ScoredPair};
