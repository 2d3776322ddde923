//! Computable constructions around hyperbolic structures on groups.
//!
//! * [`words`] and [`smallcancel`]: free-group words, aperiodicity, and the
//!   exhaustively verified 7-aperiodic families with their C*(λ) reports.
//! * [`kapovich`]: the W-word generating sets `Z_S` of `F(a, b, c)`, exact
//!   word length by prefix dynamic programming, a Cayley-graph BFS oracle,
//!   and separation certificates between seed sets.
//! * [`groups`]: exact arithmetic in `BS(1,2)`, `ℤ wr ℤ`, `ℤ_n wr ℤ`, `ℤᵈ`
//!   and free groups, plus the representations into `SL₂(ℝ)`.
//! * [`actions`]: action models (half-plane, Bass–Serre trees, Cayley
//!   graphs), translation numbers, classification evidence, domination and
//!   coarse-isospectrality tests.
//! * [`hypmetric`]: Gromov products, four-point δ, Hausdorff distance,
//!   broken-geodesic chains, orbit graphs and Švarc–Milnor generators.
//! * [`pseudochar`]: quasi-characters, homogenization, Busemann estimates
//!   and lineal generating sets on `ℤ²`.
//!
//! Heavy scans honour [`par::Exec`]; see the `parallel` feature.

pub mod actions;
pub mod error;
pub mod groups;
pub mod hypmetric;
pub mod kapovich;
pub mod par;
pub mod pseudochar;
pub mod real;
pub mod rng;
pub mod smallcancel;
pub mod words;

pub use error::{Error, Result};
pub use par::Exec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
