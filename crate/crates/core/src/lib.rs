//! Exact-arithmetic fair division of indivisible goods.
//!
//! [`solve`] computes an allocation in which every agent `i` receives
//!
//! ```text
//! v_i(X_i) >= v_i(M)/n - (1/(n-1)) · Σ_{k≠i} m_i(X_k)
//! ```
//!
//! where `m_i(S)` is `i`'s least value for a good in `S` (0 for `∅`). The
//! [`fairness`] module checks this and related notions (PROP, PROP1, PROPm,
//! Avg-EFX, PROPx, EF, EF1, EFX) with integer cross-multiplication, and
//! [`oracle`] enumerates every allocation of small instances as ground
//! truth.

pub mod bench;
pub mod fairness;
pub mod generate;
pub mod instance;
pub mod io;
pub mod matching;
pub mod oracle;
pub mod solver;

pub use fairness::{verify, Certificate, Notion, SatisfactionReport};
pub use instance::{validate_allocation, AgentId, Allocation, Bundle, GoodId, Instance};
pub use solver::{solve, solve_with_trace, SolveError, SolverTrace};
