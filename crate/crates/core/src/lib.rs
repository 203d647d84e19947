//! Exact combinatorics for the generalized Kruskal–Katona problem: given a
//! family `B` of `b` sets of size `r−1`, how many `r`-sets can contain at
//! least `k` members of `B`?
//!
//! * [`combinatorics`]: binomials, cascade representations, colex order.
//! * [`kset`] and [`family`]: sets, families, shadows, configurations, the
//!   shifted-colex construction.
//! * [`canon`]: canonical forms under relabeling of the ground set.
//! * [`incidence`]: the `k`-uniform incidence hypergraph of a configuration.
//! * [`analytics_k3`]: the exact pair-count identity for `k = 3`.
//! * [`entropy`]: walk spaces, their measures and entropy.
//! * [`bounds`]: closed-form estimates and tables.

pub mod analytics_k3;
pub mod bounds;
pub mod canon;
pub mod combinatorics;
pub mod entropy;
pub mod error;
pub mod family;
pub mod incidence;
pub mod kset;

pub use combinatorics::{CascadeRep, CascadeTerm, Natural};
pub use error::*;
pub use family::{Configuration, SetFamily};
pub use incidence::IncidenceHypergraph;
pub use kset::KSet;
