//! Centralizer chains, iterated centralizers and definable nilpotent
//! envelopes in finite groups.
//!
//! Groups are given by a Cayley table or by permutation generators and are
//! enumerated up front; elements are indices `0..order` with the identity at
//! `0`. Subgroups and element sets are bitsets over those indices.
//!
//! ```
//! use mcenv_core::{catalog, envelope::build_envelope};
//!
//! let a4 = catalog::alternating(4).unwrap();
//! let h = a4.closure([a4.element_of_permutation(&[1, 0, 3, 2]).unwrap()]);
//! let trace = build_envelope(&a4, &h).unwrap();
//! assert_eq!(trace.envelope.order(), 4);
//! ```

pub mod catalog;
pub mod centralizers;
pub mod envelope;
pub mod error;
pub mod formula;
pub mod group;
pub mod harness;
pub mod io;
pub mod series;
pub mod subgroups;

pub use centralizers::{centralizer, CentralizerLattice, ChainReport};
pub use envelope::{build_envelope, EnvelopeTrace};
pub use error::{Error, Result};
pub use formula::{Formula, Term};
pub use group::{Element, ElementSet, FiniteGroup, Subgroup, IDENTITY};
