//! Computational toolkit for the weak commutativity construction
//! `𝔛(G) = (G ∗ Ḡ) / ⟨⟨[g, ḡ] : g ∈ G⟩⟩`.

pub mod decision;
pub mod enumerator;
pub mod error;
pub mod intlinalg;
pub mod isoperimetry;
pub mod parse;
pub mod permgroups;
pub mod presentations;
pub mod sidki;
pub mod words;
pub mod zqmodules;

pub use error::{Error, Result};
