//! End-to-end applications built on determinate atom learning.

pub mod editor;
pub mod lemma;
pub mod series;
