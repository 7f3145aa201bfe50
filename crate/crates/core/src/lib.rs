//! Featherweight Go workbench: parsing, checking and interpreting FG, a
//! dictionary-passing translation to an untyped target language, and a
//! differential checker relating the two.

pub mod diag;
pub mod equiv;
pub mod fg;
pub mod gen;
pub mod tl;
pub mod translate;
