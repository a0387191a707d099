//! Finite relation algebras built from atom structures, the rainbow
//! construction, and bounded verification of the games used to separate
//! representable from non-representable rainbow algebras.
//!
//! The main entry points:
//!
//! * [`atom_structure`] and [`rainbow`] build atom structures;
//! * [`complex_algebra`] lifts them to algebras and checks the axioms;
//! * [`fo_logic`] evaluates first-order sentences over those algebras;
//! * [`network_game`], [`ef_game`], [`seurat_game`] and [`pebble_game`]
//!   run and verify strategies for the four games;
//! * [`ras`] reads and writes the `.ras` text format.

pub mod atom_structure;
pub mod complex_algebra;
pub mod ef_game;
pub mod element;
pub mod fo_logic;
pub mod network_game;
pub mod pebble_game;
pub mod rainbow;
pub mod ras;
pub mod seurat_game;

pub use atom_structure::{AtomId, AtomStructure, StructureBuilder, StructureError, Triple, Violation};
pub use complex_algebra::{check_axioms, ComplexAlgebra};
pub use element::Element;
pub use rainbow::{build_rainbow, RainbowParams};
