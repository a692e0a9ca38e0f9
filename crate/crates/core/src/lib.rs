//! Mutation testing of propositional specifications through the calculus of
//! indications.
//!
//! A specification in conventional logic is translated into a form
//! ([`translate`]), optionally simplified ([`mod@simplify`]), mutated by deleting
//! or adding a single mark ([`mutation`]), and scored against a test base
//! ([`testbase`]). [`layout`] draws the result as a nested-shape map and
//! [`service`] exposes the whole pipeline over HTTP.

pub mod form;
pub mod layout;
pub mod logic;
pub mod mutation;
pub mod project;
pub mod service;
pub mod simplify;
pub mod testbase;
pub mod translate;

pub use form::{
    equivalent, parse_form, print_form, Assignment, AtomSyntax, Form, FormError, Item, NodePath,
    Space,
};
pub use layout::{build_scene, render_svg, GroupingMode, LayoutConfig, SceneGraph};
pub use logic::{parse_logic, print_logic, LogicError, LogicExpr};
pub use mutation::{Classification, Mutant, MutantInfo, Operator, Variant};
pub use project::{Project, Settings};
pub use simplify::simplify;
pub use testbase::{KillReport, TestCase, TestError};
pub use translate::{to_form, to_logic};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Test(#[from] TestError),
    #[error(transparent)]
    Layout(#[from] layout::LayoutError),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
