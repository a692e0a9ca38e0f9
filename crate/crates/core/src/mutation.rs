//! Single-form mutants: deleting one mark (its content stays in place) or
//! wrapping one item, or the whole root content, in a new mark.
//!
//! Mutants are always derived from the origin, never from another mutant.
//! Whether a mutant really differs from its origin is decided by exhaustive
//! equivalence checking rather than assumed.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::form::{equivalent, Form, FormError, Item, NodeKind, NodePath};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Operator {
    Delete,
    Wrap,
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Operator::Delete => "delete",
            Operator::Wrap => "wrap",
        })
    }
}

/// Which mutation operators to run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Variant {
    Delete,
    Wrap,
    #[default]
    Both,
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "delete" => Ok(Variant::Delete),
            "wrap" => Ok(Variant::Wrap),
            "both" => Ok(Variant::Both),
            other => Err(format!(
                "unknown variant `{other}` (expected delete, wrap or both)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Classification {
    /// Semantically different from the origin.
    True,
    Equivalent,
    /// Too many variables to decide within the cap.
    Unknown,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::True => "true",
            Classification::Equivalent => "equivalent",
            Classification::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MutantInfo {
    pub tests_total: usize,
    pub tests_failing: usize,
    pub tests_unknown: usize,
    pub percent_failing: f64,
    pub killed: bool,
    pub failing_test_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unknown_test_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Mutant {
    pub id: String,
    pub operator: Operator,
    pub target: NodePath,
    pub mutated: Form,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classification: Option<Classification>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub info: Option<MutantInfo>,
}

impl Mutant {
    fn new(operator: Operator, target: NodePath, mutated: Form) -> Self {
        let prefix = match operator {
            Operator::Delete => "del",
            Operator::Wrap => "wrap",
        };
        Mutant {
            id: format!("{prefix}@{target}"),
            operator,
            target,
            mutated,
            classification: None,
            info: None,
        }
    }

    pub fn is_true_mutant(&self) -> bool {
        self.classification == Some(Classification::True)
    }

    pub fn killed(&self) -> bool {
        self.info.as_ref().is_some_and(|info| info.killed)
    }
}

/// Removes the mark at `path`, splicing its content into the parent space.
pub fn delete_at(origin: &Form, path: &NodePath) -> Result<Form, FormError> {
    let mut mutated = origin.clone();
    let (space, index) = mutated.parent_mut(path)?;
    match space.items.remove(index) {
        Item::Mark(content) => {
            space.items.splice(index..index, content.items);
            Ok(mutated)
        }
        Item::Atom(_) => Err(FormError::InvalidPath(path.to_string())),
    }
}

/// Encloses the item at `path` in a new mark; the root path encloses the
/// whole root content.
pub fn wrap_at(origin: &Form, path: &NodePath) -> Result<Form, FormError> {
    if path.is_root() {
        let items = origin.root.items.clone();
        return Ok(Form::new(vec![Item::mark(items)]));
    }
    let mut mutated = origin.clone();
    let (space, index) = mutated.parent_mut(path)?;
    let item = std::mem::replace(&mut space.items[index], Item::empty_mark());
    space.items[index] = Item::mark(vec![item]);
    Ok(mutated)
}

/// One mutant per mark, in pre-order.
pub fn enumerate_delete_mutants(origin: &Form) -> Vec<Mutant> {
    origin
        .enumerate_nodes()
        .into_iter()
        .filter(|(_, kind)| *kind == NodeKind::Mark)
        .map(|(path, _)| {
            let mutated = delete_at(origin, &path).expect("enumerated mark path is valid");
            Mutant::new(Operator::Delete, path, mutated)
        })
        .collect()
}

/// One mutant per item plus one for the root content. Wrapping the content
/// of a mark yields the same form as wrapping the mark itself, and wrapping a
/// single-item root the same as wrapping that item, so those are emitted once.
pub fn enumerate_wrap_mutants(origin: &Form) -> Vec<Mutant> {
    origin
        .enumerate_nodes()
        .into_iter()
        .filter(|(path, _)| !(path.is_root() && origin.root.len() == 1))
        .map(|(path, _)| {
            let mutated = wrap_at(origin, &path).expect("enumerated path is valid");
            Mutant::new(Operator::Wrap, path, mutated)
        })
        .collect()
}

pub fn enumerate_mutants(origin: &Form, variant: Variant) -> Vec<Mutant> {
    match variant {
        Variant::Delete => enumerate_delete_mutants(origin),
        Variant::Wrap => enumerate_wrap_mutants(origin),
        Variant::Both => {
            let mut all = enumerate_delete_mutants(origin);
            all.extend(enumerate_wrap_mutants(origin));
            all
        }
    }
}

/// Marks each mutant true, equivalent, or unknown when the variable count
/// exceeds `var_cap`. Output order matches input order.
pub fn classify_true_mutants(
    origin: &Form,
    mut mutants: Vec<Mutant>,
    var_cap: usize,
) -> Vec<Mutant> {
    mutants.par_iter_mut().for_each(|mutant| {
        mutant.classification = Some(match equivalent(origin, &mutant.mutated, var_cap) {
            Ok(true) => Classification::Equivalent,
            Ok(false) => Classification::True,
            Err(_) => Classification::Unknown,
        });
    });
    mutants
}

/// A mutant differs from its origin by exactly one mark: one fewer for a
/// deletion, one more for a wrap, with every other item kept.
pub fn is_single_step(origin: &Form, mutant: &Mutant) -> bool {
    let (before, after) = (origin.node_count(), mutant.mutated.node_count());
    let (marks_before, marks_after) = (origin.mark_count(), mutant.mutated.mark_count());
    match mutant.operator {
        Operator::Delete => after + 1 == before && marks_after + 1 == marks_before,
        Operator::Wrap => after == before + 1 && marks_after == marks_before + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::{parse_form, AtomSyntax};
    use crate::simplify::simplify;

    fn form(text: &str) -> Form {
        parse_form(text, AtomSyntax::SingleLetter).unwrap()
    }

    fn texts(ms: &[Mutant]) -> Vec<(String, String)> {
        ms.iter()
            .map(|m| (m.id.clone(), m.mutated.to_string()))
            .collect()
    }

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    #[test]
    fn delete_examples() {
        assert_eq!(
            texts(&enumerate_delete_mutants(&form("(qs)pr"))),
            pairs(&[("del@0", "q s p r")])
        );
        assert_eq!(
            texts(&enumerate_delete_mutants(&form("()"))),
            pairs(&[("del@0", "")])
        );
        assert_eq!(
            texts(&enumerate_delete_mutants(&form("((a)b)c"))),
            pairs(&[("del@0", "(a) b c"), ("del@0.0", "(a b) c")])
        );
    }

    #[test]
    fn wrap_examples() {
        let ms = enumerate_wrap_mutants(&form("(qs)pr"));
        assert_eq!(
            texts(&ms),
            pairs(&[
                ("wrap@root", "((q s) p r)"),
                ("wrap@0", "((q s)) p r"),
                ("wrap@0.0", "((q) s) p r"),
                ("wrap@0.1", "(q (s)) p r"),
                ("wrap@1", "(q s) (p) r"),
                ("wrap@2", "(q s) p (r)"),
            ])
        );
        assert_eq!(
            texts(&enumerate_wrap_mutants(&form("a"))),
            pairs(&[("wrap@0", "(a)")])
        );
        assert_eq!(
            texts(&enumerate_wrap_mutants(&Form::default())),
            pairs(&[("wrap@root", "()")])
        );
    }

    #[test]
    fn wrapped_mark_equals_deleted_mark_after_simplification() {
        let origin = form("(qs)pr");
        let wrapped = wrap_at(&origin, &NodePath(vec![0])).unwrap();
        let deleted = delete_at(&origin, &NodePath(vec![0])).unwrap();
        assert_eq!(simplify(&wrapped), simplify(&deleted));
        assert_eq!(simplify(&wrapped).to_string(), "q s p r");
    }

    #[test]
    fn delete_rejects_atoms() {
        assert!(delete_at(&form("a"), &NodePath(vec![0])).is_err());
        assert!(delete_at(&form("a"), &NodePath::root()).is_err());
    }

    #[test]
    fn classification_examples() {
        let origin = form("(qs)pr");
        let ms = classify_true_mutants(&origin, enumerate_delete_mutants(&origin), 20);
        assert_eq!(ms[0].classification, Some(Classification::True));

        let origin = form("(p)q(q)");
        let ms = classify_true_mutants(&origin, enumerate_delete_mutants(&origin), 20);
        let deleted_p = ms.iter().find(|m| m.id == "del@0").unwrap();
        assert_eq!(deleted_p.mutated.to_string(), "p q (q)");
        assert_eq!(deleted_p.classification, Some(Classification::Equivalent));

        let origin = form("a");
        let ms = classify_true_mutants(&origin, enumerate_wrap_mutants(&origin), 20);
        assert_eq!(ms[0].classification, Some(Classification::True));

        let ms = classify_true_mutants(&origin, enumerate_wrap_mutants(&origin), 0);
        assert_eq!(ms[0].classification, Some(Classification::Unknown));
    }

    #[test]
    fn single_step() {
        let origin = form("((a)b)c");
        for m in enumerate_mutants(&origin, Variant::Both) {
            assert!(is_single_step(&origin, &m), "{}", m.id);
        }
    }
}
