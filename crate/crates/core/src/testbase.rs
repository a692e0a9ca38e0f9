//! Test cases, origin validation and kill analysis.
//!
//! Test file format:
//!
//! ```json
//! {"tests": [{"id": "t1", "assign": {"p": true}, "expect": true}]}
//! ```
//!
//! `expect` is a boolean or an expression text, read first as logic syntax and
//! then as form syntax. A boolean expectation under a partial assignment is
//! compared against the residual form, so `{"assign": {}, "expect": true}`
//! demands a tautology.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::form::{equivalent, parse_form, Assignment, AtomSyntax, Form};
use crate::logic::parse_logic;
use crate::mutation::{Classification, Mutant, MutantInfo};
use crate::simplify::simplify;
use crate::translate::to_form;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TestError {
    #[error("invalid test file at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("duplicate test id `{0}`")]
    DuplicateTestId(String),
    #[error("test `{test}` binds variables not in the origin: {}", .variables.join(", "))]
    UnboundVariable {
        test: String,
        variables: Vec<String>,
    },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> TestError {
    TestError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expectation {
    Bool(bool),
    /// Expected residual formula; `text` is kept verbatim for round-tripping.
    Residual {
        text: String,
        form: Form,
    },
}

impl Expectation {
    pub fn parse_text(text: &str, syntax: AtomSyntax) -> Result<Self, String> {
        let form = match parse_logic(text) {
            Ok(expr) => to_form(&expr),
            Err(logic_err) => parse_form(text, syntax).map_err(|form_err| {
                format!("not a logic expression ({logic_err}) nor a form ({form_err})")
            })?,
        };
        Ok(Expectation::Residual {
            text: text.to_string(),
            form,
        })
    }

    pub fn as_form(&self) -> Form {
        match self {
            Expectation::Bool(true) => Form::new(vec![crate::form::Item::empty_mark()]),
            Expectation::Bool(false) => Form::default(),
            Expectation::Residual { form, .. } => form.clone(),
        }
    }
}

impl Serialize for Expectation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Expectation::Bool(value) => serializer.serialize_bool(*value),
            Expectation::Residual { text, .. } => serializer.serialize_str(text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestCase {
    pub id: String,
    pub assign: Assignment,
    pub expect: Expectation,
}

impl TestCase {
    pub fn is_total_for(&self, form: &Form) -> bool {
        form.variables().iter().all(|v| self.assign.contains_key(v))
    }
}

/// Serialized test list, as stored inside project files.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct TestFile {
    pub tests: Vec<TestCase>,
}

impl<'de> Deserialize<'de> for TestFile {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = match Value::deserialize(deserializer)? {
            list @ Value::Array(_) => {
                Value::Object([("tests".to_string(), list)].into_iter().collect())
            }
            other => other,
        };
        let tests =
            parse_tests_value(&value, AtomSyntax::Identifiers).map_err(serde::de::Error::custom)?;
        Ok(TestFile { tests })
    }
}

pub fn parse_tests(text: &str, syntax: AtomSyntax) -> Result<Vec<TestCase>, TestError> {
    let value: Value = serde_json::from_str(text).map_err(|e| schema("$", e.to_string()))?;
    parse_tests_value(&value, syntax)
}

pub fn parse_tests_value(value: &Value, syntax: AtomSyntax) -> Result<Vec<TestCase>, TestError> {
    let list = value
        .get("tests")
        .ok_or_else(|| schema("$", "missing `tests` array"))?
        .as_array()
        .ok_or_else(|| schema("$.tests", "expected an array"))?;
    let tests = list
        .iter()
        .enumerate()
        .map(|(i, entry)| {
            parse_test_case(
                entry,
                &format!("$.tests[{i}]"),
                &format!("t{}", i + 1),
                syntax,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    check_unique_ids(&tests)?;
    Ok(tests)
}

pub fn check_unique_ids(tests: &[TestCase]) -> Result<(), TestError> {
    let mut seen = BTreeSet::new();
    for test in tests {
        if !seen.insert(test.id.as_str()) {
            return Err(TestError::DuplicateTestId(test.id.clone()));
        }
    }
    Ok(())
}

/// One test object; `default_id` is used when the object has no `id`.
pub fn parse_test_case(
    value: &Value,
    path: &str,
    default_id: &str,
    syntax: AtomSyntax,
) -> Result<TestCase, TestError> {
    let object = value
        .as_object()
        .ok_or_else(|| schema(path, "expected an object"))?;
    if let Some(key) = object
        .keys()
        .find(|k| !matches!(k.as_str(), "id" | "assign" | "expect"))
    {
        return Err(schema(format!("{path}.{key}"), "unknown field"));
    }
    let id = match object.get("id") {
        None | Some(Value::Null) => default_id.to_string(),
        Some(Value::String(id)) if !id.is_empty() => id.clone(),
        Some(_) => return Err(schema(format!("{path}.id"), "expected a non-empty string")),
    };
    let assign = match object.get("assign") {
        None => Assignment::new(),
        Some(Value::Object(bindings)) => bindings
            .iter()
            .map(|(name, v)| {
                v.as_bool()
                    .map(|b| (name.clone(), b))
                    .ok_or_else(|| schema(format!("{path}.assign.{name}"), "expected a boolean"))
            })
            .collect::<Result<_, _>>()?,
        Some(_) => {
            return Err(schema(
                format!("{path}.assign"),
                "expected an object of booleans",
            ))
        }
    };
    let expect = match object.get("expect") {
        Some(Value::Bool(b)) => Expectation::Bool(*b),
        Some(Value::String(text)) => Expectation::parse_text(text, syntax)
            .map_err(|m| schema(format!("{path}.expect"), m))?,
        Some(_) => {
            return Err(schema(
                format!("{path}.expect"),
                "expected a boolean or an expression string",
            ))
        }
        None => return Err(schema(path, "missing `expect`")),
    };
    Ok(TestCase { id, assign, expect })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    /// The residual comparison exceeded the variable cap.
    Unknown,
}

/// Runs one test against a form: direct evaluation when the test is total
/// with a boolean expectation, otherwise semantic comparison of the residual.
pub fn run_test(form: &Form, test: &TestCase, var_cap: usize) -> Outcome {
    if let Expectation::Bool(expected) = test.expect {
        if let Ok(actual) = form.eval(&test.assign) {
            return if actual == expected {
                Outcome::Pass
            } else {
                Outcome::Fail
            };
        }
    }
    let residual = form.substitute(&test.assign);
    let expected = test.expect.as_form().substitute(&test.assign);
    match equivalent(&residual, &expected, var_cap) {
        Ok(true) => Outcome::Pass,
        Ok(false) => Outcome::Fail,
        Err(_) => Outcome::Unknown,
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum UnboundPolicy {
    #[default]
    Error,
    Warn,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Validation {
    /// Tests whose expectation disagrees with the origin.
    pub failed: Vec<String>,
    /// Tests binding variables the origin does not have (under `Warn`).
    pub unbound: Vec<String>,
}

pub fn validate_origin(
    origin: &Form,
    tests: &[TestCase],
    policy: UnboundPolicy,
    var_cap: usize,
) -> Result<Validation, TestError> {
    let vars = origin.variables();
    let mut validation = Validation::default();
    for test in tests {
        let extra: Vec<String> = test
            .assign
            .keys()
            .filter(|k| !vars.contains(*k))
            .cloned()
            .collect();
        if !extra.is_empty() {
            match policy {
                UnboundPolicy::Error => {
                    return Err(TestError::UnboundVariable {
                        test: test.id.clone(),
                        variables: extra,
                    })
                }
                UnboundPolicy::Warn => validation.unbound.push(test.id.clone()),
            }
        }
        if run_test(origin, test, var_cap) == Outcome::Fail {
            validation.failed.push(test.id.clone());
        }
    }
    Ok(validation)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct KillReport {
    /// Step-one translation before simplification, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translated: Option<Form>,
    /// The form the mutants were generated from.
    pub origin: Form,
    pub simplified: Form,
    pub mutants: Vec<Mutant>,
    pub tests_total: usize,
    pub true_mutant_count: usize,
    pub killed_count: usize,
    pub equivalent_count: usize,
    pub unknown_count: usize,
    pub mutation_score: f64,
    /// Tests whose expectation disagrees with the origin.
    #[serde(default)]
    pub invalid_tests: Vec<String>,
}

impl KillReport {
    pub fn mutant(&self, id: &str) -> Option<&Mutant> {
        self.mutants.iter().find(|m| m.id == id)
    }
}

/// Evaluates every mutant against every test. Mutants should already be
/// classified; the score counts killed true mutants over all true mutants.
pub fn run_kill_analysis(
    origin: &Form,
    mut mutants: Vec<Mutant>,
    tests: &[TestCase],
    var_cap: usize,
) -> KillReport {
    mutants.par_iter_mut().for_each(|mutant| {
        let mut info = MutantInfo {
            tests_total: tests.len(),
            tests_failing: 0,
            tests_unknown: 0,
            percent_failing: 0.0,
            killed: false,
            failing_test_ids: Vec::new(),
            unknown_test_ids: Vec::new(),
        };
        for test in tests {
            match run_test(&mutant.mutated, test, var_cap) {
                Outcome::Pass => {}
                Outcome::Fail => {
                    info.tests_failing += 1;
                    info.failing_test_ids.push(test.id.clone());
                }
                Outcome::Unknown => {
                    info.tests_unknown += 1;
                    info.unknown_test_ids.push(test.id.clone());
                }
            }
        }
        info.killed = info.tests_failing >= 1;
        if info.tests_total > 0 {
            info.percent_failing = info.tests_failing as f64 / info.tests_total as f64;
        }
        mutant.info = Some(info);
    });

    let count = |c: Classification| {
        mutants
            .iter()
            .filter(|m| m.classification == Some(c))
            .count()
    };
    let true_mutant_count = count(Classification::True);
    let killed_count = mutants
        .iter()
        .filter(|m| m.is_true_mutant() && m.killed())
        .count();
    let invalid_tests = tests
        .iter()
        .filter(|t| run_test(origin, t, var_cap) == Outcome::Fail)
        .map(|t| t.id.clone())
        .collect();
    KillReport {
        translated: None,
        simplified: simplify(origin),
        origin: origin.clone(),
        tests_total: tests.len(),
        true_mutant_count,
        killed_count,
        equivalent_count: count(Classification::Equivalent),
        unknown_count: count(Classification::Unknown),
        mutation_score: if true_mutant_count == 0 {
            0.0
        } else {
            killed_count as f64 / true_mutant_count as f64
        },
        invalid_tests,
        mutants,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mutation::{classify_true_mutants, enumerate_delete_mutants};

    fn form(text: &str) -> Form {
        parse_form(text, AtomSyntax::SingleLetter).unwrap()
    }

    fn tests(json: &str) -> Vec<TestCase> {
        parse_tests(json, AtomSyntax::Identifiers).unwrap()
    }

    fn dilemma_analysis(test_json: &str) -> KillReport {
        let origin = form("(qs)pr");
        let mutants = classify_true_mutants(&origin, enumerate_delete_mutants(&origin), 20);
        run_kill_analysis(&origin, mutants, &tests(test_json), 20)
    }

    #[test]
    fn parses_total_and_partial_tests() {
        let parsed = tests(
            r#"{"tests":[
                {"assign":{"q":false,"s":false,"p":false,"r":false},"expect":true},
                {"assign":{"p":true},"expect":"true"},
                {"id":"empty","assign":{},"expect":"(q s) p r"}
            ]}"#,
        );
        assert_eq!(parsed[0].id, "t1");
        assert_eq!(parsed[0].expect, Expectation::Bool(true));
        assert!(parsed[0].is_total_for(&form("(qs)pr")));
        assert_eq!(parsed[1].id, "t2");
        assert!(
            matches!(&parsed[1].expect, Expectation::Residual { form, .. } if form.to_string() == "()")
        );
        assert!(!parsed[1].is_total_for(&form("(qs)pr")));
        assert_eq!(parsed[2].id, "empty");

        let origin = form("(qs)pr");
        assert!(parsed
            .iter()
            .all(|t| run_test(&origin, t, 20) == Outcome::Pass));
    }

    #[test]
    fn expect_text_falls_back_to_form_syntax() {
        let parsed = tests(r#"{"tests":[{"assign":{"p":false,"r":false},"expect":"(q s)"}]}"#);
        assert!(
            matches!(&parsed[0].expect, Expectation::Residual { form, .. } if form.to_string() == "(q s)")
        );
        assert_eq!(run_test(&form("(qs)pr"), &parsed[0], 20), Outcome::Pass);
        let parsed =
            tests(r#"{"tests":[{"assign":{"p":false,"r":false},"expect":"not (q or s)"}]}"#);
        assert_eq!(run_test(&form("(qs)pr"), &parsed[0], 20), Outcome::Pass);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = parse_tests(
            r#"{"tests":[{"expect":true},{"assign":{"p":1},"expect":true}]}"#,
            AtomSyntax::Identifiers,
        )
        .unwrap_err();
        assert_eq!(err, schema("$.tests[1].assign.p", "expected a boolean"));
        let err = parse_tests(r#"{"tests":[{"assign":{}}]}"#, AtomSyntax::Identifiers).unwrap_err();
        assert_eq!(err, schema("$.tests[0]", "missing `expect`"));
        let err =
            parse_tests(r#"{"tests":[{"expect":"(("}]}"#, AtomSyntax::Identifiers).unwrap_err();
        assert!(matches!(err, TestError::Schema { ref path, .. } if path == "$.tests[0].expect"));
        assert!(matches!(
            parse_tests("[]", AtomSyntax::Identifiers),
            Err(TestError::Schema { .. })
        ));
        assert!(matches!(
            parse_tests("{", AtomSyntax::Identifiers),
            Err(TestError::Schema { .. })
        ));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = parse_tests(
            r#"{"tests":[{"expect":true},{"id":"t1","expect":false}]}"#,
            AtomSyntax::Identifiers,
        )
        .unwrap_err();
        assert_eq!(err, TestError::DuplicateTestId("t1".into()));
    }

    #[test]
    fn validation() {
        let origin = form("(qs)pr");
        let all_false = |expect: bool| {
            tests(&format!(
                r#"{{"tests":[{{"assign":{{"q":false,"s":false,"p":false,"r":false}},"expect":{expect}}}]}}"#
            ))
        };
        let ok = validate_origin(&origin, &all_false(true), UnboundPolicy::Error, 20).unwrap();
        assert!(ok.failed.is_empty());
        let bad = validate_origin(&origin, &all_false(false), UnboundPolicy::Error, 20).unwrap();
        assert_eq!(bad.failed, vec!["t1".to_string()]);

        let single = tests(r#"{"tests":[{"assign":{"a":true},"expect":true}]}"#);
        assert!(
            validate_origin(&form("a"), &single, UnboundPolicy::Error, 20)
                .unwrap()
                .failed
                .is_empty()
        );

        let stray = tests(r#"{"tests":[{"assign":{"z":true,"a":true},"expect":true}]}"#);
        assert_eq!(
            validate_origin(&form("a"), &stray, UnboundPolicy::Error, 20),
            Err(TestError::UnboundVariable {
                test: "t1".into(),
                variables: vec!["z".into()]
            })
        );
        let warned = validate_origin(&form("a"), &stray, UnboundPolicy::Warn, 20).unwrap();
        assert_eq!(warned.unbound, vec!["t1".to_string()]);
        assert!(warned.failed.is_empty());
    }

    #[test]
    fn all_false_test_kills_the_deletion() {
        let report = dilemma_analysis(
            r#"{"tests":[{"assign":{"q":false,"s":false,"p":false,"r":false},"expect":true}]}"#,
        );
        let info = report.mutants[0].info.as_ref().unwrap();
        assert!(info.killed);
        assert_eq!(info.percent_failing, 1.0);
        assert_eq!(info.failing_test_ids, vec!["t1".to_string()]);
        assert_eq!(report.mutation_score, 1.0);
    }

    #[test]
    fn p_true_test_does_not_kill_the_deletion() {
        let report = dilemma_analysis(
            r#"{"tests":[{"assign":{"p":true,"q":false,"s":false,"r":false},"expect":true}]}"#,
        );
        let info = report.mutants[0].info.as_ref().unwrap();
        assert!(!info.killed);
        assert_eq!(info.percent_failing, 0.0);
        assert_eq!(report.mutation_score, 0.0);
    }

    #[test]
    fn empty_test_base() {
        let report = dilemma_analysis(r#"{"tests":[]}"#);
        assert_eq!(report.mutation_score, 0.0);
        assert_eq!(report.true_mutant_count, 1);
        assert!(report.mutants.iter().all(|m| !m.killed()));
    }

    #[test]
    fn partial_tests_compare_residuals() {
        // Under p=false, r=false the origin leaves (q s); the deletion leaves q s.
        let report =
            dilemma_analysis(r#"{"tests":[{"assign":{"p":false,"r":false},"expect":"(q s)"}]}"#);
        assert!(report.mutants[0].killed());
        // Empty assignment with boolean expectation demands equivalence to a constant.
        let report = dilemma_analysis(r#"{"tests":[{"assign":{},"expect":true}]}"#);
        assert!(report.mutants[0].killed());
        assert!(report.invalid_tests.contains(&"t1".to_string()));
    }

    #[test]
    fn unknown_outcomes_are_separate() {
        let origin = form("(qs)pr");
        let mutants = classify_true_mutants(&origin, enumerate_delete_mutants(&origin), 20);
        let partial = tests(r#"{"tests":[{"assign":{"p":false},"expect":"(q s) r"}]}"#);
        let report = run_kill_analysis(&origin, mutants, &partial, 2);
        let info = report.mutants[0].info.as_ref().unwrap();
        assert_eq!((info.tests_failing, info.tests_unknown), (0, 1));
        assert!(!info.killed);
    }
}
