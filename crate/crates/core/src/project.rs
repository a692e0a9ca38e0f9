//! One specification with its test base, settings and latest kill report.

use serde::{Deserialize, Serialize};

use crate::form::{default_var_cap, AtomSyntax, Form, NodePath, NodeRef};
use crate::layout::{build_scene, GroupingMode, LayoutConfig, SceneGraph};
use crate::logic::{parse_logic, print_logic, LogicExpr};
use crate::mutation::{classify_true_mutants, enumerate_mutants, is_single_step, Mutant, Variant};
use crate::simplify::simplify;
use crate::testbase::{
    check_unique_ids, parse_tests_value, run_kill_analysis, validate_origin, KillReport, TestCase,
    TestFile, UnboundPolicy,
};
use crate::translate::{item_to_logic, to_form, to_logic};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default)]
pub struct Settings {
    pub var_cap: usize,
    /// Mutate the unsimplified translation.
    pub raw: bool,
    pub variant: Variant,
    pub grouping: GroupingMode,
    /// Atom syntax for form-syntax test expectations.
    pub atom_syntax: AtomSyntax,
    pub layout: LayoutConfig,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            var_cap: default_var_cap(),
            raw: false,
            variant: Variant::Both,
            grouping: GroupingMode::Document,
            atom_syntax: AtomSyntax::Identifiers,
            layout: LayoutConfig::default(),
        }
    }
}

/// Persisted project bundle.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ProjectFile {
    pub spec_text: String,
    #[serde(default)]
    pub tests: TestFile,
    #[serde(default)]
    pub settings: Settings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<KillReport>,
}

#[derive(Debug, Clone)]
pub struct Project {
    spec_text: String,
    origin_logic: LogicExpr,
    translated: Form,
    simplified: Form,
    mutants: Vec<Mutant>,
    tests: Vec<TestCase>,
    report: Option<KillReport>,
    settings: Settings,
}

impl Project {
    pub fn new(spec_text: &str, settings: Settings) -> Result<Self> {
        let origin_logic = parse_logic(spec_text)?;
        let translated = to_form(&origin_logic);
        let simplified = simplify(&translated);
        let mut project = Project {
            spec_text: spec_text.to_string(),
            origin_logic,
            translated,
            simplified,
            mutants: Vec::new(),
            tests: Vec::new(),
            report: None,
            settings,
        };
        project.regenerate_mutants()?;
        Ok(project)
    }

    fn regenerate_mutants(&mut self) -> Result<()> {
        let base = self.base_form().clone();
        let mutants = enumerate_mutants(&base, self.settings.variant);
        if let Some(bad) = mutants.iter().find(|m| !is_single_step(&base, m)) {
            return Err(Error::Invariant(format!(
                "mutant {} is not a single-mark change",
                bad.id
            )));
        }
        self.mutants = classify_true_mutants(&base, mutants, self.settings.var_cap);
        self.report = None;
        Ok(())
    }

    pub fn from_file(file: ProjectFile) -> Result<Self> {
        let syntax = file.settings.atom_syntax;
        let mut project = Project::new(&file.spec_text, file.settings)?;
        project.set_tests(parse_tests_value(
            &serde_json::to_value(&file.tests)?,
            syntax,
        )?)?;
        if let Some(report) = file.report {
            if report.origin != *project.base_form() {
                return Err(Error::Invariant(
                    "cached report does not match the specification".into(),
                ));
            }
            project.report = Some(report);
        }
        Ok(project)
    }

    pub fn to_file(&self) -> ProjectFile {
        ProjectFile {
            spec_text: self.spec_text.clone(),
            tests: TestFile {
                tests: self.tests.clone(),
            },
            settings: self.settings.clone(),
            report: self.report.clone(),
        }
    }

    pub fn spec_text(&self) -> &str {
        &self.spec_text
    }

    pub fn origin_logic(&self) -> &LogicExpr {
        &self.origin_logic
    }

    pub fn translated(&self) -> &Form {
        &self.translated
    }

    pub fn simplified(&self) -> &Form {
        &self.simplified
    }

    /// The form mutants are generated from.
    pub fn base_form(&self) -> &Form {
        if self.settings.raw {
            &self.translated
        } else {
            &self.simplified
        }
    }

    pub fn settings(&self) -> &Settings {
        &self.settings
    }

    pub fn set_settings(&mut self, settings: Settings) -> Result<()> {
        self.settings = settings;
        self.regenerate_mutants()
    }

    pub fn mutants(&self) -> &[Mutant] {
        &self.mutants
    }

    pub fn tests(&self) -> &[TestCase] {
        &self.tests
    }

    pub fn report(&self) -> Option<&KillReport> {
        self.report.as_ref()
    }

    /// Replaces the test base and drops any report. Variables are checked
    /// against the unsimplified translation, which may mention atoms the
    /// simplified form has lost.
    pub fn set_tests(&mut self, tests: Vec<TestCase>) -> Result<Vec<String>> {
        check_unique_ids(&tests)?;
        let validation = validate_origin(
            &self.translated,
            &tests,
            UnboundPolicy::Error,
            self.settings.var_cap,
        )?;
        self.tests = tests;
        self.report = None;
        Ok(validation.failed)
    }

    pub fn add_test(&mut self, test: TestCase) -> Result<Vec<String>> {
        let mut tests = self.tests.clone();
        tests.push(test);
        self.set_tests(tests)
    }

    /// Id for a test appended without one.
    pub fn next_test_id(&self) -> String {
        (self.tests.len() + 1..)
            .map(|i| format!("t{i}"))
            .find(|id| self.tests.iter().all(|t| &t.id != id))
            .expect("unbounded range")
    }

    pub fn evaluate(&mut self) -> &KillReport {
        let mut report = run_kill_analysis(
            self.base_form(),
            self.mutants.clone(),
            &self.tests,
            self.settings.var_cap,
        );
        report.translated = Some(self.translated.clone());
        self.report.insert(report)
    }

    /// Scene of the mutated form, styled by the report when one exists.
    pub fn scene(&self, grouping: GroupingMode) -> Result<SceneGraph> {
        let mutants = self
            .report
            .as_ref()
            .map_or(self.mutants.as_slice(), |r| r.mutants.as_slice());
        Ok(build_scene(
            self.base_form(),
            mutants,
            grouping,
            &self.settings.layout,
        )?)
    }

    /// Conventional-logic reading of the node at `path` of the mutated form.
    pub fn node_logic(&self, path: &NodePath) -> Result<String> {
        let logic = match self.base_form().node_at(path)? {
            NodeRef::Space(space) => to_logic(&Form {
                root: space.clone(),
            }),
            NodeRef::Item(item) => item_to_logic(item),
        };
        Ok(print_logic(&logic))
    }
}
