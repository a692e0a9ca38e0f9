//! Forms of the calculus of indications.
//!
//! A [`Space`] is an ordered sequence of [`Item`]s; an item is an atom or a
//! mark containing another space. A space denotes the disjunction of its
//! items (the empty space is false) and a mark negates its content, so `()`
//! is true.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Possibly partial binding of atom names to truth values.
pub type Assignment = BTreeMap<String, bool>;

pub const DEFAULT_VAR_CAP: usize = 20;
pub const VAR_CAP_ENV: &str = "FORMT_VAR_CAP";

/// Variable cap for exhaustive equivalence, from `FORMT_VAR_CAP` when set.
pub fn default_var_cap() -> usize {
    std::env::var(VAR_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_VAR_CAP)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("unbalanced bracket at position {position}")]
    UnbalancedBracket { position: usize },
    #[error("bad atom `{text}` at position {position}")]
    BadAtom { position: usize, text: String },
    #[error("unbound variables: {}", .0.join(", "))]
    UnboundVariable(Vec<String>),
    #[error("{count} variables exceed the equivalence cap of {cap}")]
    TooManyVariables { count: usize, cap: usize },
    #[error("invalid node path `{0}`")]
    InvalidPath(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Space {
    pub items: Vec<Item>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Item {
    Atom(String),
    Mark(Space),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Form {
    pub root: Space,
}

impl Space {
    pub fn new(items: Vec<Item>) -> Self {
        Space { items }
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    /// Number of items in this space and all nested spaces.
    pub fn node_count(&self) -> usize {
        self.items.iter().map(Item::node_count).sum()
    }

    pub fn mark_count(&self) -> usize {
        self.items.iter().map(Item::mark_count).sum()
    }

    pub fn depth(&self) -> usize {
        self.items.iter().map(Item::depth).max().unwrap_or(0)
    }

    fn collect_variables(&self, out: &mut BTreeSet<String>) {
        for item in &self.items {
            match item {
                Item::Atom(name) => {
                    out.insert(name.clone());
                }
                Item::Mark(content) => content.collect_variables(out),
            }
        }
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    /// Order-independent key: equal keys iff the spaces are equal up to
    /// permutation of siblings at every level.
    pub fn canonical_key(&self) -> String {
        let mut keys: Vec<String> = self.items.iter().map(Item::canonical_key).collect();
        keys.sort();
        keys.concat()
    }

    fn eval_bound(&self, assignment: &Assignment) -> bool {
        self.items.iter().any(|item| item.eval_bound(assignment))
    }
}

impl Item {
    pub fn atom(name: impl Into<String>) -> Self {
        Item::Atom(name.into())
    }

    pub fn mark(items: Vec<Item>) -> Self {
        Item::Mark(Space::new(items))
    }

    pub fn empty_mark() -> Self {
        Item::Mark(Space::default())
    }

    pub fn is_mark(&self) -> bool {
        matches!(self, Item::Mark(_))
    }

    pub fn is_empty_mark(&self) -> bool {
        matches!(self, Item::Mark(s) if s.is_empty())
    }

    pub fn node_count(&self) -> usize {
        match self {
            Item::Atom(_) => 1,
            Item::Mark(content) => 1 + content.node_count(),
        }
    }

    pub fn mark_count(&self) -> usize {
        match self {
            Item::Atom(_) => 0,
            Item::Mark(content) => 1 + content.mark_count(),
        }
    }

    /// Nesting depth: 0 for an atom, 1 + content depth for a mark.
    pub fn depth(&self) -> usize {
        match self {
            Item::Atom(_) => 0,
            Item::Mark(content) => 1 + content.depth(),
        }
    }

    /// Leaves of the subtree; an empty mark counts as one leaf.
    pub fn leaf_count(&self) -> usize {
        match self {
            Item::Atom(_) => 1,
            Item::Mark(content) => content
                .items
                .iter()
                .map(Item::leaf_count)
                .sum::<usize>()
                .max(1),
        }
    }

    pub fn canonical_key(&self) -> String {
        match self {
            Item::Atom(name) => format!("{name} "),
            Item::Mark(content) => format!("({})", content.canonical_key()),
        }
    }

    fn eval_bound(&self, assignment: &Assignment) -> bool {
        match self {
            Item::Atom(name) => assignment[name],
            Item::Mark(content) => !content.eval_bound(assignment),
        }
    }
}

impl Form {
    pub fn new(items: Vec<Item>) -> Self {
        Form {
            root: Space::new(items),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    pub fn mark_count(&self) -> usize {
        self.root.mark_count()
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.root.variables()
    }

    pub fn canonical_key(&self) -> String {
        self.root.canonical_key()
    }

    /// Equal up to sibling permutation at every level.
    pub fn equal_modulo_order(&self, other: &Form) -> bool {
        self.canonical_key() == other.canonical_key()
    }

    /// Truth value under an assignment binding every variable.
    pub fn eval(&self, assignment: &Assignment) -> Result<bool, FormError> {
        let missing: Vec<String> = self
            .variables()
            .into_iter()
            .filter(|v| !assignment.contains_key(v))
            .collect();
        if !missing.is_empty() {
            return Err(FormError::UnboundVariable(missing));
        }
        Ok(self.root.eval_bound(assignment))
    }

    /// Replaces atoms bound to true with `()` and deletes atoms bound to false.
    pub fn substitute(&self, assignment: &Assignment) -> Form {
        fn go(space: &Space, assignment: &Assignment) -> Space {
            let items = space
                .items
                .iter()
                .filter_map(|item| match item {
                    Item::Atom(name) => match assignment.get(name) {
                        Some(true) => Some(Item::empty_mark()),
                        Some(false) => None,
                        None => Some(item.clone()),
                    },
                    Item::Mark(content) => Some(Item::Mark(go(content, assignment))),
                })
                .collect();
            Space::new(items)
        }
        Form {
            root: go(&self.root, assignment),
        }
    }

    pub fn node_at(&self, path: &NodePath) -> Result<NodeRef<'_>, FormError> {
        let mut space = &self.root;
        let mut node = NodeRef::Space(space);
        for (depth, &index) in path.0.iter().enumerate() {
            if depth > 0 {
                match node {
                    NodeRef::Item(Item::Mark(content)) => space = content,
                    _ => return Err(FormError::InvalidPath(path.to_string())),
                }
            }
            let item = space
                .items
                .get(index)
                .ok_or_else(|| FormError::InvalidPath(path.to_string()))?;
            node = NodeRef::Item(item);
        }
        Ok(node)
    }

    /// The space directly containing the item at `path`, with the item's index.
    pub fn parent_mut(&mut self, path: &NodePath) -> Result<(&mut Space, usize), FormError> {
        let invalid = || FormError::InvalidPath(path.to_string());
        let (&last, prefix) = path.0.split_last().ok_or_else(invalid)?;
        let mut space = &mut self.root;
        for &index in prefix {
            match space.items.get_mut(index) {
                Some(Item::Mark(content)) => space = content,
                _ => return Err(invalid()),
            }
        }
        if last >= space.items.len() {
            return Err(invalid());
        }
        Ok((space, last))
    }

    /// Root first, then items in pre-order document order.
    pub fn enumerate_nodes(&self) -> Vec<(NodePath, NodeKind)> {
        fn go(space: &Space, prefix: &mut Vec<usize>, out: &mut Vec<(NodePath, NodeKind)>) {
            for (i, item) in space.items.iter().enumerate() {
                prefix.push(i);
                match item {
                    Item::Atom(_) => out.push((NodePath(prefix.clone()), NodeKind::Atom)),
                    Item::Mark(content) => {
                        out.push((NodePath(prefix.clone()), NodeKind::Mark));
                        go(content, prefix, out);
                    }
                }
                prefix.pop();
            }
        }
        let mut out = vec![(NodePath::root(), NodeKind::Root)];
        go(&self.root, &mut Vec::new(), &mut out);
        out
    }

    /// Compact rendering without separators, e.g. `(qs)pr`.
    /// `None` when some atom is longer than one character.
    pub fn to_compact_string(&self) -> Option<String> {
        fn go(space: &Space, out: &mut String) -> bool {
            for item in &space.items {
                match item {
                    Item::Atom(name) if name.chars().count() == 1 => out.push_str(name),
                    Item::Atom(_) => return false,
                    Item::Mark(content) => {
                        out.push('(');
                        if !go(content, out) {
                            return false;
                        }
                        out.push(')');
                    }
                }
            }
            true
        }
        let mut out = String::new();
        go(&self.root, &mut out).then_some(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRef<'a> {
    Space(&'a Space),
    Item(&'a Item),
}

impl NodeRef<'_> {
    /// The node as a standalone form.
    pub fn to_form(&self) -> Form {
        match self {
            NodeRef::Space(space) => Form {
                root: (*space).clone(),
            },
            NodeRef::Item(item) => Form::new(vec![(*item).clone()]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum NodeKind {
    Root,
    Mark,
    Atom,
}

/// Child positions from the root space. The empty path is the root; a mark
/// and its content space share a path.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, index: usize) -> Self {
        let mut indices = self.0.clone();
        indices.push(index);
        NodePath(indices)
    }

    pub fn parent(&self) -> Option<Self> {
        self.0
            .split_last()
            .map(|(_, prefix)| NodePath(prefix.to_vec()))
    }

    pub fn is_ancestor_of(&self, other: &NodePath) -> bool {
        other.0.len() > self.0.len() && other.0.starts_with(&self.0)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, index) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{index}")?;
        }
        Ok(())
    }
}

impl FromStr for NodePath {
    type Err = FormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "root" || s.is_empty() {
            return Ok(NodePath::root());
        }
        s.split('.')
            .map(|part| part.parse::<usize>())
            .collect::<Result<Vec<_>, _>>()
            .map(NodePath)
            .map_err(|_| FormError::InvalidPath(s.to_string()))
    }
}

impl Serialize for NodePath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodePath {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.items.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{item}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Atom(name) => f.write_str(name),
            Item::Mark(content) => write!(f, "({content})"),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

pub fn print_form(form: &Form) -> String {
    form.to_string()
}

impl Serialize for Form {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Form {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_form(&text, AtomSyntax::Identifiers).map_err(serde::de::Error::custom)
    }
}

/// How atom names are delimited in form text.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum AtomSyntax {
    /// `[A-Za-z_][A-Za-z0-9_]*`, separated by whitespace or brackets.
    #[default]
    Identifiers,
    /// Every letter is its own atom, so `(qs)pr` has four atoms.
    SingleLetter,
}

pub fn parse_form(text: &str, syntax: AtomSyntax) -> Result<Form, FormError> {
    let chars: Vec<char> = text.chars().collect();
    let mut stack: Vec<(usize, Vec<Item>)> = Vec::new();
    let mut current: Vec<Item> = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            '(' => {
                stack.push((i, std::mem::take(&mut current)));
                i += 1;
            }
            ')' => {
                let (_, mut outer) = stack
                    .pop()
                    .ok_or(FormError::UnbalancedBracket { position: i })?;
                outer.push(Item::Mark(Space::new(std::mem::take(&mut current))));
                current = outer;
                i += 1;
            }
            c if c.is_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < chars.len()
                    && !chars[i].is_whitespace()
                    && chars[i] != '('
                    && chars[i] != ')'
                {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match syntax {
                    AtomSyntax::Identifiers => {
                        if !is_identifier(&word) {
                            return Err(FormError::BadAtom {
                                position: start,
                                text: word,
                            });
                        }
                        current.push(Item::Atom(word));
                    }
                    AtomSyntax::SingleLetter => {
                        for (offset, letter) in word.chars().enumerate() {
                            if !letter.is_ascii_alphabetic() {
                                return Err(FormError::BadAtom {
                                    position: start + offset,
                                    text: letter.to_string(),
                                });
                            }
                            current.push(Item::Atom(letter.to_string()));
                        }
                    }
                }
            }
        }
    }
    if let Some((position, _)) = stack.pop() {
        return Err(FormError::UnbalancedBracket { position });
    }
    Ok(Form::new(current))
}

fn is_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Exhaustive equivalence over the union of both forms' variables.
pub fn equivalent(f: &Form, g: &Form, var_cap: usize) -> Result<bool, FormError> {
    let mut vars = f.variables();
    vars.extend(g.variables());
    if vars.len() > var_cap {
        return Err(FormError::TooManyVariables {
            count: vars.len(),
            cap: var_cap,
        });
    }
    let index: BTreeMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();
    let fc = Compiled::new(&f.root, &index);
    let gc = Compiled::new(&g.root, &index);
    Ok(truth_table_blocks(vars.len())
        .all(|(lanes, valid)| (fc.eval(&lanes) ^ gc.eval(&lanes)) & valid == 0))
}

/// Space with atoms replaced by variable indices, evaluated 64 assignments at
/// a time.
enum Compiled {
    Var(usize),
    Mark(Vec<Compiled>),
}

impl Compiled {
    fn new(space: &Space, index: &BTreeMap<&str, usize>) -> Self {
        Compiled::Mark(
            space
                .items
                .iter()
                .map(|item| Self::item(item, index))
                .collect(),
        )
    }

    fn item(item: &Item, index: &BTreeMap<&str, usize>) -> Self {
        match item {
            Item::Atom(name) => Compiled::Var(index[name.as_str()]),
            Item::Mark(content) => Self::new(content, index),
        }
    }

    /// Bitwise value of the space (the root) under the given variable lanes.
    fn eval(&self, lanes: &[u64]) -> u64 {
        match self {
            Compiled::Mark(items) => items
                .iter()
                .fold(0, |acc, item| acc | item.eval_item(lanes)),
            Compiled::Var(v) => lanes[*v],
        }
    }

    fn eval_item(&self, lanes: &[u64]) -> u64 {
        match self {
            Compiled::Var(v) => lanes[*v],
            Compiled::Mark(_) => !self.eval(lanes),
        }
    }
}

const LANE_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Blocks of 64 truth-table rows: per-variable bit lanes and the mask of
/// rows that exist.
fn truth_table_blocks(vars: usize) -> impl Iterator<Item = (Vec<u64>, u64)> {
    let low = vars.min(6);
    let valid = if low == 6 {
        u64::MAX
    } else {
        (1u64 << (1 << low)) - 1
    };
    let blocks: u64 = 1 << vars.saturating_sub(6);
    (0..blocks).map(move |block| {
        let lanes = (0..vars)
            .map(|v| {
                if v < 6 {
                    LANE_PATTERNS[v]
                } else if block >> (v - 6) & 1 == 1 {
                    u64::MAX
                } else {
                    0
                }
            })
            .collect();
        (lanes, valid)
    })
}
