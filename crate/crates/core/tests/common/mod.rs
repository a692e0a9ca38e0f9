//! Test-side oracles and seeded generators shared by the integration suites.
//! The evaluators here never call into the library's own semantics.
#![allow(dead_code)]

use std::collections::BTreeSet;

use formt::{Assignment, Form, Item, LogicExpr, Space};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ATOMS: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn eval_logic(expr: &LogicExpr, env: &Assignment) -> bool {
    match expr {
        LogicExpr::Atom(name) => *env
            .get(name)
            .unwrap_or_else(|| panic!("oracle: unbound {name}")),
        LogicExpr::Const(value) => *value,
        LogicExpr::Not(inner) => !eval_logic(inner, env),
        LogicExpr::And(items) => items.iter().fold(true, |acc, e| acc & eval_logic(e, env)),
        LogicExpr::Or(items) => items.iter().fold(false, |acc, e| acc | eval_logic(e, env)),
        LogicExpr::Implies(a, b) => !eval_logic(a, env) | eval_logic(b, env),
        LogicExpr::ForallImplies {
            antecedent,
            consequent,
            ..
        } => !eval_logic(antecedent, env) | eval_logic(consequent, env),
    }
}

/// A space is true when any item is; a mark inverts its content.
pub fn eval_space(space: &Space, env: &Assignment) -> bool {
    let mut any = false;
    for item in &space.items {
        any |= match item {
            Item::Atom(name) => *env
                .get(name)
                .unwrap_or_else(|| panic!("oracle: unbound {name}")),
            Item::Mark(inner) => !eval_space(inner, env),
        };
    }
    any
}

pub fn eval_form(form: &Form, env: &Assignment) -> bool {
    eval_space(&form.root, env)
}

pub fn logic_atoms(expr: &LogicExpr, out: &mut BTreeSet<String>) {
    match expr {
        LogicExpr::Atom(name) => {
            out.insert(name.clone());
        }
        LogicExpr::Const(_) => {}
        LogicExpr::Not(inner) => logic_atoms(inner, out),
        LogicExpr::And(items) | LogicExpr::Or(items) => {
            items.iter().for_each(|e| logic_atoms(e, out))
        }
        LogicExpr::Implies(a, b)
        | LogicExpr::ForallImplies {
            antecedent: a,
            consequent: b,
            ..
        } => {
            logic_atoms(a, out);
            logic_atoms(b, out);
        }
    }
}

pub fn form_atoms(space: &Space, out: &mut BTreeSet<String>) {
    for item in &space.items {
        match item {
            Item::Atom(name) => {
                out.insert(name.clone());
            }
            Item::Mark(inner) => form_atoms(inner, out),
        }
    }
}

/// Every total assignment over `vars`, counting in binary.
pub fn assignments(vars: &BTreeSet<String>) -> impl Iterator<Item = Assignment> + '_ {
    let n = vars.len();
    assert!(n < 24, "oracle enumeration too large");
    (0u32..1 << n).map(move |bits| {
        vars.iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), bits >> i & 1 == 1))
            .collect()
    })
}

/// Truth-table comparison of two forms over the union of their atoms.
pub fn same_function(f: &Form, g: &Form) -> bool {
    let mut vars = BTreeSet::new();
    form_atoms(&f.root, &mut vars);
    form_atoms(&g.root, &mut vars);
    let same = assignments(&vars).all(|env| eval_form(f, &env) == eval_form(g, &env));
    same
}

/// Sorted rendering, so that sibling order does not matter.
pub fn unordered_key(space: &Space) -> String {
    let mut keys: Vec<String> = space
        .items
        .iter()
        .map(|item| match item {
            Item::Atom(name) => format!("a:{name}"),
            Item::Mark(inner) => format!("[{}]", unordered_key(inner)),
        })
        .collect();
    keys.sort();
    keys.join(",")
}

/// Random propositional expression over the first `atoms` names, at most `depth` deep.
pub fn random_logic<R: Rng>(rng: &mut R, atoms: usize, depth: usize) -> LogicExpr {
    if depth == 0 || rng.random_bool(0.25) {
        return if rng.random_bool(0.05) {
            LogicExpr::Const(rng.random_bool(0.5))
        } else {
            LogicExpr::atom(ATOMS[rng.random_range(0..atoms)])
        };
    }
    let d = depth - 1;
    match rng.random_range(0..4) {
        0 => LogicExpr::negate(random_logic(rng, atoms, d)),
        1 => LogicExpr::And(
            (0..rng.random_range(2..4))
                .map(|_| random_logic(rng, atoms, d))
                .collect(),
        ),
        2 => LogicExpr::Or(
            (0..rng.random_range(2..4))
                .map(|_| random_logic(rng, atoms, d))
                .collect(),
        ),
        _ => {
            let a = random_logic(rng, atoms, d);
            LogicExpr::implies(a, random_logic(rng, atoms, d))
        }
    }
}

/// Random form with at most `budget` nodes over the first `vars` atom names.
pub fn random_form<R: Rng>(rng: &mut R, vars: usize, budget: usize) -> Form {
    let mut left = budget.max(1);
    let root = random_space(rng, vars, &mut left, 0);
    Form { root }
}

fn random_space<R: Rng>(rng: &mut R, vars: usize, left: &mut usize, depth: usize) -> Space {
    let width = rng.random_range(0..=4usize);
    let mut items = Vec::new();
    for _ in 0..width {
        if *left == 0 {
            break;
        }
        *left -= 1;
        if depth < 7 && rng.random_bool(0.45) {
            items.push(Item::Mark(random_space(rng, vars, left, depth + 1)));
        } else {
            items.push(Item::atom(ATOMS[rng.random_range(0..vars)]));
        }
    }
    Space { items }
}

/// Geometry contract of a scene, recomputed from the shapes alone: every
/// shape sits at least `pad` inside its parent, siblings are disjoint, and
/// rings strictly enclose their target. Returns the first violation.
pub fn scene_violation(scene: &formt::SceneGraph, pad: f64) -> Option<String> {
    use formt::layout::{Geometry, ShapeKind};
    use std::collections::BTreeMap;

    let inside = |outer: &Geometry, inner: &Geometry, by: f64| {
        inner.x - outer.x >= by - 1e-9
            && inner.y - outer.y >= by - 1e-9
            && (outer.x + outer.width) - (inner.x + inner.width) >= by - 1e-9
            && (outer.y + outer.height) - (inner.y + inner.height) >= by - 1e-9
    };
    let disjoint = |a: &Geometry, b: &Geometry| {
        a.x + a.width <= b.x
            || b.x + b.width <= a.x
            || a.y + a.height <= b.y
            || b.y + b.height <= a.y
    };

    let mut frame = None;
    let mut core = BTreeMap::new();
    let mut ring = BTreeMap::new();
    for shape in &scene.shapes {
        match shape.kind {
            ShapeKind::RootFrame => frame = Some(shape.geometry),
            ShapeKind::WrapAnnotation => {
                ring.insert(shape.path.0.clone(), shape.geometry);
            }
            _ => {
                core.insert(shape.path.0.clone(), shape.geometry);
            }
        }
    }
    let frame = match frame {
        Some(f) => f,
        None => return Some("no root frame".into()),
    };
    let outer = |p: &Vec<usize>| ring.get(p).or_else(|| core.get(p)).copied();

    for (path, geometry) in &core {
        let parent = &path[..path.len() - 1];
        let container = if parent.is_empty() {
            frame
        } else {
            core[parent]
        };
        let extent = outer(path).unwrap();
        if !inside(&container, geometry, pad) || !inside(&container, &extent, pad) {
            return Some(format!("{path:?} escapes its container"));
        }
        if let Some(r) = ring.get(path) {
            if !inside(r, geometry, 1e-6) {
                return Some(format!("ring at {path:?} does not enclose its target"));
            }
        }
    }
    if let Some(r) = ring.get(&Vec::new()) {
        for (path, _) in core.iter().filter(|(p, _)| p.len() == 1) {
            if !inside(r, &outer(path).unwrap(), 0.0) {
                return Some(format!("root ring misses {path:?}"));
            }
        }
    }
    let paths: Vec<&Vec<usize>> = core.keys().collect();
    for (i, a) in paths.iter().enumerate() {
        for b in &paths[i + 1..] {
            if a.len() == b.len() && a[..a.len() - 1] == b[..b.len() - 1] {
                let (ga, gb) = (outer(a).unwrap(), outer(b).unwrap());
                if !disjoint(&ga, &gb) {
                    return Some(format!("siblings {a:?} and {b:?} overlap"));
                }
            }
        }
    }
    None
}

/// Random form with exactly `items` non-root nodes, grown by inserting each
/// new atom or mark at a random position of a random space.
pub fn random_form_sized<R: Rng>(rng: &mut R, vars: usize, items: usize) -> Form {
    let mut root = Space::default();
    for _ in 0..items {
        let spaces = count_spaces(&root);
        let target = rng.random_range(0..spaces);
        let item = if rng.random_bool(0.4) {
            Item::Mark(Space::default())
        } else {
            Item::atom(ATOMS[rng.random_range(0..vars)])
        };
        insert_into(&mut root, &mut { target }, item, rng);
    }
    Form { root }
}

fn count_spaces(space: &Space) -> usize {
    1 + space
        .items
        .iter()
        .map(|item| match item {
            Item::Mark(inner) => count_spaces(inner),
            Item::Atom(_) => 0,
        })
        .sum::<usize>()
}

fn insert_into<R: Rng>(
    space: &mut Space,
    target: &mut usize,
    item: Item,
    rng: &mut R,
) -> Option<Item> {
    if *target == 0 {
        let at = rng.random_range(0..=space.items.len());
        space.items.insert(at, item);
        return None;
    }
    *target -= 1;
    let mut item = Some(item);
    for child in &mut space.items {
        if let Item::Mark(inner) = child {
            item = insert_into(inner, target, item.take()?, rng);
            item.as_ref()?;
        }
    }
    item
}
