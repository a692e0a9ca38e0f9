//! Rewriting of forms towards a simpler equivalent.
//!
//! Spaces are normalized innermost-first. Within one space the rules below
//! are tried in order, each at its leftmost match, until none applies:
//!
//! | rule        | pattern                                   | result            |
//! |-------------|-------------------------------------------|-------------------|
//! | crossing    | item `(())`                               | removed           |
//! | reflexion   | item `((S))`                              | `S` spliced in    |
//! | integration | `()` among two or more items              | space is `()`     |
//! | iteration   | two equal siblings                        | later one removed |
//! | complement  | `X` and `(X)` as siblings                 | space is `()`     |
//! | occultation | `X` and `(.. (X) ..)` as siblings         | the mark removed  |
//!
//! Equality is taken modulo sibling order. Every rule removes at least one
//! item, so rewriting terminates. The result is equivalent to the input but
//! is not claimed to be a canonical minimal form.

use crate::form::{Form, Item, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Crossing,
    Reflexion,
    Integration,
    Iteration,
    Complement,
    Occultation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Rewrite {
    rule: Rule,
    at: usize,
}

pub fn simplify(form: &Form) -> Form {
    Form {
        root: simplify_space(&form.root),
    }
}

/// True when no rule applies anywhere in the form.
pub fn is_normal(form: &Form) -> bool {
    fn go(space: &Space) -> bool {
        find_rewrite(&space.items).is_none()
            && space.items.iter().all(|item| match item {
                Item::Mark(content) => go(content),
                Item::Atom(_) => true,
            })
    }
    go(&form.root)
}

fn simplify_space(space: &Space) -> Space {
    let mut items: Vec<Item> = space
        .items
        .iter()
        .map(|item| match item {
            Item::Mark(content) => Item::Mark(simplify_space(content)),
            atom => atom.clone(),
        })
        .collect();
    while let Some(rewrite) = find_rewrite(&items) {
        apply(rewrite, &mut items);
    }
    Space::new(items)
}

/// Content of a mark holding exactly one item.
fn sole_item(item: &Item) -> Option<&Item> {
    match item {
        Item::Mark(content) if content.items.len() == 1 => Some(&content.items[0]),
        _ => None,
    }
}

fn find_rewrite(items: &[Item]) -> Option<Rewrite> {
    let found = |rule, at| Some(Rewrite { rule, at });

    if let Some(at) = items
        .iter()
        .position(|item| sole_item(item).is_some_and(Item::is_empty_mark))
    {
        return found(Rule::Crossing, at);
    }
    if let Some(at) = items
        .iter()
        .position(|item| sole_item(item).is_some_and(Item::is_mark))
    {
        return found(Rule::Reflexion, at);
    }
    if items.len() >= 2 {
        if let Some(at) = items.iter().position(Item::is_empty_mark) {
            return found(Rule::Integration, at);
        }
    }

    let keys: Vec<String> = items.iter().map(Item::canonical_key).collect();
    if let Some(at) = (1..items.len()).find(|&j| keys[..j].contains(&keys[j])) {
        return found(Rule::Iteration, at);
    }
    for (j, item) in items.iter().enumerate() {
        if let Some(inner) = sole_item(item) {
            let inner_key = inner.canonical_key();
            if keys
                .iter()
                .enumerate()
                .any(|(i, k)| i != j && *k == inner_key)
            {
                return found(Rule::Complement, j);
            }
        }
    }
    for (j, item) in items.iter().enumerate() {
        let Item::Mark(content) = item else { continue };
        let hidden = content.items.iter().filter_map(sole_item).any(|x| {
            let key = x.canonical_key();
            keys.iter().enumerate().any(|(i, k)| i != j && *k == key)
        });
        if hidden {
            return found(Rule::Occultation, j);
        }
    }
    None
}

fn apply(rewrite: Rewrite, items: &mut Vec<Item>) {
    match rewrite.rule {
        Rule::Crossing | Rule::Iteration | Rule::Occultation => {
            items.remove(rewrite.at);
        }
        Rule::Reflexion => {
            let Item::Mark(outer) = items.remove(rewrite.at) else {
                unreachable!("reflexion matched a non-mark")
            };
            let Some(Item::Mark(inner)) = outer.items.into_iter().next() else {
                unreachable!("reflexion matched a mark without a sole mark")
            };
            items.splice(rewrite.at..rewrite.at, inner.items);
        }
        Rule::Integration | Rule::Complement => {
            items.clear();
            items.push(Item::empty_mark());
        }
    }
}
