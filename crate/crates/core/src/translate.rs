//! Translation between conventional logic and forms.

use crate::form::{Form, Item, Space};
use crate::logic::LogicExpr;

/// Logic to form: `not b` is `(b)`, disjunction is juxtaposition,
/// `a and b` is `((a)(b))` (generalized to n conjuncts) and `a -> b` is
/// `(a) b`. Universal implications translate like plain implications with
/// predicate names as atoms.
pub fn to_form(expr: &LogicExpr) -> Form {
    Form::new(translate(expr))
}

fn translate(expr: &LogicExpr) -> Vec<Item> {
    match expr {
        LogicExpr::Atom(name) => vec![Item::atom(name.clone())],
        LogicExpr::Const(true) => vec![Item::empty_mark()],
        LogicExpr::Const(false) => Vec::new(),
        LogicExpr::Not(inner) => vec![Item::mark(translate(inner))],
        LogicExpr::Or(disjuncts) => disjuncts.iter().flat_map(translate).collect(),
        LogicExpr::And(conjuncts) => vec![Item::mark(
            conjuncts.iter().map(|c| Item::mark(translate(c))).collect(),
        )],
        LogicExpr::Implies(antecedent, consequent)
        | LogicExpr::ForallImplies {
            antecedent,
            consequent,
            ..
        } => {
            let mut items = vec![Item::mark(translate(antecedent))];
            items.extend(translate(consequent));
            items
        }
    }
}

/// Form to logic using disjunction, negation and the `((a)(b))` conjunction
/// pattern. The empty space reads as `false` and `()` as `true`.
pub fn to_logic(form: &Form) -> LogicExpr {
    space_to_logic(&form.root)
}

fn space_to_logic(space: &Space) -> LogicExpr {
    match space.items.as_slice() {
        [] => LogicExpr::Const(false),
        [item] => item_to_logic(item),
        items => LogicExpr::Or(items.iter().map(item_to_logic).collect()),
    }
}

pub fn item_to_logic(item: &Item) -> LogicExpr {
    match item {
        Item::Atom(name) => LogicExpr::Atom(name.clone()),
        Item::Mark(content) if content.is_empty() => LogicExpr::Const(true),
        Item::Mark(content)
            if content.items.len() >= 2 && content.items.iter().all(Item::is_mark) =>
        {
            LogicExpr::And(
                content
                    .items
                    .iter()
                    .map(|conjunct| match conjunct {
                        Item::Mark(inner) => space_to_logic(inner),
                        Item::Atom(_) => unreachable!(),
                    })
                    .collect(),
            )
        }
        Item::Mark(content) => LogicExpr::negate(space_to_logic(content)),
    }
}
