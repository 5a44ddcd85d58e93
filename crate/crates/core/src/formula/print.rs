use std::sync::Arc;

use super::Formula;
use crate::action::ActionModel;

// Binding strength, loosest first.
const IFF: u8 = 0;
const IMP: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

/// Sugared reading of a primitive formula.
enum View<'a> {
    Bottom,
    Top,
    Atom(&'a str),
    Not(&'a Formula),
    And(&'a Formula, &'a Formula),
    Or(&'a Formula, &'a Formula),
    Imp(&'a Formula, &'a Formula),
    Iff(&'a Formula, &'a Formula),
    Box(&'a str, &'a Formula),
    Dia(&'a str, &'a Formula),
    Y(&'a Formula),
    YDia(&'a Formula),
    Update(&'a Arc<ActionModel>, &'a str, &'a Formula),
    UpdateDia(&'a Arc<ActionModel>, &'a str, &'a Formula),
}

fn as_imp(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Not(inner) = f {
        if let Formula::And(a, nb) = inner.as_ref() {
            if let Formula::Not(b) = nb.as_ref() {
                return Some((a, b));
            }
        }
    }
    None
}

fn view(f: &Formula) -> View<'_> {
    match f {
        Formula::Bottom => View::Bottom,
        Formula::Atom(p) => View::Atom(p),
        Formula::And(l, r) => {
            if let (Some((a, b)), Some((b2, a2))) = (as_imp(l), as_imp(r)) {
                if a == a2 && b == b2 {
                    return View::Iff(a, b);
                }
            }
            View::And(l, r)
        }
        Formula::Box(a, g) => View::Box(a, g),
        Formula::Yesterday(g) => View::Y(g),
        Formula::Update(u, s, g) => View::Update(u, s, g),
        Formula::Not(g) => match g.as_ref() {
            Formula::Bottom => View::Top,
            Formula::And(l, r) => match (l.as_ref(), r.as_ref()) {
                // `~a | b` and `a -> b` share a shape; keep sugar on the left operand
                (Formula::Not(a), Formula::Not(b)) if matches!(view(l), View::Not(_)) => {
                    View::Or(a, b)
                }
                (a, Formula::Not(b)) => View::Imp(a, b),
                _ => View::Not(g),
            },
            Formula::Box(a, h) => match h.as_ref() {
                Formula::Not(k) => View::Dia(a, k),
                _ => View::Not(g),
            },
            Formula::Yesterday(h) => match h.as_ref() {
                Formula::Not(k) => View::YDia(k),
                _ => View::Not(g),
            },
            Formula::Update(u, s, h) => match h.as_ref() {
                Formula::Not(k) => View::UpdateDia(u, s, k),
                _ => View::Not(g),
            },
            _ => View::Not(g),
        },
    }
}

fn write(f: &Formula, ctx: u8, out: &mut String) {
    let v = view(f);
    let own = match v {
        View::Iff(..) => IFF,
        View::Imp(..) => IMP,
        View::Or(..) => OR,
        View::And(..) => AND,
        _ => UNARY,
    };
    let paren = own < ctx;
    if paren {
        out.push('(');
    }
    match v {
        View::Bottom => out.push_str("false"),
        View::Top => out.push_str("true"),
        View::Atom(p) => out.push_str(p),
        View::Not(g) => {
            out.push('~');
            write(g, UNARY, out);
        }
        View::And(a, b) => binary(a, " & ", b, AND, UNARY, out),
        View::Or(a, b) => binary(a, " | ", b, OR, AND, out),
        View::Imp(a, b) => binary(a, " -> ", b, OR, IMP, out),
        View::Iff(a, b) => binary(a, " <-> ", b, IFF, IMP, out),
        View::Box(a, g) => prefixed("[", a, "]", g, out),
        View::Dia(a, g) => prefixed("<", a, ">", g, out),
        View::Y(g) => prefixed("[", "Y", "]", g, out),
        View::YDia(g) => prefixed("<", "Y", ">", g, out),
        View::Update(u, s, g) => prefixed("[", &format!("{}@{}", u.name(), s), "]", g, out),
        View::UpdateDia(u, s, g) => prefixed("<", &format!("{}@{}", u.name(), s), ">", g, out),
    }
    if paren {
        out.push(')');
    }
}

fn binary(a: &Formula, op: &str, b: &Formula, left: u8, right: u8, out: &mut String) {
    write(a, left, out);
    out.push_str(op);
    write(b, right, out);
}

fn prefixed(open: &str, label: &str, close: &str, body: &Formula, out: &mut String) {
    out.push_str(open);
    out.push_str(label);
    out.push_str(close);
    write(body, UNARY, out);
}

/// Prints a formula in the concrete syntax, recovering derived connectives.
pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    write(f, IFF, &mut out);
    out
}
