//! Formulas of dynamic epistemic temporal logic.
//!
//! The primitive connectives are falsum, atoms, negation, conjunction, the
//! agent boxes `[a]`, the yesterday box `[Y]` and the update modality
//! `[U@s]`. Everything else (`true`, `|`, `->`, `<->`, diamonds) is sugar
//! that expands to these constructors at parse time and is recovered by the
//! printer.

mod parse;
mod print;

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::action::ActionModel;
use crate::error::{Error, Result};

pub use parse::{parse, ActionRegistry};
pub use print::print;

/// The reserved event name adjoined by the YDEL update and the sharp translation.
pub const FLAT: &str = "♭";

/// Separator used in composite product world names (`base|event`).
pub const PAIR_SEPARATOR: char = '|';

const RESERVED_WORDS: [&str; 3] = ["Y", "true", "false"];

/// Checks the identifier grammar `[A-Za-z_][A-Za-z0-9_]*`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Identifier usable for an agent, atom, action or event name.
pub fn is_user_identifier(s: &str) -> bool {
    is_identifier(s) && !RESERVED_WORDS.contains(&s)
}

/// Agents and atoms shared by every model, action and formula of a workspace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    agents: BTreeSet<String>,
    atoms: BTreeSet<String>,
}

impl Signature {
    pub fn new<A, P>(agents: A, atoms: P) -> Result<Self>
    where
        A: IntoIterator,
        A::Item: Into<String>,
        P: IntoIterator,
        P::Item: Into<String>,
    {
        let agents: BTreeSet<String> = agents.into_iter().map(Into::into).collect();
        let atoms: BTreeSet<String> = atoms.into_iter().map(Into::into).collect();
        if agents.is_empty() {
            return Err(Error::InvalidSignature("the agent set is empty".into()));
        }
        for name in agents.iter().chain(atoms.iter()) {
            if !is_user_identifier(name) {
                return Err(Error::InvalidIdentifier(name.clone()));
            }
        }
        if let Some(both) = agents.intersection(&atoms).next() {
            return Err(Error::InvalidSignature(format!(
                "`{both}` is both an agent and an atom"
            )));
        }
        Ok(Signature { agents, atoms })
    }

    pub fn agents(&self) -> impl Iterator<Item = &str> + '_ {
        self.agents.iter().map(String::as_str)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> + '_ {
        self.atoms.iter().map(String::as_str)
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn has_agent(&self, a: &str) -> bool {
        self.agents.contains(a)
    }

    pub fn has_atom(&self, p: &str) -> bool {
        self.atoms.contains(p)
    }

    /// True when every agent and atom of `other` is declared here and the
    /// agent sets coincide.
    pub fn admits(&self, other: &Signature) -> bool {
        self.agents == other.agents && other.atoms.is_subset(&self.atoms)
    }
}

/// A formula. Update nodes carry the full action model, so a formula is
/// meaningful without any registry.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Bottom,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Box(String, Box<Formula>),
    Yesterday(Box<Formula>),
    Update(Arc<ActionModel>, String, Box<Formula>),
}

impl Formula {
    pub fn atom(p: impl Into<String>) -> Formula {
        Formula::Atom(p.into())
    }

    pub fn top() -> Formula {
        Formula::Not(Box::new(Formula::Bottom))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        )
    }

    pub fn boxed(agent: impl Into<String>, f: Formula) -> Formula {
        Formula::Box(agent.into(), Box::new(f))
    }

    pub fn diamond(agent: impl Into<String>, f: Formula) -> Formula {
        Formula::not(Formula::boxed(agent, Formula::not(f)))
    }

    pub fn yesterday(f: Formula) -> Formula {
        Formula::Yesterday(Box::new(f))
    }

    pub fn yesterday_diamond(f: Formula) -> Formula {
        Formula::not(Formula::yesterday(Formula::not(f)))
    }

    pub fn update(action: Arc<ActionModel>, event: impl Into<String>, f: Formula) -> Formula {
        Formula::Update(action, event.into(), Box::new(f))
    }

    pub fn update_diamond(action: Arc<ActionModel>, event: impl Into<String>, f: Formula) -> Formula {
        Formula::not(Formula::update(action, event, Formula::not(f)))
    }

    /// Conjunction of a list; the empty conjunction is `true`.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut items = items.into_iter();
        match items.next() {
            None => Formula::top(),
            Some(first) => items.fold(first, Formula::and),
        }
    }

    /// True when no update modality occurs (the action-free fragment).
    pub fn is_action_free(&self) -> bool {
        match self {
            Formula::Bottom | Formula::Atom(_) => true,
            Formula::Not(f) | Formula::Box(_, f) | Formula::Yesterday(f) => f.is_action_free(),
            Formula::And(a, b) => a.is_action_free() && b.is_action_free(),
            Formula::Update(..) => false,
        }
    }

    /// Number of update nodes, not counting those inside preconditions.
    pub fn update_count(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Atom(_) => 0,
            Formula::Not(f) | Formula::Box(_, f) | Formula::Yesterday(f) => f.update_count(),
            Formula::And(a, b) => a.update_count() + b.update_count(),
            Formula::Update(_, _, f) => 1 + f.update_count(),
        }
    }

    /// Number of syntax nodes, not counting preconditions.
    pub fn size(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Box(_, f) | Formula::Yesterday(f) | Formula::Update(_, _, f) => {
                1 + f.size()
            }
            Formula::And(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Nesting depth of agent and yesterday boxes.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Bottom | Formula::Atom(_) => 0,
            Formula::Not(f) | Formula::Update(_, _, f) => f.modal_depth(),
            Formula::Box(_, f) | Formula::Yesterday(f) => 1 + f.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
        }
    }

    /// Immediate subformulas, preconditions excluded.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Bottom | Formula::Atom(_) => vec![],
            Formula::Not(f) | Formula::Box(_, f) | Formula::Yesterday(f) | Formula::Update(_, _, f) => {
                vec![f]
            }
            Formula::And(a, b) => vec![a, b],
        }
    }

    /// Every action model occurring in the formula, including those nested
    /// inside preconditions. Each distinct model is reported once.
    pub fn actions(&self) -> Vec<Arc<ActionModel>> {
        let mut seen: HashSet<*const ActionModel> = HashSet::new();
        let mut out = Vec::new();
        collect_actions(self, &mut seen, &mut out);
        out
    }

    /// Checks every agent and atom (including inside preconditions) against `sig`.
    pub fn check_signature(&self, sig: &Signature) -> Result<()> {
        match self {
            Formula::Bottom => Ok(()),
            Formula::Atom(p) => {
                if sig.has_atom(p) {
                    Ok(())
                } else {
                    Err(Error::UnknownAtom(p.clone()))
                }
            }
            Formula::Not(f) | Formula::Yesterday(f) => f.check_signature(sig),
            Formula::And(a, b) => {
                a.check_signature(sig)?;
                b.check_signature(sig)
            }
            Formula::Box(a, f) => {
                if !sig.has_agent(a) {
                    return Err(Error::UnknownAgent(a.clone()));
                }
                f.check_signature(sig)
            }
            Formula::Update(u, _, f) => {
                if !sig.admits(u.signature()) {
                    return Err(Error::SignatureMismatch(format!(
                        "action `{}` has a different signature",
                        u.name()
                    )));
                }
                f.check_signature(sig)
            }
        }
    }
}

fn collect_actions(
    f: &Formula,
    seen: &mut HashSet<*const ActionModel>,
    out: &mut Vec<Arc<ActionModel>>,
) {
    match f {
        Formula::Bottom | Formula::Atom(_) => {}
        Formula::Not(g) | Formula::Box(_, g) | Formula::Yesterday(g) => collect_actions(g, seen, out),
        Formula::And(a, b) => {
            collect_actions(a, seen, out);
            collect_actions(b, seen, out);
        }
        Formula::Update(u, _, g) => {
            if seen.insert(Arc::as_ptr(u)) {
                for pre in u.preconditions() {
                    collect_actions(pre, seen, out);
                }
                out.push(u.clone());
            }
            collect_actions(g, seen, out);
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}

/// True iff no action model occurring in `f` (recursively through
/// preconditions) has a yesterday arrow. `[Y]` in `f` itself is allowed.
pub fn is_atemporal(f: &Formula) -> bool {
    f.actions().iter().all(|u| u.is_atemporal())
}

/// Nesting depth of `[Y]` in an action-free formula; agent boxes are transparent.
pub fn y_nesting_depth(f: &Formula) -> Result<usize> {
    Ok(match f {
        Formula::Bottom | Formula::Atom(_) => 0,
        Formula::Not(g) | Formula::Box(_, g) => y_nesting_depth(g)?,
        Formula::Yesterday(g) => 1 + y_nesting_depth(g)?,
        Formula::And(a, b) => y_nesting_depth(a)?.max(y_nesting_depth(b)?),
        Formula::Update(..) => return Err(Error::NotActionFree),
    })
}

/// The depth-`n` formula: `<Y>^n [Y]false`, conjoined with `[Y]^(n+1) false`
/// unless the model is known to have a unique past.
pub fn depth_formula(n: usize, unique_past: bool) -> Formula {
    let mut f = Formula::yesterday(Formula::Bottom);
    for _ in 0..n {
        f = Formula::yesterday_diamond(f);
    }
    if unique_past {
        return f;
    }
    let mut bound = Formula::Bottom;
    for _ in 0..=n {
        bound = Formula::yesterday(bound);
    }
    Formula::and(f, bound)
}
