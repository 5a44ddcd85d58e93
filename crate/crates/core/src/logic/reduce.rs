//! Reduction of update modalities to the action-free fragment.
//!
//! Rewriting is innermost-first. Actions inside preconditions are reduced
//! before the update that uses them, and an update node is rewritten only
//! once its body is action-free, pushing it through one connective at a time:
//!
//! ```text
//! [U,s]q        ~>  pre(s) -> q                    (q an atom or false)
//! [U,s]~f       ~>  pre(s) -> ~[U,s]f
//! [U,s](f & g)  ~>  [U,s]f & [U,s]g
//! [U,s][a]f     ~>  pre(s) -> AND { [a][U,s']f : s -a-> s' }
//! [U,s][Y]f     ~>  pre(s) -> [Y][U,s]f            (s a past state)
//! [U,s][Y]f     ~>  pre(s) -> AND { [U,s']f : s' ~> s }   (otherwise)
//! ```

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Arc;

use crate::action::ActionModel;
use crate::formula::Formula;

/// Rewrites `f` into an equivalent action-free formula.
pub fn reduce(f: &Formula) -> Formula {
    Reducer::default().formula(f)
}

/// Reduces every precondition of `u`. Returns `u` itself when nothing changes.
pub fn reduce_action(u: &Arc<ActionModel>) -> Arc<ActionModel> {
    Reducer::default().action(u)
}

#[derive(Default)]
struct Reducer {
    actions: HashMap<*const ActionModel, Arc<ActionModel>>,
}

impl Reducer {
    fn action(&mut self, u: &Arc<ActionModel>) -> Arc<ActionModel> {
        let key = Arc::as_ptr(u);
        if let Some(r) = self.actions.get(&key) {
            return r.clone();
        }
        let reduced = if u.preconditions().iter().all(Formula::is_action_free) {
            u.clone()
        } else {
            let pre = u.preconditions().iter().map(|p| self.formula(p)).collect();
            Arc::new(ActionModel::from_parts(
                u.name().to_string(),
                u.frame().clone(),
                pre,
            ))
        };
        self.actions.insert(key, reduced.clone());
        reduced
    }

    fn formula(&mut self, f: &Formula) -> Formula {
        match f {
            Formula::Bottom | Formula::Atom(_) => f.clone(),
            Formula::Not(g) => Formula::not(self.formula(g)),
            Formula::And(a, b) => Formula::and(self.formula(a), self.formula(b)),
            Formula::Box(a, g) => Formula::boxed(a.clone(), self.formula(g)),
            Formula::Yesterday(g) => Formula::yesterday(self.formula(g)),
            Formula::Update(u, s, g) => {
                let u = self.action(u);
                let g = self.formula(g);
                let s = u.event_index(s).expect("event of its action");
                push(&u, s, &g)
            }
        }
    }
}

/// Eliminates `[u, s] g` for action-free `g` and action-free preconditions.
fn push(u: &Arc<ActionModel>, s: usize, g: &Formula) -> Formula {
    // the update nodes created by one rule all have smaller bodies
    expand(&rewrite_once(u, s, g))
}

fn expand(f: &Formula) -> Formula {
    match f {
        Formula::Bottom | Formula::Atom(_) => f.clone(),
        Formula::Not(g) => Formula::not(expand(g)),
        Formula::And(a, b) => Formula::and(expand(a), expand(b)),
        Formula::Box(a, g) => Formula::boxed(a.clone(), expand(g)),
        Formula::Yesterday(g) => Formula::yesterday(expand(g)),
        Formula::Update(u, s, g) => {
            let s = u.event_index(s).expect("event of its action");
            push(u, s, g)
        }
    }
}

/// One application of the rule matching the body's main connective. Update
/// nodes in the result have strictly smaller bodies.
fn rewrite_once(u: &Arc<ActionModel>, s: usize, g: &Formula) -> Formula {
    let pre = u.pre(s).clone();
    let at = |t: usize, h: &Formula| Formula::update(u.clone(), u.events()[t].clone(), h.clone());
    match g {
        Formula::Bottom | Formula::Atom(_) => Formula::implies(pre, g.clone()),
        Formula::Not(h) => Formula::implies(pre, Formula::not(at(s, h))),
        Formula::And(a, b) => Formula::and(at(s, a), at(s, b)),
        Formula::Box(a, h) => {
            let rel = u.frame().agent(a).expect("agent of the signature");
            let parts = rel.succ(s).iter().map(|&t| Formula::boxed(a.clone(), at(t, h)));
            Formula::implies(pre, Formula::conjunction(parts))
        }
        Formula::Yesterday(h) => {
            if u.past_state_at(s) {
                Formula::implies(pre, Formula::yesterday(at(s, h)))
            } else {
                let parts = u.frame().yesterday().pred(s).iter().map(|&t| at(t, h));
                Formula::implies(pre, Formula::conjunction(parts))
            }
        }
        Formula::Update(..) => unreachable!("body must be action-free"),
    }
}

/// One rewrite step of the step-wise engine, or `None` in normal form.
///
/// While some update node carries an action with update nodes in its
/// preconditions, one such node has its action fully reduced. Otherwise one
/// innermost update node (action-free body) is rewritten by one rule.
pub fn reduce_step(f: &Formula) -> Option<Formula> {
    if let Some(g) = step_preconditions(f) {
        return Some(g);
    }
    step_innermost(f)
}

fn step_preconditions(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Bottom | Formula::Atom(_) => None,
        Formula::Not(g) => step_preconditions(g).map(Formula::not),
        Formula::Box(a, g) => step_preconditions(g).map(|g| Formula::boxed(a.clone(), g)),
        Formula::Yesterday(g) => step_preconditions(g).map(Formula::yesterday),
        Formula::And(a, b) => match step_preconditions(a) {
            Some(a) => Some(Formula::and(a, (**b).clone())),
            None => step_preconditions(b).map(|b| Formula::and((**a).clone(), b)),
        },
        Formula::Update(u, s, g) => {
            if !u.preconditions().iter().all(Formula::is_action_free) {
                return Some(Formula::update(reduce_action(u), s.clone(), (**g).clone()));
            }
            step_preconditions(g).map(|g| Formula::update(u.clone(), s.clone(), g))
        }
    }
}

fn step_innermost(f: &Formula) -> Option<Formula> {
    match f {
        Formula::Bottom | Formula::Atom(_) => None,
        Formula::Not(g) => step_innermost(g).map(Formula::not),
        Formula::Box(a, g) => step_innermost(g).map(|g| Formula::boxed(a.clone(), g)),
        Formula::Yesterday(g) => step_innermost(g).map(Formula::yesterday),
        Formula::And(a, b) => match step_innermost(a) {
            Some(a) => Some(Formula::and(a, (**b).clone())),
            None => step_innermost(b).map(|b| Formula::and((**a).clone(), b)),
        },
        Formula::Update(u, s, g) => {
            if let Some(g) = step_innermost(g) {
                return Some(Formula::update(u.clone(), s.clone(), g));
            }
            let s = u.event_index(s).expect("event of its action");
            Some(rewrite_once(u, s, g))
        }
    }
}

/// Termination measure of the step-wise engine: update nodes inside the
/// preconditions of update nodes, then the term itself under the recursive
/// path ordering with precedence update > [Y] > [a] > & > ~ > atoms.
#[derive(Clone, Debug)]
pub struct Measure {
    pub nested_updates: usize,
    pub term: Formula,
}

impl PartialEq for Measure {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Measure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.nested_updates.cmp(&other.nested_updates) {
            Ordering::Equal => {}
            o => return Some(o),
        }
        if self.term == other.term {
            Some(Ordering::Equal)
        } else if rpo_gt(&self.term, &other.term) {
            Some(Ordering::Greater)
        } else if rpo_gt(&other.term, &self.term) {
            Some(Ordering::Less)
        } else {
            None
        }
    }
}

pub fn measure(f: &Formula) -> Measure {
    Measure {
        nested_updates: nested_updates(f),
        term: f.clone(),
    }
}

fn nested_updates(f: &Formula) -> usize {
    match f {
        Formula::Bottom | Formula::Atom(_) => 0,
        Formula::Not(g) | Formula::Box(_, g) | Formula::Yesterday(g) => nested_updates(g),
        Formula::And(a, b) => nested_updates(a) + nested_updates(b),
        Formula::Update(u, _, g) => {
            let inside: usize = u
                .preconditions()
                .iter()
                .map(|p| p.update_count() + nested_updates(p))
                .sum();
            inside + nested_updates(g)
        }
    }
}

fn precedence(f: &Formula) -> u8 {
    match f {
        Formula::Bottom | Formula::Atom(_) => 0,
        Formula::Not(_) => 1,
        Formula::And(..) => 2,
        Formula::Box(..) => 3,
        Formula::Yesterday(_) => 4,
        Formula::Update(..) => 5,
    }
}

/// `s > t` in the recursive path ordering with multiset status.
fn rpo_gt(s: &Formula, t: &Formula) -> bool {
    Rpo::default().gt(s, t)
}

/// Memoised comparison; subterm addresses are stable for one call.
#[derive(Default)]
struct Rpo {
    memo: HashMap<(*const Formula, *const Formula), bool>,
}

impl Rpo {
    fn gt(&mut self, s: &Formula, t: &Formula) -> bool {
        let key = (s as *const Formula, t as *const Formula);
        if let Some(&r) = self.memo.get(&key) {
            return r;
        }
        let r = self.compute(s, t);
        self.memo.insert(key, r);
        r
    }

    fn compute(&mut self, s: &Formula, t: &Formula) -> bool {
        let ss = s.children();
        if ss.iter().any(|si| *si == t || self.gt(si, t)) {
            return true;
        }
        let ts = t.children();
        match precedence(s).cmp(&precedence(t)) {
            Ordering::Greater => ts.iter().all(|tj| self.gt(s, tj)),
            Ordering::Equal => self.multiset_gt(ss, ts),
            Ordering::Less => false,
        }
    }

    fn multiset_gt(&mut self, mut m: Vec<&Formula>, mut n: Vec<&Formula>) -> bool {
        // cancel common elements
        let mut i = 0;
        while i < m.len() {
            if let Some(j) = n.iter().position(|x| *x == m[i]) {
                n.swap_remove(j);
                m.swap_remove(i);
            } else {
                i += 1;
            }
        }
        !m.is_empty() && n.iter().all(|y| m.iter().any(|x| self.gt(x, y)))
    }
}
