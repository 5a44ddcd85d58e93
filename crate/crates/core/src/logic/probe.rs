//! Bounded search for a formula distinguishing two pointed models.
//!
//! Formulas are enumerated up to semantic equivalence on the disjoint union
//! of the two models: each class is a truth mask with one witness formula.
//! Layer `d` holds the Boolean closure of atoms and of boxes applied to
//! layer `d - 1`, so every action-free formula of modal depth at most `d`
//! is covered, subject to the class cap.

use std::collections::HashSet;
use std::sync::Arc;

use crate::action::ActionModel;
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::kripke::KripkeModel;
use crate::semantics::extension;

#[derive(Clone, Debug)]
pub struct ProbeParams {
    pub max_depth: usize,
    /// Bound on the number of semantic classes kept.
    pub max_classes: usize,
    /// Update prefixes `[U@s]` tried in front of pool formulas.
    pub updates: Vec<(Arc<ActionModel>, String)>,
    /// How many pool formulas, in discovery order, get each prefix.
    pub update_pool: usize,
}

impl Default for ProbeParams {
    fn default() -> Self {
        ProbeParams {
            max_depth: 3,
            max_classes: 4096,
            updates: Vec::new(),
            update_pool: 64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProbeVerdict {
    Agree { classes: usize },
    Disagree(Formula),
}

struct Pool<'a> {
    m: &'a KripkeModel,
    n: &'a KripkeModel,
    seen: HashSet<Vec<bool>>,
    classes: Vec<(Vec<bool>, Formula)>,
    points: (usize, usize),
    cap: usize,
}

impl Pool<'_> {
    /// Adds a class; returns the witness if it separates the points.
    fn fresh(&self, mask: &[bool]) -> bool {
        self.classes.len() < self.cap && !self.seen.contains(mask)
    }

    /// The witness is only built for a new class.
    fn add(&mut self, mask: Vec<bool>, f: impl FnOnce() -> Formula) -> Option<Formula> {
        if self.classes.len() >= self.cap || self.seen.contains(&mask) {
            return None;
        }
        let f = f();
        let split = mask[self.points.0] != mask[self.points.1];
        self.seen.insert(mask.clone());
        self.classes.push((mask, f.clone()));
        split.then_some(f)
    }

    fn boxed(&self, mask: &[bool], agent: Option<&str>) -> Vec<bool> {
        let lm = self.m.len();
        let mut out = Vec::with_capacity(mask.len());
        for (model, off) in [(self.m, 0), (self.n, lm)] {
            let f = model.frame();
            let rel = match agent {
                Some(a) => f.agent(a).expect("shared agents"),
                None => f.yesterday(),
            };
            for w in 0..model.len() {
                let succ = if agent.is_some() { rel.succ(w) } else { rel.pred(w) };
                out.push(succ.iter().all(|&v| mask[v + off]));
            }
        }
        out
    }

    /// Closes classes from `start` on under negation and conjunction.
    fn boolean_closure(&mut self, start: usize) -> Option<Formula> {
        let mut i = start;
        while i < self.classes.len() && self.classes.len() < self.cap {
            let neg: Vec<bool> = self.classes[i].0.iter().map(|b| !b).collect();
            if self.fresh(&neg) {
                let f = Formula::not(self.classes[i].1.clone());
                if let Some(w) = self.add(neg, || f) {
                    return Some(w);
                }
            }
            for j in 0..=i {
                if self.classes.len() >= self.cap {
                    break;
                }
                let (mask, other) = (&self.classes[i].0, &self.classes[j].0);
                let both: Vec<bool> = mask.iter().zip(other).map(|(a, b)| *a && *b).collect();
                if !self.fresh(&both) {
                    continue;
                }
                let (f, g) = (self.classes[i].1.clone(), self.classes[j].1.clone());
                if let Some(w) = self.add(both, || Formula::and(g, f)) {
                    return Some(w);
                }
            }
            i += 1;
        }
        None
    }
}

/// Searches for a formula true at exactly one of `(m, w)` and `(n, v)`.
pub fn language_equivalence_probe(
    m: &KripkeModel,
    w: &str,
    n: &KripkeModel,
    v: &str,
    params: &ProbeParams,
) -> Result<ProbeVerdict> {
    if m.signature() != n.signature() {
        return Err(Error::SignatureMismatch("models have different signatures".into()));
    }
    let points = (m.world_index(w)?, m.len() + n.world_index(v)?);
    let mut pool = Pool {
        m,
        n,
        seen: HashSet::new(),
        classes: Vec::new(),
        points,
        cap: params.max_classes,
    };
    let union_mask = |f: &Formula| -> Result<Vec<bool>> {
        let mut a = extension(m, f)?;
        a.extend(extension(n, f)?);
        Ok(a)
    };
    let mut base = vec![Formula::Bottom];
    base.extend(m.signature().atoms().map(Formula::atom));
    for f in base {
        if let Some(x) = pool.add(union_mask(&f)?, || f) {
            return Ok(ProbeVerdict::Disagree(x));
        }
    }
    if let Some(x) = pool.boolean_closure(0) {
        return Ok(ProbeVerdict::Disagree(x));
    }
    let agents: Vec<String> = m.signature().agents().map(str::to_string).collect();
    for _ in 0..params.max_depth {
        let layer = pool.classes.len();
        for k in 0..layer {
            for a in agents.iter().map(|a| Some(a.as_str())).chain([None]) {
                let boxed = pool.boxed(&pool.classes[k].0, a);
                if !pool.fresh(&boxed) {
                    continue;
                }
                let f = pool.classes[k].1.clone();
                let g = || match a {
                    Some(a) => Formula::boxed(a, f),
                    None => Formula::yesterday(f),
                };
                if let Some(x) = pool.add(boxed, g) {
                    return Ok(ProbeVerdict::Disagree(x));
                }
            }
        }
        if let Some(x) = pool.boolean_closure(layer) {
            return Ok(ProbeVerdict::Disagree(x));
        }
    }
    let tested: Vec<Formula> = pool
        .classes
        .iter()
        .take(params.update_pool)
        .map(|(_, f)| f.clone())
        .collect();
    for (u, s) in &params.updates {
        for f in &tested {
            let g = Formula::update(u.clone(), s.clone(), f.clone());
            let mask = union_mask(&g)?;
            if mask[points.0] != mask[points.1] {
                return Ok(ProbeVerdict::Disagree(g));
            }
        }
    }
    Ok(ProbeVerdict::Agree {
        classes: pool.classes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Signature;
    use crate::frame::Closure;

    #[test]
    fn atoms_separate_first() {
        let m = KripkeModel::builder(Signature::new(["a"], ["p", "q"]).unwrap())
            .world("w", &["p", "q"])
            .world("u", &["p"])
            .link("a", "w", "u")
            .closure(Closure::S5)
            .build()
            .unwrap();
        let r = language_equivalence_probe(&m, "w", &m, "u", &ProbeParams::default()).unwrap();
        assert_eq!(r, ProbeVerdict::Disagree(Formula::atom("q")));
    }

    #[test]
    fn modal_difference_is_found() {
        let m = KripkeModel::builder(Signature::new(["a"], ["p"]).unwrap())
            .world("x", &[])
            .world("y", &[])
            .world("z", &["p"])
            .arrow("a", "x", "z")
            .build()
            .unwrap();
        let r = language_equivalence_probe(&m, "x", &m, "y", &ProbeParams::default()).unwrap();
        let ProbeVerdict::Disagree(f) = r else { panic!() };
        assert_eq!(f.modal_depth(), 1);
    }
}
