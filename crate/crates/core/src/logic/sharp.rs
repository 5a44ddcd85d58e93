//! The ♯ translation of atemporal actions and formulas into temporal ones:
//! each action gains an epistemic past state `♭` one tick before every event.

use std::collections::HashMap;
use std::sync::Arc;

use crate::action::ActionModel;
use crate::error::{Error, Result};
use crate::formula::{Formula, FLAT};
use crate::frame::{Frame, Relation};

/// `U♯`, named `{name}_sharp`.
pub fn sharp_action(u: &ActionModel) -> Result<ActionModel> {
    Translator::default().action(u)
}

/// `f♯`: homomorphic, with `([U,s]g)♯ = [U♯,s]g♯`.
pub fn sharp_formula(f: &Formula) -> Result<Formula> {
    Translator::default().formula(f)
}

#[derive(Default)]
struct Translator {
    done: HashMap<*const ActionModel, Arc<ActionModel>>,
}

impl Translator {
    fn shared(&mut self, u: &Arc<ActionModel>) -> Result<Arc<ActionModel>> {
        let key = Arc::as_ptr(u);
        if let Some(t) = self.done.get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(self.action(u)?);
        self.done.insert(key, t.clone());
        Ok(t)
    }

    fn action(&mut self, u: &ActionModel) -> Result<ActionModel> {
        if !u.is_atemporal() {
            return Err(Error::NotAtemporal(u.name().to_string()));
        }
        if u.event_index(FLAT).is_some() {
            return Err(Error::Malformed(format!(
                "action `{}` uses the reserved event `{FLAT}`",
                u.name()
            )));
        }
        let mut names: Vec<String> = u.events().to_vec();
        names.push(FLAT.to_string());
        names.sort();
        let n = names.len();
        let new_of: Vec<usize> = u
            .events()
            .iter()
            .map(|e| names.binary_search(e).expect("kept event"))
            .collect();
        let flat = names.binary_search_by(|x| x.as_str().cmp(FLAT)).expect("flat event");
        let epistemic = u
            .frame()
            .agents()
            .map(|(a, r)| {
                let pairs = r
                    .pairs()
                    .map(|(x, y)| (new_of[x], new_of[y]))
                    .chain(std::iter::once((flat, flat)));
                (a.to_string(), Relation::from_pairs(n, pairs))
            })
            .collect();
        let yesterday = Relation::from_pairs(n, new_of.iter().map(|&s| (flat, s)));
        let frame = Frame::from_indexed(u.signature().clone(), names, epistemic, yesterday);
        let mut pre = vec![Formula::top(); n];
        for (i, p) in u.preconditions().iter().enumerate() {
            pre[new_of[i]] = self.formula(p)?;
        }
        Ok(ActionModel::from_parts(format!("{}_sharp", u.name()), frame, pre))
    }

    fn formula(&mut self, f: &Formula) -> Result<Formula> {
        Ok(match f {
            Formula::Bottom | Formula::Atom(_) => f.clone(),
            Formula::Not(g) => Formula::not(self.formula(g)?),
            Formula::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            Formula::Box(a, g) => Formula::boxed(a.clone(), self.formula(g)?),
            Formula::Yesterday(g) => Formula::yesterday(self.formula(g)?),
            Formula::Update(u, s, g) => Formula::update(self.shared(u)?, s.clone(), self.formula(g)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Signature;
    use crate::frame::{Closure, Depth};

    fn sig() -> Signature {
        Signature::new(["a", "b"], ["p"]).unwrap()
    }

    #[test]
    fn single_event_gets_one_history() {
        let u = ActionModel::builder("E", sig())
            .event("e", Formula::atom("p"))
            .closure(Closure::Reflexive)
            .build()
            .unwrap();
        let s = sharp_action(&u).unwrap();
        assert_eq!(s.name(), "E_sharp");
        assert_eq!(s.events(), ["e", "♭"]);
        assert_eq!(s.depth("e").unwrap(), Depth::Finite(1));
        assert_eq!(s.pre_of("♭").unwrap(), &Formula::top());
        assert!(s.is_past_state("♭").unwrap());
    }

    #[test]
    fn atoms_are_fixed() {
        assert_eq!(sharp_formula(&Formula::atom("p")).unwrap(), Formula::atom("p"));
    }

    #[test]
    fn temporal_action_is_rejected() {
        let u = ActionModel::builder("T", sig())
            .event("x", Formula::top())
            .event("y", Formula::top())
            .yesterday("x", "y")
            .build()
            .unwrap();
        assert_eq!(sharp_action(&u), Err(Error::NotAtemporal("T".into())));
    }
}
