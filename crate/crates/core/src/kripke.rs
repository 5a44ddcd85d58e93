//! Finite Kripke models with a yesterday relation.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::formula::Signature;
use crate::frame::{Closure, Depth, Frame, Property, PropertyReport, Relation, Witness};

/// A Kripke model: a frame over worlds plus a valuation. Worlds are kept in
/// sorted order and every relation is stored canonically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KripkeModel {
    frame: Frame,
    valuation: BTreeMap<String, Vec<bool>>,
}

/// World names accepted in model files: nonempty, no whitespace. Composite
/// product names such as `w|s` are opaque identifiers once loaded.
pub(crate) fn is_state_name(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}

impl KripkeModel {
    /// Builds a model from named worlds. Atoms of `sig` absent from `val`
    /// are false everywhere.
    pub fn new(
        sig: Signature,
        worlds: impl IntoIterator<Item = String>,
        val: &BTreeMap<String, BTreeSet<String>>,
        epistemic: &BTreeMap<String, BTreeSet<(String, String)>>,
        yesterday: &BTreeSet<(String, String)>,
    ) -> Result<Self> {
        let worlds: Vec<String> = worlds.into_iter().collect();
        if let Some(bad) = worlds.iter().find(|w| !is_state_name(w)) {
            return Err(Error::InvalidIdentifier(bad.clone()));
        }
        let distinct: BTreeSet<&String> = worlds.iter().collect();
        if distinct.len() != worlds.len() {
            return Err(Error::Malformed("duplicate world".into()));
        }
        let frame = Frame::from_names(sig, worlds, epistemic, yesterday)?;
        let mut valuation = BTreeMap::new();
        for p in frame.signature().atoms() {
            valuation.insert(p.to_string(), vec![false; frame.len()]);
        }
        for (p, ws) in val {
            let row = valuation
                .get_mut(p)
                .ok_or_else(|| Error::UnknownAtom(p.clone()))?;
            for w in ws {
                let i = frame.index(w).ok_or_else(|| Error::UnknownWorld(w.clone()))?;
                row[i] = true;
            }
        }
        Ok(KripkeModel { frame, valuation })
    }

    pub(crate) fn from_parts(frame: Frame, valuation: BTreeMap<String, Vec<bool>>) -> Self {
        debug_assert!(valuation.values().all(|r| r.len() == frame.len()));
        KripkeModel { frame, valuation }
    }

    pub fn builder(sig: Signature) -> KripkeBuilder {
        KripkeBuilder {
            sig,
            worlds: Vec::new(),
            val: BTreeMap::new(),
            epistemic: BTreeMap::new(),
            yesterday: BTreeSet::new(),
            closure: Closure::None,
        }
    }

    pub fn signature(&self) -> &Signature {
        self.frame.signature()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn worlds(&self) -> &[String] {
        self.frame.names()
    }

    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn world_index(&self, w: &str) -> Result<usize> {
        self.frame
            .index(w)
            .ok_or_else(|| Error::UnknownWorld(w.to_string()))
    }

    /// Truth of atom `p` at world index `i`; undeclared atoms are false.
    pub fn holds(&self, p: &str, i: usize) -> bool {
        self.valuation.get(p).is_some_and(|row| row[i])
    }

    pub fn valuation(&self) -> &BTreeMap<String, Vec<bool>> {
        &self.valuation
    }

    /// Atoms true at world index `i`.
    pub fn true_atoms(&self, i: usize) -> Vec<&str> {
        self.valuation
            .iter()
            .filter(|(_, row)| row[i])
            .map(|(p, _)| p.as_str())
            .collect()
    }

    pub fn depths(&self) -> Vec<Depth> {
        self.frame.depths()
    }

    pub fn depth(&self, w: &str) -> Result<Depth> {
        let i = self.world_index(w)?;
        Ok(self.frame.depths()[i])
    }

    /// True iff `w` has no yesterday.
    pub fn is_initial(&self, w: &str) -> Result<bool> {
        let i = self.world_index(w)?;
        Ok(!self.frame.has_past(i))
    }

    /// `w ~> w'` implies `w` and `w'` agree on every atom.
    pub fn check_persistence_of_facts(&self) -> PropertyReport {
        for (x, y) in self.frame.yesterday().pairs() {
            for (p, row) in &self.valuation {
                if row[x] != row[y] {
                    return PropertyReport::fail(
                        Property::PersistenceOfFacts,
                        Witness {
                            states: vec![self.frame.name(x).into(), self.frame.name(y).into()],
                            arrows: vec![self.frame.yesterday_arrow(x, y)],
                            detail: Some(format!("`{p}` changes value")),
                        },
                    );
                }
            }
        }
        PropertyReport::pass(Property::PersistenceOfFacts)
    }

    /// Checks one of the Kripke-side properties, or `restricted`.
    pub fn check_property(&self, prop: Property) -> Result<PropertyReport> {
        match prop {
            Property::PersistenceOfFacts => Ok(self.check_persistence_of_facts()),
            Property::Restricted => Ok(self.is_restricted()),
            p => self.frame.check_structural(p).ok_or_else(|| {
                Error::Format(format!("property `{p}` does not apply to Kripke models"))
            }),
        }
    }

    /// The conjunction of the six restricted-model conditions; the first
    /// failing condition supplies the witness.
    pub fn is_restricted(&self) -> PropertyReport {
        let mut reports = vec![self.check_persistence_of_facts()];
        for p in &Property::STRUCTURAL[..5] {
            reports.push(self.frame.check_structural(*p).expect("structural"));
        }
        restricted_from(reports)
    }

    /// Restriction to the worlds reachable from `w` along any agent arrow
    /// forward or any yesterday arrow backward.
    pub fn generated_submodel(&self, w: &str) -> Result<KripkeModel> {
        let start = self.world_index(w)?;
        let mut keep = vec![false; self.len()];
        keep[start] = true;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            let agents = self.frame.agents().flat_map(|(_, r)| r.succ(x).iter());
            for &y in agents.chain(self.frame.yesterday().pred(x)) {
                if !keep[y] {
                    keep[y] = true;
                    stack.push(y);
                }
            }
        }
        Ok(self.restrict(&keep))
    }

    /// The submodel on the worlds flagged in `keep` (at least one).
    pub fn restrict(&self, keep: &[bool]) -> KripkeModel {
        let old: Vec<usize> = (0..self.len()).filter(|&i| keep[i]).collect();
        let mut new_of = vec![usize::MAX; self.len()];
        for (k, &i) in old.iter().enumerate() {
            new_of[i] = k;
        }
        let n = old.len();
        let map_rel = |r: &Relation| {
            Relation::from_pairs(
                n,
                r.pairs()
                    .filter(|&(a, b)| keep[a] && keep[b])
                    .map(|(a, b)| (new_of[a], new_of[b])),
            )
        };
        let names = old.iter().map(|&i| self.frame.name(i).to_string()).collect();
        let epistemic = self
            .frame
            .agents()
            .map(|(a, r)| (a.to_string(), map_rel(r)))
            .collect();
        let yesterday = map_rel(self.frame.yesterday());
        let frame = Frame::from_indexed(self.signature().clone(), names, epistemic, yesterday);
        let valuation = self
            .valuation
            .iter()
            .map(|(p, row)| (p.clone(), old.iter().map(|&i| row[i]).collect()))
            .collect();
        KripkeModel { frame, valuation }
    }

    /// Closes every epistemic relation; yesterday and valuation are untouched.
    pub fn relation_closure(&self, mode: Closure) -> KripkeModel {
        KripkeModel {
            frame: self.frame.close(mode),
            valuation: self.valuation.clone(),
        }
    }
}

pub(crate) fn restricted_from(reports: Vec<PropertyReport>) -> PropertyReport {
    for r in reports {
        if !r.holds {
            let failed = r.property;
            let mut w = r.witness.unwrap_or_default();
            w.detail = Some(match w.detail {
                Some(d) => format!("fails {failed}: {d}"),
                None => format!("fails {failed}"),
            });
            return PropertyReport::fail(Property::Restricted, w);
        }
    }
    PropertyReport::pass(Property::Restricted)
}

/// Incremental construction of a model by name.
#[derive(Clone, Debug)]
pub struct KripkeBuilder {
    sig: Signature,
    worlds: Vec<String>,
    val: BTreeMap<String, BTreeSet<String>>,
    epistemic: BTreeMap<String, BTreeSet<(String, String)>>,
    yesterday: BTreeSet<(String, String)>,
    closure: Closure,
}

impl KripkeBuilder {
    /// Declares a world and the atoms true at it.
    pub fn world(mut self, w: &str, atoms: &[&str]) -> Self {
        self.worlds.push(w.to_string());
        for p in atoms {
            self.val.entry(p.to_string()).or_default().insert(w.to_string());
        }
        self
    }

    pub fn arrow(mut self, agent: &str, from: &str, to: &str) -> Self {
        self.epistemic
            .entry(agent.to_string())
            .or_default()
            .insert((from.to_string(), to.to_string()));
        self
    }

    /// Arrows both ways.
    pub fn link(self, agent: &str, x: &str, y: &str) -> Self {
        self.arrow(agent, x, y).arrow(agent, y, x)
    }

    /// `from ~> to`.
    pub fn yesterday(mut self, from: &str, to: &str) -> Self {
        self.yesterday.insert((from.to_string(), to.to_string()));
        self
    }

    pub fn closure(mut self, mode: Closure) -> Self {
        self.closure = mode;
        self
    }

    pub fn build(self) -> Result<KripkeModel> {
        let m = KripkeModel::new(
            self.sig,
            self.worlds,
            &self.val,
            &self.epistemic,
            &self.yesterday,
        )?;
        Ok(m.relation_closure(self.closure))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["a", "b"], ["p", "q"]).unwrap()
    }

    fn fig1() -> KripkeModel {
        KripkeModel::builder(sig())
            .world("w", &["p", "q"])
            .world("v", &["q"])
            .world("u", &["p"])
            .link("a", "w", "v")
            .link("a", "w", "u")
            .link("b", "w", "v")
            .link("b", "w", "u")
            .closure(Closure::S5)
            .build()
            .unwrap()
    }

    #[test]
    fn drawn_model_closes_transitively() {
        let m = KripkeModel::builder(sig())
            .world("w", &["p", "q"])
            .world("v", &["q"])
            .world("u", &["p"])
            .link("a", "w", "v")
            .link("a", "w", "u")
            .closure(Closure::Transitive)
            .build()
            .unwrap();
        let a = m.frame().agent("a").unwrap();
        let (u, v) = (m.world_index("u").unwrap(), m.world_index("v").unwrap());
        assert!(a.contains(u, v) && a.contains(v, u));
    }

    #[test]
    fn atemporal_model_is_restricted() {
        let m = fig1();
        assert_eq!(m.depth("w").unwrap(), Depth::Finite(0));
        assert!(m.is_initial("w").unwrap());
        assert!(m.is_restricted().holds);
        assert!(m.check_property(Property::PerfectRecall).unwrap().holds);
        assert_eq!(m.generated_submodel("w").unwrap(), m);
    }

    #[test]
    fn unknown_world() {
        assert_eq!(fig1().depth("x"), Err(Error::UnknownWorld("x".into())));
    }

    #[test]
    fn dual_past_is_not_restricted() {
        let m = KripkeModel::builder(sig())
            .world("x", &[])
            .world("y", &[])
            .world("z", &[])
            .yesterday("x", "z")
            .yesterday("y", "z")
            .closure(Closure::Reflexive)
            .build()
            .unwrap();
        let r = m.is_restricted();
        assert!(!r.holds);
        let w = r.witness.unwrap();
        assert_eq!(w.states, vec!["x", "z", "y"]);
        assert!(w.detail.unwrap().starts_with("fails uniqueness-of-past"));
    }

    #[test]
    fn isolated_component_is_dropped() {
        let m = KripkeModel::builder(sig())
            .world("w", &["p"])
            .world("x", &["q"])
            .closure(Closure::Reflexive)
            .build()
            .unwrap();
        let g = m.generated_submodel("w").unwrap();
        assert_eq!(g.worlds(), ["w"]);
        assert!(g.holds("p", 0));
    }

    #[test]
    fn persistence_witness() {
        let m = KripkeModel::builder(sig())
            .world("x", &["p"])
            .world("y", &[])
            .yesterday("x", "y")
            .build()
            .unwrap();
        let r = m.check_persistence_of_facts();
        assert!(!r.holds);
        assert_eq!(r.witness.unwrap().states, vec!["x", "y"]);
    }

    #[test]
    fn closure_is_idempotent() {
        let m = fig1();
        assert_eq!(m.relation_closure(Closure::S5), m);
        let e = KripkeModel::builder(sig())
            .world("x", &[])
            .world("y", &[])
            .closure(Closure::Reflexive)
            .build()
            .unwrap();
        assert_eq!(e.frame().agent("b").unwrap().len(), 2);
    }
}
