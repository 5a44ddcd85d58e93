//! Temporal action models and their structural properties.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::formula::{is_user_identifier, Formula, Signature};
use crate::frame::{Closure, Depth, Frame, Property, PropertyReport, Witness};
use crate::kripke::is_state_name;
use crate::logic::{validity, ValidityOptions};

/// An action model: events, agent and yesterday relations, and one
/// precondition per event. Events are kept in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionModel {
    name: String,
    frame: Frame,
    pre: Vec<Formula>,
}

impl ActionModel {
    pub fn new(
        name: &str,
        sig: Signature,
        events: impl IntoIterator<Item = String>,
        epistemic: &BTreeMap<String, BTreeSet<(String, String)>>,
        yesterday: &BTreeSet<(String, String)>,
        pre: &BTreeMap<String, Formula>,
    ) -> Result<Self> {
        if !is_user_identifier(name) {
            return Err(Error::InvalidIdentifier(name.to_string()));
        }
        let events: Vec<String> = events.into_iter().collect();
        if let Some(bad) = events.iter().find(|e| !is_state_name(e)) {
            return Err(Error::InvalidIdentifier(bad.clone()));
        }
        if events.iter().collect::<BTreeSet<_>>().len() != events.len() {
            return Err(Error::Malformed(format!("duplicate event in `{name}`")));
        }
        let frame = Frame::from_names(sig, events, epistemic, yesterday)?;
        for e in pre.keys() {
            if frame.index(e).is_none() {
                return Err(Error::UnknownEvent {
                    action: name.to_string(),
                    event: e.clone(),
                });
            }
        }
        let mut pres = Vec::with_capacity(frame.len());
        for e in frame.names() {
            let f = pre.get(e).ok_or_else(|| {
                Error::Malformed(format!("event `{e}` of `{name}` has no precondition"))
            })?;
            f.check_signature(frame.signature())?;
            pres.push(f.clone());
        }
        Ok(ActionModel {
            name: name.to_string(),
            frame,
            pre: pres,
        })
    }

    pub(crate) fn from_parts(name: String, frame: Frame, pre: Vec<Formula>) -> Self {
        debug_assert_eq!(frame.len(), pre.len());
        ActionModel { name, frame, pre }
    }

    pub fn builder(name: &str, sig: Signature) -> ActionBuilder {
        ActionBuilder {
            name: name.to_string(),
            sig,
            events: Vec::new(),
            pre: BTreeMap::new(),
            epistemic: BTreeMap::new(),
            yesterday: BTreeSet::new(),
            closure: Closure::None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn renamed(&self, name: &str) -> ActionModel {
        ActionModel {
            name: name.to_string(),
            ..self.clone()
        }
    }

    /// Closes every agent relation; yesterday and preconditions are untouched.
    pub fn relation_closure(&self, mode: Closure) -> ActionModel {
        ActionModel {
            frame: self.frame.close(mode),
            ..self.clone()
        }
    }

    pub fn signature(&self) -> &Signature {
        self.frame.signature()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn events(&self) -> &[String] {
        self.frame.names()
    }

    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn event_index(&self, e: &str) -> Option<usize> {
        self.frame.index(e)
    }

    fn require_event(&self, e: &str) -> Result<usize> {
        self.event_index(e).ok_or_else(|| Error::UnknownEvent {
            action: self.name.clone(),
            event: e.to_string(),
        })
    }

    pub fn preconditions(&self) -> &[Formula] {
        &self.pre
    }

    pub fn pre(&self, i: usize) -> &Formula {
        &self.pre[i]
    }

    pub fn pre_of(&self, e: &str) -> Result<&Formula> {
        Ok(&self.pre[self.require_event(e)?])
    }

    /// True when the action has no yesterday arrows.
    pub fn is_atemporal(&self) -> bool {
        self.frame.yesterday().is_empty()
    }

    pub fn depths(&self) -> Vec<Depth> {
        self.frame.depths()
    }

    pub fn depth(&self, e: &str) -> Result<Depth> {
        Ok(self.frame.depths()[self.require_event(e)?])
    }

    pub(crate) fn past_state_at(&self, i: usize) -> bool {
        !self.frame.has_past(i)
    }

    /// True iff no event is a yesterday of `e`.
    pub fn is_past_state(&self, e: &str) -> Result<bool> {
        Ok(self.past_state_at(self.require_event(e)?))
    }

    /// Why event `i` is not structurally an epistemic past state, if it is not:
    /// it needs a yesterday-free position, a self-loop for every agent and no
    /// other agent arrow in or out.
    fn epistemic_past_structure(&self, i: usize) -> Option<Witness> {
        let f = &self.frame;
        if let Some(&j) = f.yesterday().pred(i).first() {
            return Some(Witness {
                states: vec![f.name(i).into()],
                arrows: vec![f.yesterday_arrow(j, i)],
                detail: Some("not a past state".into()),
            });
        }
        for (a, rel) in f.agents() {
            if !rel.contains(i, i) {
                return Some(Witness {
                    states: vec![f.name(i).into()],
                    arrows: vec![],
                    detail: Some(format!("missing `{a}` self-loop")),
                });
            }
            let stray = rel
                .succ(i)
                .iter()
                .map(|&j| (i, j))
                .chain(rel.pred(i).iter().map(|&j| (j, i)))
                .find(|&(x, y)| x != y);
            if let Some((x, y)) = stray {
                return Some(Witness {
                    states: vec![f.name(i).into()],
                    arrows: vec![f.agent_arrow(a, x, y)],
                    detail: Some("non-reflexive agent arrow".into()),
                });
            }
        }
        None
    }

    fn epistemic_past_failure(&self, i: usize, opts: &ValidityOptions) -> Result<Option<Witness>> {
        if let Some(w) = self.epistemic_past_structure(i) {
            return Ok(Some(w));
        }
        if !validity(&self.pre[i], self.signature(), opts)?.is_valid() {
            return Ok(Some(Witness {
                states: vec![self.frame.name(i).into()],
                arrows: vec![],
                detail: Some(format!("precondition `{}` is not valid", self.pre[i])),
            }));
        }
        Ok(None)
    }

    /// A past state with a valid precondition whose only agent arrows are
    /// the self-loops, one per agent.
    pub fn is_epistemic_past_state(&self, e: &str, opts: &ValidityOptions) -> Result<bool> {
        let i = self.require_event(e)?;
        Ok(self.epistemic_past_failure(i, opts)?.is_none())
    }

    /// For `s' ~> s`, `pre(s) -> pre(s')` is valid; and every past state is
    /// an epistemic past state.
    pub fn check_history_preservation(&self, opts: &ValidityOptions) -> Result<PropertyReport> {
        let f = &self.frame;
        for (sp, s) in f.yesterday().pairs() {
            let imp = Formula::implies(self.pre[s].clone(), self.pre[sp].clone());
            if !validity(&imp, self.signature(), opts)?.is_valid() {
                return Ok(PropertyReport::fail(
                    Property::HistoryPreservation,
                    Witness {
                        states: vec![f.name(sp).into(), f.name(s).into()],
                        arrows: vec![f.yesterday_arrow(sp, s)],
                        detail: Some(format!("`{imp}` is not valid")),
                    },
                ));
            }
        }
        for i in 0..f.len() {
            if !self.past_state_at(i) {
                continue;
            }
            if let Some(mut w) = self.epistemic_past_failure(i, opts)? {
                let d = w.detail.take().unwrap_or_default();
                w.detail = Some(format!("past state is not an epistemic past state: {d}"));
                return Ok(PropertyReport::fail(Property::HistoryPreservation, w));
            }
        }
        Ok(PropertyReport::pass(Property::HistoryPreservation))
    }

    /// History preservation, and every event backward-reachable from the
    /// point can continue backward to a past state.
    pub fn check_past_preservation(&self, point: &str, opts: &ValidityOptions) -> Result<PropertyReport> {
        let p = self.require_event(point)?;
        let hp = self.check_history_preservation(opts)?;
        if !hp.holds {
            return Ok(hp.relabel(Property::PastPreservation));
        }
        let f = &self.frame;
        let n = f.len();
        // events reachable forward from some past state
        let mut linked = vec![false; n];
        let mut stack: Vec<usize> = (0..n).filter(|&i| self.past_state_at(i)).collect();
        for &i in &stack {
            linked[i] = true;
        }
        while let Some(x) = stack.pop() {
            for &y in f.yesterday().succ(x) {
                if !linked[y] {
                    linked[y] = true;
                    stack.push(y);
                }
            }
        }
        let mut seen = vec![false; n];
        seen[p] = true;
        let mut stack = vec![p];
        while let Some(x) = stack.pop() {
            if !linked[x] {
                return Ok(PropertyReport::fail(
                    Property::PastPreservation,
                    Witness {
                        states: vec![f.name(p).into(), f.name(x).into()],
                        arrows: vec![],
                        detail: Some(format!("no past state is backward-reachable from `{}`", f.name(x))),
                    },
                ));
            }
            for &y in f.yesterday().pred(x) {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        Ok(PropertyReport::pass(Property::PastPreservation))
    }

    /// Past preservation and the point is not a past state.
    pub fn check_time_advancing(&self, point: &str, opts: &ValidityOptions) -> Result<PropertyReport> {
        let pp = self.check_past_preservation(point, opts)?;
        if !pp.holds {
            return Ok(pp.relabel(Property::TimeAdvancing));
        }
        let p = self.require_event(point)?;
        if self.past_state_at(p) {
            return Ok(PropertyReport::fail(
                Property::TimeAdvancing,
                Witness {
                    states: vec![point.to_string()],
                    arrows: vec![],
                    detail: Some("the point is a past state".into()),
                },
            ));
        }
        Ok(PropertyReport::pass(Property::TimeAdvancing))
    }

    /// The structural conditions read over events.
    pub fn check_action_property(&self, prop: Property) -> Result<PropertyReport> {
        self.frame.check_structural(prop).ok_or_else(|| {
            Error::Format(format!("property `{prop}` is not a structural action property"))
        })
    }

    /// Dispatches any property applicable to actions. Pointed properties
    /// need `point`. Persistence of facts holds vacuously.
    pub fn check_property(
        &self,
        prop: Property,
        point: Option<&str>,
        opts: &ValidityOptions,
    ) -> Result<PropertyReport> {
        let need_point = || {
            point.ok_or_else(|| Error::Format(format!("property `{prop}` needs a pointed action")))
        };
        match prop {
            Property::PersistenceOfFacts => Ok(PropertyReport::pass(prop)),
            Property::HistoryPreservation => self.check_history_preservation(opts),
            Property::PastPreservation => self.check_past_preservation(need_point()?, opts),
            Property::TimeAdvancing => self.check_time_advancing(need_point()?, opts),
            Property::Lrdetl => self.is_lrdetl_action(opts),
            Property::Restricted => Err(Error::Format(
                "property `restricted` applies to Kripke models".into(),
            )),
            p => self.check_action_property(p),
        }
    }

    /// Membership of the action in the restricted language: the structural
    /// conditions and history preservation, recursively for every action
    /// occurring in a precondition.
    pub fn is_lrdetl_action(&self, opts: &ValidityOptions) -> Result<PropertyReport> {
        let own = [
            Property::DepthDefinedness,
            Property::KnowledgeOfPast,
            Property::HistoryPreservation,
            Property::KnowledgeOfInitialTime,
            Property::UniquenessOfPast,
            Property::PerfectRecall,
        ];
        for prop in own {
            let r = if prop == Property::HistoryPreservation {
                self.check_history_preservation(opts)?
            } else {
                self.check_action_property(prop)?
            };
            if !r.holds {
                let mut w = r.witness.unwrap_or_default();
                w.detail = Some(match w.detail {
                    Some(d) => format!("`{}` fails {prop}: {d}", self.name),
                    None => format!("`{}` fails {prop}", self.name),
                });
                return Ok(PropertyReport::fail(Property::Lrdetl, w));
            }
        }
        for pre in &self.pre {
            for inner in pre.actions() {
                let r = inner.is_lrdetl_action(opts)?;
                if !r.holds {
                    return Ok(r);
                }
            }
        }
        Ok(PropertyReport::pass(Property::Lrdetl))
    }
}

/// Incremental construction of an action by name.
#[derive(Clone, Debug)]
pub struct ActionBuilder {
    name: String,
    sig: Signature,
    events: Vec<String>,
    pre: BTreeMap<String, Formula>,
    epistemic: BTreeMap<String, BTreeSet<(String, String)>>,
    yesterday: BTreeSet<(String, String)>,
    closure: Closure,
}

impl ActionBuilder {
    pub fn event(mut self, e: &str, pre: Formula) -> Self {
        self.events.push(e.to_string());
        self.pre.insert(e.to_string(), pre);
        self
    }

    pub fn arrow(mut self, agent: &str, from: &str, to: &str) -> Self {
        self.epistemic
            .entry(agent.to_string())
            .or_default()
            .insert((from.to_string(), to.to_string()));
        self
    }

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

    pub fn build(self) -> Result<ActionModel> {
        let u = ActionModel::new(
            &self.name,
            self.sig,
            self.events,
            &self.epistemic,
            &self.yesterday,
            &self.pre,
        )?;
        Ok(ActionModel {
            frame: u.frame.close(self.closure),
            ..u
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(["a", "b"], ["p", "q"]).unwrap()
    }

    fn announce(pre_t: Formula) -> ActionModel {
        ActionModel::builder("U", sig())
            .event("s", Formula::atom("p"))
            .event("t", pre_t)
            .yesterday("t", "s")
            .closure(Closure::Reflexive)
            .build()
            .unwrap()
    }

    fn opts() -> ValidityOptions {
        ValidityOptions::default()
    }

    #[test]
    fn past_states() {
        let u = announce(Formula::top());
        assert!(u.is_past_state("t").unwrap());
        assert!(!u.is_past_state("s").unwrap());
        assert!(u.is_epistemic_past_state("t", &opts()).unwrap());
        assert!(!u.is_epistemic_past_state("s", &opts()).unwrap());
        assert!(!u.is_atemporal());
        assert!(u.is_past_state("x").is_err());
    }

    #[test]
    fn announcement_is_time_advancing() {
        let u = announce(Formula::top());
        assert!(u.check_history_preservation(&opts()).unwrap().holds);
        assert!(u.check_past_preservation("s", &opts()).unwrap().holds);
        assert!(u.check_past_preservation("t", &opts()).unwrap().holds);
        assert!(u.check_time_advancing("s", &opts()).unwrap().holds);
        assert!(!u.check_time_advancing("t", &opts()).unwrap().holds);
        assert!(u.is_lrdetl_action(&opts()).unwrap().holds);
    }

    #[test]
    fn weaker_predecessor_breaks_history_preservation() {
        let u = announce(Formula::atom("q"));
        let r = u.check_history_preservation(&opts()).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witness.unwrap().states, vec!["t", "s"]);
    }

    #[test]
    fn stray_arrow_breaks_epistemic_past_state() {
        let u = ActionModel::builder("U", sig())
            .event("s", Formula::atom("p"))
            .event("t", Formula::top())
            .yesterday("t", "s")
            .arrow("a", "t", "s")
            .closure(Closure::Reflexive)
            .build()
            .unwrap();
        assert!(!u.is_epistemic_past_state("t", &opts()).unwrap());
        assert!(!u.check_history_preservation(&opts()).unwrap().holds);
    }

    #[test]
    fn cycle_has_no_link_to_the_past() {
        let u = ActionModel::builder("X", sig())
            .event("x", Formula::top())
            .yesterday("x", "x")
            .closure(Closure::Reflexive)
            .build()
            .unwrap();
        assert!(!u.check_past_preservation("x", &opts()).unwrap().holds);
    }

    #[test]
    fn missing_precondition_is_rejected() {
        let r = ActionModel::new(
            "U",
            sig(),
            ["s".to_string()],
            &BTreeMap::new(),
            &BTreeSet::new(),
            &BTreeMap::new(),
        );
        assert!(matches!(r, Err(Error::Malformed(_))));
    }
}
