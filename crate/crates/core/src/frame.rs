//! Finite relational skeleton shared by Kripke models and action models:
//! named states, one epistemic relation per agent and the yesterday relation.
//! The quantified structural conditions (knowledge of the past, perfect
//! recall, ...) are defined once here and read over worlds or events.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::formula::Signature;

/// A binary relation over `0..n`, stored as sorted successor and predecessor lists.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            succ: vec![Vec::new(); n],
            pred: vec![Vec::new(); n],
        }
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut r = Relation::empty(n);
        for (a, b) in pairs {
            r.succ[a].push(b);
            r.pred[b].push(a);
        }
        for v in r.succ.iter_mut().chain(r.pred.iter_mut()) {
            v.sort_unstable();
            v.dedup();
        }
        r
    }

    pub fn len(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.iter().all(Vec::is_empty)
    }

    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn succ(&self, a: usize) -> &[usize] {
        &self.succ[a]
    }

    pub fn pred(&self, b: usize) -> &[usize] {
        &self.pred[b]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.succ[a].binary_search(&b).is_ok()
    }

    /// Pairs in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b)))
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs().all(|(a, b)| other.contains(a, b))
    }
}

/// Closure operations applied to epistemic relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Closure {
    None,
    Reflexive,
    Transitive,
    Symmetric,
    S5,
}

impl Closure {
    pub fn name(self) -> &'static str {
        match self {
            Closure::None => "none",
            Closure::Reflexive => "reflexive",
            Closure::Transitive => "transitive",
            Closure::Symmetric => "symmetric",
            Closure::S5 => "s5",
        }
    }
}

impl std::str::FromStr for Closure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "none" => Closure::None,
            "reflexive" => Closure::Reflexive,
            "transitive" => Closure::Transitive,
            "symmetric" => Closure::Symmetric,
            "s5" => Closure::S5,
            other => return Err(Error::Format(format!("unknown closure `{other}`"))),
        })
    }
}

pub(crate) fn close_relation(r: &Relation, mode: Closure) -> Relation {
    let n = r.size();
    let mut m: Vec<Vec<bool>> = vec![vec![false; n]; n];
    for (a, b) in r.pairs() {
        m[a][b] = true;
    }
    let refl = matches!(mode, Closure::Reflexive | Closure::S5);
    let sym = matches!(mode, Closure::Symmetric | Closure::S5);
    let trans = matches!(mode, Closure::Transitive | Closure::S5);
    if refl {
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = true;
        }
    }
    if sym {
        for i in 0..n {
            for j in 0..n {
                if m[i][j] {
                    m[j][i] = true;
                }
            }
        }
    }
    if trans {
        for k in 0..n {
            for i in 0..n {
                if m[i][k] {
                    for j in 0..n {
                        if m[k][j] {
                            m[i][j] = true;
                        }
                    }
                }
            }
        }
    }
    Relation::from_pairs(
        n,
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| m[i][j]),
    )
}

/// Which relation an arrow belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ArrowKind {
    Agent(String),
    Yesterday,
}

/// A named arrow. For `Yesterday`, `from ~> to`: `from` is one tick before `to`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Arrow {
    pub kind: ArrowKind,
    pub from: String,
    pub to: String,
}

impl fmt::Display for Arrow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ArrowKind::Agent(a) => write!(f, "{} -{}-> {}", self.from, a, self.to),
            ArrowKind::Yesterday => write!(f, "{} ~> {}", self.from, self.to),
        }
    }
}

/// Finite depth or unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Depth {
    Finite(usize),
    Infinite,
}

impl Depth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Depth::Finite(n) => Some(n),
            Depth::Infinite => None,
        }
    }
}

impl fmt::Display for Depth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Depth::Finite(n) => write!(f, "{n}"),
            Depth::Infinite => f.write_str("inf"),
        }
    }
}

/// Named properties over models and actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    PersistenceOfFacts,
    DepthDefinedness,
    KnowledgeOfPast,
    KnowledgeOfInitialTime,
    UniquenessOfPast,
    PerfectRecall,
    Synchronicity,
    HistoryPreservation,
    PastPreservation,
    TimeAdvancing,
    Restricted,
    Lrdetl,
}

impl Property {
    pub const ALL: [Property; 12] = [
        Property::PersistenceOfFacts,
        Property::DepthDefinedness,
        Property::KnowledgeOfPast,
        Property::KnowledgeOfInitialTime,
        Property::UniquenessOfPast,
        Property::PerfectRecall,
        Property::Synchronicity,
        Property::HistoryPreservation,
        Property::PastPreservation,
        Property::TimeAdvancing,
        Property::Restricted,
        Property::Lrdetl,
    ];

    /// The structural conditions readable on any frame.
    pub const STRUCTURAL: [Property; 6] = [
        Property::DepthDefinedness,
        Property::KnowledgeOfPast,
        Property::KnowledgeOfInitialTime,
        Property::UniquenessOfPast,
        Property::PerfectRecall,
        Property::Synchronicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::PersistenceOfFacts => "persistence-of-facts",
            Property::DepthDefinedness => "depth-definedness",
            Property::KnowledgeOfPast => "knowledge-of-past",
            Property::KnowledgeOfInitialTime => "knowledge-of-initial-time",
            Property::UniquenessOfPast => "uniqueness-of-past",
            Property::PerfectRecall => "perfect-recall",
            Property::Synchronicity => "synchronicity",
            Property::HistoryPreservation => "history-preservation",
            Property::PastPreservation => "past-preservation",
            Property::TimeAdvancing => "time-advancing",
            Property::Restricted => "restricted",
            Property::Lrdetl => "lrdetl",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Property {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.replace('_', "-");
        Property::ALL
            .iter()
            .copied()
            .find(|p| p.name() == norm)
            .ok_or_else(|| Error::Format(format!("unknown property `{s}`")))
    }
}

/// Counterexample: the states bound by the violated condition, in binding
/// order, and the arrows the condition quantified over.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Witness {
    pub states: Vec<String>,
    pub arrows: Vec<Arrow>,
    pub detail: Option<String>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrows: Vec<String> = self.arrows.iter().map(ToString::to_string).collect();
        write!(f, "states=[{}]", self.states.join(", "))?;
        if !arrows.is_empty() {
            write!(f, " arrows=[{}]", arrows.join(", "))?;
        }
        if let Some(d) = &self.detail {
            write!(f, " ({d})")?;
        }
        Ok(())
    }
}

/// Verdict of a property check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PropertyReport {
    pub property: Property,
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl PropertyReport {
    pub fn pass(property: Property) -> Self {
        PropertyReport {
            property,
            holds: true,
            witness: None,
        }
    }

    pub fn fail(property: Property, witness: Witness) -> Self {
        PropertyReport {
            property,
            holds: false,
            witness: Some(witness),
        }
    }

    /// Renames the property while keeping the verdict and witness.
    pub(crate) fn relabel(mut self, property: Property) -> Self {
        self.property = property;
        self
    }
}

impl fmt::Display for PropertyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds {
            write!(f, "PASS: {}", self.property)
        } else {
            write!(f, "FAIL: {}", self.property)?;
            if let Some(w) = &self.witness {
                write!(f, " WITNESS: {w}")?;
            }
            Ok(())
        }
    }
}

/// States, agent relations and the yesterday relation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Frame {
    sig: Signature,
    names: Vec<String>,
    epistemic: BTreeMap<String, Relation>,
    yesterday: Relation,
}

impl Frame {
    /// Builds a frame from named states and arrows. Names are sorted.
    pub fn from_names(
        sig: Signature,
        names: impl IntoIterator<Item = String>,
        epistemic: &BTreeMap<String, BTreeSet<(String, String)>>,
        yesterday: &BTreeSet<(String, String)>,
    ) -> Result<Self> {
        let names: BTreeSet<String> = names.into_iter().collect();
        if names.is_empty() {
            return Err(Error::Malformed("the state set is empty".into()));
        }
        let names: Vec<String> = names.into_iter().collect();
        let idx = |s: &str| -> Result<usize> {
            names
                .binary_search_by(|n| n.as_str().cmp(s))
                .map_err(|_| Error::UnknownWorld(s.to_string()))
        };
        for a in epistemic.keys() {
            if !sig.has_agent(a) {
                return Err(Error::UnknownAgent(a.clone()));
            }
        }
        let n = names.len();
        let mut rels = BTreeMap::new();
        for a in sig.agents() {
            let mut pairs = Vec::new();
            if let Some(set) = epistemic.get(a) {
                for (x, y) in set {
                    pairs.push((idx(x)?, idx(y)?));
                }
            }
            rels.insert(a.to_string(), Relation::from_pairs(n, pairs));
        }
        let mut ypairs = Vec::new();
        for (x, y) in yesterday {
            ypairs.push((idx(x)?, idx(y)?));
        }
        let yesterday = Relation::from_pairs(n, ypairs);
        Ok(Frame {
            sig,
            names,
            epistemic: rels,
            yesterday,
        })
    }

    /// Builds a frame over already sorted, unique names.
    pub(crate) fn from_indexed(
        sig: Signature,
        names: Vec<String>,
        epistemic: BTreeMap<String, Relation>,
        yesterday: Relation,
    ) -> Self {
        debug_assert!(names.windows(2).all(|w| w[0] < w[1]));
        debug_assert_eq!(epistemic.len(), sig.agent_count());
        Frame {
            sig,
            names,
            epistemic,
            yesterday,
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.names.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn agent(&self, a: &str) -> Option<&Relation> {
        self.epistemic.get(a)
    }

    pub fn agents(&self) -> impl Iterator<Item = (&str, &Relation)> + '_ {
        self.epistemic.iter().map(|(a, r)| (a.as_str(), r))
    }

    /// The yesterday relation: `(x, y)` means `x ~> y`.
    pub fn yesterday(&self) -> &Relation {
        &self.yesterday
    }

    pub(crate) fn with_epistemic(&self, epistemic: BTreeMap<String, Relation>) -> Frame {
        Frame {
            epistemic,
            ..self.clone()
        }
    }

    pub fn close(&self, mode: Closure) -> Frame {
        if mode == Closure::None {
            return self.clone();
        }
        let epistemic = self
            .epistemic
            .iter()
            .map(|(a, r)| (a.clone(), close_relation(r, mode)))
            .collect();
        self.with_epistemic(epistemic)
    }

    pub fn has_past(&self, i: usize) -> bool {
        !self.yesterday.pred(i).is_empty()
    }

    pub fn agent_arrow(&self, agent: &str, x: usize, y: usize) -> Arrow {
        Arrow {
            kind: ArrowKind::Agent(agent.to_string()),
            from: self.names[x].clone(),
            to: self.names[y].clone(),
        }
    }

    pub fn yesterday_arrow(&self, x: usize, y: usize) -> Arrow {
        Arrow {
            kind: ArrowKind::Yesterday,
            from: self.names[x].clone(),
            to: self.names[y].clone(),
        }
    }

    /// Depth of every state: longest history ending there, or infinite when a
    /// yesterday-cycle is backward-reachable.
    pub fn depths(&self) -> Vec<Depth> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done(Depth),
        }
        let n = self.len();
        let mut mark = vec![Mark::New; n];
        for root in 0..n {
            if mark[root] != Mark::New {
                continue;
            }
            // Explicit DFS over predecessors; frames are (state, next pred index).
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            mark[root] = Mark::Open;
            while let Some(&mut (v, ref mut k)) = stack.last_mut() {
                let preds = self.yesterday.pred(v);
                if *k < preds.len() {
                    let u = preds[*k];
                    *k += 1;
                    match mark[u] {
                        Mark::New => {
                            mark[u] = Mark::Open;
                            stack.push((u, 0));
                        }
                        Mark::Open => {
                            // cycle: everything open that reaches it is unbounded
                            mark[u] = Mark::Done(Depth::Infinite);
                        }
                        Mark::Done(_) => {}
                    }
                } else {
                    stack.pop();
                    let mut d = Depth::Finite(0);
                    if let Mark::Done(Depth::Infinite) = mark[v] {
                        d = Depth::Infinite;
                    }
                    for &u in preds {
                        d = match (d, mark[u]) {
                            (Depth::Infinite, _) => Depth::Infinite,
                            (_, Mark::Done(Depth::Infinite)) | (_, Mark::Open) => Depth::Infinite,
                            (Depth::Finite(a), Mark::Done(Depth::Finite(b))) => {
                                Depth::Finite(a.max(b + 1))
                            }
                            (_, Mark::New) => unreachable!("predecessor left unvisited"),
                        };
                    }
                    mark[v] = Mark::Done(d);
                }
            }
        }
        mark.into_iter()
            .map(|m| match m {
                Mark::Done(d) => d,
                _ => unreachable!(),
            })
            .collect()
    }

    /// A yesterday-cycle backward-reachable from `start`, as arrows.
    fn backward_cycle(&self, start: usize) -> Vec<Arrow> {
        // walk backward, always choosing a predecessor that can still reach a cycle
        let depths = self.depths();
        let mut seen: Vec<Option<usize>> = vec![None; self.len()];
        let mut path = vec![start];
        let mut v = start;
        seen[v] = Some(0);
        loop {
            let next = self
                .yesterday
                .pred(v)
                .iter()
                .copied()
                .find(|&u| depths[u] == Depth::Infinite)
                .or_else(|| self.yesterday.pred(v).first().copied());
            let Some(u) = next else { return Vec::new() };
            if let Some(pos) = seen[u] {
                // path[pos] = u, ..., path[last] = v, and u ~> ... ~> v ~> ...
                let cycle = &path[pos..];
                let mut arrows = Vec::new();
                for w in cycle.windows(2) {
                    arrows.push(self.yesterday_arrow(w[1], w[0]));
                }
                arrows.push(self.yesterday_arrow(u, v));
                return arrows;
            }
            seen[u] = Some(path.len());
            path.push(u);
            v = u;
        }
    }

    pub fn check_depth_definedness(&self) -> PropertyReport {
        let depths = self.depths();
        match depths.iter().position(|d| *d == Depth::Infinite) {
            None => PropertyReport::pass(Property::DepthDefinedness),
            Some(w) => {
                let arrows = self.backward_cycle(w);
                let self_loop = arrows.len() == 1 && arrows[0].from == arrows[0].to;
                PropertyReport::fail(
                    Property::DepthDefinedness,
                    Witness {
                        states: vec![self.names[w].clone()],
                        arrows,
                        detail: Some(if self_loop {
                            "infinite depth: yesterday self-loop".into()
                        } else {
                            "infinite depth: backward-reachable yesterday cycle".into()
                        }),
                    },
                )
            }
        }
    }

    /// `w' ~> w -a-> v` implies `v` has a yesterday.
    pub fn check_knowledge_of_past(&self) -> PropertyReport {
        for (w_prev, w) in self.yesterday.pairs() {
            for (a, rel) in self.agents() {
                for &v in rel.succ(w) {
                    if !self.has_past(v) {
                        return PropertyReport::fail(
                            Property::KnowledgeOfPast,
                            Witness {
                                states: vec![
                                    self.names[w_prev].clone(),
                                    self.names[w].clone(),
                                    self.names[v].clone(),
                                ],
                                arrows: vec![
                                    self.yesterday_arrow(w_prev, w),
                                    self.agent_arrow(a, w, v),
                                ],
                                detail: Some(format!("`{}` has no yesterday", self.names[v])),
                            },
                        );
                    }
                }
            }
        }
        PropertyReport::pass(Property::KnowledgeOfPast)
    }

    /// `w -a-> v` and `w` has no yesterday implies `v` has none.
    pub fn check_knowledge_of_initial_time(&self) -> PropertyReport {
        for (a, rel) in self.agents() {
            for (w, v) in rel.pairs() {
                if self.has_past(w) {
                    continue;
                }
                if let Some(&v_prev) = self.yesterday.pred(v).first() {
                    return PropertyReport::fail(
                        Property::KnowledgeOfInitialTime,
                        Witness {
                            states: vec![
                                self.names[w].clone(),
                                self.names[v].clone(),
                                self.names[v_prev].clone(),
                            ],
                            arrows: vec![self.agent_arrow(a, w, v), self.yesterday_arrow(v_prev, v)],
                            detail: Some(format!("`{}` has no yesterday", self.names[w])),
                        },
                    );
                }
            }
        }
        PropertyReport::pass(Property::KnowledgeOfInitialTime)
    }

    /// `w' ~> w` and `w'' ~> w` implies `w' = w''`.
    pub fn check_uniqueness_of_past(&self) -> PropertyReport {
        for w in 0..self.len() {
            let preds = self.yesterday.pred(w);
            if preds.len() > 1 {
                let (p1, p2) = (preds[0], preds[1]);
                return PropertyReport::fail(
                    Property::UniquenessOfPast,
                    Witness {
                        states: vec![
                            self.names[p1].clone(),
                            self.names[w].clone(),
                            self.names[p2].clone(),
                        ],
                        arrows: vec![self.yesterday_arrow(p1, w), self.yesterday_arrow(p2, w)],
                        detail: None,
                    },
                );
            }
        }
        PropertyReport::pass(Property::UniquenessOfPast)
    }

    /// `w ~> v -a-> v'` implies some `w'` with `w -a-> w' ~> v'`.
    pub fn check_perfect_recall(&self) -> PropertyReport {
        for (w, v) in self.yesterday.pairs() {
            for (a, rel) in self.agents() {
                for &v2 in rel.succ(v) {
                    let ok = rel
                        .succ(w)
                        .iter()
                        .any(|&w2| self.yesterday.contains(w2, v2));
                    if !ok {
                        return PropertyReport::fail(
                            Property::PerfectRecall,
                            Witness {
                                states: vec![
                                    self.names[w].clone(),
                                    self.names[v].clone(),
                                    self.names[v2].clone(),
                                ],
                                arrows: vec![self.yesterday_arrow(w, v), self.agent_arrow(a, v, v2)],
                                detail: Some(format!(
                                    "no `{}`-successor of `{}` is a yesterday of `{}`",
                                    a, self.names[w], self.names[v2]
                                )),
                            },
                        );
                    }
                }
            }
        }
        PropertyReport::pass(Property::PerfectRecall)
    }

    /// Depth-defined and epistemically related states have equal depth.
    pub fn check_synchronicity(&self) -> PropertyReport {
        let dd = self.check_depth_definedness();
        if !dd.holds {
            return dd.relabel(Property::Synchronicity);
        }
        let depths = self.depths();
        for (a, rel) in self.agents() {
            for (w, v) in rel.pairs() {
                if depths[w] != depths[v] {
                    return PropertyReport::fail(
                        Property::Synchronicity,
                        Witness {
                            states: vec![self.names[w].clone(), self.names[v].clone()],
                            arrows: vec![self.agent_arrow(a, w, v)],
                            detail: Some(format!("depths {} and {}", depths[w], depths[v])),
                        },
                    );
                }
            }
        }
        PropertyReport::pass(Property::Synchronicity)
    }

    /// Dispatches one of the structural conditions.
    pub fn check_structural(&self, prop: Property) -> Option<PropertyReport> {
        Some(match prop {
            Property::DepthDefinedness => self.check_depth_definedness(),
            Property::KnowledgeOfPast => self.check_knowledge_of_past(),
            Property::KnowledgeOfInitialTime => self.check_knowledge_of_initial_time(),
            Property::UniquenessOfPast => self.check_uniqueness_of_past(),
            Property::PerfectRecall => self.check_perfect_recall(),
            Property::Synchronicity => self.check_synchronicity(),
            _ => return None,
        })
    }
}
