//! Validity by reduction followed by a tableau for multimodal K.
//!
//! `[Y]` is one more normal box. Formulas are put in negation normal form
//! and interned; a tableau node is a sorted set of term ids. Disjunctions
//! branch semantically (`a`, or else `b` together with `~a`) and modal
//! successor sets are cached, so a set is expanded at most once.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::formula::{Formula, Signature};
use crate::kripke::KripkeModel;
use crate::logic::reduce;

/// Default bound on tableau nodes.
pub const DEFAULT_MAX_NODES: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ValidityOptions {
    pub max_nodes: usize,
}

impl Default for ValidityOptions {
    fn default() -> Self {
        ValidityOptions {
            max_nodes: DEFAULT_MAX_NODES,
        }
    }
}

/// Verdict of the validity oracle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    Valid,
    /// A finite pointed model falsifying the formula.
    Invalid { model: KripkeModel, world: String },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

type Id = usize;

/// Modality index: agents in signature order, then `[Y]`.
type Modality = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Term {
    Top,
    Bot,
    Lit(String, bool),
    And(Id, Id),
    Or(Id, Id),
    Box(Modality, Id),
    Dia(Modality, Id),
}

#[derive(Default)]
struct Arena {
    terms: Vec<Term>,
    ids: HashMap<Term, Id>,
    negs: HashMap<Id, Id>,
}

impl Arena {
    fn intern(&mut self, t: Term) -> Id {
        if let Some(&id) = self.ids.get(&t) {
            return id;
        }
        let id = self.terms.len();
        self.terms.push(t.clone());
        self.ids.insert(t, id);
        id
    }

    fn nnf(&mut self, f: &Formula, positive: bool, modality: &impl Fn(&str) -> Modality) -> Id {
        let t = match (f, positive) {
            (Formula::Bottom, true) => Term::Bot,
            (Formula::Bottom, false) => Term::Top,
            (Formula::Atom(p), pos) => Term::Lit(p.clone(), pos),
            (Formula::Not(g), pos) => return self.nnf(g, !pos, modality),
            (Formula::And(a, b), true) => {
                let (a, b) = (self.nnf(a, true, modality), self.nnf(b, true, modality));
                Term::And(a, b)
            }
            (Formula::And(a, b), false) => {
                let (a, b) = (self.nnf(a, false, modality), self.nnf(b, false, modality));
                Term::Or(a, b)
            }
            (Formula::Box(a, g), true) => Term::Box(modality(a), self.nnf(g, true, modality)),
            (Formula::Box(a, g), false) => Term::Dia(modality(a), self.nnf(g, false, modality)),
            (Formula::Yesterday(g), true) => Term::Box(modality("Y"), self.nnf(g, true, modality)),
            (Formula::Yesterday(g), false) => Term::Dia(modality("Y"), self.nnf(g, false, modality)),
            (Formula::Update(..), _) => unreachable!("reduced formulas are action-free"),
        };
        self.intern(t)
    }

    fn neg(&mut self, id: Id) -> Id {
        if let Some(&n) = self.negs.get(&id) {
            return n;
        }
        let t = match self.terms[id].clone() {
            Term::Top => Term::Bot,
            Term::Bot => Term::Top,
            Term::Lit(p, pos) => Term::Lit(p, !pos),
            Term::And(a, b) => Term::Or(self.neg(a), self.neg(b)),
            Term::Or(a, b) => Term::And(self.neg(a), self.neg(b)),
            Term::Box(m, a) => Term::Dia(m, self.neg(a)),
            Term::Dia(m, a) => Term::Box(m, self.neg(a)),
        };
        let n = self.intern(t);
        self.negs.insert(id, n);
        self.negs.insert(n, id);
        n
    }
}

/// A satisfying tree: true atoms and modal successors.
#[derive(Debug)]
struct Node {
    atoms: Vec<String>,
    children: Vec<(Modality, Rc<Node>)>,
}

struct Prover {
    arena: Arena,
    cache: HashMap<Vec<Id>, Option<Rc<Node>>>,
    nodes: usize,
    max_nodes: usize,
}

fn insert(set: &mut Vec<Id>, id: Id) {
    if let Err(pos) = set.binary_search(&id) {
        set.insert(pos, id);
    }
}

fn remove(set: &mut Vec<Id>, id: Id) {
    if let Ok(pos) = set.binary_search(&id) {
        set.remove(pos);
    }
}

impl Prover {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::ResourceExceeded(self.max_nodes));
        }
        Ok(())
    }

    fn closed(&mut self, set: &[Id]) -> bool {
        for &id in set {
            if self.arena.terms[id] == Term::Bot {
                return true;
            }
            let n = self.arena.neg(id);
            if set.binary_search(&n).is_ok() {
                return true;
            }
        }
        false
    }

    fn sat(&mut self, mut set: Vec<Id>) -> Result<Option<Rc<Node>>> {
        self.tick()?;
        // saturate conjunctions and drop trivial members
        loop {
            if self.closed(&set) {
                return Ok(None);
            }
            let pick = set.iter().copied().find(|&id| {
                matches!(self.arena.terms[id], Term::And(..) | Term::Top)
                    || matches!(self.arena.terms[id], Term::Or(a, b)
                        if set.binary_search(&a).is_ok() || set.binary_search(&b).is_ok())
            });
            let Some(id) = pick else { break };
            remove(&mut set, id);
            if let Term::And(a, b) = self.arena.terms[id] {
                insert(&mut set, a);
                insert(&mut set, b);
            }
        }
        let or = set
            .iter()
            .copied()
            .find(|&id| matches!(self.arena.terms[id], Term::Or(..)));
        if let Some(id) = or {
            let Term::Or(a, b) = self.arena.terms[id] else { unreachable!() };
            let mut left = set.clone();
            remove(&mut left, id);
            let mut right = left.clone();
            insert(&mut left, a);
            if let Some(n) = self.sat(left)? {
                return Ok(Some(n));
            }
            insert(&mut right, b);
            let na = self.arena.neg(a);
            insert(&mut right, na);
            return self.sat(right);
        }
        self.modal(set)
    }

    fn modal(&mut self, set: Vec<Id>) -> Result<Option<Rc<Node>>> {
        if let Some(r) = self.cache.get(&set) {
            return Ok(r.clone());
        }
        let mut atoms = Vec::new();
        let mut boxes: BTreeMap<Modality, Vec<Id>> = BTreeMap::new();
        let mut dias = Vec::new();
        for &id in &set {
            match &self.arena.terms[id] {
                Term::Lit(p, true) => atoms.push(p.clone()),
                Term::Box(m, a) => boxes.entry(*m).or_default().push(*a),
                Term::Dia(m, a) => dias.push((*m, *a)),
                _ => {}
            }
        }
        let mut children = Vec::new();
        let mut result = None;
        let mut open = true;
        for (m, a) in dias {
            let mut succ = boxes.get(&m).cloned().unwrap_or_default();
            succ.sort_unstable();
            succ.dedup();
            insert(&mut succ, a);
            match self.sat(succ)? {
                Some(child) => children.push((m, child)),
                None => {
                    open = false;
                    break;
                }
            }
        }
        if open {
            result = Some(Rc::new(Node { atoms, children }));
        }
        self.cache.insert(set, result.clone());
        Ok(result)
    }
}

fn countermodel(root: &Rc<Node>, sig: &Signature) -> Result<(KripkeModel, String)> {
    let agents: Vec<String> = sig.agents().map(str::to_string).collect();
    let mut ids: HashMap<*const Node, usize> = HashMap::new();
    let mut order: Vec<Rc<Node>> = Vec::new();
    let mut stack = vec![root.clone()];
    ids.insert(Rc::as_ptr(root), 0);
    order.push(root.clone());
    while let Some(n) = stack.pop() {
        for (_, c) in &n.children {
            if !ids.contains_key(&Rc::as_ptr(c)) {
                ids.insert(Rc::as_ptr(c), order.len());
                order.push(c.clone());
                stack.push(c.clone());
            }
        }
    }
    let name = |i: usize| format!("c{i}");
    let mut val: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut epistemic: BTreeMap<String, BTreeSet<(String, String)>> = BTreeMap::new();
    let mut yesterday = BTreeSet::new();
    for (i, n) in order.iter().enumerate() {
        for p in &n.atoms {
            val.entry(p.clone()).or_default().insert(name(i));
        }
        for (m, c) in &n.children {
            let j = ids[&Rc::as_ptr(c)];
            if *m < agents.len() {
                epistemic
                    .entry(agents[*m].clone())
                    .or_default()
                    .insert((name(i), name(j)));
            } else {
                // a Y-successor is a yesterday of its parent
                yesterday.insert((name(j), name(i)));
            }
        }
    }
    let model = KripkeModel::new(
        sig.clone(),
        (0..order.len()).map(name),
        &val,
        &epistemic,
        &yesterday,
    )?;
    Ok((model, name(0)))
}

/// Decides validity over all Kripke models. Invalid formulas come with a
/// countermodel; exceeding the node bound is an error.
pub fn validity(f: &Formula, sig: &Signature, opts: &ValidityOptions) -> Result<Validity> {
    f.check_signature(sig)?;
    let g = reduce(f);
    let agents: Vec<String> = sig.agents().map(str::to_string).collect();
    let y = agents.len();
    let modality = |a: &str| -> Modality {
        if a == "Y" {
            y
        } else {
            agents.iter().position(|b| b == a).expect("agent checked")
        }
    };
    let mut prover = Prover {
        arena: Arena::default(),
        cache: HashMap::new(),
        nodes: 0,
        max_nodes: opts.max_nodes,
    };
    let root = prover.arena.nnf(&g, false, &modality);
    match prover.sat(vec![root])? {
        None => Ok(Validity::Valid),
        Some(tree) => {
            let (model, world) = countermodel(&tree, sig)?;
            Ok(Validity::Invalid { model, world })
        }
    }
}
