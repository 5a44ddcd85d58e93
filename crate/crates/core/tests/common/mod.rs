//! Seeded generators for models, actions and formulas, and independent
//! oracles used to cross-check the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use detl::formula::Formula;
use detl::{ActionModel, KripkeModel, Signature};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sig() -> Signature {
    Signature::new(["a", "b"], ["p", "q"]).unwrap()
}

pub const AGENTS: [&str; 2] = ["a", "b"];
pub const ATOMS: [&str; 2] = ["p", "q"];

/// Raw material for a model or action: names, arrows and yesterday pairs.
#[derive(Clone, Debug, Default)]
pub struct Graph {
    pub n: usize,
    pub agent: BTreeMap<String, BTreeSet<(usize, usize)>>,
    pub yesterday: BTreeSet<(usize, usize)>,
}

impl Graph {
    fn new(n: usize) -> Self {
        let agent = AGENTS.iter().map(|a| (a.to_string(), BTreeSet::new())).collect();
        Graph {
            n,
            agent,
            yesterday: BTreeSet::new(),
        }
    }

    fn named(&self, prefix: &str) -> (Vec<String>, BTreeMap<String, BTreeSet<(String, String)>>, BTreeSet<(String, String)>) {
        let name = |i: usize| format!("{prefix}{i}");
        let names = (0..self.n).map(name).collect();
        let agent = self
            .agent
            .iter()
            .map(|(a, ps)| (a.clone(), ps.iter().map(|&(x, y)| (name(x), name(y))).collect()))
            .collect();
        let y = self.yesterday.iter().map(|&(x, y)| (name(x), name(y))).collect();
        (names, agent, y)
    }
}

fn model_from(g: &Graph, val: &[Vec<bool>]) -> KripkeModel {
    let (names, agent, y) = g.named("w");
    let mut v: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (k, p) in ATOMS.iter().enumerate() {
        let ws = (0..g.n).filter(|&i| val[i][k]).map(|i| names[i].clone()).collect();
        v.insert(p.to_string(), ws);
    }
    KripkeModel::new(sig(), names, &v, &agent, &y).unwrap()
}

fn random_val(r: &mut TestRng, n: usize) -> Vec<Vec<bool>> {
    (0..n).map(|_| ATOMS.iter().map(|_| r.random_bool(0.5)).collect()).collect()
}

/// Any model: arbitrary arrows, yesterday cycles allowed.
pub fn random_model(r: &mut TestRng, max_worlds: usize) -> KripkeModel {
    let n = r.random_range(1..=max_worlds);
    let mut g = Graph::new(n);
    let pa = r.random_range(0.2..0.7);
    let py = r.random_range(0.0..0.4);
    for set in g.agent.values_mut() {
        for x in 0..n {
            for y in 0..n {
                if r.random_bool(pa) {
                    set.insert((x, y));
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            if r.random_bool(py) {
                g.yesterday.insert((x, y));
            }
        }
    }
    model_from(&g, &random_val(r, n))
}

/// Yesterday arrows only go from lower to higher index, so every world has
/// finite depth. With `unique_past` each world has at most one yesterday.
pub fn random_dag_model(r: &mut TestRng, max_worlds: usize, unique_past: bool) -> KripkeModel {
    let n = r.random_range(1..=max_worlds);
    let mut g = Graph::new(n);
    let pa = r.random_range(0.2..0.7);
    for set in g.agent.values_mut() {
        for x in 0..n {
            for y in 0..n {
                if r.random_bool(pa) {
                    set.insert((x, y));
                }
            }
        }
    }
    for y in 1..n {
        if unique_past {
            if r.random_bool(0.6) {
                g.yesterday.insert((r.random_range(0..y), y));
            }
        } else {
            for x in 0..y {
                if r.random_bool(0.35) {
                    g.yesterday.insert((x, y));
                }
            }
        }
    }
    model_from(&g, &random_val(r, n))
}

/// A restricted model: a forest of histories, facts inherited along each
/// branch, and agent arrows only between two initial worlds or between two
/// later worlds whose yesterdays are related. Every restricted model has
/// this shape.
pub fn random_restricted_model(r: &mut TestRng, max_worlds: usize) -> KripkeModel {
    let n = r.random_range(1..=max_worlds);
    let mut g = Graph::new(n);
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut val = random_val(r, n);
    for i in 1..n {
        if r.random_bool(0.6) {
            let p = r.random_range(0..i);
            parent[i] = Some(p);
            g.yesterday.insert((p, i));
            val[i] = val[p].clone();
        }
    }
    let pa = r.random_range(0.3..0.9);
    let reflexive = r.random_bool(0.5);
    for set in g.agent.values_mut() {
        for x in 0..n {
            for y in 0..n {
                let allowed = match (parent[x], parent[y]) {
                    (None, None) => true,
                    (Some(px), Some(py)) => set.contains(&(px, py)),
                    _ => false,
                };
                if allowed && ((reflexive && x == y) || r.random_bool(pa)) {
                    set.insert((x, y));
                }
            }
        }
    }
    let m = model_from(&g, &val);
    debug_assert!(m.is_restricted().holds);
    m
}

/// One of the model generators above, chosen at random.
pub fn random_mixed_model(r: &mut TestRng, max_worlds: usize) -> KripkeModel {
    match r.random_range(0..4) {
        0 => random_model(r, max_worlds),
        1 => random_dag_model(r, max_worlds, false),
        2 => random_dag_model(r, max_worlds, true),
        _ => random_restricted_model(r, max_worlds),
    }
}

/// Random formula of modal depth at most `depth`. Update modalities draw
/// from `actions`, at most `updates` of them along any branch.
pub fn random_formula(r: &mut TestRng, depth: usize, actions: &[Arc<ActionModel>], updates: usize) -> Formula {
    let leaf = |r: &mut TestRng| match r.random_range(0..6) {
        0 => Formula::Bottom,
        1 => Formula::top(),
        2 | 3 => Formula::atom("p"),
        _ => Formula::atom("q"),
    };
    if depth == 0 {
        return match r.random_range(0..3) {
            0 => Formula::not(leaf(r)),
            1 => Formula::and(leaf(r), leaf(r)),
            _ => leaf(r),
        };
    }
    let agent = |r: &mut TestRng| AGENTS[r.random_range(0..AGENTS.len())].to_string();
    let pick = if updates > 0 && !actions.is_empty() { 10 } else { 9 };
    match r.random_range(0..pick) {
        0 => leaf(r),
        1 => Formula::not(random_formula(r, depth, actions, updates)),
        2 => Formula::and(random_formula(r, depth - 1, actions, updates), random_formula(r, depth - 1, actions, updates)),
        3 => Formula::or(random_formula(r, depth - 1, actions, updates), random_formula(r, depth - 1, actions, updates)),
        4 => Formula::implies(random_formula(r, depth - 1, actions, updates), random_formula(r, depth - 1, actions, updates)),
        5 => Formula::boxed(agent(r), random_formula(r, depth - 1, actions, updates)),
        6 => Formula::diamond(agent(r), random_formula(r, depth - 1, actions, updates)),
        7 => Formula::yesterday(random_formula(r, depth - 1, actions, updates)),
        8 => Formula::yesterday_diamond(random_formula(r, depth - 1, actions, updates)),
        _ => {
            let u = actions[r.random_range(0..actions.len())].clone();
            let e = u.events()[r.random_range(0..u.len())].clone();
            let body = random_formula(r, depth - 1, actions, updates - 1);
            if r.random_bool(0.5) {
                Formula::update(u, e, body)
            } else {
                Formula::update_diamond(u, e, body)
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ActionShape {
    pub max_events: usize,
    /// Allow yesterday arrows between events.
    pub temporal: bool,
    /// Yesterday arrows only from lower to higher index.
    pub acyclic: bool,
    pub arrow_p: f64,
}

impl Default for ActionShape {
    fn default() -> Self {
        ActionShape {
            max_events: 3,
            temporal: true,
            acyclic: false,
            arrow_p: 0.5,
        }
    }
}

fn build_action(name: &str, g: &Graph, pre: Vec<Formula>) -> ActionModel {
    let (names, agent, y) = g.named("e");
    let pre: BTreeMap<String, Formula> = names.iter().cloned().zip(pre).collect();
    ActionModel::new(name, sig(), names, &agent, &y, &pre).unwrap()
}

fn random_graph(r: &mut TestRng, shape: &ActionShape) -> Graph {
    let n = r.random_range(1..=shape.max_events);
    let mut g = Graph::new(n);
    for set in g.agent.values_mut() {
        for x in 0..n {
            for y in 0..n {
                if r.random_bool(shape.arrow_p) {
                    set.insert((x, y));
                }
            }
        }
    }
    if shape.temporal {
        for x in 0..n {
            for y in 0..n {
                if (!shape.acyclic || x < y) && r.random_bool(0.35) {
                    g.yesterday.insert((x, y));
                }
            }
        }
    }
    g
}

/// Any action; preconditions of modal depth at most one, possibly with
/// updates drawn from `nested`.
pub fn random_action(r: &mut TestRng, name: &str, shape: &ActionShape, nested: &[Arc<ActionModel>]) -> ActionModel {
    let g = random_graph(r, shape);
    let budget = usize::from(!nested.is_empty());
    let pre = (0..g.n).map(|_| random_formula(r, 1, nested, budget)).collect();
    build_action(name, &g, pre)
}

/// A history-preserving action: past states are epistemic past states with
/// precondition `true`, and every other precondition conjoins the
/// preconditions of its yesterdays.
pub fn random_history_preserving_action(r: &mut TestRng, name: &str, shape: &ActionShape) -> ActionModel {
    let mut g = random_graph(r, &ActionShape { acyclic: true, ..*shape });
    let n = g.n;
    let past: Vec<bool> = (0..n).map(|i| !g.yesterday.iter().any(|&(_, y)| y == i)).collect();
    for set in g.agent.values_mut() {
        set.retain(|&(x, y)| !past[x] && !past[y]);
        for i in 0..n {
            if past[i] {
                set.insert((i, i));
            }
        }
    }
    let mut pre: Vec<Formula> = Vec::with_capacity(n);
    for i in 0..n {
        if past[i] {
            pre.push(Formula::top());
            continue;
        }
        let own = random_formula(r, 1, &[], 0);
        let inherited = g.yesterday.iter().filter(|&&(_, y)| y == i).map(|&(x, _)| pre[x].clone());
        pre.push(Formula::conjunction(inherited.chain([own])));
    }
    build_action(name, &g, pre)
}

/// An atemporal action with action-free preconditions of depth at most one.
pub fn random_atemporal_action(r: &mut TestRng, name: &str, max_events: usize) -> ActionModel {
    let shape = ActionShape {
        max_events,
        temporal: false,
        ..ActionShape::default()
    };
    random_action(r, name, &shape, &[])
}

/// Independent check of the bisimulation conditions for a relation between
/// worlds of `m` and `n`: nonempty, atoms agree, and back and forth along
/// every agent relation and along yesterday predecessors.
pub fn is_bisimulation(m: &KripkeModel, n: &KripkeModel, pairs: &[(String, String)]) -> bool {
    if pairs.is_empty() {
        return false;
    }
    let idx: BTreeSet<(usize, usize)> = pairs
        .iter()
        .map(|(x, y)| (m.world_index(x).unwrap(), n.world_index(y).unwrap()))
        .collect();
    let related = |x: usize, y: usize| idx.contains(&(x, y));
    for &(x, y) in &idx {
        for p in ATOMS {
            if m.holds(p, x) != n.holds(p, y) {
                return false;
            }
        }
        let mut rels: Vec<(Vec<usize>, Vec<usize>)> = AGENTS
            .iter()
            .map(|a| {
                (
                    m.frame().agent(a).unwrap().succ(x).to_vec(),
                    n.frame().agent(a).unwrap().succ(y).to_vec(),
                )
            })
            .collect();
        rels.push((m.frame().yesterday().pred(x).to_vec(), n.frame().yesterday().pred(y).to_vec()));
        for (sx, sy) in rels {
            if !sx.iter().all(|&x2| sy.iter().any(|&y2| related(x2, y2))) {
                return false;
            }
            if !sy.iter().all(|&y2| sx.iter().any(|&x2| related(x2, y2))) {
                return false;
            }
        }
    }
    true
}

/// Longest history ending at each world by memoized search, or `None` for
/// unbounded depth. Written independently of the library's depth routine.
pub fn oracle_depths(m: &KripkeModel) -> Vec<Option<usize>> {
    fn go(m: &KripkeModel, w: usize, memo: &mut Vec<Option<Option<usize>>>, stack: &mut Vec<bool>) -> Option<usize> {
        if let Some(d) = memo[w] {
            return d;
        }
        if stack[w] {
            return None;
        }
        stack[w] = true;
        let mut best = Some(0);
        for &v in m.frame().yesterday().pred(w) {
            best = match (best, go(m, v, memo, stack)) {
                (Some(b), Some(d)) => Some(b.max(d + 1)),
                _ => None,
            };
        }
        stack[w] = false;
        memo[w] = Some(best);
        best
    }
    let mut memo = vec![None; m.len()];
    let mut stack = vec![false; m.len()];
    (0..m.len()).map(|w| go(m, w, &mut memo, &mut stack)).collect()
}

fn upd(u: &Arc<ActionModel>, s: &str, f: Formula) -> Formula {
    Formula::update(u.clone(), s, f)
}

/// The update reduction axioms of the plain theory at `(u, s)` with body `phi`.
pub fn reduction_axioms(u: &Arc<ActionModel>, s: &str, phi: &Formula, psi: &Formula) -> Vec<Formula> {
    let i = u.event_index(s).unwrap();
    let pre = u.pre(i).clone();
    let mut out = Vec::new();
    for q in ATOMS {
        out.push(Formula::iff(upd(u, s, Formula::atom(q)), Formula::implies(pre.clone(), Formula::atom(q))));
    }
    out.push(Formula::iff(
        upd(u, s, Formula::and(phi.clone(), psi.clone())),
        Formula::and(upd(u, s, phi.clone()), upd(u, s, psi.clone())),
    ));
    out.push(Formula::iff(
        upd(u, s, Formula::not(phi.clone())),
        Formula::implies(pre.clone(), Formula::not(upd(u, s, phi.clone()))),
    ));
    for a in AGENTS {
        let succ = u.frame().agent(a).unwrap().succ(i);
        let conj = Formula::conjunction(succ.iter().map(|&j| Formula::boxed(a, upd(u, u.events()[j].as_str(), phi.clone()))));
        out.push(Formula::iff(
            upd(u, s, Formula::boxed(a, phi.clone())),
            Formula::implies(pre.clone(), conj),
        ));
    }
    let preds = u.frame().yesterday().pred(i);
    let rhs = if preds.is_empty() {
        Formula::yesterday(upd(u, s, phi.clone()))
    } else {
        Formula::conjunction(preds.iter().map(|&j| upd(u, u.events()[j].as_str(), phi.clone())))
    };
    out.push(Formula::iff(
        upd(u, s, Formula::yesterday(phi.clone())),
        Formula::implies(pre, rhs),
    ));
    out
}

/// Normality of every box, for pooled `phi` and `psi`.
pub fn normality_axioms(phi: &Formula, psi: &Formula) -> Vec<Formula> {
    let k = |b: &dyn Fn(Formula) -> Formula| {
        Formula::implies(
            b(Formula::implies(phi.clone(), psi.clone())),
            Formula::implies(b(phi.clone()), b(psi.clone())),
        )
    };
    let mut out: Vec<Formula> = AGENTS.iter().map(|a| k(&|f| Formula::boxed(*a, f))).collect();
    out.push(k(&Formula::yesterday));
    out
}

/// The frame axioms of the restricted theories for pooled `phi`.
pub fn restricted_axioms(phi: &Formula) -> Vec<Formula> {
    let y = Formula::yesterday;
    let bot = || Formula::Bottom;
    let mut out = Vec::new();
    for q in ATOMS {
        out.push(Formula::iff(
            y(Formula::atom(q)),
            Formula::implies(Formula::not(y(bot())), Formula::atom(q)),
        ));
    }
    out.push(Formula::implies(Formula::not(y(phi.clone())), y(Formula::not(phi.clone()))));
    for a in AGENTS {
        out.push(Formula::implies(
            y(Formula::boxed(a, phi.clone())),
            Formula::boxed(a, y(phi.clone())),
        ));
        out.push(Formula::implies(
            Formula::not(y(bot())),
            Formula::boxed(a, Formula::not(y(bot()))),
        ));
        out.push(Formula::implies(y(bot()), Formula::boxed(a, y(bot()))));
    }
    out
}

/// The update axioms of the YDEL theory: as the plain ones, except that
/// `[U,s][Y]phi` reduces to `pre(s) -> phi`.
pub fn ydel_reduction_axioms(u: &Arc<ActionModel>, s: &str, phi: &Formula, psi: &Formula) -> Vec<Formula> {
    let mut out = reduction_axioms(u, s, phi, psi);
    out.pop();
    let pre = u.pre_of(s).unwrap().clone();
    out.push(Formula::iff(
        upd(u, s, Formula::yesterday(phi.clone())),
        Formula::implies(pre, phi.clone()),
    ));
    out
}

/// The seven items of the preservation theorem, keyed `'a'..='g'`.
pub const PRESERVATION_ITEMS: [char; 7] = ['a', 'b', 'c', 'd', 'e', 'f', 'g'];

fn holds_m(m: &KripkeModel, p: detl::Property) -> bool {
    m.check_property(p).unwrap().holds
}

fn holds_u(u: &ActionModel, p: detl::Property) -> bool {
    u.check_action_property(p).unwrap().holds
}

fn history_preserving(u: &ActionModel) -> bool {
    u.check_history_preservation(&detl::logic::ValidityOptions::default())
        .unwrap()
        .holds
}

/// Draws `(M, U)` satisfying the hypotheses of `item`, with a nonempty
/// product, or `None` if `tries` draws all miss.
pub fn preservation_instance(r: &mut TestRng, item: char, tries: usize) -> Option<(KripkeModel, ActionModel)> {
    use detl::Property as P;
    for _ in 0..tries {
        let m = random_mixed_model(r, 4);
        let hp_shape = ActionShape { max_events: 4, ..ActionShape::default() };
        let u = match item {
            'c' | 'd' | 'f' | 'g' => random_history_preserving_action(r, "U", &hp_shape),
            'b' => {
                let acyclic = r.random_bool(0.8);
                random_action(r, "U", &ActionShape { acyclic, ..ActionShape::default() }, &[])
            }
            _ => random_action(r, "U", &ActionShape::default(), &[]),
        };
        let ok = match item {
            'a' => holds_m(&m, P::PersistenceOfFacts),
            'b' => holds_m(&m, P::DepthDefinedness) && holds_u(&u, P::DepthDefinedness),
            'c' => holds_m(&m, P::KnowledgeOfPast) && holds_u(&u, P::KnowledgeOfPast) && history_preserving(&u),
            'd' => holds_m(&m, P::KnowledgeOfInitialTime) && history_preserving(&u),
            'e' => holds_m(&m, P::UniquenessOfPast) && holds_u(&u, P::UniquenessOfPast),
            'f' => holds_m(&m, P::PerfectRecall) && holds_u(&u, P::PerfectRecall) && history_preserving(&u),
            'g' => holds_m(&m, P::Synchronicity) && holds_u(&u, P::Synchronicity) && history_preserving(&u),
            _ => unreachable!(),
        };
        if ok && detl::semantics::product_update(&m, &u).is_ok() {
            return Some((m, u));
        }
    }
    None
}

/// The conclusion of `item` for the updated model.
pub fn preservation_conclusion(item: char, mu: &KripkeModel) -> bool {
    use detl::Property as P;
    let p = match item {
        'a' => P::PersistenceOfFacts,
        'b' => P::DepthDefinedness,
        'c' => P::KnowledgeOfPast,
        'd' => P::KnowledgeOfInitialTime,
        'e' => P::UniquenessOfPast,
        'f' => P::PerfectRecall,
        'g' => P::Synchronicity,
        _ => unreachable!(),
    };
    holds_m(mu, p)
}

/// Walks back from `(w, s)` through worlds `(w, s')` to one whose event is
/// an epistemic past state, returning the history in time order.
pub fn history_to_copy(u: &ActionModel, mu: &KripkeModel, w: &str, s: &str) -> Option<Vec<String>> {
    let opts = detl::logic::ValidityOptions::default();
    let mut path = vec![s.to_string()];
    let mut seen = BTreeSet::new();
    fn go(
        u: &ActionModel,
        mu: &KripkeModel,
        w: &str,
        path: &mut Vec<String>,
        seen: &mut BTreeSet<String>,
        opts: &detl::logic::ValidityOptions,
    ) -> bool {
        let e = path.last().unwrap().clone();
        if u.is_epistemic_past_state(&e, opts).unwrap() {
            return true;
        }
        if !seen.insert(e.clone()) {
            return false;
        }
        let Ok(x) = mu.world_index(&format!("{w}|{e}")) else { return false };
        for &p in mu.frame().yesterday().pred(x) {
            let name = &mu.worlds()[p];
            let (base, prev) = name.split_once('|').unwrap();
            if base == w {
                path.push(prev.to_string());
                if go(u, mu, w, path, seen, opts) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    if go(u, mu, w, &mut path, &mut seen, &opts) {
        path.reverse();
        Some(path.into_iter().map(|e| format!("{w}|{e}")).collect())
    } else {
        None
    }
}
