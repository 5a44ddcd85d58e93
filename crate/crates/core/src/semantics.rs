//! Truth, product update, the YDEL update and the restricted truth relation.
//!
//! Evaluation is extension-based: a formula is mapped to the set of worlds
//! where it holds. An update node builds its product once per model and
//! evaluates the body there.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use crate::action::ActionModel;
use crate::error::{Error, Result};
use crate::formula::{Formula, FLAT, PAIR_SEPARATOR};
use crate::frame::{Frame, Relation};
use crate::kripke::KripkeModel;
use crate::logic::ValidityOptions;

/// Event index standing for the reserved `♭` event in YDEL products.
pub(crate) const FLAT_EVENT: usize = usize::MAX;

/// Composite world name `base|event`.
pub fn pair_name(base: &str, event: &str) -> String {
    format!("{base}{PAIR_SEPARATOR}{event}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Mode {
    Detl,
    Ydel,
}

/// An updated model with the map from (world, event) to the new world.
pub(crate) struct Product {
    pub(crate) model: KripkeModel,
    pub(crate) index: HashMap<(usize, usize), usize>,
}

type Key = *const ActionModel;

struct Ctx<'m> {
    m: &'m KripkeModel,
    mode: Mode,
    pres: HashMap<Key, Rc<Vec<Vec<bool>>>>,
    products: HashMap<Key, Rc<Product>>,
}

impl<'m> Ctx<'m> {
    fn new(m: &'m KripkeModel, mode: Mode) -> Self {
        Ctx {
            m,
            mode,
            pres: HashMap::new(),
            products: HashMap::new(),
        }
    }

    fn pre_exts(&mut self, u: &std::sync::Arc<ActionModel>) -> Result<Rc<Vec<Vec<bool>>>> {
        let key = std::sync::Arc::as_ptr(u);
        if let Some(p) = self.pres.get(&key) {
            return Ok(p.clone());
        }
        let mut exts = Vec::with_capacity(u.len());
        for pre in u.preconditions() {
            exts.push(self.ext(pre)?);
        }
        let exts = Rc::new(exts);
        self.pres.insert(key, exts.clone());
        Ok(exts)
    }

    fn product(&mut self, u: &std::sync::Arc<ActionModel>) -> Result<Rc<Product>> {
        let key = std::sync::Arc::as_ptr(u);
        if let Some(p) = self.products.get(&key) {
            return Ok(p.clone());
        }
        let exts = self.pre_exts(u)?;
        let p = Rc::new(match self.mode {
            Mode::Detl => build_product(self.m, u, &exts)?,
            Mode::Ydel => build_ydel(self.m, u, &exts)?,
        });
        self.products.insert(key, p.clone());
        Ok(p)
    }

    fn ext(&mut self, f: &Formula) -> Result<Vec<bool>> {
        let n = self.m.len();
        Ok(match f {
            Formula::Bottom => vec![false; n],
            Formula::Atom(p) => (0..n).map(|i| self.m.holds(p, i)).collect(),
            Formula::Not(g) => self.ext(g)?.into_iter().map(|b| !b).collect(),
            Formula::And(a, b) => {
                let x = self.ext(a)?;
                let y = self.ext(b)?;
                x.into_iter().zip(y).map(|(p, q)| p && q).collect()
            }
            Formula::Box(a, g) => {
                let inner = self.ext(g)?;
                let rel = self
                    .m
                    .frame()
                    .agent(a)
                    .ok_or_else(|| Error::UnknownAgent(a.clone()))?;
                (0..n).map(|w| rel.succ(w).iter().all(|&v| inner[v])).collect()
            }
            Formula::Yesterday(g) => {
                let inner = self.ext(g)?;
                let y = self.m.frame().yesterday();
                (0..n).map(|w| y.pred(w).iter().all(|&v| inner[v])).collect()
            }
            Formula::Update(u, s, g) => {
                let si = u.event_index(s).ok_or_else(|| Error::UnknownEvent {
                    action: u.name().to_string(),
                    event: s.clone(),
                })?;
                let exts = self.pre_exts(u)?;
                let pre = &exts[si];
                if !pre.iter().any(|&b| b) {
                    return Ok(vec![true; n]);
                }
                let prod = self.product(u)?;
                let inner = Ctx::new(&prod.model, self.mode).ext(g)?;
                (0..n)
                    .map(|w| !pre[w] || inner[prod.index[&(w, si)]])
                    .collect()
            }
        })
    }
}

fn assemble(
    m: &KripkeModel,
    pairs: Vec<(usize, usize, String)>,
    agent_edges: impl Fn(&HashMap<(usize, usize), usize>) -> Vec<(String, Vec<(usize, usize)>)>,
    yesterday_edges: impl Fn(&HashMap<(usize, usize), usize>) -> Vec<(usize, usize)>,
) -> Result<Product> {
    let mut pairs = pairs;
    pairs.sort_by(|x, y| x.2.cmp(&y.2));
    if pairs.windows(2).any(|w| w[0].2 == w[1].2) {
        return Err(Error::Malformed("composite world names collide".into()));
    }
    let n = pairs.len();
    let index: HashMap<(usize, usize), usize> = pairs
        .iter()
        .enumerate()
        .map(|(k, (v, t, _))| ((*v, *t), k))
        .collect();
    let epistemic = agent_edges(&index)
        .into_iter()
        .map(|(a, es)| (a, Relation::from_pairs(n, es)))
        .collect();
    let yesterday = Relation::from_pairs(n, yesterday_edges(&index));
    let valuation = m
        .valuation()
        .iter()
        .map(|(p, row)| (p.clone(), pairs.iter().map(|(v, _, _)| row[*v]).collect()))
        .collect();
    let names = pairs.into_iter().map(|(_, _, s)| s).collect();
    let frame = Frame::from_indexed(m.signature().clone(), names, epistemic, yesterday);
    Ok(Product {
        model: KripkeModel::from_parts(frame, valuation),
        index,
    })
}

fn build_product(m: &KripkeModel, u: &ActionModel, pre: &[Vec<bool>]) -> Result<Product> {
    let mut pairs = Vec::new();
    for v in 0..m.len() {
        for t in 0..u.len() {
            if pre[t][v] {
                pairs.push((v, t, pair_name(&m.worlds()[v], &u.events()[t])));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::EmptyProduct);
    }
    let keys: Vec<(usize, usize)> = pairs.iter().map(|(v, t, _)| (*v, *t)).collect();
    let mf = m.frame();
    let uf = u.frame();
    assemble(
        m,
        pairs,
        |index| {
            mf.agents()
                .map(|(a, rm)| {
                    let ru = uf.agent(a).expect("shared agents");
                    let mut es = Vec::new();
                    for &(v, t) in &keys {
                        for &v2 in rm.succ(v) {
                            for &t2 in ru.succ(t) {
                                if let Some(&k2) = index.get(&(v2, t2)) {
                                    es.push((index[&(v, t)], k2));
                                }
                            }
                        }
                    }
                    (a.to_string(), es)
                })
                .collect()
        },
        |index| {
            let mut es = Vec::new();
            for &(v, t) in &keys {
                let k = index[&(v, t)];
                if u.past_state_at(t) {
                    for &v2 in mf.yesterday().pred(v) {
                        if let Some(&k2) = index.get(&(v2, t)) {
                            es.push((k2, k));
                        }
                    }
                }
                for &t2 in uf.yesterday().pred(t) {
                    if let Some(&k2) = index.get(&(v, t2)) {
                        es.push((k2, k));
                    }
                }
            }
            es
        },
    )
}

fn build_ydel(m: &KripkeModel, u: &ActionModel, pre: &[Vec<bool>]) -> Result<Product> {
    let mut pairs = Vec::new();
    for v in 0..m.len() {
        pairs.push((v, FLAT_EVENT, pair_name(&m.worlds()[v], FLAT)));
        for t in 0..u.len() {
            if pre[t][v] {
                pairs.push((v, t, pair_name(&m.worlds()[v], &u.events()[t])));
            }
        }
    }
    let keys: Vec<(usize, usize)> = pairs.iter().map(|(v, t, _)| (*v, *t)).collect();
    let mf = m.frame();
    let uf = u.frame();
    assemble(
        m,
        pairs,
        |index| {
            mf.agents()
                .map(|(a, rm)| {
                    let ru = uf.agent(a).expect("shared agents");
                    let mut es = Vec::new();
                    for &(v, t) in &keys {
                        let k = index[&(v, t)];
                        for &v2 in rm.succ(v) {
                            if t == FLAT_EVENT {
                                es.push((k, index[&(v2, FLAT_EVENT)]));
                                continue;
                            }
                            for &t2 in ru.succ(t) {
                                if let Some(&k2) = index.get(&(v2, t2)) {
                                    es.push((k, k2));
                                }
                            }
                        }
                    }
                    (a.to_string(), es)
                })
                .collect()
        },
        |index| {
            let mut es = Vec::new();
            for &(v, t) in &keys {
                let k = index[&(v, t)];
                if t == FLAT_EVENT {
                    for &v2 in mf.yesterday().pred(v) {
                        es.push((index[&(v2, FLAT_EVENT)], k));
                    }
                } else {
                    es.push((index[&(v, FLAT_EVENT)], k));
                }
            }
            es
        },
    )
}

fn check_compatible(m: &KripkeModel, u: &ActionModel) -> Result<()> {
    if !m.signature().admits(u.signature()) {
        return Err(Error::SignatureMismatch(format!(
            "action `{}` does not fit the model's signature",
            u.name()
        )));
    }
    Ok(())
}

fn check_formula(m: &KripkeModel, f: &Formula) -> Result<()> {
    f.check_signature(m.signature())?;
    for u in f.actions() {
        check_compatible(m, &u)?;
    }
    Ok(())
}

/// The set of worlds of `m` where `f` holds, as a mask.
pub fn extension(m: &KripkeModel, f: &Formula) -> Result<Vec<bool>> {
    check_formula(m, f)?;
    Ctx::new(m, Mode::Detl).ext(f)
}

/// `M, w |= f`.
pub fn eval(m: &KripkeModel, w: &str, f: &Formula) -> Result<bool> {
    let i = m.world_index(w)?;
    Ok(extension(m, f)?[i])
}

pub(crate) fn product_with_index(m: &KripkeModel, u: &std::sync::Arc<ActionModel>) -> Result<Rc<Product>> {
    check_compatible(m, u)?;
    for pre in u.preconditions() {
        check_formula(m, pre)?;
    }
    Ctx::new(m, Mode::Detl).product(u)
}

/// The product update `M[U]`. Worlds are named `base|event`.
pub fn product_update(m: &KripkeModel, u: &ActionModel) -> Result<KripkeModel> {
    let u = std::sync::Arc::new(u.clone());
    let p = product_with_index(m, &u)?;
    Ok(Rc::try_unwrap(p).map_or_else(|p| p.model.clone(), |p| p.model))
}

/// Rejects actions outside the atemporal fragment, including nested ones.
fn check_ydel_action(u: &ActionModel) -> Result<()> {
    if !u.is_atemporal() {
        return Err(Error::NotAtemporal(u.name().to_string()));
    }
    if u.event_index(FLAT).is_some() {
        return Err(Error::Malformed(format!(
            "action `{}` uses the reserved event `{FLAT}`",
            u.name()
        )));
    }
    for pre in u.preconditions() {
        check_ydel_formula(pre)?;
    }
    Ok(())
}

fn check_ydel_formula(f: &Formula) -> Result<()> {
    for u in f.actions() {
        if !u.is_atemporal() {
            return Err(Error::NotAtemporal(u.name().to_string()));
        }
        if u.event_index(FLAT).is_some() {
            return Err(Error::Malformed(format!(
                "action `{}` uses the reserved event `{FLAT}`",
                u.name()
            )));
        }
    }
    Ok(())
}

fn check_restricted(m: &KripkeModel, permissive: bool) -> Result<()> {
    if permissive {
        return Ok(());
    }
    let r = m.is_restricted();
    if !r.holds {
        let w = r.witness.map(|w| w.to_string()).unwrap_or_default();
        return Err(Error::NotRestricted(w));
    }
    Ok(())
}

/// The YDEL update `M ⊕ U`: a `♭`-copy of `M` sits one tick before the
/// product worlds. Needs an atemporal `U` and, unless `permissive`, a
/// restricted `M`.
pub fn ydel_update(m: &KripkeModel, u: &ActionModel, permissive: bool) -> Result<KripkeModel> {
    check_compatible(m, u)?;
    check_ydel_action(u)?;
    check_restricted(m, permissive)?;
    for pre in u.preconditions() {
        check_formula(m, pre)?;
    }
    let u = std::sync::Arc::new(u.clone());
    let p = Ctx::new(m, Mode::Ydel).product(&u)?;
    Ok(p.model.clone())
}

/// Extension under the YDEL semantics.
pub fn extension_ydel(m: &KripkeModel, f: &Formula, permissive: bool) -> Result<Vec<bool>> {
    check_formula(m, f)?;
    check_ydel_formula(f)?;
    check_restricted(m, permissive)?;
    Ctx::new(m, Mode::Ydel).ext(f)
}

/// `M, w |=_YDEL f`.
pub fn eval_ydel(m: &KripkeModel, w: &str, f: &Formula, permissive: bool) -> Result<bool> {
    let i = m.world_index(w)?;
    Ok(extension_ydel(m, f, permissive)?[i])
}

/// Three-valued verdict of the restricted semantics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    True,
    False,
    /// The model is not restricted or an action is outside the restricted
    /// language. Carries the reason.
    NotInScope(String),
}

impl Outcome {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Outcome::True
        } else {
            Outcome::False
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::True => f.write_str("true"),
            Outcome::False => f.write_str("false"),
            Outcome::NotInScope(_) => f.write_str("not-in-scope"),
        }
    }
}

/// `M, w |=_RDETL f`: defined only on restricted models and restricted actions.
pub fn eval_rdetl(m: &KripkeModel, w: &str, f: &Formula, opts: &ValidityOptions) -> Result<Outcome> {
    let i = m.world_index(w)?;
    check_formula(m, f)?;
    let r = m.is_restricted();
    if !r.holds {
        let w = r.witness.map(|w| w.to_string()).unwrap_or_default();
        return Ok(Outcome::NotInScope(format!("model is not restricted: {w}")));
    }
    for u in f.actions() {
        let r = u.is_lrdetl_action(opts)?;
        if !r.holds {
            let w = r.witness.map(|w| w.to_string()).unwrap_or_default();
            return Ok(Outcome::NotInScope(format!("action outside the restricted language: {w}")));
        }
    }
    Ok(Outcome::from_bool(Ctx::new(m, Mode::Detl).ext(f)?[i]))
}
