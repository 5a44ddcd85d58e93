//! Bisimulation over agent arrows and the past-directed yesterday relation,
//! by naive partition refinement over the disjoint union.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::kripke::KripkeModel;

/// Pairs `(world of the left model, world of the right model)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bisimulation {
    pub pairs: Vec<(String, String)>,
}

/// Coarsest partition of the disjoint union of `m` and `n` stable under
/// valuation, every agent relation and yesterday predecessors. Returns the
/// block of every world of `m`, then of every world of `n`.
pub fn bisimilarity_blocks(m: &KripkeModel, n: &KripkeModel) -> Result<(Vec<usize>, Vec<usize>)> {
    if m.signature() != n.signature() {
        return Err(Error::SignatureMismatch("models have different signatures".into()));
    }
    let (lm, ln) = (m.len(), n.len());
    let total = lm + ln;
    let side = |x: usize| if x < lm { (m, x) } else { (n, x - lm) };
    let offset = |x: usize| if x < lm { 0 } else { lm };
    let agents: Vec<&str> = m.signature().agents().collect();

    let mut block: Vec<usize> = {
        let mut ids: HashMap<Vec<bool>, usize> = HashMap::new();
        (0..total)
            .map(|x| {
                let (k, i) = side(x);
                let key: Vec<bool> = k.valuation().values().map(|row| row[i]).collect();
                let next = ids.len();
                *ids.entry(key).or_insert(next)
            })
            .collect()
    };
    let mut count = block.iter().collect::<BTreeSet<_>>().len();
    loop {
        let mut ids: HashMap<(usize, Vec<BTreeSet<usize>>), usize> = HashMap::new();
        let next: Vec<usize> = (0..total)
            .map(|x| {
                let (k, i) = side(x);
                let off = offset(x);
                let mut sig: Vec<BTreeSet<usize>> = agents
                    .iter()
                    .map(|a| {
                        let r = k.frame().agent(a).expect("shared agents");
                        r.succ(i).iter().map(|&j| block[j + off]).collect()
                    })
                    .collect();
                sig.push(
                    k.frame()
                        .yesterday()
                        .pred(i)
                        .iter()
                        .map(|&j| block[j + off])
                        .collect(),
                );
                let fresh = ids.len();
                *ids.entry((block[x], sig)).or_insert(fresh)
            })
            .collect();
        let new_count = ids.len();
        block = next;
        if new_count == count {
            break;
        }
        count = new_count;
    }
    let right = block.split_off(lm);
    Ok((block, right))
}

/// The largest bisimulation between `m` and `n` if it relates `w` and `v`.
pub fn bisimilar(m: &KripkeModel, w: &str, n: &KripkeModel, v: &str) -> Result<Option<Bisimulation>> {
    let wi = m.world_index(w)?;
    let vi = n.world_index(v)?;
    let (bm, bn) = bisimilarity_blocks(m, n)?;
    if bm[wi] != bn[vi] {
        return Ok(None);
    }
    let mut pairs = Vec::new();
    for (i, x) in m.worlds().iter().enumerate() {
        for (j, y) in n.worlds().iter().enumerate() {
            if bm[i] == bn[j] {
                pairs.push((x.clone(), y.clone()));
            }
        }
    }
    Ok(Some(Bisimulation { pairs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Signature;
    use crate::frame::Closure;

    fn fig1() -> KripkeModel {
        KripkeModel::builder(Signature::new(["a", "b"], ["p", "q"]).unwrap())
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
    fn self_bisimulation_is_identity() {
        let m = fig1();
        let b = bisimilar(&m, "w", &m, "w").unwrap().unwrap();
        let expect: Vec<(String, String)> =
            m.worlds().iter().map(|x| (x.clone(), x.clone())).collect();
        assert_eq!(b.pairs, expect);
    }

    #[test]
    fn valuation_separates() {
        let m = fig1();
        assert!(bisimilar(&m, "w", &m, "v").unwrap().is_none());
    }

    #[test]
    fn only_the_past_matters() {
        // x ~> y: x has a future, y has a past; a lone world has neither
        let sig = Signature::new(["a"], ["p"]).unwrap();
        let m = KripkeModel::builder(sig.clone())
            .world("x", &[])
            .world("y", &[])
            .yesterday("x", "y")
            .build()
            .unwrap();
        let lone = KripkeModel::builder(sig).world("z", &[]).build().unwrap();
        assert!(bisimilar(&m, "x", &lone, "z").unwrap().is_some());
        assert!(bisimilar(&m, "y", &lone, "z").unwrap().is_none());
    }
}
