//! Replays of the worked figure examples against the bundled fixtures.

use std::fmt;

use crate::error::{Error, Result};
use crate::fixtures;
use crate::frame::{ArrowKind, Depth, Property};
use crate::kripke::KripkeModel;
use crate::logic::{bisimilar, language_equivalence_probe, sharp_action, ProbeParams, ProbeVerdict, ValidityOptions};
use crate::semantics::{eval, eval_ydel, pair_name, product_update, ydel_update};
use crate::workspace::Workspace;

pub const FIGURES: [&str; 8] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig8", "fig9", "fig10"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Claim {
    pub text: String,
    pub holds: bool,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.holds { "PASS" } else { "FAIL" };
        write!(f, "{tag}: {}", self.text)
    }
}

struct Replay {
    ws: Workspace,
    claims: Vec<Claim>,
}

impl Replay {
    fn claim(&mut self, text: &str, holds: bool) {
        self.claims.push(Claim {
            text: text.to_string(),
            holds,
        });
    }

    fn sat(&self, m: &KripkeModel, w: &str, f: &str) -> Result<bool> {
        eval(m, w, &self.ws.parse(f)?)
    }

    fn product(&self, model: &str, action: &str) -> Result<KripkeModel> {
        product_update(self.ws.model(model)?, self.ws.action(action)?)
    }
}

fn worlds(m: &KripkeModel) -> Vec<&str> {
    m.worlds().iter().map(String::as_str).collect()
}

/// Runs the claims of one figure, in a fixed order.
pub fn replay(figure: &str) -> Result<Vec<Claim>> {
    let ws = match figure {
        "fig8" | "fig9" | "fig10" => fixtures::ydel()?,
        f if FIGURES.contains(&f) => fixtures::detl()?,
        other => return Err(Error::Malformed(format!("no demo named `{other}`"))),
    };
    let mut r = Replay { ws, claims: Vec::new() };
    match figure {
        "fig1" => fig1(&mut r)?,
        "fig2" => fig2(&mut r)?,
        "fig3" => fig3(&mut r)?,
        "fig4" => fig4(&mut r)?,
        "fig5" => fig5(&mut r)?,
        "fig8" => fig8(&mut r)?,
        "fig9" => fig9(&mut r)?,
        _ => fig10(&mut r)?,
    }
    Ok(r.claims)
}

fn fig1(r: &mut Replay) -> Result<()> {
    let m = r.ws.model("M")?.clone();
    let h = r.sat(&m, "w", "~[a]p & ~[b]p")?;
    r.claim("neither a nor b knows p at w", h);
    let h = r.sat(&m, "w", "p & q")?;
    r.claim("p and q are true at w", h);
    r.claim("M is restricted", m.is_restricted().holds);
    Ok(())
}

fn fig2(r: &mut Replay) -> Result<()> {
    let m = r.ws.model("M")?.clone();
    let h = r.sat(&m, "w", "[U2@s](([a]p & [b]p) & <Y>(~[a]p & ~[b]p))")?;
    r.claim("a and b know p but yesterday they did not", h);
    let mu = r.product("M", "U2")?;
    r.claim("M[U2] has the five worlds u|s, u|t, v|t, w|s, w|t", worlds(&mu) == ["u|s", "u|t", "v|t", "w|s", "w|t"]);
    r.claim("depth of w|s is 1", mu.depth("w|s")? == Depth::Finite(1));
    let u = r.ws.action("U2")?;
    let ta = u.check_time_advancing("s", &ValidityOptions::default())?;
    r.claim("(U2, s) is time-advancing", ta.holds);
    Ok(())
}

fn fig3(r: &mut Replay) -> Result<()> {
    let m = r.ws.model("M")?.clone();
    let mu = r.product("M", "U3")?;
    let b = bisimilar(&mu, "w|t", &m, "w")?;
    r.claim("(M[U3], w|t) is bisimilar to (M, w)", b.is_some());
    let v = language_equivalence_probe(&mu, "w|t", &m, "w", &ProbeParams::default())?;
    r.claim("no formula up to modal depth 3 separates them", matches!(v, ProbeVerdict::Agree { .. }));
    Ok(())
}

fn fig4(r: &mut Replay) -> Result<()> {
    let mu = r.product("M", "Udouble")?;
    r.claim("M[Udouble] has 7 worlds", mu.len() == 7);
    r.claim("depth of w|r is 2 after one update", mu.depth("w|r")? == Depth::Finite(2));
    let y = mu.frame().yesterday();
    let i = |w: &str| mu.world_index(w);
    let chain = y.contains(i("w|t")?, i("w|s")?) && y.contains(i("w|s")?, i("w|r")?);
    r.claim("history w|t ~> w|s ~> w|r", chain);
    Ok(())
}

fn fig5(r: &mut Replay) -> Result<()> {
    let m4 = r.product("M", "U4")?;
    let m5 = r.product("M", "U5")?;
    let h = r.sat(&m4, "w|r", "<a>[Y][b](p & q)")?;
    r.claim("M[U4], w|r satisfies <a>[Y][b](p & q)", h);
    let h = r.sat(&m5, "w|r", "<a>[Y][b](p & q)")?;
    r.claim("M[U5], w|r does not satisfy <a>[Y][b](p & q)", !h);
    let both = "<a>[b](p & q) & [b](p & q)";
    let h = r.sat(&m4, "w|r", both)?;
    r.claim("M[U4], w|r satisfies <a>[b](p & q) & [b](p & q)", h);
    let h = r.sat(&m5, "w|r", both)?;
    r.claim("M[U5], w|r satisfies <a>[b](p & q) & [b](p & q)", h);
    let sync = m4.check_property(Property::Synchronicity)?;
    let witnessed = !sync.holds
        && sync.witness.as_ref().is_some_and(|w| {
            w.arrows.iter().any(|a| {
                matches!(a.kind, ArrowKind::Agent(_))
                    && m4.depth(&a.from).ok() != m4.depth(&a.to).ok()
            })
        });
    r.claim("M[U4] fails synchronicity with a witnessed arrow", witnessed);
    Ok(())
}

fn fig8(r: &mut Replay) -> Result<()> {
    let m = r.ws.model("M8")?.clone();
    let h = r.sat(&m, "w", "~[a]p & ~[a]~p & ~[b]p & ~[b]~p")?;
    r.claim("neither agent knows whether p at w", h);
    r.claim("M8 is restricted", m.is_restricted().holds);
    r.claim("U8 is atemporal", r.ws.action("U8")?.is_atemporal());
    Ok(())
}

fn fig9(r: &mut Replay) -> Result<()> {
    let m = r.ws.model("M8")?.clone();
    let u = r.ws.action("U8")?.clone();
    let plus = ydel_update(&m, &u, false)?;
    let flat_w = pair_name("w", crate::formula::FLAT);
    let flat_v = pair_name("v", crate::formula::FLAT);
    let mut want = vec![flat_v.as_str(), flat_w.as_str(), "v|t", "w|s", "w|t"];
    want.sort();
    r.claim("M8 (+) U8 has the five worlds of the figure", worlds(&plus) == want);
    let sharp = product_update(&m, &sharp_action(&u)?)?;
    r.claim("M8 (+) U8 equals M8[U8 sharp]", sharp == plus);
    let f = r.ws.parse("[U8@s][a]p")?;
    r.claim("M8, w satisfies [U8@s][a]p under YDEL", eval_ydel(&m, "w", &f, false)?);
    let f = r.ws.parse("[U8@s][Y]p")?;
    r.claim("M8, w satisfies [U8@s][Y]p under YDEL", eval_ydel(&m, "w", &f, false)?);
    let b = bisimilar(&m, "w", &plus, &flat_w)?;
    r.claim("w is bisimilar to its flat copy", b.is_some());
    r.claim("M8 (+) U8 is restricted", plus.is_restricted().holds);
    Ok(())
}

fn fig10(r: &mut Replay) -> Result<()> {
    let u = r.ws.action("U8")?;
    let s = sharp_action(u)?;
    let flat = crate::formula::FLAT;
    r.claim("U8 sharp has events s, t and the flat event", s.events() == ["s", "t", flat]);
    let y = s.frame().yesterday();
    let fi = s.event_index(flat).expect("flat event");
    let arrows = y.len() == 2
        && y.contains(fi, s.event_index("s").expect("s"))
        && y.contains(fi, s.event_index("t").expect("t"));
    r.claim("the flat event is one tick before s and before t", arrows);
    let eps = s.is_epistemic_past_state(flat, &ValidityOptions::default())?;
    r.claim("the flat event is an epistemic past state", eps);
    Ok(())
}
