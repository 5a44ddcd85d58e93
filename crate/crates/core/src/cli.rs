//! The `detl` command line.
//!
//! Every result line has a `KEY: value` shape. Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | true, VALID, BISIMILAR, every check passed |
//! | 1 | false, INVALID, NOT-BISIMILAR, some check failed |
//! | 2 | not-in-scope (restricted semantics) |
//! | 3 | usage, name, parse, file or model errors |
//! | 4 | tableau node limit exceeded |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::action::ActionModel;
use crate::demo;
use crate::error::{Error, Result};
use crate::fixtures;
use crate::formula::print;
use crate::frame::{Property, PropertyReport};
use crate::io::{action_dot, model_dot, witness_doc, ActionDoc, Document, ModelDoc};
use crate::logic::{bisimilar, reduce, sharp_action, validity, Validity, ValidityOptions, DEFAULT_MAX_NODES};
use crate::semantics::{eval, eval_rdetl, eval_ydel, pair_name, product_update, ydel_update, Outcome};
use crate::workspace::Workspace;

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_NOT_IN_SCOPE: i32 = 2;
pub const EXIT_ERROR: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Plain semantics; product update for `update`.
    Detl,
    /// YDEL semantics; the flat-layer update for `update`.
    Ydel,
    /// Restricted semantics (`eval` only).
    Rdetl,
    /// Alias of `detl` for `update`.
    Product,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum FixtureSet {
    Detl,
    Ydel,
}

#[derive(Parser, Debug)]
#[command(name = "detl", version, about = "Dynamic epistemic temporal logic toolkit")]
pub struct Cli {
    /// Directory of *.json model and action files, loaded in name order.
    /// Without it the bundled fixtures are used.
    #[arg(long, global = true)]
    pub workspace: Option<PathBuf>,
    /// Bundled fixture set used when no workspace is given.
    #[arg(long, global = true, value_enum, default_value = "detl")]
    pub fixtures: FixtureSet,
    #[arg(long, global = true, value_enum, default_value = "detl")]
    pub mode: Mode,
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_NODES)]
    pub max_tableau_nodes: usize,
    /// Let the YDEL update run on models that are not restricted.
    #[arg(long, global = true)]
    pub permissive_ydel: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a formula at a world.
    Eval { model: String, world: String, formula: String },
    /// Apply an action to a model and write the result.
    Update { model: String, action: String, out: PathBuf },
    /// Check properties of a model, an action or a pointed action `U@e`.
    Check { target: String, properties: Vec<String> },
    /// Rewrite a formula into the update-free fragment.
    Reduce { formula: String },
    /// Decide validity over all models.
    Validity {
        formula: String,
        /// Countermodel file; defaults to a file in the temp directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide bisimilarity of two pointed models.
    Bisim {
        model: String,
        world: String,
        other: String,
        other_world: String,
        /// Write the witness as a union model with a `relation` list.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the sharp translation of an atemporal action.
    Sharp { action: String, out: PathBuf },
    /// Replay the claims of a figure (`all` runs every figure).
    Demo { figure: String },
    /// Print a file in canonical form.
    Fmt {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
    },
}

struct Session<'a> {
    cli: &'a Cli,
    opts: ValidityOptions,
    out: &'a mut dyn Write,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ResourceExceeded(_) => EXIT_RESOURCE,
        _ => EXIT_ERROR,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_TRUE };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut s = Session {
        opts: ValidityOptions {
            max_nodes: cli.max_tableau_nodes,
        },
        cli: &cli,
        out,
    };
    match s.dispatch() {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "ERROR: {e}");
            exit_code(&e)
        }
    }
}

fn load_workspace(cli: &Cli) -> Result<Workspace> {
    match (&cli.workspace, cli.fixtures) {
        (Some(dir), _) => Workspace::load_dir(dir),
        (None, FixtureSet::Detl) => fixtures::detl(),
        (None, FixtureSet::Ydel) => fixtures::ydel(),
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn verdict(holds: bool) -> i32 {
    if holds {
        EXIT_TRUE
    } else {
        EXIT_FALSE
    }
}

impl Session<'_> {
    fn line(&mut self, key: &str, value: impl std::fmt::Display) -> Result<()> {
        writeln!(self.out, "{key}: {value}")?;
        Ok(())
    }

    fn dispatch(&mut self) -> Result<i32> {
        let cli = self.cli;
        match &cli.command {
            Command::Demo { figure } => self.demo(figure),
            Command::Fmt { file, dot } => self.fmt(file, *dot),
            cmd => {
                let ws = load_workspace(cli)?;
                match cmd {
                    Command::Eval { model, world, formula } => self.eval(&ws, model, world, formula),
                    Command::Update { model, action, out } => self.update(&ws, model, action, out),
                    Command::Check { target, properties } => self.check(&ws, target, properties),
                    Command::Reduce { formula } => {
                        let f = ws.parse(formula)?;
                        self.line("REDUCED", print(&reduce(&f)))?;
                        Ok(EXIT_TRUE)
                    }
                    Command::Validity { formula, out } => self.validity(&ws, formula, out.as_deref()),
                    Command::Bisim {
                        model,
                        world,
                        other,
                        other_world,
                        out,
                    } => self.bisim(&ws, (model, world), (other, other_world), out.as_deref()),
                    Command::Sharp { action, out } => {
                        let u = ws.action(action)?;
                        let s = sharp_action(u)?;
                        let doc = ActionDoc::from_action(&s, ws.action_point(action));
                        write_file(out, &doc.render())?;
                        self.line("EVENTS", s.len())?;
                        self.line("WROTE", out.display())?;
                        Ok(EXIT_TRUE)
                    }
                    Command::Demo { .. } | Command::Fmt { .. } => unreachable!("handled above"),
                }
            }
        }
    }

    fn eval(&mut self, ws: &Workspace, model: &str, world: &str, text: &str) -> Result<i32> {
        let m = ws.model(model)?;
        m.world_index(world)?;
        let f = ws.parse(text)?;
        let outcome = match self.cli.mode {
            Mode::Detl | Mode::Product => Outcome::from_bool(eval(m, world, &f)?),
            Mode::Ydel => Outcome::from_bool(eval_ydel(m, world, &f, self.cli.permissive_ydel)?),
            Mode::Rdetl => eval_rdetl(m, world, &f, &self.opts)?,
        };
        self.line("RESULT", &outcome)?;
        Ok(match outcome {
            Outcome::True => EXIT_TRUE,
            Outcome::False => EXIT_FALSE,
            Outcome::NotInScope(why) => {
                self.line("REASON", why)?;
                EXIT_NOT_IN_SCOPE
            }
        })
    }

    fn update(&mut self, ws: &Workspace, model: &str, action: &str, out: &Path) -> Result<i32> {
        let m = ws.model(model)?;
        let u = ws.action(action)?;
        let mu = match self.cli.mode {
            Mode::Detl | Mode::Product => product_update(m, u)?,
            Mode::Ydel => ydel_update(m, u, self.cli.permissive_ydel)?,
            Mode::Rdetl => return Err(Error::Malformed("`update` takes --mode product or ydel".into())),
        };
        let point = match (ws.model_point(model), ws.action_point(action)) {
            (Some(w), Some(s)) => Some(pair_name(w, s)).filter(|p| mu.world_index(p).is_ok()),
            _ => None,
        };
        write_file(out, &ModelDoc::from_model(&mu, point.as_deref()).render())?;
        self.line("WORLDS", mu.len())?;
        self.line("WROTE", out.display())?;
        Ok(EXIT_TRUE)
    }

    fn report(&mut self, r: &PropertyReport) -> Result<bool> {
        writeln!(self.out, "{r}")?;
        Ok(r.holds)
    }

    fn check(&mut self, ws: &Workspace, target: &str, names: &[String]) -> Result<i32> {
        let (name, point) = match target.split_once('@') {
            Some((n, e)) => (n, Some(e)),
            None => (target, None),
        };
        let mut all = true;
        if ws.is_model(name) {
            if point.is_some() {
                return Err(Error::Malformed(format!("`{name}` is a model, not an action")));
            }
            let m = ws.model(name)?;
            let props = parse_properties(names, &[Property::Restricted])?;
            for prop in props {
                if prop == Property::Restricted {
                    all &= self.report(&m.check_persistence_of_facts())?;
                    for p in restricted_parts() {
                        all &= self.report(&m.check_property(p)?)?;
                    }
                }
                all &= self.report(&m.check_property(prop)?)?;
            }
        } else {
            let u: &ActionModel = ws.action(name)?;
            let point = point.or(ws.action_point(name));
            if let Some(e) = point {
                if u.event_index(e).is_none() {
                    return Err(Error::UnknownEvent {
                        action: name.to_string(),
                        event: e.to_string(),
                    });
                }
            }
            let props = parse_properties(names, &Property::STRUCTURAL)?;
            for prop in props {
                let r = if prop == Property::Lrdetl {
                    u.is_lrdetl_action(&self.opts)?
                } else {
                    u.check_property(prop, point, &self.opts)?
                };
                all &= self.report(&r)?;
            }
        }
        Ok(verdict(all))
    }

    fn validity(&mut self, ws: &Workspace, text: &str, out: Option<&Path>) -> Result<i32> {
        let f = ws.parse(text)?;
        match validity(&f, ws.signature()?, &self.opts)? {
            Validity::Valid => {
                self.line("RESULT", "VALID")?;
                Ok(EXIT_TRUE)
            }
            Validity::Invalid { model, world } => {
                let path = match out {
                    Some(p) => p.to_path_buf(),
                    None => std::env::temp_dir().join(format!("detl-countermodel-{}.json", std::process::id())),
                };
                write_file(&path, &ModelDoc::from_model(&model, Some(&world)).render())?;
                self.line("RESULT", "INVALID")?;
                self.line("COUNTERMODEL", path.display())?;
                self.line("WORLD", world)?;
                Ok(EXIT_FALSE)
            }
        }
    }

    fn bisim(&mut self, ws: &Workspace, a: (&str, &str), b: (&str, &str), out: Option<&Path>) -> Result<i32> {
        let m = ws.model(a.0)?;
        let n = ws.model(b.0)?;
        match bisimilar(m, a.1, n, b.1)? {
            None => {
                self.line("RESULT", "NOT-BISIMILAR")?;
                Ok(EXIT_FALSE)
            }
            Some(z) => {
                self.line("RESULT", "BISIMILAR")?;
                for (x, y) in &z.pairs {
                    self.line("PAIR", format!("{x} {y}"))?;
                }
                if let Some(path) = out {
                    write_file(path, &witness_doc(m, n, &z.pairs)?.render())?;
                    self.line("WROTE", path.display())?;
                }
                Ok(EXIT_TRUE)
            }
        }
    }

    fn demo(&mut self, figure: &str) -> Result<i32> {
        let figures: Vec<&str> = if figure == "all" {
            demo::FIGURES.to_vec()
        } else {
            vec![figure]
        };
        let mut all = true;
        for f in figures {
            for c in demo::replay(f)? {
                all &= c.holds;
                let tag = if c.holds { "PASS" } else { "FAIL" };
                writeln!(self.out, "{tag}: {f}: {}", c.text)?;
            }
        }
        Ok(verdict(all))
    }

    fn fmt(&mut self, file: &Path, dot: bool) -> Result<i32> {
        let text = std::fs::read_to_string(file).map_err(|e| Error::Io(format!("{}: {e}", file.display())))?;
        let doc = Document::parse(&text)?;
        if !dot {
            write!(self.out, "{}", doc.render())?;
            return Ok(EXIT_TRUE);
        }
        match doc {
            Document::Kripke(d) => {
                let m = d.to_model()?;
                write!(self.out, "{}", model_dot(&m, d.point.as_deref()))?;
            }
            Document::Action(d) => {
                let ws = match &self.cli.workspace {
                    Some(_) => load_workspace(self.cli)?,
                    None => Workspace::new(),
                };
                let stem = file.file_stem().and_then(|s| s.to_str()).unwrap_or("U");
                let u = d.to_action(stem, ws.registry())?;
                write!(self.out, "{}", action_dot(&u, d.point.as_deref()))?;
            }
        }
        Ok(EXIT_TRUE)
    }
}

/// The components of `restricted`, after persistence of facts.
fn restricted_parts() -> [Property; 5] {
    [
        Property::DepthDefinedness,
        Property::KnowledgeOfPast,
        Property::KnowledgeOfInitialTime,
        Property::UniquenessOfPast,
        Property::PerfectRecall,
    ]
}

fn parse_properties(names: &[String], default: &[Property]) -> Result<Vec<Property>> {
    if names.is_empty() {
        return Ok(default.to_vec());
    }
    names.iter().map(|n| n.parse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("detl").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn eval_exit_codes() {
        assert_eq!(run_args(&["eval", "M", "w", "~[a]p"]).0, 0);
        assert_eq!(run_args(&["eval", "M", "w", "false"]).0, 1);
        let (code, _, err) = run_args(&["eval", "M", "x", "p"]);
        assert_eq!(code, 3);
        assert!(err.contains("unknown world"));
        assert_eq!(run_args(&["eval", "M", "w", "p &"]).0, 3);
        assert_eq!(run_args(&["frobnicate"]).0, 3);
    }

    #[test]
    fn reduce_prints_the_reduct() {
        let (code, out, _) = run_args(&["reduce", "[U2@s]q"]);
        assert_eq!(code, 0);
        assert_eq!(out, "REDUCED: p -> q\n");
    }

    #[test]
    fn node_limit_has_its_own_code() {
        let (code, _, err) = run_args(&["--max-tableau-nodes", "2", "validity", "[a](p | q) -> [a]p | [a]q"]);
        assert_eq!(code, 4, "{err}");
    }
}
