//! The `brane` command line.
//!
//! Exit codes: 0 on success, 1 for a negative verdict (not congruent,
//! distinguished, ill-typed), 2 for usage and input errors.

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bisim::{rate_bisim, strong_bisim, BisimOptions, BisimReport, InstFamily, Verdict};
use crate::congruence::{normalize, ClassKey, ClassSet};
use crate::lts::{sys_steps, SysLabel};
use crate::markov::{
    explore_partial, export_ctmc, ssa_run, Ctmc, StateSpace, DEFAULT_STATE_BUDGET, SSA_ALGORITHM,
};
use crate::stochastic::{pointwise, sos_query, theta_sys, Measure, RateTable};
use crate::syntax::{parse_system, parse_term, Term};
use crate::typing::{type_of, Type};

pub const BUDGET_VAR: &str = "BRANE_STATE_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "brane", version, about = "Finite Brane Calculus toolkit")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Sort {
    Sys,
    Mem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BisimMode {
    Strong,
    Stochastic,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type-check a term and print its type.
    Check {
        file: PathBuf,
        #[arg(long = "type", value_enum)]
        expected: Option<Sort>,
    },
    /// Print the canonical form of a term.
    Normalize { file: PathBuf },
    /// Decide structural congruence of two terms.
    Equiv { left: PathBuf, right: PathBuf },
    /// List the labelled transitions of a system.
    Steps {
        file: PathBuf,
        /// `id`, `phago`, `cophago`, `exo`, or a named label such as `phago n`.
        #[arg(long)]
        label: Option<String>,
        /// Print the derivation of each transition.
        #[arg(long)]
        trace: bool,
    },
    /// Print the pointwise rated transitions of a system.
    Rates {
        file: PathBuf,
        #[arg(long)]
        rates: PathBuf,
        #[arg(long)]
        label: Option<String>,
        /// Keep only transitions reaching this term (residues match a ground
        /// system by shape).
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Evaluate the system rate function on a set of classes.
    Measure {
        file: PathBuf,
        #[arg(long)]
        rates: PathBuf,
        /// File with one ground system per line.
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        label: String,
    },
    /// Check strong or stochastic bisimilarity of two systems.
    Bisim {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum)]
        mode: BisimMode,
        #[arg(long)]
        rates: Option<PathBuf>,
        /// Instantiation family: lines `mem: <membrane>` and `sys: <system>`.
        #[arg(long)]
        insts: Option<PathBuf>,
        /// Residue instantiation depth.
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Write the reachable CTMC as PREFIX.sta and PREFIX.tra.
    Export {
        file: PathBuf,
        #[arg(long)]
        rates: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample trajectories of the reachable CTMC.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        rates: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        tmax: f64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
    },
}

/// A failure carrying the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
}

fn input_error(message: impl Display) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

type Outcome = Result<i32, Failure>;

struct Ctx<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn text(&mut self, line: impl Display) -> Result<(), Failure> {
        writeln!(self.out, "{line}").map_err(input_error)
    }

    fn json(&mut self, value: Value) -> Result<(), Failure> {
        writeln!(self.out, "{value}").map_err(input_error)
    }

    fn emit(&mut self, text: impl Display, value: Value) -> Result<(), Failure> {
        match self.format {
            Format::Text => self.text(text),
            Format::Jsonl => self.json(value),
        }
    }
}

/// Runs the command line `args` (including the program name), writing
/// results to `out` and diagnostics to `err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let mut ctx = Ctx {
        format: cli.format,
        out,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, ctx: &mut Ctx) -> Outcome {
    match command {
        Command::Check { file, expected } => check(&file, expected, ctx),
        Command::Normalize { file } => {
            let t = load_term(&file)?;
            let ty = typed(&file, &t)?;
            let key = ClassKey::of(&t);
            ctx.emit(
                &key,
                json!({"command": "normalize", "type": ty.to_string(), "canonical": key.key()}),
            )?;
            Ok(0)
        }
        Command::Equiv { left, right } => {
            let (l, r) = (load_term(&left)?, load_term(&right)?);
            let (tl, tr) = (typed(&left, &l)?, typed(&right, &r)?);
            if tl != tr {
                return Err(input_error(format!(
                    "cannot compare a {tl} term with a {tr} term"
                )));
            }
            let (kl, kr) = (ClassKey::of(&l), ClassKey::of(&r));
            let same = kl == kr;
            let text = if same { "congruent" } else { "not congruent" };
            ctx.emit(
                text,
                json!({"command": "equiv", "congruent": same, "left": kl.key(), "right": kr.key()}),
            )?;
            Ok(if same { 0 } else { 1 })
        }
        Command::Steps { file, label, trace } => steps(&file, label.as_deref(), trace, ctx),
        Command::Rates {
            file,
            rates,
            label,
            target,
        } => rates_cmd(&file, &rates, label.as_deref(), target.as_deref(), ctx),
        Command::Measure {
            file,
            rates,
            set,
            label,
        } => measure(&file, &rates, &set, &label, ctx),
        Command::Bisim {
            left,
            right,
            mode,
            rates,
            insts,
            depth,
        } => bisim(
            &left,
            &right,
            mode,
            rates.as_deref(),
            insts.as_deref(),
            depth,
            ctx,
        ),
        Command::Export { file, rates, out } => export(&file, &rates, &out, ctx),
        Command::Simulate {
            file,
            rates,
            seed,
            tmax,
            runs,
        } => simulate(&file, &rates, seed, tmax, runs, ctx),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn load_term(path: &Path) -> Result<Term, Failure> {
    let text = read(path)?;
    parse_term(&text).map_err(|e| input_error(format!("{}:{e}", path.display())))
}

fn typed(path: &Path, t: &Term) -> Result<Type, Failure> {
    type_of(t).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_system(path: &Path) -> Result<Term, Failure> {
    let text = read(path)?;
    let t = parse_system(&text).map_err(|e| input_error(format!("{}:{e}", path.display())))?;
    match typed(path, &t)? {
        Type::Sys => Ok(t),
        other => Err(input_error(format!(
            "{}: expected a system, found a {other} term",
            path.display()
        ))),
    }
}

fn load_rates(path: &Path) -> Result<RateTable, Failure> {
    let text = read(path)?;
    RateTable::parse(&text).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn parse_label(text: &str) -> Result<SysLabel, Failure> {
    SysLabel::parse(text).ok_or_else(|| input_error(format!("unknown label `{text}`")))
}

fn budget() -> Result<usize, Failure> {
    match std::env::var(BUDGET_VAR) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(input_error(format!(
                "{BUDGET_VAR} must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(DEFAULT_STATE_BUDGET),
    }
}

fn check(file: &Path, expected: Option<Sort>, ctx: &mut Ctx) -> Outcome {
    let t = load_term(file)?;
    let ty = match type_of(&t) {
        Ok(ty) => ty,
        Err(e) => {
            let msg = format!("{}: {e}", file.display());
            ctx.emit(
                format!("error: {msg}"),
                json!({"command": "check", "ok": false, "error": msg}),
            )?;
            return Ok(1);
        }
    };
    let want = expected.map(|s| match s {
        Sort::Sys => Type::Sys,
        Sort::Mem => Type::Mem,
    });
    let ok = want.as_ref().is_none_or(|w| *w == ty);
    ctx.emit(
        &ty,
        json!({"command": "check", "ok": ok, "type": ty.to_string()}),
    )?;
    Ok(if ok { 0 } else { 1 })
}

fn steps(file: &Path, label: Option<&str>, trace: bool, ctx: &mut Ctx) -> Outcome {
    let p = load_system(file)?;
    let filter: Box<dyn Fn(&SysLabel) -> bool> = match label {
        None => Box::new(|_| true),
        Some(l) if !l.trim().contains(' ') && l.trim() != "id" => {
            let family = l.trim().to_string();
            if !["phago", "cophago", "exo"].contains(&family.as_str()) {
                return Err(input_error(format!("unknown label `{l}`")));
            }
            Box::new(move |x| x.family() == family)
        }
        Some(l) => {
            let want = parse_label(l)?;
            Box::new(move |x| *x == want)
        }
    };
    for t in sys_steps(&p).into_iter().filter(|t| filter(&t.label)) {
        let mut text = format!("{} -> {}", t.label, t.target);
        if trace {
            text.push('\n');
            text.push_str(t.derivation.tree().trim_end());
        }
        let value = json!({
            "command": "steps",
            "label": t.label.to_string(),
            "target": t.target.key(),
            "derivation": t.derivation.compact(),
        });
        ctx.emit(text, value)?;
    }
    Ok(0)
}

fn rates_cmd(
    file: &Path,
    rates: &Path,
    label: Option<&str>,
    target: Option<&Path>,
    ctx: &mut Ctx,
) -> Outcome {
    let p = load_system(file)?;
    let table = load_rates(rates)?;
    let label = label.map(parse_label).transpose()?;
    let target = match target {
        Some(path) => {
            let t = load_term(path)?;
            typed(path, &t)?;
            Some(ClassKey::of(&t))
        }
        None => None,
    };
    let entries = pointwise(&p, &table).map_err(input_error)?;
    for e in entries {
        if label.as_ref().is_some_and(|l| *l != e.label) {
            continue;
        }
        if let Some(k) = &target {
            let hit = e.target == *k
                || (e.label != SysLabel::Id && k.canon().is_ground() && {
                    let only = Measure::dirac(e.target.clone(), e.rate.clone());
                    let b = [(e.label.clone(), only)].into_iter().collect();
                    sos_query(&b, &e.label, &ClassSet::from([k.clone()])).is_positive()
                });
            if !hit {
                continue;
            }
        }
        let shape = e
            .template
            .as_ref()
            .map(|t| ClassKey::from(t.clone()).to_string());
        let mut text = format!("{} {} {}", e.label, e.rate, e.target);
        if let Some(s) = &shape {
            text.push_str(&format!("\n  shape: {s}"));
        }
        let value = json!({
            "command": "rates",
            "label": e.label.to_string(),
            "rate": e.rate.to_string(),
            "target": e.target.key(),
            "shape": shape,
        });
        ctx.emit(text, value)?;
    }
    Ok(0)
}

fn load_set(path: &Path) -> Result<ClassSet, Failure> {
    let text = read(path)?;
    let mut set = ClassSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let t = parse_system(line)
            .map_err(|e| input_error(format!("{}: line {}: {e}", path.display(), i + 1)))?;
        if !t.is_ground() {
            return Err(input_error(format!(
                "{}: line {}: expected a ground system",
                path.display(),
                i + 1
            )));
        }
        type_of(&t).map_err(|e| input_error(format!("{}: line {}: {e}", path.display(), i + 1)))?;
        set.insert(ClassKey::from(normalize(&t)));
    }
    Ok(set)
}

fn measure(file: &Path, rates: &Path, set: &Path, label: &str, ctx: &mut Ctx) -> Outcome {
    let p = load_system(file)?;
    let table = load_rates(rates)?;
    let set = load_set(set)?;
    let label = parse_label(label)?;
    let value = theta_sys(&label, &p, &set, &table).map_err(input_error)?;
    ctx.emit(
        &value,
        json!({"command": "measure", "label": label.to_string(), "value": value.to_string()}),
    )?;
    Ok(0)
}

fn bisim(
    left: &Path,
    right: &Path,
    mode: BisimMode,
    rates: Option<&Path>,
    insts: Option<&Path>,
    depth: usize,
    ctx: &mut Ctx,
) -> Outcome {
    let (p, q) = (load_system(left)?, load_system(right)?);
    let fam = match insts {
        Some(path) => InstFamily::parse(&read(path)?)
            .map_err(|e| input_error(format!("{}: {e}", path.display())))?,
        None => InstFamily::for_systems(&p, &q),
    };
    let opts = BisimOptions {
        depth,
        budget: budget()?,
    };
    let report: BisimReport = match mode {
        BisimMode::Strong => strong_bisim(&p, &q, &fam, &opts),
        BisimMode::Stochastic => {
            let path =
                rates.ok_or_else(|| input_error("--rates is required with --mode stochastic"))?;
            let table = load_rates(path)?;
            rate_bisim(&p, &q, &table, &fam, &opts)
        }
    }
    .map_err(input_error)?;
    let mode_name = match mode {
        BisimMode::Strong => "strong",
        BisimMode::Stochastic => "stochastic",
    };
    match &report.verdict {
        Verdict::Bisimilar => {
            let text = format!(
                "Bisimilar (relative to the instantiation family, depth {depth}; {} states, {} blocks)",
                report.states, report.blocks
            );
            let value = json!({
                "command": "bisim", "mode": mode_name, "verdict": "Bisimilar",
                "states": report.states, "blocks": report.blocks, "depth": depth,
            });
            ctx.emit(text, value)?;
            Ok(0)
        }
        Verdict::Distinguished(w) => {
            let mut text = report.verdict.to_string();
            for step in &w.path {
                text.push_str(&format!("\n  after {step}"));
            }
            let value = json!({
                "command": "bisim", "mode": mode_name, "verdict": "Distinguished",
                "label": w.label.to_string(), "via": w.via, "detail": w.detail, "path": w.path,
                "rates": w.rates.as_ref().map(|(a, b)| vec![a.to_string(), b.to_string()]),
            });
            ctx.emit(text, value)?;
            Ok(1)
        }
    }
}

fn explore_or_fail(p: &Term, table: &RateTable) -> Result<(StateSpace, Ctmc), Failure> {
    explore_partial(p, table, budget()?).map_err(|(e, _)| input_error(e))
}

fn export(file: &Path, rates: &Path, out: &Path, ctx: &mut Ctx) -> Outcome {
    let p = load_system(file)?;
    let table = load_rates(rates)?;
    let (space, ctmc) = explore_or_fail(&p, &table)?;
    let (sta, tra) = export_ctmc(&space, &ctmc);
    let with_ext = |ext: &str| {
        let mut s = out.as_os_str().to_owned();
        s.push(ext);
        PathBuf::from(s)
    };
    let (sta_path, tra_path) = (with_ext(".sta"), with_ext(".tra"));
    for (path, body) in [(&sta_path, sta), (&tra_path, tra)] {
        fs::write(path, body)
            .map_err(|e| input_error(format!("cannot write {}: {e}", path.display())))?;
    }
    let text = format!(
        "wrote {} ({} states) and {} ({} transitions)",
        sta_path.display(),
        space.len(),
        tra_path.display(),
        ctmc.transitions()
    );
    let value = json!({
        "command": "export", "states": space.len(), "transitions": ctmc.transitions(),
        "sta": sta_path.display().to_string(), "tra": tra_path.display().to_string(),
    });
    ctx.emit(text, value)?;
    Ok(0)
}

fn simulate(
    file: &Path,
    rates: &Path,
    seed: u64,
    tmax: f64,
    runs: usize,
    ctx: &mut Ctx,
) -> Outcome {
    if !(tmax > 0.0 && tmax.is_finite()) {
        return Err(input_error("--tmax must be a positive number"));
    }
    let p = load_system(file)?;
    let table = load_rates(rates)?;
    let (space, ctmc) = explore_or_fail(&p, &table)?;
    if ctx.format == Format::Text {
        ctx.text(format!("# algorithm: {SSA_ALGORITHM}"))?;
        ctx.text("run,seed,time,state")?;
    }
    for run in 0..runs {
        let run_seed = seed.wrapping_add(run as u64);
        let traj = ssa_run(&space, &ctmc, run_seed, tmax);
        match ctx.format {
            Format::Text => {
                write!(ctx.out, "{}", traj.csv_rows(run, &space)).map_err(input_error)?
            }
            Format::Jsonl => {
                for (t, s) in &traj.steps {
                    ctx.json(json!({
                        "run": run, "seed": run_seed, "time": t,
                        "state": space.states[*s].key(), "algorithm": SSA_ALGORITHM,
                    }))?;
                }
            }
        }
    }
    Ok(0)
}
