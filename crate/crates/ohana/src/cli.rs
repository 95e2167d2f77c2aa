//! Command-line front end for the `ohana` binary.

use std::io::Read;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::lambda::{head_step, leftmost_step, parse_term, Term, DEFAULT_FUEL};
use crate::multitype::{
    check_derivation, check_resource_derivation, parse_judgment, separating_judgment, typable, Derivation, Rules,
    SearchBounds, SeparationError, Side, Subject, Typability, Typing,
};
use crate::resource::{normalize, parse_sum};
use crate::taylor::{commutation_check, taylor_enumerate};
use crate::trees::{approximants_up_to, bohm_tree, ohana_tree};

#[derive(Parser, Debug)]
#[command(name = "ohana", version, about = "λI-calculus workbench: Ohana trees, resource terms, Taylor expansion, multi-types")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output format.
    #[arg(long, short = 'f', global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Head,
    Leftmost,
}

/// One input: an argument, `-` for stdin, or `--file`.
#[derive(Args, Debug, Clone)]
pub struct Input {
    /// Input text (`-` reads stdin).
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    pub text: Option<String>,
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Is the term a λI-term?
    Check(Input),
    /// Reduce a term, printing every step.
    Reduce {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Strategy::Head)]
        strategy: Strategy,
        /// Shorthand for `--strategy head`.
        #[arg(long, conflicts_with = "strategy")]
        head: bool,
        #[arg(long, default_value_t = 1000)]
        fuel: usize,
    },
    /// Ohana tree (or Böhm tree) up to a depth.
    Tree {
        #[command(flatten)]
        input: Input,
        #[arg(long, conflicts_with = "ohana")]
        bohm: bool,
        /// Default.
        #[arg(long)]
        ohana: bool,
        #[arg(long, short = 'd', default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
    },
    /// Approximants with memory reachable within some β-steps.
    Approx {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 4)]
        steps: usize,
        #[arg(long, default_value_t = 2000)]
        fuel: usize,
    },
    /// Elements of the Taylor expansion up to a size.
    Taylor {
        #[command(flatten)]
        input: Input,
        #[arg(long, short = 's', default_value_t = 5)]
        size: usize,
    },
    /// Normal form of a resource sum.
    Normalize(Input),
    /// Bounded check of the commutation between Taylor expansion and Ohana trees.
    Commute {
        #[command(flatten)]
        input: Input,
        #[arg(long, short = 's', default_value_t = 5)]
        size: usize,
        #[arg(long, default_value_t = 30)]
        steps: usize,
        #[arg(long, default_value_t = 10_000)]
        budget: usize,
        #[arg(long, short = 'j', default_value_t = 1)]
        jobs: usize,
    },
    /// Check a derivation given as JSON.
    Typecheck {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = RulesArg::Memory)]
        rules: RulesArg,
    },
    /// Search a derivation for a judgment `Γ; Δ |- M : σ`.
    Typable {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = RulesArg::Memory)]
        rules: RulesArg,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
    /// A judgment typing exactly one of two terms.
    Separate {
        left: String,
        right: String,
        #[arg(long, short = 'd', default_value_t = 4)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = RulesArg::Memory)]
        rules: RulesArg,
        #[arg(long, default_value_t = DEFAULT_FUEL)]
        fuel: usize,
        #[arg(long, default_value_t = 200_000)]
        budget: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RulesArg {
    Memory,
    Plain,
}

impl From<RulesArg> for Rules {
    fn from(r: RulesArg) -> Rules {
        match r {
            RulesArg::Memory => Rules::Memory,
            RulesArg::Plain => Rules::Plain,
        }
    }
}

/// A failed command, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Negative(String),
    #[error("{0}")]
    Unknown(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Negative(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Unknown(_) => 3,
        }
    }
}

/// Command output plus whether the verdict was negative.
#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub negative: bool,
}

impl Output {
    fn ok(text: impl Into<String>) -> Self {
        Output { text: text.into(), negative: false }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

impl Input {
    pub fn read(&self) -> Result<String, CliError> {
        match (&self.text, &self.file) {
            (Some(t), None) if t == "-" => {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s).map_err(usage)?;
                Ok(s)
            }
            (Some(t), None) => Ok(t.clone()),
            (None, Some(p)) => std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display()))),
            _ => Err(usage("give exactly one input")),
        }
    }

    fn term(&self) -> Result<Term, CliError> {
        parse_term(self.read()?.trim()).map_err(usage)
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json")
}

fn no_dot(format: Format) -> Result<(), CliError> {
    if format == Format::Dot {
        return Err(usage("DOT output is only available for `tree`"));
    }
    Ok(())
}

/// Runs one parsed command.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let format = cli.format;
    if !matches!(cli.command, Command::Tree { .. }) {
        no_dot(format)?;
    }
    let json = format == Format::Json;
    match &cli.command {
        Command::Check(input) => {
            let m = input.term()?;
            let vacuous = m.first_vacuous_binder();
            let text = match (&vacuous, json) {
                (_, true) => pretty(&json!({
                    "term": m.to_string(),
                    "lambda_i": vacuous.is_none(),
                    "unused": vacuous.as_ref().map(|(p, x)| json!({"binder": x.to_string(), "position": p})),
                })),
                (None, false) => "λI-term".to_string(),
                (Some((_, x)), false) => format!("not a λI-term ({x} unused)"),
            };
            Ok(Output { text, negative: vacuous.is_some() })
        }
        Command::Reduce { input, strategy, head, fuel } => {
            let m = input.term()?;
            let step: fn(&Term) -> Option<Term> = if *head || *strategy == Strategy::Head { head_step } else { leftmost_step };
            let (trace, status) = trace(&m, step, *fuel);
            let text = if json {
                pretty(&json!({
                    "trace": trace.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                    "status": status.label(),
                    "steps": trace.len() - 1,
                }))
            } else {
                let mut s: Vec<String> = trace.iter().map(|t| t.to_string()).collect();
                s.push(match status {
                    Status::Normal => format!("normal form after {} steps", trace.len() - 1),
                    Status::Loop(k) => format!("loop detected after {} steps (cycle {k})", trace.len() - 1),
                    Status::Fuel => format!("fuel exhausted after {} steps", trace.len() - 1),
                });
                s.join("\n")
            };
            if status == Status::Fuel {
                println!("{text}");
                return Err(CliError::Unknown("fuel exhausted".into()));
            }
            Ok(Output::ok(text))
        }
        Command::Tree { input, bohm, depth, fuel, .. } => {
            let m = input.term()?;
            let t = if *bohm { bohm_tree(&m, *depth, *fuel) } else { ohana_tree(&m, *depth, *fuel).map_err(|e| CliError::Negative(e.to_string()))? };
            Ok(Output::ok(match format {
                Format::Text => t.render(!bohm),
                Format::Json => pretty(&t.to_json()),
                Format::Dot => t.to_dot(),
            }))
        }
        Command::Approx { input, steps, fuel } => {
            let m = input.term()?;
            if !m.is_lambda_i() {
                return Err(CliError::Negative(format!("not a λI-term: {m}")));
            }
            let set = approximants_up_to(&m, *steps, *fuel);
            Ok(Output::ok(if json {
                pretty(&json!({
                    "term": m.to_string(),
                    "complete": set.complete,
                    "generators": set.generators.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                    "elements": set.elements.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                }))
            } else {
                set.elements.iter().map(|a| a.to_string()).collect::<Vec<_>>().join("\n")
            }))
        }
        Command::Taylor { input, size } => {
            let m = input.term()?;
            let elems = taylor_enumerate(&m, *size);
            Ok(Output::ok(if json {
                pretty(&json!({"term": m.to_string(), "size": size, "elements": elems.iter().map(|t| t.to_string()).collect::<Vec<_>>()}))
            } else {
                elems.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("\n")
            }))
        }
        Command::Normalize(input) => {
            let s = parse_sum(input.read()?.trim()).map_err(usage)?;
            let n = normalize(&s);
            Ok(Output::ok(if json { pretty(&n.to_json()) } else { n.to_string() }))
        }
        Command::Commute { input, size, steps, budget, jobs } => {
            let m = input.term()?;
            let r = commutation_check(&m, *size, *steps, *budget, *jobs).map_err(|e| CliError::Negative(e.to_string()))?;
            let text = if json {
                pretty(&serde_json::to_value(&r).expect("json"))
            } else {
                format!(
                    "{}: checked {} (yes {}, no {}, unknown {}), mismatches {}",
                    r.term,
                    r.checked,
                    r.yes,
                    r.no,
                    r.unknown,
                    r.mismatches.len()
                )
            };
            if r.mismatches.is_empty() && r.unknown > 0 {
                println!("{text}");
                return Err(CliError::Unknown(format!("{} candidates undecided", r.unknown)));
            }
            Ok(Output { text, negative: !r.mismatches.is_empty() })
        }
        Command::Typecheck { input, rules } => {
            let v: Value = serde_json::from_str(&input.read()?).map_err(usage)?;
            let d = Derivation::from_json(&v).map_err(usage)?;
            let resource = d.rule.is_resource();
            let res = if resource { check_resource_derivation(&d, (*rules).into()) } else { check_derivation(&d, (*rules).into()) };
            let text = match (&res, json) {
                (Ok(()), true) => pretty(&json!({"valid": true, "conclusion": d.judgment.to_json()})),
                (Err(e), true) => pretty(&json!({"valid": false, "rule": e.rule.tag(), "path": e.path, "reason": e.reason})),
                (Ok(()), false) => format!("valid: {}", d.judgment),
                (Err(e), false) => format!("invalid: {e}"),
            };
            Ok(Output { text, negative: res.is_err() })
        }
        Command::Typable { input, rules, fuel, budget } => {
            let j = parse_judgment(input.read()?.trim()).map_err(usage)?;
            let (Subject::Term(m), Typing::Of(sigma)) = (&j.subject, &j.typing) else {
                return Err(usage("expected a judgment `Γ; Δ |- M : σ` on a λ-term"));
            };
            let bounds = SearchBounds { fuel: *fuel, budget: *budget };
            match typable(m, &j.gamma, &j.delta, sigma, (*rules).into(), bounds) {
                Typability::Yes(d) => Ok(Output::ok(if json { pretty(&d.to_json()) } else { d.render() })),
                Typability::No => Ok(Output {
                    text: if json { pretty(&json!({"typable": false})) } else { "not derivable".into() },
                    negative: true,
                }),
                Typability::Unknown => Err(CliError::Unknown("search budget exhausted".into())),
            }
        }
        Command::Separate { left, right, depth, rules, fuel, budget } => {
            let m = parse_term(left).map_err(usage)?;
            let n = parse_term(right).map_err(usage)?;
            let bounds = SearchBounds { fuel: *fuel, budget: *budget };
            match separating_judgment(&m, &n, *depth, (*rules).into(), bounds) {
                Ok(s) => {
                    let text = if json {
                        pretty(&json!({
                            "gamma": s.gamma.to_json(),
                            "delta": s.delta.to_json(),
                            "type": s.sigma.to_json(),
                            "side": s.side,
                            "witness": s.witness.to_json(),
                        }))
                    } else {
                        format!("{}\nside: {}", s.witness.judgment, if s.side == Side::Left { "left" } else { "right" })
                    };
                    Ok(Output::ok(text))
                }
                Err(SeparationError::Equal(d)) => Ok(Output {
                    text: format!("no difference found up to depth {d}"),
                    negative: true,
                }),
                Err(SeparationError::Unknown) => Err(CliError::Unknown("budget exhausted".into())),
                Err(e @ SeparationError::Unverified) => Err(CliError::Negative(e.to_string())),
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Normal,
    Loop(usize),
    Fuel,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Normal => "normal",
            Status::Loop(_) => "loop",
            Status::Fuel => "fuel",
        }
    }
}

/// Iterates `step`, stopping at a normal form or on a repeated term up to α.
fn trace(m: &Term, step: fn(&Term) -> Option<Term>, fuel: usize) -> (Vec<Term>, Status) {
    let mut seen = std::collections::HashMap::new();
    let mut out = vec![m.clone()];
    seen.insert(m.clone(), 0);
    for _ in 0..fuel {
        let Some(next) = step(out.last().expect("nonempty")) else { return (out, Status::Normal) };
        if let Some(i) = seen.get(&next) {
            let k = out.len() - i;
            out.push(next);
            return (out, Status::Loop(k));
        }
        seen.insert(next.clone(), out.len());
        out.push(next);
    }
    (out, Status::Fuel)
}

/// Parses `args`, runs the command and prints its output; returns the exit code.
pub fn main_with(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(out) => {
            println!("{}", out.text);
            i32::from(out.negative)
        }
        Err(e) => {
            eprintln!("ohana: {e}");
            e.code()
        }
    }
}
