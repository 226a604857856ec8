//! Command runners behind the `incdep` binary. Each returns its exit status
//! and output instead of printing, so the commands are testable in-process.

use std::fmt::Write as _;
use std::path::PathBuf;

use serde_json::{json, Value};

use crate::calculus::b3_coverage;
use crate::decide::{decide, Verdict};
use crate::error::Error;
use crate::experiments::{check_armstrong_gap, check_no_kary};
use crate::oracle::{
    oracle_check, parse_dimacs, reduce_3sat, sat_bruteforce, DEFAULT_ORACLE_CAP, MAX_ORACLE_CAP,
};
use crate::syntax::parse_problem;
use crate::witness::WitnessFormat;

pub const EXIT_YES: i32 = 0;
pub const EXIT_NO: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

const MISMATCH_BANNER: &str =
    "==================== MISMATCH ====================\ndecider and oracle disagree\n";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Decide { input: PathBuf },
    CheckArmstrong,
    CheckNoKary { n: usize },
    Reduce3Sat { input: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::PreconditionViolated(format!(
                "unknown output format `{s}`"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub witness: WitnessFormat,
    pub trace: bool,
    pub oracle: bool,
    pub max_oracle_vars: usize,
    /// Required for an oracle cap above the default.
    pub allow_large_oracle: bool,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            witness: WitnessFormat::Table,
            trace: false,
            oracle: false,
            max_oracle_vars: DEFAULT_ORACLE_CAP,
            allow_large_oracle: false,
            format: OutputFormat::Text,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Report {
    fn error(e: impl std::fmt::Display) -> Report {
        Report {
            exit: EXIT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Report {
    match cfg.command {
        Command::Decide { .. } => run_decide(cfg),
        _ => run_experiment(cfg),
    }
}

fn read(path: &PathBuf) -> Result<String, Report> {
    std::fs::read_to_string(path)
        .map_err(|e| Report::error(format!("cannot read {}: {e}", path.display())))
}

fn oracle_cap(cfg: &RunConfig) -> Result<usize, Report> {
    let cap = cfg.max_oracle_vars;
    if cap > MAX_ORACLE_CAP {
        return Err(Report::error(format!(
            "--max-oracle-vars is at most {MAX_ORACLE_CAP}"
        )));
    }
    if cap > DEFAULT_ORACLE_CAP && !cfg.allow_large_oracle {
        return Err(Report::error(format!(
            "--max-oracle-vars above {DEFAULT_ORACLE_CAP} needs --allow-large-oracle"
        )));
    }
    Ok(cap)
}

pub fn run_decide(cfg: &RunConfig) -> Report {
    let Command::Decide { input } = &cfg.command else {
        return Report::error("run_decide needs the decide command");
    };
    let text = match read(input) {
        Ok(t) => t,
        Err(r) => return r,
    };
    let problem = match parse_problem(&text) {
        Ok(p) => p,
        Err(e) => return Report::error(format!("{}: {e}", input.display())),
    };
    let cap = if cfg.oracle {
        match oracle_cap(cfg) {
            Ok(cap) => {
                let n = problem.variables().len();
                if n > cap {
                    return Report::error(format!(
                        "oracle refused: {n} variables exceed --max-oracle-vars {cap}"
                    ));
                }
                Some(cap)
            }
            Err(r) => return r,
        }
    } else {
        None
    };
    let oracle = match cap.map(|c| oracle_check(&problem, c)) {
        Some(Ok(a)) => Some(a),
        Some(Err(e)) => return Report::error(e),
        None => None,
    };
    let verdict = match decide(&problem) {
        Ok(v) => v,
        Err(e) => {
            let mut r = Report::error(&e);
            if let (Error::Underivable(_), Some(a)) = (&e, &oracle) {
                if a.entailed {
                    r.stdout = "oracle: entailed, MISMATCH\n".into();
                    r.stderr.push_str(MISMATCH_BANNER);
                }
            }
            return r;
        }
    };
    let mismatch = oracle
        .as_ref()
        .is_some_and(|a| a.entailed != verdict.is_entailed());
    let exit = if mismatch {
        EXIT_ERROR
    } else if verdict.is_entailed() {
        EXIT_YES
    } else {
        EXIT_NO
    };
    let oracle_name = |e: bool| if e { "entailed" } else { "not-entailed" };

    let mut out = String::new();
    match cfg.format {
        OutputFormat::Json => {
            let v = verdict.to_json(&problem.assumptions, cfg.trace, cfg.witness);
            let mut obj = serde_json::to_value(v).expect("serializable verdict");
            if let Some(a) = &oracle {
                obj["oracle"] = json!({
                    "verdict": oracle_name(a.entailed),
                    "agreement": !mismatch,
                    "teams_checked": a.teams_checked,
                });
            }
            out = format!("{}\n", serde_json::to_string_pretty(&obj).expect("json"));
        }
        OutputFormat::Text => {
            let _ = writeln!(out, "verdict: {}", verdict.name());
            match &verdict {
                Verdict::Entailed(t) => {
                    if cfg.trace {
                        for line in t.lines(&problem.assumptions) {
                            let _ = writeln!(out, "{line}");
                        }
                    } else {
                        let _ = writeln!(out, "derivation: {} steps", t.len());
                    }
                }
                Verdict::NotEntailed(w) => {
                    let body = w.render(cfg.witness);
                    if !body.is_empty() {
                        let _ = writeln!(out, "witness:");
                        out.push_str(&body);
                    }
                }
            }
            if let Some(a) = &oracle {
                let _ = writeln!(
                    out,
                    "oracle: {}, {}",
                    oracle_name(a.entailed),
                    if mismatch { "MISMATCH" } else { "agreement" }
                );
            }
        }
    }
    let stderr = if mismatch {
        MISMATCH_BANNER.to_string()
    } else {
        String::new()
    };
    Report {
        exit,
        stdout: out,
        stderr,
    }
}

fn emit(cfg: &RunConfig, json: Value, text: String, ok: bool) -> Report {
    let stdout = match cfg.format {
        OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(&json).expect("json")),
        OutputFormat::Text => format!("{text}\n"),
    };
    Report {
        exit: if ok { EXIT_YES } else { EXIT_NO },
        stdout,
        stderr: String::new(),
    }
}

pub fn run_experiment(cfg: &RunConfig) -> Report {
    match &cfg.command {
        Command::Decide { .. } => run_decide(cfg),
        Command::CheckArmstrong => match check_armstrong_gap() {
            Ok(r) => emit(
                cfg,
                serde_json::to_value(&r).expect("json"),
                r.to_string(),
                r.confirmed,
            ),
            Err(e) => Report::error(e),
        },
        Command::CheckNoKary { n } => match check_no_kary(*n) {
            Ok(r) => {
                let mut v = serde_json::to_value(&r).expect("json");
                v["confirmed"] = json!(r.confirmed());
                v["extra_consequences"] = json!(r.extra_consequences());
                emit(cfg, v, r.to_string(), r.confirmed())
            }
            Err(e) => Report::error(e),
        },
        Command::Reduce3Sat { input } => {
            let text = match read(input) {
                Ok(t) => t,
                Err(r) => return r,
            };
            let result = parse_dimacs(&text).and_then(|f| {
                let (cands, target) = reduce_3sat(&f)?;
                let cov = b3_coverage(&cands, &target)?;
                let sat = sat_bruteforce(&f)?;
                Ok((f, cands, target, cov, sat))
            });
            match result {
                Ok((f, cands, target, cov, sat)) => {
                    let agree = cov.covered != sat;
                    let mut text = String::new();
                    let _ = writeln!(text, "formula: {f}");
                    let _ = writeln!(text, "candidates:");
                    for c in &cands {
                        let _ = writeln!(text, "  {c}");
                    }
                    let _ = writeln!(text, "target: {target}");
                    let _ = writeln!(text, "coverage: {}", cov.covered);
                    if let Some(x) = &cov.uncovered {
                        let _ = writeln!(text, "uncovered: {x}");
                    }
                    let _ = writeln!(text, "satisfiable: {sat}");
                    let _ = write!(text, "{}", if agree { "agreement" } else { "DISAGREEMENT" });
                    let json = json!({
                        "formula": f.to_string(),
                        "candidates": cands.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        "target": target.to_string(),
                        "coverage": cov.covered,
                        "uncovered": cov.uncovered.map(|x| x.to_string()),
                        "satisfiable": sat,
                        "agreement": agree,
                    });
                    emit(cfg, json, text, agree)
                }
                Err(e) => Report::error(format!("{}: {e}", input.display())),
            }
        }
    }
}
