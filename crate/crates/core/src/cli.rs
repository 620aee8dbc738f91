//! Command-line front end.  `run` returns the process exit code:
//! 0 pass / certificate, 1 fail, 2 usage or file error, 3 inconclusive.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::derivation::{run_pipeline, verify_l_induction, verify_r_induction};
use crate::exec::with_jobs;
use crate::freegroup::Word;
use crate::knot::{tunnel_collapse, wirtinger_presentation, PretzelSpec};
use crate::orderability::{nlo_search, replay_certificate, NloOutcome, SearchOptions, DEFAULT_BUDGET};
use crate::presentation::{replay_trace, DerivationTrace, Presentation};
use crate::surgery::{h1_order, surgered_presentation, verify_fact, verify_lemma_k, Slope};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

pub const OUTPUT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Wirtinger,
    Tunnel,
}

#[derive(Debug, Parser)]
#[command(name = "pretzel-pi1", version, about = "Knot groups of (-2,3,2s+1) pretzel knots and their fillings")]
pub struct RunConfig {
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the Wirtinger or tunnel-collapsed presentation.
    Gen {
        #[arg(long)]
        s: i64,
        #[arg(long, value_enum, default_value = "wirtinger")]
        stage: Stage,
    },
    /// Run the simplification pipeline down to two generators.
    Derive {
        #[arg(long)]
        s: i64,
        #[arg(long, value_name = "FILE")]
        emit_trace: Option<PathBuf>,
        #[arg(long)]
        verify_induction: bool,
    },
    /// The filled group for slope P/Q.
    Surgery {
        #[arg(long)]
        s: i64,
        #[arg(long, allow_hyphen_values = true)]
        slope: Slope,
        /// Print the presentation file instead of a summary.
        #[arg(long)]
        emit: bool,
    },
    /// Check identities, oracles and derivation traces.
    #[command(subcommand)]
    Verify(Verify),
    /// Order of H₁ of the filled manifold (0 when infinite).
    H1 {
        #[arg(long)]
        s: i64,
        #[arg(long, allow_hyphen_values = true)]
        slope: Slope,
    },
    /// Abelian invariants of a presentation file, optionally the image of a word.
    Abelianize {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        word: Option<String>,
    },
    /// Search for a non-left-orderability certificate.
    Nlo {
        #[arg(long)]
        s: i64,
        #[arg(long, allow_hyphen_values = true)]
        slope: Slope,
        /// Saturation rounds per branch.
        #[arg(long, env = "PRETZEL_PI1_DEPTH", default_value_t = crate::orderability::DEFAULT_DEPTH)]
        depth: u32,
        /// Derived facts per branch.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Worker threads for branch search; 1 runs sequentially.
        #[arg(long, default_value_t = 0)]
        jobs: usize,
        #[arg(long, value_name = "FILE")]
        cert: Option<PathBuf>,
    },
    /// Parse and re-print a presentation file.
    Parse { file: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    Fact {
        #[arg(long)]
        s: i64,
    },
    LemmaK {
        #[arg(long, allow_hyphen_values = true)]
        slope: Slope,
    },
    Induction {
        #[arg(long)]
        s: i64,
    },
    /// Replay a JSON trace file.
    Trace { file: PathBuf },
}

/// What a subcommand produced: text for humans, one JSON document, an exit code.
struct Report {
    text: String,
    json: Value,
    code: i32,
}

#[derive(Debug)]
struct Failure {
    message: String,
    code: i32,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            message: message.into(),
            code: EXIT_USAGE,
        }
    }
}

fn pass_code(pass: bool) -> i32 {
    if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn check_s(s: i64) -> Result<PretzelSpec, Failure> {
    PretzelSpec::new(s).map_err(|e| Failure::usage(format!("--s: {e}")))
}

fn spell(w: &Word) -> String {
    w.to_compact().unwrap_or_else(|| w.to_string())
}

fn presentation_json(p: &Presentation) -> Value {
    json!({
        "generators": p.generators.iter().map(|g| g.name().to_string()).collect::<Vec<_>>(),
        "relators": p.relators.iter().map(|r| json!({"label": r.label, "word": spell(&r.word)})).collect::<Vec<_>>(),
    })
}

fn envelope(command: &str, body: Value) -> Value {
    let mut v = json!({"command": command, "version": OUTPUT_VERSION});
    if let (Value::Object(m), Value::Object(b)) = (&mut v, body) {
        m.extend(b);
    }
    v
}

fn dispatch(cfg: &RunConfig) -> Result<Report, Failure> {
    match &cfg.command {
        Command::Gen { s, stage } => {
            let spec = check_s(*s)?;
            let (p, name) = match stage {
                Stage::Wirtinger => (wirtinger_presentation(spec), "wirtinger"),
                Stage::Tunnel => (tunnel_collapse(spec), "tunnel"),
            };
            Ok(Report {
                text: p.to_string(),
                json: envelope("gen", json!({"s": s, "stage": name, "presentation": presentation_json(&p)})),
                code: EXIT_PASS,
            })
        }
        Command::Derive {
            s,
            emit_trace,
            verify_induction,
        } => {
            check_s(*s)?;
            let res = run_pipeline(*s).map_err(|e| Failure {
                message: e.to_string(),
                code: EXIT_FAIL,
            })?;
            let replay = replay_trace(&res.trace);
            if let Some(path) = emit_trace {
                write(path, &res.trace.to_json())?;
            }
            let induction = if *verify_induction {
                let r = verify_r_induction(*s).map_err(|e| Failure::usage(e.to_string()))?;
                let l = verify_l_induction(*s).map_err(|e| Failure::usage(e.to_string()))?;
                Some((r.pass, l.pass))
            } else {
                None
            };
            let pass = replay.pass && induction.is_none_or(|(r, l)| r && l);
            let relator = res.presentation.relator(crate::knot::R_INF).cloned().unwrap_or_default();
            let mut text = res.presentation.to_string();
            text.push_str(&format!("# longitude: {}\n", res.longitude));
            text.push_str(&format!("# moves: {}\n# replay: {}\n", res.trace.moves.len(), verdict(replay.pass)));
            if let Some((r, l)) = induction {
                text.push_str(&format!("# induction R: {}\n# induction L: {}\n", verdict(r), verdict(l)));
            }
            let mut body = json!({
                "s": s,
                "presentation": presentation_json(&res.presentation),
                "relator": spell(&relator),
                "longitude": spell(&res.longitude),
                "moves": res.trace.moves.len(),
                "replay": verdict(replay.pass),
                "pass": pass,
            });
            if let Some((r, l)) = induction {
                body["induction"] = json!({"r": verdict(r), "l": verdict(l)});
            }
            Ok(Report {
                text,
                json: envelope("derive", body),
                code: pass_code(pass),
            })
        }
        Command::Surgery { s, slope, emit } => {
            check_s(*s)?;
            let sp = surgered_presentation(*s, *slope).map_err(|e| Failure::usage(e.to_string()))?;
            let h1 = sp.presentation.abelianization();
            let text = if *emit {
                sp.presentation.to_string()
            } else {
                format!(
                    "{}# meridian: {}\n# longitude: {}\n# H1: {}\n",
                    sp.presentation, sp.meridian, sp.longitude, h1
                )
            };
            Ok(Report {
                text,
                json: envelope(
                    "surgery",
                    json!({
                        "s": s,
                        "slope": slope.to_string(),
                        "presentation": presentation_json(&sp.presentation),
                        "meridian": spell(&sp.meridian),
                        "longitude": spell(&sp.longitude),
                        "h1_order": h1.order().to_string(),
                    }),
                ),
                code: EXIT_PASS,
            })
        }
        Command::Verify(v) => verify(v),
        Command::H1 { s, slope } => {
            check_s(*s)?;
            let n = h1_order(*s, *slope).map_err(|e| Failure::usage(e.to_string()))?;
            Ok(Report {
                text: format!("{n}\n"),
                json: envelope("h1", json!({"s": s, "slope": slope.to_string(), "h1_order": n.to_string()})),
                code: EXIT_PASS,
            })
        }
        Command::Abelianize { file, word } => {
            let p = Presentation::parse(&read(file)?)
                .map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
            let inv = p.abelianization();
            let mut text = format!("{inv}\n");
            let mut body = json!({"invariants": inv.factors.iter().map(|f| f.to_string()).collect::<Vec<_>>()});
            if let Some(w) = word {
                let w = Word::parse_in(w, &p.generators).map_err(|e| Failure::usage(format!("--word: {e}")))?;
                let img = p.abel_image(&w).map_err(|e| Failure::usage(format!("--word: {e}")))?;
                text.push_str(&format!("{img}\n"));
                body["image"] = json!({
                    "coords": img.coords.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "zero": img.is_zero(),
                });
            }
            Ok(Report {
                text,
                json: envelope("abelianize", body),
                code: EXIT_PASS,
            })
        }
        Command::Nlo {
            s,
            slope,
            depth,
            budget,
            jobs,
            cert,
        } => {
            check_s(*s)?;
            let opts = SearchOptions {
                depth: *depth,
                budget: *budget,
                parallel: *jobs != 1,
            };
            let out = with_jobs(*jobs, || nlo_search(*s, *slope, opts)).map_err(|e| Failure::usage(e.to_string()))?;
            let c = out.certificate();
            if let Some(path) = cert {
                write(path, &c.to_json())?;
            }
            let replay = replay_certificate(c);
            let (status, code, reason) = match &out {
                NloOutcome::Certificate(_) if replay.pass => ("certificate", EXIT_PASS, None),
                NloOutcome::Certificate(_) => ("replay_failed", EXIT_FAIL, Some(replay.errors.join("; "))),
                NloOutcome::Inconclusive { reason, .. } => ("inconclusive", EXIT_INCONCLUSIVE, Some(reason.clone())),
            };
            let mut text = format!("s={s} slope={slope}: {status}\n");
            for b in &c.branches {
                text.push_str(&format!(
                    "  {:<24} {:<16} {} lines, {} rounds\n",
                    b.name,
                    b.outcome,
                    b.journal.len(),
                    b.rounds
                ));
            }
            if let Some(r) = &reason {
                text.push_str(&format!("  {r}\n"));
            }
            let mut body = json!({
                "s": s,
                "slope": slope.to_string(),
                "status": status,
                "replay": verdict(replay.pass),
                "certificate": c,
            });
            if let Some(r) = reason {
                body["reason"] = json!(r);
            }
            Ok(Report {
                text,
                json: envelope("nlo", body),
                code,
            })
        }
        Command::Parse { file } => {
            let p = Presentation::parse(&read(file)?)
                .map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
            Ok(Report {
                text: p.to_string(),
                json: envelope("parse", json!({"presentation": presentation_json(&p)})),
                code: EXIT_PASS,
            })
        }
    }
}

fn verify(v: &Verify) -> Result<Report, Failure> {
    let (name, pass, detail): (&str, bool, Value) = match v {
        Verify::Fact { s } => {
            check_s(*s)?;
            let r = verify_fact(*s).map_err(|e| Failure::usage(e.to_string()))?;
            ("fact", r.pass, serde_json::to_value(&r).expect("report serializes"))
        }
        Verify::LemmaK { slope } => {
            let r = verify_lemma_k(*slope);
            ("lemma-k", r.pass, serde_json::to_value(&r).expect("report serializes"))
        }
        Verify::Induction { s } => {
            check_s(*s)?;
            let r = verify_r_induction(*s).map_err(|e| Failure::usage(e.to_string()))?;
            let l = verify_l_induction(*s).map_err(|e| Failure::usage(e.to_string()))?;
            let detail = json!({"r": r, "l": l});
            ("induction", r.pass && l.pass, detail)
        }
        Verify::Trace { file } => {
            let t = DerivationTrace::from_json(&read(file)?)
                .map_err(|e| Failure::usage(format!("{}: {e}", file.display())))?;
            let r = replay_trace(&t);
            ("trace", r.pass, serde_json::to_value(&r).expect("report serializes"))
        }
    };
    Ok(Report {
        text: format!("verify {name}: {}\n", verdict(pass)),
        json: envelope("verify", json!({"check": name, "result": verdict(pass), "pass": pass, "detail": detail})),
        code: pass_code(pass),
    })
}

/// Parses `argv` (including the program name) and runs the subcommand.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match dispatch(&cfg) {
        Ok(r) => {
            let _ = match cfg.format {
                Format::Text => write!(out, "{}", r.text),
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r.json).expect("json")),
            };
            r.code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            if cfg.format == Format::Json {
                let doc = json!({"version": OUTPUT_VERSION, "error": f.message, "exit_code": f.code});
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).expect("json"));
            }
            f.code
        }
    }
}
