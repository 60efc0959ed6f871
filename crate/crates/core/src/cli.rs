//! The `hahn` command-line tool.
//!
//! Text output prints a series on one line followed by
//! `known_below: <bound>`. With `--json` a series is printed as
//! `{"terms":[{"coeff":"p/q","exponents":[...]}],"known_below":"<=N"}`
//! (see [`SeriesJson`]) and errors go to stderr as
//! `{"error":KIND,"message":TEXT,"exit_code":N}`.
//!
//! Exit codes: 0 ok, 1 other failures, 2 syntax, 3 precondition,
//! 4 no convergence or failed verification, 5 inconclusive.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use serde::Serialize;

use crate::analytic::{hensel_solve_from, solve_unit_eq, PowerSeries};
use crate::diffpoly::{solve_pc, u_check};
use crate::error::{Error, Result};
use crate::numeric::{residual_decay_check_in, DecayReport};
use crate::series::{Bound, Series};
use crate::session::{OutputMode, Session, SessionConfig};
use crate::text::{format_series, parse_rational, to_json, SeriesJson};
use crate::Rational;

#[derive(Parser, Debug)]
#[command(name = "hahn", version, about = "Truncated Hahn series and transseries")]
pub struct Cli {
    /// Session config file (generators, depth, output mode).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate an expression.
    Eval {
        #[arg(short = 'e', long = "expr", allow_hyphen_values = true)]
        expr: String,
        /// Depth: the weight through which the result should be known.
        #[arg(short = 'N', long = "depth", allow_hyphen_values = true)]
        depth: Option<String>,
    },
    /// Solve Q(z) = 0 for infinitesimal z, Q = a0 + a1 Z + a2 Z^2 + ...
    Hensel {
        /// Coefficients a0;a1;... as expressions.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
        #[arg(short = 'N', long = "depth", allow_hyphen_values = true)]
        depth: Option<String>,
        /// Start value of the iteration.
        #[arg(long, allow_hyphen_values = true)]
        seed: Option<String>,
    },
    /// Solve (1+z)^c (1+eps+z) = 1.
    UnitEq {
        #[arg(long = "c", allow_hyphen_values = true)]
        c: String,
        #[arg(long, allow_hyphen_values = true)]
        eps: String,
        #[arg(short = 'N', long = "depth", allow_hyphen_values = true)]
        depth: Option<String>,
    },
    /// The zero y ~ b e^(x/(c+1)) of Y'(c(Y+1)+Y) - Y(Y+1).
    SolvePc {
        #[arg(long = "c", allow_hyphen_values = true)]
        c: String,
        #[arg(long = "b", allow_hyphen_values = true)]
        b: String,
        #[arg(short = 'N', long = "depth", allow_hyphen_values = true)]
        depth: Option<String>,
        #[arg(long, value_enum, default_value_t = Verify::Symbolic)]
        verify: Verify,
        /// Sample point for the numeric check.
        #[arg(long, default_value_t = 10.0)]
        t: f64,
    },
    /// Asymptotic relations between two expressions.
    Dominance {
        #[arg(short = 'f', allow_hyphen_values = true)]
        f: String,
        #[arg(short = 'g', allow_hyphen_values = true)]
        g: String,
        #[arg(short = 'N', long = "depth", allow_hyphen_values = true)]
        depth: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verify {
    Symbolic,
    Numeric,
    Both,
}

#[derive(Serialize)]
struct HenselOut {
    root: SeriesJson,
    iterations: usize,
    residual_cuts: Vec<String>,
}

#[derive(Serialize)]
struct UCheckOut {
    residual: SeriesJson,
    /// `U(y) e^-x / |d|^c`, a constant for a genuine zero.
    unit: SeriesJson,
    a: Option<String>,
    certified: bool,
}

#[derive(Serialize)]
struct SolvePcOut {
    series: SeriesJson,
    u_check: UCheckOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    decay: Option<DecayReport>,
}

#[derive(Serialize)]
struct ErrorOut<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

/// Runs one invocation and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let mut json = cli.json;
    let result = load_session(&cli).and_then(|s| {
        json |= s.output == OutputMode::Json;
        execute(&cli.command, &s, json)
    });
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(e) => {
            let code = e.exit_code();
            let _ = if json {
                let body = ErrorOut {
                    error: e.kind(),
                    message: e.to_string(),
                    exit_code: code,
                };
                writeln!(err, "{}", serde_json::to_string(&body).expect("serializable"))
            } else {
                writeln!(err, "error: {e}")
            };
            code
        }
    }
}

fn load_session(cli: &Cli) -> Result<Session> {
    let cfg = match &cli.config {
        Some(path) => {
            let src = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            SessionConfig::parse(&src)?
        }
        None => SessionConfig::default(),
    };
    cfg.build()
}

fn depth_arg(s: &Session, depth: &Option<String>) -> Result<Rational> {
    let n = match depth {
        Some(d) => parse_rational(d)?,
        None => s.depth.clone(),
    };
    if n.is_positive() {
        Ok(n)
    } else {
        Err(Error::PreconditionFailed("depth N must be positive".into()))
    }
}

fn series_text(f: &Series) -> String {
    format!("{}\nknown_below: {}\n", format_series(f), f.known_below())
}

fn json_line<T: Serialize>(v: &T) -> String {
    format!("{}\n", serde_json::to_string(v).expect("serializable"))
}

fn execute(cmd: &Command, s: &Session, json: bool) -> Result<String> {
    match cmd {
        Command::Eval { expr, depth } => {
            let f = s.eval(expr, &depth_arg(s, depth)?)?;
            Ok(if json { json_line(&to_json(&f)) } else { series_text(&f) })
        }
        Command::Hensel { coeffs, depth, seed } => {
            let n = depth_arg(s, depth)?;
            let ctx = s.context();
            let list = coeffs
                .split(';')
                .map(|c| s.eval(c.trim(), &n))
                .collect::<Result<Vec<_>>>()?;
            let seed = match seed {
                Some(e) => s.eval(e, &n)?,
                None => Series::zero(ctx),
            };
            let run = hensel_solve_from(&PowerSeries::from_coeffs(ctx, list), &n, &seed)?;
            Ok(if json {
                json_line(&HenselOut {
                    root: to_json(&run.root),
                    iterations: run.iterations,
                    residual_cuts: run.residual_cuts.iter().map(Bound::to_string).collect(),
                })
            } else {
                format!("{}iterations: {}\n", series_text(&run.root), run.iterations)
            })
        }
        Command::UnitEq { c, eps, depth } => {
            let n = depth_arg(s, depth)?;
            let z = solve_unit_eq(&parse_rational(c)?, &s.eval(eps, &n)?, &n)?;
            Ok(if json { json_line(&to_json(&z)) } else { series_text(&z) })
        }
        Command::SolvePc { c, b, depth, verify, t } => {
            let n = depth_arg(s, depth)?;
            let c = parse_rational(c)?;
            let b = parse_rational(b)?;
            let s = s.for_pc(&c)?;
            let y = solve_pc(&s.derivation, &c, &b, &n)?;
            let chk = u_check(&s.derivation, &y, &c, &n)?;
            let certified = chk.is_zero_certificate();
            if !certified && *verify != Verify::Numeric {
                return Err(Error::Postcondition("U(y) is not a constant multiple of e^x".into()));
            }
            let a_text = match &chk.a {
                Some(a) => a.to_string(),
                None => format!("|{}|^({c})*{}", y.leading_term()?.0, format_series(&chk.unit)),
            };
            let decay = if *verify == Verify::Symbolic {
                None
            } else {
                // one entry per weight at which y gains a term
                let mut depths: Vec<Rational> = y
                    .terms()
                    .map(|(m, _)| s.context().weight(m))
                    .filter(|w| !w.is_negative() && *w <= n)
                    .collect();
                depths.sort();
                depths.dedup();
                if depths.is_empty() {
                    depths.push(n.clone());
                }
                Some(residual_decay_check_in(&s.derivation, &c, &b, &depths, t)?)
            };
            if json {
                return Ok(json_line(&SolvePcOut {
                    series: to_json(&y),
                    u_check: UCheckOut {
                        residual: to_json(&chk.residual),
                        unit: to_json(&chk.unit),
                        a: chk.a.as_ref().map(ToString::to_string),
                        certified,
                    },
                    decay,
                }));
            }
            let mut text = series_text(&y);
            if *verify != Verify::Numeric {
                text.push_str(&format!(
                    "u_check: residual = 0 (known_below {}), a = {a_text}\n",
                    chk.residual.known_below()
                ));
            }
            if let Some(report) = decay {
                for e in &report.entries {
                    let ratio = e.decay_ratio.map_or_else(|| "-".to_string(), |r| format!("{r:.3e}"));
                    text.push_str(&format!(
                        "decay: depth {} t {} residual {:.3e} ratio {ratio} {}\n",
                        e.depth,
                        e.t,
                        e.residual,
                        if e.pass { "ok" } else { "FAIL" }
                    ));
                }
                if !report.pass {
                    return Err(Error::Postcondition(format!(
                        "residuals do not decay at t = {t}\n{text}"
                    )));
                }
            }
            Ok(text)
        }
        Command::Dominance { f, g, depth } => {
            let n = depth_arg(s, depth)?;
            let d = s.eval(f, &n)?.dominance(&s.eval(g, &n)?)?;
            Ok(json_line(&d))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["hahn"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn commands() {
        let (code, out, _) = call(&["solve-pc", "--c", "1", "--b", "1", "-N", "4"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("e^(x/2) - 1/2 + 1/8*e^(-x/2) - 1/128*e^(-3x/2)\nknown_below: <=4\n"));
        assert_eq!(
            call(&["unit-eq", "--c", "0", "--eps", "t", "-N", "4"]).1,
            "-t\nknown_below: <=4\n"
        );
        assert_eq!(
            call(&["dominance", "-f", "exp1+1", "-g", "exp1"]).1,
            "{\"prec\":false,\"asymp\":true,\"sim\":true}\n"
        );
        let (code, out, _) = call(&["hensel", "--coeffs", "t; 1; 1", "-N", "3"]);
        assert_eq!(code, 0);
        // z + z^2 = -t: z = -t - t^2 - 2t^3
        assert!(out.starts_with("-t - t^2 - 2*t^3\nknown_below: <=3\n"), "{out}");
        let (code, out, _) = call(&["eval", "-e", "-1/(1-t)", "-N", "2", "--json"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"known_below\":\"<=2\""));
    }

    #[test]
    fn numeric_verification() {
        let (code, out, err) = call(&[
            "solve-pc", "--c", "1", "--b", "-1", "-N", "6", "--verify", "both", "--t", "10",
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(out.contains("a = -1"));
        assert_eq!(out.matches("decay:").count(), 4);
        let (code, out, _) = call(&[
            "solve-pc", "--c", "2", "--b", "1", "-N", "4", "--verify", "numeric", "--json",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["decay"]["pass"], true);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["eval", "-e", "1 +"]).0, 2);
        assert_eq!(call(&["eval", "-e", "y"]).0, 2);
        assert_eq!(call(&["unit-eq", "--c", "-1", "--eps", "t"]).0, 3);
        assert_eq!(call(&["unit-eq", "--c", "1", "--eps", "1"]).0, 3);
        assert_eq!(call(&["solve-pc", "--c", "0", "--b", "1"]).0, 3);
        assert_eq!(call(&["eval", "-e", "t", "-N", "0"]).0, 3);
        assert_eq!(call(&["hensel", "--coeffs", "t;1;1", "-N", "3", "--seed", "1"]).0, 3);
        assert_eq!(call(&["bogus"]).0, 2);
        assert_eq!(call(&["--help"]).0, 0);
        let (code, _, err) = call(&["dominance", "-f", "1/(1-t)", "-g", "1 + t", "-N", "0.5", "--json"]);
        assert_eq!(code, 0, "{err}");
        let (code, _, err) = call(&["dominance", "-f", "1/(1-t) - 1 - t", "-g", "t^3", "-N", "1", "--json"]);
        assert_eq!(code, 5);
        let e: serde_json::Value = serde_json::from_str(&err).unwrap();
        assert_eq!(e["error"], "Inconclusive");
        assert_eq!(e["exit_code"], 5);
        let (code, _, err) = call(&["eval", "-e", "t", "--config", "/nonexistent/hahn.cfg"]);
        assert_eq!(code, 1);
        assert!(err.starts_with("error: invalid config"));
    }

    #[test]
    fn exact_results_keep_all_terms() {
        assert_eq!(
            call(&["eval", "-e", "t^9 + 1", "-N", "2"]).1,
            "1 + t^9\nknown_below: exact\n"
        );
    }
}
