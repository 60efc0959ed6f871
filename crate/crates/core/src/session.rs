//! Session configuration: generators, derivation, depth and output mode.
//!
//! The config file is a list of `key = value` lines; `#` starts a comment.
//!
//! ```text
//! depth = 6
//! output = json
//! generator E: kind = exp 1/2
//! generator X: kind = xinv
//! generator t: weight = 2, logderiv = -t
//! ```
//!
//! `preset = transseries <c>` replaces the generator lines. Generators are
//! listed in dominance order. `kind` is `plain` (default), `xinv` or
//! `exp <rate>` for `e^(-rate x)`; `logderiv` overrides the logarithmic
//! derivative that the kind implies and may mention any declared generator.

use std::sync::Arc;

use num_traits::{One, Signed};

use crate::derivation::Derivation;
use crate::error::{Error, Result};
use crate::monomial::{Generator, GeneratorContext, GeneratorKind};
use crate::series::Series;
use crate::text::{eval_expr, parse_in, parse_rational};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorDecl {
    pub generator: Generator,
    pub logderiv: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SessionConfig {
    pub generators: Vec<GeneratorDecl>,
    pub depth: Rational,
    pub output: OutputMode,
}

pub const DEFAULT_DEPTH: i64 = 6;

fn decls(gens: Vec<Generator>) -> Vec<GeneratorDecl> {
    gens.into_iter()
        .map(|generator| GeneratorDecl {
            generator,
            logderiv: None,
        })
        .collect()
}

impl Default for SessionConfig {
    /// `E = e^(-x/2)`, `X = x^-1` and a plain infinitesimal `t`.
    fn default() -> Self {
        SessionConfig {
            generators: decls(vec![
                Generator::exp("E", Rational::new(1.into(), 2.into())),
                Generator::recip_x("X"),
                Generator::plain("t"),
            ]),
            depth: Rational::from_integer(DEFAULT_DEPTH.into()),
            output: OutputMode::Text,
        }
    }
}

impl SessionConfig {
    /// `E = e^(-x/(c+1))` and `X = x^-1`.
    pub fn transseries(c: &Rational) -> Result<Self> {
        let ctx = GeneratorContext::transseries(c)?;
        Ok(SessionConfig {
            generators: decls(ctx.generators().to_vec()),
            ..Default::default()
        })
    }

    pub fn parse(src: &str) -> Result<Self> {
        let mut cfg = SessionConfig {
            generators: Vec::new(),
            ..Default::default()
        };
        let mut preset = None;
        for (lineno, raw) in src.lines().enumerate() {
            let err = |msg: String| Error::Config(format!("line {}: {msg}", lineno + 1));
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("generator ") {
                let (name, props) = rest.split_once(':').unwrap_or((rest, ""));
                cfg.generators
                    .push(parse_generator(name.trim(), props).map_err(|e| err(e.to_string()))?);
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value: {line}")))?;
            let value = value.trim();
            match key.trim() {
                "depth" => cfg.depth = parse_rational(value).map_err(|e| err(e.to_string()))?,
                "output" => {
                    cfg.output = match value {
                        "text" => OutputMode::Text,
                        "json" => OutputMode::Json,
                        _ => return Err(err(format!("output must be text or json, got {value}"))),
                    }
                }
                "preset" => {
                    let c = value
                        .strip_prefix("transseries")
                        .ok_or_else(|| err(format!("unknown preset {value}")))?;
                    preset = Some(parse_rational(c).map_err(|e| err(e.to_string()))?);
                }
                other => return Err(err(format!("unknown key {other}"))),
            }
        }
        match (preset, cfg.generators.is_empty()) {
            (Some(_), false) => return Err(Error::Config("preset and generator lines are exclusive".into())),
            (Some(c), true) => cfg.generators = SessionConfig::transseries(&c)?.generators,
            (None, true) => cfg.generators = SessionConfig::default().generators,
            (None, false) => {}
        }
        if !cfg.depth.is_positive() {
            return Err(Error::Config("depth must be positive".into()));
        }
        Ok(cfg)
    }

    pub fn build(&self) -> Result<Session> {
        let ctx = GeneratorContext::new(self.generators.iter().map(|d| d.generator.clone()).collect())?;
        let mut derivation = Derivation::standard(&ctx);
        for (i, d) in self.generators.iter().enumerate() {
            let Some(src) = &d.logderiv else { continue };
            let e = parse_in(src, &ctx)?;
            // logarithmic derivatives are finite expressions over the generators
            let plain = Derivation::new(&ctx, vec![None; ctx.len()])?;
            let ld: Series = eval_expr(&e, &plain, &self.depth)?;
            if !ld.is_exact() {
                return Err(Error::Config(format!(
                    "logderiv of {} must be a finite expression",
                    d.generator.name
                )));
            }
            derivation = derivation.with_logderiv(i, ld)?;
        }
        Ok(Session {
            derivation,
            depth: self.depth.clone(),
            output: self.output,
        })
    }
}

fn parse_generator(name: &str, props: &str) -> Result<GeneratorDecl> {
    let mut generator = Generator::plain(name);
    let mut logderiv = None;
    for prop in props.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = prop
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key = value in generator {name}: {prop}")))?;
        let value = value.trim();
        match key.trim() {
            "weight" => generator.weight = parse_rational(value)?,
            "logderiv" => logderiv = Some(value.to_string()),
            "kind" => {
                generator.kind = match value.split_whitespace().collect::<Vec<_>>().as_slice() {
                    ["plain"] => GeneratorKind::Plain,
                    ["xinv"] => GeneratorKind::RecipX,
                    ["exp", rate] => GeneratorKind::Exp {
                        rate: parse_rational(rate)?,
                    },
                    _ => return Err(Error::Config(format!("unknown generator kind {value}"))),
                }
            }
            other => return Err(Error::Config(format!("unknown generator property {other}"))),
        }
    }
    Ok(GeneratorDecl { generator, logderiv })
}

/// A built session.
#[derive(Clone, Debug)]
pub struct Session {
    pub derivation: Derivation,
    pub depth: Rational,
    pub output: OutputMode,
}

impl Session {
    pub fn context(&self) -> &Arc<GeneratorContext> {
        self.derivation.context()
    }

    pub fn eval(&self, src: &str, depth: &Rational) -> Result<Series> {
        eval_expr(&parse_in(src, self.context())?, &self.derivation, depth)
    }

    /// This session when it has an exponential generator, the transseries
    /// preset for `c` otherwise.
    pub fn for_pc(&self, c: &Rational) -> Result<Session> {
        if self.context().exp_monomial(&Rational::one()).is_some() {
            return Ok(self.clone());
        }
        let mut s = SessionConfig::transseries(c)?.build()?;
        s.depth = self.depth.clone();
        s.output = self.output;
        Ok(s)
    }
}
