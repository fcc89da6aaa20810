//! Verb dispatch, text and JSON rendering, exit codes.

use std::fmt::{Debug, Display};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use super::eval::{build_coefficients, build_field, eval_witt, Coefficients, EvalError, Evaluator, Scalars};
use super::syntax::{parse_statement, Context, Expr, RingDesc, Statement, SyntaxError};
use crate::algebra::{FElem, Field, TElem, TruncRing};
use crate::bloch::{
    self, dec, evaluate_phi, lift_symbol_to_cycle, log_n, rho, AdditiveZeroCycle, ClosedPointCycle, RhoValue,
    DEFAULT_PADDING_BUDGET,
};
use crate::cartier::{FunctionField, GrLevel, OneForm};
use crate::drw::DrwSpace;
use crate::forms::{Form, FormSpace, RelFormSpace};
use crate::milnor::{
    format_sum, format_telem, ks_improved, relative_generators, rewrite_basic, RewriteOptions, SymbolSum,
};
use crate::oracle::{KPresentation, UnitGroup, DEFAULT_GENERATOR_CAP};
use crate::selftest::{self, SuiteConfig, DEFAULT_SEED};
use crate::witt::{format_series, LogSign, WittRing, WittVector};

pub const SCHEMA_VERSION: u64 = 1;
pub const SEED_ENV: &str = "WITTLAB_SEED";

#[derive(Parser, Debug)]
#[command(name = "wittlab", version, about = "Exact Witt vector, Milnor K and Cartier calculus")]
pub struct Cli {
    /// Emit a JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomised suites; WITTLAB_SEED takes precedence.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Truncated big Witt vectors.
    Witt(WittArgs),
    /// Kahler forms over a field or a truncated polynomial ring.
    Forms(FormsArgs),
    /// Milnor K-symbols over k[t]/t^{m+1}.
    Kmilnor(KmilnorArgs),
    /// The inverse Bloch map and its filters.
    Bloch(BlochArgs),
    /// Brute-force group presentations over finite rings.
    Oracle(OracleArgs),
    /// The Cartier operator on k(x).
    Cartier(CartierArgs),
    /// Run the acceptance suites.
    Selftest(SelftestArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum WittOp {
    Ghost,
    Add,
    Sub,
    Mul,
    Neg,
    Teich,
    #[value(name = "V", alias = "v")]
    V,
    #[value(name = "F", alias = "f")]
    F,
    Coords,
    Series,
    Log,
    Exp,
    Eval,
}

#[derive(Args, Debug)]
pub struct WittArgs {
    pub op: WittOp,
    /// Operands; `r` comes first for V and F.
    pub args: Vec<String>,
    /// Length of the truncation `{1, ..., m}`.
    #[arg(long)]
    pub m: Option<usize>,
    /// Coefficient ring, e.g. `QQ`, `GF(5)`, `Z[a,b]`.
    #[arg(long)]
    pub ring: Option<String>,
    /// Use the classical sign for log and exp.
    #[arg(long)]
    pub classical_log: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormsOp {
    D,
    Wedge,
    Dlog,
    Reduce,
}

#[derive(Args, Debug)]
pub struct FormsArgs {
    pub op: FormsOp,
    pub args: Vec<String>,
    /// A field, or `K[t]/t^e` for relative forms.
    #[arg(long)]
    pub ring: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KmilnorOp {
    Normalize,
    Relative,
    Ks,
    Dlog,
}

#[derive(Args, Debug)]
pub struct KmilnorArgs {
    pub op: KmilnorOp,
    /// A sum such as `{1 - t/2, 3} over QQ mod t^3`.
    pub symbol: String,
    #[arg(long)]
    pub ring: Option<String>,
    /// Only apply Steinberg and trivial-entry rewrites.
    #[arg(long)]
    pub steinberg_only: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlochOp {
    Phi,
    Lift,
    Dec,
    Rho,
    Log,
}

#[derive(Args, Debug)]
pub struct BlochArgs {
    pub op: BlochOp,
    /// Points `(a, b, ...) [over EXT]` for phi, a symbol sum otherwise.
    pub args: Vec<String>,
    #[arg(long)]
    pub ring: Option<String>,
    /// A point as JSON `{"ext": .., "tuple": [..], "mult": ..}`.
    #[arg(long)]
    pub cycle: Vec<String>,
    /// Search budget for padding polynomials in lift.
    #[arg(long, default_value_t = DEFAULT_PADDING_BUDGET)]
    pub budget: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleOp {
    Kmilnor,
    Class,
    Units,
    Ledger,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub op: OracleOp,
    pub args: Vec<String>,
    #[arg(long)]
    /// A finite ring `GF(q)[t]/t^e`.
    pub ring: Option<String>,
    /// Degree of the K-group.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Restrict to the kernel of `t -> 0`.
    #[arg(long)]
    pub relative: bool,
    /// Refuse presentations with more tensor generators than this.
    #[arg(long, default_value_t = DEFAULT_GENERATOR_CAP)]
    pub cap: u128,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CartierOp {
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "Cinv", alias = "cinv")]
    Cinv,
    Bs,
    Theta,
    Decompose,
    Antiderivative,
}

#[derive(Args, Debug)]
pub struct CartierArgs {
    pub op: CartierOp,
    pub arg: String,
    #[arg(long)]
    pub ring: Option<String>,
    /// Iteration count, or the index of `B_s`.
    #[arg(long, default_value_t = 1)]
    pub s: usize,
    /// Level `m = m' p^s` for theta.
    #[arg(long)]
    pub m: Option<u64>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    /// A suite name or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Largest Witt length in the randomised suites.
    #[arg(long)]
    pub m: Option<usize>,
    /// Multiplier on the documented instance counts.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// Show elapsed times in text output.
    #[arg(long)]
    pub timings: bool,
}

/// A rendered command result.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub failed: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output { text, json, failed: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub exit: i32,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError {
            code: "usage".into(),
            message: msg.into(),
            exit: 2,
        }
    }

    fn domain<E: Debug + Display>(module: &str, e: E) -> Self {
        CliError {
            code: format!("{module}.{}", variant_path(&format!("{e:?}"))),
            message: e.to_string(),
            exit: 1,
        }
    }
}

/// `Milnor(NotAUnit("..."))` becomes `Milnor.NotAUnit`.
fn variant_path(debug: &str) -> String {
    let mut parts = Vec::new();
    let mut rest = debug;
    loop {
        let ident: String = rest.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
        if ident.is_empty() || !ident.starts_with(|c: char| c.is_ascii_uppercase()) {
            break;
        }
        rest = &rest[ident.len()..];
        parts.push(ident);
        if let Some(r) = rest.strip_prefix('(') {
            rest = r;
        } else {
            break;
        }
    }
    if parts.is_empty() {
        "Error".into()
    } else {
        parts.join(".")
    }
}

impl From<SyntaxError> for CliError {
    fn from(e: SyntaxError) -> Self {
        CliError {
            code: "syntax".into(),
            message: e.to_string(),
            exit: 2,
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::UnknownRing(_) => CliError {
                code: "eval.UnknownRing".into(),
                message: e.to_string(),
                exit: 2,
            },
            _ => CliError::domain("eval", e),
        }
    }
}

macro_rules! domain_from {
    ($($t:ty => $m:literal),* $(,)?) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::domain($m, e)
            }
        })*
    };
}

domain_from! {
    crate::algebra::AlgebraError => "algebra",
    crate::witt::WittError => "witt",
    crate::forms::FormError => "forms",
    crate::milnor::MilnorError => "kmilnor",
    crate::bloch::BlochError => "bloch",
    crate::oracle::OracleError => "oracle",
    crate::cartier::CartierError => "cartier",
}

type CliResult<T> = Result<T, CliError>;

/// Result of a full invocation.
pub struct Outcome {
    pub exit: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parse arguments (including the program name) and run.
pub fn execute<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let exit = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            return if exit == 0 {
                Outcome { exit, stdout: rendered, stderr: String::new() }
            } else {
                Outcome { exit, stdout: String::new(), stderr: rendered }
            };
        }
    };
    let seed = std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .or(cli.seed)
        .unwrap_or(DEFAULT_SEED);
    match dispatch(&cli.verb, seed) {
        Ok(out) => {
            let stdout = if cli.json {
                let mut doc = json!({ "schema": SCHEMA_VERSION });
                if let (Value::Object(d), Value::Object(body)) = (&mut doc, out.json) {
                    d.extend(body);
                }
                serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
            } else {
                out.text
            };
            Outcome {
                exit: i32::from(out.failed),
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => {
            let stderr = if cli.json {
                let doc = json!({ "schema": SCHEMA_VERSION, "error": { "code": e.code, "message": e.message } });
                serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
            } else {
                format!("error[{}]: {}\n", e.code, e.message)
            };
            Outcome {
                exit: e.exit,
                stdout: String::new(),
                stderr,
            }
        }
    }
}

pub fn dispatch(verb: &Verb, seed: u64) -> CliResult<Output> {
    match verb {
        Verb::Witt(a) => witt_cmd(a),
        Verb::Forms(a) => forms_cmd(a),
        Verb::Kmilnor(a) => kmilnor_cmd(a),
        Verb::Bloch(a) => bloch_cmd(a),
        Verb::Oracle(a) => oracle_cmd(a),
        Verb::Cartier(a) => cartier_cmd(a),
        Verb::Selftest(a) => selftest_cmd(a, seed),
    }
}

// ---------------------------------------------------------------- shared

fn statement(src: &str) -> CliResult<Statement> {
    Ok(parse_statement(src)?)
}

fn flag_ring(flag: &Option<String>) -> CliResult<Option<RingDesc>> {
    flag.as_deref().map(super::syntax::parse_ring).transpose().map_err(CliError::from)
}

fn split_expr(st: Statement) -> CliResult<(Expr, Option<Context>)> {
    match st {
        Statement::Expr(e, c) => Ok((e, c)),
        _ => Err(CliError::usage("expected an expression")),
    }
}

/// The truncated ring from a context and/or the `--ring` flag.
fn trunc_from(ctx: &Option<Context>, flag: &Option<RingDesc>) -> CliResult<TruncRing> {
    let (desc, modulus) = match ctx {
        Some(Context::Over(r, e)) => (Some(r.clone()), *e),
        Some(Context::Mod(e)) => (flag.clone(), Some(*e)),
        Some(Context::Witt(..)) => return Err(CliError::usage("a Witt context is not allowed here")),
        None => (flag.clone(), None),
    };
    let desc = desc.ok_or_else(|| CliError::usage("no ring given (use --ring or 'over R')"))?;
    if modulus.is_none() && desc.truncation().is_none() {
        return Err(CliError::usage("no truncation given (use 'mod t^e' or R[t]/t^e)"));
    }
    Ok(super::eval::build_trunc(&desc, modulus)?)
}

fn symbols_from(ring: &TruncRing, terms: &[(i64, Vec<Expr>)]) -> CliResult<SymbolSum<TElem>> {
    let ev = Evaluator::new(&ring.base, Some(ring.m + 1));
    let n = terms.first().map_or(0, |t| t.1.len());
    let mut parsed = Vec::new();
    for (c, entries) in terms {
        let e = entries.iter().map(|x| ev.telem(ring, x)).collect::<Result<Vec<_>, _>>()?;
        parsed.push((e, *c));
    }
    Ok(SymbolSum::from_terms(n, parsed)?)
}

fn parse_symbols(src: &str, flag: &Option<String>) -> CliResult<(TruncRing, SymbolSum<TElem>)> {
    let flag = flag_ring(flag)?;
    match statement(src)? {
        Statement::Symbols(terms, ctx) => {
            let ring = trunc_from(&ctx, &flag)?;
            let s = symbols_from(&ring, &terms)?;
            Ok((ring, s))
        }
        _ => Err(CliError::usage("expected a symbol sum such as {1 - t/2, 3}")),
    }
}

fn sum_text(ring: &TruncRing, s: &SymbolSum<TElem>) -> String {
    format_sum(s, |e| format_telem(ring, e))
}

fn sum_json(ring: &TruncRing, s: &SymbolSum<TElem>) -> Value {
    let terms: Vec<Value> = s
        .terms()
        .map(|(e, c)| json!({ "coef": c, "entries": e.iter().map(|x| format_telem(ring, x)).collect::<Vec<_>>() }))
        .collect();
    json!({ "ring": ring.to_string(), "n": s.n(), "terms": terms, "text": sum_text(ring, s) })
}

// ---------------------------------------------------------------- witt

/// Length of the first `W{m=..; ..}` literal inside `e`.
fn literal_length(e: &Expr) -> Option<usize> {
    match e {
        Expr::Witt(m, _) => Some(*m),
        Expr::Group(x) | Expr::Neg(x) | Expr::Pow(x, _) => literal_length(x),
        Expr::Add(x, y) | Expr::Sub(x, y) | Expr::Mul(x, y) | Expr::Div(x, y) | Expr::Wedge(x, y) => {
            literal_length(x).or_else(|| literal_length(y))
        }
        Expr::Call(_, args) => args.iter().find_map(literal_length),
        Expr::Int(_) | Expr::Var(_) => None,
    }
}

fn witt_cmd(a: &WittArgs) -> CliResult<Output> {
    let mut exprs = Vec::new();
    let mut ctx_ring = None;
    let mut ctx_m = None;
    for src in &a.args {
        let (e, ctx) = split_expr(statement(src)?)?;
        match ctx {
            Some(Context::Witt(m, r)) => {
                ctx_m = Some(m);
                ctx_ring = Some(r);
            }
            Some(_) => return Err(CliError::usage("only 'in W(m, R)' contexts apply to Witt vectors")),
            None => {}
        }
        exprs.push(e);
    }
    let desc = match (ctx_ring, flag_ring(&a.ring)?) {
        (Some(r), _) | (None, Some(r)) => r,
        (None, None) => return Err(CliError::usage("no ring given (use --ring or 'in W(m, R)')")),
    };
    let m = ctx_m
        .or(a.m)
        .or_else(|| exprs.iter().find_map(literal_length))
        .ok_or_else(|| CliError::usage("no length given (use --m or 'in W(m, R)')"))?;
    if m == 0 {
        return Err(CliError::usage("the length m must be positive"));
    }
    let sign = if a.classical_log { LogSign::Classical } else { LogSign::Printed };
    match build_coefficients(&desc)? {
        Coefficients::Field(k) => {
            if matches!(a.op, WittOp::Log | WittOp::Exp) {
                return witt_log_exp(&k, m, a.op, &exprs, sign);
            }
            witt_generic(&k, m, a.op, &exprs)
        }
        Coefficients::Universal(r) => {
            if matches!(a.op, WittOp::Log | WittOp::Exp) {
                return Err(CliError::usage("log and exp need a field of characteristic 0"));
            }
            witt_generic(&r, m, a.op, &exprs)
        }
    }
}

fn arity(exprs: &[Expr], n: usize, op: &str) -> CliResult<()> {
    if exprs.len() != n {
        return Err(CliError::usage(format!("witt {op} takes {n} argument(s), got {}", exprs.len())));
    }
    Ok(())
}

fn witt_output<R: Scalars>(ring: &R, w: &WittVector<R::Elem>) -> CliResult<Output> {
    let witt = WittRing::new(ring.clone());
    let coords: Vec<String> = w.coords.iter().map(|c| ring.format(c)).collect();
    let series = witt.to_series(w)?;
    let text = format!("{}\nseries: {}\n", witt.format(w), format_series(ring, &series));
    Ok(Output::new(
        text,
        json!({
            "m": w.coords.len(),
            "coords": coords,
            "ring": ring.describe(),
            "series": format_series(ring, &series),
        }),
    ))
}

fn witt_generic<R: Scalars>(ring: &R, m: usize, op: WittOp, exprs: &[Expr]) -> CliResult<Output> {
    let witt = WittRing::new(ring.clone());
    let ev = |e: &Expr| eval_witt(ring, m, e).map_err(CliError::from);
    let call = |name: &str, args: Vec<Expr>| eval_witt(ring, m, &Expr::Call(name.into(), args)).map_err(CliError::from);
    let w = match op {
        WittOp::Add | WittOp::Sub | WittOp::Mul => {
            arity(exprs, 2, "add/sub/mul")?;
            let (x, y) = (ev(&exprs[0])?, ev(&exprs[1])?);
            match op {
                WittOp::Add => witt.add(&x, &y)?,
                WittOp::Sub => witt.sub(&x, &y)?,
                _ => witt.mul(&x, &y)?,
            }
        }
        WittOp::Neg => {
            arity(exprs, 1, "neg")?;
            witt.neg(&ev(&exprs[0])?)?
        }
        WittOp::Teich => {
            arity(exprs, 1, "teich")?;
            call("teich", exprs.to_vec())?
        }
        WittOp::V => {
            arity(exprs, 2, "V")?;
            call("V", exprs.to_vec())?
        }
        WittOp::F => {
            arity(exprs, 2, "F")?;
            call("F", exprs.to_vec())?
        }
        WittOp::Ghost => {
            arity(exprs, 1, "ghost")?;
            let x = ev(&exprs[0])?;
            let g: Vec<String> = witt.ghost(&x).iter().map(|c| ring.format(c)).collect();
            let text = format!("ghost: [{}]\n", g.join(", "));
            return Ok(Output::new(text, json!({ "m": m, "ring": ring.describe(), "ghost": g })));
        }
        WittOp::Coords | WittOp::Series | WittOp::Eval => {
            arity(exprs, 1, "coords/series/eval")?;
            ev(&exprs[0])?
        }
        WittOp::Log | WittOp::Exp => unreachable!("handled over fields"),
    };
    witt_output(ring, &w)
}

fn witt_log_exp(k: &Field, m: usize, op: WittOp, exprs: &[Expr], sign: LogSign) -> CliResult<Output> {
    arity(exprs, 1, "log/exp")?;
    let witt = WittRing::new(k.clone());
    let ev = Evaluator::new(k, Some(m + 1));
    let mut s = ev.series(&exprs[0])?;
    s.resize(m + 1, k.zero());
    let out = match op {
        WittOp::Log => witt.formal_log(&s, m, sign)?,
        _ => witt.formal_exp(&s, m, sign)?,
    };
    let text = format!("{}\n", format_series(k, &out));
    Ok(Output::new(
        text,
        json!({ "m": m, "ring": k.to_string(), "series": format_series(k, &out) }),
    ))
}

// ---------------------------------------------------------------- forms

fn forms_cmd(a: &FormsArgs) -> CliResult<Output> {
    let flag = flag_ring(&a.ring)?;
    let mut exprs = Vec::new();
    let mut ctx = None;
    for src in &a.args {
        let (e, c) = split_expr(statement(src)?)?;
        if c.is_some() {
            ctx = c;
        }
        exprs.push(e);
    }
    let (desc, modulus) = match &ctx {
        Some(Context::Over(r, e)) => (Some(r.clone()), *e),
        Some(Context::Mod(e)) => (flag.clone(), Some(*e)),
        Some(Context::Witt(..)) => return Err(CliError::usage("a Witt context is not allowed here")),
        None => (flag.clone(), None),
    };
    let desc = desc.ok_or_else(|| CliError::usage("no ring given (use --ring or 'over R')"))?;
    let truncation = modulus.or(desc.truncation());
    let need = match a.op {
        FormsOp::D | FormsOp::Reduce => Some(1),
        FormsOp::Wedge => Some(2),
        FormsOp::Dlog => None,
    };
    if need.is_some_and(|n| n != exprs.len()) || exprs.is_empty() {
        return Err(CliError::usage(format!("forms {:?} got {} argument(s)", a.op, exprs.len())));
    }
    if let Some(e) = truncation {
        let ring = super::eval::build_trunc(&desc, Some(e))?;
        let rel = RelFormSpace::new(ring.base.clone(), ring.m);
        let ev = Evaluator::new(&ring.base, Some(ring.m + 1));
        let form = match a.op {
            FormsOp::D => rel.d(&ev.rel_form(&rel, &exprs[0])?),
            FormsOp::Wedge => rel.wedge(&ev.rel_form(&rel, &exprs[0])?, &ev.rel_form(&rel, &exprs[1])?),
            FormsOp::Dlog => {
                let us = exprs.iter().map(|x| ev.telem(&ring, x)).collect::<Result<Vec<_>, _>>()?;
                rel.dlog_chain(&us)?
            }
            FormsOp::Reduce => {
                let class = rel.reduce_mod_exact(&ev.rel_form(&rel, &exprs[0])?)?;
                let s = rel.format(&class.form);
                return Ok(Output::new(
                    format!("{s}\n"),
                    json!({ "ring": ring.to_string(), "form": s, "reduced": class.reduced }),
                ));
            }
        };
        let s = rel.format(&form);
        return Ok(Output::new(format!("{s}\n"), json!({ "ring": ring.to_string(), "degree": form.degree, "form": s })));
    }
    if a.op == FormsOp::Reduce {
        return Err(CliError::usage("reduce works over a truncated ring"));
    }
    let k = build_field(&desc)?;
    let space = FormSpace::new(k.clone());
    let ev = Evaluator::new(&k, None);
    let form: Form = match a.op {
        FormsOp::D => space.d(&ev.form(&exprs[0])?),
        FormsOp::Wedge => space.wedge(&ev.form(&exprs[0])?, &ev.form(&exprs[1])?),
        FormsOp::Dlog => {
            let xs = exprs.iter().map(|x| ev.scalar(x)).collect::<Result<Vec<_>, _>>()?;
            space.dlog_chain(&xs)?
        }
        FormsOp::Reduce => unreachable!(),
    };
    let s = space.format(&form);
    Ok(Output::new(format!("{s}\n"), json!({ "ring": k.to_string(), "degree": form.degree, "form": s })))
}

// ---------------------------------------------------------------- kmilnor

fn kmilnor_cmd(a: &KmilnorArgs) -> CliResult<Output> {
    let (ring, s) = parse_symbols(&a.symbol, &a.ring)?;
    let out = match a.op {
        KmilnorOp::Normalize => rewrite_basic(
            &ring,
            &s,
            RewriteOptions {
                steinberg_only: a.steinberg_only,
            },
        ),
        KmilnorOp::Relative => relative_generators(&ring, &s)?,
        KmilnorOp::Ks => ks_improved(&ring, &s)?,
        KmilnorOp::Dlog => {
            let rel = RelFormSpace::new(ring.base.clone(), ring.m);
            let mut acc = rel.zero(s.n());
            for (entries, c) in s.terms() {
                let w = rel.dlog_chain(entries)?;
                let mut scaled = rel.zero(s.n());
                for _ in 0..c.unsigned_abs() {
                    scaled = rel.add(&scaled, &w);
                }
                if c < 0 {
                    scaled = rel.neg(&scaled);
                }
                acc = rel.add(&acc, &scaled);
            }
            let text = rel.format(&acc);
            return Ok(Output::new(format!("{text}\n"), json!({ "ring": ring.to_string(), "form": text })));
        }
    };
    Ok(Output::new(format!("{}\n", sum_text(&ring, &out)), sum_json(&ring, &out)))
}

// ---------------------------------------------------------------- bloch

fn point_from_tuple(base: &Field, items: &[Expr], ctx: &Option<Context>, mult: i64) -> CliResult<ClosedPointCycle> {
    let ext = match ctx {
        Some(Context::Over(r, None)) => build_field(r)?,
        None => base.clone(),
        _ => return Err(CliError::usage("a point takes an optional 'over EXT'")),
    };
    let ev = Evaluator::new(&ext, None);
    let tuple = items.iter().map(|x| ev.scalar(x)).collect::<Result<Vec<_>, _>>()?;
    Ok(ClosedPointCycle::new(base, &ext, tuple, mult)?)
}

fn point_from_json(base: &Field, src: &str) -> CliResult<ClosedPointCycle> {
    let v: Value = serde_json::from_str(src).map_err(|e| CliError::usage(format!("bad --cycle JSON: {e}")))?;
    let ext = match v.get("ext").and_then(Value::as_str) {
        Some(s) => build_field(&super::syntax::parse_ring(s)?)?,
        None => base.clone(),
    };
    let items = v
        .get("tuple")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::usage("--cycle needs a \"tuple\" array"))?;
    let mult = v.get("mult").and_then(Value::as_i64).unwrap_or(1);
    let ev = Evaluator::new(&ext, None);
    let mut tuple = Vec::new();
    for it in items {
        let s = match it {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(CliError::usage("tuple entries are strings or integers")),
        };
        tuple.push(ev.scalar(&super::syntax::parse_expr(&s)?)?);
    }
    Ok(ClosedPointCycle::new(base, &ext, tuple, mult)?)
}

fn point_json(p: &ClosedPointCycle) -> Value {
    json!({
        "ext": p.ext.to_string(),
        "tuple": p.tuple.iter().map(|x| p.ext.format(x)).collect::<Vec<_>>(),
        "mult": p.mult,
    })
}

fn cycle_json(c: &AdditiveZeroCycle) -> Value {
    json!({
        "n": c.n,
        "single_a1": c.single_a1,
        "points": c.points.iter().map(point_json).collect::<Vec<_>>(),
        "text": c.format(),
    })
}

fn bloch_cmd(a: &BlochArgs) -> CliResult<Output> {
    if a.op == BlochOp::Phi {
        let flag = flag_ring(&a.ring)?;
        let mut parsed = Vec::new();
        for src in &a.args {
            match statement(src)? {
                Statement::Tuple(items, ctx) => parsed.push((items, ctx)),
                Statement::Expr(e, ctx) => parsed.push((vec![e], ctx)),
                _ => return Err(CliError::usage("expected a point (a, b, ...) [over EXT]")),
            }
        }
        let ring_ctx = match parsed.first() {
            Some((_, c @ Some(Context::Over(_, Some(_))))) if flag.is_none() => c.clone(),
            _ => None,
        };
        let ring = trunc_from(&ring_ctx, &flag)?;
        let mut points = Vec::new();
        for (items, ctx) in &parsed {
            let ctx = if matches!(ctx, Some(Context::Over(_, Some(_)))) { &None } else { ctx };
            points.push(point_from_tuple(&ring.base, items, ctx, 1)?);
        }
        for src in &a.cycle {
            points.push(point_from_json(&ring.base, src)?);
        }
        let n = points.first().map(ClosedPointCycle::n).ok_or_else(|| CliError::usage("no points given"))?;
        let cycle = AdditiveZeroCycle::new(n, points)?;
        let v = evaluate_phi(&ring, &cycle)?;
        let mut text = format!("{}\n", sum_text(&ring, &v.sum));
        for p in &v.unevaluated {
            text.push_str(&format!("unevaluated transfer: {}\n", p.format()));
        }
        let mut doc = sum_json(&ring, &v.sum);
        doc["cycle"] = cycle_json(&cycle);
        doc["unevaluated"] = Value::Array(v.unevaluated.iter().map(point_json).collect());
        return Ok(Output::new(text, doc));
    }
    let [src] = a.args.as_slice() else {
        return Err(CliError::usage("expected exactly one symbol sum"));
    };
    let (ring, s) = parse_symbols(src, &a.ring)?;
    let k = ring.base.clone();
    match a.op {
        BlochOp::Lift => {
            let terms = lift_symbol_to_cycle(&ring, &s, a.budget)?;
            let mut text = String::new();
            let mut rows = Vec::new();
            for t in &terms {
                let sym = format_sum(&SymbolSum::single(t.symbol.clone()), |e| format_telem(&ring, e));
                text.push_str(&format!("{} * {} <- {}\n", t.coef, sym, t.cycle.format()));
                rows.push(json!({ "coef": t.coef, "symbol": sym, "cycle": cycle_json(&t.cycle) }));
            }
            let combined = bloch::combine_lift(&terms, s.n())?;
            text.push_str(&format!("cycle: {}\n", combined.format()));
            Ok(Output::new(text, json!({ "ring": ring.to_string(), "terms": rows, "cycle": cycle_json(&combined) })))
        }
        BlochOp::Dec => {
            let c = dec(&ring, &s)?;
            let t = c.format(&k);
            Ok(Output::new(format!("{t}\n"), json!({ "ring": ring.to_string(), "class": t })))
        }
        BlochOp::Rho => match rho(&ring, &s)? {
            RhoValue::Model(e) => {
                let t = DrwSpace::new(k)?.format(&e);
                Ok(Output::new(format!("{t}\n"), json!({ "ring": ring.to_string(), "model": t })))
            }
            RhoValue::Decomposed(c) => {
                let t = c.format(&k);
                Ok(Output::new(format!("{t}\n"), json!({ "ring": ring.to_string(), "class": t })))
            }
        },
        BlochOp::Log => {
            let e = log_n(&ring, &s)?;
            let t = DrwSpace::new(k)?.format(&e);
            Ok(Output::new(format!("{t}\n"), json!({ "ring": ring.to_string(), "model": t })))
        }
        BlochOp::Phi => unreachable!(),
    }
}

// ---------------------------------------------------------------- oracle

fn big_strings(v: &[num_bigint::BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn factors_text(v: &[num_bigint::BigInt]) -> String {
    if v.is_empty() {
        "(none)".into()
    } else {
        big_strings(v).join(", ")
    }
}

/// `k` rather than `k[t]/t^1`.
fn ring_name(ring: &TruncRing) -> String {
    if ring.m == 0 {
        ring.base.to_string()
    } else {
        ring.to_string()
    }
}

fn oracle_cmd(a: &OracleArgs) -> CliResult<Output> {
    if a.op == OracleOp::Ledger {
        let entries = selftest::ledger_entries().map_err(|e| CliError::domain("oracle", e))?;
        let text = selftest::ledger_json(&entries);
        let json: Value = serde_json::from_str(&text).expect("valid JSON");
        return Ok(Output::new(text, json));
    }
    let flag = flag_ring(&a.ring)?;
    if a.op == OracleOp::Class {
        let [src] = a.args.as_slice() else {
            return Err(CliError::usage("expected exactly one symbol sum"));
        };
        let (ring, s) = parse_symbols(src, &a.ring)?;
        let pres = KPresentation::with_cap(&ring, s.n(), a.cap)?;
        let c = pres.class_coords(&s)?;
        let text = format!(
            "moduli: [{}]\ncoordinates: [{}]\n{}\n",
            big_strings(&c.moduli).join(", "),
            big_strings(&c.values).join(", "),
            if c.is_zero() { "zero class" } else { "nonzero class" }
        );
        return Ok(Output::new(
            text,
            json!({ "ring": ring.to_string(), "coords": c, "zero": c.is_zero() }),
        ));
    }
    let desc = flag.ok_or_else(|| CliError::usage("oracle needs --ring"))?;
    let ring = match desc.truncation() {
        Some(_) => super::eval::build_trunc(&desc, None)?,
        None => TruncRing::new(build_field(&desc)?, 0),
    };
    if a.op == OracleOp::Units {
        let g = UnitGroup::new(&ring)?;
        let gens: Vec<String> = g.generators.iter().map(|u| format_telem(&ring, u)).collect();
        let text = format!(
            "unit group of {}: order {}, invariant factors {}\ngenerators: [{}]\n",
            ring_name(&ring),
            g.order(),
            factors_text(&g.orders),
            gens.join(", ")
        );
        return Ok(Output::new(
            text,
            json!({ "ring": ring.to_string(), "order": g.order(), "invariant_factors": big_strings(&g.orders), "generators": gens }),
        ));
    }
    let pres = KPresentation::with_cap(&ring, a.n, a.cap)?;
    if a.relative {
        let rel = pres.relative_subgroup()?;
        let order: num_bigint::BigInt = rel.invariant_factors.iter().product();
        let text = format!(
            "relative K^M_{}({}, (t))\ninvariant factors: {}\norder: {}\n",
            a.n,
            ring_name(&ring),
            factors_text(&rel.invariant_factors),
            order
        );
        return Ok(Output::new(
            text,
            json!({
                "ring": ring_name(&ring),
                "n": a.n,
                "relative": true,
                "invariant_factors": big_strings(&rel.invariant_factors),
                "generators": pres.num_generators(),
                "relations": pres.num_relations(),
            }),
        ));
    }
    let inv = pres.invariant_factors();
    let order = pres.group_order();
    let text = format!(
        "K^M_{}({})\ninvariant factors: {}\norder: {}{}\ngenerators: {}, relations: {}\n",
        a.n,
        ring_name(&ring),
        factors_text(&inv),
        order,
        if inv.is_empty() { " (trivial group)" } else { "" },
        pres.num_generators(),
        pres.num_relations()
    );
    Ok(Output::new(
        text,
        json!({
            "ring": ring_name(&ring),
            "n": a.n,
            "invariant_factors": big_strings(&inv),
            "generators": pres.num_generators(),
            "relations": pres.num_relations(),
        }),
    ))
}

// ---------------------------------------------------------------- cartier

enum FormOrFunction {
    Form(OneForm),
    Function(FElem),
}

fn cartier_input(ff: &FunctionField, e: &Expr) -> CliResult<FormOrFunction> {
    let ev = Evaluator::new(&ff.field, None);
    let f = ev.form(e)?;
    match f.degree {
        0 => Ok(FormOrFunction::Function(f.terms.get(&Vec::new()).cloned().unwrap_or_else(|| ff.field.zero()))),
        1 => Ok(FormOrFunction::Form(OneForm(
            f.terms.get(&vec![0]).cloned().unwrap_or_else(|| ff.field.zero()),
        ))),
        d => Err(CliError::usage(format!("expected a function or a 1-form, got a {d}-form"))),
    }
}

fn cartier_cmd(a: &CartierArgs) -> CliResult<Output> {
    let (e, ctx) = split_expr(statement(&a.arg)?)?;
    let desc = match (ctx, flag_ring(&a.ring)?) {
        (Some(Context::Over(r, None)), _) | (None, Some(r)) => r,
        (None, None) => return Err(CliError::usage("no field given (use --ring \"GF(p)(x)\")")),
        _ => return Err(CliError::usage("expected 'over K' with K = GF(p)(x)")),
    };
    let ff = FunctionField::new(build_field(&desc)?)?;
    if ff.field.num_vars() != 1 {
        return Err(CliError::usage("the Cartier verbs work over GF(q)(x)"));
    }
    let input = cartier_input(&ff, &e)?;
    let form_out = |w: &OneForm| {
        let s = ff.format_form(w);
        Output::new(format!("{s}\n"), json!({ "field": ff.field.to_string(), "form": s }))
    };
    match (a.op, input) {
        (CartierOp::C, FormOrFunction::Form(w)) => Ok(form_out(&ff.cartier_iter(&w, a.s)?)),
        (CartierOp::Cinv, FormOrFunction::Form(w)) => Ok(form_out(&ff.inverse_cartier_iter(&w, a.s))),
        (CartierOp::Cinv, FormOrFunction::Function(r)) => {
            if a.s != 1 {
                return Err(CliError::usage("C^-1 of a function is only defined once"));
            }
            Ok(form_out(&ff.inverse_cartier_fn(&r)))
        }
        (CartierOp::Bs, FormOrFunction::Form(w)) => {
            let b = ff.bs_member(&w, a.s)?;
            Ok(Output::new(
                format!("{}\n", if b { "in B_s" } else { "not in B_s" }),
                json!({ "field": ff.field.to_string(), "s": a.s, "member": b }),
            ))
        }
        (CartierOp::Antiderivative, FormOrFunction::Form(w)) => {
            let g = ff.antiderivative(&w)?;
            let s = ff.field.format(&g);
            Ok(Output::new(format!("{s}\n"), json!({ "field": ff.field.to_string(), "function": s })))
        }
        (CartierOp::Theta, FormOrFunction::Function(alpha)) => {
            let m = a.m.ok_or_else(|| CliError::usage("theta needs --m"))?;
            let level = GrLevel::from_m(m, ff.p);
            let c = ff.theta(&alpha, level)?;
            let (w, b) = (ff.format_form(&c.omega), ff.field.format(&c.beta));
            Ok(Output::new(
                format!("({w}, {b})\n"),
                json!({ "field": ff.field.to_string(), "m_prime": level.m_prime, "s": level.s, "omega": w, "beta": b }),
            ))
        }
        (CartierOp::Decompose, FormOrFunction::Function(f)) => {
            let d = ff.p_decompose(&f)?;
            let parts: Vec<String> = d.components.iter().map(|c| ff.field.format(c)).collect();
            Ok(Output::new(
                format!("[{}]\n", parts.join(", ")),
                json!({ "field": ff.field.to_string(), "components": parts }),
            ))
        }
        (op, _) => Err(CliError::usage(format!("cartier {op:?} does not accept this kind of argument"))),
    }
}

// ---------------------------------------------------------------- selftest

fn selftest_cmd(a: &SelftestArgs, seed: u64) -> CliResult<Output> {
    let cfg = SuiteConfig {
        seed,
        scale: a.scale,
        max_m: a.m,
    };
    let infos: Vec<_> = if a.suite == "all" {
        selftest::SUITES.iter().collect()
    } else {
        vec![selftest::find_suite(&a.suite).ok_or_else(|| {
            CliError::usage(format!("unknown suite '{}'; known: {}", a.suite, selftest::suite_names().join(", ")))
        })?]
    };
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut failed = false;
    for info in infos {
        let r = selftest::run_suite(info, &cfg);
        let ok = r.passed && (!a.timings || r.within_budget());
        failed |= !ok;
        text.push_str(&if a.timings { r.line() } else { r.line_without_timing() });
        text.push('\n');
        reports.push(serde_json::to_value(&r).expect("serializable"));
    }
    let mut out = Output::new(text, json!({ "seed": seed, "reports": reports }));
    out.failed = failed;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Outcome {
        execute(std::iter::once("wittlab").chain(args.iter().copied()))
    }

    #[test]
    fn variant_paths() {
        assert_eq!(variant_path("Milnor(NotAUnit(\"x\"))"), "Milnor.NotAUnit");
        assert_eq!(variant_path("NoVanishingSlot"), "NoVanishingSlot");
        assert_eq!(variant_path("WrongLength { expected: 2, got: 3 }"), "WrongLength");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(&["witt", "add", "(1+t", "--m", "2", "--ring", "QQ"]).exit, 2);
        assert_eq!(run(&["frobnicate"]).exit, 2);
        let o = run(&["witt", "log", "2 + t", "--m", "2", "--ring", "QQ"]);
        assert_eq!(o.exit, 1, "{}", o.stderr);
        assert!(o.stderr.contains("error[witt."));
    }

    #[test]
    fn json_has_schema() {
        let o = run(&["--json", "witt", "teich", "3", "--m", "2", "--ring", "GF(5)"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["coords"], json!(["3", "0"]));
    }
}
