//! Command-line front end: input parsing, rendering and subcommands.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::endo::GroupEndomorphism;
use crate::error::{Error, Result};
use crate::fixtures::example_checks;
use crate::presentation::{
    analyze, freeness_test, omega_presentation_from_substitution, restrict, AnalysisReport, AnalyzeOptions,
    FreenessReport, OmegaPresentation, Verdict, DEFAULT_MAX_COMPLEXITY, DEFAULT_MAX_RESTRICT,
};
use crate::returns::{durand, find_connection, Connection, ReturnStructure};
use crate::substitution::Substitution;
use crate::words::{standard_rank, GroupWord, MonoidWord, SymbolTable};

/// A parsed input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Morphism {
    Substitution(Substitution),
    Endomorphism(GroupEndomorphism),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Input {
    pub symbols: SymbolTable,
    pub morphism: Morphism,
}

impl Input {
    pub fn endomorphism(&self) -> GroupEndomorphism {
        match &self.morphism {
            Morphism::Substitution(s) => GroupEndomorphism::from_substitution(s),
            Morphism::Endomorphism(e) => e.clone(),
        }
    }

    pub fn substitution(&self) -> Result<&Substitution> {
        match &self.morphism {
            Morphism::Substitution(s) => Ok(s),
            Morphism::Endomorphism(_) => Err(Error::Parse {
                line: 0,
                message: "expected a substitution, found inverse letters".into(),
            }),
        }
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn at_line(line: usize, e: Error) -> Error {
    match e {
        Error::Parse { message, .. } => Error::Parse { line, message },
        other => parse_error(line, other.to_string()),
    }
}

/// Parses `a->w` rules, one per line. The alphabet is the set of left-hand
/// symbols in standard order; an apostrophe anywhere yields an endomorphism.
pub fn parse_substitution_file(text: &str) -> Result<Input> {
    let mut rules: Vec<(usize, char, &str)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (lhs, rhs) = content
            .split_once("->")
            .ok_or_else(|| parse_error(line, format!("expected '<symbol>-><word>', found '{content}'")))?;
        let lhs = lhs.trim();
        let mut chars = lhs.chars();
        let symbol = match (chars.next(), chars.next()) {
            (Some(c), None) if standard_rank(c).is_some() => c,
            _ => return Err(parse_error(line, format!("left-hand side '{lhs}' is not a single symbol"))),
        };
        if rules.iter().any(|&(_, c, _)| c == symbol) {
            return Err(parse_error(line, format!("duplicate rule for '{symbol}'")));
        }
        rules.push((line, symbol, rhs.trim()));
    }
    if rules.is_empty() {
        return Err(parse_error(0, "no rules"));
    }
    rules.sort_by_key(|&(_, c, _)| standard_rank(c));
    let symbols = SymbolTable::from_symbols(rules.iter().map(|&(_, c, _)| c).collect())?;
    let morphism = if rules.iter().any(|&(_, _, rhs)| rhs.contains('\'')) {
        let images = rules
            .iter()
            .map(|&(line, _, rhs)| symbols.parse_group(rhs).map_err(|e| at_line(line, e)))
            .collect::<Result<Vec<_>>>()?;
        Morphism::Endomorphism(GroupEndomorphism::new(images)?)
    } else {
        let mut images = Vec::new();
        for &(line, c, rhs) in &rules {
            let w = symbols.parse_monoid(rhs).map_err(|e| at_line(line, e))?;
            if w.is_empty() {
                return Err(parse_error(line, format!("image of '{c}' is empty")));
            }
            images.push(w);
        }
        Morphism::Substitution(Substitution::new(images)?)
    };
    Ok(Input { symbols, morphism })
}

/// One rule per line, parseable by [`parse_substitution_file`].
pub fn render(input: &Input) -> String {
    let images: Vec<String> = match &input.morphism {
        Morphism::Substitution(s) => s.images().iter().map(|w| input.symbols.render_monoid(w)).collect(),
        Morphism::Endomorphism(e) => e.render(&input.symbols),
    };
    let mut out = String::new();
    for (a, w) in images.iter().enumerate() {
        let w = if w == "e" && input.symbols.letter('e').is_none() { "" } else { w };
        let _ = writeln!(out, "{}->{}", input.symbols.render_monoid(&[a]), w);
    }
    out
}

#[derive(Debug, Parser)]
#[command(name = "schutz", version, about = "Freeness of Schützenberger groups of primitive substitutions")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Rule file, or inline rules separated by ';' (e.g. "0->01;1->10").
    pub input: String,
}

#[derive(Debug, Args)]
pub struct ConnectionArgs {
    /// Connection `u,v`; its order is computed.
    #[arg(long, value_name = "U,V")]
    pub connection: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Full pipeline on a substitution.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        connection: ConnectionArgs,
        #[arg(long, default_value_t = DEFAULT_MAX_COMPLEXITY)]
        max_complexity: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_RESTRICT)]
        max_restrict: usize,
    },
    /// Return words and return substitution.
    Returns {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        connection: ConnectionArgs,
    },
    /// Restriction to the image of a power.
    Restrict {
        #[command(flatten)]
        input: InputArgs,
        /// Basis of the image, one word per line or separated by spaces or commas.
        #[arg(long, value_name = "FILE")]
        basis: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        power: usize,
        /// Write the image automaton as DOT.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Freeness verdict with certificate.
    Freeness {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        connection: ConnectionArgs,
        #[arg(long, default_value_t = DEFAULT_MAX_COMPLEXITY)]
        max_complexity: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_RESTRICT)]
        max_restrict: usize,
    },
    /// Stallings automaton of the image of a power.
    Stallings {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = 1)]
        power: usize,
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Recompute every worked example.
    Examples,
}

/// Exit code and captured streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        }
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.exit_code() {
                0 => Outcome::ok(0, text),
                _ => Outcome {
                    code: 1,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    execute(&cli).unwrap_or_else(Outcome::error)
}

fn read_input(spec: &str) -> Result<Input> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| parse_error(0, format!("{spec}: {e}")))?;
        parse_substitution_file(&text)
    } else if spec.contains("->") {
        parse_substitution_file(&spec.replace(';', "\n"))
    } else {
        Err(parse_error(0, format!("{spec}: no such file")))
    }
}

fn parse_connection(input: &Input, s: &Substitution, spec: &str) -> Result<Connection> {
    let (u, v) = spec
        .split_once(',')
        .ok_or_else(|| parse_error(0, format!("connection '{spec}' is not of the form u,v")))?;
    let u = input.symbols.parse_monoid(u)?;
    let v = input.symbols.parse_monoid(v)?;
    Connection::new(s, u, v)
}

fn parse_words(symbols: &SymbolTable, text: &str) -> Result<Vec<GroupWord>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        for token in content.split(|c: char| c.is_whitespace() || c == ',') {
            if !token.is_empty() {
                out.push(symbols.parse_group(token).map_err(|e| at_line(i + 1, e))?);
            }
        }
    }
    Ok(out)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| parse_error(0, format!("{}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Analyze {
            input,
            connection,
            max_complexity,
            max_restrict,
        } => {
            let input = read_input(&input.input)?;
            let s = input.substitution()?;
            let connection = match &connection.connection {
                Some(spec) => {
                    let c = parse_connection(&input, s, spec)?;
                    Some((c.u, c.v))
                }
                None => None,
            };
            let options = AnalyzeOptions {
                complexity_bound: *max_complexity,
                max_restrict: *max_restrict,
                connection,
            };
            let report = analyze(s, &options)?;
            let code = match &report.freeness {
                Some(f) if f.verdict == Verdict::Inconclusive => 2,
                _ => 0,
            };
            let out = if cli.json {
                to_json(&report)
            } else {
                render_analysis(&input, &report)
            };
            Ok(Outcome::ok(code, out))
        }
        Command::Returns { input, connection } => {
            let input = read_input(&input.input)?;
            let s = input.substitution()?;
            let c = match &connection.connection {
                Some(spec) => parse_connection(&input, s, spec)?,
                None => find_connection(s)?,
            };
            let r = durand(s, &c)?;
            let out = if cli.json {
                to_json(&r)
            } else {
                render_returns(&input.symbols, s, &r)?
            };
            Ok(Outcome::ok(0, out))
        }
        Command::Restrict {
            input,
            basis,
            power,
            dot,
        } => {
            let input = read_input(&input.input)?;
            let e = input.endomorphism();
            let basis = match basis {
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|err| parse_error(0, format!("{}: {err}", path.display())))?;
                    Some(parse_words(&input.symbols, &text)?)
                }
                None => None,
            };
            let r = restrict(&e, *power, basis.as_deref())?;
            if let Some(path) = dot {
                write_file(path, &r.automaton.to_dot_with(&input.symbols, r.tree.as_ref()))?;
            }
            let target = SymbolTable::standard_for(r.basis.len());
            let matrix = r.endo.incidence_matrix();
            let det = matrix.determinant();
            let out = if cli.json {
                to_json(&json!({
                    "power": power,
                    "rank": r.basis.len(),
                    "basis": r.basis.iter().map(|w| input.symbols.render_group(w)).collect::<Vec<_>>(),
                    "restriction": r.endo,
                    "matrix": matrix.to_i64_rows(),
                    "determinant": det.to_string(),
                    "automorphism": r.endo.is_automorphism(),
                }))
            } else {
                let mut out = String::new();
                let _ = writeln!(out, "restriction to Im(e^{power}), rank {}", r.basis.len());
                let _ = writeln!(out, "basis:");
                for (i, b) in r.basis.iter().enumerate() {
                    let _ = writeln!(out, "  {} = {}", target.render_monoid(&[i]), input.symbols.render_group(b));
                }
                let _ = writeln!(out, "restricted endomorphism:");
                out.push_str(&indent(&render_endo(&target, &r.endo)));
                let _ = writeln!(out, "matrix:");
                out.push_str(&indent(&matrix.to_string()));
                let _ = writeln!(out, "det = {det}");
                let _ = writeln!(out, "automorphism: {}", r.endo.is_automorphism());
                out
            };
            Ok(Outcome::ok(0, out))
        }
        Command::Freeness {
            input,
            connection,
            max_complexity,
            max_restrict,
        } => {
            let input = read_input(&input.input)?;
            let presentation = match &input.morphism {
                Morphism::Substitution(s) => match &connection.connection {
                    Some(spec) => {
                        let c = parse_connection(&input, s, spec)?;
                        let evidence = s.periodicity_evidence(*max_complexity)?;
                        crate::presentation::omega_presentation_at(s, &c, evidence)?.0
                    }
                    None => omega_presentation_from_substitution(s, *max_complexity)?.0,
                },
                Morphism::Endomorphism(e) => OmegaPresentation::given(e.clone()),
            };
            let report = freeness_test(&presentation, *max_restrict)?;
            let code = if report.verdict == Verdict::Inconclusive { 2 } else { 0 };
            let out = if cli.json {
                to_json(&json!({ "presentation": presentation, "freeness": report }))
            } else {
                let mut out = String::new();
                let _ = writeln!(out, "presentation: {}", presentation.provenance);
                out.push_str(&render_freeness(&report));
                out
            };
            Ok(Outcome::ok(code, out))
        }
        Command::Stallings { input, power, dot } => {
            let input = read_input(&input.input)?;
            let e = input.endomorphism().power(*power);
            let a = e.image_automaton();
            let tree = a.spanning_tree();
            let basis = a.basis_from_tree(&tree);
            if let Some(path) = dot {
                write_file(path, &a.to_dot_with(&input.symbols, Some(&tree)))?;
            }
            let out = if cli.json {
                to_json(&json!({
                    "automaton": a,
                    "rank": a.rank(),
                    "tree": tree.edges(),
                    "basis": basis.elements.iter().map(|w| input.symbols.render_group(w)).collect::<Vec<_>>(),
                }))
            } else {
                let mut out = String::new();
                let _ = writeln!(out, "Im(e^{power}): {} states, {} edges, rank {}", a.states(), a.edges().len(), a.rank());
                for (i, edge) in a.edges().iter().enumerate() {
                    let mark = if tree.contains(i) { "  tree" } else { "" };
                    let _ = writeln!(
                        out,
                        "  s{} -{}-> s{}{mark}",
                        edge.src,
                        input.symbols.render_monoid(&[edge.letter]),
                        edge.dst
                    );
                }
                let _ = writeln!(out, "basis:");
                for b in &basis.elements {
                    let _ = writeln!(out, "  {}", input.symbols.render_group(b));
                }
                out
            };
            Ok(Outcome::ok(0, out))
        }
        Command::Examples => {
            let checks = example_checks();
            let failed = checks.iter().filter(|c| !c.passed).count();
            let out = if cli.json {
                let rows: Vec<_> = checks
                    .iter()
                    .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
                    .collect();
                to_json(&rows)
            } else {
                let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
                let mut out = String::new();
                for c in &checks {
                    let status = if c.passed { "PASS" } else { "FAIL" };
                    let _ = writeln!(out, "{status}  {:width$}  {}", c.name, c.detail);
                }
                let _ = writeln!(out, "{} passed, {failed} failed", checks.len() - failed);
                out
            };
            Ok(Outcome::ok(if failed == 0 { 0 } else { 1 }, out))
        }
    }
}

fn indent(text: &str) -> String {
    text.lines().map(|l| format!("  {l}\n")).collect()
}

fn render_endo(symbols: &SymbolTable, e: &GroupEndomorphism) -> String {
    let mut out = String::new();
    for (a, w) in e.render(symbols).iter().enumerate() {
        let _ = writeln!(out, "{} -> {}", symbols.render_monoid(&[a]), w);
    }
    out
}

fn render_returns(symbols: &SymbolTable, s: &Substitution, r: &ReturnStructure) -> Result<String> {
    let c = &r.connection;
    let indices = SymbolTable::standard_for(r.size());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "connection ({}, {}) of order {}",
        symbols.render_monoid(&c.u),
        symbols.render_monoid(&c.v),
        c.order
    );
    let width = r.theta.iter().map(|w| w.len()).max().unwrap_or(0);
    let _ = writeln!(out, "{:<4}{:<width$}  return substitution", "", "return words");
    for (j, (theta, image)) in r.theta.iter().zip(r.return_substitution.images()).enumerate() {
        let _ = writeln!(
            out,
            "{:<4}{:<width$}  {} -> {}",
            indices.render_monoid(&[j]),
            symbols.render_monoid(theta),
            indices.render_monoid(&[j]),
            indices.render_monoid(image)
        );
    }
    let _ = writeln!(out, "factorizations:");
    for j in 0..r.size() {
        let pieces: Vec<String> = r
            .factorization_row(s, j)
            .iter()
            .map(|w| symbols.render_monoid(w))
            .collect();
        let row = r.factorize(s, j)?;
        let _ = writeln!(out, "  {}: {} = {}", indices.render_monoid(&[j]), pieces.join("."), indices.render_monoid(&row));
    }
    Ok(out)
}

fn render_freeness(report: &FreenessReport) -> String {
    let mut out = String::new();
    for (i, e) in report.chain.iter().enumerate() {
        let symbols = SymbolTable::standard_for(e.size());
        let _ = writeln!(out, "definer at step {i}:");
        out.push_str(&indent(&render_endo(&symbols, e)));
    }
    let _ = writeln!(out, "certificate:");
    for fact in &report.certificate {
        let _ = writeln!(out, "  {fact}");
    }
    let _ = writeln!(out, "verdict: {}", report.verdict);
    if report.conditional {
        let _ = writeln!(out, "conditional on aperiodicity");
    }
    out
}

fn render_analysis(input: &Input, report: &AnalysisReport) -> String {
    let symbols = &input.symbols;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "primitive: {} (exponent {})",
        report.primitivity.primitive,
        report.primitivity.exponent.map_or("-".to_string(), |n| n.to_string())
    );
    let _ = writeln!(out, "aperiodicity: {}", serde_json::to_string(&report.aperiodicity).expect("serializable"));
    let _ = writeln!(out, "det = {}", report.determinant);
    let _ = writeln!(out, "proper: {}", report.proper);
    if let Some(r) = &report.returns {
        if let Ok(s) = input.substitution() {
            if let Ok(text) = render_returns(symbols, s, r) {
                out.push_str(&text);
            }
        }
    }
    if !report.ranks.is_empty() {
        let ranks: Vec<String> = report
            .ranks
            .iter()
            .map(|r| format!("{}{}", r.rank, if r.injective { "" } else { "*" }))
            .collect();
        let _ = writeln!(out, "restriction ranks: {} (* not injective)", ranks.join(", "));
    }
    if let Some(p) = &report.presentation {
        let _ = writeln!(out, "presentation: {}", p.provenance);
    }
    if let Some(f) = &report.freeness {
        out.push_str(&render_freeness(f));
    }
    let facts = &report.pseudovariety_facts;
    let mut rows = BTreeMap::new();
    rows.insert("unimodular", facts.unimodular.to_string());
    rows.insert("invertible", facts.invertible.to_string());
    rows.insert("Gp_contained_for", facts.Gp_contained_for.clone());
    rows.insert("Gnil_contained", facts.Gnil_contained.to_string());
    rows.insert("V_equals_G", facts.V_equals_G.to_string());
    let _ = writeln!(out, "pseudovariety facts:");
    for (k, v) in rows {
        let _ = writeln!(out, "  {k}: {v}");
    }
    if let Some(free) = report.relatively_free {
        let _ = writeln!(out, "relatively free: {free}");
    }
    for note in &report.notes {
        let _ = writeln!(out, "note: {note}");
    }
    out
}

/// Parses rules written with the standard symbols.
pub fn parse_inline(rules: &str) -> Result<Input> {
    parse_substitution_file(&rules.replace(';', "\n"))
}

/// Word in the input's symbols.
pub fn render_word(input: &Input, w: &MonoidWord) -> String {
    input.symbols.render_monoid(w)
}
