//! Problem files: a chart, declared functions, a metric and a projector.
//!
//! ```text
//! [chart]
//! r = [0.5, 1.5]
//! theta = [0.5, 1.3]
//!
//! [functions]
//! Psi = [r, theta]                          # opaque, generic binding
//! Xi = { args = [r], body = "1 + r^2" }     # concrete binding
//!
//! [metric]
//! g.r.r = "Xi"
//! g.r.theta = 0
//! g.theta.theta = "r^2*Psi"
//!
//! [projector]
//! block = [r]                               # or P.a.b = "..." components
//!
//! [settings]
//! seed = 42
//! samples = 32
//! tolerance = 1e-9
//! ```
//!
//! Lists may hold bare names, numbers or quoted strings and may span lines.
//! Values after `=` are either quoted strings, lists, inline tables or bare
//! text running to the end of the line.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use biconformal::expr::{EvalContext, Expr, ExprFunction};
use biconformal::geometry::{Chart, MetricChart, TensorField, Variance};
use biconformal::projectors::ProjectorPair;

use crate::syntax::{parse_expr, FunctionDecl, Scope, SyntaxErrorKind};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug)]
pub enum Value {
    /// String contents and the position of their first character.
    Str(String, Pos),
    List(Vec<Value>, Pos),
    Table(Vec<(String, Value)>, Pos),
    Bare(String, Pos),
}

impl Value {
    pub fn pos(&self) -> Pos {
        match self {
            Value::Str(_, p) | Value::List(_, p) | Value::Table(_, p) | Value::Bare(_, p) => *p,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub key: String,
    pub key_pos: Pos,
    pub value: Value,
}

#[derive(Clone, Debug, Default)]
pub struct Document {
    pub sections: Vec<(String, Pos, Vec<Entry>)>,
}

fn parse_error(pos: Pos, message: impl Into<String>) -> CliError {
    CliError::Parse { line: pos.line, column: pos.column, message: message.into() }
}

/// Characters with their source positions, comments removed.
type Text = Vec<(char, Pos)>;

fn strip_comment(line: &str, line_no: usize) -> Text {
    let mut out = Vec::new();
    let mut in_str = false;
    let mut escaped = false;
    for (k, c) in line.chars().enumerate() {
        if !in_str && c == '#' {
            break;
        }
        if in_str && !escaped && c == '"' {
            in_str = false;
        } else if !in_str && c == '"' {
            in_str = true;
        }
        escaped = in_str && !escaped && c == '\\';
        out.push((c, Pos { line: line_no, column: k + 1 }));
    }
    out
}

fn depth_change(t: &[(char, Pos)]) -> i64 {
    let mut d = 0;
    let mut in_str = false;
    let mut escaped = false;
    for (c, _) in t {
        match (*c, in_str) {
            ('"', false) => in_str = true,
            ('"', true) if !escaped => in_str = false,
            ('[' | '{', false) => d += 1,
            (']' | '}', false) => d -= 1,
            _ => {}
        }
        escaped = in_str && !escaped && *c == '\\';
    }
    d
}

struct Cursor<'a> {
    t: &'a [(char, Pos)],
    i: usize,
    end: Pos,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.t.len() && self.t[self.i].0.is_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.t.get(self.i).map(|c| c.0)
    }

    fn pos(&self) -> Pos {
        self.t.get(self.i).map_or(self.end, |c| c.1)
    }

    fn value(&mut self, nested: bool) -> Result<Value, CliError> {
        self.skip_ws();
        let start = self.pos();
        match self.peek() {
            None => Err(parse_error(start, "missing value")),
            Some('"') => {
                self.i += 1;
                let content_pos = self.pos();
                let mut s = String::new();
                loop {
                    match self.peek() {
                        None => return Err(parse_error(start, "unterminated string")),
                        Some('"') => {
                            self.i += 1;
                            return Ok(Value::Str(s, content_pos));
                        }
                        Some('\\') => {
                            self.i += 1;
                            match self.peek() {
                                Some('n') => s.push('\n'),
                                Some('t') => s.push('\t'),
                                Some(c @ ('"' | '\\')) => s.push(c),
                                _ => return Err(parse_error(self.pos(), "unknown escape")),
                            }
                            self.i += 1;
                        }
                        Some(c) => {
                            s.push(c);
                            self.i += 1;
                        }
                    }
                }
            }
            Some('[') => {
                self.i += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    if self.peek() == Some(']') {
                        self.i += 1;
                        return Ok(Value::List(items, start));
                    }
                    items.push(self.value(true)?);
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.i += 1,
                        Some(']') => {}
                        _ => return Err(parse_error(self.pos(), "expected `,` or `]`")),
                    }
                }
            }
            Some('{') => {
                self.i += 1;
                let mut fields = Vec::new();
                loop {
                    self.skip_ws();
                    if self.peek() == Some('}') {
                        self.i += 1;
                        return Ok(Value::Table(fields, start));
                    }
                    let key_pos = self.pos();
                    let mut key = String::new();
                    while let Some(c) = self.peek() {
                        if c == '=' || c.is_whitespace() {
                            break;
                        }
                        key.push(c);
                        self.i += 1;
                    }
                    self.skip_ws();
                    if key.is_empty() || self.peek() != Some('=') {
                        return Err(parse_error(key_pos, "expected `key = value`"));
                    }
                    self.i += 1;
                    fields.push((key, self.value(true)?));
                    self.skip_ws();
                    match self.peek() {
                        Some(',') => self.i += 1,
                        Some('}') => {}
                        _ => return Err(parse_error(self.pos(), "expected `,` or `}`")),
                    }
                }
            }
            Some(_) => {
                let mut s = String::new();
                while let Some(c) = self.peek() {
                    if nested && matches!(c, ',' | ']' | '}') {
                        break;
                    }
                    s.push(c);
                    self.i += 1;
                }
                Ok(Value::Bare(s.trim_end().to_string(), start))
            }
        }
    }
}

pub fn parse_document(text: &str) -> Result<Document, CliError> {
    let lines: Vec<&str> = text.lines().collect();
    let mut doc = Document::default();
    let mut k = 0;
    while k < lines.len() {
        let line_no = k + 1;
        let mut t = strip_comment(lines[k], line_no);
        k += 1;
        while t.last().is_some_and(|c| c.0.is_whitespace()) {
            t.pop();
        }
        let first = t.iter().position(|c| !c.0.is_whitespace());
        let Some(first) = first else { continue };
        let t = t.split_off(first);
        let start = t[0].1;
        if t[0].0 == '[' {
            if t.last().map(|c| c.0) != Some(']') {
                return Err(parse_error(start, "malformed section header"));
            }
            let name: String = t[1..t.len() - 1].iter().map(|c| c.0).collect();
            let name = name.trim().to_string();
            if name.is_empty() {
                return Err(parse_error(start, "empty section name"));
            }
            doc.sections.push((name, start, Vec::new()));
            continue;
        }
        let Some(eq) = t.iter().position(|c| c.0 == '=') else {
            return Err(parse_error(start, "expected `key = value`"));
        };
        let key: String = t[..eq].iter().map(|c| c.0).collect();
        let key = key.trim().to_string();
        if key.is_empty() {
            return Err(parse_error(start, "missing key"));
        }
        let mut rest: Text = t[eq + 1..].to_vec();
        // lists and tables may continue on the following lines
        let mut depth = depth_change(&rest);
        while depth > 0 && k < lines.len() {
            let more = strip_comment(lines[k], k + 1);
            depth += depth_change(&more);
            rest.push(('\n', Pos { line: k + 1, column: 0 }));
            rest.extend(more);
            k += 1;
        }
        let end = Pos { line: k, column: lines[k - 1].chars().count() + 1 };
        let mut cur = Cursor { t: &rest, i: 0, end };
        let value = cur.value(false)?;
        cur.skip_ws();
        if cur.i < rest.len() {
            return Err(parse_error(cur.pos(), "unexpected text after value"));
        }
        let Some(section) = doc.sections.last_mut() else {
            return Err(parse_error(start, "entry outside of any section"));
        };
        section.2.push(Entry { key, key_pos: start, value });
    }
    Ok(doc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Coordinate {
    pub name: String,
    pub interval: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProjectorSpec {
    /// Orthogonal projector onto the span of these coordinate directions.
    Block(Vec<String>),
    /// Lower-index components `P_ab`, full symmetric matrix.
    Components(Vec<Vec<Expr>>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Settings {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub tolerance: Option<f64>,
}

impl Settings {
    /// `self` where set, otherwise `fallback`.
    pub fn or(self, fallback: Settings) -> Settings {
        Settings {
            seed: self.seed.or(fallback.seed),
            samples: self.samples.or(fallback.samples),
            tolerance: self.tolerance.or(fallback.tolerance),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(42)
    }

    pub fn samples(&self) -> usize {
        self.samples.unwrap_or(32)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(1e-9)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub chart: Vec<Coordinate>,
    pub functions: Vec<FunctionDecl>,
    /// Full symmetric matrix of metric components.
    pub metric: Vec<Vec<Expr>>,
    pub projector: ProjectorSpec,
    pub settings: Settings,
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_alphabetic() || c == '_') && cs.all(|c| c.is_alphanumeric() || c == '_')
}

const RESERVED: [&str; 8] = ["sin", "cos", "exp", "log", "abs", "sign", "sqrt", "D"];

fn number(v: &Value) -> Result<f64, CliError> {
    match v {
        Value::Bare(s, p) => s.parse().map_err(|_| parse_error(*p, format!("expected a number, got `{s}`"))),
        other => Err(parse_error(other.pos(), "expected a number")),
    }
}

fn integer(v: &Value) -> Result<u64, CliError> {
    match v {
        Value::Bare(s, p) => s.parse().map_err(|_| parse_error(*p, format!("expected an integer, got `{s}`"))),
        other => Err(parse_error(other.pos(), "expected an integer")),
    }
}

fn names(v: &Value) -> Result<Vec<(String, Pos)>, CliError> {
    let Value::List(items, _) = v else {
        return Err(parse_error(v.pos(), "expected a list of names"));
    };
    items
        .iter()
        .map(|it| match it {
            Value::Bare(s, p) | Value::Str(s, p) if is_identifier(s) => Ok((s.clone(), *p)),
            other => Err(parse_error(other.pos(), "expected a name")),
        })
        .collect()
}

fn expression(v: &Value, scope: &Scope) -> Result<Expr, CliError> {
    let (text, pos) = match v {
        Value::Str(s, p) | Value::Bare(s, p) => (s, *p),
        other => return Err(parse_error(other.pos(), "expected an expression")),
    };
    // expression offsets map onto the source line of the value
    let here = |offset: usize| Pos { line: pos.line, column: pos.column + offset };
    parse_expr(text, scope).map_err(|e| {
        let at = here(e.offset);
        match e.kind {
            SyntaxErrorKind::Message(m) => parse_error(at, m),
            SyntaxErrorKind::Undeclared(name) => {
                CliError::UndeclaredSymbol { name, line: at.line, column: at.column }
            }
        }
    })
}

/// `prefix.a.b` with both `a` and `b` coordinates; returns their indices.
fn component_key(e: &Entry, prefix: &str, coords: &[String]) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = e.key.split('.').map(str::trim).collect();
    if parts.len() != 3 || parts[0] != prefix {
        return Err(parse_error(e.key_pos, format!("expected `{prefix}.<coordinate>.<coordinate>`, got `{}`", e.key)));
    }
    let find = |name: &str| {
        coords.iter().position(|c| c == name).ok_or_else(|| CliError::UndeclaredSymbol {
            name: name.to_string(),
            line: e.key_pos.line,
            column: e.key_pos.column,
        })
    };
    Ok((find(parts[1])?, find(parts[2])?))
}

fn symmetric_matrix(
    entries: &[Entry],
    prefix: &str,
    coords: &[String],
    scope: &Scope,
    section: &str,
) -> Result<Vec<Vec<Expr>>, CliError> {
    let n = coords.len();
    let mut m: Vec<Vec<Option<Expr>>> = vec![vec![None; n]; n];
    for e in entries {
        let (a, b) = component_key(e, prefix, coords)?;
        let (a, b) = (a.min(b), a.max(b));
        if m[a][b].is_some() {
            return Err(parse_error(e.key_pos, format!("component `{}` given twice", e.key)));
        }
        m[a][b] = Some(expression(&e.value, scope)?);
    }
    let mut out = vec![vec![Expr::zero(); n]; n];
    for a in 0..n {
        for b in a..n {
            let Some(v) = m[a][b].take() else {
                return Err(CliError::MissingComponent {
                    what: format!("[{section}] {prefix}.{}.{}", coords[a], coords[b]),
                });
            };
            out[a][b] = v.clone();
            out[b][a] = v;
        }
    }
    Ok(out)
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, CliError> {
    let doc = parse_document(text)?;
    let mut by_name: BTreeMap<&str, &[Entry]> = BTreeMap::new();
    for (name, pos, entries) in &doc.sections {
        if !["chart", "functions", "metric", "projector", "settings"].contains(&name.as_str()) {
            return Err(parse_error(*pos, format!("unknown section `[{name}]`")));
        }
        if by_name.insert(name, entries).is_some() {
            return Err(parse_error(*pos, format!("section `[{name}]` appears twice")));
        }
    }
    let section = |name: &str| by_name.get(name).copied();

    let Some(chart_entries) = section("chart") else {
        return Err(CliError::MissingComponent { what: "[chart] section".into() });
    };
    let mut chart = Vec::new();
    for e in chart_entries {
        if !is_identifier(&e.key) || RESERVED.contains(&e.key.as_str()) {
            return Err(parse_error(e.key_pos, format!("`{}` cannot name a coordinate", e.key)));
        }
        if chart.iter().any(|c: &Coordinate| c.name == e.key) {
            return Err(parse_error(e.key_pos, format!("coordinate `{}` declared twice", e.key)));
        }
        let Value::List(items, p) = &e.value else {
            return Err(parse_error(e.value.pos(), "expected `[low, high]`"));
        };
        if items.len() != 2 {
            return Err(parse_error(*p, "expected `[low, high]`"));
        }
        let (lo, hi) = (number(&items[0])?, number(&items[1])?);
        if !(lo < hi) {
            return Err(parse_error(*p, "interval must have low < high"));
        }
        chart.push(Coordinate { name: e.key.clone(), interval: (lo, hi) });
    }
    if chart.len() < 2 {
        return Err(CliError::MissingComponent { what: "[chart] needs at least two coordinates".into() });
    }
    let coords: Vec<String> = chart.iter().map(|c| c.name.clone()).collect();

    let mut functions: Vec<FunctionDecl> = Vec::new();
    for e in section("functions").unwrap_or(&[]) {
        if !is_identifier(&e.key) || RESERVED.contains(&e.key.as_str()) || coords.contains(&e.key) {
            return Err(parse_error(e.key_pos, format!("`{}` cannot name a function", e.key)));
        }
        if functions.iter().any(|f| f.name == e.key) {
            return Err(parse_error(e.key_pos, format!("function `{}` declared twice", e.key)));
        }
        let (args_value, body_value) = match &e.value {
            Value::List(..) => (&e.value, None),
            Value::Table(fields, p) => {
                let get = |k: &str| fields.iter().find(|f| f.0 == k).map(|f| &f.1);
                if let Some((k, _)) = fields.iter().find(|f| f.0 != "args" && f.0 != "body") {
                    return Err(parse_error(*p, format!("unknown field `{k}`")));
                }
                let Some(args) = get("args") else {
                    return Err(parse_error(*p, "function table needs `args`"));
                };
                (args, get("body"))
            }
            other => return Err(parse_error(other.pos(), "expected an argument list or `{ args = [...], body = \"...\" }`")),
        };
        let mut args = Vec::new();
        for (a, p) in names(args_value)? {
            if !coords.contains(&a) {
                return Err(CliError::UndeclaredSymbol { name: a, line: p.line, column: p.column });
            }
            if args.contains(&a) {
                return Err(parse_error(p, format!("argument `{a}` repeated")));
            }
            args.push(a);
        }
        let body = match body_value {
            Some(v) => Some(expression(v, &Scope { coordinates: &args, functions: &[] })?),
            None => None,
        };
        functions.push(FunctionDecl { name: e.key.clone(), args, body });
    }
    let scope = Scope { coordinates: &coords, functions: &functions };

    let Some(metric_entries) = section("metric") else {
        return Err(CliError::MissingComponent { what: "[metric] section".into() });
    };
    let metric = symmetric_matrix(metric_entries, "g", &coords, &scope, "metric")?;

    let Some(proj_entries) = section("projector") else {
        return Err(CliError::MissingComponent { what: "[projector] section".into() });
    };
    let projector = match proj_entries.iter().find(|e| e.key == "block") {
        Some(b) => {
            if proj_entries.len() > 1 {
                return Err(parse_error(b.key_pos, "`block` excludes explicit components"));
            }
            let mut block = Vec::new();
            for (name, p) in names(&b.value)? {
                if !coords.contains(&name) {
                    return Err(CliError::UndeclaredSymbol { name, line: p.line, column: p.column });
                }
                block.push(name);
            }
            ProjectorSpec::Block(block)
        }
        None => ProjectorSpec::Components(symmetric_matrix(proj_entries, "P", &coords, &scope, "projector")?),
    };

    let mut settings = Settings::default();
    for e in section("settings").unwrap_or(&[]) {
        match e.key.as_str() {
            "seed" => settings.seed = Some(integer(&e.value)?),
            "samples" => settings.samples = Some(integer(&e.value)? as usize),
            "tolerance" => settings.tolerance = Some(number(&e.value)?),
            other => return Err(parse_error(e.key_pos, format!("unknown setting `{other}`"))),
        }
    }

    Ok(ProblemFile { chart, functions, metric, projector, settings })
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

impl ProblemFile {
    pub fn coordinates(&self) -> Vec<String> {
        self.chart.iter().map(|c| c.name.clone()).collect()
    }

    /// Problem-file text that parses back to `self`.
    pub fn serialize(&self) -> String {
        let coords = self.coordinates();
        let mut out = String::from("[chart]\n");
        for c in &self.chart {
            let _ = writeln!(out, "{} = [{:?}, {:?}]", c.name, c.interval.0, c.interval.1);
        }
        if !self.functions.is_empty() {
            out.push_str("\n[functions]\n");
            for f in &self.functions {
                let args = f.args.join(", ");
                match &f.body {
                    None => {
                        let _ = writeln!(out, "{} = [{args}]", f.name);
                    }
                    Some(b) => {
                        let _ = writeln!(out, "{} = {{ args = [{args}], body = {} }}", f.name, quoted(&b.to_string()));
                    }
                }
            }
        }
        let matrix = |out: &mut String, prefix: &str, m: &[Vec<Expr>]| {
            for a in 0..coords.len() {
                for b in a..coords.len() {
                    let _ = writeln!(out, "{prefix}.{}.{} = {}", coords[a], coords[b], quoted(&m[a][b].to_string()));
                }
            }
        };
        out.push_str("\n[metric]\n");
        matrix(&mut out, "g", &self.metric);
        out.push_str("\n[projector]\n");
        match &self.projector {
            ProjectorSpec::Block(b) => {
                let _ = writeln!(out, "block = [{}]", b.join(", "));
            }
            ProjectorSpec::Components(m) => matrix(&mut out, "P", m),
        }
        let s = &self.settings;
        if s.seed.is_some() || s.samples.is_some() || s.tolerance.is_some() {
            out.push_str("\n[settings]\n");
            if let Some(v) = s.seed {
                let _ = writeln!(out, "seed = {v}");
            }
            if let Some(v) = s.samples {
                let _ = writeln!(out, "samples = {v}");
            }
            if let Some(v) = s.tolerance {
                let _ = writeln!(out, "tolerance = {v:?}");
            }
        }
        out
    }

    /// Sampling context with concrete function bodies bound; opaque
    /// functions get generic bindings when the metric is built.
    pub fn context(&self, settings: &Settings) -> Result<EvalContext, CliError> {
        let spec: Vec<(&str, (f64, f64))> = self.chart.iter().map(|c| (c.name.as_str(), c.interval)).collect();
        let mut ctx = EvalContext::new(&spec)
            .with_seed(settings.seed())
            .with_samples(settings.samples())
            .with_tolerance(settings.tolerance());
        for f in &self.functions {
            if let Some(body) = &f.body {
                let args: Vec<&str> = f.args.iter().map(String::as_str).collect();
                let bound = ExprFunction::new(&args, body.clone()).map_err(biconformal::Error::from)?;
                ctx.bind_function(&f.name, Arc::new(bound));
            }
        }
        Ok(ctx)
    }

    pub fn build(&self, settings: &Settings) -> Result<(MetricChart, ProjectorPair), CliError> {
        let spec: Vec<(&str, (f64, f64))> = self.chart.iter().map(|c| (c.name.as_str(), c.interval)).collect();
        let chart = Chart::new(&spec)?;
        let metric = MetricChart::from_rows(&chart, &self.metric, self.context(settings)?)?;
        let projectors = match &self.projector {
            ProjectorSpec::Block(names) => {
                let block: Vec<usize> =
                    names.iter().filter_map(|n| chart.index_of(n)).collect();
                ProjectorPair::from_coordinate_block(&metric, &block)?
            }
            ProjectorSpec::Components(m) => {
                let p = TensorField::from_fn(&chart, &[Variance::Down, Variance::Down], |i| m[i[0]][i[1]].clone());
                ProjectorPair::from_components(&metric, p)?
            }
        };
        Ok((metric, projectors))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLAT: &str = "[chart]\nx = [0, 1]\ny = [0, 1]\n\n[metric]\ng.x.x = 1\ng.x.y = 0\ng.y.y = 1\n\n[projector]\nblock = [x]\n";

    #[test]
    fn minimal_flat_plane() {
        let p = parse_problem(FLAT).unwrap();
        assert_eq!(p.coordinates(), ["x", "y"]);
        assert_eq!(p.metric[1][1], Expr::one());
        assert_eq!(p.projector, ProjectorSpec::Block(vec!["x".into()]));
        assert_eq!(parse_problem(&p.serialize()).unwrap(), p);
    }

    #[test]
    fn positions_point_into_the_expression() {
        let text = FLAT.replace("g.x.y = 0", "g.x.y = \"x + Q\"");
        match parse_problem(&text).unwrap_err() {
            CliError::UndeclaredSymbol { name, line, column } => {
                assert_eq!((name.as_str(), line, column), ("Q", 7, 14));
            }
            other => panic!("{other:?}"),
        }
        let text = FLAT.replace("g.x.y = 0", "g.x.y = x +");
        assert!(matches!(parse_problem(&text), Err(CliError::Parse { line: 7, column: 12, .. })));
    }

    #[test]
    fn missing_and_duplicate_components() {
        let text = FLAT.replace("g.x.y = 0\n", "");
        assert!(matches!(parse_problem(&text), Err(CliError::MissingComponent { .. })));
        let text = FLAT.replace("g.x.y = 0", "g.x.y = 0\ng.y.x = 0");
        assert!(matches!(parse_problem(&text), Err(CliError::Parse { line: 8, .. })));
    }

    #[test]
    fn multi_line_lists_and_comments() {
        let doc = parse_document("[a]\nk = [1, # one\n  2,\n  \"#3\"]\n").unwrap();
        let Value::List(items, _) = &doc.sections[0].2[0].value else { panic!() };
        assert_eq!(items.len(), 3);
        assert!(matches!(&items[2], Value::Str(s, _) if s == "#3"));
    }
}
