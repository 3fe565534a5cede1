//! Text formats: the line-based game format and a QDIMACS-subset reader
//! for CNF/QBF inputs to the hardness gadget generators.
//!
//! Game grammar, one declaration per line, `#` starts a comment:
//!
//! ```text
//! dimension <d>
//! state <name> box|diamond
//! edge <src> <dst> <v1,...,vd>
//! ```
//!
//! where each `vi` is `w` for ω or an integer ≤ 0.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{validate_game, Game, GameDescription, Label, Owner, ResourceDelta, ValidateError};

/// Parse failures; every variant carries the 1-based offending line.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: ValidateError },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Invalid { line, .. } => *line,
        }
    }
}

fn syntax(line: usize, col: usize, expected: &str) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        expected: expected.to_string(),
    }
}

/// Split a comment-stripped line into (1-based char column, token) pairs.
fn tokenize(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut col = 0usize;
    for (bidx, ch) in line.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((sb, sc)) = start.take() {
                out.push((sc, &line[sb..bidx]));
            }
        } else if start.is_none() {
            start = Some((bidx, col));
        }
    }
    if let Some((sb, sc)) = start {
        out.push((sc, &line[sb..]));
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

struct StateRecord {
    line: usize,
    name: String,
}

struct EdgeRecord {
    line: usize,
    src: String,
    dst: String,
    label: Label,
}

/// Parse the game format and run full structural validation.
pub fn parse_game(text: &str) -> Result<Game, ParseError> {
    let mut dimension: Option<(usize, usize)> = None;
    let mut states: Vec<StateRecord> = Vec::new();
    let mut owners: Vec<Owner> = Vec::new();
    let mut edges: Vec<EdgeRecord> = Vec::new();

    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let toks = tokenize(strip_comment(raw));
        let Some(&(kcol, keyword)) = toks.first() else {
            continue;
        };
        if dimension.is_none() && keyword != "dimension" {
            return Err(syntax(
                line,
                kcol,
                "'dimension' as the first declaration",
            ));
        }
        match keyword {
            "dimension" => {
                if dimension.is_some() {
                    return Err(syntax(line, kcol, "no second dimension declaration"));
                }
                let &(vcol, value) = toks
                    .get(1)
                    .ok_or_else(|| syntax(line, kcol + keyword.len(), "a dimension value"))?;
                let d: usize = value
                    .parse()
                    .map_err(|_| syntax(line, vcol, "a nonnegative integer dimension"))?;
                if let Some(&(ecol, _)) = toks.get(2) {
                    return Err(syntax(line, ecol, "end of line"));
                }
                dimension = Some((line, d));
            }
            "state" => {
                let &(_, name) = toks
                    .get(1)
                    .ok_or_else(|| syntax(line, kcol + keyword.len(), "a state name"))?;
                let &(ocol, owner) = toks
                    .get(2)
                    .ok_or_else(|| syntax(line, kcol, "an owner, 'box' or 'diamond'"))?;
                let owner = match owner {
                    "box" => Owner::Box,
                    "diamond" => Owner::Diamond,
                    _ => return Err(syntax(line, ocol, "'box' or 'diamond'")),
                };
                if let Some(&(ecol, _)) = toks.get(3) {
                    return Err(syntax(line, ecol, "end of line"));
                }
                states.push(StateRecord {
                    line,
                    name: name.to_string(),
                });
                owners.push(owner);
            }
            "edge" => {
                let &(_, src) = toks
                    .get(1)
                    .ok_or_else(|| syntax(line, kcol + keyword.len(), "a source state"))?;
                let &(_, dst) = toks
                    .get(2)
                    .ok_or_else(|| syntax(line, kcol, "a target state"))?;
                let &(lcol, deltas) = toks
                    .get(3)
                    .ok_or_else(|| syntax(line, kcol, "a comma-separated delta vector"))?;
                if let Some(&(ecol, _)) = toks.get(4) {
                    return Err(syntax(line, ecol, "end of line"));
                }
                let label = parse_deltas(deltas, line, lcol)?;
                edges.push(EdgeRecord {
                    line,
                    src: src.to_string(),
                    dst: dst.to_string(),
                    label,
                });
            }
            _ => {
                return Err(syntax(
                    line,
                    kcol,
                    "'dimension', 'state' or 'edge'",
                ));
            }
        }
    }

    let (dim_line, dim) = dimension.ok_or_else(|| syntax(last_line.max(1), 1, "a dimension declaration"))?;

    let desc = GameDescription {
        dimension: dim,
        states: states
            .iter()
            .zip(&owners)
            .map(|(s, &o)| (s.name.clone(), o))
            .collect(),
        edges: edges
            .iter()
            .map(|e| (e.src.clone(), e.dst.clone(), e.label.clone()))
            .collect(),
    };
    validate_game(&desc).map_err(|err| ParseError::Invalid {
        line: attribute_line(&err, dim_line, &states, &edges),
        source: err,
    })
}

fn parse_deltas(token: &str, line: usize, start_col: usize) -> Result<Label, ParseError> {
    let mut deltas = Vec::new();
    let mut col = start_col;
    for part in token.split(',') {
        if part == "w" {
            deltas.push(ResourceDelta::Omega);
        } else {
            let v: i64 = part
                .parse()
                .map_err(|_| syntax(line, col, "'w' or an integer delta"))?;
            deltas.push(ResourceDelta::Fin(v));
        }
        col += part.chars().count() + 1;
    }
    Ok(Label::new(deltas))
}

/// Pick the line to blame for a structural validation error.
fn attribute_line(
    err: &ValidateError,
    dim_line: usize,
    states: &[StateRecord],
    edges: &[EdgeRecord],
) -> usize {
    let state_line = |name: &str| {
        states
            .iter()
            .find(|s| s.name == name)
            .map(|s| s.line)
            .unwrap_or(dim_line)
    };
    let edge_line = |src: &str, dst: &str, skip_first: bool| {
        let mut found = edges.iter().filter(|e| e.src == src && e.dst == dst);
        if skip_first {
            found.nth(1).or_else(|| {
                edges.iter().find(|e| e.src == src && e.dst == dst)
            })
        } else {
            found.next()
        }
        .map(|e| e.line)
        .unwrap_or(dim_line)
    };
    match err {
        ValidateError::EmptyGame | ValidateError::ZeroDimension => dim_line,
        ValidateError::DuplicateState(name) => states
            .iter()
            .filter(|s| &s.name == name)
            .nth(1)
            .map(|s| s.line)
            .unwrap_or(dim_line),
        ValidateError::UnknownState { src, dst, .. } => edge_line(src, dst, false),
        ValidateError::DimensionMismatch { src, dst, found, .. } => edges
            .iter()
            .find(|e| &e.src == src && &e.dst == dst && e.label.dimension() == *found)
            .map(|e| e.line)
            .unwrap_or(dim_line),
        ValidateError::PositiveFiniteDelta {
            src,
            dst,
            component,
            value,
        } => edges
            .iter()
            .find(|e| {
                &e.src == src
                    && &e.dst == dst
                    && e.label.deltas().get(*component) == Some(&ResourceDelta::Fin(*value))
            })
            .map(|e| e.line)
            .unwrap_or(dim_line),
        ValidateError::OmegaOnDiamond { src, dst, component } => edges
            .iter()
            .find(|e| {
                &e.src == src
                    && &e.dst == dst
                    && e.label.deltas().get(*component) == Some(&ResourceDelta::Omega)
            })
            .map(|e| e.line)
            .unwrap_or(dim_line),
        ValidateError::DuplicateEdge { src, dst, label } => edges
            .iter()
            .filter(|e| &e.src == src && &e.dst == dst && e.label.to_string() == *label)
            .nth(1)
            .map(|e| e.line)
            .unwrap_or_else(|| edge_line(src, dst, false)),
        ValidateError::MissingOutgoingEdge(name) => state_line(name),
    }
}

/// Canonical text form: dimension, states in declaration order, edges
/// sorted by (source, target, label). Names must be single tokens free of
/// `#` and `,`, which holds for everything this crate builds or parses.
pub fn serialize_game(g: &Game) -> String {
    let mut out = String::new();
    writeln!(out, "dimension {}", g.dimension()).unwrap();
    for s in g.states() {
        debug_assert!(tokenize(g.name(s)).len() == 1 && !g.name(s).contains(['#', ',']));
        writeln!(out, "state {} {}", g.name(s), g.owner(s)).unwrap();
    }
    let mut edges: Vec<_> = g.edges().to_vec();
    edges.sort_by(|a, b| {
        (a.src, a.dst, &a.label).cmp(&(b.src, b.dst, &b.label))
    });
    for e in &edges {
        writeln!(out, "edge {} {} {}", g.name(e.src), g.name(e.dst), e.label).unwrap();
    }
    out
}

/// Quantifier in a QBF prefix.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Quantifier {
    Exists,
    ForAll,
}

/// A prenex CNF formula. The prefix covers exactly the variables that
/// appear in the clauses, in quantification order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QbfInstance {
    prefix: Vec<(Quantifier, usize)>,
    clauses: Vec<Vec<i64>>,
}

impl QbfInstance {
    pub fn prefix(&self) -> &[(Quantifier, usize)] {
        &self.prefix
    }

    pub fn clauses(&self) -> &[Vec<i64>] {
        &self.clauses
    }

    pub fn num_vars(&self) -> usize {
        self.prefix.len()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_existential(&self) -> bool {
        self.prefix.iter().all(|&(q, _)| q == Quantifier::Exists)
    }

    /// Does clause `j` (0-based) contain the literal `var`/`¬var`?
    pub fn clause_contains(&self, j: usize, var: usize, negated: bool) -> bool {
        let lit = if negated { -(var as i64) } else { var as i64 };
        self.clauses[j].contains(&lit)
    }

    /// Largest variable index in use.
    pub fn max_var(&self) -> usize {
        self.prefix.iter().map(|&(_, v)| v).max().unwrap_or(0)
    }
}

/// QBF reader failures; line numbers are 1-based.
#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum QbfError {
    #[error("line {line}, column {col}: expected {expected}")]
    Syntax {
        line: usize,
        col: usize,
        expected: String,
    },
    #[error("line {line}: variable {variable} appears in a clause but not in the quantifier prefix")]
    UnboundVariable { line: usize, variable: usize },
    #[error("line {line}: variable {variable} is quantified but appears in no clause")]
    UnusedVariable { line: usize, variable: usize },
    #[error("line {line}: clause {clause} contains both {variable} and its negation")]
    TautologicalClause {
        line: usize,
        clause: usize,
        variable: usize,
    },
}

fn qsyntax(line: usize, col: usize, expected: &str) -> QbfError {
    QbfError::Syntax {
        line,
        col,
        expected: expected.to_string(),
    }
}

/// Parse a QDIMACS subset: `p cnf <n> <m>` header, optional `e`/`a`
/// quantifier lines, then one 0-terminated clause per line. Plain CNF input
/// (no quantifier lines) quantifies every appearing variable with ∃ in
/// increasing order.
pub fn parse_qbf(text: &str) -> Result<QbfInstance, QbfError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut prefix: Vec<(Quantifier, usize)> = Vec::new();
    let mut prefix_lines: Vec<usize> = Vec::new();
    let mut clauses: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let toks = tokenize(raw);
        let Some(&(kcol, keyword)) = toks.first() else {
            continue;
        };
        if keyword.starts_with('c') && keyword != "cnf" {
            // DIMACS comment line.
            continue;
        }
        let Some(&(_, n, m)) = header.as_ref() else {
            if keyword != "p" {
                return Err(qsyntax(line, kcol, "'p cnf <vars> <clauses>' header"));
            }
            if toks.get(1).map(|&(_, t)| t) != Some("cnf") {
                let col = toks.get(1).map(|&(c, _)| c).unwrap_or(kcol + 1);
                return Err(qsyntax(line, col, "'cnf'"));
            }
            let parse_count = |i: usize| -> Result<usize, QbfError> {
                let &(c, t) = toks
                    .get(i)
                    .ok_or_else(|| qsyntax(line, kcol, "two counts after 'p cnf'"))?;
                t.parse().map_err(|_| qsyntax(line, c, "a nonnegative count"))
            };
            let n = parse_count(2)?;
            let m = parse_count(3)?;
            if let Some(&(ecol, _)) = toks.get(4) {
                return Err(qsyntax(line, ecol, "end of line"));
            }
            header = Some((line, n, m));
            continue;
        };

        match keyword {
            "e" | "a" => {
                if !clauses.is_empty() {
                    return Err(qsyntax(line, kcol, "no quantifier lines after clauses"));
                }
                let quant = if keyword == "e" {
                    Quantifier::Exists
                } else {
                    Quantifier::ForAll
                };
                let mut terminated = false;
                for &(col, tok) in &toks[1..] {
                    if terminated {
                        return Err(qsyntax(line, col, "end of line after terminating 0"));
                    }
                    if tok == "0" {
                        terminated = true;
                        continue;
                    }
                    let v: usize = tok
                        .parse()
                        .ok()
                        .filter(|&v| v >= 1)
                        .ok_or_else(|| qsyntax(line, col, "a positive variable index"))?;
                    if v > n {
                        return Err(qsyntax(line, col, "a variable index within the header bound"));
                    }
                    if prefix.iter().any(|&(_, u)| u == v) {
                        return Err(qsyntax(line, col, "a variable not already quantified"));
                    }
                    prefix.push((quant, v));
                    prefix_lines.push(line);
                }
                if !terminated {
                    return Err(qsyntax(line, kcol, "a terminating 0"));
                }
            }
            _ => {
                let mut lits: Vec<i64> = Vec::new();
                let mut terminated = false;
                for &(col, tok) in &toks {
                    if terminated {
                        return Err(qsyntax(line, col, "end of line after terminating 0"));
                    }
                    let lit: i64 = tok
                        .parse()
                        .map_err(|_| qsyntax(line, col, "a literal or terminating 0"))?;
                    if lit == 0 {
                        terminated = true;
                        continue;
                    }
                    if lit.unsigned_abs() as usize > n {
                        return Err(qsyntax(line, col, "a variable index within the header bound"));
                    }
                    if lits.contains(&-lit) {
                        return Err(QbfError::TautologicalClause {
                            line,
                            clause: clauses.len() + 1,
                            variable: lit.unsigned_abs() as usize,
                        });
                    }
                    if !lits.contains(&lit) {
                        lits.push(lit);
                    }
                }
                if !terminated {
                    return Err(qsyntax(line, kcol, "a terminating 0"));
                }
                if lits.is_empty() {
                    return Err(qsyntax(line, kcol, "at least one literal"));
                }
                if clauses.len() == m {
                    return Err(qsyntax(line, kcol, "no clauses beyond the header count"));
                }
                clauses.push((line, lits));
            }
        }
    }

    let (hline, _n, m) = header.ok_or_else(|| qsyntax(last_line.max(1), 1, "a 'p cnf' header"))?;
    if clauses.len() != m {
        return Err(qsyntax(
            hline,
            1,
            "as many clause lines as the header declares",
        ));
    }

    if prefix.is_empty() {
        // Plain CNF: existentially quantify the appearing variables.
        let mut vars: Vec<usize> = clauses
            .iter()
            .flat_map(|(_, c)| c.iter().map(|l| l.unsigned_abs() as usize))
            .collect();
        vars.sort_unstable();
        vars.dedup();
        prefix = vars.into_iter().map(|v| (Quantifier::Exists, v)).collect();
    } else {
        for (line, clause) in &clauses {
            for lit in clause {
                let v = lit.unsigned_abs() as usize;
                if !prefix.iter().any(|&(_, u)| u == v) {
                    return Err(QbfError::UnboundVariable {
                        line: *line,
                        variable: v,
                    });
                }
            }
        }
        for (i, &(_, v)) in prefix.iter().enumerate() {
            let used = clauses
                .iter()
                .any(|(_, c)| c.iter().any(|l| l.unsigned_abs() as usize == v));
            if !used {
                return Err(QbfError::UnusedVariable {
                    line: prefix_lines[i],
                    variable: v,
                });
            }
        }
    }

    Ok(QbfInstance {
        prefix,
        clauses: clauses.into_iter().map(|(_, c)| c).collect(),
    })
}
