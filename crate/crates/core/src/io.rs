//! Plain-text instance and design files.
//!
//! Instance files hold one record per line:
//!
//! ```text
//! c <comment>
//! p cprsnp <|V|> <|A|>
//! r <vertex>
//! t <vertex>                      (once per terminal)
//! a <tail> <head> <cost> <capacity>
//! b <k> <k'>
//! ```
//!
//! Vertices are labelled `1..=|V|`. Design files list `y <tail> <head>` for
//! selected arcs and `p <tail> <head>` for protected ones.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formulations::{Design, DesignError};
use crate::graph::{Arc, AugmentedInstance, GraphError, Instance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("unknown record `{0}`")]
    UnknownRecord(String),
    #[error("malformed record, expected `{0}`")]
    Malformed(&'static str),
    #[error("`{0}` line appears more than once")]
    Repeated(&'static str),
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("record before the `p` line")]
    BeforeHeader,
    #[error("vertex {vertex} outside 1..={n}")]
    UnknownVertex { vertex: u64, n: usize },
    #[error("duplicate arc ({0}, {1})")]
    DuplicateArc(u64, u64),
    #[error("header declares {declared} arcs, found {found}")]
    ArcCount { declared: usize, found: usize },
    #[error("failure budget {k} plus protection budget {kp} exceeds arc count {arcs}")]
    BudgetTooLarge { k: usize, kp: usize, arcs: usize },
    #[error("no arc ({0}, {1}) in the instance")]
    UnknownArc(u64, u64),
    #[error("arc ({0}, {1}) is protected but not selected")]
    ProtectedNotSelected(u64, u64),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Design(#[from] DesignError),
}

/// A file error; `line` is 1-based, or 0 for whole-file problems.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn numbers<const N: usize>(fields: &[&str], line: usize, shape: &'static str) -> Result<[u64; N], ParseError> {
    if fields.len() != N {
        return Err(err(line, ParseErrorKind::Malformed(shape)));
    }
    let mut out = [0; N];
    for (o, f) in out.iter_mut().zip(fields) {
        *o = f.parse().map_err(|_| err(line, ParseErrorKind::Malformed(shape)))?;
    }
    Ok(out)
}

/// Records of a file: `(line number, tag, fields)`, comments and blank
/// lines skipped.
fn records(text: &str) -> impl Iterator<Item = (usize, &str, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let mut it = l.split_whitespace();
        let tag = it.next()?;
        (tag != "c").then(|| (i + 1, tag, it.collect()))
    })
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut header: Option<(usize, usize)> = None;
    let mut root: Option<(usize, usize)> = None;
    let mut budgets: Option<(usize, usize, usize)> = None;
    let mut terminals = Vec::new();
    let mut arcs = Vec::new();
    let mut seen_arcs = HashSet::new();
    let mut seen_terminals = HashSet::new();
    let vertex = |label: u64, n: usize, line: usize| -> Result<usize, ParseError> {
        if label == 0 || label > n as u64 {
            return Err(err(line, ParseErrorKind::UnknownVertex { vertex: label, n }));
        }
        Ok(label as usize - 1)
    };
    for (line, tag, fields) in records(text) {
        if tag != "p" && header.is_none() {
            return Err(err(line, ParseErrorKind::BeforeHeader));
        }
        let n = header.map_or(0, |h| h.0);
        match tag {
            "p" => {
                if header.is_some() {
                    return Err(err(line, ParseErrorKind::Repeated("p")));
                }
                const SHAPE: &str = "p cprsnp <vertices> <arcs>";
                if fields.first() != Some(&"cprsnp") {
                    return Err(err(line, ParseErrorKind::Malformed(SHAPE)));
                }
                let [nv, na] = numbers::<2>(&fields[1..], line, SHAPE)?;
                header = Some((nv as usize, na as usize));
            }
            "r" => {
                if root.is_some() {
                    return Err(err(line, ParseErrorKind::Repeated("r")));
                }
                let [v] = numbers::<1>(&fields, line, "r <vertex>")?;
                root = Some((vertex(v, n, line)?, line));
            }
            "t" => {
                let [v] = numbers::<1>(&fields, line, "t <vertex>")?;
                let t = vertex(v, n, line)?;
                if !seen_terminals.insert(t) {
                    return Err(err(line, GraphError::DuplicateTerminal(v).into()));
                }
                terminals.push((t, line));
            }
            "a" => {
                let [tail, head, cost, capacity] = numbers::<4>(&fields, line, "a <tail> <head> <cost> <capacity>")?;
                let (t, h) = (vertex(tail, n, line)?, vertex(head, n, line)?);
                if !seen_arcs.insert((t, h)) {
                    return Err(err(line, ParseErrorKind::DuplicateArc(tail, head)));
                }
                arcs.push(Arc { tail: t, head: h, cost, capacity });
            }
            "b" => {
                if budgets.is_some() {
                    return Err(err(line, ParseErrorKind::Repeated("b")));
                }
                let [k, kp] = numbers::<2>(&fields, line, "b <k> <k'>")?;
                budgets = Some((k as usize, kp as usize, line));
            }
            other => return Err(err(line, ParseErrorKind::UnknownRecord(other.to_string()))),
        }
    }
    let (n, declared) = header.ok_or(err(0, ParseErrorKind::Missing("p")))?;
    let (root, _) = root.ok_or(err(0, ParseErrorKind::Missing("r")))?;
    let (k, kp, bline) = budgets.ok_or(err(0, ParseErrorKind::Missing("b")))?;
    if arcs.len() != declared {
        return Err(err(0, ParseErrorKind::ArcCount { declared, found: arcs.len() }));
    }
    if k + kp > arcs.len() {
        return Err(err(bline, ParseErrorKind::BudgetTooLarge { k, kp, arcs: arcs.len() }));
    }
    if let Some(&(t, line)) = terminals.iter().find(|(t, _)| *t == root) {
        return Err(err(line, GraphError::RootIsTerminal(t as u64 + 1).into()));
    }
    let terminals = terminals.into_iter().map(|(t, _)| t).collect();
    Instance::with_numbered_vertices(n, arcs, root, terminals, k, kp).map_err(|e| err(0, e.into()))
}

/// Serializes `inst`; `comments` become leading `c` lines.
pub fn write_instance(inst: &Instance, comments: &[&str]) -> String {
    let mut out = String::new();
    for c in comments {
        writeln!(out, "c {c}").unwrap();
    }
    writeln!(out, "p cprsnp {} {}", inst.num_vertices(), inst.arcs().len()).unwrap();
    writeln!(out, "r {}", inst.label(inst.root())).unwrap();
    for &t in inst.terminals() {
        writeln!(out, "t {}", inst.label(t)).unwrap();
    }
    for a in inst.arcs() {
        writeln!(out, "a {} {} {} {}", inst.label(a.tail), inst.label(a.head), a.cost, a.capacity).unwrap();
    }
    writeln!(out, "b {} {}", inst.k(), inst.k_protect()).unwrap();
    out
}

/// Reads a design for `aug`. Fictive arcs are implied and never listed.
pub fn parse_design(aug: &AugmentedInstance, text: &str) -> Result<Design, ParseError> {
    let inst = aug.instance();
    let m = aug.num_arcs();
    let (mut y, mut p) = (vec![false; m], vec![false; m]);
    let mut protected_lines = Vec::new();
    for (line, tag, fields) in records(text) {
        let set = match tag {
            "y" => &mut y,
            "p" => &mut p,
            other => return Err(err(line, ParseErrorKind::UnknownRecord(other.to_string()))),
        };
        let [tail, head] = numbers::<2>(&fields, line, "y|p <tail> <head>")?;
        let arc = inst
            .vertex_by_label(tail)
            .zip(inst.vertex_by_label(head))
            .and_then(|(t, h)| inst.find_arc(t, h))
            .ok_or(err(line, ParseErrorKind::UnknownArc(tail, head)))?;
        if set[arc] {
            return Err(err(line, ParseErrorKind::DuplicateArc(tail, head)));
        }
        set[arc] = true;
        if tag == "p" {
            protected_lines.push((arc, line, tail, head));
        }
    }
    for &(arc, line, tail, head) in &protected_lines {
        if !y[arc] {
            return Err(err(line, ParseErrorKind::ProtectedNotSelected(tail, head)));
        }
    }
    Design::new(aug, y, p).map_err(|e| err(0, e.into()))
}

pub fn write_design(aug: &AugmentedInstance, design: &Design) -> String {
    let inst = aug.instance();
    let mut out = String::new();
    writeln!(out, "c cost {}", design.cost(aug)).unwrap();
    for (tag, arcs) in [("y", design.selected_initial(aug)), ("p", design.protected_arcs())] {
        for a in arcs {
            let arc = aug.arc(a);
            writeln!(out, "{tag} {} {}", inst.label(arc.tail), inst.label(arc.head)).unwrap();
        }
    }
    out
}
