//! Line-oriented text formats for instances, colored instances and schedules.
//!
//! Blank lines and `#` comments are ignored; every file must end with a
//! newline. Serializers emit the canonical form (edges sorted, one directive
//! per line).

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::model::{ColoredInstance, Group, Instance, ModelError, Schedule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("missing trailing newline")]
    MissingNewline,
    #[error("duplicate start vertex {0}")]
    DuplicateStart(usize),
    #[error("duplicate target vertex {0}")]
    DuplicateTarget(usize),
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("expected {expected} positions, found {found}")]
    Arity { expected: usize, found: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

fn err(line: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, kind }
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    err(line, ParseErrorKind::Syntax(msg.into()))
}

/// Non-empty, comment-stripped lines with their 1-based line numbers.
fn significant_lines(text: &str) -> Result<Vec<(usize, Vec<&str>)>, ParseError> {
    if !text.is_empty() && !text.ends_with('\n') {
        return Err(err(text.lines().count(), ParseErrorKind::MissingNewline));
    }
    Ok(text
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = body.split_whitespace().collect();
            (!tokens.is_empty()).then_some((i + 1, tokens))
        })
        .collect())
}

fn parse_usize(line: usize, tok: &str) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| syntax(line, format!("expected a non-negative integer, found `{tok}`")))
}

fn parse_all(line: usize, toks: &[&str]) -> Result<Vec<usize>, ParseError> {
    toks.iter().map(|t| parse_usize(line, t)).collect()
}

fn expect_arity(line: usize, toks: &[&str], n: usize, what: &str) -> Result<(), ParseError> {
    if toks.len() != n {
        return Err(syntax(line, format!("`{what}` takes {} argument(s)", n - 1)));
    }
    Ok(())
}

fn expect_header(lines: &[(usize, Vec<&str>)], word: &str) -> Result<(), ParseError> {
    match lines.first() {
        Some((_, toks)) if toks.as_slice() == [word, "1"] => Ok(()),
        Some((l, _)) => Err(syntax(*l, format!("expected header `{word} 1`"))),
        None => Err(syntax(0, "empty input")),
    }
}

/// Parses `vertices` and `edge` lines; returns the graph and the index of the
/// first line after the edge block.
fn parse_graph(lines: &[(usize, Vec<&str>)]) -> Result<(Graph, usize), ParseError> {
    let (l, toks) = lines.get(1).ok_or_else(|| syntax(0, "missing `vertices` line"))?;
    if toks[0] != "vertices" {
        return Err(syntax(*l, "expected `vertices <n>`"));
    }
    expect_arity(*l, toks, 2, "vertices")?;
    let mut g = Graph::new(parse_usize(*l, toks[1])?);
    let mut i = 2;
    while let Some((l, toks)) = lines.get(i) {
        if toks[0] != "edge" {
            break;
        }
        expect_arity(*l, toks, 3, "edge")?;
        let (u, v) = (parse_usize(*l, toks[1])?, parse_usize(*l, toks[2])?);
        g.add_edge(u, v).map_err(|e| match e {
            GraphError::VertexOutOfRange(x, _) => err(*l, ParseErrorKind::UnknownVertex(x)),
            other => err(*l, other.into()),
        })?;
        i += 1;
    }
    Ok((g, i))
}

fn check_vertex(line: usize, v: usize, n: usize) -> Result<usize, ParseError> {
    if v >= n {
        return Err(err(line, ParseErrorKind::UnknownVertex(v)));
    }
    Ok(v)
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let lines = significant_lines(text)?;
    expect_header(&lines, "mapf")?;
    let (graph, mut i) = parse_graph(&lines)?;
    let n = graph.n();
    let (mut start, mut target) = (Vec::new(), Vec::new());
    let (mut used_s, mut used_t) = (vec![false; n], vec![false; n]);
    let mut limit = None;
    while let Some((l, toks)) = lines.get(i) {
        match toks[0] {
            "agent" if limit.is_none() => {
                expect_arity(*l, toks, 3, "agent")?;
                let s = check_vertex(*l, parse_usize(*l, toks[1])?, n)?;
                let t = check_vertex(*l, parse_usize(*l, toks[2])?, n)?;
                if std::mem::replace(&mut used_s[s], true) {
                    return Err(err(*l, ParseErrorKind::DuplicateStart(s)));
                }
                if std::mem::replace(&mut used_t[t], true) {
                    return Err(err(*l, ParseErrorKind::DuplicateTarget(t)));
                }
                start.push(s);
                target.push(t);
            }
            "limit" if limit.is_none() => {
                expect_arity(*l, toks, 2, "limit")?;
                limit = Some(parse_usize(*l, toks[1])?);
            }
            other => return Err(syntax(*l, format!("unexpected `{other}`"))),
        }
        i += 1;
    }
    if start.is_empty() {
        return Err(syntax(lines.last().map_or(0, |x| x.0), "at least one `agent` line required"));
    }
    Instance::new(graph, start, target, limit).map_err(|e| err(0, ParseErrorKind::Model(e)))
}

fn write_graph(out: &mut String, g: &Graph) {
    writeln!(out, "vertices {}", g.n()).unwrap();
    for (u, v) in g.edges() {
        writeln!(out, "edge {u} {v}").unwrap();
    }
}

pub fn serialize_instance(inst: &Instance) -> String {
    let mut out = String::from("mapf 1\n");
    write_graph(&mut out, &inst.graph);
    for (s, t) in inst.start.iter().zip(&inst.target) {
        writeln!(out, "agent {s} {t}").unwrap();
    }
    if let Some(l) = inst.limit {
        writeln!(out, "limit {l}").unwrap();
    }
    out
}

pub fn parse_colored_instance(text: &str) -> Result<ColoredInstance, ParseError> {
    let lines = significant_lines(text)?;
    expect_header(&lines, "cmapf")?;
    let (graph, mut i) = parse_graph(&lines)?;
    let n = graph.n();
    let mut groups: Vec<Group> = Vec::new();
    let mut limit = None;
    while let Some((l, toks)) = lines.get(i) {
        match toks[0] {
            "group" if limit.is_none() => {
                expect_arity(*l, toks, 2, "group")?;
                let id = parse_usize(*l, toks[1])?;
                let starts = match lines.get(i + 1) {
                    Some((l2, t)) if t[0] == "starts" => parse_all(*l2, &t[1..])?
                        .into_iter()
                        .map(|v| check_vertex(*l2, v, n))
                        .collect::<Result<Vec<_>, _>>()?,
                    _ => return Err(syntax(*l, "`group` must be followed by `starts`")),
                };
                let targets = match lines.get(i + 2) {
                    Some((l3, t)) if t[0] == "targets" => parse_all(*l3, &t[1..])?
                        .into_iter()
                        .map(|v| check_vertex(*l3, v, n))
                        .collect::<Result<Vec<_>, _>>()?,
                    _ => return Err(syntax(lines[i + 1].0, "`starts` must be followed by `targets`")),
                };
                if starts.len() != targets.len() {
                    return Err(err(
                        lines[i + 2].0,
                        ParseErrorKind::Arity { expected: starts.len(), found: targets.len() },
                    ));
                }
                groups.push(Group { id, starts, targets });
                i += 3;
                continue;
            }
            "limit" if limit.is_none() => {
                expect_arity(*l, toks, 2, "limit")?;
                limit = Some(parse_usize(*l, toks[1])?);
            }
            other => return Err(syntax(*l, format!("unexpected `{other}`"))),
        }
        i += 1;
    }
    ColoredInstance::new(graph, groups, limit).map_err(|e| err(0, ParseErrorKind::Model(e)))
}

fn join(vs: &[usize]) -> String {
    vs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

pub fn serialize_colored_instance(inst: &ColoredInstance) -> String {
    let mut out = String::from("cmapf 1\n");
    write_graph(&mut out, &inst.graph);
    for g in &inst.groups {
        writeln!(out, "group {}", g.id).unwrap();
        writeln!(out, "starts {}", join(&g.starts)).unwrap();
        writeln!(out, "targets {}", join(&g.targets)).unwrap();
    }
    if let Some(l) = inst.limit {
        writeln!(out, "limit {l}").unwrap();
    }
    out
}

/// Parses a schedule for an instance with `agents` agents on `n` vertices.
pub fn parse_schedule(text: &str, agents: usize, n: usize) -> Result<Schedule, ParseError> {
    let lines = significant_lines(text)?;
    let (l0, head) = lines.first().ok_or_else(|| syntax(0, "empty input"))?;
    if head[0] != "schedule" {
        return Err(syntax(*l0, "expected `schedule <m>`"));
    }
    expect_arity(*l0, head, 2, "schedule")?;
    let m = parse_usize(*l0, head[1])?;
    if lines.len() != m + 1 {
        let line = lines.last().map_or(*l0, |x| x.0);
        return Err(syntax(line, format!("expected {m} turn lines, found {}", lines.len() - 1)));
    }
    let mut turns = Vec::with_capacity(m);
    for (i, (l, toks)) in lines[1..].iter().enumerate() {
        let label = format!("{}:", i + 1);
        if toks.len() < 2 || toks[0] != "turn" || toks[1] != label {
            return Err(syntax(*l, format!("expected `turn {}:`", i + 1)));
        }
        let pos = parse_all(*l, &toks[2..])?;
        if pos.len() != agents {
            return Err(err(*l, ParseErrorKind::Arity { expected: agents, found: pos.len() }));
        }
        for &v in &pos {
            check_vertex(*l, v, n)?;
        }
        turns.push(pos);
    }
    Ok(Schedule::new(turns))
}

pub fn serialize_schedule(sched: &Schedule) -> String {
    let mut out = format!("schedule {}\n", sched.makespan());
    for (i, turn) in sched.turns.iter().enumerate() {
        writeln!(out, "turn {}: {}", i + 1, join(turn)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_instance() {
        let inst = parse_instance("mapf 1\nvertices 1\nagent 0 0\n").unwrap();
        assert_eq!(inst.graph.n(), 1);
        assert_eq!(inst.agents(), 1);
    }

    #[test]
    fn round_trip_k4_swap() {
        let inst = Instance::new(Graph::complete(4), vec![0, 1], vec![1, 0], Some(3)).unwrap();
        let text = serialize_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst);
        assert_eq!(serialize_instance(&parse_instance(&text).unwrap()), text);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header comment\nmapf 1\n\nvertices 2 # two\nedge 1 0\nagent 0 1\n";
        let inst = parse_instance(text).unwrap();
        assert!(inst.graph.has_edge(0, 1));
    }

    #[test]
    fn instance_errors_carry_lines() {
        let e = parse_instance("mapf 1\nvertices 3\nagent 0 1\nagent 0 2\n").unwrap_err();
        assert_eq!(e, ParseError { line: 4, kind: ParseErrorKind::DuplicateStart(0) });
        let e = parse_instance("mapf 1\nvertices 3\nedge 0 5\nagent 0 1\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownVertex(5));
        assert_eq!(e.line, 3);
        let e = parse_instance("mapf 1\nvertices 3\nagent 0 1").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingNewline);
        assert!(parse_instance("mapf 2\nvertices 1\nagent 0 0\n").is_err());
        assert!(parse_instance("mapf 1\nvertices 2\nagent 0 1\nedge 0 1\n").is_err());
    }

    #[test]
    fn schedules() {
        let s = parse_schedule("schedule 0\n", 2, 4).unwrap();
        assert_eq!(s.makespan(), 0);
        let sched = Schedule::new(vec![vec![2, 1], vec![2, 0]]);
        let text = serialize_schedule(&sched);
        assert_eq!(text, "schedule 2\nturn 1: 2 1\nturn 2: 2 0\n");
        assert_eq!(parse_schedule(&text, 2, 4).unwrap(), sched);
        let e = parse_schedule("schedule 1\nturn 1: 0 1 2\n", 2, 4).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Arity { expected: 2, found: 3 });
        assert!(parse_schedule("schedule 2\nturn 1: 0 1\n", 2, 4).is_err());
    }

    #[test]
    fn colored_round_trip() {
        let inst = ColoredInstance::new(
            Graph::path(4),
            vec![
                Group { id: 1, starts: vec![0, 1], targets: vec![2, 3] },
                Group { id: 2, starts: vec![3], targets: vec![0] },
            ],
            Some(9),
        )
        .unwrap();
        let text = serialize_colored_instance(&inst);
        assert_eq!(parse_colored_instance(&text).unwrap(), inst);
    }
}
