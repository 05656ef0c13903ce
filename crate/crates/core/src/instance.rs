//! The text instance format, cost files and basis files.
//!
//! Instance files are line oriented with `#` comment lines:
//!
//! ```text
//! p linspp <n> <m> <d>
//! s <vertex>
//! t <vertex>
//! a <arc_id> <tail> <head>        (m lines)
//! q <k> <arc_1> ... <arc_k> <value>
//! ```
//!
//! Unlisted subsets cost 0; `q 0 <value>` sets the empty-set cost. Rationals
//! are `p/q` or a plain integer. Loading prunes the graph to its covered
//! part and drops cost entries that touch pruned arcs, with a warning on
//! stderr.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path as FsPath;

use num_traits::Zero;

use crate::costs::{parse_rational, ArcKey, LinearCost, OrderDCost};
use crate::graph::{build_dag, prune_to_covered, ArcId, Dag, VertexId};
use crate::subspace::{Basis, SubsetIndex};
use crate::{Error, Result};

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::ParseError {
        line,
        message: message.into(),
    }
}

struct RawInstance {
    n: u32,
    m: u32,
    d: u32,
    source: Option<VertexId>,
    sink: Option<VertexId>,
    arcs: Vec<Option<(VertexId, VertexId)>>,
    costs: Vec<(ArcKey, crate::costs::Rational)>,
}

/// Parses an instance from its textual form; see the module docs for the
/// format.
pub fn read_instance_str(text: &str) -> Result<(Dag, OrderDCost)> {
    let mut raw: Option<RawInstance> = None;
    let mut seen_keys: BTreeSet<ArcKey> = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match tokens[0] {
            "p" => {
                if raw.is_some() {
                    return Err(parse_error(lineno, "duplicate problem line"));
                }
                if tokens.len() != 5 || tokens[1] != "linspp" {
                    return Err(parse_error(lineno, "expected `p linspp <n> <m> <d>`"));
                }
                let n = parse_int(tokens[2], lineno, "vertex count")?;
                let m = parse_int(tokens[3], lineno, "arc count")?;
                let d = parse_int(tokens[4], lineno, "order")?;
                if d < 1 {
                    return Err(parse_error(lineno, "order d must be at least 1"));
                }
                raw = Some(RawInstance {
                    n,
                    m,
                    d,
                    source: None,
                    sink: None,
                    arcs: vec![None; m as usize],
                    costs: Vec::new(),
                });
            }
            "s" | "t" => {
                let inst = raw
                    .as_mut()
                    .ok_or_else(|| parse_error(lineno, "missing problem line"))?;
                if tokens.len() != 2 {
                    return Err(parse_error(lineno, "expected a single vertex"));
                }
                let v = parse_int(tokens[1], lineno, "vertex")?;
                let slot = if tokens[0] == "s" {
                    &mut inst.source
                } else {
                    &mut inst.sink
                };
                if slot.replace(v).is_some() {
                    return Err(parse_error(lineno, "duplicate source/sink line"));
                }
            }
            "a" => {
                let inst = raw
                    .as_mut()
                    .ok_or_else(|| parse_error(lineno, "missing problem line"))?;
                if tokens.len() != 4 {
                    return Err(parse_error(lineno, "expected `a <arc_id> <tail> <head>`"));
                }
                let id: ArcId = parse_int(tokens[1], lineno, "arc id")?;
                if id < 1 || id > inst.m {
                    return Err(Error::ArcIdOutOfRange(id, inst.m));
                }
                let tail = parse_int(tokens[2], lineno, "tail")?;
                let head = parse_int(tokens[3], lineno, "head")?;
                let slot = &mut inst.arcs[(id - 1) as usize];
                if slot.replace((tail, head)).is_some() {
                    return Err(parse_error(lineno, format!("duplicate arc id {id}")));
                }
            }
            "q" => {
                let inst = raw
                    .as_mut()
                    .ok_or_else(|| parse_error(lineno, "missing problem line"))?;
                if tokens.len() < 3 {
                    return Err(parse_error(lineno, "expected `q <k> <arcs...> <value>`"));
                }
                let k: usize = tokens[1]
                    .parse()
                    .map_err(|_| parse_error(lineno, "invalid subset size"))?;
                if tokens.len() != k + 3 {
                    return Err(parse_error(
                        lineno,
                        format!("expected {k} arc ids and one value"),
                    ));
                }
                if k > inst.d as usize {
                    return Err(parse_error(
                        lineno,
                        format!("subset of size {k} exceeds order {}", inst.d),
                    ));
                }
                let mut key = ArcKey::with_capacity(k);
                for token in &tokens[2..2 + k] {
                    let a: ArcId = parse_int(token, lineno, "arc id")?;
                    if a < 1 || a > inst.m {
                        return Err(Error::ArcIdOutOfRange(a, inst.m));
                    }
                    key.push(a);
                }
                key.sort_unstable();
                if key.windows(2).any(|w| w[0] == w[1]) {
                    return Err(parse_error(lineno, "repeated arc inside a subset key"));
                }
                let value = parse_rational(tokens[k + 2])
                    .map_err(|_| parse_error(lineno, format!("invalid rational `{}`", tokens[k + 2])))?;
                if !seen_keys.insert(key.clone()) {
                    return Err(Error::DuplicateCostKey { line: lineno });
                }
                inst.costs.push((key, value));
            }
            other => {
                return Err(parse_error(lineno, format!("unknown record `{other}`")));
            }
        }
    }

    let raw = raw.ok_or_else(|| parse_error(0, "empty instance: missing problem line"))?;
    let source = raw
        .source
        .ok_or_else(|| parse_error(0, "missing source line"))?;
    let sink = raw.sink.ok_or_else(|| parse_error(0, "missing sink line"))?;
    let mut arc_list = Vec::with_capacity(raw.m as usize);
    for (i, slot) in raw.arcs.iter().enumerate() {
        match slot {
            Some(pair) => arc_list.push(*pair),
            None => return Err(parse_error(0, format!("arc {} is not defined", i + 1))),
        }
    }

    let dag = build_dag(raw.n, &arc_list, source, sink)?;
    let pruned = prune_to_covered(&dag)?;
    let kept: std::collections::HashMap<ArcId, ArcId> = pruned
        .arc_labels()
        .iter()
        .enumerate()
        .map(|(i, &old)| (old, (i + 1) as ArcId))
        .collect();
    let mut q = OrderDCost::with_arc_count(raw.d, pruned.arc_count());
    for (key, value) in raw.costs {
        if value.is_zero() {
            continue;
        }
        if key.iter().all(|a| kept.contains_key(a)) {
            let remapped: ArcKey = key.iter().map(|a| kept[a]).collect();
            q.set(&remapped, value)?;
        } else {
            eprintln!(
                "warning: dropped cost entry on pruned arc(s): {{{}}}",
                key.iter()
                    .map(|a| a.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
        }
    }
    Ok((pruned, q))
}

fn parse_int<T: std::str::FromStr>(token: &str, line: usize, what: &str) -> Result<T> {
    token
        .parse()
        .map_err(|_| parse_error(line, format!("invalid {what} `{token}`")))
}

/// Reads an instance file, pruning to the covered subgraph.
pub fn read_instance(path: impl AsRef<FsPath>) -> Result<(Dag, OrderDCost)> {
    read_instance_str(&fs::read_to_string(path)?)
}

/// Canonical textual form; `read_instance_str` of the output reproduces the
/// instance byte for byte on covered inputs.
pub fn write_instance(dag: &Dag, q: &OrderDCost) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "p linspp {} {} {}\n",
        dag.vertex_count(),
        dag.arc_count(),
        q.d()
    ));
    out.push_str(&format!("s {}\n", dag.source()));
    out.push_str(&format!("t {}\n", dag.sink()));
    for arc in dag.arcs() {
        out.push_str(&format!("a {} {} {}\n", arc.id, arc.tail, arc.head));
    }
    for (key, value) in q.entries() {
        out.push_str(&format!("q {}", key.len()));
        for a in key {
            out.push_str(&format!(" {a}"));
        }
        out.push_str(&format!(" {value}\n"));
    }
    out
}

/// Writes the canonical instance form to a file.
pub fn write_instance_file(path: impl AsRef<FsPath>, dag: &Dag, q: &OrderDCost) -> Result<()> {
    fs::write(path, write_instance(dag, q))?;
    Ok(())
}

/// Cost files are `c <arc_id> <rational>` lines; absent arcs cost 0.
pub fn read_cost_file_str(text: &str, arc_count: u32) -> Result<LinearCost> {
    let mut c = LinearCost::with_arc_count(arc_count);
    let mut seen: BTreeSet<ArcId> = BTreeSet::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens.len() != 3 || tokens[0] != "c" {
            return Err(parse_error(lineno, "expected `c <arc_id> <rational>`"));
        }
        let a: ArcId = parse_int(tokens[1], lineno, "arc id")?;
        if a < 1 || a > arc_count {
            return Err(Error::ArcIdOutOfRange(a, arc_count));
        }
        if !seen.insert(a) {
            return Err(Error::DuplicateCostKey { line: lineno });
        }
        let value = parse_rational(tokens[2])
            .map_err(|_| parse_error(lineno, format!("invalid rational `{}`", tokens[2])))?;
        c.set(a, value)?;
    }
    Ok(c)
}

pub fn read_cost_file(path: impl AsRef<FsPath>, arc_count: u32) -> Result<LinearCost> {
    read_cost_file_str(&fs::read_to_string(path)?, arc_count)
}

/// `c <arc_id> <rational>` lines for the nonzero entries, ascending.
pub fn write_cost_file(c: &LinearCost) -> String {
    let mut out = String::new();
    for (a, value) in c.iter() {
        out.push_str(&format!("c {a} {value}\n"));
    }
    out
}

/// One basis vector per line; each nonzero coordinate is rendered as
/// `<subset>=<value>` with the subset as comma-joined arc ids and `-` for
/// the empty set.
pub fn write_basis(basis: &Basis, index: &SubsetIndex) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# basis of the linearizable subspace: {} vectors, dimension {}\n",
        basis.len(),
        basis.dimension()
    ));
    for vector in basis.vectors() {
        let mut first = true;
        for (key, value) in index.subsets().iter().zip(vector.values()) {
            if value.is_zero() {
                continue;
            }
            if !first {
                out.push(' ');
            }
            first = false;
            if key.is_empty() {
                out.push('-');
            } else {
                out.push_str(
                    &key.iter()
                        .map(|a| a.to_string())
                        .collect::<Vec<_>>()
                        .join(","),
                );
            }
            out.push_str(&format!("={value}"));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::rat;

    const SINGLE_ARC: &str = "p linspp 2 1 1\ns 0\nt 1\na 1 0 1\n";

    #[test]
    fn reads_single_arc_instance() {
        let (dag, q) = read_instance_str(SINGLE_ARC).unwrap();
        assert_eq!(dag.arc_count(), 1);
        assert_eq!(q.empty_set_value(), rat(0));
    }

    #[test]
    fn rejects_repeated_arc_in_key() {
        let text = "p linspp 2 1 2\ns 0\nt 1\na 1 0 1\nq 2 1 1 5\n";
        assert!(matches!(
            read_instance_str(text),
            Err(Error::ParseError { line: 5, .. })
        ));
    }

    #[test]
    fn rejects_duplicate_cost_key() {
        let text = "p linspp 2 1 1\ns 0\nt 1\na 1 0 1\nq 1 1 2\nq 1 1 3\n";
        assert!(matches!(
            read_instance_str(text),
            Err(Error::DuplicateCostKey { line: 6 })
        ));
    }

    #[test]
    fn rejects_out_of_range_arc() {
        let text = "p linspp 2 1 1\ns 0\nt 1\na 1 0 1\nq 1 7 2\n";
        assert!(matches!(
            read_instance_str(text),
            Err(Error::ArcIdOutOfRange(7, 1))
        ));
    }

    #[test]
    fn diamond_fixture_matches_programmatic_construction() {
        let text = "# diamond\np linspp 4 4 2\ns 0\nt 3\na 1 0 1\na 2 1 3\na 3 0 2\na 4 2 3\nq 0 1/2\nq 2 1 2 3\n";
        let (dag, q) = read_instance_str(text).unwrap();
        let expected = crate::graph::build_dag(4, &[(0, 1), (1, 3), (0, 2), (2, 3)], 0, 3).unwrap();
        assert_eq!(dag, expected);
        assert_eq!(q.get(&[1, 2]), rat(3));
        assert_eq!(q.empty_set_value(), parse_rational("1/2").unwrap());
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let text = "p linspp 4 4 2\ns 0\nt 3\na 1 0 1\na 2 1 3\na 3 0 2\na 4 2 3\nq 0 1/2\nq 2 1 2 3\nq 1 3 -2\n";
        let (dag, q) = read_instance_str(text).unwrap();
        let written = write_instance(&dag, &q);
        assert_eq!(written, text);
        let (dag2, q2) = read_instance_str(&written).unwrap();
        assert_eq!(dag2, dag);
        assert_eq!(q2, q);
    }

    #[test]
    fn pruning_drops_costs_on_uncovered_arcs() {
        // Arc 5 dangles off the diamond; its cost entries disappear.
        let text = "p linspp 5 5 2\ns 0\nt 3\na 1 0 1\na 2 1 3\na 3 0 2\na 4 2 3\na 5 1 4\nq 1 5 9\nq 2 1 5 4\nq 1 1 6\n";
        let (dag, q) = read_instance_str(text).unwrap();
        assert_eq!(dag.arc_count(), 4);
        assert_eq!(q.get(&[1]), rat(6));
        assert_eq!(q.entry_count(), 1);
    }

    #[test]
    fn cost_file_round_trip() {
        let mut c = LinearCost::with_arc_count(4);
        c.set(1, rat(6)).unwrap();
        c.set(3, parse_rational("-2/3").unwrap()).unwrap();
        let text = write_cost_file(&c);
        assert_eq!(text, "c 1 6\nc 3 -2/3\n");
        let back = read_cost_file_str(&text, 4).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn cost_file_rejects_duplicates() {
        assert!(matches!(
            read_cost_file_str("c 1 2\nc 1 3\n", 4),
            Err(Error::DuplicateCostKey { line: 2 })
        ));
    }
}
