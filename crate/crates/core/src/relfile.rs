//! Block format for standalone relations and partial operations.
//!
//! ```text
//! rel OR 2 over 2
//! 0 1
//! 1 0
//! 1 1
//!
//! pop M 3 over 2
//! 0 0 0 -> 0
//! 0 1 1 -> 0
//! ```
//!
//! `#` starts a comment. Tuples are written sorted, so printing is canonical.

use std::fmt::Write as _;

use crate::domain::{FiniteDomain, Value};
use crate::error::{Error, Result};
use crate::formula::ConstraintLanguage;
use crate::partial_ops::PartialOperation;
use crate::pattern::is_identifier;
use crate::relation::Relation;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RelFile {
    pub relations: Vec<(String, Relation)>,
    pub operations: Vec<(String, PartialOperation)>,
}

impl RelFile {
    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }

    pub fn operation(&self, name: &str) -> Option<&PartialOperation> {
        self.operations.iter().find(|(n, _)| n == name).map(|(_, o)| o)
    }

    /// All relations as a language; they must share a domain and be non-empty.
    pub fn language(&self) -> Result<ConstraintLanguage> {
        let Some((_, first)) = self.relations.first() else {
            return Err(Error::Invalid("the file contains no relations".into()));
        };
        ConstraintLanguage::new(first.domain().clone(), self.relations.iter().cloned())
    }
}

enum Block {
    Rel {
        name: String,
        domain: FiniteDomain,
        arity: usize,
        tuples: Vec<Vec<Value>>,
    },
    Pop {
        name: String,
        domain: FiniteDomain,
        arity: usize,
        entries: Vec<(Vec<Value>, Value)>,
    },
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Words of a line with their 1-based columns.
fn words(line: &str) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((&line[s..i], s + 1));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((&line[s..], s + 1));
    }
    out
}

fn number<T: std::str::FromStr>(word: &str, line: usize, column: usize, what: &str) -> Result<T> {
    word.parse()
        .map_err(|_| Error::parse(line, column, format!("expected {what}, found {word}")))
}

fn value(domain: &FiniteDomain, word: &str, line: usize, column: usize) -> Result<Value> {
    let v: Value = number(word, line, column, "a domain element")?;
    domain
        .check_value(v)
        .map_err(|e| Error::parse(line, column, e.to_string()))?;
    Ok(v)
}

fn finish(block: Block, out: &mut RelFile, at: usize) -> Result<()> {
    match block {
        Block::Rel {
            name,
            domain,
            arity,
            tuples,
        } => {
            let r = Relation::new(domain, arity, tuples)
                .map_err(|e| Error::parse(at, 1, e.to_string()))?;
            out.relations.push((name, r));
        }
        Block::Pop {
            name,
            domain,
            arity,
            entries,
        } => {
            let op = PartialOperation::from_entries(domain, arity, entries)
                .map_err(|e| Error::parse(at, 1, e.to_string()))?;
            out.operations.push((name, op));
        }
    }
    Ok(())
}

pub fn parse_relation_file(text: &str) -> Result<RelFile> {
    let mut out = RelFile::default();
    let mut current: Option<(Block, usize)> = None;
    for (li, raw) in text.lines().enumerate() {
        let line = li + 1;
        let ws = words(strip_comment(raw));
        let Some(&(head, _)) = ws.first() else {
            continue;
        };
        if head == "rel" || head == "pop" {
            if let Some((block, at)) = current.take() {
                finish(block, &mut out, at)?;
            }
            if ws.len() != 5 || ws[3].0 != "over" {
                return Err(Error::parse(
                    line,
                    1,
                    format!("expected `{head} <name> <arity> over <size>`"),
                ));
            }
            let (name, nc) = ws[1];
            if !is_identifier(name) {
                return Err(Error::parse(line, nc, format!("bad name {name}")));
            }
            if out.relations.iter().any(|(n, _)| n == name)
                || out.operations.iter().any(|(n, _)| n == name)
            {
                return Err(Error::parse(line, nc, format!("duplicate name {name}")));
            }
            let arity: usize = number(ws[2].0, line, ws[2].1, "an arity")?;
            let size: u32 = number(ws[4].0, line, ws[4].1, "a domain size")?;
            let domain =
                FiniteDomain::new(size).map_err(|e| Error::parse(line, ws[4].1, e.to_string()))?;
            let name = name.to_string();
            let block = if head == "rel" {
                Block::Rel {
                    name,
                    domain,
                    arity,
                    tuples: Vec::new(),
                }
            } else {
                Block::Pop {
                    name,
                    domain,
                    arity,
                    entries: Vec::new(),
                }
            };
            current = Some((block, line));
            continue;
        }
        let Some((block, _)) = current.as_mut() else {
            return Err(Error::parse(line, 1, "tuple outside of a rel or pop block"));
        };
        match block {
            Block::Rel {
                domain,
                arity,
                tuples,
                ..
            } => {
                if ws.len() != *arity {
                    return Err(Error::parse(
                        line,
                        1,
                        format!("tuple has {} values, expected {arity}", ws.len()),
                    ));
                }
                let t = ws
                    .iter()
                    .map(|&(w, c)| value(domain, w, line, c))
                    .collect::<Result<Vec<_>>>()?;
                tuples.push(t);
            }
            Block::Pop {
                domain,
                arity,
                entries,
                ..
            } => {
                if ws.len() != *arity + 2 || ws[*arity].0 != "->" {
                    return Err(Error::parse(
                        line,
                        1,
                        format!("expected {arity} arguments, `->` and a value"),
                    ));
                }
                let args = ws[..*arity]
                    .iter()
                    .map(|&(w, c)| value(domain, w, line, c))
                    .collect::<Result<Vec<_>>>()?;
                let (w, c) = ws[*arity + 1];
                entries.push((args, value(domain, w, line, c)?));
            }
        }
    }
    if let Some((block, at)) = current.take() {
        finish(block, &mut out, at)?;
    }
    Ok(out)
}

pub fn format_relation(name: &str, relation: &Relation) -> String {
    let mut s = format!(
        "rel {name} {} over {}\n",
        relation.arity(),
        relation.domain().size()
    );
    for t in relation.tuples() {
        let row: Vec<String> = t.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(s, "{}", row.join(" "));
    }
    s
}

pub fn format_partial_operation(name: &str, op: &PartialOperation) -> String {
    let mut s = format!("pop {name} {} over {}\n", op.arity(), op.domain().size());
    for (args, v) in op.entries() {
        let row: Vec<String> = args.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(s, "{} -> {v}", row.join(" "));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partial_ops::make_ordered_maltsev;
    use crate::domain::TotalOrder;

    #[test]
    fn relation_round_trip_is_bit_exact() {
        let text = "rel NAE 3 over 2\n0 0 1\n0 1 0\n0 1 1\n1 0 0\n1 0 1\n1 1 0\n";
        let file = parse_relation_file(text).unwrap();
        assert_eq!(file.relations.len(), 1);
        assert_eq!(format_relation("NAE", file.relation("NAE").unwrap()), text);
    }

    #[test]
    fn unsorted_input_prints_sorted() {
        let file = parse_relation_file("# or\nrel OR 2 over 2\n1 1\n0 1 # first\n1 0\n").unwrap();
        assert_eq!(
            format_relation("OR", file.relation("OR").unwrap()),
            "rel OR 2 over 2\n0 1\n1 0\n1 1\n"
        );
    }

    #[test]
    fn operation_round_trip() {
        let d = FiniteDomain::boolean();
        let m = make_ordered_maltsev(&d, &TotalOrder::natural(&d)).unwrap();
        let text = format_partial_operation("M", &m);
        assert_eq!(
            text,
            "pop M 3 over 2\n0 0 0 -> 0\n0 1 1 -> 0\n1 1 0 -> 0\n1 1 1 -> 1\n"
        );
        let back = parse_relation_file(&text).unwrap();
        assert_eq!(back.operation("M").unwrap(), &m);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_relation_file("rel A 2 over 2\n0 2\n").unwrap_err();
        assert_eq!(
            e,
            Error::parse(2, 3, "value 2 out of range for a domain of size 2")
        );
        assert!(parse_relation_file("0 1\n").is_err());
        assert!(parse_relation_file("rel A 2 over 2\n0 1 1\n").is_err());
        assert!(parse_relation_file("rel A 2 2\n").is_err());
    }

    #[test]
    fn language_from_file() {
        let file = parse_relation_file("rel A 1 over 3\n0\nrel B 2 over 3\n1 2\n").unwrap();
        assert_eq!(file.language().unwrap().len(), 2);
        let empty = parse_relation_file("rel A 1 over 3\n").unwrap();
        assert!(empty.relation("A").unwrap().is_empty());
        assert!(empty.language().is_err());
    }
}
