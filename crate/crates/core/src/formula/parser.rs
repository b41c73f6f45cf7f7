//! Line-oriented text format for languages, formulas and instances.
//!
//! ```text
//! domain 2                       # optional labels: domain 3 a b c
//! rel R00 2 { 0 1 ; 1 0 ; 1 1 }  # braces may span lines
//! var x1 x2 x3                   # optional; fixes the variable order
//! cst R00 x1 x2
//! cst R01 #0 x2                  # #c is the constant c
//! start 1 0 1
//! target 1 0 1
//! ```
//!
//! A `#` that is not followed by a digit starts a comment.

use crate::domain::{FiniteDomain, Value};
use crate::error::{Error, Result};
use crate::pattern::{is_identifier, Term};
use crate::relation::{Relation, Tuple};

use super::{Constraint, ConstraintLanguage, Formula, RcspInstance};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Word(String),
    Open,
    Close,
    Semi,
    Newline,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

/// A value with the line and column it was read at.
type At<T> = (T, usize, usize);

/// A constraint, the positions of its arguments, and its own position.
type PlacedConstraint = (Constraint, Vec<(usize, usize)>, usize, usize);

fn err(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::parse(line, column, message)
}

fn tokenize(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let column = i + 1;
            let single = match c {
                '{' => Some(Tok::Open),
                '}' => Some(Tok::Close),
                ';' => Some(Tok::Semi),
                _ => None,
            };
            if let Some(tok) = single {
                out.push(Token {
                    tok,
                    line: li + 1,
                    column,
                });
                i += 1;
            } else if c.is_whitespace() {
                i += 1;
            } else if c == '#' && !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                break;
            } else {
                let start = i;
                while i < chars.len()
                    && !chars[i].is_whitespace()
                    && !matches!(chars[i], '{' | '}' | ';')
                {
                    i += 1;
                }
                out.push(Token {
                    tok: Tok::Word(chars[start..i].iter().collect()),
                    line: li + 1,
                    column,
                });
            }
        }
        out.push(Token {
            tok: Tok::Newline,
            line: li + 1,
            column: chars.len() + 1,
        });
    }
    out
}

/// Everything a file may contain. Statements other than `domain` are optional.
#[derive(Clone, Debug)]
pub struct Document {
    pub language: ConstraintLanguage,
    pub formula: Option<Formula>,
    pub start: Option<Tuple>,
    pub target: Option<Tuple>,
}

impl Document {
    pub fn domain(&self) -> &FiniteDomain {
        self.language.domain()
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    domain: Option<FiniteDomain>,
}

impl Parser {
    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn last_position(&self) -> (usize, usize) {
        self.tokens
            .last()
            .map(|t| (t.line, t.column))
            .unwrap_or((1, 1))
    }

    /// Rest of the current line as words.
    fn line_words(&mut self) -> Result<Vec<At<String>>> {
        let mut words = Vec::new();
        while let Some(t) = self.next() {
            match t.tok {
                Tok::Newline => break,
                Tok::Word(w) => words.push((w, t.line, t.column)),
                _ => return Err(err(t.line, t.column, "unexpected punctuation")),
            }
        }
        Ok(words)
    }

    fn domain(&self, line: usize, column: usize) -> Result<&FiniteDomain> {
        self.domain
            .as_ref()
            .ok_or_else(|| err(line, column, "missing domain statement before this line"))
    }

    fn value(&self, word: &str, line: usize, column: usize) -> Result<Value> {
        let domain = self.domain(line, column)?;
        let v = match word.parse::<Value>() {
            Ok(v) => v,
            Err(_) => domain
                .labels()
                .and_then(|ls| ls.iter().position(|l| l == word))
                .map(|p| p as Value)
                .ok_or_else(|| err(line, column, format!("not a domain element: {word}")))?,
        };
        domain
            .check_value(v)
            .map_err(|e| err(line, column, e.to_string()))?;
        Ok(v)
    }

    fn usize_word(&mut self, what: &str) -> Result<(usize, usize, usize)> {
        match self.next() {
            Some(Token {
                tok: Tok::Word(w),
                line,
                column,
            }) => w
                .parse()
                .map(|n| (n, line, column))
                .map_err(|_| err(line, column, format!("expected {what}, found {w}"))),
            Some(t) => Err(err(t.line, t.column, format!("expected {what}"))),
            None => {
                let (l, c) = self.last_position();
                Err(err(l, c, format!("expected {what}")))
            }
        }
    }

    fn name(&mut self, what: &str) -> Result<At<String>> {
        match self.next() {
            Some(Token {
                tok: Tok::Word(w),
                line,
                column,
            }) if is_identifier(&w) => Ok((w, line, column)),
            Some(t) => Err(err(t.line, t.column, format!("expected {what}"))),
            None => {
                let (l, c) = self.last_position();
                Err(err(l, c, format!("expected {what}")))
            }
        }
    }

    /// `{ row ; row ; ... }`; newlines inside the braces are ignored.
    #[allow(clippy::type_complexity)]
    fn block(&mut self) -> Result<Vec<At<Vec<At<String>>>>> {
        match self.next() {
            Some(Token { tok: Tok::Open, .. }) => {}
            Some(t) => return Err(err(t.line, t.column, "expected '{'")),
            None => {
                let (l, c) = self.last_position();
                return Err(err(l, c, "expected '{'"));
            }
        }
        let mut rows = Vec::new();
        let mut words = Vec::new();
        let mut row_pos: Option<(usize, usize)> = None;
        loop {
            let Some(t) = self.next() else {
                let (l, c) = self.last_position();
                return Err(err(l, c, "unterminated '{'"));
            };
            match t.tok {
                Tok::Newline => {}
                Tok::Word(w) => {
                    row_pos.get_or_insert((t.line, t.column));
                    words.push((w, t.line, t.column));
                }
                Tok::Semi | Tok::Close => {
                    let closing = t.tok == Tok::Close;
                    if let Some((l, c)) = row_pos.take() {
                        rows.push((std::mem::take(&mut words), l, c));
                    } else if !closing {
                        return Err(err(t.line, t.column, "empty row"));
                    }
                    if closing {
                        break;
                    }
                }
                Tok::Open => return Err(err(t.line, t.column, "nested '{'")),
            }
        }
        Ok(rows)
    }

    fn end_of_statement(&mut self) -> Result<()> {
        match self.next() {
            None
            | Some(Token {
                tok: Tok::Newline, ..
            }) => Ok(()),
            Some(t) => Err(err(t.line, t.column, "unexpected trailing input")),
        }
    }
}

/// Parses any file in the text format.
pub fn parse_document(text: &str) -> Result<Document> {
    let mut p = Parser {
        tokens: tokenize(text),
        pos: 0,
        domain: None,
    };
    let mut language: Option<ConstraintLanguage> = None;
    let mut constraints: Vec<PlacedConstraint> = Vec::new();
    let mut declared: Option<At<Vec<At<String>>>> = None;
    let mut start: Option<At<Vec<Value>>> = None;
    let mut target: Option<At<Vec<Value>>> = None;

    while let Some(t) = p.next() {
        let (line, column) = (t.line, t.column);
        let keyword = match t.tok {
            Tok::Newline => continue,
            Tok::Word(w) => w,
            _ => return Err(err(line, column, "expected a statement keyword")),
        };
        match keyword.as_str() {
            "domain" => {
                if p.domain.is_some() {
                    return Err(err(line, column, "second domain statement"));
                }
                let words = p.line_words()?;
                let Some(((n, nl, nc), labels)) = words.split_first() else {
                    return Err(err(line, column, "domain needs a size"));
                };
                let size: u32 = n
                    .parse()
                    .map_err(|_| err(*nl, *nc, format!("expected a domain size, found {n}")))?;
                let domain = if labels.is_empty() {
                    FiniteDomain::new(size)
                } else {
                    FiniteDomain::with_labels(size, labels.iter().map(|w| w.0.clone()).collect())
                }
                .map_err(|e| err(*nl, *nc, e.to_string()))?;
                language = Some(ConstraintLanguage::new(domain.clone(), Vec::<(String, Relation)>::new())?);
                p.domain = Some(domain);
            }
            "rel" => {
                let domain = p.domain(line, column)?.clone();
                let (name, nl, nc) = p.name("a relation name")?;
                let (arity, al, ac) = p.usize_word("an arity")?;
                let mut relation =
                    Relation::empty(domain, arity).map_err(|e| err(al, ac, e.to_string()))?;
                let mut tuples = Vec::new();
                for (words, rl, rc) in p.block()? {
                    if words.len() != arity {
                        return Err(err(
                            rl,
                            rc,
                            format!("tuple has {} values, relation {name} has arity {arity}", words.len()),
                        ));
                    }
                    tuples.push(
                        words
                            .iter()
                            .map(|(w, l, c)| p.value(w, *l, *c))
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                p.end_of_statement()?;
                relation = Relation::new(relation.domain().clone(), arity, tuples)
                    .map_err(|e| err(line, column, e.to_string()))?;
                language
                    .as_mut()
                    .expect("domain seen")
                    .insert(name, relation)
                    .map_err(|e| err(nl, nc, e.to_string()))?;
            }
            "var" => {
                if declared.is_some() {
                    return Err(err(line, column, "second var statement"));
                }
                let words = p.line_words()?;
                for (w, l, c) in &words {
                    if !is_identifier(w) {
                        return Err(err(*l, *c, format!("bad variable name {w}")));
                    }
                }
                declared = Some((words, line, column));
            }
            "cst" => {
                let lang = language
                    .as_ref()
                    .ok_or_else(|| err(line, column, "missing domain statement before this line"))?;
                let (name, nl, nc) = p.name("a relation name")?;
                let Some(relation) = lang.get(&name) else {
                    return Err(err(nl, nc, format!("unknown relation name {name}")));
                };
                let arity = relation.arity();
                let words = p.line_words()?;
                if words.len() != arity {
                    return Err(err(
                        line,
                        column,
                        format!("{name} has arity {arity} but {} arguments were given", words.len()),
                    ));
                }
                let mut args = Vec::with_capacity(arity);
                let mut positions = Vec::with_capacity(arity);
                for (w, l, c) in words {
                    let term: Term = w.parse().map_err(|e: Error| err(l, c, e.to_string()))?;
                    if let Term::Const(v) = term {
                        lang.domain()
                            .check_value(v)
                            .map_err(|e| err(l, c, e.to_string()))?;
                    }
                    args.push(term);
                    positions.push((l, c));
                }
                constraints.push((Constraint::new(name, args), positions, line, column));
            }
            "start" | "target" => {
                let slot = if keyword == "start" { &mut start } else { &mut target };
                if slot.is_some() {
                    return Err(err(line, column, format!("second {keyword} statement")));
                }
                let words = p.line_words()?;
                let values = words
                    .iter()
                    .map(|(w, l, c)| p.value(w, *l, *c))
                    .collect::<Result<Vec<_>>>()?;
                let slot = if keyword == "start" { &mut start } else { &mut target };
                *slot = Some((values, line, column));
            }
            other => return Err(err(line, column, format!("unknown statement {other}"))),
        }
    }

    let Some(language) = language else {
        let (l, c) = p.last_position();
        return Err(err(l, c, "missing domain statement"));
    };

    let formula = if constraints.is_empty() {
        if let Some((_, l, c)) = declared {
            return Err(err(l, c, "var statement without constraints"));
        }
        None
    } else {
        // Report variable-order problems at the offending token.
        let mut occurring: Vec<At<String>> = Vec::new();
        for (c, positions, _, _) in &constraints {
            for (a, (l, col)) in c.args.iter().zip(positions) {
                if let Term::Var(v) = a {
                    if !occurring.iter().any(|o| &o.0 == v) {
                        occurring.push((v.clone(), *l, *col));
                    }
                }
            }
        }
        if let Some((words, _, _)) = &declared {
            for (i, (w, l, c)) in words.iter().enumerate() {
                if words[..i].iter().any(|o| &o.0 == w) {
                    return Err(err(*l, *c, format!("variable {w} declared twice")));
                }
                if !occurring.iter().any(|o| &o.0 == w) {
                    return Err(err(*l, *c, format!("variable {w} is declared but occurs in no constraint")));
                }
            }
            for (v, l, c) in &occurring {
                if !words.iter().any(|w| &w.0 == v) {
                    return Err(err(*l, *c, format!("variable {v} is not declared")));
                }
            }
        }
        let (first_line, first_col) = (constraints[0].2, constraints[0].3);
        let cs = constraints.into_iter().map(|c| c.0).collect();
        let f = match declared {
            Some((words, _, _)) => {
                Formula::with_variables(language.clone(), cs, words.into_iter().map(|w| w.0).collect())
            }
            None => Formula::new(language.clone(), cs),
        }
        .map_err(|e| err(first_line, first_col, e.to_string()))?;
        Some(f)
    };

    let check = |which: &'static str, given: Option<At<Vec<Value>>>| -> Result<Option<Tuple>> {
        let Some((values, l, c)) = given else {
            return Ok(None);
        };
        let Some(f) = &formula else {
            return Err(err(l, c, format!("{which} given without constraints")));
        };
        if values.len() != f.num_variables() {
            return Err(err(
                l,
                c,
                format!("{which} has {} values for {} variables", values.len(), f.num_variables()),
            ));
        }
        if !f.satisfies_unchecked(&values) {
            return Err(err(l, c, Error::NotASolution(which).to_string()));
        }
        Ok(Some(Tuple::new(values)))
    };
    let start = check("start", start)?;
    let target = check("target", target)?;
    if start.is_some() != target.is_some() {
        let (l, c) = p.last_position();
        return Err(err(l, c, "start and target must be given together"));
    }
    Ok(Document {
        language,
        formula,
        start,
        target,
    })
}

/// Parses a file that must contain constraints.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let doc = parse_document(text)?;
    doc.formula
        .ok_or_else(|| Error::Invalid("the file contains no constraints".into()))
}

/// Parses a file that must contain constraints, `start` and `target`.
pub fn parse_instance(text: &str) -> Result<RcspInstance> {
    let doc = parse_document(text)?;
    let formula = doc
        .formula
        .ok_or_else(|| Error::Invalid("the file contains no constraints".into()))?;
    match (doc.start, doc.target) {
        (Some(s), Some(t)) => RcspInstance::new(formula, s, t),
        _ => Err(Error::Invalid("the file has no start and target".into())),
    }
}
