//! Line-oriented quiver description language.
//!
//! ```text
//! degrees 0..2
//! sort XY1 = homology X Y 1
//! sort Y0  = homology Y _ 0
//! sort X_n = graded X -1
//! sort K   = coefficient
//! edge functorial a1 : YZ1 -> XZ1 over a
//! edge boundary d1 : XY1 -> YZ0
//! edge structural z : A -> B zero
//! compose b1 a1 = c1
//! pair a1 b1
//! point X.x component c
//! ```

use crate::quiver::{EdgeKind, Quiver, QuiverBuilder, QuiverError, SortKind, StructuralKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: invalid declaration: {source}")]
    Invalid { line: usize, col: usize, source: QuiverError },
    #[error("invalid quiver: {0}")]
    Final(QuiverError),
}

impl DslError {
    pub fn line(&self) -> Option<usize> {
        match self {
            DslError::Syntax { line, .. } | DslError::Invalid { line, .. } => Some(*line),
            DslError::Final(_) => None,
        }
    }
}

/// A word of a line with its 1-based column.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Word<'a> {
    pub text: &'a str,
    pub col: usize,
}

pub(crate) fn words(line: &str) -> Vec<Word<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Word { text: &line[s..i], col: line[..s].chars().count() + 1 });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Word { text: &line[s..], col: line[..s].chars().count() + 1 });
    }
    out
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' || c == '!' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '!' | '\''))
}

struct Cursor<'a> {
    line: usize,
    words: Vec<Word<'a>>,
    pos: usize,
    end_col: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, col: usize, msg: impl Into<String>) -> DslError {
        DslError::Syntax { line: self.line, col, msg: msg.into() }
    }

    fn col(&self) -> usize {
        self.words.get(self.pos).map_or(self.end_col, |w| w.col)
    }

    fn next(&mut self, what: &str) -> Result<Word<'a>, DslError> {
        let w = self.words.get(self.pos).copied().ok_or_else(|| self.err(self.end_col, format!("expected {what}")))?;
        self.pos += 1;
        Ok(w)
    }

    fn ident(&mut self, what: &str) -> Result<&'a str, DslError> {
        let w = self.next(what)?;
        if !is_identifier(w.text) {
            return Err(self.err(w.col, format!("expected {what}, found `{}`", w.text)));
        }
        Ok(w.text)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), DslError> {
        let w = self.next(&format!("`{kw}`"))?;
        if w.text != kw {
            return Err(self.err(w.col, format!("expected `{kw}`, found `{}`", w.text)));
        }
        Ok(())
    }

    fn int(&mut self, what: &str) -> Result<i32, DslError> {
        let w = self.next(what)?;
        w.text.parse().map_err(|_| self.err(w.col, format!("expected {what}, found `{}`", w.text)))
    }

    fn optional(&mut self) -> Option<Word<'a>> {
        let w = self.words.get(self.pos).copied();
        if w.is_some() {
            self.pos += 1;
        }
        w
    }

    fn finish(&self) -> Result<(), DslError> {
        match self.words.get(self.pos) {
            Some(w) => Err(self.err(w.col, format!("unexpected `{}`", w.text))),
            None => Ok(()),
        }
    }
}

pub fn parse_quiver(text: &str) -> Result<Quiver, DslError> {
    let mut b = Quiver::builder();
    for (idx, raw) in text.lines().enumerate() {
        let body = strip_comment(raw);
        let ws = words(body);
        if ws.is_empty() {
            continue;
        }
        let mut c = Cursor { line: idx + 1, words: ws, pos: 0, end_col: body.chars().count() + 1 };
        let col = c.col();
        let invalid = |e: QuiverError| DslError::Invalid { line: idx + 1, col, source: e };
        declaration(&mut c, &mut b, invalid)?;
    }
    b.build().map_err(DslError::Final)
}

fn declaration(c: &mut Cursor<'_>, b: &mut QuiverBuilder, invalid: impl Fn(QuiverError) -> DslError) -> Result<(), DslError> {
    let head = c.next("a declaration")?;
    match head.text {
        "degrees" => {
            let w = c.next("a degree range `n..m`")?;
            let (lo, hi) = w
                .text
                .split_once("..")
                .and_then(|(a, b)| Some((a.parse::<i32>().ok()?, b.parse::<i32>().ok()?)))
                .ok_or_else(|| c.err(w.col, format!("expected `n..m`, found `{}`", w.text)))?;
            c.finish()?;
            b.degrees(lo, hi).map_err(&invalid)?;
        }
        "sort" => {
            let name = c.ident("a sort name")?;
            c.keyword("=")?;
            let kind_w = c.next("a sort kind")?;
            let kind = match kind_w.text {
                "homology" => {
                    let vertex = c.ident("a vertex label")?.to_string();
                    let sub = c.next("a subvertex label or `_`")?;
                    let sub = match sub.text {
                        "_" => None,
                        s if is_identifier(s) => Some(s.to_string()),
                        s => return Err(c.err(sub.col, format!("expected a subvertex label, found `{s}`"))),
                    };
                    let degree = c.int("a degree")?;
                    SortKind::Homology { vertex, sub, degree }
                }
                "graded" => {
                    let vertex = c.ident("a vertex label")?.to_string();
                    let degree = c.int("a degree")?;
                    SortKind::Graded { vertex, degree }
                }
                "coefficient" => SortKind::Coefficient,
                other => return Err(c.err(kind_w.col, format!("unknown sort kind `{other}`"))),
            };
            c.finish()?;
            b.sort(name, kind).map_err(&invalid)?;
        }
        "edge" => {
            let kind_w = c.next("an edge kind")?;
            if !matches!(kind_w.text, "functorial" | "boundary" | "structural") {
                return Err(c.err(kind_w.col, format!("unknown edge kind `{}`", kind_w.text)));
            }
            let name = c.ident("an edge name")?;
            c.keyword(":")?;
            let src = c.ident("a source sort")?;
            c.keyword("->")?;
            let tgt = c.ident("a target sort")?;
            let kind = match kind_w.text {
                "functorial" => {
                    c.keyword("over")?;
                    let label = c.ident("a morphism label")?;
                    EdgeKind::Functorial { label: label.into() }
                }
                "boundary" => EdgeKind::Boundary,
                _ => {
                    let role = match c.optional() {
                        None => StructuralKind::User,
                        Some(w) => match w.text {
                            "zero" => StructuralKind::Zero,
                            "excision" => StructuralKind::ExcisionInverse,
                            "user" => StructuralKind::User,
                            other => return Err(c.err(w.col, format!("unknown structural role `{other}`"))),
                        },
                    };
                    EdgeKind::Structural { role }
                }
            };
            c.finish()?;
            b.edge(name, src, tgt, kind).map_err(&invalid)?;
        }
        "compose" => {
            let g = c.ident("an edge name")?;
            let f = c.ident("an edge name")?;
            c.keyword("=")?;
            let h = c.ident("an edge name or `id`")?;
            c.finish()?;
            let h = (h != "id").then_some(h);
            b.compose(g, f, h).map_err(&invalid)?;
        }
        "pair" => {
            let f = c.ident("an edge name")?;
            let g = c.ident("an edge name")?;
            c.finish()?;
            b.pair(f, g).map_err(&invalid)?;
        }
        "point" => {
            let w = c.next("a point `X.x`")?;
            let (vertex, label) = w
                .text
                .split_once('.')
                .filter(|(v, l)| is_identifier(v) && is_identifier(l))
                .ok_or_else(|| c.err(w.col, format!("expected `X.x`, found `{}`", w.text)))?;
            c.keyword("component")?;
            let comp = c.ident("a component label")?;
            c.finish()?;
            b.point(vertex, label, comp).map_err(&invalid)?;
        }
        other => return Err(c.err(head.col, format!("unknown declaration `{other}`"))),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file() {
        let q =
            parse_quiver("# two vertices\nsort A = homology X _ 0\nsort B = homology Y _ 0\nedge functorial f : A -> B over f\n")
                .unwrap();
        assert_eq!(q.sorts().len(), 3);
        assert_eq!(q.edges().len(), 1);
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_quiver("sort A = homology X _ 0\nedge functorial f : A => A over f\n").unwrap_err();
        match err {
            DslError::Syntax { line, col, .. } => assert_eq!((line, col), (2, 23)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invariant_error_names_declaration() {
        let src = "sort XY1 = homology X Y 1\nsort XZ1 = homology X Z 1\nedge boundary d : XY1 -> XZ1\n";
        let err = parse_quiver(src).unwrap_err();
        assert_eq!(err.line(), Some(3));
        assert!(err.to_string().contains("boundary shape violation"));
        assert!(err.to_string().contains("`d`"));
    }
}
