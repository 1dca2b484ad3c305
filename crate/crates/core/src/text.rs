//! Context-free parsers for the text formats: field-element literals, 2x2
//! matrix literals and scheme documents. Nothing here builds a field, so the
//! parsers are safe to run on arbitrary input.
//!
//! Grammar:
//!
//! ```text
//! elem    := int | "[" int ("," int)* "]"        constant term first
//! matrix  := "[" "[" elem "," elem "]" "," "[" elem "," elem "]" "]"
//! block   := line*   with lines
//!              "p k r"                  header, exactly once
//!              "modulus: [c0,...,ck]"   optional
//!              "gen: <matrix>"          zero or more
//!              "type: <tag>" | "order: <n>" | "degrees: <d1 d2 d3>" | "relation: <text>"
//!              "# ..." comments and blank lines
//! document := block ("---" block)*
//! ```

use crate::gf::MAX_DEGREE;

/// Upper bound on generators accepted in one block.
pub const MAX_GENERATORS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

fn err<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError::Syntax {
        line,
        msg: msg.into(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElemLit {
    Int(i64),
    List(Vec<i64>),
}

pub type MatLit = [[ElemLit; 2]; 2];

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(s: &'a str, line: usize) -> Self {
        Cursor {
            s: s.as_bytes(),
            pos: 0,
            line,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            err(self.line, format!("expected `{}`", c as char))
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.s.get(self.pos), Some(b'-' | b'+')) {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let tok = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        tok.parse::<i64>()
            .or_else(|_| err(self.line, "expected an integer that fits in 64 bits"))
    }

    fn elem(&mut self) -> Result<ElemLit, ParseError> {
        if self.peek() != Some(b'[') {
            return Ok(ElemLit::Int(self.int()?));
        }
        self.pos += 1;
        let mut coeffs = vec![self.int()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            coeffs.push(self.int()?);
            if coeffs.len() > MAX_DEGREE {
                return err(self.line, "coefficient list too long");
            }
        }
        self.expect(b']')?;
        Ok(ElemLit::List(coeffs))
    }

    fn row(&mut self) -> Result<[ElemLit; 2], ParseError> {
        self.expect(b'[')?;
        let a = self.elem()?;
        self.expect(b',')?;
        let b = self.elem()?;
        self.expect(b']')?;
        Ok([a, b])
    }

    fn matrix(&mut self) -> Result<MatLit, ParseError> {
        self.expect(b'[')?;
        let r0 = self.row()?;
        self.expect(b',')?;
        let r1 = self.row()?;
        self.expect(b']')?;
        Ok([r0, r1])
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.peek().is_some() {
            err(self.line, "trailing characters")
        } else {
            Ok(())
        }
    }
}

pub fn parse_elem(s: &str) -> Result<ElemLit, ParseError> {
    let mut c = Cursor::new(s, 1);
    let e = c.elem()?;
    c.finish()?;
    Ok(e)
}

pub fn parse_matrix(s: &str) -> Result<MatLit, ParseError> {
    let mut c = Cursor::new(s, 1);
    let m = c.matrix()?;
    c.finish()?;
    Ok(m)
}

/// One scheme block as written, before any field is built.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SchemeText {
    pub p: u64,
    pub k: u32,
    pub r: u64,
    pub modulus: Option<Vec<i64>>,
    pub gens: Vec<MatLit>,
    pub type_tag: Option<String>,
    pub order: Option<u64>,
    pub degrees: Option<Vec<u64>>,
    pub relation: Option<String>,
}

fn parse_block(lines: &[(usize, &str)]) -> Result<SchemeText, ParseError> {
    let mut out = SchemeText::default();
    let mut header = false;
    let last_line = lines.last().map(|l| l.0).unwrap_or(1);
    for &(no, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = line.split_once(':') {
            let value = value.trim();
            let once = |present: bool| {
                if present {
                    err(no, format!("duplicate `{key}` line"))
                } else {
                    Ok(())
                }
            };
            match key.trim() {
                "gen" => {
                    if out.gens.len() == MAX_GENERATORS {
                        return err(no, "too many generators");
                    }
                    let mut c = Cursor::new(value, no);
                    out.gens.push(c.matrix()?);
                    c.finish()?;
                }
                "modulus" => {
                    once(out.modulus.is_some())?;
                    let mut c = Cursor::new(value, no);
                    match c.elem()? {
                        ElemLit::List(v) => out.modulus = Some(v),
                        ElemLit::Int(_) => return err(no, "modulus must be a coefficient list"),
                    }
                    c.finish()?;
                }
                "type" => {
                    once(out.type_tag.is_some())?;
                    if value.is_empty() || value.len() > 16 {
                        return err(no, "bad type tag");
                    }
                    out.type_tag = Some(value.to_string());
                }
                "order" => {
                    once(out.order.is_some())?;
                    out.order = Some(value.parse().or_else(|_| err(no, "bad order"))?);
                }
                "degrees" => {
                    once(out.degrees.is_some())?;
                    let ds = value
                        .split_whitespace()
                        .map(|t| t.parse::<u64>())
                        .collect::<Result<Vec<_>, _>>()
                        .or_else(|_| err(no, "bad degree list"))?;
                    if ds.len() > 16 {
                        return err(no, "too many degrees");
                    }
                    out.degrees = Some(ds);
                }
                "relation" => {
                    once(out.relation.is_some())?;
                    out.relation = Some(value.to_string());
                }
                other => return err(no, format!("unknown key `{}`", other.chars().take(20).collect::<String>())),
            }
            continue;
        }
        if header {
            return err(no, "second header line");
        }
        let nums: Vec<&str> = line.split_whitespace().collect();
        if nums.len() != 3 {
            return err(no, "header must be `p k r`");
        }
        let parse = |t: &str| t.parse::<u64>().or_else(|_| err(no, "bad header number"));
        out.p = parse(nums[0])?;
        out.k = u32::try_from(parse(nums[1])?).or_else(|_| err(no, "degree too large"))?;
        out.r = parse(nums[2])?;
        header = true;
    }
    if !header {
        return err(last_line, "missing `p k r` header");
    }
    Ok(out)
}

/// Parses a document of one or more blocks separated by `---` lines.
pub fn parse_document(s: &str) -> Result<Vec<SchemeText>, ParseError> {
    let mut blocks = Vec::new();
    let mut current: Vec<(usize, &str)> = Vec::new();
    for (i, line) in s.lines().enumerate() {
        if line.trim() == "---" {
            blocks.push(parse_block(&current)?);
            current.clear();
        } else {
            current.push((i + 1, line));
        }
    }
    let trailing_content = current
        .iter()
        .any(|(_, l)| !l.trim().is_empty() && !l.trim().starts_with('#'));
    if trailing_content || blocks.is_empty() {
        blocks.push(parse_block(&current)?);
    }
    Ok(blocks)
}

/// Parses exactly one scheme block.
pub fn parse_scheme(s: &str) -> Result<SchemeText, ParseError> {
    let mut blocks = parse_document(s)?;
    if blocks.len() != 1 {
        return err(1, "expected exactly one scheme");
    }
    Ok(blocks.remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elements() {
        assert_eq!(parse_elem(" -3 ").unwrap(), ElemLit::Int(-3));
        assert_eq!(parse_elem("[1, 2,0]").unwrap(), ElemLit::List(vec![1, 2, 0]));
        assert!(parse_elem("[1,").is_err());
        assert!(parse_elem("99999999999999999999").is_err());
        assert!(parse_elem("1 2").is_err());
    }

    #[test]
    fn matrices() {
        let m = parse_matrix("[[0,[0,1]],[[0,1],0]]").unwrap();
        assert_eq!(m[0][1], ElemLit::List(vec![0, 1]));
        assert_eq!(m[1][1], ElemLit::Int(0));
        assert!(parse_matrix("[[1,0],[0,1]").is_err());
        assert!(parse_matrix("[[1,0,0],[0,1]]").is_err());
    }

    #[test]
    fn scheme_block() {
        let text = "# D4\n5 2 4\nmodulus: [2,4,1]\ngen: [[0,[0,1]],[[0,1],0]]\n";
        let s = parse_scheme(text).unwrap();
        assert_eq!((s.p, s.k, s.r), (5, 2, 4));
        assert_eq!(s.modulus, Some(vec![2, 4, 1]));
        assert_eq!(s.gens.len(), 1);
    }

    #[test]
    fn scheme_errors() {
        assert!(parse_scheme("").is_err());
        assert!(parse_scheme("5 1 2\n5 1 2").is_err());
        assert!(parse_scheme("5 1").is_err());
        assert!(parse_scheme("5 1 2\nfoo: 3").is_err());
        assert!(parse_scheme("5 1 2\ngen: [[1,0],[0,1]] x").is_err());
        assert!(parse_scheme("5 1 2\n---\n5 1 3").is_err());
    }

    #[test]
    fn documents() {
        let doc = "type: A1\n2 1 2\n---\ntype: A2\n2 2 3\n---\n";
        let blocks = parse_document(doc).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[1].type_tag.as_deref(), Some("A2"));
    }
}
