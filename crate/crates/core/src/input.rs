//! `.poly` and `.matroid` readers and the basis generating polynomial.
//!
//! `.poly` files are line oriented:
//!
//! ```text
//! # comment
//! p 3
//! ext 2          # optional
//! vars x y z w
//! poly f: x*y - z*w + 2
//! ```

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::FieldCtx;
use crate::poly::{Monomial, Poly, VarCtx};

#[derive(Debug, Clone)]
pub struct ParsedInput {
    pub field: Arc<FieldCtx>,
    pub vars: Arc<VarCtx>,
    pub polys: Vec<(String, Poly)>,
}

impl ParsedInput {
    pub fn get(&self, name: &str) -> Option<&Poly> {
        self.polys.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Strips a trailing comment and splits into the keyword, its column and the rest.
fn directive(raw: &str) -> Option<(&str, usize, &str)> {
    let body = raw.split('#').next().unwrap_or("");
    let start = body.len() - body.trim_start().len();
    let trimmed = body.trim();
    if trimmed.is_empty() {
        return None;
    }
    let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
    Some((
        &trimmed[..end],
        body[..start].chars().count() + 1,
        trimmed[end..].trim_start(),
    ))
}

/// Column (1-based, in characters) of the byte offset `offset` of `rest` within `raw`.
fn column_of(raw: &str, rest: &str, offset: usize) -> usize {
    let base = rest.as_ptr() as usize - raw.as_ptr() as usize;
    raw[..base + offset].chars().count() + 1
}

pub fn parse_input(text: &str) -> Result<ParsedInput> {
    let mut p: Option<u64> = None;
    let mut ext: Option<usize> = None;
    let mut field: Option<Arc<FieldCtx>> = None;
    let mut vars: Option<Arc<VarCtx>> = None;
    let mut polys: Vec<(String, Poly)> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let Some((word, col, rest)) = directive(raw) else {
            continue;
        };
        match word {
            "p" | "ext" => {
                if field.is_some() {
                    return Err(syntax(line, col, format!("`{word}` after the field is in use")));
                }
                if word == "p" && p.is_some() || word == "ext" && ext.is_some() {
                    return Err(syntax(line, col, format!("duplicate `{word}`")));
                }
                let value: u64 = rest
                    .parse()
                    .map_err(|_| Error::BadFieldSpec(format!("line {line}: `{rest}` is not a valid {word}")))?;
                if word == "p" {
                    p = Some(value);
                } else {
                    ext = Some(value as usize);
                }
            }
            "vars" => {
                if vars.is_some() {
                    return Err(syntax(line, col, "duplicate `vars`"));
                }
                let names: Vec<&str> = rest.split_whitespace().collect();
                let ctx = VarCtx::new(names.iter().copied()).map_err(|e| syntax(line, col, e.to_string()))?;
                vars = Some(Arc::new(ctx));
            }
            "poly" => {
                let vctx = vars.clone().ok_or_else(|| syntax(line, col, "`poly` before `vars`"))?;
                if field.is_none() {
                    let prime = p.ok_or_else(|| Error::BadFieldSpec("missing `p` line".into()))?;
                    field = Some(Arc::new(
                        FieldCtx::new(prime, ext.unwrap_or(1)).map_err(|e| Error::BadFieldSpec(e.to_string()))?,
                    ));
                }
                let fctx = field.clone().expect("set above");
                let colon = rest
                    .find(':')
                    .ok_or_else(|| syntax(line, column_of(raw, rest, rest.len()), "expected `:`"))?;
                let name = rest[..colon].trim();
                if name.is_empty() || !name.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(syntax(line, column_of(raw, rest, 0), "expected a polynomial name"));
                }
                if polys.iter().any(|(n, _)| n == name) {
                    return Err(syntax(
                        line,
                        column_of(raw, rest, 0),
                        format!("duplicate polynomial `{name}`"),
                    ));
                }
                let expr_start = column_of(raw, rest, colon + 1);
                let f = ExprParser::new(&rest[colon + 1..], line, expr_start, &fctx, &vctx).parse()?;
                polys.push((name.to_string(), f));
            }
            other => return Err(syntax(line, col, format!("unknown directive `{other}`"))),
        }
    }
    if polys.is_empty() {
        return Err(syntax(last_line.max(1), 1, "no `poly` definitions"));
    }
    Ok(ParsedInput {
        field: field.expect("set with first poly"),
        vars: vars.expect("set before poly"),
        polys,
    })
}

struct ExprParser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col0: usize,
    field: &'a Arc<FieldCtx>,
    vars: &'a Arc<VarCtx>,
}

impl<'a> ExprParser<'a> {
    fn new(text: &str, line: usize, col0: usize, field: &'a Arc<FieldCtx>, vars: &'a Arc<VarCtx>) -> Self {
        ExprParser {
            chars: text.chars().collect(),
            pos: 0,
            line,
            col0,
            field,
            vars,
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        syntax(self.line, self.col0 + self.pos, message)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<Poly> {
        let mut terms: Vec<(Monomial, crate::field::Scalar)> = Vec::new();
        let mut first = true;
        loop {
            let mut negative = false;
            match self.peek() {
                None if first => return Err(self.err("empty expression")),
                None => break,
                Some('+') | Some('-') => {
                    let mut sign_seen = false;
                    while let Some(c @ ('+' | '-')) = self.peek() {
                        if c == '-' {
                            negative = !negative;
                        }
                        sign_seen = true;
                        self.pos += 1;
                    }
                    debug_assert!(sign_seen);
                }
                Some(_) if first => {}
                Some(c) => return Err(self.err(format!("expected `+` or `-`, found `{c}`"))),
            }
            first = false;
            let (m, mut c) = self.term()?;
            if negative {
                c = self.field.neg(&c);
            }
            terms.push((m, c));
        }
        Poly::from_terms(self.field.clone(), self.vars.clone(), terms)
    }

    fn term(&mut self) -> Result<(Monomial, crate::field::Scalar)> {
        let n = self.vars.len();
        let mut exps = vec![0u32; n];
        let mut coeff = self.field.one();
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    let v = self.integer_mod_p();
                    coeff = self.field.mul(&coeff, &v);
                }
                Some(c) if c.is_alphabetic() || c == '_' => {
                    let start = self.pos;
                    while self
                        .chars
                        .get(self.pos)
                        .is_some_and(|c| c.is_alphanumeric() || *c == '_')
                    {
                        self.pos += 1;
                    }
                    let name: String = self.chars[start..self.pos].iter().collect();
                    let idx = self.vars.index_of(&name).ok_or(Error::UnknownVariable {
                        name: name.clone(),
                        line: self.line,
                        column: self.col0 + start,
                    })?;
                    let mut e = 1u32;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        self.skip_ws();
                        let start = self.pos;
                        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                            self.pos += 1;
                        }
                        let digits: String = self.chars[start..self.pos].iter().collect();
                        e = match digits.parse::<u32>() {
                            Ok(v) if v <= u16::MAX as u32 => v,
                            _ => {
                                self.pos = start;
                                return Err(self.err("malformed exponent"));
                            }
                        };
                    }
                    exps[idx] += e;
                    if exps[idx] > u16::MAX as u32 {
                        return Err(self.err("exponent exceeds 65535"));
                    }
                }
                Some(c) => return Err(self.err(format!("unexpected `{c}`"))),
                None => return Err(self.err("expected a term")),
            }
            if self.peek() == Some('*') {
                self.pos += 1;
                continue;
            }
            break;
        }
        Ok((Monomial::from_exps(exps.into_iter().map(|e| e as u16).collect()), coeff))
    }

    /// Reads a decimal integer of any length, reduced modulo `p`.
    fn integer_mod_p(&mut self) -> crate::field::Scalar {
        let p = self.field.characteristic() as u64;
        let mut acc = 0u64;
        while let Some(d) = self.chars.get(self.pos).and_then(|c| c.to_digit(10)) {
            acc = (acc * 10 + d as u64) % p;
            self.pos += 1;
        }
        self.field.from_int(acc as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatroidInput {
    pub n: usize,
    /// 1-based element lists.
    pub bases: Vec<Vec<usize>>,
    /// Characteristic from an optional `p` line.
    pub p: Option<u64>,
}

/// Reads `matroid`, `n <int>`, optional `p <prime>`, then `basis i1 i2 ...` lines.
pub fn parse_matroid(text: &str) -> Result<MatroidInput> {
    let mut header = false;
    let mut n: Option<usize> = None;
    let mut p: Option<u64> = None;
    let mut bases: Vec<Vec<usize>> = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let Some((word, col, rest)) = directive(raw) else {
            continue;
        };
        if !header {
            if word != "matroid" || !rest.is_empty() {
                return Err(syntax(line, col, "expected `matroid`"));
            }
            header = true;
            continue;
        }
        match word {
            "n" => {
                if n.is_some() {
                    return Err(syntax(line, col, "duplicate `n`"));
                }
                n = Some(
                    rest.parse()
                        .map_err(|_| syntax(line, column_of(raw, rest, 0), "expected a ground-set size"))?,
                );
            }
            "p" => {
                if p.is_some() {
                    return Err(syntax(line, col, "duplicate `p`"));
                }
                p = Some(
                    rest.parse()
                        .map_err(|_| Error::BadFieldSpec(format!("line {line}: `{rest}` is not a valid p")))?,
                );
            }
            "basis" => {
                let size = n.ok_or_else(|| syntax(line, col, "`basis` before `n`"))?;
                let mut basis = Vec::new();
                let mut offset = 0;
                for tok in rest.split_whitespace() {
                    let at = rest[offset..].find(tok).expect("token from rest") + offset;
                    offset = at + tok.len();
                    let i: usize = tok
                        .parse()
                        .map_err(|_| syntax(line, column_of(raw, rest, at), "expected an element index"))?;
                    if i == 0 || i > size {
                        return Err(Error::IndexOutOfRange { index: i, len: size });
                    }
                    if basis.contains(&i) {
                        return Err(syntax(line, column_of(raw, rest, at), format!("element {i} repeated")));
                    }
                    basis.push(i);
                }
                basis.sort_unstable();
                if let Some(first) = bases.first() {
                    if first.len() != basis.len() {
                        return Err(syntax(line, col, "bases have different sizes"));
                    }
                }
                bases.push(basis);
            }
            other => return Err(syntax(line, col, format!("unknown directive `{other}`"))),
        }
    }
    if !header {
        return Err(syntax(last_line.max(1), 1, "expected `matroid`"));
    }
    let n = n.ok_or_else(|| syntax(last_line.max(1), 1, "missing `n`"))?;
    Ok(MatroidInput { n, bases, p })
}

/// Variables `x1, ..., xn` for a ground set of size `n`.
pub fn matroid_vars(n: usize) -> Result<Arc<VarCtx>> {
    Ok(Arc::new(VarCtx::numbered("x", n)?))
}

/// `Σ_B ∏_{i ∈ B} x_i` with `x_i` the `i`-th variable of `vars`.
pub fn matroid_basis_polynomial(m: &MatroidInput, field: Arc<FieldCtx>, vars: Arc<VarCtx>) -> Result<Poly> {
    if m.bases.is_empty() {
        return Err(Error::EmptyBases);
    }
    let n = vars.len();
    let mut terms = Vec::with_capacity(m.bases.len());
    let mut seen = BTreeSet::new();
    for b in &m.bases {
        for &i in b {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
        }
        let mono = Monomial::from_vars(n, b.iter().map(|i| i - 1));
        if seen.insert(mono.clone()) {
            terms.push((mono, field.one()));
        }
    }
    Poly::from_terms(field, vars, terms)
}

/// Basis exchange: for bases `A ≠ B` and `a ∈ A \ B` some `b ∈ B \ A`
/// makes `A - a + b` a basis.
pub fn verify_matroid(m: &MatroidInput) -> bool {
    let bases: BTreeSet<Vec<usize>> = m.bases.iter().cloned().collect();
    for a in &bases {
        for b in &bases {
            for &x in a.iter().filter(|x| !b.contains(x)) {
                let ok = b.iter().filter(|y| !a.contains(y)).any(|&y| {
                    let mut c: Vec<usize> = a.iter().copied().filter(|&z| z != x).collect();
                    c.push(y);
                    c.sort_unstable();
                    bases.contains(&c)
                });
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let parsed = parse_input("p 2\nvars x y z w\npoly f: x*y + z*w").unwrap();
        let f = parsed.get("f").unwrap();
        assert_eq!(f.to_string(), "x*y + z*w");
        assert_eq!(f.field().characteristic(), 2);

        let parsed = parse_input("p 5\nvars x\npoly f: 7*x").unwrap();
        assert_eq!(parsed.get("f").unwrap().to_string(), "2*x");

        assert!(matches!(
            parse_input("p 6\nvars x\npoly f: x"),
            Err(Error::BadFieldSpec(_))
        ));
    }

    #[test]
    fn parse_signs_comments_and_powers() {
        let text = "# header\np 3 # prime\nvars x y\npoly g: -x^2*y + 2 - - y\npoly h:x*x";
        let parsed = parse_input(text).unwrap();
        assert_eq!(parsed.get("g").unwrap().to_string(), "2 + y + 2*x^2*y");
        assert_eq!(parsed.get("h").unwrap().to_string(), "x^2");
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            parse_input("p 2\nvars x y\npoly f: x + q").unwrap_err(),
            Error::UnknownVariable {
                name: "q".into(),
                line: 3,
                column: 13
            }
        );
        assert!(matches!(
            parse_input("p 2\nvars x\npoly f: x^"),
            Err(Error::Syntax {
                line: 3,
                column: 11,
                ..
            })
        ));
        assert!(matches!(
            parse_input("p 2\nvars x\npoly f: x^70000"),
            Err(Error::Syntax { line: 3, .. })
        ));
        assert!(matches!(
            parse_input("p 2\nvars x\npoly f: x y"),
            Err(Error::Syntax {
                line: 3,
                column: 11,
                ..
            })
        ));
        assert!(matches!(parse_input("p 2\nvars x"), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse_input("p 2\next 5\nvars x\npoly f: x"),
            Err(Error::BadFieldSpec(_))
        ));
        assert!(matches!(parse_input("vars x\npoly f: x"), Err(Error::BadFieldSpec(_))));
    }

    #[test]
    fn parse_extension_field() {
        let parsed = parse_input("p 2\next 2\nvars x y\npoly f: x + y").unwrap();
        assert_eq!(parsed.field.order(), 4);
    }

    fn matroid(bases: &[&[usize]], n: usize) -> MatroidInput {
        MatroidInput {
            n,
            bases: bases.iter().map(|b| b.to_vec()).collect(),
            p: None,
        }
    }

    #[test]
    fn basis_polynomial_examples() {
        let f2 = Arc::new(FieldCtx::prime(2).unwrap());
        let u12 = matroid(&[&[1], &[2]], 2);
        let f = matroid_basis_polynomial(&u12, f2.clone(), matroid_vars(2).unwrap()).unwrap();
        assert_eq!(f.to_string(), "x1 + x2");
        let tri = matroid(&[&[1, 2], &[1, 3], &[2, 3]], 3);
        let f = matroid_basis_polynomial(&tri, f2.clone(), matroid_vars(3).unwrap()).unwrap();
        assert_eq!(f.to_string(), "x1*x2 + x1*x3 + x2*x3");
        let u24 = matroid(&[&[1, 2], &[1, 3], &[1, 4], &[2, 3], &[2, 4], &[3, 4]], 4);
        let f = matroid_basis_polynomial(&u24, f2.clone(), matroid_vars(4).unwrap()).unwrap();
        assert_eq!(f.num_terms(), 6);
        assert!(f.terms().iter().all(|(m, _)| m.is_squarefree() && m.degree() == 2));
        assert_eq!(
            matroid_basis_polynomial(&matroid(&[], 2), f2, matroid_vars(2).unwrap()).unwrap_err(),
            Error::EmptyBases
        );
    }

    #[test]
    fn matroid_file() {
        let m = parse_matroid("matroid\nn 3\np 3\nbasis 1 2\nbasis 1 3\nbasis 3 2\n").unwrap();
        assert_eq!(m.bases, vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(m.p, Some(3));
        assert!(verify_matroid(&m));
        assert!(!verify_matroid(&matroid(&[&[1, 2], &[3, 4]], 4)));
        assert_eq!(
            parse_matroid("matroid\nn 2\nbasis 3").unwrap_err(),
            Error::IndexOutOfRange { index: 3, len: 2 }
        );
        assert!(matches!(parse_matroid("n 2"), Err(Error::Syntax { line: 1, .. })));
        assert!(matches!(
            parse_matroid("matroid\nn 3\nbasis 1\nbasis 1 2"),
            Err(Error::Syntax { line: 4, .. })
        ));
    }
}
