use super::LoopProgram;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Assign,
    Ge,
    Semi,
    Comma,
    Plus,
    Minus,
    Star,
    Eof,
}

struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { line, col, msg: msg.into() }
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (ln, col) = (li + 1, i + 1);
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let push = |tok, out: &mut Vec<Token>| out.push(Token { tok, line: ln, col });
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == '.' || chars[i] == '/' || chars[i] == 'e' || chars[i] == 'E') {
                    return Err(err(ln, col, "non-integer literal"));
                }
                let s: String = chars[start..i].iter().collect();
                push(Tok::Int(s.parse().unwrap()), &mut out);
                continue;
            }
            if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                push(Tok::Ident(chars[start..i].iter().collect()), &mut out);
                continue;
            }
            let next = chars.get(i + 1).copied();
            let (tok, len) = match (c, next) {
                (':', Some('=')) => (Tok::Assign, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('>', _) => return Err(err(ln, col, "strict guard '>' is not supported; write '>= c+1'")),
                ('<', _) => return Err(err(ln, col, "guards must be written as '<lin> >= <int>'")),
                ('.', _) => return Err(err(ln, col, "non-integer literal")),
                (';', _) => (Tok::Semi, 1),
                (',', _) => (Tok::Comma, 1),
                ('+', _) => (Tok::Plus, 1),
                ('-', _) => (Tok::Minus, 1),
                ('*', _) => (Tok::Star, 1),
                _ => return Err(err(ln, col, format!("unexpected character '{c}'"))),
            };
            push(tok, &mut out);
            i += len;
        }
    }
    let (line, col) = match out.last() {
        Some(t) => (t.line, t.col + 1),
        None => (1, 1),
    };
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vars: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (l, c) = self.here();
        Err(err(l, c, msg))
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => self.fail(format!("expected '{kw}'")),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn var_index(&self, name: &str) -> Result<usize> {
        match self.vars.iter().position(|v| v == name) {
            Some(i) => Ok(i),
            None => self.fail(format!("undeclared variable '{name}'")),
        }
    }

    /// `term (('+'|'-') term)*`, returning coefficients and constant.
    fn linear(&mut self) -> Result<(Vec<BigInt>, BigInt)> {
        let mut coeffs = vec![BigInt::zero(); self.vars.len()];
        let mut konst = BigInt::zero();
        let mut sign = BigInt::one();
        match self.peek() {
            Tok::Minus => {
                self.bump();
                sign = -sign;
            }
            Tok::Plus => {
                self.bump();
            }
            _ => {}
        }
        loop {
            self.term(&sign, &mut coeffs, &mut konst)?;
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    sign = BigInt::one();
                }
                Tok::Minus => {
                    self.bump();
                    sign = -BigInt::one();
                }
                _ => break,
            }
        }
        Ok((coeffs, konst))
    }

    fn term(&mut self, sign: &BigInt, coeffs: &mut [BigInt], konst: &mut BigInt) -> Result<()> {
        match self.bump() {
            Tok::Int(n) => {
                if *self.peek() == Tok::Star {
                    self.bump();
                    let name = match self.bump() {
                        Tok::Ident(s) => s,
                        _ => {
                            self.pos -= 1;
                            return self.fail("expected variable after '*'");
                        }
                    };
                    let i = self.var_index(&name)?;
                    coeffs[i] += sign * n;
                } else if let Tok::Ident(name) = self.peek().clone() {
                    if self.is_keyword("and") || self.is_keyword("do") {
                        *konst += sign * n;
                    } else {
                        let i = self.var_index(&name)?;
                        self.bump();
                        coeffs[i] += sign * n;
                    }
                } else {
                    *konst += sign * n;
                }
            }
            Tok::Ident(name) => {
                let i = {
                    self.pos -= 1;
                    let i = self.var_index(&name)?;
                    self.bump();
                    i
                };
                if *self.peek() == Tok::Star {
                    self.bump();
                    match self.bump() {
                        Tok::Int(n) => coeffs[i] += sign * n,
                        _ => {
                            self.pos -= 1;
                            return self.fail("expected integer after '*'");
                        }
                    }
                } else {
                    coeffs[i] += sign;
                }
            }
            _ => {
                self.pos -= 1;
                return self.fail("expected a term");
            }
        }
        Ok(())
    }
}

/// Parse the text loop format.
pub fn parse_loop(text: &str) -> Result<LoopProgram> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, vars: Vec::new() };
    p.keyword("vars")?;
    while let Tok::Ident(name) = p.peek().clone() {
        if name == "while" {
            break;
        }
        if p.vars.contains(&name) {
            return p.fail(format!("variable '{name}' declared twice"));
        }
        p.vars.push(name);
        p.bump();
        if *p.peek() == Tok::Comma {
            p.bump();
        }
    }
    if p.vars.is_empty() {
        return p.fail("expected at least one variable");
    }
    if *p.peek() == Tok::Semi {
        p.bump();
    } else {
        return p.fail("expected ';' after variable list");
    }
    p.keyword("while")?;
    let d = p.vars.len();
    let mut guard = Vec::new();
    let mut rhs = Vec::new();
    loop {
        let (lc, lk) = p.linear()?;
        if *p.peek() != Tok::Ge {
            return p.fail("expected '>='");
        }
        p.bump();
        let (rc, rk) = p.linear()?;
        guard.push(lc.iter().zip(&rc).map(|(a, b)| a - b).collect::<Vec<_>>());
        rhs.push(rk - lk);
        if p.is_keyword("and") {
            p.bump();
        } else {
            break;
        }
    }
    p.keyword("do")?;
    let mut update: Vec<Option<Vec<BigInt>>> = vec![None; d];
    let mut offset = vec![BigInt::zero(); d];
    loop {
        let name = match p.peek().clone() {
            Tok::Ident(s) => s,
            _ => return p.fail("expected assignment target"),
        };
        let i = p.var_index(&name)?;
        if update[i].is_some() {
            return p.fail(format!("variable '{name}' assigned twice"));
        }
        p.bump();
        if *p.peek() != Tok::Assign {
            return p.fail("expected ':='");
        }
        p.bump();
        let (c, k) = p.linear()?;
        update[i] = Some(c);
        offset[i] = k;
        if *p.peek() == Tok::Comma {
            p.bump();
        } else {
            break;
        }
    }
    if *p.peek() == Tok::Semi {
        p.bump();
    }
    if *p.peek() != Tok::Eof {
        return p.fail("unexpected trailing input");
    }
    let update = update
        .into_iter()
        .enumerate()
        .map(|(i, r)| r.unwrap_or_else(|| (0..d).map(|j| BigInt::from((i == j) as i64)).collect()))
        .collect();
    let vars = p.vars.clone();
    Ok(LoopProgram::new(guard, rhs, update, offset)?.with_vars(vars))
}

fn json_int(v: &Value, what: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(Error::Invalid(format!("non-integer literal in {what}")))
            }
        }
        Value::String(s) => s.parse().map_err(|_| Error::Invalid(format!("non-integer literal in {what}"))),
        _ => Err(Error::Invalid(format!("expected integer in {what}"))),
    }
}

fn json_vec(v: Option<&Value>, what: &str) -> Result<Vec<BigInt>> {
    match v {
        Some(Value::Array(xs)) => xs.iter().map(|x| json_int(x, what)).collect(),
        Some(_) => Err(Error::Invalid(format!("'{what}' must be an array"))),
        None => Err(Error::Invalid(format!("missing field '{what}'"))),
    }
}

fn json_mat(v: Option<&Value>, what: &str) -> Result<Vec<Vec<BigInt>>> {
    match v {
        Some(Value::Array(rows)) => rows.iter().map(|r| json_vec(Some(r), what)).collect(),
        Some(_) => Err(Error::Invalid(format!("'{what}' must be an array of arrays"))),
        None => Err(Error::Invalid(format!("missing field '{what}'"))),
    }
}

/// Parse the JSON machine format `{dim, B, c, A, a}`.
pub fn parse_json(text: &str) -> Result<LoopProgram> {
    let v: Value = serde_json::from_str(text).map_err(|e| err(e.line(), e.column(), e.to_string()))?;
    let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| Error::Invalid("missing field 'dim'".into()))?;
    let guard = json_mat(v.get("B"), "B")?;
    let rhs = json_vec(v.get("c"), "c")?;
    let update = json_mat(v.get("A"), "A")?;
    let offset = match v.get("a") {
        None => vec![BigInt::zero(); dim as usize],
        a => json_vec(a, "a")?,
    };
    if update.len() != dim as usize {
        return Err(Error::Dimension(format!("dim is {dim} but A has {} rows", update.len())));
    }
    let mut p = LoopProgram::new(guard, rhs, update, offset)?;
    if let Some(Value::Array(names)) = v.get("vars") {
        let names: Vec<String> = names.iter().filter_map(|n| n.as_str().map(String::from)).collect();
        p = p.with_vars(names);
    }
    Ok(p)
}

/// Parse either format, choosing JSON when the text starts with `{`.
pub fn parse_program(text: &str) -> Result<LoopProgram> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_loop(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn decrement() {
        let p = parse_loop("vars x; while x >= 0 do x := x - 1").unwrap();
        assert_eq!(p.dim, 1);
        assert_eq!(p.guard, vec![ints(&[1])]);
        assert_eq!(p.rhs, ints(&[0]));
        assert_eq!(p.update, vec![ints(&[1])]);
        assert_eq!(p.offset, ints(&[-1]));
    }

    #[test]
    fn simultaneous_assignment() {
        let p = parse_loop("vars x y; while x >= 0 do x := x - y, y := x + y").unwrap();
        assert_eq!(p.update, vec![ints(&[1, -1]), ints(&[1, 1])]);
        assert_eq!(p.offset, ints(&[0, 0]));
    }

    #[test]
    fn coefficients_constants_and_identity_rows() {
        let text = "# comment\nvars x y z;\nwhile 2*x - y + 3 >= 1 and z >= -4 # trailing\ndo x := -3*x + y*2 - 7";
        let p = parse_loop(text).unwrap();
        assert_eq!(p.guard, vec![ints(&[2, -1, 0]), ints(&[0, 0, 1])]);
        assert_eq!(p.rhs, ints(&[-2, -4]));
        assert_eq!(p.update, vec![ints(&[-3, 2, 0]), ints(&[0, 1, 0]), ints(&[0, 0, 1])]);
        assert_eq!(p.offset, ints(&[-7, 0, 0]));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_loop("vars x;\nwhile x > 0 do x := x") {
            Err(Error::Syntax { line: 2, col: 9, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_loop("vars x; while x >= 0.5 do x := x"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_loop("vars x; while y >= 0 do x := x"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_loop("vars x; while x >= 0 do x := x, x := 1"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn json_format() {
        let p = parse_program(r#"{"dim":2,"B":[[1,0]],"c":[0],"A":[[1,-1],[1,1]],"a":[0,0]}"#).unwrap();
        assert_eq!(p.update, vec![ints(&[1, -1]), ints(&[1, 1])]);
        assert!(matches!(parse_json(r#"{"dim":1,"B":[[1]],"c":[0.5],"A":[[1]]}"#), Err(Error::Invalid(_))));
        assert!(matches!(parse_json(r#"{"dim":2,"B":[[1]],"c":[0],"A":[[1]]}"#), Err(Error::Dimension(_))));
    }

    #[test]
    fn display_round_trip() {
        let p = parse_loop("vars x y; while x - 2*y >= 3 and y >= 0 do x := x - y + 1, y := 2*x").unwrap();
        let q = parse_loop(&p.to_string()).unwrap();
        assert_eq!(p, q);
    }
}
