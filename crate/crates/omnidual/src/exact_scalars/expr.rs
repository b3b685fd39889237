//! Text and JSON-tree forms of rational functions over named coordinates.

use serde::{Deserialize, Serialize};

use super::{PolyFn, Scalar, ScalarError, Vars};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(num_bigint::BigInt),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, ScalarError> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().unwrap()));
        } else if c.is_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_' || cs[i] == '\'') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(ScalarError::Parse(format!(
                "unexpected character '{c}' in \"{s}\""
            )));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    vars: &'a Vars,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> ScalarError {
        ScalarError::Parse(format!("{what} in \"{}\"", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<PolyFn, ScalarError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add_ref(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub_ref(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<PolyFn, ScalarError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul_ref(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                acc = acc.div_ref(&d)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<PolyFn, ScalarError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg_ref());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<PolyFn, ScalarError> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    let e: u32 = n.try_into().map_err(|_| self.err("exponent too large"))?;
                    Ok(base.pow(e))
                }
                _ => Err(self.err("expected a nonnegative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<PolyFn, ScalarError> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(PolyFn::constant(Scalar::from(n)))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = self.vars.index_of(&name)?;
                Ok(PolyFn::var(i))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("missing ')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("unexpected end of expression")),
        }
    }
}

pub fn parse(src: &str, vars: &Vars) -> Result<PolyFn, ScalarError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(ScalarError::Parse("empty expression".into()));
    }
    let mut p = Parser {
        toks,
        pos: 0,
        vars,
        src,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

/// JSON form of an expression: a string in the infix syntax, an integer,
/// or a tree `{"op": "+", "args": [...]}`, `{"var": "x"}`, `{"const": "1/2"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExprJson {
    Text(String),
    Int(i64),
    Var {
        var: String,
    },
    Const {
        #[serde(rename = "const")]
        value: Scalar,
    },
    Node {
        op: String,
        args: Vec<ExprJson>,
    },
}

impl ExprJson {
    pub fn to_polyfn(&self, vars: &Vars) -> Result<PolyFn, ScalarError> {
        match self {
            ExprJson::Text(s) => parse(s, vars),
            ExprJson::Int(n) => Ok(PolyFn::int(*n)),
            ExprJson::Var { var } => Ok(PolyFn::var(vars.index_of(var)?)),
            ExprJson::Const { value } => Ok(PolyFn::constant(value.clone())),
            ExprJson::Node { op, args } => {
                let vals = args
                    .iter()
                    .map(|a| a.to_polyfn(vars))
                    .collect::<Result<Vec<_>, _>>()?;
                let bad = |m: &str| ScalarError::Parse(format!("operator '{op}': {m}"));
                match op.as_str() {
                    "+" | "add" => Ok(vals.iter().fold(PolyFn::zero(), |a, b| a.add_ref(b))),
                    "*" | "mul" => Ok(vals.iter().fold(PolyFn::one(), |a, b| a.mul_ref(b))),
                    "-" | "sub" => match vals.as_slice() {
                        [a] => Ok(a.neg_ref()),
                        [a, b] => Ok(a.sub_ref(b)),
                        _ => Err(bad("expects one or two arguments")),
                    },
                    "neg" => match vals.as_slice() {
                        [a] => Ok(a.neg_ref()),
                        _ => Err(bad("expects one argument")),
                    },
                    "/" | "div" => match vals.as_slice() {
                        [a, b] => a.div_ref(b),
                        _ => Err(bad("expects two arguments")),
                    },
                    "^" | "pow" => match (vals.as_slice(), args.get(1)) {
                        ([a, _], Some(ExprJson::Int(e))) if *e >= 0 => Ok(a.pow(*e as u32)),
                        _ => Err(bad("expects a base and a nonnegative integer exponent")),
                    },
                    _ => Err(bad("unknown operator")),
                }
            }
        }
    }

    pub fn from_polyfn(f: &PolyFn, vars: &Vars) -> Self {
        ExprJson::Text(f.display_with(vars.names()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Vars {
        Vars::new(["x", "y"]).unwrap()
    }

    #[test]
    fn parse_and_print() {
        let v = vars();
        let f = parse("(x + y)/(x - y)", &v).unwrap();
        assert_eq!(f.display_with(v.names()), "(x + y)/(x - y)");
        let g = parse("-2*y/(x-y)^2", &v).unwrap();
        assert_eq!(parse(&g.display_with(v.names()), &v).unwrap(), g);
        assert!(parse("x + z", &v).is_err());
        assert!(parse("x +", &v).is_err());
    }

    #[test]
    fn tree_form() {
        let v = vars();
        let t: ExprJson = serde_json::from_str(
            r#"{"op":"/","args":[{"op":"+","args":[{"var":"x"},"y"]},{"const":"1/2"}]}"#,
        )
        .unwrap();
        assert_eq!(t.to_polyfn(&v).unwrap(), parse("2*x + 2*y", &v).unwrap());
        let p: ExprJson = serde_json::from_str(r#"{"op":"^","args":["x",3]}"#).unwrap();
        assert_eq!(p.to_polyfn(&v).unwrap(), parse("x^3", &v).unwrap());
    }
}
