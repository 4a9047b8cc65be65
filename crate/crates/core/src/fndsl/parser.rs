use super::lexer::{tokenize, Tok, Token};
use super::{BinOp, Case, Cmp, CmpOp, Conn, Expr, Guard, MapSpec, ParseError, Span};

const RESERVED: &[&str] = &["when", "and", "or", "div", "mod", "k", "i", "pow2", "blog"];

const EXPR_START: &[&str] = &["integer", "'k'", "'i'", "'pow2'", "'blog'", "'('"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, message: impl Into<String>, expected: &[&str]) -> ParseError {
        let t = self.peek();
        ParseError {
            file: None,
            line: t.line,
            column: t.col,
            message: message.into(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(x) if x == w)
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.advance())
        } else {
            let want = tok.describe();
            Err(self.error_here(
                format!("expected {want}, found {}", self.peek().tok.describe()),
                &[&want],
            ))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<Token, ParseError> {
        if self.is_word(w) {
            Ok(self.advance())
        } else {
            let want = format!("'{w}'");
            Err(self.error_here(
                format!("expected {want}, found {}", self.peek().tok.describe()),
                &[&want],
            ))
        }
    }

    fn spec(&mut self) -> Result<(Vec<Case>, Vec<Span>), ParseError> {
        let mut cases = Vec::new();
        let mut spans = Vec::new();
        while self.peek().tok != Tok::Eof {
            let start = self.expect_word("when")?;
            let guard = self.guard()?;
            self.expect(Tok::Arrow)?;
            let body = self.expr()?;
            let end = self.expect(Tok::Semi)?;
            cases.push(Case { guard, body });
            spans.push(Span {
                start_line: start.line,
                end_line: end.line,
            });
        }
        if cases.is_empty() {
            return Err(self.error_here("empty spec: at least one case is required", &["'when'"]));
        }
        Ok((cases, spans))
    }

    fn guard(&mut self) -> Result<Guard, ParseError> {
        let first = self.cmp()?;
        let mut rest = Vec::new();
        loop {
            let conn = if self.is_word("and") {
                Conn::And
            } else if self.is_word("or") {
                Conn::Or
            } else {
                break;
            };
            self.advance();
            rest.push((conn, self.cmp()?));
        }
        Ok(Guard { first, rest })
    }

    fn cmp(&mut self) -> Result<Cmp, ParseError> {
        let lhs = self.expr()?;
        let op = match self.peek().tok {
            Tok::Lt => CmpOp::Lt,
            Tok::Le => CmpOp::Le,
            Tok::EqEq => CmpOp::Eq,
            Tok::Ge => CmpOp::Ge,
            Tok::Gt => CmpOp::Gt,
            _ => {
                return Err(self.error_here(
                    format!("expected a comparison, found {}", self.peek().tok.describe()),
                    &["'<'", "'<='", "'=='", "'>='", "'>'"],
                ))
            }
        };
        self.advance();
        let rhs = self.expr()?;
        Ok(Cmp { op, lhs, rhs })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().tok {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.atom()?;
        loop {
            let op = if self.peek().tok == Tok::Star {
                BinOp::Mul
            } else if self.is_word("div") {
                BinOp::Div
            } else if self.is_word("mod") {
                BinOp::Mod
            } else {
                return Ok(lhs);
            };
            self.advance();
            let rhs = self.atom()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn call_arg(&mut self) -> Result<Expr, ParseError> {
        self.expect(Tok::LParen)?;
        let e = self.expr()?;
        self.expect(Tok::RParen)?;
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                self.advance();
                Ok(Expr::Lit(n))
            }
            Tok::LParen => {
                self.advance();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Word(w) => match w.as_str() {
                "k" => {
                    self.advance();
                    Ok(Expr::K)
                }
                "i" => {
                    self.advance();
                    Ok(Expr::BlockIndex)
                }
                "pow2" => {
                    self.advance();
                    Ok(Expr::Pow2(Box::new(self.call_arg()?)))
                }
                "blog" => {
                    self.advance();
                    Ok(Expr::Blog(Box::new(self.call_arg()?)))
                }
                w if RESERVED.contains(&w) => Err(self.error_here(
                    format!("reserved word '{w}' cannot start an expression"),
                    EXPR_START,
                )),
                w => Err(self.error_here(format!("unknown identifier '{w}'"), EXPR_START)),
            },
            other => Err(self.error_here(
                format!("expected an expression, found {}", other.describe()),
                EXPR_START,
            )),
        }
    }
}

pub(crate) fn parse_source(src: &str) -> Result<MapSpec, ParseError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, pos: 0 };
    let (cases, spans) = p.spec()?;
    Ok(MapSpec {
        cases,
        spans,
        source: src.to_string(),
        origin: None,
    })
}
