use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Int(u64),
    Word(String),
    Arrow,
    Semi,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Lt,
    Le,
    EqEq,
    Ge,
    Gt,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("integer {n}"),
            Tok::Word(w) => format!("'{w}'"),
            Tok::Arrow => "'->'".into(),
            Tok::Semi => "';'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Lt => "'<'".into(),
            Tok::Le => "'<='".into(),
            Tok::EqEq => "'=='".into(),
            Tok::Ge => "'>='".into(),
            Tok::Gt => "'>'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut pos, mut line, mut col) = (0usize, 1usize, 1usize);

    while pos < chars.len() {
        let c = chars[pos];
        let (tl, tc) = (line, col);
        let err = |message: String| ParseError {
            file: None,
            line: tl,
            column: tc,
            message,
            expected: Vec::new(),
        };

        if c == '\n' {
            pos += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            pos += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while pos < chars.len() && chars[pos] != '\n' {
                pos += 1;
            }
            continue;
        }

        let mut len = 1;
        let tok = if c.is_ascii_digit() {
            while pos + len < chars.len() && chars[pos + len].is_ascii_digit() {
                len += 1;
            }
            let digits: String = chars[pos..pos + len].iter().collect();
            Tok::Int(
                digits
                    .parse()
                    .map_err(|_| err(format!("integer literal {digits} does not fit in 64 bits")))?,
            )
        } else if c.is_ascii_alphabetic() || c == '_' {
            while pos + len < chars.len()
                && (chars[pos + len].is_ascii_alphanumeric() || chars[pos + len] == '_')
            {
                len += 1;
            }
            Tok::Word(chars[pos..pos + len].iter().collect())
        } else {
            let next = chars.get(pos + 1).copied();
            let (tok, width) = match (c, next) {
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('<', Some('=')) => (Tok::Le, 2),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('=', Some('=')) => (Tok::EqEq, 2),
                ('-', _) => (Tok::Minus, 1),
                ('<', _) => (Tok::Lt, 1),
                ('>', _) => (Tok::Gt, 1),
                ('+', _) => (Tok::Plus, 1),
                ('*', _) => (Tok::Star, 1),
                (';', _) => (Tok::Semi, 1),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('=', _) => return Err(err("single '=' is not an operator; use '=='".into())),
                _ => return Err(err(format!("unexpected character {c:?}"))),
            };
            len = width;
            tok
        };
        out.push(Token {
            tok,
            line: tl,
            col: tc,
        });
        pos += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
