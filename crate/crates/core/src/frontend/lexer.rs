//! Tokenizer for the analyzed source subset. Comments and literal contents
//! are dropped; only their positions survive.

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Number,
    Str,
    Char,
    Punct(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
}

impl Token {
    pub fn is(&self, p: &str) -> bool {
        matches!(&self.kind, TokenKind::Punct(q) if *q == p)
    }

    pub fn ident(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Ident(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_word(&self, w: &str) -> bool {
        self.ident() == Some(w)
    }

    pub fn text(&self) -> &str {
        match &self.kind {
            TokenKind::Ident(s) => s,
            TokenKind::Number => "0",
            TokenKind::Str => "\"\"",
            TokenKind::Char => "' '",
            TokenKind::Punct(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

// Longest first.
const PUNCTS: &[&str] = &[
    "...", "->", "::", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", "{", "}", "(", ")", "[", "]", ";", ",", ".", "@", "=", "<", ">", "!",
    "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek(i) == Some(c))
    }

    fn error(&self, line: usize, column: usize, message: impl Into<String>) -> LexError {
        LexError {
            line,
            column,
            message: message.into(),
        }
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '$'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        chars: src.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek(0) {
        let (line, column) = (cur.line, cur.column);
        if c.is_whitespace() {
            cur.bump();
        } else if cur.starts_with("//") {
            while cur.peek(0).is_some_and(|c| c != '\n') {
                cur.bump();
            }
        } else if cur.starts_with("/*") {
            cur.bump();
            cur.bump();
            loop {
                if cur.starts_with("*/") {
                    cur.bump();
                    cur.bump();
                    break;
                }
                if cur.bump().is_none() {
                    return Err(cur.error(line, column, "unterminated block comment"));
                }
            }
        } else if cur.starts_with("\"\"\"") {
            for _ in 0..3 {
                cur.bump();
            }
            loop {
                if cur.starts_with("\\") {
                    cur.bump();
                    cur.bump();
                    continue;
                }
                if cur.starts_with("\"\"\"") {
                    for _ in 0..3 {
                        cur.bump();
                    }
                    break;
                }
                if cur.bump().is_none() {
                    return Err(cur.error(line, column, "unterminated text block"));
                }
            }
            out.push(Token { kind: TokenKind::Str, line, column });
        } else if c == '"' || c == '\'' {
            cur.bump();
            loop {
                match cur.bump() {
                    Some('\\') => {
                        cur.bump();
                    }
                    Some(q) if q == c => break,
                    Some('\n') | None => {
                        return Err(cur.error(line, column, "unterminated literal"));
                    }
                    Some(_) => {}
                }
            }
            let kind = if c == '"' { TokenKind::Str } else { TokenKind::Char };
            out.push(Token { kind, line, column });
        } else if c.is_ascii_digit() || (c == '.' && cur.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            let mut literal = String::new();
            while let Some(d) = cur.peek(0) {
                let hex = literal.starts_with("0x") || literal.starts_with("0X");
                let exponent_sign =
                    (d == '+' || d == '-') && !hex && literal.ends_with(['e', 'E']);
                if d.is_alphanumeric() || d == '_' || d == '.' || exponent_sign {
                    literal.push(d);
                    cur.bump();
                } else {
                    break;
                }
            }
            out.push(Token { kind: TokenKind::Number, line, column });
        } else if is_ident_start(c) {
            let mut word = String::new();
            while let Some(d) = cur.peek(0).filter(|d| is_ident_continue(*d)) {
                word.push(d);
                cur.bump();
            }
            out.push(Token { kind: TokenKind::Ident(word), line, column });
        } else if let Some(p) = PUNCTS.iter().find(|p| cur.starts_with(p)) {
            for _ in 0..p.chars().count() {
                cur.bump();
            }
            out.push(Token { kind: TokenKind::Punct(p), line, column });
        } else {
            return Err(cur.error(line, column, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}
