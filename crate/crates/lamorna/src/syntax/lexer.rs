//! Hand-rolled lexer with line/column positions for diagnostics.

use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String),
    Int(i64),
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Semi,
    Eq,
    Arrow,     // ->
    DArrow,    // =>  (accepted as branch arrow too)
    Bar,
    Star,
    Plus,
    Minus,
    Slash,
    Lt,
    Underscore,
    At(String), // @requires etc
    Hash(u32),  // identifier tag suffix
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Int(i) => write!(f, "{i}"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::Comma => write!(f, ","),
            Tok::Dot => write!(f, "."),
            Tok::Colon => write!(f, ":"),
            Tok::Semi => write!(f, ";"),
            Tok::Eq => write!(f, "="),
            Tok::Arrow => write!(f, "->"),
            Tok::DArrow => write!(f, "=>"),
            Tok::Bar => write!(f, "|"),
            Tok::Star => write!(f, "*"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Slash => write!(f, "/"),
            Tok::Lt => write!(f, "<"),
            Tok::Underscore => write!(f, "_"),
            Tok::At(s) => write!(f, "@{s}"),
            Tok::Hash(n) => write!(f, "#{n}"),
            Tok::Eof => write!(f, "<eof>"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Lexeme {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

pub fn lex(src: &str) -> Result<Vec<Lexeme>, LexError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0usize;

    macro_rules! push {
        ($tok:expr) => {
            out.push(Lexeme { tok: $tok, pos: Pos { line, col } })
        };
    }

    while i < bytes.len() {
        let c = bytes[i];
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
            }
            c if c.is_whitespace() => {
                col += 1;
                i += 1;
            }
            '-' if i + 1 < bytes.len() && bytes[i + 1] == '-' => {
                // line comment
                while i < bytes.len() && bytes[i] != '\n' {
                    i += 1;
                }
            }
            '-' if i + 1 < bytes.len() && bytes[i + 1] == '>' => {
                push!(Tok::Arrow);
                i += 2;
                col += 2;
            }
            '=' if i + 1 < bytes.len() && bytes[i + 1] == '>' => {
                push!(Tok::DArrow);
                i += 2;
                col += 2;
            }
            '(' => {
                push!(Tok::LParen);
                i += 1;
                col += 1;
            }
            ')' => {
                push!(Tok::RParen);
                i += 1;
                col += 1;
            }
            '{' => {
                push!(Tok::LBrace);
                i += 1;
                col += 1;
            }
            '}' => {
                push!(Tok::RBrace);
                i += 1;
                col += 1;
            }
            '[' => {
                push!(Tok::LBracket);
                i += 1;
                col += 1;
            }
            ']' => {
                push!(Tok::RBracket);
                i += 1;
                col += 1;
            }
            ',' => {
                push!(Tok::Comma);
                i += 1;
                col += 1;
            }
            '.' => {
                push!(Tok::Dot);
                i += 1;
                col += 1;
            }
            ':' => {
                push!(Tok::Colon);
                i += 1;
                col += 1;
            }
            ';' => {
                push!(Tok::Semi);
                i += 1;
                col += 1;
            }
            '=' => {
                push!(Tok::Eq);
                i += 1;
                col += 1;
            }
            '|' => {
                push!(Tok::Bar);
                i += 1;
                col += 1;
            }
            '*' => {
                push!(Tok::Star);
                i += 1;
                col += 1;
            }
            '+' => {
                push!(Tok::Plus);
                i += 1;
                col += 1;
            }
            '-' => {
                push!(Tok::Minus);
                i += 1;
                col += 1;
            }
            '/' => {
                push!(Tok::Slash);
                i += 1;
                col += 1;
            }
            '<' => {
                push!(Tok::Lt);
                i += 1;
                col += 1;
            }
            '_' => {
                push!(Tok::Underscore);
                i += 1;
                col += 1;
            }
            '@' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && (bytes[j].is_alphanumeric() || bytes[j] == '_') {
                    j += 1;
                }
                let word: String = bytes[start..j].iter().collect();
                push!(Tok::At(word));
                col += (j - i) as u32;
                i = j;
            }
            '#' => {
                let start = i + 1;
                let mut j = start;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j == start {
                    return Err(LexError {
                        pos: Pos { line, col },
                        message: "expected digits after '#'".into(),
                    });
                }
                let n: u32 = bytes[start..j].iter().collect::<String>().parse().map_err(|_| {
                    LexError { pos: Pos { line, col }, message: "tag out of range".into() }
                })?;
                push!(Tok::Hash(n));
                col += (j - i) as u32;
                i = j;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let n: i64 = bytes[start..j].iter().collect::<String>().parse().map_err(|_| {
                    LexError { pos: Pos { line, col }, message: "integer out of range".into() }
                })?;
                push!(Tok::Int(n));
                col += (j - i) as u32;
                i = j;
            }
            c if c.is_alphabetic() || c == '%' => {
                let start = i;
                let mut j = i;
                while j < bytes.len()
                    && (bytes[j].is_alphanumeric() || bytes[j] == '_' || bytes[j] == '\'' || bytes[j] == '%')
                {
                    j += 1;
                }
                let word: String = bytes[start..j].iter().collect();
                push!(Tok::Ident(word));
                col += (j - i) as u32;
                i = j;
            }
            other => {
                return Err(LexError {
                    pos: Pos { line, col },
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    out.push(Lexeme { tok: Tok::Eof, pos: Pos { line, col } });
    Ok(out)
}
