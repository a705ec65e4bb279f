//! Tokenizer shared by the Turtle and SPARQL readers, and their common error type.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    UnexpectedToken,
    UnknownPrefix,
    UnterminatedString,
    UnterminatedIri,
    BadEscape,
    BadLocalName,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ParseErrorKind::UnexpectedToken => "unexpected token",
            ParseErrorKind::UnknownPrefix => "unknown prefix",
            ParseErrorKind::UnterminatedString => "unterminated string",
            ParseErrorKind::UnterminatedIri => "unterminated IRI",
            ParseErrorKind::BadEscape => "bad escape",
            ParseErrorKind::BadLocalName => "bad local name",
        };
        f.write_str(name)
    }
}

/// A syntax error. `line` and `column` are 1-based and count characters.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}: {detail}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
    pub detail: String,
}

impl ParseError {
    pub(crate) fn at(pos: Pos, kind: ParseErrorKind, detail: impl Into<String>) -> Self {
        ParseError {
            line: pos.line,
            column: pos.column,
            kind,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Iri(String),
    PName { prefix: String, local: String },
    BlankLabel(String),
    Word(String),
    Var(String),
    Str(String),
    Integer(String),
    /// `@prefix`; other at-keywords are rejected by the lexer.
    AtPrefix,
    Punct(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Iri(i) => write!(f, "<{i}>"),
            Tok::PName { prefix, local } => write!(f, "{prefix}:{local}"),
            Tok::BlankLabel(l) => write!(f, "_:{l}"),
            Tok::Word(w) => write!(f, "{w}"),
            Tok::Var(v) => write!(f, "?{v}"),
            Tok::Str(s) => write!(f, "\"{s}\""),
            Tok::Integer(i) => write!(f, "{i}"),
            Tok::AtPrefix => f.write_str("@prefix"),
            Tok::Punct(c) => write!(f, "'{c}'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub(crate) struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    // one extra char of lookahead beyond `chars.peek()`
    ahead: Vec<char>,
    line: usize,
    column: usize,
    peeked: Option<Result<Token, ParseError>>,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic()
}

fn is_prefix_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn is_local_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | ':' | '%')
}

impl<'a> Lexer<'a> {
    pub fn new(input: &'a str) -> Self {
        Lexer {
            chars: input.chars().peekable(),
            ahead: Vec::new(),
            line: 1,
            column: 1,
            peeked: None,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            column: self.column,
        }
    }

    fn peek_char(&mut self) -> Option<char> {
        if let Some(&c) = self.ahead.first() {
            return Some(c);
        }
        self.chars.peek().copied()
    }

    fn peek_second(&mut self) -> Option<char> {
        while self.ahead.len() < 2 {
            match self.chars.next() {
                Some(c) => self.ahead.push(c),
                None => break,
            }
        }
        self.ahead.get(1).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = if self.ahead.is_empty() {
            self.chars.next()
        } else {
            Some(self.ahead.remove(0))
        }?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    pub fn peek(&mut self) -> Result<&Token, ParseError> {
        if self.peeked.is_none() {
            let next = self.lex();
            self.peeked = Some(next);
        }
        match self.peeked.as_ref().expect("just filled") {
            Ok(t) => Ok(t),
            Err(e) => Err(e.clone()),
        }
    }

    pub fn next_token(&mut self) -> Result<Token, ParseError> {
        match self.peeked.take() {
            Some(t) => t,
            None => self.lex(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek_char() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '#' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn lex(&mut self) -> Result<Token, ParseError> {
        self.skip_trivia();
        let pos = self.pos();
        let Some(c) = self.peek_char() else {
            return Ok(Token { tok: Tok::Eof, pos });
        };
        let tok = match c {
            '<' => self.iri(pos)?,
            '"' => self.string(pos)?,
            '@' => self.at_keyword(pos)?,
            '?' | '$' => {
                self.bump();
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                if name.is_empty() {
                    return Err(ParseError::at(pos, ParseErrorKind::UnexpectedToken, "empty variable name"));
                }
                Tok::Var(name)
            }
            '_' if self.peek_second() == Some(':') => {
                self.bump();
                self.bump();
                let label = self.local_part()?;
                if label.is_empty() {
                    return Err(ParseError::at(pos, ParseErrorKind::BadLocalName, "empty blank node label"));
                }
                Tok::BlankLabel(label)
            }
            '0'..='9' => self.integer(pos)?,
            '+' | '-' if self.peek_second().is_some_and(|d| d.is_ascii_digit()) => self.integer(pos)?,
            ':' => {
                self.bump();
                let local = self.local_part()?;
                Tok::PName {
                    prefix: String::new(),
                    local,
                }
            }
            c if is_name_start(c) => self.name(pos)?,
            '.' | ';' | ',' | '[' | ']' | '{' | '}' | '(' | ')' | '*' => {
                self.bump();
                Tok::Punct(c)
            }
            other => {
                return Err(ParseError::at(
                    pos,
                    ParseErrorKind::UnexpectedToken,
                    format!("unexpected character {other:?}"),
                ))
            }
        };
        Ok(Token { tok, pos })
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut out = String::new();
        while let Some(c) = self.peek_char() {
            if !pred(c) {
                break;
            }
            out.push(c);
            self.bump();
        }
        out
    }

    fn hex_escape(&mut self, len: usize, start: Pos) -> Result<char, ParseError> {
        let mut code = 0u32;
        for _ in 0..len {
            let digit = self
                .peek_char()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| ParseError::at(start, ParseErrorKind::BadEscape, "malformed \\u escape"))?;
            self.bump();
            code = code * 16 + digit;
        }
        char::from_u32(code)
            .ok_or_else(|| ParseError::at(start, ParseErrorKind::BadEscape, "escape is not a scalar value"))
    }

    fn iri(&mut self, pos: Pos) -> Result<Tok, ParseError> {
        self.bump();
        let mut out = String::new();
        loop {
            let here = self.pos();
            match self.peek_char() {
                None | Some('\n') => {
                    return Err(ParseError::at(pos, ParseErrorKind::UnterminatedIri, "IRI not closed by '>'"))
                }
                Some('>') => {
                    self.bump();
                    return Ok(Tok::Iri(out));
                }
                Some('\\') => {
                    self.bump();
                    let c = match self.bump() {
                        Some('u') => self.hex_escape(4, here)?,
                        Some('U') => self.hex_escape(8, here)?,
                        _ => {
                            return Err(ParseError::at(here, ParseErrorKind::BadEscape, "only \\u and \\U escapes are allowed in IRIs"))
                        }
                    };
                    out.push(c);
                }
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(ParseError::at(
                        here,
                        ParseErrorKind::UnexpectedToken,
                        format!("character {c:?} not allowed in IRI"),
                    ))
                }
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    fn string(&mut self, pos: Pos) -> Result<Tok, ParseError> {
        self.bump();
        let mut out = String::new();
        loop {
            let here = self.pos();
            match self.peek_char() {
                None | Some('\n') | Some('\r') => {
                    return Err(ParseError::at(pos, ParseErrorKind::UnterminatedString, "string not closed by '\"'"))
                }
                Some('"') => {
                    self.bump();
                    return Ok(Tok::Str(out));
                }
                Some('\\') => {
                    self.bump();
                    let c = match self.bump() {
                        Some('"') => '"',
                        Some('\\') => '\\',
                        Some('n') => '\n',
                        Some('t') => '\t',
                        Some('r') => '\r',
                        other => {
                            return Err(ParseError::at(
                                here,
                                ParseErrorKind::BadEscape,
                                format!("unsupported escape {:?}", other.map(String::from).unwrap_or_default()),
                            ))
                        }
                    };
                    out.push(c);
                }
                Some(c) => {
                    out.push(c);
                    self.bump();
                }
            }
        }
    }

    fn at_keyword(&mut self, pos: Pos) -> Result<Tok, ParseError> {
        self.bump();
        let word = self.take_while(|c| c.is_ascii_alphabetic());
        if word == "prefix" {
            Ok(Tok::AtPrefix)
        } else if word.is_empty() {
            Err(ParseError::at(pos, ParseErrorKind::UnexpectedToken, "stray '@'"))
        } else {
            Err(ParseError::at(
                pos,
                ParseErrorKind::UnexpectedToken,
                format!("unsupported directive or language tag @{word}"),
            ))
        }
    }

    fn integer(&mut self, pos: Pos) -> Result<Tok, ParseError> {
        let mut out = String::new();
        if let Some(sign @ ('+' | '-')) = self.peek_char() {
            out.push(sign);
            self.bump();
        }
        out.push_str(&self.take_while(|c| c.is_ascii_digit()));
        if self.peek_char() == Some('.') && self.peek_second().is_some_and(|c| c.is_ascii_digit()) {
            return Err(ParseError::at(pos, ParseErrorKind::UnexpectedToken, "decimal literals are not supported"));
        }
        if self.peek_char().is_some_and(|c| c.is_alphabetic() || c == '_') {
            return Err(ParseError::at(pos, ParseErrorKind::UnexpectedToken, "malformed number"));
        }
        Ok(Tok::Integer(out))
    }

    /// Consumes dots only when the dot run is followed by another name character.
    fn dotted_run(&mut self, accept: fn(char) -> bool) -> String {
        let mut out = String::new();
        loop {
            match self.peek_char() {
                Some(c) if accept(c) => {
                    out.push(c);
                    self.bump();
                }
                Some('.') if !out.is_empty() && self.dot_run_continues(accept) => {
                    while self.peek_char() == Some('.') {
                        out.push('.');
                        self.bump();
                    }
                }
                _ => return out,
            }
        }
    }

    /// Whether the dots at the cursor are followed by a name character.
    fn dot_run_continues(&mut self, accept: fn(char) -> bool) -> bool {
        let mut i = 0;
        loop {
            while self.ahead.len() <= i {
                match self.chars.next() {
                    Some(c) => self.ahead.push(c),
                    None => return false,
                }
            }
            match self.ahead[i] {
                '.' => i += 1,
                c => return accept(c),
            }
        }
    }

    fn local_part(&mut self) -> Result<String, ParseError> {
        if let Some(c @ ('-' | '.')) = self.peek_char() {
            let here = self.pos();
            if c == '-' || self.peek_second().is_some_and(is_local_char) {
                return Err(ParseError::at(here, ParseErrorKind::BadLocalName, format!("local name cannot start with {c:?}")));
            }
        }
        let start = self.pos();
        let local = self.dotted_run(is_local_char);
        if self.peek_char() == Some('\\') {
            return Err(ParseError::at(self.pos(), ParseErrorKind::BadLocalName, "escapes in local names are not supported"));
        }
        for (i, c) in local.char_indices() {
            if c == '%' {
                let ok = local[i + 1..].chars().take(2).filter(|h| h.is_ascii_hexdigit()).count() == 2;
                if !ok {
                    let column = start.column + local[..i].chars().count();
                    return Err(ParseError::at(
                        Pos { line: start.line, column },
                        ParseErrorKind::BadLocalName,
                        "'%' must be followed by two hex digits",
                    ));
                }
            }
        }
        Ok(local)
    }

    fn name(&mut self, pos: Pos) -> Result<Tok, ParseError> {
        let head = self.dotted_run(is_prefix_char);
        if self.peek_char() == Some(':') {
            self.bump();
            let local = self.local_part()?;
            return Ok(Tok::PName { prefix: head, local });
        }
        if head.contains(['.', '-']) {
            return Err(ParseError::at(pos, ParseErrorKind::UnexpectedToken, format!("unexpected word {head:?}")));
        }
        Ok(Tok::Word(head))
    }
}
