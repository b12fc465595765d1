use super::ParseDiagnostic;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String),
    /// A run of operator characters naming an infix relation, e.g. `<`.
    Op(String),
    Eq,
    Arrow,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Amp,
    Pipe,
    Bang,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(s) => format!("`{s}`"),
            Tok::Eq => "`=`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

/// 1-based source position.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Pos {
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
    /// Position just past the last character.
    pub end: Pos,
    /// Byte range in the source.
    pub span: (usize, usize),
}

const OP_CHARS: &str = "<>=~+*/^%-";

fn ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Splits `src` into tokens; `#` starts a comment running to end of line.
pub fn lex(src: &str) -> Result<Vec<Token>, Vec<ParseDiagnostic>> {
    let mut out = Vec::new();
    let mut errors = Vec::new();
    let chars: Vec<(usize, char)> = src.char_indices().collect();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let (off, c) = chars[i];
        let start = Pos { line, column: col };
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i].1 != '\n' {
                i += 1;
            }
            continue;
        }
        let mut j = i + 1;
        let tok = if ident_char(c) {
            while j < chars.len() && ident_char(chars[j].1) {
                j += 1;
            }
            Tok::Ident(chars[i..j].iter().map(|(_, c)| c).collect())
        } else if OP_CHARS.contains(c) {
            while j < chars.len() && OP_CHARS.contains(chars[j].1) {
                j += 1;
            }
            let s: String = chars[i..j].iter().map(|(_, c)| c).collect();
            match s.as_str() {
                "->" => Tok::Arrow,
                "=" => Tok::Eq,
                _ => Tok::Op(s),
            }
        } else {
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '&' => Tok::Amp,
                '|' => Tok::Pipe,
                '!' => Tok::Bang,
                other => {
                    errors.push(ParseDiagnostic::error(
                        start,
                        format!("unexpected character `{other}`"),
                    ));
                    col += 1;
                    i += 1;
                    continue;
                }
            }
        };
        col += j - i;
        let end_off = chars.get(j).map_or(src.len(), |(o, _)| *o);
        out.push(Token {
            tok,
            pos: start,
            end: Pos { line, column: col },
            span: (off, end_off),
        });
        i = j;
    }
    let eof = Pos { line, column: col };
    out.push(Token {
        tok: Tok::Eof,
        pos: eof,
        end: eof,
        span: (src.len(), src.len()),
    });
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators_and_positions() {
        let t = lex("forall x: x<y -> E(x,y) # c\n!a").unwrap();
        let toks: Vec<&Tok> = t.iter().map(|t| &t.tok).collect();
        assert_eq!(toks[3], &Tok::Ident("x".into()));
        assert_eq!(toks[4], &Tok::Op("<".into()));
        assert_eq!(toks[6], &Tok::Arrow);
        let bang = t.iter().find(|t| t.tok == Tok::Bang).unwrap();
        assert_eq!(bang.pos, Pos { line: 2, column: 1 });
    }

    #[test]
    fn bad_character_reported() {
        let e = lex("a $ b").unwrap_err();
        assert_eq!(e[0].column, 3);
    }
}
