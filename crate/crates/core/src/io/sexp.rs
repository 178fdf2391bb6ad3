use super::{ParseError, ParseErrorKind, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Sexp {
    Atom { text: String, pos: Pos },
    List { items: Vec<Sexp>, pos: Pos },
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom { pos, .. } | Sexp::List { pos, .. } => *pos,
        }
    }

    pub fn atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            Sexp::List { .. } => None,
        }
    }

    pub fn list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List { items, .. } => Some(items),
            Sexp::Atom { .. } => None,
        }
    }
}

/// Splits a document into top-level S-expressions. `;` starts a comment that
/// runs to the end of the line.
pub(crate) fn read_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut reader = Reader {
        chars: text.chars().peekable(),
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(s) = reader.next_sexp()? {
        out.push(s);
    }
    Ok(out)
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    col: usize,
}

impl Reader<'_> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    /// Reads one expression; `Ok(None)` at end of input.
    fn next_sexp(&mut self) -> Result<Option<Sexp>, ParseError> {
        self.skip_trivia();
        let pos = self.pos();
        match self.chars.peek().copied() {
            None => Ok(None),
            Some(')') => Err(ParseError::new(
                pos,
                ParseErrorKind::Syntax("unexpected `)`".into()),
            )),
            Some('(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.chars.peek() {
                        None => {
                            return Err(ParseError::new(
                                pos,
                                ParseErrorKind::Syntax("unclosed `(`".into()),
                            ))
                        }
                        Some(')') => {
                            self.bump();
                            return Ok(Some(Sexp::List { items, pos }));
                        }
                        Some(_) => items.push(self.next_sexp()?.expect("input not exhausted")),
                    }
                }
            }
            Some(_) => {
                let mut text = String::new();
                while let Some(&c) = self.chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    text.push(c);
                    self.bump();
                }
                check_atom(&text, pos)?;
                Ok(Some(Sexp::Atom { text, pos }))
            }
        }
    }
}

fn check_atom(text: &str, pos: Pos) -> Result<(), ParseError> {
    let ok = matches!(text, "=" | "=>" | "<=>")
        || is_int(text)
        || is_ident(text)
        || split_domlit(text).is_some();
    if ok {
        Ok(())
    } else {
        Err(ParseError::new(pos, ParseErrorKind::Lex(text.to_string())))
    }
}

pub(crate) fn is_ident(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

pub(crate) fn is_int(text: &str) -> bool {
    !text.is_empty() && text.bytes().all(|b| b.is_ascii_digit())
}

/// `Name!k` split into its sort name and one-based index text.
pub(crate) fn split_domlit(text: &str) -> Option<(&str, &str)> {
    let (name, k) = text.split_once('!')?;
    (is_ident(name) && is_int(k)).then_some((name, k))
}
