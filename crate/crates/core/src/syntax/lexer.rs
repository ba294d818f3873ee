use super::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Lowercase-initial name; primes allowed (`load'`).
    Ident(String),
    /// Uppercase- or underscore-initial name other than `_`.
    Var(String),
    Wild,
    Int(i64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Semi,
    Dot,
    Backslash,
    Eq,
    Imp,
    LImp,
    Bang,
    Cons,
    Neck,
    Define,
    Colon,
    Pair,
    Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

pub fn lex(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| SyntaxError::Syntax { line, col, msg };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let rest = &chars[i..];
        let starts = |s: &str| s.chars().enumerate().all(|(k, ch)| rest.get(k) == Some(&ch));
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if word == "_" {
                Tok::Wild
            } else if c.is_ascii_uppercase() || c == '_' {
                Tok::Var(word)
            } else {
                Tok::Ident(word)
            }
        } else if c.is_ascii_digit() || (c == '-' && rest.get(1).is_some_and(|d| d.is_ascii_digit())) {
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text
                .parse::<i64>()
                .map_err(|_| err(line, col, format!("integer literal out of range: {text}")))?;
            Tok::Int(n)
        } else {
            let (tok, len) = if starts(":-") {
                (Tok::Neck, 2)
            } else if starts(":=") {
                (Tok::Define, 2)
            } else if starts("::") {
                (Tok::Cons, 2)
            } else if starts("=>") {
                (Tok::Imp, 2)
            } else if starts("-o") && !rest.get(2).is_some_and(|ch| ch.is_alphanumeric() || *ch == '_') {
                (Tok::LImp, 2)
            } else if starts("<c>") {
                (Tok::Pair, 3)
            } else {
                let t = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    ',' => Tok::Comma,
                    ';' => Tok::Semi,
                    '.' => Tok::Dot,
                    '\\' => Tok::Backslash,
                    '=' => Tok::Eq,
                    '!' => Tok::Bang,
                    ':' => Tok::Colon,
                    '-' => Tok::Minus,
                    other => return Err(err(line, col, format!("unexpected character {other:?}"))),
                };
                (t, 1)
            };
            i += len;
            tok
        };
        col += i - start;
        out.push(Token { tok, pos });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_clause_punctuation() {
        assert_eq!(
            toks("p X :- q, r ; X = s z. % comment"),
            vec![
                Tok::Ident("p".into()),
                Tok::Var("X".into()),
                Tok::Neck,
                Tok::Ident("q".into()),
                Tok::Comma,
                Tok::Ident("r".into()),
                Tok::Semi,
                Tok::Var("X".into()),
                Tok::Eq,
                Tok::Ident("s".into()),
                Tok::Ident("z".into()),
                Tok::Dot,
            ]
        );
    }

    #[test]
    fn lexes_connectives_and_literals() {
        assert_eq!(
            toks("load' X -o ! a => (- 1) -2 x\\ _ _Y <c> :: :="),
            vec![
                Tok::Ident("load'".into()),
                Tok::Var("X".into()),
                Tok::LImp,
                Tok::Bang,
                Tok::Ident("a".into()),
                Tok::Imp,
                Tok::LParen,
                Tok::Minus,
                Tok::Int(1),
                Tok::RParen,
                Tok::Int(-2),
                Tok::Ident("x".into()),
                Tok::Backslash,
                Tok::Wild,
                Tok::Var("_Y".into()),
                Tok::Pair,
                Tok::Cons,
                Tok::Define,
            ]
        );
    }

    #[test]
    fn reports_position_of_bad_character() {
        match lex("p.\n  q & r.") {
            Err(SyntaxError::Syntax { line, col, .. }) => assert_eq!((line, col), (2, 5)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
