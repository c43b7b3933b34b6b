use crate::error::{Error, Result};

use super::{Alphabet, Letter, Word};

/// Generators with inverses plus defining relators.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub alphabet: Alphabet,
    pub relators: Vec<Word>,
}

/// Parses a presentation description.
///
/// Statements are separated by newlines or `;`, `#` starts a comment:
///
/// ```text
/// gens a,b,c; rel a3,b3,c4,abc
/// gen a
/// inv a A          # or: inv a:A,b:B
/// rel (none)
/// ```
///
/// A generator without an `inv` declaration gets the case-swapped symbol as
/// its inverse.
pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut builder = PresentationBuilder::default();
    for stmt in statements(text) {
        if !builder.accept(&stmt)? {
            return Err(Error::parse(
                stmt.line,
                format!("unexpected keyword `{}` in presentation", stmt.keyword),
            ));
        }
    }
    builder.finish()
}

#[derive(Debug, Clone)]
pub(crate) struct Statement {
    pub line: usize,
    pub keyword: String,
    pub args: String,
}

/// Splits text into keyword statements, dropping comments and blank items.
pub(crate) fn statements(text: &str) -> Vec<Statement> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for item in line.split(';') {
            let item = item.trim();
            if item.is_empty() {
                continue;
            }
            let (keyword, args) = match item.split_once(char::is_whitespace) {
                Some((k, rest)) => (k, rest.trim()),
                None => (item, ""),
            };
            out.push(Statement {
                line: i + 1,
                keyword: keyword.to_string(),
                args: args.to_string(),
            });
        }
    }
    out
}

fn list_items(args: &str) -> impl Iterator<Item = &str> {
    args.split(|c: char| c == ',' || c.is_whitespace())
        .map(str::trim)
        .filter(|s| !s.is_empty())
}

fn single_char(token: &str, line: usize) -> Result<char> {
    let mut chars = token.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if !c.is_ascii_digit() && !matches!(c, '-' | ':' | '(' | ')') => Ok(c),
        _ => Err(Error::parse(
            line,
            format!("letters are single non-digit symbols, got `{token}`"),
        )),
    }
}

#[derive(Default)]
pub(crate) struct PresentationBuilder {
    gens: Vec<char>,
    inverse_decls: Vec<(char, char, usize)>,
    relators: Vec<(String, usize)>,
}

impl PresentationBuilder {
    /// Consumes `gen`, `gens`, `inv`, `rel`, `rels`; returns false for any
    /// other keyword.
    pub fn accept(&mut self, stmt: &Statement) -> Result<bool> {
        match stmt.keyword.as_str() {
            "gen" | "gens" => {
                for tok in list_items(&stmt.args) {
                    let c = single_char(tok, stmt.line)?;
                    if self.gens.contains(&c) {
                        return Err(Error::parse(stmt.line, format!("generator `{c}` repeated")));
                    }
                    self.gens.push(c);
                }
            }
            "inv" => {
                let args = stmt.args.trim();
                if args.contains(':') {
                    for pair in args.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        let (x, y) = pair.split_once(':').ok_or_else(|| {
                            Error::parse(stmt.line, format!("expected `x:y`, got `{pair}`"))
                        })?;
                        let x = single_char(x.trim(), stmt.line)?;
                        let y = single_char(y.trim(), stmt.line)?;
                        self.inverse_decls.push((x, y, stmt.line));
                    }
                } else {
                    let toks: Vec<&str> = list_items(args).collect();
                    if toks.len() != 2 {
                        return Err(Error::parse(stmt.line, "expected `inv <letter> <letter>`"));
                    }
                    let x = single_char(toks[0], stmt.line)?;
                    let y = single_char(toks[1], stmt.line)?;
                    self.inverse_decls.push((x, y, stmt.line));
                }
            }
            "rel" | "rels" => {
                let args = stmt.args.trim();
                if args != "(none)" && args != "none" {
                    for tok in list_items(args) {
                        self.relators.push((tok.to_string(), stmt.line));
                    }
                }
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn finish(self) -> Result<Presentation> {
        if self.gens.is_empty() {
            return Err(Error::Presentation("no generators declared".into()));
        }
        let mut symbols = self.gens.clone();
        for &(x, y, line) in &self.inverse_decls {
            if !symbols.contains(&x) {
                return Err(Error::parse(
                    line,
                    format!("inverse declared for undeclared letter `{x}`"),
                ));
            }
            if !symbols.contains(&y) {
                symbols.push(y);
            }
        }
        // Explicit declarations first, then the reverse direction, then case swap.
        let mut inv: Vec<Option<char>> = vec![None; symbols.len()];
        let pos = |symbols: &[char], c: char| symbols.iter().position(|&s| s == c);
        for &(x, y, line) in &self.inverse_decls {
            let i = pos(&symbols, x).unwrap();
            if inv[i].is_some_and(|prev| prev != y) {
                return Err(Error::parse(line, format!("conflicting inverses for `{x}`")));
            }
            inv[i] = Some(y);
        }
        for &(x, y, _) in &self.inverse_decls {
            let j = pos(&symbols, y).unwrap();
            if inv[j].is_none() {
                inv[j] = Some(x);
            }
        }
        let mut i = 0;
        while i < symbols.len() {
            if inv[i].is_none() {
                let c = symbols[i];
                let swapped = if c.is_ascii_lowercase() {
                    c.to_ascii_uppercase()
                } else {
                    c.to_ascii_lowercase()
                };
                if swapped == c {
                    return Err(Error::Presentation(format!("no inverse for letter `{c}`")));
                }
                inv[i] = Some(swapped);
                match pos(&symbols, swapped) {
                    Some(j) => {
                        if inv[j].is_none() {
                            inv[j] = Some(c);
                        }
                    }
                    None => {
                        symbols.push(swapped);
                        inv.push(Some(c));
                    }
                }
            }
            i += 1;
        }
        let inverse = inv
            .iter()
            .map(|c| Letter(pos(&symbols, c.unwrap()).unwrap() as u8))
            .collect();
        let alphabet = Alphabet::new(symbols, inverse)?;
        let mut relators = Vec::with_capacity(self.relators.len());
        for (text, line) in self.relators {
            let w = alphabet
                .parse_word(&text)
                .map_err(|e| Error::parse(line, format!("relator `{text}`: {e}")))?;
            if w.is_empty() {
                return Err(Error::parse(line, "empty relator"));
            }
            relators.push(w);
        }
        Ok(Presentation { alphabet, relators })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_group_compact_form() {
        let p = parse_presentation("gens a,b; inv a:A,b:B; rel (none)").unwrap();
        assert_eq!(p.alphabet.len(), 4);
        assert!(p.relators.is_empty());
        let a = p.alphabet.letter('a').unwrap();
        assert_eq!(p.alphabet.symbol(p.alphabet.inverse(a)), 'A');
    }

    #[test]
    fn triangle_group_default_inverses() {
        let p = parse_presentation("gens a,b,c; rel a3,b3,c4,abc").unwrap();
        assert_eq!(p.alphabet.len(), 6);
        let lens: Vec<usize> = p.relators.iter().map(|r| r.len()).collect();
        assert_eq!(lens, vec![3, 3, 4, 3]);
        let c = p.alphabet.letter('c').unwrap();
        assert_eq!(p.alphabet.symbol(p.alphabet.inverse(c)), 'C');
    }

    #[test]
    fn line_format_with_involution() {
        let p = parse_presentation("gen a\ngen d\ninv a A\ninv d d\nrel dd").unwrap();
        let d = p.alphabet.letter('d').unwrap();
        assert_eq!(p.alphabet.inverse(d), d);
        assert_eq!(p.alphabet.len(), 3);
    }

    #[test]
    fn non_involutive_map_rejected() {
        let err = parse_presentation("gens a,b,c; inv a:b,b:c").unwrap_err();
        assert!(err.to_string().contains("inverse not involutive"), "{err}");
    }

    #[test]
    fn relator_with_unknown_letter_rejected() {
        let err = parse_presentation("gens a,b; rel ax").unwrap_err();
        assert!(err.to_string().contains("unknown letter"), "{err}");
    }

    #[test]
    fn unexpected_keyword() {
        assert!(parse_presentation("gens a; frob x").is_err());
    }
}
