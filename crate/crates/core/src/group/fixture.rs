use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::presentation::{statements, PresentationBuilder};
use super::{Alphabet, Letter, Presentation, RewritingSystem, Rule, Word};

/// A word metric: an inverse-closed sub-alphabet with its own complete
/// shortlex rewriting system. Normal forms are shortlex-least, hence
/// geodesic, so normal-form length is the word length.
#[derive(Clone, Debug)]
pub struct Metric {
    pub name: String,
    pub rws: RewritingSystem,
}

/// A group with several generating sets over one shared symbol table.
///
/// File format, one statement per line (`#` comments):
///
/// ```text
/// gen a            # generators (inverse defaults to case swap)
/// inv a A          # explicit inverse pairs
/// rel a3           # relators (informational, checked against each metric)
/// def c ab         # letter c denotes the element ab
/// metric S a b A B # metric section: ordered letters
/// rule aA -        # shortlex rule of the current metric, ε written as -
/// ```
#[derive(Clone, Debug)]
pub struct GroupFixture {
    pub name: String,
    pub presentation: Presentation,
    pub definitions: Vec<(Letter, Word)>,
    pub metrics: Vec<Metric>,
    /// Hex SHA-256 of the source text.
    pub hash: String,
}

impl GroupFixture {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "fixture".into());
        Self::parse(&name, &text)
    }

    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut builder = PresentationBuilder::default();
        let mut defs: Vec<(String, String, usize)> = Vec::new();
        let mut sections: Vec<(String, Vec<String>, usize, Vec<(String, String, usize)>)> =
            Vec::new();
        for stmt in statements(text) {
            match stmt.keyword.as_str() {
                "def" => {
                    let toks: Vec<&str> = stmt.args.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(Error::parse(stmt.line, "expected `def <letter> <word>`"));
                    }
                    defs.push((toks[0].to_string(), toks[1].to_string(), stmt.line));
                }
                "metric" => {
                    let mut toks = stmt.args.split_whitespace();
                    let mname = toks
                        .next()
                        .ok_or_else(|| Error::parse(stmt.line, "metric needs a name"))?;
                    let letters: Vec<String> = toks
                        .flat_map(|t| t.chars().map(String::from).collect::<Vec<_>>())
                        .collect();
                    if letters.is_empty() {
                        return Err(Error::parse(stmt.line, "metric needs letters"));
                    }
                    sections.push((mname.to_string(), letters, stmt.line, Vec::new()));
                }
                "rule" => {
                    let toks: Vec<&str> = stmt.args.split_whitespace().collect();
                    if toks.len() != 2 {
                        return Err(Error::parse(stmt.line, "expected `rule <lhs> <rhs>`"));
                    }
                    let section = sections.last_mut().ok_or_else(|| {
                        Error::parse(stmt.line, "rule outside of a metric section")
                    })?;
                    section
                        .3
                        .push((toks[0].to_string(), toks[1].to_string(), stmt.line));
                }
                _ => {
                    if !builder.accept(&stmt)? {
                        return Err(Error::parse(
                            stmt.line,
                            format!("unknown keyword `{}`", stmt.keyword),
                        ));
                    }
                }
            }
        }
        let presentation = builder.finish()?;
        let alphabet = &presentation.alphabet;

        let mut definitions = Vec::new();
        for (sym, word, line) in defs {
            let c = sym.chars().next().unwrap();
            let letter = alphabet
                .letter(c)
                .filter(|_| sym.chars().count() == 1)
                .ok_or_else(|| Error::parse(line, format!("unknown letter `{sym}`")))?;
            let w = alphabet
                .parse_word(&word)
                .map_err(|e| Error::parse(line, e.to_string()))?;
            definitions.push((letter, w));
        }

        let mut metrics: Vec<Metric> = Vec::new();
        for (mname, letters, line, rules) in sections {
            if metrics.iter().any(|m| m.name == mname) {
                return Err(Error::parse(line, format!("metric `{mname}` repeated")));
            }
            let mut order = Vec::new();
            for l in &letters {
                let c = l.chars().next().unwrap();
                let letter = alphabet
                    .letter(c)
                    .ok_or_else(|| Error::parse(line, format!("unknown letter `{c}`")))?;
                order.push(letter);
            }
            for &l in &order {
                if !order.contains(&alphabet.inverse(l)) {
                    return Err(Error::parse(
                        line,
                        format!(
                            "metric `{mname}` is not inverse-closed: missing inverse of `{}`",
                            alphabet.symbol(l)
                        ),
                    ));
                }
            }
            let mut parsed = Vec::new();
            for (lhs, rhs, rline) in rules {
                let lhs = alphabet
                    .parse_word(&lhs)
                    .map_err(|e| Error::parse(rline, e.to_string()))?;
                let rhs = alphabet
                    .parse_word(&rhs)
                    .map_err(|e| Error::parse(rline, e.to_string()))?;
                parsed.push(Rule { lhs, rhs });
            }
            let rws = RewritingSystem::new(order, alphabet.len(), parsed)
                .map_err(|e| Error::parse(line, format!("metric `{mname}`: {e}")))?;
            metrics.push(Metric { name: mname, rws });
        }
        if metrics.is_empty() {
            return Err(Error::Presentation("fixture declares no metric".into()));
        }

        let hash = Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        Ok(GroupFixture {
            name: name.to_string(),
            presentation,
            definitions,
            metrics,
            hash,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.presentation.alphabet
    }

    pub fn metric_index(&self, name: &str) -> Result<usize> {
        self.metrics
            .iter()
            .position(|m| m.name == name)
            .ok_or_else(|| Error::UnknownMetric(name.to_string()))
    }

    pub fn metric(&self, index: usize) -> &Metric {
        &self.metrics[index]
    }

    /// Rewrites `word` over the letters of metric `metric`, expanding
    /// defined letters (and inverses of defined letters) as needed.
    pub fn express(&self, word: &[Letter], metric: usize) -> Result<Word> {
        let rws = &self.metrics[metric].rws;
        let mut out = Word::new();
        for &l in word {
            self.expand_letter(l, rws, &mut out, 0)?;
        }
        Ok(out)
    }

    fn expand_letter(
        &self,
        letter: Letter,
        rws: &RewritingSystem,
        out: &mut Word,
        depth: usize,
    ) -> Result<()> {
        if rws.contains_letter(letter) {
            out.push(letter);
            return Ok(());
        }
        if depth > self.alphabet().len() {
            return Err(Error::Presentation(format!(
                "cyclic definitions while expanding `{}`",
                self.alphabet().symbol(letter)
            )));
        }
        let alpha = self.alphabet();
        for (def_letter, def_word) in &self.definitions {
            let expansion = if *def_letter == letter {
                def_word.clone()
            } else if alpha.inverse(*def_letter) == letter {
                alpha.invert(def_word)
            } else {
                continue;
            };
            let mark = out.len();
            let ok = expansion
                .iter()
                .try_for_each(|&l| self.expand_letter(l, rws, out, depth + 1));
            if ok.is_ok() {
                return Ok(());
            }
            out.truncate(mark);
        }
        Err(Error::Presentation(format!(
            "letter `{}` cannot be expressed over metric alphabet",
            alpha.symbol(letter)
        )))
    }

    /// Normal form of `word` under metric `metric`.
    pub fn normal_form(&self, word: &[Letter], metric: usize) -> Result<Word> {
        let w = self.express(word, metric)?;
        Ok(self.metrics[metric].rws.normalize(&w))
    }

    /// Word length of the element represented by `word` in metric `metric`.
    pub fn length(&self, word: &[Letter], metric: usize) -> Result<usize> {
        Ok(self.normal_form(word, metric)?.len())
    }

    /// Checks every relator and every definition against each metric's
    /// rewriting system, and each system's confluence. Returns one message
    /// per failure.
    pub fn validate(&self, oracle_depth: usize) -> Vec<String> {
        let mut problems = Vec::new();
        let alpha = self.alphabet();
        for (mi, m) in self.metrics.iter().enumerate() {
            let report = m.rws.check_confluence(oracle_depth);
            if let Some(w) = &report.witness {
                problems.push(format!(
                    "metric {}: not confluent, `{}` rewrites to `{}` and `{}`",
                    m.name,
                    alpha.render(&w.word),
                    alpha.render(&w.left),
                    alpha.render(&w.right)
                ));
            }
            for r in &self.presentation.relators {
                match self.normal_form(r, mi) {
                    Ok(nf) if nf.is_empty() => {}
                    Ok(nf) => problems.push(format!(
                        "metric {}: relator `{}` normalizes to `{}`",
                        m.name,
                        alpha.render(r),
                        alpha.render(&nf)
                    )),
                    Err(e) => problems.push(format!("metric {}: {e}", m.name)),
                }
            }
            for (l, w) in &self.definitions {
                let lhs = self.normal_form(&[*l], mi);
                let rhs = self.normal_form(w, mi);
                match (lhs, rhs) {
                    (Ok(a), Ok(b)) if a == b => {}
                    (Ok(_), Ok(_)) => problems.push(format!(
                        "metric {}: definition {} = {} does not hold",
                        m.name,
                        alpha.symbol(*l),
                        alpha.render(w)
                    )),
                    (Err(e), _) | (_, Err(e)) => problems.push(format!("metric {}: {e}", m.name)),
                }
            }
            for &l in m.rws.letters() {
                let mut w = Word::new();
                w.push(l);
                w.push(alpha.inverse(l));
                if !m.rws.normalize(&w).is_empty() {
                    problems.push(format!(
                        "metric {}: `{}` is not trivial",
                        m.name,
                        alpha.render(&w)
                    ));
                }
            }
        }
        problems
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FREE: &str = "
gen a
gen b
gen c
inv a A
inv b B
inv c C
def c ab
metric S a b A B
rule aA -
rule bB -
rule Aa -
rule Bb -
metric Sstar a b c A B C
rule ab c
rule aA -
rule bB -
rule bC A
rule cB a
rule cC -
rule Aa -
rule Ac b
rule Bb -
rule BA C
rule Ca B
rule Cc -
";

    #[test]
    fn parses_free_fixture() {
        let f = GroupFixture::parse("free", FREE).unwrap();
        assert_eq!(f.metrics.len(), 2);
        assert_eq!(f.alphabet().len(), 6);
        assert!(f.validate(4).is_empty(), "{:?}", f.validate(4));
    }

    #[test]
    fn cross_metric_lengths() {
        let f = GroupFixture::parse("free", FREE).unwrap();
        let s = f.metric_index("S").unwrap();
        let star = f.metric_index("Sstar").unwrap();
        let alpha = f.alphabet();
        let c = alpha.parse_word("c").unwrap();
        assert_eq!(f.length(&c, s).unwrap(), 2);
        assert_eq!(f.length(&c, star).unwrap(), 1);
        let ab = alpha.parse_word("ab").unwrap();
        assert_eq!(f.length(&ab, star).unwrap(), 1);
        // a^{-1} c = b in the free group
        let ac = alpha.parse_word("Ac").unwrap();
        assert_eq!(alpha.render(&f.normal_form(&ac, star).unwrap()), "b");
        let cinv = alpha.parse_word("C").unwrap();
        assert_eq!(alpha.render(&f.express(&cinv, s).unwrap()), "BA");
    }

    #[test]
    fn rule_before_metric_is_error() {
        assert!(GroupFixture::parse("x", "gen a\nrule aA -\n").is_err());
    }

    #[test]
    fn metric_must_be_inverse_closed() {
        let err = GroupFixture::parse("x", "gen a\ngen b\nmetric S a b A\n").unwrap_err();
        assert!(err.to_string().contains("inverse-closed"), "{err}");
    }
}
