use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};

use super::{Alphabet, Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub lhs: Word,
    pub rhs: Word,
}

/// Ordered string rewriting system over a sub-alphabet, every rule strictly
/// decreasing in the shortlex order induced by the sub-alphabet's order.
///
/// Rewriting always applies the rule whose left-hand side ends earliest in
/// the word (longest such match when several end at the same position).
#[derive(Clone, Debug)]
pub struct RewritingSystem {
    letters: Vec<Letter>,
    rank: Vec<Option<u8>>,
    rules: Vec<Rule>,
    matcher: SuffixMatcher,
}

impl RewritingSystem {
    /// `letters` is the ordered sub-alphabet (ranks follow list order);
    /// `universe` is the size of the ambient alphabet the letters index into.
    pub fn new(letters: Vec<Letter>, universe: usize, rules: Vec<Rule>) -> Result<Self> {
        let mut rank = vec![None; universe];
        for (i, l) in letters.iter().enumerate() {
            if l.index() >= universe {
                return Err(Error::Rewriting(format!("letter index {} out of range", l.0)));
            }
            if rank[l.index()].is_some() {
                return Err(Error::Rewriting(format!("letter index {} repeated", l.0)));
            }
            rank[l.index()] = Some(i as u8);
        }
        for (i, rule) in rules.iter().enumerate() {
            if rule.lhs.is_empty() {
                return Err(Error::Rewriting(format!("rule {i} has empty left-hand side")));
            }
            if rule
                .lhs
                .iter()
                .chain(rule.rhs.iter())
                .any(|l| rank.get(l.index()).copied().flatten().is_none())
            {
                return Err(Error::Rewriting(format!(
                    "rule {i} uses a letter outside the system's alphabet"
                )));
            }
        }
        let rws = RewritingSystem {
            letters,
            rank,
            matcher: SuffixMatcher::build(universe, &rules),
            rules,
        };
        for (i, rule) in rws.rules.iter().enumerate() {
            if rws.shortlex_cmp(&rule.rhs, &rule.lhs) != Ordering::Less {
                return Err(Error::Rewriting(format!(
                    "rule {i} does not decrease shortlex order"
                )));
            }
        }
        Ok(rws)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn contains_letter(&self, letter: Letter) -> bool {
        self.rank.get(letter.index()).copied().flatten().is_some()
    }

    pub fn shortlex_cmp(&self, u: &[Letter], v: &[Letter]) -> Ordering {
        u.len().cmp(&v.len()).then_with(|| {
            let ru = u.iter().map(|l| self.rank[l.index()]);
            let rv = v.iter().map(|l| self.rank[l.index()]);
            ru.cmp(rv)
        })
    }

    /// Irreducible descendant of `word`. Terminates because every rule
    /// decreases shortlex order.
    pub fn normalize(&self, word: &[Letter]) -> Word {
        let mut out = Word::new();
        let mut states: Vec<u32> = Vec::with_capacity(word.len() + 1);
        states.push(0);
        let mut pending: Vec<Letter> = word.iter().rev().copied().collect();
        while let Some(letter) = pending.pop() {
            let state = self.matcher.step(*states.last().unwrap(), letter);
            out.push(letter);
            states.push(state);
            if let Some(r) = self.matcher.output(state) {
                let rule = &self.rules[r];
                let keep = out.len() - rule.lhs.len();
                out.truncate(keep);
                states.truncate(keep + 1);
                pending.extend(rule.rhs.iter().rev().copied());
            }
        }
        out
    }

    /// Normal form of `prefix · letter` when `prefix` is already irreducible.
    pub fn normalize_append(&self, prefix: &[Letter], letter: Letter) -> Word {
        let mut w = Word::from_letters(prefix);
        w.push(letter);
        self.normalize(&w)
    }

    pub fn is_irreducible(&self, word: &[Letter]) -> bool {
        let mut state = 0;
        for &l in word {
            state = self.matcher.step(state, l);
            if self.matcher.output(state).is_some() {
                return false;
            }
        }
        true
    }

    /// All one-step rewrites of `word` (every rule at every position).
    pub fn one_step_rewrites(&self, word: &[Letter]) -> Vec<Word> {
        let mut out = Vec::new();
        for rule in &self.rules {
            let n = rule.lhs.len();
            if n > word.len() {
                continue;
            }
            for i in 0..=word.len() - n {
                if word[i..i + n] == rule.lhs[..] {
                    let mut w = Word::from_letters(&word[..i]);
                    w.extend_from_slice(&rule.rhs);
                    w.extend_from_slice(&word[i + n..]);
                    out.push(w);
                }
            }
        }
        out
    }

    /// Every irreducible word reachable from `word` by any rewriting
    /// strategy, or `None` if more than `limit` intermediate words appear.
    pub fn irreducible_descendants(&self, word: &[Letter], limit: usize) -> Option<BTreeSet<Word>> {
        let mut seen: HashMap<Word, ()> = HashMap::new();
        let mut queue = VecDeque::new();
        let mut result = BTreeSet::new();
        seen.insert(Word::from_letters(word), ());
        queue.push_back(Word::from_letters(word));
        while let Some(w) = queue.pop_front() {
            let next = self.one_step_rewrites(&w);
            if next.is_empty() {
                result.insert(w);
                continue;
            }
            for n in next {
                if seen.insert(n.clone(), ()).is_none() {
                    if seen.len() > limit {
                        return None;
                    }
                    queue.push_back(n);
                }
            }
        }
        Some(result)
    }

    /// Decides confluence from critical pairs (overlaps and inclusions of
    /// left-hand sides). When `oracle_depth > 0`, additionally checks by
    /// exhaustive rewriting that every word of length ≤ `oracle_depth` has a
    /// unique irreducible descendant.
    pub fn check_confluence(&self, oracle_depth: usize) -> ConfluenceReport {
        let mut checked = 0;
        for r1 in &self.rules {
            for r2 in &self.rules {
                for (word, left, right) in critical_pairs(r1, r2) {
                    checked += 1;
                    let nl = self.normalize(&left);
                    let nr = self.normalize(&right);
                    if nl != nr {
                        return ConfluenceReport {
                            confluent: false,
                            critical_pairs: checked,
                            witness: Some(self.witness(word, nl, nr)),
                        };
                    }
                }
            }
        }
        if oracle_depth > 0 {
            let mut frontier = vec![Word::new()];
            for _ in 0..oracle_depth {
                let mut next = Vec::new();
                for w in &frontier {
                    for &l in &self.letters {
                        let u = w.concat(&[l]);
                        if let Some(desc) = self.irreducible_descendants(&u, 100_000) {
                            if desc.len() > 1 {
                                let mut it = desc.iter();
                                let a = it.next().unwrap().clone();
                                let b = it.next().unwrap().clone();
                                return ConfluenceReport {
                                    confluent: false,
                                    critical_pairs: checked,
                                    witness: Some(self.witness(u, a, b)),
                                };
                            }
                        }
                        next.push(u);
                    }
                }
                frontier = next;
            }
        }
        ConfluenceReport {
            confluent: true,
            critical_pairs: checked,
            witness: None,
        }
    }

    fn witness(&self, word: Word, left: Word, right: Word) -> ConfluenceWitness {
        let descendants = self
            .irreducible_descendants(&word, 100_000)
            .map(|s| s.into_iter().collect())
            .unwrap_or_else(|| vec![left.clone(), right.clone()]);
        ConfluenceWitness {
            word,
            left,
            right,
            descendants,
        }
    }

    /// Renders rules one per line in the `rule <lhs> <rhs>` format.
    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        let mut s = String::new();
        for r in &self.rules {
            let rhs = if r.rhs.is_empty() {
                "-".to_string()
            } else {
                alphabet.render(&r.rhs)
            };
            s.push_str(&format!("rule {} {}\n", alphabet.render(&r.lhs), rhs));
        }
        s
    }
}

/// Overlap words of `r1` followed by `r2`, with the two one-step reducts.
fn critical_pairs(r1: &Rule, r2: &Rule) -> Vec<(Word, Word, Word)> {
    let (l1, l2) = (&r1.lhs, &r2.lhs);
    let mut out = Vec::new();
    // proper overlaps: suffix of l1 equals prefix of l2
    for k in 1..l1.len().min(l2.len()) {
        if l1[l1.len() - k..] == l2[..k] {
            let word = l1.concat(&l2[k..]);
            let left = r1.rhs.concat(&l2[k..]);
            let mut right = Word::from_letters(&l1[..l1.len() - k]);
            right.extend_from_slice(&r2.rhs);
            out.push((word, left, right));
        }
    }
    // inclusions: l2 occurs inside l1
    if l2.len() <= l1.len() && r1 != r2 {
        for i in 0..=l1.len() - l2.len() {
            if l1[i..i + l2.len()] == l2[..] {
                let mut right = Word::from_letters(&l1[..i]);
                right.extend_from_slice(&r2.rhs);
                right.extend_from_slice(&l1[i + l2.len()..]);
                out.push((l1.clone(), r1.rhs.clone(), right));
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct ConfluenceReport {
    pub confluent: bool,
    pub critical_pairs: usize,
    pub witness: Option<ConfluenceWitness>,
}

/// A word with two distinct irreducible descendants.
#[derive(Clone, Debug)]
pub struct ConfluenceWitness {
    pub word: Word,
    pub left: Word,
    pub right: Word,
    pub descendants: Vec<Word>,
}

/// Aho–Corasick automaton over left-hand sides, flattened to a DFA.
#[derive(Clone, Debug)]
struct SuffixMatcher {
    universe: usize,
    delta: Vec<u32>,
    output: Vec<Option<usize>>,
}

impl SuffixMatcher {
    fn build(universe: usize, rules: &[Rule]) -> Self {
        let universe = universe.max(1);
        let mut delta: Vec<u32> = vec![u32::MAX; universe];
        let mut own: Vec<Option<usize>> = vec![None];
        let mut depth = vec![0usize];
        for (ri, rule) in rules.iter().enumerate() {
            let mut node = 0usize;
            for &l in rule.lhs.iter() {
                let slot = node * universe + l.index();
                if delta[slot] == u32::MAX {
                    let fresh = own.len();
                    own.push(None);
                    depth.push(depth[node] + 1);
                    delta.extend(std::iter::repeat_n(u32::MAX, universe));
                    delta[slot] = fresh as u32;
                }
                node = delta[slot] as usize;
            }
            if own[node].is_none() {
                own[node] = Some(ri);
            }
        }
        let n = own.len();
        let mut fail = vec![0usize; n];
        let mut output = own.clone();
        let mut queue = VecDeque::new();
        for c in 0..universe {
            let t = delta[c];
            if t == u32::MAX {
                delta[c] = 0;
            } else {
                fail[t as usize] = 0;
                queue.push_back(t as usize);
            }
        }
        while let Some(u) = queue.pop_front() {
            if output[u].is_none() {
                output[u] = output[fail[u]];
            }
            for c in 0..universe {
                let slot = u * universe + c;
                let t = delta[slot];
                if t == u32::MAX {
                    delta[slot] = delta[fail[u] * universe + c];
                } else {
                    fail[t as usize] = delta[fail[u] * universe + c] as usize;
                    queue.push_back(t as usize);
                }
            }
        }
        SuffixMatcher {
            universe,
            delta,
            output,
        }
    }

    #[inline]
    fn step(&self, state: u32, letter: Letter) -> u32 {
        self.delta[state as usize * self.universe + letter.index()]
    }

    #[inline]
    fn output(&self, state: u32) -> Option<usize> {
        self.output[state as usize]
    }
}
