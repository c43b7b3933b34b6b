use std::collections::HashMap;
use std::ops::Range;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{Letter, Word};

use super::MetricContext;

/// Memory guard on the number of enumerated elements.
pub const DEFAULT_MAX_ELEMENTS: usize = 10_000_000;

/// Exact ball of the base metric, grown layer by layer with BFS over normal
/// forms, plus registered word lengths in other metrics of the same group.
///
/// Elements are numbered in BFS order so that sphere `n` is a contiguous
/// id range.
#[derive(Clone, Debug)]
pub struct BallTable {
    base: MetricContext,
    words: Vec<Word>,
    index: HashMap<Word, u32>,
    layers: Vec<usize>,
    targets: Vec<(String, Vec<u32>)>,
    max_elements: usize,
}

impl BallTable {
    pub fn build(base: &MetricContext, radius: usize) -> Result<Self> {
        Self::with_limit(base, radius, DEFAULT_MAX_ELEMENTS)
    }

    pub fn with_limit(base: &MetricContext, radius: usize, max_elements: usize) -> Result<Self> {
        let mut table = BallTable {
            base: base.clone(),
            words: vec![Word::new()],
            index: HashMap::from([(Word::new(), 0)]),
            layers: vec![0, 1],
            targets: Vec::new(),
            max_elements,
        };
        table.extend_to(radius)?;
        Ok(table)
    }

    pub fn base(&self) -> &MetricContext {
        &self.base
    }

    pub fn radius(&self) -> usize {
        self.layers.len() - 2
    }

    /// Grows the ball to `radius`, refreshing registered target lengths.
    pub fn extend_to(&mut self, radius: usize) -> Result<()> {
        let rws = &self.base.fixture.metrics[self.base.metric].rws;
        let gens: Vec<Letter> = rws.letters().to_vec();
        while self.radius() < radius {
            let n = self.radius();
            let layer = self.sphere_ids(n);
            let start = self.words.len();
            for id in layer {
                for &s in &gens {
                    let y = rws.normalize_append(&self.words[id], s);
                    if self.index.contains_key(&y) {
                        continue;
                    }
                    if y.len() != n + 1 {
                        let alpha = self.base.fixture.alphabet();
                        return Err(Error::Rewriting(format!(
                            "metric {}: normal form `{}` has length {} at distance {}; \
                             the rewriting system is not geodesic",
                            self.base.name(),
                            alpha.render(&y),
                            y.len(),
                            n + 1
                        )));
                    }
                    if self.words.len() >= self.max_elements {
                        return Err(Error::Horizon {
                            what: format!("ball of {} (memory guard)", self.base.name()),
                            needed: n + 1,
                            available: n,
                        });
                    }
                    self.index.insert(y.clone(), self.words.len() as u32);
                    self.words.push(y);
                }
            }
            debug_assert!(self.words.len() >= start);
            self.layers.push(self.words.len());
        }
        let targets: Vec<MetricContext> = self
            .targets
            .iter()
            .map(|(name, _)| MetricContext::new(self.base.fixture.clone(), name))
            .collect::<Result<_>>()?;
        for t in targets {
            self.register(&t)?;
        }
        Ok(())
    }

    /// Computes word lengths of every ball element in `target`. The base
    /// metric itself may be registered (its lengths are the BFS distances).
    pub fn register(&mut self, target: &MetricContext) -> Result<()> {
        if !self.base.same_group(target) {
            return Err(Error::Invalid(
                "target metric belongs to a different fixture".into(),
            ));
        }
        let fixture = &self.base.fixture;
        let lengths: Vec<u32> = self
            .words
            .par_iter()
            .map(|w| fixture.length(w, target.metric).map(|l| l as u32))
            .collect::<Result<_>>()?;
        let name = target.name().to_string();
        match self.targets.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = lengths,
            None => self.targets.push((name, lengths)),
        }
        Ok(())
    }

    pub fn registered(&self) -> impl Iterator<Item = &str> {
        self.targets.iter().map(|(n, _)| n.as_str())
    }

    fn check_radius(&self, n: usize, what: &str) -> Result<()> {
        if n > self.radius() {
            return Err(Error::Horizon {
                what: what.to_string(),
                needed: n,
                available: self.radius(),
            });
        }
        Ok(())
    }

    pub fn sphere_ids(&self, n: usize) -> Range<usize> {
        self.layers[n]..self.layers[n + 1]
    }

    /// Normal forms at base distance exactly `n`.
    pub fn sphere(&self, n: usize) -> Result<&[Word]> {
        self.check_radius(n, "sphere")?;
        Ok(&self.words[self.sphere_ids(n)])
    }

    pub fn sphere_size(&self, n: usize) -> Result<usize> {
        self.check_radius(n, "sphere")?;
        Ok(self.layers[n + 1] - self.layers[n])
    }

    pub fn ball_size(&self, r: usize) -> Result<usize> {
        self.check_radius(r, "ball")?;
        Ok(self.layers[r + 1])
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn word(&self, id: usize) -> &Word {
        &self.words[id]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Id of an element given by its base normal form.
    pub fn id_of_normal_form(&self, nf: &[Letter]) -> Option<usize> {
        self.index.get(&Word::from_letters(nf)).map(|&i| i as usize)
    }

    /// Id of the element spelled by an arbitrary word.
    pub fn id_of(&self, word: &[Letter]) -> Result<Option<usize>> {
        let nf = self.base.normal_form(word)?;
        Ok(self.index.get(&nf).map(|&i| i as usize))
    }

    pub fn base_length(&self, id: usize) -> usize {
        match self.layers.binary_search(&id) {
            Ok(n) => n,
            Err(n) => n - 1,
        }
    }

    pub fn target_lengths(&self, name: &str) -> Result<&[u32]> {
        if name == self.base.name() && !self.targets.iter().any(|(n, _)| n == name) {
            return Err(Error::Invalid(format!(
                "metric `{name}` is the base; register it to use it as a target"
            )));
        }
        self.targets
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::UnknownMetric(format!("{name} (not registered on this ball)")))
    }

    /// Exact `d(o, x)` in `metric` for an element inside the ball.
    pub fn metric_length(&self, metric: &str, word: &[Letter]) -> Result<usize> {
        let id = self.id_of(word)?.ok_or_else(|| Error::Horizon {
            what: "element outside the enumerated ball".into(),
            needed: self.base.length(word).unwrap_or(usize::MAX),
            available: self.radius(),
        })?;
        if metric == self.base.name() {
            return Ok(self.base_length(id));
        }
        Ok(self.target_lengths(metric)?[id] as usize)
    }

    pub(crate) fn from_parts(
        base: MetricContext,
        words: Vec<Word>,
        layers: Vec<usize>,
        targets: Vec<(String, Vec<u32>)>,
    ) -> Self {
        let index = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        BallTable {
            base,
            words,
            index,
            layers,
            targets,
            max_elements: DEFAULT_MAX_ELEMENTS,
        }
    }

    pub(crate) fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub(crate) fn targets(&self) -> &[(String, Vec<u32>)] {
        &self.targets
    }
}
