//! Brute-force oracle over the Cayley graph: balls and spheres by BFS over
//! normal forms, exact word lengths in several metrics, Gromov products,
//! sphere sums and ball-average distortion.

mod ball;
mod ops;
mod snapshot;

use std::sync::Arc;

use crate::error::Result;
use crate::group::{GroupFixture, Letter, Word};

pub use ball::{BallTable, DEFAULT_MAX_ELEMENTS};
pub use ops::{
    ball_average_distortion, gromov_product, log_sphere_sum, sphere_sum,
    translation_length_estimate, TranslationEstimate,
};
pub use snapshot::{read_snapshot, write_snapshot};

/// One word metric of a group fixture.
#[derive(Clone, Debug)]
pub struct MetricContext {
    pub fixture: Arc<GroupFixture>,
    pub metric: usize,
}

impl MetricContext {
    pub fn new(fixture: Arc<GroupFixture>, name: &str) -> Result<Self> {
        let metric = fixture.metric_index(name)?;
        Ok(MetricContext { fixture, metric })
    }

    pub fn name(&self) -> &str {
        &self.fixture.metrics[self.metric].name
    }

    /// Generators in the metric's shortlex order.
    pub fn generators(&self) -> &[Letter] {
        self.fixture.metrics[self.metric].rws.letters()
    }

    pub fn normal_form(&self, word: &[Letter]) -> Result<Word> {
        self.fixture.normal_form(word, self.metric)
    }

    /// Exact word length `|x|` of the element spelled by `word`.
    pub fn length(&self, word: &[Letter]) -> Result<usize> {
        self.fixture.length(word, self.metric)
    }

    pub fn same_group(&self, other: &MetricContext) -> bool {
        self.fixture.hash == other.fixture.hash
    }
}
