use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::GroupFixture;

use super::{BallTable, MetricContext};

const MAGIC: &str = "manhattan-ball";
const VERSION: u32 = 1;

/// Textual snapshot: a header line
/// `manhattan-ball 1 <fixture-hash> <base> <radius> <target>...`,
/// the layer offsets, then one `<normal form> <target lengths...>` line per
/// element in BFS order.
pub fn write_snapshot(table: &BallTable, path: &Path) -> Result<()> {
    let base = table.base();
    let alpha = base.fixture.alphabet();
    let mut out = String::new();
    let names: Vec<&str> = table.targets().iter().map(|(n, _)| n.as_str()).collect();
    writeln!(
        out,
        "{MAGIC} {VERSION} {} {} {} {}",
        base.fixture.hash,
        base.name(),
        table.radius(),
        names.join(" ")
    )
    .unwrap();
    let layers: Vec<String> = table.layers().iter().map(|l| l.to_string()).collect();
    writeln!(out, "{}", layers.join(" ")).unwrap();
    for (id, w) in table.words().iter().enumerate() {
        out.push_str(&alpha.render(w));
        for (_, lengths) in table.targets() {
            write!(out, " {}", lengths[id]).unwrap();
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(fixture: Arc<GroupFixture>, path: &Path) -> Result<BallTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty snapshot"))?
        .split_whitespace()
        .collect();
    if header.len() < 5 || header[0] != MAGIC {
        return Err(Error::parse(1, "not a ball snapshot"));
    }
    if header[1] != VERSION.to_string() {
        return Err(Error::parse(1, format!("unsupported snapshot version {}", header[1])));
    }
    if header[2] != fixture.hash {
        return Err(Error::parse(1, "snapshot was taken from a different fixture"));
    }
    let base = MetricContext::new(fixture.clone(), header[3])?;
    let target_names: Vec<String> = header[5..].iter().map(|s| s.to_string()).collect();
    let layers: Vec<usize> = lines
        .next()
        .ok_or_else(|| Error::parse(2, "missing layer offsets"))?
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::parse(2, "bad layer offset")))
        .collect::<Result<_>>()?;
    let alpha = fixture.alphabet();
    let mut words = Vec::new();
    let mut targets: Vec<(String, Vec<u32>)> =
        target_names.into_iter().map(|n| (n, Vec::new())).collect();
    for (i, line) in lines.enumerate() {
        let mut toks = line.split_whitespace();
        let w = toks.next().ok_or_else(|| Error::parse(i + 3, "empty element line"))?;
        let word = if w == "ε" { Default::default() } else { alpha.parse_word(w)? };
        words.push(word);
        for (_, lengths) in targets.iter_mut() {
            let l = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::parse(i + 3, "missing length"))?;
            lengths.push(l);
        }
    }
    if layers.last() != Some(&words.len()) {
        return Err(Error::parse(2, "layer offsets do not match element count"));
    }
    Ok(BallTable::from_parts(base, words, layers, targets))
}
