use std::io::Write;

use super::{Derivatives, ManhattanCurve, Tolerances};

/// Provenance written as `#` comment lines ahead of every CSV artifact.
#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub fixture: String,
    pub fixture_hash: String,
    pub base: String,
    pub target: String,
    pub certified_depth: Option<usize>,
    pub tolerances: Tolerances,
}

impl Provenance {
    pub fn of(curve: &ManhattanCurve) -> Self {
        let meta = &curve.automaton.meta;
        Provenance {
            fixture: meta.fixture.clone().unwrap_or_default(),
            fixture_hash: meta.fixture_hash.clone().unwrap_or_default(),
            base: meta.base.clone().unwrap_or_default(),
            target: curve.weight.clone(),
            certified_depth: meta.certified_depth,
            tolerances: curve.tol,
        }
    }

    pub fn write_header(&self, w: &mut dyn Write) -> std::io::Result<()> {
        let t = &self.tolerances;
        writeln!(w, "# fixture: {}", self.fixture)?;
        writeln!(w, "# fixture_sha256: {}", self.fixture_hash)?;
        writeln!(w, "# base: {}", self.base)?;
        writeln!(w, "# target: {}", self.target)?;
        match self.certified_depth {
            Some(d) => writeln!(w, "# certified_depth: {d}")?,
            None => writeln!(w, "# certified_depth: none")?,
        }
        writeln!(
            w,
            "# tolerances: perron={:e} band={:e} spread={:e} root={:e}",
            t.perron, t.band, t.spread, t.root
        )
    }
}

/// 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

pub type CurveRow = Derivatives;

pub fn write_curve_csv(w: &mut dyn Write, prov: &Provenance, rows: &[CurveRow]) -> std::io::Result<()> {
    prov.write_header(w)?;
    writeln!(w, "a,theta,theta_prime,theta_second,n_maximal_components")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt17(r.a),
            fmt17(r.theta),
            fmt17(r.theta_prime),
            fmt17(r.theta_second),
            r.maximal.len()
        )?;
    }
    Ok(())
}
