use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use manhattan::analysis::{
    inverse_curve_check, ldp_rate_function, multifractal_spectrum, rigidity_report,
    write_rate_csv, write_spectrum_csv, RigidityThresholds, Spectrum, Verdict,
};
use manhattan::automaton::{
    analyze_graph, build_cone_automaton, certify, load_automaton, save_automaton, BuildOutcome,
    CertificationReport, GeodesicAutomaton,
};
use manhattan::cayley::{log_sphere_sum, BallTable, MetricContext};
use manhattan::group::GroupFixture;
use manhattan::thermo::{fmt17, write_curve_csv, CycleMean, ManhattanCurve, Provenance};
use manhattan::{Error, Result};

use crate::config::{Grid, RunConfig};

pub struct Session {
    pub cfg: RunConfig,
    pub fixture: Arc<GroupFixture>,
}

fn io(path: &std::path::Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn ratio(r: &num_rational::Ratio<i64>) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl Session {
    pub fn open(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let fixture = Arc::new(GroupFixture::load(&cfg.fixture)?);
        Ok(Session { cfg, fixture })
    }

    fn metric(&self, name: &str) -> Result<MetricContext> {
        MetricContext::new(self.fixture.clone(), name)
    }

    fn ball(&self, base: &str, target: &str, radius: usize) -> Result<BallTable> {
        let mut ball = BallTable::build(&self.metric(base)?, radius)?;
        ball.register(&self.metric(target)?)?;
        Ok(ball)
    }

    fn stem(&self, base: &str, target: &str) -> String {
        format!("{}_{}_{}", self.fixture.name, base, target)
    }

    fn out_file(&self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.cfg.out).map_err(io(&self.cfg.out))?;
        Ok(self.cfg.out.join(name))
    }

    /// Smallest cone radius (or the requested one) whose automaton
    /// certifies to the horizon.
    pub fn build(&self, base: &str, target: &str) -> Result<(BuildOutcome, usize)> {
        let n = self.cfg.horizon;
        let ball = self.ball(base, target, n)?;
        let radii: Vec<usize> = match self.cfg.cone_radius {
            Some(k) => vec![k],
            None => (1..=n - 2).collect(),
        };
        let mut last = None;
        for k in radii {
            match build_cone_automaton(&ball, k, n) {
                Ok(out) if out.report.passed() => return Ok((out, k)),
                Ok(out) => last = Some(out.report.into_result().unwrap_err()),
                Err(e @ Error::ConeInconsistent { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one radius tried"))
    }

    pub fn automaton(&self, base: &str, target: &str) -> Result<GeodesicAutomaton> {
        match &self.cfg.automaton {
            Some(path) => load_automaton(path),
            None => Ok(self.build(base, target)?.0.automaton),
        }
    }

    pub fn curve(&self, base: &str, target: &str) -> Result<ManhattanCurve> {
        ManhattanCurve::new(self.automaton(base, target)?, target, self.cfg.tolerances)
    }

    fn pair(&self) -> (&str, &str) {
        (&self.cfg.base, &self.cfg.target)
    }
}

fn csv_file(path: &std::path::Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io(path))?))
}

fn describe_automaton(a: &GeodesicAutomaton) -> String {
    let g = analyze_graph(a);
    let comps: Vec<String> = g
        .nontrivial()
        .map(|(_, c)| format!("{} edges on {} states (period {})", c.edges.len(), c.states.len(), c.period))
        .collect();
    format!(
        "{} states, {} edges; nontrivial components: {}",
        a.states,
        a.edges.len(),
        comps.join("; ")
    )
}

fn describe_report(r: &CertificationReport) -> String {
    let mut s = format!(
        "depth {}: bijection {}, geodesic {}, weights {}",
        r.depth,
        ok(r.bijection_ok),
        ok(r.geodesic_ok),
        ok(r.weights_ok)
    );
    if let Some(w) = &r.witness {
        write!(s, "\nwitness ({} at n = {}): {} — {}", w.check, w.depth, w.word, w.detail).unwrap();
    }
    s
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

fn cycle_labels(a: &GeodesicAutomaton, c: &CycleMean) -> String {
    c.cycle.iter().map(|&e| a.edges[e].label).collect()
}

pub fn validate(s: &Session) -> Result<()> {
    let issues = s.fixture.validate(s.cfg.horizon.min(8));
    println!("fixture {} (sha256 {})", s.fixture.name, s.fixture.hash);
    for m in &s.fixture.metrics {
        println!("  metric {}: {} generators, {} rules", m.name, m.rws.letters().len(), m.rws.rules().len());
    }
    if issues.is_empty() {
        println!("rewriting systems confluent; relators and definitions trivial");
        Ok(())
    } else {
        for i in &issues {
            println!("  {i}");
        }
        Err(Error::Certification {
            depth: s.cfg.horizon.min(8),
            check: "fixture".into(),
            witness: issues[0].clone(),
        })
    }
}

pub fn build_automaton(s: &Session) -> Result<()> {
    let (base, target) = s.pair();
    let (out, k) = s.build(base, target)?;
    let path = s.out_file(&format!("{}_automaton.json", s.stem(base, target)))?;
    save_automaton(&out.automaton, &path)?;
    println!("cone radius {k}: {}", describe_automaton(&out.automaton));
    println!("certified: {}", describe_report(&out.report));
    println!("wrote {}", path.display());
    Ok(())
}

pub fn certify_cmd(s: &Session) -> Result<()> {
    let (base, target) = s.pair();
    let a = s.automaton(base, target)?;
    let ball = s.ball(base, target, s.cfg.horizon)?;
    let report = certify(&a, &ball, s.cfg.horizon)?;
    println!("{}", describe_automaton(&a));
    println!("{}", describe_report(&report));
    report.into_result().map(|_| ())
}

pub fn curve(s: &Session) -> Result<()> {
    let (base, target) = s.pair();
    let c = s.curve(base, target)?;
    let rows = c.evaluate_grid(&s.cfg.grid.points())?;
    let path = s.out_file(&format!("{}_curve.csv", s.stem(base, target)))?;
    let mut w = csv_file(&path)?;
    write_curve_csv(&mut w, &Provenance::of(&c), &rows).map_err(io(&path))?;
    w.flush().map_err(io(&path))?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(())
}

pub fn derivatives(s: &Session, at: &[f64]) -> Result<()> {
    let (base, target) = s.pair();
    let c = s.curve(base, target)?;
    println!("a,theta,theta_prime,theta_second,cross_component_spread");
    for &a in at {
        let d = c.derivatives(a)?;
        println!("{},{},{},{},{:e}", fmt17(a), fmt17(d.theta), fmt17(d.theta_prime), fmt17(d.theta_second), d.spread);
    }
    Ok(())
}

pub fn growth(s: &Session) -> Result<()> {
    let (base, target) = s.pair();
    let g = s.curve(base, target)?.growth_rates()?;
    println!("v (growth of {base})      = {:.12}", g.v);
    println!("v_star (growth of {target}) = {:.12}", g.v_star);
    println!("v / v_star               = {:.12}", g.v / g.v_star);
    Ok(())
}

pub fn distortion(s: &Session) -> Result<()> {
    let (base, target) = s.pair();
    let c = s.curve(base, target)?;
    let tau = c.mean_distortion()?;
    let g = c.growth_rates()?;
    println!("tau = {tau:.12}");
    println!("v / v_star = {:.12}", g.v / g.v_star);
    Ok(())
}

pub fn dilation(s: &Session) -> Result<()> {
    let (base, target) = s.pair();
    let c = s.curve(base, target)?;
    let d = c.dilation()?;
    println!("Dil = ({}, {})", ratio(&d.alpha_min.value), ratio(&d.alpha_max.value));
    println!("alpha_min witness cycle: {}", cycle_labels(&c.automaton, &d.alpha_min));
    println!("alpha_max witness cycle: {}", cycle_labels(&c.automaton, &d.alpha_max));
    Ok(())
}

fn alpha_grid(c: &ManhattanCurve, range: Option<Grid>, count: usize) -> Result<Vec<f64>> {
    Ok(match range {
        Some(g) => g.points(),
        None => {
            let d = c.dilation()?;
            let f = |r: &num_rational::Ratio<i64>| *r.numer() as f64 / *r.denom() as f64;
            let (lo, hi) = (f(&d.alpha_min.value), f(&d.alpha_max.value));
            if lo == hi {
                vec![lo]
            } else {
                Grid { lo, hi, count }.points()
            }
        }
    })
}

pub fn spectrum(s: &Session, range: Option<Grid>) -> Result<()> {
    let (base, target) = s.pair();
    let c = s.curve(base, target)?;
    let rows: Vec<Spectrum> = alpha_grid(&c, range, s.cfg.grid.count)?
        .into_iter()
        .map(|x| multifractal_spectrum(&c, x))
        .collect::<Result<_>>()?;
    let path = s.out_file(&format!("{}_spectrum.csv", s.stem(base, target)))?;
    let mut w = csv_file(&path)?;
    write_spectrum_csv(&mut w, &Provenance::of(&c), &rows).map_err(io(&path))?;
    w.flush().map_err(io(&path))?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn ldp(s: &Session, range: Option<Grid>) -> Result<()> {
    let (base, target) = s.pair();
    let c = s.curve(base, target)?;
    let rows = alpha_grid(&c, range, s.cfg.grid.count)?
        .into_iter()
        .map(|x| ldp_rate_function(&c, x))
        .collect::<Result<Vec<_>>>()?;
    let path = s.out_file(&format!("{}_rate.csv", s.stem(base, target)))?;
    let mut w = csv_file(&path)?;
    write_rate_csv(&mut w, &Provenance::of(&c), &rows).map_err(io(&path))?;
    w.flush().map_err(io(&path))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::RoughlySimilar => "roughly similar".into(),
        Verdict::NotRoughlySimilar => "not roughly similar".into(),
        Verdict::Indeterminate(why) => format!("indeterminate ({why})"),
    }
}

pub fn rigidity(s: &Session) -> Result<()> {
    let (base, target) = s.pair();
    let r = rigidity_report(&s.curve(base, target)?, RigidityThresholds::default())?;
    println!("theta''(0) = {:.10e}", r.theta_second_at_zero);
    println!("straight line: {}, equal dilation constants: {}", r.straight_line, r.dilation_equal);
    println!("tau - v/v_star = {:.3e}", r.mean_distortion - r.growth_ratio);
    println!("verdict: {}", verdict_text(&r.verdict));
    Ok(())
}

pub fn dual_check(s: &Session) -> Result<()> {
    let (base, target) = s.pair();
    let ab = s.curve(base, target)?;
    let ba = {
        let mut cfg = s.cfg.clone();
        cfg.automaton = None;
        Session { cfg, fixture: s.fixture.clone() }.curve(target, base)?
    };
    let d = inverse_curve_check(&ab, &ba, &s.cfg.grid.points())?;
    println!("max |theta_BA(theta_AB(a)) - a| = {:.3e} (at a = {})", d.max_deviation, d.worst_a);
    println!("tau_AB = {:.12}, tau_BA = {:.12}, product = {:.12}", d.tau_ab, d.tau_ba, d.tau_ab * d.tau_ba);
    if !d.slope_duality {
        return Err(Error::Numerical("tau_AB * tau_BA < 1".into()));
    }
    Ok(())
}

pub fn empirical(s: &Session, at: &[f64]) -> Result<()> {
    let (base, target) = s.pair();
    let c = s.curve(base, target)?;
    let n = s.cfg.horizon;
    let ball = s.ball(base, target, n)?;
    let path = s.out_file(&format!("{}_empirical.csv", s.stem(base, target)))?;
    let mut w = csv_file(&path)?;
    Provenance::of(&c).write_header(&mut w).map_err(io(&path))?;
    writeln!(w, "a,n,rate,theta,gap").map_err(io(&path))?;
    for &a in at {
        let theta = c.theta(a)?.value;
        for k in 1..=n {
            let rate = log_sphere_sum(&ball, target, a, k)? / k as f64;
            writeln!(w, "{},{k},{},{},{}", fmt17(a), fmt17(rate), fmt17(theta), fmt17((rate - theta).abs()))
                .map_err(io(&path))?;
            if k == n {
                println!("a = {a:>5}: (1/{n}) log sphere sum = {rate:.6}, theta = {theta:.6}, gap = {:.2e}", (rate - theta).abs());
            }
        }
    }
    w.flush().map_err(io(&path))?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Every invariant in one pass, with intermediate artifacts written.
pub fn report(s: &Session) -> Result<()> {
    let (base, target) = s.pair();
    let (a, k, rep) = match &s.cfg.automaton {
        Some(p) => (load_automaton(p)?, None, None),
        None => {
            let (out, k) = s.build(base, target)?;
            (out.automaton, Some(k), Some(out.report))
        }
    };
    let stem = s.stem(base, target);
    save_automaton(&a, &s.out_file(&format!("{stem}_automaton.json"))?)?;
    let c = ManhattanCurve::new(a, target, s.cfg.tolerances)?;
    let mut text = String::new();
    let t = &mut text;
    writeln!(t, "fixture      {} (sha256 {})", s.fixture.name, s.fixture.hash).unwrap();
    writeln!(t, "metrics      base {base}, target {target}").unwrap();
    writeln!(t, "automaton    {}", describe_automaton(&c.automaton)).unwrap();
    if let Some(k) = k {
        writeln!(t, "cone radius  {k}").unwrap();
    }
    if let Some(r) = &rep {
        writeln!(t, "certified    {}", describe_report(r)).unwrap();
    }
    let g = c.growth_rates()?;
    let d0 = c.derivatives(0.0)?;
    let dil = c.dilation()?;
    let rig = rigidity_report(&c, RigidityThresholds::default())?;
    let lim = c.asymptote_limits()?;
    writeln!(t, "v            {:.9}", g.v).unwrap();
    writeln!(t, "v_star       {:.9}", g.v_star).unwrap();
    writeln!(t, "v / v_star   {:.9}", g.v / g.v_star).unwrap();
    writeln!(t, "tau          {:.9}", -d0.theta_prime).unwrap();
    writeln!(t, "theta''(0)   {:.9}", d0.theta_second).unwrap();
    writeln!(t, "Dil          ({}, {})", ratio(&dil.alpha_min.value), ratio(&dil.alpha_max.value)).unwrap();
    writeln!(t, "  cycles     {} / {}", cycle_labels(&c.automaton, &dil.alpha_min), cycle_labels(&c.automaton, &dil.alpha_max)).unwrap();
    writeln!(t, "asymptotes   theta(t) + alpha_min t -> {:.9} (t -> +inf), theta(t) + alpha_max t -> {:.9} (t -> -inf)", lim.at_plus_infinity, lim.at_minus_infinity).unwrap();
    writeln!(t, "rigidity     {}", verdict_text(&rig.verdict)).unwrap();
    print!("{text}");
    std::fs::write(s.out_file(&format!("{stem}_report.txt"))?, &text).map_err(io(&s.cfg.out))?;

    let rows = c.evaluate_grid(&s.cfg.grid.points())?;
    let path = s.out_file(&format!("{stem}_curve.csv"))?;
    let mut w = csv_file(&path)?;
    write_curve_csv(&mut w, &Provenance::of(&c), &rows).map_err(io(&path))?;
    w.flush().map_err(io(&path))?;
    let alphas = alpha_grid(&c, None, 101)?;
    let spec = alphas.iter().map(|&x| multifractal_spectrum(&c, x)).collect::<Result<Vec<_>>>()?;
    let path = s.out_file(&format!("{stem}_spectrum.csv"))?;
    let mut w = csv_file(&path)?;
    write_spectrum_csv(&mut w, &Provenance::of(&c), &spec).map_err(io(&path))?;
    w.flush().map_err(io(&path))?;
    let rate = alphas.iter().map(|&x| ldp_rate_function(&c, x)).collect::<Result<Vec<_>>>()?;
    let path = s.out_file(&format!("{stem}_rate.csv"))?;
    let mut w = csv_file(&path)?;
    write_rate_csv(&mut w, &Provenance::of(&c), &rate).map_err(io(&path))?;
    w.flush().map_err(io(&path))?;
    println!("artifacts in {}", s.cfg.out.display());
    Ok(())
}
