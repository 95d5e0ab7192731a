//! Experiment configs: parsing and exhaustive validation with JSON paths.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use fracspec::asymptotics::DEFAULT_TOLERANCE;
use fracspec::exemplars::{Gaps, StepSpec, TwoSlopeSpec};
use fracspec::fractal_geometry::{parse_rational, Generation, LimitIfs, Similarity, DEFAULT_WORD_BUDGET};
use fracspec::spectral_triples::{TestFunction, DEFAULT_ENTRY_BUDGET};
use fracspec::nalgebra::{DMatrix, DVector};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub entries: usize,
    pub words: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            entries: DEFAULT_ENTRY_BUDGET,
            words: DEFAULT_WORD_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    SequenceAnalysis,
    Exemplar,
    IfsClassical,
    GapTriple,
    PairTriple,
    LinkCheck,
}

impl Kind {
    pub const ALL: [Kind; 6] = [
        Kind::SequenceAnalysis,
        Kind::Exemplar,
        Kind::IfsClassical,
        Kind::GapTriple,
        Kind::PairTriple,
        Kind::LinkCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::SequenceAnalysis => "SEQUENCE_ANALYSIS",
            Kind::Exemplar => "EXEMPLAR",
            Kind::IfsClassical => "IFS_CLASSICAL",
            Kind::GapTriple => "GAP_TRIPLE",
            Kind::PairTriple => "PAIR_TRIPLE",
            Kind::LinkCheck => "LINK_CHECK",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        Kind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone)]
pub enum SequenceSource {
    Values(Vec<f64>),
    /// `μ_n = n^{-exponent} · log(n+1)^{-log_exponent}`.
    Formula { exponent: f64, log_exponent: f64, cap: usize },
    /// Two-column `n,mu_n` CSV with a header row.
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub enum Exemplar {
    TwoSlope(TwoSlopeSpec),
    Step(StepSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Ratio,
    Increment,
}

#[derive(Debug, Clone)]
pub struct Functional {
    pub name: String,
    pub function: TestFunction,
    pub method: Method,
}

#[derive(Debug, Clone)]
pub enum Params {
    Sequence {
        source: SequenceSource,
        exponents: Vec<f64>,
        tolerance: f64,
    },
    Exemplar {
        exemplar: Exemplar,
        cap: usize,
        exponents: Vec<f64>,
        tolerance: f64,
        lambda: f64,
    },
    IfsClassical {
        ifs: LimitIfs,
        depth: usize,
        seed_point: Option<Vec<f64>>,
        translation_depth: Option<usize>,
        contraction: Option<(usize, usize)>,
    },
    GapTriple {
        ifs: LimitIfs,
        entries: usize,
        interval: Option<(f64, f64)>,
        zeta_s: Vec<f64>,
        export_entries: bool,
    },
    PairTriple {
        ifs: LimitIfs,
        entries: usize,
        max_depth: Option<usize>,
        seed_pair: Option<(Vec<f64>, Vec<f64>)>,
        zeta_s: Vec<f64>,
        residue: bool,
        functionals: Vec<Functional>,
        export_entries: bool,
    },
    LinkCheck {
        ifs: LimitIfs,
        entries: usize,
        interval: Option<(f64, f64)>,
        d: Option<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: Kind,
    pub name: Option<String>,
    pub seed: u64,
    pub series: bool,
    pub params: Params,
    /// The config as read, echoed into the report.
    pub raw: Value,
}

/// Collects every problem found, each prefixed with its JSON path.
#[derive(Debug, Default)]
struct Checker {
    issues: Vec<String>,
    base: PathBuf,
    budget: Budget,
}

impl Checker {
    fn err(&mut self, path: &str, msg: impl Display) {
        self.issues.push(format!("{path}: {msg}"));
    }

    fn object<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a Map<String, Value>> {
        let m = v.as_object();
        if m.is_none() {
            self.err(path, "expected an object");
        }
        m
    }

    fn keys(&mut self, m: &Map<String, Value>, path: &str, allowed: &[&str]) {
        for k in m.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(&format!("{path}.{k}"), "unknown field");
            }
        }
    }

    fn required<'a>(&mut self, m: &'a Map<String, Value>, path: &str, key: &str) -> Option<&'a Value> {
        let v = m.get(key);
        if v.is_none() {
            self.err(&format!("{path}.{key}"), "missing required field");
        }
        v
    }

    fn number(&mut self, v: &Value, path: &str) -> Option<f64> {
        match v.as_f64() {
            Some(x) if x.is_finite() => Some(x),
            _ => {
                self.err(path, "expected a finite number");
                None
            }
        }
    }

    fn positive(&mut self, v: &Value, path: &str) -> Option<f64> {
        let x = self.number(v, path)?;
        if x > 0.0 {
            Some(x)
        } else {
            self.err(path, format!("must be positive, got {x}"));
            None
        }
    }

    fn integer(&mut self, v: &Value, path: &str, min: u64) -> Option<usize> {
        match v.as_u64() {
            Some(n) if n >= min => Some(n as usize),
            _ => {
                self.err(path, format!("expected an integer ≥ {min}"));
                None
            }
        }
    }

    fn boolean(&mut self, v: &Value, path: &str) -> Option<bool> {
        let b = v.as_bool();
        if b.is_none() {
            self.err(path, "expected true or false");
        }
        b
    }

    fn string<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a str> {
        let s = v.as_str();
        if s.is_none() {
            self.err(path, "expected a string");
        }
        s
    }

    fn array<'a>(&mut self, v: &'a Value, path: &str) -> Option<&'a Vec<Value>> {
        let a = v.as_array();
        if a.is_none() {
            self.err(path, "expected an array");
        }
        a
    }

    fn vector(&mut self, v: &Value, path: &str) -> Option<Vec<f64>> {
        let a = self.array(v, path)?;
        let xs: Vec<Option<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, x)| self.number(x, &format!("{path}[{i}]")))
            .collect();
        xs.into_iter().collect()
    }

    fn positives(&mut self, v: &Value, path: &str) -> Option<Vec<f64>> {
        let a = self.array(v, path)?;
        let xs: Vec<Option<f64>> = a
            .iter()
            .enumerate()
            .map(|(i, x)| self.positive(x, &format!("{path}[{i}]")))
            .collect();
        xs.into_iter().collect()
    }

    fn entries(&mut self, v: &Value, path: &str) -> Option<usize> {
        let n = self.integer(v, path, 1)?;
        if n > self.budget.entries {
            self.err(path, format!("{n} exceeds the entry budget {}", self.budget.entries));
            return None;
        }
        Some(n)
    }

    fn opt<'a>(m: &'a Map<String, Value>, key: &str) -> Option<&'a Value> {
        m.get(key).filter(|v| !v.is_null())
    }
}

/// Reads, parses and validates a config file.
pub fn load(path: &Path, budget: Budget) -> Result<ExperimentConfig, Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| vec![format!("{}: {e}", path.display())])?;
    let raw: Value = serde_json::from_str(&text).map_err(|e| vec![format!("$: invalid JSON: {e}")])?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    validate(raw, &base, budget)
}

/// Validates a parsed config. Relative file paths resolve against `base`.
pub fn validate(raw: Value, base: &Path, budget: Budget) -> Result<ExperimentConfig, Vec<String>> {
    let mut c = Checker {
        issues: Vec::new(),
        base: base.to_path_buf(),
        budget,
    };
    let cfg = check_root(&mut c, &raw);
    match cfg {
        Some((kind, name, seed, series, params)) if c.issues.is_empty() => Ok(ExperimentConfig {
            kind,
            name,
            seed,
            series,
            params,
            raw,
        }),
        _ => {
            if c.issues.is_empty() {
                c.issues.push("$: invalid config".into());
            }
            Err(c.issues)
        }
    }
}

type Root = (Kind, Option<String>, u64, bool, Params);

fn check_root(c: &mut Checker, raw: &Value) -> Option<Root> {
    let m = c.object(raw, "$")?;
    c.keys(m, "$", &["kind", "name", "seed", "series", "params"]);
    let kind = c.required(m, "$", "kind").and_then(|v| {
        let s = c.string(v, "$.kind")?;
        let k = Kind::parse(s);
        if k.is_none() {
            let names: Vec<&str> = Kind::ALL.iter().map(|k| k.name()).collect();
            c.err("$.kind", format!("unknown kind {s:?}, expected one of {}", names.join(", ")));
        }
        k
    });
    let name = Checker::opt(m, "name").and_then(|v| {
        let s = c.string(v, "$.name")?;
        if s.is_empty() || s.contains(['/', '\\']) || s.starts_with('.') {
            c.err("$.name", "must be a plain file stem");
            return None;
        }
        Some(s.to_string())
    });
    let seed = match Checker::opt(m, "seed") {
        Some(v) => match v.as_u64() {
            Some(s) => s,
            None => {
                c.err("$.seed", "expected a nonnegative integer");
                0
            }
        },
        None => 0,
    };
    let series = Checker::opt(m, "series").and_then(|v| c.boolean(v, "$.series")).unwrap_or(true);
    let params = c.required(m, "$", "params");
    let (kind, params) = (kind?, params?);
    let pm = c.object(params, "$.params")?;
    let params = match kind {
        Kind::SequenceAnalysis => check_sequence(c, pm),
        Kind::Exemplar => check_exemplar(c, pm),
        Kind::IfsClassical => check_ifs_classical(c, pm),
        Kind::GapTriple => check_gap(c, pm),
        Kind::PairTriple => check_pair(c, pm),
        Kind::LinkCheck => check_link(c, pm),
    }?;
    Some((kind, name, seed, series, params))
}

const P: &str = "$.params";

fn exponents_and_tolerance(c: &mut Checker, m: &Map<String, Value>) -> (Option<Vec<f64>>, Option<f64>) {
    let exponents = match Checker::opt(m, "exponents") {
        Some(v) => c.positives(v, &format!("{P}.exponents")),
        None => Some(Vec::new()),
    };
    let tolerance = match Checker::opt(m, "tolerance") {
        Some(v) => c.positive(v, &format!("{P}.tolerance")),
        None => Some(DEFAULT_TOLERANCE),
    };
    (exponents, tolerance)
}

fn check_sequence(c: &mut Checker, m: &Map<String, Value>) -> Option<Params> {
    c.keys(m, P, &["sequence", "exponents", "tolerance"]);
    let (exponents, tolerance) = exponents_and_tolerance(c, m);
    let source = c.required(m, P, "sequence").and_then(|v| check_source(c, v));
    Some(Params::Sequence {
        source: source?,
        exponents: exponents?,
        tolerance: tolerance?,
    })
}

fn check_source(c: &mut Checker, v: &Value) -> Option<SequenceSource> {
    let path = format!("{P}.sequence");
    let m = c.object(v, &path)?;
    c.keys(m, &path, &["values", "formula", "file"]);
    if m.len() != 1 {
        c.err(&path, "give exactly one of values, formula, file");
        return None;
    }
    if let Some(v) = m.get("values") {
        let p = format!("{path}.values");
        let xs = c.positives(v, &p)?;
        if xs.is_empty() {
            c.err(&p, "must not be empty");
            return None;
        }
        if xs.len() > c.budget.entries {
            c.err(&p, format!("{} values exceed the entry budget {}", xs.len(), c.budget.entries));
            return None;
        }
        return Some(SequenceSource::Values(xs));
    }
    if let Some(v) = m.get("formula") {
        let p = format!("{path}.formula");
        let f = c.object(v, &p)?;
        c.keys(f, &p, &["exponent", "log_exponent", "cap"]);
        let exponent = c.required(f, &p, "exponent").and_then(|v| c.positive(v, &format!("{p}.exponent")));
        let log_exponent = match Checker::opt(f, "log_exponent") {
            Some(v) => c.number(v, &format!("{p}.log_exponent")),
            None => Some(0.0),
        };
        let cap = c.required(f, &p, "cap").and_then(|v| c.entries(v, &format!("{p}.cap")));
        return Some(SequenceSource::Formula {
            exponent: exponent?,
            log_exponent: log_exponent?,
            cap: cap?,
        });
    }
    let p = format!("{path}.file");
    let s = c.string(&m["file"], &p)?;
    let file = c.base.join(s);
    if !file.is_file() {
        c.err(&p, format!("no such file {}", file.display()));
        return None;
    }
    Some(SequenceSource::File(file))
}

fn check_exemplar(c: &mut Checker, m: &Map<String, Value>) -> Option<Params> {
    c.keys(m, P, &["exemplar", "cap", "exponents", "tolerance", "lambda"]);
    let (exponents, tolerance) = exponents_and_tolerance(c, m);
    let cap = c.required(m, P, "cap").and_then(|v| c.entries(v, &format!("{P}.cap")));
    let lambda = match Checker::opt(m, "lambda") {
        Some(v) => c.number(v, &format!("{P}.lambda")).and_then(|l| {
            if l > 1.0 {
                Some(l)
            } else {
                c.err(&format!("{P}.lambda"), format!("must exceed 1, got {l}"));
                None
            }
        }),
        None => Some(2.0),
    };
    let exemplar = c.required(m, P, "exemplar").and_then(|v| check_exemplar_spec(c, v));
    Some(Params::Exemplar {
        exemplar: exemplar?,
        cap: cap?,
        exponents: exponents?,
        tolerance: tolerance?,
        lambda: lambda?,
    })
}

fn check_exemplar_spec(c: &mut Checker, v: &Value) -> Option<Exemplar> {
    let path = format!("{P}.exemplar");
    let m = c.object(v, &path)?;
    c.keys(m, &path, &["two_slope", "step"]);
    if m.len() != 1 {
        c.err(&path, "give exactly one of two_slope, step");
        return None;
    }
    if let Some(v) = m.get("two_slope") {
        let p = format!("{path}.two_slope");
        let t = c.object(v, &p)?;
        c.keys(t, &p, &["alpha", "beta", "gaps"]);
        let alpha = c.required(t, &p, "alpha").and_then(|v| c.positive(v, &format!("{p}.alpha")));
        let beta = c.required(t, &p, "beta").and_then(|v| c.positive(v, &format!("{p}.beta")));
        let gaps = c.required(t, &p, "gaps").and_then(|v| check_gaps(c, v, &format!("{p}.gaps")));
        let (alpha, beta, gaps) = (alpha?, beta?, gaps?);
        return match TwoSlopeSpec::new(alpha, beta, gaps) {
            Ok(s) => Some(Exemplar::TwoSlope(s)),
            Err(e) => {
                c.err(&p, e);
                None
            }
        };
    }
    let p = format!("{path}.step");
    let s = c.object(&m["step"], &p)?;
    c.keys(s, &p, &["q", "breaks"]);
    match (Checker::opt(s, "q"), Checker::opt(s, "breaks")) {
        (Some(q), None) => {
            let q = c.number(q, &format!("{p}.q"))?;
            match StepSpec::power(q) {
                Ok(s) => Some(Exemplar::Step(s)),
                Err(e) => {
                    c.err(&format!("{p}.q"), e);
                    None
                }
            }
        }
        (None, Some(b)) => {
            let bp = format!("{p}.breaks");
            let xs = c.positives(b, &bp)?;
            if xs.is_empty() || xs.windows(2).any(|w| w[0] >= w[1]) || xs[0] <= 1.0 {
                c.err(&bp, "breakpoints must increase strictly from above 1");
                return None;
            }
            Some(Exemplar::Step(StepSpec {
                breaks: fracspec::exemplars::StepBreaks::Custom(xs),
            }))
        }
        _ => {
            c.err(&p, "give exactly one of q, breaks");
            None
        }
    }
}

fn check_gaps(c: &mut Checker, v: &Value, path: &str) -> Option<Gaps> {
    if v.as_str() == Some("linear") {
        return Some(Gaps::Linear);
    }
    let Some(m) = v.as_object() else {
        c.err(path, "expected \"linear\", {\"constant\": a} or {\"custom\": [...]}");
        return None;
    };
    c.keys(m, path, &["constant", "custom"]);
    match (m.get("constant"), m.get("custom")) {
        (Some(a), None) => c.positive(a, &format!("{path}.constant")).map(Gaps::Constant),
        (None, Some(xs)) => {
            let p = format!("{path}.custom");
            let xs = c.positives(xs, &p)?;
            if xs.is_empty() {
                c.err(&p, "must not be empty");
                return None;
            }
            Some(Gaps::Custom(xs))
        }
        _ => {
            c.err(path, "give exactly one of constant, custom");
            None
        }
    }
}

fn check_ifs(c: &mut Checker, v: &Value, path: &str) -> Option<LimitIfs> {
    let m = c.object(v, path)?;
    c.keys(m, path, &["stationary", "periodic", "explicit", "osc_box"]);
    let forms = ["stationary", "periodic", "explicit"];
    let given: Vec<&str> = forms.iter().copied().filter(|k| m.contains_key(*k)).collect();
    if given.len() != 1 {
        c.err(path, "give exactly one of stationary, periodic, explicit");
        return None;
    }
    let form = given[0];
    let p = format!("{path}.{form}");
    let generation = if form == "stationary" {
        Generation::Stationary(check_level(c, &m[form], &p)?)
    } else {
        let levels = c.array(&m[form], &p)?;
        if levels.is_empty() {
            c.err(&p, "needs at least one level");
            return None;
        }
        let parsed: Vec<Option<Vec<Similarity>>> = levels
            .iter()
            .enumerate()
            .map(|(i, l)| check_level(c, l, &format!("{p}[{i}]")))
            .collect();
        let parsed: Vec<Vec<Similarity>> = parsed.into_iter().collect::<Option<_>>()?;
        if form == "periodic" {
            Generation::Periodic(parsed)
        } else {
            Generation::Explicit(parsed)
        }
    };
    let mut ifs = match LimitIfs::new(generation) {
        Ok(ifs) => ifs,
        Err(e) => {
            c.err(&p, e);
            return None;
        }
    };
    if let Some(b) = Checker::opt(m, "osc_box") {
        let bp = format!("{path}.osc_box");
        let bm = c.object(b, &bp)?;
        c.keys(bm, &bp, &["lo", "hi"]);
        let lo = c.required(bm, &bp, "lo").and_then(|v| c.vector(v, &format!("{bp}.lo")));
        let hi = c.required(bm, &bp, "hi").and_then(|v| c.vector(v, &format!("{bp}.hi")));
        ifs = match ifs.with_osc_box(lo?, hi?) {
            Ok(ifs) => ifs,
            Err(e) => {
                c.err(&bp, e);
                return None;
            }
        };
    }
    Some(ifs)
}

fn check_level(c: &mut Checker, v: &Value, path: &str) -> Option<Vec<Similarity>> {
    let maps = c.array(v, path)?;
    if maps.is_empty() {
        c.err(path, "needs at least one map");
        return None;
    }
    let parsed: Vec<Option<Similarity>> = maps
        .iter()
        .enumerate()
        .map(|(i, m)| check_map(c, m, &format!("{path}[{i}]")))
        .collect();
    parsed.into_iter().collect()
}

/// A number, or a rational string such as `"1/3"`.
fn scalar(c: &mut Checker, v: &Value, path: &str) -> Option<f64> {
    if let Some(s) = v.as_str() {
        return match parse_rational(s) {
            Some(r) => Some(num_traits::ToPrimitive::to_f64(&r).unwrap_or(f64::NAN)),
            None => {
                c.err(path, format!("not a rational number: {s:?}"));
                None
            }
        };
    }
    c.number(v, path)
}

fn check_map(c: &mut Checker, v: &Value, path: &str) -> Option<Similarity> {
    let m = c.object(v, path)?;
    c.keys(m, path, &["ratio", "translation", "matrix", "reflect"]);
    let ratio_v = c.required(m, path, "ratio");
    let translation_v = c.required(m, path, "translation");
    let rp = format!("{path}.ratio");
    let ratio = ratio_v.and_then(|v| scalar(c, v, &rp)).and_then(|r| {
        if r > 0.0 && r < 1.0 {
            Some(r)
        } else {
            c.err(&rp, format!("ratio must lie in (0,1), got {r}"));
            None
        }
    });
    let reflect = Checker::opt(m, "reflect")
        .and_then(|v| c.boolean(v, &format!("{path}.reflect")))
        .unwrap_or(false);
    let tp = format!("{path}.translation");
    let (ratio_v, translation_v) = (ratio_v?, translation_v?);
    if !translation_v.is_array() {
        if m.contains_key("matrix") {
            c.err(&format!("{path}.matrix"), "a scalar translation defines a map of the line; use reflect instead");
        }
        let t = scalar(c, translation_v, &tp);
        let (ratio, t) = (ratio?, t?);
        let built = match (ratio_v.as_str(), translation_v.as_str()) {
            (Some(r), Some(t)) => Similarity::line_rational(r, reflect, t),
            _ if reflect => Similarity::line_reflected(ratio, t),
            _ => Similarity::line(ratio, t),
        };
        return match built {
            Ok(s) => Some(s),
            Err(e) => {
                c.err(path, e);
                None
            }
        };
    }
    let t = c.vector(translation_v, &tp);
    let (ratio, t) = (ratio?, t?);
    let n = t.len();
    if n == 0 {
        c.err(&tp, "must not be empty");
        return None;
    }
    if reflect && n != 1 {
        c.err(&format!("{path}.reflect"), "reflect applies to maps of the line; give a matrix");
        return None;
    }
    let q = match Checker::opt(m, "matrix") {
        Some(v) => {
            let mp = format!("{path}.matrix");
            let rows = c.array(v, &mp)?;
            if rows.len() != n {
                c.err(&mp, format!("expected {n} rows to match the translation"));
                return None;
            }
            let rows: Vec<Option<Vec<f64>>> =
                rows.iter().enumerate().map(|(i, r)| c.vector(r, &format!("{mp}[{i}]"))).collect();
            let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Option<_>>()?;
            if let Some(i) = rows.iter().position(|r| r.len() != n) {
                c.err(&format!("{mp}[{i}]"), format!("expected {n} entries"));
                return None;
            }
            DMatrix::from_row_iterator(n, n, rows.into_iter().flatten())
        }
        None if reflect => DMatrix::from_element(1, 1, -1.0),
        None => DMatrix::identity(n, n),
    };
    match Similarity::new(ratio, q, DVector::from_vec(t)) {
        Ok(s) => Some(s),
        Err(e) => {
            c.err(path, e);
            None
        }
    }
}

fn interval(c: &mut Checker, m: &Map<String, Value>) -> Option<Option<(f64, f64)>> {
    match Checker::opt(m, "interval") {
        None => Some(None),
        Some(v) => {
            let p = format!("{P}.interval");
            let xs = c.vector(v, &p)?;
            if xs.len() != 2 || xs[0] >= xs[1] {
                c.err(&p, "expected [a, b] with a < b");
                return None;
            }
            Some(Some((xs[0], xs[1])))
        }
    }
}

fn zeta_points(c: &mut Checker, m: &Map<String, Value>) -> Option<Vec<f64>> {
    match Checker::opt(m, "zeta_s") {
        Some(v) => c.positives(v, &format!("{P}.zeta_s")),
        None => Some(Vec::new()),
    }
}

fn flag(c: &mut Checker, m: &Map<String, Value>, key: &str, default: bool) -> bool {
    Checker::opt(m, key)
        .and_then(|v| c.boolean(v, &format!("{P}.{key}")))
        .unwrap_or(default)
}

fn line_ifs(c: &mut Checker, ifs: &LimitIfs) -> bool {
    if ifs.dim() != 1 {
        c.err(&format!("{P}.ifs"), format!("needs an IFS on the line, got dimension {}", ifs.dim()));
        return false;
    }
    true
}

fn check_ifs_classical(c: &mut Checker, m: &Map<String, Value>) -> Option<Params> {
    c.keys(m, P, &["ifs", "depth", "seed_point", "translation_depth", "contraction"]);
    let ifs = c.required(m, P, "ifs").and_then(|v| check_ifs(c, v, &format!("{P}.ifs")));
    let depth = c.required(m, P, "depth").and_then(|v| c.integer(v, &format!("{P}.depth"), 1));
    let seed_point = match Checker::opt(m, "seed_point") {
        Some(v) => c.vector(v, &format!("{P}.seed_point")).map(Some),
        None => Some(None),
    };
    let translation_depth = match Checker::opt(m, "translation_depth") {
        Some(v) => c.integer(v, &format!("{P}.translation_depth"), 1).map(Some),
        None => Some(None),
    };
    let contraction = match Checker::opt(m, "contraction") {
        None => Some(None),
        Some(v) => {
            let p = format!("{P}.contraction");
            let cm = c.object(v, &p)?;
            c.keys(cm, &p, &["points", "depth"]);
            let points = c.required(cm, &p, "points").and_then(|v| c.integer(v, &format!("{p}.points"), 1));
            let depth = c.required(cm, &p, "depth").and_then(|v| c.integer(v, &format!("{p}.depth"), 1));
            Some(Some((points?, depth?)))
        }
    };
    let (ifs, depth, seed_point) = (ifs?, depth?, seed_point?);
    if let Some(s) = &seed_point {
        if s.len() != ifs.dim() {
            c.err(&format!("{P}.seed_point"), format!("expected {} coordinates", ifs.dim()));
        }
    }
    match ifs.word_count(depth) {
        Ok(n) if n <= c.budget.words => {}
        Ok(n) => c.err(&format!("{P}.depth"), format!("{n} words exceed the word budget {}", c.budget.words)),
        Err(e) => c.err(&format!("{P}.depth"), e),
    }
    if let Some((points, cdepth)) = contraction? {
        let words = ifs.word_count(cdepth).unwrap_or(u128::MAX).saturating_mul(points as u128);
        if words > c.budget.words {
            c.err(&format!("{P}.contraction"), format!("{words} images exceed the word budget {}", c.budget.words));
        }
    }
    if translation_depth?.is_some() && !ifs.translation_flag() {
        c.err(&format!("{P}.translation_depth"), "translation formula needs equal ratios within each level");
    }
    Some(Params::IfsClassical {
        ifs,
        depth,
        seed_point,
        translation_depth: translation_depth?,
        contraction: contraction?,
    })
}

fn check_gap(c: &mut Checker, m: &Map<String, Value>) -> Option<Params> {
    c.keys(m, P, &["ifs", "entries", "interval", "zeta_s", "export_entries"]);
    let ifs = c.required(m, P, "ifs").and_then(|v| check_ifs(c, v, &format!("{P}.ifs")));
    let entries = c.required(m, P, "entries").and_then(|v| c.entries(v, &format!("{P}.entries")));
    let interval = interval(c, m);
    let zeta_s = zeta_points(c, m);
    let export_entries = flag(c, m, "export_entries", false);
    let ifs = ifs?;
    if !line_ifs(c, &ifs) {
        return None;
    }
    Some(Params::GapTriple {
        ifs,
        entries: entries?,
        interval: interval?,
        zeta_s: zeta_s?,
        export_entries,
    })
}

fn check_pair(c: &mut Checker, m: &Map<String, Value>) -> Option<Params> {
    c.keys(
        m,
        P,
        &["ifs", "entries", "max_depth", "seed_pair", "zeta_s", "residue", "functionals", "export_entries"],
    );
    let ifs = c.required(m, P, "ifs").and_then(|v| check_ifs(c, v, &format!("{P}.ifs")));
    let entries = c.required(m, P, "entries").and_then(|v| c.entries(v, &format!("{P}.entries")));
    let max_depth = match Checker::opt(m, "max_depth") {
        Some(v) => c.integer(v, &format!("{P}.max_depth"), 1).map(Some),
        None => Some(None),
    };
    let seed_pair = match Checker::opt(m, "seed_pair") {
        None => Some(None),
        Some(v) => {
            let p = format!("{P}.seed_pair");
            let sm = c.object(v, &p)?;
            c.keys(sm, &p, &["x", "y"]);
            let x = c.required(sm, &p, "x").and_then(|v| c.vector(v, &format!("{p}.x")));
            let y = c.required(sm, &p, "y").and_then(|v| c.vector(v, &format!("{p}.y")));
            Some(Some((x?, y?)))
        }
    };
    let zeta_s = zeta_points(c, m);
    let residue = flag(c, m, "residue", true);
    let export_entries = flag(c, m, "export_entries", false);
    let ifs = ifs?;
    let functionals = match Checker::opt(m, "functionals") {
        None => Some(Vec::new()),
        Some(v) => {
            let p = format!("{P}.functionals");
            let items = c.array(v, &p)?;
            let fs: Vec<Option<Functional>> = items
                .iter()
                .enumerate()
                .map(|(i, f)| check_functional(c, f, &format!("{p}[{i}]"), ifs.dim()))
                .collect();
            fs.into_iter().collect()
        }
    };
    if let Some(Some((x, y))) = &seed_pair {
        if x.len() != ifs.dim() || y.len() != ifs.dim() {
            c.err(&format!("{P}.seed_pair"), format!("points need {} coordinates", ifs.dim()));
        }
    }
    Some(Params::PairTriple {
        ifs,
        entries: entries?,
        max_depth: max_depth?,
        seed_pair: seed_pair?,
        zeta_s: zeta_s?,
        residue,
        functionals: functionals?,
        export_entries,
    })
}

fn check_functional(c: &mut Checker, v: &Value, path: &str, dim: usize) -> Option<Functional> {
    let m = c.object(v, path)?;
    c.keys(m, path, &["name", "function", "method"]);
    let name = c.required(m, path, "name").and_then(|v| c.string(v, &format!("{path}.name")));
    let method = match Checker::opt(m, "method") {
        None => Some(Method::Ratio),
        Some(v) => match c.string(v, &format!("{path}.method")) {
            Some("ratio") => Some(Method::Ratio),
            Some("increment") => Some(Method::Increment),
            Some(s) => {
                c.err(&format!("{path}.method"), format!("expected \"ratio\" or \"increment\", got {s:?}"));
                None
            }
            None => None,
        },
    };
    let fp = format!("{path}.function");
    let function = c.required(m, path, "function").and_then(|v| check_test_function(c, v, &fp));
    let function = function?;
    if let Err(e) = function.validate(dim) {
        c.err(&fp, e);
        return None;
    }
    Some(Functional {
        name: name?.to_string(),
        function,
        method: method?,
    })
}

fn check_test_function(c: &mut Checker, v: &Value, path: &str) -> Option<TestFunction> {
    let m = c.object(v, path)?;
    c.keys(m, path, &["constant", "affine", "smoothed_indicator", "table"]);
    if m.len() != 1 {
        c.err(path, "give exactly one of constant, affine, smoothed_indicator, table");
        return None;
    }
    let (key, body) = m.iter().next().unwrap();
    let p = format!("{path}.{key}");
    match key.as_str() {
        "constant" => c.number(body, &p).map(TestFunction::Constant),
        "affine" => {
            let b = c.object(body, &p)?;
            c.keys(b, &p, &["gradient", "offset"]);
            let gradient = c.required(b, &p, "gradient").and_then(|v| c.vector(v, &format!("{p}.gradient")));
            let offset = match Checker::opt(b, "offset") {
                Some(v) => c.number(v, &format!("{p}.offset")),
                None => Some(0.0),
            };
            Some(TestFunction::Affine {
                gradient: gradient?,
                offset: offset?,
            })
        }
        "smoothed_indicator" => {
            let b = c.object(body, &p)?;
            c.keys(b, &p, &["lo", "hi", "ramp"]);
            let lo = c.required(b, &p, "lo").and_then(|v| c.vector(v, &format!("{p}.lo")));
            let hi = c.required(b, &p, "hi").and_then(|v| c.vector(v, &format!("{p}.hi")));
            let ramp = c.required(b, &p, "ramp").and_then(|v| c.positive(v, &format!("{p}.ramp")));
            Some(TestFunction::SmoothedIndicator {
                lo: lo?,
                hi: hi?,
                ramp: ramp?,
            })
        }
        _ => {
            let b = c.object(body, &p)?;
            c.keys(b, &p, &["points", "tolerance"]);
            let tolerance = c.required(b, &p, "tolerance").and_then(|v| c.positive(v, &format!("{p}.tolerance")));
            let pp = format!("{p}.points");
            let points = c.required(b, &p, "points").and_then(|v| c.array(v, &pp)).and_then(|items| {
                let pts: Vec<Option<(Vec<f64>, f64)>> = items
                    .iter()
                    .enumerate()
                    .map(|(i, item)| {
                        let ip = format!("{pp}[{i}]");
                        let o = c.object(item, &ip)?;
                        c.keys(o, &ip, &["x", "value"]);
                        let x = c.required(o, &ip, "x").and_then(|v| c.vector(v, &format!("{ip}.x")));
                        let value = c.required(o, &ip, "value").and_then(|v| c.number(v, &format!("{ip}.value")));
                        Some((x?, value?))
                    })
                    .collect();
                pts.into_iter().collect::<Option<Vec<_>>>()
            });
            Some(TestFunction::Table {
                points: points?,
                tolerance: tolerance?,
            })
        }
    }
}

fn check_link(c: &mut Checker, m: &Map<String, Value>) -> Option<Params> {
    c.keys(m, P, &["ifs", "entries", "interval", "d"]);
    let ifs = c.required(m, P, "ifs").and_then(|v| check_ifs(c, v, &format!("{P}.ifs")));
    let entries = c.required(m, P, "entries").and_then(|v| c.entries(v, &format!("{P}.entries")));
    let interval = interval(c, m);
    let d = match Checker::opt(m, "d") {
        None => Some(None),
        Some(v) => c.number(v, &format!("{P}.d")).and_then(|d| {
            if d > 0.0 && d <= 1.0 {
                Some(Some(d))
            } else {
                c.err(&format!("{P}.d"), format!("must lie in (0, 1], got {d}"));
                None
            }
        }),
    };
    let ifs = ifs?;
    if !line_ifs(c, &ifs) {
        return None;
    }
    let d = d?;
    if d.is_none() && !ifs.is_stationary() {
        c.err(&format!("{P}.d"), "required unless the IFS is stationary");
        return None;
    }
    Some(Params::LinkCheck {
        ifs,
        entries: entries?,
        interval: interval?,
        d,
    })
}
