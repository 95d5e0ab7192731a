//! Python bindings: eigenvalue sequences, IFS specs, gap and pair triples.

use fracspec::asymptotics::{
    analyze, c_bounds, classify_ideal, dixmier_trace_estimate, eccentricity_scan_auto, order_of_infinitesimal,
    EigenvalueSequence, LogProfile, SumKind, TraceMethod, DEFAULT_DT, DEFAULT_TOLERANCE,
};
use fracspec::exemplars::{Gaps, StepSpec, TwoSlopeSpec};
use fracspec::fractal_geometry::{
    attractor_cloud, box_dimension_estimate, cloud_extent, default_eps_grid, similarity_dimension,
    translation_dimension_formula, Generation, LimitIfs, Similarity, DEFAULT_WORD_BUDGET,
};
use fracspec::nalgebra::{DMatrix, DVector};
use fracspec::spectral_triples::{
    gap_triple_of_ifs, hausdorff_functional, minkowski_link_check, pair_triple, pair_zeta_partial, sample,
    spectral_dimension, zeta_partial, zeta_residue, Enumeration, GapTripleModel, PairTripleModel,
    SpectralModel, TestFunction,
};
use fracspec::stats::Interval;
use pyo3::create_exception;
use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(fracspec_py, FracspecError, PyValueError, "Numerical precondition failed.");

fn err(e: fracspec::Error) -> PyErr {
    FracspecError::new_err(e.to_string())
}

fn pair(i: Interval) -> (f64, f64) {
    (i.lo, i.hi)
}

#[pyclass(name = "EigenvalueSequence", module = "fracspec_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySequence {
    inner: EigenvalueSequence,
}

#[pymethods]
impl PySequence {
    /// Finite list, implicitly followed by zeros.
    #[staticmethod]
    fn from_values(values: Vec<f64>) -> PyResult<Self> {
        Ok(PySequence {
            inner: EigenvalueSequence::from_values(values).map_err(err)?,
        })
    }

    /// Leading terms of an infinite sequence; the tail is fitted when needed.
    #[staticmethod]
    fn from_prefix(values: Vec<f64>) -> PyResult<Self> {
        Ok(PySequence {
            inner: EigenvalueSequence::from_prefix(values).map_err(err)?,
        })
    }

    /// Two-slope exemplar; `gap=None` gives `a_n = n`, a number gives constant gaps.
    #[staticmethod]
    #[pyo3(signature = (alpha, beta, cap, gap=None))]
    fn two_slope(alpha: f64, beta: f64, cap: usize, gap: Option<f64>) -> PyResult<Self> {
        let gaps = gap.map_or(Gaps::Linear, Gaps::Constant);
        let spec = TwoSlopeSpec::new(alpha, beta, gaps).map_err(err)?;
        Ok(PySequence {
            inner: spec.sequence(cap).map_err(err)?,
        })
    }

    /// Step exemplar with breakpoints `round(e^{n^q})`.
    #[staticmethod]
    fn step(q: f64, cap: usize) -> PyResult<Self> {
        let spec = StepSpec::power(q).map_err(err)?;
        Ok(PySequence {
            inner: spec.sequence(cap).map_err(err)?,
        })
    }

    #[getter]
    fn cap(&self) -> usize {
        self.inner.cap()
    }

    #[getter]
    fn exhausted(&self) -> bool {
        self.inner.is_exhausted()
    }

    fn __len__(&self) -> usize {
        self.inner.cap()
    }

    fn __repr__(&self) -> String {
        format!("EigenvalueSequence(cap={}, exhausted={})", self.inner.cap(), self.inner.is_exhausted())
    }

    /// `μ_n`, 1-based.
    fn get(&self, n: usize) -> PyResult<f64> {
        if n == 0 {
            return Err(PyIndexError::new_err("indices start at 1"));
        }
        self.inner.get(n).map_err(|e| PyIndexError::new_err(e.to_string()))
    }

    #[pyo3(signature = (upto=None))]
    fn values(&self, upto: Option<usize>) -> Vec<f64> {
        let n = upto.unwrap_or(self.inner.cap()).min(self.inner.cap());
        self.inner.iter().take(n).collect()
    }

    fn power(&self, alpha: f64) -> PyResult<Self> {
        Ok(PySequence {
            inner: self.inner.power(alpha).map_err(err)?,
        })
    }

    /// `(value, lo, hi)` of the order of infinitesimal.
    fn order(&self) -> PyResult<(f64, f64, f64)> {
        let o = order_of_infinitesimal(&self.inner).map_err(err)?;
        Ok((o.value, o.interval.lo, o.interval.hi))
    }

    fn c_bounds<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let profile = LogProfile::from_sequence(&self.inner, DEFAULT_DT).map_err(err)?;
        let c = c_bounds(&profile).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("lower", c.lower)?;
        d.set_item("upper", c.upper)?;
        d.set_item("lower_interval", pair(c.lower_interval))?;
        d.set_item("upper_interval", pair(c.upper_interval))?;
        d.set_item("upper_grid_max", c.upper_grid_max)?;
        Ok(d)
    }

    #[pyo3(signature = (alpha=1.0))]
    fn classify<'py>(&self, py: Python<'py>, alpha: f64) -> PyResult<Bound<'py, PyDict>> {
        let r = classify_ideal(&self.inner, alpha).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("classification", r.classification.name())?;
        d.set_item("memberships", r.memberships.iter().map(|c| c.name()).collect::<Vec<_>>())?;
        d.set_item("exponent", r.exponent)?;
        d.set_item("log_exponent", r.log_exponent)?;
        Ok(d)
    }

    #[pyo3(signature = (tolerance=DEFAULT_TOLERANCE))]
    fn eccentricity<'py>(&self, py: Python<'py>, tolerance: f64) -> PyResult<Bound<'py, PyDict>> {
        let s = eccentricity_scan_auto(&self.inner, tolerance).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("kind", if s.kind == SumKind::TraceClass { "TRACE_CLASS" } else { "NON_TRACE_CLASS" })?;
        d.set_item("accepted", s.accepted.clone())?;
        d.set_item("min_gap", s.min_gap)?;
        d.set_item("min_gap_at", s.min_gap_at)?;
        d.set_item("trend_eccentric", s.trend_eccentric())?;
        Ok(d)
    }

    fn dixmier<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let e = dixmier_trace_estimate(&self.inner).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("value", e.value)?;
        d.set_item("band", pair(e.band))?;
        d.set_item("ratio_value", e.ratio_value)?;
        d.set_item("ratio_band", pair(e.ratio_band))?;
        d.set_item("measurable", e.measurable())?;
        Ok(d)
    }

    /// Order, bounds, dimension, classification and eccentricity in one report.
    fn analyze<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = analyze(&self.inner).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("ord", r.order.value)?;
        d.set_item("ord_interval", pair(r.order.interval))?;
        d.set_item("dimension", r.dimension)?;
        d.set_item("dimension_interval", pair(r.dimension_interval))?;
        d.set_item("c_lower", r.c_bounds.lower)?;
        d.set_item("c_upper", r.c_bounds.upper)?;
        d.set_item("classification", r.classification.name())?;
        d.set_item("traceable_at_1", r.traceable_at_1)?;
        d.set_item("eccentric_indices", r.scan.accepted.len())?;
        d.set_item("sandwich", r.sandwich_holds(0.0))?;
        d.set_item("dixmier", r.dixmier.map(|x| (x.value, x.band.lo, x.band.hi)))?;
        Ok(d)
    }
}

#[pyclass(name = "Ifs", module = "fracspec_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyIfs {
    inner: LimitIfs,
}

fn line_level(ratios: &[f64], translations: &[f64]) -> PyResult<Vec<Similarity>> {
    if ratios.len() != translations.len() {
        return Err(PyValueError::new_err("ratios and translations differ in length"));
    }
    ratios
        .iter()
        .zip(translations)
        .map(|(&r, &t)| Similarity::line(r, t).map_err(err))
        .collect()
}

#[pymethods]
impl PyIfs {
    /// Stationary IFS of maps `x ↦ r·x + t` on the line.
    #[staticmethod]
    fn line(ratios: Vec<f64>, translations: Vec<f64>) -> PyResult<Self> {
        Ok(PyIfs {
            inner: LimitIfs::line(&ratios, &translations).map_err(err)?,
        })
    }

    /// Line maps given exactly, e.g. `[("1/3", "0"), ("1/3", "2/3")]`.
    #[staticmethod]
    fn line_rational(maps: Vec<(String, String)>) -> PyResult<Self> {
        let maps = maps
            .iter()
            .map(|(r, t)| Similarity::line_rational(r, false, t).map_err(err))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyIfs {
            inner: LimitIfs::stationary(maps).map_err(err)?,
        })
    }

    /// Levels `(ratios, translations)` repeated cyclically.
    #[staticmethod]
    fn periodic_line(levels: Vec<(Vec<f64>, Vec<f64>)>) -> PyResult<Self> {
        let block = levels
            .iter()
            .map(|(r, t)| line_level(r, t))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyIfs {
            inner: LimitIfs::new(Generation::Periodic(block)).map_err(err)?,
        })
    }

    /// Stationary IFS of similarities `(ratio, orthogonal rows, translation)` in ℝⁿ.
    #[staticmethod]
    fn similarities(maps: Vec<(f64, Vec<Vec<f64>>, Vec<f64>)>) -> PyResult<Self> {
        let maps = maps
            .into_iter()
            .map(|(r, q, t)| {
                let n = t.len();
                if q.len() != n || q.iter().any(|row| row.len() != n) {
                    return Err(PyValueError::new_err("matrix must be n×n for a translation of length n"));
                }
                let q = DMatrix::from_row_iterator(n, n, q.into_iter().flatten());
                Similarity::new(r, q, DVector::from_vec(t)).map_err(err)
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyIfs {
            inner: LimitIfs::stationary(maps).map_err(err)?,
        })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn stationary(&self) -> bool {
        self.inner.is_stationary()
    }

    fn similarity_dimension(&self) -> PyResult<f64> {
        similarity_dimension(&self.inner).map_err(err)
    }

    /// Closed form when the levels repeat, else the limsup of partial ratios.
    fn translation_dimension(&self, depth: usize) -> PyResult<f64> {
        translation_dimension_formula(&self.inner, depth).map(|t| t.value).map_err(err)
    }

    /// `(slope, lower, upper)` from box counts of the depth-`depth` cloud.
    fn box_dimension(&self, depth: usize) -> PyResult<(f64, f64, f64)> {
        let seed = self.inner.level(1).map_err(err)?[0].fixed_point();
        let cloud: Vec<Vec<f64>> = attractor_cloud(&self.inner, depth, &seed, DEFAULT_WORD_BUDGET)
            .map_err(err)?
            .into_iter()
            .map(|p| p.1)
            .collect();
        let mut scale = 1.0;
        for n in 1..=depth {
            scale *= self.inner.level_ratios(n).map_err(err)?.into_iter().fold(0.0, f64::max);
        }
        let resolution = scale * cloud_extent(&cloud).max(f64::MIN_POSITIVE);
        let b = box_dimension_estimate(&cloud, &default_eps_grid(&cloud, resolution), resolution).map_err(err)?;
        Ok((b.slope, b.lower, b.upper))
    }

    fn __repr__(&self) -> String {
        format!("Ifs(dim={}, stationary={})", self.inner.dim(), self.inner.is_stationary())
    }
}

#[pyclass(name = "TestFunction", module = "fracspec_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTestFunction {
    inner: TestFunction,
}

#[pymethods]
impl PyTestFunction {
    #[staticmethod]
    fn constant(c: f64) -> Self {
        PyTestFunction {
            inner: TestFunction::Constant(c),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (gradient, offset=0.0))]
    fn affine(gradient: Vec<f64>, offset: f64) -> Self {
        PyTestFunction {
            inner: TestFunction::Affine { gradient, offset },
        }
    }

    #[staticmethod]
    fn smoothed_indicator(lo: Vec<f64>, hi: Vec<f64>, ramp: f64) -> Self {
        PyTestFunction {
            inner: TestFunction::SmoothedIndicator { lo, hi, ramp },
        }
    }

    #[staticmethod]
    fn table(points: Vec<(Vec<f64>, f64)>, tolerance: f64) -> Self {
        PyTestFunction {
            inner: TestFunction::Table { points, tolerance },
        }
    }

    fn __call__(&self, x: Vec<f64>) -> Option<f64> {
        self.inner.eval(&x)
    }
}

fn dimension_dict<'py, M: SpectralModel>(py: Python<'py>, model: &M) -> PyResult<Bound<'py, PyDict>> {
    let s = spectral_dimension(model).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("value", s.value)?;
    d.set_item("interval", pair(s.interval))?;
    d.set_item("ord", s.order.value)?;
    d.set_item("log_ratio", s.log_ratio)?;
    d.set_item("reference", model.reference_dimension().ok())?;
    Ok(d)
}

fn method(name: &str) -> PyResult<TraceMethod> {
    match name {
        "ratio" => Ok(TraceMethod::Ratio),
        "increment" => Ok(TraceMethod::Increment),
        _ => Err(PyValueError::new_err(format!("method must be 'ratio' or 'increment', got {name:?}"))),
    }
}

#[pyclass(name = "GapTriple", module = "fracspec_py", frozen)]
struct PyGapTriple {
    inner: GapTripleModel,
}

#[pymethods]
impl PyGapTriple {
    /// Largest gaps of a line IFS attractor, two entries per gap.
    #[new]
    #[pyo3(signature = (ifs, entries, interval=None))]
    fn new(ifs: &PyIfs, entries: usize, interval: Option<(f64, f64)>) -> PyResult<Self> {
        Ok(PyGapTriple {
            inner: gap_triple_of_ifs(&ifs.inner, entries, interval).map_err(err)?,
        })
    }

    #[getter]
    fn gap_count(&self) -> usize {
        self.inner.gap_count()
    }

    fn eigen(&self) -> PySequence {
        PySequence {
            inner: self.inner.eigen().clone(),
        }
    }

    fn spectral_dimension<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        dimension_dict(py, &self.inner)
    }

    /// `(value, error)` of `Σ μ_k^s`.
    fn zeta(&self, s: f64) -> PyResult<(f64, f64)> {
        let z = zeta_partial(&self.inner, s, None).map_err(err)?;
        Ok((z.value, z.tail.error))
    }

    /// Both sides of the trace and Minkowski content identity at `d`.
    fn minkowski_link<'py>(&self, py: Python<'py>, d: f64) -> PyResult<Bound<'py, PyDict>> {
        let l = minkowski_link_check(&self.inner, d).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("trace", l.trace.value)?;
        out.set_item("trace_band", pair(l.trace.band))?;
        out.set_item("minkowski", l.minkowski.value)?;
        out.set_item("rhs", l.rhs_value)?;
        out.set_item("rhs_band", pair(l.rhs_band))?;
        out.set_item("lattice", l.lattice)?;
        out.set_item("overlap", l.overlap)?;
        out.set_item("asserted", l.asserted)?;
        Ok(out)
    }
}

#[pyclass(name = "PairTriple", module = "fracspec_py", frozen)]
struct PyPairTriple {
    inner: PairTripleModel,
}

#[pymethods]
impl PyPairTriple {
    /// Word pairs `(w_σ x, w_σ y)` by decreasing eigenvalue.
    #[new]
    #[pyo3(signature = (ifs, entries, max_depth=None, seed=None))]
    fn new(ifs: &PyIfs, entries: usize, max_depth: Option<usize>, seed: Option<(Vec<f64>, Vec<f64>)>) -> PyResult<Self> {
        let limits = Enumeration {
            max_entries: entries,
            max_depth,
        };
        Ok(PyPairTriple {
            inner: pair_triple(&ifs.inner, seed, limits).map_err(err)?,
        })
    }

    #[getter]
    fn word_count(&self) -> usize {
        self.inner.word_count()
    }

    fn eigen(&self) -> PySequence {
        PySequence {
            inner: self.inner.eigen().clone(),
        }
    }

    fn spectral_dimension<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        dimension_dict(py, &self.inner)
    }

    fn critical_exponent(&self) -> Option<f64> {
        self.inner.critical_exponent()
    }

    fn level_boundaries(&self) -> Vec<usize> {
        self.inner.level_boundaries()
    }

    /// `(value, error, closed form)` of `Σ μ_k^s`.
    fn zeta(&self, s: f64) -> PyResult<(f64, f64, Option<f64>)> {
        let z = pair_zeta_partial(&self.inner, s, None).map_err(err)?;
        Ok((z.value, z.tail.error, z.closed_form))
    }

    /// `(analytic, numeric, numeric error)` of `lim (s−d) ζ(s)`.
    fn zeta_residue(&self, d: f64) -> PyResult<(f64, f64, f64)> {
        let r = zeta_residue(&self.inner, d).map_err(err)?;
        Ok((r.analytic, r.numeric, r.numeric_error))
    }

    /// `(value, lo, hi)` of the normalized functional of `f` at exponent `d`
    /// (the critical exponent by default).
    #[pyo3(signature = (f, d=None, method="ratio"))]
    fn hausdorff_functional(&self, f: &PyTestFunction, d: Option<f64>, method: &str) -> PyResult<(f64, f64, f64)> {
        let m = self::method(method)?;
        let d = match d.or_else(|| self.inner.critical_exponent()) {
            Some(d) => d,
            None => spectral_dimension(&self.inner).map_err(err)?.value,
        };
        let samples = sample(&self.inner, &f.inner).map_err(err)?;
        let boundaries = self.inner.level_boundaries();
        let late = &boundaries[boundaries.len() / 2..];
        let subseq = (m == TraceMethod::Increment && late.len() >= 2).then_some(late);
        let t = hausdorff_functional(&self.inner, &samples, d, subseq, m).map_err(err)?;
        Ok((t.value, t.band.lo, t.band.hi))
    }
}

#[pymodule]
fn fracspec_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("FracspecError", m.py().get_type::<FracspecError>())?;
    m.add_class::<PySequence>()?;
    m.add_class::<PyIfs>()?;
    m.add_class::<PyTestFunction>()?;
    m.add_class::<PyGapTriple>()?;
    m.add_class::<PyPairTriple>()?;
    Ok(())
}
