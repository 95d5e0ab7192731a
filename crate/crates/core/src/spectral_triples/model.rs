use std::io::{self, Write};

use crate::asymptotics::{order_of_infinitesimal, EigenvalueSequence, OrderEstimate};
use crate::error::Result;
use crate::stats::Interval;

/// Eigenvalue data of a spectral triple: the characteristic values `μ_k` of
/// `D^{-1}` with multiplicity, and the two tag points of each 2×2 block.
pub trait SpectralModel {
    /// `μ_k` in nonincreasing order, one entry per eigenvalue.
    fn eigen(&self) -> &EigenvalueSequence;

    fn dim(&self) -> usize;

    /// Tag points `(x_k, y_k)` of entry `k` (1-based).
    fn tags(&self, k: usize) -> (&[f64], &[f64]);

    /// Dimension used for the `s > d` guard of zeta sums.
    fn reference_dimension(&self) -> Result<f64> {
        Ok(spectral_dimension(self)?.value)
    }

    /// Residue-free extra estimate for the dimension, if the model has one.
    fn log_ratio_dimension(&self) -> Option<f64> {
        None
    }

    /// Eigen-entries as CSV with header `k,mu_k,tag_x...,tag_y...`.
    fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        let dim = self.dim();
        let coord = |p: &str| -> Vec<String> {
            if dim == 1 {
                vec![p.to_string()]
            } else {
                (1..=dim).map(|i| format!("{p}{i}")).collect()
            }
        };
        let mut header = vec!["k".to_string(), "mu_k".to_string()];
        header.extend(coord("tag_x"));
        header.extend(coord("tag_y"));
        writeln!(w, "{}", header.join(","))?;
        for k in 1..=self.eigen().cap() {
            let mu = self.eigen().get(k).map_err(io::Error::other)?;
            let (x, y) = self.tags(k);
            write!(w, "{k},{mu:.16e}")?;
            for v in x.iter().chain(y) {
                write!(w, ",{v:.16e}")?;
            }
            writeln!(w)?;
        }
        w.flush()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDimension {
    /// `1/ord` of the eigenvalue sequence.
    pub value: f64,
    pub interval: Interval,
    pub order: OrderEstimate,
    /// `max log n / |log μ_n|` over the late half of the entries (gap triples).
    pub log_ratio: Option<f64>,
}

pub fn spectral_dimension<M: SpectralModel + ?Sized>(model: &M) -> Result<SpectralDimension> {
    let order = order_of_infinitesimal(model.eigen())?;
    let (value, interval) = order.dimension();
    Ok(SpectralDimension {
        value,
        interval,
        order,
        log_ratio: model.log_ratio_dimension(),
    })
}

/// `max log n / |log μ_n|` over `n ∈ [√N, N]`.
pub(crate) fn log_ratio_estimate(seq: &EigenvalueSequence) -> Option<f64> {
    let cap = seq.cap();
    let lo = ((cap as f64).sqrt() as usize).max(2);
    (lo..=cap)
        .filter_map(|n| {
            let l = seq.get(n).ok()?.ln().abs();
            (l > 1e-12).then(|| (n as f64).ln() / l)
        })
        .max_by(f64::total_cmp)
}
