use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

const ORTHOGONAL_TOL: f64 = 1e-12;

/// Exact form of a similarity of the line, `x ↦ sign·ratio·x + translation`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalLineMap {
    pub ratio: BigRational,
    pub reflect: bool,
    pub translation: BigRational,
}

impl RationalLineMap {
    pub fn apply(&self, x: &BigRational) -> BigRational {
        let y = &self.ratio * x;
        if self.reflect {
            &self.translation - y
        } else {
            y + &self.translation
        }
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal like `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q == BigInt::from(0) {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let num: BigInt = digits.parse().ok()?;
        let den = BigInt::from(10).pow(frac.len() as u32);
        let r = BigRational::new(num, den);
        return Some(if neg { -r } else { r });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

/// `w(x) = λ·Q·x + t` with `Q` orthogonal and `0 < λ < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Similarity {
    ratio: f64,
    orthogonal: DMatrix<f64>,
    translation: DVector<f64>,
    exact: Option<RationalLineMap>,
}

impl Similarity {
    pub fn new(ratio: f64, orthogonal: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidSpec(format!("ratio must lie in (0,1), got {ratio}")));
        }
        let n = translation.len();
        if n == 0 || orthogonal.nrows() != n || orthogonal.ncols() != n {
            return Err(Error::InvalidSpec(format!(
                "matrix is {}x{} but translation has length {n}",
                orthogonal.nrows(),
                orthogonal.ncols()
            )));
        }
        let defect = (orthogonal.transpose() * &orthogonal - DMatrix::identity(n, n)).amax();
        if defect > ORTHOGONAL_TOL {
            return Err(Error::InvalidSpec(format!(
                "matrix is not orthogonal (|QᵀQ − I| = {defect:.3e})"
            )));
        }
        if translation.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidSpec("translation must be finite".into()));
        }
        Ok(Similarity {
            ratio,
            orthogonal,
            translation,
            exact: None,
        })
    }

    /// `x ↦ ratio·x + translation` on the line.
    pub fn line(ratio: f64, translation: f64) -> Result<Self> {
        Self::new(ratio, DMatrix::identity(1, 1), DVector::from_element(1, translation))
    }

    /// `x ↦ translation − ratio·x` on the line.
    pub fn line_reflected(ratio: f64, translation: f64) -> Result<Self> {
        Self::new(ratio, DMatrix::from_element(1, 1, -1.0), DVector::from_element(1, translation))
    }

    /// Line map with exact rational coefficients, e.g. `("1/3", false, "2/3")`.
    pub fn line_rational(ratio: &str, reflect: bool, translation: &str) -> Result<Self> {
        let r = parse_rational(ratio)
            .ok_or_else(|| Error::InvalidSpec(format!("not a rational number: {ratio:?}")))?;
        let t = parse_rational(translation)
            .ok_or_else(|| Error::InvalidSpec(format!("not a rational number: {translation:?}")))?;
        let rf = to_f64(&r);
        let tf = to_f64(&t);
        let mut s = if reflect {
            Self::line_reflected(rf, tf)?
        } else {
            Self::line(rf, tf)?
        };
        s.exact = Some(RationalLineMap {
            ratio: r,
            reflect,
            translation: t,
        });
        Ok(s)
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn orthogonal(&self) -> &DMatrix<f64> {
        &self.orthogonal
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn exact(&self) -> Option<&RationalLineMap> {
        self.exact.as_ref()
    }

    /// Same map with the ambient space scaled by `c`: `x ↦ c·w(x/c)`.
    pub fn conjugate_scale(&self, c: f64) -> Self {
        Similarity {
            ratio: self.ratio,
            orthogonal: self.orthogonal.clone(),
            translation: &self.translation * c,
            exact: None,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.to_affine().apply(x)
    }

    pub fn to_affine(&self) -> Affine {
        let n = self.dim();
        let mut lin = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                lin.push(self.ratio * self.orthogonal[(i, j)]);
            }
        }
        Affine {
            dim: n,
            lin,
            t: self.translation.iter().copied().collect(),
            scale: self.ratio,
        }
    }

    /// Unique fixed point `x = (I − λQ)^{-1} t`.
    pub fn fixed_point(&self) -> Vec<f64> {
        let n = self.dim();
        let m = DMatrix::identity(n, n) - &self.orthogonal * self.ratio;
        let x = m
            .lu()
            .solve(&self.translation)
            .expect("I − λQ is invertible for λ < 1");
        x.iter().copied().collect()
    }
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Composed similarity stored as a dense affine map with its scale factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine {
    pub dim: usize,
    /// Row-major `dim × dim` linear part.
    pub lin: Vec<f64>,
    pub t: Vec<f64>,
    pub scale: f64,
}

impl Affine {
    pub fn identity(dim: usize) -> Self {
        let mut lin = vec![0.0; dim * dim];
        for i in 0..dim {
            lin[i * dim + i] = 1.0;
        }
        Affine {
            dim,
            lin,
            t: vec![0.0; dim],
            scale: 1.0,
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|i| {
                let row = &self.lin[i * n..(i + 1) * n];
                row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + self.t[i]
            })
            .collect()
    }

    /// `self ∘ other`.
    pub fn then_inner(&self, other: &Affine) -> Affine {
        let n = self.dim;
        let mut lin = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                lin[i * n + j] = (0..n).map(|k| self.lin[i * n + k] * other.lin[k * n + j]).sum();
            }
        }
        let t = self.apply(&other.t);
        Affine {
            dim: n,
            lin,
            t,
            scale: self.scale * other.scale,
        }
    }
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_similarity_scales_distances() {
        let (c, s) = (0.6, 0.8);
        let q = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let w = Similarity::new(0.5, q, DVector::from_vec(vec![1.0, 2.0])).unwrap();
        let (x, y) = ([0.3, -1.2], [2.0, 0.7]);
        let ratio = distance(&w.apply(&x), &w.apply(&y)) / distance(&x, &y);
        assert!((ratio - 0.5).abs() < 1e-12 * 0.5);
        let p = w.fixed_point();
        assert!(distance(&w.apply(&p), &p) < 1e-12);
    }

    #[test]
    fn rejects_bad_maps() {
        assert!(Similarity::line(1.0, 0.0).is_err());
        let q = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(Similarity::new(0.5, q, DVector::zeros(2)).is_err());
    }

    #[test]
    fn composition_order() {
        let a = Similarity::line(0.5, 1.0).unwrap().to_affine();
        let b = Similarity::line_reflected(0.25, 2.0).unwrap().to_affine();
        let ab = a.then_inner(&b);
        let x = [0.7];
        assert!((ab.apply(&x)[0] - a.apply(&b.apply(&x))[0]).abs() < 1e-15);
        assert_eq!(ab.scale, 0.125);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("2/6"), Some(BigRational::new(1.into(), 3.into())));
        assert_eq!(parse_rational("0.25"), Some(BigRational::new(1.into(), 4.into())));
        assert_eq!(parse_rational("-3"), Some(BigRational::from_integer((-3).into())));
        assert_eq!(parse_rational("1/0"), None);
        let w = Similarity::line_rational("1/3", false, "2/3").unwrap();
        let x = w.exact().unwrap().apply(&BigRational::from_integer(1.into()));
        assert_eq!(x, BigRational::from_integer(1.into()));
    }
}
