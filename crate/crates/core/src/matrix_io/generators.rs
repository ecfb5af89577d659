//! Deterministic synthetic test matrices.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseMatrix, QrUpdatable};
use crate::rng;
use crate::scalar::Real;

/// Nonsymmetric 5-point convection-diffusion operator on a `grid × grid`
/// interior mesh of the unit square (Dirichlet boundary), scaled by `h²`.
///
/// Diagonal 4, north/south −1, west `−1 − c`, east `−1 + c` with
/// `c = peclet · h / 2` and `h = 1/(grid+1)`. Unknowns are ordered x-fastest.
pub fn conv_diff_2d<T: Real>(grid: usize, peclet: T) -> Result<CsrMatrix<T>> {
    if grid == 0 {
        return Err(Error::Argument("grid must be positive".into()));
    }
    let h = T::one() / T::from_usize_lossy(grid + 1);
    let c = peclet * h / T::lit(2.0);
    let one = T::one();
    let n = grid * grid;
    let mut trip = Vec::with_capacity(5 * n);
    for iy in 0..grid {
        for ix in 0..grid {
            let row = iy * grid + ix;
            if iy > 0 {
                trip.push((row, row - grid, -one));
            }
            if ix > 0 {
                trip.push((row, row - 1, -one - c));
            }
            trip.push((row, row, T::lit(4.0)));
            if ix + 1 < grid {
                trip.push((row, row + 1, -one + c));
            }
            if iy + 1 < grid {
                trip.push((row, row + grid, -one));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, &trip)
}

/// Ones on the subdiagonal: `A eⱼ = eⱼ₊₁` for `j < n`, `A eₙ = 0`.
pub fn shift<T: Real>(n: usize) -> Result<CsrMatrix<T>> {
    if n == 0 {
        return Err(Error::Argument("n must be positive".into()));
    }
    let trip: Vec<_> = (0..n - 1).map(|i| (i + 1, i, T::one())).collect();
    CsrMatrix::from_triplets(n, n, &trip)
}

/// Dense `Q (D + U) Qᵀ` with `Q` a random orthogonal matrix, `D` log-spaced
/// eigenvalues from 1 down to `1/cond`, and `U` strictly upper triangular
/// with `N(0, 0.25/n)` entries (non-normal part).
pub fn dense_random_spectrum<T: Real>(n: usize, cond: T, seed: u64) -> Result<CsrMatrix<T>> {
    if n == 0 {
        return Err(Error::Argument("n must be positive".into()));
    }
    if !(cond >= T::one()) || !cond.is_finite() {
        return Err(Error::Argument(format!("cond must be finite and at least 1, got {cond}")));
    }
    let mut r = rng::seeded(seed, rng::stream::GENERATOR);
    let g = DenseMatrix::from_col_major(n, n, rng::normal_vec(&mut r, n * n))?;
    let q = QrUpdatable::from_matrix(&g)?.thin_q();
    let mut t = DenseMatrix::zeros(n, n);
    let noise = T::lit(0.5) / T::from_usize_lossy(n).sqrt();
    for j in 0..n {
        let e = if n == 1 { T::zero() } else { T::from_usize_lossy(j) / T::from_usize_lossy(n - 1) };
        t.set(j, j, cond.powf(-e));
        for i in 0..j {
            t.set(i, j, noise * rng::normal::<T, _>(&mut r));
        }
    }
    let a = q.matmul(&t)?.matmul(&q.transpose())?;
    Ok(CsrMatrix::from_dense(&a))
}

/// Tridiagonal Toeplitz: `a` on the diagonal, `b` below, `c` above.
pub fn tridiag_toeplitz<T: Real>(n: usize, a: T, b: T, c: T) -> Result<CsrMatrix<T>> {
    if n == 0 {
        return Err(Error::Argument("n must be positive".into()));
    }
    let mut trip = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 {
            trip.push((i, i - 1, b));
        }
        trip.push((i, i, a));
        if i + 1 < n {
            trip.push((i, i + 1, c));
        }
    }
    CsrMatrix::from_triplets(n, n, &trip)
}

/// A named generator with its parameters, written `name:p1,p2,...`.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    ConvDiff2d { grid: usize, peclet: f64 },
    Shift { n: usize },
    /// `seed: None` defers to the run seed.
    DenseRandomSpectrum { n: usize, cond: f64, seed: Option<u64> },
    TridiagToeplitz { n: usize, a: f64, b: f64, c: f64 },
}

impl Generator {
    pub const NAMES: [&'static str; 4] = ["conv_diff_2d", "shift", "dense_random_spectrum", "tridiag_toeplitz"];

    pub fn name(&self) -> &'static str {
        match self {
            Generator::ConvDiff2d { .. } => "conv_diff_2d",
            Generator::Shift { .. } => "shift",
            Generator::DenseRandomSpectrum { .. } => "dense_random_spectrum",
            Generator::TridiagToeplitz { .. } => "tridiag_toeplitz",
        }
    }

    pub fn build<T: Real>(&self, default_seed: u64) -> Result<CsrMatrix<T>> {
        match *self {
            Generator::ConvDiff2d { grid, peclet } => conv_diff_2d(grid, T::lit(peclet)),
            Generator::Shift { n } => shift(n),
            Generator::DenseRandomSpectrum { n, cond, seed } => {
                dense_random_spectrum(n, T::lit(cond), seed.unwrap_or(default_seed))
            }
            Generator::TridiagToeplitz { n, a, b, c } => tridiag_toeplitz(n, T::lit(a), T::lit(b), T::lit(c)),
        }
    }

    pub fn from_parts(name: &str, params: &[f64]) -> Result<Self> {
        let want = |k: usize| -> Result<()> {
            if params.len() == k {
                Ok(())
            } else {
                Err(Error::Argument(format!("generator {name} takes {k} parameters, got {}", params.len())))
            }
        };
        let count = |v: f64| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 {
                Ok(v as usize)
            } else {
                Err(Error::Argument(format!("generator {name}: expected a non-negative integer, got {v}")))
            }
        };
        match name {
            "conv_diff_2d" => {
                want(2)?;
                Ok(Generator::ConvDiff2d { grid: count(params[0])?, peclet: params[1] })
            }
            "shift" => {
                want(1)?;
                Ok(Generator::Shift { n: count(params[0])? })
            }
            "dense_random_spectrum" => {
                if params.len() != 2 {
                    want(3)?;
                }
                let seed = params.get(2).map(|&s| count(s).map(|s| s as u64)).transpose()?;
                Ok(Generator::DenseRandomSpectrum { n: count(params[0])?, cond: params[1], seed })
            }
            "tridiag_toeplitz" => {
                want(4)?;
                Ok(Generator::TridiagToeplitz { n: count(params[0])?, a: params[1], b: params[2], c: params[3] })
            }
            other => Err(Error::Argument(format!(
                "unknown generator '{other}' (known: {})",
                Self::NAMES.join(", ")
            ))),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::ConvDiff2d { grid, peclet } => write!(f, "conv_diff_2d:{grid},{peclet}"),
            Generator::Shift { n } => write!(f, "shift:{n}"),
            Generator::DenseRandomSpectrum { n, cond, seed: Some(s) } => {
                write!(f, "dense_random_spectrum:{n},{cond},{s}")
            }
            Generator::DenseRandomSpectrum { n, cond, seed: None } => write!(f, "dense_random_spectrum:{n},{cond}"),
            Generator::TridiagToeplitz { n, a, b, c } => write!(f, "tridiag_toeplitz:{n},{a},{b},{c}"),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let params = rest
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<f64>().map_err(|_| Error::Argument(format!("bad generator parameter '{t}'"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(name.trim(), &params)
    }
}

/// Builds a generator by name; see [`Generator`] for parameter order.
pub fn generate<T: Real>(name: &str, params: &[f64], seed: u64) -> Result<CsrMatrix<T>> {
    Generator::from_parts(name, params)?.build(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_orientation() {
        let a: CsrMatrix<f64> = shift(4).unwrap();
        assert_eq!(a.nnz(), 3);
        assert_eq!(a.spmv(&[1.0, 0.0, 0.0, 0.0]).unwrap(), vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn laplacian_symmetric() {
        let a: CsrMatrix<f64> = conv_diff_2d(4, 0.0).unwrap();
        assert_eq!(a.to_dense(), a.transpose().to_dense());
        let b: CsrMatrix<f64> = conv_diff_2d(4, 50.0).unwrap();
        assert_ne!(b.to_dense(), b.transpose().to_dense());
    }

    #[test]
    fn parse_round_trip() {
        for s in ["conv_diff_2d:8,100", "shift:5", "dense_random_spectrum:6,1000,3", "tridiag_toeplitz:5,2,-1,-0.5"] {
            let g: Generator = s.parse().unwrap();
            assert_eq!(g.to_string(), s);
        }
        assert!("nope:1".parse::<Generator>().is_err());
        assert!("shift:2.5".parse::<Generator>().is_err());
        assert!("shift".parse::<Generator>().is_err());
    }
}
