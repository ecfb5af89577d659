use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::matrix_io::{read_matrix_market, read_vector, Generator};
use crate::rng;
use crate::scalar::Real;

/// Default `δ` for `b = e₁ + δ e` (`e` the all-ones vector).
pub const E1_PERTURBATION: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    File(PathBuf),
    Generated(Generator),
}

impl fmt::Display for MatrixSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixSource::File(p) => write!(f, "{}", p.display()),
            MatrixSource::Generated(g) => write!(f, "{g}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RhsSpec {
    /// Standard normal entries; `None` takes the run seed.
    Gaussian(Option<u64>),
    E1,
    E1Perturbed(f64),
    Ones,
    File(PathBuf),
}

impl RhsSpec {
    pub fn build<T: Real>(&self, n: usize, seed: u64) -> Result<Vec<T>> {
        let b = match self {
            RhsSpec::Gaussian(s) => rng::normal_vec(&mut rng::seeded(s.unwrap_or(seed), rng::stream::RHS), n),
            RhsSpec::E1 => crate::linalg::vector::unit(n, 0),
            RhsSpec::E1Perturbed(delta) => {
                let mut b = vec![T::lit(*delta); n];
                b[0] += T::one();
                b
            }
            RhsSpec::Ones => vec![T::one(); n],
            RhsSpec::File(p) => read_vector(p)?,
        };
        if b.len() != n {
            return Err(Error::Argument(format!("right-hand side has length {}, matrix has {n} rows", b.len())));
        }
        Ok(b)
    }
}

impl fmt::Display for RhsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhsSpec::Gaussian(None) => f.write_str("gaussian"),
            RhsSpec::Gaussian(Some(s)) => write!(f, "gaussian:{s}"),
            RhsSpec::E1 => f.write_str("e1"),
            RhsSpec::E1Perturbed(d) if *d == E1_PERTURBATION => f.write_str("e1pert"),
            RhsSpec::E1Perturbed(d) => write!(f, "e1pert:{d:e}"),
            RhsSpec::Ones => f.write_str("ones"),
            RhsSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl FromStr for RhsSpec {
    type Err = Error;

    /// `gaussian[:seed]`, `e1`, `e1pert[:delta]`, `ones`, `file:<path>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let bad = || Error::Argument(format!("invalid right-hand side '{s}'"));
        match (name, arg) {
            ("gaussian", None) => Ok(RhsSpec::Gaussian(None)),
            ("gaussian", Some(a)) => Ok(RhsSpec::Gaussian(Some(a.parse().map_err(|_| bad())?))),
            ("e1", None) => Ok(RhsSpec::E1),
            ("e1pert", None) => Ok(RhsSpec::E1Perturbed(E1_PERTURBATION)),
            ("e1pert", Some(a)) => Ok(RhsSpec::E1Perturbed(a.parse().map_err(|_| bad())?)),
            ("ones", None) => Ok(RhsSpec::Ones),
            ("file", Some(p)) if !p.is_empty() => Ok(RhsSpec::File(PathBuf::from(p))),
            _ => Err(bad()),
        }
    }
}

/// A matrix source and a right-hand side recipe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub source: MatrixSource,
    pub rhs: RhsSpec,
}

/// A loaded problem: square `a` and `b` of matching length.
#[derive(Debug, Clone)]
pub struct Problem<T> {
    pub name: String,
    pub a: CsrMatrix<T>,
    pub b: Vec<T>,
}

impl<T> Problem<T> {
    pub fn n(&self) -> usize {
        self.b.len()
    }
}

impl ProblemSpec {
    pub fn resolve<T: Real>(&self, seed: u64) -> Result<Problem<T>> {
        let a: CsrMatrix<T> = match &self.source {
            MatrixSource::File(p) => read_matrix_market(p)?,
            MatrixSource::Generated(g) => g.build(seed)?,
        };
        if !a.is_square() {
            return Err(Error::Argument(format!("matrix is {}x{}, expected square", a.nrows(), a.ncols())));
        }
        let b = self.rhs.build(a.nrows(), seed)?;
        Ok(Problem { name: self.source.to_string(), a, b })
    }
}
