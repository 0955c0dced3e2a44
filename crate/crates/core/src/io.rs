//! JSON state files and seeded random states.
//!
//! A state file is `{"dims": [dA, dB], "matrix": [[[re, im], ...], ...]}` with
//! `dims` optional and the matrix row-major. Numbers are written with the
//! shortest representation that parses back to the same `f64`.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{BipartiteState, CMatrix, DensityMatrix, HermitianMatrix, C64};

/// Tolerances applied to states read from disk.
pub const LOAD_PSD_TOL: f64 = 1e-8;
pub const LOAD_TRACE_TOL: f64 = 1e-8;
/// Largest `‖U†U - I‖_F` accepted for a basis change.
pub const UNITARY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<(usize, usize)>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl StateFile {
    pub fn from_matrix(m: &CMatrix, dims: Option<(usize, usize)>) -> Self {
        let matrix = (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect();
        Self { dims, matrix }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let n = self.matrix.len();
        if n == 0 || self.matrix.iter().any(|row| row.len() != n) {
            return Err(Error::Parse("matrix must be square and nonempty".into()));
        }
        if let Some((a, b)) = self.dims {
            if a * b != n {
                return Err(Error::Parse(format!("dims {a} x {b} do not match side length {n}")));
            }
        }
        Ok(CMatrix::from_fn(n, n, |r, c| {
            let [re, im] = self.matrix[r][c];
            C64::new(re, im)
        }))
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state file serialization")
    }
}

#[derive(Debug, Clone)]
pub enum LoadedState {
    Single(DensityMatrix),
    Bipartite(BipartiteState),
}

impl LoadedState {
    pub fn density(&self) -> &DensityMatrix {
        match self {
            Self::Single(d) => d,
            Self::Bipartite(b) => b.state(),
        }
    }

    pub fn bipartite(&self) -> Option<&BipartiteState> {
        match self {
            Self::Single(_) => None,
            Self::Bipartite(b) => Some(b),
        }
    }
}

/// Validates parsed text as a state: symmetrized, PSD and unit trace within
/// `1e-8`, then trace-normalized.
pub fn parse_state(text: &str) -> Result<LoadedState> {
    let file = StateFile::parse(text)?;
    let m = file.to_matrix()?;
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Parse("matrix entries must be finite".into()));
    }
    let rho = DensityMatrix::with_tolerance(HermitianMatrix::from_symmetrized(m)?, LOAD_PSD_TOL, LOAD_TRACE_TOL)?;
    Ok(match file.dims {
        Some((a, b)) => LoadedState::Bipartite(BipartiteState::new(rho, a, b)?),
        None => LoadedState::Single(rho),
    })
}

pub fn load_state(path: impl AsRef<Path>) -> Result<LoadedState> {
    parse_state(&fs::read_to_string(path)?)
}

pub fn save_state(path: impl AsRef<Path>, rho: &DensityMatrix, dims: Option<(usize, usize)>) -> Result<()> {
    fs::write(path, StateFile::from_matrix(rho.matrix(), dims).to_json() + "\n")?;
    Ok(())
}

/// Reads a unitary in the state-file format (`dims` ignored).
pub fn load_unitary(path: impl AsRef<Path>) -> Result<CMatrix> {
    let u = StateFile::parse(&fs::read_to_string(path)?)?.to_matrix()?;
    let n = u.nrows();
    let err = (u.adjoint() * &u - CMatrix::identity(n, n)).norm();
    if err > UNITARY_TOL {
        return Err(invalid(format!("basis matrix is not unitary (deviation {err:e})")));
    }
    Ok(u)
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// `G G† / tr(G G†)` with `G` a `dim × rank` complex Gaussian matrix.
pub fn random_density<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(invalid(format!("need 1 <= rank <= dim, got rank {rank} for dim {dim}")));
    }
    let g = ginibre(dim, rank, rng);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    Ok(DensityMatrix::from_trusted(crate::linalg::symmetrize(&m.unscale(tr))))
}

/// Haar-random unit vector.
pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<C64> {
    let v = ginibre(dim, 1, rng);
    let n = v.norm();
    v.iter().map(|z| z / n).collect()
}

pub fn random_pure<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(invalid("dimension must be positive"));
    }
    DensityMatrix::pure(&random_vector(dim, rng))
}

/// Haar-random pure state on `A ⊗ B ⊗ C`.
pub fn random_tripartite_pure<R: Rng + ?Sized>(dims: [usize; 3], rng: &mut R) -> Result<DensityMatrix> {
    random_pure(dims.iter().product(), rng)
}

/// Unitary from the QR decomposition of a Ginibre matrix, phases fixed so
/// the distribution is Haar.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn load_examples() {
        let s = parse_state(r#"{"matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#).unwrap();
        assert_abs_diff_eq!((s.density().matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm(), 0.0);
        assert!(matches!(parse_state("{\"matrix\": [[[1, 0]]"), Err(Error::Parse(_))));
        let r = parse_state(r#"{"matrix": [[[0.45, 0], [0, 0]], [[0, 0], [0.45, 0]]]}"#);
        assert!(matches!(r, Err(Error::TraceMismatch(_))));
        let r = parse_state(r#"{"matrix": [[[1.1, 0], [0, 0]], [[0, 0], [-0.1, 0]]]}"#);
        assert!(matches!(r, Err(Error::NotPsd(_))));
        let r = parse_state(r#"{"dims": [2, 3], "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#);
        assert!(matches!(r, Err(Error::Parse(_))));
        let s = parse_state(r#"{"dims": [1, 2], "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#).unwrap();
        assert_eq!(s.bipartite().map(|b| b.dim_b()), Some(2));
    }

    #[test]
    fn random_examples() {
        let rho = random_density(2, 1, &mut seeded_rng(7)).unwrap();
        let e = rho.spectrum();
        assert_abs_diff_eq!(e[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(e[1], 1.0, epsilon = 1e-12);
        let rho = random_density(4, 4, &mut seeded_rng(7)).unwrap();
        assert_eq!(rho.eig().rank(), 4);
        let again = random_density(4, 4, &mut seeded_rng(7)).unwrap();
        assert_eq!(rho.matrix(), again.matrix());
        assert!(random_density(3, 4, &mut seeded_rng(7)).is_err());
        let u = random_unitary(3, &mut seeded_rng(1));
        assert!((u.adjoint() * &u - CMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn generated_states_validate() {
        let mut rng = seeded_rng(99);
        for dim in 2..=8 {
            for k in 0..40 {
                let rank = 1 + k % dim;
                let rho = random_density(dim, rank, &mut rng).unwrap();
                assert!(DensityMatrix::new(rho.matrix().clone()).is_ok());
                assert!(DensityMatrix::new(random_pure(dim, &mut rng).unwrap().matrix().clone()).is_ok());
            }
        }
    }

    #[test]
    fn save_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let rho = random_density(3, 2, &mut seeded_rng(3)).unwrap();
        save_state(&path, &rho, None).unwrap();
        let back = load_state(&path).unwrap();
        assert!((back.density().matrix() - rho.matrix()).norm() < 1e-12);
    }
}
