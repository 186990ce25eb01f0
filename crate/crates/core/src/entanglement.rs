//! Gaussian entanglement measures on three-mode covariance matrices.
//!
//! Logarithmic negativity comes from the smallest symplectic eigenvalue of the
//! partially transposed covariance matrix; the contangle is its square, and
//! the residual contangle E^{r|st} − E^{r|s} − E^{r|t} measures genuine
//! tripartite entanglement.

use std::fmt;

use nalgebra::{Complex, DMatrix, Matrix4, Matrix6, SymmetricEigen};

use crate::dynamics::CovarianceMatrix;
use crate::error::{Error, Result};

/// Relative tolerance for ±iν pairing of the spectrum of ΩV.
pub const PAIRING_TOLERANCE: f64 = 1e-9;
/// Absolute slack for monogamy and physicality checks.
pub const SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    /// Cavity photons.
    A,
    /// Magnons.
    M,
    /// Phonons.
    B,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::A, Mode::M, Mode::B];

    pub fn index(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::M => 1,
            Mode::B => 2,
        }
    }

    /// The two other modes, in canonical order.
    pub fn others(self) -> [Mode; 2] {
        match self {
            Mode::A => [Mode::M, Mode::B],
            Mode::M => [Mode::A, Mode::B],
            Mode::B => [Mode::A, Mode::M],
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::A => "a",
            Mode::M => "m",
            Mode::B => "b",
        })
    }
}

/// Bipartition u|v with one mode on the u side and one or two on the v side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    side_u: Mode,
    side_v: Vec<Mode>,
}

impl Partition {
    pub fn new(side_u: Mode, side_v: &[Mode]) -> Result<Self> {
        let mut v = side_v.to_vec();
        v.sort();
        v.dedup();
        if v.is_empty() || v.len() != side_v.len() || v.len() > 2 || v.contains(&side_u) {
            return Err(Error::Argument(format!("invalid partition {side_u}|{side_v:?}")));
        }
        Ok(Self { side_u, side_v: v })
    }

    /// r | (both other modes)
    pub fn one_vs_rest(r: Mode) -> Self {
        Self { side_u: r, side_v: r.others().to_vec() }
    }

    pub fn side_u(&self) -> Mode {
        self.side_u
    }

    pub fn side_v(&self) -> &[Mode] {
        &self.side_v
    }
}

fn omega(n: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        o[(2 * k, 2 * k + 1)] = 1.0;
        o[(2 * k + 1, 2 * k)] = -1.0;
    }
    o
}

/// 4×4 covariance matrix of the two given modes, in the order given.
pub fn reduce_cm(v: &CovarianceMatrix, modes: (Mode, Mode)) -> Result<Matrix4<f64>> {
    if modes.0 == modes.1 {
        return Err(Error::Argument(format!("duplicate mode {}", modes.0)));
    }
    let idx = [
        2 * modes.0.index(),
        2 * modes.0.index() + 1,
        2 * modes.1.index(),
        2 * modes.1.index() + 1,
    ];
    Ok(Matrix4::from_fn(|i, j| v.0[(idx[i], idx[j])]))
}

/// Partial transposition P V P, flipping the momentum quadrature of
/// `transposed`. `modes` lists the modes of `v` in block order.
pub fn partial_transpose(v: &DMatrix<f64>, modes: &[Mode], transposed: Mode) -> Result<DMatrix<f64>> {
    if v.nrows() != 2 * modes.len() || !v.is_square() {
        return Err(Error::Argument(format!(
            "{}×{} matrix does not hold {} modes",
            v.nrows(),
            v.ncols(),
            modes.len()
        )));
    }
    let pos = modes
        .iter()
        .position(|&m| m == transposed)
        .ok_or_else(|| Error::Argument(format!("mode {transposed} not present")))?;
    let k = 2 * pos + 1;
    let mut out = v.clone();
    for j in 0..v.ncols() {
        if j != k {
            out[(k, j)] = -out[(k, j)];
            out[(j, k)] = -out[(j, k)];
        }
    }
    Ok(out)
}

/// Symplectic eigenvalues of a 2n×2n matrix, ascending.
///
/// Computed from the spectrum of ΩV, which must come in ±iν pairs.
pub fn symplectic_eigenvalues(v: &DMatrix<f64>) -> Result<Vec<f64>> {
    if !v.is_square() || !v.nrows().is_multiple_of(2) || v.nrows() == 0 {
        return Err(Error::Argument(format!("{}×{} is not 2n×2n", v.nrows(), v.ncols())));
    }
    let n = v.nrows() / 2;
    let ov = omega(n) * v;
    let eig = ov
        .clone()
        .try_schur(f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?
        .complex_eigenvalues();
    let scale = eig.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = PAIRING_TOLERANCE * scale;

    let mut upper: Vec<Complex<f64>> = eig.iter().copied().filter(|z| z.im > 0.0).collect();
    let mut lower: Vec<Complex<f64>> = eig.iter().copied().filter(|z| z.im < 0.0).collect();
    let unpaired = || Error::Numerical(format!("spectrum of ΩV not in ±iν pairs: {:?}", eig.as_slice()));
    if upper.len() != n || lower.len() != n {
        return Err(unpaired());
    }
    upper.sort_by(|a, b| a.im.total_cmp(&b.im));
    lower.sort_by(|a, b| b.im.total_cmp(&a.im));
    let mut nu = Vec::with_capacity(n);
    for (p, q) in upper.iter().zip(&lower) {
        if p.re.abs() > tol || q.re.abs() > tol || (p.im + q.im).abs() > tol {
            return Err(unpaired());
        }
        nu.push(0.5 * (p.im - q.im));
    }
    Ok(nu)
}

fn negativity_from(nu_min: f64) -> f64 {
    if 2.0 * nu_min >= 1.0 {
        0.0
    } else {
        -(2.0 * nu_min).ln()
    }
}

fn full(v: &CovarianceMatrix) -> DMatrix<f64> {
    DMatrix::from_iterator(6, 6, v.0.iter().copied())
}

/// Smallest symplectic eigenvalue of the partial transposition over `partition`.
pub fn min_transposed_eigenvalue(v: &CovarianceMatrix, partition: &Partition) -> Result<f64> {
    let u = partition.side_u();
    let nu = match partition.side_v() {
        [w] => {
            let reduced = reduce_cm(v, (u, *w))?;
            let m = DMatrix::from_iterator(4, 4, reduced.iter().copied());
            symplectic_eigenvalues(&partial_transpose(&m, &[u, *w], u)?)?
        }
        _ => symplectic_eigenvalues(&partial_transpose(&full(v), &Mode::ALL, u)?)?,
    };
    let below = nu.iter().filter(|&&x| x < 0.5 - SLACK).count();
    if below > 1 {
        return Err(Error::Numerical(format!(
            "{below} transposed symplectic eigenvalues below 1/2 for a single-mode cut: {nu:?}"
        )));
    }
    Ok(nu[0])
}

/// Logarithmic negativity max[0, −ln(2ν̃₋)].
pub fn log_negativity(v: &CovarianceMatrix, partition: &Partition) -> Result<f64> {
    Ok(negativity_from(min_transposed_eigenvalue(v, partition)?))
}

/// Squared logarithmic negativity.
pub fn contangle(v: &CovarianceMatrix, partition: &Partition) -> Result<f64> {
    let e = log_negativity(v, partition)?;
    Ok(e * e)
}

/// E^{r|st} − E^{r|s} − E^{r|t} in terms of contangles.
pub fn residual_contangle(v: &CovarianceMatrix, r: Mode) -> Result<f64> {
    let [s, t] = r.others();
    let whole = contangle(v, &Partition::one_vs_rest(r))?;
    let rs = contangle(v, &Partition::new(r, &[s])?)?;
    let rt = contangle(v, &Partition::new(r, &[t])?)?;
    Ok(whole - rs - rt)
}

/// Minimum of the residual contangle over the three pivot modes. The two
/// pairwise terms are symmetric in s and t, so pivots cover all permutations.
pub fn min_residual_contangle(v: &CovarianceMatrix) -> Result<f64> {
    let mut best = f64::INFINITY;
    for r in Mode::ALL {
        best = best.min(residual_contangle(v, r)?);
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Monogamy {
    pub holds: [bool; 3],
    /// Residual contangle per pivot (a, m, b).
    pub margins: [f64; 3],
}

impl Monogamy {
    pub fn all(&self) -> bool {
        self.holds.iter().all(|&h| h)
    }
}

pub fn check_monogamy(v: &CovarianceMatrix) -> Result<Monogamy> {
    let mut margins = [0.0; 3];
    for r in Mode::ALL {
        margins[r.index()] = residual_contangle(v, r)?;
    }
    Ok(Monogamy { holds: margins.map(|m| m >= -SLACK), margins })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    /// Smallest eigenvalue of the Hermitian matrix V + (i/2)Ω.
    pub min_eigenvalue: f64,
}

/// Uncertainty-relation check V + (i/2)Ω ≥ 0.
pub fn check_physicality(v: &CovarianceMatrix) -> Physicality {
    let om = omega(3);
    let h = Matrix6::<Complex<f64>>::from_fn(|i, j| Complex::new(v.0[(i, j)], 0.5 * om[(i, j)]));
    let min = SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Physicality { physical: min >= -SLACK, min_eigenvalue: min }
}

/// All entanglement figures of one steady state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementReport {
    /// E_N for a|m, a|b, m|b.
    pub en_pairs: [f64; 3],
    /// E_N for a|mb, m|ab, b|am.
    pub en_splits: [f64; 3],
    /// Residual contangles with pivot a, m, b.
    pub residuals: [f64; 3],
    pub r_min: f64,
    pub monogamy: [bool; 3],
    pub stable: bool,
}

impl EntanglementReport {
    pub fn compute(v: &CovarianceMatrix, stable: bool) -> Result<Self> {
        let pair = |x: Mode, y: Mode| log_negativity(v, &Partition::new(x, &[y])?);
        let en_pairs = [pair(Mode::A, Mode::M)?, pair(Mode::A, Mode::B)?, pair(Mode::M, Mode::B)?];
        let pair_of = |x: Mode, y: Mode| -> f64 {
            match (x.min(y), x.max(y)) {
                (Mode::A, Mode::M) => en_pairs[0],
                (Mode::A, Mode::B) => en_pairs[1],
                _ => en_pairs[2],
            }
        };
        let mut en_splits = [0.0; 3];
        let mut residuals = [0.0; 3];
        for r in Mode::ALL {
            let e = log_negativity(v, &Partition::one_vs_rest(r))?;
            en_splits[r.index()] = e;
            let [s, t] = r.others();
            let (es, et) = (pair_of(r, s), pair_of(r, t));
            residuals[r.index()] = e * e - es * es - et * et;
        }
        let r_min = residuals.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(Self {
            en_pairs,
            en_splits,
            residuals,
            r_min,
            monogamy: residuals.map(|x| x >= -SLACK),
            stable,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_reductions() {
        let v = CovarianceMatrix::vacuum();
        for (x, y) in [(Mode::A, Mode::M), (Mode::A, Mode::B), (Mode::B, Mode::M)] {
            assert_eq!(reduce_cm(&v, (x, y)).unwrap(), Matrix4::identity() * 0.5);
        }
        assert!(reduce_cm(&v, (Mode::M, Mode::M)).is_err());
    }

    #[test]
    fn reduce_block_diagonal() {
        let v = CovarianceMatrix(Matrix6::from_diagonal(&nalgebra::Vector6::new(
            1.0, 1.0, 2.0, 2.0, 3.0, 3.0,
        )));
        let r = reduce_cm(&v, (Mode::A, Mode::B)).unwrap();
        assert_eq!(r, Matrix4::from_diagonal(&nalgebra::Vector4::new(1.0, 1.0, 3.0, 3.0)));
    }

    #[test]
    fn partial_transpose_is_involution_and_sign_pattern() {
        let m = DMatrix::from_fn(6, 6, |i, j| 1.0 + (i * 6 + j) as f64 * 0.1);
        let m = (&m + m.transpose()) * 0.5;
        let p = partial_transpose(&m, &Mode::ALL, Mode::B).unwrap();
        assert_eq!(partial_transpose(&p, &Mode::ALL, Mode::B).unwrap(), m);
        for i in 0..6 {
            for j in 0..6 {
                let flipped = (i == 5) ^ (j == 5);
                let expect = if flipped { -m[(i, j)] } else { m[(i, j)] };
                assert_eq!(p[(i, j)], expect);
            }
        }
    }

    #[test]
    fn partial_transpose_first_of_pair() {
        let m = DMatrix::from_fn(4, 4, |i, j| (1 + i + j) as f64);
        let p = partial_transpose(&m, &[Mode::A, Mode::M], Mode::A).unwrap();
        let p0 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0, 1.0]));
        assert_eq!(p, &p0 * &m * &p0);
        assert!(partial_transpose(&m, &[Mode::A, Mode::M], Mode::B).is_err());
    }

    #[test]
    fn symplectic_vacuum_and_williamson_form() {
        let nu = symplectic_eigenvalues(&(DMatrix::identity(6, 6) * 0.5)).unwrap();
        for x in nu {
            assert!((x - 0.5).abs() < 1e-14);
        }
        let v = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.5, 2.5, 0.7, 0.7]));
        let nu = symplectic_eigenvalues(&v).unwrap();
        assert!((nu[0] - 0.7).abs() < 1e-14 && (nu[1] - 2.5).abs() < 1e-14, "{nu:?}");
    }

    #[test]
    fn symplectic_rejects_indefinite() {
        // ΩV for V = diag(1, −1) has real eigenvalues ±1
        let v = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0]));
        assert!(matches!(symplectic_eigenvalues(&v), Err(Error::Numerical(_))));
    }

    #[test]
    fn physicality_examples() {
        let p = check_physicality(&CovarianceMatrix::vacuum());
        assert!(p.physical && p.min_eigenvalue.abs() < 1e-14);
        let p = check_physicality(&CovarianceMatrix(Matrix6::identity() * 0.25));
        assert!(!p.physical);
        let p = check_physicality(&CovarianceMatrix(Matrix6::identity()));
        assert!(p.physical && (p.min_eigenvalue - 0.5).abs() < 1e-14);
    }

    #[test]
    fn vacuum_has_no_entanglement() {
        let v = CovarianceMatrix::vacuum();
        let rep = EntanglementReport::compute(&v, true).unwrap();
        assert_eq!(rep.en_pairs, [0.0; 3]);
        assert_eq!(rep.en_splits, [0.0; 3]);
        assert_eq!(rep.r_min, 0.0);
        let mono = check_monogamy(&v).unwrap();
        assert!(mono.all());
        assert_eq!(mono.margins, [0.0; 3]);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(Mode::A, &[Mode::A]).is_err());
        assert!(Partition::new(Mode::A, &[]).is_err());
        assert!(Partition::new(Mode::A, &[Mode::M, Mode::M]).is_err());
        let p = Partition::new(Mode::M, &[Mode::B, Mode::A]).unwrap();
        assert_eq!(p.side_v(), &[Mode::A, Mode::B]);
    }

    #[test]
    fn reduced_pair_matches_explicit_selection() {
        let m = Matrix6::from_fn(|i, j| ((i + 1) * (j + 1)) as f64 + if i == j { 10.0 } else { 0.0 });
        let v = CovarianceMatrix(m);
        let r = reduce_cm(&v, (Mode::A, Mode::B)).unwrap();
        let rows = [0, 1, 4, 5];
        let mut expect = Matrix4::zeros();
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in rows.iter().enumerate() {
                expect[(a, b)] = m[(i, j)];
            }
        }
        assert_eq!(r, expect);
    }
}
