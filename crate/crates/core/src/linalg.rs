//! Minimal dense complex linear algebra for the 2- and 4-dimensional
//! path⊗polarization spaces: vectors, matrices, tensor products, adjoints,
//! projectors, and POVM validation.
//!
//! Fixed basis ordering of the 4-dimensional space, used everywhere:
//! index = 2·path + pol with pol h = 0, v = 1, i.e.
//! (path 0, h), (path 0, v), (path 1, h), (path 1, v).

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::ops::{Index, IndexMut};

pub type C64 = Complex64;

pub const C_ZERO: C64 = C64::new(0.0, 0.0);
pub const C_ONE: C64 = C64::new(1.0, 0.0);

/// Entrywise tolerance for POVM positivity and completeness checks.
/// All physics here is dimension 2–4 and exact to machine precision, so a
/// tight tolerance catches construction bugs rather than rounding.
pub const POVM_TOL: f64 = 1e-10;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// Complex amplitude vector over the path⊗polarization space (dim 2 or 4).
///
/// May be sub-normalized: its squared norm is then the detection probability
/// of the branch it represents.
#[derive(Clone, PartialEq)]
pub struct CVec {
    data: Vec<C64>,
}

impl CVec {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        check_dim(entries.len())?;
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NotFinite {
                name: "vector entry",
                value: f64::NAN,
            });
        }
        Ok(Self { data: entries })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            data: vec![C_ZERO; dim],
        })
    }

    /// Basis vector e_k.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        let mut v = Self::zeros(dim)?;
        v.data[k] = C_ONE;
        Ok(v)
    }

    /// Real-valued vector convenience constructor.
    pub fn from_reals(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: self.data.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }
}

impl Index<usize> for CVec {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.data[i]
    }
}

impl fmt::Debug for CVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CVec{:?}", self.data)
    }
}

/// Dense square complex matrix, dim 2 or 4, row-major.
#[derive(Clone, PartialEq)]
pub struct CMat {
    data: Vec<C64>,
    dim: usize,
}

impl CMat {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: entries.len(),
                right: dim * dim,
            });
        }
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NotFinite {
                name: "matrix entry",
                value: f64::NAN,
            });
        }
        Ok(Self { data: entries, dim })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            data: vec![C_ZERO; dim * dim],
            dim,
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = C_ONE;
        }
        Ok(m)
    }

    pub fn from_reals(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            data: self.data.iter().map(|&c| c * s).collect(),
            dim: self.dim,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a + b)
                .collect(),
            dim: self.dim,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C_ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &CVec) -> Result<CVec> {
        if self.dim != v.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        let n = self.dim;
        let mut out = CVec::zeros(n)?;
        for i in 0..n {
            let mut acc = C_ZERO;
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out.data[i] = acc;
        }
        Ok(out)
    }

    /// Largest entrywise modulus of (self − other).
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let a = adjoint(self);
        match self.matmul(&a) {
            Ok(p) => {
                let id = CMat::identity(self.dim).unwrap();
                p.max_abs_diff(&id) <= tol
            }
            Err(_) => false,
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&adjoint(self)) <= tol
    }

    /// Tr(self · other).
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let n = self.dim;
        let mut acc = C_ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        Ok(acc)
    }

    /// ⟨v|M|v⟩, real part (the value is real for Hermitian M).
    pub fn expectation(&self, v: &CVec) -> Result<f64> {
        let mv = self.matvec(v)?;
        Ok(inner(v, &mv)?.re)
    }

    /// Eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi
    /// rotations. Dimensions here are at most 4, so convergence is a few
    /// sweeps.
    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(1e-9) {
            return Err(Error::InvalidPovm(
                "matrix is not Hermitian within 1e-9".into(),
            ));
        }
        let n = self.dim;
        let mut a = self.clone();
        // symmetrize exactly to suppress roundoff in the input
        for p in 0..n {
            a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
            for q in (p + 1)..n {
                let m = (a[(p, q)] + a[(q, p)].conj()) * 0.5;
                a[(p, q)] = m;
                a[(q, p)] = m.conj();
            }
        }
        for _sweep in 0..64 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq.norm() < 1e-300 {
                        continue;
                    }
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let phase = apq / apq.norm(); // e^{i arg(apq)}
                    let tau = (aqq - app) / (2.0 * apq.norm());
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // columns: col_p <- c*col_p - s*conj(phase)... apply G on right, G† on left
                    // G[p][p] = c, G[p][q] = s*phase, G[q][p] = -s*conj(phase), G[q][q] = c
                    for i in 0..n {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = aip * c - aiq * phase.conj() * s;
                        a[(i, q)] = aip * phase * s + aiq * c;
                    }
                    for j in 0..n {
                        let apj = a[(p, j)];
                        let aqj = a[(q, j)];
                        a[(p, j)] = apj * c - aqj * phase * s;
                        a[(q, j)] = apj * phase.conj() * s + aqj * c;
                    }
                }
            }
        }
        let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
        Ok(eig)
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat dim {}", self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| format!("{}", self[(i, j)])).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Kronecker product of two matrices; 2⊗2 → 4.
pub fn tensor(a: &CMat, b: &CMat) -> Result<CMat> {
    let (na, nb) = (a.dim(), b.dim());
    let n = na * nb;
    let mut out = CMat::zeros(n)?;
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k, j * nb + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of two vectors; 2⊗2 → 4. Ordering matches the module
/// convention: the first factor is the path, the second the polarization.
pub fn tensor_vec(a: &CVec, b: &CVec) -> Result<CVec> {
    let (na, nb) = (a.dim(), b.dim());
    let mut out = CVec::zeros(na * nb)?;
    for i in 0..na {
        for k in 0..nb {
            out.data[i * nb + k] = a[i] * b[k];
        }
    }
    Ok(out)
}

/// Sesquilinear inner product ⟨a|b⟩ = Σ conj(a_i)·b_i.
pub fn inner(a: &CVec, b: &CVec) -> Result<C64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.entries()
        .iter()
        .zip(b.entries())
        .map(|(&x, &y)| x.conj() * y)
        .sum())
}

/// Squared norm ⟨a|a⟩.
pub fn norm_sq(a: &CVec) -> f64 {
    a.entries().iter().map(|c| c.norm_sqr()).sum()
}

/// Conjugate transpose.
pub fn adjoint(m: &CMat) -> CMat {
    let n = m.dim();
    let mut out = CMat::zeros(n).unwrap();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m[(j, i)].conj();
        }
    }
    out
}

/// Rank-1 projector |a⟩⟨a|.
pub fn projector(a: &CVec) -> CMat {
    let n = a.dim();
    let mut out = CMat::zeros(n).unwrap();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = a[i] * a[j].conj();
        }
    }
    out
}

/// Physical detector receiving a POVM outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    D0,
    D1,
    D2,
}

impl Detector {
    pub fn index(self) -> usize {
        match self {
            Detector::D0 => 0,
            Detector::D1 => 1,
            Detector::D2 => 2,
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D{}", self.index())
    }
}

/// What a click on the element's detector asserts about the photon's path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeMeaning {
    /// Error-free assertion: the photon took path 0.
    ConclusivePath0,
    /// Error-free assertion: the photon took path 1.
    ConclusivePath1,
    /// No path information in this click.
    Inconclusive,
    /// Best guess (may err): path 0.
    GuessPath0,
    /// Best guess (may err): path 1.
    GuessPath1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeLabel {
    pub detector: Detector,
    pub meaning: OutcomeMeaning,
}

/// A set of positive operators summing to identity, each tagged with the
/// detector it drives and the meaning of a click there.
#[derive(Debug, Clone)]
pub struct PovmSet {
    elements: Vec<(CMat, OutcomeLabel)>,
    dim: usize,
}

/// Report from [`validate_povm`]: per-element minimum eigenvalue and the
/// completeness residual ‖Σπ̂_j − I‖_max.
#[derive(Debug, Clone)]
pub struct PovmReport {
    pub min_eigenvalues: Vec<f64>,
    pub completeness_residual: f64,
}

impl PovmReport {
    pub fn is_valid(&self) -> bool {
        self.completeness_residual <= POVM_TOL
            && self.min_eigenvalues.iter().all(|&e| e >= -POVM_TOL)
    }
}

impl PovmSet {
    pub fn new(elements: Vec<(CMat, OutcomeLabel)>) -> Result<Self> {
        let dim = match elements.first() {
            Some((m, _)) => m.dim(),
            None => return Err(Error::EmptyPovm),
        };
        for (m, _) in &elements {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: m.dim(),
                    right: dim,
                });
            }
        }
        Ok(Self { elements, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[(CMat, OutcomeLabel)] {
        &self.elements
    }

    pub fn element_for(&self, detector: Detector) -> Option<&CMat> {
        self.elements
            .iter()
            .find(|(_, l)| l.detector == detector)
            .map(|(m, _)| m)
    }

    pub fn labels(&self) -> Vec<OutcomeLabel> {
        self.elements.iter().map(|&(_, l)| l).collect()
    }
}

/// Check positivity and completeness of a POVM. Report-only: failures are
/// content, not errors.
pub fn validate_povm(p: &PovmSet) -> PovmReport {
    let dim = p.dim();
    let mut min_eigenvalues = Vec::with_capacity(p.len());
    let mut sum = CMat::zeros(dim).unwrap();
    for (m, _) in p.elements() {
        let eig = m
            .eigenvalues_hermitian()
            .unwrap_or_else(|_| vec![f64::NEG_INFINITY]);
        min_eigenvalues.push(eig[0]);
        sum = sum.add(m).unwrap();
    }
    let completeness_residual = sum.max_abs_diff(&CMat::identity(dim).unwrap());
    PovmReport {
        min_eigenvalues,
        completeness_residual,
    }
}
