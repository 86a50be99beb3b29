//! Dense operator algebra on truncated tensor-product Hilbert spaces.
//!
//! Basis states are ordered with the first subsystem most significant, so for
//! the default layout the index of |m, n_c, n_b⟩ is `(m·d_c + n_c)·d_NR + n_b`.
//! Density matrices are vectorized by stacking columns:
//! `vec(ρ)[i + D·j] = ρ[i, j]`, giving `vec(AρB) = (Bᵀ ⊗ A)·vec(ρ)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Position of the transmon in the default layout.
pub const TRANSMON: usize = 0;
/// Position of the cavity in the default layout.
pub const CAVITY: usize = 1;
/// Position of the nanoresonator in the default layout.
pub const NANORESONATOR: usize = 2;

/// Ordered subsystem dimensions and labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HilbertLayout {
    dims: Vec<usize>,
    labels: Vec<String>,
}

impl HilbertLayout {
    pub fn new(dims: &[usize], labels: &[&str]) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidDimension(d));
        }
        if labels.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                found: labels.len(),
            });
        }
        Ok(Self {
            dims: dims.to_vec(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Transmon, cavity and nanoresonator with the given truncations.
    pub fn hybrid(transmon: usize, cavity: usize, nanoresonator: usize) -> Result<Self> {
        Self::new(
            &[transmon, cavity, nanoresonator],
            &["transmon", "cavity", "nanoresonator"],
        )
    }

    /// A layout holding one subsystem.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(&[dim], &["system"])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Product of all subsystem dimensions.
    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Flat basis index of a product state given one level per subsystem.
    pub fn index_of(&self, levels: &[usize]) -> usize {
        debug_assert_eq!(levels.len(), self.dims.len());
        levels
            .iter()
            .zip(&self.dims)
            .fold(0, |acc, (&l, &d)| acc * d + l)
    }

    /// Per-subsystem levels of a flat basis index.
    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }
}

impl Default for HilbertLayout {
    fn default() -> Self {
        Self::hybrid(3, 4, 5).expect("default dims are valid")
    }
}

impl fmt::Display for HilbertLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .labels
            .iter()
            .zip(&self.dims)
            .map(|(l, d)| format!("{l}[{d}]"))
            .collect();
        write!(f, "{}", parts.join(" ⊗ "))
    }
}

/// Complex square matrix acting on a [`HilbertLayout`].
#[derive(Debug, Clone)]
pub struct QuantumOperator {
    matrix: Mat<C64>,
    layout: HilbertLayout,
}

impl QuantumOperator {
    pub fn new(matrix: Mat<C64>, layout: HilbertLayout) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { matrix, layout })
    }

    pub fn zeros(layout: &HilbertLayout) -> Self {
        let d = layout.total_dim();
        Self {
            matrix: Mat::zeros(d, d),
            layout: layout.clone(),
        }
    }

    pub fn identity(layout: &HilbertLayout) -> Self {
        let d = layout.total_dim();
        Self {
            matrix: Mat::identity(d, d),
            layout: layout.clone(),
        }
    }

    pub fn from_fn(layout: &HilbertLayout, f: impl FnMut(usize, usize) -> C64) -> Self {
        let d = layout.total_dim();
        Self {
            matrix: Mat::from_fn(d, d, f),
            layout: layout.clone(),
        }
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(layout: &HilbertLayout, entries: &[f64]) -> Result<Self> {
        let d = layout.total_dim();
        if entries.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: entries.len(),
            });
        }
        let mut op = Self::zeros(layout);
        for (i, &e) in entries.iter().enumerate() {
            op.matrix[(i, i)] = C64::new(e, 0.0);
        }
        Ok(op)
    }

    /// The outer product |i⟩⟨j| on a single subsystem of dimension `dim`.
    pub fn transition(dim: usize, i: usize, j: usize) -> Result<Self> {
        let layout = HilbertLayout::single(dim)?;
        if i >= dim || j >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: i.max(j) + 1,
            });
        }
        let mut op = Self::zeros(&layout);
        op.matrix[(i, j)] = ONE;
        Ok(op)
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat<C64> {
        self.matrix
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.matrix[(i, j)] = value;
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint().to_owned(),
            layout: self.layout.clone(),
        }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            matrix: Mat::from_fn(self.dim(), self.dim(), |i, j| factor * self.matrix[(i, j)]),
            layout: self.layout.clone(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(C64::new(factor, 0.0))
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm_l2()
    }

    /// Relative Frobenius deviation ‖A − A†‖/‖A‖, zero for the zero matrix.
    pub fn hermiticity_deviation(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                acc += (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt() / norm
    }

    /// Errors with the measured deviation when it exceeds `tol`.
    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let deviation = self.hermiticity_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.dim();
        Self {
            matrix: Mat::from_fn(n, n, |i, j| 0.5 * (self.matrix[(i, j)] + self.matrix[(j, i)].conj())),
            layout: self.layout.clone(),
        }
    }

    /// Ascending eigenvalues of the Hermitian part.
    pub fn eigenvalues_hermitian(&self) -> Vec<f64> {
        let h = self.hermitian_part();
        h.matrix
            .self_adjoint_eigenvalues(Side::Lower)
            .expect("self-adjoint eigensolver converges on finite input")
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.dim();
        let mut m: f64 = 0.0;
        for j in 0..n {
            for i in 0..n {
                m = m.max((self.matrix[(i, j)] - other.matrix[(i, j)]).norm());
            }
        }
        m
    }

    /// Diagonal entries as real numbers.
    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Marginal level populations of one subsystem (diagonal of the reduced state).
    pub fn reduced_populations(&self, subsystem: usize) -> Vec<f64> {
        let dim = self.layout.dims()[subsystem];
        let mut out = vec![0.0; dim];
        for i in 0..self.dim() {
            out[self.layout.levels_of(i)[subsystem]] += self.matrix[(i, i)].re;
        }
        out
    }
}

fn assert_same_layout(a: &QuantumOperator, b: &QuantumOperator) {
    assert_eq!(a.layout, b.layout, "operators live on different layouts");
}

impl Add for &QuantumOperator {
    type Output = QuantumOperator;
    fn add(self, rhs: &QuantumOperator) -> QuantumOperator {
        assert_same_layout(self, rhs);
        QuantumOperator {
            matrix: &self.matrix + &rhs.matrix,
            layout: self.layout.clone(),
        }
    }
}

impl Sub for &QuantumOperator {
    type Output = QuantumOperator;
    fn sub(self, rhs: &QuantumOperator) -> QuantumOperator {
        assert_same_layout(self, rhs);
        QuantumOperator {
            matrix: &self.matrix - &rhs.matrix,
            layout: self.layout.clone(),
        }
    }
}

impl Mul for &QuantumOperator {
    type Output = QuantumOperator;
    fn mul(self, rhs: &QuantumOperator) -> QuantumOperator {
        assert_same_layout(self, rhs);
        QuantumOperator {
            matrix: &self.matrix * &rhs.matrix,
            layout: self.layout.clone(),
        }
    }
}

impl Neg for &QuantumOperator {
    type Output = QuantumOperator;
    fn neg(self) -> QuantumOperator {
        self.scale_real(-1.0)
    }
}

/// Bosonic lowering operator truncated to `d` levels: ⟨n−1|a|n⟩ = √n.
pub fn annihilation(d: usize) -> Result<QuantumOperator> {
    let layout = HilbertLayout::single(d)?;
    let mut op = QuantumOperator::zeros(&layout);
    for n in 1..d {
        op.matrix[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(op)
}

/// Number operator a†a truncated to `d` levels.
pub fn number(d: usize) -> Result<QuantumOperator> {
    let layout = HilbertLayout::single(d)?;
    let diag: Vec<f64> = (0..d).map(|n| n as f64).collect();
    QuantumOperator::diagonal(&layout, &diag)
}

/// Kronecker product `lhs ⊗ rhs`.
pub fn kron(lhs: &Mat<C64>, rhs: &Mat<C64>) -> Mat<C64> {
    let mut out = Mat::zeros(lhs.nrows() * rhs.nrows(), lhs.ncols() * rhs.ncols());
    faer::linalg::kron::kron(out.as_mut(), lhs.as_ref(), rhs.as_ref());
    out
}

/// Lifts a single-subsystem operator to `I ⊗ … ⊗ op ⊗ … ⊗ I`.
pub fn embed(op: &QuantumOperator, index: usize, layout: &HilbertLayout) -> Result<QuantumOperator> {
    let dims = layout.dims();
    if index >= dims.len() {
        return Err(Error::DimensionMismatch {
            expected: dims.len(),
            found: index + 1,
        });
    }
    if op.dim() != dims[index] {
        return Err(Error::DimensionMismatch {
            expected: dims[index],
            found: op.dim(),
        });
    }
    let before: usize = dims[..index].iter().product();
    let after: usize = dims[index + 1..].iter().product();
    let d = op.dim();
    let total = layout.total_dim();
    let mut out = Mat::<C64>::zeros(total, total);
    for b in 0..before {
        for j in 0..d {
            for i in 0..d {
                let v = op.matrix[(i, j)];
                if v == ZERO {
                    continue;
                }
                let row0 = (b * d + i) * after;
                let col0 = (b * d + j) * after;
                for a in 0..after {
                    out[(row0 + a, col0 + a)] = v;
                }
            }
        }
    }
    QuantumOperator::new(out, layout.clone())
}

/// Embeds a single-subsystem operator on the subsystem carrying `label`.
pub fn embed_on(op: &QuantumOperator, label: &str, layout: &HilbertLayout) -> Result<QuantumOperator> {
    let index = layout
        .position(label)
        .ok_or_else(|| Error::UnknownSubsystem(label.to_string()))?;
    embed(op, index, layout)
}

/// `Tr(ρA)`.
pub fn expectation(rho: &QuantumOperator, a: &QuantumOperator) -> Result<C64> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: a.dim(),
        });
    }
    let n = rho.dim();
    let mut acc = ZERO;
    for j in 0..n {
        for i in 0..n {
            acc += rho.matrix[(i, j)] * a.matrix[(j, i)];
        }
    }
    Ok(acc)
}

/// Column-stacked vector of `rho`.
pub fn vectorize(rho: &QuantumOperator) -> Vec<C64> {
    let n = rho.dim();
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        out.extend_from_slice(rho.matrix.col_as_slice(j));
    }
    out
}

/// Inverse of [`vectorize`] on a single-subsystem layout.
pub fn devectorize(v: &[C64]) -> Result<QuantumOperator> {
    let n = square_side(v.len())?;
    devectorize_on(v, &HilbertLayout::single(n)?)
}

/// Inverse of [`vectorize`] on an explicit layout.
pub fn devectorize_on(v: &[C64], layout: &HilbertLayout) -> Result<QuantumOperator> {
    let n = square_side(v.len())?;
    if n != layout.total_dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.total_dim(),
            found: n,
        });
    }
    Ok(QuantumOperator::from_fn(layout, |i, j| v[i + n * j]))
}

fn square_side(len: usize) -> Result<usize> {
    let n = (len as f64).sqrt().round() as usize;
    if n * n != len || n == 0 {
        return Err(Error::NotSquareLength(len));
    }
    Ok(n)
}

/// Linear map on vectorized operators, stored densely as a D²×D² matrix.
#[derive(Debug, Clone)]
pub struct Superoperator {
    matrix: Mat<C64>,
    layout: HilbertLayout,
}

impl Superoperator {
    pub fn zeros(layout: &HilbertLayout) -> Self {
        let d2 = layout.total_dim().pow(2);
        Self {
            matrix: Mat::zeros(d2, d2),
            layout: layout.clone(),
        }
    }

    pub fn matrix(&self) -> &Mat<C64> {
        &self.matrix
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    /// Accumulates `alpha·(lhs ⊗ rhs)`, skipping zero entries of `lhs`.
    fn add_kron(&mut self, alpha: C64, lhs: &Mat<C64>, rhs: &Mat<C64>) {
        let d = rhs.nrows();
        for lj in 0..lhs.ncols() {
            for li in 0..lhs.nrows() {
                let l = lhs[(li, lj)];
                if l == ZERO {
                    continue;
                }
                let f = alpha * l;
                for rj in 0..d {
                    for ri in 0..d {
                        let r = rhs[(ri, rj)];
                        if r != ZERO {
                            self.matrix[(li * d + ri, lj * d + rj)] += f * r;
                        }
                    }
                }
            }
        }
    }

    /// `self + rate·dissipator(a)` without materializing the dissipator.
    pub fn add_dissipator(&mut self, rate: f64, a: &QuantumOperator) {
        if rate == 0.0 {
            return;
        }
        let id = Mat::<C64>::identity(a.dim(), a.dim());
        let conj_a = Mat::from_fn(a.dim(), a.dim(), |i, j| a.matrix[(i, j)].conj());
        let m = a.adjoint().matrix * &a.matrix;
        let m_t = m.transpose().to_owned();
        let r = C64::new(rate, 0.0);
        self.add_kron(r, &conj_a, &a.matrix);
        self.add_kron(-0.5 * r, &id, &m);
        self.add_kron(-0.5 * r, &m_t, &id);
    }

    /// `self + (−i[H, ·])`.
    pub fn add_hamiltonian(&mut self, h: &QuantumOperator) {
        let id = Mat::<C64>::identity(h.dim(), h.dim());
        let h_t = h.matrix.transpose().to_owned();
        self.add_kron(C64::new(0.0, -1.0), &id, &h.matrix);
        self.add_kron(C64::new(0.0, 1.0), &h_t, &id);
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
            layout: self.layout.clone(),
        }
    }

    /// Applies the map to an operator.
    pub fn apply(&self, rho: &QuantumOperator) -> Result<QuantumOperator> {
        if rho.layout != self.layout {
            return Err(Error::DimensionMismatch {
                expected: self.layout.total_dim(),
                found: rho.dim(),
            });
        }
        let v = self.apply_vec(&vectorize(rho));
        devectorize_on(&v, &self.layout)
    }

    /// Matrix–vector product on a vectorized operator.
    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        let n = self.matrix.nrows();
        let mut out = vec![ZERO; n];
        for (j, &x) in v.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.matrix.col_as_slice(j)) {
                *o += m * x;
            }
        }
        out
    }

    /// Largest modulus of `vec(I)†·L` relative to the largest entry of `L`;
    /// zero for a trace-preserving map.
    pub fn trace_defect(&self) -> f64 {
        let d = self.layout.total_dim();
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for col in 0..self.matrix.ncols() {
            let c = self.matrix.col_as_slice(col);
            let s: C64 = (0..d).map(|k| c[k * (d + 1)]).sum();
            worst = worst.max(s.norm());
            scale = c.iter().fold(scale, |m, z| m.max(z.norm()));
        }
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm_l2()
    }
}

/// `D[A]ρ = AρA† − (A†Aρ + ρA†A)/2` as a superoperator.
pub fn dissipator(a: &QuantumOperator) -> Superoperator {
    let mut s = Superoperator::zeros(a.layout());
    s.add_dissipator(1.0, a);
    s
}

/// `−i[H, ·]`; rejects non-Hermitian `H`.
pub fn hamiltonian_part(h: &QuantumOperator, hermiticity_tol: f64) -> Result<Superoperator> {
    h.require_hermitian(hermiticity_tol)?;
    let mut s = Superoperator::zeros(h.layout());
    s.add_hamiltonian(h);
    Ok(s)
}

/// Row-major triplet list of the nonzero entries of an operator.
#[derive(Debug, Clone, Default)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOperator {
    pub fn from_dense(op: &QuantumOperator) -> Self {
        let n = op.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let v = op.matrix[(i, j)];
                if v != ZERO {
                    entries.push((i, j, v));
                }
            }
        }
        Self { dim: n, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    /// `out += alpha·self·x` for a dense column-major `x`.
    pub fn mul_left_acc(&self, alpha: C64, x: &Mat<C64>, out: &mut Mat<C64>) {
        for &(i, k, v) in &self.entries {
            let f = alpha * v;
            for j in 0..x.ncols() {
                out[(i, j)] += f * x[(k, j)];
            }
        }
    }

    /// `out += alpha·x·self`.
    pub fn mul_right_acc(&self, alpha: C64, x: &Mat<C64>, out: &mut Mat<C64>) {
        for &(k, j, v) in &self.entries {
            let f = alpha * v;
            for i in 0..x.nrows() {
                out[(i, j)] += f * x[(i, k)];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn annihilation_rejects_single_level() {
        assert_eq!(annihilation(1).unwrap_err(), Error::InvalidDimension(1));
    }

    #[test]
    fn lowest_fock_case() {
        let a = annihilation(2).unwrap();
        assert_eq!(a.get(0, 1), ONE);
        assert_eq!(a.get(1, 0), ZERO);
        assert_eq!(a.get(0, 0), ZERO);
    }

    #[test]
    fn truncated_commutator() {
        for d in 2..7 {
            let a = annihilation(d).unwrap();
            let comm = a.commutator(&a.adjoint());
            for i in 0..d {
                for j in 0..d {
                    let expected = if i != j {
                        0.0
                    } else if i == d - 1 {
                        1.0 - d as f64
                    } else {
                        1.0
                    };
                    assert!((comm.get(i, j) - c(expected, 0.0)).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn layout_index_round_trip() {
        let layout = HilbertLayout::default();
        for i in 0..layout.total_dim() {
            assert_eq!(layout.index_of(&layout.levels_of(i)), i);
        }
        assert_eq!(layout.index_of(&[1, 2, 3]), (4 + 2) * 5 + 3);
    }

    #[test]
    fn layout_rejects_short_dims() {
        assert!(HilbertLayout::hybrid(3, 1, 5).is_err());
    }

    #[test]
    fn embed_rejects_wrong_dimension() {
        let layout = HilbertLayout::default();
        let a = annihilation(3).unwrap();
        assert!(matches!(
            embed(&a, CAVITY, &layout),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
    }

    #[test]
    fn vectorize_identity() {
        let id = QuantumOperator::identity(&HilbertLayout::single(2).unwrap());
        assert_eq!(vectorize(&id), vec![ONE, ZERO, ZERO, ONE]);
    }

    #[test]
    fn devectorize_rejects_non_square() {
        assert_eq!(devectorize(&[ONE; 5]).unwrap_err(), Error::NotSquareLength(5));
    }

    #[test]
    fn non_hermitian_hamiltonian_reports_deviation() {
        let a = annihilation(3).unwrap();
        match hamiltonian_part(&a, 1e-12) {
            Err(Error::NotHermitian { deviation }) => assert!((deviation - 2f64.sqrt()).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_dissipator_vanishes() {
        let id = QuantumOperator::identity(&HilbertLayout::single(3).unwrap());
        assert_eq!(dissipator(&id).frobenius_norm(), 0.0);
    }

    #[test]
    fn reduced_populations_of_product_state() {
        let layout = HilbertLayout::hybrid(2, 3, 2).unwrap();
        let mut rho = QuantumOperator::zeros(&layout);
        let k = layout.index_of(&[1, 2, 0]);
        rho.set(k, k, ONE);
        assert_eq!(rho.reduced_populations(CAVITY), vec![0.0, 0.0, 1.0]);
        assert_eq!(rho.reduced_populations(TRANSMON), vec![0.0, 1.0]);
    }
}
