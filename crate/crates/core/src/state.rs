//! Dense pure states and operators over small products of two-level subsystems.
//!
//! Every subsystem is a qubit. Basis index 0 is `|L>` for the path, `|H>` for
//! polarization and `|0>_m` for a meter; index 1 is `|R>`, `|V>` and `|1>_m`.
//! Within a composite the first label is the most significant bit of the
//! amplitude index, so `|L>|H>` sits at index 0 of a `[Path, Polarization]`
//! state. States and operators may list their labels in any order; `inner`,
//! `apply` and friends permute as needed.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Entrywise tolerance for the unitarity/hermiticity/normalization predicates.
pub const TOLERANCE: f64 = 1e-12;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// One two-dimensional tensor factor. The derived ordering
/// `Path < Polarization < Meter(0) < Meter(1) ...` is the canonical one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    Path,
    Polarization,
    Meter(u8),
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Subsystem::Path => f.write_str("path"),
            Subsystem::Polarization => f.write_str("polarization"),
            Subsystem::Meter(i) => write!(f, "meter{i}"),
        }
    }
}

fn check_distinct(labels: &[Subsystem]) -> Result<()> {
    for (i, a) in labels.iter().enumerate() {
        if labels[i + 1..].contains(a) {
            return Err(Error::DuplicateLabel(*a));
        }
    }
    Ok(())
}

/// Positions of `subset` inside `superset`, in `subset` order.
fn positions_in(
    subset: &[Subsystem],
    superset: &[Subsystem],
    missing: fn(Subsystem) -> Error,
) -> Result<Vec<usize>> {
    subset
        .iter()
        .map(|l| superset.iter().position(|s| s == l).ok_or(missing(*l)))
        .collect()
}

/// Extract the bits of `index` (an `n`-label index) found at `positions`,
/// packing them with `positions[0]` as the most significant bit.
#[inline]
fn gather_bits(index: usize, n: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .fold(0, |acc, &p| (acc << 1) | ((index >> (n - 1 - p)) & 1))
}

fn complement(n: usize, positions: &[usize]) -> Vec<usize> {
    (0..n).filter(|p| !positions.contains(p)).collect()
}

/// Pure state on an ordered list of qubit subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    labels: Vec<Subsystem>,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(labels: Vec<Subsystem>, amplitudes: Vec<C64>) -> Result<Self> {
        check_distinct(&labels)?;
        let expected = 1usize << labels.len();
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: amplitudes.len(),
            });
        }
        Ok(Self {
            labels,
            amplitudes: DVector::from_vec(amplitudes),
        })
    }

    /// `a|0> + b|1>` on a single subsystem.
    pub fn qubit(label: Subsystem, a: C64, b: C64) -> Self {
        Self {
            labels: vec![label],
            amplitudes: DVector::from_vec(vec![a, b]),
        }
    }

    pub fn basis(label: Subsystem, bit: usize) -> Self {
        assert!(bit < 2, "qubit basis index must be 0 or 1");
        if bit == 0 {
            Self::qubit(label, ONE, ZERO)
        } else {
            Self::qubit(label, ZERO, ONE)
        }
    }

    pub fn left() -> Self {
        Self::basis(Subsystem::Path, 0)
    }

    pub fn right() -> Self {
        Self::basis(Subsystem::Path, 1)
    }

    pub fn horizontal() -> Self {
        Self::basis(Subsystem::Polarization, 0)
    }

    pub fn vertical() -> Self {
        Self::basis(Subsystem::Polarization, 1)
    }

    pub fn meter_ready(index: u8) -> Self {
        Self::basis(Subsystem::Meter(index), 0)
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn amplitudes(&self) -> &[C64] {
        self.amplitudes.as_slice()
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= TOLERANCE
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            labels: self.labels.clone(),
            amplitudes: &self.amplitudes * factor,
        }
    }

    /// `self + other`, with `other` permuted into this state's label order.
    pub fn superpose(&self, other: &StateVector) -> Result<Self> {
        let other = other.permuted(&self.labels)?;
        Ok(Self {
            labels: self.labels.clone(),
            amplitudes: &self.amplitudes + &other.amplitudes,
        })
    }

    /// Kronecker product; labels are `self` followed by `other`.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let mut labels = self.labels.clone();
        for l in &other.labels {
            if labels.contains(l) {
                return Err(Error::DuplicateLabel(*l));
            }
            labels.push(*l);
        }
        Ok(Self {
            labels,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }

    /// Same state with its factors reordered as `order`.
    pub fn permuted(&self, order: &[Subsystem]) -> Result<Self> {
        if order == self.labels.as_slice() {
            return Ok(self.clone());
        }
        if order.len() != self.labels.len() {
            return Err(Error::LabelMismatch {
                left: self.labels.clone(),
                right: order.to_vec(),
            });
        }
        check_distinct(order)?;
        // source position of each label of the new order
        let source = positions_in(order, &self.labels, Error::LabelNotInState).map_err(|_| {
            Error::LabelMismatch {
                left: self.labels.clone(),
                right: order.to_vec(),
            }
        })?;
        let n = order.len();
        let mut out = DVector::from_element(self.dim(), ZERO);
        for (old, amp) in self.amplitudes.iter().enumerate() {
            out[gather_bits(old, n, &source)] = *amp;
        }
        Ok(Self {
            labels: order.to_vec(),
            amplitudes: out,
        })
    }

    /// `<self|ket>`, conjugate-linear in `self`.
    pub fn inner(&self, ket: &StateVector) -> Result<C64> {
        if self.labels.len() != ket.labels.len() {
            return Err(Error::LabelMismatch {
                left: self.labels.clone(),
                right: ket.labels.clone(),
            });
        }
        let bra = self.permuted(&ket.labels)?;
        Ok(bra.amplitudes.dotc(&ket.amplitudes))
    }

    /// Contract `target` against the matching factors of this state, leaving
    /// an unnormalized state on the remaining labels (in this state's order).
    pub fn partial_inner(&self, target: &StateVector) -> Result<StateVector> {
        check_distinct(&target.labels)?;
        let n = self.labels.len();
        let picked = positions_in(&target.labels, &self.labels, Error::LabelNotInState)?;
        let rest = complement(n, &picked);
        let labels: Vec<Subsystem> = rest.iter().map(|&p| self.labels[p]).collect();
        let mut out = DVector::from_element(1 << rest.len(), ZERO);
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let t = gather_bits(i, n, &picked);
            out[gather_bits(i, n, &rest)] += target.amplitudes[t].conj() * amp;
        }
        Ok(Self {
            labels,
            amplitudes: out,
        })
    }

    /// Largest entrywise deviation from `other`, after aligning label order.
    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        let other = other.permuted(&self.labels)?;
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `|<self|other>|^2` for normalized states.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }
}

/// Dense square matrix acting on an ordered list of qubit subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    labels: Vec<Subsystem>,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(labels: Vec<Subsystem>, matrix: DMatrix<C64>) -> Result<Self> {
        check_distinct(&labels)?;
        let expected = 1usize << labels.len();
        if matrix.nrows() != expected || matrix.ncols() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { labels, matrix })
    }

    /// 2x2 operator on one subsystem from its rows.
    pub fn single(label: Subsystem, rows: [[C64; 2]; 2]) -> Self {
        Self {
            labels: vec![label],
            matrix: DMatrix::from_row_slice(
                2,
                2,
                &[rows[0][0], rows[0][1], rows[1][0], rows[1][1]],
            ),
        }
    }

    pub fn identity(labels: Vec<Subsystem>) -> Result<Self> {
        let dim = 1usize << labels.len();
        Self::new(labels, DMatrix::identity(dim, dim))
    }

    /// `|bit><bit|` on one subsystem.
    pub fn projector(label: Subsystem, bit: usize) -> Self {
        let mut rows = [[ZERO; 2]; 2];
        rows[bit][bit] = ONE;
        Self::single(label, rows)
    }

    pub fn pauli_x(label: Subsystem) -> Self {
        Self::single(label, [[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y(label: Subsystem) -> Self {
        Self::single(label, [[ZERO, -I], [I, ZERO]])
    }

    pub fn pauli_z(label: Subsystem) -> Self {
        Self::single(label, [[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            labels: self.labels.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            labels: self.labels.clone(),
            matrix: &self.matrix * factor,
        }
    }

    /// Kronecker product on disjoint label sets; `self` factors come first.
    pub fn kron(&self, other: &Operator) -> Result<Self> {
        let mut labels = self.labels.clone();
        for l in &other.labels {
            if labels.contains(l) {
                return Err(Error::DuplicateLabel(*l));
            }
            labels.push(*l);
        }
        Ok(Self {
            labels,
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }

    /// Lift onto `target`, acting as identity on every label not in `self`.
    pub fn embed(&self, target: &[Subsystem]) -> Result<Self> {
        check_distinct(target)?;
        if target == self.labels.as_slice() {
            return Ok(self.clone());
        }
        let n = target.len();
        let own = positions_in(&self.labels, target, Error::LabelNotInTarget)?;
        let rest = complement(n, &own);
        let dim = 1usize << n;
        let matrix = DMatrix::from_fn(dim, dim, |r, c| {
            if gather_bits(r, n, &rest) == gather_bits(c, n, &rest) {
                self.matrix[(gather_bits(r, n, &own), gather_bits(c, n, &own))]
            } else {
                ZERO
            }
        });
        Ok(Self {
            labels: target.to_vec(),
            matrix,
        })
    }

    /// Label list covering both operands: `self` labels, then new ones from `other`.
    fn joint_labels(&self, other: &Operator) -> Vec<Subsystem> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().filter(|l| !self.labels.contains(l)));
        labels
    }

    /// Operator product `self * other` on the union of their labels.
    pub fn compose(&self, other: &Operator) -> Result<Self> {
        let labels = self.joint_labels(other);
        let a = self.embed(&labels)?;
        let b = other.embed(&labels)?;
        Ok(Self {
            labels,
            matrix: a.matrix * b.matrix,
        })
    }

    pub fn plus(&self, other: &Operator) -> Result<Self> {
        let labels = self.joint_labels(other);
        let a = self.embed(&labels)?;
        let b = other.embed(&labels)?;
        Ok(Self {
            labels,
            matrix: a.matrix + b.matrix,
        })
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let full = self.embed(&state.labels).map_err(|e| match e {
            Error::LabelNotInTarget(l) => Error::LabelNotInState(l),
            other => other,
        })?;
        Ok(StateVector {
            labels: state.labels.clone(),
            amplitudes: full.matrix * &state.amplitudes,
        })
    }

    /// `<state|self|state>`.
    pub fn expectation(&self, state: &StateVector) -> Result<C64> {
        state.inner(&self.apply(state)?)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        let labels = self.joint_labels(other);
        let a = self.embed(&labels)?;
        let b = other.embed(&labels)?;
        Ok((a.matrix - b.matrix)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max))
    }

    pub fn is_unitary(&self) -> bool {
        self.is_unitary_within(TOLERANCE)
    }

    pub fn is_unitary_within(&self, tol: f64) -> bool {
        let product = &self.matrix * self.matrix.adjoint();
        let dim = self.dim();
        product.iter().enumerate().all(|(k, z)| {
            // column-major storage: k = c * dim + r
            let expected = if k % dim == k / dim { ONE } else { ZERO };
            (z - expected).norm() <= tol
        })
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_hermitian_within(TOLERANCE)
    }

    pub fn is_hermitian_within(&self, tol: f64) -> bool {
        let adj = self.matrix.adjoint();
        self.matrix
            .iter()
            .zip(adj.iter())
            .all(|(a, b)| (a - b).norm() <= tol)
    }
}
