use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::METER;
use crate::error::{Error, Result};
use crate::observables::Arm;
use crate::state::{Operator, Subsystem, C64, ONE, ZERO};

const SYSTEM: [Subsystem; 2] = [Subsystem::Path, Subsystem::Polarization];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingFlavor {
    /// `exp(-i g A (x) Y_m)`: rotates the meter by `g a` on the eigenspace `a`.
    Canonical,
    /// `(I - P) (x) S (x) I + P (x) S (x) R Z R` for `A = P (x) S`, with `P` an
    /// arm projector and `S` a polarization involution.
    ArmRotation,
}

/// A weak system-meter interaction of strength `g = 4 theta_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingSpec {
    observable: Operator,
    g: f64,
    theta_g: f64,
    flavor: CouplingFlavor,
}

impl CouplingSpec {
    pub fn new(observable: Operator, g: f64, flavor: CouplingFlavor) -> Result<Self> {
        if !observable.is_hermitian() {
            return Err(Error::NonHermitianObservable);
        }
        if !g.is_finite() {
            return Err(Error::InvalidCoupling(g));
        }
        let observable = observable.embed(&SYSTEM)?;
        Ok(Self {
            observable,
            g,
            theta_g: g / 4.0,
            flavor,
        })
    }

    pub fn observable(&self) -> &Operator {
        &self.observable
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn theta_g(&self) -> f64 {
        self.theta_g
    }

    pub fn flavor(&self) -> CouplingFlavor {
        self.flavor
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `R(theta_g)`: `|0> -> cos 2t |0> + sin 2t |1>`, `|1> -> sin 2t |0> - cos 2t |1>`.
/// A reflection, hence its own inverse.
pub fn meter_rotation(theta_g: f64) -> Operator {
    let (s, c) = (2.0 * theta_g).sin_cos();
    Operator::single(METER, [[real(c), real(s)], [real(s), real(-c)]])
}

/// `R(theta_g) Z R(theta_g) = cos g Z + sin g X` with `g = 4 theta_g`.
pub fn arm_rotation_block(theta_g: f64) -> Operator {
    let r = meter_rotation(theta_g);
    r.compose(&Operator::pauli_z(METER))
        .and_then(|rz| rz.compose(&r))
        .expect("single meter label")
}

/// `exp(-i angle Y)` on the meter.
fn meter_turn(angle: f64) -> DMatrix<C64> {
    let (s, c) = angle.sin_cos();
    DMatrix::from_row_slice(2, 2, &[real(c), real(-s), real(s), real(c)])
}

/// Decomposition of a two-factor observable as `P_arm (x) S` with `S^2 = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmFactorization {
    pub arm: Arm,
    pub polarization: Operator,
}

impl ArmFactorization {
    pub fn of(observable: &Operator) -> Result<Self> {
        let a = observable.embed(&SYSTEM)?;
        let m = a.matrix();
        let block = |r: usize, c: usize| m.view((2 * r, 2 * c), (2, 2)).into_owned();
        let vanishes = |b: &DMatrix<C64>| b.iter().all(|z| z.norm() <= 1e-12);
        if !vanishes(&block(0, 1)) || !vanishes(&block(1, 0)) {
            return Err(Error::UnsupportedCoupling);
        }
        let (arm, s) = match (vanishes(&block(0, 0)), vanishes(&block(1, 1))) {
            (false, true) => (Arm::Left, block(0, 0)),
            (true, false) => (Arm::Right, block(1, 1)),
            _ => return Err(Error::UnsupportedCoupling),
        };
        let polarization = Operator::new(vec![Subsystem::Polarization], s)?;
        let squared = polarization.compose(&polarization)?;
        let id = Operator::identity(vec![Subsystem::Polarization])?;
        if !polarization.is_hermitian() || squared.max_abs_diff(&id)? > 1e-12 {
            return Err(Error::UnsupportedCoupling);
        }
        Ok(Self { arm, polarization })
    }

    /// `I (x) S`: the involution applied regardless of arm.
    pub fn polarization_part(&self) -> &Operator {
        &self.polarization
    }
}

/// Joint unitary on `[Path, Polarization, Meter(0)]`.
pub fn coupling_unitary(spec: &CouplingSpec) -> Result<Operator> {
    let labels = vec![Subsystem::Path, Subsystem::Polarization, METER];
    match spec.flavor {
        CouplingFlavor::Canonical => {
            // exp(-i g A (x) Y) = sum_k |v_k><v_k| (x) exp(-i g a_k Y)
            let eigen = spec.observable.matrix().clone().symmetric_eigen();
            let mut u = DMatrix::from_element(8, 8, ZERO);
            for (k, &a) in eigen.eigenvalues.iter().enumerate() {
                let v = eigen.eigenvectors.column(k);
                let projector = v * v.adjoint();
                u += projector.kronecker(&meter_turn(spec.g * a));
            }
            Operator::new(labels, u)
        }
        CouplingFlavor::ArmRotation => {
            let f = ArmFactorization::of(&spec.observable)?;
            let p = f.arm.projector();
            let rest = Operator::identity(vec![Subsystem::Path])?.plus(&p.scaled(-ONE))?;
            let meter_id = Operator::identity(vec![METER])?;
            let idle = rest.kron(&f.polarization)?.kron(&meter_id)?;
            let active = p
                .kron(&f.polarization)?
                .kron(&arm_rotation_block(spec.theta_g))?;
            idle.plus(&active)?.embed(&labels)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::Observable;

    #[test]
    fn theta_g_is_a_quarter_of_g() {
        for g in [1e-4, 3e-3, 0.1] {
            let spec =
                CouplingSpec::new(Observable::ZL.operator(), g, CouplingFlavor::Canonical).unwrap();
            assert_eq!(spec.theta_g() * 4.0, spec.g());
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let bad = Operator::single(Subsystem::Path, [[ZERO, ONE], [ZERO, ZERO]]);
        assert_eq!(
            CouplingSpec::new(bad, 1e-3, CouplingFlavor::Canonical).unwrap_err(),
            Error::NonHermitianObservable
        );
    }

    #[test]
    fn zero_strength_canonical_is_identity() {
        let spec =
            CouplingSpec::new(Observable::XR.operator(), 0.0, CouplingFlavor::Canonical).unwrap();
        let u = coupling_unitary(&spec).unwrap();
        let id = Operator::identity(u.labels().to_vec()).unwrap();
        assert!(u.max_abs_diff(&id).unwrap() < 1e-14);
    }

    #[test]
    fn meter_block_closed_form() {
        for g in [0.0, 1e-3, 0.05, 0.1, 1.3] {
            let block = arm_rotation_block(g / 4.0);
            let (s, c) = g.sin_cos();
            let expected = Operator::single(METER, [[real(c), real(s)], [real(s), real(-c)]]);
            assert!(block.max_abs_diff(&expected).unwrap() < 1e-15);
            let r = meter_rotation(g / 4.0);
            let id = Operator::identity(vec![METER]).unwrap();
            assert!(r.compose(&r).unwrap().max_abs_diff(&id).unwrap() < 1e-15);
        }
    }

    #[test]
    fn both_flavors_unitary() {
        for o in Observable::ALL {
            for flavor in [CouplingFlavor::Canonical, CouplingFlavor::ArmRotation] {
                let spec = CouplingSpec::new(o.operator(), 0.07, flavor).unwrap();
                assert!(
                    coupling_unitary(&spec).unwrap().is_unitary(),
                    "{o} {flavor:?}"
                );
            }
        }
    }

    #[test]
    fn canonical_rotates_meter_by_eigenvalue() {
        // |L>|H> has sigma_z^L eigenvalue +1, |L>|V> has -1, |R>.. has 0
        let g = 0.03;
        let spec =
            CouplingSpec::new(Observable::ZL.operator(), g, CouplingFlavor::Canonical).unwrap();
        let u = coupling_unitary(&spec).unwrap();
        let m = u.matrix();
        // column |L,H,0> (index 0) -> cos g |L,H,0> + sin g |L,H,1>
        assert!((m[(0, 0)] - g.cos()).norm() < 1e-14);
        assert!((m[(1, 0)] - g.sin()).norm() < 1e-14);
        // column |L,V,0> (index 2) -> cos g |L,V,0> - sin g |L,V,1>
        assert!((m[(2, 2)] - g.cos()).norm() < 1e-14);
        assert!((m[(3, 2)] + g.sin()).norm() < 1e-14);
        // right arm untouched
        assert!((m[(4, 4)] - 1.0).norm() < 1e-14);
        assert!(m[(5, 4)].norm() < 1e-14);
    }

    #[test]
    fn factorization() {
        let f = ArmFactorization::of(&Observable::ZR.operator()).unwrap();
        assert_eq!(f.arm, Arm::Right);
        assert_eq!(f.polarization, Operator::pauli_z(Subsystem::Polarization));
        let f = ArmFactorization::of(&Observable::PiL.operator()).unwrap();
        assert_eq!(f.arm, Arm::Left);
        let spread = Operator::pauli_x(Subsystem::Polarization);
        assert_eq!(
            ArmFactorization::of(&spread).unwrap_err(),
            Error::UnsupportedCoupling
        );
        let cross = Operator::pauli_x(Subsystem::Path);
        assert_eq!(
            ArmFactorization::of(&cross).unwrap_err(),
            Error::UnsupportedCoupling
        );
    }
}
