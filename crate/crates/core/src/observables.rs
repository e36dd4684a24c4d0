//! The arm-resolved observables of the interferometer: which-path projectors
//! and the polarization components `sigma_x`, `sigma_z` restricted to one arm.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::state::{Operator, Subsystem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Observable {
    #[serde(rename = "piL")]
    PiL,
    #[serde(rename = "piR")]
    PiR,
    #[serde(rename = "xL")]
    XL,
    #[serde(rename = "xR")]
    XR,
    #[serde(rename = "zL")]
    ZL,
    #[serde(rename = "zR")]
    ZR,
}

/// Arm of the interferometer, i.e. a path basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Arm {
    Left,
    Right,
}

impl Arm {
    pub fn bit(self) -> usize {
        match self {
            Arm::Left => 0,
            Arm::Right => 1,
        }
    }

    pub fn projector(self) -> Operator {
        Operator::projector(Subsystem::Path, self.bit())
    }
}

impl Observable {
    pub const ALL: [Observable; 6] = [
        Observable::PiL,
        Observable::PiR,
        Observable::XL,
        Observable::XR,
        Observable::ZL,
        Observable::ZR,
    ];

    /// The polarization components measured in the delayed-choice setup.
    pub const COMPONENTS: [Observable; 4] = [
        Observable::XL,
        Observable::XR,
        Observable::ZL,
        Observable::ZR,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Observable::PiL => "piL",
            Observable::PiR => "piR",
            Observable::XL => "xL",
            Observable::XR => "xR",
            Observable::ZL => "zL",
            Observable::ZR => "zR",
        }
    }

    pub fn arm(self) -> Arm {
        match self {
            Observable::PiL | Observable::XL | Observable::ZL => Arm::Left,
            Observable::PiR | Observable::XR | Observable::ZR => Arm::Right,
        }
    }

    pub fn operator(self) -> Operator {
        let projector = self.arm().projector();
        let pol = Subsystem::Polarization;
        let component = match self {
            Observable::PiL | Observable::PiR => return projector,
            Observable::XL | Observable::XR => Operator::pauli_x(pol),
            Observable::ZL | Observable::ZR => Operator::pauli_z(pol),
        };
        projector
            .kron(&component)
            .expect("path and polarization are distinct")
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown observable `{0}` (expected one of piL, piR, xL, xR, zL, zR)")]
pub struct UnknownObservable(pub String);

impl FromStr for Observable {
    type Err = UnknownObservable;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Observable::ALL
            .into_iter()
            .find(|o| o.tag() == s)
            .ok_or_else(|| UnknownObservable(s.to_string()))
    }
}
