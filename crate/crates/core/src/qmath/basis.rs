use std::fmt;

use serde::{Deserialize, Serialize};

use super::state::PureState;
use super::unitary::Unitary;

/// Names a single-qubit measurement basis.
///
/// `General(theta)` is `{|x>, |y>}` with `|x> = cos(theta)|0> + sin(theta)|1>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum BasisLabel {
    Z,
    X,
    Y,
    General(f64),
}

impl BasisLabel {
    /// Short tag used in tables and traces. All general bases print as `G`.
    pub fn tag(&self) -> &'static str {
        match self {
            BasisLabel::Z => "Z",
            BasisLabel::X => "X",
            BasisLabel::Y => "Y",
            BasisLabel::General(_) => "G",
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A labelled orthonormal single-qubit basis `{v0, v1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    label: BasisLabel,
    vectors: [PureState; 2],
}

impl MeasurementBasis {
    pub fn z() -> Self {
        Self {
            label: BasisLabel::Z,
            vectors: [PureState::zero(), PureState::one()],
        }
    }

    pub fn x() -> Self {
        Self {
            label: BasisLabel::X,
            vectors: [PureState::plus(), PureState::minus()],
        }
    }

    pub fn y() -> Self {
        Self {
            label: BasisLabel::Y,
            vectors: [PureState::plus_i(), PureState::minus_i()],
        }
    }

    pub fn general(theta: f64) -> Self {
        Self {
            label: BasisLabel::General(theta),
            vectors: [PureState::angle(theta), PureState::angle_orthogonal(theta)],
        }
    }

    pub fn from_label(label: BasisLabel) -> Self {
        match label {
            BasisLabel::Z => Self::z(),
            BasisLabel::X => Self::x(),
            BasisLabel::Y => Self::y(),
            BasisLabel::General(t) => Self::general(t),
        }
    }

    pub fn label(&self) -> BasisLabel {
        self.label
    }

    pub fn vector(&self, index: u8) -> &PureState {
        &self.vectors[usize::from(index & 1)]
    }

    pub fn vectors(&self) -> &[PureState; 2] {
        &self.vectors
    }

    /// Unitary `W` with `W|0> = v0`, `W|1> = v1`.
    pub fn change_of_basis(&self) -> Unitary {
        Unitary::from_columns(&self.vectors[0], &self.vectors[1])
            .expect("basis vectors are orthonormal")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bases_are_orthonormal() {
        for b in [
            MeasurementBasis::z(),
            MeasurementBasis::x(),
            MeasurementBasis::y(),
            MeasurementBasis::general(0.7),
        ] {
            let [v0, v1] = b.vectors();
            assert!(v0.inner(v1).unwrap().norm() < 1e-12);
            assert!((v0.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((v1.norm_sqr() - 1.0).abs() < 1e-12);
            assert!(b.change_of_basis().unitarity_deviation() < 1e-12);
        }
    }
}
