use serde::Serialize;

use super::svd::svd;
use super::{ComplexMatrix, Tolerance};
use crate::error::{Error, Result};

/// Polar decomposition `y = ν|y|` with `ν` a partial isometry (zero on the
/// kernel of `|y|`, not a unitary completion).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PolarParts {
    pub isometry: ComplexMatrix,
    pub positive_part: ComplexMatrix,
    /// `νν*`, onto the range of `|y*|`.
    pub range_projection: ComplexMatrix,
    /// `ν*ν`, onto the range of `|y|`.
    pub support_projection: ComplexMatrix,
}

impl PolarParts {
    pub fn rank(&self) -> usize {
        self.support_projection.trace().re.round() as usize
    }
}

pub fn polar(m: &ComplexMatrix, tol: &Tolerance) -> Result<PolarParts> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let s = svd(m, tol)?;
    let isometry = s.partial_isometry();
    let positive_part = s.abs_power(1.0);
    let range_projection = isometry.mul_adjoint(&isometry);
    let support_projection = isometry.adjoint() * &isometry;
    Ok(PolarParts {
        isometry,
        positive_part,
        range_projection,
        support_projection,
    })
}
