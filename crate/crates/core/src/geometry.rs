//! Affine lines in F_q^m.

use crate::gf::{vec_add, vec_scale, vec_sub, FieldElement};
use crate::matrix::vectors_rank;

/// The points `base + t * direction` for the listed parameters `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub base: Vec<FieldElement>,
    pub direction: Vec<FieldElement>,
    pub params: Vec<FieldElement>,
}

impl Line {
    pub fn point_at(&self, t: FieldElement) -> Vec<FieldElement> {
        vec_add(&self.base, &vec_scale(&self.direction, t))
    }

    pub fn points(&self) -> Vec<Vec<FieldElement>> {
        self.params.iter().map(|&t| self.point_at(t)).collect()
    }

    /// Parameter `t` of `p` if it lies on the full line through `base`.
    pub fn param_of(&self, p: &[FieldElement]) -> Option<FieldElement> {
        param_along(&self.base, &self.direction, p)
    }
}

/// `t` with `p = base + t * dir`, if one exists. `dir` must be nonzero.
pub fn param_along(base: &[FieldElement], dir: &[FieldElement], p: &[FieldElement]) -> Option<FieldElement> {
    let diff = vec_sub(p, base);
    let i = dir.iter().position(|d| !d.is_zero())?;
    let t = diff[i] * dir[i].inv().ok()?;
    (vec_add(base, &vec_scale(dir, t)) == p).then_some(t)
}

/// True iff all points lie on one affine line. Fewer than three points are
/// always collinear.
pub fn support_is_collinear(points: &[Vec<FieldElement>]) -> bool {
    let Some(first) = points.first() else {
        return true;
    };
    let field = first[0].field();
    let diffs: Vec<Vec<FieldElement>> = points[1..].iter().map(|p| vec_sub(p, first)).collect();
    vectors_rank(field, first.len(), &diffs) <= 1
}
