//! Subspaces of `Kⁿ ⊕ Kⁿ`, the gap metric, the scaling action and the four
//! invariant subspaces of a linear relation.
//!
//! A relation `V` of dimension `n` is stored as an orthonormal `2n x n` frame
//! whose top block holds the `h` coordinates and bottom block the `p`
//! coordinates. Scaling by `λ` maps `(h, p) ↦ (h, λp)`.
//!
//! Rank decisions on the two `n x n` blocks of a frame use the frame's own
//! largest singular value (which is 1) as reference, so the dimension
//! identities `dim Ker + dim Im = n` and `dim Indef + dim Dom = n` hold
//! exactly: both sides are read off the same SVD.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Field, RANK_TOL};

#[derive(Clone, Debug)]
pub struct Subspace {
    field: Field,
    frame: CMatrix,
}

impl Subspace {
    /// Orthonormal frame of the column span of `columns`, with numerical rank
    /// decided by `σ > rank_tol · σ_max`.
    pub fn span_from_columns(
        field: Field,
        ambient_dim: usize,
        columns: &CMatrix,
        rank_tol: f64,
    ) -> Result<Self> {
        if columns.nrows() != ambient_dim {
            return Err(Error::Dimension(format!(
                "columns have {} rows, ambient dimension is {ambient_dim}",
                columns.nrows()
            )));
        }
        check_field(field, columns)?;
        Ok(Subspace {
            field,
            frame: linalg::orthonormal_basis(field, columns, rank_tol),
        })
    }

    /// Wraps a frame that is already orthonormal.
    pub(crate) fn from_frame(field: Field, frame: CMatrix) -> Self {
        Subspace { field, frame }
    }

    pub fn zero(field: Field, ambient_dim: usize) -> Self {
        Subspace {
            field,
            frame: CMatrix::zeros(ambient_dim, 0),
        }
    }

    pub fn full(field: Field, ambient_dim: usize) -> Self {
        Subspace {
            field,
            frame: CMatrix::identity(ambient_dim, ambient_dim),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &CMatrix {
        &self.frame
    }

    pub fn projector(&self) -> CMatrix {
        &self.frame * self.frame.adjoint()
    }

    fn check_compatible(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::Dimension(format!(
                "ambient dimensions {} and {} differ",
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    /// Gap metric: `‖P_U − P_V‖₂`. It is the sine of the largest principal
    /// angle for equal dimensions and 1 when the dimensions differ.
    pub fn gap(&self, other: &Subspace) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(linalg::frame_gap(&self.frame, &other.frame))
    }

    /// `U ∩ V` from the null space of the stacked frame `[F_U | −F_V]`.
    pub fn intersect(&self, other: &Subspace, rank_tol: f64) -> Result<Subspace> {
        self.check_compatible(other)?;
        let field = self.field;
        let stacked = linalg::hstack(&[&self.frame, &(-other.frame.clone())]);
        let s = linalg::svd(field, &stacked);
        let scale = s.sigma.first().copied().unwrap_or(0.0).max(1.0);
        let rank = s.sigma.iter().filter(|&&x| x > rank_tol * scale).count();
        let null = s.v.columns(rank, s.v.ncols() - rank).into_owned();
        let coeffs = null.rows(0, self.dim()).into_owned();
        let vectors = &self.frame * coeffs;
        let dim = s.v.ncols() - rank;
        Ok(Subspace {
            field,
            frame: linalg::orthonormal_basis_of_dim(field, &vectors, dim.min(self.dim())),
        })
    }

    /// Largest distance from a unit vector of `other` to `self`; zero iff
    /// `other ⊆ self`.
    pub fn containment_gap(&self, other: &Subspace) -> Result<f64> {
        self.check_compatible(other)?;
        if other.dim() == 0 {
            return Ok(0.0);
        }
        let residual = &other.frame - &self.frame * (self.frame.adjoint() * &other.frame);
        Ok(linalg::spectral_norm(&residual))
    }

    /// Orthonormal basis of `self ⊖ sub`, the orthogonal complement of `sub`
    /// inside `self` (assumes `sub ⊆ self`).
    pub fn complement_of(&self, sub: &Subspace) -> CMatrix {
        let dim = self.dim().saturating_sub(sub.dim());
        let projected = &self.frame - &sub.frame * (sub.frame.adjoint() * &self.frame);
        linalg::orthonormal_basis_of_dim(self.field, &projected, dim)
    }

    /// Same subspace viewed over the complex field.
    pub fn complexified(&self) -> Subspace {
        Subspace {
            field: Field::Complex,
            frame: self.frame.clone(),
        }
    }
}

fn check_field(field: Field, m: &CMatrix) -> Result<()> {
    if field == Field::Real && linalg::max_imag(m) != 0.0 {
        return Err(Error::Invalid(
            "complex entries in a real-field matrix".into(),
        ));
    }
    Ok(())
}

/// The quadruple `(Ker, Im, Dom, Indef)`, each a subspace of `Kⁿ`.
#[derive(Clone, Debug)]
pub struct InvariantSubspaces {
    pub ker: Subspace,
    pub im: Subspace,
    pub dom: Subspace,
    pub indef: Subspace,
}

/// The invertible map `Dom V / Ker V → Im V / Indef V` written in orthonormal
/// bases of `Dom ⊖ Ker` and `Im ⊖ Indef`.
#[derive(Clone, Debug)]
pub struct InducedOperator {
    pub dom_quotient_basis: CMatrix,
    pub im_quotient_basis: CMatrix,
    pub matrix: CMatrix,
}

impl InducedOperator {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }
}

/// Inverse condition number below which the induced operator counts as
/// numerically singular. It is invertible in exact arithmetic, so this only
/// guards against frames too inaccurate to carry it.
const INDUCED_INVERSE_COND: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct LinearRelation {
    n: usize,
    rank_tol: f64,
    space: Subspace,
    inv: InvariantSubspaces,
}

impl LinearRelation {
    pub fn new(space: Subspace, rank_tol: f64) -> Result<Self> {
        let ambient = space.ambient_dim();
        if ambient % 2 != 0 {
            return Err(Error::Dimension(format!("odd ambient dimension {ambient}")));
        }
        let n = ambient / 2;
        if space.dim() != n {
            return Err(Error::Dimension(format!(
                "relation in K^{n} ⊕ K^{n} must have dimension {n}, got {}",
                space.dim()
            )));
        }
        let inv = compute_invariants(&space, n, rank_tol);
        Ok(LinearRelation {
            n,
            rank_tol,
            space,
            inv,
        })
    }

    /// Relation spanned by the columns of a `2n x m` matrix.
    pub fn from_columns(field: Field, columns: &CMatrix, rank_tol: f64) -> Result<Self> {
        let space = Subspace::span_from_columns(field, columns.nrows(), columns, rank_tol)?;
        LinearRelation::new(space, rank_tol)
    }

    /// Graph `{(x, Ax)}` of a square matrix.
    pub fn graph(field: Field, a: &CMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension("graph of a non-square matrix".into()));
        }
        check_field(field, a)?;
        let n = a.nrows();
        let columns = linalg::vstack(&CMatrix::identity(n, n), a);
        let frame = linalg::orthonormal_basis_of_dim(field, &columns, n);
        LinearRelation::new(Subspace::from_frame(field, frame), RANK_TOL)
    }

    /// `Kⁿ ⊕ 0`.
    pub fn first_factor(field: Field, n: usize) -> Self {
        let frame = linalg::vstack(&CMatrix::identity(n, n), &CMatrix::zeros(n, n));
        LinearRelation::new(Subspace::from_frame(field, frame), RANK_TOL)
            .expect("coordinate subspace has dimension n")
    }

    /// `0 ⊕ Kⁿ`.
    pub fn second_factor(field: Field, n: usize) -> Self {
        let frame = linalg::vstack(&CMatrix::zeros(n, n), &CMatrix::identity(n, n));
        LinearRelation::new(Subspace::from_frame(field, frame), RANK_TOL)
            .expect("coordinate subspace has dimension n")
    }

    /// The scaling-fixed relation `(K ⊕ 0) + (0 ⊕ I)`.
    pub fn split(ker: &Subspace, indef: &Subspace, rank_tol: f64) -> Result<Self> {
        if ker.ambient_dim() != indef.ambient_dim() {
            return Err(Error::Dimension("kernel and indefiniteness in different spaces".into()));
        }
        let n = ker.ambient_dim();
        let field = ker.field().join(indef.field());
        if ker.dim() + indef.dim() != n {
            return Err(Error::Dimension(format!(
                "dim {} + dim {} != {n}",
                ker.dim(),
                indef.dim()
            )));
        }
        let frame = linalg::block_diag(ker.frame(), indef.frame());
        LinearRelation::new(Subspace::from_frame(field, frame), rank_tol)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.space.field()
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn subspace(&self) -> &Subspace {
        &self.space
    }

    pub fn frame(&self) -> &CMatrix {
        self.space.frame()
    }

    pub fn kernel(&self) -> &Subspace {
        &self.inv.ker
    }

    pub fn image(&self) -> &Subspace {
        &self.inv.im
    }

    pub fn domain(&self) -> &Subspace {
        &self.inv.dom
    }

    pub fn indefiniteness(&self) -> &Subspace {
        &self.inv.indef
    }

    pub fn invariant_subspaces(&self) -> &InvariantSubspaces {
        &self.inv
    }

    pub fn gap(&self, other: &LinearRelation) -> Result<f64> {
        self.space.gap(&other.space)
    }

    /// `λV = {(h, λp) : (h, p) ∈ V}`.
    ///
    /// `V` is spanned by `Ker ⊕ 0`, `0 ⊕ Indef` and the columns `(d, p)` over
    /// `Dom ⊖ Ker`. The first two are fixed by scaling; the last become
    /// `(d, λp)`, rescaled to `(d/λ, p)` when `|λ| > 1`, so the spanning set
    /// stays well conditioned for extreme factors.
    pub fn scale(&self, lambda: Complex64) -> Result<Self> {
        if lambda == Complex64::new(0.0, 0.0) || !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::ZeroScale);
        }
        let field = if lambda.im == 0.0 {
            self.field()
        } else {
            Field::Complex
        };
        let n = self.n;
        let (d, p) = self.operator_columns();
        let ker = self.inv.ker.frame();
        let indef = self.inv.indef.frame();
        let columns = if ker.ncols() + indef.ncols() + d.ncols() == n {
            let (a, b) = if lambda.norm() <= 1.0 {
                (Complex64::new(1.0, 0.0), lambda)
            } else {
                (lambda.inv(), Complex64::new(1.0, 0.0))
            };
            let top = linalg::hstack(&[ker, &CMatrix::zeros(n, indef.ncols()), &(&d * a)]);
            let bottom = linalg::hstack(&[&CMatrix::zeros(n, ker.ncols()), indef, &(&p * b)]);
            linalg::vstack(&top, &bottom)
        } else {
            let mut columns = self.frame().clone();
            for mut row in columns.rows_mut(n, n).row_iter_mut() {
                row *= lambda;
            }
            columns
        };
        // The block map is invertible, so the rank is always n.
        let frame = linalg::orthonormal_basis_of_dim(field, &columns, n);
        LinearRelation::new(Subspace::from_frame(field, frame), self.rank_tol)
    }

    pub fn scale_real(&self, lambda: f64) -> Result<Self> {
        self.scale(Complex64::new(lambda, 0.0))
    }

    /// `p` coordinates of the vectors of `V` whose `h` coordinates are the
    /// columns of `h` (which must lie in `Dom`), up to `Indef`.
    fn p_parts(&self, h: &CMatrix) -> CMatrix {
        let n = self.n;
        let top = self.frame().rows(0, n).into_owned();
        let bottom = self.frame().rows(n, n).into_owned();
        let s = linalg::svd(self.field(), &top);
        let r = s.sigma.iter().filter(|&&x| x > self.rank_tol).count();
        // Minimum-norm solutions of top · a = h; other solutions differ by
        // vectors whose p-part lies in Indef.
        let mut pinv = CMatrix::zeros(n, n);
        for j in 0..r {
            let vj = s.v.column(j);
            let uj = s.u.column(j);
            pinv += (vj * uj.adjoint()) / Complex64::new(s.sigma[j], 0.0);
        }
        bottom * pinv * h
    }

    /// Basis `d` of `Dom ⊖ Ker` with the matching `p` parts, `p ⊥ Indef`.
    fn operator_columns(&self) -> (CMatrix, CMatrix) {
        let d = self.inv.dom.complement_of(&self.inv.ker);
        let p = self.p_parts(&d);
        let indef = self.inv.indef.frame();
        let p = &p - indef * (indef.adjoint() * &p);
        (d, p)
    }

    /// Matrix of the induced operator in caller-supplied orthonormal bases of
    /// complements of `Ker` in `Dom` and of `Indef` in `Im`.
    pub fn induced_matrix_in(&self, dom_basis: &CMatrix, im_basis: &CMatrix) -> CMatrix {
        im_basis.adjoint() * self.p_parts(dom_basis)
    }

    pub fn induced_operator(&self) -> Result<InducedOperator> {
        let dom_quotient_basis = self.inv.dom.complement_of(&self.inv.ker);
        let im_quotient_basis = self.inv.im.complement_of(&self.inv.indef);
        let matrix = self.induced_matrix_in(&dom_quotient_basis, &im_quotient_basis);
        if matrix.nrows() > 0 {
            let ratio = linalg::inverse_condition(self.field(), &matrix).unwrap_or(0.0);
            if !(ratio > INDUCED_INVERSE_COND) {
                return Err(Error::SingularInducedOperator);
            }
        }
        Ok(InducedOperator {
            dom_quotient_basis,
            im_quotient_basis,
            matrix,
        })
    }

    /// `Ker V ⊕ Indef V` when the dimensions add up to `n`.
    pub fn fixed_part(&self) -> Option<LinearRelation> {
        LinearRelation::split(&self.inv.ker, &self.inv.indef, self.rank_tol).ok()
    }

    /// Gap between `V` and `Ker V ⊕ Indef V` (1 if the dimensions fall short).
    pub fn fixed_part_gap(&self) -> f64 {
        match self.fixed_part() {
            Some(fixed) => linalg::frame_gap(self.frame(), fixed.frame()),
            None => 1.0,
        }
    }

    pub fn is_scaling_fixed(&self, tol: f64) -> bool {
        self.fixed_part_gap() <= tol
    }

    /// Scalar `λ` with `λ·self ≈ other`: the least-squares solution of
    /// `y = λ M x`, where `M` is the induced operator of `self` and `(x, y)`
    /// are the frame columns of `other` in `self`'s quotient bases. `None`
    /// when `self` is fixed or no nonzero ratio exists.
    pub fn scale_estimate(&self, other: &LinearRelation) -> Option<Complex64> {
        let op = self.induced_operator().ok()?;
        if op.is_empty() || other.n != self.n {
            return None;
        }
        let n = self.n;
        let x = op.dom_quotient_basis.adjoint() * other.frame().rows(0, n);
        let y = op.im_quotient_basis.adjoint() * other.frame().rows(n, n);
        let mx = &op.matrix * x;
        let denom = mx.norm_squared();
        if denom == 0.0 {
            return None;
        }
        let lambda = mx.dotc(&y) / denom;
        if lambda.norm() > 0.0 && lambda.re.is_finite() && lambda.im.is_finite() {
            Some(lambda)
        } else {
            None
        }
    }

    /// Smallest gap from `other` to a member `λ·self` of the scaling orbit,
    /// using the estimated `λ`; `None` if no `λ` could be estimated.
    pub fn orbit_gap(&self, other: &LinearRelation) -> Result<Option<f64>> {
        if self.n != other.n {
            return Err(Error::Dimension("relations of different n".into()));
        }
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        match self.scale_estimate(other) {
            Some(lambda) => {
                let moved = self.scale(lambda)?;
                let moved = if moved.field() != other.field() {
                    // A complex λ for a real pair cannot be closer than its real part.
                    self.scale(Complex64::new(lambda.re, 0.0))?
                } else {
                    moved
                };
                Ok(Some(moved.gap(other)?))
            }
            None => Ok(None),
        }
    }

    /// Whether `other = λ·self` for some `λ ≠ 0`, within gap `tol`.
    pub fn equal_mod_scale(&self, other: &LinearRelation, tol: f64) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::Dimension("relations of different n".into()));
        }
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        let fixed_a = self.is_scaling_fixed(tol);
        let fixed_b = other.is_scaling_fixed(tol);
        match (fixed_a, fixed_b) {
            (true, true) => Ok(self.gap(other)? <= tol),
            (false, false) => Ok(matches!(self.orbit_gap(other)?, Some(g) if g <= tol)),
            _ => Ok(false),
        }
    }

    /// Same relation viewed over the complex field.
    pub fn complexified(&self) -> LinearRelation {
        LinearRelation {
            n: self.n,
            rank_tol: self.rank_tol,
            space: self.space.complexified(),
            inv: InvariantSubspaces {
                ker: self.inv.ker.complexified(),
                im: self.inv.im.complexified(),
                dom: self.inv.dom.complexified(),
                indef: self.inv.indef.complexified(),
            },
        }
    }
}

fn compute_invariants(space: &Subspace, n: usize, rank_tol: f64) -> InvariantSubspaces {
    let field = space.field();
    let frame = space.frame();
    let top = frame.rows(0, n).into_owned();
    let bottom = frame.rows(n, n).into_owned();

    // Im = range of the p-block; Ker = h-parts of the p-block's null vectors.
    let sb = linalg::svd(field, &bottom);
    let rank_b = sb.sigma.iter().filter(|&&x| x > rank_tol).count();
    let im = sb.u.columns(0, rank_b).into_owned();
    let ker_vectors = &top * sb.v.columns(rank_b, n - rank_b);
    let ker = linalg::orthonormal_basis_of_dim(field, &ker_vectors, n - rank_b);

    let st = linalg::svd(field, &top);
    let rank_t = st.sigma.iter().filter(|&&x| x > rank_tol).count();
    let dom = st.u.columns(0, rank_t).into_owned();
    let indef_vectors = &bottom * st.v.columns(rank_t, n - rank_t);
    let indef = linalg::orthonormal_basis_of_dim(field, &indef_vectors, n - rank_t);

    InvariantSubspaces {
        ker: Subspace::from_frame(field, ker),
        im: Subspace::from_frame(field, im),
        dom: Subspace::from_frame(field, dom),
        indef: Subspace::from_frame(field, indef),
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    /// Relation spanned by the given vectors of `K⁴`.
    pub fn rel(field: Field, vectors: &[[f64; 4]]) -> LinearRelation {
        let mut m = CMatrix::zeros(4, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            for i in 0..4 {
                m[(i, j)] = c(v[i]);
            }
        }
        LinearRelation::from_columns(field, &m, RANK_TOL).unwrap()
    }

    // The five relations of the diag(1, t) example, as (x, y; p1, p2).
    pub fn v1() -> LinearRelation {
        rel(Field::Complex, &[[1., 0., 0., 0.], [0., 1., 0., 0.]])
    }
    pub fn v2() -> LinearRelation {
        rel(Field::Complex, &[[1., 0., 0., 0.], [0., 1., 0., 1.]])
    }
    pub fn v3() -> LinearRelation {
        rel(Field::Complex, &[[1., 0., 0., 0.], [0., 0., 0., 1.]])
    }
    pub fn v4() -> LinearRelation {
        rel(Field::Complex, &[[1., 0., 1., 0.], [0., 0., 0., 1.]])
    }
    pub fn v5() -> LinearRelation {
        rel(Field::Complex, &[[0., 0., 1., 0.], [0., 0., 0., 1.]])
    }

    pub fn line(field: Field, vectors: &[[f64; 2]]) -> Subspace {
        let mut m = CMatrix::zeros(2, vectors.len());
        for (j, v) in vectors.iter().enumerate() {
            m[(0, j)] = c(v[0]);
            m[(1, j)] = c(v[1]);
        }
        Subspace::span_from_columns(field, 2, &m, RANK_TOL).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn same(a: &Subspace, b: &Subspace) -> bool {
        a.gap(b).unwrap() < 1e-12
    }

    #[test]
    fn span_of_identity_and_proportional_columns() {
        let id = CMatrix::identity(2, 2);
        let s = Subspace::span_from_columns(Field::Real, 2, &id, RANK_TOL).unwrap();
        assert_eq!(s.dim(), 2);
        let prop = CMatrix::from_row_slice(2, 2, &[c(1.), c(3.), c(2.), c(6.)]);
        let s = Subspace::span_from_columns(Field::Real, 2, &prop, RANK_TOL).unwrap();
        assert_eq!(s.dim(), 1);
        let zero = CMatrix::zeros(3, 2);
        let s = Subspace::span_from_columns(Field::Real, 3, &zero, RANK_TOL).unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn span_of_listed_columns_is_v4() {
        let m = CMatrix::from_column_slice(4, 2, &[c(1.), c(0.), c(1.), c(0.), c(0.), c(0.), c(0.), c(1.)]);
        let v = LinearRelation::from_columns(Field::Complex, &m, RANK_TOL).unwrap();
        assert!(v.gap(&v4()).unwrap() < 1e-14);
    }

    #[test]
    fn span_rejects_wrong_row_count() {
        let m = CMatrix::identity(3, 3);
        assert!(Subspace::span_from_columns(Field::Real, 4, &m, RANK_TOL).is_err());
    }

    #[test]
    fn gap_examples() {
        let a = line(Field::Real, &[[1., 0.]]);
        let b = line(Field::Real, &[[0., 1.]]);
        assert_eq!(a.gap(&a).unwrap(), 0.0);
        assert!((a.gap(&b).unwrap() - 1.0).abs() < 1e-15);
        // Principal-angle oracle: eigenvalues of the 2x2 projector difference
        // are ±sin θ.
        for &theta in &[0.1f64, 0.7, 1.3] {
            let r = line(Field::Real, &[[theta.cos(), theta.sin()]]);
            let diff = a.projector() - r.projector();
            let (p, q, s) = (diff[(0, 0)].re, diff[(0, 1)].re, diff[(1, 1)].re);
            let eig = (((p - s) / 2.0).powi(2) + q * q).sqrt() + (p + s) / 2.0;
            assert!((a.gap(&r).unwrap() - eig.abs()).abs() < 1e-14);
            assert!((a.gap(&r).unwrap() - theta.sin()).abs() < 1e-14);
        }
        let plane = Subspace::full(Field::Real, 2);
        assert_eq!(a.gap(&plane).unwrap(), 1.0);
    }

    #[test]
    fn gap_rejects_mismatched_ambients() {
        let a = Subspace::full(Field::Real, 2);
        let b = Subspace::full(Field::Real, 3);
        assert!(a.gap(&b).is_err());
        let c = Subspace::full(Field::Complex, 2);
        assert!(matches!(a.gap(&c), Err(Error::FieldMismatch)));
    }

    #[test]
    fn intersection_of_planes() {
        let e = |i: usize| {
            let mut v = CMatrix::zeros(3, 1);
            v[(i, 0)] = c(1.0);
            v
        };
        let xy = Subspace::span_from_columns(Field::Real, 3, &linalg::hstack(&[&e(0), &e(1)]), RANK_TOL).unwrap();
        let yz = Subspace::span_from_columns(Field::Real, 3, &linalg::hstack(&[&e(1), &e(2)]), RANK_TOL).unwrap();
        let y = xy.intersect(&yz, RANK_TOL).unwrap();
        assert_eq!(y.dim(), 1);
        assert!(y.gap(&Subspace::span_from_columns(Field::Real, 3, &e(1), RANK_TOL).unwrap()).unwrap() < 1e-14);
    }

    #[test]
    fn scaling_examples() {
        let v = v2();
        assert!(v.scale_real(1.0).unwrap().gap(&v).unwrap() < 1e-14);
        let doubled = v.scale_real(2.0).unwrap();
        let expected = rel(Field::Complex, &[[1., 0., 0., 0.], [0., 1., 0., 2.]]);
        assert!(doubled.gap(&expected).unwrap() < 1e-14);
        let a = CMatrix::from_row_slice(2, 2, &[c(1.), c(2.), c(0.), c(3.)]);
        let g = LinearRelation::graph(Field::Real, &a).unwrap();
        let g5 = LinearRelation::graph(Field::Real, &(a.clone() * c(5.0))).unwrap();
        assert!(g.scale_real(5.0).unwrap().gap(&g5).unwrap() < 1e-14);
        assert!(matches!(v.scale_real(0.0), Err(Error::ZeroScale)));
    }

    #[test]
    fn scaling_keeps_full_rank_at_extreme_factors() {
        let v = v3();
        let tiny = v.scale_real(1e-14).unwrap();
        assert_eq!(tiny.subspace().dim(), 2);
        assert!(tiny.gap(&v).unwrap() < 1e-14);
    }

    #[test]
    fn scaling_is_accurate_near_the_limits() {
        // λV₂ = span{(1,0;0,0), (0,1;0,λ)} lies at gap sin(atan λ) from V₁
        // and sin(atan 1/λ) from V₃.
        let small = v2().scale_real(1e-8).unwrap();
        assert!((small.gap(&v1()).unwrap() - 1e-8).abs() < 1e-15);
        let large = v2().scale_real(1e8).unwrap();
        let g = large.gap(&v3()).unwrap();
        assert!((g - 1e-8).abs() < 1e-15, "{g:e}");
        let lambda = v2().scale_estimate(&small).unwrap();
        assert!((lambda - c(1e-8)).norm() < 1e-22);
    }

    #[test]
    fn invariant_subspaces_of_v2_and_v3() {
        let x_axis = line(Field::Complex, &[[1., 0.]]);
        let y_axis = line(Field::Complex, &[[0., 1.]]);
        let v = v2();
        assert!(same(v.kernel(), &x_axis));
        assert!(same(v.image(), &y_axis));
        assert_eq!(v.domain().dim(), 2);
        assert_eq!(v.indefiniteness().dim(), 0);

        let v = v3();
        assert!(same(v.kernel(), &x_axis));
        assert!(same(v.image(), &y_axis));
        assert!(same(v.domain(), &x_axis));
        assert!(same(v.indefiniteness(), &y_axis));
    }

    #[test]
    fn invariant_subspaces_of_invertible_graph() {
        let a = CMatrix::from_row_slice(2, 2, &[c(2.), c(1.), c(1.), c(1.)]);
        let g = LinearRelation::graph(Field::Real, &a).unwrap();
        assert_eq!(g.kernel().dim(), 0);
        assert_eq!(g.indefiniteness().dim(), 0);
        assert_eq!(g.domain().dim(), 2);
        assert_eq!(g.image().dim(), 2);
    }

    #[test]
    fn induced_operator_examples() {
        let a = CMatrix::from_row_slice(2, 2, &[c(2.), c(1.), c(-1.), c(3.)]);
        let g = LinearRelation::graph(Field::Real, &a).unwrap();
        let op = g.induced_operator().unwrap();
        // Change to standard bases: D M D^H should equal A.
        let standard = &op.im_quotient_basis * &op.matrix * op.dom_quotient_basis.adjoint();
        assert!(linalg::max_abs(&(standard - a)) < 1e-13);

        let op = v2().induced_operator().unwrap();
        assert_eq!(op.size(), 1);
        assert!((op.matrix[(0, 0)].norm() - 1.0).abs() < 1e-14);

        assert!(v3().induced_operator().unwrap().is_empty());
    }

    #[test]
    fn fixed_points() {
        assert!(v1().is_scaling_fixed(1e-8));
        assert!(v3().is_scaling_fixed(1e-8));
        assert!(v5().is_scaling_fixed(1e-8));
        assert!(!v2().is_scaling_fixed(1e-8));
        assert!(!v4().is_scaling_fixed(1e-8));
        let id = LinearRelation::graph(Field::Complex, &CMatrix::identity(2, 2)).unwrap();
        assert!(!id.is_scaling_fixed(1e-8));
        // Fixed points are fixed by the scaling surrogate λ = 2, i.
        for lambda in [c(2.0), Complex64::new(0.0, 1.0)] {
            assert!(v3().scale(lambda).unwrap().gap(&v3()).unwrap() < 1e-14);
            assert!(v2().scale(lambda).unwrap().gap(&v2()).unwrap() > 0.1);
        }
    }

    #[test]
    fn equal_mod_scale_examples() {
        let tol = 1e-9;
        let a = CMatrix::from_row_slice(2, 2, &[c(1.), c(2.), c(0.5), c(-1.)]);
        let p = LinearRelation::graph(Field::Complex, &a).unwrap();
        assert!(p.equal_mod_scale(&p.scale_real(5.0).unwrap(), tol).unwrap());
        assert!(p.equal_mod_scale(&p.scale(Complex64::new(0.3, -2.0)).unwrap(), tol).unwrap());
        assert!(!v2().equal_mod_scale(&v4(), tol).unwrap());
        assert!(v3().equal_mod_scale(&v3(), tol).unwrap());
        assert!(!v2().equal_mod_scale(&v3(), tol).unwrap());

        // Rotate the frame of P by an angle with gap 10·tol.
        let theta = (10.0 * tol).asin();
        let mut rot = CMatrix::identity(4, 4);
        rot[(0, 0)] = c(theta.cos());
        rot[(2, 0)] = c(theta.sin());
        rot[(0, 2)] = c(-theta.sin());
        rot[(2, 2)] = c(theta.cos());
        let moved = LinearRelation::from_columns(Field::Complex, &(rot * p.frame()), RANK_TOL).unwrap();
        let g = moved.gap(&p).unwrap();
        assert!(g > 5.0 * tol, "perturbation gap {g}");
        assert!(!p.equal_mod_scale(&moved, tol).unwrap());
    }

    #[test]
    fn relation_rejects_wrong_dimension() {
        let s = Subspace::full(Field::Real, 4);
        assert!(LinearRelation::new(s, RANK_TOL).is_err());
    }
}
