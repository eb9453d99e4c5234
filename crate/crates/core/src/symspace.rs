//! Lagrangian relations in `ℝⁿ ⊕ ℝⁿ`, the congruence action `S ↦ gᵀSg`,
//! and positive-definite boundary hinges of `GLₙ(ℝ)/O(n)`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hinge::{self, Hinge, HingeReport};
use crate::linalg::{self, CMatrix, Field, RANK_TOL};
use crate::linrel::{LinearRelation, Subspace};

/// Relative floor for the smallest eigenvalue of a positive definite block.
pub const PD_FLOOR: f64 = 1e-8;

/// `ℝⁿ ⊕ ℝⁿ` with the skew form `J = ((0, I), (−I, 0))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticAmbient {
    n: usize,
}

impl SymplecticAmbient {
    pub fn new(n: usize) -> Self {
        SymplecticAmbient { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn form(&self) -> DMatrix<f64> {
        let n = self.n;
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            j[(i, n + i)] = 1.0;
            j[(n + i, i)] = -1.0;
        }
        j
    }
}

/// `max |Fᵀ J F|` over the frame `F` of `v`.
pub fn lagrangian_residual(v: &Subspace, amb: &SymplecticAmbient) -> Result<f64> {
    if v.ambient_dim() != 2 * amb.n() {
        return Err(Error::Dimension(format!(
            "subspace of K^{} in a symplectic space of dimension {}",
            v.ambient_dim(),
            2 * amb.n()
        )));
    }
    if v.field() != Field::Real {
        return Err(Error::RealFieldRequired);
    }
    let f = linalg::real_part(v.frame());
    let w = f.transpose() * amb.form() * &f;
    Ok(w.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

pub fn is_lagrangian(v: &Subspace, amb: &SymplecticAmbient, tol: f64) -> Result<bool> {
    let residual = lagrangian_residual(v, amb)?;
    Ok(v.dim() == amb.n() && residual <= tol)
}

fn check_invertible(g: &DMatrix<f64>) -> Result<()> {
    if !g.is_square() {
        return Err(Error::Dimension("expected a square matrix".into()));
    }
    match linalg::inverse_condition(Field::Real, &linalg::to_complex(g)) {
        Some(r) if r > RANK_TOL => Ok(()),
        Some(_) => Err(Error::SingularMatrix),
        None => Err(Error::Dimension("empty matrix".into())),
    }
}

/// `gᵀ S g`.
pub fn congruence_act(g: &DMatrix<f64>, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_invertible(g)?;
    if s.shape() != g.shape() {
        return Err(Error::Dimension("g and S differ in size".into()));
    }
    Ok(g.transpose() * s * g)
}

/// The action of `g` on relations that sends `graph(S)` to `graph(gᵀSg)`:
/// `(h, p) ↦ (g⁻¹h, gᵀp)`.
pub fn act_on_relation(g: &DMatrix<f64>, v: &LinearRelation) -> Result<LinearRelation> {
    check_invertible(g)?;
    let n = v.n();
    if g.nrows() != n {
        return Err(Error::Dimension("g and the relation differ in size".into()));
    }
    let g_inv = g.clone().try_inverse().ok_or(Error::SingularMatrix)?;
    let top = linalg::to_complex(&g_inv) * v.frame().rows(0, n);
    let bottom = linalg::to_complex(&g.transpose()) * v.frame().rows(n, n);
    let columns = linalg::vstack(&top, &bottom);
    let frame = linalg::orthonormal_basis_of_dim(v.field(), &columns, n);
    LinearRelation::from_columns(v.field(), &frame, v.rank_tol())
}

pub fn act_on_hinge(g: &DMatrix<f64>, h: &Hinge) -> Result<Hinge> {
    let p = h
        .p()
        .iter()
        .map(|r| act_on_relation(g, r))
        .collect::<Result<Vec<_>>>()?;
    Hinge::from_components(p)
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSpectrum {
    pub component: usize,
    pub eigenvalues: Vec<f64>,
    pub skew_residual: f64,
    pub positive_definite: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PdReport {
    pub hinge: HingeReport,
    /// Residuals of `Q₀, P₁, Q₁, …, P_k, Q_k` in chain order.
    pub lagrangian_residual: Vec<f64>,
    pub block_eigenvalues: Vec<BlockSpectrum>,
    pub passed: bool,
}

/// Eigenvalues of the symmetrized induced operator of a Lagrangian relation.
///
/// For a Lagrangian `V`, `Indef = Dom^⊥` and `Ker = Im^⊥`, so both quotients
/// are represented by the same subspace `Dom ⊖ Ker` and the operator is a
/// square matrix in one orthonormal basis.
pub fn block_spectrum(v: &LinearRelation, component: usize) -> BlockSpectrum {
    let d = v.domain().complement_of(v.kernel());
    let m = linalg::real_part(&v.induced_matrix_in(&d, &d));
    let sym = (&m + m.transpose()) * 0.5;
    let skew = (&m - m.transpose()) * 0.5;
    let skew_residual = skew.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let mut eigenvalues: Vec<f64> = if sym.nrows() == 0 {
        Vec::new()
    } else {
        SymmetricEigen::new(sym).eigenvalues.iter().copied().collect()
    };
    eigenvalues.sort_by(f64::total_cmp);
    let positive_definite = match (eigenvalues.first(), eigenvalues.last()) {
        (Some(&lo), Some(&hi)) => lo > 0.0 && lo >= PD_FLOOR * hi,
        _ => false,
    };
    BlockSpectrum {
        component,
        eigenvalues,
        skew_residual,
        positive_definite,
    }
}

pub fn validate_pd_hinge(h: &Hinge, amb: &SymplecticAmbient, tol: f64) -> Result<PdReport> {
    if h.field() != Field::Real {
        return Err(Error::RealFieldRequired);
    }
    if h.n() != amb.n() {
        return Err(Error::Dimension("hinge and symplectic space differ in n".into()));
    }
    let hinge = hinge::validate_hinge(h, tol);
    let mut lagrangian_residual = Vec::new();
    for j in 0..h.k() {
        lagrangian_residual.push(lagrangian_residual_of(&h.q()[j], amb)?);
        lagrangian_residual.push(lagrangian_residual_of(&h.p()[j], amb)?);
    }
    lagrangian_residual.push(lagrangian_residual_of(&h.q()[h.k()], amb)?);
    let block_eigenvalues: Vec<BlockSpectrum> = h
        .p()
        .iter()
        .enumerate()
        .map(|(j, p)| block_spectrum(p, j + 1))
        .collect();
    let passed = hinge.passed
        && lagrangian_residual.iter().all(|&r| r <= tol)
        && block_eigenvalues.iter().all(|b| b.positive_definite);
    Ok(PdReport {
        hinge,
        lagrangian_residual,
        block_eigenvalues,
        passed,
    })
}

fn lagrangian_residual_of(v: &LinearRelation, amb: &SymplecticAmbient) -> Result<f64> {
    lagrangian_residual(v.subspace(), amb)
}

/// A real hinge with Lagrangian components and positive definite blocks.
#[derive(Clone, Debug)]
pub struct PdHinge {
    hinge: Hinge,
    report: PdReport,
}

impl PdHinge {
    pub fn hinge(&self) -> &Hinge {
        &self.hinge
    }

    pub fn report(&self) -> &PdReport {
        &self.report
    }

    pub fn into_hinge(self) -> Hinge {
        self.hinge
    }
}

fn check_spd(s: &DMatrix<f64>, t: f64) -> Result<()> {
    if !s.is_square() {
        return Err(Error::Dimension("expected a square matrix".into()));
    }
    let scale = s.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let asym = (s - s.transpose()).iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if asym > 1e-12 * scale || s.clone().cholesky().is_none() {
        return Err(Error::Invalid(format!(
            "family is not symmetric positive definite at t = {t}"
        )));
    }
    Ok(())
}

/// Limit hinge of the family of symmetric positive definite `S(t)`, checked
/// to be Lagrangian with positive definite blocks.
pub fn pd_boundary_hinge<F>(family: F, probes: &[f64], tol: f64) -> Result<PdHinge>
where
    F: Fn(f64) -> DMatrix<f64>,
{
    for &t in probes {
        check_spd(&family(t), t)?;
    }
    let h = hinge::hinge_limit_symmetric(|t| linalg::to_complex(&family(t)), probes, tol)?;
    let amb = SymplecticAmbient::new(h.n());
    let report = validate_pd_hinge(&h, &amb, tol)?;
    for (idx, &r) in report.lagrangian_residual.iter().enumerate() {
        if r > tol {
            let name = if idx % 2 == 0 {
                format!("Q{}", idx / 2)
            } else {
                format!("P{}", idx / 2 + 1)
            };
            return Err(Error::NotPositiveDefinite {
                component: idx / 2 + idx % 2,
                reason: format!("{name} is not Lagrangian (residual {r:e})"),
            });
        }
    }
    if let Some(b) = report.block_eigenvalues.iter().find(|b| !b.positive_definite) {
        return Err(Error::NotPositiveDefinite {
            component: b.component,
            reason: format!("block eigenvalues {:?}", b.eigenvalues),
        });
    }
    Ok(PdHinge { hinge: h, report })
}

/// Graph of a real matrix as a relation over the real field.
pub fn real_graph(s: &DMatrix<f64>) -> Result<LinearRelation> {
    LinearRelation::graph(Field::Real, &linalg::to_complex(s))
}

/// Real part of a matrix whose entries are all real.
pub fn real_matrix(m: &CMatrix) -> Result<DMatrix<f64>> {
    if linalg::max_imag(m) != 0.0 {
        return Err(Error::RealFieldRequired);
    }
    Ok(linalg::real_part(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linrel::fixtures::{rel, v2, v4};
    use crate::random;

    fn diag(d: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(d))
    }

    #[test]
    fn form_is_skew() {
        let j = SymplecticAmbient::new(3).form();
        assert_eq!(j.transpose(), -j);
    }

    #[test]
    fn lagrangian_examples() {
        let amb = SymplecticAmbient::new(2);
        let sym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -3.0]);
        let nonsym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, -3.0]);
        assert!(is_lagrangian(real_graph(&sym).unwrap().subspace(), &amb, 1e-12).unwrap());
        assert!(!is_lagrangian(real_graph(&nonsym).unwrap().subspace(), &amb, 1e-12).unwrap());
        let first = LinearRelation::first_factor(Field::Real, 2);
        assert!(is_lagrangian(first.subspace(), &amb, 0.0).unwrap());
        assert!(matches!(
            is_lagrangian(first.subspace(), &SymplecticAmbient::new(3), 1e-12),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn congruence_examples() {
        let mut rng = random::seeded(2);
        let o = linalg::real_part(&random::unitary(&mut rng, Field::Real, 3));
        let id = DMatrix::identity(3, 3);
        let moved = congruence_act(&o, &id).unwrap();
        assert!((moved - &id).amax() < 1e-14);
        assert_eq!(congruence_act(&diag(&[2.0, 1.0]), &DMatrix::identity(2, 2)).unwrap(), diag(&[4.0, 1.0]));
        assert!(matches!(
            congruence_act(&diag(&[1.0, 0.0]), &DMatrix::identity(2, 2)),
            Err(Error::SingularMatrix)
        ));
        for _ in 0..100 {
            let g = random::real_gaussian(&mut rng, 3, 3);
            let s = random::symmetric_positive_definite(&mut rng, 3, 100.0);
            let out = congruence_act(&g, &s).unwrap();
            let e = SymmetricEigen::new((&out + out.transpose()) * 0.5).eigenvalues;
            assert!(e.min() > 0.0);
        }
    }

    #[test]
    fn relation_action_matches_congruence() {
        let mut rng = random::seeded(4);
        let g = random::real_gaussian(&mut rng, 3, 3);
        let s = random::symmetric_positive_definite(&mut rng, 3, 10.0);
        let moved = act_on_relation(&g, &real_graph(&s).unwrap()).unwrap();
        let expected = real_graph(&congruence_act(&g, &s).unwrap()).unwrap();
        assert!(moved.gap(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn pd_boundary_of_the_worked_example() {
        let probes: Vec<f64> = (1..=6).map(|j| 10f64.powi(j)).collect();
        let h = pd_boundary_hinge(|t| diag(&[1.0, t]), &probes, 1e-8).unwrap();
        assert_eq!(h.hinge().k(), 2);
        let real_v2 = rel(Field::Real, &[[1., 0., 0., 0.], [0., 1., 0., 1.]]);
        let real_v4 = rel(Field::Real, &[[1., 0., 1., 0.], [0., 0., 0., 1.]]);
        assert!(h.hinge().p()[0].equal_mod_scale(&real_v2, 1e-12).unwrap());
        assert!(h.hinge().p()[1].equal_mod_scale(&real_v4, 1e-12).unwrap());
        for b in &h.report().block_eigenvalues {
            assert_eq!(b.eigenvalues.len(), 1);
            assert!(b.positive_definite);
        }
    }

    #[test]
    fn pd_boundary_of_scalar_family_is_one_graph() {
        let h = pd_boundary_hinge(|t| DMatrix::identity(2, 2) * t, &[10.0, 100.0], 1e-8).unwrap();
        assert_eq!(h.hinge().k(), 1);
        let graph = real_graph(&DMatrix::identity(2, 2)).unwrap();
        assert!(h.hinge().p()[0].equal_mod_scale(&graph, 1e-12).unwrap());
    }

    #[test]
    fn validate_pd_examples() {
        let amb = SymplecticAmbient::new(2);
        let indefinite = hinge::hinge_of_invertible(Field::Real, &linalg::to_complex(&diag(&[1.0, -1.0]))).unwrap();
        let report = validate_pd_hinge(&indefinite, &amb, 1e-8).unwrap();
        assert!(report.hinge.passed && !report.passed);
        assert!(report.block_eigenvalues[0].eigenvalues.iter().any(|e| (e + 1.0).abs() < 1e-12));

        let complex = hinge::Hinge::from_components(vec![v2(), v4()]).unwrap();
        assert!(matches!(validate_pd_hinge(&complex, &amb, 1e-8), Err(Error::RealFieldRequired)));
    }
}
