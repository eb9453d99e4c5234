//! Hinges: chains `(Q₀, P₁, Q₁, …, P_k, Q_k)` of relations, their validation,
//! closed-set samples, and numerical limits of orbit closures.

use std::f64::consts::{LN_10, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, Field, RANK_TOL};
use crate::linrel::{LinearRelation, Subspace};
use crate::metric::{self, ClosedSetSample, GrassmannGap, Metric};

pub const DEFAULT_TOL: f64 = 1e-8;

/// Consecutive singular values closer than this ratio share a scale group.
pub const SCALE_GROUP_RATIO: f64 = 1e2;

/// Sample members this close to an end of their orbit are never used as
/// orbit representatives during extraction.
const CENTRAL_GAP: f64 = 1e-2;

#[derive(Clone, Debug)]
pub struct Hinge {
    n: usize,
    field: Field,
    p: Vec<LinearRelation>,
    q: Vec<LinearRelation>,
}

impl Hinge {
    /// Hinge with the given `P` components and derived `Q` components.
    pub fn from_components(p: Vec<LinearRelation>) -> Result<Self> {
        let q = derive_q(&p)?;
        Ok(Hinge {
            n: p[0].n(),
            field: field_of(&p),
            p,
            q,
        })
    }

    /// Hinge from explicit components, as read from a file. Nothing beyond
    /// the shapes is checked; use [`validate_hinge`].
    pub fn from_parts(p: Vec<LinearRelation>, q: Vec<LinearRelation>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidHinge("no P components".into()));
        }
        if q.len() != p.len() + 1 {
            return Err(Error::InvalidHinge(format!(
                "{} P components need {} Q components, got {}",
                p.len(),
                p.len() + 1,
                q.len()
            )));
        }
        let n = p[0].n();
        if p.iter().chain(&q).any(|r| r.n() != n) {
            return Err(Error::Dimension("hinge components of different n".into()));
        }
        let field = field_of(&p).join(field_of(&q));
        Ok(Hinge { n, field, p, q })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn k(&self) -> usize {
        self.p.len()
    }

    pub fn p(&self) -> &[LinearRelation] {
        &self.p
    }

    pub fn q(&self) -> &[LinearRelation] {
        &self.q
    }

    /// Component-wise equality: `P` up to scale, `Q` exactly, within `tol`.
    pub fn equivalent(&self, other: &Hinge, tol: f64) -> Result<bool> {
        if self.n != other.n || self.k() != other.k() {
            return Ok(false);
        }
        let field = self.field.join(other.field);
        for (a, b) in self.p.iter().zip(&other.p) {
            if !in_field(a, field).equal_mod_scale(&in_field(b, field), tol)? {
                return Ok(false);
            }
        }
        for (a, b) in self.q.iter().zip(&other.q) {
            if GrassmannGap.distance(a, b) > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn field_of(relations: &[LinearRelation]) -> Field {
    relations
        .iter()
        .fold(Field::Real, |f, r| f.join(r.field()))
}

fn in_field(r: &LinearRelation, field: Field) -> LinearRelation {
    if r.field() == field {
        r.clone()
    } else {
        r.complexified()
    }
}

/// `Q₀ = Kⁿ ⊕ 0`, `Q_j = (Ker P_j ⊕ 0) + (0 ⊕ Im P_j)`, `Q_k = 0 ⊕ Kⁿ`.
pub fn derive_q(p: &[LinearRelation]) -> Result<Vec<LinearRelation>> {
    let first = p
        .first()
        .ok_or_else(|| Error::InvalidHinge("no P components".into()))?;
    let n = first.n();
    if p.iter().any(|r| r.n() != n) {
        return Err(Error::Dimension("P components of different n".into()));
    }
    let field = field_of(p);
    let p: Vec<LinearRelation> = p.iter().map(|r| in_field(r, field)).collect();
    for j in 0..p.len() - 1 {
        let (a, b) = (&p[j], &p[j + 1]);
        let consistent = a.kernel().dim() + a.image().dim() == n
            && a.kernel().dim() == b.domain().dim()
            && a.image().dim() == b.indefiniteness().dim();
        if !consistent {
            return Err(Error::ChainInconsistent(j + 1));
        }
    }
    let mut q = vec![LinearRelation::first_factor(field, n)];
    for r in &p[..p.len() - 1] {
        q.push(LinearRelation::split(r.kernel(), r.image(), r.rank_tol())?);
    }
    q.push(LinearRelation::second_factor(field, n));
    Ok(q)
}

#[derive(Clone, Debug, Serialize)]
pub struct AxiomCheck {
    pub axiom: u8,
    pub check: String,
    pub gap: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HingeReport {
    pub tol: f64,
    pub passed: bool,
    pub checks: Vec<AxiomCheck>,
}

impl HingeReport {
    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn summary(&self) -> String {
        let failed: Vec<String> = self
            .failures()
            .map(|c| format!("axiom {} {} (gap {:e})", c.axiom, c.check, c.gap))
            .collect();
        if failed.is_empty() {
            "all axioms pass".into()
        } else {
            failed.join("; ")
        }
    }
}

fn subspace_gap(a: &Subspace, b: &Subspace) -> f64 {
    let field = a.field().join(b.field());
    let lift = |s: &Subspace| if s.field() == field { s.clone() } else { s.complexified() };
    lift(a).gap(&lift(b)).unwrap_or(1.0)
}

pub fn validate_hinge(h: &Hinge, tol: f64) -> HingeReport {
    let n = h.n;
    let full = Subspace::full(h.field, n);
    let mut checks = Vec::new();
    let mut push = |axiom: u8, check: String, gap: f64, passed: bool| {
        checks.push(AxiomCheck {
            axiom,
            check,
            gap,
            passed,
        })
    };

    for (j, q) in h.q.iter().enumerate() {
        let gap = q.fixed_part_gap();
        push(0, format!("Q{j} is scaling-fixed"), gap, gap <= tol);
    }
    for (j, p) in h.p.iter().enumerate() {
        let gap = p.fixed_part_gap();
        push(0, format!("P{} is not scaling-fixed", j + 1), gap, gap > tol);
    }

    for (j, p) in h.p.iter().enumerate() {
        let q = &h.q[j + 1];
        let gap = subspace_gap(p.kernel(), q.kernel());
        push(1, format!("Ker P{0} = Ker Q{0}", j + 1), gap, gap <= tol);
        let gap = subspace_gap(p.image(), q.image());
        push(1, format!("Im P{0} = Im Q{0}", j + 1), gap, gap <= tol);
    }
    for j in 0..h.p.len().saturating_sub(1) {
        let (a, b) = (&h.p[j], &h.p[j + 1]);
        let gap = subspace_gap(a.kernel(), b.domain());
        push(1, format!("Ker P{} = Dom P{}", j + 1, j + 2), gap, gap <= tol);
        let gap = subspace_gap(a.image(), b.indefiniteness());
        push(1, format!("Im P{} = Indef P{}", j + 1, j + 2), gap, gap <= tol);
    }

    let k = h.p.len();
    let first = LinearRelation::first_factor(h.field, n);
    let second = LinearRelation::second_factor(h.field, n);
    let gap = GrassmannGap.distance(&h.q[0], &first);
    push(2, "Q0 = K^n + 0".into(), gap, gap <= tol);
    let gap = subspace_gap(h.p[0].domain(), &full);
    push(2, "Dom P1 = K^n".into(), gap, gap <= tol);
    let gap = GrassmannGap.distance(&h.q[k], &second);
    push(2, format!("Q{k} = 0 + K^n"), gap, gap <= tol);
    let gap = subspace_gap(h.p[k - 1].image(), &full);
    push(2, format!("Im P{k} = K^n"), gap, gap <= tol);

    let passed = checks.iter().all(|c| c.passed);
    HingeReport { tol, passed, checks }
}

/// The one-component hinge `(Kⁿ ⊕ 0, graph A, 0 ⊕ Kⁿ)`.
pub fn hinge_of_invertible(field: Field, a: &CMatrix) -> Result<Hinge> {
    if !a.is_square() || a.nrows() == 0 {
        return Err(Error::Dimension("expected a nonempty square matrix".into()));
    }
    match linalg::inverse_condition(field, a) {
        Some(r) if r > RANK_TOL => {}
        _ => return Err(Error::SingularMatrix),
    }
    Hinge::from_components(vec![LinearRelation::graph(field, a)?])
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phases {
    /// Positive reals only.
    Positive,
    /// `±1`.
    Signs,
    /// `p` equally spaced points of the unit circle.
    Circle(usize),
}

/// Scaling factors `ρ·ω`: log-spaced moduli `ρ` times phases `ω`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingGrid {
    pub moduli: usize,
    pub log10_min: f64,
    pub log10_max: f64,
    pub phases: Phases,
}

impl ScalingGrid {
    pub const DEFAULT_MODULI: usize = 33;
    pub const DEFAULT_PHASES: usize = 16;

    pub fn for_field(field: Field) -> Self {
        ScalingGrid {
            moduli: Self::DEFAULT_MODULI,
            log10_min: -8.0,
            log10_max: 8.0,
            phases: match field {
                Field::Real => Phases::Signs,
                Field::Complex => Phases::Circle(Self::DEFAULT_PHASES),
            },
        }
    }

    pub fn positive() -> Self {
        ScalingGrid {
            phases: Phases::Positive,
            ..Self::for_field(Field::Real)
        }
    }

    pub fn with_moduli(self, moduli: usize) -> Self {
        ScalingGrid { moduli, ..self }
    }

    pub fn with_phases(self, phases: Phases) -> Self {
        ScalingGrid { phases, ..self }
    }

    fn check(&self) -> Result<()> {
        if self.moduli < 2 || !(self.log10_max > self.log10_min) {
            return Err(Error::Invalid("scaling grid needs at least two moduli".into()));
        }
        if self.phases == Phases::Circle(0) {
            return Err(Error::Invalid("scaling grid needs at least one phase".into()));
        }
        Ok(())
    }

    /// Spacing of the moduli in decades.
    pub fn step(&self) -> f64 {
        (self.log10_max - self.log10_min) / (self.moduli - 1) as f64
    }

    fn phase_values(&self) -> Vec<Complex64> {
        match self.phases {
            Phases::Positive => vec![Complex64::new(1.0, 0.0)],
            Phases::Signs => vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            Phases::Circle(p) => (0..p)
                .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / p as f64))
                .collect(),
        }
    }

    /// Factors with moduli shifted by a whole number of steps towards
    /// `10^center`, so grids of differently normalized relations stay aligned.
    pub fn factors(&self, center_log10: f64) -> Vec<Complex64> {
        let step = self.step();
        let shift = (center_log10 / step).round() * step;
        let phases = self.phase_values();
        (0..self.moduli)
            .flat_map(|i| {
                let modulus = 10f64.powf(shift + self.log10_min + i as f64 * step);
                phases.iter().map(move |w| w * modulus)
            })
            .collect()
    }

    /// Lipschitz bound for the distance from an orbit point between grid
    /// nodes to the nearest node. The generator `diag(0, I)` of the scaling
    /// action is at distance 1/2 from the scalars, so the gap moves at rate
    /// at most 1/2 in `log λ`.
    pub fn spacing_bound(&self) -> f64 {
        let dlog = self.step() * LN_10;
        let dphi = match self.phases {
            Phases::Circle(p) => 2.0 * PI / p as f64,
            _ => 0.0,
        };
        0.5 * (dlog / 2.0 + dphi / 2.0)
    }
}

/// Geometric midpoint of the extreme singular values of the induced
/// operator, so the grid window is symmetric about the orbit.
fn operator_scale(v: &LinearRelation) -> Result<f64> {
    let op = v.induced_operator()?;
    if op.is_empty() {
        return Ok(1.0);
    }
    let s = linalg::svd(v.field(), &op.matrix);
    Ok((s.sigma[0] * s.sigma[op.size() - 1]).sqrt())
}

/// Grid points of the orbit `K*·v` and a resolution for the orbit closure.
fn orbit_points(v: &LinearRelation, grid: &ScalingGrid) -> Result<(Vec<LinearRelation>, f64)> {
    grid.check()?;
    let center = -operator_scale(v)?.log10();
    let factors = grid.factors(center);
    let points = factors
        .par_iter()
        .map(|&lambda| v.scale(lambda))
        .collect::<Result<Vec<_>>>()?;

    // λ → 0 gives Dom ⊕ Indef, λ → ∞ gives Ker ⊕ Im.
    let inv = v.invariant_subspaces();
    let low = LinearRelation::split(&inv.dom, &inv.indef, v.rank_tol())?;
    let high = LinearRelation::split(&inv.ker, &inv.im, v.rank_tol())?;
    let per_modulus = factors.len() / grid.moduli;
    let mut endpoint = 0.0f64;
    for p in &points[..per_modulus] {
        endpoint = endpoint.max(GrassmannGap.distance(p, &low));
    }
    for p in &points[points.len() - per_modulus..] {
        endpoint = endpoint.max(GrassmannGap.distance(p, &high));
    }
    Ok((points, grid.spacing_bound().max(endpoint)))
}

/// Sample of `∪ Q_j ∪ ∪ K*·P_j`.
pub fn hinge_to_sample(h: &Hinge, grid: &ScalingGrid) -> Result<ClosedSetSample<LinearRelation>> {
    let mut points = h.q.clone();
    let mut resolution = 0.0f64;
    for p in &h.p {
        let (orbit, res) = orbit_points(p, grid)?;
        points.extend(orbit);
        resolution = resolution.max(res);
    }
    ClosedSetSample::new(GrassmannGap.space_id(), points, resolution)
}

/// Sample of the closure of the orbit of the graph of an invertible operator.
pub fn orbit_closure_sample(v: &LinearRelation, grid: &ScalingGrid) -> Result<ClosedSetSample<LinearRelation>> {
    if v.kernel().dim() != 0 || v.indefiniteness().dim() != 0 || v.induced_operator().is_err() {
        return Err(Error::NotInvertibleGraph);
    }
    let (orbit, resolution) = orbit_points(v, grid)?;
    let mut points = vec![
        LinearRelation::first_factor(v.field(), v.n()),
        LinearRelation::second_factor(v.field(), v.n()),
    ];
    points.extend(orbit);
    ClosedSetSample::new(GrassmannGap.space_id(), points, resolution)
}

/// Graph of `μ·g`, with `μ` a power of ten on the grid's lattice chosen to
/// centre the singular values of `g` around 1. Same orbit as `graph(g)`.
fn normalized_graph(field: Field, g: &CMatrix, grid: &ScalingGrid) -> Result<LinearRelation> {
    if !g.is_square() || g.nrows() == 0 {
        return Err(Error::Dimension("expected a nonempty square matrix".into()));
    }
    let s = linalg::svd(field, g);
    if !(s.sigma.last().copied().unwrap_or(0.0) > 0.0) {
        return Err(Error::NotInvertibleGraph);
    }
    // Centre the spread so both blocks of the graph frame stay well above
    // the rank threshold.
    let mid = (s.sigma[0].log10() + s.sigma[s.sigma.len() - 1].log10()) / 2.0;
    let step = grid.step();
    let mu = 10f64.powf(-(mid / step).round() * step);
    LinearRelation::graph(field, &(g * Complex64::new(mu, 0.0)))
}

/// Hausdorff limit of the orbit closures of `graph(g_j)`.
pub fn limit_of_orbit_closures(
    field: Field,
    family: &[CMatrix],
    grid: &ScalingGrid,
    tol: f64,
) -> Result<ClosedSetSample<LinearRelation>> {
    if family.is_empty() {
        return Err(Error::EmptySequence);
    }
    let samples = family
        .iter()
        .map(|g| orbit_closure_sample(&normalized_graph(field, g, grid)?, grid))
        .collect::<Result<Vec<_>>>()?;
    let mut classes = metric::limit_classes(&GrassmannGap, &samples, tol)?;
    if classes.len() > 1 {
        return Err(Error::MultipleLimitClasses(classes.len()));
    }
    Ok(classes.remove(0))
}

/// Boundaries `j` (between singular values `j` and `j + 1`) where the ratio
/// reaches [`SCALE_GROUP_RATIO`].
fn scale_boundaries(sigma: &[f64]) -> Vec<usize> {
    (0..sigma.len().saturating_sub(1))
        .filter(|&j| sigma[j] >= SCALE_GROUP_RATIO * sigma[j + 1])
        .collect()
}

/// `P_i` at one probe: `(w_j, 0)` below the group, `(0, u_j)` above it and
/// `(w_j, μσ_j u_j)` inside it, for `g = U Σ W*`.
fn group_relation(field: Field, svd: &linalg::Svd, group: std::ops::Range<usize>, mu: f64) -> Result<LinearRelation> {
    let n = svd.v.nrows();
    let mut columns = CMatrix::zeros(2 * n, n);
    for j in 0..n {
        if j >= group.end {
            columns.view_mut((0, j), (n, 1)).copy_from(&svd.v.column(j));
        } else if j < group.start {
            columns.view_mut((n, j), (n, 1)).copy_from(&svd.u.column(j));
        } else {
            columns.view_mut((0, j), (n, 1)).copy_from(&svd.v.column(j));
            let p = svd.u.column(j) * Complex64::new(mu * svd.sigma[j], 0.0);
            columns.view_mut((n, j), (n, 1)).copy_from(&p);
        }
    }
    LinearRelation::from_columns(field, &columns, RANK_TOL)
}

fn group_relations(field: Field, svd: &linalg::Svd, boundaries: &[usize], grid_step: f64) -> Result<Vec<LinearRelation>> {
    let n = svd.v.nrows();
    let mut starts = vec![0];
    starts.extend(boundaries.iter().map(|b| b + 1));
    let mut ends: Vec<usize> = boundaries.iter().map(|b| b + 1).collect();
    ends.push(n);
    starts
        .into_iter()
        .zip(ends)
        .map(|(a, b)| {
            let mean = svd.sigma[a..b].iter().map(|x| x.log10()).sum::<f64>() / (b - a) as f64;
            let mu = 10f64.powf(-(mean / grid_step).round() * grid_step);
            group_relation(field, svd, a..b, mu)
        })
        .collect()
}

/// Limit hinge of the orbit closures of `graph(g(t))` as `t → ∞`, read off
/// the two largest probes.
///
/// Singular values of `g(t)` are grouped by [`SCALE_GROUP_RATIO`]; a group
/// boundary whose ratio does not grow between the probes is not asymptotic
/// and is dropped. Component `i` is the limit of `graph(g(t)/s_i(t))`, with
/// the other groups sent to `0` or `∞`, and is accepted when its values at
/// the two probes agree up to scale within `tol`. Components come in order
/// of decreasing `dim Ker`.
pub fn hinge_limit<F>(field: Field, family: F, probes: &[f64], tol: f64) -> Result<Hinge>
where
    F: Fn(f64) -> CMatrix,
{
    limit_with(field, family, probes, tol, |m| linalg::svd(field, m))
}

/// [`hinge_limit`] for real symmetric positive definite families, using an
/// eigendecomposition so that the components come out exactly Lagrangian.
pub(crate) fn hinge_limit_symmetric<F>(family: F, probes: &[f64], tol: f64) -> Result<Hinge>
where
    F: Fn(f64) -> CMatrix,
{
    limit_with(Field::Real, family, probes, tol, linalg::symmetric_svd)
}

fn limit_with<F, D>(field: Field, family: F, probes: &[f64], tol: f64, decompose: D) -> Result<Hinge>
where
    F: Fn(f64) -> CMatrix,
    D: Fn(&CMatrix) -> linalg::Svd,
{
    let mut probes = probes.to_vec();
    probes.sort_by(f64::total_cmp);
    if probes.len() < 2 {
        return Err(Error::Invalid("hinge limit needs at least two probes".into()));
    }
    let (t_prev, t_last) = (probes[probes.len() - 2], probes[probes.len() - 1]);
    let (g_prev, g_last) = (family(t_prev), family(t_last));
    if !g_last.is_square() || g_last.shape() != g_prev.shape() || g_last.nrows() == 0 {
        return Err(Error::Dimension("family must consist of square matrices of one size".into()));
    }
    let (d_prev, d_last) = (decompose(&g_prev), decompose(&g_last));
    let (s_prev, s_last) = (&d_prev.sigma, &d_last.sigma);
    if !(s_prev.last().copied().unwrap_or(0.0) > 0.0 && s_last.last().copied().unwrap_or(0.0) > 0.0) {
        return Err(Error::SingularMatrix);
    }
    let bounds = scale_boundaries(s_last);
    if bounds != scale_boundaries(s_prev) {
        return Err(Error::ScalesNotSeparated);
    }
    let bounds: Vec<usize> = bounds
        .into_iter()
        .filter(|&j| s_last[j] / s_last[j + 1] > (1.0 + 1e-6) * (s_prev[j] / s_prev[j + 1]))
        .collect();

    let step = ScalingGrid::for_field(field).step();
    let last = group_relations(field, &d_last, &bounds, step)?;
    let prev = group_relations(field, &d_prev, &bounds, step)?;
    for (i, (a, b)) in last.iter().zip(&prev).enumerate() {
        if !a.equal_mod_scale(b, tol)? {
            let gap = a.orbit_gap(b)?.unwrap_or(1.0);
            return Err(Error::LimitNotConverged {
                component: i + 1,
                gap,
                tol,
            });
        }
    }
    let hinge = Hinge::from_components(last)?;
    let report = validate_hinge(&hinge, tol);
    if !report.passed {
        return Err(Error::InvalidHinge(report.summary()));
    }
    Ok(hinge)
}

/// Gap to the nearer of the two ends `Dom ⊕ Indef` and `Ker ⊕ Im` of the
/// scaling orbit; zero for fixed points.
fn centrality(v: &LinearRelation) -> f64 {
    let inv = v.invariant_subspaces();
    [(&inv.dom, &inv.indef), (&inv.ker, &inv.im)]
        .into_iter()
        .map(|(a, b)| match LinearRelation::split(a, b, v.rank_tol()) {
            Ok(end) => GrassmannGap.distance(v, &end),
            Err(_) => 1.0,
        })
        .fold(1.0, f64::min)
}

/// Recovers the hinge whose sample `N` is: fixed members are the `Q`s, the
/// remaining members are grouped into scaling orbits, one per `P`.
pub fn extract_hinge_from_sample(sample: &ClosedSetSample<LinearRelation>, tol: f64) -> Result<Hinge> {
    let points = sample.points();
    let field = field_of(points);
    let points: Vec<LinearRelation> = points.iter().map(|r| in_field(r, field)).collect();
    let gaps: Vec<f64> = points.par_iter().map(|r| r.fixed_part_gap()).collect();

    let central: Vec<f64> = points.par_iter().map(centrality).collect();

    let mut order: Vec<usize> = (0..points.len()).filter(|&i| gaps[i] > tol).collect();
    order.sort_by(|&a, &b| central[b].total_cmp(&central[a]));
    let mut reps: Vec<LinearRelation> = Vec::new();
    let mut rest: Vec<usize> = (0..points.len()).filter(|&i| gaps[i] <= tol).collect();
    for i in order {
        let mut matched = false;
        for rep in &reps {
            if matches!(rep.orbit_gap(&points[i])?, Some(g) if g <= tol) {
                matched = true;
                break;
            }
        }
        if !matched {
            if central[i] >= CENTRAL_GAP {
                reps.push(points[i].clone());
            } else {
                rest.push(i);
            }
        }
    }
    if reps.is_empty() {
        return Err(Error::NotAHingeSet("no orbit components".into()));
    }
    reps.sort_by(|a, b| b.kernel().dim().cmp(&a.kernel().dim()));
    let hinge = Hinge::from_components(reps).map_err(|e| Error::NotAHingeSet(e.to_string()))?;
    let report = validate_hinge(&hinge, tol);
    if !report.passed {
        return Err(Error::NotAHingeSet(report.summary()));
    }

    for i in rest {
        let near_q = hinge.q.iter().any(|q| GrassmannGap.distance(q, &points[i]) <= tol);
        let mut near_orbit = false;
        if !near_q {
            for p in &hinge.p {
                if matches!(p.orbit_gap(&points[i])?, Some(g) if g <= tol) {
                    near_orbit = true;
                    break;
                }
            }
        }
        if !near_q && !near_orbit {
            return Err(Error::NotAHingeSet(format!(
                "member {i} is neither fixed on the chain nor on a component orbit"
            )));
        }
    }
    for (j, q) in hinge.q.iter().enumerate() {
        if metric::point_to_set(&GrassmannGap, q, &points) > tol {
            return Err(Error::NotAHingeSet(format!("Q{j} is missing")));
        }
    }
    Ok(hinge)
}
