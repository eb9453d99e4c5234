//! Hausdorff distance between sampled closed sets, and the upper/lower
//! limits of sequences of such sets.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linrel::LinearRelation;

/// A distance oracle on one space.
pub trait Metric: Sync {
    type Point: Clone + Send + Sync;

    fn space_id(&self) -> &str;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// Cheap lower and upper bounds on `distance(a, b)`.
    fn distance_bounds(&self, a: &Self::Point, b: &Self::Point) -> (f64, f64) {
        let d = self.distance(a, b);
        (d, d)
    }
}

/// Euclidean distance on `Rᵈ`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Euclidean;

impl Metric for Euclidean {
    type Point = Vec<f64>;

    fn space_id(&self) -> &str {
        "euclidean"
    }

    fn distance(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }
}

/// Gap metric on the Grassmannian of `n`-dimensional relations.
#[derive(Clone, Copy, Debug, Default)]
pub struct GrassmannGap;

impl Metric for GrassmannGap {
    type Point = LinearRelation;

    fn space_id(&self) -> &str {
        "grassmann-gap"
    }

    fn distance(&self, a: &LinearRelation, b: &LinearRelation) -> f64 {
        if a.frame().nrows() != b.frame().nrows() {
            return 1.0;
        }
        crate::linalg::frame_gap(a.frame(), b.frame())
    }

    /// From the Frobenius norm `f` of `(I − P_a) F_b`: `f/√n ≤ gap ≤ f`.
    fn distance_bounds(&self, a: &LinearRelation, b: &LinearRelation) -> (f64, f64) {
        let (u, v) = (a.frame(), b.frame());
        if u.shape() != v.shape() {
            return (1.0, 1.0);
        }
        if u.ncols() == 0 {
            return (0.0, 0.0);
        }
        let f = (v - u * (u.adjoint() * v)).norm();
        ((f / (u.ncols() as f64).sqrt()).min(1.0), f.min(1.0))
    }
}

/// A finite metric space given by its distance matrix; points are indices.
#[derive(Clone, Debug)]
pub struct FiniteMetric {
    id: String,
    distances: Vec<Vec<f64>>,
}

impl FiniteMetric {
    pub fn new(id: impl Into<String>, distances: Vec<Vec<f64>>) -> Result<Self> {
        let size = distances.len();
        for (i, row) in distances.iter().enumerate() {
            if row.len() != size {
                return Err(Error::Invalid("distance matrix is not square".into()));
            }
            if row[i] != 0.0 {
                return Err(Error::Invalid(format!("nonzero self-distance at {i}")));
            }
            for (j, &d) in row.iter().enumerate() {
                if d != distances[j][i] || d < 0.0 || (i != j && d == 0.0) {
                    return Err(Error::Invalid(format!("not a metric at ({i}, {j})")));
                }
            }
        }
        Ok(FiniteMetric {
            id: id.into(),
            distances,
        })
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

impl Metric for FiniteMetric {
    type Point = usize;

    fn space_id(&self) -> &str {
        &self.id
    }

    fn distance(&self, a: &usize, b: &usize) -> f64 {
        self.distances[*a][*b]
    }
}

/// A finite ε-net standing in for a nonempty closed set.
#[derive(Clone, Debug)]
pub struct ClosedSetSample<P> {
    space_id: String,
    resolution: f64,
    points: Vec<P>,
}

impl<P> ClosedSetSample<P> {
    pub fn new(space_id: impl Into<String>, points: Vec<P>, resolution: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyClosedSet);
        }
        if !(resolution >= 0.0) {
            return Err(Error::Invalid(format!("resolution {resolution}")));
        }
        Ok(ClosedSetSample {
            space_id: space_id.into(),
            resolution,
            points,
        })
    }

    pub fn space_id(&self) -> &str {
        &self.space_id
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_points(self) -> Vec<P> {
        self.points
    }

    pub fn with_resolution(mut self, resolution: f64) -> Self {
        self.resolution = resolution;
        self
    }
}

/// Either a nonempty sample or the empty set.
#[derive(Clone, Debug)]
pub enum ClosedSet<P> {
    Empty,
    Sample(ClosedSetSample<P>),
}

impl<P> ClosedSet<P> {
    pub fn is_empty(&self) -> bool {
        matches!(self, ClosedSet::Empty)
    }

    pub fn sample(&self) -> Option<&ClosedSetSample<P>> {
        match self {
            ClosedSet::Empty => None,
            ClosedSet::Sample(s) => Some(s),
        }
    }

    pub fn points(&self) -> &[P] {
        match self {
            ClosedSet::Empty => &[],
            ClosedSet::Sample(s) => s.points(),
        }
    }
}

fn check_space<M: Metric, P>(metric: &M, s: &ClosedSetSample<P>) -> Result<()> {
    if s.space_id() != metric.space_id() {
        return Err(Error::SpaceMismatch(
            s.space_id().to_string(),
            metric.space_id().to_string(),
        ));
    }
    Ok(())
}

/// Distance from a point to a sample.
pub fn point_to_set<M: Metric>(metric: &M, m: &M::Point, set: &[M::Point]) -> f64 {
    set.iter()
        .map(|x| metric.distance(m, x))
        .fold(f64::INFINITY, f64::min)
}

/// `sup_{a∈from} inf_{b∈to} ρ(a, b)`.
///
/// The inner loop stops as soon as `a` is known not to raise the running
/// maximum, which keeps the sweep exact. It starts where the previous point
/// found its nearest neighbour, and skips exact distances the bounds rule out.
pub fn directed_hausdorff<M: Metric>(metric: &M, from: &[M::Point], to: &[M::Point]) -> f64 {
    const CHUNK: usize = 64;
    if to.is_empty() {
        return if from.is_empty() { 0.0 } else { f64::INFINITY };
    }
    from.par_chunks(CHUNK)
        .map(|chunk| {
            let mut worst = 0.0f64;
            let mut start = 0;
            for a in chunk {
                let mut nearest = f64::INFINITY;
                let mut found = start;
                for k in 0..to.len() {
                    let j = (start + k) % to.len();
                    let (lo, hi) = metric.distance_bounds(a, &to[j]);
                    if lo >= nearest {
                        continue;
                    }
                    if hi <= worst {
                        nearest = nearest.min(hi);
                        found = j;
                        break;
                    }
                    let d = if lo == hi { lo } else { metric.distance(a, &to[j]) };
                    if d < nearest {
                        nearest = d;
                        found = j;
                        if nearest <= worst {
                            break;
                        }
                    }
                }
                start = found;
                worst = worst.max(nearest);
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

pub fn hausdorff_distance<M: Metric>(
    metric: &M,
    s: &ClosedSetSample<M::Point>,
    t: &ClosedSetSample<M::Point>,
) -> Result<f64> {
    check_space(metric, s)?;
    check_space(metric, t)?;
    let forward = directed_hausdorff(metric, s.points(), t.points());
    let backward = directed_hausdorff(metric, t.points(), s.points());
    Ok(forward.max(backward))
}

/// Fraction of the last half of a finite sequence in which a probe must be
/// hit to count as hit "infinitely often".
pub const LIMSUP_FRACTION: f64 = 0.25;

fn tail_hits<M: Metric>(
    metric: &M,
    seq: &[ClosedSetSample<M::Point>],
    probes: &ClosedSetSample<M::Point>,
    eps: f64,
) -> Result<(Vec<usize>, usize)> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    if !(eps > 0.0) {
        return Err(Error::Invalid(format!("ε must be positive, got {eps}")));
    }
    check_space(metric, probes)?;
    for s in seq {
        check_space(metric, s)?;
    }
    let tail = &seq[seq.len() / 2..];
    let hits = probes
        .points()
        .par_iter()
        .map(|m| {
            tail.iter()
                .filter(|n| n.points().iter().any(|x| metric.distance(m, x) < eps))
                .count()
        })
        .collect();
    Ok((hits, tail.len()))
}

fn select<P: Clone>(probes: &ClosedSetSample<P>, keep: impl Fn(usize) -> bool, eps: f64) -> ClosedSet<P> {
    let points: Vec<P> = probes
        .points()
        .iter()
        .enumerate()
        .filter(|(i, _)| keep(*i))
        .map(|(_, p)| p.clone())
        .collect();
    match ClosedSetSample::new(probes.space_id(), points, probes.resolution() + eps) {
        Ok(s) => ClosedSet::Sample(s),
        Err(_) => ClosedSet::Empty,
    }
}

/// Probes `m` with `N_j ∩ B_ε(m) ≠ ∅` for infinitely many `j`: on a finite
/// sequence, in at least a quarter of the last half.
pub fn limsup_set<M: Metric>(
    metric: &M,
    seq: &[ClosedSetSample<M::Point>],
    probes: &ClosedSetSample<M::Point>,
    eps: f64,
) -> Result<ClosedSet<M::Point>> {
    limsup_set_with_fraction(metric, seq, probes, eps, LIMSUP_FRACTION)
}

pub fn limsup_set_with_fraction<M: Metric>(
    metric: &M,
    seq: &[ClosedSetSample<M::Point>],
    probes: &ClosedSetSample<M::Point>,
    eps: f64,
    fraction: f64,
) -> Result<ClosedSet<M::Point>> {
    let (hits, tail_len) = tail_hits(metric, seq, probes, eps)?;
    let needed = ((fraction * tail_len as f64).ceil() as usize).max(1);
    Ok(select(probes, |i| hits[i] >= needed, eps))
}

/// Probes `m` with `N_j ∩ B_ε(m) ≠ ∅` for all sufficiently large `j`: on a
/// finite sequence, at every index of the last half.
pub fn liminf_set<M: Metric>(
    metric: &M,
    seq: &[ClosedSetSample<M::Point>],
    probes: &ClosedSetSample<M::Point>,
    eps: f64,
) -> Result<ClosedSet<M::Point>> {
    let (hits, tail_len) = tail_hits(metric, seq, probes, eps)?;
    Ok(select(probes, |i| hits[i] == tail_len, eps))
}

/// Clusters the last half of a sequence under the Hausdorff distance and
/// returns the latest member of each cluster, in order of first appearance.
///
/// Every cluster must have diameter at most `tol`, no member may sit within
/// `tol` of a cluster it cannot join, and every cluster must recur in the
/// last quarter of the sequence.
pub fn limit_classes<M: Metric>(
    metric: &M,
    seq: &[ClosedSetSample<M::Point>],
    tol: f64,
) -> Result<Vec<ClosedSetSample<M::Point>>> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    for s in seq {
        check_space(metric, s)?;
    }
    let start = seq.len() / 2;
    let recent = seq.len() - seq.len().div_ceil(4);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for idx in start..seq.len() {
        let distances: Vec<Vec<f64>> = clusters
            .iter()
            .map(|members| {
                members
                    .iter()
                    .map(|&m| hausdorff_distance(metric, &seq[m], &seq[idx]))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        match distances.iter().position(|ds| ds.iter().all(|&d| d <= tol)) {
            Some(c) => clusters[c].push(idx),
            None => {
                if distances.iter().flatten().any(|&d| d <= tol) {
                    return Err(Error::UnresolvedLimit { tol });
                }
                clusters.push(vec![idx]);
            }
        }
    }
    if clusters
        .iter()
        .any(|members| members.last().map_or(true, |&m| m < recent))
    {
        return Err(Error::UnresolvedLimit { tol });
    }
    Ok(clusters
        .iter()
        .map(|members| seq[*members.last().expect("nonempty cluster")].clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> ClosedSetSample<Vec<f64>> {
        ClosedSetSample::new("euclidean", points.iter().map(|&x| vec![x]).collect(), 0.0).unwrap()
    }

    fn xs(set: &ClosedSet<Vec<f64>>) -> Vec<f64> {
        let mut v: Vec<f64> = set.points().iter().map(|p| p[0]).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn hausdorff_examples() {
        let m = Euclidean;
        assert_eq!(hausdorff_distance(&m, &line(&[0.0]), &line(&[1.0])).unwrap(), 1.0);
        let s = line(&[0.0, 0.5, 2.0]);
        assert_eq!(hausdorff_distance(&m, &s, &s).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&m, &line(&[0.0, 1.0]), &line(&[0.0])).unwrap(), 1.0);
    }

    #[test]
    fn hausdorff_matches_brute_force_max_min() {
        let m = Euclidean;
        let s = line(&[0.0, 0.3, 2.5, -1.0, 4.0]);
        let t = line(&[0.1, 2.0, 3.9]);
        let directed = |a: &ClosedSetSample<Vec<f64>>, b: &ClosedSetSample<Vec<f64>>| {
            a.points()
                .iter()
                .map(|p| b.points().iter().map(|q| (p[0] - q[0]).abs()).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        };
        let expected = directed(&s, &t).max(directed(&t, &s));
        assert_eq!(hausdorff_distance(&m, &s, &t).unwrap(), expected);
    }

    #[test]
    fn empty_and_mismatched_samples_are_errors() {
        let empty: Result<ClosedSetSample<Vec<f64>>> = ClosedSetSample::new("euclidean", vec![], 0.0);
        assert!(matches!(empty, Err(Error::EmptyClosedSet)));
        let other = ClosedSetSample::new("elsewhere", vec![vec![0.0]], 0.0).unwrap();
        assert!(matches!(
            hausdorff_distance(&Euclidean, &line(&[0.0]), &other),
            Err(Error::SpaceMismatch(..))
        ));
    }

    #[test]
    fn limsup_and_liminf_of_alternating_sequence() {
        let seq: Vec<_> = (0..8).map(|j| line(&[(j % 2) as f64])).collect();
        let probes = line(&[0.0, 1.0]);
        let sup = limsup_set(&Euclidean, &seq, &probes, 0.1).unwrap();
        assert_eq!(xs(&sup), vec![0.0, 1.0]);
        let inf = liminf_set(&Euclidean, &seq, &probes, 0.1).unwrap();
        assert!(inf.is_empty());
    }

    #[test]
    fn constant_sequence_limits_are_the_set() {
        let s = line(&[0.0, 2.0, 5.0]);
        let seq = vec![s.clone(); 6];
        let probes = line(&[0.0, 1.0, 2.0, 5.0, 7.0]);
        assert_eq!(xs(&limsup_set(&Euclidean, &seq, &probes, 0.1).unwrap()), vec![0.0, 2.0, 5.0]);
        assert_eq!(xs(&liminf_set(&Euclidean, &seq, &probes, 0.1).unwrap()), vec![0.0, 2.0, 5.0]);
    }

    #[test]
    fn reciprocal_sequence_accumulates_at_zero() {
        let seq: Vec<_> = (1..=40).map(|j| line(&[1.0 / j as f64])).collect();
        let probes = line(&[0.0]);
        assert_eq!(xs(&limsup_set(&Euclidean, &seq, &probes, 0.1).unwrap()), vec![0.0]);
        assert_eq!(xs(&liminf_set(&Euclidean, &seq, &probes, 0.1).unwrap()), vec![0.0]);
    }

    #[test]
    fn liminf_keeps_the_persistent_point() {
        let seq: Vec<_> = (0..10).map(|j| line(&[0.0, (j % 2) as f64])).collect();
        let probes = line(&[0.0, 1.0]);
        assert_eq!(xs(&liminf_set(&Euclidean, &seq, &probes, 0.1).unwrap()), vec![0.0]);
        assert_eq!(xs(&limsup_set(&Euclidean, &seq, &probes, 0.1).unwrap()), vec![0.0, 1.0]);
    }

    #[test]
    fn limits_of_empty_sequence_fail() {
        let seq: Vec<ClosedSetSample<Vec<f64>>> = vec![];
        assert!(matches!(
            limsup_set(&Euclidean, &seq, &line(&[0.0]), 0.1),
            Err(Error::EmptySequence)
        ));
        assert!(matches!(limit_classes(&Euclidean, &seq, 0.1), Err(Error::EmptySequence)));
    }

    #[test]
    fn limit_classes_examples() {
        let alternating: Vec<_> = (0..8).map(|j| line(&[(j % 2) as f64])).collect();
        let classes = limit_classes(&Euclidean, &alternating, 0.01).unwrap();
        assert_eq!(classes.len(), 2);
        let mut reps: Vec<f64> = classes.iter().map(|c| c.points()[0][0]).collect();
        reps.sort_by(f64::total_cmp);
        assert_eq!(reps, vec![0.0, 1.0]);

        let s = line(&[0.0, 3.0]);
        let classes = limit_classes(&Euclidean, &vec![s.clone(); 5], 0.01).unwrap();
        assert_eq!(classes.len(), 1);
        assert_eq!(hausdorff_distance(&Euclidean, &classes[0], &s).unwrap(), 0.0);

        let reciprocal: Vec<_> = (1..=1000).map(|j| line(&[1.0 / j as f64])).collect();
        let classes = limit_classes(&Euclidean, &reciprocal, 0.01).unwrap();
        assert_eq!(classes.len(), 1);
        assert!(hausdorff_distance(&Euclidean, &classes[0], &line(&[0.0])).unwrap() <= 0.01);
    }

    #[test]
    fn drifting_sequence_is_unresolved() {
        let drift: Vec<_> = (0..20).map(|j| line(&[j as f64 * 0.01])).collect();
        assert!(matches!(
            limit_classes(&Euclidean, &drift, 0.015),
            Err(Error::UnresolvedLimit { .. })
        ));
    }

    #[test]
    fn finite_metric_validation() {
        assert!(FiniteMetric::new("f", vec![vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
        assert!(FiniteMetric::new("f", vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(FiniteMetric::new("f", vec![vec![0.0, 0.0], vec![0.0, 0.0]]).is_err());
    }
}
