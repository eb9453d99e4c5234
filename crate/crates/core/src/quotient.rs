//! Separated quotient of a sampled partitioned metric space.
//!
//! A scene is a finite sample of `M` with a label per point (the partition
//! `M = ∪ M_α`), a chart of labels whose quotient topology is assumed
//! separated, and a resolution `r`. Closures are taken inside the sample: a
//! point belongs to the closure of `X` when it lies within `r` of `X`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::metric::{self, ClosedSetSample, Metric};

pub type LabelSet = BTreeSet<String>;

/// Largest chart for which label sequences are enumerated exhaustively.
pub const MAX_EXHAUSTIVE_CHART: usize = 20;

/// Floor on containment slack; absorbs rounding in self-distances.
pub const CONTAINMENT_FLOOR: f64 = 1e-12;

pub struct QuotientScene<M: Metric> {
    metric: M,
    points: Vec<M::Point>,
    labels: Vec<String>,
    classes: BTreeMap<String, Vec<usize>>,
    chart: BTreeSet<String>,
    resolution: f64,
    sequences: Vec<Vec<String>>,
    // dist_to_class[i][c]: distance from point i to the c-th class (label order).
    dist_to_class: Vec<Vec<f64>>,
}

/// A member of the separated quotient together with its label set `S_N`.
#[derive(Clone, Debug)]
pub struct QuotientMember<P> {
    pub labels: LabelSet,
    pub set: ClosedSetSample<P>,
}

impl<M: Metric> QuotientScene<M> {
    pub fn new(
        metric: M,
        points: Vec<M::Point>,
        labels: Vec<String>,
        chart: impl IntoIterator<Item = String>,
        resolution: f64,
    ) -> Result<Self> {
        if points.len() != labels.len() {
            return Err(Error::Invalid(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        if points.is_empty() {
            return Err(Error::EmptyClosedSet);
        }
        if !(resolution >= 0.0) {
            return Err(Error::Invalid(format!("resolution {resolution}")));
        }
        let mut classes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            classes.entry(l.clone()).or_default().push(i);
        }
        let chart: BTreeSet<String> = chart.into_iter().collect();
        if let Some(bad) = chart.iter().find(|l| !classes.contains_key(*l)) {
            return Err(Error::UnknownLabel(bad.clone()));
        }
        let dist_to_class = points
            .iter()
            .map(|p| {
                classes
                    .values()
                    .map(|members| {
                        members
                            .iter()
                            .map(|&j| metric.distance(p, &points[j]))
                            .fold(f64::INFINITY, f64::min)
                    })
                    .collect()
            })
            .collect();
        Ok(QuotientScene {
            metric,
            points,
            labels,
            classes,
            chart,
            resolution,
            sequences: Vec::new(),
            dist_to_class,
        })
    }

    /// Candidate chart-label sequences whose limits are added to the
    /// separated quotient.
    pub fn with_sequences(mut self, sequences: Vec<Vec<String>>) -> Result<Self> {
        for seq in &sequences {
            for l in seq {
                if !self.chart.contains(l) {
                    return Err(Error::UnknownLabel(l.clone()));
                }
            }
        }
        self.sequences = sequences;
        Ok(self)
    }

    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn points(&self) -> &[M::Point] {
        &self.points
    }

    pub fn label_of_point(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn all_labels(&self) -> LabelSet {
        self.classes.keys().cloned().collect()
    }

    pub fn chart(&self) -> &BTreeSet<String> {
        &self.chart
    }

    pub fn class(&self, label: &str) -> Result<&[usize]> {
        self.classes
            .get(label)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn label_index(&self, label: &str) -> Result<usize> {
        self.classes
            .keys()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn sample_of(&self, idx: &[usize], resolution: f64) -> Result<ClosedSetSample<M::Point>> {
        ClosedSetSample::new(
            self.metric.space_id(),
            idx.iter().map(|&i| self.points[i].clone()).collect(),
            resolution,
        )
    }

    /// Whether `a_j → a` in the quotient topology: some `m ∈ M_a` lies within
    /// the resolution of `M_{a_j}` for every `j` in the last half of `seq`.
    pub fn quotient_converges(&self, seq: &[String], a: &str) -> Result<bool> {
        if seq.is_empty() {
            return Err(Error::EmptySequence);
        }
        let target = self.class(a)?;
        let tail = seq[seq.len() / 2..]
            .iter()
            .map(|l| self.label_index(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(target.iter().any(|&m| {
            tail.iter()
                .all(|&c| self.dist_to_class[m][c] <= self.resolution)
        }))
    }

    /// Point indices of the closure of `∪_{α∈B} M_α` inside the sample.
    pub fn closure_of_labels(&self, labels: &LabelSet) -> Result<Vec<usize>> {
        let idx = labels
            .iter()
            .map(|l| self.label_index(l))
            .collect::<Result<Vec<_>>>()?;
        Ok((0..self.points.len())
            .filter(|&i| idx.iter().any(|&c| self.dist_to_class[i][c] <= self.resolution))
            .collect())
    }

    /// Labels of the closure of `∪_{α∈B} M_α`, provided that closure is a
    /// union of partition classes.
    pub fn check_partition_star(&self, b: &LabelSet) -> Result<LabelSet> {
        if b.is_empty() {
            return Err(Error::Invalid("empty label set".into()));
        }
        let closure: BTreeSet<usize> = self.closure_of_labels(b)?.into_iter().collect();
        let mut out = LabelSet::new();
        for (label, members) in &self.classes {
            let inside = members.iter().filter(|i| closure.contains(i)).count();
            if inside == members.len() {
                out.insert(label.clone());
            } else if inside > 0 {
                return Err(Error::PartitionStarViolated(label.clone()));
            }
        }
        Ok(out)
    }

    /// Sample of the closure of one class.
    pub fn class_closure(&self, label: &str) -> Result<ClosedSetSample<M::Point>> {
        let b: LabelSet = [label.to_string()].into_iter().collect();
        let idx = self.closure_of_labels(&b)?;
        self.sample_of(&idx, 0.0)
    }

    /// `S_N = {α : M_α ⊆ N}`, where a class counts as contained when each of
    /// its points lies within the resolution of `N`.
    pub fn labels_of(&self, n: &ClosedSetSample<M::Point>) -> Result<LabelSet> {
        if n.space_id() != self.metric.space_id() {
            return Err(Error::SpaceMismatch(
                n.space_id().to_string(),
                self.metric.space_id().to_string(),
            ));
        }
        let slack = n.resolution().max(CONTAINMENT_FLOOR);
        let mut out = LabelSet::new();
        for (label, members) in &self.classes {
            let inside = members
                .iter()
                .filter(|&&i| metric::point_to_set(&self.metric, &self.points[i], n.points()) <= slack)
                .count();
            if inside == members.len() {
                out.insert(label.clone());
            } else if inside > 0 {
                return Err(Error::NotSaturated(label.clone()));
            }
        }
        Ok(out)
    }

    /// Closures of chart classes plus the Hausdorff limits of the supplied
    /// label sequences, sorted by label set.
    ///
    /// A sequence whose last half never repeats a label escapes the chart;
    /// its limit is the union of the non-chart classes lying within `tol` of
    /// the limit representative. Sequences that repeat labels converge to a
    /// chart member, which is already present.
    pub fn separated_quotient(&self, tol: f64) -> Result<Vec<QuotientMember<M::Point>>> {
        if self.chart.is_empty() {
            return Err(Error::Invalid("empty chart".into()));
        }
        let mut members: BTreeMap<LabelSet, ClosedSetSample<M::Point>> = BTreeMap::new();
        for label in &self.chart {
            let single: LabelSet = [label.clone()].into_iter().collect();
            self.check_partition_star(&single)?;
            let set = self.class_closure(label)?;
            members.insert(self.labels_of(&set)?, set);
        }

        for seq in &self.sequences {
            if seq.is_empty() {
                continue;
            }
            let sets = seq
                .iter()
                .map(|l| self.class_closure(l))
                .collect::<Result<Vec<_>>>()?;
            let tail = &seq[seq.len() / 2..];
            let escaping = tail.iter().collect::<BTreeSet<_>>().len() == tail.len();
            for rep in metric::limit_classes(&self.metric, &sets, tol)? {
                if !escaping {
                    members.insert(self.labels_of(&rep)?, rep);
                    continue;
                }
                let mut idx = Vec::new();
                for (label, class) in &self.classes {
                    if self.chart.contains(label) {
                        continue;
                    }
                    let near = class.iter().all(|&i| {
                        metric::point_to_set(&self.metric, &self.points[i], rep.points()) <= tol
                    });
                    if near {
                        idx.extend_from_slice(class);
                    }
                }
                if idx.is_empty() {
                    return Err(Error::UnresolvedLimit { tol });
                }
                idx.sort_unstable();
                let limit = self.sample_of(&idx, tol)?;
                if metric::hausdorff_distance(&self.metric, &limit, &rep)? > tol {
                    return Err(Error::UnresolvedLimit { tol });
                }
                let exact = self.sample_of(&idx, 0.0)?;
                members.insert(self.labels_of(&exact)?, limit);
            }
        }
        Ok(members
            .into_iter()
            .map(|(labels, set)| QuotientMember { labels, set })
            .collect())
    }

    /// Bitmask (over chart labels, in order) of chart classes within the
    /// resolution of each point.
    fn near_chart_masks(&self) -> Result<(Vec<String>, Vec<u64>)> {
        let chart: Vec<String> = self.chart.iter().cloned().collect();
        if chart.len() > MAX_EXHAUSTIVE_CHART {
            return Err(Error::Invalid(format!(
                "chart of {} labels is too large for exhaustive sequence search",
                chart.len()
            )));
        }
        let idx = chart
            .iter()
            .map(|l| self.label_index(l))
            .collect::<Result<Vec<_>>>()?;
        let masks = (0..self.points.len())
            .map(|i| {
                idx.iter().enumerate().fold(0u64, |acc, (bit, &c)| {
                    if self.dist_to_class[i][c] <= self.resolution {
                        acc | (1 << bit)
                    } else {
                        acc
                    }
                })
            })
            .collect();
        Ok((chart, masks))
    }

    /// For the periodic sequence cycling through the chart labels in `cycle`:
    /// the labels it converges to, and the labels of its subsequential limits.
    fn cycle_limits(&self, masks: &[u64], cycle: u64) -> (LabelSet, LabelSet) {
        let mut limits = LabelSet::new();
        let mut limit_points = LabelSet::new();
        for (i, &mask) in masks.iter().enumerate() {
            if mask & cycle == cycle {
                limits.insert(self.labels[i].clone());
            }
            if mask & cycle != 0 {
                limit_points.insert(self.labels[i].clone());
            }
        }
        (limits, limit_points)
    }

    /// Whether some sequence of chart labels has all its limit points in `S`
    /// and converges to every element of `S`.
    ///
    /// Only the set of labels repeated in an eventually periodic sequence
    /// matters, so the search runs over nonempty subsets of the chart.
    pub fn is_admissible_by_sequences(&self, s: &LabelSet) -> Result<bool> {
        if s.is_empty() {
            return Err(Error::Invalid("empty label set".into()));
        }
        for l in s {
            self.class(l)?;
        }
        let (chart, masks) = self.near_chart_masks()?;
        Ok((1u64..(1 << chart.len())).any(|cycle| {
            let (limits, limit_points) = self.cycle_limits(&masks, cycle);
            limits == limit_points && &limits == s
        }))
    }

    /// All admissible label sets, from the same exhaustive sequence search.
    pub fn admissible_sets(&self) -> Result<Vec<LabelSet>> {
        let (chart, masks) = self.near_chart_masks()?;
        let found: BTreeSet<LabelSet> = (1u64..(1 << chart.len()))
            .filter_map(|cycle| {
                let (limits, limit_points) = self.cycle_limits(&masks, cycle);
                (limits == limit_points).then_some(limits)
            })
            .collect();
        Ok(found.into_iter().collect())
    }

    /// Checks a caller-supplied sequence as a certificate that `S` is
    /// admissible: every label repeated in its last half has all its nearby
    /// classes in `S`, and the sequence converges to every element of `S`.
    pub fn admits_certificate(&self, s: &LabelSet, seq: &[String]) -> Result<bool> {
        if seq.is_empty() {
            return Err(Error::EmptySequence);
        }
        for l in seq {
            if !self.chart.contains(l) {
                return Err(Error::UnknownLabel(l.clone()));
            }
        }
        let tail: BTreeSet<usize> = seq[seq.len() / 2..]
            .iter()
            .map(|l| self.label_index(l))
            .collect::<Result<_>>()?;
        for (i, row) in self.dist_to_class.iter().enumerate() {
            if tail.iter().any(|&c| row[c] <= self.resolution) && !s.contains(&self.labels[i]) {
                return Ok(false);
            }
        }
        for l in s {
            if !self.quotient_converges(seq, l)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pairs of chart labels whose classes touch (within `max(r, gap)`) but
    /// whose closures are more than `factor` times that far apart in the
    /// Hausdorff metric: gross violations of continuity of `α ↦ cl(M_α)`.
    pub fn chart_continuity_violations(&self, factor: f64) -> Result<Vec<(String, String, f64)>> {
        let chart: Vec<&String> = self.chart.iter().collect();
        let mut out = Vec::new();
        for (i, a) in chart.iter().enumerate() {
            for b in &chart[i + 1..] {
                let ca = self.class(a)?;
                let cb_idx = self.label_index(b)?;
                let gap = ca
                    .iter()
                    .map(|&p| self.dist_to_class[p][cb_idx])
                    .fold(f64::INFINITY, f64::min);
                let dh = metric::hausdorff_distance(
                    &self.metric,
                    &self.class_closure(a)?,
                    &self.class_closure(b)?,
                )?;
                if dh > factor * gap.max(self.resolution) {
                    out.push(((*a).clone(), (*b).clone(), dh));
                }
            }
        }
        Ok(out)
    }
}
