//! JSON documents for matrices, relations, hinges, samples and scenes.
//!
//! Floats are written with 17 significant digits so every document reads
//! back to the same bits.

use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hinge::Hinge;
use crate::linalg::{CMatrix, Field};
use crate::linrel::{LinearRelation, Subspace};
use crate::metric::{ClosedSetSample, Euclidean, GrassmannGap, Metric};
use crate::quotient::QuotientScene;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix, field: Field) -> Self {
        let grid = |f: &dyn Fn(Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(m[(i, j)])).collect())
                .collect()
        };
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            re: grid(&|z| z.re),
            im: match field {
                Field::Real => None,
                Field::Complex => Some(grid(&|z| z.im)),
            },
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let shape_ok = |g: &Vec<Vec<f64>>| g.len() == self.rows && g.iter().all(|r| r.len() == self.cols);
        if !shape_ok(&self.re) || !self.im.as_ref().map_or(true, shape_ok) {
            return Err(Error::Invalid(format!(
                "matrix entries do not match shape {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(CMatrix::from_fn(self.rows, self.cols, |i, j| {
            Complex64::new(self.re[i][j], self.im.as_ref().map_or(0.0, |im| im[i][j]))
        }))
    }

    /// Smallest field holding the entries.
    pub fn field(&self) -> Field {
        match &self.im {
            Some(im) if im.iter().flatten().any(|&x| x != 0.0) => Field::Complex,
            _ => Field::Real,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RelationJson {
    pub n: usize,
    pub field: Field,
    /// `2n x m` matrix whose columns span the relation.
    pub frame: MatrixJson,
}

impl RelationJson {
    pub fn from_relation(r: &LinearRelation) -> Self {
        RelationJson {
            n: r.n(),
            field: r.field(),
            frame: MatrixJson::from_matrix(r.frame(), r.field()),
        }
    }

    pub fn to_relation(&self, rank_tol: f64) -> Result<LinearRelation> {
        let m = self.frame.to_matrix()?;
        if m.nrows() != 2 * self.n {
            return Err(Error::Dimension(format!(
                "frame has {} rows, expected {}",
                m.nrows(),
                2 * self.n
            )));
        }
        if self.field == Field::Real && self.frame.field() == Field::Complex {
            return Err(Error::FieldMismatch);
        }
        // Keep orthonormal frames as given so documents round-trip exactly.
        if m.ncols() == self.n {
            let gram = m.adjoint() * &m - CMatrix::identity(self.n, self.n);
            if gram.iter().all(|z| z.norm() <= 1e-13) {
                return LinearRelation::new(Subspace::from_frame(self.field, m), rank_tol);
            }
        }
        LinearRelation::from_columns(self.field, &m, rank_tol)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HingeJson {
    pub n: usize,
    pub field: Field,
    pub k: usize,
    #[serde(rename = "P")]
    pub p: Vec<RelationJson>,
    #[serde(rename = "Q")]
    pub q: Vec<RelationJson>,
}

impl HingeJson {
    pub fn from_hinge(h: &Hinge) -> Self {
        HingeJson {
            n: h.n(),
            field: h.field(),
            k: h.k(),
            p: h.p().iter().map(RelationJson::from_relation).collect(),
            q: h.q().iter().map(RelationJson::from_relation).collect(),
        }
    }

    pub fn to_hinge(&self, rank_tol: f64) -> Result<Hinge> {
        if self.k != self.p.len() {
            return Err(Error::InvalidHinge(format!(
                "k = {} but {} P components",
                self.k,
                self.p.len()
            )));
        }
        let convert = |rs: &[RelationJson]| {
            rs.iter()
                .map(|r| r.to_relation(rank_tol))
                .collect::<Result<Vec<_>>>()
        };
        let h = Hinge::from_parts(convert(&self.p)?, convert(&self.q)?)?;
        if h.n() != self.n {
            return Err(Error::Dimension(format!("n = {} but components have n = {}", self.n, h.n())));
        }
        Ok(h)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampleJson {
    pub space: String,
    pub resolution: f64,
    pub points: Value,
}

/// A sample of either supported space.
#[derive(Clone, Debug)]
pub enum AnySample {
    Euclidean(ClosedSetSample<Vec<f64>>),
    Grassmann(ClosedSetSample<LinearRelation>),
}

impl SampleJson {
    pub fn from_relations(s: &ClosedSetSample<LinearRelation>) -> Result<Self> {
        let points: Vec<RelationJson> = s.points().iter().map(RelationJson::from_relation).collect();
        Ok(SampleJson {
            space: s.space_id().to_string(),
            resolution: s.resolution(),
            points: serde_json::to_value(points)?,
        })
    }

    pub fn from_vectors(s: &ClosedSetSample<Vec<f64>>) -> Result<Self> {
        Ok(SampleJson {
            space: s.space_id().to_string(),
            resolution: s.resolution(),
            points: serde_json::to_value(s.points())?,
        })
    }

    pub fn to_sample(&self, rank_tol: f64) -> Result<AnySample> {
        match self.space.as_str() {
            "euclidean" => {
                let points: Vec<Vec<f64>> = serde_json::from_value(self.points.clone())?;
                Ok(AnySample::Euclidean(ClosedSetSample::new(
                    Euclidean.space_id(),
                    points,
                    self.resolution,
                )?))
            }
            "grassmann-gap" => {
                let points = relations_from_value(&self.points, rank_tol)?;
                Ok(AnySample::Grassmann(ClosedSetSample::new(
                    GrassmannGap.space_id(),
                    points,
                    self.resolution,
                )?))
            }
            other => Err(Error::Invalid(format!("unknown space {other:?}"))),
        }
    }
}

fn relations_from_value(v: &Value, rank_tol: f64) -> Result<Vec<LinearRelation>> {
    let rs: Vec<RelationJson> = serde_json::from_value(v.clone())?;
    rs.iter().map(|r| r.to_relation(rank_tol)).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SceneJson {
    pub points: Value,
    pub labels: Vec<String>,
    pub chart: Vec<String>,
    pub metric: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequences: Option<Vec<Vec<String>>>,
}

pub enum AnyScene {
    Euclidean(QuotientScene<Euclidean>),
    Grassmann(QuotientScene<GrassmannGap>),
}

impl SceneJson {
    pub fn to_scene(&self, rank_tol: f64) -> Result<AnyScene> {
        let resolution = self.resolution.unwrap_or(0.0);
        let sequences = self.sequences.clone().unwrap_or_default();
        match self.metric.as_str() {
            "euclidean" => {
                let points: Vec<Vec<f64>> = serde_json::from_value(self.points.clone())?;
                let scene = QuotientScene::new(Euclidean, points, self.labels.clone(), self.chart.clone(), resolution)?
                    .with_sequences(sequences)?;
                Ok(AnyScene::Euclidean(scene))
            }
            "grassmann-gap" => {
                let points = relations_from_value(&self.points, rank_tol)?;
                let scene = QuotientScene::new(GrassmannGap, points, self.labels.clone(), self.chart.clone(), resolution)?
                    .with_sequences(sequences)?;
                Ok(AnyScene::Grassmann(scene))
            }
            other => Err(Error::Invalid(format!("unknown metric {other:?}"))),
        }
    }
}

/// Compact JSON with floats in `{:.16e}` form.
struct Precise;

impl serde_json::ser::Formatter for Precise {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

pub fn to_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Precise);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

/// Matrix of a JSON document, with its field.
pub fn matrix_from_str(s: &str) -> Result<(CMatrix, Field)> {
    let m: MatrixJson = serde_json::from_str(s)?;
    let field = m.field();
    Ok((m.to_matrix()?, field))
}
