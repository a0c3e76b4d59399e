//! Duplicate-free point sets and their text file format.
//!
//! ```text
//! q=25 d=2
//! 0,0
//! 1,2
//! ```
//!
//! The header names the field order and dimension; every following line is
//! one point as `d` comma-separated element indices.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ff::FieldDesc;
use crate::geom::FVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSet {
    field: FieldDesc,
    dim: usize,
    points: Vec<FVector>,
}

impl PointSet {
    pub fn new(field: FieldDesc, dim: usize, points: Vec<FVector>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(points.len());
        for (row, x) in points.iter().enumerate() {
            if x.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: x.dim(),
                });
            }
            for c in x.coords() {
                field.elem(c.index() as u64)?;
            }
            if !seen.insert(x) {
                return Err(Error::DuplicatePoint(row));
            }
        }
        Ok(PointSet { field, dim, points })
    }

    /// Caller guarantees distinct, valid points.
    pub(crate) fn from_distinct(field: FieldDesc, dim: usize, points: Vec<FVector>) -> Self {
        debug_assert_eq!(
            points.iter().collect::<HashSet<_>>().len(),
            points.len(),
            "duplicate points"
        );
        PointSet { field, dim, points }
    }

    pub fn field(&self) -> &FieldDesc {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[FVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<FVector> {
        self.points
    }

    /// Copy with the point at `i` removed.
    pub fn without(&self, i: usize) -> PointSet {
        let mut points = self.points.clone();
        points.remove(i);
        PointSet { points, ..self.clone() }
    }

    /// The same points in F_q^d' (d' >= d), padded with zero coordinates.
    pub fn embed(&self, dim: usize) -> PointSet {
        let dim = dim.max(self.dim);
        PointSet {
            field: self.field.clone(),
            dim,
            points: self.points.iter().map(|x| x.embed(dim)).collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("q={} d={}\n", self.field.q(), self.dim);
        for x in &self.points {
            let _ = writeln!(s, "{x}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty point-set file".into()))?;
        let (mut q, mut d) = (None, None);
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("q", v)) => q = v.parse::<u64>().ok(),
                Some(("d", v)) => d = v.parse::<usize>().ok(),
                _ => return Err(Error::Parse(format!("bad header token {tok:?}"))),
            }
        }
        let (Some(q), Some(d)) = (q, d) else {
            return Err(Error::Parse(format!("header must be `q=<int> d=<int>`, got {header:?}")));
        };
        let field = FieldDesc::from_order(q)?;
        let mut points = Vec::new();
        for (row, line) in lines.enumerate() {
            let idx = line
                .split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("row {row}: {e}")))?;
            if idx.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: idx.len(),
                });
            }
            points.push(FVector::from_indices(&field, &idx)?);
        }
        PointSet::new(field, d, points)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_text())?)
    }
}
