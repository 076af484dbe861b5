use std::hash::{Hash, Hasher};
use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{AbmError, Result};

/// A finite, nonempty set of points in `R^n`, one row per point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    data: DMatrix<f64>,
}

impl PointSet {
    pub fn new(data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 {
            return Err(AbmError::EmptyPointSet);
        }
        if data.ncols() == 0 {
            return Err(AbmError::InvalidInput("points need at least one coordinate".into()));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(AbmError::NonFinite("point coordinates"));
        }
        Ok(PointSet { data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(AbmError::InvalidInput("rows have differing lengths".into()));
        }
        if rows.is_empty() {
            return Err(AbmError::EmptyPointSet);
        }
        PointSet::new(DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]))
    }

    /// Number of points `N`.
    pub fn len(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of coordinates `n`.
    pub fn nvars(&self) -> usize {
        self.data.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        self.data.row(i).iter().copied().collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Hash of the exact bit pattern and shape; identifies the point set for
    /// cached per-term quantities.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.data.nrows().hash(&mut h);
        self.data.ncols().hash(&mut h);
        for x in self.data.iter() {
            x.to_bits().hash(&mut h);
        }
        h.finish()
    }

    /// Read points from CSV: one row per point, no header unless `skip_header`.
    pub fn read_csv<R: Read>(reader: R, skip_header: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(skip_header)
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(reader);
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let row = i + 1 + usize::from(skip_header);
            let rec = rec.map_err(|e| AbmError::Csv {
                row,
                column: 0,
                message: e.to_string(),
            })?;
            if rec.iter().all(|f| f.is_empty()) {
                continue;
            }
            let mut vals = Vec::with_capacity(rec.len());
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field.parse().map_err(|_| AbmError::Csv {
                    row,
                    column: j + 1,
                    message: format!("cannot parse `{field}` as a number"),
                })?;
                if !v.is_finite() {
                    return Err(AbmError::Csv {
                        row,
                        column: j + 1,
                        message: "non-finite value".into(),
                    });
                }
                vals.push(v);
            }
            if let Some(first) = rows.first() {
                if first.len() != vals.len() {
                    return Err(AbmError::Csv {
                        row,
                        column: vals.len().min(first.len()) + 1,
                        message: format!("expected {} columns, found {}", first.len(), vals.len()),
                    });
                }
            }
            rows.push(vals);
        }
        PointSet::from_rows(&rows)
    }

    pub fn load_csv(path: impl AsRef<Path>, skip_header: bool) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        PointSet::read_csv(f, skip_header)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for row in self.rows() {
            w.write_record(row.iter().map(|x| format!("{x:e}")))
                .map_err(|e| AbmError::Io(std::io::Error::other(e)))?;
        }
        w.flush()?;
        Ok(())
    }
}
