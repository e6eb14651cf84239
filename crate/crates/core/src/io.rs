//! JSON job files, matrix readers and full-precision JSON output.
//!
//! Matrices are accepted as nested rows `[[1, 0], [0, 1]]`, as
//! `{"dim": 2, "data": [1, 0, 0, 1]}` (row-major), or as whitespace-delimited
//! text with one row per line. Output numbers carry 17 significant digits, so
//! every `f64` survives a write/read round trip bit for bit.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::ser::SerializeSeq;
use serde::{Deserialize, Serialize, Serializer};

use crate::alm::{
    alm_compute, alm_compute_n, build_alm_multimean, validate_triple, AlmConfig, AlmOutcome,
    MeanTriple, MultiMean, StopReason, TraceRecord,
};
use crate::error::{Error, Result};
use crate::kubo_ando::{MeanSpec, TwoVarMean};
use crate::linalg::SpdMatrix;

/// Serializes a matrix as a list of rows.
pub fn serialize_matrix<S: Serializer>(
    m: &DMatrix<f64>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for row in m.row_iter() {
        seq.serialize_element(&row.iter().copied().collect::<Vec<f64>>())?;
    }
    seq.end()
}

fn serialize_spd<S: Serializer>(m: &SpdMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    serialize_matrix(m.matrix(), s)
}

/// A matrix as it appears in a job file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixInput {
    Rows(Vec<Vec<f64>>),
    Flat { dim: usize, data: Vec<f64> },
}

impl MatrixInput {
    pub fn to_dense(&self) -> Result<DMatrix<f64>> {
        match self {
            MatrixInput::Rows(rows) => rows_to_dense(rows),
            MatrixInput::Flat { dim, data } => {
                if data.len() != dim * dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim * dim,
                        found: data.len(),
                    });
                }
                Ok(DMatrix::from_row_slice(*dim, *dim, data))
            }
        }
    }

    pub fn to_spd(&self) -> Result<SpdMatrix> {
        SpdMatrix::new(self.to_dense()?)
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> MatrixInput {
        MatrixInput::Rows(m.row_iter().map(|r| r.iter().copied().collect()).collect())
    }
}

fn rows_to_dense(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if let Some(bad) = rows.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.len(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Parses whitespace-delimited text, one matrix row per non-empty line.
pub fn parse_matrix_text(text: &str) -> Result<DMatrix<f64>> {
    let rows = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: {tok:?}: {e}", i + 1)))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    rows_to_dense(&rows)
}

/// Reads a matrix from a JSON or whitespace-delimited text file.
pub fn read_matrix_file(path: &Path) -> Result<SpdMatrix> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let trimmed = text.trim_start();
    let dense = if trimmed.starts_with('[') || trimmed.starts_with('{') {
        serde_json::from_str::<MatrixInput>(&text)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
            .to_dense()?
    } else {
        parse_matrix_text(&text)?
    };
    SpdMatrix::new(dense)
}

/// How a mean is written in a job file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeanDescriptor {
    /// `{"kind": "geometric", "r": 0.5}`
    Builtin(MeanSpec),
    /// `{"alm_triple": [d₁, d₂, d₃]}`: the three-variable mean of three built-ins.
    AlmTriple { alm_triple: Vec<MeanDescriptor> },
    /// `{"arithmetic": [w₁, …, wₙ]}`
    Arithmetic { arithmetic: Vec<f64> },
    /// `{"alm": [d₀, …, dₙ]}`: the `(n+1)`-variable mean of `n+1` `n`-variable means.
    Alm { alm: Vec<MeanDescriptor> },
}

impl MeanDescriptor {
    pub fn build(&self) -> Result<MultiMean> {
        match self {
            MeanDescriptor::Builtin(spec) => Ok(MultiMean::two_var(TwoVarMean::from_spec(spec)?)),
            MeanDescriptor::AlmTriple { alm_triple } => {
                build_alm_multimean(&triple_from(alm_triple, false)?)
            }
            MeanDescriptor::Arithmetic { arithmetic } => MultiMean::arithmetic(arithmetic.clone()),
            MeanDescriptor::Alm { alm } => MultiMean::alm_tower(
                alm.iter()
                    .map(MeanDescriptor::build)
                    .collect::<Result<_>>()?,
            ),
        }
    }

    fn as_builtin(&self) -> Option<&MeanSpec> {
        match self {
            MeanDescriptor::Builtin(s) => Some(s),
            _ => None,
        }
    }
}

fn triple_from(ds: &[MeanDescriptor], unchecked: bool) -> Result<MeanTriple> {
    let specs: Vec<&MeanSpec> = ds.iter().filter_map(MeanDescriptor::as_builtin).collect();
    if ds.len() != 3 || specs.len() != 3 {
        return Err(Error::Parse(
            "a triple needs exactly three {\"kind\", \"r\"} means".into(),
        ));
    }
    let [a, b, c] = [0, 1, 2].map(|i| TwoVarMean::from_spec(specs[i]));
    if unchecked {
        MeanTriple::unchecked(a?, b?, c?)
    } else {
        validate_triple(a?, b?, c?)
    }
}

/// A complete batch job: means, operators and configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanJobSpec {
    /// Arity of each mean; inferred from the means when absent.
    #[serde(default)]
    pub arity: Option<usize>,
    pub means: Vec<MeanDescriptor>,
    #[serde(default)]
    pub matrices: Vec<MatrixInput>,
    #[serde(default)]
    pub config: AlmConfig,
}

impl MeanJobSpec {
    pub fn from_json(text: &str) -> Result<MeanJobSpec> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: &Path) -> Result<MeanJobSpec> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    pub fn operators(&self) -> Result<Vec<SpdMatrix>> {
        self.matrices.iter().map(MatrixInput::to_spd).collect()
    }

    /// Runs the job with its own configuration on the given operators.
    pub fn run_with(&self, operators: &[SpdMatrix]) -> Result<AlmOutcome> {
        let cfg = &self.config;
        if self.means.len() != operators.len() {
            return Err(Error::Parse(format!(
                "{} means need {} matrices, found {}",
                self.means.len(),
                self.means.len(),
                operators.len()
            )));
        }
        if let Some(n) = self.arity {
            if n + 1 != self.means.len() {
                return Err(Error::Parse(format!(
                    "arity {n} needs {} means, found {}",
                    n + 1,
                    self.means.len()
                )));
            }
        }
        let builtin = self.means.iter().all(|d| d.as_builtin().is_some());
        if builtin && self.means.len() == 3 {
            let triple = triple_from(&self.means, cfg.unsafe_allow)?;
            return alm_compute(&triple, &operators[0], &operators[1], &operators[2], cfg);
        }
        let means = self
            .means
            .iter()
            .map(MeanDescriptor::build)
            .collect::<Result<Vec<_>>>()?;
        alm_compute_n(&means, operators, cfg)
    }

    pub fn run(&self) -> Result<AlmOutcome> {
        self.run_with(&self.operators()?)
    }
}

/// JSON shape of a finished run.
#[derive(Debug, Clone, Serialize)]
pub struct JobResult {
    #[serde(serialize_with = "serialize_spd")]
    pub limit: SpdMatrix,
    pub p: Vec<f64>,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub final_distance: f64,
    pub spectral_gap: f64,
    pub s_monotone_violation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRecord>>,
}

impl JobResult {
    pub fn from_outcome(o: &AlmOutcome, with_trace: bool) -> JobResult {
        JobResult {
            limit: o.limit.clone(),
            p: o.p.clone(),
            iterations: o.iterations,
            stop_reason: o.stop_reason,
            final_distance: o.final_distance,
            spectral_gap: o.spectral_gap,
            s_monotone_violation: o.s_monotone_violation,
            trace: with_trace.then(|| o.trace.clone()),
        }
    }
}

/// Writes every `f64` with 17 significant digits; non-finite values become `null`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullPrecision;

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes `value` as compact JSON with full-precision numbers.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FullPrecision);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_precision_round_trip() {
        let xs = vec![
            1.0 / 3.0,
            36f64.cbrt(),
            1e-300,
            -2.5e17,
            0.1 + 0.2,
            f64::MIN_POSITIVE,
        ];
        let s = to_json(&xs).unwrap();
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(xs, back);
        assert_eq!(to_json(&f64::NAN).unwrap(), "null");
        assert_eq!(to_json(&0.5).unwrap(), "5.0000000000000000e-1");
    }

    #[test]
    fn matrix_formats() {
        let a: MatrixInput = serde_json::from_str("[[2, 1], [1, 3]]").unwrap();
        let b: MatrixInput = serde_json::from_str(r#"{"dim": 2, "data": [2, 1, 1, 3]}"#).unwrap();
        assert_eq!(a.to_dense().unwrap(), b.to_dense().unwrap());
        let t = parse_matrix_text("2 1\n1 3\n\n").unwrap();
        assert_eq!(t, a.to_dense().unwrap());
        assert!(
            serde_json::from_str::<MatrixInput>(r#"{"dim": 2, "data": [1]}"#)
                .unwrap()
                .to_dense()
                .is_err()
        );
        assert!(parse_matrix_text("1 2\n3").is_err());
    }

    #[test]
    fn job_descriptors() {
        let job = MeanJobSpec::from_json(
            r#"{"means": [{"kind": "geometric", "r": 0.5},
                          {"kind": "geometric", "r": 0.5},
                          {"kind": "geometric", "r": 0.5}],
                "matrices": [[[2]], [[3]], [[6]]]}"#,
        )
        .unwrap();
        let out = job.run().unwrap();
        assert!((out.limit.matrix()[0] - 36f64.cbrt()).abs() < 1e-12);

        let tower = MeanJobSpec::from_json(
            r#"{"means": [{"arithmetic": [0.5, 0.25, 0.25]}, {"arithmetic": [0.5, 0.25, 0.25]},
                          {"arithmetic": [0.5, 0.25, 0.25]}, {"arithmetic": [0.5, 0.25, 0.25]}],
                "matrices": [[[1]], [[2]], [[3]], [[4]]]}"#,
        )
        .unwrap();
        assert!((tower.run().unwrap().limit.matrix()[0] - 2.5).abs() < 1e-14);
        assert!(MeanJobSpec::from_json(r#"{"means": [], "bogus": 1}"#).is_err());
    }
}
