//! JSON (and raw binary) file formats.
//!
//! Every artifact has a plain serde mirror type (`*File`) and conversions to
//! and from the in-memory types of `polylift-core`. Complex numbers are
//! written as `[re, im]` pairs. Reading never trims coefficients, so a
//! write followed by a read gives back exactly the value that was written.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use polylift_core::filterbank::{BandSet, Boundary, Signal};
use polylift_core::gridfun::{GridFactorization, GridFunction, GridMatrix, GridStep};
use polylift_core::liftfactor::{ChainReport, LiftingChain};
use polylift_core::polymat::{LiftingStep, PolyMatrix};
use polylift_core::{Complex64, Degree, LaurentPoly};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

type Pair = [f64; 2];

fn pair(c: Complex64) -> Pair {
    [c.re, c.im]
}

fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn finite(ps: &[Pair]) -> Result<()> {
    if ps.iter().flatten().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(invalid("non-finite coefficient"))
    }
}

// ---------------------------------------------------------------------------
// polynomials and matrices

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyFile {
    pub min_exp: i64,
    pub coeffs: Vec<Pair>,
}

impl From<&LaurentPoly> for PolyFile {
    fn from(p: &LaurentPoly) -> Self {
        PolyFile {
            min_exp: p.min_exp(),
            coeffs: p.coeffs().iter().copied().map(pair).collect(),
        }
    }
}

impl TryFrom<&PolyFile> for LaurentPoly {
    type Error = FormatError;

    fn try_from(f: &PolyFile) -> Result<Self> {
        finite(&f.coeffs)?;
        // only exact zeros are dropped
        Ok(LaurentPoly::with_tol(
            f.min_exp,
            f.coeffs.iter().copied().map(complex).collect(),
            0.0,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub entries: Vec<Vec<PolyFile>>,
}

impl From<&PolyMatrix> for MatrixFile {
    fn from(a: &PolyMatrix) -> Self {
        let n = a.n();
        MatrixFile {
            n,
            entries: (0..n).map(|i| a.row(i).iter().map(PolyFile::from).collect()).collect(),
        }
    }
}

impl TryFrom<&MatrixFile> for PolyMatrix {
    type Error = FormatError;

    fn try_from(f: &MatrixFile) -> Result<Self> {
        if f.entries.len() != f.n || f.entries.iter().any(|r| r.len() != f.n) {
            return Err(invalid(format!("matrix entries are not {0}×{0}", f.n)));
        }
        let entries = f
            .entries
            .iter()
            .flatten()
            .map(LaurentPoly::try_from)
            .collect::<Result<Vec<_>>>()?;
        PolyMatrix::new(f.n, entries).map_err(|e| invalid(e.to_string()))
    }
}

// ---------------------------------------------------------------------------
// lifting chains

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangularParams {
    pub offset: usize,
    pub polys: Vec<PolyFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum StepFile {
    Lower(TriangularParams),
    Upper(TriangularParams),
    DiagonalScale(Pair),
    MonomialShift(i64),
}

impl From<&LiftingStep> for StepFile {
    fn from(s: &LiftingStep) -> Self {
        let tri = |offset: &usize, polys: &[LaurentPoly]| TriangularParams {
            offset: *offset,
            polys: polys.iter().map(PolyFile::from).collect(),
        };
        match s {
            LiftingStep::Lower { offset, polys } => StepFile::Lower(tri(offset, polys)),
            LiftingStep::Upper { offset, polys } => StepFile::Upper(tri(offset, polys)),
            LiftingStep::DiagonalScale(k) => StepFile::DiagonalScale(pair(*k)),
            LiftingStep::MonomialShift(l) => StepFile::MonomialShift(*l),
        }
    }
}

impl TryFrom<&StepFile> for LiftingStep {
    type Error = FormatError;

    fn try_from(f: &StepFile) -> Result<Self> {
        let polys = |t: &TriangularParams| t.polys.iter().map(LaurentPoly::try_from).collect::<Result<Vec<_>>>();
        Ok(match f {
            StepFile::Lower(t) => LiftingStep::Lower {
                offset: t.offset,
                polys: polys(t)?,
            },
            StepFile::Upper(t) => LiftingStep::Upper {
                offset: t.offset,
                polys: polys(t)?,
            },
            StepFile::DiagonalScale(k) => {
                finite(&[*k])?;
                LiftingStep::DiagonalScale(complex(*k))
            }
            StepFile::MonomialShift(l) => LiftingStep::MonomialShift(*l),
        })
    }
}

/// Degrees are integers; the zero polynomial's degree is `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub max_coeff_err: f64,
    pub degree_profile: Vec<Option<i64>>,
    pub max_det_defect: f64,
    pub passed: bool,
}

impl From<&ChainReport> for ReportFile {
    fn from(r: &ChainReport) -> Self {
        ReportFile {
            max_coeff_err: r.max_coeff_err,
            degree_profile: r.degree_profile.iter().map(|d| d.finite()).collect(),
            max_det_defect: r.max_det_defect,
            passed: r.passed,
        }
    }
}

impl From<&ReportFile> for ChainReport {
    fn from(f: &ReportFile) -> Self {
        ChainReport {
            max_coeff_err: f.max_coeff_err,
            degree_profile: f
                .degree_profile
                .iter()
                .map(|d| d.map_or(Degree::NegInfinity, Degree::Finite))
                .collect(),
            max_det_defect: f.max_det_defect,
            passed: f.passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainFile {
    pub n: usize,
    pub steps: Vec<StepFile>,
    pub residual: MatrixFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ReportFile>,
}

impl ChainFile {
    pub fn new(chain: &LiftingChain, report: Option<&ChainReport>) -> Self {
        ChainFile {
            n: chain.n,
            steps: chain.steps.iter().map(StepFile::from).collect(),
            residual: MatrixFile::from(&chain.residual),
            report: report.map(ReportFile::from),
        }
    }

    pub fn chain(&self) -> Result<LiftingChain> {
        let steps = self.steps.iter().map(LiftingStep::try_from).collect::<Result<Vec<_>>>()?;
        let residual = PolyMatrix::try_from(&self.residual)?;
        if residual.n() != self.n {
            return Err(invalid("residual size differs from chain size"));
        }
        for s in &steps {
            s.realize(self.n).map_err(|e| invalid(format!("step does not fit n = {}: {e}", self.n)))?;
        }
        Ok(LiftingChain {
            n: self.n,
            steps,
            residual,
        })
    }

    pub fn report(&self) -> Option<ChainReport> {
        self.report.as_ref().map(ChainReport::from)
    }
}

// ---------------------------------------------------------------------------
// sampled matrices

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub n: usize,
    pub m: usize,
    pub entries: Vec<Vec<Vec<Pair>>>,
}

fn samples(f: &GridFunction) -> Vec<Pair> {
    f.samples().iter().copied().map(pair).collect()
}

fn grid_function(ps: &[Pair], m: usize) -> Result<GridFunction> {
    if ps.len() != m {
        return Err(invalid(format!("expected {m} samples, found {}", ps.len())));
    }
    finite(ps)?;
    GridFunction::new(ps.iter().copied().map(complex).collect()).map_err(|e| invalid(e.to_string()))
}

impl From<&GridMatrix> for GridFile {
    fn from(g: &GridMatrix) -> Self {
        let n = g.n();
        GridFile {
            n,
            m: g.m(),
            entries: (0..n).map(|i| (0..n).map(|j| samples(g.get(i, j))).collect()).collect(),
        }
    }
}

impl TryFrom<&GridFile> for GridMatrix {
    type Error = FormatError;

    fn try_from(f: &GridFile) -> Result<Self> {
        if f.n < 2 || f.entries.len() != f.n || f.entries.iter().any(|r| r.len() != f.n) {
            return Err(invalid(format!("grid entries are not {0}×{0} with n ≥ 2", f.n)));
        }
        let entries = f
            .entries
            .iter()
            .flatten()
            .map(|e| grid_function(e, f.m))
            .collect::<Result<Vec<_>>>()?;
        GridMatrix::new(f.n, entries).map_err(|e| invalid(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum GridStepFile {
    Lower(Vec<Vec<Pair>>),
    Upper(Vec<Vec<Pair>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReportFile {
    pub objective: Vec<f64>,
    pub step_magnitudes: Vec<f64>,
    pub max_off_diagonal: f64,
    pub max_row_inner: f64,
    pub converged: bool,
}

/// Output of `factor-grid`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridChainFile {
    pub n: usize,
    pub m: usize,
    pub steps: Vec<GridStepFile>,
    pub residual: GridFile,
    pub report: GridReportFile,
}

impl From<&GridFactorization> for GridChainFile {
    fn from(f: &GridFactorization) -> Self {
        let steps = f
            .steps
            .iter()
            .map(|s| {
                let fs = s.multipliers().iter().map(samples).collect();
                match s {
                    GridStep::Lower(_) => GridStepFile::Lower(fs),
                    GridStep::Upper(_) => GridStepFile::Upper(fs),
                }
            })
            .collect();
        GridChainFile {
            n: f.residual.n(),
            m: f.residual.m(),
            steps,
            residual: GridFile::from(&f.residual),
            report: GridReportFile {
                objective: f.report.objective.clone(),
                step_magnitudes: f.steps.iter().map(GridStep::magnitude).collect(),
                max_off_diagonal: f.report.max_off_diagonal,
                max_row_inner: f.report.max_row_inner,
                converged: f.report.converged,
            },
        }
    }
}

impl GridChainFile {
    pub fn steps(&self) -> Result<Vec<GridStep>> {
        self.steps
            .iter()
            .map(|s| {
                let (fs, lower) = match s {
                    GridStepFile::Lower(fs) => (fs, true),
                    GridStepFile::Upper(fs) => (fs, false),
                };
                if fs.len() + 1 != self.n {
                    return Err(invalid("grid step arity differs from n − 1"));
                }
                let fs = fs.iter().map(|f| grid_function(f, self.m)).collect::<Result<Vec<_>>>()?;
                Ok(if lower { GridStep::Lower(fs) } else { GridStep::Upper(fs) })
            })
            .collect()
    }

    /// `Π steps · residual`.
    pub fn product(&self) -> Result<GridMatrix> {
        let residual = GridMatrix::try_from(&self.residual)?;
        let mut acc = GridMatrix::identity(self.n, self.m);
        for s in self.steps()? {
            let g = s.realize(self.n).map_err(|e| invalid(e.to_string()))?;
            acc = acc.matmul(&g).map_err(|e| invalid(e.to_string()))?;
        }
        acc.matmul(&residual).map_err(|e| invalid(e.to_string()))
    }
}

// ---------------------------------------------------------------------------
// signals and bands

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalFile {
    pub samples: Vec<Pair>,
}

impl From<&Signal> for SignalFile {
    fn from(s: &Signal) -> Self {
        SignalFile {
            samples: s.samples.iter().copied().map(pair).collect(),
        }
    }
}

impl TryFrom<&SignalFile> for Signal {
    type Error = FormatError;

    fn try_from(f: &SignalFile) -> Result<Self> {
        finite(&f.samples)?;
        Ok(Signal::new(f.samples.iter().copied().map(complex).collect()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryFile {
    Periodic,
    Zero,
}

impl From<Boundary> for BoundaryFile {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Periodic => BoundaryFile::Periodic,
            Boundary::Zero => BoundaryFile::Zero,
        }
    }
}

impl From<BoundaryFile> for Boundary {
    fn from(b: BoundaryFile) -> Self {
        match b {
            BoundaryFile::Periodic => Boundary::Periodic,
            BoundaryFile::Zero => Boundary::Zero,
        }
    }
}

/// Analysis output. `length` is the signal length before padding; the
/// boundary policy is recorded so that synthesis can match it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandsFile {
    pub n: usize,
    pub length: usize,
    pub boundary: BoundaryFile,
    pub bands: Vec<Vec<Pair>>,
}

impl BandsFile {
    pub fn new(b: &BandSet, boundary: Boundary) -> Self {
        BandsFile {
            n: b.n(),
            length: b.length,
            boundary: boundary.into(),
            bands: b.bands.iter().map(|band| band.iter().copied().map(pair).collect()).collect(),
        }
    }

    pub fn band_set(&self) -> Result<BandSet> {
        if self.bands.len() != self.n {
            return Err(invalid(format!("expected {} bands, found {}", self.n, self.bands.len())));
        }
        let p = self.bands.first().map_or(0, Vec::len);
        if self.bands.iter().any(|b| b.len() != p) || self.length > p * self.n {
            return Err(invalid("band lengths do not match"));
        }
        for b in &self.bands {
            finite(b)?;
        }
        Ok(BandSet {
            bands: self
                .bands
                .iter()
                .map(|b| b.iter().copied().map(complex).collect())
                .collect(),
            length: self.length,
        })
    }
}

// ---------------------------------------------------------------------------
// file IO

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| FormatError::Json {
        path: path.to_owned(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| FormatError::Json {
        path: path.to_owned(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Raw signals are interleaved little-endian `f64` pairs `re, im, re, im, …`.
pub fn is_binary(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "bin" || e == "f64")
}

pub fn signal_to_bytes(s: &Signal) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 * s.len());
    for c in &s.samples {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

pub fn signal_from_bytes(bytes: &[u8]) -> Result<Signal> {
    if !bytes.len().is_multiple_of(16) {
        return Err(invalid(format!(
            "raw signal has {} bytes, not a multiple of 16",
            bytes.len()
        )));
    }
    let samples = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Ok(Signal::new(samples))
}

/// Reads JSON or, for `.bin`/`.f64` paths, raw binary.
pub fn read_signal(path: &Path) -> Result<Signal> {
    if is_binary(path) {
        let bytes = fs::read(path).map_err(|source| FormatError::Io {
            path: path.to_owned(),
            source,
        })?;
        signal_from_bytes(&bytes)
    } else {
        Signal::try_from(&read_json::<SignalFile>(path)?)
    }
}

pub fn write_signal(path: &Path, s: &Signal) -> Result<()> {
    if is_binary(path) {
        fs::write(path, signal_to_bytes(s)).map_err(|source| FormatError::Io {
            path: path.to_owned(),
            source,
        })
    } else {
        write_json(path, &SignalFile::from(s))
    }
}

pub fn read_matrix(path: &Path) -> Result<PolyMatrix> {
    PolyMatrix::try_from(&read_json::<MatrixFile>(path)?)
}

pub fn read_grid(path: &Path) -> Result<GridMatrix> {
    GridMatrix::try_from(&read_json::<GridFile>(path)?)
}

pub fn read_chain(path: &Path) -> Result<(LiftingChain, Option<ChainReport>)> {
    let f: ChainFile = read_json(path)?;
    Ok((f.chain()?, f.report()))
}
