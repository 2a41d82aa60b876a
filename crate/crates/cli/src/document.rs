//! JSON triple documents.
//!
//! ```json
//! {
//!   "algebra": ["M2", "C"],
//!   "slots": [{"block": 0, "mode": "fundamental"}, {"block": 1, "mode": "scalar"}],
//!   "dirac": [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
//!   "grading": [1, 1, -1],
//!   "states": {"up": {"block": 0, "vector": [1, 0]}, "c": {"block": 1}}
//! }
//! ```
//!
//! Entries are reals or `[re, im]` pairs. A commutative space can instead be given by
//! `"lengths"`, the matrix of inverse couplings 1/|D_ij| with `"inf"` for a missing link;
//! its states default to the points "1", "2", ….

use crate::CliError;
use ncmetric_linalg::{c, ComplexMatrix, HermitianMatrix, C64};
use ncmetric_triple::{
    AlgebraBlock, BlockKind, FiniteAlgebra, Mode, PureState, RepresentationSlot, SpectralTriple,
};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
    Text(String),
}

impl Entry {
    fn complex(&self, at: &str) -> Result<C64, CliError> {
        match self {
            Entry::Real(x) => Ok(c(*x, 0.0)),
            Entry::Complex([a, b]) => Ok(c(*a, *b)),
            Entry::Text(s) => Err(CliError::parse(format!("{at}: expected a number or [re, im], found \"{s}\""))),
        }
    }

    fn length(&self, at: &str) -> Result<f64, CliError> {
        match self {
            Entry::Real(x) => Ok(*x),
            Entry::Text(s) if s == "inf" => Ok(f64::INFINITY),
            _ => Err(CliError::parse(format!("{at}: expected a length or \"inf\""))),
        }
    }

    fn from_complex(z: C64) -> Self {
        if z.im == 0.0 {
            Entry::Real(z.re)
        } else {
            Entry::Complex([z.re, z.im])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlotSpec {
    pub block: usize,
    pub mode: String,
    #[serde(default = "one")]
    pub multiplicity: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSpec {
    pub block: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vector: Option<Vec<Entry>>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TripleDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slots: Option<Vec<SlotSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dirac: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lengths: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<Vec<f64>>,
    #[serde(default)]
    pub states: Map<String, Value>,
}

/// A parsed document: the triple and its named states in document order.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub triple: SpectralTriple,
    pub states: Vec<(String, PureState)>,
}

impl Loaded {
    pub fn state(&self, name: &str) -> Result<&PureState, CliError> {
        self.states
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| CliError::state(format!("unknown state \"{name}\"")))
    }
}

fn block(spec: &str, at: &str) -> Result<AlgebraBlock, CliError> {
    match spec {
        "R" | "real" => Ok(AlgebraBlock::real()),
        "C" | "complex" => Ok(AlgebraBlock::complex()),
        "H" | "quaternions" => Ok(AlgebraBlock::quaternions()),
        s if s.starts_with('M') => match s[1..].parse::<usize>() {
            Ok(n) if n > 0 => Ok(AlgebraBlock::matrix(n)),
            _ => Err(CliError::parse(format!("{at}: bad matrix block \"{s}\""))),
        },
        s => Err(CliError::parse(format!("{at}: unknown block \"{s}\" (use R, C, H or Mn)"))),
    }
}

fn block_name(b: &AlgebraBlock) -> String {
    match b.kind {
        BlockKind::RealLine => "R".into(),
        BlockKind::ComplexLine => "C".into(),
        BlockKind::Quaternions => "H".into(),
        BlockKind::MatrixBlock => format!("M{}", b.size),
    }
}

fn mode(spec: &str, at: &str) -> Result<Mode, CliError> {
    match spec {
        "fundamental" => Ok(Mode::Fundamental),
        "conjugate" => Ok(Mode::Conjugate),
        "scalar" => Ok(Mode::Scalar),
        "scalar-conjugate" => Ok(Mode::ScalarConjugate),
        "quaternion" => Ok(Mode::Quaternion2x2),
        s => Err(CliError::parse(format!("{at}: unknown mode \"{s}\""))),
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Fundamental => "fundamental",
        Mode::Conjugate => "conjugate",
        Mode::Scalar => "scalar",
        Mode::ScalarConjugate => "scalar-conjugate",
        Mode::Quaternion2x2 => "quaternion",
    }
}

fn square(rows: &[Vec<Entry>], field: &str) -> Result<usize, CliError> {
    let n = rows.len();
    if n == 0 {
        return Err(CliError::parse(format!("{field}: empty matrix")));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != n) {
        return Err(CliError::parse(format!("{field}[{i}]: expected {n} entries, found {}", rows[i].len())));
    }
    Ok(n)
}

fn triple_error(e: impl std::fmt::Display) -> CliError {
    CliError::parse(format!("document: {e}"))
}

impl TripleDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::parse(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    fn build_triple(&self) -> Result<SpectralTriple, CliError> {
        if let Some(rows) = &self.lengths {
            if self.algebra.is_some() || self.slots.is_some() || self.dirac.is_some() {
                return Err(CliError::parse("lengths: cannot be combined with algebra, slots or dirac"));
            }
            let n = square(rows, "lengths")?;
            let mut d = ComplexMatrix::zeros(n, n).into_dmatrix();
            for i in 0..n {
                for j in 0..n {
                    let l = rows[i][j].length(&format!("lengths[{i}][{j}]"))?;
                    if i != j {
                        if !(l > 0.0) {
                            return Err(CliError::parse(format!("lengths[{i}][{j}]: must be positive or \"inf\"")));
                        }
                        d[(i, j)] = c(if l.is_infinite() { 0.0 } else { 1.0 / l }, 0.0);
                    }
                }
            }
            let h = HermitianMatrix::new(ComplexMatrix::from_dmatrix(d).map_err(triple_error)?)
                .map_err(|e| CliError::parse(format!("lengths: {e}")))?;
            return SpectralTriple::commutative(h).map_err(triple_error);
        }
        let algebra = self.algebra.as_ref().ok_or_else(|| CliError::parse("missing field `algebra`"))?;
        let slots = self.slots.as_ref().ok_or_else(|| CliError::parse("missing field `slots`"))?;
        let rows = self.dirac.as_ref().ok_or_else(|| CliError::parse("missing field `dirac`"))?;
        let blocks = algebra
            .iter()
            .enumerate()
            .map(|(i, s)| block(s, &format!("algebra[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let slots = slots
            .iter()
            .enumerate()
            .map(|(i, s)| Ok(RepresentationSlot::new(s.block, mode(&s.mode, &format!("slots[{i}].mode"))?, s.multiplicity)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let n = square(rows, "dirac")?;
        let mut entries = Vec::with_capacity(n * n);
        for (i, r) in rows.iter().enumerate() {
            for (j, e) in r.iter().enumerate() {
                entries.push(e.complex(&format!("dirac[{i}][{j}]"))?);
            }
        }
        let m = ComplexMatrix::new(n, n, entries).map_err(|e| CliError::parse(format!("dirac: {e}")))?;
        let h = HermitianMatrix::new(m).map_err(|e| CliError::parse(format!("dirac: {e}")))?;
        let alg = FiniteAlgebra::new(blocks).map_err(|e| CliError::parse(format!("algebra: {e}")))?;
        SpectralTriple::new(alg, slots, h, self.grading.clone()).map_err(triple_error)
    }

    pub fn load(&self) -> Result<Loaded, CliError> {
        let triple = self.build_triple()?;
        let mut states = vec![];
        if self.states.is_empty() && self.lengths.is_some() {
            for i in 0..triple.dim() {
                states.push(((i + 1).to_string(), PureState::canonical(i)));
            }
        }
        for (name, v) in &self.states {
            let at = format!("states.{name}");
            let spec: StateSpec =
                serde_json::from_value(v.clone()).map_err(|e| CliError::parse(format!("{at}: {e}")))?;
            let s = match &spec.vector {
                None => PureState::canonical(spec.block),
                Some(v) => {
                    let v = v
                        .iter()
                        .enumerate()
                        .map(|(k, e)| e.complex(&format!("{at}.vector[{k}]")))
                        .collect::<Result<Vec<_>, _>>()?;
                    PureState::normalized(spec.block, v).map_err(|e| CliError::parse(format!("{at}: {e}")))?
                }
            };
            s.validate(&triple.algebra).map_err(|e| CliError::parse(format!("{at}: {e}")))?;
            states.push((name.clone(), s));
        }
        Ok(Loaded { triple, states })
    }

    /// Document describing `triple` with the given named states.
    pub fn from_triple(triple: &SpectralTriple, states: &[(String, PureState)]) -> Self {
        let n = triple.dim();
        let dirac = (0..n).map(|i| (0..n).map(|j| Entry::from_complex(triple.dirac.get(i, j))).collect()).collect();
        let mut map = Map::new();
        for (name, s) in states {
            let spec = StateSpec {
                block: s.block_index,
                vector: s.vector.as_ref().map(|v| v.iter().map(|z| Entry::from_complex(*z)).collect()),
            };
            map.insert(name.clone(), serde_json::to_value(spec).expect("states serialize"));
        }
        Self {
            algebra: Some(triple.algebra.blocks.iter().map(block_name).collect()),
            slots: Some(
                triple
                    .slots
                    .iter()
                    .map(|s| SlotSpec { block: s.block_index, mode: mode_name(s.mode).into(), multiplicity: s.multiplicity })
                    .collect(),
            ),
            dirac: Some(dirac),
            lengths: None,
            grading: triple.grading.clone(),
            states: map,
        }
    }
}
