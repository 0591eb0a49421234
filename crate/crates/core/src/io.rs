//! JSON input schemas, output formatting and atomic file writes.
//!
//! Matrices are `{"dim": d, "entries": [[re, im], ...]}` in row-major order;
//! non-square matrices give `"rows"` and `"cols"` instead of `"dim"`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channels::{
    make_delay, make_dephasing, make_energy_unitary, make_partial_dephasing, make_replace, make_thermalizing,
    random_passive_covariant, QuantumChannel,
};
use crate::error::{Error, Result};
use crate::qcore::linalg::{c64, CMatrix};
use crate::qcore::{DensityMatrix, HamiltonianSystem};
use crate::symmetry::{GroupElement, GroupMeasure, SymmetryRep};

/// Significant digits kept in every emitted number.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push([m[(i, j)].re, m[(i, j)].im]);
            }
        }
        if rows == cols {
            Self {
                dim: Some(rows),
                rows: None,
                cols: None,
                entries,
            }
        } else {
            Self {
                dim: None,
                rows: Some(rows),
                cols: Some(cols),
                entries,
            }
        }
    }

    pub fn to_matrix(&self, field: &str) -> Result<CMatrix> {
        let (rows, cols) = match (self.dim, self.rows, self.cols) {
            (Some(d), None, None) => (d, d),
            (None, Some(r), Some(c)) => (r, c),
            _ => {
                return Err(Error::invalid(
                    field,
                    "give either \"dim\" or both \"rows\" and \"cols\"",
                ))
            }
        };
        if rows == 0 || cols == 0 {
            return Err(Error::invalid(field, "dimensions must be positive"));
        }
        if self.entries.len() != rows * cols {
            return Err(Error::invalid(
                format!("{field}.entries"),
                format!("expected {} entries, found {}", rows * cols, self.entries.len()),
            ));
        }
        if let Some(k) = self
            .entries
            .iter()
            .position(|[re, im]| !re.is_finite() || !im.is_finite())
        {
            return Err(Error::invalid(format!("{field}.entries[{k}]"), "non-finite number"));
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            let [re, im] = self.entries[i * cols + j];
            c64(re, im)
        }))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    #[serde(default)]
    pub kind: Option<String>,
    pub matrix: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemJson {
    #[serde(default)]
    pub kind: Option<String>,
    pub hamiltonian: MatrixJson,
    pub temperature: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum RepJson {
    U1 {
        #[serde(default)]
        kind: Option<String>,
        weights: Vec<i64>,
        #[serde(default)]
        basis: Option<MatrixJson>,
    },
    Finite {
        #[serde(default)]
        kind: Option<String>,
        unitaries: Vec<MatrixJson>,
        table: Vec<Vec<usize>>,
        identity: usize,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub g: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MeasureJson {
    Atoms {
        #[serde(default)]
        kind: Option<String>,
        atoms: Vec<AtomJson>,
    },
    Haar {
        #[serde(default)]
        kind: Option<String>,
    },
}

/// Extra keys are ignored so annotated outputs can be read back.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    #[serde(default)]
    pub kind: Option<String>,
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

/// Channel generator specs, resolved against a system and rep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "gen", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorJson {
    Identity,
    Dephasing,
    PartialDephasing { lambda: f64 },
    Thermalizing { p: f64 },
    Delay { shifts: Vec<f64>, probs: Vec<f64> },
    Replace { state: MatrixJson },
    EnergyUnitary { unitary: MatrixJson },
    Random { seed: u64 },
}

/// A parsed channel file: explicit Kraus operators or a generator spec.
#[derive(Debug, Clone)]
pub enum ChannelSpec {
    Kraus(ChannelJson),
    Generator(GeneratorJson),
}

fn check_kind(kind: &Option<String>, expected: &str) -> Result<()> {
    match kind {
        Some(k) if k != expected => Err(Error::invalid(
            "kind",
            format!("expected \"{expected}\", found \"{k}\""),
        )),
        _ => Ok(()),
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::invalid("json", e.to_string()))
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let s: StateJson = parse(text)?;
    check_kind(&s.kind, "state")?;
    DensityMatrix::new(s.matrix.to_matrix("matrix")?).map_err(|e| in_field("matrix", e))
}

pub fn parse_system(text: &str) -> Result<HamiltonianSystem> {
    let s: SystemJson = parse(text)?;
    check_kind(&s.kind, "system")?;
    let h = s.hamiltonian.to_matrix("hamiltonian")?;
    if !(s.temperature > 0.0) || !s.temperature.is_finite() {
        return Err(Error::invalid(
            "temperature",
            format!("must be positive and finite, got {}", s.temperature),
        ));
    }
    HamiltonianSystem::new(h, s.temperature).map_err(|e| in_field("hamiltonian", e))
}

pub fn parse_rep(text: &str) -> Result<SymmetryRep> {
    match parse::<RepJson>(text)? {
        RepJson::U1 { kind, weights, basis } => {
            check_kind(&kind, "rep")?;
            match basis {
                None => SymmetryRep::u1(weights).map_err(|e| in_field("weights", e)),
                Some(b) => SymmetryRep::u1_with_basis(weights, b.to_matrix("basis")?).map_err(|e| in_field("basis", e)),
            }
        }
        RepJson::Finite {
            kind,
            unitaries,
            table,
            identity,
        } => {
            check_kind(&kind, "rep")?;
            let us = unitaries
                .iter()
                .enumerate()
                .map(|(k, m)| m.to_matrix(&format!("unitaries[{k}]")))
                .collect::<Result<Vec<_>>>()?;
            SymmetryRep::finite(us, table, identity).map_err(|e| in_field("table", e))
        }
    }
}

/// Measures name U(1) elements by angle and finite-group elements by index.
pub fn parse_measure(text: &str, rep: &SymmetryRep) -> Result<GroupMeasure> {
    match parse::<MeasureJson>(text)? {
        MeasureJson::Haar { kind } => {
            check_kind(&kind, "measure")?;
            Ok(GroupMeasure::Haar)
        }
        MeasureJson::Atoms { kind, atoms } => {
            check_kind(&kind, "measure")?;
            let mut pairs = Vec::with_capacity(atoms.len());
            for (k, a) in atoms.iter().enumerate() {
                let g = if rep.is_u1() {
                    GroupElement::Angle(a.g)
                } else if a.g >= 0.0 && a.g.fract() == 0.0 {
                    GroupElement::Index(a.g as usize)
                } else {
                    return Err(Error::invalid(
                        format!("atoms[{k}].g"),
                        "finite-group elements are integer indices",
                    ));
                };
                pairs.push((g, a.w));
            }
            let mu = GroupMeasure::from_atoms(pairs).map_err(|e| in_field("atoms", e))?;
            mu.check_for(rep).map_err(|e| in_field("atoms", e))?;
            Ok(mu)
        }
    }
}

pub fn parse_channel_spec(text: &str) -> Result<ChannelSpec> {
    let v: Value = parse(text)?;
    if v.get("gen").is_some() {
        Ok(ChannelSpec::Generator(
            serde_json::from_value(v).map_err(|e| Error::invalid("gen", e.to_string()))?,
        ))
    } else {
        let c: ChannelJson = serde_json::from_value(v).map_err(|e| Error::invalid("json", e.to_string()))?;
        check_kind(&c.kind, "channel")?;
        Ok(ChannelSpec::Kraus(c))
    }
}

impl ChannelSpec {
    /// Whether building needs a system and a rep.
    pub fn needs_context(&self) -> bool {
        !matches!(self, ChannelSpec::Kraus(_))
    }

    pub fn build(&self, sys: Option<&HamiltonianSystem>, rep: Option<&SymmetryRep>) -> Result<QuantumChannel> {
        let need_rep = || rep.ok_or_else(|| Error::invalid("gen", "this generator needs --rep"));
        let need_sys = || sys.ok_or_else(|| Error::invalid("gen", "this generator needs --system"));
        match self {
            ChannelSpec::Kraus(c) => {
                let kraus = c
                    .kraus
                    .iter()
                    .enumerate()
                    .map(|(k, m)| m.to_matrix(&format!("kraus[{k}]")))
                    .collect::<Result<Vec<_>>>()?;
                let ch = QuantumChannel::new(kraus).map_err(|e| in_field("kraus", e))?;
                if (ch.dim_in(), ch.dim_out()) != (c.dim_in, c.dim_out) {
                    return Err(Error::invalid(
                        "dim_in/dim_out",
                        format!("Kraus operators are {}x{}", ch.dim_out(), ch.dim_in()),
                    ));
                }
                Ok(ch)
            }
            ChannelSpec::Generator(g) => match g {
                GeneratorJson::Identity => {
                    let d = rep.map(|r| r.dim()).or(sys.map(|s| s.dim()));
                    let d = d.ok_or_else(|| Error::invalid("gen", "identity needs --rep or --system"))?;
                    Ok(QuantumChannel::identity(d))
                }
                GeneratorJson::Dephasing => make_dephasing(need_rep()?),
                GeneratorJson::PartialDephasing { lambda } => make_partial_dephasing(need_rep()?, *lambda),
                GeneratorJson::Thermalizing { p } => make_thermalizing(need_sys()?, *p),
                GeneratorJson::Delay { shifts, probs } => make_delay(need_rep()?, shifts, probs),
                GeneratorJson::Replace { state } => {
                    let sigma = DensityMatrix::new(state.to_matrix("state")?).map_err(|e| in_field("state", e))?;
                    let d = rep.map(|r| r.dim()).or(sys.map(|s| s.dim())).unwrap_or(sigma.dim());
                    make_replace(&sigma, d)
                }
                GeneratorJson::EnergyUnitary { unitary } => {
                    make_energy_unitary(need_sys()?, need_rep()?, unitary.to_matrix("unitary")?)
                }
                GeneratorJson::Random { seed } => random_passive_covariant(need_sys()?, need_rep()?, *seed),
            },
        }
    }
}

/// Channel JSON for an explicit Kraus set.
pub fn channel_to_json(c: &QuantumChannel) -> ChannelJson {
    ChannelJson {
        kind: Some("channel".into()),
        dim_in: c.dim_in(),
        dim_out: c.dim_out(),
        kraus: c.kraus().iter().map(MatrixJson::from_matrix).collect(),
    }
}

fn in_field(field: &str, e: Error) -> Error {
    match e {
        Error::Invalid { what, reason } => Error::invalid(format!("{field}: {what}"), reason),
        Error::NotHermitian(r) => Error::invalid(field, format!("not Hermitian (deviation {r:.3e})")),
        Error::NotPsd(r) => Error::invalid(field, format!("not positive semidefinite (min eigenvalue {r:.3e})")),
        Error::BadTrace(t) => Error::invalid(field, format!("trace {t} is not 1")),
        Error::DimensionMismatch { expected, found } => {
            Error::invalid(field, format!("dimension mismatch: expected {expected}, found {found}"))
        }
        other => other,
    }
}

/// Reads a file and runs `f` on its text, prefixing validation errors with the path.
pub fn load<T>(path: &Path, f: impl FnOnce(&str) -> Result<T>) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(path.display().to_string(), format!("cannot read: {e}")))?;
    f(&text).map_err(|e| match e {
        Error::Invalid { what, reason } => Error::invalid(format!("{}: {what}", path.display()), reason),
        other => in_field(&path.display().to_string(), other),
    })
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every number in a JSON tree; integers are left alone.
pub fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap());
            *v = serde_json::Number::from_f64(x)
                .map(Value::Number)
                .unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

/// Decimal text of a rounded number, with an exponent only for very large or
/// very small magnitudes.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 {
        "0".into()
    } else if (1e-6..1e15).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

/// Pretty JSON with every float rounded, plus a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Numerical(e.to_string()))?;
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Numerical(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// CSV with a header row.
pub fn to_csv_string(header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| Error::Numerical(e.to_string()))?;
    for row in rows {
        w.write_record(row).map_err(|e| Error::Numerical(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Numerical(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Numerical(e.to_string()))
}

/// Flattens a JSON object into dotted keys and text values.
pub fn flatten_json(v: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(map) => map.iter().for_each(|(k, x)| walk(&key(k), x, out)),
            Value::Array(items) => items
                .iter()
                .enumerate()
                .for_each(|(i, x)| walk(&key(&i.to_string()), x, out)),
            Value::Number(n) => out.push((
                prefix.to_string(),
                match n.as_f64() {
                    Some(x) if n.is_f64() => format_number(x),
                    _ => n.to_string(),
                },
            )),
            Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            Value::Null => out.push((prefix.to_string(), String::new())),
        }
    }
    let mut out = Vec::new();
    walk("", v, &mut out);
    out
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io_err = |e: std::io::Error| Error::invalid(path.display().to_string(), format!("cannot write: {e}"));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.flush().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_fn(2, 3, |i, j| c64(i as f64, j as f64));
        let j = MatrixJson::from_matrix(&m);
        assert_eq!(j.rows, Some(2));
        assert_eq!(j.to_matrix("m").unwrap(), m);
    }

    #[test]
    fn parses_state_and_system() {
        let plus = r#"{"kind":"state","matrix":{"dim":2,"entries":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]]}}"#;
        let rho = parse_state(plus).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        let sys = r#"{"kind":"system","hamiltonian":{"dim":2,"entries":[[0,0],[0,0],[0,0],[1,0]]},"temperature":1.0}"#;
        assert_eq!(parse_system(sys).unwrap().dim(), 2);
    }

    #[test]
    fn reports_field_names() {
        let bad = r#"{"kind":"state","matrix":{"dim":2,"entries":[[1,0]]}}"#;
        let err = parse_state(bad).unwrap_err().to_string();
        assert!(err.contains("matrix.entries"), "{err}");
        let wrong_kind = r#"{"kind":"system","matrix":{"dim":1,"entries":[[1,0]]}}"#;
        assert!(parse_state(wrong_kind).is_err());
        let sys = r#"{"hamiltonian":{"dim":1,"entries":[[0,0]]},"temperature":-1}"#;
        assert!(parse_system(sys).unwrap_err().to_string().contains("temperature"));
    }

    #[test]
    fn parses_reps_and_measures() {
        let rep = parse_rep(r#"{"kind":"rep","type":"u1","weights":[0,1,2]}"#).unwrap();
        assert_eq!(rep.dim(), 3);
        let mu = parse_measure(
            r#"{"kind":"measure","type":"atoms","atoms":[{"g":0.0,"w":0.5},{"g":3.14159265,"w":0.5}]}"#,
            &rep,
        )
        .unwrap();
        assert_eq!(mu.atoms().unwrap().len(), 2);
        assert!(parse_measure(r#"{"kind":"measure","type":"haar"}"#, &rep)
            .unwrap()
            .is_haar());

        let z2 = r#"{"kind":"rep","type":"finite","unitaries":[
            {"dim":2,"entries":[[1,0],[0,0],[0,0],[1,0]]},
            {"dim":2,"entries":[[1,0],[0,0],[0,0],[-1,0]]}],"table":[[0,1],[1,0]],"identity":0}"#;
        let frep = parse_rep(z2).unwrap();
        assert_eq!(frep.order(), Some(2));
        assert!(parse_measure(r#"{"type":"atoms","atoms":[{"g":1,"w":1}]}"#, &frep).is_ok());
        assert!(parse_measure(r#"{"type":"atoms","atoms":[{"g":0.5,"w":1}]}"#, &frep).is_err());
        assert!(parse_measure(r#"{"type":"atoms","atoms":[{"g":2,"w":1}]}"#, &frep).is_err());
    }

    #[test]
    fn parses_channels_and_generators() {
        let sys = HamiltonianSystem::diagonal(&[0.0, 1.0], 1.0).unwrap();
        let rep = SymmetryRep::u1(vec![0, 1]).unwrap();
        let id = r#"{"kind":"channel","dim_in":2,"dim_out":2,"kraus":[{"dim":2,"entries":[[1,0],[0,0],[0,0],[1,0]]}]}"#;
        let c = parse_channel_spec(id).unwrap().build(None, None).unwrap();
        assert!(c.choi_distance(&QuantumChannel::identity(2)) < 1e-15);
        for spec in [
            r#"{"gen":"delay","shifts":[0,3.141592653589793],"probs":[0.5,0.5]}"#,
            r#"{"gen":"dephasing"}"#,
            r#"{"gen":"thermalizing","p":0.3}"#,
            r#"{"gen":"random","seed":4}"#,
            r#"{"gen":"identity"}"#,
        ] {
            parse_channel_spec(spec).unwrap().build(Some(&sys), Some(&rep)).unwrap();
        }
        assert!(parse_channel_spec(r#"{"gen":"dephasing"}"#)
            .unwrap()
            .build(Some(&sys), None)
            .is_err());
        assert!(parse_channel_spec(r#"{"gen":"bogus"}"#).is_err());
    }

    #[test]
    fn rounding_and_formatting() {
        assert_eq!(round_sig(0.412_345_678_901_234_6), 0.412345678901);
        assert_eq!(format_number(0.4123456789016), "0.412345678902");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(1.5e-20), "1.5e-20");
        let mut v = serde_json::json!({"a": [1.0000000000001, 2], "b": {"c": 0.1234567890123456}});
        round_json(&mut v);
        assert_eq!(v.to_string(), r#"{"a":[1.0,2],"b":{"c":0.123456789012}}"#);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, "first").unwrap();
        write_atomic(&p, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
