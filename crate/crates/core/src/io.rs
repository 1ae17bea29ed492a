//! File formats: pencil JSON, SDPA sparse import and certificate JSON.
//!
//! Scalars are JSON numbers or `"p/q"` strings. Exact data is read without going
//! through binary floating point (numbers keep their decimal text).

use nalgebra::DMatrix;
use num_traits::Zero;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::certificates::{
    BoundednessCertificate, InfeasibilityCertificate, LowDimCertificate, MembershipCertificate,
};
use crate::duals::SosDualSolution;
use crate::gram::{GramSos, GramSosMatrix};
use crate::pencil::{LinearPencil, PencilError};
use crate::poly::{MonomialBasis, PolyError, Polynomial};
use crate::scalar::{Rational, Scalar};
use crate::verify::Certificate;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("line {line}: {message}")]
    Sdpa { line: usize, message: String },
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

fn schema<R>(path: &str, message: impl Into<String>) -> Result<R, IoError> {
    Err(IoError::Schema {
        path: path.to_string(),
        message: message.into(),
    })
}

pub fn scalar_to_json<T: Scalar>(v: &T) -> Value {
    let text = v.to_text();
    if T::EXACT && text.contains('/') {
        return Value::String(text);
    }
    // Integers and finite floats are valid JSON number literals as printed.
    serde_json::from_str::<Value>(&text)
        .ok()
        .filter(Value::is_number)
        .unwrap_or(Value::String(text))
}

pub fn scalar_from_json<T: Scalar>(v: &Value, path: &str) -> Result<T, IoError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return schema(path, "expected a number or a \"p/q\" string"),
    };
    T::parse_scalar(&text).or_else(|e| schema(path, e.to_string()))
}

pub fn matrix_to_json<T: Scalar>(m: &DMatrix<T>) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| scalar_to_json(&m[(i, j)])).collect()))
            .collect(),
    )
}

pub fn matrix_from_json<T: Scalar>(v: &Value, path: &str) -> Result<DMatrix<T>, IoError> {
    let Some(rows) = v.as_array() else {
        return schema(path, "expected an array of rows");
    };
    let ncols = rows.first().and_then(Value::as_array).map_or(0, Vec::len);
    let mut m = DMatrix::from_element(rows.len(), ncols, T::zero());
    for (i, row) in rows.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let Some(row) = row.as_array() else {
            return schema(&p, "expected an array");
        };
        if row.len() != ncols {
            return schema(&p, format!("row has {} entries, expected {ncols}", row.len()));
        }
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = scalar_from_json(x, &format!("{p}[{j}]"))?;
        }
    }
    Ok(m)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value, IoError> {
    match obj.get(key) {
        Some(v) => Ok(v),
        None => schema(path, format!("missing field \"{key}\"")),
    }
}

fn usize_field(obj: &Map<String, Value>, key: &str, path: &str) -> Result<usize, IoError> {
    match field(obj, key, path)?.as_u64() {
        Some(v) => Ok(v as usize),
        None => schema(&format!("{path}.{key}"), "expected a nonnegative integer"),
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, IoError> {
    match v.as_object() {
        Some(o) => Ok(o),
        None => schema(path, "expected an object"),
    }
}

/// Reads `{"nvars": n, "size": a, "matrices": [M_0, ..., M_n]}` exactly.
pub fn read_pencil(text: &str) -> Result<LinearPencil<Rational>, IoError> {
    let v: Value = serde_json::from_str(text)?;
    let obj = object(&v, "$")?;
    let nvars = usize_field(obj, "nvars", "$")?;
    let size = usize_field(obj, "size", "$")?;
    let Some(mats) = field(obj, "matrices", "$")?.as_array() else {
        return schema("$.matrices", "expected an array of matrices");
    };
    if mats.len() != nvars + 1 {
        return schema("$.matrices", format!("{} matrices for {nvars} variables", mats.len()));
    }
    let mut coeffs = Vec::with_capacity(mats.len());
    for (k, m) in mats.iter().enumerate() {
        let path = format!("$.matrices[{k}]");
        let m: DMatrix<Rational> = matrix_from_json(m, &path)?;
        if m.nrows() != size || m.ncols() != size {
            return schema(&path, format!("{}x{} matrix, expected {size}x{size}", m.nrows(), m.ncols()));
        }
        coeffs.push(m);
    }
    Ok(LinearPencil::new(coeffs)?)
}

pub fn pencil_to_json<T: Scalar>(pencil: &LinearPencil<T>) -> Value {
    json!({
        "nvars": pencil.nvars(),
        "size": pencil.size(),
        "matrices": pencil.coeffs().iter().map(matrix_to_json).collect::<Vec<_>>(),
    })
}

/// Indented JSON with arrays of scalars (matrix rows) kept on one line.
pub fn to_json_text(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_json(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Array(items) if items.iter().any(|x| x.is_array() || x.is_object()) => {
            out.push_str("[\n");
            for (i, x) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_json(x, depth + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if !map.is_empty() => {
            out.push_str("{\n");
            for (i, (k, x)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_json(x, depth + 1, out);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
        Value::Array(items) => {
            let parts: Vec<String> = items.iter().map(Value::to_string).collect();
            out.push('[');
            out.push_str(&parts.join(", "));
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// An SDPA problem read as a pencil and a linear objective.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpaProblem {
    /// `A(y) = -F_0 + sum y_i F_i`, blocks direct-summed.
    pub pencil: LinearPencil<Rational>,
    /// `sum c_i y_i`, to be minimized over `A(y) PSD`.
    pub objective: Polynomial<Rational>,
}

/// Parses the SDPA sparse format (`.dat-s`).
///
/// Header: `m`, the number of blocks, the block sizes (negative for diagonal
/// blocks) and `c_1 .. c_m`; then one `matno block i j value` line per upper
/// triangle entry, 1-based. Comment lines start with `"` or `*`, and the
/// separators `,(){}` count as whitespace.
pub fn read_sdpa(text: &str) -> Result<SdpaProblem, IoError> {
    let mut tokens: Vec<(usize, String)> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let t = line.trim_start();
        if t.starts_with('"') || t.starts_with('*') {
            continue;
        }
        let cleaned: String = line
            .chars()
            .map(|c| if ",(){}".contains(c) { ' ' } else { c })
            .collect();
        // Annotations such as `=mDIM` trail the header numbers.
        tokens.extend(
            cleaned
                .split_whitespace()
                .filter(|w| w.starts_with(|c: char| c.is_ascii_digit() || "+-.".contains(c)))
                .map(|w| (ln + 1, w.to_string())),
        );
    }
    let mut it = tokens.into_iter();
    let last_line = text.lines().count();
    let mut next = |what: &str| -> Result<(usize, String), IoError> {
        it.next().ok_or_else(|| IoError::Sdpa {
            line: last_line,
            message: format!("unexpected end of input, expected {what}"),
        })
    };
    let int = |(line, w): (usize, String)| -> Result<i64, IoError> {
        w.parse::<i64>()
            .or_else(|_| w.parse::<f64>().ok().filter(|v| v.fract() == 0.0).map(|v| v as i64).ok_or(()))
            .map_err(|_| IoError::Sdpa {
                line,
                message: format!("expected an integer, found {w:?}"),
            })
    };
    let m = int(next("the number of constraint matrices")?)?;
    let nblocks = int(next("the number of blocks")?)?;
    if m < 0 || nblocks <= 0 {
        return Err(IoError::Sdpa {
            line: 1,
            message: "the matrix and block counts must be positive".into(),
        });
    }
    let (m, nblocks) = (m as usize, nblocks as usize);
    let mut sizes = Vec::with_capacity(nblocks);
    for _ in 0..nblocks {
        let (line, w) = next("a block size")?;
        let s = int((line, w))?;
        if s == 0 {
            return Err(IoError::Sdpa {
                line,
                message: "block size 0".into(),
            });
        }
        sizes.push(s);
    }
    let mut c = Vec::with_capacity(m);
    for _ in 0..m {
        let (line, w) = next("an objective coefficient")?;
        c.push(Rational::parse_scalar(&w).map_err(|e| IoError::Sdpa {
            line,
            message: e.to_string(),
        })?);
    }
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0usize, |acc, s| {
            let o = *acc;
            *acc += s.unsigned_abs() as usize;
            Some(o)
        })
        .collect();
    let total: usize = sizes.iter().map(|s| s.unsigned_abs() as usize).sum();
    let mut f: Vec<DMatrix<Rational>> = (0..=m).map(|_| DMatrix::from_element(total, total, Rational::zero())).collect();
    while let Some((line, w)) = it.next() {
        let mut fields = vec![(line, w)];
        for _ in 0..4 {
            fields.push(it.next().ok_or(IoError::Sdpa {
                line,
                message: "incomplete entry line, expected `matno block i j value`".into(),
            })?);
        }
        let err = |message: String| IoError::Sdpa { line, message };
        let matno = int(fields[0].clone())?;
        let block = int(fields[1].clone())?;
        let i = int(fields[2].clone())?;
        let j = int(fields[3].clone())?;
        let v = Rational::parse_scalar(&fields[4].1).map_err(|e| err(e.to_string()))?;
        if matno < 0 || matno as usize > m {
            return Err(err(format!("matrix number {matno} outside 0..={m}")));
        }
        if block < 1 || block as usize > nblocks {
            return Err(err(format!("block {block} outside 1..={nblocks}")));
        }
        let b = block as usize - 1;
        let n = sizes[b].unsigned_abs() as i64;
        if i < 1 || j < 1 || i > n || j > n {
            return Err(err(format!("entry ({i}, {j}) outside block {block} of size {n}")));
        }
        if sizes[b] < 0 && i != j {
            return Err(err(format!("off-diagonal entry ({i}, {j}) in diagonal block {block}")));
        }
        let (r, s) = (offsets[b] + i as usize - 1, offsets[b] + j as usize - 1);
        f[matno as usize][(r, s)] = v.clone();
        f[matno as usize][(s, r)] = v;
    }
    f[0] = -f[0].clone();
    let objective = Polynomial::linear(Rational::zero(), &c);
    Ok(SdpaProblem {
        pencil: LinearPencil::new(f)?,
        objective,
    })
}

/// A certificate read from JSON in the mode it was written in.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedCertificate {
    Exact(Certificate<Rational>),
    Float(Certificate<f64>),
}

impl LoadedCertificate {
    pub fn mode(&self) -> &'static str {
        match self {
            LoadedCertificate::Exact(_) => Rational::MODE,
            LoadedCertificate::Float(_) => f64::MODE,
        }
    }
}

fn sos_json<T: Scalar>(s: &GramSos<T>) -> Value {
    matrix_to_json(&s.gram)
}

/// Serializes a certificate for a pencil with `nvars` variables and size `size`.
pub fn certificate_to_json<T: Scalar>(cert: &Certificate<T>, nvars: usize, size: usize) -> Value {
    let mut out = Map::new();
    out.insert("type".into(), json!(cert.type_tag()));
    out.insert("mode".into(), json!(T::MODE));
    out.insert("nvars".into(), json!(nvars));
    out.insert("size".into(), json!(size));
    let basis = |degree: usize| json!({ "nvars": nvars, "degree": degree });
    match cert {
        Certificate::Infeasibility(c) => {
            out.insert("level".into(), json!(c.level));
            out.insert("basis".into(), basis(c.level));
            out.insert("grams".into(), json!({ "s": sos_json(&c.s), "S": matrix_to_json(&c.big.gram) }));
            out.insert("residual".into(), json!(c.residual));
        }
        Certificate::LowDim(c) => {
            out.insert("level".into(), json!(1));
            out.insert("basis".into(), basis(1));
            out.insert("f".into(), json!(c.f.to_string()));
            out.insert("grams".into(), json!({ "s": sos_json(&c.s), "S": matrix_to_json(&c.big.gram) }));
            out.insert("residual".into(), json!(c.residual));
        }
        Certificate::Membership(c) => {
            out.insert("level".into(), json!(c.level));
            out.insert("basis".into(), basis(c.level));
            out.insert("target".into(), json!(c.target.to_string()));
            out.insert("grams".into(), json!({ "s": sos_json(&c.s), "S": matrix_to_json(&c.big.gram) }));
        }
        Certificate::Boundedness(c) => {
            out.insert("level".into(), json!(c.level));
            out.insert("basis".into(), basis(c.level));
            out.insert("N".into(), scalar_to_json(&c.bound));
            let certs: Vec<Value> = c
                .certs
                .iter()
                .map(|m| {
                    json!({
                        "target": m.target.to_string(),
                        "s": sos_json(&m.s),
                        "S": matrix_to_json(&m.big.gram),
                    })
                })
                .collect();
            out.insert("grams".into(), json!({ "certs": certs }));
            out.insert("residual".into(), json!(c.residual));
        }
        Certificate::SosDual(c) => {
            out.insert("level".into(), json!(1));
            out.insert("basis".into(), basis(1));
            out.insert("objective".into(), json!(c.objective.to_string()));
            out.insert("a".into(), scalar_to_json(&c.a));
            out.insert("c".into(), scalar_to_json(&c.c));
            let list = |ms: &[DMatrix<T>]| Value::Array(ms.iter().map(matrix_to_json).collect());
            let grams: Vec<DMatrix<T>> = c.grams.iter().map(|g| g.gram.clone()).collect();
            out.insert(
                "grams".into(),
                json!({
                    "S": matrix_to_json(&c.s),
                    "S_i": list(&grams),
                    "U": list(&c.u),
                    "W": list(&c.w),
                }),
            );
        }
    }
    Value::Object(out)
}

pub fn read_certificate(text: &str) -> Result<LoadedCertificate, IoError> {
    let v: Value = serde_json::from_str(text)?;
    let obj = object(&v, "$")?;
    match field(obj, "mode", "$")?.as_str() {
        Some("exact") => Ok(LoadedCertificate::Exact(certificate_from_json(obj)?)),
        Some("float") => Ok(LoadedCertificate::Float(certificate_from_json(obj)?)),
        _ => schema("$.mode", "expected \"exact\" or \"float\""),
    }
}

fn poly_field<T: Scalar>(obj: &Map<String, Value>, key: &str, nvars: usize, path: &str) -> Result<Polynomial<T>, IoError> {
    let p = format!("{path}.{key}");
    let Some(text) = field(obj, key, path)?.as_str() else {
        return schema(&p, "expected a polynomial string");
    };
    Polynomial::parse(text, nvars).or_else(|e: PolyError| schema(&p, e.to_string()))
}

fn residual_field(obj: &Map<String, Value>) -> f64 {
    obj.get("residual").and_then(Value::as_f64).unwrap_or(0.0)
}

fn gram_pair<T: Scalar>(
    obj: &Map<String, Value>,
    path: &str,
    nvars: usize,
    size: usize,
    degree: usize,
) -> Result<(GramSos<T>, GramSosMatrix<T>), IoError> {
    let basis = MonomialBasis::new(nvars, degree);
    let s = matrix_from_json(field(obj, "s", path)?, &format!("{path}.s"))?;
    let big = matrix_from_json(field(obj, "S", path)?, &format!("{path}.S"))?;
    if s.nrows() != basis.len() || s.ncols() != basis.len() {
        return schema(&format!("{path}.s"), format!("expected {0}x{0}", basis.len()));
    }
    let n = size * basis.len();
    if big.nrows() != n || big.ncols() != n {
        return schema(&format!("{path}.S"), format!("expected {n}x{n}"));
    }
    Ok((
        GramSos {
            basis: basis.clone(),
            gram: s,
        },
        GramSosMatrix { size, basis, gram: big },
    ))
}

fn matrix_list<T: Scalar>(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Vec<DMatrix<T>>, IoError> {
    let p = format!("{path}.{key}");
    let Some(items) = field(obj, key, path)?.as_array() else {
        return schema(&p, "expected an array of matrices");
    };
    items
        .iter()
        .enumerate()
        .map(|(i, m)| matrix_from_json(m, &format!("{p}[{i}]")))
        .collect()
}

fn certificate_from_json<T: Scalar>(obj: &Map<String, Value>) -> Result<Certificate<T>, IoError> {
    let nvars = usize_field(obj, "nvars", "$")?;
    let size = usize_field(obj, "size", "$")?;
    let level = usize_field(obj, "level", "$")?;
    if let Some(b) = obj.get("basis") {
        let b = object(b, "$.basis")?;
        if usize_field(b, "nvars", "$.basis")? != nvars {
            return schema("$.basis.nvars", "does not match $.nvars");
        }
    }
    let grams = object(field(obj, "grams", "$")?, "$.grams")?;
    let Some(tag) = field(obj, "type", "$")?.as_str() else {
        return schema("$.type", "expected a string");
    };
    match tag {
        "infeasibility" => {
            let (s, big) = gram_pair(grams, "$.grams", nvars, size, level)?;
            Ok(Certificate::Infeasibility(InfeasibilityCertificate {
                level,
                s,
                big,
                residual: residual_field(obj),
            }))
        }
        "lowdim" => {
            let (s, big) = gram_pair(grams, "$.grams", nvars, size, 1)?;
            Ok(Certificate::LowDim(LowDimCertificate {
                f: poly_field(obj, "f", nvars, "$")?,
                s,
                big,
                residual: residual_field(obj),
            }))
        }
        "membership" => {
            let (s, big) = gram_pair(grams, "$.grams", nvars, size, level)?;
            Ok(Certificate::Membership(MembershipCertificate {
                target: poly_field(obj, "target", nvars, "$")?,
                level,
                s,
                big,
            }))
        }
        "boundedness" => {
            let bound = scalar_from_json(field(obj, "N", "$")?, "$.N")?;
            let Some(items) = field(grams, "certs", "$.grams")?.as_array() else {
                return schema("$.grams.certs", "expected an array");
            };
            let mut certs = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let path = format!("$.grams.certs[{i}]");
                let o = object(item, &path)?;
                let (s, big) = gram_pair(o, &path, nvars, size, level)?;
                certs.push(MembershipCertificate {
                    target: poly_field(o, "target", nvars, &path)?,
                    level,
                    s,
                    big,
                });
            }
            Ok(Certificate::Boundedness(BoundednessCertificate {
                bound,
                level,
                certs,
                residual: residual_field(obj),
            }))
        }
        "sos-dual" => {
            let linear = MonomialBasis::new(nvars, 1);
            let grams_list = matrix_list::<T>(grams, "S_i", "$.grams")?
                .into_iter()
                .map(|g| GramSosMatrix {
                    size,
                    basis: linear.clone(),
                    gram: g,
                })
                .collect();
            Ok(Certificate::SosDual(SosDualSolution {
                objective: poly_field(obj, "objective", nvars, "$")?,
                a: scalar_from_json(field(obj, "a", "$")?, "$.a")?,
                c: scalar_from_json(field(obj, "c", "$")?, "$.c")?,
                s: matrix_from_json(field(grams, "S", "$.grams")?, "$.grams.S")?,
                grams: grams_list,
                u: matrix_list(grams, "U", "$.grams")?,
                w: matrix_list(grams, "W", "$.grams")?,
            }))
        }
        other => schema("$.type", format!("unknown certificate type {other:?}")),
    }
}
