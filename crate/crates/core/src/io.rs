//! JSON encodings of scalars, matrices, blocks and factorizations.
//!
//! Floats are written by `serde_json`, which emits the shortest decimal that
//! round-trips, so output is byte-stable for a fixed input.

use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::canonical::{Block, BlockMultiset, DecompKind};
use crate::decomp::Factorization;
use crate::error::{Error, Result};
use crate::matrices::Matrix;
use crate::scalars::{Dual, Quaternion, RingId, Scalar};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn num(x: f64) -> Result<Value> {
    serde_json::Number::from_f64(x).map(Value::Number).ok_or_else(|| parse_err(format!("non-finite value {x}")))
}

fn get_f64(v: &Value) -> Result<f64> {
    v.as_f64().ok_or_else(|| parse_err(format!("expected a number, got {v}")))
}

fn get_usize(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| parse_err(format!("expected a count for '{what}'")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| parse_err(format!("missing field '{key}'")))
}

fn reals<const N: usize>(v: &Value) -> Result<[f64; N]> {
    let arr = v.as_array().filter(|a| a.len() == N).ok_or_else(|| parse_err(format!("expected {N} numbers, got {v}")))?;
    let mut out = [0.0; N];
    for (o, x) in out.iter_mut().zip(arr) {
        *o = get_f64(x)?;
    }
    Ok(out)
}

fn complex_json(z: Complex64) -> Result<Value> {
    Ok(Value::Array(vec![num(z.re)?, num(z.im)?]))
}

pub fn scalar_to_json(s: &Scalar) -> Result<Value> {
    Ok(match *s {
        Scalar::Zero => json!(0),
        Scalar::Real(x) => num(x)?,
        Scalar::Complex(z) => complex_json(z)?,
        Scalar::DualTrivial(d) | Scalar::DualConj(d) => Value::Array(vec![num(d.re)?, num(d.eps)?]),
        Scalar::Quaternion(q) => Value::Array(vec![num(q.w)?, num(q.x)?, num(q.y)?, num(q.z)?]),
        Scalar::DoubleComplex(a, c) => Value::Array(vec![complex_json(a)?, complex_json(c)?]),
        Scalar::Integer(n) => json!(n),
    })
}

pub fn scalar_from_json(ring: RingId, v: &Value) -> Result<Scalar> {
    Ok(match ring {
        RingId::Zero => {
            if get_f64(v)? != 0.0 {
                return Err(parse_err("the zero ring has only 0"));
            }
            Scalar::Zero
        }
        RingId::Real => Scalar::Real(get_f64(v)?),
        RingId::Complex => {
            let [a, b] = reals(v)?;
            Scalar::Complex(Complex64::new(a, b))
        }
        RingId::DualTrivial => {
            let [a, b] = reals(v)?;
            Scalar::DualTrivial(Dual::new(a, b))
        }
        RingId::DualConj => {
            let [a, b] = reals(v)?;
            Scalar::DualConj(Dual::new(a, b))
        }
        RingId::Quaternion => {
            let [w, x, y, z] = reals(v)?;
            Scalar::Quaternion(Quaternion::new(w, x, y, z))
        }
        RingId::DoubleComplexSwap => {
            let arr = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| parse_err(format!("expected [[a,b],[c,d]], got {v}")))?;
            let [a, b] = reals(&arr[0])?;
            let [c, d] = reals(&arr[1])?;
            Scalar::DoubleComplex(Complex64::new(a, b), Complex64::new(c, d))
        }
        RingId::IntegerTrivial => Scalar::Integer(v.as_i64().ok_or_else(|| parse_err(format!("expected an integer, got {v}")))?),
    })
}

pub fn matrix_to_json(m: &Matrix) -> Result<Value> {
    let entries = (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| scalar_to_json(&m.get(i, j))).collect::<Result<Vec<_>>>().map(Value::Array))
        .collect::<Result<Vec<_>>>()?;
    Ok(json!({ "ring": m.ring().name(), "rows": m.rows(), "cols": m.cols(), "entries": entries }))
}

pub fn matrix_from_json(v: &Value) -> Result<Matrix> {
    let ring: RingId = field(v, "ring")?.as_str().ok_or_else(|| parse_err("'ring' must be a string"))?.parse()?;
    let rows = get_usize(field(v, "rows")?, "rows")?;
    let cols = get_usize(field(v, "cols")?, "cols")?;
    let entries = field(v, "entries")?.as_array().ok_or_else(|| parse_err("'entries' must be an array"))?;
    // an empty dimension is encoded as "entries": []
    if rows == 0 || cols == 0 {
        if !entries.is_empty() && !entries.iter().all(|r| r.as_array().is_some_and(|r| r.is_empty())) {
            return Err(parse_err("entries given for an empty matrix"));
        }
        return Ok(Matrix::zeros(ring, rows, cols));
    }
    if entries.len() != rows {
        return Err(Error::ShapeMismatch(format!("{} rows given, {rows} declared", entries.len())));
    }
    let mut flat = Vec::with_capacity(rows * cols);
    for row in entries {
        let row = row.as_array().ok_or_else(|| parse_err("each row must be an array"))?;
        if row.len() != cols {
            return Err(Error::ShapeMismatch(format!("row of length {}, {cols} declared", row.len())));
        }
        for x in row {
            flat.push(scalar_from_json(ring, x)?);
        }
    }
    Matrix::new(ring, rows, cols, flat)
}

/// Parameters keyed by name. `GraphComponent` carries its matrix.
pub fn block_to_json(b: &Block) -> Result<Value> {
    let mut p = Map::new();
    match b {
        Block::PosScalar(x) | Block::SignedScalar(x) => {
            p.insert("x".into(), num(*x)?);
        }
        Block::DualScalar { x, y } | Block::DualRot2 { x, y } => {
            p.insert("x".into(), num(*x)?);
            p.insert("y".into(), num(*y)?);
        }
        Block::DualEps(y) => {
            p.insert("y".into(), num(*y)?);
        }
        Block::JordanPair { r, theta, .. } => {
            p.insert("r".into(), num(*r)?);
            p.insert("theta".into(), num(*theta)?);
        }
        Block::JordanBlock { lambda, .. } => {
            p.insert("lambda".into(), complex_json(*lambda)?);
        }
        Block::GraphComponent(g) => {
            p.insert("matrix".into(), json!(g));
        }
        _ => {}
    }
    Ok(json!({ "kind": b.tag(), "params": Value::Object(p), "size": b.size() }))
}

pub fn block_from_json(v: &Value) -> Result<Block> {
    let tag = field(v, "kind")?.as_str().ok_or_else(|| parse_err("'kind' must be a string"))?;
    let empty = Map::new();
    let params = v.get("params").and_then(Value::as_object).unwrap_or(&empty);
    let p = |k: &str| params.get(k).ok_or_else(|| parse_err(format!("{tag}: missing parameter '{k}'"))).and_then(get_f64);
    let size = || v.get("size").map_or(Ok(1), |s| get_usize(s, "size"));
    Ok(match tag {
        "PosScalar" => Block::PosScalar(p("x")?),
        "SignedScalar" => Block::SignedScalar(p("x")?),
        "DualScalar" => Block::DualScalar { x: p("x")?, y: p("y")? },
        "DualEps" => Block::DualEps(p("y")?),
        "DualRot2" => Block::DualRot2 { x: p("x")?, y: p("y")? },
        "JordanPair" => Block::JordanPair { m: size()?, r: p("r")?, theta: p("theta")? },
        "SingularPairRow" => Block::SingularPairRow(size()?),
        "SingularPairCol" => Block::SingularPairCol(size()?),
        "JordanZeroLeft" => Block::JordanZeroLeft(size()?),
        "JordanZeroRight" => Block::JordanZeroRight(size()?),
        "ZeroScalar" => Block::ZeroScalar,
        "EmptyRow" => Block::EmptyRow,
        "EmptyCol" => Block::EmptyCol,
        "JordanBlock" => {
            let [re, im] = reals(params.get("lambda").ok_or_else(|| parse_err("JordanBlock: missing 'lambda'"))?)?;
            Block::JordanBlock { m: size()?, lambda: Complex64::new(re, im) }
        }
        "GraphComponent" => {
            let rows = params
                .get("matrix")
                .and_then(Value::as_array)
                .ok_or_else(|| parse_err("GraphComponent: missing 'matrix'"))?;
            let g = rows
                .iter()
                .map(|r| {
                    r.as_array()
                        .ok_or_else(|| parse_err("GraphComponent rows must be arrays"))?
                        .iter()
                        .map(|x| x.as_i64().ok_or_else(|| parse_err("GraphComponent entries must be integers")))
                        .collect::<Result<Vec<i64>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Block::GraphComponent(g)
        }
        other => return Err(parse_err(format!("unknown block kind '{other}'"))),
    })
}

pub fn blocks_to_json(b: &BlockMultiset) -> Result<Value> {
    Ok(Value::Array(b.iter().map(block_to_json).collect::<Result<_>>()?))
}

/// Blocks are re-sorted on input, so any order is accepted.
pub fn blocks_from_json(v: &Value) -> Result<BlockMultiset> {
    let arr = v.as_array().ok_or_else(|| parse_err("'blocks' must be an array"))?;
    Ok(BlockMultiset::new(arr.iter().map(block_from_json).collect::<Result<_>>()?))
}

/// `{ring, kind, matrix, factors: {left, right}, blocks, residuals}`.
pub fn factorization_to_json(m: &Matrix, f: &Factorization, residuals: Value) -> Result<Value> {
    Ok(json!({
        "ring": m.ring().name(),
        "kind": f.kind.name(),
        "matrix": matrix_to_json(m)?,
        "factors": { "left": matrix_to_json(&f.left)?, "right": matrix_to_json(&f.right)? },
        "blocks": blocks_to_json(&f.blocks)?,
        "residuals": residuals,
    }))
}

/// Reads `{matrix, factorization: {kind, factors, blocks}}` or the output of
/// [`factorization_to_json`] directly.
pub fn verify_input_from_json(v: &Value) -> Result<(Matrix, Factorization)> {
    let m = matrix_from_json(field(v, "matrix")?)?;
    let f = v.get("factorization").unwrap_or(v);
    let kind: DecompKind = field(f, "kind")?.as_str().ok_or_else(|| parse_err("'kind' must be a string"))?.parse()?;
    let factors = field(f, "factors")?;
    let left = matrix_from_json(field(factors, "left")?)?;
    let right = matrix_from_json(field(factors, "right")?)?;
    for r in [left.ring(), right.ring()] {
        if r != m.ring() {
            return Err(Error::RingMismatch(m.ring(), r));
        }
    }
    let blocks = blocks_from_json(field(f, "blocks")?)?;
    let mut fact = Factorization { kind, left, right, blocks, residual: 0.0 };
    fact.residual = fact.residual_against(&m).unwrap_or(f64::INFINITY);
    Ok((m, fact))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_round_trip_every_ring() {
        let samples = [
            Scalar::Zero,
            Scalar::Real(-1.5),
            Scalar::Complex(Complex64::new(0.1, -2.0)),
            Scalar::DualTrivial(Dual::new(1.0, 2.0)),
            Scalar::DualConj(Dual::new(-1.0, 0.5)),
            Scalar::Quaternion(Quaternion::new(1.0, 2.0, 3.0, 4.0)),
            Scalar::DoubleComplex(Complex64::new(1.0, 2.0), Complex64::new(3.0, 4.0)),
            Scalar::Integer(-7),
        ];
        for s in samples {
            let v = scalar_to_json(&s).unwrap();
            assert_eq!(scalar_from_json(s.ring(), &v).unwrap(), s);
        }
    }

    #[test]
    fn matrix_format() {
        let m = Matrix::from_reals(RingId::Complex, 1, 2, &[1.0, 0.1]);
        let v = matrix_to_json(&m).unwrap();
        assert_eq!(v.to_string(), r#"{"cols":2,"entries":[[[1.0,0.0],[0.1,0.0]]],"ring":"complex","rows":1}"#);
        assert_eq!(matrix_from_json(&v).unwrap(), m);
        let e = json!({"ring": "real", "rows": 0, "cols": 3, "entries": []});
        assert_eq!(matrix_from_json(&e).unwrap().shape(), (0, 3));
        let bad = json!({"ring": "real", "rows": 2, "cols": 1, "entries": [[1.0]]});
        assert!(matches!(matrix_from_json(&bad), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn block_round_trip() {
        let blocks = [
            Block::PosScalar(3.0),
            Block::DualRot2 { x: 1.0, y: 2.0 },
            Block::JordanPair { m: 2, r: 1.0, theta: 0.3 },
            Block::SingularPairCol(3),
            Block::EmptyCol,
            Block::JordanBlock { m: 2, lambda: Complex64::new(0.0, 1.0) },
            Block::GraphComponent(vec![vec![0, 1], vec![1, 0]]),
        ];
        for b in blocks {
            assert_eq!(block_from_json(&block_to_json(&b).unwrap()).unwrap(), b);
        }
        let v = block_to_json(&Block::PosScalar(3.0)).unwrap();
        assert_eq!(v.to_string(), r#"{"kind":"PosScalar","params":{"x":3.0},"size":1}"#);
    }
}
