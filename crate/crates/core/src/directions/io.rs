//! Canonical JSON form of a [`DirectionSet`]: big integers as decimal
//! strings, rationals as `"num/den"`, and a SHA-256 hash of the body.

use super::{validate, DirectionRecord, DirectionSet, DirectionSpec, RationalVector};
use crate::arith::Certainty;
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::str::FromStr;

pub const DIRECTIONS_SCHEMA: &str = "primedir.directions/1";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRepr {
    schema: String,
    content_hash: String,
    body: Body,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Body {
    spec: DirectionSpec,
    kappa: usize,
    eps_effective: f64,
    window: [String; 2],
    prime_window: Vec<String>,
    window_certainty: Certainty,
    scale: String,
    vectors: Vec<RecordRepr>,
    base_multiple: String,
    a: String,
    a_tilde: String,
    integer_vectors: Vec<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordRepr {
    v: [String; 2],
    m: u64,
    n: u64,
    q_exponent: i64,
    prime_subset: Vec<usize>,
}

fn rational_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_uint(s: &str, what: &str) -> Result<BigUint> {
    BigUint::from_str(s).map_err(|_| Error::Format(format!("{what}: `{s}` is not a decimal integer")))
}

fn parse_int(s: &str, what: &str) -> Result<BigInt> {
    BigInt::from_str(s).map_err(|_| Error::Format(format!("{what}: `{s}` is not a decimal integer")))
}

fn parse_rational(s: &str, what: &str) -> Result<BigRational> {
    let (n, d) = s
        .split_once('/')
        .ok_or_else(|| Error::Format(format!("{what}: `{s}` is not `num/den`")))?;
    let n = parse_int(n, what)?;
    let d = parse_int(d, what)?;
    if d <= BigInt::from(0) {
        return Err(Error::Format(format!("{what}: denominator must be positive")));
    }
    let r = BigRational::new(n.clone(), d.clone());
    if r.numer() != &n || r.denom() != &d {
        return Err(Error::Format(format!("{what}: `{s}` is not in lowest terms")));
    }
    Ok(r)
}

fn to_body(ds: &DirectionSet) -> Body {
    Body {
        spec: ds.spec.clone(),
        kappa: ds.kappa,
        eps_effective: ds.eps_effective,
        window: [ds.window.0.to_string(), ds.window.1.to_string()],
        prime_window: ds.prime_window.iter().map(|p| p.to_string()).collect(),
        window_certainty: ds.window_certainty,
        scale: ds.scale.to_string(),
        vectors: ds
            .vectors
            .iter()
            .map(|r| RecordRepr {
                v: [rational_str(&r.v.x), rational_str(&r.v.y)],
                m: r.m,
                n: r.n,
                q_exponent: r.q_exponent,
                prime_subset: r.prime_subset.clone(),
            })
            .collect(),
        base_multiple: ds.base_multiple.to_string(),
        a: ds.a.to_string(),
        a_tilde: ds.a_tilde.to_string(),
        integer_vectors: ds
            .integer_vectors
            .iter()
            .map(|(x, y)| [x.to_string(), y.to_string()])
            .collect(),
    }
}

fn from_body(b: Body) -> Result<DirectionSet> {
    let vectors = b
        .vectors
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(DirectionRecord {
                v: RationalVector {
                    x: parse_rational(&r.v[0], &format!("vectors[{i}].v.x"))?,
                    y: parse_rational(&r.v[1], &format!("vectors[{i}].v.y"))?,
                },
                m: r.m,
                n: r.n,
                q_exponent: r.q_exponent,
                prime_subset: r.prime_subset,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectionSet {
        spec: b.spec,
        kappa: b.kappa,
        eps_effective: b.eps_effective,
        window: (parse_uint(&b.window[0], "window")?, parse_uint(&b.window[1], "window")?),
        prime_window: b
            .prime_window
            .iter()
            .map(|p| parse_uint(p, "prime_window"))
            .collect::<Result<_>>()?,
        window_certainty: b.window_certainty,
        scale: parse_uint(&b.scale, "scale")?,
        vectors,
        base_multiple: parse_uint(&b.base_multiple, "base_multiple")?,
        a: parse_uint(&b.a, "a")?,
        a_tilde: parse_uint(&b.a_tilde, "a_tilde")?,
        integer_vectors: b
            .integer_vectors
            .iter()
            .map(|[x, y]| Ok((parse_int(x, "integer_vectors")?, parse_int(y, "integer_vectors")?)))
            .collect::<Result<_>>()?,
    })
}

fn body_hash(body: &Body) -> String {
    let bytes = serde_json::to_vec(body).expect("body serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Canonical text of `ds`. Identical sets give identical bytes.
pub fn serialize(ds: &DirectionSet) -> String {
    let body = to_body(ds);
    let file = FileRepr {
        schema: DIRECTIONS_SCHEMA.to_string(),
        content_hash: body_hash(&body),
        body,
    };
    let mut s = serde_json::to_string_pretty(&file).expect("file serializes");
    s.push('\n');
    s
}

/// Content hash recorded for `ds`.
pub fn content_hash(ds: &DirectionSet) -> String {
    body_hash(&to_body(ds))
}

/// Parse, verify the hash, and re-validate every construction rule.
pub fn deserialize(text: &str) -> Result<DirectionSet> {
    let file: FileRepr = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.schema != DIRECTIONS_SCHEMA {
        return Err(Error::Format(format!(
            "schema `{}`, expected `{DIRECTIONS_SCHEMA}`",
            file.schema
        )));
    }
    let hash = body_hash(&file.body);
    if hash != file.content_hash {
        return Err(Error::Format(format!(
            "content hash mismatch: file says {}, body hashes to {hash}",
            file.content_hash
        )));
    }
    let ds = from_body(file.body)?;
    validate(&ds)?;
    Ok(ds)
}
