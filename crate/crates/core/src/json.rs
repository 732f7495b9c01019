//! Machine-readable encodings, versioned by [`SCHEMA_VERSION`].
//!
//! Rationals are strings (`"3"`, `"-1/2"`), Gaussian rationals are
//! `{"re", "im"}` objects, power products and twists are lists of
//! `[base, exponent]` pairs sorted by base, with base `"pi"` for π.

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::exact::{
    parse_rat, phase_twist, Base, GaussianRat, PowerProduct, Rat, Twist, UnitPhase,
};
use crate::gamma::{DecoratedGamma, GammaData, GammaFactor, MoveTrace, RationalFactor};
use crate::invariants::{Fingerprint, FingerprintDelta, Verdict};
use crate::oracle::MoveReport;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("missing or malformed field `{0}`")]
    Field(&'static str),
    #[error("unsupported schema_version {0}")]
    Version(u64),
    #[error("invalid data: {0}")]
    Invalid(String),
}

pub fn rat(q: &Rat) -> Value {
    Value::String(q.to_string())
}

pub fn gauss(z: &GaussianRat) -> Value {
    json!({ "re": rat(&z.re), "im": rat(&z.im) })
}

fn pairs<'a>(it: impl Iterator<Item = (&'a Base, &'a Rat)>) -> Value {
    Value::Array(it.map(|(b, e)| json!([b.to_string(), rat(e)])).collect())
}

pub fn power_product(p: &PowerProduct) -> Value {
    pairs(p.iter())
}

pub fn twist(t: &Twist) -> Value {
    pairs(t.iter())
}

pub fn phase(u: &UnitPhase) -> Value {
    json!({ "tag": u.tag, "twist": twist(&u.twist) })
}

pub fn decorated(g: &DecoratedGamma) -> Value {
    let r = &g.rational;
    json!({
        "schema_version": SCHEMA_VERSION,
        "omega": phase(g.gamma.omega()),
        "Q": power_product(g.gamma.q()),
        "factors": g.gamma.factors().iter()
            .map(|f| json!({ "lambda": rat(&f.lambda), "mu": gauss(&f.mu) }))
            .collect::<Vec<_>>(),
        "kappa": { "negative": r.is_negative(), "value": power_product(r.kappa()) },
        "roots": r.roots().iter().map(gauss).collect::<Vec<_>>(),
        "poles": r.poles().iter().map(gauss).collect::<Vec<_>>(),
    })
}

pub fn trace(t: &MoveTrace) -> Value {
    Value::String(t.to_string())
}

pub fn fingerprint(fp: &Fingerprint) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "depth": fp.depth(),
        "degree": rat(&fp.degree),
        "conductor": power_product(&fp.conductor),
        "root_number": phase(&fp.root_number),
        "h_star": fp.h_values.iter().map(gauss).collect::<Vec<_>>(),
    })
}

pub fn delta(d: &FingerprintDelta) -> Value {
    json!({
        "zero": d.is_zero(),
        "degree": rat(&d.degree),
        "conductor": power_product(&d.conductor),
        "same_tag": d.same_tag,
        "root_number": twist(&d.root_number),
        "h_star": d.h_values.iter().map(gauss).collect::<Vec<_>>(),
    })
}

pub fn verdict(v: &Verdict) -> Value {
    match v {
        Verdict::Distinct(c) => json!({
            "schema_version": SCHEMA_VERSION,
            "verdict": "distinct",
            "differs_at": c.to_string(),
        }),
        Verdict::FingerprintEqual { depth } => json!({
            "schema_version": SCHEMA_VERSION,
            "verdict": "fingerprint-equal",
            "depth": depth,
        }),
    }
}

pub fn report(r: &MoveReport) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "c_re": r.c.re,
        "c_im": r.c.im,
        "max_rel_dev": r.max_rel_dev,
        "omega_consistent": r.omega_consistent,
        "points_used": r.points_used,
    })
}

fn field<'a>(obj: &'a Map<String, Value>, name: &'static str) -> Result<&'a Value, JsonError> {
    obj.get(name).ok_or(JsonError::Field(name))
}

fn read_rat(v: &Value, name: &'static str) -> Result<Rat, JsonError> {
    v.as_str().and_then(parse_rat).ok_or(JsonError::Field(name))
}

fn read_gauss(v: &Value, name: &'static str) -> Result<GaussianRat, JsonError> {
    let o = v.as_object().ok_or(JsonError::Field(name))?;
    Ok(GaussianRat::new(
        read_rat(field(o, "re")?, name)?,
        read_rat(field(o, "im")?, name)?,
    ))
}

fn read_pairs(v: &Value, name: &'static str) -> Result<Vec<(Option<u64>, Rat)>, JsonError> {
    let arr = v.as_array().ok_or(JsonError::Field(name))?;
    arr.iter()
        .map(|p| {
            let p = p
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or(JsonError::Field(name))?;
            let base = p[0].as_str().ok_or(JsonError::Field(name))?;
            let e = read_rat(&p[1], name)?;
            let base = if base == "pi" {
                None
            } else {
                Some(
                    base.parse::<u64>()
                        .ok()
                        .filter(|b| *b > 0)
                        .ok_or(JsonError::Field(name))?,
                )
            };
            Ok((base, e))
        })
        .collect()
}

fn read_power_product(v: &Value, name: &'static str) -> Result<PowerProduct, JsonError> {
    let mut acc = PowerProduct::one();
    for (b, e) in read_pairs(v, name)? {
        let term = match b {
            None => PowerProduct::pi_pow(e),
            Some(b) => {
                PowerProduct::integer_pow(b, &e).map_err(|e| JsonError::Invalid(e.to_string()))?
            }
        };
        acc = &acc * &term;
    }
    Ok(acc)
}

fn read_phase(v: &Value) -> Result<UnitPhase, JsonError> {
    let o = v.as_object().ok_or(JsonError::Field("omega"))?;
    let tag = field(o, "tag")?.as_str().ok_or(JsonError::Field("tag"))?;
    let mut tw = Twist::identity();
    for (b, t) in read_pairs(field(o, "twist")?, "twist")? {
        let term = match b {
            None => {
                let mut x = Twist::identity();
                x.add_term(Base::Pi, &t);
                x
            }
            Some(b) => phase_twist(&Rat::from_integer(b.into()), &t)
                .map_err(|e| JsonError::Invalid(e.to_string()))?,
        };
        tw = tw.compose(&term);
    }
    Ok(UnitPhase {
        tag: tag.to_string(),
        twist: tw,
    })
}

fn read_gauss_list(v: &Value, name: &'static str) -> Result<Vec<GaussianRat>, JsonError> {
    v.as_array()
        .ok_or(JsonError::Field(name))?
        .iter()
        .map(|z| read_gauss(z, name))
        .collect()
}

/// Inverse of [`decorated`].
pub fn decorated_from_json(v: &Value) -> Result<DecoratedGamma, JsonError> {
    let o = v.as_object().ok_or(JsonError::Field("root object"))?;
    let version = field(o, "schema_version")?
        .as_u64()
        .ok_or(JsonError::Field("schema_version"))?;
    if version != SCHEMA_VERSION {
        return Err(JsonError::Version(version));
    }
    let omega = read_phase(field(o, "omega")?)?;
    let q = read_power_product(field(o, "Q")?, "Q")?;
    let factors = field(o, "factors")?
        .as_array()
        .ok_or(JsonError::Field("factors"))?
        .iter()
        .map(|f| {
            let f = f.as_object().ok_or(JsonError::Field("factors"))?;
            Ok(GammaFactor::new(
                read_rat(field(f, "lambda")?, "lambda")?,
                read_gauss(field(f, "mu")?, "mu")?,
            ))
        })
        .collect::<Result<Vec<_>, JsonError>>()?;
    let gamma = GammaData::new(omega, q, factors).map_err(|e| JsonError::Invalid(e.to_string()))?;
    let kappa = field(o, "kappa")?
        .as_object()
        .ok_or(JsonError::Field("kappa"))?;
    let negative = field(kappa, "negative")?
        .as_bool()
        .ok_or(JsonError::Field("negative"))?;
    let rational = RationalFactor::new(
        negative,
        read_power_product(field(kappa, "value")?, "kappa")?,
        read_gauss_list(field(o, "roots")?, "roots")?,
        read_gauss_list(field(o, "poles")?, "poles")?,
    );
    Ok(DecoratedGamma::new(rational, gamma))
}
