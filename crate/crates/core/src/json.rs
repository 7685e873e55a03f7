//! The JSON wire format: matrices tagged by field, decompositions, block
//! representations, certificates, and the report types. Deserialization
//! re-validates every structural invariant, so a parsed value is as good as
//! a constructed one; a field-tag mismatch is rejected at construction.

use std::collections::BTreeMap;

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::decomp::{BlockRep, Decomposition};
use crate::factorize::{Certificate, ConsistencyReport, Recipe, Residuals, VerificationReport};
use crate::field::{FieldTag, Gf, Rat, Scalar};
use crate::idempotent::{AnnihilatorReport, IdempotentClass};
use crate::matrix::Matrix;
use crate::opcheck::{MembershipReport, OpKind, StructuredOperator, Tail, WeightRule};

impl<F: Scalar> Matrix<F> {
    pub fn to_json_value(&self) -> Value {
        let rows: Vec<Value> = (0..self.rows())
            .map(|r| Value::Array(self.row(r).iter().map(Scalar::entry_to_json).collect()))
            .collect();
        json!({ "field": F::FIELD.as_str(), "rows": rows })
    }

    pub fn from_json_value(v: &Value) -> Result<Self, String> {
        let obj = v.as_object().ok_or("matrix must be a JSON object")?;
        let tag = obj
            .get("field")
            .and_then(Value::as_str)
            .ok_or("matrix needs a \"field\" tag")?;
        let tag = FieldTag::from_name(tag).ok_or_else(|| format!("unknown field {tag:?}"))?;
        if tag != F::FIELD {
            return Err(format!("field mismatch: expected {}, got {tag}", F::FIELD));
        }
        let rows = obj
            .get("rows")
            .and_then(Value::as_array)
            .ok_or("matrix needs a \"rows\" array")?;
        if rows.is_empty() {
            return Err("matrix needs at least one row".into());
        }
        let mut parsed: Vec<Vec<F>> = Vec::with_capacity(rows.len());
        let mut cols = None;
        for (i, row) in rows.iter().enumerate() {
            let row = row
                .as_array()
                .ok_or_else(|| format!("row {i} must be an array"))?;
            match cols {
                None => cols = Some(row.len()),
                Some(c) if c != row.len() => {
                    return Err(format!("row {i} has {} entries, expected {c}", row.len()))
                }
                _ => {}
            }
            parsed.push(
                row.iter()
                    .map(F::entry_from_json)
                    .collect::<Result<Vec<F>, String>>()?,
            );
        }
        if cols == Some(0) {
            return Err("matrix needs at least one column".into());
        }
        Ok(Matrix::from_rows(parsed))
    }
}

impl<F: Scalar> Serialize for Matrix<F> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

impl<'de, F: Scalar> Deserialize<'de> for Matrix<F> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        Matrix::from_json_value(&v).map_err(D::Error::custom)
    }
}

/// A matrix over whichever field the input declares; the CLI dispatches on
/// this and stays fully typed downstream.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Q(Matrix<Rat>),
    F64(Matrix<f64>),
    Gf2(Matrix<Gf<2>>),
    Gf3(Matrix<Gf<3>>),
    Gf5(Matrix<Gf<5>>),
}

impl AnyMatrix {
    pub fn field(&self) -> FieldTag {
        match self {
            AnyMatrix::Q(_) => FieldTag::Q,
            AnyMatrix::F64(_) => FieldTag::F64,
            AnyMatrix::Gf2(_) => FieldTag::Gf2,
            AnyMatrix::Gf3(_) => FieldTag::Gf3,
            AnyMatrix::Gf5(_) => FieldTag::Gf5,
        }
    }

    pub fn from_json_value(v: &Value) -> Result<AnyMatrix, String> {
        let tag = v
            .as_object()
            .and_then(|o| o.get("field"))
            .and_then(Value::as_str)
            .ok_or("matrix needs a \"field\" tag")?;
        match FieldTag::from_name(tag) {
            Some(FieldTag::Q) => Matrix::from_json_value(v).map(AnyMatrix::Q),
            Some(FieldTag::F64) => Matrix::from_json_value(v).map(AnyMatrix::F64),
            Some(FieldTag::Gf2) => Matrix::from_json_value(v).map(AnyMatrix::Gf2),
            Some(FieldTag::Gf3) => Matrix::from_json_value(v).map(AnyMatrix::Gf3),
            Some(FieldTag::Gf5) => Matrix::from_json_value(v).map(AnyMatrix::Gf5),
            None => Err(format!("unknown field {tag:?}")),
        }
    }

    pub fn to_json_value(&self) -> Value {
        match self {
            AnyMatrix::Q(m) => m.to_json_value(),
            AnyMatrix::F64(m) => m.to_json_value(),
            AnyMatrix::Gf2(m) => m.to_json_value(),
            AnyMatrix::Gf3(m) => m.to_json_value(),
            AnyMatrix::Gf5(m) => m.to_json_value(),
        }
    }
}

pub fn decomposition_to_value<F: Scalar>(d: &Decomposition<F>) -> Value {
    json!({
        "K_basis": d.k_basis().to_json_value(),
        "L_basis": d.l_basis().to_json_value(),
    })
}

pub fn decomposition_from_value<F: Scalar>(v: &Value) -> Result<Decomposition<F>, String> {
    let obj = v.as_object().ok_or("decomposition must be a JSON object")?;
    let k = Matrix::from_json_value(obj.get("K_basis").ok_or("missing K_basis")?)?;
    let l = Matrix::from_json_value(obj.get("L_basis").ok_or("missing L_basis")?)?;
    Decomposition::new(k, l).map_err(|e| e.to_string())
}

pub fn block_rep_to_value<F: Scalar>(b: &BlockRep<F>) -> Value {
    json!({
        "decomposition": decomposition_to_value(b.decomposition()),
        "T1": b.t1().to_json_value(),
        "T2": b.t2().to_json_value(),
        "T3": b.t3().to_json_value(),
        "T4": b.t4().to_json_value(),
        "local": b.is_local(),
    })
}

pub fn block_rep_from_value<F: Scalar>(v: &Value) -> Result<BlockRep<F>, String> {
    let obj = v.as_object().ok_or("block rep must be a JSON object")?;
    let d = decomposition_from_value(obj.get("decomposition").ok_or("missing decomposition")?)?;
    let t = |name: &str| -> Result<Matrix<F>, String> {
        Matrix::from_json_value(obj.get(name).ok_or_else(|| format!("missing {name}"))?)
    };
    let rep = BlockRep::from_blocks(d, t("T1")?, t("T2")?, t("T3")?, t("T4")?)
        .map_err(|e| e.to_string())?;
    let claimed_local = obj.get("local").and_then(Value::as_bool).unwrap_or(false);
    if claimed_local && !rep.is_local() {
        return Err("block rep flagged local but T3 or T4 is non-zero".into());
    }
    Ok(rep)
}

pub fn certificate_to_value<F: Scalar>(c: &Certificate<F>) -> Value {
    let params: Map<String, Value> = c
        .parameters
        .iter()
        .map(|(k, m)| (k.clone(), m.to_json_value()))
        .collect();
    json!({
        "target": c.target.to_json_value(),
        "decomposition": c.decomposition.as_ref().map(decomposition_to_value),
        "factors": c.factors.iter().map(Matrix::to_json_value).collect::<Vec<_>>(),
        "recipe": c.recipe.as_str(),
        "parameters": params,
        "residuals": {
            "factor_idempotency": c.residuals.factor_idempotency,
            "product": c.residuals.product,
        },
        "index_upper_bound": c.index_upper_bound,
    })
}

pub fn certificate_from_value<F: Scalar>(v: &Value) -> Result<Certificate<F>, String> {
    let obj = v.as_object().ok_or("certificate must be a JSON object")?;
    let target = Matrix::from_json_value(obj.get("target").ok_or("missing target")?)?;
    let decomposition = match obj.get("decomposition") {
        None | Some(Value::Null) => None,
        Some(d) => Some(decomposition_from_value(d)?),
    };
    let factors = obj
        .get("factors")
        .and_then(Value::as_array)
        .ok_or("missing factors")?
        .iter()
        .map(Matrix::from_json_value)
        .collect::<Result<Vec<_>, String>>()?;
    let recipe = obj
        .get("recipe")
        .and_then(Value::as_str)
        .and_then(Recipe::from_name)
        .ok_or("missing or unknown recipe")?;
    let parameters = match obj.get("parameters") {
        None | Some(Value::Null) => BTreeMap::new(),
        Some(p) => p
            .as_object()
            .ok_or("parameters must be an object")?
            .iter()
            .map(|(k, m)| Matrix::from_json_value(m).map(|m| (k.clone(), m)))
            .collect::<Result<BTreeMap<_, _>, String>>()?,
    };
    let residuals = obj.get("residuals").and_then(Value::as_object);
    let factor_idempotency = residuals
        .and_then(|r| r.get("factor_idempotency"))
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(Value::as_f64).collect())
        .unwrap_or_default();
    let product = residuals
        .and_then(|r| r.get("product"))
        .and_then(Value::as_f64)
        .unwrap_or(f64::NAN);
    let index_upper_bound = obj
        .get("index_upper_bound")
        .and_then(Value::as_u64)
        .map(|v| v as usize)
        .unwrap_or(factors.len());
    Ok(Certificate {
        target,
        decomposition,
        factors,
        recipe,
        parameters,
        residuals: Residuals {
            factor_idempotency,
            product,
        },
        index_upper_bound,
    })
}

pub fn verification_report_to_value(r: &VerificationReport) -> Value {
    json!({
        "pass": r.pass,
        "factor_idempotency": r.factor_idempotency,
        "product": r.product,
        "failures": r.failures,
    })
}

pub fn annihilator_report_to_value<F: Scalar>(r: &AnnihilatorReport<F>) -> Value {
    json!({
        "verdict": r.verdict.as_str(),
        "left_witness": r.left_witness.as_ref().map(Matrix::to_json_value),
        "right_witness": r.right_witness.as_ref().map(Matrix::to_json_value),
    })
}

pub fn idempotent_class_to_value<F: Scalar>(c: &IdempotentClass<F>) -> Value {
    json!({
        "primary": c.primary.as_str(),
        "tags": c.tags.iter().map(|t| t.as_str()).collect::<Vec<_>>(),
        "range_k_witness": c.range_k_witness.as_ref().map(Matrix::to_json_value),
        "range_l_witness": c.range_l_witness.as_ref().map(Matrix::to_json_value),
    })
}

pub fn consistency_report_to_value(r: &ConsistencyReport) -> Value {
    json!({
        "k_dim": r.k_dim,
        "l_dim": r.l_dim,
        "equations": {
            "residuals": r.eq_residuals,
            "primed_residuals": r.eq_primed_residuals,
        },
        "systems": {
            "C1": r.set_c1,
            "C2": r.set_c2,
            "C3a": r.set_c3a,
            "C3b": r.set_c3b,
            "C4a": r.set_c4a,
            "C4b": r.set_c4b,
            "replacement_sets": r.replacement_sets,
        },
        "conditions": {
            "c1": r.cond_c1,
            "c2": r.cond_c2,
            "c3": r.cond_c3,
            "c3_specialized": r.cond_c3_specialized,
            "c5": r.cond_c5,
        },
    })
}

pub fn membership_report_to_value(r: &MembershipReport) -> Value {
    json!({
        "left_annihilator": r.left_annihilator,
        "right_annihilator": r.right_annihilator,
        "in_F_possible": r.in_f_possible,
        "regular": match r.regular {
            Some(b) => json!(b),
            None => json!("unknown"),
        },
        "left_witness": r.left_witness,
        "right_witness": r.right_witness,
    })
}

pub fn structured_operator_to_value(op: &StructuredOperator) -> Value {
    let exceptional: Map<String, Value> = op
        .weights
        .exceptional()
        .iter()
        .map(|(j, w)| (j.to_string(), Value::String(w.to_string())))
        .collect();
    let tail = tail_to_value(op.weights.tail());
    json!({
        "kind": op.kind.as_str(),
        "exceptional": exceptional,
        "tail": tail,
    })
}

fn tail_to_value(tail: &Tail) -> Value {
    match tail.power() {
        0 => json!({ "constant": tail.coeff().to_string() }),
        1 if tail.coeff() == &<Rat as Scalar>::one() => json!("harmonic"),
        _ => json!({ "power": { "coeff": tail.coeff().to_string(), "exponent": tail.power() } }),
    }
}

pub fn structured_operator_from_value(v: &Value) -> Result<StructuredOperator, String> {
    let obj = v.as_object().ok_or("operator must be a JSON object")?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .and_then(OpKind::from_name)
        .ok_or("operator needs a \"kind\" of right-shift | left-shift | diagonal")?;
    let mut exceptional = BTreeMap::new();
    if let Some(exc) = obj.get("exceptional") {
        let exc = exc.as_object().ok_or("exceptional must be an object")?;
        for (j, w) in exc {
            let j: u64 = j.parse().map_err(|_| format!("bad index {j:?}"))?;
            if j == 0 {
                return Err("weight indices are 1-based".into());
            }
            let w = match w {
                Value::String(s) => crate::field::parse_rat(s)?,
                Value::Number(n) => n
                    .as_i64()
                    .map(<Rat as Scalar>::from_i64)
                    .ok_or_else(|| format!("bad weight {n}"))?,
                other => return Err(format!("bad weight {other}")),
            };
            exceptional.insert(j, w);
        }
    }
    let tail = match obj.get("tail") {
        None => Tail::constant(<Rat as Scalar>::one()),
        Some(Value::String(s)) if s == "harmonic" => Tail::harmonic(),
        Some(Value::Object(o)) if o.contains_key("constant") => {
            let c = match &o["constant"] {
                Value::String(s) => crate::field::parse_rat(s)?,
                Value::Number(n) => n
                    .as_i64()
                    .map(<Rat as Scalar>::from_i64)
                    .ok_or_else(|| format!("bad constant {n}"))?,
                other => return Err(format!("bad constant {other}")),
            };
            Tail::constant(c)
        }
        Some(other) => return Err(format!("bad tail {other}")),
    };
    Ok(StructuredOperator {
        kind,
        weights: WeightRule::new(exceptional, tail),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomp::local_block_rep;
    use crate::factorize::{auto_factor, verify_certificate};
    use crate::field::rat;

    fn mq(rows: usize, cols: usize, vals: &[i64]) -> Matrix<Rat> {
        Matrix::from_ints(rows, cols, vals)
    }

    #[test]
    fn matrix_json_round_trip_rational() {
        let m = Matrix::from_rows(vec![
            vec![rat(1, 2), rat(-3, 1)],
            vec![rat(0, 1), rat(22, 7)],
        ]);
        let v = m.to_json_value();
        assert_eq!(v["field"], "Q");
        assert_eq!(v["rows"][0][0], "1/2");
        assert_eq!(Matrix::<Rat>::from_json_value(&v).unwrap(), m);
    }

    #[test]
    fn matrix_json_rejects_field_mixing() {
        let m = Matrix::<Gf<2>>::identity(2);
        let v = m.to_json_value();
        assert!(Matrix::<Rat>::from_json_value(&v).is_err());
        assert!(Matrix::<Gf<3>>::from_json_value(&v).is_err());
    }

    #[test]
    fn matrix_json_rejects_out_of_range_gf_entries() {
        let v = json!({ "field": "GF3", "rows": [[0, 3]] });
        assert!(Matrix::<Gf<3>>::from_json_value(&v).is_err());
    }

    #[test]
    fn any_matrix_dispatches_on_tag() {
        let v = json!({ "field": "GF5", "rows": [[1, 4], [0, 2]] });
        match AnyMatrix::from_json_value(&v).unwrap() {
            AnyMatrix::Gf5(m) => assert_eq!(m[(0, 1)], Gf::<5>::new(4)),
            other => panic!("wrong dispatch: {other:?}"),
        }
    }

    #[test]
    fn serde_trait_impls_work() {
        let m = mq(2, 2, &[1, 2, 3, 4]);
        let s = serde_json::to_string(&m).unwrap();
        let back: Matrix<Rat> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn block_rep_round_trip_and_validation() {
        let t = mq(2, 2, &[1, 1, 1, 1]);
        let b = local_block_rep(&t).unwrap();
        let v = block_rep_to_value(&b);
        let back: BlockRep<Rat> = block_rep_from_value(&v).unwrap();
        assert_eq!(back.assemble(), t);
        assert!(back.is_local());

        // Tampered local flag with non-zero bottom blocks is rejected.
        let mut forged = v.clone();
        forged["T3"] = mq(1, 1, &[1]).to_json_value();
        assert!(block_rep_from_value::<Rat>(&forged).is_err());
    }

    #[test]
    fn certificate_round_trip_re_verifies() {
        let cert = auto_factor(&mq(2, 2, &[5, 0, 0, 0]), 0, 1e-9).unwrap();
        let v = certificate_to_value(&cert);
        let back: Certificate<Rat> = certificate_from_value(&v).unwrap();
        assert!(verify_certificate(&back, 1e-9).pass);
        assert_eq!(back.recipe, cert.recipe);
        assert_eq!(back.factors, cert.factors);
    }

    #[test]
    fn structured_operator_round_trip() {
        let v = json!({
            "kind": "diagonal",
            "exceptional": { "3": "0", "5": "7/2" },
            "tail": "harmonic",
        });
        let op = structured_operator_from_value(&v).unwrap();
        assert_eq!(op.weights.weight(3), rat(0, 1));
        assert_eq!(op.weights.weight(5), rat(7, 2));
        assert_eq!(op.weights.weight(4), rat(1, 4));
        let back = structured_operator_from_value(&structured_operator_to_value(&op)).unwrap();
        assert_eq!(back, op);
    }

    #[test]
    fn decomposition_json_validates_invertibility() {
        let v = json!({
            "K_basis": mq(2, 1, &[1, 1]).to_json_value(),
            "L_basis": mq(2, 1, &[2, 2]).to_json_value(),
        });
        assert!(decomposition_from_value::<Rat>(&v).is_err());
    }
}
