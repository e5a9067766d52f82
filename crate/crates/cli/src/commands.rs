use extpow::extrep::{
    cauchy_binet, evaluate_word, exterior_torus, exterior_transvection, exterior_transvection_factors, ElementaryWord,
    WordFactor,
};
use extpow::liealg::{lie_report, LieMode};
use extpow::normalizer::normalizer_equalities_demo;
use extpow::verify::{verify as run_verify, VerifyKind};
use extpow::{Error, Matrix, RepMatrix, Result, Ring, RingElem};
use serde_json::{json, Value};

use crate::{Kind, LiedimArgs, Mode, NormalizerArgs, RepArgs, VerifyArgs, EXIT_FAIL, EXIT_INDETERMINATE, EXIT_PASS};

fn parse_err(input: &str, reason: &str) -> Error {
    Error::Parse {
        input: input.to_string(),
        reason: reason.to_string(),
    }
}

fn envelope(command: &str, body: Value) -> Value {
    let mut out = json!({"schema": 1, "command": command});
    if let (Some(o), Value::Object(b)) = (out.as_object_mut(), body) {
        o.extend(b);
    }
    out
}

fn exit_code(pass: bool, indeterminate: bool) -> u8 {
    if indeterminate {
        EXIT_INDETERMINATE
    } else if pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [i, j] => Ok((
            i.parse().map_err(|_| parse_err(s, "expected an index"))?,
            j.parse().map_err(|_| parse_err(s, "expected an index"))?,
        )),
        _ => Err(parse_err(s, "expected `i,j`")),
    }
}

/// `xi` as given, or the variable of `R[xi]`.
fn xi_ring(base: &Ring, xi: Option<&str>) -> Result<(Ring, RingElem)> {
    match xi {
        Some(s) => Ok((base.clone(), base.parse_elem(s)?)),
        None => {
            let r = Ring::polynomial(base.clone(), ["xi"])?;
            let x = r.var("xi")?;
            Ok((r, x))
        }
    }
}

fn parse_word(s: &str, ring: &Ring) -> Result<ElementaryWord> {
    let mut factors = Vec::new();
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let fields: Vec<&str> = part.splitn(3, ',').map(str::trim).collect();
        let [i, j, x] = fields.as_slice() else {
            return Err(parse_err(part, "expected `i,j,x`"));
        };
        factors.push(WordFactor {
            i: i.parse().map_err(|_| parse_err(part, "expected an index"))?,
            j: j.parse().map_err(|_| parse_err(part, "expected an index"))?,
            xi: ring.parse_elem(x)?,
        });
    }
    ElementaryWord::new(ring, factors)
}

fn parse_matrix(s: &str, n: usize, ring: &Ring) -> Result<Matrix> {
    let v: Value = serde_json::from_str(s).map_err(|e| parse_err(s, &e.to_string()))?;
    let rows = v.as_array().ok_or_else(|| parse_err(s, "expected an array of rows"))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row.as_array().ok_or_else(|| parse_err(s, "row is not an array"))?;
        let elems = row
            .iter()
            .map(|x| match x {
                Value::String(t) => ring.parse_elem(t),
                Value::Number(k) => ring.parse_elem(&k.to_string()),
                _ => Err(parse_err(s, "entry is neither a string nor a number")),
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(elems);
    }
    let g = Matrix::from_rows(ring, out)?;
    if g.nrows() != n || g.ncols() != n {
        return Err(Error::DimensionMismatch(format!("expected a {n}x{n} matrix")));
    }
    Ok(g)
}

pub fn rep(a: &RepArgs) -> Result<(Value, u8)> {
    let body = if let Some(t) = &a.transvection {
        let (i, j) = parse_pair(t)?;
        let (ring, xi) = xi_ring(&a.ring, a.xi.as_deref())?;
        let factors: Vec<Value> = exterior_transvection_factors(a.n, a.m, i, j, &xi, &ring)?
            .iter()
            .map(|f| json!({"row": f.row.label(), "col": f.col.label(), "coeff": ring.format_elem(&f.coeff)}))
            .collect();
        let g = exterior_transvection(a.n, a.m, i, j, &xi, &ring)?;
        json!({"element": {"transvection": [i, j], "xi": ring.format_elem(&xi)}, "factors": factors, "matrix": g.to_json()})
    } else if let Some(i) = a.torus {
        let (ring, xi) = xi_ring(&a.ring, a.xi.as_deref())?;
        let g = exterior_torus(a.n, a.m, i, &xi, &ring)?;
        let diagonal: Vec<String> = g.diagonal().iter().map(|x| ring.format_elem(x)).collect();
        json!({"element": {"torus": i, "xi": ring.format_elem(&xi)}, "diagonal": diagonal, "matrix": g.to_json()})
    } else if let Some(w) = &a.word {
        let word = parse_word(w, &a.ring)?;
        let g = evaluate_word(&word, a.n, a.m)?;
        json!({"element": {"word": w}, "matrix": g.to_json()})
    } else if let Some(s) = &a.matrix {
        let g = if s.trim() == "identity" {
            RepMatrix::identity(a.n, a.m, &a.ring)?
        } else {
            cauchy_binet(&parse_matrix(s, a.n, &a.ring)?, a.m)?
        };
        json!({"element": {"matrix": s}, "matrix": g.to_json()})
    } else {
        return Err(Error::InvalidParameters("no element given".into()));
    };
    Ok((envelope("rep", body), EXIT_PASS))
}

pub fn verify(a: &VerifyArgs) -> Result<(Value, u8)> {
    let kind = match a.kind {
        Kind::Plucker => VerifyKind::Plucker,
        Kind::Form => VerifyKind::Form,
        Kind::Ideal => VerifyKind::Ideal,
    };
    let report = run_verify(kind, a.n, a.m, &a.ring, a.samples, a.seed)?;
    let code = exit_code(report.pass(), report.indeterminate());
    Ok((envelope("verify", report.to_json()), code))
}

pub fn liedim(a: &LiedimArgs) -> Result<(Value, u8)> {
    let mode = match a.mode {
        Mode::Plain => LieMode::Plain,
        Mode::Extended => LieMode::Extended,
        Mode::Ideal => LieMode::Ideal,
        Mode::Plucker => LieMode::Plucker,
    };
    let report = lie_report(a.n, a.m, &a.field, mode)?;
    let code = exit_code(report.pass, false);
    Ok((envelope("liedim", report.to_json()), code))
}

pub fn normalizer(a: &NormalizerArgs) -> Result<(Value, u8)> {
    let report = normalizer_equalities_demo(a.n, a.m, &a.ring, a.samples, a.seed)?;
    let code = exit_code(report.consistent(), report.indeterminate());
    Ok((envelope("normalizer", report.to_json()), code))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(true, false), EXIT_PASS);
        assert_eq!(exit_code(false, false), EXIT_FAIL);
        assert_eq!(exit_code(true, true), EXIT_INDETERMINATE);
        assert_eq!(exit_code(false, true), EXIT_INDETERMINATE);
    }

    #[test]
    fn word_and_pair_parsing() {
        let r = Ring::modular(7).unwrap();
        assert_eq!(parse_word("1,2,3; 2,3,-1", &r).unwrap().len(), 2);
        assert!(parse_word("1,2", &r).is_err());
        assert_eq!(parse_pair(" 2 , 5").unwrap(), (2, 5));
        assert!(parse_pair("2").is_err());
        assert!(parse_matrix("[[1,0],[0,1]]", 3, &r).is_err());
    }
}
