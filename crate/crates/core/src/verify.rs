//! Sampled checks of the three stabilizer characterizations.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::combinat::Subset;
use crate::error::{Error, Result};
use crate::extrep::{cauchy_binet, evaluate_word, random_word, RepMatrix};
use crate::forms::{
    decompose_ideal_f, form_polarized, preserves_ideal_f, semi_invariance, stabilizes_plucker, SemiInvariance, Truth,
};
use crate::ring::Ring;
use crate::sample::{random_gl, rng};

/// Length of the random elementary words.
pub const WORD_LENGTH: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyKind {
    /// Elementary words preserve the Plücker ideal.
    Plucker,
    /// `f(∧^m h x) = det(h) f(x)`.
    Form,
    /// `∧^m h` maps the generators of `F` into `F` with unit scalars.
    Ideal,
}

impl VerifyKind {
    pub fn name(self) -> &'static str {
        match self {
            VerifyKind::Plucker => "plucker",
            VerifyKind::Form => "form",
            VerifyKind::Ideal => "ideal",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifySample {
    pub index: usize,
    pub result: Truth,
    pub detail: Value,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub kind: VerifyKind,
    pub n: usize,
    pub m: usize,
    pub ring: Ring,
    pub seed: u64,
    pub samples: Vec<VerifySample>,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.samples.iter().all(|s| s.result == Truth::True)
    }

    pub fn indeterminate(&self) -> bool {
        self.samples.iter().any(|s| s.result == Truth::Indeterminate)
    }

    pub fn passed(&self) -> usize {
        self.samples.iter().filter(|s| s.result == Truth::True).count()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind.name(),
            "params": {"n": self.n, "m": self.m, "ring": self.ring.to_string(), "seed": self.seed},
            "samples": self.samples.iter().map(|s| json!({"index": s.index, "result": s.result, "detail": s.detail})).collect::<Vec<_>>(),
            "passed": self.passed(),
            "pass": self.pass(),
        })
    }
}

fn plucker_sample(n: usize, m: usize, ring: &Ring, seed: u64) -> Result<(Truth, Value)> {
    let word = random_word(n, WORD_LENGTH, ring, seed)?;
    let g = evaluate_word(&word, n, m)?;
    let check = stabilizes_plucker(&g)?;
    let pairs: Vec<[usize; 2]> = word.factors().iter().map(|f| [f.i, f.j]).collect();
    Ok((
        check.result,
        json!({"word": pairs, "failing_generator": check.failing_generator}),
    ))
}

fn form_sample(g: &RepMatrix, det: &crate::RingElem) -> Result<(Truth, Value)> {
    let r = g.ring();
    let f = form_polarized(&Subset::full(g.n())?, g.m(), &Ring::integers())?;
    let out = match semi_invariance(g, &f) {
        Ok(SemiInvariance::Scalar(l)) | Ok(SemiInvariance::NonUnit(l)) => (
            Truth::from(l == *det),
            json!({"lambda": r.format_elem(&l), "det": r.format_elem(det)}),
        ),
        Ok(SemiInvariance::Absent(_)) => (Truth::False, json!({"lambda": null, "det": r.format_elem(det)})),
        Err(Error::Indeterminate { .. }) => (Truth::Indeterminate, json!({"det": r.format_elem(det)})),
        Err(e) => return Err(e),
    };
    Ok(out)
}

fn ideal_sample(g: &RepMatrix) -> Result<(Truth, Value)> {
    let r = g.ring();
    let Some(w) = decompose_ideal_f(g)? else {
        return Ok((Truth::False, json!({"decomposition": null})));
    };
    let units = w.lambdas.values().all(|l| r.is_unit(l));
    let preserves = preserves_ideal_f(g)?;
    Ok((
        Truth::from(units),
        json!({"witness": w.to_json(r), "unit_lambdas": units, "coefficient_matrix_invertible": preserves}),
    ))
}

/// Run `samples` checks of the given kind. Plücker samples are elementary
/// words of length [`WORD_LENGTH`]; form and ideal samples are images
/// `∧^m h` of random `h ∈ GL_n`.
pub fn verify(kind: VerifyKind, n: usize, m: usize, ring: &Ring, samples: usize, seed: u64) -> Result<VerifyReport> {
    match kind {
        VerifyKind::Plucker => {
            if m == 0 || m > n {
                return Err(Error::params(format!("need 1 <= m <= n, got n = {n}, m = {m}")));
            }
        }
        VerifyKind::Form => {
            if m == 0 || !n.is_multiple_of(m) || n / m < 3 {
                return Err(Error::params(format!(
                    "need n / m an integer >= 3, got n = {n}, m = {m}"
                )));
            }
        }
        VerifyKind::Ideal => {
            if m == 0 || n.is_multiple_of(m) || n / m < 2 {
                return Err(Error::params(format!(
                    "need m not dividing n and n / m >= 2, got n = {n}, m = {m}"
                )));
            }
        }
    }
    let results: Vec<Result<(Truth, Value)>> = match kind {
        VerifyKind::Plucker => (0..samples)
            .into_par_iter()
            .map(|s| plucker_sample(n, m, ring, seed.wrapping_add(s as u64)))
            .collect(),
        VerifyKind::Form | VerifyKind::Ideal => {
            let mut rg = rng(seed);
            let hs: Vec<_> = (0..samples).map(|_| random_gl(n, ring, &mut rg)).collect();
            hs.into_par_iter()
                .map(|h| {
                    let g = cauchy_binet(&h, m)?;
                    match kind {
                        VerifyKind::Form => form_sample(&g, &h.det()?),
                        _ => ideal_sample(&g),
                    }
                })
                .collect()
        }
    };
    let samples = results
        .into_iter()
        .enumerate()
        .map(|(index, r)| r.map(|(result, detail)| VerifySample { index, result, detail }))
        .collect::<Result<_>>()?;
    Ok(VerifyReport {
        kind,
        n,
        m,
        ring: ring.clone(),
        seed,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plucker_and_form_pass() {
        let r = verify(VerifyKind::Plucker, 5, 2, &Ring::rationals(), 4, 1).unwrap();
        assert!(r.pass());
        let r = verify(VerifyKind::Form, 6, 2, &Ring::modular(5).unwrap(), 4, 1).unwrap();
        assert!(r.pass(), "{}", r.to_json());
        assert_eq!(r.samples.len(), 4);
    }

    #[test]
    fn ideal_reports_decomposition() {
        let r = verify(VerifyKind::Ideal, 7, 2, &Ring::modular(5).unwrap(), 3, 2).unwrap();
        for s in &r.samples {
            assert_eq!(s.detail["coefficient_matrix_invertible"], true);
        }
    }

    #[test]
    fn parameters_checked() {
        let q = Ring::rationals();
        assert!(verify(VerifyKind::Form, 6, 4, &q, 1, 0).is_err());
        assert!(verify(VerifyKind::Ideal, 6, 2, &q, 1, 0).is_err());
        assert!(verify(VerifyKind::Plucker, 2, 3, &q, 1, 0).is_err());
        assert!(verify(VerifyKind::Form, 6, 2, &q, 0, 0).unwrap().pass());
    }

    #[test]
    fn deterministic() {
        let r = Ring::modular(7).unwrap();
        let a = verify(VerifyKind::Plucker, 5, 2, &r, 3, 9).unwrap().to_json();
        let b = verify(VerifyKind::Plucker, 5, 2, &r, 3, 9).unwrap().to_json();
        assert_eq!(a.to_string(), b.to_string());
    }
}
