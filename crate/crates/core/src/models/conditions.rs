//! Scale hypotheses of the limit and reconstruction results, evaluated with
//! the constants of a concrete model so experiments can certify their regime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Model, ModelConstants};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub statement: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Condition {
    /// Strict inequality `lhs < rhs`.
    pub fn less(name: &str, statement: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            statement: statement.into(),
            lhs,
            rhs,
            holds: lhs < rhs,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Which result a run claims to exercise; selects the relevant hypotheses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// Colimit over nested samples at fixed scale; no scale hypothesis.
    DirectLimit,
    /// Inverse limit over scales for samples on the model.
    NoiselessInverse,
    /// Inverse limit over (scale, noise) for samples near the model.
    NoisyInverse,
    /// Shadow projection compared against a Hausmann map.
    ProjectionHomotopy,
    /// Finite-scale homotopy equivalences for a closed curve.
    ClosedCurve,
    /// PL curve reconstruction from noisy samples.
    CurveReconstruction,
}

impl Claim {
    pub fn hypotheses(self) -> &'static [&'static str] {
        match self {
            Claim::DirectLimit => &[],
            Claim::NoiselessInverse => &["shadow-in-tube", "noiseless-delta", "noiseless-rho"],
            Claim::NoisyInverse => &["shadow-in-tube", "noise-in-tube", "noisy-delta", "noisy-rho"],
            Claim::ProjectionHomotopy => &["hausmann-delta", "projection-closeness"],
            Claim::ClosedCurve => &["shadow-in-tube", "normal-injectivity", "projection-closeness"],
            Claim::CurveReconstruction => &[
                "shadow-in-tube",
                "normal-injectivity",
                "projection-closeness",
                "noise-in-tube",
                "noisy-curve",
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub beta: f64,
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta: Option<f64>,
    pub constants: ModelConstants,
    pub conditions: Vec<Condition>,
}

impl ConditionReport {
    pub fn get(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn all_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.holds)
    }

    pub fn push(&mut self, c: Condition) {
        self.conditions.push(c);
    }

    /// Keep only the hypotheses of `claim`. A hypothesis the claim needs but
    /// that was not evaluated (e.g. `noisy-curve` without `zeta`) is added as
    /// failing.
    pub fn for_claim(mut self, claim: Claim) -> Self {
        let names = claim.hypotheses();
        let mut kept = Vec::with_capacity(names.len());
        for name in names {
            match self.conditions.iter().position(|c| c.name == *name) {
                Some(i) => kept.push(self.conditions[i].clone()),
                None => kept.push(
                    Condition::less(name, "not evaluated", f64::NAN, f64::NAN)
                        .with_note("required parameter missing"),
                ),
            }
        }
        // NaN comparisons already yield `holds == false`; serialize as zero.
        for c in &mut kept {
            if c.lhs.is_nan() {
                c.lhs = 0.0;
                c.rhs = 0.0;
                c.holds = false;
            }
        }
        self.conditions = kept;
        self
    }
}

/// Evaluate every scale hypothesis at `(beta, tau)` and optionally `zeta`.
pub fn check_scale_conditions(
    model: &Model,
    beta: f64,
    tau: f64,
    zeta: Option<f64>,
) -> Result<ConditionReport> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidInput(format!("scale must be positive, got {beta}")));
    }
    if !(tau >= 0.0) || !tau.is_finite() {
        return Err(Error::InvalidInput(format!("noise must be nonnegative, got {tau}")));
    }
    let k = model.constants()?;
    let eps = |r: f64| k.epsilon(r);
    let mut conditions = vec![
        Condition::less("shadow-in-tube", "beta < tube radius", beta, k.tube_radius)
            .with_note("sufficient: shadow points lie within beta of the model"),
    ];
    let injectivity = match k.eta {
        Some(eta) => Condition::less("normal-injectivity", "3 beta < eta", 3.0 * beta, eta),
        None => Condition::less("normal-injectivity", "3 beta < eta", 3.0 * beta, 0.0)
            .with_note("eta is undefined for this model"),
    };
    conditions.push(injectivity);
    conditions.extend([
        Condition::less(
            "projection-closeness",
            "beta + xi (beta + eps_beta) < rho",
            beta + k.xi * (beta + eps(beta)),
            k.rho,
        ),
        Condition::less("noiseless-delta", "2 beta + eps_beta < delta", 2.0 * beta + eps(beta), k.delta),
        Condition::less(
            "noiseless-rho",
            "xi (2 beta + eps_beta) < rho",
            k.xi * (2.0 * beta + eps(beta)),
            k.rho,
        ),
        Condition::less("hausmann-delta", "beta + eps_beta < delta", beta + eps(beta), k.delta),
        Condition::less(
            "noisy-delta",
            "beta + eps_beta + eps_(beta + tau) < delta",
            beta + eps(beta) + eps(beta + tau),
            k.delta,
        ),
        Condition::less("noisy-rho", "xi (beta + eps_beta) < rho", k.xi * (beta + eps(beta)), k.rho),
        Condition::less("noise-in-tube", "tau < tube radius", tau, k.tube_radius),
    ]);
    if let Some(z) = zeta {
        conditions.push(Condition::less("noisy-curve", "tau + zeta < beta / 2", tau + z, beta / 2.0));
    }
    Ok(ConditionReport { beta, tau, zeta, constants: k, conditions })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ConstantOverrides, ModelSpace, ModelSpec};

    fn circle() -> Model {
        Model::new(ModelSpace::circle(1.0)).unwrap()
    }

    #[test]
    fn injectivity_examples() {
        let r = check_scale_conditions(&circle(), 0.4, 0.0, None).unwrap();
        let c = r.get("normal-injectivity").unwrap();
        assert!(c.holds);
        assert!((c.lhs - 1.2).abs() < 1e-15 && c.rhs == 2.0);
        let r = check_scale_conditions(&circle(), 1.0, 0.0, None).unwrap();
        let c = r.get("normal-injectivity").unwrap();
        assert!(!c.holds && c.lhs == 3.0);
    }

    #[test]
    fn noisy_curve_example() {
        let r = check_scale_conditions(&circle(), 0.2, 0.02, Some(0.05)).unwrap();
        let c = r.get("noisy-curve").unwrap();
        assert!(c.holds);
        assert!((c.lhs - 0.07).abs() < 1e-15 && (c.rhs - 0.1).abs() < 1e-15);
        assert!(r.clone().for_claim(Claim::CurveReconstruction).all_hold());
    }

    #[test]
    fn missing_zeta_fails_reconstruction_claim() {
        let r = check_scale_conditions(&circle(), 0.2, 0.02, None).unwrap();
        let claim = r.for_claim(Claim::CurveReconstruction);
        assert!(!claim.all_hold());
        assert_eq!(claim.failures().next().unwrap().name, "noisy-curve");
    }

    #[test]
    fn overrides_flip_single_conditions() {
        let spec = ModelSpec {
            space: ModelSpace::circle(1.0),
            overrides: ConstantOverrides { rho: Some(0.1), ..Default::default() },
        };
        let m = Model::new(spec).unwrap();
        let r = check_scale_conditions(&m, 0.2, 0.0, None).unwrap();
        assert!(!r.get("noiseless-rho").unwrap().holds);
        assert!(r.get("noiseless-delta").unwrap().holds);
    }

    #[test]
    fn graph_has_no_injectivity_radius() {
        let m = Model::new(ModelSpace::theta_graph()).unwrap();
        let r = check_scale_conditions(&m, 0.1, 0.0, None).unwrap();
        assert!(!r.get("normal-injectivity").unwrap().holds);
        assert!(r.for_claim(Claim::NoiselessInverse).all_hold());
    }
}
