//! Parent-Hamiltonian export: evaluates both coupling routes (printed closed
//! forms and the numeric Pauli expansion), reports the per-coupling deltas,
//! and attaches the frustration-free residual of the embedded operator.

use ladder_mps::{
    build_state, coupling_formulas, embed_global, hamiltonian_residual, local_h, multiplet_basis,
    pauli_expand, CouplingSet, LadderMps, Sign, WeightSet,
};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::{envelope, CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HamiltonianInput {
    pub a: f64,
    pub g: f64,
    pub epsilon: f64,
    pub sigma: f64,
    pub weights: WeightSet,
}

fn couplings_json(c: &CouplingSet) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (key, value) in CouplingSet::KEYS.iter().zip(c.j) {
        map.insert((*key).into(), json!(value));
    }
    serde_json::Value::Object(map)
}

pub fn cmd_hamiltonian(input: &HamiltonianInput) -> CliResult<serde_json::Value> {
    let epsilon = Sign::try_from_f64(input.epsilon)?;
    let sigma = Sign::try_from_f64(input.sigma)?;
    input.weights.validate()?;

    let basis = multiplet_basis(input.a, input.g, epsilon, sigma)?;
    let lh = local_h(&basis, &input.weights)?;
    let expansion = pauli_expand(&lh.h)?;
    let printed = coupling_formulas(input.a, input.g, epsilon, sigma, &input.weights);

    let mut deltas = serde_json::Map::new();
    for (idx, key) in CouplingSet::KEYS.iter().enumerate() {
        deltas.insert(
            (*key).into(),
            json!(printed.j[idx] - expansion.couplings.j[idx]),
        );
    }

    let mps = LadderMps::class_a(input.a, input.g, epsilon, sigma)?;
    let h4 = embed_global(&lh.h, 4)?;
    let psi = build_state(&mps, 4)?;
    let ff_residual = hamiltonian_residual(&h4, &psi)?;

    let basis_json: Vec<serde_json::Value> = lh
        .basis
        .vectors()
        .iter()
        .map(|(label, v)| {
            json!({
                "label": label.to_string(),
                "vector": v.iter().copied().collect::<Vec<f64>>(),
            })
        })
        .collect();

    Ok(envelope(
        "hamiltonian",
        input,
        &json!({
            "couplings": {
                "formulas": {
                    "method": "formulas",
                    "params": {"a": input.a, "g": input.g, "epsilon": input.epsilon, "sigma": input.sigma},
                    "weights": input.weights,
                    "values": couplings_json(&printed),
                },
                "pauli_expand": {
                    "method": "pauli_expand",
                    "params": {"a": input.a, "g": input.g, "epsilon": input.epsilon, "sigma": input.sigma},
                    "weights": input.weights,
                    "values": couplings_json(&expansion.couplings),
                },
                "deltas": serde_json::Value::Object(deltas),
            },
            "structure_residual": expansion.residual,
            "outside_structure": expansion
                .outside
                .iter()
                .map(|(s, c)| json!({"pauli": s, "coefficient": c}))
                .collect::<Vec<_>>(),
            "local_term_min_eigenvalue": lh.min_eigenvalue()?,
            "frustration_free_residual_n4": ff_residual,
            "basis": basis_json,
        }),
    ))
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotational_limit_export() {
        let input = HamiltonianInput {
            a: 0.5,
            g: -1.0,
            epsilon: -1.0,
            sigma: -1.0,
            weights: WeightSet::rotational(1.0, 1.0, 1.0, 1.0),
        };
        let doc = cmd_hamiltonian(&input).unwrap();
        let values = &doc["results"]["couplings"]["pauli_expand"]["values"];
        assert!((values["J2"].as_f64().unwrap() - 5.0).abs() <= 1e-9);
        for key in ["J1", "J8", "J9", "J10", "J11", "J12", "J13"] {
            assert!(values[key].as_f64().unwrap().abs() <= 1e-10, "{key}");
        }
        assert!(doc["results"]["structure_residual"].as_f64().unwrap() <= 1e-10);
        assert!(doc["results"]["frustration_free_residual_n4"].as_f64().unwrap() <= 1e-9);
        // the printed J0 line deviates from the numeric expansion; the delta
        // column records it
        let d0 = doc["results"]["couplings"]["deltas"]["J0"].as_f64().unwrap();
        assert!(d0.abs() > 1.0);
    }

    #[test]
    fn zero_weights_export() {
        let input = HamiltonianInput {
            a: 1.0,
            g: 0.5,
            epsilon: 1.0,
            sigma: 1.0,
            weights: WeightSet::zeros(),
        };
        let doc = cmd_hamiltonian(&input).unwrap();
        let values = &doc["results"]["couplings"]["pauli_expand"]["values"];
        for key in CouplingSet::KEYS {
            assert_eq!(values[key].as_f64().unwrap(), 0.0, "{key}");
        }
        assert_eq!(
            doc["results"]["frustration_free_residual_n4"].as_f64().unwrap(),
            0.0
        );
    }

    #[test]
    fn negative_weight_is_a_semantic_failure() {
        let mut weights = WeightSet::uniform(0.5);
        weights.mu_00 = -0.1;
        let input = HamiltonianInput {
            a: 1.0,
            g: 0.5,
            epsilon: 1.0,
            sigma: 1.0,
            weights,
        };
        let err = cmd_hamiltonian(&input).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
