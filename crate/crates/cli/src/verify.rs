//! Per-model verification suite: every closed form and invariant that applies
//! to the given family is evaluated, and the residuals are reported in a
//! machine-readable document.

use ladder_mps::numerics::{self, NULL_SPACE_TOL};
use ladder_mps::{
    build_state, concurrence, constraint_matrix, embed_global, entropy, expectation,
    hamiltonian_residual, intra_rung, local_h, multiplet_basis, one_point, one_point_thermo,
    reduced, rung_density, rung_operator, transfer_matrix, two_point, ConcurrenceMethod,
    DensityMode, Family, Mode, ModelSpec, RungOperatorKind, SymmetryKind,
    WeightSet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::{envelope, CliResult};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// Raw outcome of the check.
    pub passed: bool,
    /// True when the model is known not to have this property (the check is
    /// then in good standing exactly when it fails).
    pub expected_fail: bool,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: &str, residual: f64, tolerance: f64) -> CheckResult {
        CheckResult {
            name: name.into(),
            passed: residual <= tolerance,
            expected_fail: false,
            residual: Some(residual),
            tolerance: Some(tolerance),
            detail: None,
        }
    }

    fn expect_fail(mut self) -> CheckResult {
        self.expected_fail = true;
        self
    }

    fn with_detail(mut self, detail: String) -> CheckResult {
        self.detail = Some(detail);
        self
    }

    /// A check is in good standing when it behaves the way the family says
    /// it must.
    pub fn in_good_standing(&self) -> bool {
        self.passed != self.expected_fail
    }
}

pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
    pub all_ok: bool,
}

pub fn run_verify(spec: &ModelSpec, seed: u64, n_max: usize) -> CliResult<VerifyReport> {
    let mps = spec.build()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks: Vec<CheckResult> = Vec::new();
    let n_max = n_max.clamp(3, 8);

    // symmetry witnesses appropriate to the family
    let witness_plan: Vec<(SymmetryKind, bool)> = match mps.family {
        Family::ClassA => vec![
            (SymmetryKind::RotationZ, false),
            (SymmetryKind::SpinFlip, false),
            (SymmetryKind::LegExchange, false),
            (SymmetryKind::Parity, false),
        ],
        Family::ClassB => {
            let off_origin = mps.u.unwrap_or(0.0) != 0.0;
            vec![
                (SymmetryKind::RotationZ, false),
                (SymmetryKind::Su2, false),
                (SymmetryKind::SpinFlip, false),
                (SymmetryKind::Parity, off_origin),
                (SymmetryKind::LegExchange, off_origin),
            ]
        }
        Family::SpinFlip => vec![
            (SymmetryKind::RotationZ, false),
            (SymmetryKind::SpinFlip, false),
        ],
        _ => vec![(SymmetryKind::RotationZ, false)],
    };
    for (kind, expected_fail) in witness_plan {
        let w = mps.verify_symmetry(kind);
        let mut check = CheckResult::new(
            &format!("symmetry_{kind}"),
            w.residual,
            ladder_mps::SymmetryWitness::PASS_TOL,
        );
        if expected_fail {
            check = check.expect_fail().with_detail(
                "full rotational symmetry is compatible with this discrete symmetry only at u = 0"
                    .into(),
            );
        }
        checks.push(check);
    }

    // transfer spectrum against the closed form, for spin-flip shaped models
    if let Some((a, b, g, _)) = mps.spin_flip_params() {
        let top = transfer_matrix(&mps)?;
        let mut want = [
            a * a + b * b + g,
            a * a + b * b - g,
            2.0 * a * b,
            2.0 * a * b,
        ];
        want.sort_by(|x, y| {
            y.abs()
                .partial_cmp(&x.abs())
                .unwrap()
                .then(y.partial_cmp(x).unwrap())
        });
        let mut defect: f64 = 0.0;
        for (lam, w) in top.eigenvalues.iter().zip(want) {
            defect = defect.max((lam.re - w).abs()).max(lam.im.abs());
        }
        checks.push(CheckResult::new("transfer_spectrum_closed_form", defect, 1e-12));
    }

    // dense-oracle equivalence of the trace formulas
    {
        let n = n_max.min(6);
        let psi = build_state(&mps, n)?;
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let ops = [
            RungOperatorKind::TotalSz,
            RungOperatorKind::SpinN(theta),
            RungOperatorKind::SigmaZ1SigmaZ2,
        ];
        let mut defect_one: f64 = 0.0;
        let mut defect_two: f64 = 0.0;
        for kind in ops {
            let op = rung_operator(kind);
            let formula = one_point(&mps, &op, 1, n)?;
            for k in 1..=n {
                defect_one = defect_one.max((formula - expectation(&psi, &op.matrix, k)?).abs());
            }
            if matches!(kind, RungOperatorKind::TotalSz | RungOperatorKind::SpinN(_)) {
                for r in 2..=n {
                    let formula = two_point(&mps, &op, r, Mode::Finite(n))?;
                    let dense = ladder_mps::expectation_pair(&psi, &op.matrix, 1, r)?;
                    defect_two = defect_two.max((formula - dense).abs());
                }
            }
        }
        checks.push(CheckResult::new("oracle_one_point", defect_one, 1e-12));
        checks.push(CheckResult::new("oracle_two_point", defect_two, 1e-12));

        let dense_rho = reduced(&psi, 1)?;
        let contracted = rung_density(&mps, DensityMode::Finite(n))?;
        let defect = numerics::max_abs_real(&(&dense_rho - &contracted.matrix));
        checks.push(CheckResult::new("oracle_reduced_density", defect, 1e-12));
    }

    // density-mode consistency and entanglement measures
    if mps.spin_flip_params().is_some() {
        let closed = rung_density(&mps, DensityMode::ClosedForm)?;
        let top = transfer_matrix(&mps)?;
        if !top.degenerate_top {
            let thermo = rung_density(&mps, DensityMode::Thermo)?;
            let finite = rung_density(&mps, DensityMode::Finite(1000))?;
            let defect = numerics::max_abs_real(&(&closed.matrix - &thermo.matrix))
                .max(numerics::max_abs_real(&(&closed.matrix - &finite.matrix)));
            checks.push(CheckResult::new("density_mode_consistency", defect, 1e-10));
        }
        let c_closed = concurrence(&closed, ConcurrenceMethod::ClosedForm)?;
        let c_wootters = concurrence(&closed, ConcurrenceMethod::Wootters)?;
        checks.push(CheckResult::new(
            "concurrence_double_entry",
            (c_closed - c_wootters).abs(),
            1e-10,
        ));

        // S² through the closed form and through tr(ρ S²)
        let ir = intra_rung(&mps)?;
        let s2_op = rung_operator(RungOperatorKind::TotalSpinSquared).matrix;
        let s2_tr = ladder_mps::observables::trace_with(&closed.matrix, &s2_op);
        checks.push(CheckResult::new(
            "total_spin_double_entry",
            (ir.s2 - s2_tr).abs(),
            1e-10,
        ));

        let s_bits = entropy(&closed);
        let outside = (s_bits - 2.0).max(-s_bits).max(0.0);
        checks.push(
            CheckResult::new("entropy_range", outside, 1e-12)
                .with_detail(format!("S = {s_bits} bits (must lie in [0, 2])")),
        );
    }

    // null space of the two-rung constraint map
    {
        let m = constraint_matrix(&mps);
        let dim = numerics::null_space(&numerics::to_complex(m.view()), NULL_SPACE_TOL).len();
        let generic = mps.g.abs() >= 1e-6 && mps.family != Family::Custom;
        let ok = if generic { dim == 12 } else { dim >= 12 };
        let mut check = CheckResult {
            name: "null_space_dimension".into(),
            passed: ok,
            expected_fail: false,
            residual: None,
            tolerance: None,
            detail: Some(format!("dimension {dim}")),
        };
        if !generic {
            check.detail = Some(format!("dimension {dim} (degenerate point, expected >= 12)"));
        }
        checks.push(check);
    }

    // class A only: labeled basis, span match, frustration-free residual
    if mps.family == Family::ClassA {
        let (eps, sig) = (mps.epsilon.unwrap(), mps.sigma.unwrap());
        match multiplet_basis(mps.a, mps.g, eps, sig) {
            Ok(basis) => {
                let m = constraint_matrix(&mps);
                let mut worst: f64 = 0.0;
                for (_, v) in basis.vectors() {
                    let mv = m.dot(v);
                    worst = worst.max(mv.dot(&mv).sqrt());
                }
                checks.push(CheckResult::new("multiplet_annihilation", worst, 1e-10));

                let weights = WeightSet {
                    mu_22: rng.gen_range(0.0..1.0),
                    mu_21: rng.gen_range(0.0..1.0),
                    mu_20: rng.gen_range(0.0..1.0),
                    mu_11: rng.gen_range(0.0..1.0),
                    mu_10: rng.gen_range(0.0..1.0),
                    mu_1p1: rng.gen_range(0.0..1.0),
                    mu_1p0: rng.gen_range(0.0..1.0),
                    mu_00: rng.gen_range(0.0..1.0),
                };
                let lh = local_h(&basis, &weights)?;
                let psd = lh.min_eigenvalue()?;
                checks.push(CheckResult::new("local_term_psd", (-psd).max(0.0), 1e-10));
                let h4 = embed_global(&lh.h, 4)?;
                let psi = build_state(&mps, 4)?;
                let res = hamiltonian_residual(&h4, &psi)?;
                checks.push(CheckResult::new("frustration_free_n4", res, 1e-9));
            }
            Err(e) => {
                checks.push(
                    CheckResult::new("multiplet_annihilation", f64::INFINITY, 1e-10)
                        .with_detail(e.to_string()),
                );
            }
        }
    }

    // thermodynamic magnetization and convergence
    {
        let top = transfer_matrix(&mps)?;
        if !top.degenerate_top && top.eigensystem.is_some() {
            let sz = rung_operator(RungOperatorKind::TotalSz);
            let mag = one_point_thermo(&mps, &sz)?;
            checks.push(CheckResult::new("thermo_magnetization_zero", mag.abs(), 1e-12));

            let thermo = two_point(&mps, &sz, 2, Mode::Thermo)?;
            let ratio = (top.eigenvalues[1].norm() / top.eigenvalues[0].norm()).min(1.0 - 1e-15);
            let d100 = (two_point(&mps, &sz, 2, Mode::Finite(100))? - thermo).abs();
            let bound = 100.0 * ratio.powi(100) + 1e-12;
            checks.push(
                CheckResult::new("finite_size_convergence", d100, bound)
                    .with_detail(format!("|finite(100) - thermo| with gap ratio {ratio:.6}")),
            );
        } else {
            // at the transition the g = 0 combinatorial state is the oracle
            if let Some((a, b, g, eps)) = mps.spin_flip_params() {
                if g == 0.0 {
                    let n = 6;
                    let dense = build_state(&mps, n)?;
                    let closed = ladder_mps::g_zero_state(a, b, eps, n)?;
                    let overlap = dense.overlap(&closed)?;
                    checks.push(CheckResult::new(
                        "transition_state_overlap",
                        (1.0 - overlap).abs(),
                        1e-12,
                    ));
                }
            }
        }
    }

    // cyclicity of raw amplitudes
    {
        let n = 6;
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let config: Vec<ladder_mps::model::RungState> = (0..n)
                .map(|_| ladder_mps::model::RungState::from_index(rng.gen_range(0..4)).unwrap())
                .collect();
            let mut rotated = config.clone();
            rotated.rotate_left(1);
            let a0 = ladder_mps::amplitude(&mps, &config);
            let a1 = ladder_mps::amplitude(&mps, &rotated);
            worst = worst.max((a0 - a1).abs() / (1.0 + a0.abs()));
        }
        checks.push(CheckResult::new("amplitude_cyclicity", worst, 1e-13));
    }

    let all_ok = checks.iter().all(|c| c.in_good_standing());
    Ok(VerifyReport { checks, all_ok })
}

pub fn report_json(spec: &ModelSpec, seed: u64, report: &VerifyReport) -> serde_json::Value {
    envelope(
        "verify",
        &json!({"params": spec, "seed": seed}),
        &json!({
            "checks": report.checks,
            "all_ok": report.all_ok,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: &str) -> ModelSpec {
        serde_json::from_value(match family {
            "class_a" => json!({"family": "class_a", "a": 1.0, "g": 0.7, "epsilon": 1, "sigma": 1}),
            "class_b" => json!({"family": "class_b", "u": 0.5}),
            _ => unreachable!(),
        })
        .unwrap()
    }

    #[test]
    fn class_a_suite_passes() {
        let report = run_verify(&spec("class_a"), 7, 5).unwrap();
        assert!(report.all_ok, "failing checks: {:?}", report
            .checks
            .iter()
            .filter(|c| !c.in_good_standing())
            .map(|c| &c.name)
            .collect::<Vec<_>>());
    }

    #[test]
    fn class_b_marks_parity_expected_fail() {
        let report = run_verify(&spec("class_b"), 7, 5).unwrap();
        assert!(report.all_ok);
        let parity = report
            .checks
            .iter()
            .find(|c| c.name == "symmetry_parity")
            .unwrap();
        assert!(parity.expected_fail);
        assert!(!parity.passed);
        let su2 = report
            .checks
            .iter()
            .find(|c| c.name == "symmetry_su2")
            .unwrap();
        assert!(su2.passed && !su2.expected_fail);
    }

    #[test]
    fn transition_point_runs_the_g_zero_oracle() {
        let spec: ModelSpec = serde_json::from_value(
            json!({"family": "class_a", "a": 0.8, "g": 0.0, "epsilon": 1, "sigma": 1}),
        )
        .unwrap();
        let report = run_verify(&spec, 11, 5).unwrap();
        assert!(report.all_ok, "failing: {:?}", report
            .checks
            .iter()
            .filter(|c| !c.in_good_standing())
            .collect::<Vec<_>>());
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "transition_state_overlap"));
    }
}
