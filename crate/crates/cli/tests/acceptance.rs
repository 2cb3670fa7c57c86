//! Acceptance suite: one numbered criterion per check, one pass/fail line
//! each, run as a plain binary so the lines always print.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;

use qcg_core::{
    certify_cp, certify_cp_numeric, certify_cp_translation, change_of_basis_matrix,
    charpoly_coeffs, choi_of_depolarizing, choi_of_translation_channel, extremal_vertices,
    gellmann_basis, gellmann_k_block, gellmann_pm_lambdas, hermitian_eigensystem, hw_basis,
    hw_lambdas, kron, pauli_basis, pauli_lambdas, random_compression_vector, sample_region,
    sample_rng, sign_criterion, simplex_condition, BasisRef, ComplexMatrix, CompressionVector,
    TranslationVector, C64,
};

type CheckResult = Result<(), String>;

fn sorted_desc(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    values
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spectrum lengths differ");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn analytic_lambdas(v: &CompressionVector) -> Vec<f64> {
    match v.basis().kind() {
        qcg_core::BasisKind::Pauli { .. } => pauli_lambdas(v).unwrap(),
        qcg_core::BasisKind::HeisenbergWeyl => hw_lambdas(v).unwrap(),
        _ => panic!("analytic path exists only for pauli/hw here"),
    }
}

fn random_translation<R: Rng>(basis: &BasisRef, rng: &mut R) -> TranslationVector {
    // same pair-constrained box draw as v, with t_0 = 0 and a 1/2 scale
    let draw = random_compression_vector(basis, rng);
    let mut t: Vec<C64> = draw.components().iter().map(|z| z * 0.5).collect();
    t[0] = C64::new(0.0, 0.0);
    TranslationVector::new(basis.clone(), t).unwrap()
}

/// 1. The single-qubit tetrahedron vertices through the CLI binary.
fn criterion_1() -> CheckResult {
    let started = Instant::now();
    let output = Command::new(env!("CARGO_BIN_EXE_qcg"))
        .args(["extremals", "--basis", "pauli", "--d", "1"])
        .output()
        .map_err(|e| format!("cannot run binary: {e}"))?;
    if !output.status.success() {
        return Err(format!("binary exited with {:?}", output.status.code()));
    }
    let value: serde_json::Value = serde_json::from_slice(&output.stdout)
        .map_err(|e| format!("bad JSON from binary: {e}"))?;
    let coords = value["realCoordinates"]
        .as_array()
        .ok_or("missing realCoordinates")?;
    let expected = [
        [1.0, 1.0, 1.0],
        [1.0, -1.0, -1.0],
        [-1.0, 1.0, -1.0],
        [-1.0, -1.0, 1.0],
    ];
    if coords.len() != 4 {
        return Err(format!("expected 4 vertices, got {}", coords.len()));
    }
    for (row, want) in coords.iter().zip(expected.iter()) {
        let got: Vec<f64> = row
            .as_array()
            .ok_or("vertex row is not an array")?
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        if got.len() != 3 || max_abs_diff(&got, want) > 1e-12 {
            return Err(format!("vertex {got:?} != {want:?}"));
        }
    }
    if started.elapsed() > Duration::from_secs(1) {
        return Err(format!("took {:?} (limit 1 s)", started.elapsed()));
    }
    Ok(())
}

/// 2. Every extremal channel has numeric Choi spectrum (N, 0 x (N^2 - 1)).
fn criterion_2() -> CheckResult {
    let started = Instant::now();
    let mut bases: Vec<BasisRef> = vec![
        Arc::new(pauli_basis(1).unwrap()),
        Arc::new(pauli_basis(2).unwrap()),
    ];
    for n in 2..=5 {
        bases.push(Arc::new(hw_basis(n).unwrap()));
    }
    for basis in &bases {
        let n = basis.n() as f64;
        let set = extremal_vertices(basis).map_err(|e| e.to_string())?;
        if set.vertices.len() != basis.len() {
            return Err(format!(
                "{}: {} vertices, expected {}",
                basis.kind().as_str(),
                set.vertices.len(),
                basis.len()
            ));
        }
        for (alpha, vertex) in set.vertices.iter().enumerate() {
            let spectrum =
                hermitian_eigensystem(&choi_of_depolarizing(vertex).matrix).unwrap();
            let mut expected = vec![0.0; basis.len()];
            expected[0] = n;
            let deviation = max_abs_diff(&spectrum.values, &expected);
            if deviation > 1e-9 {
                return Err(format!(
                    "{} vertex {alpha}: spectrum off by {deviation:.3e}",
                    basis.kind().as_str()
                ));
            }
        }
    }
    if started.elapsed() > Duration::from_secs(10) {
        return Err(format!("took {:?} (limit 10 s)", started.elapsed()));
    }
    Ok(())
}

/// 3. Analytic eigenvalues match the Jacobi eigensolver on random channels.
fn criterion_3() -> CheckResult {
    let started = Instant::now();
    let bases: Vec<BasisRef> = vec![
        Arc::new(pauli_basis(1).unwrap()),
        Arc::new(pauli_basis(2).unwrap()),
        Arc::new(hw_basis(3).unwrap()),
        Arc::new(hw_basis(4).unwrap()),
    ];
    for (b_index, basis) in bases.iter().enumerate() {
        for index in 0..100u64 {
            let mut rng = sample_rng(300 + b_index as u64, index);
            let v = random_compression_vector(basis, &mut rng);
            let analytic = sorted_desc(analytic_lambdas(&v));
            let numeric = hermitian_eigensystem(&choi_of_depolarizing(&v).matrix).unwrap();
            let deviation = max_abs_diff(&analytic, &numeric.values);
            if deviation > 1e-9 {
                return Err(format!(
                    "{} sample {index}: analytic vs numeric off by {deviation:.3e}",
                    basis.kind().as_str()
                ));
            }
        }
    }
    if started.elapsed() > Duration::from_secs(30) {
        return Err(format!("took {:?} (limit 30 s)", started.elapsed()));
    }
    Ok(())
}

/// 4. trace(J) = N for random plain and translated channels, all basis kinds.
fn criterion_4() -> CheckResult {
    let bases: Vec<BasisRef> = vec![
        Arc::new(pauli_basis(1).unwrap()),
        Arc::new(pauli_basis(2).unwrap()),
        Arc::new(gellmann_basis(3).unwrap()),
        Arc::new(gellmann_basis(4).unwrap()),
        Arc::new(hw_basis(3).unwrap()),
        Arc::new(hw_basis(4).unwrap()),
    ];
    for (b_index, basis) in bases.iter().enumerate() {
        let n = basis.n() as f64;
        for index in 0..100u64 {
            let mut rng = sample_rng(400 + b_index as u64, index);
            let v = random_compression_vector(basis, &mut rng);
            let plain = choi_of_depolarizing(&v).matrix.trace();
            if (plain - C64::new(n, 0.0)).norm() > 1e-9 {
                return Err(format!(
                    "{}: trace(J) = {plain} for a plain channel",
                    basis.kind().as_str()
                ));
            }
            let t = random_translation(basis, &mut rng);
            let translated = choi_of_translation_channel(&v, &t).unwrap().matrix.trace();
            if (translated - C64::new(n, 0.0)).norm() > 1e-9 {
                return Err(format!(
                    "{}: trace(J) = {translated} for a translated channel",
                    basis.kind().as_str()
                ));
            }
        }
    }
    Ok(())
}

/// 5. Simplex criterion verdicts per basis, with the named witness pair.
fn criterion_5() -> CheckResult {
    let simplex: Vec<BasisRef> = vec![
        Arc::new(pauli_basis(1).unwrap()),
        Arc::new(pauli_basis(2).unwrap()),
        Arc::new(hw_basis(2).unwrap()),
        Arc::new(hw_basis(3).unwrap()),
        Arc::new(hw_basis(4).unwrap()),
        Arc::new(hw_basis(5).unwrap()),
    ];
    for basis in &simplex {
        let report = simplex_condition(basis);
        if !report.is_simplex {
            return Err(format!(
                "{} n={} judged non-simplex (pair {:?})",
                basis.kind().as_str(),
                basis.n(),
                report.failing_pair
            ));
        }
    }
    for n in [3usize, 4] {
        let basis = gellmann_basis(n).unwrap();
        let report = simplex_condition(&basis);
        if report.is_simplex {
            return Err(format!("gellmann({n}) judged a simplex"));
        }
        if n == 3 {
            match report.failing_pair {
                Some((3, 5)) => {}
                other => {
                    return Err(format!(
                        "gellmann(3) failing pair {other:?}, expected (3, 5) = (X01, X02)"
                    ))
                }
            }
        }
    }
    Ok(())
}

/// 6. Gell-Mann hybrid vs full numeric: verdicts and spectra agree.
fn criterion_6() -> CheckResult {
    let basis: BasisRef = Arc::new(gellmann_basis(3).unwrap());
    for index in 0..1000u64 {
        let mut rng = sample_rng(600, index);
        let v = random_compression_vector(&basis, &mut rng);
        let hybrid = certify_cp(&v, 1e-9).unwrap();
        let numeric = certify_cp_numeric(&v, 1e-9).unwrap();
        if hybrid.verdict != numeric.verdict {
            return Err(format!(
                "sample {index}: hybrid {:?} vs numeric {:?}",
                hybrid.verdict, numeric.verdict
            ));
        }
        // {lambda+-} U spec(K) must be spec(J) as multisets
        let pm = gellmann_pm_lambdas(&v).unwrap();
        let (k, _) = gellmann_k_block(&v).unwrap();
        let combined = sorted_desc(
            pm.iter()
                .flat_map(|p| [p.plus, p.minus])
                .chain(hermitian_eigensystem(&k).unwrap().values)
                .collect(),
        );
        let deviation = max_abs_diff(&combined, &numeric.eigenvalues);
        if deviation > 1e-9 {
            return Err(format!("sample {index}: spectra differ by {deviation:.3e}"));
        }
    }
    Ok(())
}

/// 7. Eigenvalue-sum sign criterion vs direct eigenvalues on random
/// hermitians (half of them positive semidefinite by construction).
fn criterion_7() -> CheckResult {
    for index in 0..1000u64 {
        let mut rng = sample_rng(700, index);
        let dim = rng.gen_range(2..=6usize);
        let mut a = ComplexMatrix::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                a.set(
                    r,
                    c,
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
        let h = if index % 2 == 0 {
            // A^dag A: positive semidefinite
            qcg_core::linalg::conj_transpose(&a).mul(&a).unwrap()
        } else {
            // (A + A^dag)/2: generic hermitian, indefinite in general
            a.add(&qcg_core::linalg::conj_transpose(&a))
                .unwrap()
                .scale(C64::new(0.5, 0.0))
        };
        let s = charpoly_coeffs(&h).unwrap();
        let by_sums = sign_criterion(&s);
        let min_eig = *hermitian_eigensystem(&h)
            .unwrap()
            .values
            .last()
            .unwrap();
        let by_eigs = min_eig >= -1e-9;
        if by_sums != by_eigs {
            return Err(format!(
                "sample {index}: sign criterion {by_sums} vs min eig {min_eig:.3e}"
            ));
        }
    }
    Ok(())
}

/// 8. Monte Carlo volume of the single-qubit CP tetrahedron.
fn criterion_8() -> CheckResult {
    let started = Instant::now();
    let basis: BasisRef = Arc::new(pauli_basis(1).unwrap());
    let outcome = sample_region(&basis, None, 1_000_000, 42, false).unwrap();
    let fraction = outcome.summary.fraction;
    if (fraction - 1.0 / 3.0).abs() > 0.005 {
        return Err(format!("fraction {fraction:.5} not within 1/3 +- 0.005"));
    }
    if started.elapsed() > Duration::from_secs(60) {
        return Err(format!("took {:?} (limit 60 s)", started.elapsed()));
    }
    Ok(())
}

/// 9. Change of basis can break manifest positivity: the X(x)X state vs its
/// rewrite along the gellmann(4) diagonal direction; and the pauli(2) ->
/// gellmann(4) change-of-basis matrix is unitary.
fn criterion_9() -> CheckResult {
    let k = 0.5f64;
    let x = ComplexMatrix::from_rows(&[
        vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    ]);
    let rho = ComplexMatrix::identity(4)
        .scale(C64::new(0.25, 0.0))
        .add(&kron(&x, &x).scale(C64::new(k * 3.0f64.sqrt() / 4.0, 0.0)))
        .unwrap();
    let min_rho = *hermitian_eigensystem(&rho).unwrap().values.last().unwrap();
    let expected_rho = (1.0 - k * 3.0f64.sqrt()) / 4.0;
    if (min_rho - expected_rho).abs() > 1e-10 || min_rho < 0.0 {
        return Err(format!(
            "min eig of rho = {min_rho:.6}, expected {expected_rho:.6} >= 0"
        ));
    }
    let gm4 = gellmann_basis(4).unwrap();
    let z3 = gm4.element(3); // diag(1,1,1,-3)/sqrt(6)
    let rho_tilde = ComplexMatrix::identity(4)
        .scale(C64::new(0.25, 0.0))
        .add(&z3.scale(C64::new(k * 6.0f64.sqrt() / 4.0, 0.0)))
        .unwrap();
    let min_tilde = *hermitian_eigensystem(&rho_tilde)
        .unwrap()
        .values
        .last()
        .unwrap();
    let expected_tilde = (1.0 - 3.0 * k) / 4.0;
    if (min_tilde - expected_tilde).abs() > 1e-10 || min_tilde >= 0.0 {
        return Err(format!(
            "min eig of rho-tilde = {min_tilde:.6}, expected {expected_tilde:.6} < 0"
        ));
    }
    let u = change_of_basis_matrix(&pauli_basis(2).unwrap(), &gm4).unwrap();
    let gram = qcg_core::linalg::conj_transpose(&u).mul(&u).unwrap();
    let deviation = gram.sub(&ComplexMatrix::identity(16)).unwrap().max_abs();
    if deviation > 1e-10 {
        return Err(format!("U^dag U deviates from I by {deviation:.3e}"));
    }
    Ok(())
}

/// 10. Single-qubit translation channels match the 2x2-block closed form
/// (the form WITH the 1/2 on the radical is the oracle).
fn criterion_10() -> CheckResult {
    let basis: BasisRef = Arc::new(pauli_basis(1).unwrap());
    let mut printed_form_ever_matched = true;
    for index in 0..100u64 {
        let mut rng = sample_rng(1000, index);
        let (vx, vy, vz, tz) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let v = CompressionVector::from_real(basis.clone(), &[1.0, vx, vy, vz]).unwrap();
        let t = TranslationVector::new(
            basis.clone(),
            vec![
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(tz, 0.0),
            ],
        )
        .unwrap();
        let numeric = certify_cp_translation(&v, &t, 1e-9).unwrap().eigenvalues;
        let r0 = ((vx + vy).powi(2) + tz * tz).sqrt();
        let r1 = ((vx - vy).powi(2) + tz * tz).sqrt();
        let derived = sorted_desc(vec![
            0.5 * (1.0 + vz) + 0.5 * r0,
            0.5 * (1.0 + vz) - 0.5 * r0,
            0.5 * (1.0 - vz) + 0.5 * r1,
            0.5 * (1.0 - vz) - 0.5 * r1,
        ]);
        if max_abs_diff(&derived, &numeric) > 1e-9 {
            return Err(format!(
                "sample {index}: derived closed form off by {:.3e}",
                max_abs_diff(&derived, &numeric)
            ));
        }
        let no_half = sorted_desc(vec![
            0.5 * (1.0 + vz) + r0,
            0.5 * (1.0 + vz) - r0,
            0.5 * (1.0 - vz) + r1,
            0.5 * (1.0 - vz) - r1,
        ]);
        if max_abs_diff(&no_half, &numeric) > 1e-9 {
            printed_form_ever_matched = false;
        }
    }
    println!(
        "  note: the closed form WITH the 1/2 on the radical matches the numeric \
         spectrum; the variant without it {}",
        if printed_form_ever_matched {
            "also matched (unexpected)"
        } else {
            "does not"
        }
    );
    Ok(())
}

/// 11. Convex combinations of vertices are CP; points pushed to lambda =
/// -0.01 beyond a facet are not.
fn criterion_11() -> CheckResult {
    let bases: Vec<BasisRef> = vec![
        Arc::new(pauli_basis(2).unwrap()),
        Arc::new(hw_basis(3).unwrap()),
    ];
    for (b_index, basis) in bases.iter().enumerate() {
        let set = extremal_vertices(basis).map_err(|e| e.to_string())?;
        let count = basis.len();
        let n = basis.n() as f64;
        for index in 0..1000u64 {
            let mut rng = sample_rng(1100 + b_index as u64, index);
            // random convex weights
            let raw: Vec<f64> = (0..count).map(|_| rng.gen_range(0.0..1.0)).collect();
            let total: f64 = raw.iter().sum();
            let mut v = vec![C64::new(0.0, 0.0); count];
            for (w, vertex) in raw.iter().zip(set.vertices.iter()) {
                for (acc, z) in v.iter_mut().zip(vertex.components()) {
                    *acc += z * (w / total);
                }
            }
            v[0] = C64::new(1.0, 0.0);
            let mix = CompressionVector::new(basis.clone(), v.clone()).unwrap();
            let report = certify_cp(&mix, 1e-9).unwrap();
            if !report.is_cp() {
                return Err(format!(
                    "{} convex combination {index} judged not-cp (min {:.3e})",
                    basis.kind().as_str(),
                    report.min_eigenvalue
                ));
            }
            // push the point along a random facet's vertex direction until
            // that facet's eigenvalue is exactly -0.01
            let facet = rng.gen_range(0..count);
            let lambdas = analytic_lambdas_by_vertex(&mix, &set);
            let shift = (-0.01 - lambdas[facet]) * n / (count as f64 - 1.0);
            let mut outside = v;
            for (entry, z) in outside
                .iter_mut()
                .zip(set.vertices[facet].components())
                .skip(1)
            {
                *entry += z * shift;
            }
            outside[0] = C64::new(1.0, 0.0);
            let outside = CompressionVector::new(basis.clone(), outside).unwrap();
            let report = certify_cp(&outside, 1e-9).unwrap();
            if report.is_cp() {
                return Err(format!(
                    "{} facet point {index} judged cp (min {:.3e})",
                    basis.kind().as_str(),
                    report.min_eigenvalue
                ));
            }
            if (report.min_eigenvalue + 0.01) > 1e-6 {
                return Err(format!(
                    "{} facet point {index}: min {:.3e}, constructed -0.01",
                    basis.kind().as_str(),
                    report.min_eigenvalue
                ));
            }
        }
    }
    Ok(())
}

/// Eigenvalue lambda_alpha per extremal vertex alpha: lambda_alpha =
/// <vertex_alpha, v> / N, the simplex facet coordinates of v.
fn analytic_lambdas_by_vertex(v: &CompressionVector, set: &qcg_core::ExtremalSet) -> Vec<f64> {
    let n = v.basis().n() as f64;
    set.vertices
        .iter()
        .map(|vertex| {
            let dot: C64 = vertex
                .components()
                .iter()
                .zip(v.components())
                .map(|(e, x)| e.conj() * x)
                .sum();
            dot.re / n
        })
        .collect()
}

fn main() {
    let criteria: Vec<(&str, fn() -> CheckResult)> = vec![
        ("criterion 1: single-qubit tetrahedron vertices via the CLI", criterion_1),
        ("criterion 2: extremal Choi spectra (N, 0, ...)", criterion_2),
        ("criterion 3: analytic vs numeric eigenvalues", criterion_3),
        ("criterion 4: trace(J) = N", criterion_4),
        ("criterion 5: simplex criterion verdicts", criterion_5),
        ("criterion 6: gellmann hybrid vs numeric certification", criterion_6),
        ("criterion 7: eigenvalue-sum sign criterion", criterion_7),
        ("criterion 8: Monte Carlo tetrahedron volume", criterion_8),
        ("criterion 9: change-of-basis positivity break", criterion_9),
        ("criterion 10: translation-channel closed form", criterion_10),
        ("criterion 11: convexity and facet violations", criterion_11),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        match check() {
            Ok(()) => println!("PASS {name} ({:.2?})", started.elapsed()),
            Err(message) => {
                failures += 1;
                println!("FAIL {name}: {message}");
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
