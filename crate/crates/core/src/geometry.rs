//! Geometry of the CP region: analytic Choi eigenvalues per basis, the
//! simplex criterion, extremal channel enumeration, the Gell-Mann hybrid
//! certification and Monte Carlo sampling of the CP fraction.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::basis::{conjugate_pair_structure, BasisKind, BasisRef, OperatorBasis};
use crate::channel::{
    choi_of_depolarizing, choi_of_translation_channel, CompressionVector, TranslationVector,
};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, TAU_EIG, TAU_EQ};

/// Absolute tolerance on the eigenvalue-sum sign criterion.
pub const TAU_SIGN: f64 = 1e-9;
/// Default CP certification tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// f(alpha, n, m) = floor(alpha/2) n + floor((alpha+1)/2) m  (mod 2).
pub fn f_exponent(alpha: u8, n: u8, m: u8) -> u8 {
    debug_assert!(alpha < 4 && n < 2 && m < 2);
    (((alpha / 2) * n + ((alpha + 1) / 2) * m) % 2) as u8
}

/// g(alpha, beta) = alpha beta (alpha - beta)/2  (mod 2).
pub fn g_exponent(alpha: u8, beta: u8) -> u8 {
    debug_assert!(alpha < 4 && beta < 4);
    let (a, b) = (alpha as i32, beta as i32);
    (((a * b * (a - b) / 2) % 2 + 2) % 2) as u8
}

fn bit(x: usize, j: usize) -> u8 {
    ((x >> j) & 1) as u8
}

/// Choi eigenvalues for a Pauli-basis channel, keyed by flat index
/// n + (m << d) over the bitstrings (n_1..n_d), (m_1..m_d).
pub fn pauli_lambdas(v: &CompressionVector) -> Result<Vec<f64>> {
    let d = match v.basis().kind() {
        BasisKind::Pauli { d } => *d,
        _ => return Err(Error::BasisMismatch("pauli_lambdas requires a pauli basis".into())),
    };
    let vr = v.real_components()?;
    let n = 1usize << d;
    let count = n * n;
    let mut lambdas = Vec::with_capacity(count);
    for nm in 0..count {
        let (nbits, mbits) = (nm & (n - 1), nm >> d);
        let mut sum = 0.0;
        for (alpha, &va) in vr.iter().enumerate() {
            let mut exponent = 0u8;
            for j in 0..d {
                let digit = ((alpha >> (2 * j)) & 3) as u8;
                exponent ^= f_exponent(digit, bit(nbits, j), bit(mbits, j));
            }
            sum += if exponent == 0 { va } else { -va };
        }
        lambdas.push(sum / n as f64);
    }
    Ok(lambdas)
}

/// Choi eigenvalues for a Heisenberg-Weyl channel, keyed by l*N + m.
pub fn hw_lambdas(v: &CompressionVector) -> Result<Vec<f64>> {
    let n = match v.basis().kind() {
        BasisKind::HeisenbergWeyl => v.basis().n(),
        _ => return Err(Error::BasisMismatch("hw_lambdas requires a heisenberg-weyl basis".into())),
    };
    let omega = 2.0 * PI / n as f64;
    let vc = v.components();
    let mut lambdas = Vec::with_capacity(n * n);
    for l in 0..n {
        for m in 0..n {
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..n {
                for k in 0..n {
                    let phase =
                        C64::from_polar(1.0, omega * ((m * j) as f64 - (k * l) as f64));
                    sum += vc[j * n + k] * phase;
                }
            }
            sum /= n as f64;
            if sum.im.abs() > TAU_EIG {
                return Err(Error::NonRealCoefficient {
                    index: l * n + m,
                    im: sum.im,
                });
            }
            lambdas.push(sum.re);
        }
    }
    Ok(lambdas)
}

/// lambda_alpha = sum_beta v_beta e^{-i theta_{alpha beta}} / tr(M^dag M),
/// valid for unitary, pairwise phase-commuting bases.
pub fn unitary_basis_lambdas(v: &CompressionVector, phases: &[Vec<f64>]) -> Result<Vec<f64>> {
    let b = v.basis();
    let count = b.len();
    if phases.len() != count || phases.iter().any(|row| row.len() != count) {
        return Err(Error::BasisMismatch("phase table has the wrong shape".into()));
    }
    let vc = v.components();
    let mut lambdas = Vec::with_capacity(count);
    for alpha in 0..count {
        let mut sum = C64::new(0.0, 0.0);
        for beta in 0..count {
            sum += vc[beta] * C64::from_polar(1.0, -phases[alpha][beta]) / b.norm(beta);
        }
        if sum.im.abs() > TAU_EIG {
            return Err(Error::NonRealCoefficient {
                index: alpha,
                im: sum.im,
            });
        }
        lambdas.push(sum.re);
    }
    Ok(lambdas)
}

/// Whether the CP region is a simplex, with the witnessing commutator data.
#[derive(Debug, Clone)]
pub struct SimplexReport {
    pub is_simplex: bool,
    pub failing_pair: Option<(usize, usize)>,
    pub max_commutator: f64,
    pub phase_table: Option<Vec<Vec<f64>>>,
}

/// Max-entry norm of [a (x) a^*, b (x) b^*] evaluated without forming the
/// N^2 x N^2 tensors: the (ij,kl) entry is (ab)_ij (ab)*_kl - (ba)_ij (ba)*_kl.
fn tensor_conj_commutator_norm(
    a: &crate::linalg::ComplexMatrix,
    b: &crate::linalg::ComplexMatrix,
) -> Result<f64> {
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    let x = ab.entries();
    let y = ba.entries();
    let mut max = 0.0f64;
    for (&xi, &yi) in x.iter().zip(y.iter()) {
        for (&xk, &yk) in x.iter().zip(y.iter()) {
            let entry = xi * xk.conj() - yi * yk.conj();
            let m = entry.norm();
            if m > max {
                max = m;
            }
        }
    }
    Ok(max)
}

/// Checks [M_alpha (x) M_alpha^*, M_beta (x) M_beta^*] = 0 for all pairs and,
/// when it holds on a unitary basis, fills the phase table theta_{alpha beta}.
pub fn simplex_condition(b: &OperatorBasis) -> SimplexReport {
    let count = b.len();
    // Scan pairs in label order so the witness reported for a non-simplex
    // basis is the canonical one: labels sort the off-diagonal elements
    // (X.., Y..) ahead of the diagonal ones (Z..), and several pairs fail
    // at once in such bases.
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&a, &b2| b.label(a).cmp(b.label(b2)).then(a.cmp(&b2)));
    let mut max_commutator = 0.0f64;
    let mut failing_pair = None;
    'outer: for (i, &alpha) in order.iter().enumerate() {
        for &beta in &order[i + 1..] {
            let norm = tensor_conj_commutator_norm(b.element(alpha), b.element(beta))
                .expect("same-dimension elements");
            if norm > max_commutator {
                max_commutator = norm;
            }
            if norm > TAU_EQ {
                failing_pair = Some((alpha.min(beta), alpha.max(beta)));
                break 'outer;
            }
        }
    }
    let is_simplex = failing_pair.is_none();
    let phase_table = if is_simplex && b.is_unitary(TAU_EQ) {
        let mut table = vec![vec![0.0f64; count]; count];
        let mut ok = true;
        'phases: for alpha in 0..count {
            for beta in 0..count {
                match linalg::phase_commute(b.element(alpha), b.element(beta), TAU_EQ) {
                    Ok(Some(theta)) => table[alpha][beta] = theta,
                    _ => {
                        ok = false;
                        break 'phases;
                    }
                }
            }
        }
        ok.then_some(table)
    } else {
        None
    };
    SimplexReport {
        is_simplex,
        failing_pair,
        max_commutator,
        phase_table,
    }
}

/// The N^2 extremal channels of a simplex basis: conjugations by the basis
/// matrices, with vertex components v_beta = e^{i theta_{alpha beta}}.
#[derive(Debug, Clone)]
pub struct ExtremalSet {
    pub vertices: Vec<CompressionVector>,
    pub channel_indices: Vec<usize>,
}

pub fn extremal_vertices(basis: &BasisRef) -> Result<ExtremalSet> {
    let report = simplex_condition(basis);
    if let Some((alpha, beta)) = report.failing_pair {
        return Err(Error::NotSimplex(alpha, beta));
    }
    if !basis.is_unitary(TAU_EQ) {
        let bad = (0..basis.len())
            .find(|&a| {
                !linalg::conj_transpose(basis.element(a))
                    .mul(basis.element(a))
                    .unwrap()
                    .approx_eq(&crate::linalg::ComplexMatrix::identity(basis.n()), TAU_EQ)
            })
            .unwrap_or(0);
        return Err(Error::NotUnitary(bad));
    }
    let phases = report
        .phase_table
        .ok_or_else(|| Error::InvalidBasis("phase table unavailable".into()))?;
    let count = basis.len();
    let n = basis.n() as f64;
    let mut vertices = Vec::with_capacity(count);
    for alpha in 0..count {
        let mut v: Vec<C64> = (0..count)
            .map(|beta| C64::from_polar(1.0, phases[alpha][beta]))
            .collect();
        v[0] = C64::new(1.0, 0.0);
        let vertex = CompressionVector::new(basis.clone(), v)?;
        // rank-1 Choi structure: exactly one eigenvalue N, the rest zero
        let lambdas = unitary_basis_lambdas(&vertex, &phases)?;
        let big = lambdas.iter().filter(|&&x| (x - n).abs() <= TAU_EIG).count();
        let small = lambdas.iter().filter(|&&x| x.abs() <= TAU_EIG).count();
        if big != 1 || small != count - 1 {
            return Err(Error::InvalidBasis(format!(
                "vertex {alpha} fails the rank-1 Choi check"
            )));
        }
        vertices.push(vertex);
    }
    Ok(ExtremalSet {
        vertices,
        channel_indices: (0..count).collect(),
    })
}

/// Analytic eigenvalue pair on |J^+-_{jk}> for a Gell-Mann channel.
#[derive(Debug, Clone, Copy)]
pub struct PmLambda {
    pub j: usize,
    pub k: usize,
    pub plus: f64,
    pub minus: f64,
}

/// The N^2 - N analytic eigenvalues lambda^+-_{jk}, linear in v.
pub fn gellmann_pm_lambdas(v: &CompressionVector) -> Result<Vec<PmLambda>> {
    let n = match v.basis().kind() {
        BasisKind::GellMann => v.basis().n(),
        _ => {
            return Err(Error::BasisMismatch(
                "gellmann_pm_lambdas requires a gellmann basis".into(),
            ))
        }
    };
    let vr = v.real_components()?;
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for j in 0..n - 1 {
        for k in j + 1..n {
            let mut base = vr[0] / n as f64;
            for l in 1..n {
                let c = if l < k {
                    0.0
                } else if l == k {
                    -2.0 / (l + 1) as f64
                } else {
                    2.0 / (l * (l + 1)) as f64
                };
                base += c * vr[l] / 2.0;
            }
            let x_index = n * (1 + 2 * j) + 2 * k - (j + 1) * (j + 2);
            let (vx, vy) = (vr[x_index], vr[x_index + 1]);
            out.push(PmLambda {
                j,
                k,
                plus: base + vx / 2.0 - vy / 2.0,
                minus: base - vx / 2.0 + vy / 2.0,
            });
        }
    }
    Ok(out)
}

/// The N x N block K(Phi_v) on the rows {|j,j>} and its eigenvalue sums S.
pub fn gellmann_k_block(
    v: &CompressionVector,
) -> Result<(crate::linalg::ComplexMatrix, Vec<f64>)> {
    let n = match v.basis().kind() {
        BasisKind::GellMann => v.basis().n(),
        _ => {
            return Err(Error::BasisMismatch(
                "gellmann_k_block requires a gellmann basis".into(),
            ))
        }
    };
    let j = choi_of_depolarizing(v);
    let block_rows: Vec<usize> = (0..n).map(|i| i * n + i).collect();
    let in_block = |idx: usize| idx % n == idx / n;
    for row in 0..n * n {
        for col in 0..n * n {
            if in_block(row) != in_block(col) {
                let magnitude = j.matrix.get(row, col).norm();
                if magnitude > TAU_EQ {
                    return Err(Error::BlockPattern {
                        row,
                        col,
                        magnitude,
                    });
                }
            }
        }
    }
    let k = linalg::extract_block(&j.matrix, &block_rows)?;
    let s = linalg::charpoly_coeffs(&k)?;
    Ok((k, s))
}

/// All eigenvalue sums non-negative iff all block eigenvalues non-negative.
pub fn sign_criterion(s: &[f64]) -> bool {
    debug_assert!(!s.is_empty() && (s[0] - 1.0).abs() < 1e-12);
    s.iter().all(|&x| x >= -TAU_SIGN)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "cp")]
    Cp,
    #[serde(rename = "not-cp")]
    NotCp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    #[serde(rename = "analytic-pauli")]
    AnalyticPauli,
    #[serde(rename = "analytic-hw")]
    AnalyticHw,
    #[serde(rename = "analytic-unitary")]
    AnalyticUnitary,
    #[serde(rename = "gellmann-hybrid")]
    GellmannHybrid,
    #[serde(rename = "numeric")]
    Numeric,
}

/// Structured CP verdict.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CpReport {
    pub verdict: Verdict,
    pub method: Method,
    pub min_eigenvalue: f64,
    pub eigenvalues: Vec<f64>,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_validation_deviation: Option<f64>,
}

impl CpReport {
    pub fn is_cp(&self) -> bool {
        self.verdict == Verdict::Cp
    }
}

fn report_from_eigenvalues(method: Method, mut eigenvalues: Vec<f64>, tol: f64) -> CpReport {
    eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let min_eigenvalue = eigenvalues.last().copied().unwrap_or(0.0);
    CpReport {
        verdict: if min_eigenvalue >= -tol {
            Verdict::Cp
        } else {
            Verdict::NotCp
        },
        method,
        min_eigenvalue,
        eigenvalues,
        tolerance: tol,
        cross_validation_deviation: None,
    }
}

/// Numeric oracle: full Jacobi eigendecomposition of J(Phi_v).
pub fn certify_cp_numeric(v: &CompressionVector, tol: f64) -> Result<CpReport> {
    let j = choi_of_depolarizing(v);
    let spectrum = linalg::hermitian_eigensystem(&j.matrix)?;
    Ok(report_from_eigenvalues(Method::Numeric, spectrum.values, tol))
}

/// Dispatching CP certification: analytic where the basis admits it, hybrid
/// for Gell-Mann, the numeric eigensolver otherwise.
pub fn certify_cp(v: &CompressionVector, tol: f64) -> Result<CpReport> {
    match v.basis().kind() {
        BasisKind::Pauli { .. } => {
            Ok(report_from_eigenvalues(Method::AnalyticPauli, pauli_lambdas(v)?, tol))
        }
        BasisKind::HeisenbergWeyl => {
            Ok(report_from_eigenvalues(Method::AnalyticHw, hw_lambdas(v)?, tol))
        }
        BasisKind::GellMann => {
            let pm = gellmann_pm_lambdas(v)?;
            let (k, s) = gellmann_k_block(v)?;
            let block_spectrum = linalg::hermitian_eigensystem(&k)?;
            let pm_ok = pm.iter().all(|p| p.plus >= -tol && p.minus >= -tol);
            let block_ok = sign_criterion(&s);
            let mut eigenvalues: Vec<f64> = pm
                .iter()
                .flat_map(|p| [p.plus, p.minus])
                .chain(block_spectrum.values.iter().copied())
                .collect();
            eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
            let min_eigenvalue = *eigenvalues.last().unwrap();
            Ok(CpReport {
                verdict: if pm_ok && block_ok {
                    Verdict::Cp
                } else {
                    Verdict::NotCp
                },
                method: Method::GellmannHybrid,
                min_eigenvalue,
                eigenvalues,
                tolerance: tol,
                cross_validation_deviation: None,
            })
        }
        BasisKind::Custom => {
            let report = simplex_condition(v.basis());
            match report.phase_table {
                Some(phases) if report.is_simplex => Ok(report_from_eigenvalues(
                    Method::AnalyticUnitary,
                    unitary_basis_lambdas(v, &phases)?,
                    tol,
                )),
                _ => certify_cp_numeric(v, tol),
            }
        }
    }
}

/// Like `certify_cp`, additionally cross-checking the analytic spectrum
/// against the numeric oracle and recording the worst deviation.
pub fn certify_cp_cross_validated(v: &CompressionVector, tol: f64) -> Result<CpReport> {
    let mut report = certify_cp(v, tol)?;
    if report.method != Method::Numeric {
        let numeric = certify_cp_numeric(v, tol)?;
        let deviation = report
            .eigenvalues
            .iter()
            .zip(numeric.eigenvalues.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        report.cross_validation_deviation = Some(deviation);
    }
    Ok(report)
}

/// Numeric certification of a compress-and-translate channel.
pub fn certify_cp_translation(
    v: &CompressionVector,
    t: &TranslationVector,
    tol: f64,
) -> Result<CpReport> {
    let j = choi_of_translation_channel(v, t)?;
    let spectrum = linalg::hermitian_eigensystem(&j.matrix)?;
    Ok(report_from_eigenvalues(Method::Numeric, spectrum.values, tol))
}

/// Counter-based per-sample generator: deterministic in (seed, index),
/// independent of any parallel fan-out.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws v uniformly from the unit box respecting the pair structure:
/// real axes uniform on [-1, 1], complex planes uniform on the square with
/// the conjugate entry mirrored.
pub fn random_compression_vector<R: Rng>(basis: &BasisRef, rng: &mut R) -> CompressionVector {
    let ps = conjugate_pair_structure(basis);
    let mut v = vec![C64::new(0.0, 0.0); basis.len()];
    v[0] = C64::new(1.0, 0.0);
    for r in &ps.records {
        if r.alpha == 0 {
            continue;
        }
        if r.beta == r.alpha {
            v[r.alpha] = C64::new(rng.gen_range(-1.0..=1.0), 0.0);
        } else if r.alpha < r.beta {
            let z = C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            v[r.alpha] = z;
            v[r.beta] = z.conj();
        }
    }
    CompressionVector::new(basis.clone(), v).expect("constrained draw is always valid")
}

/// Monte Carlo estimate of the CP fraction of the sampling box.
#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary {
    pub fraction: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

pub struct SampleOutcome {
    pub summary: SampleSummary,
    /// (components, cp) per sample, populated only when requested.
    pub points: Vec<(Vec<C64>, bool)>,
}

pub fn sample_region(
    basis: &BasisRef,
    translation: Option<&TranslationVector>,
    samples: u64,
    seed: u64,
    collect_points: bool,
) -> Result<SampleOutcome> {
    if samples == 0 {
        return Err(Error::InvalidVector("sample count must be >= 1".into()));
    }
    let mut cp_count = 0u64;
    let mut points = Vec::new();
    for index in 0..samples {
        let mut rng = sample_rng(seed, index);
        let v = random_compression_vector(basis, &mut rng);
        let report = match translation {
            Some(t) => certify_cp_translation(&v, t, DEFAULT_TOL)?,
            None => certify_cp(&v, DEFAULT_TOL)?,
        };
        if report.is_cp() {
            cp_count += 1;
        }
        if collect_points {
            points.push((v.components().to_vec(), report.is_cp()));
        }
    }
    let fraction = cp_count as f64 / samples as f64;
    let stderr = (fraction * (1.0 - fraction) / samples as f64).sqrt();
    Ok(SampleOutcome {
        summary: SampleSummary {
            fraction,
            stderr,
            samples,
            seed,
        },
        points,
    })
}
