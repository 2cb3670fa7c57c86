//! Trace-free, trace-orthogonal operator bases: Pauli tensor products,
//! Gell-Mann matrices, Heisenberg-Weyl displacement operators and custom
//! bases loaded from JSON, plus the conjugate-pair structure and
//! change-of-basis matrices.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{self, C64, ComplexMatrix, TAU_EQ};

/// Largest system dimension accepted by the Pauli constructor.
pub const PAULI_DIM_CAP: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BasisKind {
    Pauli { d: usize },
    GellMann,
    HeisenbergWeyl,
    Custom,
}

impl BasisKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BasisKind::Pauli { .. } => "pauli",
            BasisKind::GellMann => "gellmann",
            BasisKind::HeisenbergWeyl => "heisenberg-weyl",
            BasisKind::Custom => "custom",
        }
    }
}

/// Ordered list of N^2 basis matrices with cached Hilbert-Schmidt norms.
#[derive(Debug, Clone)]
pub struct OperatorBasis {
    n: usize,
    elements: Vec<ComplexMatrix>,
    norms: Vec<f64>,
    labels: Vec<String>,
    kind: BasisKind,
}

impl OperatorBasis {
    fn new(n: usize, elements: Vec<ComplexMatrix>, labels: Vec<String>, kind: BasisKind) -> Self {
        assert_eq!(elements.len(), n * n);
        let norms = elements
            .iter()
            .map(|m| {
                let dag = linalg::conj_transpose(m);
                dag.mul(m).unwrap().trace().re
            })
            .collect();
        Self {
            n,
            elements,
            norms,
            labels,
            kind,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn element(&self, alpha: usize) -> &ComplexMatrix {
        &self.elements[alpha]
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn norm(&self, alpha: usize) -> f64 {
        self.norms[alpha]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn label(&self, alpha: usize) -> &str {
        &self.labels[alpha]
    }

    pub fn kind(&self) -> &BasisKind {
        &self.kind
    }

    pub fn same_space(&self, other: &OperatorBasis) -> bool {
        self.n == other.n && self.kind == other.kind
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.elements.iter().all(|m| {
            linalg::conj_transpose(m)
                .mul(m)
                .unwrap()
                .approx_eq(&ComplexMatrix::identity(self.n), tol)
        })
    }
}

const PAULI_LABELS: [&str; 4] = ["I", "X", "Y", "Z"];

fn single_qubit_pauli(alpha: usize) -> ComplexMatrix {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    match alpha {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows(&[vec![o, l], vec![l, o]]),
        2 => ComplexMatrix::from_rows(&[
            vec![o, C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), o],
        ]),
        3 => ComplexMatrix::diag_real(&[1.0, -1.0]),
        _ => unreachable!(),
    }
}

/// Tensor-product Pauli basis for d qubits; alpha_1 is the least significant
/// base-4 digit and the leftmost tensor factor.
pub fn pauli_basis(d: usize) -> Result<OperatorBasis> {
    if d == 0 {
        return Err(Error::InvalidBasis("pauli basis requires d >= 1".into()));
    }
    let n = 1usize << d;
    if n > PAULI_DIM_CAP {
        return Err(Error::InvalidBasis(format!(
            "pauli basis capped at N <= {PAULI_DIM_CAP} (got N = {n})"
        )));
    }
    let mut elements = Vec::with_capacity(n * n);
    let mut labels = Vec::with_capacity(n * n);
    for alpha in 0..n * n {
        let mut m = single_qubit_pauli(alpha & 3);
        let mut label = String::from(PAULI_LABELS[alpha & 3]);
        for j in 2..=d {
            let digit = (alpha >> (2 * (j - 1))) & 3;
            m = linalg::kron(&m, &single_qubit_pauli(digit));
            label.push('x');
            label.push_str(PAULI_LABELS[digit]);
        }
        elements.push(m);
        labels.push(label);
    }
    Ok(OperatorBasis::new(n, elements, labels, BasisKind::Pauli { d }))
}

/// Gell-Mann basis in the order (I, Z_1..Z_{N-1}, X_{01}, Y_{01}, ...),
/// with the flat index alpha = N(1+2j) + 2k - (j+1)(j+2) for X_{jk}.
pub fn gellmann_basis(n: usize) -> Result<OperatorBasis> {
    if n < 2 {
        return Err(Error::InvalidBasis("gellmann basis requires n >= 2".into()));
    }
    let count = n * n;
    let zero = ComplexMatrix::zeros(n);
    let mut elements = vec![zero; count];
    let mut labels = vec![String::new(); count];

    elements[0] = ComplexMatrix::identity(n);
    labels[0] = "I".into();
    for l in 1..n {
        let mut z = ComplexMatrix::zeros(n);
        let factor = (2.0 / (l as f64 * (l + 1) as f64)).sqrt();
        for r in 0..l {
            z.set(r, r, C64::new(factor, 0.0));
        }
        z.set(l, l, C64::new(-factor * l as f64, 0.0));
        elements[l] = z;
        labels[l] = format!("Z{l}");
    }
    for j in 0..n - 1 {
        for k in j + 1..n {
            let alpha = n * (1 + 2 * j) + 2 * k - (j + 1) * (j + 2);
            let mut x = ComplexMatrix::zeros(n);
            x.set(j, k, C64::new(1.0, 0.0));
            x.set(k, j, C64::new(1.0, 0.0));
            let mut y = ComplexMatrix::zeros(n);
            y.set(j, k, C64::new(0.0, -1.0));
            y.set(k, j, C64::new(0.0, 1.0));
            elements[alpha] = x;
            labels[alpha] = format!("X{j}{k}");
            elements[alpha + 1] = y;
            labels[alpha + 1] = format!("Y{j}{k}");
        }
    }
    Ok(OperatorBasis::new(n, elements, labels, BasisKind::GellMann))
}

/// Heisenberg-Weyl basis M_{jk} = X^j Z^k with alpha = jN + k; X lowers the
/// computational index (X = sum_j |j><j+1|) and Z is the clock matrix.
pub fn hw_basis(n: usize) -> Result<OperatorBasis> {
    if n < 2 {
        return Err(Error::InvalidBasis(
            "heisenberg-weyl basis requires n >= 2".into(),
        ));
    }
    let omega = 2.0 * PI / n as f64;
    let mut elements = Vec::with_capacity(n * n);
    let mut labels = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in 0..n {
            // (X^j Z^k)_{r,c}: X^j maps |r> -> <r+j| pattern, Z^k scales by omega^{ck}
            let mut m = ComplexMatrix::zeros(n);
            for r in 0..n {
                let c = (r + j) % n;
                m.set(r, c, C64::from_polar(1.0, omega * (c * k) as f64));
            }
            elements.push(m);
            labels.push(format!("X^{j}Z^{k}"));
        }
    }
    Ok(OperatorBasis::new(
        n,
        elements,
        labels,
        BasisKind::HeisenbergWeyl,
    ))
}

/// Wrap user-supplied matrices as a custom basis (validated separately).
pub fn custom_basis(n: usize, elements: Vec<ComplexMatrix>) -> Result<OperatorBasis> {
    if elements.len() != n * n {
        return Err(Error::InvalidBasis(format!(
            "expected {} elements for dimension {n}, got {}",
            n * n,
            elements.len()
        )));
    }
    if elements.iter().any(|m| m.dim() != n) {
        return Err(Error::InvalidBasis("element dimension mismatch".into()));
    }
    if elements.iter().any(|m| !m.is_finite()) {
        return Err(Error::InvalidBasis("non-finite entry in element".into()));
    }
    let labels = (0..n * n).map(|a| format!("M{a}")).collect();
    Ok(OperatorBasis::new(n, elements, labels, BasisKind::Custom))
}

/// Worst violations of the three basis conditions plus linear independence.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub identity_deviation: f64,
    pub worst_trace: (usize, f64),
    pub worst_orthogonality: (usize, usize, f64),
    pub min_norm: f64,
    pub tolerance: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.identity_deviation <= self.tolerance
            && self.worst_trace.1 <= self.tolerance
            && self.worst_orthogonality.2 <= self.tolerance
            && self.min_norm > self.tolerance
    }
}

pub fn validate_basis(b: &OperatorBasis) -> ValidationReport {
    let n = b.n();
    let identity_deviation = b
        .element(0)
        .sub(&ComplexMatrix::identity(n))
        .map(|d| d.max_abs())
        .unwrap_or(f64::INFINITY);
    let mut worst_trace = (0, 0.0);
    for alpha in 1..b.len() {
        let t = b.element(alpha).trace().norm();
        if t > worst_trace.1 {
            worst_trace = (alpha, t);
        }
    }
    let mut worst_orth = (0, 0, 0.0);
    for alpha in 0..b.len() {
        let dag = linalg::conj_transpose(b.element(alpha));
        for beta in alpha + 1..b.len() {
            let inner = dag.mul(b.element(beta)).unwrap().trace().norm();
            if inner > worst_orth.2 {
                worst_orth = (alpha, beta, inner);
            }
        }
    }
    let min_norm = b.norms().iter().copied().fold(f64::INFINITY, f64::min);
    ValidationReport {
        identity_deviation,
        worst_trace,
        worst_orthogonality: worst_orth,
        min_norm,
        tolerance: TAU_EQ,
    }
}

/// Record M_alpha = gamma * M_beta^dag.
#[derive(Debug, Clone, Copy)]
pub struct PairRecord {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: C64,
}

/// Conjugate-pair structure of a basis: which indices are hermitian up to a
/// phase and which come in conjugate pairs spanning a complex plane.
#[derive(Debug, Clone)]
pub struct PairStructure {
    pub records: Vec<PairRecord>,
    pub unmatched: Vec<usize>,
    pub real_axes: usize,
    pub complex_planes: usize,
}

impl PairStructure {
    pub fn partner(&self, alpha: usize) -> Option<usize> {
        self.records.iter().find(|r| r.alpha == alpha).map(|r| r.beta)
    }

    pub fn record(&self, alpha: usize) -> Option<&PairRecord> {
        self.records.iter().find(|r| r.alpha == alpha)
    }

    pub fn is_partial(&self) -> bool {
        !self.unmatched.is_empty()
    }

    /// Ordered real coordinates of a compression/polarization vector with
    /// v_0 suppressed: one coordinate per real axis, (re, im) per plane.
    pub fn real_coordinates(&self, v: &[C64]) -> Vec<f64> {
        let mut coords = Vec::new();
        for r in &self.records {
            if r.alpha == 0 {
                continue;
            }
            if r.beta == r.alpha {
                coords.push(v[r.alpha].re);
            } else if r.alpha < r.beta {
                coords.push(v[r.alpha].re);
                coords.push(v[r.alpha].im);
            }
        }
        coords
    }
}

/// Finds, for each alpha, the unique beta and unimodular gamma with
/// M_alpha = gamma M_beta^dag.
pub fn conjugate_pair_structure(b: &OperatorBasis) -> PairStructure {
    let mut records = Vec::new();
    let mut unmatched = Vec::new();
    for alpha in 0..b.len() {
        let m = b.element(alpha);
        let mut found = None;
        for beta in 0..b.len() {
            let dag = linalg::conj_transpose(b.element(beta));
            // M_alpha = gamma M_beta^dag  =>  tr(M_beta M_alpha) = gamma ||M_beta||^2
            let gamma = b.element(beta).mul(m).unwrap().trace() / b.norm(beta);
            if gamma.norm() <= TAU_EQ {
                continue;
            }
            if m.sub(&dag.scale(gamma)).unwrap().max_abs() <= TAU_EQ {
                found = Some(PairRecord { alpha, beta, gamma });
                break;
            }
        }
        match found {
            Some(r) => records.push(r),
            None => unmatched.push(alpha),
        }
    }
    let real_axes = records
        .iter()
        .filter(|r| r.alpha >= 1 && r.beta == r.alpha)
        .count();
    let paired = records
        .iter()
        .filter(|r| r.alpha >= 1 && r.beta != r.alpha)
        .count();
    PairStructure {
        records,
        unmatched,
        real_axes,
        complex_planes: paired / 2,
    }
}

/// Change-of-basis matrix u_{alpha beta} = tr(L_beta^dag M_alpha) / sqrt(...),
/// unitary for any pair of valid bases.
pub fn change_of_basis_matrix(m: &OperatorBasis, l: &OperatorBasis) -> Result<ComplexMatrix> {
    if m.n() != l.n() {
        return Err(Error::DimensionMismatch(m.n(), l.n()));
    }
    let count = m.len();
    let mut u = ComplexMatrix::zeros(count);
    for alpha in 0..count {
        for beta in 0..count {
            let inner = linalg::conj_transpose(l.element(beta))
                .mul(m.element(alpha))?
                .trace();
            let scale = (l.norm(beta) * m.norm(alpha)).sqrt();
            u.set(alpha, beta, inner / scale);
        }
    }
    Ok(u)
}

// --- JSON interchange -------------------------------------------------------

use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct BasisJson {
    n: usize,
    kind: String,
    elements: Vec<Vec<[f64; 2]>>,
}

pub fn basis_to_json(b: &OperatorBasis) -> serde_json::Value {
    let elements = b
        .elements()
        .iter()
        .map(|m| {
            m.entries()
                .iter()
                .map(|z| [z.re, z.im])
                .collect::<Vec<_>>()
        })
        .collect();
    serde_json::to_value(BasisJson {
        n: b.n(),
        kind: b.kind().as_str().to_string(),
        elements,
    })
    .expect("basis serialization cannot fail")
}

pub fn basis_from_json(value: &serde_json::Value) -> Result<OperatorBasis> {
    let parsed: BasisJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let n = parsed.n;
    if n == 0 {
        return Err(Error::Parse("basis dimension must be positive".into()));
    }
    let mut elements = Vec::with_capacity(parsed.elements.len());
    for flat in &parsed.elements {
        if flat.len() != n * n {
            return Err(Error::Parse(format!(
                "element has {} entries, expected {}",
                flat.len(),
                n * n
            )));
        }
        let mut m = ComplexMatrix::zeros(n);
        for (idx, &[re, im]) in flat.iter().enumerate() {
            m.set(idx / n, idx % n, C64::new(re, im));
        }
        elements.push(m);
    }
    let basis = custom_basis(n, elements)?;
    // keep the declared kind when it matches a named construction
    let kind = match parsed.kind.as_str() {
        "pauli" => {
            let d = n.trailing_zeros() as usize;
            if 1usize << d != n {
                return Err(Error::Parse("pauli kind requires N = 2^d".into()));
            }
            BasisKind::Pauli { d }
        }
        "gellmann" => BasisKind::GellMann,
        "heisenberg-weyl" => BasisKind::HeisenbergWeyl,
        _ => BasisKind::Custom,
    };
    let rebuilt = match &kind {
        BasisKind::Pauli { d } => pauli_basis(*d)?,
        BasisKind::GellMann => gellmann_basis(n)?,
        BasisKind::HeisenbergWeyl => hw_basis(n)?,
        BasisKind::Custom => return Ok(basis),
    };
    // a named kind must actually match the named construction
    for (a, b) in basis.elements().iter().zip(rebuilt.elements()) {
        if !a.approx_eq(b, TAU_EQ) {
            return Err(Error::Parse(format!(
                "elements do not match declared kind {}",
                parsed.kind
            )));
        }
    }
    Ok(rebuilt)
}

/// Shared handle used by channels and geometry.
pub type BasisRef = Arc<OperatorBasis>;
