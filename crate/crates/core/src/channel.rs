//! Polarization vectors, compression/translation vectors, channel
//! application and Choi-Jamiolkowski matrices.

use std::sync::Arc;

use crate::basis::{conjugate_pair_structure, BasisRef, OperatorBasis, PairStructure};
use crate::error::{Error, Result};
use crate::linalg::{self, C64, ComplexMatrix, TAU_EQ};

fn eq1_factor(n: usize, norm: f64) -> f64 {
    ((n * (n - 1)) as f64 / norm).sqrt()
}

fn check_pair_constraint_v(ps: &PairStructure, v: &[C64]) -> Result<()> {
    for r in &ps.records {
        let delta = (v[r.alpha] - v[r.beta].conj()).norm();
        if delta > TAU_EQ {
            return Err(Error::PairConstraint {
                index: r.alpha,
                delta,
            });
        }
    }
    Ok(())
}

fn check_pair_constraint_a(ps: &PairStructure, a: &[C64]) -> Result<()> {
    // M_alpha = gamma M_beta^dag  =>  a_alpha gamma = conj(a_beta)
    for r in &ps.records {
        let delta = (a[r.alpha] * r.gamma - a[r.beta].conj()).norm();
        if delta > TAU_EQ {
            return Err(Error::PairConstraint {
                index: r.alpha,
                delta,
            });
        }
    }
    Ok(())
}

/// Polarization vector of a state, a_0 = 1.
#[derive(Debug, Clone)]
pub struct PolarizationVector {
    basis: BasisRef,
    a: Vec<C64>,
}

impl PolarizationVector {
    pub fn new(basis: BasisRef, a: Vec<C64>) -> Result<Self> {
        if a.len() != basis.len() {
            return Err(Error::InvalidVector(format!(
                "expected {} components, got {}",
                basis.len(),
                a.len()
            )));
        }
        if (a[0] - C64::new(1.0, 0.0)).norm() != 0.0 {
            return Err(Error::InvalidVector("a_0 must be exactly 1".into()));
        }
        let ps = conjugate_pair_structure(&basis);
        check_pair_constraint_a(&ps, &a)?;
        Ok(Self { basis, a })
    }

    pub fn basis(&self) -> &BasisRef {
        &self.basis
    }

    pub fn components(&self) -> &[C64] {
        &self.a
    }

    /// Sum over alpha >= 1 of |a_alpha|^2; equals 1 exactly for pure states.
    pub fn norm(&self) -> f64 {
        self.a.iter().skip(1).map(|z| z.norm_sqr()).sum()
    }
}

/// Compression vector v of a depolarizing channel, v_0 = 1.
#[derive(Debug, Clone)]
pub struct CompressionVector {
    basis: BasisRef,
    v: Vec<C64>,
}

impl CompressionVector {
    pub fn new(basis: BasisRef, v: Vec<C64>) -> Result<Self> {
        if v.len() != basis.len() {
            return Err(Error::InvalidVector(format!(
                "expected {} components, got {}",
                basis.len(),
                v.len()
            )));
        }
        if (v[0] - C64::new(1.0, 0.0)).norm() != 0.0 {
            return Err(Error::InvalidVector("v_0 must be exactly 1".into()));
        }
        let ps = conjugate_pair_structure(&basis);
        check_pair_constraint_v(&ps, &v)?;
        Ok(Self { basis, v })
    }

    /// Convenience constructor from real components.
    pub fn from_real(basis: BasisRef, v: &[f64]) -> Result<Self> {
        Self::new(basis, v.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn basis(&self) -> &BasisRef {
        &self.basis
    }

    pub fn components(&self) -> &[C64] {
        &self.v
    }

    /// Real parts, failing if any component has a non-negligible imaginary part.
    pub fn real_components(&self) -> Result<Vec<f64>> {
        for (index, z) in self.v.iter().enumerate() {
            if z.im.abs() > TAU_EQ {
                return Err(Error::NonRealCoefficient { index, im: z.im });
            }
        }
        Ok(self.v.iter().map(|z| z.re).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.v.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Translation vector t, t_0 = 0.
#[derive(Debug, Clone)]
pub struct TranslationVector {
    basis: BasisRef,
    t: Vec<C64>,
}

impl TranslationVector {
    pub fn new(basis: BasisRef, t: Vec<C64>) -> Result<Self> {
        if t.len() != basis.len() {
            return Err(Error::InvalidVector(format!(
                "expected {} components, got {}",
                basis.len(),
                t.len()
            )));
        }
        if t[0].norm() != 0.0 {
            return Err(Error::InvalidVector("t_0 must be exactly 0".into()));
        }
        let ps = conjugate_pair_structure(&basis);
        for r in &ps.records {
            let delta = (t[r.alpha] - t[r.beta].conj()).norm();
            if delta > TAU_EQ {
                return Err(Error::PairConstraint {
                    index: r.alpha,
                    delta,
                });
            }
        }
        Ok(Self { basis, t })
    }

    pub fn zero(basis: BasisRef) -> Self {
        let len = basis.len();
        Self {
            basis,
            t: vec![C64::new(0.0, 0.0); len],
        }
    }

    pub fn basis(&self) -> &BasisRef {
        &self.basis
    }

    pub fn components(&self) -> &[C64] {
        &self.t
    }
}

/// Choi-Jamiolkowski matrix J(Phi) with a descriptor of its source channel.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    pub matrix: ComplexMatrix,
    pub source: String,
}

impl ChoiMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// rho = (1/N)(I + sum sqrt(N(N-1)/tr(M^dag M)) a_alpha M_alpha).
pub fn density_from_polarization(a: &PolarizationVector) -> ComplexMatrix {
    let b = a.basis();
    let n = b.n();
    let mut rho = ComplexMatrix::identity(n);
    for alpha in 1..b.len() {
        let coeff = a.components()[alpha] * eq1_factor(n, b.norm(alpha));
        rho = rho.add(&b.element(alpha).scale(coeff)).unwrap();
    }
    rho.scale(C64::new(1.0 / n as f64, 0.0))
}

/// Inverts Eq. (1) by trace-orthogonality.
pub fn polarization_from_density(rho: &ComplexMatrix, basis: BasisRef) -> Result<PolarizationVector> {
    let n = basis.n();
    if rho.dim() != n {
        return Err(Error::DimensionMismatch(rho.dim(), n));
    }
    let trace = rho.trace();
    if (trace - C64::new(1.0, 0.0)).norm() > TAU_EQ {
        return Err(Error::InvalidVector(format!(
            "density matrix must have unit trace (got {trace})"
        )));
    }
    let mut a = Vec::with_capacity(basis.len());
    a.push(C64::new(1.0, 0.0));
    for alpha in 1..basis.len() {
        let inner = linalg::conj_transpose(basis.element(alpha))
            .mul(rho)?
            .trace();
        let norm = basis.norm(alpha);
        a.push(inner * (n as f64) / (((n * (n - 1)) as f64) * norm).sqrt());
    }
    PolarizationVector::new(basis, a)
}

/// Phi_v(rho): scales every polarization coefficient by v_alpha.
pub fn apply_depolarizing(v: &CompressionVector, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let b = v.basis();
    if rho.dim() != b.n() {
        return Err(Error::BasisMismatch(format!(
            "state dim {} vs basis dim {}",
            rho.dim(),
            b.n()
        )));
    }
    let mut out = ComplexMatrix::zeros(b.n());
    for alpha in 0..b.len() {
        let inner = linalg::conj_transpose(b.element(alpha)).mul(rho)?.trace();
        let coeff = v.components()[alpha] * inner / b.norm(alpha);
        out = out.add(&b.element(alpha).scale(coeff))?;
    }
    Ok(out)
}

/// J(Phi_v) = sum v_alpha (M_alpha (x) M_alpha^*) / tr(M^dag M).
pub fn choi_of_depolarizing(v: &CompressionVector) -> ChoiMatrix {
    let b = v.basis();
    let mut j = ComplexMatrix::zeros(b.n() * b.n());
    for alpha in 0..b.len() {
        let term = linalg::kron(b.element(alpha), &b.element(alpha).conj());
        let coeff = v.components()[alpha] / b.norm(alpha);
        j = j.add(&term.scale(coeff)).unwrap();
    }
    ChoiMatrix {
        matrix: j,
        source: format!("depolarizing({}, n={})", b.kind().as_str(), b.n()),
    }
}

/// Definitional Choi matrix sum_{jk} Phi(|j><k|) (x) |j><k| of any map.
pub fn choi_from_map<F>(n: usize, mut phi: F) -> Result<ChoiMatrix>
where
    F: FnMut(&ComplexMatrix) -> Result<ComplexMatrix>,
{
    let mut j = ComplexMatrix::zeros(n * n);
    for row in 0..n {
        for col in 0..n {
            let mut e = ComplexMatrix::zeros(n);
            e.set(row, col, C64::new(1.0, 0.0));
            let image = phi(&e)?;
            if image.dim() != n {
                return Err(Error::DimensionMismatch(image.dim(), n));
            }
            j = j.add(&linalg::kron(&image, &e))?;
        }
    }
    Ok(ChoiMatrix {
        matrix: j,
        source: "definitional".into(),
    })
}

/// Choi matrix of the conjugation channel rho -> m^dag rho m.
pub fn choi_of_conjugation(m: &ComplexMatrix) -> Result<ChoiMatrix> {
    let dag = linalg::conj_transpose(m);
    let n = m.dim();
    let mut choi = choi_from_map(n, |e| dag.mul(e)?.mul(m))?;
    choi.source = "conjugation".into();
    Ok(choi)
}

/// Projects a Choi matrix back onto compression coefficients; the residual is
/// nonzero when the channel is not depolarizing with respect to the basis.
pub fn extract_compression_vector(
    j: &ChoiMatrix,
    basis: &OperatorBasis,
) -> Result<(Vec<C64>, f64)> {
    let n = basis.n();
    if j.dim() != n * n {
        return Err(Error::DimensionMismatch(j.dim(), n * n));
    }
    let mut v = Vec::with_capacity(basis.len());
    let mut recon = ComplexMatrix::zeros(n * n);
    for beta in 0..basis.len() {
        let term = linalg::kron(basis.element(beta), &basis.element(beta).conj());
        // tr((M (x) M^*)^dag (M (x) M^*)) = tr(M^dag M) tr((M^*)^dag M^*) = norm^2
        let inner = linalg::conj_transpose(&term).mul(&j.matrix)?.trace();
        let coeff = inner / (basis.norm(beta) * basis.norm(beta));
        // normalized so that extract(choi(v)) = v
        let v_beta = coeff * basis.norm(beta);
        recon = recon.add(&term.scale(v_beta / basis.norm(beta)))?;
        v.push(v_beta);
    }
    let residual = j.matrix.sub(&recon)?.max_abs();
    Ok((v, residual))
}

/// J(Phi_{v,t}) per the compress-then-translate construction.
pub fn choi_of_translation_channel(
    v: &CompressionVector,
    t: &TranslationVector,
) -> Result<ChoiMatrix> {
    let b = v.basis();
    if !b.same_space(t.basis()) {
        return Err(Error::BasisMismatch(
            "compression and translation vectors use different bases".into(),
        ));
    }
    let n = b.n();
    let identity = ComplexMatrix::identity(n);
    let mut j = ComplexMatrix::zeros(n * n);
    for alpha in 0..b.len() {
        let norm = b.norm(alpha);
        let mut right = b
            .element(alpha)
            .conj()
            .scale(v.components()[alpha] / norm);
        if alpha > 0 {
            let t_coeff = t.components()[alpha] * (eq1_factor(n, norm) / n as f64);
            right = right.add(&identity.scale(t_coeff))?;
        }
        j = j.add(&linalg::kron(b.element(alpha), &right))?;
    }
    Ok(ChoiMatrix {
        matrix: j,
        source: format!("translation({}, n={})", b.kind().as_str(), n),
    })
}

/// Phi_{v,t}(rho): polarization coefficients become v_alpha a_alpha + t_alpha.
pub fn apply_translation_channel(
    v: &CompressionVector,
    t: &TranslationVector,
    rho: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let b = v.basis();
    if !b.same_space(t.basis()) {
        return Err(Error::BasisMismatch(
            "compression and translation vectors use different bases".into(),
        ));
    }
    let compressed = apply_depolarizing(v, rho)?;
    let n = b.n();
    let mut out = compressed;
    for alpha in 1..b.len() {
        let coeff = t.components()[alpha] * (eq1_factor(n, b.norm(alpha)) / n as f64);
        out = out.add(&b.element(alpha).scale(coeff))?;
    }
    Ok(out)
}

// --- JSON interchange -------------------------------------------------------

use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct ChannelJson {
    basis: serde_json::Value,
    v: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    t: Option<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
struct BasisSelectorJson {
    kind: String,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    d: Option<usize>,
}

fn basis_from_selector(value: &serde_json::Value) -> Result<OperatorBasis> {
    if value.get("elements").is_some() {
        return crate::basis::basis_from_json(value);
    }
    let sel: BasisSelectorJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    match sel.kind.as_str() {
        "pauli" => {
            let d = match (sel.d, sel.n) {
                (Some(d), _) => d,
                (None, Some(n)) => {
                    let d = n.trailing_zeros() as usize;
                    if 1usize << d != n {
                        return Err(Error::Parse("pauli selector requires N = 2^d".into()));
                    }
                    d
                }
                _ => return Err(Error::Parse("pauli selector requires d or n".into())),
            };
            crate::basis::pauli_basis(d)
        }
        "gellmann" => crate::basis::gellmann_basis(
            sel.n.ok_or_else(|| Error::Parse("gellmann selector requires n".into()))?,
        ),
        "heisenberg-weyl" | "hw" => crate::basis::hw_basis(
            sel.n.ok_or_else(|| Error::Parse("hw selector requires n".into()))?,
        ),
        other => Err(Error::Parse(format!("unknown basis kind {other}"))),
    }
}

pub fn channel_to_json(v: &CompressionVector, t: Option<&TranslationVector>) -> serde_json::Value {
    let b = v.basis();
    let basis_json = match b.kind() {
        crate::basis::BasisKind::Custom => crate::basis::basis_to_json(b),
        crate::basis::BasisKind::Pauli { d } => {
            serde_json::json!({"kind": "pauli", "n": b.n(), "d": d})
        }
        kind => serde_json::json!({"kind": kind.as_str(), "n": b.n()}),
    };
    serde_json::to_value(ChannelJson {
        basis: basis_json,
        v: v.components().iter().map(|z| [z.re, z.im]).collect(),
        t: t.map(|t| t.components().iter().map(|z| [z.re, z.im]).collect()),
    })
    .expect("channel serialization cannot fail")
}

pub fn channel_from_json(
    value: &serde_json::Value,
) -> Result<(CompressionVector, Option<TranslationVector>)> {
    let parsed: ChannelJson =
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let basis = Arc::new(basis_from_selector(&parsed.basis)?);
    let v = CompressionVector::new(
        basis.clone(),
        parsed.v.iter().map(|&[re, im]| C64::new(re, im)).collect(),
    )?;
    let t = parsed
        .t
        .map(|t| {
            TranslationVector::new(
                basis.clone(),
                t.iter().map(|&[re, im]| C64::new(re, im)).collect(),
            )
        })
        .transpose()?;
    Ok((v, t))
}
