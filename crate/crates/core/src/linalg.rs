//! Dense complex linear algebra: Kronecker products, commutators, a cyclic
//! Jacobi hermitian eigensolver, Faddeev-LeVerrier characteristic polynomial
//! coefficients and permutation/block utilities.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Absolute tolerance for structural equality checks.
pub const TAU_EQ: f64 = 1e-10;
/// Absolute tolerance for spectral assertions.
pub const TAU_EIG: f64 = 1e-9;
/// Off-diagonal convergence threshold for the Jacobi sweeps.
pub const TAU_JACOBI: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Dense square complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "dim must be >= 1");
        Self {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "matrix must be square");
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn diag(entries: &[C64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        Self::diag(&entries.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        self.data[i * self.dim + j] = value;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        Ok(out)
    }

    pub fn scale(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= factor;
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a = a.conj();
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from hermiticity, with the worst entry location.
    pub fn hermiticity_violation(&self) -> (usize, usize, f64) {
        let mut worst = (0, 0, 0.0);
        for i in 0..self.dim {
            for j in i..self.dim {
                let delta = (self.get(i, j) - self.get(j, i).conj()).norm();
                if delta > worst.2 {
                    worst = (i, j, delta);
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_violation().2 <= tol
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim
            && self
                .data
                .iter()
                .zip(other.data.iter())
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// Kronecker product: entry ((i*db+k),(j*db+l)) = a_ij * b_kl.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let da = a.dim();
    let db = b.dim();
    let mut out = ComplexMatrix::zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            let aij = a.get(i, j);
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out.set(i * db + k, j * db + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// Conjugate transpose.
pub fn conj_transpose(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, a.get(j, i).conj());
        }
    }
    out
}

/// Max-entry magnitude of the commutator ab - ba.
pub fn commutator_norm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    Ok(ab.sub(&ba)?.max_abs())
}

/// Finds theta in (-pi, pi] with ab = e^{i theta} ba, if such a phase exists.
///
/// The candidate phase is read off the largest-magnitude entry of ab and then
/// verified against every entry.
pub fn phase_commute(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<Option<f64>> {
    if a.max_abs() == 0.0 || b.max_abs() == 0.0 {
        return Err(Error::ZeroMatrix);
    }
    let ab = a.mul(b)?;
    let ba = b.mul(a)?;
    let scale = ab.max_abs();
    if scale == 0.0 {
        // both products vanish identically
        return Ok(if ba.max_abs() == 0.0 { Some(0.0) } else { None });
    }
    let n = ab.dim();
    let mut best = (0, 0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let m = ab.get(i, j).norm();
            if m > best.2 {
                best = (i, j, m);
            }
        }
    }
    let denom = ba.get(best.0, best.1);
    if denom.norm() <= tol * scale {
        return Ok(None);
    }
    let ratio = ab.get(best.0, best.1) / denom;
    let mut theta = ratio.arg();
    if theta <= -std::f64::consts::PI {
        theta = std::f64::consts::PI;
    }
    let phase = C64::from_polar(1.0, theta);
    let resid = ab.sub(&ba.scale(phase))?.max_abs();
    if resid <= tol * scale {
        Ok(Some(theta))
    } else {
        Ok(None)
    }
}

/// Eigenvalues (descending) and optional unitary of eigencolumns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<ComplexMatrix>,
}

impl Spectrum {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi with complex rotations.
pub fn hermitian_eigensystem(h: &ComplexMatrix) -> Result<Spectrum> {
    let (row, col, delta) = h.hermiticity_violation();
    if delta > TAU_EQ {
        return Err(Error::NotHermitian { row, col, delta });
    }
    let n = h.dim();
    let mut a = h.clone();
    // symmetrize so roundoff asymmetry cannot drift through the sweeps
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
        let d = a.get(i, i);
        a.set(i, i, C64::new(d.re, 0.0));
    }
    let mut v = ComplexMatrix::identity(n);

    let mut converged = n < 2;
    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off <= TAU_JACOBI {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= TAU_JACOBI * 0.1 {
                    continue;
                }
                let phi = apq.arg();
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                // real rotation angle for the phase-aligned 2x2 block
                let tau = (app - aqq) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let em = C64::from_polar(1.0, -phi);
                let ep = C64::from_polar(1.0, phi);
                // A <- A U with U = [[c, -s], [s e^{-i phi}, c e^{-i phi}]]
                for i in 0..n {
                    let aip = a.get(i, p);
                    let aiq = a.get(i, q);
                    a.set(i, p, aip * c + aiq * (em * s));
                    a.set(i, q, aip * (-s) + aiq * (em * c));
                }
                // A <- U^dag A
                for i in 0..n {
                    let api = a.get(p, i);
                    let aqi = a.get(q, i);
                    a.set(p, i, api * c + aqi * (ep * s));
                    a.set(q, i, api * (-s) + aqi * (ep * c));
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * c + viq * (em * s));
                    v.set(i, q, vip * (-s) + viq * (em * c));
                }
            }
        }
    }
    if !converged {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).norm());
            }
        }
        if off > TAU_JACOBI {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let values: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| {
        let (vi, vj) = (values[i], values[j]);
        if (vi - vj).abs() > TAU_JACOBI {
            vj.partial_cmp(&vi).unwrap()
        } else {
            // deterministic tie-break: eigenvector lexicographic order
            for k in 0..n {
                let (zi, zj) = (v.get(k, i), v.get(k, j));
                match zi.re.partial_cmp(&zj.re).unwrap() {
                    std::cmp::Ordering::Equal => {}
                    ord => return ord,
                }
                match zi.im.partial_cmp(&zj.im).unwrap() {
                    std::cmp::Ordering::Equal => {}
                    ord => return ord,
                }
            }
            std::cmp::Ordering::Equal
        }
    });
    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let mut sorted_vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            sorted_vectors.set(row, col, v.get(row, src));
        }
    }
    Ok(Spectrum {
        values: sorted_values,
        vectors: Some(sorted_vectors),
    })
}

/// Elementary symmetric functions S_0..S_n of the spectrum via the
/// Faddeev-LeVerrier trace recursion (dim <= 8); larger matrices fall back to
/// the eigensolver, whose accuracy wins with dimension.
pub fn charpoly_coeffs(k: &ComplexMatrix) -> Result<Vec<f64>> {
    let (row, col, delta) = k.hermiticity_violation();
    if delta > TAU_EQ {
        return Err(Error::NotHermitian { row, col, delta });
    }
    let n = k.dim();
    if n > 8 {
        let spectrum = hermitian_eigensystem(k)?;
        return Ok(elementary_symmetric(&spectrum.values));
    }
    let mut coeffs = vec![1.0f64];
    let mut m = ComplexMatrix::identity(n);
    for step in 1..=n {
        m = k.mul(&m)?;
        let c = m.trace().re / step as f64;
        // the recursion's coefficients alternate in sign against the
        // elementary symmetric functions: S_k = (-1)^(k+1) c_k
        coeffs.push(if step % 2 == 0 { -c } else { c });
        for i in 0..n {
            let d = m.get(i, i);
            m.set(i, i, d - C64::new(c, 0.0));
        }
    }
    Ok(coeffs)
}

/// Elementary symmetric polynomials e_0..e_n of the given values.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![0.0; values.len() + 1];
    coeffs[0] = 1.0;
    for (i, &lambda) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            coeffs[j] += lambda * coeffs[j - 1];
        }
    }
    coeffs
}

/// Conjugation by a permutation matrix: result_ij = m_{perm(i), perm(j)}.
pub fn permute_conjugate(m: &ComplexMatrix, perm: &[usize]) -> Result<ComplexMatrix> {
    let n = m.dim();
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} for dimension {}",
            perm.len(),
            n
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(format!("bad image {p}")));
        }
        seen[p] = true;
    }
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, m.get(perm[i], perm[j]));
        }
    }
    Ok(out)
}

/// Submatrix on rows x rows.
pub fn extract_block(m: &ComplexMatrix, rows: &[usize]) -> Result<ComplexMatrix> {
    let n = m.dim();
    let mut seen = vec![false; n];
    for &r in rows {
        if r >= n {
            return Err(Error::IndexOutOfRange { index: r, dim: n });
        }
        if seen[r] {
            return Err(Error::InvalidPermutation(format!("duplicate index {r}")));
        }
        seen[r] = true;
    }
    let k = rows.len();
    let mut out = ComplexMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            out.set(i, j, m.get(rows[i], rows[j]));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ])
    }

    fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
            vec![C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
        ])
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::diag_real(&[1.0, -1.0])
    }

    #[test]
    fn kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert!(kron(&i2, &i2).approx_eq(&ComplexMatrix::identity(4), 0.0));
    }

    #[test]
    fn kron_zz_diagonal() {
        let zz = kron(&pauli_z(), &pauli_z());
        assert!(zz.approx_eq(&ComplexMatrix::diag_real(&[1.0, -1.0, -1.0, 1.0]), 0.0));
    }

    #[test]
    fn kron_xx_antidiagonal() {
        let xx = kron(&pauli_x(), &pauli_x());
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx.get(i, j), C64::new(expected, 0.0));
            }
        }
    }

    #[test]
    fn conj_transpose_cases() {
        let i2 = ComplexMatrix::identity(2);
        assert!(conj_transpose(&i2).approx_eq(&i2, 0.0));
        assert!(conj_transpose(&pauli_y()).approx_eq(&pauli_y(), 0.0));
        let xz = pauli_x().mul(&pauli_z()).unwrap();
        let zx = pauli_z().mul(&pauli_x()).unwrap();
        assert!(conj_transpose(&xz).approx_eq(&zx, 0.0));
    }

    #[test]
    fn commutator_cases() {
        let zz = kron(&pauli_z(), &pauli_z().conj());
        let xx = kron(&pauli_x(), &pauli_x().conj());
        assert!(commutator_norm(&zz, &xx).unwrap() <= 1e-15);
        assert!(commutator_norm(&xx, &xx).unwrap() == 0.0);
        assert!(commutator_norm(&xx, &ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn phase_commute_qubit() {
        let theta = phase_commute(&pauli_x(), &pauli_z(), 1e-10).unwrap().unwrap();
        assert!((theta - std::f64::consts::PI).abs() < 1e-12);
        let theta = phase_commute(&pauli_x(), &pauli_x(), 1e-10).unwrap().unwrap();
        assert_eq!(theta, 0.0);
        assert!(phase_commute(&ComplexMatrix::zeros(2), &pauli_x(), 1e-10).is_err());
    }

    #[test]
    fn eigensystem_diagonal() {
        let m = ComplexMatrix::diag_real(&[3.0, 1.0, 2.0]);
        let s = hermitian_eigensystem(&m).unwrap();
        assert_eq!(s.values, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn eigensystem_pauli_x() {
        let s = hermitian_eigensystem(&pauli_x()).unwrap();
        assert!((s.values[0] - 1.0).abs() < 1e-12);
        assert!((s.values[1] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigensystem_rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 1, C64::new(1.0, 0.0));
        let err = hermitian_eigensystem(&m).unwrap_err();
        match err {
            Error::NotHermitian { delta, .. } => assert!(delta > 0.5),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn eigensystem_reconstruction() {
        // random-ish fixed hermitian 4x4
        let mut h = ComplexMatrix::zeros(4);
        let vals = [
            (0, 0, 1.0, 0.0),
            (1, 1, -0.5, 0.0),
            (2, 2, 0.25, 0.0),
            (3, 3, 2.0, 0.0),
            (0, 1, 0.3, 0.7),
            (0, 2, -0.2, 0.1),
            (0, 3, 0.0, -0.9),
            (1, 2, 0.5, 0.5),
            (1, 3, -0.1, 0.0),
            (2, 3, 0.8, -0.3),
        ];
        for &(i, j, re, im) in &vals {
            h.set(i, j, C64::new(re, im));
            if i != j {
                h.set(j, i, C64::new(re, -im));
            }
        }
        let s = hermitian_eigensystem(&h).unwrap();
        let v = s.vectors.as_ref().unwrap();
        let lambda = ComplexMatrix::diag_real(&s.values);
        let recon = v.mul(&lambda).unwrap().mul(&conj_transpose(v)).unwrap();
        assert!(recon.approx_eq(&h, TAU_EIG));
        let sum: f64 = s.values.iter().sum();
        assert!((sum - h.trace().re).abs() < TAU_EIG);
    }

    #[test]
    fn charpoly_examples() {
        let s = charpoly_coeffs(&ComplexMatrix::diag_real(&[1.0, 2.0])).unwrap();
        assert!((s[0] - 1.0).abs() < 1e-12);
        assert!((s[1] - 3.0).abs() < 1e-12);
        assert!((s[2] - 2.0).abs() < 1e-12);

        let s = charpoly_coeffs(&ComplexMatrix::zeros(3)).unwrap();
        assert_eq!(s, vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn charpoly_matches_polynomial_expansion_oracle() {
        // oracle: multiply out (t - 2)(t + 1)(t - 3) coefficient by coefficient
        let roots = [2.0, -1.0, 3.0];
        let expected = elementary_symmetric(&roots);
        assert_eq!(expected, vec![1.0, 4.0, 1.0, -6.0]);
        let s = charpoly_coeffs(&ComplexMatrix::diag_real(&roots)).unwrap();
        for (a, b) in s.iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn permute_conjugate_cases() {
        let m = ComplexMatrix::diag_real(&[2.0, 5.0]);
        let id = permute_conjugate(&m, &[0, 1]).unwrap();
        assert!(id.approx_eq(&m, 0.0));
        let sw = permute_conjugate(&m, &[1, 0]).unwrap();
        assert!(sw.approx_eq(&ComplexMatrix::diag_real(&[5.0, 2.0]), 0.0));
        assert!(permute_conjugate(&m, &[0, 0]).is_err());
        assert!(permute_conjugate(&m, &[0, 2]).is_err());
    }

    #[test]
    fn extract_block_cases() {
        let m = ComplexMatrix::diag_real(&[2.0, 5.0]);
        assert!(extract_block(&m, &[0, 1]).unwrap().approx_eq(&m, 0.0));
        let b = extract_block(&m, &[0]).unwrap();
        assert_eq!(b.dim(), 1);
        assert_eq!(b.get(0, 0), C64::new(2.0, 0.0));
        assert!(extract_block(&m, &[2]).is_err());
    }
}
