//! Dense complex-operator substrate: tensor products, partial traces,
//! Hermitian spectral calculus, and validity checks.
//!
//! All matrices are dense `nalgebra` matrices over `Complex<f64>`; dimensions
//! stay at desk scale (a few hundred at most), so there is no sparse path.
//! Eigendecompositions are returned sorted ascending with a deterministic
//! phase convention so that repeated runs produce identical bases.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;

pub type Complex64 = num_complex::Complex<f64>;
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Build a square matrix from row-major complex entries.
pub fn matrix_from_rows(dim: usize, entries: &[Complex64]) -> CMatrix {
    assert_eq!(entries.len(), dim * dim, "entry count must be dim^2");
    CMatrix::from_row_slice(dim, dim, entries)
}

/// Build a square matrix from row-major real entries.
pub fn matrix_from_real_rows(dim: usize, entries: &[f64]) -> CMatrix {
    let data: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    matrix_from_rows(dim, &data)
}

/// Diagonal matrix from real diagonal entries.
pub fn diagonal(entries: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        entries.len(),
        entries.iter().map(|&x| Complex64::new(x, 0.0)),
    ))
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Max-entrywise absolute value, `max_ij |a_ij|`.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Max-entrywise distance between two matrices of equal shape.
pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch in max_diff");
    max_norm(&(a - b))
}

/// `max_ij |(A - A†)_ij|`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_diff(m, &m.adjoint())
}

/// `max_ij |(U†U - I)_ij|`.
pub fn unitarity_residual(m: &CMatrix) -> f64 {
    let d = m.ncols();
    max_diff(&(m.adjoint() * m), &identity(d))
}

/// Commutator `[a, b] = ab - ba`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Kronecker product; dimensions multiply, `(a ⊗ b)[i·p+k, j·q+l] = a[i,j] b[k,l]`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Kronecker product of a list, left to right.
pub fn tensor_all(factors: &[&CMatrix]) -> CMatrix {
    assert!(!factors.is_empty(), "tensor_all needs at least one factor");
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = tensor(&out, f);
    }
    out
}

// ─── Composite spaces ────────────────────────────────────────────────

/// Ordered tensor-factor structure (system plus baths) with unique labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct CompositeSpace {
    factor_dims: Vec<usize>,
    factor_labels: Vec<String>,
}

impl CompositeSpace {
    pub fn new<S: Into<String>>(dims: Vec<usize>, labels: Vec<S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if dims.len() != labels.len() {
            return Err(Error::InvalidParameter(format!(
                "{} dims but {} labels",
                dims.len(),
                labels.len()
            )));
        }
        if dims.is_empty() {
            return Err(Error::InvalidParameter("empty composite space".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidParameter(format!("factor dimension {d}")));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(Self { factor_dims: dims, factor_labels: labels })
    }

    /// Single factor, no baths.
    pub fn single(dim: usize, label: impl Into<String>) -> Result<Self> {
        Self::new(vec![dim], vec![label.into()])
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn factor_labels(&self) -> &[String] {
        &self.factor_labels
    }

    pub fn num_factors(&self) -> usize {
        self.factor_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.factor_dims.iter().product()
    }

    pub fn factor_index(&self, label: &str) -> Result<usize> {
        self.factor_labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn factor_dim(&self, label: &str) -> Result<usize> {
        Ok(self.factor_dims[self.factor_index(label)?])
    }

    /// Lift an operator acting on one factor to the full space:
    /// identity on every other factor.
    pub fn embed(&self, label: &str, op: &CMatrix) -> Result<CMatrix> {
        let idx = self.factor_index(label)?;
        let d = self.factor_dims[idx];
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, actual: op.nrows() });
        }
        let before: usize = self.factor_dims[..idx].iter().product();
        let after: usize = self.factor_dims[idx + 1..].iter().product();
        let mut out = op.clone();
        if before > 1 {
            out = tensor(&identity(before), &out);
        }
        if after > 1 {
            out = tensor(&out, &identity(after));
        }
        Ok(out)
    }
}

/// Trace out every factor not named in `keep`. Kept factors stay in their
/// original order regardless of the order of `keep`.
pub fn partial_trace(rho: &CMatrix, space: &CompositeSpace, keep: &[&str]) -> Result<CMatrix> {
    let total = space.total_dim();
    if rho.nrows() != total || rho.ncols() != total {
        return Err(Error::DimensionMismatch { expected: total, actual: rho.nrows() });
    }
    let mut keep_flags = vec![false; space.num_factors()];
    for label in keep {
        keep_flags[space.factor_index(label)?] = true;
    }

    let dims = space.factor_dims();
    let n = dims.len();
    // Row-major strides: factor f advances the flat index by prod(dims[f+1..]).
    let mut strides = vec![1usize; n];
    for f in (0..n.saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * dims[f + 1];
    }
    let kept: Vec<usize> = (0..n).filter(|&f| keep_flags[f]).collect();
    let traced: Vec<usize> = (0..n).filter(|&f| !keep_flags[f]).collect();
    let kept_dim: usize = kept.iter().map(|&f| dims[f]).product();
    let traced_dim: usize = traced.iter().map(|&f| dims[f]).product();

    // Decompose a flat index over the listed factors (mixed radix, row-major).
    let offset = |factors: &[usize], mut idx: usize| -> usize {
        let mut off = 0;
        for &f in factors.iter().rev() {
            off += (idx % dims[f]) * strides[f];
            idx /= dims[f];
        }
        off
    };

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for a in 0..kept_dim {
        let row_base = offset(&kept, a);
        for b in 0..kept_dim {
            let col_base = offset(&kept, b);
            let mut sum = Complex64::new(0.0, 0.0);
            for t in 0..traced_dim {
                let off = offset(&traced, t);
                sum += rho[(row_base + off, col_base + off)];
            }
            out[(a, b)] = sum;
        }
    }
    Ok(out)
}

// ─── Spectral calculus ───────────────────────────────────────────────

/// Hermitian eigendecomposition, eigenvalues ascending, eigenvectors as
/// columns with the first significant component rotated real-positive.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Eigendecompose a (numerically) Hermitian matrix. The caller is expected
/// to have symmetrized the input; results on non-Hermitian input are
/// meaningless.
pub fn eigh(mat: &CMatrix) -> Eigh {
    let d = mat.nrows();
    let se = mat.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        se.eigenvalues[i]
            .partial_cmp(&se.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(d, d);
    for (dst, &src) in order.iter().enumerate() {
        let col = se.eigenvectors.column(src);
        // Phase convention: first component with non-negligible modulus
        // becomes real-positive.
        let phase = col
            .iter()
            .find(|z| z.norm() > tol::EIGENVALUE_FLOOR)
            .map(|z| z.conj() / z.norm())
            .unwrap_or_else(|| Complex64::new(1.0, 0.0));
        for r in 0..d {
            vectors[(r, dst)] = col[r] * phase;
        }
    }
    Eigh { values, vectors }
}

impl Eigh {
    /// Rebuild `V f(Λ) V†` for a real scalar function, symmetrizing the result.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let d = self.values.len();
        let diag = CVector::from_iterator(d, self.values.iter().map(|&v| Complex64::new(f(v), 0.0)));
        let m = &self.vectors * CMatrix::from_diagonal(&diag) * self.vectors.adjoint();
        symmetrize(&m)
    }

    /// Rebuild `V f(Λ) V†` for a complex scalar function (no symmetrization).
    pub fn apply_complex(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let d = self.values.len();
        let diag = CVector::from_iterator(d, self.values.iter().map(|&v| f(v)));
        &self.vectors * CMatrix::from_diagonal(&diag) * self.vectors.adjoint()
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// `(A + A†)/2`; suppresses round-off drift after matrix-function chains.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

// ─── Operator newtypes ───────────────────────────────────────────────

/// Square matrix certified Hermitian (stored exactly symmetrized).
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare { rows: mat.nrows(), cols: mat.ncols() });
        }
        let residual = hermiticity_residual(&mat);
        if residual > tol::HERMITICITY {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Self { mat: symmetrize(&mat) })
    }

    /// Caller guarantees Hermiticity (e.g. output of a symmetrized spectral
    /// reconstruction); still symmetrized so the invariant holds exactly.
    pub fn new_unchecked(mat: CMatrix) -> Self {
        debug_assert!(hermiticity_residual(&mat) <= tol::HERMITICITY);
        Self { mat: symmetrize(&mat) }
    }

    pub fn from_real_diagonal(entries: &[f64]) -> Self {
        Self { mat: diagonal(entries) }
    }

    pub fn zero(dim: usize) -> Self {
        Self { mat: CMatrix::zeros(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn eigh(&self) -> Eigh {
        eigh(&self.mat)
    }
}

/// Unit-trace positive-semidefinite Hermitian operator. Eigenvalues are
/// computed once at construction (the PSD check needs them) and cached for
/// entropy evaluations.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    mat: CMatrix,
    eigenvalues: Vec<f64>,
}

impl DensityOperator {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare { rows: mat.nrows(), cols: mat.ncols() });
        }
        let residual = hermiticity_residual(&mat);
        if residual > tol::HERMITICITY {
            return Err(Error::NotHermitian { residual });
        }
        let trace_residual = (mat.trace() - Complex64::new(1.0, 0.0)).norm();
        if trace_residual > tol::TRACE {
            return Err(Error::TraceNotOne { residual: trace_residual });
        }
        let mat = symmetrize(&mat);
        let decomp = eigh(&mat);
        let min = decomp.min_value();
        if min < tol::PSD_FLOOR {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        Ok(Self { mat, eigenvalues: decomp.values })
    }

    /// Pure state `|psi><psi|` from an (unnormalized) state vector.
    pub fn pure(state: &CVector) -> Result<Self> {
        let norm_sq: f64 = state.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= tol::EIGENVALUE_FLOOR {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let mat = (state * state.adjoint()).scale(1.0 / norm_sq);
        Self::new(mat)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let mat = identity(dim).scale(1.0 / dim as f64);
        Self { mat, eigenvalues: vec![1.0 / dim as f64; dim] }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Spectrum, ascending, as computed at construction.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Reinterpret as a plain Hermitian operator (no recheck needed).
    pub fn to_hermitian(&self) -> HermitianOperator {
        HermitianOperator { mat: self.mat.clone() }
    }
}

// ─── Matrix functions ────────────────────────────────────────────────

/// Spectral application of an arbitrary real scalar function,
/// `h = Σ λ_i P_i ↦ Σ f(λ_i) P_i`. No domain checks; use the named
/// variants for `exp`/`ln`/`sqrt` domain handling.
pub fn hermitian_matfunc(h: &HermitianOperator, f: impl Fn(f64) -> f64) -> HermitianOperator {
    HermitianOperator { mat: h.eigh().apply(f) }
}

pub fn matrix_exp(h: &HermitianOperator) -> HermitianOperator {
    hermitian_matfunc(h, f64::exp)
}

/// Square root of a PSD operator. Eigenvalues in `[PSD_FLOOR, 0)` clamp to
/// zero; anything below the floor signals invalid input.
pub fn matrix_sqrt(h: &HermitianOperator) -> Result<HermitianOperator> {
    let decomp = h.eigh();
    let min = decomp.min_value();
    if min < tol::PSD_FLOOR {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
    }
    Ok(HermitianOperator { mat: decomp.apply(|v| v.max(0.0).sqrt()) })
}

/// Operator logarithm of a PSD operator with eigenvalues clipped at the
/// log floor, so that rank-deficient states stay finite (their near-zero
/// eigenvalues contribute nothing once composed inside trace functionals).
pub fn matrix_ln(h: &HermitianOperator) -> Result<HermitianOperator> {
    let decomp = h.eigh();
    let min = decomp.min_value();
    if min < tol::PSD_FLOOR {
        return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
    }
    Ok(HermitianOperator { mat: decomp.apply(|v| v.max(tol::EIGENVALUE_FLOOR).ln()) })
}

/// `√d · rho · √d`: PSD whenever both inputs are, with trace `tr(d·rho)`.
pub fn matrix_sqrt_sandwich(d: &HermitianOperator, rho: &DensityOperator) -> Result<HermitianOperator> {
    let s = matrix_sqrt(d)?;
    Ok(sqrt_sandwich_with(&s, rho.matrix()))
}

/// Sandwich an operator with a precomputed square root: `s · m · s`.
pub(crate) fn sqrt_sandwich_with(sqrt_outer: &HermitianOperator, m: &CMatrix) -> HermitianOperator {
    let out = sqrt_outer.matrix() * m * sqrt_outer.matrix();
    HermitianOperator { mat: symmetrize(&out) }
}

// ─── Validation reports ──────────────────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub invariant: String,
    pub residual: f64,
}

/// Outcome of a validity check: one entry per violated invariant, with the
/// measured residual. Empty means valid.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, invariant: &str, residual: f64, tolerance: f64) {
        if residual > tolerance {
            self.violations.push(Violation { invariant: invariant.to_string(), residual });
        }
    }
}

/// Check squareness and Hermiticity.
pub fn validate_hermitian(m: &CMatrix) -> ValidationReport {
    let mut report = ValidationReport::default();
    if m.nrows() != m.ncols() {
        report.violations.push(Violation {
            invariant: "square".into(),
            residual: (m.nrows() as f64 - m.ncols() as f64).abs(),
        });
        return report;
    }
    report.check("hermitian", hermiticity_residual(m), tol::HERMITICITY);
    report
}

/// Check Hermiticity, unit trace, and positive semidefiniteness.
pub fn validate_density(m: &CMatrix) -> ValidationReport {
    let mut report = validate_hermitian(m);
    if !report.is_valid() && m.nrows() != m.ncols() {
        return report;
    }
    report.check("unit_trace", (m.trace() - Complex64::new(1.0, 0.0)).norm(), tol::TRACE);
    let min = eigh(&symmetrize(m)).min_value();
    report.check("positive_semidefinite", (-min).max(0.0), -tol::PSD_FLOOR);
    report
}

/// Check a POVM element list: each element Hermitian and PSD, and the sum
/// resolving the identity within the completeness tolerance.
pub fn validate_povm(elements: &[CMatrix]) -> ValidationReport {
    let mut report = ValidationReport::default();
    if elements.is_empty() {
        report.violations.push(Violation { invariant: "nonempty".into(), residual: 0.0 });
        return report;
    }
    let d = elements[0].nrows();
    let mut sum = CMatrix::zeros(d, d);
    for (k, e) in elements.iter().enumerate() {
        if e.nrows() != d || e.ncols() != d {
            report.violations.push(Violation {
                invariant: format!("element_{k}_dimension"),
                residual: (e.nrows() as f64 - d as f64).abs(),
            });
            continue;
        }
        report.check(&format!("element_{k}_hermitian"), hermiticity_residual(e), tol::HERMITICITY);
        let min = eigh(&symmetrize(e)).min_value();
        report.check(&format!("element_{k}_positive"), (-min).max(0.0), -tol::PSD_FLOOR);
        sum += e;
    }
    report.check("completeness", max_diff(&sum, &identity(d)), tol::COMPLETENESS);
    report
}
