//! Involution types of the orthogonal and symplectic groups: transvection
//! products (diagonal), null, radical and block involutions.
//!
//! The workhorse invariant is the Wall form on the residual space
//! R_σ = (σ+1)V: Q(u, u') = B(w, u') for any w with (σ+1)w = u. It is
//! well defined and symmetric; its radical is R_σ ∩ rad(V), it is
//! alternating exactly for hyperbolic involutions, and for a product of
//! transvections τ_{u_i,a_i} on orthogonal vectors it takes the diagonal
//! value 1/a_i at u_i. Diagonalizing it recovers reduced factorizations.

pub mod block;
pub mod factor;
pub mod radical;

pub use block::BlockInvolution;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::linalg::{require_dim, same_span, span_basis, Mat};
use crate::quadspace::{symplectic_partners, Isometry, QuadraticForm, Vector};

/// Symplectic transvection τ_{u,a}: w ↦ w + a·B(u,w)·u.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transvection {
    pub u: Vector,
    pub a: Elem,
}

impl Transvection {
    pub fn new(u: Vector, a: Elem) -> Transvection {
        Transvection { u, a }
    }

    /// Orthogonal transvection: scalar fixed to 1/q(u).
    pub fn orthogonal(form: &QuadraticForm, u: Vector) -> Result<Transvection> {
        let qu = form.eval_q(&u)?;
        if qu.is_zero() {
            return Err(Error::InvalidInput(
                "orthogonal transvection needs q(u) ≠ 0".into(),
            ));
        }
        Ok(Transvection { a: qu.inv()?, u })
    }

    pub fn apply(&self, form: &QuadraticForm, w: &Vector) -> Result<Vector> {
        require_dim(form.dim(), w.dim())?;
        let b = form.eval_b(&self.u, w)?;
        Ok(w.add(&self.u.scale(&self.a.mul(&b))))
    }

    pub fn matrix(&self, form: &QuadraticForm) -> Result<Mat> {
        let n = form.dim();
        let field = form.field().clone();
        let cols: Vec<Vec<Elem>> = (0..n)
            .map(|k| {
                self.apply(form, &Vector::std(&field, n, k))
                    .map(|v| v.coords)
            })
            .collect::<Result<_>>()?;
        Ok(Mat::from_cols(&field, cols))
    }

    /// The map is trivial when a = 0 or u is radical.
    pub fn is_trivial(&self, form: &QuadraticForm) -> bool {
        self.a.is_zero() || self.u.is_zero() || form.is_radical_vector(&self.u)
    }
}

/// τ_{u,a} lies in the orthogonal group iff it is trivial or a·q(u) = 1.
pub fn is_orthogonal_transvection(t: &Transvection, form: &QuadraticForm) -> Result<bool> {
    if t.is_trivial(form) {
        return Ok(true);
    }
    Ok(t.a.mul(&form.eval_q(&t.u)?).is_one())
}

/// Product τ_{u_l,a_l} ··· τ_{u_1,a_1} on mutually orthogonal, linearly
/// independent vectors with nonzero scalars (a reduced diagonal involution).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalInvolution {
    vectors: Vec<Vector>,
    scalars: Vec<Elem>,
}

impl DiagonalInvolution {
    pub fn new(
        form: &QuadraticForm,
        vectors: Vec<Vector>,
        scalars: Vec<Elem>,
    ) -> Result<DiagonalInvolution> {
        if vectors.is_empty() || vectors.len() != scalars.len() {
            return Err(Error::InvalidInput(
                "diagonal involution needs equally many vectors and scalars, at least one".into(),
            ));
        }
        for v in &vectors {
            require_dim(form.dim(), v.dim())?;
        }
        if scalars.iter().any(|a| a.is_zero()) {
            return Err(Error::InvalidInput("reduced scalars must be nonzero".into()));
        }
        for i in 0..vectors.len() {
            for j in (i + 1)..vectors.len() {
                if !form.eval_b(&vectors[i], &vectors[j])?.is_zero() {
                    return Err(Error::InvalidInput(
                        "transvection vectors must be mutually B-orthogonal".into(),
                    ));
                }
            }
        }
        let rows: Vec<Vec<Elem>> = vectors.iter().map(|v| v.coords.clone()).collect();
        if span_basis(form.field(), &rows).len() != vectors.len() {
            return Err(Error::InvalidInput(
                "transvection vectors must be linearly independent".into(),
            ));
        }
        Ok(DiagonalInvolution { vectors, scalars })
    }

    pub fn vectors(&self) -> &[Vector] {
        &self.vectors
    }

    pub fn scalars(&self) -> &[Elem] {
        &self.scalars
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = Transvection> + '_ {
        self.vectors
            .iter()
            .zip(&self.scalars)
            .map(|(u, a)| Transvection::new(u.clone(), a.clone()))
    }

    /// All factors are orthogonal transvections (a_i = 1/q(u_i)).
    pub fn is_orthogonal(&self, form: &QuadraticForm) -> Result<bool> {
        for t in self.factors() {
            if !is_orthogonal_transvection(&t, form)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Right-to-left composition; on mutually orthogonal vectors the factors
    /// commute, so the sum formula applies directly.
    pub fn apply(&self, form: &QuadraticForm, w: &Vector) -> Result<Vector> {
        require_dim(form.dim(), w.dim())?;
        let mut out = w.clone();
        for (u, a) in self.vectors.iter().zip(&self.scalars) {
            let b = form.eval_b(u, w)?;
            out = out.add(&u.scale(&a.mul(&b)));
        }
        Ok(out)
    }

    pub fn matrix(&self, form: &QuadraticForm) -> Result<Mat> {
        let n = form.dim();
        let field = form.field().clone();
        let cols: Vec<Vec<Elem>> = (0..n)
            .map(|k| {
                self.apply(form, &Vector::std(&field, n, k))
                    .map(|v| v.coords)
            })
            .collect::<Result<_>>()?;
        Ok(Mat::from_cols(&field, cols))
    }

    /// Norm sequence ⟨q(u_1), ..., q(u_l)⟩ as a diagonal bilinear form.
    pub fn norm_form(&self, form: &QuadraticForm) -> Result<crate::bilinear::DiagonalBilinearForm> {
        let norms: Vec<Elem> = self
            .vectors
            .iter()
            .map(|u| form.eval_q(u))
            .collect::<Result<_>>()?;
        crate::bilinear::DiagonalBilinearForm::new(form.field(), norms)
    }
}

/// One basic null block on the basis {e1, f2, e2, f1}: both planes are
/// hyperbolic, η fixes e1, e2 and sends f1 ↦ e2 + f1, f2 ↦ e1 + f2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullBlock {
    pub e1: Vector,
    pub f2: Vector,
    pub e2: Vector,
    pub f1: Vector,
}

impl NullBlock {
    fn validate(&self, form: &QuadraticForm) -> Result<()> {
        for v in [&self.e1, &self.f1, &self.e2, &self.f2] {
            if !form.eval_q(v)?.is_zero() {
                return Err(Error::InvalidInput(
                    "null block vectors must all have norm zero".into(),
                ));
            }
        }
        let pairs = [
            (&self.e1, &self.f1, true),
            (&self.e2, &self.f2, true),
            (&self.e1, &self.f2, false),
            (&self.e1, &self.e2, false),
            (&self.e2, &self.f1, false),
            (&self.f1, &self.f2, false),
        ];
        for (x, y, expect_one) in pairs {
            let b = form.eval_b(x, y)?;
            if b.is_one() != expect_one || (!expect_one && !b.is_zero()) {
                return Err(Error::InvalidInput(
                    "null block pairing must be two orthogonal hyperbolic planes".into(),
                ));
            }
        }
        Ok(())
    }

    /// w ↦ w + B(e1,w)·e2 + B(e2,w)·e1.
    fn apply(&self, form: &QuadraticForm, w: &Vector) -> Result<Vector> {
        let c1 = form.eval_b(&self.e1, w)?;
        let c2 = form.eval_b(&self.e2, w)?;
        Ok(w.add(&self.e2.scale(&c1)).add(&self.e1.scale(&c2)))
    }
}

/// Product of basic null involutions on mutually orthogonal blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullInvolution {
    blocks: Vec<NullBlock>,
}

impl NullInvolution {
    pub fn new(form: &QuadraticForm, blocks: Vec<NullBlock>) -> Result<NullInvolution> {
        if blocks.is_empty() {
            return Err(Error::InvalidInput("null involution needs at least one block".into()));
        }
        for b in &blocks {
            b.validate(form)?;
        }
        for i in 0..blocks.len() {
            for j in (i + 1)..blocks.len() {
                let a = &blocks[i];
                let b = &blocks[j];
                for x in [&a.e1, &a.f1, &a.e2, &a.f2] {
                    for y in [&b.e1, &b.f1, &b.e2, &b.f2] {
                        if !form.eval_b(x, y)?.is_zero() {
                            return Err(Error::InvalidInput(
                                "null blocks must be mutually orthogonal".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(NullInvolution { blocks })
    }

    pub fn blocks(&self) -> &[NullBlock] {
        &self.blocks
    }

    /// Number of basic null factors.
    pub fn length(&self) -> usize {
        self.blocks.len()
    }

    pub fn apply(&self, form: &QuadraticForm, w: &Vector) -> Result<Vector> {
        let mut out = w.clone();
        for b in &self.blocks {
            // blocks are orthogonal, so evaluating against the original w is
            // the same as composing
            let c1 = form.eval_b(&b.e1, w)?;
            let c2 = form.eval_b(&b.e2, w)?;
            out = out.add(&b.e2.scale(&c1)).add(&b.e1.scale(&c2));
        }
        Ok(out)
    }

    pub fn matrix(&self, form: &QuadraticForm) -> Result<Mat> {
        let n = form.dim();
        let field = form.field().clone();
        let cols: Vec<Vec<Elem>> = (0..n)
            .map(|k| {
                self.apply(form, &Vector::std(&field, n, k))
                    .map(|v| v.coords)
            })
            .collect::<Result<_>>()?;
        Ok(Mat::from_cols(&field, cols))
    }
}

/// Radical involution: swaps the pair vectors g_i ↔ g_i', fixes the listed
/// complement of their span inside rad(V) and all of the nonsingular part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalInvolution {
    pub pairs: Vec<(Vector, Vector)>,
    /// Basis of the fixed complement inside rad(V).
    pub fixed: Vec<Vector>,
}

/// Sequence of norms ⟨q(g_1), ..., q(g_m)⟩ of the moved representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticSignature {
    pub norms: Vec<Elem>,
}

/// Residual space R_m = (m + id)V as an echelonized basis.
pub fn residual_space(field: &Field, m: &Mat) -> Vec<Vector> {
    let n = m.rows();
    let diff = m.add(&Mat::identity(field, n));
    let cols: Vec<Vec<Elem>> = (0..n).map(|c| diff.col(c)).collect();
    span_basis(field, &cols).into_iter().map(Vector::new).collect()
}

pub fn is_involution(m: &Mat) -> bool {
    m.rows() == m.cols() && !m.is_identity() && m.mul(m).is_identity()
}

/// Wall form of an involution on a chosen basis of its residual space:
/// Q(r_i, r_j) = B(w_i, r_j) for any preimage (σ+1)w_i = r_i.
pub fn wall_form(form: &QuadraticForm, m: &Mat, res_basis: &[Vector]) -> Result<Mat> {
    let field = form.field().clone();
    let n = form.dim();
    let diff = m.add(&Mat::identity(&field, n));
    let l = res_basis.len();
    let mut q = Mat::zero(&field, l, l);
    for (i, r) in res_basis.iter().enumerate() {
        let w = diff
            .solve(&r.coords)
            .ok_or_else(|| Error::Internal("residual vector has a preimage".into()))?;
        let wv = Vector::new(w);
        for (j, rj) in res_basis.iter().enumerate() {
            q.set(i, j, form.eval_b(&wv, rj)?);
        }
    }
    Ok(q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymplecticClass {
    Hyperbolic,
    Diagonal,
}

/// Hyperbolic iff B(v, σv) = 0 for every basis vector v; the map
/// v ↦ B(v, σv) is additive because B is σ-invariant and symmetric, so the
/// basis check suffices.
pub fn classify_symplectic_involution(form: &QuadraticForm, m: &Mat) -> Result<SymplecticClass> {
    let field = form.field().clone();
    let n = form.dim();
    if !m.mul(m).is_identity() || m.is_identity() {
        return Err(Error::NotInvolution("classification needs m² = id, m ≠ id".into()));
    }
    let gram = form.gram();
    if m.transpose().mul(&gram).mul(m) != gram {
        return Err(Error::NotInvolution("map does not preserve B".into()));
    }
    for k in 0..n {
        let v = Vector::std(&field, n, k);
        let mv = Vector::new(m.mul_vec(&v.coords));
        if !form.eval_b(&v, &mv)?.is_zero() {
            return Ok(SymplecticClass::Diagonal);
        }
    }
    Ok(SymplecticClass::Hyperbolic)
}

/// Involution compatibility of (U, a) and (X, b): equal spans and the
/// change-of-basis matrix M (column i = u_i in the X-basis) satisfies
/// M·diag(a)·Mᵀ = diag(b).
pub fn involution_compatible(
    form: &QuadraticForm,
    u_vecs: &[Vector],
    a: &[Elem],
    x_vecs: &[Vector],
    b: &[Elem],
) -> Result<bool> {
    if u_vecs.len() != x_vecs.len() || u_vecs.len() != a.len() || x_vecs.len() != b.len() {
        return Ok(false);
    }
    let field = form.field().clone();
    let u_rows: Vec<Vec<Elem>> = u_vecs.iter().map(|v| v.coords.clone()).collect();
    let x_rows: Vec<Vec<Elem>> = x_vecs.iter().map(|v| v.coords.clone()).collect();
    if !same_span(&field, &u_rows, &x_rows) {
        return Ok(false);
    }
    // express each u_i in the x-basis
    let x_mat = Mat::from_cols(&field, x_rows);
    let mut m_cols = Vec::with_capacity(u_vecs.len());
    for u in u_vecs {
        let col = x_mat
            .solve(&u.coords)
            .ok_or_else(|| Error::Internal("equal spans guarantee solvability".into()))?;
        m_cols.push(col);
    }
    let m = Mat::from_cols(&field, m_cols);
    let mut diag_a = Mat::zero(&field, a.len(), a.len());
    let mut diag_b = Mat::zero(&field, b.len(), b.len());
    for (i, e) in a.iter().enumerate() {
        diag_a.set(i, i, e.clone());
    }
    for (i, e) in b.iter().enumerate() {
        diag_b.set(i, i, e.clone());
    }
    Ok(m.mul(&diag_a).mul(&m.transpose()) == diag_b)
}

/// Equality test for reduced diagonal involutions via involution
/// compatibility; agrees with matrix equality of the induced maps.
pub fn equal_diagonal(
    form: &QuadraticForm,
    s1: &DiagonalInvolution,
    s2: &DiagonalInvolution,
) -> Result<bool> {
    if s1.len() != s2.len() {
        return Ok(false);
    }
    involution_compatible(
        form,
        s1.vectors(),
        s1.scalars(),
        s2.vectors(),
        s2.scalars(),
    )
}

/// φ τ_{u_1} ··· τ_{u_l} φ⁻¹ = τ_{φu_1} ··· τ_{φu_l}: conjugation maps the
/// vectors and keeps the scalars.
pub fn conjugate_by(
    phi: &Isometry,
    sigma: &DiagonalInvolution,
) -> Result<DiagonalInvolution> {
    let form = phi.form();
    let vectors = sigma.vectors().iter().map(|u| phi.apply(u)).collect();
    DiagonalInvolution::new(form, vectors, sigma.scalars().to_vec())
}

/// Tagged involution description for the DSL / CLI layer.
#[derive(Clone, Debug)]
pub enum InvolutionSpec {
    Diagonal(DiagonalInvolution),
    Null(NullInvolution),
    Radical(RadicalInvolution),
    Block(BlockInvolution),
}

impl InvolutionSpec {
    pub fn apply(&self, form: &QuadraticForm, w: &Vector) -> Result<Vector> {
        match self {
            InvolutionSpec::Diagonal(d) => d.apply(form, w),
            InvolutionSpec::Null(n) => n.apply(form, w),
            InvolutionSpec::Radical(r) => {
                let m = radical::radical_matrix(form, r)?;
                Ok(Vector::new(m.mul_vec(&w.coords)))
            }
            InvolutionSpec::Block(b) => {
                let m = b.full_matrix();
                Ok(Vector::new(m.mul_vec(&w.coords)))
            }
        }
    }

    pub fn matrix(&self, form: &QuadraticForm) -> Result<Mat> {
        match self {
            InvolutionSpec::Diagonal(d) => d.matrix(form),
            InvolutionSpec::Null(n) => n.matrix(form),
            InvolutionSpec::Radical(r) => radical::radical_matrix(form, r),
            InvolutionSpec::Block(b) => Ok(b.full_matrix()),
        }
    }
}

/// Reads the scalars of a transvection factorization off the partner images:
/// σ(v_i) = v_i + a_i·u_i for the dual partners v_i of the basis u_i.
pub fn read_scalars(
    form: &QuadraticForm,
    m: &Mat,
    basis: &[Vector],
) -> Result<Vec<Elem>> {
    let partners = symplectic_partners(form, basis)?;
    let field = form.field().clone();
    let mut scalars = Vec::with_capacity(basis.len());
    let basis_mat = Mat::from_cols(&field, basis.iter().map(|b| b.coords.clone()).collect());
    for (i, v) in partners.iter().enumerate() {
        let img = Vector::new(m.mul_vec(&v.coords));
        let diff = img.add(v);
        let coeffs = basis_mat
            .solve(&diff.coords)
            .ok_or_else(|| Error::Internal("difference must lie in the residual space".into()))?;
        for (j, c) in coeffs.iter().enumerate() {
            if j != i && !c.is_zero() {
                return Err(Error::Internal(
                    "partner image is not supported on its own basis vector".into(),
                ));
            }
        }
        scalars.push(coeffs[i].clone());
    }
    Ok(scalars)
}
