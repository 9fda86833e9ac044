//! Block involutions (τ, Y, ρ): lower-triangular maps mixing the maximal
//! nonsingular part V_B with the radical.
//!
//! The block matrix [[τ, 0], [Y, ρ]] squares to the identity iff τ² = id,
//! ρ² = id and Y = ρYτ. It preserves q iff τ is symplectic on V_B, ρ is an
//! isometry of the radical, and q(w) + q(Yw) = q(τw) on V_B. A symplectic
//! diagonal τ-part can be renormalized into orthogonal transvections by
//! shifting each transvection vector into the radical, which leaves a pure
//! defect-valued Y-factor.

use crate::error::{Error, Result};
use crate::field::Elem;
use crate::linalg::Mat;
use crate::quadspace::{symplectic_partners, QuadraticForm, Vector};

use super::factor::{factor_involution, Factorization};
use super::radical::validate_radical_action;
use super::DiagonalInvolution;

/// Block presentation of an element of the orthogonal group of a singular
/// space: tau acts on V_B (2r×2r), y maps V_B into the radical (s×2r), rho
/// acts on the radical (s×s).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockInvolution {
    form: QuadraticForm,
    tau: Mat,
    y: Mat,
    rho: Mat,
}

impl BlockInvolution {
    pub fn new(form: &QuadraticForm, tau: Mat, y: Mat, rho: Mat) -> Result<BlockInvolution> {
        let (two_r, s) = (2 * form.r(), form.s());
        if tau.rows() != two_r || tau.cols() != two_r {
            return Err(Error::DimensionMismatch { expected: two_r, got: tau.rows() });
        }
        if y.rows() != s || y.cols() != two_r {
            return Err(Error::DimensionMismatch { expected: s, got: y.rows() });
        }
        if rho.rows() != s || rho.cols() != s {
            return Err(Error::DimensionMismatch { expected: s, got: rho.rows() });
        }
        Ok(BlockInvolution { form: form.clone(), tau, y, rho })
    }

    /// Split a full-space matrix into blocks; the upper-right block must
    /// vanish (the radical is invariant under any isometry).
    pub fn from_full_matrix(form: &QuadraticForm, m: &Mat) -> Result<BlockInvolution> {
        let n = form.dim();
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: m.rows() });
        }
        let two_r = 2 * form.r();
        let upper_right = m.submatrix(0..two_r, two_r..n);
        if !upper_right.is_zero() {
            return Err(Error::InvalidInput(
                "map does not leave rad(V) invariant (upper-right block nonzero)".into(),
            ));
        }
        Ok(BlockInvolution {
            form: form.clone(),
            tau: m.submatrix(0..two_r, 0..two_r),
            y: m.submatrix(two_r..n, 0..two_r),
            rho: m.submatrix(two_r..n, two_r..n),
        })
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn tau(&self) -> &Mat {
        &self.tau
    }

    pub fn y(&self) -> &Mat {
        &self.y
    }

    pub fn rho(&self) -> &Mat {
        &self.rho
    }

    pub fn full_matrix(&self) -> Mat {
        let field = self.form.field();
        let two_r = 2 * self.form.r();
        let s = self.form.s();
        let zero = Mat::zero(field, two_r, s);
        Mat::from_blocks(&self.tau, &zero, &self.y, &self.rho)
    }

    /// (τ, Y, ρ)² = id iff τ² = id, ρ² = id and Y = ρYτ; the squared block
    /// matrix is checked directly as well.
    pub fn is_involution(&self) -> bool {
        let full = self.full_matrix();
        let square_ok = full.mul(&full).is_identity();
        let cond = self.tau.mul(&self.tau).is_identity()
            && self.rho.mul(&self.rho).is_identity()
            && self.rho.mul(&self.y).mul(&self.tau) == self.y;
        debug_assert_eq!(square_ok, cond);
        square_ok && cond && !full.is_identity()
    }

    pub fn is_orthogonal(&self) -> Result<bool> {
        block_is_orthogonal(&self.form, &self.tau, &self.y, &self.rho)
    }
}

/// The V_B part of the form, as a standalone nonsingular form.
pub fn nonsingular_part(form: &QuadraticForm) -> QuadraticForm {
    QuadraticForm::new(form.field(), form.pairs().to_vec(), vec![])
}

/// The radical part of the form, as a standalone diag-only form.
pub fn radical_part(form: &QuadraticForm) -> QuadraticForm {
    QuadraticForm::new(form.field(), vec![], form.diag().to_vec())
}

/// Membership test for a block triple (φ, X, δ): φ preserves B on V_B, δ is
/// an isometry of the radical, and q(w) + q(Xw) = q(φw) on the standard
/// basis of V_B. The defect D(w) = q(φw) + q(w) + q(Xw) is additive because
/// φ preserves B and B vanishes on the radical, and scales by squares, so
/// the basis check is sufficient.
pub fn block_is_orthogonal(
    form: &QuadraticForm,
    phi: &Mat,
    x: &Mat,
    delta: &Mat,
) -> Result<bool> {
    let two_r = 2 * form.r();
    let s = form.s();
    if phi.rows() != two_r || phi.cols() != two_r || x.rows() != s || x.cols() != two_r
        || delta.rows() != s || delta.cols() != s
    {
        return Err(Error::DimensionMismatch { expected: two_r, got: phi.rows() });
    }
    let vb = nonsingular_part(form);
    let rad = radical_part(form);
    if !phi.is_invertible() {
        return Ok(false);
    }
    let gram = vb.gram();
    if phi.transpose().mul(&gram).mul(phi) != gram {
        return Ok(false);
    }
    if !delta.is_invertible() {
        return Ok(false);
    }
    let gamma = form.radical_gamma();
    if gamma.mul(delta) != gamma {
        return Ok(false);
    }
    let field = form.field().clone();
    for k in 0..two_r {
        let w = Vector::std(&field, two_r, k);
        let qw = vb.eval_q(&w)?;
        let qphi = vb.eval_q(&Vector::new(phi.mul_vec(&w.coords)))?;
        let qx = rad.eval_q(&Vector::new(x.mul_vec(&w.coords)))?;
        if qw.add(&qx) != qphi {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Renormalized block involution: orthogonal transvection product on the
/// full space, a defect-valued shear, and the radical action.
#[derive(Clone, Debug)]
pub struct NormalizedBlock {
    /// Product of orthogonal transvections (vectors may have radical
    /// components); q(u_i') = 1/a_i.
    pub diagonal: DiagonalInvolution,
    /// Shear with q(Y'w) = 0 for every w.
    pub y_prime: Mat,
    /// Radical action, unchanged.
    pub rho: Mat,
}

/// Split (τ_{U,a}, Y, ρ) into (τ_{U'}, 0, id)·(id, Y', id)·(id, 0, ρ) by
/// replacing u_i with u_i' = u_i + (1/a_i)·Yv_i. The norm computation gives
/// q(Yv_i) = a_i²q(u_i) + a_i, hence q(u_i') = 1/a_i, so the first factor
/// is a product of orthogonal transvections; the remaining shear satisfies
/// q(Y'w) = 0 everywhere.
pub fn normalize_block(b: &BlockInvolution) -> Result<NormalizedBlock> {
    let form = b.form().clone();
    let field = form.field().clone();
    let n = form.dim();
    let two_r = 2 * form.r();
    if !b.is_involution() {
        return Err(Error::NotInvolution("normalize_block needs an involution".into()));
    }
    if !b.is_orthogonal()? {
        return Err(Error::NotIsometry("normalize_block needs an orthogonal block map".into()));
    }
    let vb = nonsingular_part(&form);
    // recover (U, a) from the symplectic τ-part
    let fact = factor_involution(&vb, &b.tau, false)?;
    let Factorization::Diagonal(tau_data) = fact else {
        return Err(Error::InvalidInput(
            "normalize_block needs a diagonal symplectic τ-part".into(),
        ));
    };
    let partners = symplectic_partners(&vb, tau_data.vectors())?;
    let embed = |vb_vec: &Vector, rad_coords: &[Elem]| -> Vector {
        let mut v = Vector::zero(&field, n);
        for (i, e) in vb_vec.coords.iter().enumerate() {
            v.coords[i] = e.clone();
        }
        for (j, e) in rad_coords.iter().enumerate() {
            v.coords[two_r + j] = e.clone();
        }
        v
    };
    let mut new_vectors = Vec::with_capacity(tau_data.len());
    for (u, (v, a)) in tau_data
        .vectors()
        .iter()
        .zip(partners.iter().zip(tau_data.scalars()))
    {
        let yv = b.y.mul_vec(&v.coords);
        let a_inv = a.inv()?;
        let shift: Vec<Elem> = yv.iter().map(|e| e.mul(&a_inv)).collect();
        new_vectors.push(embed(u, &shift));
    }
    let diagonal = DiagonalInvolution::new(&form, new_vectors, tau_data.scalars().to_vec())?;
    // Y' = Y + Y_A where Y_A·w = Σ_i B(u_i, w)·Yv_i
    let mut y_a = Mat::zero(&field, form.s(), two_r);
    for (u, v) in tau_data.vectors().iter().zip(&partners) {
        let yv = b.y.mul_vec(&v.coords);
        for k in 0..two_r {
            let coeff = vb.eval_b(u, &Vector::std(&field, two_r, k))?;
            if coeff.is_zero() {
                continue;
            }
            for (j, e) in yv.iter().enumerate() {
                let cur = y_a.at(j, k).add(&coeff.mul(e));
                y_a.set(j, k, cur);
            }
        }
    }
    let y_prime = b.y.add(&y_a);
    // exactness checks: factorization multiplies back, the first factor is
    // orthogonal-transvection, and the shear has zero norms
    let rad = radical_part(&form);
    for k in 0..two_r {
        let col = Vector::new(y_prime.col(k));
        if !rad.eval_q(&col)?.is_zero() {
            return Err(Error::Internal("normalized shear must have q(Y'w) = 0".into()));
        }
    }
    for (u, a) in diagonal.vectors().iter().zip(diagonal.scalars()) {
        if !form.eval_q(u)?.mul(a).is_one() {
            return Err(Error::Internal("normalized factor must satisfy a·q(u') = 1".into()));
        }
    }
    let first = diagonal.matrix(&form)?;
    let mut shear = Mat::identity(&field, n);
    for j in 0..form.s() {
        for k in 0..two_r {
            shear.set(two_r + j, k, y_prime.at(j, k).clone());
        }
    }
    let mut rho_full = Mat::identity(&field, n);
    for i in 0..form.s() {
        for j in 0..form.s() {
            rho_full.set(two_r + i, two_r + j, b.rho.at(i, j).clone());
        }
    }
    let product = first.mul(&shear).mul(&rho_full);
    if product != b.full_matrix() {
        return Err(Error::Internal("three-factor normalization failed recomposition".into()));
    }
    Ok(NormalizedBlock { diagonal, y_prime, rho: b.rho.clone() })
}

/// Build a block involution from an orthogonal transvection product τ on
/// V_B, a radical involution action ρ, and radical shift vectors h_i (one
/// per transvection factor, in radical coordinates):
///
///   Y(u_i) = h_i + ρ(h_i),   Y(v_i) = a_i·h_i + f_i,   Y = 0 elsewhere,
///
/// where f_i is a ρ-fixed radical vector with q(f_i) = a_i²·q(h_i) chosen
/// by linear solving (zero when h_i has norm zero). The constraint comes
/// from Y = ρYτ together with orthogonality; shifts with norms outside the
/// fixed part of ρ admit no compatible involution and are rejected.
pub fn construct_block_y(
    form: &QuadraticForm,
    tau: &DiagonalInvolution,
    rho: &Mat,
    shifts: &[Vec<Elem>],
) -> Result<BlockInvolution> {
    let field = form.field().clone();
    let two_r = 2 * form.r();
    let s = form.s();
    validate_radical_action(form, rho)?;
    if shifts.len() != tau.len() {
        return Err(Error::InvalidInput("one radical shift per transvection factor".into()));
    }
    for h in shifts {
        if h.len() != s {
            return Err(Error::DimensionMismatch { expected: s, got: h.len() });
        }
    }
    let vb = nonsingular_part(form);
    for u in tau.vectors() {
        if u.coords[two_r..].iter().any(|e| !e.is_zero()) {
            return Err(Error::InvalidInput(
                "transvection vectors must lie in the nonsingular part".into(),
            ));
        }
    }
    let vb_vectors: Vec<Vector> = tau
        .vectors()
        .iter()
        .map(|u| Vector::new(u.coords[..two_r].to_vec()))
        .collect();
    let tau_vb = DiagonalInvolution::new(&vb, vb_vectors.clone(), tau.scalars().to_vec())?;
    if !tau_vb.is_orthogonal(&vb)? {
        return Err(Error::InvalidInput(
            "τ must be a product of orthogonal transvections".into(),
        ));
    }
    let partners = symplectic_partners(&vb, &vb_vectors)?;
    let rad = radical_part(form);
    let rho_fix = rho.add(&Mat::identity(&field, s)).kernel_basis();
    // images on the basis {u_i, v_i, complement}: complement gets zero
    let mut basis_cols: Vec<Vec<Elem>> = Vec::new();
    let mut image_cols: Vec<Vec<Elem>> = Vec::new();
    for ((u, v), (h, a)) in vb_vectors
        .iter()
        .zip(&partners)
        .zip(shifts.iter().zip(tau.scalars()))
    {
        let hv = Vector::new(h.clone());
        let rho_h = Vector::new(rho.mul_vec(h));
        let k = hv.add(&rho_h);
        let qh = rad.eval_q(&hv)?;
        let f = if qh.is_zero() {
            vec![field.zero(); s]
        } else {
            // solve for a ρ-fixed vector with q(f) = a²·q(h) via root
            // coordinates: Γ·f = root(target), f ∈ Fix(ρ)
            let target = a.square().mul(&qh);
            solve_norm_in_subspace(form, &rho_fix, &target)?.ok_or_else(|| {
                Error::InvalidInput(
                    "no ρ-fixed radical vector carries the required norm; \
                     the shift admits no compatible involution"
                        .into(),
                )
            })?
        };
        basis_cols.push(u.coords.clone());
        image_cols.push(k.coords.clone());
        basis_cols.push(v.coords.clone());
        let yv: Vec<Elem> = h
            .iter()
            .zip(&f)
            .map(|(hi, fi)| a.mul(hi).add(fi))
            .collect();
        image_cols.push(yv);
    }
    // complete the basis of V_B with the B-orthogonal complement of the pairs
    let mut pairing_rows = Vec::new();
    for w in vb_vectors.iter().chain(&partners) {
        pairing_rows.push(
            (0..two_r)
                .map(|c| vb.eval_b(w, &Vector::std(&field, two_r, c)))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    for comp in Mat::from_rows(&field, pairing_rows).kernel_basis() {
        basis_cols.push(comp);
        image_cols.push(vec![field.zero(); s]);
    }
    let basis = Mat::from_cols(&field, basis_cols);
    let images = Mat::from_cols(&field, image_cols);
    let basis_inv = basis
        .inverse()
        .ok_or_else(|| Error::Internal("transvection pairs plus complement form a basis".into()))?;
    let y = images.mul(&basis_inv);
    let out = BlockInvolution::new(form, tau_vb.matrix(&vb)?, y, rho.clone())?;
    if !out.is_involution() {
        return Err(Error::Internal("constructed block map must be an involution".into()));
    }
    if !out.is_orthogonal()? {
        return Err(Error::Internal("constructed block map must preserve q".into()));
    }
    Ok(out)
}

/// Find a vector in the span of `subspace` (radical coordinates) whose norm
/// equals `target`: q(Σ λ_i b_i) = Σ λ_i² q(b_i), so root coordinates turn
/// the condition into a linear system over k.
fn solve_norm_in_subspace(
    form: &QuadraticForm,
    subspace: &[Vec<Elem>],
    target: &Elem,
) -> Result<Option<Vec<Elem>>> {
    let field = form.field().clone();
    let s = form.s();
    if subspace.is_empty() {
        return Ok(if target.is_zero() { Some(vec![field.zero(); s]) } else { None });
    }
    let rad = radical_part(form);
    // columns: root coordinates of q(b_i)
    let cols: Vec<Vec<Elem>> = subspace
        .iter()
        .map(|b| rad.eval_q(&Vector::new(b.clone())).map(|q| q.root_coords()))
        .collect::<Result<_>>()?;
    let gamma = Mat::from_cols(&field, cols);
    let rhs = target.root_coords();
    match gamma.solve(&rhs) {
        None => Ok(None),
        Some(lambda) => {
            let mut f = vec![field.zero(); s];
            for (l, b) in lambda.iter().zip(subspace) {
                for (fi, bi) in f.iter_mut().zip(b) {
                    *fi = fi.add(&l.mul(bi));
                }
            }
            Ok(Some(f))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::involutions::radical::decompose_radical;

    fn gf2() -> Field {
        Field::binary(1).unwrap()
    }

    fn form(f: &Field, pairs: &[(u16, u16)], diag: &[u16]) -> QuadraticForm {
        QuadraticForm::new(
            f,
            pairs
                .iter()
                .map(|&(a, b)| (f.from_bits(a).unwrap(), f.from_bits(b).unwrap()))
                .collect(),
            diag.iter().map(|&c| f.from_bits(c).unwrap()).collect(),
        )
    }

    fn mat(f: &Field, rows: &[&[u16]]) -> Mat {
        Mat::from_rows(
            f,
            rows.iter()
                .map(|r| r.iter().map(|&b| f.from_bits(b).unwrap()).collect())
                .collect(),
        )
    }

    #[test]
    fn zero_y_with_involutions_is_involution() {
        let f = gf2();
        let q = form(&f, &[(1, 1)], &[0, 0]);
        let tau = mat(&f, &[&[1, 0], &[1, 1]]); // τ_{e}, q(e)=1: f ↦ e+f? check below
        // τ_u for u = e: w ↦ w + B(e,w)e: e↦e, f↦f+e → columns (1,0),(1,1)
        let tau = Mat::from_cols(&f, vec![tau.col(0), tau.col(1)]);
        let rho = mat(&f, &[&[0, 1], &[1, 0]]);
        let y = Mat::zero(&f, 2, 2);
        let b = BlockInvolution::new(&q, tau, y, rho).unwrap();
        assert!(b.is_involution());
        assert!(b.is_orthogonal().unwrap());
    }

    #[test]
    fn y_violating_compatibility_fails() {
        let f = gf2();
        let q = form(&f, &[(1, 1)], &[0, 1]);
        let tau = Mat::identity(&f, 2);
        let rho = mat(&f, &[&[1, 1], &[0, 1]]); // g2 ↦ g2 + g1
        // Y = ρYτ fails for a column outside Fix(ρ)... g2 is moved: use it
        let mut y = Mat::zero(&f, 2, 2);
        y.set(1, 0, f.one()); // Y(e) = g2, ρ(g2) ≠ g2 ⇒ Y ≠ ρYτ
        let b = BlockInvolution::new(&q, tau, y, rho).unwrap();
        assert!(!b.is_involution());
        let full = b.full_matrix();
        assert!(!full.mul(&full).is_identity());
    }

    #[test]
    fn orthogonality_detects_norm_breaking_shear() {
        let f = gf2();
        let q = form(&f, &[(0, 0)], &[1]);
        let phi = Mat::identity(&f, 2);
        let delta = Mat::identity(&f, 1);
        // X adds the norm-1 radical vector to e: q(X e) = 1 ≠ 0
        let mut x = Mat::zero(&f, 1, 2);
        x.set(0, 0, f.one());
        assert!(!block_is_orthogonal(&q, &phi, &x, &delta).unwrap());
        let zero = Mat::zero(&f, 1, 2);
        assert!(block_is_orthogonal(&q, &phi, &zero, &delta).unwrap());
    }

    #[test]
    fn composition_of_orthogonal_triples_is_orthogonal() {
        // (φ, X, δ)(φ', X', δ') = (φφ', Xφ' + δX', δδ')
        let f = gf2();
        let q = form(&f, &[(0, 0)], &[0, 1]);
        // φ1: e ↦ e+f distorts q(e) from 0 to 1, compensated by X(e) = g2
        let phi1 = mat(&f, &[&[1, 0], &[1, 1]]);
        let mut x1 = Mat::zero(&f, 2, 2);
        x1.set(1, 0, f.one());
        let delta1 = mat(&f, &[&[1, 1], &[0, 1]]);
        assert!(block_is_orthogonal(&q, &phi1, &x1, &delta1).unwrap());
        let phi2 = mat(&f, &[&[0, 1], &[1, 0]]);
        let x2 = Mat::zero(&f, 2, 2);
        let delta2 = Mat::identity(&f, 2);
        assert!(block_is_orthogonal(&q, &phi2, &x2, &delta2).unwrap());
        let phi = phi1.mul(&phi2);
        let x = x1.mul(&phi2).add(&delta1.mul(&x2));
        let delta = delta1.mul(&delta2);
        assert!(block_is_orthogonal(&q, &phi, &x, &delta).unwrap());
    }

    #[test]
    fn construct_and_normalize_roundtrip() {
        // (r,s) = (1,2) over GF(2), ρ swaps the two norm-0 radical vectors
        let f = gf2();
        let q = form(&f, &[(1, 1)], &[0, 0]);
        let u = Vector::new(vec![f.one(), f.zero(), f.zero(), f.zero()]);
        let tau = DiagonalInvolution::new(&q, vec![u], vec![f.one()]).unwrap();
        let rho = mat(&f, &[&[0, 1], &[1, 0]]);
        let h = vec![vec![f.one(), f.zero()]]; // h = g1
        let b = construct_block_y(&q, &tau, &rho, &h).unwrap();
        assert!(b.is_involution());
        assert!(b.is_orthogonal().unwrap());
        // Y(u) = h + ρh = g1 + g2 must have norm 0
        let rad = radical_part(&q);
        let yu = Vector::new(b.y().mul_vec(&[f.one(), f.zero()]));
        assert!(rad.eval_q(&yu).unwrap().is_zero());
        // and the normalization splits it into three exact factors
        let norm = normalize_block(&b).unwrap();
        assert_eq!(norm.diagonal.len(), 1);
    }

    #[test]
    fn construct_rejects_unrealizable_shift() {
        // ⟨0,1⟩ with ρ: g2 ↦ g2+g1: Fix(ρ) = {0, g1} has only norm 0, so a
        // norm-1 shift h = g2 cannot be completed
        let f = gf2();
        let q = form(&f, &[(1, 1)], &[0, 1]);
        let u = Vector::new(vec![f.one(), f.zero(), f.zero(), f.zero()]);
        let tau = DiagonalInvolution::new(&q, vec![u], vec![f.one()]).unwrap();
        let rho = mat(&f, &[&[1, 1], &[0, 1]]);
        let h = vec![vec![f.zero(), f.one()]];
        assert!(construct_block_y(&q, &tau, &rho, &h).is_err());
    }

    #[test]
    fn normalize_block_on_shifted_transvection() {
        // a dressed transvection: u' = e + g1 over [1,1]⊥⟨0,1⟩ via τ_{u'}
        let f = gf2();
        let q = form(&f, &[(1, 1)], &[0, 1]);
        let u_shift = Vector::new(vec![f.one(), f.zero(), f.one(), f.zero()]);
        let t = super::super::Transvection::orthogonal(&q, u_shift).unwrap();
        let m = t.matrix(&q).unwrap();
        let b = BlockInvolution::from_full_matrix(&q, &m).unwrap();
        assert!(b.is_involution());
        assert!(b.is_orthogonal().unwrap());
        let norm = normalize_block(&b).unwrap();
        assert_eq!(norm.diagonal.len(), 1);
        assert!(norm.rho.is_identity());
    }

    #[test]
    fn decompose_radical_connects_to_blocks() {
        let f = gf2();
        let q = form(&f, &[(0, 0)], &[0, 0]);
        let rho = mat(&f, &[&[0, 1], &[1, 0]]);
        let d = decompose_radical(&q, &rho).unwrap();
        assert_eq!(d.length(), 1);
        let full = super::super::radical::radical_matrix(&q, &d).unwrap();
        let b = BlockInvolution::from_full_matrix(&q, &full).unwrap();
        assert!(b.is_involution());
        assert!(b.tau().is_identity());
    }
}
