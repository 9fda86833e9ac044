//! Involutions acting inside rad(V): decomposition into basic factors, the
//! quadratic signature, and the exact conjugacy invariant.
//!
//! On the radical the bilinear form vanishes, so q is additive there and
//! M = ρ + id squares to zero with every column a zero-norm vector
//! (q(g + ρg) = 0). Writing rad(V) = def(V) ⊕ A in an adapted basis, the
//! orthogonal group of the radical is GL_j ⋉ Mat_{j,s−j} acting trivially on
//! the anisotropic quotient; conjugacy of involutions is therefore decided
//! by the rank of M restricted to def(V) together with the literal subspace
//! {x : Mx ∈ M(def(V))}, which conjugation cannot move.

use crate::error::{Error, Result};
use crate::field::Elem;
use crate::linalg::{span_basis, Mat};
use crate::quadspace::{QuadraticForm, Vector};

use super::{QuadraticSignature, RadicalInvolution};

impl RadicalInvolution {
    pub fn new(
        form: &QuadraticForm,
        pairs: Vec<(Vector, Vector)>,
        fixed: Vec<Vector>,
    ) -> Result<RadicalInvolution> {
        let field = form.field().clone();
        for (g, g2) in &pairs {
            if !form.is_radical_vector(g) || !form.is_radical_vector(g2) {
                return Err(Error::InvalidInput("pair vectors must lie in rad(V)".into()));
            }
            if form.eval_q(g)? != form.eval_q(g2)? {
                return Err(Error::InvalidInput(
                    "pair vectors must have equal norms (q(g) = q(g'))".into(),
                ));
            }
        }
        for h in &fixed {
            if !form.is_radical_vector(h) {
                return Err(Error::InvalidInput("fixed vectors must lie in rad(V)".into()));
            }
        }
        let mut all: Vec<Vec<Elem>> = Vec::new();
        for (g, g2) in &pairs {
            all.push(g.coords.clone());
            all.push(g2.coords.clone());
        }
        for h in &fixed {
            all.push(h.coords.clone());
        }
        if span_basis(&field, &all).len() != all.len() || all.len() != form.s() {
            return Err(Error::InvalidInput(
                "pairs and fixed complement must form a basis of rad(V)".into(),
            ));
        }
        Ok(RadicalInvolution { pairs, fixed })
    }

    pub fn length(&self) -> usize {
        self.pairs.len()
    }
}

/// Full-space matrix: identity on the nonsingular block, pair swaps plus
/// fixed complement on the radical block.
pub fn radical_matrix(form: &QuadraticForm, r: &RadicalInvolution) -> Result<Mat> {
    let field = form.field().clone();
    let n = form.dim();
    let s = form.s();
    let off = 2 * form.r();
    // basis of rad(V) in radical coordinates: pairs then fixed
    let mut basis_cols: Vec<Vec<Elem>> = Vec::new();
    let mut images: Vec<Vec<Elem>> = Vec::new();
    for (g, g2) in &r.pairs {
        basis_cols.push(g.coords[off..].to_vec());
        images.push(g2.coords[off..].to_vec());
        basis_cols.push(g2.coords[off..].to_vec());
        images.push(g.coords[off..].to_vec());
    }
    for h in &r.fixed {
        basis_cols.push(h.coords[off..].to_vec());
        images.push(h.coords[off..].to_vec());
    }
    let t = Mat::from_cols(&field, basis_cols);
    let img = Mat::from_cols(&field, images);
    let t_inv = t
        .inverse()
        .ok_or_else(|| Error::InvalidInput("radical basis is singular".into()))?;
    let rho = img.mul(&t_inv); // s×s action on radical coordinates
    let mut full = Mat::identity(&field, n);
    for i in 0..s {
        for j in 0..s {
            full.set(off + i, off + j, rho.at(i, j).clone());
        }
    }
    Ok(full)
}

/// The product of the emitted basic factors; used by tests and the
/// decomposition roundtrip check.
pub fn basic_factors(form: &QuadraticForm, r: &RadicalInvolution) -> Result<Vec<RadicalInvolution>> {
    let mut out = Vec::with_capacity(r.pairs.len());
    for (i, pair) in r.pairs.iter().enumerate() {
        let mut fixed = r.fixed.clone();
        for (j, other) in r.pairs.iter().enumerate() {
            if i != j {
                fixed.push(other.0.clone());
                fixed.push(other.1.clone());
            }
        }
        out.push(RadicalInvolution::new(form, vec![pair.clone()], fixed)?);
    }
    Ok(out)
}

/// Validate that an s×s matrix acts on rad(V) as an orthogonal involution:
/// ρ² = id and Γ·ρ = Γ (norm preservation via root coordinates).
pub fn validate_radical_action(form: &QuadraticForm, rho: &Mat) -> Result<()> {
    let s = form.s();
    if rho.rows() != s || rho.cols() != s {
        return Err(Error::DimensionMismatch { expected: s, got: rho.rows() });
    }
    if !rho.mul(rho).is_identity() {
        return Err(Error::NotInvolution("radical action must square to the identity".into()));
    }
    let gamma = form.radical_gamma();
    if gamma.mul(rho) != gamma {
        return Err(Error::NotIsometry("radical action does not preserve q".into()));
    }
    Ok(())
}

/// Decompose an orthogonal involution of rad(V) (given on radical
/// coordinates) into basic radical factors. Representatives are chosen by
/// scanning the standard radical basis in order, which makes the pair order
/// and the signature deterministic.
pub fn decompose_radical(form: &QuadraticForm, rho: &Mat) -> Result<RadicalInvolution> {
    validate_radical_action(form, rho)?;
    let field = form.field().clone();
    let s = form.s();
    let off = 2 * form.r();
    let n = form.dim();
    let m = rho.add(&Mat::identity(&field, s));
    // greedy: standard basis vectors whose M-image extends the image span
    let mut reps: Vec<Vec<Elem>> = Vec::new();
    let mut image_span: Vec<Vec<Elem>> = Vec::new();
    for j in 0..s {
        let mut x = vec![field.zero(); s];
        x[j] = field.one();
        let mx = m.mul_vec(&x);
        if mx.iter().all(|e| e.is_zero()) {
            continue;
        }
        let mut trial = image_span.clone();
        trial.push(mx.clone());
        if span_basis(&field, &trial).len() > span_basis(&field, &image_span).len() {
            image_span.push(mx);
            reps.push(x);
        }
    }
    // fixed complement: extend the image span to a basis of ker(M) — the
    // image sits inside the kernel since M² = 0
    let kernel = m.kernel_basis();
    let mut fixed_cols: Vec<Vec<Elem>> = Vec::new();
    let mut acc = image_span.clone();
    for v in kernel {
        let mut trial = acc.clone();
        trial.push(v.clone());
        if span_basis(&field, &trial).len() > span_basis(&field, &acc).len() {
            acc.push(v.clone());
            fixed_cols.push(v);
        }
    }
    let embed = |coords: &[Elem]| -> Vector {
        let mut v = Vector::zero(&field, n);
        for (j, e) in coords.iter().enumerate() {
            v.coords[off + j] = e.clone();
        }
        v
    };
    let pairs: Vec<(Vector, Vector)> = reps
        .iter()
        .map(|x| {
            let gx = embed(x);
            let img = rho.mul_vec(x);
            (gx, embed(&img))
        })
        .collect();
    let fixed: Vec<Vector> = fixed_cols.iter().map(|v| embed(v)).collect();
    let out = RadicalInvolution::new(form, pairs, fixed)?;
    // roundtrip: the product of the basic factors equals the input exactly
    let mut prod = Mat::identity(&field, n);
    for f in basic_factors(form, &out)? {
        prod = prod.mul(&radical_matrix(form, &f)?);
    }
    let full = radical_matrix(form, &out)?;
    if prod != full {
        return Err(Error::Internal("basic factors do not recompose".into()));
    }
    let mut expect = Mat::identity(&field, n);
    for i in 0..s {
        for j in 0..s {
            expect.set(off + i, off + j, rho.at(i, j).clone());
        }
    }
    if full != expect {
        return Err(Error::Internal("radical decomposition changed the map".into()));
    }
    Ok(out)
}

/// Norms of the moved representatives in canonical pair order.
pub fn quadratic_signature(
    form: &QuadraticForm,
    r: &RadicalInvolution,
) -> Result<QuadraticSignature> {
    let norms = r
        .pairs
        .iter()
        .map(|(g, _)| form.eval_q(g))
        .collect::<Result<Vec<_>>>()?;
    Ok(QuadraticSignature { norms })
}

/// Exact conjugacy invariant of a radical involution under the orthogonal
/// group of the radical: length, the rank of M restricted to def(V), and
/// the subspace {x : Mx ∈ M(def(V))} (canonically echelonized). The
/// anisotropic quotient coordinates are rigid, so the subspace itself — not
/// just its dimension — is an invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalInvariant {
    pub length: usize,
    pub defect_rank: usize,
    pub mixed_kernel: Vec<Vec<Elem>>,
}

pub fn radical_invariant(form: &QuadraticForm, rho: &Mat) -> Result<RadicalInvariant> {
    validate_radical_action(form, rho)?;
    let field = form.field().clone();
    let s = form.s();
    let m = rho.add(&Mat::identity(&field, s));
    let length = {
        let cols: Vec<Vec<Elem>> = (0..s).map(|c| m.col(c)).collect();
        span_basis(&field, &cols).len()
    };
    let def = form.defect_subspace_radical_coords();
    let mdef: Vec<Vec<Elem>> = def.iter().map(|d| m.mul_vec(d)).collect();
    let defect_rank = span_basis(&field, &mdef).len();
    // W = {x : Mx ∈ span(M·def)} via the kernel of [M | basis(M·def)]
    let mdef_basis = span_basis(&field, &mdef);
    let aug_cols: Vec<Vec<Elem>> = (0..s)
        .map(|c| m.col(c))
        .chain(mdef_basis.iter().cloned())
        .collect();
    let aug = Mat::from_cols(&field, aug_cols);
    let w_vecs: Vec<Vec<Elem>> = aug
        .kernel_basis()
        .into_iter()
        .map(|k| k[..s].to_vec())
        .collect();
    let mixed_kernel = span_basis(&field, &w_vecs);
    Ok(RadicalInvariant { length, defect_rank, mixed_kernel })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;

    fn gf2() -> Field {
        Field::binary(1).unwrap()
    }

    fn form(f: &Field, diag: &[u16]) -> QuadraticForm {
        QuadraticForm::new(
            f,
            vec![],
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
    fn identity_decomposes_empty() {
        let f = gf2();
        let q = form(&f, &[0, 0]);
        let rho = Mat::identity(&f, 2);
        let d = decompose_radical(&q, &rho).unwrap();
        assert_eq!(d.length(), 0);
        assert!(quadratic_signature(&q, &d).unwrap().norms.is_empty());
    }

    #[test]
    fn basic_swap_is_one_factor() {
        let f = gf2();
        let q = form(&f, &[0, 0]);
        let rho = mat(&f, &[&[0, 1], &[1, 0]]);
        let d = decompose_radical(&q, &rho).unwrap();
        assert_eq!(d.length(), 1);
        let sig = quadratic_signature(&q, &d).unwrap();
        assert_eq!(sig.norms.len(), 1);
        assert!(sig.norms[0].is_zero());
    }

    #[test]
    fn double_swap_two_factors_with_product_check() {
        let f = gf2();
        let q = form(&f, &[0, 0, 0, 0]);
        let rho = mat(
            &f,
            &[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]],
        );
        let d = decompose_radical(&q, &rho).unwrap();
        assert_eq!(d.length(), 2);
        // two pairs with norms 0, 0
        let sig = quadratic_signature(&q, &d).unwrap();
        assert!(sig.norms.iter().all(|e| e.is_zero()));
    }

    #[test]
    fn shear_by_defective_vector() {
        // ⟨0,1⟩: g2 ↦ g2 + g1 moves a norm-1 vector; signature ⟨1⟩
        let f = gf2();
        let q = form(&f, &[0, 1]);
        let rho = mat(&f, &[&[1, 1], &[0, 1]]);
        let d = decompose_radical(&q, &rho).unwrap();
        assert_eq!(d.length(), 1);
        assert!(quadratic_signature(&q, &d).unwrap().norms[0].is_one());
    }

    #[test]
    fn rejects_norm_breaking_action() {
        // ⟨0,1⟩: swapping g1, g2 maps norm 0 to norm 1
        let f = gf2();
        let q = form(&f, &[0, 1]);
        let rho = mat(&f, &[&[0, 1], &[1, 0]]);
        assert!(decompose_radical(&q, &rho).is_err());
    }

    #[test]
    fn rank_one_map_with_overlapping_pairs_is_basic() {
        // ⟨0,0,0⟩: g1 ↔ g1', g3 ↦ g3 + g1 + g1' has rank-1 difference,
        // hence a single basic factor despite moving three basis vectors
        let f = gf2();
        let q = form(&f, &[0, 0, 0]);
        let rho = mat(&f, &[&[0, 1, 1], &[1, 0, 1], &[0, 0, 1]]);
        let d = decompose_radical(&q, &rho).unwrap();
        assert_eq!(d.length(), 1);
    }

    #[test]
    fn invariant_distinguishes_defect_action_from_aniso_action() {
        // ⟨0,0,1⟩ over GF(2): moving a defect vector is not conjugate to
        // shearing the anisotropic vector, though both have length 1
        let f = gf2();
        let q = form(&f, &[0, 0, 1]);
        // ρ_c: g1 ↦ g1 + g2 (acts inside the defect)
        let rho_c = mat(&f, &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]]);
        // ρ': g3 ↦ g3 + g2 (shears the anisotropic generator)
        let rho_p = mat(&f, &[&[1, 0, 0], &[0, 1, 1], &[0, 0, 1]]);
        let i_c = radical_invariant(&q, &rho_c).unwrap();
        let i_p = radical_invariant(&q, &rho_p).unwrap();
        assert_eq!(i_c.length, 1);
        assert_eq!(i_p.length, 1);
        assert_ne!(i_c, i_p);
        assert_eq!(i_c.defect_rank, 1);
        assert_eq!(i_p.defect_rank, 0);
    }

    #[test]
    fn invariant_equal_for_conjugate_actions() {
        // conjugate ρ_c by a radical isometry and compare invariants
        let f = gf2();
        let q = form(&f, &[0, 0, 1]);
        let rho_c = mat(&f, &[&[1, 0, 0], &[1, 1, 0], &[0, 0, 1]]);
        // δ: swap g1, g2 (both norm 0) — an isometry of the radical
        let delta = mat(&f, &[&[0, 1, 0], &[1, 0, 0], &[0, 0, 1]]);
        let conj = delta.mul(&rho_c).mul(&delta.inverse().unwrap());
        let a = radical_invariant(&q, &rho_c).unwrap();
        let b = radical_invariant(&q, &conj).unwrap();
        assert_eq!(a, b);
    }
}
