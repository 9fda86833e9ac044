//! Reduced factorization of involutions whose residual space avoids the
//! radical: diagonal involutions factor into res(σ) transvections on a basis
//! of R_σ, hyperbolic ones into res(σ)/2 basic null blocks.
//!
//! Both come out of the Wall form: congruence-diagonalize it for the
//! diagonal case, symplectic-reduce it for the hyperbolic case. Every
//! factorization is checked by exact recomposition before being returned.

use crate::error::{Error, Result};
use crate::field::Elem;
use crate::linalg::Mat;
use crate::quadspace::{QuadraticForm, Vector};

use super::{
    residual_space, wall_form, DiagonalInvolution, NullBlock, NullInvolution,
};

/// Result of reduced factorization.
#[derive(Clone, Debug)]
pub enum Factorization {
    Diagonal(DiagonalInvolution),
    Null(NullInvolution),
}

/// Congruence-diagonalization of a symmetric matrix over a char-2 field:
/// finds invertible P with Pᵀ·C·P diagonal, or `None` when C is alternating
/// and nonzero (then no diagonal congruent form exists). Handles the case
/// where greedy splitting leaves an alternating block by merging each
/// hyperbolic pair with one already-split diagonal vector: on the span
/// {e, x, y} with C(e,e) = c ≠ 0, C(x,y) = β ≠ 0 the basis
/// {x+e, y + (β/c)(x+e), ...} re-diagonalizes with values ⟨c, β²/c, c⟩.
pub fn congruence_diagonalize(c: &Mat) -> Option<(Mat, Vec<Elem>)> {
    let field = c.field().clone();
    let l = c.rows();
    assert_eq!(l, c.cols());
    let cval = |x: &[Elem], y: &[Elem]| -> Elem {
        let mut acc = field.zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    acc = acc.add(&xi.mul(yj).mul(c.at(i, j)));
                }
            }
        }
        acc
    };
    let mut rest: Vec<Vec<Elem>> = (0..l)
        .map(|i| {
            let mut v = vec![field.zero(); l];
            v[i] = field.one();
            v
        })
        .collect();
    let mut diag_vecs: Vec<Vec<Elem>> = Vec::new();
    // greedy split of non-alternating directions
    loop {
        let Some(i) = rest.iter().position(|v| !cval(v, v).is_zero()) else {
            break;
        };
        let e = rest.remove(i);
        let ce_inv = cval(&e, &e).inv().expect("nonzero");
        for v in rest.iter_mut() {
            let coeff = cval(v, &e).mul(&ce_inv);
            if !coeff.is_zero() {
                for (idx, ev) in e.iter().enumerate() {
                    v[idx] = v[idx].add(&coeff.mul(ev));
                }
            }
        }
        diag_vecs.push(e);
    }
    // remaining block is alternating; reduce it to hyperbolic pairs
    let mut pairs: Vec<(Vec<Elem>, Vec<Elem>)> = Vec::new();
    while !rest.is_empty() {
        let mut found = None;
        'outer: for i in 0..rest.len() {
            for j in (i + 1)..rest.len() {
                if !cval(&rest[i], &rest[j]).is_zero() {
                    found = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = found else {
            // all-zero rest: only possible when C is singular there; those
            // directions contribute zero diagonal entries
            for v in rest.drain(..) {
                diag_vecs.push(v);
            }
            break;
        };
        let y = rest.remove(j);
        let x = rest.remove(i);
        let beta_inv = cval(&x, &y).inv().expect("nonzero");
        for v in rest.iter_mut() {
            let cx = cval(v, &y).mul(&beta_inv);
            let cy = cval(v, &x).mul(&beta_inv);
            for idx in 0..l {
                v[idx] = v[idx].add(&cx.mul(&x[idx])).add(&cy.mul(&y[idx]));
            }
        }
        pairs.push((x, y));
    }
    if !pairs.is_empty() && diag_vecs.iter().all(|v| cval(v, v).is_zero()) {
        return None; // alternating overall
    }
    while let Some((x, y)) = pairs.pop() {
        let epos = diag_vecs
            .iter()
            .position(|v| !cval(v, v).is_zero())
            .expect("merge partner exists");
        let e = diag_vecs.remove(epos);
        let cc = cval(&e, &e);
        let beta = cval(&x, &y);
        let add = |a: &[Elem], coeff: &Elem, b: &[Elem]| -> Vec<Elem> {
            a.iter().zip(b).map(|(ai, bi)| ai.add(&coeff.mul(bi))).collect()
        };
        let p1 = add(&x, &field.one(), &e); // x + e, value c
        let y2 = add(&y, &beta.mul(&cc.inv().expect("nonzero")), &p1); // value β²/c
        let e3 = add(&x, &cc.mul(&beta.inv().expect("nonzero")), &y2); // value c
        debug_assert_eq!(cval(&p1, &p1), cc);
        debug_assert!(cval(&p1, &y2).is_zero());
        debug_assert!(cval(&p1, &e3).is_zero());
        debug_assert!(cval(&y2, &e3).is_zero());
        diag_vecs.push(p1);
        diag_vecs.push(y2);
        diag_vecs.push(e3);
    }
    let values: Vec<Elem> = diag_vecs.iter().map(|v| cval(v, v)).collect();
    let p = Mat::from_cols(&field, diag_vecs);
    debug_assert!(p.is_invertible());
    Some((p, values))
}

/// Symplectic reduction of an alternating invertible matrix: returns pairs
/// (x_i, y_i) with C(x_i, y_i) = 1 and all other values zero.
fn symplectic_reduce(c: &Mat) -> Result<Vec<(Vec<Elem>, Vec<Elem>)>> {
    let field = c.field().clone();
    let l = c.rows();
    let cval = |x: &[Elem], y: &[Elem]| -> Elem {
        let mut acc = field.zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if !yj.is_zero() {
                    acc = acc.add(&xi.mul(yj).mul(c.at(i, j)));
                }
            }
        }
        acc
    };
    let mut rest: Vec<Vec<Elem>> = (0..l)
        .map(|i| {
            let mut v = vec![field.zero(); l];
            v[i] = field.one();
            v
        })
        .collect();
    let mut pairs = Vec::new();
    while !rest.is_empty() {
        let mut found = None;
        'outer: for i in 0..rest.len() {
            for j in (i + 1)..rest.len() {
                if !cval(&rest[i], &rest[j]).is_zero() {
                    found = Some((i, j));
                    break 'outer;
                }
            }
        }
        let Some((i, j)) = found else {
            return Err(Error::Internal(
                "alternating Wall form of an involution must be nondegenerate".into(),
            ));
        };
        let y = rest.remove(j);
        let x = rest.remove(i);
        let beta_inv = cval(&x, &y).inv()?;
        let y: Vec<Elem> = y.iter().map(|e| e.mul(&beta_inv)).collect();
        for v in rest.iter_mut() {
            let cx = cval(v, &y);
            let cy = cval(v, &x);
            for idx in 0..l {
                v[idx] = v[idx].add(&cx.mul(&x[idx])).add(&cy.mul(&y[idx]));
            }
        }
        pairs.push((x, y));
    }
    Ok(pairs)
}

/// Factor an involution with R_σ ∩ rad(V) = 0 into its reduced form. When
/// `require_orthogonal` the map must preserve q (needed for null blocks);
/// otherwise B-preservation suffices and only the diagonal case can occur.
pub fn factor_involution(
    form: &QuadraticForm,
    m: &Mat,
    require_orthogonal: bool,
) -> Result<Factorization> {
    let field = form.field().clone();
    let n = form.dim();
    if m.rows() != n || m.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.rows() });
    }
    if m.is_identity() || !m.mul(m).is_identity() {
        return Err(Error::NotInvolution("factorization needs m² = id, m ≠ id".into()));
    }
    let gram = form.gram();
    if m.transpose().mul(&gram).mul(m) != gram {
        return Err(Error::NotIsometry("map does not preserve B".into()));
    }
    if require_orthogonal {
        for k in 0..n {
            let v = Vector::std(&field, n, k);
            let mv = Vector::new(m.mul_vec(&v.coords));
            if form.eval_q(&mv)? != form.eval_q(&v)? {
                return Err(Error::NotIsometry("map does not preserve q".into()));
            }
            for l2 in (k + 1)..n {
                let s = v.add(&Vector::std(&field, n, l2));
                let ms = Vector::new(m.mul_vec(&s.coords));
                if form.eval_q(&ms)? != form.eval_q(&s)? {
                    return Err(Error::NotIsometry("map does not preserve q".into()));
                }
            }
        }
    }
    let res = residual_space(&field, m);
    // R ∩ rad must vanish: the Wall form is degenerate exactly there
    let pair_dim = 2 * form.r();
    let pair_parts: Vec<Vec<Elem>> = res
        .iter()
        .map(|v| v.coords[..pair_dim].to_vec())
        .collect();
    if !pair_parts.is_empty() {
        let rank = Mat::from_cols(&field, pair_parts).rank();
        if rank < res.len() {
            return Err(Error::InvalidInput(
                "residual space meets rad(V); not transvection/null factorable".into(),
            ));
        }
    }
    let wall = wall_form(form, m, &res)?;
    match congruence_diagonalize(&wall) {
        Some((p, values)) => {
            let vectors: Vec<Vector> = (0..p.cols())
                .map(|c| {
                    let col = p.col(c);
                    let mut acc = Vector::zero(&field, n);
                    for (i, coeff) in col.iter().enumerate() {
                        acc = acc.add(&res[i].scale(coeff));
                    }
                    acc
                })
                .collect();
            let mut scalars = Vec::with_capacity(values.len());
            for v in &values {
                if v.is_zero() {
                    return Err(Error::Internal("Wall form of an involution is invertible".into()));
                }
                scalars.push(v.inv()?);
            }
            let diag = DiagonalInvolution::new(form, vectors, scalars)?;
            let recomposed = diag.matrix(form)?;
            if &recomposed != m {
                return Err(Error::Internal(
                    "diagonal factorization failed recomposition check".into(),
                ));
            }
            Ok(Factorization::Diagonal(diag))
        }
        None => {
            if !require_orthogonal {
                return Err(Error::InvalidInput(
                    "hyperbolic symplectic involution: no diagonal factorization".into(),
                ));
            }
            let null = factor_null(form, m, &res, &wall)?;
            Ok(Factorization::Null(null))
        }
    }
}

fn factor_null(
    form: &QuadraticForm,
    m: &Mat,
    res: &[Vector],
    wall: &Mat,
) -> Result<NullInvolution> {
    let field = form.field().clone();
    let n = form.dim();
    if res.len() % 2 != 0 {
        return Err(Error::Internal("hyperbolic involution has even residual dimension".into()));
    }
    let pairs = symplectic_reduce(wall)?;
    let diff = m.add(&Mat::identity(&field, n));
    let expand = |coeffs: &[Elem]| -> Vector {
        let mut acc = Vector::zero(&field, n);
        for (i, c) in coeffs.iter().enumerate() {
            acc = acc.add(&res[i].scale(c));
        }
        acc
    };
    struct Block {
        x: Vector,
        y: Vector,
        wx: Vector,
        wy: Vector,
    }
    let mut blocks: Vec<Block> = Vec::new();
    for (xc, yc) in &pairs {
        let x = expand(xc);
        let y = expand(yc);
        let wx = Vector::new(
            diff.solve(&x.coords)
                .ok_or_else(|| Error::Internal("residual preimage exists".into()))?,
        );
        let wy = Vector::new(
            diff.solve(&y.coords)
                .ok_or_else(|| Error::Internal("residual preimage exists".into()))?,
        );
        blocks.push(Block { x, y, wx, wy });
    }
    // normalize each block: q(wx) = q(wy) = 0 and B(wx, wy) = 0.
    // B(x, wy) = Q(y, x) = 1 and B(y, wx) = Q(x, y) = 1, so adding x fixes
    // q(wy), adding y fixes q(wx), and neither touches the other norms.
    for b in blocks.iter_mut() {
        let qwx = form.eval_q(&b.wx)?;
        if !qwx.is_zero() {
            b.wx = b.wx.add(&b.y.scale(&qwx));
        }
        let qwy = form.eval_q(&b.wy)?;
        if !qwy.is_zero() {
            b.wy = b.wy.add(&b.x.scale(&qwy));
        }
        let cross = form.eval_b(&b.wx, &b.wy)?;
        if !cross.is_zero() {
            b.wx = b.wx.add(&b.x.scale(&cross));
        }
    }
    // cross-block cleanup: residual vectors of different blocks pair to zero
    // under the Wall form, so only the preimages need correcting
    for i in 1..blocks.len() {
        for j in 0..i {
            let c = form.eval_b(&blocks[i].wx, &blocks[j].wy)?;
            if !c.is_zero() {
                let xj = blocks[j].x.clone();
                blocks[i].wx = blocks[i].wx.add(&xj.scale(&c));
            }
            let c = form.eval_b(&blocks[i].wx, &blocks[j].wx)?;
            if !c.is_zero() {
                let yj = blocks[j].y.clone();
                blocks[i].wx = blocks[i].wx.add(&yj.scale(&c));
            }
            let c = form.eval_b(&blocks[i].wy, &blocks[j].wy)?;
            if !c.is_zero() {
                let xj = blocks[j].x.clone();
                blocks[i].wy = blocks[i].wy.add(&xj.scale(&c));
            }
            let c = form.eval_b(&blocks[i].wy, &blocks[j].wx)?;
            if !c.is_zero() {
                let yj = blocks[j].y.clone();
                blocks[i].wy = blocks[i].wy.add(&yj.scale(&c));
            }
        }
    }
    let null_blocks: Vec<NullBlock> = blocks
        .into_iter()
        .map(|b| NullBlock { e1: b.x, f2: b.wx, e2: b.y, f1: b.wy })
        .collect();
    let null = NullInvolution::new(form, null_blocks)?;
    let recomposed = null.matrix(form)?;
    if &recomposed != m {
        return Err(Error::Internal("null factorization failed recomposition check".into()));
    }
    Ok(null)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::involutions::{classify_symplectic_involution, SymplecticClass, Transvection};
    use crate::quadspace::QuadraticForm;

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

    fn vec_of(f: &Field, bits: &[u16]) -> Vector {
        Vector::new(bits.iter().map(|&b| f.from_bits(b).unwrap()).collect())
    }

    #[test]
    fn single_transvection_factors_as_itself() {
        let f = gf2();
        let q = form(&f, &[(1, 1)], &[]);
        let t = Transvection::orthogonal(&q, vec_of(&f, &[1, 0])).unwrap();
        let m = t.matrix(&q).unwrap();
        match factor_involution(&q, &m, true).unwrap() {
            Factorization::Diagonal(d) => {
                assert_eq!(d.len(), 1);
                assert!(d.is_orthogonal(&q).unwrap());
                assert_eq!(d.matrix(&q).unwrap(), m);
            }
            other => panic!("expected diagonal, got {other:?}"),
        }
    }

    #[test]
    fn basic_null_involution_factors_as_one_block() {
        let f = gf2();
        let q = form(&f, &[(0, 0), (0, 0)], &[]);
        // η: e1, e2 fixed; f1 ↦ e2 + f1; f2 ↦ e1 + f2 (basis e1,f1,e2,f2)
        let e1 = vec_of(&f, &[1, 0, 0, 0]);
        let f1 = vec_of(&f, &[0, 1, 0, 0]);
        let e2 = vec_of(&f, &[0, 0, 1, 0]);
        let f2 = vec_of(&f, &[0, 0, 0, 1]);
        let blk = NullBlock { e1: e1.clone(), f2: f2.clone(), e2: e2.clone(), f1: f1.clone() };
        let eta = NullInvolution::new(&q, vec![blk]).unwrap();
        let m = eta.matrix(&q).unwrap();
        assert_eq!(
            classify_symplectic_involution(&q, &m).unwrap(),
            SymplecticClass::Hyperbolic
        );
        match factor_involution(&q, &m, true).unwrap() {
            Factorization::Null(n) => {
                assert_eq!(n.length(), 1);
                assert_eq!(n.matrix(&q).unwrap(), m);
            }
            other => panic!("expected null, got {other:?}"),
        }
    }

    #[test]
    fn two_transvections_factor_with_two_vectors() {
        let f = gf2();
        let q = form(&f, &[(1, 1), (1, 1)], &[]);
        let u1 = vec_of(&f, &[1, 0, 0, 0]);
        let u2 = vec_of(&f, &[0, 0, 1, 0]);
        let d = DiagonalInvolution::new(
            &q,
            vec![u1, u2],
            vec![f.one(), f.one()],
        )
        .unwrap();
        let m = d.matrix(&q).unwrap();
        assert_eq!(
            classify_symplectic_involution(&q, &m).unwrap(),
            SymplecticClass::Diagonal
        );
        match factor_involution(&q, &m, true).unwrap() {
            Factorization::Diagonal(got) => {
                assert_eq!(got.len(), 2);
                assert_eq!(got.matrix(&q).unwrap(), m);
            }
            other => panic!("expected diagonal, got {other:?}"),
        }
    }

    #[test]
    fn rejects_radical_involutions() {
        let f = gf2();
        let q = form(&f, &[(0, 0)], &[0, 0]);
        // swap the two radical basis vectors: residual inside rad
        let mut m = Mat::identity(&f, 4);
        m.set(2, 2, f.zero());
        m.set(3, 3, f.zero());
        m.set(2, 3, f.one());
        m.set(3, 2, f.one());
        assert!(factor_involution(&q, &m, true).is_err());
    }

    #[test]
    fn congruence_diagonalize_handles_merge() {
        // ⟨1⟩ ⊥ alternating pair over GF(2): merge yields three diagonal ones
        let f = gf2();
        let mut c = Mat::zero(&f, 3, 3);
        c.set(0, 0, f.one());
        c.set(1, 2, f.one());
        c.set(2, 1, f.one());
        let (p, d) = congruence_diagonalize(&c).unwrap();
        assert!(p.is_invertible());
        assert_eq!(d.len(), 3);
        assert!(d.iter().all(|v| v.is_one()));
        let mut diag = Mat::zero(&f, 3, 3);
        for (i, v) in d.iter().enumerate() {
            diag.set(i, i, v.clone());
        }
        assert_eq!(p.transpose().mul(&c).mul(&p), diag);
    }

    #[test]
    fn congruence_diagonalize_rejects_alternating() {
        let f = gf2();
        let mut c = Mat::zero(&f, 2, 2);
        c.set(0, 1, f.one());
        c.set(1, 0, f.one());
        assert!(congruence_diagonalize(&c).is_none());
    }
}
