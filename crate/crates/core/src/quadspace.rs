//! Quadratic forms of type (r, s) over a characteristic-2 field.
//!
//! A form is stored as r nonsingular pairs [a_i, b_i] plus s radical diagonal
//! entries ⟨c_j⟩, evaluated against coordinates over the standard basis
//! {e_1, f_1, ..., e_r, f_r, g_1, ..., g_s}. The associated bilinear form is
//! the polarization B(w, w') = q(w+w') + q(w) + q(w'); it pairs e_i with f_i
//! hyperbolically and vanishes on the radical block.

use std::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::linalg::{require_dim, span_basis, Mat};

/// Coordinate vector over the standard basis of a quadratic space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Vector {
    pub coords: Vec<Elem>,
}

impl Vector {
    pub fn new(coords: Vec<Elem>) -> Vector {
        Vector { coords }
    }

    pub fn zero(field: &Field, dim: usize) -> Vector {
        Vector { coords: vec![field.zero(); dim] }
    }

    pub fn std(field: &Field, dim: usize, idx: usize) -> Vector {
        let mut v = Vector::zero(field, dim);
        v.coords[idx] = field.one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Vector) -> Vector {
        Vector {
            coords: self.coords.iter().zip(&o.coords).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn scale(&self, by: &Elem) -> Vector {
        Vector { coords: self.coords.iter().map(|a| a.mul(by)).collect() }
    }
}

/// Quadratic form of type (r, s).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuadraticForm {
    field: Field,
    pairs: Vec<(Elem, Elem)>,
    diag: Vec<Elem>,
}

/// Outcome of the canonical decomposition into hyperbolic planes, an
/// anisotropic core and zero radical summands.
#[derive(Clone, Debug)]
pub struct WittDecomposition {
    pub witt_index: usize,
    pub nonsingular_aniso: QuadraticForm,
    pub singular_aniso: QuadraticForm,
    pub defect: usize,
}

/// Three-valued decision for operations that may be undecidable within the
/// configured search bounds over function fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tri {
    Yes,
    No,
    Inconclusive(String),
}

/// Bounds for searches over function fields.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Total-degree bound on polynomial candidates.
    pub degree_bound: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { degree_bound: 4 }
    }
}

impl QuadraticForm {
    pub fn new(field: &Field, pairs: Vec<(Elem, Elem)>, diag: Vec<Elem>) -> QuadraticForm {
        QuadraticForm { field: field.clone(), pairs, diag }
    }

    pub fn hyperbolic_plane(field: &Field) -> QuadraticForm {
        QuadraticForm::new(field, vec![(field.zero(), field.zero())], vec![])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn r(&self) -> usize {
        self.pairs.len()
    }

    pub fn s(&self) -> usize {
        self.diag.len()
    }

    pub fn dim(&self) -> usize {
        2 * self.pairs.len() + self.diag.len()
    }

    pub fn pairs(&self) -> &[(Elem, Elem)] {
        &self.pairs
    }

    pub fn diag(&self) -> &[Elem] {
        &self.diag
    }

    /// Orthogonal sum.
    pub fn perp(&self, o: &QuadraticForm) -> QuadraticForm {
        let mut pairs = self.pairs.clone();
        pairs.extend(o.pairs.iter().cloned());
        let mut diag = self.diag.clone();
        diag.extend(o.diag.iter().cloned());
        QuadraticForm { field: self.field.clone(), pairs, diag }
    }

    pub fn eval_q(&self, w: &Vector) -> Result<Elem> {
        require_dim(self.dim(), w.dim())?;
        let mut acc = self.field.zero();
        for (i, (a, b)) in self.pairs.iter().enumerate() {
            let x = &w.coords[2 * i];
            let y = &w.coords[2 * i + 1];
            acc = acc.add(&a.mul(&x.square()));
            acc = acc.add(&x.mul(y));
            acc = acc.add(&b.mul(&y.square()));
        }
        for (j, c) in self.diag.iter().enumerate() {
            let z = &w.coords[2 * self.pairs.len() + j];
            acc = acc.add(&c.mul(&z.square()));
        }
        Ok(acc)
    }

    /// Polarization B(w, w') = q(w+w') + q(w) + q(w').
    pub fn eval_b(&self, w: &Vector, w2: &Vector) -> Result<Elem> {
        require_dim(self.dim(), w.dim())?;
        require_dim(self.dim(), w2.dim())?;
        let sum = self.eval_q(&w.add(w2))?;
        Ok(sum.add(&self.eval_q(w)?).add(&self.eval_q(w2)?))
    }

    /// Gram matrix of B over the standard basis.
    pub fn gram(&self) -> Mat {
        let n = self.dim();
        let mut g = Mat::zero(&self.field, n, n);
        for i in 0..self.pairs.len() {
            g.set(2 * i, 2 * i + 1, self.field.one());
            g.set(2 * i + 1, 2 * i, self.field.one());
        }
        g
    }

    /// A vector is radical iff its nonsingular-pair coordinates vanish.
    pub fn is_radical_vector(&self, w: &Vector) -> bool {
        w.coords[..2 * self.pairs.len()].iter().all(|c| c.is_zero())
    }

    /// Standard radical basis vectors g_1, ..., g_s.
    pub fn radical_basis(&self) -> Vec<Vector> {
        let n = self.dim();
        (0..self.diag.len())
            .map(|j| Vector::std(&self.field, n, 2 * self.pairs.len() + j))
            .collect()
    }

    /// Root-coordinate matrix of the diagonal entries: column j holds the
    /// k²-coordinates of c_j over the square-free basis. Its kernel over k is
    /// exactly the zero-norm subspace of the radical.
    pub fn radical_gamma(&self) -> Mat {
        let basis_len = self.field.squarefree_basis().len();
        let cols: Vec<Vec<Elem>> = self.diag.iter().map(|c| c.root_coords()).collect();
        if cols.is_empty() {
            return Mat::zero(&self.field, basis_len, 0);
        }
        Mat::from_cols(&self.field, cols)
    }

    /// Basis of def(V) (zero-norm radical vectors) in radical coordinates.
    pub fn defect_subspace_radical_coords(&self) -> Vec<Vec<Elem>> {
        self.radical_gamma().kernel_basis()
    }

    /// Basis of def(V) as full-space vectors.
    pub fn defect_subspace(&self) -> Vec<Vector> {
        let off = 2 * self.pairs.len();
        let n = self.dim();
        self.defect_subspace_radical_coords()
            .into_iter()
            .map(|k| {
                let mut v = Vector::zero(&self.field, n);
                for (j, e) in k.into_iter().enumerate() {
                    v.coords[off + j] = e;
                }
                v
            })
            .collect()
    }

    pub fn defect(&self) -> usize {
        self.radical_gamma().kernel_basis().len()
    }

    /// All vectors of a finite-field space in row-major coordinate order.
    pub fn iter_vectors(&self) -> Option<impl Iterator<Item = Vector> + '_> {
        let order = self.field.order()?;
        let n = self.dim();
        let total = (order as u128).checked_pow(n as u32)?;
        let field = self.field.clone();
        Some((0..total).map(move |mut idx| {
            let mut coords = Vec::with_capacity(n);
            for _ in 0..n {
                coords.push(field.from_bits((idx % order as u128) as u16).unwrap());
                idx /= order as u128;
            }
            coords.reverse();
            Vector::new(coords)
        }))
    }

    /// First isotropic vector outside the radical, in deterministic scan
    /// order. `Tri::No` certifies absence over finite fields; over function
    /// fields a bounded search may end `Inconclusive`.
    pub fn isotropic_nonradical_vector(&self, cfg: &SearchConfig) -> (Option<Vector>, Tri) {
        if self.pairs.is_empty() {
            // B ≡ 0: every vector is radical
            return (None, Tri::No);
        }
        if self.field.is_finite() {
            for v in self.iter_vectors().expect("finite field") {
                if v.is_zero() || self.is_radical_vector(&v) {
                    continue;
                }
                if self.eval_q(&v).unwrap().is_zero() {
                    return (Some(v), Tri::Yes);
                }
            }
            return (None, Tri::No);
        }
        // function field: scan vectors whose coordinates come from a small
        // polynomial pool; sound but incomplete
        let pool = self.search_pool(cfg);
        let n = self.dim();
        let mut idx = vec![0usize; n];
        loop {
            let v = Vector::new(idx.iter().map(|&i| pool[i].clone()).collect());
            if !v.is_zero() && !self.is_radical_vector(&v) && self.eval_q(&v).unwrap().is_zero() {
                return (Some(v), Tri::Yes);
            }
            let mut k = n;
            loop {
                if k == 0 {
                    return (
                        None,
                        Tri::Inconclusive(format!(
                            "isotropy search exhausted (pool of {} candidates per coordinate)",
                            pool.len()
                        )),
                    );
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < pool.len() {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Candidate scalars for bounded function-field searches: 0, 1 and all
    /// monomials up to the degree bound, shrunk for higher dimensions to keep
    /// the scan size within reach.
    fn search_pool(&self, cfg: &SearchConfig) -> Vec<Elem> {
        let nvars = self.field.num_vars();
        let deg = if self.dim() <= 2 { cfg.degree_bound } else { 1.min(cfg.degree_bound) };
        let mut monos = vec![crate::field::poly::Mono::ONE];
        let mut frontier = vec![crate::field::poly::Mono::ONE];
        for _ in 0..deg {
            let mut next = Vec::new();
            for m in &frontier {
                for v in 0..nvars {
                    let mm = m.mul(&crate::field::poly::Mono::var(v));
                    if !next.contains(&mm) && !monos.contains(&mm) {
                        next.push(mm);
                    }
                }
            }
            monos.extend(next.iter().copied());
            frontier = next;
        }
        let mut pool = vec![self.field.zero()];
        for m in monos {
            pool.push(
                self.field
                    .poly_elem(crate::field::poly::Poly::from_mono(m))
                    .expect("monomial element"),
            );
        }
        pool
    }

    /// Canonical decomposition: split hyperbolic planes while an isotropic
    /// nonradical vector exists, then separate the radical into its zero-norm
    /// part and an anisotropic diagonal part.
    pub fn witt_decompose(&self, cfg: &SearchConfig) -> Result<WittDecomposition> {
        let mut current = self.clone();
        let mut witt_index = 0;
        loop {
            let (found, status) = current.isotropic_nonradical_vector(cfg);
            match (found, status) {
                (Some(v), _) => {
                    current = current.split_hyperbolic(&v)?;
                    witt_index += 1;
                }
                (None, Tri::No) => break,
                (None, Tri::Inconclusive(msg)) => {
                    return Err(Error::InvalidInput(format!(
                        "witt decomposition inconclusive: {msg}"
                    )));
                }
                (None, Tri::Yes) => unreachable!(),
            }
        }
        // radical split: defect first, then the anisotropic diagonal part
        let gamma = current.radical_gamma();
        let kernel = gamma.kernel_basis();
        let defect = kernel.len();
        let s = current.diag.len();
        // complete the kernel with standard coordinate vectors; the chosen
        // complement carries the anisotropic diagonal entries
        let mut chosen = kernel.clone();
        let mut aniso_entries = Vec::new();
        for j in 0..s {
            let mut cand = vec![current.field.zero(); s];
            cand[j] = current.field.one();
            let mut trial = chosen.clone();
            trial.push(cand.clone());
            if span_basis(&current.field, &trial).len() > span_basis(&current.field, &chosen).len()
            {
                chosen.push(cand);
                aniso_entries.push(current.diag[j].clone());
            }
        }
        debug_assert_eq!(aniso_entries.len(), s - defect);
        let nonsingular_aniso =
            QuadraticForm::new(&current.field, current.pairs.clone(), vec![]);
        let singular_aniso = QuadraticForm::new(&current.field, vec![], aniso_entries);
        // over finite fields, certify anisotropy of the residual exhaustively
        if self.field.is_finite() {
            let core = nonsingular_aniso.perp(&singular_aniso);
            for v in core.iter_vectors().expect("finite") {
                if !v.is_zero() && core.eval_q(&v)?.is_zero() {
                    return Err(Error::Internal(
                        "residual core failed exhaustive anisotropy certification".into(),
                    ));
                }
            }
        }
        Ok(WittDecomposition {
            witt_index,
            nonsingular_aniso,
            singular_aniso,
            defect,
        })
    }

    /// Split one hyperbolic plane off along the isotropic nonradical vector
    /// `v`; returns the form induced on the B-orthogonal complement.
    fn split_hyperbolic(&self, v: &Vector) -> Result<QuadraticForm> {
        let n = self.dim();
        // partner with B(v, w) ≠ 0 among standard basis vectors
        let mut partner = None;
        for k in 0..n {
            let w = Vector::std(&self.field, n, k);
            let b = self.eval_b(v, &w)?;
            if !b.is_zero() {
                partner = Some(w.scale(&b.inv()?));
                break;
            }
        }
        let w = partner.ok_or_else(|| Error::Internal("nonradical vector has a partner".into()))?;
        // make the partner isotropic: f = w + q(w)·v
        let f = w.add(&v.scale(&self.eval_q(&w)?));
        debug_assert!(self.eval_q(&f)?.is_zero());
        debug_assert!(self.eval_b(v, &f)?.is_one());
        // orthogonal complement of span{v, f}
        let rows = vec![
            (0..n)
                .map(|k| self.eval_b(v, &Vector::std(&self.field, n, k)).unwrap())
                .collect::<Vec<_>>(),
            (0..n)
                .map(|k| self.eval_b(&f, &Vector::std(&self.field, n, k)).unwrap())
                .collect::<Vec<_>>(),
        ];
        let comp = Mat::from_rows(&self.field, rows).kernel_basis();
        debug_assert_eq!(comp.len(), n - 2);
        let basis: Vec<Vector> = comp.into_iter().map(Vector::new).collect();
        let (form, _) = self.restrict_to(&basis)?;
        Ok(form)
    }

    /// Express the restriction of q to the span of `basis` as a type-(r, s)
    /// form; also returns the basis (in input coordinates) realizing it.
    pub fn restrict_to(&self, basis: &[Vector]) -> Result<(QuadraticForm, Vec<Vector>)> {
        let m = basis.len();
        let qvals: Vec<Elem> = basis
            .iter()
            .map(|v| self.eval_q(v))
            .collect::<Result<_>>()?;
        let mut b = Mat::zero(&self.field, m, m);
        for i in 0..m {
            for j in 0..m {
                b.set(i, j, self.eval_b(&basis[i], &basis[j])?);
            }
        }
        let gram = GramForm { field: self.field.clone(), qvals, b };
        let (form, change) = gram.into_type_form()?;
        // change columns express the new standard basis in gram coordinates;
        // push through to input coordinates
        let out_basis: Vec<Vector> = (0..change.cols())
            .map(|c| {
                let col = change.col(c);
                let mut acc = Vector::zero(&self.field, self.dim());
                for (i, coeff) in col.iter().enumerate() {
                    acc = acc.add(&basis[i].scale(coeff));
                }
                acc
            })
            .collect();
        Ok((form, out_basis))
    }
}

impl fmt::Display for QuadraticForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (a, b) in &self.pairs {
            if a.is_zero() && b.is_zero() {
                parts.push("H".to_string());
            } else {
                parts.push(format!("[{},{}]", a, b));
            }
        }
        if !self.diag.is_empty() {
            let cs: Vec<String> = self.diag.iter().map(|c| c.to_string()).collect();
            parts.push(format!("<{}>", cs.join(",")));
        }
        if parts.is_empty() {
            write!(f, "<>")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A quadratic space presented on an arbitrary basis: norms of the basis
/// vectors plus the (alternating) Gram matrix of B. Determines q uniquely:
/// q(Σ x_i v_i) = Σ x_i² q(v_i) + Σ_{i<j} x_i x_j B(v_i, v_j).
pub struct GramForm {
    pub field: Field,
    pub qvals: Vec<Elem>,
    pub b: Mat,
}

impl GramForm {
    /// Symplectic reduction into the interleaved type-(r, s) shape. Returns
    /// the form and the change matrix whose column k is the k-th new basis
    /// vector in the presentation coordinates.
    pub fn into_type_form(&self) -> Result<(QuadraticForm, Mat)> {
        let n = self.qvals.len();
        let field = &self.field;
        let mut remaining: Vec<Vec<Elem>> = (0..n)
            .map(|i| {
                let mut v = vec![field.zero(); n];
                v[i] = field.one();
                v
            })
            .collect();
        let b_of = |x: &[Elem], y: &[Elem]| -> Elem {
            let mut acc = field.zero();
            for (i, xi) in x.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                for (j, yj) in y.iter().enumerate() {
                    if yj.is_zero() {
                        continue;
                    }
                    acc = acc.add(&xi.mul(yj).mul(self.b.at(i, j)));
                }
            }
            acc
        };
        let q_of = |x: &[Elem]| -> Elem {
            let mut acc = field.zero();
            for (i, xi) in x.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                acc = acc.add(&xi.square().mul(&self.qvals[i]));
                for (j, xj) in x.iter().enumerate().skip(i + 1) {
                    if xj.is_zero() {
                        continue;
                    }
                    acc = acc.add(&xi.mul(xj).mul(self.b.at(i, j)));
                }
            }
            acc
        };
        let mut pair_vecs: Vec<(Vec<Elem>, Vec<Elem>)> = Vec::new();
        let mut pairs: Vec<(Elem, Elem)> = Vec::new();
        loop {
            // find (i, j) in the remaining block with B ≠ 0
            let mut found = None;
            'outer: for i in 0..remaining.len() {
                for j in (i + 1)..remaining.len() {
                    if !b_of(&remaining[i], &remaining[j]).is_zero() {
                        found = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let Some((i, j)) = found else { break };
            let e = remaining[i].clone();
            let beta_inv = b_of(&e, &remaining[j]).inv()?;
            let f: Vec<Elem> = remaining[j].iter().map(|c| c.mul(&beta_inv)).collect();
            // clear the pair from every other remaining vector:
            // v ← v + B(v,f)·e + B(v,e)·f
            let mut next = Vec::new();
            for (k, v) in remaining.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                let ce = b_of(v, &f);
                let cf = b_of(v, &e);
                let mut nv = v.clone();
                for idx in 0..n {
                    nv[idx] = nv[idx].add(&ce.mul(&e[idx])).add(&cf.mul(&f[idx]));
                }
                next.push(nv);
            }
            pairs.push((q_of(&e), q_of(&f)));
            pair_vecs.push((e, f));
            remaining = next;
        }
        // remaining vectors span the radical
        let diag: Vec<Elem> = remaining.iter().map(|v| q_of(v)).collect();
        let mut cols = Vec::new();
        for (e, f) in &pair_vecs {
            cols.push(e.clone());
            cols.push(f.clone());
        }
        cols.extend(remaining.iter().cloned());
        let change = if cols.is_empty() {
            Mat::zero(field, n, 0)
        } else {
            Mat::from_cols(field, cols)
        };
        Ok((QuadraticForm::new(field, pairs, diag), change))
    }
}

/// An invertible map certified to preserve q.
#[derive(Clone, Debug)]
pub struct Isometry {
    form: QuadraticForm,
    mat: Mat,
}

impl Isometry {
    /// Certification: B-preservation on the Gram matrix first, then q on all
    /// standard basis vectors and their pairwise sums. Given B-preservation,
    /// the defect D(w) = q(φw) + q(w) is additive with Frobenius scaling, so
    /// the finite check suffices; the pairwise sums double-check additivity.
    pub fn new(form: &QuadraticForm, mat: Mat) -> Result<Isometry> {
        let n = form.dim();
        require_dim(n, mat.rows())?;
        require_dim(n, mat.cols())?;
        if !mat.is_invertible() {
            return Err(Error::NotIsometry("matrix is singular".into()));
        }
        let gram = form.gram();
        if mat.transpose().mul(&gram).mul(&mat) != gram {
            return Err(Error::NotIsometry("bilinear form not preserved".into()));
        }
        let cols: Vec<Vector> = (0..n).map(|c| Vector::new(mat.col(c))).collect();
        for k in 0..n {
            let want = form.eval_q(&Vector::std(&form.field, n, k))?;
            if form.eval_q(&cols[k])? != want {
                return Err(Error::NotIsometry(format!("q not preserved on basis vector {k}")));
            }
        }
        for k in 0..n {
            for l in (k + 1)..n {
                let src = Vector::std(&form.field, n, k).add(&Vector::std(&form.field, n, l));
                let img = cols[k].add(&cols[l]);
                if form.eval_q(&img)? != form.eval_q(&src)? {
                    return Err(Error::NotIsometry(format!(
                        "q not preserved on basis sum {k}+{l}"
                    )));
                }
            }
        }
        Ok(Isometry { form: form.clone(), mat })
    }

    pub fn identity(form: &QuadraticForm) -> Isometry {
        Isometry { form: form.clone(), mat: Mat::identity(form.field(), form.dim()) }
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.form
    }

    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        Vector::new(self.mat.mul_vec(&v.coords))
    }

    pub fn compose(&self, o: &Isometry) -> Isometry {
        Isometry { form: self.form.clone(), mat: self.mat.mul(&o.mat) }
    }

    pub fn inverse(&self) -> Isometry {
        Isometry {
            form: self.form.clone(),
            mat: self.mat.inverse().expect("isometries are invertible"),
        }
    }
}

/// Rewrite rules on the coefficient data realizing standard isometries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteRule {
    /// [a,b] → [b,a]
    Swap,
    /// [a,b] → [a, a+b+1]
    Shift,
    /// [a,b] → [α²a, α⁻²b], α ≠ 0
    Scale,
    /// [a,b] ⊥ [c,d] → [a+c, b] ⊥ [c, b+d] on pairs (pos, pos+1)
    Mix,
}

pub struct Rewrite {
    pub form: QuadraticForm,
    /// Column k is the new basis vector expressed in the old coordinates.
    pub basis_change: Mat,
}

pub fn rewrite_isometry(
    f: &QuadraticForm,
    rule: RewriteRule,
    position: usize,
    scalar: Option<&Elem>,
) -> Result<Rewrite> {
    let field = f.field().clone();
    let r = f.r();
    let n = f.dim();
    let need_pairs = if rule == RewriteRule::Mix { 2 } else { 1 };
    if position + need_pairs > r {
        return Err(Error::InvalidInput(format!(
            "rule not applicable at pair position {position} (form has {r} pairs)"
        )));
    }
    let mut pairs = f.pairs().to_vec();
    let mut change = Mat::identity(&field, n);
    let (e1, f1) = (2 * position, 2 * position + 1);
    match rule {
        RewriteRule::Swap => {
            let (a, b) = pairs[position].clone();
            pairs[position] = (b, a);
            // e' = f, f' = e
            change.set(e1, e1, field.zero());
            change.set(f1, f1, field.zero());
            change.set(f1, e1, field.one());
            change.set(e1, f1, field.one());
        }
        RewriteRule::Shift => {
            let (a, b) = pairs[position].clone();
            let nb = a.add(&b).add(&field.one());
            pairs[position] = (a, nb);
            // e' = e, f' = e + f
            change.set(e1, f1, field.one());
        }
        RewriteRule::Scale => {
            let alpha = scalar.ok_or_else(|| {
                Error::InvalidInput("scale rule requires a nonzero scalar".into())
            })?;
            if alpha.is_zero() {
                return Err(Error::InvalidInput("scale rule requires a nonzero scalar".into()));
            }
            let (a, b) = pairs[position].clone();
            let a2 = alpha.square();
            pairs[position] = (a2.mul(&a), b.div(&a2)?);
            // e' = αe, f' = α⁻¹f
            change.set(e1, e1, alpha.clone());
            change.set(f1, f1, alpha.inv()?);
        }
        RewriteRule::Mix => {
            let (a, b) = pairs[position].clone();
            let (c, d) = pairs[position + 1].clone();
            pairs[position] = (a.add(&c), b.clone());
            pairs[position + 1] = (c, b.add(&d));
            // e1' = e1+e2, f1' = f1, e2' = e2, f2' = f1+f2
            let (e2, f2) = (2 * position + 2, 2 * position + 3);
            change.set(e2, e1, field.one());
            change.set(f1, f2, field.one());
        }
    }
    let form = QuadraticForm::new(&field, pairs, f.diag().to_vec());
    Ok(Rewrite { form, basis_change: change })
}

/// Extend mutually B-orthogonal, independent, nonradical vectors to a
/// symplectic basis {e_1', f_1, ..., e_r', f_r} of a maximal nonsingular
/// subspace containing their span, following the recursive construction of
/// the characteristic-2 Gram-Schmidt lemma.
pub fn complete_symplectic_basis(f: &QuadraticForm, vecs: &[Vector]) -> Result<Vec<Vector>> {
    let field = f.field().clone();
    let n = f.dim();
    for v in vecs {
        require_dim(n, v.dim())?;
        if f.is_radical_vector(v) {
            return Err(Error::InvalidInput(
                "input vector lies in rad(V); no symplectic partner exists".into(),
            ));
        }
    }
    let rows: Vec<Vec<Elem>> = vecs.iter().map(|v| v.coords.clone()).collect();
    if span_basis(&field, &rows).len() != vecs.len() {
        return Err(Error::InvalidInput("input vectors are linearly dependent".into()));
    }
    for i in 0..vecs.len() {
        for j in (i + 1)..vecs.len() {
            if !f.eval_b(&vecs[i], &vecs[j])?.is_zero() {
                return Err(Error::InvalidInput(
                    "input vectors are not mutually B-orthogonal".into(),
                ));
            }
        }
    }
    let mut pairs: Vec<(Vector, Vector)> = Vec::new();
    let correct = |v: &Vector, pairs: &[(Vector, Vector)]| -> Vector {
        let mut out = v.clone();
        for (e, fv) in pairs {
            let ce = f.eval_b(&out, fv).unwrap();
            let cf = f.eval_b(&out, e).unwrap();
            out = out.add(&e.scale(&ce)).add(&fv.scale(&cf));
        }
        out
    };
    let mut queue: Vec<Vector> = vecs.to_vec();
    let r = f.r();
    while pairs.len() < r {
        let e = if let Some(v) = queue.first().cloned() {
            queue.remove(0);
            correct(&v, &pairs)
        } else {
            // extend: first corrected standard basis vector outside rad and
            // outside the span of the pairs chosen so far
            let mut cand = None;
            for k in 0..n {
                let w = correct(&Vector::std(&field, n, k), &pairs);
                if !f.is_radical_vector(&w) {
                    cand = Some(w);
                    break;
                }
            }
            match cand {
                Some(w) => w,
                None => break,
            }
        };
        if f.is_radical_vector(&e) {
            return Err(Error::Internal("corrected vector fell into the radical".into()));
        }
        // partner among corrected standard basis vectors
        let mut partner = None;
        for k in 0..n {
            let w = correct(&Vector::std(&field, n, k), &pairs);
            let b = f.eval_b(&e, &w)?;
            if !b.is_zero() {
                partner = Some(w.scale(&b.inv()?));
                break;
            }
        }
        let fv = partner.ok_or_else(|| Error::Internal("nonradical vector must pair".into()))?;
        pairs.push((e, fv));
    }
    if pairs.len() < vecs.len() {
        return Err(Error::Internal("completion lost input vectors".into()));
    }
    let mut out = Vec::with_capacity(2 * pairs.len());
    for (e, fv) in pairs {
        out.push(e);
        out.push(fv);
    }
    Ok(out)
}

/// Dual partners for a given mutually-orthogonal independent nonradical
/// family: returns v_1, ..., v_l with B(u_k, v_i) = δ_ki.
pub fn symplectic_partners(f: &QuadraticForm, vecs: &[Vector]) -> Result<Vec<Vector>> {
    let field = f.field().clone();
    let n = f.dim();
    let l = vecs.len();
    // rows: functional B(u_k, ·) over the standard basis
    let mut rows = Vec::with_capacity(l);
    for u in vecs {
        rows.push(
            (0..n)
                .map(|c| f.eval_b(u, &Vector::std(&field, n, c)))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let m = Mat::from_rows(&field, rows);
    let mut partners = Vec::with_capacity(l);
    for i in 0..l {
        let mut rhs = vec![field.zero(); l];
        rhs[i] = field.one();
        let sol = m.solve(&rhs).ok_or_else(|| {
            Error::InvalidInput("vectors admit no dual symplectic partners".into())
        })?;
        partners.push(Vector::new(sol));
    }
    Ok(partners)
}

/// Isometry decision between two forms over the same field.
pub fn is_isometric(f1: &QuadraticForm, f2: &QuadraticForm, cfg: &SearchConfig) -> Result<Tri> {
    if f1.field() != f2.field() {
        return Err(Error::FieldMismatch);
    }
    if f1.dim() != f2.dim() || f1.s() != f2.s() {
        return Ok(Tri::No);
    }
    // totally singular forms: exact column-space criterion over any field.
    // q(Av) = q(v) for all v iff Γ·A = Γ', so an isometry exists iff the
    // root-coordinate matrices are column-equivalent.
    if f1.r() == 0 && f2.r() == 0 {
        let g1 = f1.radical_gamma();
        let g2 = f2.radical_gamma();
        return Ok(if g1.same_column_space(&g2) { Tri::Yes } else { Tri::No });
    }
    if f1.field().is_finite() {
        let w1 = f1.witt_decompose(cfg)?;
        let w2 = f2.witt_decompose(cfg)?;
        if w1.witt_index != w2.witt_index || w1.defect != w2.defect {
            return Ok(Tri::No);
        }
        let core1 = w1.nonsingular_aniso.perp(&w1.singular_aniso);
        let core2 = w2.nonsingular_aniso.perp(&w2.singular_aniso);
        if core1.dim() != core2.dim() || core1.s() != core2.s() {
            return Ok(Tri::No);
        }
        return Ok(if cores_isometric_bruteforce(&core1, &core2)? {
            Tri::Yes
        } else {
            Tri::No
        });
    }
    // function field with nonsingular part: compare what is computable
    match (f1.witt_decompose(cfg), f2.witt_decompose(cfg)) {
        (Ok(w1), Ok(w2)) => {
            if w1.witt_index != w2.witt_index || w1.defect != w2.defect {
                return Ok(Tri::No);
            }
            if !w1
                .singular_aniso
                .radical_gamma()
                .same_column_space(&w2.singular_aniso.radical_gamma())
            {
                return Ok(Tri::No);
            }
            Ok(Tri::Inconclusive(
                "computable invariants agree; no isometry witness within bounds".into(),
            ))
        }
        _ => Ok(Tri::Inconclusive("witt decomposition exceeded search bounds".into())),
    }
}

/// Exhaustive isometry search between small anisotropic cores (dim ≤ 2 over
/// a finite field: |k|^(d²) candidate matrices).
fn cores_isometric_bruteforce(c1: &QuadraticForm, c2: &QuadraticForm) -> Result<bool> {
    let d = c1.dim();
    if d != c2.dim() {
        return Ok(false);
    }
    if d == 0 {
        return Ok(true);
    }
    let field = c1.field().clone();
    let order = field.order().expect("finite field") as usize;
    let total = order.pow((d * d) as u32);
    if total > 50_000_000 {
        return Err(Error::CapExceeded { estimate: total as u128, cap: 50_000_000 });
    }
    let elems: Vec<Elem> = field.iter_elems().expect("finite").collect();
    let mut idx = vec![0usize; d * d];
    loop {
        let mut m = Mat::zero(&field, d, d);
        for r in 0..d {
            for c in 0..d {
                m.set(r, c, elems[idx[r * d + c]].clone());
            }
        }
        if m.is_invertible() {
            // q2(v) = q1(Mv) for all v over a basis-plus-sums check
            let mut ok = true;
            'check: for k in 0..d {
                let ek = Vector::std(&field, d, k);
                if c2.eval_q(&ek)? != c1.eval_q(&Vector::new(m.mul_vec(&ek.coords)))? {
                    ok = false;
                    break;
                }
                for l in (k + 1)..d {
                    let s = ek.add(&Vector::std(&field, d, l));
                    if c2.eval_q(&s)? != c1.eval_q(&Vector::new(m.mul_vec(&s.coords)))? {
                        ok = false;
                        break 'check;
                    }
                }
            }
            // B-preservation comes free for forms of dim ≤ 2 with matching q
            // on basis and sums, but check anyway
            if ok {
                let g1 = c1.gram();
                let g2 = c2.gram();
                if m.transpose().mul(&g1).mul(&m) == g2 {
                    return Ok(true);
                }
            }
        }
        let mut k = idx.len();
        loop {
            if k == 0 {
                return Ok(false);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < order {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> Field {
        Field::binary(1).unwrap()
    }

    fn gf4() -> Field {
        Field::binary(2).unwrap()
    }

    fn e(f: &Field, b: u16) -> Elem {
        f.from_bits(b).unwrap()
    }

    fn form(f: &Field, pairs: &[(u16, u16)], diag: &[u16]) -> QuadraticForm {
        QuadraticForm::new(
            f,
            pairs.iter().map(|&(a, b)| (e(f, a), e(f, b))).collect(),
            diag.iter().map(|&c| e(f, c)).collect(),
        )
    }

    fn vec_of(f: &Field, bits: &[u16]) -> Vector {
        Vector::new(bits.iter().map(|&b| e(f, b)).collect())
    }

    #[test]
    fn eval_q_basics() {
        let f = gf2();
        let q = form(&f, &[(0, 0)], &[]);
        assert!(q.eval_q(&vec_of(&f, &[0, 0])).unwrap().is_zero());
        // xy term only: w = (1,1) → 1
        assert!(q.eval_q(&vec_of(&f, &[1, 1])).unwrap().is_one());
    }

    #[test]
    fn eval_q_diagonal_norms() {
        // ⟨1, t2⟩ over F2(t1,t2): g1 → 1, g2 → t2
        let k = Field::rational(&["t1", "t2"]).unwrap();
        let t2 = k.var_elem(1).unwrap();
        let q = QuadraticForm::new(&k, vec![], vec![k.one(), t2.clone()]);
        assert!(q.eval_q(&Vector::std(&k, 2, 0)).unwrap().is_one());
        assert_eq!(q.eval_q(&Vector::std(&k, 2, 1)).unwrap(), t2);
    }

    #[test]
    fn bilinear_is_hyperbolic_on_pairs_and_zero_on_radical() {
        let f = gf4();
        let q = form(&f, &[(2, 3)], &[1, 0]);
        let e1 = Vector::std(&f, 4, 0);
        let f1 = Vector::std(&f, 4, 1);
        let g1 = Vector::std(&f, 4, 2);
        assert!(q.eval_b(&e1, &f1).unwrap().is_one());
        assert!(q.eval_b(&e1, &e1).unwrap().is_zero());
        for k in 0..4 {
            assert!(q.eval_b(&g1, &Vector::std(&f, 4, k)).unwrap().is_zero());
        }
    }

    #[test]
    fn witt_hyperbolic_plane() {
        let f = gf2();
        let q = form(&f, &[(0, 0)], &[]);
        let w = q.witt_decompose(&SearchConfig::default()).unwrap();
        assert_eq!(w.witt_index, 1);
        assert_eq!(w.defect, 0);
        assert_eq!(w.nonsingular_aniso.dim(), 0);
        assert_eq!(w.singular_aniso.dim(), 0);
    }

    #[test]
    fn witt_anisotropic_pair_gf2() {
        // [1,1] over GF(2): all 3 nonzero vectors have q = 1
        let f = gf2();
        let q = form(&f, &[(1, 1)], &[]);
        let w = q.witt_decompose(&SearchConfig::default()).unwrap();
        assert_eq!(w.witt_index, 0);
        assert_eq!(w.nonsingular_aniso.dim(), 2);
        assert_eq!(w.defect, 0);
    }

    #[test]
    fn witt_anisotropic_pair_becomes_split_over_gf4() {
        // x²+x+1 has the root ω in GF(4), so [1,1] splits there
        let f = gf4();
        let q = form(&f, &[(1, 1)], &[]);
        let w = q.witt_decompose(&SearchConfig::default()).unwrap();
        assert_eq!(w.witt_index, 1);
        assert_eq!(w.defect, 0);
    }

    #[test]
    fn witt_radical_with_defect() {
        // ⟨0,0,1⟩ over GF(2): defect 2, singular core ⟨1⟩
        let f = gf2();
        let q = form(&f, &[], &[0, 0, 1]);
        let w = q.witt_decompose(&SearchConfig::default()).unwrap();
        assert_eq!(w.witt_index, 0);
        assert_eq!(w.defect, 2);
        assert_eq!(w.singular_aniso.diag().len(), 1);
        assert!(w.singular_aniso.diag()[0].is_one());
    }

    #[test]
    fn witt_mixed_radical_interaction() {
        // [1,1] ⊥ ⟨1⟩ over GF(2): (1,0,1) is isotropic and nonradical,
        // so the plane splits: i=1, core ⟨1⟩
        let f = gf2();
        let q = form(&f, &[(1, 1)], &[1]);
        let w = q.witt_decompose(&SearchConfig::default()).unwrap();
        assert_eq!(w.witt_index, 1);
        assert_eq!(w.defect, 0);
        assert_eq!(w.singular_aniso.dim(), 1);
    }

    #[test]
    fn rewrite_rules_preserve_isometry_class() {
        let f = gf4();
        let q = form(&f, &[(2, 3), (1, 1)], &[1]);
        let cfg = SearchConfig::default();
        let w0 = q.witt_decompose(&cfg).unwrap();
        for (rule, scalar) in [
            (RewriteRule::Swap, None),
            (RewriteRule::Shift, None),
            (RewriteRule::Scale, Some(e(&f, 2))),
            (RewriteRule::Mix, None),
        ] {
            let rw = rewrite_isometry(&q, rule, 0, scalar.as_ref()).unwrap();
            let w1 = rw.form.witt_decompose(&cfg).unwrap();
            assert_eq!(w0.witt_index, w1.witt_index, "{rule:?}");
            assert_eq!(w0.defect, w1.defect, "{rule:?}");
            // substitution check: q_new(w) = q_old(change·w) on all vectors
            for v in rw.form.iter_vectors().unwrap().take(256) {
                let img = Vector::new(rw.basis_change.mul_vec(&v.coords));
                assert_eq!(rw.form.eval_q(&v).unwrap(), q.eval_q(&img).unwrap(), "{rule:?}");
            }
        }
    }

    #[test]
    fn rewrite_shift_self_map_over_gf2() {
        let f = gf2();
        let q = form(&f, &[(1, 1)], &[]);
        let rw = rewrite_isometry(&q, RewriteRule::Shift, 0, None).unwrap();
        // [1, 1+1+1] = [1,1]
        assert_eq!(rw.form, q);
    }

    #[test]
    fn rewrite_mix_rule() {
        let f = gf4();
        let q = form(&f, &[(2, 3), (1, 2)], &[]);
        let rw = rewrite_isometry(&q, RewriteRule::Mix, 0, None).unwrap();
        let ps = rw.form.pairs();
        assert_eq!(ps[0].0, e(&f, 2).add(&e(&f, 1)));
        assert_eq!(ps[0].1, e(&f, 3));
        assert_eq!(ps[1].0, e(&f, 1));
        assert_eq!(ps[1].1, e(&f, 3).add(&e(&f, 2)));
    }

    #[test]
    fn complete_basis_already_paired() {
        let f = gf2();
        let q = form(&f, &[(0, 0)], &[]);
        let out = complete_symplectic_basis(&q, &[Vector::std(&f, 2, 0)]).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], Vector::std(&f, 2, 0));
        assert!(q.eval_b(&out[0], &out[1]).unwrap().is_one());
    }

    #[test]
    fn complete_basis_diagonal_input() {
        let f = gf2();
        let q = form(&f, &[(0, 0), (0, 0)], &[]);
        let v = vec_of(&f, &[1, 0, 1, 0]); // e1 + e2
        let out = complete_symplectic_basis(&q, &[v.clone()]).unwrap();
        assert_eq!(out.len(), 4);
        assert_eq!(out[0], v);
        // standard symplectic pairing matrix
        for i in 0..2 {
            for j in 0..2 {
                let b_ef = q.eval_b(&out[2 * i], &out[2 * j + 1]).unwrap();
                assert_eq!(b_ef.is_one(), i == j);
                assert!(q.eval_b(&out[2 * i], &out[2 * j]).unwrap().is_zero());
                assert!(q.eval_b(&out[2 * i + 1], &out[2 * j + 1]).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn complete_basis_rejects_radical_input() {
        let f = gf2();
        let q = form(&f, &[(0, 0)], &[0]);
        assert!(complete_symplectic_basis(&q, &[Vector::std(&f, 3, 2)]).is_err());
    }

    #[test]
    fn partners_are_dual() {
        let f = gf4();
        let q = form(&f, &[(0, 0), (0, 0)], &[1]);
        let u1 = vec_of(&f, &[1, 0, 1, 0, 0]);
        let u2 = vec_of(&f, &[0, 0, 0, 0, 0]).add(&Vector::std(&f, 5, 2)); // e2
        let ps = symplectic_partners(&q, &[u1.clone(), u2.clone()]).unwrap();
        for (i, u) in [u1, u2].iter().enumerate() {
            for (j, p) in ps.iter().enumerate() {
                assert_eq!(q.eval_b(u, p).unwrap().is_one(), i == j);
            }
        }
    }

    #[test]
    fn isometric_same_form() {
        let f = gf4();
        let q = form(&f, &[(2, 3)], &[1]);
        assert_eq!(is_isometric(&q, &q, &SearchConfig::default()).unwrap(), Tri::Yes);
    }

    #[test]
    fn isometric_distinguishes_witt_index() {
        let f = gf2();
        let h = form(&f, &[(0, 0)], &[]);
        let a = form(&f, &[(1, 1)], &[]);
        assert_eq!(is_isometric(&h, &a, &SearchConfig::default()).unwrap(), Tri::No);
    }

    #[test]
    fn isometric_paper_counterexample_norms() {
        // ⟨1, t2⟩ ≅ ⟨1+t1²t2, 1+t2⟩ over F2(t1,t2)
        let k = Field::rational(&["t1", "t2"]).unwrap();
        let t1 = k.var_elem(0).unwrap();
        let t2 = k.var_elem(1).unwrap();
        let one = k.one();
        let q1 = QuadraticForm::new(&k, vec![], vec![one.clone(), t2.clone()]);
        let q2 = QuadraticForm::new(
            &k,
            vec![],
            vec![one.add(&t1.square().mul(&t2)), one.add(&t2)],
        );
        assert_eq!(is_isometric(&q1, &q2, &SearchConfig::default()).unwrap(), Tri::Yes);
        // and a genuinely different pair says no
        let q3 = QuadraticForm::new(&k, vec![], vec![one.clone(), t1.clone()]);
        assert_eq!(is_isometric(&q1, &q3, &SearchConfig::default()).unwrap(), Tri::No);
    }

    #[test]
    fn totally_singular_defect_cancellation() {
        // ⟨1,1⟩ ≅ ⟨1,0⟩ over GF(2): both are ⟨1⟩ ⊥ ⟨0⟩ up to isometry
        let f = gf2();
        let a = form(&f, &[], &[1, 1]);
        let b = form(&f, &[], &[1, 0]);
        assert_eq!(is_isometric(&a, &b, &SearchConfig::default()).unwrap(), Tri::Yes);
    }

    #[test]
    fn isometry_certification() {
        let f = gf2();
        let q = form(&f, &[(0, 0)], &[]);
        // swap e and f is an isometry of H
        let m = Mat::from_rows(
            &f,
            vec![
                vec![f.zero(), f.one()],
                vec![f.one(), f.zero()],
            ],
        );
        assert!(Isometry::new(&q, m).is_ok());
        // e ↦ e+f breaks q on H? q(e+f) = 1 ≠ 0 = q(e): not an isometry
        let bad = Mat::from_rows(
            &f,
            vec![
                vec![f.one(), f.zero()],
                vec![f.one(), f.one()],
            ],
        );
        assert!(Isometry::new(&q, bad).is_err());
    }

    #[test]
    fn gram_form_normalization_roundtrip() {
        // restrict H ⊥ H to a rotated basis and renormalize
        let f = gf2();
        let q = form(&f, &[(0, 0), (0, 0)], &[]);
        let basis = vec![
            vec_of(&f, &[1, 0, 1, 0]),
            vec_of(&f, &[0, 1, 0, 0]),
            vec_of(&f, &[0, 0, 1, 1]),
            vec_of(&f, &[1, 0, 0, 1]),
        ];
        let (restricted, out_basis) = q.restrict_to(&basis).unwrap();
        assert_eq!(restricted.dim(), 4);
        // out_basis realizes the restricted form inside the original space
        for (k, v) in out_basis.iter().enumerate() {
            let std = Vector::std(&f, 4, k);
            assert_eq!(q.eval_q(v).unwrap(), restricted.eval_q(&std).unwrap());
        }
    }
}
