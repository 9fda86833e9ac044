//! Exact arithmetic over characteristic-2 fields.
//!
//! Two kinds of field are supported: binary extensions GF(2^m) with table
//! arithmetic, and rational function fields F2(t1,...,tn) with canonical
//! reduced fractions of multivariate polynomials. Both expose square roots
//! and decomposition over the subfield of squares k².

pub mod gf2m;
pub mod poly;

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};
use gf2m::Gf2m;
use poly::{gcd, Mono, Poly, PolyDisplay};

#[derive(Debug)]
pub enum FieldRepr {
    /// GF(2^m) with a fixed irreducible modulus.
    Binary(Gf2m),
    /// F2(t1,...,tn) for n ≤ 3 named variables.
    Rational { vars: Vec<String> },
}

/// Shared field descriptor; cheap to clone, equality is structural.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldRepr>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        match (&*self.0, &*other.0) {
            (FieldRepr::Binary(a), FieldRepr::Binary(b)) => {
                a.m == b.m && a.modulus == b.modulus
            }
            (FieldRepr::Rational { vars: a }, FieldRepr::Rational { vars: b }) => a == b,
            _ => false,
        }
    }
}

impl Eq for Field {}

impl Field {
    pub fn binary(m: u32) -> Result<Field> {
        Ok(Field(Arc::new(FieldRepr::Binary(Gf2m::with_default_modulus(m)?))))
    }

    pub fn binary_with_modulus(m: u32, modulus: u32) -> Result<Field> {
        Ok(Field(Arc::new(FieldRepr::Binary(Gf2m::new(m, modulus)?))))
    }

    pub fn rational(vars: &[&str]) -> Result<Field> {
        if vars.is_empty() || vars.len() > poly::MAX_VARS {
            return Err(Error::InvalidField(format!(
                "rational function fields support 1..={} variables",
                poly::MAX_VARS
            )));
        }
        let mut seen = Vec::new();
        for v in vars {
            if v.is_empty() || seen.contains(v) {
                return Err(Error::InvalidField("variable names must be distinct and nonempty".into()));
            }
            seen.push(v);
        }
        Ok(Field(Arc::new(FieldRepr::Rational {
            vars: vars.iter().map(|s| s.to_string()).collect(),
        })))
    }

    pub fn repr(&self) -> &FieldRepr {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        matches!(&*self.0, FieldRepr::Binary(_))
    }

    /// Number of elements for finite fields.
    pub fn order(&self) -> Option<u64> {
        match &*self.0 {
            FieldRepr::Binary(g) => Some(g.order() as u64),
            FieldRepr::Rational { .. } => None,
        }
    }

    pub fn num_vars(&self) -> usize {
        match &*self.0 {
            FieldRepr::Binary(_) => 0,
            FieldRepr::Rational { vars } => vars.len(),
        }
    }

    pub fn zero(&self) -> Elem {
        match &*self.0 {
            FieldRepr::Binary(_) => Elem { field: self.clone(), repr: Repr::Bits(0) },
            FieldRepr::Rational { .. } => Elem {
                field: self.clone(),
                repr: Repr::Frac(Poly::zero(), Poly::one()),
            },
        }
    }

    pub fn one(&self) -> Elem {
        match &*self.0 {
            FieldRepr::Binary(_) => Elem { field: self.clone(), repr: Repr::Bits(1) },
            FieldRepr::Rational { .. } => Elem {
                field: self.clone(),
                repr: Repr::Frac(Poly::one(), Poly::one()),
            },
        }
    }

    pub fn from_bits(&self, bits: u16) -> Result<Elem> {
        match &*self.0 {
            FieldRepr::Binary(g) if g.contains(bits) => {
                Ok(Elem { field: self.clone(), repr: Repr::Bits(bits) })
            }
            FieldRepr::Binary(g) => Err(Error::InvalidInput(format!(
                "bit pattern {bits:#x} outside GF(2^{})",
                g.m
            ))),
            FieldRepr::Rational { .. } => match bits {
                0 => Ok(self.zero()),
                1 => Ok(self.one()),
                _ => Err(Error::InvalidInput(
                    "only 0 and 1 embed literally into a function field".into(),
                )),
            },
        }
    }

    /// Canonical reduced fraction; reduces by the gcd.
    pub fn from_fraction(&self, num: Poly, den: Poly) -> Result<Elem> {
        match &*self.0 {
            FieldRepr::Binary(_) => Err(Error::InvalidInput(
                "fraction literals require a rational function field".into(),
            )),
            FieldRepr::Rational { vars } => {
                if den.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                for var in vars.len()..poly::MAX_VARS {
                    if num.contains_var(var) || den.contains_var(var) {
                        return Err(Error::InvalidInput(format!(
                            "polynomial uses variable #{var} beyond the field's {} variables",
                            vars.len()
                        )));
                    }
                }
                Ok(Elem { field: self.clone(), repr: Repr::Frac(num, den) }.reduced())
            }
        }
    }

    pub fn poly_elem(&self, p: Poly) -> Result<Elem> {
        self.from_fraction(p, Poly::one())
    }

    pub fn var_elem(&self, i: usize) -> Result<Elem> {
        if i >= self.num_vars() {
            return Err(Error::InvalidInput(format!("no variable #{i} in this field")));
        }
        self.poly_elem(Poly::var(i))
    }

    /// The square-free monomial basis of k as a vector space over k².
    /// For perfect fields this is just {1}.
    pub fn squarefree_basis(&self) -> Vec<Mono> {
        let n = self.num_vars();
        let mut basis = Vec::with_capacity(1 << n);
        for mask in 0u32..(1 << n) {
            let mut exps = [0u16; poly::MAX_VARS];
            for (v, e) in exps.iter_mut().enumerate().take(n) {
                *e = ((mask >> v) & 1) as u16;
            }
            basis.push(Mono { exps });
        }
        basis.sort();
        basis
    }

    /// Iterate all elements of a finite field in canonical bit order.
    pub fn iter_elems(&self) -> Option<impl Iterator<Item = Elem> + '_> {
        match &*self.0 {
            FieldRepr::Binary(g) => {
                let field = self.clone();
                Some((0..g.order() as u16).map(move |b| Elem {
                    field: field.clone(),
                    repr: Repr::Bits(b),
                }))
            }
            FieldRepr::Rational { .. } => None,
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            FieldRepr::Binary(g) => {
                if g.modulus == gf2m::default_modulus(g.m).unwrap_or(0) {
                    write!(f, "GF(2^{})", g.m)
                } else {
                    write!(f, "GF(2^{}; modulus={:#x})", g.m, g.modulus)
                }
            }
            FieldRepr::Rational { vars } => write!(f, "F2({})", vars.join(",")),
        }
    }
}

#[derive(Clone, Debug)]
enum Repr {
    Bits(u16),
    /// Reduced fraction: den ≠ 0, gcd(num, den) = 1, zero is (0, 1).
    Frac(Poly, Poly),
}

/// An exact field element; value semantics, immutable.
#[derive(Clone, Debug)]
pub struct Elem {
    field: Field,
    repr: Repr,
}

impl PartialEq for Elem {
    fn eq(&self, other: &Self) -> bool {
        debug_assert!(self.field == other.field, "comparing elements of different fields");
        match (&self.repr, &other.repr) {
            (Repr::Bits(a), Repr::Bits(b)) => a == b,
            (Repr::Frac(n1, d1), Repr::Frac(n2, d2)) => n1 == n2 && d1 == d2,
            _ => false,
        }
    }
}

impl Eq for Elem {}

impl Hash for Elem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.repr {
            Repr::Bits(b) => b.hash(state),
            Repr::Frac(n, d) => {
                n.hash(state);
                d.hash(state);
            }
        }
    }
}

impl Elem {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn bits(&self) -> Option<u16> {
        match &self.repr {
            Repr::Bits(b) => Some(*b),
            _ => None,
        }
    }

    pub fn fraction(&self) -> Option<(&Poly, &Poly)> {
        match &self.repr {
            Repr::Frac(n, d) => Some((n, d)),
            _ => None,
        }
    }

    fn reduced(self) -> Elem {
        match self.repr {
            Repr::Bits(_) => self,
            Repr::Frac(num, den) => {
                if num.is_zero() {
                    return Elem { field: self.field, repr: Repr::Frac(Poly::zero(), Poly::one()) };
                }
                let g = gcd(&num, &den);
                let (num, den) = if g.is_one() {
                    (num, den)
                } else {
                    (
                        num.checked_div(&g).expect("gcd divides numerator"),
                        den.checked_div(&g).expect("gcd divides denominator"),
                    )
                };
                Elem { field: self.field, repr: Repr::Frac(num, den) }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Bits(b) => *b == 0,
            Repr::Frac(n, _) => n.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Bits(b) => *b == 1,
            Repr::Frac(n, d) => n.is_one() && d.is_one(),
        }
    }

    fn gf(&self) -> &Gf2m {
        match self.field.repr() {
            FieldRepr::Binary(g) => g,
            _ => unreachable!("bits element in non-binary field"),
        }
    }

    fn check_same(&self, o: &Elem) -> Result<()> {
        if self.field == o.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn add(&self, o: &Elem) -> Elem {
        self.checked_add(o).expect("field mismatch in add")
    }

    pub fn checked_add(&self, o: &Elem) -> Result<Elem> {
        self.check_same(o)?;
        let repr = match (&self.repr, &o.repr) {
            (Repr::Bits(a), Repr::Bits(b)) => Repr::Bits(self.gf().add(*a, *b)),
            (Repr::Frac(n1, d1), Repr::Frac(n2, d2)) => {
                // n1/d1 + n2/d2 = (n1 d2 + n2 d1) / (d1 d2)
                let num = n1.mul(d2).add(&n2.mul(d1));
                let den = d1.mul(d2);
                Repr::Frac(num, den)
            }
            _ => unreachable!(),
        };
        Ok(Elem { field: self.field.clone(), repr }.reduced())
    }

    pub fn mul(&self, o: &Elem) -> Elem {
        self.checked_mul(o).expect("field mismatch in mul")
    }

    pub fn checked_mul(&self, o: &Elem) -> Result<Elem> {
        self.check_same(o)?;
        let repr = match (&self.repr, &o.repr) {
            (Repr::Bits(a), Repr::Bits(b)) => Repr::Bits(self.gf().mul(*a, *b)),
            (Repr::Frac(n1, d1), Repr::Frac(n2, d2)) => Repr::Frac(n1.mul(n2), d1.mul(d2)),
            _ => unreachable!(),
        };
        Ok(Elem { field: self.field.clone(), repr }.reduced())
    }

    pub fn inv(&self) -> Result<Elem> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let repr = match &self.repr {
            Repr::Bits(a) => Repr::Bits(self.gf().inv(*a)?),
            Repr::Frac(n, d) => Repr::Frac(d.clone(), n.clone()),
        };
        Ok(Elem { field: self.field.clone(), repr })
    }

    pub fn div(&self, o: &Elem) -> Result<Elem> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn square(&self) -> Elem {
        match &self.repr {
            Repr::Bits(a) => Elem {
                field: self.field.clone(),
                repr: Repr::Bits(self.gf().square(*a)),
            },
            Repr::Frac(n, d) => Elem {
                field: self.field.clone(),
                repr: Repr::Frac(n.square(), d.square()),
            },
        }
    }

    /// Square root; `None` when the element is not a square. Over GF(2^m)
    /// every element is a square.
    pub fn sqrt(&self) -> Option<Elem> {
        match &self.repr {
            Repr::Bits(a) => Some(Elem {
                field: self.field.clone(),
                repr: Repr::Bits(self.gf().sqrt(*a)),
            }),
            Repr::Frac(n, d) => {
                // a reduced fraction is a square iff both parts are squares
                let num = n.sqrt()?;
                let den = d.sqrt()?;
                Some(Elem { field: self.field.clone(), repr: Repr::Frac(num, den) })
            }
        }
    }

    pub fn is_square(&self) -> bool {
        match &self.repr {
            Repr::Bits(_) => true,
            Repr::Frac(..) => self.sqrt().is_some(),
        }
    }

    pub fn pow(&self, e: u32) -> Elem {
        match &self.repr {
            Repr::Bits(a) => Elem {
                field: self.field.clone(),
                repr: Repr::Bits(self.gf().pow(*a, e as u64)),
            },
            Repr::Frac(n, d) => Elem {
                field: self.field.clone(),
                repr: Repr::Frac(n.pow(e), d.pow(e)),
            },
        }
    }

    /// Exact decomposition x = Σ c_S² · m_S over square-free monomials m_S.
    pub fn k2_coordinates(&self) -> K2Coordinates {
        let basis = self.field.squarefree_basis();
        match &self.repr {
            Repr::Bits(a) => {
                let c = Elem { field: self.field.clone(), repr: Repr::Bits(self.gf().sqrt(*a)) };
                K2Coordinates { basis: basis.clone(), entries: vec![(Mono::ONE, c)] }
            }
            Repr::Frac(n, d) => {
                // coordinates of (n·d)/d²: decompose the polynomial n·d and
                // divide each root coefficient by d
                let w = n.mul(d);
                let mut per_class: Vec<(Mono, Vec<Mono>)> = Vec::new();
                for t in w.terms() {
                    let class = t.squarefree_part();
                    let root = t
                        .checked_div(&class)
                        .and_then(|m| m.sqrt())
                        .expect("even part has a square root");
                    match per_class.iter_mut().find(|(c, _)| *c == class) {
                        Some((_, v)) => v.push(root),
                        None => per_class.push((class, vec![root])),
                    }
                }
                let mut entries = Vec::new();
                for (class, roots) in per_class {
                    let c_poly = Poly::from_terms(roots);
                    if c_poly.is_zero() {
                        continue;
                    }
                    let c = self
                        .field
                        .from_fraction(c_poly, d.clone())
                        .expect("coordinate fraction is valid");
                    entries.push((class, c));
                }
                entries.sort_by(|a, b| a.0.cmp(&b.0));
                K2Coordinates { basis, entries }
            }
        }
    }

    /// Root-coordinate vector over the square-free basis: entry c_S of the
    /// decomposition x = Σ c_S²·m_S, aligned with `Field::squarefree_basis`.
    pub fn root_coords(&self) -> Vec<Elem> {
        let k2 = self.k2_coordinates();
        let mut out = vec![self.field.zero(); k2.basis.len()];
        for (m, c) in &k2.entries {
            let idx = k2.basis.iter().position(|b| b == m).expect("class in basis");
            out[idx] = c.clone();
        }
        out
    }
}

/// Decomposition of an element over the square-free monomial basis of k/k².
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct K2Coordinates {
    pub basis: Vec<Mono>,
    /// Sorted, zero coordinates omitted.
    pub entries: Vec<(Mono, Elem)>,
}

impl K2Coordinates {
    /// Σ c_S²·m_S — must reproduce the decomposed element exactly.
    pub fn reconstruct(&self, field: &Field) -> Elem {
        let mut acc = field.zero();
        for (m, c) in &self.entries {
            let mono = field
                .poly_elem(Poly::from_mono(*m))
                .unwrap_or_else(|_| field.one());
            acc = acc.add(&c.square().mul(&mono));
        }
        acc
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.repr, self.field.repr()) {
            (Repr::Bits(b), _) => write!(f, "{:#x}", b),
            (Repr::Frac(n, d), FieldRepr::Rational { vars }) => {
                if d.is_one() {
                    write!(f, "{}", PolyDisplay { poly: n, vars })
                } else {
                    write!(
                        f,
                        "({})/({})",
                        PolyDisplay { poly: n, vars },
                        PolyDisplay { poly: d, vars }
                    )
                }
            }
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2t2() -> Field {
        Field::rational(&["t1", "t2"]).unwrap()
    }

    fn elem(f: &Field, s_num: &[[u16; 3]], s_den: &[[u16; 3]]) -> Elem {
        let num = Poly::from_terms(s_num.iter().map(|&e| Mono { exps: e }).collect());
        let den = Poly::from_terms(s_den.iter().map(|&e| Mono { exps: e }).collect());
        f.from_fraction(num, den).unwrap()
    }

    #[test]
    fn rational_inverse_roundtrip() {
        let k = f2t2();
        // (1/t1) · t1 = 1
        let t1 = k.var_elem(0).unwrap();
        let inv = t1.inv().unwrap();
        assert!(inv.mul(&t1).is_one());
    }

    #[test]
    fn char_2_addition() {
        let k = f2t2();
        let x = elem(&k, &[[1, 2, 0], [0, 0, 0]], &[[0, 1, 0]]);
        assert!(x.add(&x).is_zero());
        let g = Field::binary(3).unwrap();
        let y = g.from_bits(0b101).unwrap();
        assert!(y.add(&y).is_zero());
    }

    #[test]
    fn fraction_reduction_is_canonical() {
        let k = f2t2();
        // (t1² + t1 t2) / (t1) reduces to t1 + t2
        let a = elem(&k, &[[2, 0, 0], [1, 1, 0]], &[[1, 0, 0]]);
        let b = elem(&k, &[[1, 0, 0], [0, 1, 0]], &[[0, 0, 0]]);
        assert_eq!(a, b);
    }

    #[test]
    fn sqrt_by_frobenius() {
        let k = f2t2();
        // sqrt(t1² + 1) = t1 + 1
        let sq = elem(&k, &[[2, 0, 0], [0, 0, 0]], &[[0, 0, 0]]);
        let root = elem(&k, &[[1, 0, 0], [0, 0, 0]], &[[0, 0, 0]]);
        assert_eq!(sq.sqrt().unwrap(), root);
        // t1 is not a square
        assert!(k.var_elem(0).unwrap().sqrt().is_none());
    }

    #[test]
    fn k2_coordinates_paper_instance() {
        // 1 + t1²t2 decomposes as 1²·1 + t1²·t2
        let k = f2t2();
        let x = elem(&k, &[[0, 0, 0], [2, 1, 0]], &[[0, 0, 0]]);
        let k2 = x.k2_coordinates();
        let one = Mono::ONE;
        let t2 = Mono::var(1);
        assert_eq!(k2.entries.len(), 2);
        assert_eq!(k2.entries[0], (one, k.one()));
        assert_eq!(k2.entries[1], (t2, k.var_elem(0).unwrap()));
        assert_eq!(k2.reconstruct(&k), x);
    }

    #[test]
    fn k2_coordinates_squarefree_monomial() {
        // t1t2 → { t1t2 ↦ 1 }
        let k = f2t2();
        let x = elem(&k, &[[1, 1, 0]], &[[0, 0, 0]]);
        let k2 = x.k2_coordinates();
        assert_eq!(k2.entries, vec![(Mono { exps: [1, 1, 0] }, k.one())]);
    }

    #[test]
    fn k2_coordinates_binary_field() {
        // GF(4): ω → {1 ↦ ω²} since (ω²)² = ω
        let g = Field::binary(2).unwrap();
        let w = g.from_bits(0b10).unwrap();
        let w2 = g.from_bits(0b11).unwrap();
        let k2 = w.k2_coordinates();
        assert_eq!(k2.entries, vec![(Mono::ONE, w2.clone())]);
        assert_eq!(w2.square(), w);
    }

    #[test]
    fn k2_roundtrip_fractions() {
        let k = f2t2();
        // (1 + t1²t2)/(t2): coordinates divide by the denominator
        let x = elem(&k, &[[0, 0, 0], [2, 1, 0]], &[[0, 1, 0]]);
        assert_eq!(x.k2_coordinates().reconstruct(&k), x);
    }

    #[test]
    fn squarefree_basis_sizes() {
        assert_eq!(Field::binary(4).unwrap().squarefree_basis().len(), 1);
        assert_eq!(f2t2().squarefree_basis().len(), 4);
        assert_eq!(Field::rational(&["a", "b", "c"]).unwrap().squarefree_basis().len(), 8);
    }

    #[test]
    fn display_roundtrip_shapes() {
        let k = f2t2();
        let x = elem(&k, &[[0, 0, 0], [2, 1, 0]], &[[0, 1, 0]]);
        assert_eq!(x.to_string(), "(t1^2*t2+1)/(t2)");
        let g = Field::binary(2).unwrap();
        assert_eq!(g.from_bits(3).unwrap().to_string(), "0x3");
    }
}
