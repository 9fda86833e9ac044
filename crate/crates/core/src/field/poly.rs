//! Sparse multivariate polynomials over F2.
//!
//! A polynomial is a set of monomials (coefficients are 0 or 1), kept as a
//! strictly descending vector in graded-lexicographic order. Addition is
//! symmetric difference, squaring doubles exponents (Frobenius), and gcd
//! runs a primitive PRS with content recursion. The only unit of F2[t...]
//! is 1, so reduced fractions need no leading-coefficient normalization.

use std::fmt;

/// Upper bound on the number of variables in a rational function field.
pub const MAX_VARS: usize = 3;

/// A monomial, stored as fixed-width exponent tuple (unused slots are 0).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Mono {
    pub exps: [u16; MAX_VARS],
}

impl Mono {
    pub const ONE: Mono = Mono { exps: [0; MAX_VARS] };

    pub fn var(i: usize) -> Mono {
        let mut exps = [0; MAX_VARS];
        exps[i] = 1;
        Mono { exps }
    }

    pub fn total_degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps == [0; MAX_VARS]
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut exps = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = self.exps[i] + o.exps[i];
        }
        Mono { exps }
    }

    /// Exact quotient, `None` if `o` does not divide `self`.
    pub fn checked_div(&self, o: &Mono) -> Option<Mono> {
        let mut exps = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = self.exps[i].checked_sub(o.exps[i])?;
        }
        Some(Mono { exps })
    }

    pub fn gcd(&self, o: &Mono) -> Mono {
        let mut exps = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = self.exps[i].min(o.exps[i]);
        }
        Mono { exps }
    }

    /// Square-free part: each exponent reduced to its parity.
    pub fn squarefree_part(&self) -> Mono {
        let mut exps = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = self.exps[i] & 1;
        }
        Mono { exps }
    }

    pub fn is_squarefree(&self) -> bool {
        self.exps.iter().all(|&e| e <= 1)
    }

    /// Square root when all exponents are even.
    pub fn sqrt(&self) -> Option<Mono> {
        let mut exps = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            if self.exps[i] & 1 != 0 {
                return None;
            }
            exps[i] = self.exps[i] >> 1;
        }
        Some(Mono { exps })
    }

    pub fn square(&self) -> Mono {
        let mut exps = [0; MAX_VARS];
        for i in 0..MAX_VARS {
            exps[i] = self.exps[i] << 1;
        }
        Mono { exps }
    }
}

/// Graded lexicographic: first by total degree, then lexicographic on the
/// exponent tuple (earlier variables weigh more).
impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial over F2; invariant: `terms` strictly descending, no duplicates.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    terms: Vec<Mono>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly { terms: vec![Mono::ONE] }
    }

    pub fn var(i: usize) -> Poly {
        Poly { terms: vec![Mono::var(i)] }
    }

    pub fn from_mono(m: Mono) -> Poly {
        Poly { terms: vec![m] }
    }

    /// Normalizing constructor: sorts descending and cancels duplicate pairs.
    pub fn from_terms(mut terms: Vec<Mono>) -> Poly {
        terms.sort_unstable_by(|a, b| b.cmp(a));
        let mut out: Vec<Mono> = Vec::with_capacity(terms.len());
        for t in terms {
            if out.last() == Some(&t) {
                out.pop();
            } else {
                out.push(t);
            }
        }
        Poly { terms: out }
    }

    pub fn terms(&self) -> &[Mono] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].is_one()
    }

    pub fn leading(&self) -> Option<&Mono> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.first().map(|m| m.total_degree())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        // merge of two strictly descending lists with pair cancellation
        let mut out = Vec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < o.terms.len() {
            match self.terms[i].cmp(&o.terms[j]) {
                std::cmp::Ordering::Greater => {
                    out.push(self.terms[i]);
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push(o.terms[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&o.terms[j..]);
        Poly { terms: out }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut prods = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                prods.push(a.mul(b));
            }
        }
        Poly::from_terms(prods)
    }

    pub fn mul_mono(&self, m: &Mono) -> Poly {
        Poly { terms: self.terms.iter().map(|t| t.mul(m)).collect() }
    }

    pub fn square(&self) -> Poly {
        // char 2: (Σ m)² = Σ m²; order is preserved by doubling exponents
        Poly { terms: self.terms.iter().map(|t| t.square()).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Square root, if every monomial has even exponents.
    pub fn sqrt(&self) -> Option<Poly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(t.sqrt()?);
        }
        Some(Poly { terms })
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|t| t.exps[var]).max().unwrap_or(0)
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.terms.iter().any(|t| t.exps[var] > 0)
    }

    /// Coefficient of `var^k`, a polynomial in the remaining variables.
    pub fn coeff_of(&self, var: usize, k: u16) -> Poly {
        let mut terms = Vec::new();
        for t in &self.terms {
            if t.exps[var] == k {
                let mut m = *t;
                m.exps[var] = 0;
                terms.push(m);
            }
        }
        Poly::from_terms(terms)
    }

    /// Exact multivariate division; `None` when `d` does not divide `self`.
    pub fn checked_div(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division of polynomial by zero");
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let lead_d = *d.leading().unwrap();
        let mut rem = self.clone();
        let mut quot: Vec<Mono> = Vec::new();
        while !rem.is_zero() {
            let lead_r = *rem.leading().unwrap();
            let q = lead_r.checked_div(&lead_d)?;
            quot.push(q);
            rem = rem.add(&d.mul_mono(&q));
        }
        Some(Poly::from_terms(quot))
    }

    /// Content with respect to `var`: gcd of the univariate-view coefficients.
    fn content(&self, var: usize) -> Poly {
        let mut c = Poly::zero();
        for k in 0..=self.degree_in(var) {
            let coeff = self.coeff_of(var, k);
            if !coeff.is_zero() {
                c = gcd(&c, &coeff);
                if c.is_one() {
                    break;
                }
            }
        }
        c
    }

    /// Pseudo-remainder of `self` by `d` viewed as univariate in `var`.
    fn prem(&self, d: &Poly, var: usize) -> Poly {
        let dd = d.degree_in(var);
        let lead_d = d.coeff_of(var, dd);
        let mut r = self.clone();
        while !r.is_zero() {
            let dr = r.degree_in(var);
            if dr < dd {
                break;
            }
            let lead_r = r.coeff_of(var, dr);
            let mut shift = Mono::ONE;
            shift.exps[var] = dr - dd;
            // r ← lc(d)·r + lc(r)·x^(dr-dd)·d cancels the top term (char 2)
            r = r.mul(&lead_d).add(&d.mul(&lead_r.mul_mono(&shift)));
        }
        r
    }
}

/// Multivariate gcd over F2 via primitive PRS with content recursion.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_one() || b.is_one() {
        return Poly::one();
    }
    // monomial fast path
    if a.terms.len() == 1 && b.terms.len() == 1 {
        return Poly::from_mono(a.terms[0].gcd(&b.terms[0]));
    }
    let var = match (0..MAX_VARS).find(|&v| a.contains_var(v) || b.contains_var(v)) {
        Some(v) => v,
        // both are nonzero constants, i.e. 1
        None => return Poly::one(),
    };
    if !a.contains_var(var) {
        return gcd(a, &b.content(var));
    }
    if !b.contains_var(var) {
        return gcd(&a.content(var), b);
    }
    let ca = a.content(var);
    let cb = b.content(var);
    let mut f = a.checked_div(&ca).expect("content divides");
    let mut g = b.checked_div(&cb).expect("content divides");
    if f.degree_in(var) < g.degree_in(var) {
        std::mem::swap(&mut f, &mut g);
    }
    loop {
        let r = f.prem(&g, var);
        if r.is_zero() {
            break;
        }
        let cr = r.content(var);
        f = g;
        g = r.checked_div(&cr).expect("content divides");
    }
    let cg = g.content(var);
    let gp = g.checked_div(&cg).expect("content divides");
    gcd(&ca, &cb).mul(&gp)
}

/// Render with the given variable names; canonical descending term order.
pub struct PolyDisplay<'a> {
    pub poly: &'a Poly,
    pub vars: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, t) in self.poly.terms.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            if t.is_one() {
                write!(f, "1")?;
            } else {
                let mut first = true;
                for (v, &e) in t.exps.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    if !first {
                        write!(f, "*")?;
                    }
                    first = false;
                    write!(f, "{}", self.vars[v])?;
                    if e > 1 {
                        write!(f, "^{}", e)?;
                    }
                }
            }
        }
        Ok(())
    }
}
