//! Binary extension fields GF(2^m), m ≤ 16, with log/antilog tables.
//!
//! Elements are bit vectors of length m packed into a `u16`, interpreted as
//! polynomials over F2 modulo the field's irreducible modulus. A generator
//! of the multiplicative group is found by search at construction time, so
//! any irreducible modulus works (primitivity is not required).

use crate::error::{Error, Result};

pub const MAX_M: u32 = 16;

/// Default irreducible modulus per extension degree (bit m is the x^m term).
const DEFAULT_MODULUS: [u32; 17] = [
    0, 0b11, 0b111, 0b1011, 0b1_0011, 0b10_0101, 0b100_0011, 0b1000_0011, 0x11B, 0x211, 0x409,
    0x805, 0x1053, 0x201B, 0x4443, 0x8003, 0x1100B,
];

pub fn default_modulus(m: u32) -> Option<u32> {
    if (1..=MAX_M).contains(&m) {
        Some(DEFAULT_MODULUS[m as usize])
    } else {
        None
    }
}

/// Carry-less multiply of two F2 polynomials in bits.
fn clmul(a: u32, b: u32) -> u64 {
    let mut acc = 0u64;
    let mut i = 0;
    let mut bb = b as u64;
    while bb != 0 {
        if bb & 1 == 1 {
            acc ^= (a as u64) << i;
        }
        bb >>= 1;
        i += 1;
    }
    acc
}

fn poly_deg(x: u64) -> i32 {
    63 - x.leading_zeros() as i32
}

/// Remainder of a by m over F2 (m ≠ 0).
fn clmod(mut a: u64, m: u64) -> u64 {
    let dm = poly_deg(m);
    while a != 0 {
        let da = poly_deg(a);
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

/// Irreducibility over F2 by trial division by every polynomial of degree
/// 1..=deg/2. Cheap for deg ≤ 16.
fn is_irreducible(modulus: u32) -> bool {
    let deg = poly_deg(modulus as u64);
    if deg < 1 {
        return false;
    }
    for d in 1..=(deg / 2) {
        let lo = 1u64 << d;
        let hi = 1u64 << (d + 1);
        for p in lo..hi {
            if clmod(modulus as u64, p) == 0 {
                return false;
            }
        }
    }
    true
}

/// GF(2^m) descriptor with multiplication tables.
#[derive(Debug)]
pub struct Gf2m {
    pub m: u32,
    pub modulus: u32,
    order: u32,       // 2^m
    group: u32,       // 2^m - 1
    log: Vec<u16>,    // index by element value; log[0] unused
    exp: Vec<u16>,    // exp[i] = g^i for i in 0..2*group
    generator: u16,
}

impl Gf2m {
    pub fn new(m: u32, modulus: u32) -> Result<Gf2m> {
        if m == 0 || m > MAX_M {
            return Err(Error::InvalidField(format!(
                "extension degree {m} out of range 1..={MAX_M}"
            )));
        }
        if poly_deg(modulus as u64) != m as i32 {
            return Err(Error::InvalidField(format!(
                "modulus {modulus:#x} does not have degree {m}"
            )));
        }
        if !is_irreducible(modulus) {
            return Err(Error::InvalidField(format!(
                "modulus {modulus:#x} is reducible over F2"
            )));
        }
        let order = 1u32 << m;
        let group = order - 1;
        let mulmod = |a: u32, b: u32| clmod(clmul(a, b), modulus as u64) as u32;
        // find a multiplicative generator by order computation
        let mut generator = if m == 1 { 1u16 } else { 0u16 };
        if m > 1 {
            'cand: for g in 2..order {
                let mut x = g;
                let mut ord = 1;
                while x != 1 {
                    x = mulmod(x, g);
                    ord += 1;
                    if ord > group {
                        continue 'cand;
                    }
                }
                if ord == group {
                    generator = g as u16;
                    break;
                }
            }
        }
        assert!(generator != 0, "no generator found (impossible for a field)");
        let mut log = vec![0u16; order as usize];
        let mut exp = vec![0u16; (2 * group) as usize + 1];
        let mut x = 1u32;
        for i in 0..group {
            exp[i as usize] = x as u16;
            exp[(i + group) as usize] = x as u16;
            log[x as usize] = i as u16;
            x = mulmod(x, generator as u32);
        }
        exp[2 * group as usize] = 1;
        Ok(Gf2m { m, modulus, order, group, log, exp, generator })
    }

    pub fn with_default_modulus(m: u32) -> Result<Gf2m> {
        let modulus = default_modulus(m)
            .ok_or_else(|| Error::InvalidField(format!("no default modulus for m = {m}")))?;
        Gf2m::new(m, modulus)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn generator(&self) -> u16 {
        self.generator
    }

    pub fn contains(&self, bits: u16) -> bool {
        (bits as u32) < self.order
    }

    pub fn add(&self, a: u16, b: u16) -> u16 {
        a ^ b
    }

    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    pub fn inv(&self, a: u16) -> Result<u16> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.exp[(self.group - self.log[a as usize] as u32) as usize % self.group as usize])
    }

    /// Every element of a perfect field has a unique square root:
    /// x ↦ x^(2^(m-1)) inverts the Frobenius.
    pub fn sqrt(&self, a: u16) -> u16 {
        if a == 0 {
            return 0;
        }
        let l = self.log[a as usize] as u64;
        let idx = (l << (self.m - 1)) % self.group as u64;
        self.exp[idx as usize]
    }

    pub fn square(&self, a: u16) -> u16 {
        self.mul(a, a)
    }

    pub fn pow(&self, a: u16, e: u64) -> u16 {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let l = self.log[a as usize] as u64;
        let idx = (l % self.group as u64) * (e % self.group as u64) % self.group as u64;
        self.exp[idx as usize]
    }
}
