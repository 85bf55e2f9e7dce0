//! Dirichlet characters modulo q, built from generators of (Z/qZ)^* via CRT.
//!
//! Values are stored as exact rational angles: χ(n) = exp(2πi·num/den).
//! Labels are mixed-radix indices over the generator list; label 0 is the
//! principal character.

use crate::numeric::{euler_phi, factorize, gcd, prime_divisors};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CharError {
    #[error("modulus {0} rejected: characters are built for q >= 3")]
    ModulusTooSmall(u64),
    #[error("label {label} out of range for modulus {q} ({count} characters)")]
    InvalidLabel { q: u64, label: u64, count: u64 },
    #[error("no character mod {q} with label {label}")]
    NotFound { q: u64, label: String },
}

/// A point `num/den` of Q/Z, reduced, with `0 <= num < den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Angle {
    pub num: u64,
    pub den: u64,
}

impl Angle {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0);
        let n = num % den;
        let g = gcd(n, den).max(1);
        if n == 0 {
            return Angle { num: 0, den: 1 };
        }
        Angle { num: n / g, den: den / g }
    }

    pub fn zero() -> Self {
        Angle { num: 0, den: 1 }
    }

    pub fn neg(self) -> Self {
        Angle::new(self.den - self.num, self.den)
    }

    pub fn add(self, o: Angle) -> Self {
        let l = self.den / gcd(self.den, o.den) * o.den;
        let a = (self.num as u128 * (l / self.den) as u128 + o.num as u128 * (l / o.den) as u128)
            % l as u128;
        Angle::new(a as u64, l)
    }

    pub fn mul_int(self, k: u64) -> Self {
        Angle::new(((self.num as u128 * k as u128) % self.den as u128) as u64, self.den)
    }

    pub fn as_turns(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// exp(2πi·self), exact on the fourth roots of unity.
    pub fn to_complex(self) -> Complex64 {
        match (self.num, self.den) {
            (0, 1) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            _ => {
                // Reduce to [-1/2, 1/2) before the trig call.
                let t = if 2 * self.num >= self.den {
                    -((self.den - self.num) as f64) / self.den as f64
                } else {
                    self.num as f64 / self.den as f64
                };
                let (s, c) = (2.0 * PI * t).sin_cos();
                Complex64::new(c, s)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> i8 {
        match self {
            Parity::Even => 1,
            Parity::Odd => -1,
        }
    }
}

/// Generator data for (Z/qZ)^*, shared by all characters of a modulus.
#[derive(Debug)]
struct GroupData {
    q: u64,
    /// (generator mod q, order) per cyclic factor.
    gens: Vec<(u64, u64)>,
    /// Exponent vectors of each unit, flattened; `None` for non-units.
    dlog: Vec<Option<Box<[u32]>>>,
}

impl GroupData {
    fn new(q: u64) -> Self {
        let mut gens: Vec<(u64, u64)> = Vec::new();
        let fac = factorize(q);
        for &(p, e) in &fac {
            let pe = p.pow(e);
            let rest = q / pe;
            let lift = |g: u64| -> u64 { crt_lift(g % pe, pe, rest) };
            if p == 2 {
                match e {
                    1 => {}
                    2 => gens.push((lift(3), 2)),
                    _ => {
                        gens.push((lift(pe - 1), 2));
                        gens.push((lift(5), pe / 4));
                    }
                }
            } else {
                let ord = pe / p * (p - 1);
                let g = primitive_root_prime_power(p, pe, ord);
                gens.push((lift(g), ord));
            }
        }
        let mut dlog: Vec<Option<Box<[u32]>>> = vec![None; q as usize];
        let r = gens.len();
        let mut exps = vec![0u32; r];
        let total: u64 = gens.iter().map(|g| g.1).product();
        let mut n = 1u64 % q;
        // Walk all exponent vectors in mixed radix, updating the product incrementally.
        let mut powers: Vec<Vec<u64>> = gens
            .iter()
            .map(|&(g, ord)| {
                let mut v = Vec::with_capacity(ord as usize);
                let mut x = 1 % q;
                for _ in 0..ord {
                    v.push(x);
                    x = mulmod(x, g, q);
                }
                v
            })
            .collect();
        for idx in 0..total.max(1) {
            if idx > 0 {
                let mut i = 0;
                loop {
                    exps[i] += 1;
                    if exps[i] as u64 == gens[i].1 {
                        exps[i] = 0;
                        i += 1;
                    } else {
                        break;
                    }
                }
                n = 1 % q;
                for (j, &e) in exps.iter().enumerate() {
                    n = mulmod(n, powers[j][e as usize], q);
                }
            }
            dlog[n as usize] = Some(exps.clone().into_boxed_slice());
        }
        powers.clear();
        if q == 1 {
            dlog[0] = Some(Vec::new().into_boxed_slice());
        }
        GroupData { q, gens, dlog }
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn crt_lift(g: u64, pe: u64, rest: u64) -> u64 {
    // x ≡ g (mod pe), x ≡ 1 (mod rest)
    if rest == 1 {
        return g;
    }
    let m = pe * rest;
    (0..pe)
        .map(|k| 1 + k * rest)
        .find(|x| x % pe == g)
        .map(|x| x % m)
        .expect("CRT lift exists for coprime moduli")
}

fn primitive_root_prime_power(p: u64, pe: u64, ord: u64) -> u64 {
    let ord_primes = prime_divisors(ord);
    (2..pe)
        .find(|&g| {
            g % p != 0
                && ord_primes
                    .iter()
                    .all(|&r| powmod(g, ord / r, pe) != 1)
        })
        .expect("odd prime powers are cyclic")
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    r
}

/// A Dirichlet character with its full value table.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    q: u64,
    label: u64,
    values: Arc<[Option<Angle>]>,
    conductor: u64,
    parity: Parity,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, o: &Self) -> bool {
        self.q == o.q && self.label == o.label
    }
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn label(&self) -> u64 {
        self.label
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.q
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_principal(&self) -> bool {
        self.label == 0
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().flatten().all(|a| a.den <= 2)
    }

    pub fn order(&self) -> u64 {
        self.values
            .iter()
            .flatten()
            .fold(1u64, |l, a| l / gcd(l, a.den) * a.den)
    }

    /// Angle of χ(n), or `None` when gcd(n, q) > 1.
    pub fn angle(&self, n: u64) -> Option<Angle> {
        self.values[(n % self.q) as usize]
    }

    pub fn eval(&self, n: u64) -> Complex64 {
        self.angle(n)
            .map(Angle::to_complex)
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Complex conjugate character (same modulus).
    pub fn conj(&self) -> DirichletCharacter {
        let values: Vec<Option<Angle>> = self.values.iter().map(|a| a.map(Angle::neg)).collect();
        let label = conj_label(&values, self.q);
        DirichletCharacter {
            q: self.q,
            label,
            values: values.into(),
            conductor: self.conductor,
            parity: self.parity,
        }
    }

    /// χ^k, as a character of the same modulus.
    pub fn pow(&self, k: u64) -> DirichletCharacter {
        let values: Vec<Option<Angle>> = self.values.iter().map(|a| a.map(|a| a.mul_int(k))).collect();
        let g = GroupData::new(self.q);
        let label = label_from_values(&g, &values);
        let conductor = conductor_of(&values, self.q);
        let parity = match values[(self.q - 1) as usize] {
            Some(a) if a.num == 0 => Parity::Even,
            _ => Parity::Odd,
        };
        DirichletCharacter {
            q: self.q,
            label,
            values: values.into(),
            conductor,
            parity,
        }
    }

    /// Value table as (n, num, den) for units 0 < n < q.
    pub fn value_table(&self) -> Vec<[u64; 3]> {
        (1..self.q)
            .filter_map(|n| self.angle(n).map(|a| [n, a.num, a.den]))
            .collect()
    }

    pub fn export(&self) -> CharacterExport {
        CharacterExport {
            q: self.q,
            label: self.label,
            conductor: self.conductor,
            parity: self.parity.sign(),
            values: self.value_table(),
        }
    }
}

fn conj_label(values: &[Option<Angle>], q: u64) -> u64 {
    let g = GroupData::new(q);
    label_from_values(&g, values)
}

fn label_from_values(g: &GroupData, values: &[Option<Angle>]) -> u64 {
    let mut label = 0u64;
    let mut radix = 1u64;
    for &(gen, ord) in &g.gens {
        let a = values[gen as usize].expect("generator is a unit");
        // a = k/ord  →  digit k
        let k = a.num * (ord / a.den);
        label += k * radix;
        radix *= ord;
    }
    label
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterExport {
    pub q: u64,
    pub label: u64,
    pub conductor: u64,
    pub parity: i8,
    pub values: Vec<[u64; 3]>,
}

fn build_character(g: &GroupData, label: u64) -> DirichletCharacter {
    let q = g.q;
    let mut digits = Vec::with_capacity(g.gens.len());
    let mut rem = label;
    for &(_, ord) in &g.gens {
        digits.push(rem % ord);
        rem /= ord;
    }
    let values: Vec<Option<Angle>> = g
        .dlog
        .iter()
        .map(|e| {
            e.as_ref().map(|exps| {
                exps.iter()
                    .zip(g.gens.iter().zip(&digits))
                    .fold(Angle::zero(), |acc, (&ex, (&(_, ord), &d))| {
                        acc.add(Angle::new(d * ex as u64 % ord, ord))
                    })
            })
        })
        .collect();
    let conductor = conductor_of(&values, q);
    let parity = match values[(q - 1) as usize] {
        Some(a) if a.num == 0 => Parity::Even,
        _ => Parity::Odd,
    };
    DirichletCharacter {
        q,
        label,
        values: values.into(),
        conductor,
        parity,
    }
}

/// Least d | q such that χ is trivial on units ≡ 1 (mod d).
fn conductor_of(values: &[Option<Angle>], q: u64) -> u64 {
    let mut divs: Vec<u64> = (1..=q).filter(|d| q % d == 0).collect();
    divs.sort_unstable();
    for d in divs {
        let trivial = (0..q / d)
            .map(|k| 1 + k * d)
            .filter(|&n| n < q || d == q)
            .all(|n| match values[(n % q) as usize] {
                Some(a) => a.num == 0,
                None => true,
            });
        if trivial {
            return d;
        }
    }
    q
}

/// All φ(q) characters modulo q, ordered by label.
pub fn characters(q: u64) -> Result<Vec<DirichletCharacter>, CharError> {
    if q < 3 {
        return Err(CharError::ModulusTooSmall(q));
    }
    let g = GroupData::new(q);
    let count: u64 = g.gens.iter().map(|x| x.1).product();
    Ok((0..count).map(|l| build_character(&g, l)).collect())
}

pub fn primitive_characters(q: u64) -> Result<Vec<DirichletCharacter>, CharError> {
    Ok(characters(q)?.into_iter().filter(|c| c.is_primitive()).collect())
}

pub fn character(q: u64, label: u64) -> Result<DirichletCharacter, CharError> {
    if q < 3 {
        return Err(CharError::ModulusTooSmall(q));
    }
    let g = GroupData::new(q);
    let count: u64 = g.gens.iter().map(|x| x.1).product();
    if label >= count {
        return Err(CharError::InvalidLabel { q, label, count });
    }
    Ok(build_character(&g, label))
}

/// φ(q)/q.
pub fn unit_density(q: u64) -> f64 {
    euler_phi(q) as f64 / q as f64
}

/// ∏_{p | q} (p + 1)/p.
pub fn ramified_product(q: u64) -> f64 {
    prime_divisors(q)
        .iter()
        .map(|&p| (p + 1) as f64 / p as f64)
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_moduli() {
        assert_eq!(characters(2).unwrap_err(), CharError::ModulusTooSmall(2));
        assert!(characters(1).is_err());
    }

    #[test]
    fn mod_five_has_one_odd_quartic_pair() {
        let chars = characters(5).unwrap();
        assert_eq!(chars.len(), 4);
        let prim = primitive_characters(5).unwrap();
        assert_eq!(prim.len(), 3);
        let quartic: Vec<_> = prim.iter().filter(|c| c.order() == 4).collect();
        assert_eq!(quartic.len(), 2);
        for c in quartic {
            assert_eq!(c.parity(), Parity::Odd);
        }
    }

    #[test]
    fn mod_twelve_primitive_count() {
        // Only the character of conductor 12 (Kronecker symbol (12/·)) is primitive.
        let p = primitive_characters(12).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].parity(), Parity::Even);
    }

    #[test]
    fn density_and_ramified_product() {
        assert!((unit_density(12) - 1.0 / 3.0).abs() < 1e-15);
        assert!((ramified_product(12) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn conjugate_label_roundtrip() {
        for q in [5u64, 7, 8, 15, 16, 24] {
            for c in characters(q).unwrap() {
                let cc = c.conj();
                assert_eq!(cc.conj().label(), c.label());
                for n in 0..q {
                    assert_eq!(cc.angle(n), c.angle(n).map(Angle::neg));
                }
                assert_eq!(character(q, cc.label()).unwrap().angle(2 % q), cc.angle(2 % q));
            }
        }
    }

    #[test]
    fn export_omits_zeros() {
        let c = &primitive_characters(4).unwrap()[0];
        let e = c.export();
        assert_eq!(e.values, vec![[1, 0, 1], [3, 1, 2]]);
        let json = serde_json::to_string(&e).unwrap();
        assert!(json.contains("\"conductor\":4"));
    }
}
