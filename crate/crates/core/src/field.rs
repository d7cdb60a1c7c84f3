//! Arithmetic in a prime field `F_q` with `q < 2^63`, and the small amount of
//! linear algebra the rank oracle needs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// The Mersenne prime `2^61 − 1`.
pub const MERSENNE_61: u64 = (1 << 61) - 1;

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut base: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The field `F_q`. Elements are `u64` values in `0..q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    /// `None` unless `q` is a prime below `2^63`.
    pub fn new(q: u64) -> Option<Self> {
        (q < 1 << 63 && is_prime(q)).then_some(PrimeField { q })
    }

    pub fn modulus(self) -> u64 {
        self.q
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    pub fn neg(self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.q - a
        }
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        let prod = a as u128 * b as u128;
        if self.q == MERSENNE_61 {
            let folded = (prod & MERSENNE_61 as u128) as u64 + (prod >> 61) as u64;
            let folded = (folded & MERSENNE_61) + (folded >> 61);
            if folded >= MERSENNE_61 {
                folded - MERSENNE_61
            } else {
                folded
            }
        } else {
            (prod % self.q as u128) as u64
        }
    }

    pub fn pow(self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(self, a: u64) -> u64 {
        assert!(a != 0, "zero has no inverse");
        self.pow(a, self.q - 2)
    }

    pub fn from_i64(self, v: i64) -> u64 {
        let r = v.rem_euclid(self.q as i64) as u64;
        r % self.q
    }

    /// Image of a rational; `None` if the denominator vanishes mod `q`.
    pub fn from_rational(self, v: &BigRational) -> Option<u64> {
        let reduce = |x: &BigInt| -> u64 {
            let m = BigInt::from(self.q);
            let r = ((x % &m) + &m) % &m;
            r.abs().to_u64().expect("reduced value fits")
        };
        let den = reduce(v.denom());
        (den != 0).then(|| self.mul(reduce(v.numer()), self.inv(den)))
    }

    /// Rank of a dense matrix given as rows.
    pub fn rank(self, rows: &[Vec<u64>]) -> usize {
        let width = rows.first().map_or(0, Vec::len);
        let mut echelon = Echelon::new(self, width);
        for row in rows {
            echelon.insert(row.clone());
        }
        echelon.rank()
    }
}

/// An incrementally built row-echelon basis: vectors are inserted one at a
/// time and kept only when independent of those already present.
#[derive(Debug, Clone)]
pub struct Echelon {
    field: PrimeField,
    width: usize,
    basis: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    pub fn new(field: PrimeField, width: usize) -> Self {
        Echelon { field, width, basis: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Reduce `v` by the basis in insertion order; returns whether it was
    /// independent (and kept). Each stored vector vanishes at the pivots of
    /// the vectors stored before it, so earlier vectors are never modified.
    pub fn insert(&mut self, mut v: Vec<u64>) -> bool {
        debug_assert_eq!(v.len(), self.width);
        let f = self.field;
        for (pivot, b) in &self.basis {
            let c = v[*pivot];
            if c != 0 {
                for (x, y) in v.iter_mut().zip(b) {
                    if *y != 0 {
                        *x = f.sub(*x, f.mul(c, *y));
                    }
                }
            }
        }
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let scale = f.inv(v[pivot]);
        for x in &mut v {
            *x = f.mul(*x, scale);
        }
        self.basis.push((pivot, v));
        true
    }

    /// Forget everything inserted after the basis had `len` vectors.
    pub fn truncate(&mut self, len: usize) {
        self.basis.truncate(len);
    }
}
