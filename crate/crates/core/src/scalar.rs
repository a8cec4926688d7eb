//! Exact arithmetic in cyclotomic fields Q(zeta_N).
//!
//! An element is stored as its coefficient vector in the power basis
//! 1, zeta, ..., zeta^(phi(N)-1), reduced modulo the N-th cyclotomic
//! polynomial. Elements of different conductors are embedded into the lcm
//! conductor before combining.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    BigRational::from_integer(BigInt::from(n))
}

/// Reduction data for a fixed conductor.
struct Table {
    phi: usize,
    /// `pow[k]` is zeta^k reduced, for k < max(N, 2 phi - 1).
    pow: Vec<Vec<Rat>>,
}

fn int_poly_divexact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // Both monic with integer coefficients, low degree first.
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return vec![BigInt::zero()];
    }
    let mut q = vec![BigInt::zero(); rem.len() - dd];
    for i in (0..q.len()).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        q[i] = c.clone();
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
    }
    q
}

fn cyclotomic_poly(n: u32) -> Vec<BigInt> {
    // x^n - 1 divided by Phi_d for every proper divisor d.
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = BigInt::from(-1);
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            p = int_poly_divexact(&p, &cyclotomic_poly(d));
        }
    }
    p
}

fn build_table(n: u32) -> Table {
    let phi_poly = cyclotomic_poly(n);
    let phi = phi_poly.len() - 1;
    let len = (n as usize).max(2 * phi);
    let mut pow: Vec<Vec<Rat>> = Vec::with_capacity(len);
    let mut cur = vec![Rat::zero(); phi];
    cur[0] = Rat::one();
    for _ in 0..len {
        pow.push(cur.clone());
        // multiply by zeta: shift and reduce x^phi = -sum phi_poly[j] x^j
        let top = cur[phi - 1].clone();
        let mut next = vec![Rat::zero(); phi];
        for j in (1..phi).rev() {
            next[j] = cur[j - 1].clone();
        }
        if !top.is_zero() {
            for j in 0..phi {
                let c = Rat::from_integer(phi_poly[j].clone());
                next[j] -= &top * c;
            }
        }
        cur = next;
    }
    Table { phi, pow }
}

fn table(n: u32) -> Arc<Table> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Table>>>> = OnceLock::new();
    let m = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut g = m.lock().unwrap();
    g.entry(n).or_insert_with(|| Arc::new(build_table(n))).clone()
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// Element of Q(zeta_N).
#[derive(Clone)]
pub struct Cyc {
    n: u32,
    c: Vec<Rat>,
}

impl Cyc {
    pub fn zero() -> Self {
        Cyc { n: 1, c: vec![Rat::zero()] }
    }

    pub fn one() -> Self {
        Cyc::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        Cyc { n: 1, c: vec![r] }
    }

    pub fn from_int(k: i64) -> Self {
        Cyc::from_rat(rat_int(k))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Cyc::from_rat(rat(n, d))
    }

    /// zeta_N^k.
    pub fn root_of_unity(n: u32, k: i64) -> Self {
        assert!(n > 0);
        if n <= 2 {
            let k = k.rem_euclid(n as i64);
            return Cyc::from_int(if k == 0 { 1 } else { -1 });
        }
        let t = table(n);
        let k = k.rem_euclid(n as i64) as usize;
        Cyc { n, c: t.pow[k].clone() }.normalized()
    }

    /// Builds sum_k coeffs[k] zeta_N^k for arbitrary length coefficient lists.
    pub fn from_powers(n: u32, coeffs: &[Rat]) -> Self {
        let mut acc = Cyc::zero();
        for (k, r) in coeffs.iter().enumerate() {
            if !r.is_zero() {
                acc += &(&Cyc::root_of_unity(n, k as i64) * &Cyc::from_rat(r.clone()));
            }
        }
        acc
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_rat().map(|r| r.is_one()).unwrap_or(false)
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rat(&self) -> Option<&Rat> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(&self.c[0])
        } else {
            None
        }
    }

    /// The value as a machine integer, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        self.as_rat().filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_i64())
    }

    fn normalized(mut self) -> Self {
        if self.n > 1 && self.c[1..].iter().all(|x| x.is_zero()) {
            self.c.truncate(1);
            self.n = 1;
        }
        self
    }

    /// Re-expresses the element in Q(zeta_m); m must be a multiple of the conductor.
    pub fn embed(&self, m: u32) -> Cyc {
        if m == self.n {
            return self.clone();
        }
        assert!(m % self.n == 0, "conductor {} does not divide {}", self.n, m);
        if self.n == 1 {
            let mut c = vec![Rat::zero(); table(m).phi];
            c[0] = self.c[0].clone();
            return Cyc { n: m, c };
        }
        let t = table(m);
        let step = (m / self.n) as usize;
        let mut c = vec![Rat::zero(); t.phi];
        for (k, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let row = &t.pow[(k * step) % m as usize];
            for j in 0..t.phi {
                if !row[j].is_zero() {
                    c[j] += a * &row[j];
                }
            }
        }
        Cyc { n: m, c }
    }

    fn align(a: &Cyc, b: &Cyc) -> (Cyc, Cyc) {
        let m = lcm(a.n, b.n);
        (a.embed(m), b.embed(m))
    }

    pub fn conj(&self) -> Cyc {
        if self.n <= 2 {
            return self.clone();
        }
        let mut acc = Cyc::zero();
        for (k, a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                acc += &(&Cyc::root_of_unity(self.n, -(k as i64)) * &Cyc::from_rat(a.clone()));
            }
        }
        acc
    }

    fn mul_matrix(&self) -> Vec<Vec<Rat>> {
        // column j = self * zeta^j
        let phi = self.c.len();
        let mut cols = Vec::with_capacity(phi);
        for j in 0..phi {
            let z = Cyc { n: self.n, c: table(self.n).pow[j].clone() };
            cols.push((self * &z).embed(self.n).c);
        }
        let mut m = vec![vec![Rat::zero(); phi]; phi];
        for (j, col) in cols.iter().enumerate() {
            for i in 0..phi {
                m[i][j] = col[i].clone();
            }
        }
        m
    }

    pub fn inv(&self) -> Result<Cyc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rat() {
            return Ok(Cyc::from_rat(r.recip()));
        }
        let phi = self.c.len();
        let mut m = self.mul_matrix();
        let mut rhs = vec![Rat::zero(); phi];
        rhs[0] = Rat::one();
        // Gaussian elimination on the (invertible) multiplication matrix.
        for col in 0..phi {
            let p = (col..phi).find(|&r| !m[r][col].is_zero()).ok_or(Error::DivisionByZero)?;
            m.swap(col, p);
            rhs.swap(col, p);
            let inv = m[col][col].recip();
            for j in col..phi {
                m[col][j] = &m[col][j] * &inv;
            }
            rhs[col] = &rhs[col] * &inv;
            for r in 0..phi {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for j in col..phi {
                        let t = &f * &m[col][j];
                        m[r][j] -= t;
                    }
                    let t = &f * &rhs[col];
                    rhs[r] -= t;
                }
            }
        }
        Ok(Cyc { n: self.n, c: rhs }.normalized())
    }

    pub fn checked_div(&self, b: &Cyc) -> Result<Cyc> {
        Ok(self * &b.inv()?)
    }

    pub fn pow(&self, e: u32) -> Cyc {
        let mut acc = Cyc::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn powi(&self, e: i64) -> Result<Cyc> {
        if e >= 0 {
            Ok(self.pow(e as u32))
        } else {
            Ok(self.inv()?.pow((-e) as u32))
        }
    }

    /// Multiplicative order if this is a root of unity of order dividing `bound`.
    pub fn root_order(&self, bound: u32) -> Option<u32> {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_one() {
                return Some(k);
            }
            p = &p * self;
        }
        None
    }

    pub fn scale_rat(&self, r: &Rat) -> Cyc {
        if r.is_zero() {
            return Cyc::zero();
        }
        Cyc { n: self.n, c: self.c.iter().map(|x| x * r).collect() }
    }
}

impl PartialEq for Cyc {
    fn eq(&self, other: &Cyc) -> bool {
        if self.n == other.n {
            return self.c == other.c;
        }
        (self - other).is_zero()
    }
}
impl Eq for Cyc {}

impl Default for Cyc {
    fn default() -> Self {
        Cyc::zero()
    }
}

impl<'a> Add<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn add(self, b: &Cyc) -> Cyc {
        if self.n == b.n {
            let c = self.c.iter().zip(&b.c).map(|(x, y)| x + y).collect();
            return Cyc { n: self.n, c }.normalized();
        }
        let (x, y) = Cyc::align(self, b);
        &x + &y
    }
}

impl<'a> Sub<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn sub(self, b: &Cyc) -> Cyc {
        if self.n == b.n {
            let c = self.c.iter().zip(&b.c).map(|(x, y)| x - y).collect();
            return Cyc { n: self.n, c }.normalized();
        }
        let (x, y) = Cyc::align(self, b);
        &x - &y
    }
}

impl<'a> Mul<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn mul(self, b: &Cyc) -> Cyc {
        if self.n == 1 {
            return b.scale_rat(&self.c[0]);
        }
        if b.n == 1 {
            return self.scale_rat(&b.c[0]);
        }
        if self.n != b.n {
            let (x, y) = Cyc::align(self, b);
            return &x * &y;
        }
        let t = table(self.n);
        let phi = t.phi;
        let mut prod = vec![Rat::zero(); 2 * phi - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if !y.is_zero() {
                    prod[i + j] += x * y;
                }
            }
        }
        let mut c = vec![Rat::zero(); phi];
        for (k, v) in prod.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            if k < phi {
                c[k] += v;
            } else {
                for (j, r) in t.pow[k].iter().enumerate() {
                    if !r.is_zero() {
                        c[j] += v * r;
                    }
                }
            }
        }
        Cyc { n: self.n, c }.normalized()
    }
}

impl<'a> Div<&'a Cyc> for &'a Cyc {
    type Output = Cyc;
    fn div(self, b: &Cyc) -> Cyc {
        self.checked_div(b).expect("division by zero in cyclotomic field")
    }
}

impl Neg for &Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        Cyc { n: self.n, c: self.c.iter().map(|x| -x).collect() }
    }
}

impl Neg for Cyc {
    type Output = Cyc;
    fn neg(self) -> Cyc {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr<Cyc> for Cyc {
            type Output = Cyc;
            fn $f(self, b: Cyc) -> Cyc {
                (&self).$f(&b)
            }
        }
        impl<'a> $tr<&'a Cyc> for Cyc {
            type Output = Cyc;
            fn $f(self, b: &Cyc) -> Cyc {
                (&self).$f(b)
            }
        }
    };
}
owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl AddAssign<&Cyc> for Cyc {
    fn add_assign(&mut self, b: &Cyc) {
        *self = &*self + b;
    }
}
impl SubAssign<&Cyc> for Cyc {
    fn sub_assign(&mut self, b: &Cyc) {
        *self = &*self - b;
    }
}
impl MulAssign<&Cyc> for Cyc {
    fn mul_assign(&mut self, b: &Cyc) {
        *self = &*self * b;
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rat() {
            return write!(f, "{}", fmt_rat(r));
        }
        let mut out = String::new();
        for (k, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let basis = match k {
                0 => String::new(),
                1 => format!("zeta({})", self.n),
                _ => format!("zeta({})^{}", self.n, k),
            };
            let neg = a.is_negative();
            let mag = a.abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            if basis.is_empty() {
                out.push_str(&fmt_rat(&mag));
            } else if mag.is_one() {
                out.push_str(&basis);
            } else {
                out.push_str(&format!("{}*{}", fmt_rat(&mag), basis));
            }
        }
        if out.contains(' ') {
            write!(f, "({})", out)
        } else {
            write!(f, "{}", out)
        }
    }
}

impl fmt::Debug for Cyc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Converts a small rational to f64 for display purposes only.
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fourth_root_squared() {
        let i = Cyc::root_of_unity(4, 1);
        assert_eq!(&i * &i, Cyc::from_int(-1));
    }

    #[test]
    fn cube_roots_sum() {
        let z = Cyc::root_of_unity(3, 1);
        assert_eq!(&z + &z.pow(2), Cyc::from_int(-1));
    }

    #[test]
    fn quotient_multiplies_back() {
        let z = Cyc::root_of_unity(3, 1);
        let a = &Cyc::one() - &z;
        let b = &Cyc::one() - &z.pow(2);
        let q = &a / &b;
        assert_eq!(&q * &b, a);
        // 1 + z = -z^2, so 1/(1 + z) = -z
        assert_eq!(q, -z);
    }

    #[test]
    fn zeta_n_to_n_is_one() {
        for n in 1..=24 {
            let z = Cyc::root_of_unity(n, 1);
            assert!(z.pow(n).is_one(), "n={}", n);
            assert_eq!(z.root_order(n), Some(n));
        }
    }

    #[test]
    fn mixed_conductors() {
        let i = Cyc::root_of_unity(4, 1);
        let w = Cyc::root_of_unity(3, 1);
        let z12 = Cyc::root_of_unity(12, 1);
        // zeta12^3 = i, zeta12^4 = w
        assert_eq!(z12.pow(3), i);
        assert_eq!(z12.pow(4), w);
        assert_eq!(&i * &w, z12.pow(7));
    }

    #[test]
    fn conjugation() {
        let z = Cyc::root_of_unity(5, 2);
        assert_eq!(z.conj(), Cyc::root_of_unity(5, 3));
        assert!((&z * &z.conj()).is_one());
    }

    #[test]
    fn division_by_zero() {
        assert!(Cyc::one().checked_div(&Cyc::zero()).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(Cyc::frac(3, 2).to_string(), "3/2");
        assert_eq!(Cyc::root_of_unity(3, 1).to_string(), "zeta(3)");
    }
}
