//! Exact arithmetic in `Z[zeta_m][u]/(u^2 - q)`.
//!
//! Elements are pairs `a + b*u` with `a, b` in the cyclotomic integers,
//! stored in the power basis `1, zeta, ..., zeta^(phi(m)-1)`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use parking_lot::Mutex;

use crate::error::{Error, Result};

/// The ring `Z[zeta_m][u]/(u^2 - q)`.
pub struct CycloRing {
    m: u32,
    q: u64,
    phi: usize,
    cyclotomic: Vec<i64>,
    powers: Vec<Vec<i64>>,
}

impl fmt::Debug for CycloRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z[zeta_{}][sqrt {}]", self.m, self.q)
    }
}

static RINGS: Lazy<Mutex<HashMap<(u32, u64), Arc<CycloRing>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    let mut q = vec![0i64; num.len() - dd];
    for i in (dd..r.len()).rev() {
        let c = r[i];
        q[i - dd] = c;
        for (j, &b) in den.iter().enumerate() {
            r[i - dd + j] -= c * b;
        }
    }
    q
}

/// Coefficients of the `m`-th cyclotomic polynomial.
pub fn cyclotomic_poly(m: u32) -> Vec<i64> {
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m % d == 0 {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

/// Euler's totient.
pub fn euler_phi(m: u32) -> u32 {
    (1..=m).filter(|&k| num_integer::gcd(k, m) == 1).count() as u32
}

impl CycloRing {
    /// The cached ring for `(m, q)`.
    pub fn get(m: u32, q: u64) -> Arc<CycloRing> {
        assert!(m >= 1, "cyclotomic level must be positive");
        if let Some(r) = RINGS.lock().get(&(m, q)) {
            return r.clone();
        }
        let cyclotomic = cyclotomic_poly(m);
        let phi = cyclotomic.len() - 1;
        let mut powers = Vec::with_capacity(m as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..m {
            powers.push(cur.clone());
            let mut next = vec![0i64; phi + 1];
            next[1..(phi + 1)].copy_from_slice(&cur[..phi]);
            let top = next[phi];
            for j in 0..phi {
                next[j] -= top * cyclotomic[j];
            }
            next.truncate(phi);
            cur = next;
        }
        let ring = Arc::new(CycloRing { m, q, phi, cyclotomic, powers });
        RINGS.lock().entry((m, q)).or_insert(ring).clone()
    }

    /// The ring with `m = lcm(d, 2)`.
    pub fn for_order(d: u32, q: u64) -> Arc<CycloRing> {
        Self::get(num_integer::lcm(d.max(1), 2), q)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    pub fn cyclotomic(&self) -> &[i64] {
        &self.cyclotomic
    }

    pub fn zero(self: &Arc<Self>) -> ScalarExt {
        ScalarExt {
            ring: self.clone(),
            a: vec![BigInt::zero(); self.phi],
            b: vec![BigInt::zero(); self.phi],
        }
    }

    pub fn one(self: &Arc<Self>) -> ScalarExt {
        self.int(1)
    }

    pub fn int(self: &Arc<Self>, n: i64) -> ScalarExt {
        self.big(BigInt::from(n))
    }

    pub fn big(self: &Arc<Self>, n: BigInt) -> ScalarExt {
        let mut z = self.zero();
        z.a[0] = n;
        z
    }

    /// `zeta_m^j`.
    pub fn zeta_pow(self: &Arc<Self>, j: i64) -> ScalarExt {
        let idx = j.rem_euclid(self.m as i64) as usize;
        let mut z = self.zero();
        for (k, &c) in self.powers[idx].iter().enumerate() {
            z.a[k] = BigInt::from(c);
        }
        z
    }

    /// `u^e` for `e >= 0`.
    pub fn u_pow(self: &Arc<Self>, e: u32) -> ScalarExt {
        let mut z = self.zero();
        let qpow = BigInt::from(self.q).pow(e / 2);
        if e % 2 == 0 {
            z.a[0] = qpow;
        } else {
            z.b[0] = qpow;
        }
        z
    }

    pub fn u(self: &Arc<Self>) -> ScalarExt {
        self.u_pow(1)
    }

    /// Element from integer vectors in the power basis.
    pub fn from_parts(self: &Arc<Self>, a: &[i64], b: &[i64]) -> ScalarExt {
        let mut z = self.zero();
        for (j, &c) in a.iter().enumerate() {
            z = &z + &self.zeta_pow(j as i64).scale(&BigInt::from(c));
        }
        for (j, &c) in b.iter().enumerate() {
            z = &z + &(&self.zeta_pow(j as i64) * &self.u()).scale(&BigInt::from(c));
        }
        z
    }

    /// Element `sum_j c_j zeta^j` from coefficients indexed by exponent mod `m`.
    pub fn from_zeta_sums(self: &Arc<Self>, sums: &[i128]) -> ScalarExt {
        let mut wide = vec![BigInt::zero(); self.m as usize];
        for (j, &c) in sums.iter().enumerate() {
            wide[j % self.m as usize] += BigInt::from(c);
        }
        ScalarExt { ring: self.clone(), a: self.reduce(wide), b: vec![BigInt::zero(); self.phi] }
    }

    fn reduce(&self, wide: Vec<BigInt>) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.phi];
        for (j, c) in wide.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if j < self.phi {
                out[j] += c;
            } else {
                for (k, &r) in self.powers[j % self.m as usize].iter().enumerate() {
                    if r != 0 {
                        out[k] += &c * r;
                    }
                }
            }
        }
        out
    }

    fn cyc_mul(&self, x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
        if x.iter().all(|c| c.is_zero()) || y.iter().all(|c| c.is_zero()) {
            return vec![BigInt::zero(); self.phi];
        }
        let mut wide = vec![BigInt::zero(); 2 * self.phi - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if !b.is_zero() {
                    wide[i + j] += a * b;
                }
            }
        }
        self.reduce(wide)
    }
}

/// An element `a + b*u` of a [`CycloRing`].
#[derive(Clone)]
pub struct ScalarExt {
    ring: Arc<CycloRing>,
    a: Vec<BigInt>,
    b: Vec<BigInt>,
}

impl PartialEq for ScalarExt {
    fn eq(&self, other: &Self) -> bool {
        self.ring.m == other.ring.m && self.ring.q == other.ring.q && self.a == other.a && self.b == other.b
    }
}

impl Eq for ScalarExt {}

impl fmt::Debug for ScalarExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

fn fmt_part(v: &[BigInt]) -> String {
    if v.iter().skip(1).all(|c| c.is_zero()) {
        v[0].to_string()
    } else {
        let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
        format!("({})", parts.join(","))
    }
}

impl fmt::Display for ScalarExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*u", fmt_part(&self.a), fmt_part(&self.b))
    }
}

fn add_vec(x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
    x.iter().zip(y).map(|(a, b)| a + b).collect()
}

fn sub_vec(x: &[BigInt], y: &[BigInt]) -> Vec<BigInt> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

impl ScalarExt {
    pub fn ring(&self) -> &Arc<CycloRing> {
        &self.ring
    }

    /// Rational part in the power basis.
    pub fn a(&self) -> &[BigInt] {
        &self.a
    }

    /// Coefficient of `u` in the power basis.
    pub fn b(&self) -> &[BigInt] {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|c| c.is_zero()) && self.b.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.a[0].is_one()
            && self.a.iter().skip(1).all(|c| c.is_zero())
            && self.b.iter().all(|c| c.is_zero())
    }

    /// The integer value when the element lies in `Z`.
    pub fn as_integer(&self) -> Option<BigInt> {
        if self.a.iter().skip(1).all(|c| c.is_zero()) && self.b.iter().all(|c| c.is_zero()) {
            Some(self.a[0].clone())
        } else {
            None
        }
    }

    fn same_ring(&self, other: &ScalarExt) {
        assert!(
            self.ring.m == other.ring.m && self.ring.q == other.ring.q,
            "scalars from {:?} and {:?} mixed",
            self.ring,
            other.ring
        );
    }

    pub fn checked_add(&self, other: &ScalarExt) -> Result<ScalarExt> {
        if self.ring.m != other.ring.m || self.ring.q != other.ring.q {
            return Err(Error::DomainMismatch(format!("{:?} vs {:?}", self.ring, other.ring)));
        }
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &ScalarExt) -> Result<ScalarExt> {
        if self.ring.m != other.ring.m || self.ring.q != other.ring.q {
            return Err(Error::DomainMismatch(format!("{:?} vs {:?}", self.ring, other.ring)));
        }
        Ok(self * other)
    }

    pub fn scale(&self, k: &BigInt) -> ScalarExt {
        ScalarExt {
            ring: self.ring.clone(),
            a: self.a.iter().map(|c| c * k).collect(),
            b: self.b.iter().map(|c| c * k).collect(),
        }
    }

    /// Exact division by a nonzero integer, if every coefficient is divisible.
    pub fn div_int(&self, k: &BigInt) -> Option<ScalarExt> {
        if k.is_zero() {
            return None;
        }
        let mut a = Vec::with_capacity(self.a.len());
        let mut b = Vec::with_capacity(self.b.len());
        for c in &self.a {
            let (d, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            a.push(d);
        }
        for c in &self.b {
            let (d, r) = c.div_rem(k);
            if !r.is_zero() {
                return None;
            }
            b.push(d);
        }
        Some(ScalarExt { ring: self.ring.clone(), a, b })
    }

    /// Exact division by `u^e`.
    pub fn div_u_pow(&self, e: u32) -> Option<ScalarExt> {
        let mut cur = self.clone();
        let q = BigInt::from(self.ring.q);
        for _ in 0..e {
            let a = cur.b.clone();
            let mut b = Vec::with_capacity(cur.a.len());
            for c in &cur.a {
                let (d, r) = c.div_rem(&q);
                if !r.is_zero() {
                    return None;
                }
                b.push(d);
            }
            cur = ScalarExt { ring: cur.ring.clone(), a, b };
        }
        Some(cur)
    }

    /// Complex conjugation: `zeta -> zeta^-1`, `u -> u`.
    pub fn conj(&self) -> ScalarExt {
        let m = self.ring.m as i64;
        let mut out = self.ring.zero();
        for j in 0..self.ring.phi {
            let z = self.ring.zeta_pow(m - j as i64);
            for (k, c) in z.a.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                out.a[k] += &self.a[j] * c;
                out.b[k] += &self.b[j] * c;
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> ScalarExt {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Image under `zeta -> exp(2 pi i / m)`, `u -> sqrt(q)`.
    pub fn embed(&self) -> Complex64 {
        let m = self.ring.m as f64;
        let sq = (self.ring.q as f64).sqrt();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.ring.phi {
            let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / m);
            let a = self.a[j].to_f64().unwrap_or(f64::NAN);
            let b = self.b[j].to_f64().unwrap_or(f64::NAN);
            acc += z * (a + b * sq);
        }
        acc
    }

    /// Re-expresses the element in a ring of level `m'` divisible by `m`.
    pub fn lift(&self, target: &Arc<CycloRing>) -> Result<ScalarExt> {
        if target.q != self.ring.q || target.m % self.ring.m != 0 {
            return Err(Error::DomainMismatch(format!(
                "cannot lift {:?} into {:?}",
                self.ring, target
            )));
        }
        let t = (target.m / self.ring.m) as i64;
        let mut out = target.zero();
        let u = target.u();
        for j in 0..self.ring.phi {
            let z = target.zeta_pow(t * j as i64);
            out = &out + &z.scale(&self.a[j]);
            if !self.b[j].is_zero() {
                out = &out + &(&z * &u).scale(&self.b[j]);
            }
        }
        Ok(out)
    }

    /// Maximum absolute coefficient, for diagnostics.
    pub fn height(&self) -> BigInt {
        self.a
            .iter()
            .chain(self.b.iter())
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Parses the `a+b*u` text form produced by `Display`.
    pub fn parse(ring: &Arc<CycloRing>, s: &str) -> Result<ScalarExt> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = s
            .strip_suffix("*u")
            .ok_or_else(|| Error::Parse(format!("missing '*u' in {s}")))?;
        let (a_str, b_str) = split_parts(body)?;
        let a = parse_part(ring, a_str)?;
        let b = parse_part(ring, b_str)?;
        Ok(ScalarExt { ring: ring.clone(), a, b })
    }
}

fn split_parts(body: &str) -> Result<(&str, &str)> {
    let bytes = body.as_bytes();
    let mut depth = 0;
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' if depth == 0 && i > 0 => return Ok((&body[..i], &body[i + 1..])),
            _ => {}
        }
    }
    Err(Error::Parse(format!("malformed scalar {body}")))
}

fn parse_part(ring: &Arc<CycloRing>, s: &str) -> Result<Vec<BigInt>> {
    let mut out = vec![BigInt::zero(); ring.phi];
    if let Some(inner) = s.strip_prefix('(').and_then(|x| x.strip_suffix(')')) {
        let items: Vec<&str> = inner.split(',').collect();
        if items.len() != ring.phi {
            return Err(Error::Parse(format!("expected {} components in {s}", ring.phi)));
        }
        for (k, it) in items.iter().enumerate() {
            out[k] = it.parse().map_err(|_| Error::Parse(format!("bad integer {it}")))?;
        }
    } else {
        out[0] = s.parse().map_err(|_| Error::Parse(format!("bad integer {s}")))?;
    }
    Ok(out)
}

impl Add for &ScalarExt {
    type Output = ScalarExt;
    fn add(self, other: &ScalarExt) -> ScalarExt {
        self.same_ring(other);
        ScalarExt {
            ring: self.ring.clone(),
            a: add_vec(&self.a, &other.a),
            b: add_vec(&self.b, &other.b),
        }
    }
}

impl Sub for &ScalarExt {
    type Output = ScalarExt;
    fn sub(self, other: &ScalarExt) -> ScalarExt {
        self.same_ring(other);
        ScalarExt {
            ring: self.ring.clone(),
            a: sub_vec(&self.a, &other.a),
            b: sub_vec(&self.b, &other.b),
        }
    }
}

impl Neg for &ScalarExt {
    type Output = ScalarExt;
    fn neg(self) -> ScalarExt {
        ScalarExt {
            ring: self.ring.clone(),
            a: self.a.iter().map(|c| -c).collect(),
            b: self.b.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &ScalarExt {
    type Output = ScalarExt;
    fn mul(self, other: &ScalarExt) -> ScalarExt {
        self.same_ring(other);
        let r = &self.ring;
        let ac = r.cyc_mul(&self.a, &other.a);
        let bd = r.cyc_mul(&self.b, &other.b);
        let ad = r.cyc_mul(&self.a, &other.b);
        let bc = r.cyc_mul(&self.b, &other.a);
        let q = BigInt::from(r.q);
        ScalarExt {
            ring: r.clone(),
            a: ac.iter().zip(&bd).map(|(x, y)| x + y * &q).collect(),
            b: add_vec(&ad, &bc),
        }
    }
}

/// Polynomials in `T` with [`ScalarExt`] coefficients, lowest degree first.
pub mod spoly {
    use super::*;

    pub fn trim(mut p: Vec<ScalarExt>) -> Vec<ScalarExt> {
        while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    pub fn mul(x: &[ScalarExt], y: &[ScalarExt]) -> Vec<ScalarExt> {
        let ring = x[0].ring().clone();
        let mut out = vec![ring.zero(); x.len() + y.len() - 1];
        for (i, a) in x.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in y.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        trim(out)
    }

    /// Quotient of `num` by `den` when `den(0) = 1` and the division is exact.
    pub fn div_exact(num: &[ScalarExt], den: &[ScalarExt]) -> Option<Vec<ScalarExt>> {
        let den = trim(den.to_vec());
        let num = trim(num.to_vec());
        if !den[0].is_one() {
            return None;
        }
        if num.len() < den.len() {
            return if num.iter().all(|c| c.is_zero()) { Some(num) } else { None };
        }
        let n = num.len() - den.len() + 1;
        let mut quot: Vec<ScalarExt> = Vec::with_capacity(n);
        for k in 0..n {
            let mut c = num[k].clone();
            for j in 1..den.len().min(k + 1) {
                c = &c - &(&den[j] * &quot[k - j]);
            }
            quot.push(c);
        }
        let back = mul(&quot, &den);
        let ok = (0..num.len().max(back.len())).all(|i| {
            let a = num.get(i);
            let b = back.get(i);
            match (a, b) {
                (Some(a), Some(b)) => a == b,
                (Some(a), None) => a.is_zero(),
                (None, Some(b)) => b.is_zero(),
                (None, None) => true,
            }
        });
        if ok {
            Some(trim(quot))
        } else {
            None
        }
    }

    /// Divides by `1 - alpha*T` when exact.
    pub fn div_linear(p: &[ScalarExt], alpha: &ScalarExt) -> Option<Vec<ScalarExt>> {
        let p = trim(p.to_vec());
        if p.len() == 1 {
            return None;
        }
        let mut quot = Vec::with_capacity(p.len() - 1);
        let mut carry = p[0].clone();
        quot.push(carry.clone());
        for c in p.iter().take(p.len() - 1).skip(1) {
            carry = c + &(alpha * &carry);
            quot.push(carry.clone());
        }
        let rem = &p[p.len() - 1] + &(alpha * &carry);
        if rem.is_zero() {
            Some(quot)
        } else {
            None
        }
    }

    /// Coefficientwise conjugate.
    pub fn conj(p: &[ScalarExt]) -> Vec<ScalarExt> {
        p.iter().map(|c| c.conj()).collect()
    }

    pub fn to_complex(p: &[ScalarExt]) -> Vec<Complex64> {
        p.iter().map(|c| c.embed()).collect()
    }
}
