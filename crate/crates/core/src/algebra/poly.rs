//! Univariate polynomials over finite fields.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ff::{Fe, FiniteField};
use crate::error::{Error, Result};

/// A polynomial with coefficients in `F_q`, lowest degree first.
#[derive(Clone)]
pub struct FqPoly {
    field: Arc<FiniteField>,
    coeffs: Vec<Fe>,
}

/// Factorization into a unit and monic irreducible powers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Fe,
    pub factors: Vec<(FqPoly, u32)>,
}

impl PartialEq for FqPoly {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_as(&other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for FqPoly {}

impl Hash for FqPoly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.p().hash(state);
        self.field.degree().hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FqPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by degree, then by coefficients from the top down.
impl Ord for FqPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs
            .len()
            .cmp(&other.coeffs.len())
            .then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl fmt::Debug for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            let cs = self.format_coeff(c);
            match i {
                0 => write!(f, "{cs}")?,
                _ => {
                    if c != 1 {
                        write!(f, "{cs}*")?;
                    }
                    if i == 1 {
                        write!(f, "t")?;
                    } else {
                        write!(f, "t^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl FqPoly {
    pub fn new(field: Arc<FiniteField>, mut coeffs: Vec<Fe>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FqPoly { field, coeffs }
    }

    pub fn zero(field: &Arc<FiniteField>) -> Self {
        FqPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Arc<FiniteField>) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: &Arc<FiniteField>, c: Fe) -> Self {
        Self::new(field.clone(), vec![c])
    }

    pub fn x(field: &Arc<FiniteField>) -> Self {
        Self::new(field.clone(), vec![0, 1])
    }

    pub fn monomial(field: &Arc<FiniteField>, c: Fe, deg: usize) -> Self {
        let mut v = vec![0; deg + 1];
        v[deg] = c;
        Self::new(field.clone(), v)
    }

    /// The monic polynomial of degree `deg` whose lower coefficients are the base-`q` digits of `index`.
    pub fn monic_from_index(field: &Arc<FiniteField>, deg: usize, mut index: u64) -> Self {
        let q = field.q();
        let mut v = Vec::with_capacity(deg + 1);
        for _ in 0..deg {
            v.push((index % q) as Fe);
            index /= q;
        }
        v.push(1);
        Self::new(field.clone(), v)
    }

    /// All monic squarefree polynomials of degree `deg`, in index order.
    pub fn monic_squarefree(field: &Arc<FiniteField>, deg: usize) -> Vec<FqPoly> {
        let total = field.q().pow(deg as u32);
        (0..total)
            .map(|i| Self::monic_from_index(field, deg, i))
            .filter(|f| f.is_squarefree())
            .collect()
    }

    /// `t - a`.
    pub fn linear(field: &Arc<FiniteField>, a: Fe) -> Self {
        Self::new(field.clone(), vec![field.neg(a), 1])
    }

    /// Builds a polynomial from small signed integer coefficients.
    pub fn from_ints(field: &Arc<FiniteField>, coeffs: &[i64]) -> Self {
        Self::new(field.clone(), coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fe] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Fe {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to `-1`.
    pub fn deg_i64(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn lc(&self) -> Fe {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn is_monic(&self) -> bool {
        self.lc() == 1
    }

    fn format_coeff(&self, c: Fe) -> String {
        if self.field.degree() == 1 {
            return c.to_string();
        }
        let digits = self.field.digits(c);
        let mut parts = Vec::new();
        for (i, &d) in digits.iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            let term = match (i, d) {
                (0, _) => d.to_string(),
                (1, 1) => "z".to_string(),
                (1, _) => format!("{d}*z"),
                (_, 1) => format!("z^{i}"),
                _ => format!("{d}*z^{i}"),
            };
            parts.push(term);
        }
        if parts.len() == 1 && !parts[0].contains('+') {
            parts.remove(0)
        } else {
            format!("({})", parts.join("+"))
        }
    }

    fn check(&self, other: &FqPoly) {
        assert!(
            self.field.same_as(&other.field),
            "polynomials over F_{} and F_{} mixed",
            self.field.q(),
            other.field.q()
        );
    }

    pub fn add(&self, other: &FqPoly) -> FqPoly {
        self.check(other);
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        FqPoly::new(f.clone(), v)
    }

    pub fn sub(&self, other: &FqPoly) -> FqPoly {
        self.check(other);
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        FqPoly::new(f.clone(), v)
    }

    pub fn neg(&self) -> FqPoly {
        let f = &self.field;
        FqPoly::new(f.clone(), self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }

    pub fn mul(&self, other: &FqPoly) -> FqPoly {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return FqPoly::zero(&self.field);
        }
        let f = &self.field;
        let mut v = vec![0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = f.add(v[i + j], f.mul(a, b));
            }
        }
        FqPoly::new(f.clone(), v)
    }

    pub fn scale(&self, c: Fe) -> FqPoly {
        let f = &self.field;
        FqPoly::new(f.clone(), self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn shift(&self, k: usize) -> FqPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![0; k];
        v.extend_from_slice(&self.coeffs);
        FqPoly::new(self.field.clone(), v)
    }

    pub fn pow(&self, e: u32) -> FqPoly {
        let mut acc = FqPoly::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn monic(&self) -> FqPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lc()).expect("nonzero leading coefficient");
        self.scale(inv)
    }

    pub fn divrem(&self, other: &FqPoly) -> Result<(FqPoly, FqPoly)> {
        self.check(other);
        let dd = other.degree().ok_or(Error::DivisionByZero)?;
        let f = &self.field;
        if self.coeffs.len() <= dd {
            return Ok((FqPoly::zero(f), self.clone()));
        }
        let inv = f.inv(other.lc())?;
        let mut r = self.coeffs.clone();
        let mut qv = vec![0; r.len() - dd];
        for i in (dd..r.len()).rev() {
            let c = r[i];
            if c == 0 {
                continue;
            }
            let t = f.mul(c, inv);
            qv[i - dd] = t;
            let shift = i - dd;
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b != 0 {
                    r[shift + j] = f.sub(r[shift + j], f.mul(t, b));
                }
            }
        }
        r.truncate(dd);
        Ok((FqPoly::new(f.clone(), qv), FqPoly::new(f.clone(), r)))
    }

    pub fn rem(&self, other: &FqPoly) -> Result<FqPoly> {
        Ok(self.divrem(other)?.1)
    }

    /// Exact quotient; fails when the division leaves a remainder.
    pub fn div_exact(&self, other: &FqPoly) -> Result<FqPoly> {
        let (q, r) = self.divrem(other)?;
        if !r.is_zero() {
            return Err(Error::InternalInconsistency(format!("{other} does not divide {self}")));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &FqPoly) -> bool {
        matches!(other.rem(self), Ok(r) if r.is_zero())
    }

    /// Monic greatest common divisor (zero when both are zero).
    pub fn gcd(&self, other: &FqPoly) -> FqPoly {
        self.check(other);
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> FqPoly {
        let f = &self.field;
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int(i as i64)))
            .collect();
        FqPoly::new(f.clone(), v)
    }

    #[inline]
    pub fn eval(&self, a: Fe) -> Fe {
        let f = &self.field;
        let mut acc = 0;
        for &c in self.coeffs.iter().rev() {
            acc = f.add(f.mul(acc, a), c);
        }
        acc
    }

    pub fn mulmod(&self, other: &FqPoly, m: &FqPoly) -> FqPoly {
        self.mul(other).rem(m).expect("nonzero modulus")
    }

    pub fn powmod(&self, mut e: u64, m: &FqPoly) -> FqPoly {
        let mut base = self.rem(m).expect("nonzero modulus");
        let mut acc = FqPoly::one(&self.field).rem(m).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&base, m);
            }
            base = base.mulmod(&base, m);
            e >>= 1;
        }
        acc
    }

    /// `self^(q^j) mod m` by repeated `q`-th powering.
    pub fn frobenius_mod(&self, j: u32, m: &FqPoly) -> FqPoly {
        let q = self.field.q();
        let mut acc = self.rem(m).expect("nonzero modulus");
        for _ in 0..j {
            acc = acc.powmod(q, m);
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        self.gcd(&self.derivative()).degree() == Some(0)
    }

    /// Rabin's irreducibility test.
    pub fn is_irreducible(&self) -> bool {
        let n = match self.degree() {
            None | Some(0) => return false,
            Some(n) => n as u32,
        };
        if n == 1 {
            return true;
        }
        let m = self.monic();
        let x = FqPoly::x(&self.field);
        if x.frobenius_mod(n, &m) != x.rem(&m).unwrap() {
            return false;
        }
        for r in super::ff::prime_factors(n as u64) {
            let h = x.frobenius_mod(n / r as u32, &m).sub(&x);
            if m.gcd(&h).degree() != Some(0) {
                return false;
            }
        }
        true
    }

    fn pth_root(&self) -> FqPoly {
        let f = &self.field;
        let p = f.p() as usize;
        let e = f.q() / f.p() as u64;
        let v = (0..self.coeffs.len().div_ceil(p))
            .map(|j| f.pow(self.coeff(j * p), e))
            .collect();
        FqPoly::new(f.clone(), v)
    }

    /// Squarefree decomposition of a monic polynomial.
    pub fn squarefree_decomposition(&self) -> Vec<(FqPoly, u32)> {
        let f = self.monic();
        let mut out = Vec::new();
        if f.degree().unwrap_or(0) == 0 {
            return out;
        }
        let mut c = f.gcd(&f.derivative());
        let mut w = f.div_exact(&c).unwrap();
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let y = w.gcd(&c);
            let z = w.div_exact(&y).unwrap();
            if z.degree().unwrap_or(0) > 0 {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = c.div_exact(&w).unwrap();
        }
        if c.degree().unwrap_or(0) > 0 {
            let p = self.field.p();
            for (g, m) in c.pth_root().squarefree_decomposition() {
                out.push((g, m * p));
            }
        }
        out
    }

    /// Distinct-degree factorization of a monic squarefree polynomial.
    pub fn distinct_degree(&self) -> Vec<(FqPoly, u32)> {
        let mut out = Vec::new();
        let mut f = self.monic();
        let x = FqPoly::x(&self.field);
        let mut h = x.rem(&f).unwrap_or_else(|_| x.clone());
        let mut i = 0u32;
        while let Some(d) = f.degree() {
            if d < 2 * (i as usize + 1) {
                break;
            }
            i += 1;
            h = h.powmod(self.field.q(), &f);
            let g = f.gcd(&h.sub(&x));
            if g.degree().unwrap_or(0) > 0 {
                f = f.div_exact(&g).unwrap();
                h = h.rem(&f).unwrap();
                out.push((g, i));
            }
        }
        if f.degree().unwrap_or(0) > 0 {
            let d = f.degree().unwrap() as u32;
            out.push((f, d));
        }
        out
    }

    fn random_below(&self, deg: usize, rng: &mut ChaCha8Rng) -> FqPoly {
        let q = self.field.q();
        let v = (0..deg).map(|_| rng.random_range(0..q) as Fe).collect();
        FqPoly::new(self.field.clone(), v)
    }

    /// Splits a monic squarefree product of irreducibles of degree `e`.
    pub fn equal_degree(&self, e: u32) -> Vec<FqPoly> {
        let n = self.degree().unwrap_or(0);
        if n == 0 {
            return Vec::new();
        }
        if n == e as usize {
            return vec![self.monic()];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (n as u64) << 8 ^ e as u64);
        let mut pending = vec![self.monic()];
        let mut done = Vec::new();
        while let Some(g) = pending.pop() {
            if g.degree().unwrap() == e as usize {
                done.push(g);
                continue;
            }
            loop {
                let a = g.random_below(g.degree().unwrap(), &mut rng);
                if a.degree().unwrap_or(0) == 0 {
                    continue;
                }
                let b = g.splitting_element(&a, e);
                let d = g.gcd(&b);
                let dd = d.degree().unwrap_or(0);
                if dd > 0 && dd < g.degree().unwrap() {
                    let other = g.div_exact(&d).unwrap();
                    pending.push(d);
                    pending.push(other);
                    break;
                }
            }
        }
        done.sort();
        done
    }

    fn splitting_element(&self, a: &FqPoly, e: u32) -> FqPoly {
        let field = &self.field;
        if field.p() == 2 {
            let bits = field.degree() * e;
            let mut t = a.rem(self).unwrap();
            let mut acc = t.clone();
            for _ in 1..bits {
                t = t.mulmod(&t, self);
                acc = acc.add(&t);
            }
            acc
        } else {
            let mut norm = a.rem(self).unwrap();
            let mut conj = norm.clone();
            for _ in 1..e {
                conj = conj.powmod(field.q(), self);
                norm = norm.mulmod(&conj, self);
            }
            let h = norm.powmod((field.q() - 1) / 2, self);
            h.sub(&FqPoly::one(field))
        }
    }

    /// Full factorization.
    pub fn factor(&self) -> Result<Factorization> {
        if self.is_zero() {
            return Err(Error::EmptyFactorization);
        }
        let unit = self.lc();
        let mut factors = Vec::new();
        for (sq, m) in self.squarefree_decomposition() {
            for (g, e) in sq.distinct_degree() {
                for h in g.equal_degree(e) {
                    factors.push((h, m));
                }
            }
        }
        factors.sort();
        Ok(Factorization { unit, factors })
    }

    /// Distinct roots in the coefficient field, ascending.
    pub fn roots(&self) -> Vec<Fe> {
        if self.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let f = self.monic();
        let x = FqPoly::x(&self.field);
        let split = x.powmod(self.field.q(), &f).sub(&x);
        let g = f.gcd(&split);
        let mut roots: Vec<Fe> = g
            .equal_degree(1)
            .into_iter()
            .map(|l| self.field.neg(l.coeff(0)))
            .collect();
        roots.sort();
        roots
    }

    /// Whether the polynomial is not an `e`-th power for any divisor `e > 1` of `d`.
    pub fn is_dth_power_free(&self, d: u32) -> Result<bool> {
        let fac = self.factor()?;
        for e in super::ff::prime_factors(d as u64) {
            let e = e as u32;
            let all = fac.factors.iter().all(|(_, m)| m % e == 0);
            if all && self.field.is_power(fac.unit, e as u64) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The polynomial with coefficients mapped through `map` into `target`.
    pub fn map_coeffs(&self, target: &Arc<FiniteField>, map: impl Fn(Fe) -> Fe) -> FqPoly {
        FqPoly::new(target.clone(), self.coeffs.iter().map(|&c| map(c)).collect())
    }

    /// `t^deg * self(1/t)` for a given `deg >= degree`.
    pub fn reversed(&self, deg: usize) -> FqPoly {
        let mut v = vec![0; deg + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            v[deg - i] = c;
        }
        FqPoly::new(self.field.clone(), v)
    }

    /// Integer encoding of a monic polynomial's lower coefficients.
    pub fn encode(&self) -> u128 {
        let q = self.field.q() as u128;
        self.coeffs.iter().rev().fold(0u128, |acc, &c| acc * q + c as u128)
    }

    /// Parses expressions like `t^5+2*t+1` over `field`; `x` is accepted for `t`
    /// and `z` denotes the generator of the coefficient field.
    pub fn parse(field: &Arc<FiniteField>, s: &str) -> Result<FqPoly> {
        parse::parse_poly(field, s)
    }
}

mod parse {
    use super::*;

    struct Parser<'a> {
        s: &'a [u8],
        pos: usize,
        field: &'a Arc<FiniteField>,
    }

    pub(super) fn parse_poly(field: &Arc<FiniteField>, s: &str) -> Result<FqPoly> {
        let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut p = Parser { s: cleaned.as_bytes(), pos: 0, field };
        let v = p.expr()?;
        if p.pos != p.s.len() {
            return Err(Error::Parse(format!(
                "unexpected '{}' in {s}",
                p.s[p.pos] as char
            )));
        }
        Ok(v)
    }

    impl Parser<'_> {
        fn peek(&self) -> Option<u8> {
            self.s.get(self.pos).copied()
        }

        fn expr(&mut self) -> Result<FqPoly> {
            let mut neg = false;
            if self.peek() == Some(b'-') {
                neg = true;
                self.pos += 1;
            } else if self.peek() == Some(b'+') {
                self.pos += 1;
            }
            let mut acc = self.term()?;
            if neg {
                acc = acc.neg();
            }
            while let Some(c) = self.peek() {
                match c {
                    b'+' => {
                        self.pos += 1;
                        let t = self.term()?;
                        acc = acc.add(&t);
                    }
                    b'-' => {
                        self.pos += 1;
                        let t = self.term()?;
                        acc = acc.sub(&t);
                    }
                    _ => break,
                }
            }
            Ok(acc)
        }

        fn term(&mut self) -> Result<FqPoly> {
            let mut acc = self.power()?;
            while self.peek() == Some(b'*') {
                self.pos += 1;
                let t = self.power()?;
                acc = acc.mul(&t);
            }
            Ok(acc)
        }

        fn power(&mut self) -> Result<FqPoly> {
            let base = self.atom()?;
            if self.peek() == Some(b'^') {
                self.pos += 1;
                let e = self.number()?;
                return Ok(base.pow(e as u32));
            }
            Ok(base)
        }

        fn number(&mut self) -> Result<u64> {
            let start = self.pos;
            while matches!(self.peek(), Some(b'0'..=b'9')) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(Error::Parse(format!("expected number at position {start}")));
            }
            std::str::from_utf8(&self.s[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|e| Error::Parse(format!("{e}")))
        }

        fn atom(&mut self) -> Result<FqPoly> {
            let f = self.field;
            match self.peek() {
                Some(b'0'..=b'9') => {
                    let n = self.number()?;
                    let c = f.from_int((n % f.p() as u64) as i64);
                    Ok(FqPoly::constant(f, c))
                }
                Some(b't') | Some(b'x') => {
                    self.pos += 1;
                    Ok(FqPoly::x(f))
                }
                Some(b'z') => {
                    self.pos += 1;
                    if f.degree() == 1 {
                        return Err(Error::Parse("generator z used over a prime field".into()));
                    }
                    Ok(FqPoly::constant(f, f.p()))
                }
                Some(b'(') => {
                    self.pos += 1;
                    let v = self.expr()?;
                    if self.peek() != Some(b')') {
                        return Err(Error::Parse("missing ')'".into()));
                    }
                    self.pos += 1;
                    Ok(v)
                }
                Some(c) => Err(Error::Parse(format!("unexpected '{}'", c as char))),
                None => Err(Error::Parse("unexpected end of input".into())),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> Arc<FiniteField> {
        FiniteField::new(p, 1).unwrap()
    }

    #[test]
    fn factors_x4_minus_1_over_f5() {
        let f5 = f(5);
        let poly = FqPoly::parse(&f5, "t^4-1").unwrap();
        let fac = poly.factor().unwrap();
        let roots: Vec<Fe> = fac.factors.iter().map(|(g, _)| f5.neg(g.coeff(0))).collect();
        assert_eq!(fac.factors.len(), 4);
        let mut r = roots.clone();
        r.sort();
        assert_eq!(r, vec![1, 2, 3, 4]);
        assert!(fac.factors.iter().all(|(_, m)| *m == 1));
    }

    #[test]
    fn x2_plus_1_irreducible_over_f3() {
        let f3 = f(3);
        let poly = FqPoly::parse(&f3, "x^2+1").unwrap();
        let fac = poly.factor().unwrap();
        assert_eq!(fac.factors, vec![(poly.clone(), 1)]);
        assert!(poly.is_irreducible());
    }

    #[test]
    fn zero_cannot_be_factored() {
        assert_eq!(FqPoly::zero(&f(5)).factor(), Err(Error::EmptyFactorization));
    }

    #[test]
    fn inseparable_input_over_char_three() {
        let f3 = f(3);
        let poly = FqPoly::parse(&f3, "(t^2+1)^3*(t+1)^2").unwrap();
        let fac = poly.factor().unwrap();
        assert_eq!(
            fac.factors,
            vec![
                (FqPoly::parse(&f3, "t+1").unwrap(), 2),
                (FqPoly::parse(&f3, "t^2+1").unwrap(), 3)
            ]
        );
    }

    #[test]
    fn factorization_over_extension_and_char_two() {
        for &(p, k) in &[(2u32, 1u32), (2, 2), (3, 2), (7, 1)] {
            let fld = FiniteField::new(p, k).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            for _ in 0..30 {
                let deg = rng.random_range(1..9);
                let mut v: Vec<Fe> =
                    (0..deg).map(|_| rng.random_range(0..fld.q()) as Fe).collect();
                v.push(rng.random_range(1..fld.q()) as Fe);
                let poly = FqPoly::new(fld.clone(), v);
                let fac = poly.factor().unwrap();
                let mut prod = FqPoly::constant(&fld, fac.unit);
                for (g, m) in &fac.factors {
                    assert!(g.is_irreducible() && g.is_monic());
                    prod = prod.mul(&g.pow(*m));
                }
                assert_eq!(prod, poly);
            }
        }
    }

    #[test]
    fn dth_power_freeness() {
        let f7 = f(7);
        let sq = FqPoly::parse(&f7, "(t+1)^2").unwrap();
        assert!(!sq.is_dth_power_free(2).unwrap());
        assert!(sq.is_dth_power_free(3).unwrap());
        let nonsquare_const = FqPoly::parse(&f7, "3*(t+1)^2").unwrap();
        assert!(nonsquare_const.is_dth_power_free(2).unwrap());
        let cube = FqPoly::parse(&f7, "(t^2+1)^3").unwrap();
        assert!(!cube.is_dth_power_free(6).unwrap());
    }

    #[test]
    fn parser_round_trip() {
        let f9 = FiniteField::new(3, 2).unwrap();
        let p = FqPoly::parse(&f9, "t^3+z*t+2").unwrap();
        assert_eq!(p.coeffs(), &[2, 3, 0, 1]);
        let again = FqPoly::parse(&f9, &p.to_string()).unwrap();
        assert_eq!(p, again);
        assert!(FqPoly::parse(&f9, "t^^2").is_err());
    }

    #[test]
    fn roots_of_split_polynomial() {
        let f7 = f(7);
        let p = FqPoly::parse(&f7, "(t-1)*(t-3)*(t^2+1)").unwrap();
        assert_eq!(p.roots(), vec![1, 3]);
    }
}
