//! Finite fields `F_q`, `q = p^k`, with canonical moduli.
//!
//! An element is a `u32` whose base-`p` digits are the coefficients of its
//! representative polynomial modulo the field's defining polynomial, which is
//! the lowest lexicographic monic irreducible of degree `k` over `F_p`.
//! Fields with at most [`TABLE_CAP`] elements carry exp/log/Zech tables.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use once_cell::sync::Lazy;
use parking_lot::Mutex;

use crate::error::{Error, Result};

/// Raw field element in canonical base-`p` encoding.
pub type Fe = u32;

/// Largest field order for which lookup tables are built.
pub const TABLE_CAP: u64 = 1 << 22;

const NO_LOG: u32 = u32::MAX;

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
    zech: Vec<u32>,
}

/// A finite field of order `p^k`.
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u64,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    generator: Fe,
    order_factors: Vec<u64>,
    tables: Option<Tables>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} (q={}, modulus={:?})", self.p, self.k, self.q, self.modulus)
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k
    }
}

impl Eq for FiniteField {}

static FIELDS: Lazy<Mutex<HashMap<(u32, u32), Arc<FiniteField>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= n {
        if n % i == 0 {
            return false;
        }
        i += 1;
    }
    true
}

/// Distinct prime factors of `n` by trial division.
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits a prime power into `(p, k)`.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    let fs = prime_factors(q);
    if fs.len() != 1 {
        return None;
    }
    let p = fs[0];
    let mut k = 0;
    let mut r = q;
    while r > 1 {
        r /= p;
        k += 1;
    }
    Some((p as u32, k))
}

impl FiniteField {
    /// Returns the cached field of order `p^k`.
    pub fn new(p: u32, k: u32) -> Result<Arc<FiniteField>> {
        if !is_prime_u64(p as u64) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be positive".into()));
        }
        let q = (p as u64).checked_pow(k).filter(|&q| q <= u32::MAX as u64);
        if q.is_none() {
            return Err(Error::InvalidInput(format!("field {p}^{k} too large")));
        }
        if let Some(f) = FIELDS.lock().get(&(p, k)) {
            return Ok(f.clone());
        }
        let field = Arc::new(Self::build(p, k)?);
        let mut cache = FIELDS.lock();
        Ok(cache.entry((p, k)).or_insert(field).clone())
    }

    /// Field of order `q`.
    pub fn of_order(q: u64) -> Result<Arc<FiniteField>> {
        let (p, k) =
            prime_power(q).ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        Self::new(p, k)
    }

    /// The field of order `self.q()^n`.
    pub fn extension(&self, n: u32) -> Result<Arc<FiniteField>> {
        Self::new(self.p, self.k * n)
    }

    /// The prime subfield.
    pub fn prime_field(&self) -> Arc<FiniteField> {
        Self::new(self.p, 1).expect("prime field")
    }

    fn build(p: u32, k: u32) -> Result<FiniteField> {
        let q = (p as u64).pow(k);
        let mut pow_p = Vec::with_capacity(k as usize + 1);
        let mut acc = 1u64;
        for _ in 0..=k {
            pow_p.push(acc.min(u32::MAX as u64) as u32);
            acc = acc.saturating_mul(p as u64);
        }
        let modulus = if k == 1 { vec![0, 1] } else { lowest_irreducible(p, k)? };
        let order_factors = prime_factors(q - 1);
        let mut field = FiniteField {
            p,
            k,
            q,
            modulus,
            pow_p,
            generator: 1,
            order_factors,
            tables: None,
        };
        field.generator = field.find_generator();
        if q <= TABLE_CAP {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    fn find_generator(&self) -> Fe {
        if self.q == 2 {
            return 1;
        }
        let n = self.q - 1;
        for g in 2..self.q as Fe {
            if self.order_factors.iter().all(|&r| self.pow_slow(g, n / r) != 1) {
                return g;
            }
        }
        unreachable!("multiplicative group is cyclic")
    }

    fn build_tables(&self) -> Tables {
        let n = (self.q - 1) as usize;
        let mut exp = vec![0u32; 2 * n + 2];
        let mut log = vec![NO_LOG; self.q as usize];
        let mut x: Fe = 1;
        for i in 0..n {
            exp[i] = x;
            log[x as usize] = i as u32;
            x = self.mul_slow(x, self.generator);
        }
        for i in n..exp.len() {
            exp[i] = exp[i - n];
        }
        let mut zech = vec![NO_LOG; n.max(1)];
        for (i, z) in zech.iter_mut().enumerate().take(n) {
            let s = self.add_digits(exp[i], 1);
            *z = log[s as usize];
        }
        Tables { exp, log, zech }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn size(&self) -> u64 {
        self.q
    }

    /// Defining polynomial, coefficients from degree 0 up, monic.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The fixed primitive element used for logarithms.
    pub fn generator(&self) -> Fe {
        self.generator
    }

    pub fn has_tables(&self) -> bool {
        self.tables.is_some()
    }

    pub fn same_as(&self, other: &FiniteField) -> bool {
        self.p == other.p && self.k == other.k
    }

    #[inline]
    pub fn zero(&self) -> Fe {
        0
    }

    #[inline]
    pub fn one(&self) -> Fe {
        1
    }

    /// Reduction of an integer into the prime subfield.
    pub fn from_int(&self, n: i64) -> Fe {
        n.rem_euclid(self.p as i64) as Fe
    }

    /// Base-`p` digits of an element, lowest degree first, length `k`.
    pub fn digits(&self, a: Fe) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        let mut a = a;
        for _ in 0..self.k {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    /// Element from coefficient digits (each reduced mod `p`, degree `< k`).
    pub fn from_digits(&self, digits: &[u32]) -> Fe {
        let mut acc: u64 = 0;
        for (i, &d) in digits.iter().enumerate().take(self.k as usize) {
            acc += (d % self.p) as u64 * self.pow_p[i] as u64;
        }
        acc as Fe
    }

    fn add_digits(&self, mut a: Fe, mut b: Fe) -> Fe {
        let p = self.p;
        let mut out: u32 = 0;
        for i in 0..self.k as usize {
            let s = (a % p + b % p) % p;
            out += s * self.pow_p[i];
            a /= p;
            b /= p;
            if a == 0 && b == 0 {
                break;
            }
        }
        out
    }

    fn neg_digits(&self, mut a: Fe) -> Fe {
        let p = self.p;
        let mut out: u32 = 0;
        for i in 0..self.k as usize {
            let d = a % p;
            if d != 0 {
                out += (p - d) * self.pow_p[i];
            }
            a /= p;
            if a == 0 {
                break;
            }
        }
        out
    }

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        match &self.tables {
            Some(t) => {
                if a == 0 {
                    return b;
                }
                if b == 0 {
                    return a;
                }
                let n = (self.q - 1) as u32;
                let la = t.log[a as usize];
                let lb = t.log[b as usize];
                let diff = if lb >= la { lb - la } else { lb + n - la };
                let z = t.zech[diff as usize];
                if z == NO_LOG {
                    0
                } else {
                    t.exp[(la + z) as usize]
                }
            }
            None => self.add_digits(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        if a == 0 {
            return 0;
        }
        if self.k == 1 {
            return self.p - a;
        }
        if self.p == 2 {
            return a;
        }
        match &self.tables {
            Some(t) => {
                let n = (self.q - 1) as u32;
                t.exp[(t.log[a as usize] + n / 2) as usize]
            }
            None => self.neg_digits(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.k == 1 && self.q < (1 << 32) {
            return ((a as u64 * b as u64) % self.p as u64) as Fe;
        }
        match &self.tables {
            Some(t) => t.exp[(t.log[a as usize] + t.log[b as usize]) as usize],
            None => self.mul_slow(a, b),
        }
    }

    /// Multiplication by polynomial arithmetic, used to build tables.
    pub fn mul_slow(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        let p = self.p as u64;
        let k = self.k as usize;
        if k == 1 {
            return ((a as u64 * b as u64) % p) as Fe;
        }
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..k {
                let m = self.modulus[j] as u64;
                if m != 0 {
                    let idx = i - k + j;
                    prod[idx] = (prod[idx] + (p - c) * m) % p;
                }
            }
        }
        let digits: Vec<u32> = prod[..k].iter().map(|&x| x as u32).collect();
        self.from_digits(&digits)
    }

    fn pow_slow(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc: Fe = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            let n = self.q - 1;
            let l = (t.log[a as usize] as u64 * (e % n)) % n;
            return t.exp[l as usize];
        }
        let mut base = a;
        let mut acc: Fe = 1;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Square-and-multiply exponentiation that never consults the log table.
    pub fn pow_by_squaring(&self, a: Fe, mut e: u64) -> Fe {
        let mut base = a;
        let mut acc: Fe = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let n = (self.q - 1) as u32;
            let l = t.log[a as usize];
            return Ok(t.exp[((n - l) % n) as usize]);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Discrete logarithm to the base of [`Self::generator`].
    pub fn log(&self, a: Fe) -> Option<u64> {
        if a == 0 {
            return None;
        }
        match &self.tables {
            Some(t) => Some(t.log[a as usize] as u64),
            None => self.log_bsgs(a),
        }
    }

    fn log_bsgs(&self, a: Fe) -> Option<u64> {
        let n = self.q - 1;
        let m = (n as f64).sqrt().ceil() as u64 + 1;
        let mut baby = HashMap::with_capacity(m as usize);
        let mut x: Fe = 1;
        for j in 0..m {
            baby.entry(x).or_insert(j);
            x = self.mul(x, self.generator);
        }
        let factor = self.inv(self.pow(self.generator, m)).ok()?;
        let mut gamma = a;
        for i in 0..=m {
            if let Some(&j) = baby.get(&gamma) {
                return Some((i * m + j) % n);
            }
            gamma = self.mul(gamma, factor);
        }
        None
    }

    /// `g^e` for the fixed generator `g`.
    pub fn exp(&self, e: u64) -> Fe {
        let n = self.q - 1;
        match &self.tables {
            Some(t) => t.exp[(e % n) as usize],
            None => self.pow(self.generator, e % n),
        }
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fe) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut ord = self.q - 1;
        for &r in &self.order_factors {
            while ord % r == 0 && self.pow(a, ord / r) == 1 {
                ord /= r;
            }
        }
        Ok(ord)
    }

    pub fn is_square(&self, a: Fe) -> bool {
        if a == 0 || self.p == 2 {
            return true;
        }
        match &self.tables {
            Some(t) => t.log[a as usize] % 2 == 0,
            None => self.pow(a, (self.q - 1) / 2) == 1,
        }
    }

    /// Whether a nonzero `a` is an `e`-th power.
    pub fn is_power(&self, a: Fe, e: u64) -> bool {
        if a == 0 {
            return true;
        }
        let g = num_integer::gcd(e, self.q - 1);
        self.pow(a, (self.q - 1) / g) == 1
    }

    /// A square root when one exists.
    pub fn sqrt(&self, a: Fe) -> Option<Fe> {
        if a == 0 {
            return Some(0);
        }
        if self.p == 2 {
            return Some(self.pow(a, self.q / 2));
        }
        if let Some(t) = &self.tables {
            let l = t.log[a as usize];
            return if l % 2 == 0 { Some(t.exp[(l / 2) as usize]) } else { None };
        }
        if !self.is_square(a) {
            return None;
        }
        let mut s = 0u32;
        let mut m = self.q - 1;
        while m % 2 == 0 {
            m /= 2;
            s += 1;
        }
        let z = (2..self.q as Fe).find(|&z| !self.is_square(z))?;
        let mut c = self.pow(z, m);
        let mut x = self.pow(a, m.div_ceil(2));
        let mut t = self.pow(a, m);
        let mut s_cur = s;
        while t != 1 {
            let mut i = 0;
            let mut tt = t;
            while tt != 1 {
                tt = self.mul(tt, tt);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(s_cur - i - 1) {
                b = self.mul(b, b);
            }
            x = self.mul(x, b);
            c = self.mul(b, b);
            t = self.mul(t, c);
            s_cur = i;
        }
        Some(x)
    }

    /// `a^(p^j)`.
    pub fn frobenius(&self, a: Fe, j: u32) -> Fe {
        let e = (self.p as u64).pow(j % self.k);
        self.pow(a, e)
    }

    /// Least element (in encoding order) of exact multiplicative order `d`.
    pub fn least_root_of_unity(&self, d: u64) -> Result<Fe> {
        if (self.q - 1) % d != 0 {
            return Err(Error::SymbolUndefined(format!(
                "{d} does not divide {} - 1",
                self.q
            )));
        }
        for a in 1..self.q as Fe {
            if self.pow(a, d) == 1 && self.order(a)? == d {
                return Ok(a);
            }
        }
        unreachable!("cyclic group has elements of every order dividing q-1")
    }

    /// Iterator over all elements in encoding order.
    pub fn elements(&self) -> std::ops::Range<Fe> {
        0..self.q as Fe
    }

    pub fn elem(self: &Arc<Self>, value: Fe) -> FqElem {
        FqElem { field: self.clone(), value }
    }
}

/// Lowest lexicographic monic irreducible polynomial of degree `k` over `F_p`.
fn lowest_irreducible(p: u32, k: u32) -> Result<Vec<u32>> {
    let fp = FiniteField::new(p, 1)?;
    let total = (p as u64).pow(k);
    for enc in 0..total {
        let mut coeffs = Vec::with_capacity(k as usize + 1);
        let mut e = enc;
        for _ in 0..k {
            coeffs.push((e % p as u64) as u32);
            e /= p as u64;
        }
        if coeffs[0] == 0 {
            continue;
        }
        coeffs.push(1);
        let poly = crate::algebra::poly::FqPoly::new(fp.clone(), coeffs.clone());
        if poly.is_irreducible() {
            return Ok(coeffs);
        }
    }
    Err(Error::InternalInconsistency(format!("no irreducible of degree {k} over F_{p}")))
}

/// Checked field element carrying its field.
#[derive(Clone)]
pub struct FqElem {
    field: Arc<FiniteField>,
    value: Fe,
}

impl fmt::Debug for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@F{}", self.value, self.field.q)
    }
}

impl PartialEq for FqElem {
    fn eq(&self, other: &Self) -> bool {
        self.field.same_as(&other.field) && self.value == other.value
    }
}

impl Eq for FqElem {}

impl FqElem {
    pub fn new(field: &Arc<FiniteField>, value: Fe) -> Result<Self> {
        if value as u64 >= field.q {
            return Err(Error::InvalidInput(format!("{value} out of range for F_{}", field.q)));
        }
        Ok(FqElem { field: field.clone(), value })
    }

    pub fn value(&self) -> Fe {
        self.value
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    fn check(&self, other: &FqElem) -> Result<()> {
        if self.field.same_as(&other.field) {
            Ok(())
        } else {
            Err(Error::DomainMismatch(format!(
                "F_{} vs F_{}",
                self.field.q, other.field.q
            )))
        }
    }

    pub fn add(&self, other: &FqElem) -> Result<FqElem> {
        self.check(other)?;
        Ok(self.field.elem(self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &FqElem) -> Result<FqElem> {
        self.check(other)?;
        Ok(self.field.elem(self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &FqElem) -> Result<FqElem> {
        self.check(other)?;
        Ok(self.field.elem(self.field.mul(self.value, other.value)))
    }

    pub fn div(&self, other: &FqElem) -> Result<FqElem> {
        self.check(other)?;
        Ok(self.field.elem(self.field.div(self.value, other.value)?))
    }

    pub fn neg(&self) -> FqElem {
        self.field.elem(self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<FqElem> {
        Ok(self.field.elem(self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: u64) -> FqElem {
        self.field.elem(self.field.pow(self.value, e))
    }
}

/// A field embedding `F_{p^a} -> F_{p^b}` fixed by the least root of the
/// smaller modulus.
pub struct Embedding {
    from: Arc<FiniteField>,
    to: Arc<FiniteField>,
    image: Vec<Fe>,
    preimage: HashMap<Fe, Fe>,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Embedding(F_{} -> F_{})", self.from.q, self.to.q)
    }
}

static EMBEDDINGS: Lazy<Mutex<HashMap<(u32, u32, u32), Arc<Embedding>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

impl Embedding {
    /// The cached embedding between two fields of the same characteristic.
    pub fn new(from: &Arc<FiniteField>, to: &Arc<FiniteField>) -> Result<Arc<Embedding>> {
        if from.p != to.p || to.k % from.k != 0 {
            return Err(Error::DomainMismatch(format!(
                "no embedding F_{} -> F_{}",
                from.q, to.q
            )));
        }
        let key = (from.p, from.k, to.k);
        if let Some(e) = EMBEDDINGS.lock().get(&key) {
            return Ok(e.clone());
        }
        let root = if from.k == 1 || from.k == to.k {
            from.p
        } else {
            let poly = crate::algebra::poly::FqPoly::new(to.clone(), from.modulus.clone());
            let roots = poly.roots();
            *roots.iter().min().ok_or_else(|| {
                Error::InternalInconsistency("modulus has no root in extension".into())
            })?
        };
        let mut image = Vec::with_capacity(from.q as usize);
        let mut preimage = HashMap::with_capacity(from.q as usize);
        for a in 0..from.q as Fe {
            let v = if from.k == 1 || from.k == to.k {
                a
            } else {
                let digits = from.digits(a);
                let mut acc: Fe = 0;
                for &c in digits.iter().rev() {
                    acc = to.add(to.mul(acc, root), c);
                }
                acc
            };
            image.push(v);
            preimage.insert(v, a);
        }
        let emb = Arc::new(Embedding {
            from: from.clone(),
            to: to.clone(),
            image,
            preimage,
        });
        let mut cache = EMBEDDINGS.lock();
        Ok(cache.entry(key).or_insert(emb).clone())
    }

    pub fn from(&self) -> &Arc<FiniteField> {
        &self.from
    }

    pub fn to(&self) -> &Arc<FiniteField> {
        &self.to
    }

    #[inline]
    pub fn apply(&self, a: Fe) -> Fe {
        self.image[a as usize]
    }

    /// Inverse image of an element lying in the subfield.
    pub fn pull_back(&self, b: Fe) -> Option<Fe> {
        self.preimage.get(&b).copied()
    }
}
