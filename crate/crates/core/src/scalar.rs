//! Scalar backend: exact radical arithmetic plus floating-point fallbacks.
//!
//! The exact variant stores a finite sum `Σ c_d · sqrt(d)` where each `c_d`
//! is a big rational and each radicand `d` is a squarefree positive integer.
//! This ring is closed under `+`, `-`, `*` and (by repeated conjugation)
//! under division, so edge-multiplicity products, path weights and measure
//! masses stay exact end-to-end. Squaring a single-term radical always lands
//! back in the plain rationals.
//!
//! Mixed-backend arithmetic promotes `Exact -> F64 -> C64`.

use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{Complex, Integer, One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

pub type Rat = BigRational;
pub type C64 = Complex<f64>;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Parse "p/q", "p" (exact) or a decimal literal (float).
pub fn parse_param(s: &str) -> Result<Scalar, String> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|e| format!("bad rational {s:?}: {e}"))?;
        let q: BigInt = q.trim().parse().map_err(|e| format!("bad rational {s:?}: {e}"))?;
        if q.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Scalar::from_rat(Rat::new(p, q)));
    }
    if let Ok(p) = s.parse::<BigInt>() {
        return Ok(Scalar::from_rat(Rat::from(p)));
    }
    s.parse::<f64>()
        .map(Scalar::F64)
        .map_err(|e| format!("cannot parse parameter {s:?}: {e}"))
}

/// `n = s^2 * d` with `d` squarefree; returns `(s, d)`.
fn squarefree_decompose(n: &BigUint) -> (BigUint, BigUint) {
    let mut s = BigUint::one();
    let mut d = BigUint::one();
    for (p, e) in factorize(n.clone()) {
        if e % 2 == 1 {
            d *= &p;
        }
        if e >= 2 {
            s *= p.pow((e / 2) as u32);
        }
    }
    (s, d)
}

/// Full factorization: trial division by small primes, then Pollard rho.
fn factorize(mut n: BigUint) -> BTreeMap<BigUint, u64> {
    let mut out: BTreeMap<BigUint, u64> = BTreeMap::new();
    if n.is_zero() || n.is_one() {
        return out;
    }
    let mut p = BigUint::from(2u32);
    let limit = BigUint::from(100_000u32);
    while &p * &p <= n && p <= limit {
        while (&n % &p).is_zero() {
            *out.entry(p.clone()).or_insert(0) += 1;
            n /= &p;
        }
        p += if p == BigUint::from(2u32) { 1u32 } else { 2u32 };
    }
    if n.is_one() {
        return out;
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if is_probable_prime(&m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        if let Some(r) = perfect_sqrt(&m) {
            stack.push(r.clone());
            stack.push(r);
            continue;
        }
        let f = pollard_rho(&m);
        stack.push(&m / &f);
        stack.push(f);
    }
    out
}

fn perfect_sqrt(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    if &(&r * &r) == n {
        Some(r)
    } else {
        None
    }
}

fn is_probable_prime(n: &BigUint) -> bool {
    if *n < BigUint::from(2u32) {
        return false;
    }
    for sp in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let spb = BigUint::from(sp);
        if *n == spb {
            return true;
        }
        if (n % &spb).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    if (n % 2u32).is_zero() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        let mut x = BigUint::from(2u32);
        let mut y = BigUint::from(2u32);
        let mut d = BigUint::one();
        let f = |v: &BigUint| (v * v + &c) % n;
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break;
            }
            d = diff.gcd(n);
        }
        if d != one && &d != n {
            return d;
        }
        c += 1u32;
    }
}

/// Finite sum of `c * sqrt(d)` terms with squarefree integer radicands.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Radical {
    terms: BTreeMap<BigUint, Rat>,
}

impl Radical {
    pub fn zero() -> Self {
        Radical { terms: BTreeMap::new() }
    }

    pub fn from_rat(c: Rat) -> Self {
        let mut t = BTreeMap::new();
        if !c.is_zero() {
            t.insert(BigUint::one(), c);
        }
        Radical { terms: t }
    }

    /// `c * sqrt(d)` for a nonnegative rational radicand `d`, canonicalized.
    pub fn radical(c: Rat, d: Rat) -> Self {
        assert!(!d.is_negative(), "radicand must be nonnegative");
        if c.is_zero() || d.is_zero() {
            return Radical::zero();
        }
        // sqrt(p/q) = sqrt(p*q)/q
        let p = d.numer().magnitude().clone();
        let q = d.denom().magnitude().clone();
        let (s, df) = squarefree_decompose(&(&p * &q));
        let coeff = c * Rat::new(BigInt::from(s), BigInt::from(q));
        let mut t = BTreeMap::new();
        t.insert(df, coeff);
        Radical { terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Plain rational value, if the radical part is trivial.
    pub fn as_rat(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => {
                let (d, c) = self.terms.iter().next().unwrap();
                if d.is_one() {
                    Some(c.clone())
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    pub fn single_term(&self) -> Option<(Rat, BigUint)> {
        if self.terms.len() == 1 {
            let (d, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), d.clone()))
        } else if self.terms.is_empty() {
            Some((Rat::zero(), BigUint::one()))
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(d, c)| c.to_f64().unwrap_or(f64::NAN) * d.to_f64().unwrap_or(f64::NAN).sqrt())
            .sum()
    }

    fn insert(&mut self, d: BigUint, c: Rat) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(d) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn add_ref(&self, other: &Radical) -> Radical {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            out.insert(d.clone(), c.clone());
        }
        out
    }

    fn neg_ref(&self) -> Radical {
        Radical {
            terms: self.terms.iter().map(|(d, c)| (d.clone(), -c.clone())).collect(),
        }
    }

    fn mul_ref(&self, other: &Radical) -> Radical {
        let mut out = Radical::zero();
        for (d1, c1) in &self.terms {
            for (d2, c2) in &other.terms {
                // sqrt(d1)*sqrt(d2) = g*sqrt(a*b) with d1=g*a, d2=g*b; a,b,g
                // pairwise coprime when d1,d2 are squarefree.
                let g = d1.gcd(d2);
                let a = d1 / &g;
                let b = d2 / &g;
                let coeff = c1 * c2 * Rat::from(BigInt::from(g));
                out.insert(a * b, coeff);
            }
        }
        out
    }

    /// Exact division by repeated conjugation: strip one prime from the
    /// divisor's radicands per round until the divisor is rational.
    fn div_ref(&self, other: &Radical) -> Radical {
        assert!(!other.is_zero(), "division by zero scalar");
        let mut num = self.clone();
        let mut den = other.clone();
        loop {
            if let Some(r) = den.as_rat() {
                let inv = Radical::from_rat(r.recip());
                return num.mul_ref(&inv);
            }
            // pick a prime from some nontrivial radicand
            let d = den
                .terms
                .keys()
                .find(|d| !d.is_one())
                .expect("nontrivial radicand")
                .clone();
            let p = factorize(d).into_iter().next().expect("factor").0;
            // den = A + sqrt(p)*B with p-free radicands in A and B
            let mut a = Radical::zero();
            let mut b = Radical::zero();
            for (d, c) in &den.terms {
                if (d % &p).is_zero() {
                    b.insert(d / &p, c.clone());
                } else {
                    a.insert(d.clone(), c.clone());
                }
            }
            // conjugate: A - sqrt(p) B
            let sp = Radical::radical(Rat::one(), Rat::from(BigInt::from(p)));
            let conj = a.add_ref(&sp.mul_ref(&b).neg_ref());
            num = num.mul_ref(&conj);
            den = den.mul_ref(&conj);
        }
    }
}

/// A number in one of the three backends.
#[derive(Clone, PartialEq, Debug)]
pub enum Scalar {
    Exact(Radical),
    F64(f64),
    C64(C64),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(Radical::zero())
    }
    pub fn one() -> Self {
        Scalar::from_int(1)
    }
    pub fn from_int(n: i64) -> Self {
        Scalar::Exact(Radical::from_rat(int(n)))
    }
    pub fn from_rat(r: Rat) -> Self {
        Scalar::Exact(Radical::from_rat(r))
    }
    pub fn ratio(num: i64, den: i64) -> Self {
        Scalar::from_rat(rat(num, den))
    }
    /// `c * sqrt(d)` exact.
    pub fn radical(c: Rat, d: Rat) -> Self {
        Scalar::Exact(Radical::radical(c, d))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::F64(x) => *x == 0.0,
            Scalar::C64(z) => z.is_zero(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rat(&self) -> Option<Rat> {
        match self {
            Scalar::Exact(r) => r.as_rat(),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::F64(x) => *x,
            Scalar::C64(z) => {
                debug_assert!(z.im.abs() < 1e-9 * (1.0 + z.re.abs()), "complex scalar in real context");
                z.re
            }
        }
    }

    pub fn to_c64(&self) -> C64 {
        match self {
            Scalar::Exact(r) => C64::new(r.to_f64(), 0.0),
            Scalar::F64(x) => C64::new(*x, 0.0),
            Scalar::C64(z) => *z,
        }
    }

    /// Square root. Exact when the value is a nonnegative rational; exact
    /// branches into complex floats for negative rationals; otherwise f64.
    pub fn sqrt(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                if let Some(q) = r.as_rat() {
                    if q.is_negative() {
                        Scalar::C64(C64::new(0.0, (-q.to_f64().unwrap()).sqrt()))
                    } else {
                        Scalar::Exact(Radical::radical(Rat::one(), q))
                    }
                } else {
                    let x = r.to_f64();
                    if x < 0.0 {
                        Scalar::C64(C64::new(0.0, (-x).sqrt()))
                    } else {
                        Scalar::F64(x.sqrt())
                    }
                }
            }
            Scalar::F64(x) => {
                if *x < 0.0 {
                    Scalar::C64(C64::new(0.0, (-x).sqrt()))
                } else {
                    Scalar::F64(x.sqrt())
                }
            }
            Scalar::C64(z) => Scalar::C64(z.sqrt()),
        }
    }

    pub fn pow_i(&self, e: i32) -> Scalar {
        if e == 0 {
            return Scalar::one();
        }
        let base = if e < 0 { Scalar::one() / self.clone() } else { self.clone() };
        let mut out = Scalar::one();
        for _ in 0..e.unsigned_abs() {
            out = out * base.clone();
        }
        out
    }

    /// `self^e` for rational exponents; exact only when `e` is an integer.
    pub fn pow_rat(&self, e: &Rat) -> Scalar {
        if e.is_integer() {
            if let Some(i) = e.to_integer().to_i32() {
                return self.pow_i(i);
            }
        }
        let ef = e.to_f64().unwrap();
        match self {
            Scalar::C64(z) => Scalar::C64(z.powf(ef)),
            other => {
                let x = other.to_f64();
                if x < 0.0 {
                    Scalar::C64(C64::new(x, 0.0).powf(ef))
                } else {
                    Scalar::F64(x.powf(ef))
                }
            }
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                if r.to_f64() < 0.0 {
                    Scalar::Exact(r.neg_ref())
                } else {
                    self.clone()
                }
            }
            Scalar::F64(x) => Scalar::F64(x.abs()),
            Scalar::C64(z) => Scalar::F64(z.norm()),
        }
    }

    /// Equality as numbers: exact when both exact, else within `tol`.
    pub fn approx_eq(&self, other: &Scalar, tol: f64) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            _ => {
                let d = (self.to_c64() - other.to_c64()).norm();
                let scale = 1.0_f64.max(self.to_c64().norm()).max(other.to_c64().norm());
                d <= tol * scale
            }
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident, $rad_op:ident, $f64_op:tt) => {
        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                match (self, rhs) {
                    (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.$rad_op(&b)),
                    (Scalar::C64(a), b) => Scalar::C64(a $f64_op b.to_c64()),
                    (a, Scalar::C64(b)) => Scalar::C64(a.to_c64() $f64_op b),
                    (a, b) => Scalar::F64(a.to_f64() $f64_op b.to_f64()),
                }
            }
        }
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.clone().$method(rhs.clone())
            }
        }
    };
}

scalar_binop!(Add, add, add_ref, +);
scalar_binop!(Mul, mul, mul_ref, *);
scalar_binop!(Div, div, div_ref, /);

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self + (-rhs)
    }
}
impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.clone() - rhs.clone()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.neg_ref()),
            Scalar::F64(x) => Scalar::F64(-x),
            Scalar::C64(z) => Scalar::C64(-z),
        }
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |a, b| a * b)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => {
                if r.is_zero() {
                    return write!(f, "0");
                }
                let mut first = true;
                for (d, c) in &r.terms {
                    let neg = c.is_negative();
                    let mag = if neg { -c.clone() } else { c.clone() };
                    if first {
                        if neg {
                            write!(f, "-")?;
                        }
                        first = false;
                    } else if neg {
                        write!(f, " - ")?;
                    } else {
                        write!(f, " + ")?;
                    }
                    if d.is_one() {
                        write!(f, "{}", mag)?;
                    } else if mag.is_one() {
                        write!(f, "sqrt({})", d)?;
                    } else {
                        write!(f, "{}*sqrt({})", mag, d)?;
                    }
                }
                Ok(())
            }
            Scalar::F64(x) => write!(f, "{}", x),
            Scalar::C64(z) => write!(f, "{}+{}i", z.re, z.im),
        }
    }
}

/// Pochhammer symbol `(a)_k = a(a+1)...(a+k-1)`, exact by product.
pub fn pochhammer(a: &Scalar, k: u32) -> Scalar {
    let mut out = Scalar::one();
    for i in 0..k {
        out = out * (a.clone() + Scalar::from_int(i as i64));
    }
    out
}

/// Falling factorial power `a^{(k)} = a(a-1)...(a-k+1)`.
pub fn falling(a: &Scalar, k: u32) -> Scalar {
    let mut out = Scalar::one();
    for i in 0..k {
        out = out * (a.clone() - Scalar::from_int(i as i64));
    }
    out
}

pub fn factorial(n: u32) -> Scalar {
    let mut out = Rat::one();
    for i in 2..=n as i64 {
        out *= int(i);
    }
    Scalar::from_rat(out)
}

pub fn binomial(n: u32, k: u32) -> Scalar {
    if k > n {
        return Scalar::zero();
    }
    falling(&Scalar::from_int(n as i64), k) / factorial(k)
}
