//! Exact scalars, square-root witnesses and the q-special functions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use serde::Deserialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("vanishing factor in a q-shifted factorial: {0}")]
    Degenerate(String),
    #[error("parameter has no square-root witness")]
    MissingWitness,
    #[error("series does not terminate at the supplied depth")]
    NonTerminating,
    #[error("cannot parse rational '{0}'")]
    Parse(String),
    #[error("resampling budget exhausted")]
    Exhausted,
}

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn inv(x: &Scalar) -> Result<Scalar, NumError> {
    if x.is_zero() {
        return Err(NumError::DivisionByZero);
    }
    Ok(x.recip())
}

pub fn div(x: &Scalar, y: &Scalar) -> Result<Scalar, NumError> {
    if y.is_zero() {
        return Err(NumError::DivisionByZero);
    }
    Ok(x / y)
}

/// Integer power with negative exponents allowed for nonzero bases.
pub fn powi(x: &Scalar, e: i64) -> Result<Scalar, NumError> {
    if e == 0 {
        return Ok(Scalar::one());
    }
    let base = if e < 0 { inv(x)? } else { x.clone() };
    Ok(num_traits::pow::pow(base, e.unsigned_abs() as usize))
}

/// Like [`powi`] for bases already known to be nonzero.
pub fn pw(x: &Scalar, e: i64) -> Scalar {
    powi(x, e).expect("nonzero base")
}

/// (-1)^e
pub fn sign_pow(e: i64) -> Scalar {
    if e.rem_euclid(2) == 0 {
        Scalar::one()
    } else {
        -Scalar::one()
    }
}

/// Formats as "num/den", or "num" when the denominator is one.
pub fn fmt_scalar(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_scalar(s: &str) -> Result<Scalar, NumError> {
    let t = s.trim();
    let err = || NumError::Parse(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Scalar::new(n, d))
        }
        None => Ok(Scalar::from_integer(BigInt::from_str(t).map_err(|_| err())?)),
    }
}

pub mod serde_scalar {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_scalar(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

/// A fundamental parameter with an optional rational square root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub value: Scalar,
    pub root: Option<Scalar>,
}

impl Param {
    pub fn square(root: Scalar) -> Self {
        Param { value: &root * &root, root: Some(root) }
    }

    pub fn plain(value: Scalar) -> Self {
        Param { value, root: None }
    }

    /// Attaches the positive root when `value` is the square of a rational.
    pub fn from_value(value: Scalar) -> Self {
        let root = rational_sqrt(&value);
        Param { value, root }
    }

    pub fn mul(&self, other: &Param) -> Param {
        Param {
            value: &self.value * &other.value,
            root: match (&self.root, &other.root) {
                (Some(a), Some(b)) => Some(a * b),
                _ => None,
            },
        }
    }

    pub fn recip(&self) -> Param {
        Param { value: self.value.recip(), root: self.root.as_ref().map(|r| r.recip()) }
    }

    pub fn div(&self, other: &Param) -> Param {
        self.mul(&other.recip())
    }

    pub fn neg(&self) -> Param {
        Param::plain(-&self.value)
    }

    /// p^n for integer n; the witness follows along.
    pub fn pow(&self, n: i64) -> Param {
        Param { value: pw(&self.value, n), root: self.root.as_ref().map(|r| pw(r, n)) }
    }
}

/// Positive rational square root, if one exists.
pub fn rational_sqrt(x: &Scalar) -> Option<Scalar> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer(), x.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    (&rn * &rn == *n && &rd * &rd == *d).then(|| Scalar::new(rn, rd))
}

/// p^(e/2) for a half-integer exponent given as `twice_e`.
pub fn qpow_half(p: &Param, twice_e: i64) -> Result<Scalar, NumError> {
    if twice_e.rem_euclid(2) == 0 {
        return powi(&p.value, twice_e / 2);
    }
    match &p.root {
        Some(r) => powi(r, twice_e),
        None => Err(NumError::MissingWitness),
    }
}

fn pochhammer_product(z: &Scalar, b: &Scalar, lo: i64, hi: i64) -> Scalar {
    // prod_{s=lo}^{hi-1} (1 - z b^s)
    let mut p = Scalar::one();
    if lo >= hi {
        return p;
    }
    let mut bs = pw(b, lo);
    for _ in lo..hi {
        p *= Scalar::one() - z * &bs;
        bs *= b;
    }
    p
}

/// (z;b)_m for every integer m, with (z;b)_m = 1/(z b^m; b)_{-m} for m < 0.
pub fn qpochhammer(z: &Scalar, b: &Scalar, m: i64) -> Result<Scalar, NumError> {
    if m >= 0 {
        return Ok(pochhammer_product(z, b, 0, m));
    }
    let p = pochhammer_product(z, b, m, 0);
    if p.is_zero() {
        return Err(NumError::Degenerate(format!("({};{})_{}", fmt_scalar(z), fmt_scalar(b), m)));
    }
    Ok(p.recip())
}

/// 1/(z;b)_m. For m < 0 this is a finite product and may vanish.
pub fn qpochhammer_inv(z: &Scalar, b: &Scalar, m: i64) -> Result<Scalar, NumError> {
    if m < 0 {
        return Ok(pochhammer_product(z, b, m, 0));
    }
    let p = pochhammer_product(z, b, 0, m);
    if p.is_zero() {
        return Err(NumError::Degenerate(format!("1/({};{})_{}", fmt_scalar(z), fmt_scalar(b), m)));
    }
    Ok(p.recip())
}

/// Gaussian binomial in base b; zero outside 0 <= m <= n.
pub fn qbinomial(n: i64, m: i64, b: &Scalar) -> Result<Scalar, NumError> {
    if m < 0 || m > n {
        return Ok(Scalar::zero());
    }
    let num = qpochhammer(b, b, n)?;
    let den = qpochhammer(b, b, m)? * qpochhammer(b, b, n - m)?;
    div(&num, &den)
}

/// Terminating 2phi1(alpha, beta; gamma; b, z). The caller asserts that
/// alpha or beta equals b^(-depth).
pub fn phi21_terminating(
    alpha: &Scalar,
    beta: &Scalar,
    gamma: &Scalar,
    b: &Scalar,
    z: &Scalar,
    depth: i64,
) -> Result<Scalar, NumError> {
    if depth < 0 {
        return Err(NumError::NonTerminating);
    }
    let t = pw(b, -depth);
    if alpha != &t && beta != &t {
        return Err(NumError::NonTerminating);
    }
    let mut sum = Scalar::zero();
    let mut term = Scalar::one();
    for n in 0..=depth {
        sum += &term;
        // ratio term_{n+1}/term_n
        let bn = pw(b, n);
        let den = (Scalar::one() - gamma * &bn) * (Scalar::one() - &bn * b);
        let num = (Scalar::one() - alpha * &bn) * (Scalar::one() - beta * &bn) * z;
        if num.is_zero() {
            break;
        }
        if den.is_zero() {
            return Err(NumError::Degenerate("2phi1 denominator".into()));
        }
        term = term * num / den;
    }
    Ok(sum)
}

/// Phi~_m(z) in base b = q^2: (z;q^2)_{m/2} for even m and (zq;q^2)_{(m-1)/2} for odd m.
pub fn phi_tilde(m: i64, z: &Scalar, q: &Scalar) -> Result<Scalar, NumError> {
    let b = q * q;
    if m.rem_euclid(2) == 0 {
        qpochhammer(z, &b, m.div_euclid(2))
    } else {
        qpochhammer(&(z * q), &b, (m - 1).div_euclid(2))
    }
}

/// Deterministic rational sampler.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    pub max: i64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), max: 9 }
    }

    /// A rational n/d with |n| <= max, 1 <= d <= max, avoiding 0 and +-1.
    pub fn root(&mut self) -> Scalar {
        loop {
            let n = self.rng.gen_range(-self.max..=self.max);
            let d = self.rng.gen_range(1..=self.max);
            let x = rat(n, d);
            if !x.is_zero() && x.abs() != Scalar::one() {
                return x;
            }
        }
    }

    pub fn param(&mut self) -> Param {
        Param::square(self.root())
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn unit(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    pub fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.rng.gen_range(0..xs.len())]
    }
}

/// The (r, s, t, w) bundle of a Z- or X-line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quartet {
    pub r: Param,
    pub s: Param,
    pub t: Param,
    pub w: Param,
}

impl Quartet {
    pub fn sample(s: &mut Sampler) -> Self {
        Quartet { r: s.param(), s: s.param(), t: s.param(), w: s.param() }
    }

    /// The bundle (1, 1, mu^-1, mu^2) that turns L^X into L^O.
    pub fn from_mu(mu: &Param) -> Self {
        Quartet {
            r: Param::square(Scalar::one()),
            s: Param::square(Scalar::one()),
            t: mu.recip(),
            w: mu.pow(2),
        }
    }

    /// r <-> s, t -> tw, w -> 1/w.
    pub fn inverted(&self) -> Self {
        Quartet { r: self.s.clone(), s: self.r.clone(), t: self.t.mul(&self.w), w: self.w.recip() }
    }
}

impl fmt::Display for Quartet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(r={}, s={}, t={}, w={})",
            fmt_scalar(&self.r.value),
            fmt_scalar(&self.s.value),
            fmt_scalar(&self.t.value),
            fmt_scalar(&self.w.value)
        )
    }
}

/// Parameters attached to one tensor line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LineParams {
    Quartet(Quartet),
    Mu(Param),
}

impl LineParams {
    pub fn quartet(&self) -> Option<&Quartet> {
        match self {
            LineParams::Quartet(q) => Some(q),
            LineParams::Mu(_) => None,
        }
    }

    pub fn mu(&self) -> Option<&Param> {
        match self {
            LineParams::Mu(m) => Some(m),
            LineParams::Quartet(_) => None,
        }
    }
}

/// The deformation parameter together with the line parameters of a relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterPoint {
    pub q: Param,
    pub lines: Vec<LineParams>,
}

/// A required relation mu_a = sign * q^d * mu_b among O-lines (indices are 0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MuConstraint {
    pub a: usize,
    pub b: usize,
    pub d: i64,
    pub negative: bool,
}

/// Line kinds used when sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Quartet,
    Mu,
}

/// Samples q and the line parameters, then imposes the mu constraints by
/// derivation. Constraints must form a forest (each derived line appears once as `a`).
pub fn sample_parameter_point(
    seed: u64,
    kinds: &[LineKind],
    constraints: &[MuConstraint],
) -> Result<ParameterPoint, NumError> {
    let mut s = Sampler::new(seed);
    let q = s.param();
    let mut lines: Vec<LineParams> = kinds
        .iter()
        .map(|k| match k {
            LineKind::Quartet => LineParams::Quartet(Quartet::sample(&mut s)),
            LineKind::Mu => LineParams::Mu(s.param()),
        })
        .collect();
    for c in constraints {
        let base = lines[c.b].mu().ok_or(NumError::MissingWitness)?.clone();
        let mut derived = base.mul(&q.pow(c.d));
        if c.negative {
            derived = derived.neg();
        }
        lines[c.a] = LineParams::Mu(derived);
    }
    Ok(ParameterPoint { q, lines })
}

/// Returns d with x = q^d, if one exists. Requires |q| != 1.
pub fn log_q(x: &Scalar, q: &Scalar) -> Option<i64> {
    let one = Scalar::one();
    let (xa, qa) = (x.abs(), q.abs());
    if x.is_zero() || qa == one {
        return None;
    }
    if xa == one {
        return if x.is_one() { Some(0) } else { None };
    }
    // the sign of d is fixed by which side of 1 |x| lies on
    let positive = (xa > one) == (qa > one);
    let step = if positive { q.clone() } else { q.recip() };
    let mut cur = one.clone();
    let mut d = 0i64;
    loop {
        cur *= &step;
        d += 1;
        let ca = cur.abs();
        if ca == xa {
            return if &cur == x { Some(if positive { d } else { -d }) } else { None };
        }
        if (xa > one && ca > xa) || (xa < one && ca < xa) {
            return None;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_examples() {
        let z = rat(2, 3);
        let b = rat(5, 7);
        assert_eq!(qpochhammer(&z, &b, 0).unwrap(), int(1));
        assert_eq!(qpochhammer(&z, &b, 2).unwrap(), (int(1) - &z) * (int(1) - &z * &b));
        assert_eq!(qpochhammer(&z, &b, -1).unwrap(), (int(1) - &z / &b).recip());
        assert_eq!(qpochhammer_inv(&int(1), &b, -2).unwrap(), (int(1) - b.recip().pow(2)) * (int(1) - b.recip()));
        assert!(qpochhammer(&b, &b, -1).is_err());
    }

    #[test]
    fn qbinomial_examples() {
        let b = rat(3, 4);
        assert_eq!(qbinomial(2, 1, &b).unwrap(), int(1) + &b);
        assert_eq!(qbinomial(3, 5, &b).unwrap(), int(0));
        assert_eq!(qbinomial(7, 0, &b).unwrap(), int(1));
    }

    #[test]
    fn phi21_examples() {
        let b = rat(2, 5);
        let (be, ga, z) = (rat(3, 7), rat(-4, 3), rat(5, 2));
        assert_eq!(phi21_terminating(&int(1), &be, &ga, &b, &z, 0).unwrap(), int(1));
        let a = b.recip();
        let two = int(1) + (int(1) - &a) * (int(1) - &be) * &z / ((int(1) - &ga) * (int(1) - &b));
        assert_eq!(phi21_terminating(&a, &be, &ga, &b, &z, 1).unwrap(), two);
        assert!(phi21_terminating(&rat(1, 3), &be, &ga, &b, &z, 2).is_err());
    }

    #[test]
    fn phi_tilde_examples() {
        let q = rat(3, 2);
        let z = rat(-2, 7);
        assert_eq!(phi_tilde(0, &z, &q).unwrap(), int(1));
        assert_eq!(phi_tilde(1, &z, &q).unwrap(), int(1));
        assert_eq!(phi_tilde(2, &z, &q).unwrap(), int(1) - &z);
        assert_eq!(phi_tilde(-2, &z, &q).unwrap(), (int(1) - &z / (&q * &q)).recip());
    }

    #[test]
    fn half_powers() {
        let p = Param::square(rat(2, 3));
        assert_eq!(qpow_half(&p, 1).unwrap(), rat(2, 3));
        assert_eq!(qpow_half(&p, 0).unwrap(), int(1));
        assert_eq!(qpow_half(&p, -3).unwrap(), rat(27, 8));
        assert_eq!(qpow_half(&Param::plain(int(5)), 1), Err(NumError::MissingWitness));
    }

    #[test]
    fn sampling_is_deterministic_and_constrained() {
        let kinds = [LineKind::Mu, LineKind::Mu, LineKind::Quartet];
        let c = [MuConstraint { a: 0, b: 1, d: 2, negative: false }];
        let p1 = sample_parameter_point(1, &kinds, &c).unwrap();
        let p2 = sample_parameter_point(1, &kinds, &c).unwrap();
        assert_eq!(p1, p2);
        let q = &p1.q.value;
        assert!(!q.is_zero() && q.abs() != int(1));
        assert_eq!(p1.q.root.as_ref().unwrap().pow(2), *q);
        let m1 = &p1.lines[0].mu().unwrap().value;
        let m2 = &p1.lines[1].mu().unwrap().value;
        assert_eq!(*m1, m2 * q * q);
    }

    #[test]
    fn log_q_finds_integer_exponents() {
        let q = rat(4, 9);
        for d in -6..=6 {
            assert_eq!(log_q(&pw(&q, d), &q), Some(d));
        }
        assert_eq!(log_q(&rat(5, 3), &q), None);
        assert_eq!(log_q(&-pw(&q, 2), &q), None);
    }

    #[test]
    fn scalar_text_roundtrip() {
        for s in ["3/4", "-7", "0", "-12/5"] {
            assert_eq!(fmt_scalar(&parse_scalar(s).unwrap()), s);
        }
        assert!(parse_scalar("1/0").is_err());
        assert!(parse_scalar("x").is_err());
    }
}
