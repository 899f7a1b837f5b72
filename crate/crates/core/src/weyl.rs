//! The q-Weyl algebra in Z-left normal form, the q-oscillator embedding and
//! the banded representations on F and F+.

use crate::exactnum::{fmt_scalar, pw, Scalar};
use crate::report::Report;
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Exponent pair (alpha, beta) of Z^alpha X^beta.
pub type Mono = (i64, i64);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error("oscillator action produced a negative index {0} with nonzero coefficient")]
    NegativeIndex(i64),
    #[error("vector on F+ has negative support")]
    NegativeSupport,
}

/// Finite sum of c Z^alpha X^beta.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeylElement {
    terms: BTreeMap<Mono, Scalar>,
}

impl WeylElement {
    pub fn zero() -> Self {
        WeylElement::default()
    }

    pub fn one() -> Self {
        WeylElement::scalar(Scalar::one())
    }

    pub fn scalar(c: Scalar) -> Self {
        WeylElement::mono(c, 0, 0)
    }

    pub fn mono(c: Scalar, alpha: i64, beta: i64) -> Self {
        let mut e = WeylElement::zero();
        e.add_term((alpha, beta), c);
        e
    }

    pub fn z() -> Self {
        WeylElement::mono(Scalar::one(), 1, 0)
    }

    pub fn x() -> Self {
        WeylElement::mono(Scalar::one(), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (Mono, Scalar)>>(it: I) -> Self {
        let mut e = WeylElement::zero();
        for (m, c) in it {
            e.add_term(m, c);
        }
        e
    }

    pub fn add_term(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &WeylElement) -> WeylElement {
        let mut e = self.clone();
        for (m, c) in &other.terms {
            e.add_term(*m, c.clone());
        }
        e
    }

    pub fn sub(&self, other: &WeylElement) -> WeylElement {
        self.add(&other.scale(&-Scalar::one()))
    }

    pub fn scale(&self, c: &Scalar) -> WeylElement {
        WeylElement::from_terms(self.terms.iter().map(|(m, x)| (*m, x * c)))
    }

    /// Normal-ordered product using X^b Z^a = q^(ab) Z^a X^b.
    pub fn mul(&self, other: &WeylElement, q: &Scalar) -> WeylElement {
        let mut e = WeylElement::zero();
        for (&(a1, b1), c1) in &self.terms {
            for (&(a2, b2), c2) in &other.terms {
                e.add_term((a1 + a2, b1 + b2), c1 * c2 * pw(q, a2 * b1));
            }
        }
        e
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(a, b), c)| {
                let mut s = format!("({})", fmt_scalar(c));
                if a != 0 {
                    s.push_str(&format!("Z^{}", a));
                }
                if b != 0 {
                    s.push_str(&format!("X^{}", b));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Generators of the q-oscillator algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oscillator {
    K,
    Create,
    Annihilate,
}

/// k -> X, a+ -> Z, a- -> Z^-1 (1 - X^2).
pub fn embed_oscillator(g: Oscillator) -> WeylElement {
    match g {
        Oscillator::K => WeylElement::x(),
        Oscillator::Create => WeylElement::z(),
        Oscillator::Annihilate => WeylElement::from_terms([((-1, 0), Scalar::one()), ((-1, 2), -Scalar::one())]),
    }
}

/// Representation kinds. `ZMinus` is the reflected variant of `ZPlus`;
/// `O` is the X-representation restricted to nonnegative indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepTag {
    ZPlus,
    ZMinus,
    X,
    O,
}

impl RepTag {
    pub fn admits(self, m: i64) -> bool {
        self != RepTag::O || m >= 0
    }
}

/// Z^a X^b |m> = coeff |m'>; returns (m', coeff).
pub fn act_mono(tag: RepTag, q: &Scalar, (a, b): Mono, m: i64) -> (i64, Scalar) {
    match tag {
        RepTag::ZPlus => (m - b, pw(q, a * (m - b))),
        RepTag::ZMinus => (m + b, pw(q, -a * (m + b))),
        RepTag::X | RepTag::O => (m + a, pw(q, b * m)),
    }
}

/// <o| Z^a X^b |m> = coeff for the unique m; returns (m, coeff).
pub fn transpose_mono(tag: RepTag, q: &Scalar, mono: Mono, o: i64) -> (i64, Scalar) {
    let m = match tag {
        RepTag::ZPlus => o + mono.1,
        RepTag::ZMinus => o - mono.1,
        RepTag::X | RepTag::O => o - mono.0,
    };
    let (o2, c) = act_mono(tag, q, mono, m);
    debug_assert_eq!(o2, o);
    (m, c)
}

/// Finite vector in F or F+.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StateVector {
    pub coeffs: BTreeMap<i64, Scalar>,
}

impl StateVector {
    pub fn basis(m: i64) -> Self {
        let mut v = StateVector::default();
        v.coeffs.insert(m, Scalar::one());
        v
    }

    pub fn add_term(&mut self, m: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(m).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    pub fn add(&self, other: &StateVector) -> StateVector {
        let mut v = self.clone();
        for (m, c) in &other.coeffs {
            v.add_term(*m, c.clone());
        }
        v
    }

    pub fn scale(&self, c: &Scalar) -> StateVector {
        let mut v = StateVector::default();
        for (m, x) in &self.coeffs {
            v.add_term(*m, x * c);
        }
        v
    }
}

pub fn apply_rep(tag: RepTag, q: &Scalar, e: &WeylElement, v: &StateVector) -> Result<StateVector, RepError> {
    if v.coeffs.keys().any(|&m| !tag.admits(m)) {
        return Err(RepError::NegativeSupport);
    }
    let mut out = StateVector::default();
    for (m, c) in &v.coeffs {
        for (mono, x) in e.terms() {
            let (m2, y) = act_mono(tag, q, *mono, *m);
            out.add_term(m2, c * x * y);
        }
    }
    if let Some((&m, _)) = out.coeffs.iter().find(|(m, _)| !tag.admits(**m)) {
        return Err(RepError::NegativeIndex(m));
    }
    Ok(out)
}

/// Checks XZ = qZX (Z and X tags) or the oscillator relations (O tag) on
/// every basis vector of the window.
pub fn check_algebra_relations(tag: RepTag, q: &Scalar, window: (i64, i64)) -> Report {
    check_algebra_relations_with(tag, q, window, act_mono)
}

/// Same as [`check_algebra_relations`] with a replaceable monomial action,
/// used to confirm that a corrupted action is caught.
pub fn check_algebra_relations_with(
    tag: RepTag,
    q: &Scalar,
    window: (i64, i64),
    act: fn(RepTag, &Scalar, Mono, i64) -> (i64, Scalar),
) -> Report {
    let mut rep = Report::new("algebra-relations", &format!("{:?}", tag));
    let apply = |e: &WeylElement, v: &StateVector| -> StateVector {
        let mut out = StateVector::default();
        for (m, c) in &v.coeffs {
            for (mono, x) in e.terms() {
                let (m2, y) = act(tag, q, *mono, *m);
                out.add_term(m2, c * x * y);
            }
        }
        out
    };
    // (name, left factors, right side as an element)
    let one = WeylElement::one();
    let rels: Vec<(&str, Vec<WeylElement>, Vec<(Scalar, Vec<WeylElement>)>)> = if tag == RepTag::O {
        let k = embed_oscillator(Oscillator::K);
        let ap = embed_oscillator(Oscillator::Create);
        let am = embed_oscillator(Oscillator::Annihilate);
        let k2 = k.mul(&k, q);
        vec![
            ("k a+ = q a+ k", vec![k.clone(), ap.clone()], vec![(q.clone(), vec![ap.clone(), k.clone()])]),
            ("k a- = q^-1 a- k", vec![k.clone(), am.clone()], vec![(q.recip(), vec![am.clone(), k.clone()])]),
            (
                "a- a+ = 1 - q^2 k^2",
                vec![am.clone(), ap.clone()],
                vec![(Scalar::one(), vec![one.clone()]), (-(q * q), vec![k2.clone()])],
            ),
            (
                "a+ a- = 1 - k^2",
                vec![ap.clone(), am.clone()],
                vec![(Scalar::one(), vec![one.clone()]), (-Scalar::one(), vec![k2.clone()])],
            ),
        ]
    } else {
        let (x, z) = (WeylElement::x(), WeylElement::z());
        vec![("XZ = qZX", vec![x.clone(), z.clone()], vec![(q.clone(), vec![z.clone(), x.clone()])])]
    };
    for m in window.0..=window.1 {
        if !tag.admits(m) {
            continue;
        }
        let v = StateVector::basis(m);
        for (name, lhs, rhs) in &rels {
            let mut l = v.clone();
            for f in lhs.iter().rev() {
                l = apply(f, &l);
            }
            let mut r = StateVector::default();
            for (c, fs) in rhs {
                let mut t = v.clone();
                for f in fs.iter().rev() {
                    t = apply(f, &t);
                }
                r = r.add(&t.scale(c));
            }
            rep.count_check();
            if l != r {
                rep.fail(format!("{} on |{}>", name, m), format!("{:?}", l.coeffs), format!("{:?}", r.coeffs));
            }
        }
    }
    rep
}

/// Element of W^(x3): finite sum of c (Z^a1 X^b1) (x) (Z^a2 X^b2) (x) (Z^a3 X^b3).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TensorElement {
    terms: BTreeMap<[Mono; 3], Scalar>,
}

impl TensorElement {
    pub fn zero() -> Self {
        TensorElement::default()
    }

    pub fn add_term(&mut self, m: [Mono; 3], c: Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> &BTreeMap<[Mono; 3], Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn tensor(a: &WeylElement, b: &WeylElement, c: &WeylElement) -> Self {
        let mut t = TensorElement::zero();
        for (m1, c1) in a.terms() {
            for (m2, c2) in b.terms() {
                for (m3, c3) in c.terms() {
                    t.add_term([*m1, *m2, *m3], c1 * c2 * c3);
                }
            }
        }
        t
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut t = self.clone();
        for (m, c) in &other.terms {
            t.add_term(*m, c.clone());
        }
        t
    }

    pub fn scale(&self, c: &Scalar) -> TensorElement {
        let mut t = TensorElement::zero();
        for (m, x) in &self.terms {
            t.add_term(*m, x * c);
        }
        t
    }

    /// Reverses the tensor slots.
    pub fn flipped(&self) -> TensorElement {
        let mut t = TensorElement::zero();
        for (m, c) in &self.terms {
            t.add_term([m[2], m[1], m[0]], c.clone());
        }
        t
    }

    /// The scalar k with self = k * other, if one exists and other is nonzero.
    pub fn ratio_to(&self, other: &TensorElement) -> Option<Scalar> {
        if other.is_zero() || self.terms.len() != other.terms.len() {
            return None;
        }
        let mut k: Option<Scalar> = None;
        for (m, c) in &self.terms {
            let d = other.terms.get(m)?;
            let r = c / d;
            match &k {
                None => k = Some(r),
                Some(k0) if *k0 != r => return None,
                _ => {}
            }
        }
        k
    }

    /// Forward action on |in> with per-slot tags; zero results pruned.
    /// Errors when an O-slot index turns negative with nonzero coefficient.
    pub fn forward(&self, tags: [RepTag; 3], q: &Scalar, inn: [i64; 3]) -> Result<Vec<([i64; 3], Scalar)>, RepError> {
        let mut out: BTreeMap<[i64; 3], Scalar> = BTreeMap::new();
        for (monos, c) in &self.terms {
            let mut idx = [0i64; 3];
            let mut coeff = c.clone();
            for s in 0..3 {
                let (m, x) = act_mono(tags[s], q, monos[s], inn[s]);
                idx[s] = m;
                coeff *= x;
            }
            *out.entry(idx).or_insert_with(Scalar::zero) += coeff;
        }
        let v: Vec<_> = out.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        for (idx, _) in &v {
            for s in 0..3 {
                if !tags[s].admits(idx[s]) {
                    return Err(RepError::NegativeIndex(idx[s]));
                }
            }
        }
        Ok(v)
    }

    /// Row <out| of the operator: pairs (m, <out|T|m>) with m in the lattice.
    pub fn transpose(&self, tags: [RepTag; 3], q: &Scalar, out: [i64; 3]) -> Vec<([i64; 3], Scalar)> {
        let mut acc: BTreeMap<[i64; 3], Scalar> = BTreeMap::new();
        for (monos, c) in &self.terms {
            let mut idx = [0i64; 3];
            let mut coeff = c.clone();
            for s in 0..3 {
                let (m, x) = transpose_mono(tags[s], q, monos[s], out[s]);
                idx[s] = m;
                coeff *= x;
            }
            if (0..3).all(|s| tags[s].admits(idx[s])) {
                *acc.entry(idx).or_insert_with(Scalar::zero) += coeff;
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mono = |(a, b): Mono| -> String {
            match (a, b) {
                (0, 0) => "1".into(),
                (a, 0) => format!("Z^{}", a),
                (0, b) => format!("X^{}", b),
                (a, b) => format!("Z^{}X^{}", a, b),
            }
        };
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({}) {}⊗{}⊗{}", fmt_scalar(c), mono(m[0]), mono(m[1]), mono(m[2])))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn product_rule() {
        let q = rat(3, 5);
        let (x, z) = (WeylElement::x(), WeylElement::z());
        assert_eq!(x.mul(&z, &q), WeylElement::mono(q.clone(), 1, 1));
        let x2 = x.mul(&x, &q);
        assert_eq!(x2.mul(&z, &q), WeylElement::mono(&q * &q, 1, 2));
        let zi = WeylElement::mono(int(1), -1, 0);
        assert_eq!(zi.mul(&z, &q), WeylElement::one());
    }

    #[test]
    fn oscillator_embedding() {
        let q = rat(2, 7);
        let am = embed_oscillator(Oscillator::Annihilate);
        let ap = embed_oscillator(Oscillator::Create);
        assert_eq!(embed_oscillator(Oscillator::K), WeylElement::x());
        let expect = WeylElement::from_terms([((0, 0), int(1)), ((0, 2), -(&q * &q))]);
        assert_eq!(am.mul(&ap, &q), expect);
    }

    #[test]
    fn rep_examples() {
        let q = rat(5, 3);
        let v = StateVector::basis(4);
        assert_eq!(apply_rep(RepTag::ZPlus, &q, &WeylElement::x(), &v).unwrap(), StateVector::basis(3));
        assert_eq!(apply_rep(RepTag::X, &q, &WeylElement::z(), &v).unwrap(), StateVector::basis(5));
        let am = embed_oscillator(Oscillator::Annihilate);
        assert!(apply_rep(RepTag::O, &q, &am, &StateVector::basis(0)).unwrap().coeffs.is_empty());
        // a-|m> = (1 - q^2m)|m-1>
        let r = apply_rep(RepTag::O, &q, &am, &StateVector::basis(3)).unwrap();
        assert_eq!(r, StateVector::basis(2).scale(&(int(1) - pw(&q, 6))));
    }

    #[test]
    fn z_minus_variant() {
        let q = rat(-4, 3);
        for m in -4..=4 {
            assert_eq!(act_mono(RepTag::ZMinus, &q, (0, 1), m), (m + 1, int(1)));
            assert_eq!(act_mono(RepTag::ZMinus, &q, (1, 0), m), (m, pw(&q, -m)));
        }
    }

    #[test]
    fn relations_hold_and_corruption_is_caught() {
        let q = rat(7, 2);
        for tag in [RepTag::ZPlus, RepTag::ZMinus, RepTag::X] {
            assert!(check_algebra_relations(tag, &q, (-4, 4)).passed());
        }
        assert!(check_algebra_relations(RepTag::O, &q, (0, 6)).passed());
        fn bad(tag: RepTag, q: &Scalar, mono: Mono, m: i64) -> (i64, Scalar) {
            if tag == RepTag::ZPlus {
                (m + mono.1, pw(q, mono.0 * (m - mono.1)))
            } else {
                act_mono(tag, q, mono, m)
            }
        }
        assert!(!check_algebra_relations_with(RepTag::ZPlus, &q, (-4, 4), bad).passed());
    }

    #[test]
    fn transpose_matches_forward() {
        let q = rat(2, 3);
        let e = TensorElement::tensor(
            &WeylElement::from_terms([((-1, 0), int(2)), ((-1, 2), int(-3))]),
            &WeylElement::x(),
            &WeylElement::z(),
        );
        let tags = [RepTag::O, RepTag::ZPlus, RepTag::X];
        for i in 0..3 {
            for j in -2..2 {
                for k in -2..2 {
                    let Ok(fw) = e.forward(tags, &q, [i, j, k]) else {
                        assert_eq!(i, 0);
                        continue;
                    };
                    for (out, c) in fw {
                        let row = e.transpose(tags, &q, out);
                        let hit = row.iter().find(|(m, _)| *m == [i, j, k]).unwrap();
                        assert_eq!(hit.1, c);
                    }
                }
            }
        }
    }
}
