//! 3D L operators and the triple composites of the quantized Yang-Baxter equation.

use crate::exactnum::{LineParams, Param, Quartet, Scalar};
use crate::weyl::{RepTag, TensorElement, WeylElement};
use num_traits::One;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LopError {
    #[error("O-tagged L operator needs a single mu parameter")]
    ONeedsMu,
    #[error("Z/X-tagged L operator needs an (r,s,t,w) quartet")]
    NeedsQuartet,
}

/// Entry index (a, b, i, j) of L^{ab}_{ij}.
pub type Entry = [u8; 4];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LOperator {
    pub tag: RepTag,
    pub params: LineParams,
    entries: BTreeMap<Entry, WeylElement>,
}

fn entries_for(q: &Scalar, quartet: &Quartet) -> BTreeMap<Entry, WeylElement> {
    let (r, s, t, w) = (&quartet.r.value, &quartet.s.value, &quartet.t.value, &quartet.w.value);
    let mut e = BTreeMap::new();
    e.insert([0, 0, 0, 0], WeylElement::scalar(r.clone()));
    e.insert([1, 1, 1, 1], WeylElement::scalar(s.clone()));
    e.insert([1, 0, 1, 0], WeylElement::mono(t * w, 0, 1));
    e.insert([0, 1, 0, 1], WeylElement::mono(-(q * t), 0, 1));
    e.insert([1, 0, 0, 1], WeylElement::z());
    e.insert([0, 1, 1, 0], WeylElement::from_terms([((-1, 0), r * s), ((-1, 2), -(t * t * w))]));
    e
}

impl LOperator {
    pub fn entry(&self, e: Entry) -> Option<&WeylElement> {
        self.entries.get(&e)
    }

    pub fn entries(&self) -> &BTreeMap<Entry, WeylElement> {
        &self.entries
    }

    /// The quartet used for the entries; (1,1,mu^-1,mu^2) on O lines.
    pub fn quartet(&self) -> Quartet {
        match &self.params {
            LineParams::Quartet(qt) => qt.clone(),
            LineParams::Mu(mu) => Quartet::from_mu(mu),
        }
    }
}

pub fn build_l(tag: RepTag, q: &Scalar, params: &LineParams) -> Result<LOperator, LopError> {
    let quartet = match (tag, params) {
        (RepTag::O, LineParams::Mu(mu)) => Quartet::from_mu(mu),
        (RepTag::O, _) => return Err(LopError::ONeedsMu),
        (_, LineParams::Quartet(qt)) => qt.clone(),
        _ => return Err(LopError::NeedsQuartet),
    };
    Ok(LOperator { tag, params: params.clone(), entries: entries_for(q, &quartet) })
}

/// The inverse operator together with its scalar factor: L^-1 = factor * L'.
/// Z/X tags: factor (rs)^-1 and L' built from (s, r, tw, w^-1); O tag: factor 1, mu -> mu^-1.
pub fn invert_l(l: &LOperator, q: &Scalar) -> (Scalar, LOperator) {
    match &l.params {
        LineParams::Mu(mu) => {
            let p = LineParams::Mu(mu.recip());
            (Scalar::one(), build_l(l.tag, q, &p).expect("mu line"))
        }
        LineParams::Quartet(qt) => {
            let f = (&qt.r.value * &qt.s.value).recip();
            (f, build_l(l.tag, q, &LineParams::Quartet(qt.inverted())).expect("quartet line"))
        }
    }
}

/// Weight-conserving v-tuples (a,b,c,i,j,k) other than all-zero and all-one.
pub fn vtuples() -> Vec<[u8; 6]> {
    all_conserving().into_iter().filter(|v| !is_trivial(v)).collect()
}

pub fn all_conserving() -> Vec<[u8; 6]> {
    let mut out = Vec::new();
    for n in 0..64u8 {
        let v = [(n >> 5) & 1, (n >> 4) & 1, (n >> 3) & 1, (n >> 2) & 1, (n >> 1) & 1, n & 1];
        if v[0] + v[1] + v[2] == v[3] + v[4] + v[5] {
            out.push(v);
        }
    }
    out
}

pub fn is_trivial(v: &[u8; 6]) -> bool {
    v.iter().all(|&x| x == 0) || v.iter().all(|&x| x == 1)
}

/// Number of nontrivial weight-conserving tuples.
pub fn conservation_audit() -> usize {
    vtuples().len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// sum L^{αβ}_{ij} ⊗ L^{aγ}_{αk} ⊗ L^{bc}_{βγ}
    Left,
    /// sum L^{ab}_{αβ} ⊗ L^{αc}_{iγ} ⊗ L^{βγ}_{jk}
    Right,
}

pub fn triple_composite(side: Side, ls: [&LOperator; 3], v: [u8; 6]) -> TensorElement {
    let [a, b, c, i, j, k] = v;
    let mut out = TensorElement::zero();
    for al in 0..2u8 {
        for be in 0..2u8 {
            for ga in 0..2u8 {
                let (e1, e2, e3) = match side {
                    Side::Left => ([al, be, i, j], [a, ga, al, k], [b, c, be, ga]),
                    Side::Right => ([a, b, al, be], [al, c, i, ga], [be, ga, j, k]),
                };
                let (Some(x1), Some(x2), Some(x3)) = (ls[0].entry(e1), ls[1].entry(e2), ls[2].entry(e3)) else {
                    continue;
                };
                out = out.add(&TensorElement::tensor(x1, x2, x3));
            }
        }
    }
    out
}

/// Tag of a type letter in a relation; `minus` selects the reflected Z action.
pub fn tag_of(letter: char, minus: bool) -> Option<RepTag> {
    match letter {
        'Z' if minus => Some(RepTag::ZMinus),
        'Z' => Some(RepTag::ZPlus),
        'X' => Some(RepTag::X),
        'O' => Some(RepTag::O),
        _ => None,
    }
}

/// Convenience: the O line operator L^O_mu.
pub fn l_o(q: &Scalar, mu: &Param) -> LOperator {
    build_l(RepTag::O, q, &LineParams::Mu(mu.clone())).expect("mu line")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat, Sampler};
    use crate::weyl::{embed_oscillator, Oscillator};

    fn quartet(seed: u64) -> Quartet {
        Quartet::sample(&mut Sampler::new(seed))
    }

    #[test]
    fn weight_conservation_and_entries() {
        let q = rat(3, 7);
        let qt = quartet(1);
        let l = build_l(RepTag::ZPlus, &q, &LineParams::Quartet(qt.clone())).unwrap();
        for n in 0..16u8 {
            let e = [(n >> 3) & 1, (n >> 2) & 1, (n >> 1) & 1, n & 1];
            if e[0] + e[1] != e[2] + e[3] {
                assert!(l.entry(e).is_none());
            }
        }
        let y = WeylElement::from_terms([
            ((-1, 0), &qt.r.value * &qt.s.value),
            ((-1, 2), -(&qt.t.value * &qt.t.value * &qt.w.value)),
        ]);
        assert_eq!(l.entry([0, 1, 1, 0]).unwrap(), &y);
        assert!(l.entry([1, 0, 0, 0]).is_none());
    }

    #[test]
    fn o_line_uses_oscillators() {
        let q = rat(5, 2);
        let mu = Param::square(rat(2, 3));
        let l = l_o(&q, &mu);
        let k = embed_oscillator(Oscillator::K);
        assert_eq!(l.entry([1, 0, 1, 0]).unwrap(), &k.scale(&mu.value));
        assert_eq!(l.entry([0, 1, 1, 0]).unwrap(), &embed_oscillator(Oscillator::Annihilate));
        assert_eq!(l.entry([1, 0, 0, 1]).unwrap(), &embed_oscillator(Oscillator::Create));
        assert!(build_l(RepTag::O, &q, &LineParams::Quartet(quartet(2))).is_err());
        assert!(build_l(RepTag::ZPlus, &q, &LineParams::Mu(mu)).is_err());
    }

    #[test]
    fn tuple_counts() {
        assert_eq!(conservation_audit(), 18);
        assert_eq!(all_conserving().len(), 20);
        assert!(is_trivial(&[0; 6]) && is_trivial(&[1; 6]));
    }

    #[test]
    fn composites_match_hand_expansion() {
        let q = rat(2, 5);
        let qs: Vec<Quartet> = (1..=3).map(quartet).collect();
        let ls: Vec<LOperator> =
            qs.iter().map(|qt| build_l(RepTag::ZPlus, &q, &LineParams::Quartet(qt.clone())).unwrap()).collect();
        let refs = [&ls[0], &ls[1], &ls[2]];
        // (001001): left is r1 q^2 t2 t3 (1 ⊗ X ⊗ X)
        let left = triple_composite(Side::Left, refs, [0, 0, 1, 0, 0, 1]);
        let c = &qs[0].r.value * &q * &q * &qs[1].t.value * &qs[2].t.value;
        let one = WeylElement::one();
        assert_eq!(left, TensorElement::tensor(&one, &WeylElement::x(), &WeylElement::x()).scale(&c));
        for side in [Side::Left, Side::Right] {
            let id = triple_composite(side, refs, [0; 6]);
            let r = &qs[0].r.value * &qs[1].r.value * &qs[2].r.value;
            assert_eq!(id, TensorElement::tensor(&one, &one, &one).scale(&r));
        }
    }

    #[test]
    fn inverse_operator_is_two_sided() {
        // sum_{c,d} L^{ab}_{cd} (x) L'^{cd}_{ij} acts as the identity on the quantum space.
        let q = rat(-3, 4);
        for (tag, params) in [
            (RepTag::ZPlus, LineParams::Quartet(quartet(5))),
            (RepTag::X, LineParams::Quartet(quartet(6))),
            (RepTag::O, LineParams::Mu(Param::square(rat(4, 3)))),
        ] {
            let l = build_l(tag, &q, &params).unwrap();
            let (f, li) = invert_l(&l, &q);
            for (x, y) in [(&l, &li), (&li, &l)] {
                for n in 0..16u8 {
                    let (a, b, i, j) = ((n >> 3) & 1, (n >> 2) & 1, (n >> 1) & 1, n & 1);
                    let mut acc = WeylElement::zero();
                    for c in 0..2u8 {
                        for d in 0..2u8 {
                            if let (Some(e1), Some(e2)) = (x.entry([a, b, c, d]), y.entry([c, d, i, j])) {
                                acc = acc.add(&e1.mul(e2, &q));
                            }
                        }
                    }
                    let expect = if (a, b) == (i, j) { WeylElement::one() } else { WeylElement::zero() };
                    assert_eq!(acc.scale(&f), expect, "{:?} {:?}", tag, (a, b, i, j));
                }
            }
        }
        let _ = int(0);
    }
}
