//! Closed-form evaluators for the eleven 3D R kernels.

use crate::exactnum::{
    int, log_q, phi21_terminating, phi_tilde, pw, qpochhammer, qpochhammer_inv, qpow_half, sample_parameter_point,
    LineKind, LineParams, MuConstraint, NumError, Param, ParameterPoint, Quartet, Scalar,
};
use num_traits::{One, Zero};
use serde::Serialize;
use std::fmt;
use std::sync::Arc;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("unknown kernel type '{0}'")]
    UnknownType(String),
    #[error("line {line} has the wrong kind of parameters for type {kind}")]
    WrongLine { kind: KernelType, line: usize },
    #[error("{0}")]
    NonIntegralSector(String),
    #[error("degenerate parameter point: {0}")]
    Degenerate(String),
    #[error("square-root witness missing for a parameter of {0}")]
    MissingWitness(KernelType),
    #[error("{0} is not locally finite")]
    NotLocallyFinite(KernelType),
}

impl From<NumError> for KernelError {
    fn from(e: NumError) -> Self {
        KernelError::Degenerate(e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum KernelType {
    ZZZ,
    OZZ,
    ZZO,
    ZOZ,
    OOZ,
    ZOO,
    OZO,
    OOO,
    XXZ,
    ZXX,
    XZX,
}

impl KernelType {
    pub const ALL: [KernelType; 11] = [
        KernelType::ZZZ,
        KernelType::OZZ,
        KernelType::ZZO,
        KernelType::ZOZ,
        KernelType::OOZ,
        KernelType::ZOO,
        KernelType::OZO,
        KernelType::OOO,
        KernelType::XXZ,
        KernelType::ZXX,
        KernelType::XZX,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelType::ZZZ => "ZZZ",
            KernelType::OZZ => "OZZ",
            KernelType::ZZO => "ZZO",
            KernelType::ZOZ => "ZOZ",
            KernelType::OOZ => "OOZ",
            KernelType::ZOO => "ZOO",
            KernelType::OZO => "OZO",
            KernelType::OOO => "OOO",
            KernelType::XXZ => "XXZ",
            KernelType::ZXX => "ZXX",
            KernelType::XZX => "XZX",
        }
    }

    pub fn letters(self) -> [char; 3] {
        let mut it = self.name().chars();
        [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
    }

    pub fn line_kinds(self) -> [LineKind; 3] {
        self.letters().map(|c| if c == 'O' { LineKind::Mu } else { LineKind::Quartet })
    }

    pub fn has_sector_d(self) -> bool {
        matches!(self, KernelType::OOZ | KernelType::ZOO | KernelType::OZO)
    }

    pub fn locally_finite(self) -> bool {
        matches!(self, KernelType::OOZ | KernelType::ZOO | KernelType::OOO)
    }

    /// The mu relation a kernel demands, as (derived line, base line, negative).
    /// OOZ: mu1 = mu2 q^d, ZOO: mu3 = mu2 q^d, OZO: mu1 = -mu3 q^d.
    pub fn mu_relation(self) -> Option<(usize, usize, bool)> {
        match self {
            KernelType::OOZ => Some((0, 1, false)),
            KernelType::ZOO => Some((2, 1, false)),
            KernelType::OZO => Some((0, 2, true)),
            _ => None,
        }
    }

    /// Parity functional labelling the sectors coupled by the RLLL relations, if any.
    pub fn parity_functional(self, o: [i64; 3], n: [i64; 3]) -> Option<(i64, i64)> {
        let [a, b, c] = o;
        let [i, j, k] = n;
        let m = |x: i64| x.rem_euclid(2);
        match self {
            KernelType::ZZZ => Some((m(a + c - j), m(b - i - k))),
            KernelType::OOZ | KernelType::XXZ => Some((m(a - c + j + k), 0)),
            KernelType::ZOO | KernelType::ZXX => Some((m(-a + c + i + j), 0)),
            KernelType::OZO => Some((m(a + b + c - j), 0)),
            KernelType::XZX => Some((m(-b + i + j + k), 0)),
            _ => None,
        }
    }
}

impl fmt::Display for KernelType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelType {
    type Err = KernelError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        KernelType::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s.to_ascii_uppercase())
            .ok_or_else(|| KernelError::UnknownType(s.into()))
    }
}

/// Which of the two printed forms to use for OZZ, ZZO and ZOZ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesForm {
    Sum,
    Hyper,
}

/// Single-token corruptions of the kernel formulas, for fault-sensitivity checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// ZZZ: exponent d1 of the first prefactor negated
    ZzzD1Sign,
    /// ZZZ: s2 and s3 swapped inside the first numerator factor
    ZzzSwapS,
    /// OZZ: (a-b+j-1)c becomes (a-b+j+1)c in the q exponent
    OzzQExponent,
    /// ZZO: sign of -t1 w1/(mu r1) dropped
    ZzoSign,
    /// ZOZ: r1 replaced by s1 in (r1/(mu t1))^(a-i)
    ZozSwap,
    /// OOZ: q^(cj-bk) becomes q^(cj+bk)
    OozSign,
    /// ZOO: s1^k becomes r1^k
    ZooSwap,
    /// OZO: q^(bk-cj) becomes q^(bk+cj)
    OzoExponent,
    /// OOO: (-mu1/mu3)^b becomes (mu1/mu3)^b
    OooSign,
    /// OOO: b(k-i+1) becomes b(k-i-1)
    OooExponent,
    /// XXZ: (s1 s3/s2)^i becomes (s1 s2/s3)^i
    XxzSwap,
    /// ZXX: q^(aj-bi) becomes q^(aj+bi)
    ZxxExponent,
    /// XZX: sign of the first Pochhammer argument flipped
    XzxSign,
}

impl Mutation {
    pub const ALL: [Mutation; 13] = [
        Mutation::ZzzD1Sign,
        Mutation::ZzzSwapS,
        Mutation::OzzQExponent,
        Mutation::ZzoSign,
        Mutation::ZozSwap,
        Mutation::OozSign,
        Mutation::ZooSwap,
        Mutation::OzoExponent,
        Mutation::OooSign,
        Mutation::OooExponent,
        Mutation::XxzSwap,
        Mutation::ZxxExponent,
        Mutation::XzxSign,
    ];

    pub fn target(self) -> KernelType {
        match self {
            Mutation::ZzzD1Sign | Mutation::ZzzSwapS => KernelType::ZZZ,
            Mutation::OzzQExponent => KernelType::OZZ,
            Mutation::ZzoSign => KernelType::ZZO,
            Mutation::ZozSwap => KernelType::ZOZ,
            Mutation::OozSign => KernelType::OOZ,
            Mutation::ZooSwap => KernelType::ZOO,
            Mutation::OzoExponent => KernelType::OZO,
            Mutation::OooSign | Mutation::OooExponent => KernelType::OOO,
            Mutation::XxzSwap => KernelType::XXZ,
            Mutation::ZxxExponent => KernelType::ZXX,
            Mutation::XzxSign => KernelType::XZX,
        }
    }
}

/// Auxiliary sector quantities of one element.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SectorData {
    pub d: Option<[i64; 4]>,
    /// 2*phi for ZZZ
    pub twice_phi: Option<i64>,
    pub e: Option<i64>,
    pub f: Option<i64>,
    pub g: Option<i64>,
    pub h: Option<i64>,
    pub x: Option<Scalar>,
    pub y: Option<Scalar>,
    pub z: Option<Scalar>,
}

/// A 3D R kernel at a fixed parameter point.
#[derive(Debug, Clone)]
pub struct RKernel {
    pub kind: KernelType,
    pub q: Param,
    pub lines: [LineParams; 3],
    /// sector integer for OOZ, ZOO and OZO
    pub d: i64,
    /// free constants of the two h-sectors for XXZ, ZXX and XZX
    pub consts: [Scalar; 2],
    pub form: SeriesForm,
    /// index reflections of the ZZZ sign variants
    pub signs: [i64; 3],
    pub mutation: Option<Mutation>,
    tab: Arc<Tables>,
}

const QTAB: i64 = 192;
const FACTAB: i64 = 64;

/// Powers of q and (q^2;q^2)_n shared by every evaluation at one point.
#[derive(Debug)]
struct Tables {
    qpow: Vec<Scalar>,
    fac: Vec<Scalar>,
    zzz: Option<ZzzTables>,
}

const ROOTTAB: i64 = 64;
const QROOTTAB: i64 = 640;
const PHITAB: i64 = 64;

/// Root powers of the four ZZZ prefactor bases and of q, and Phi~_m of the five ZZZ arguments.
#[derive(Debug)]
struct ZzzTables {
    roots: [Vec<Scalar>; 4],
    qroot: Vec<Scalar>,
    phis: [Vec<Option<Scalar>>; 5],
}

fn power_table(x: &Scalar, n: i64) -> Vec<Scalar> {
    (-n..=n).map(|e| pw(x, e)).collect()
}

fn phi_table(z: &Scalar, q: &Scalar) -> Vec<Option<Scalar>> {
    let one = Scalar::one();
    let size = (2 * PHITAB + 1) as usize;
    let mut t: Vec<Option<Scalar>> = vec![None; size];
    let ix = |m: i64| (m + PHITAB) as usize;
    t[ix(0)] = Some(one.clone());
    t[ix(1)] = Some(one.clone());
    for m in 0..=(PHITAB - 2) {
        let prev = t[ix(m)].clone().unwrap();
        t[ix(m + 2)] = Some(prev * (&one - z * pw(q, m)));
    }
    for m in (-PHITAB..=-1).rev() {
        let f = &one - z * pw(q, m);
        t[ix(m)] = match (&t[ix(m + 2)], f.is_zero()) {
            (Some(x), false) => Some(x / f),
            _ => None,
        };
    }
    t
}

impl ZzzTables {
    fn new(q: &Param, lines: &[LineParams; 3]) -> Option<Self> {
        let l = |n: usize| lines[n].quartet();
        let (l1, l2, l3) = (l(0)?, l(1)?, l(2)?);
        let f1 = l2.r.div(&l1.t.mul(&l3.t).mul(&l1.w));
        let f2 = l2.s.div(&l1.t.mul(&l3.t).mul(&l3.w));
        let f3 = l2.t.div(&l1.s.mul(&l3.t));
        let f4 = l2.t.mul(&l2.w).div(&l3.s.mul(&l1.t).mul(&l1.w));
        let roots = [&f1, &f2, &f3, &f4].map(|f| power_table(f.root.as_ref().expect("witness"), ROOTTAB));
        let qroot = power_table(q.root.as_ref()?, QROOTTAB);
        let qv = &q.value;
        let (r1, s1, w1) = (&l1.r.value, &l1.s.value, &l1.w.value);
        let (r2, s2, w2) = (&l2.r.value, &l2.s.value, &l2.w.value);
        let (r3, s3, w3) = (&l3.r.value, &l3.s.value, &l3.w.value);
        let zs = [
            s1 * s3 / s2,
            r3 * w2 / (s3 * w1),
            r1 * w3 / (s1 * w2),
            qv * qv * r1 * r3 / r2,
            r1 * r3 * w3 / (s1 * s3 * w1),
        ];
        let phis = zs.map(|z| phi_table(&z, qv));
        Some(ZzzTables { roots, qroot, phis })
    }

    fn root(&self, n: usize, e: i64) -> Option<&Scalar> {
        (e.abs() <= ROOTTAB).then(|| &self.roots[n][(e + ROOTTAB) as usize])
    }

    fn qroot(&self, e: i64) -> Option<&Scalar> {
        (e.abs() <= QROOTTAB).then(|| &self.qroot[(e + QROOTTAB) as usize])
    }

    /// Some(None) marks a vanishing denominator.
    fn phi(&self, n: usize, m: i64) -> Option<Option<&Scalar>> {
        (m.abs() <= PHITAB).then(|| self.phis[n][(m + PHITAB) as usize].as_ref())
    }
}

impl Tables {
    fn new(qp: &Param, kind: KernelType, lines: &[LineParams; 3]) -> Result<Self, KernelError> {
        let q = &qp.value;
        let qi = q.recip();
        let mut neg = vec![Scalar::one()];
        let mut pos = vec![Scalar::one()];
        for n in 1..=QTAB as usize {
            neg.push(&neg[n - 1] * &qi);
            pos.push(&pos[n - 1] * q);
        }
        neg.reverse();
        neg.pop();
        neg.extend(pos);
        let q2 = q * q;
        let mut fac = vec![Scalar::one()];
        for n in 1..=FACTAB as usize {
            let f = &fac[n - 1] * (Scalar::one() - pw(&q2, n as i64));
            fac.push(f);
        }
        if fac.iter().any(|f| f.is_zero()) {
            return Err(KernelError::Degenerate("q is a root of unity".into()));
        }
        let zzz = if kind == KernelType::ZZZ { ZzzTables::new(qp, lines) } else { None };
        Ok(Tables { qpow: neg, fac, zzz })
    }
}

impl RKernel {
    /// Validates line kinds, the mu relation of mixed kernels and the witnesses ZZZ needs.
    pub fn new(kind: KernelType, q: Param, lines: [LineParams; 3], d: i64) -> Result<Self, KernelError> {
        for (n, (l, k)) in lines.iter().zip(kind.line_kinds()).enumerate() {
            let ok = matches!((l, k), (LineParams::Mu(_), LineKind::Mu) | (LineParams::Quartet(_), LineKind::Quartet));
            if !ok {
                return Err(KernelError::WrongLine { kind, line: n + 1 });
            }
        }
        if let Some((a, b, neg)) = kind.mu_relation() {
            let ma = &lines[a].mu().unwrap().value;
            let mb = &lines[b].mu().unwrap().value;
            let ratio = if neg { -(ma / mb) } else { ma / mb };
            match log_q(&ratio, &q.value) {
                Some(e) if e == d => {}
                Some(e) => {
                    return Err(KernelError::NonIntegralSector(format!(
                        "{}: mu ratio is q^{} but sector d = {}",
                        kind, e, d
                    )))
                }
                None => {
                    return Err(KernelError::NonIntegralSector(format!(
                        "{}: mu{}/mu{} is not {}q^d for an integer d",
                        kind,
                        a + 1,
                        b + 1,
                        if neg { "-" } else { "" }
                    )))
                }
            }
        }
        if kind == KernelType::ZZZ {
            let mut roots = vec![&q];
            for l in &lines {
                let qt = l.quartet().unwrap();
                roots.extend([&qt.r, &qt.s, &qt.t, &qt.w]);
            }
            if roots.iter().any(|p| p.root.is_none()) {
                return Err(KernelError::MissingWitness(kind));
            }
        }
        if q.value.is_zero() {
            return Err(KernelError::Degenerate("q = 0".into()));
        }
        let tab = Arc::new(Tables::new(&q, kind, &lines)?);
        Ok(RKernel {
            kind,
            q,
            lines,
            d,
            consts: [Scalar::one(), Scalar::one()],
            form: SeriesForm::Sum,
            signs: [1, 1, 1],
            mutation: None,
            tab,
        })
    }

    pub fn from_point(kind: KernelType, p: &ParameterPoint, d: i64) -> Result<Self, KernelError> {
        let lines = [p.lines[0].clone(), p.lines[1].clone(), p.lines[2].clone()];
        RKernel::new(kind, p.q.clone(), lines, d)
    }

    /// Samples a parameter point for `kind`, deriving the constrained mu from the sector d.
    pub fn sample(kind: KernelType, seed: u64, d: i64) -> Result<Self, KernelError> {
        let constraints: Vec<MuConstraint> = kind
            .mu_relation()
            .map(|(a, b, negative)| MuConstraint { a, b, d, negative })
            .into_iter()
            .collect();
        // ZZZ points where a Phi~ factor can vanish are redrawn
        for n in 0..16u64 {
            let p = sample_parameter_point(seed.wrapping_add(n << 32), &kind.line_kinds(), &constraints)?;
            let k = RKernel::from_point(kind, &p, d)?;
            if !k.zzz_singular() {
                return Ok(k);
            }
        }
        Err(KernelError::Degenerate("no nonsingular ZZZ point after 16 draws".into()))
    }

    pub fn with_form(mut self, form: SeriesForm) -> Self {
        self.form = form;
        self
    }

    pub fn with_mutation(mut self, m: Option<Mutation>) -> Self {
        self.mutation = m;
        self
    }

    pub fn with_signs(mut self, signs: [i64; 3]) -> Self {
        self.signs = signs;
        self
    }

    pub fn with_consts(mut self, consts: [Scalar; 2]) -> Self {
        self.consts = consts;
        self
    }

    fn mutated(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }

    fn qt(&self, n: usize) -> &Quartet {
        self.lines[n - 1].quartet().expect("quartet line")
    }

    fn mu(&self, n: usize) -> &Scalar {
        &self.lines[n - 1].mu().expect("mu line").value
    }

    fn qq(&self) -> &Scalar {
        &self.q.value
    }

    fn qp(&self, e: i64) -> Scalar {
        if e.abs() <= QTAB {
            self.tab.qpow[(e + QTAB) as usize].clone()
        } else {
            pw(&self.q.value, e)
        }
    }

    /// 1/(q^2;q^2)_n, which vanishes for n < 0.
    fn fac_inv(&self, n: i64) -> Result<Scalar, KernelError> {
        if n < 0 {
            return Ok(Scalar::zero());
        }
        if n <= FACTAB {
            return Ok(self.tab.fac[n as usize].recip());
        }
        let q2 = self.qp(2);
        Ok(qpochhammer_inv(&q2, &q2, n)?)
    }

    /// Gaussian binomial in base q^2.
    fn qbin(&self, n: i64, m: i64) -> Result<Scalar, KernelError> {
        if m < 0 || m > n {
            return Ok(Scalar::zero());
        }
        if n <= FACTAB {
            let f = &self.tab.fac;
            return Ok(&f[n as usize] / (&f[m as usize] * &f[(n - m) as usize]));
        }
        let q2 = self.qp(2);
        Ok(crate::exactnum::qbinomial(n, m, &q2)?)
    }

    /// True iff the element can be nonzero; false implies the element is zero.
    pub fn support(&self, out: [i64; 3], inn: [i64; 3]) -> bool {
        self.support_violation(out, inn).is_none()
    }

    /// Names the first violated support constraint.
    pub fn support_violation(&self, out: [i64; 3], inn: [i64; 3]) -> Option<&'static str> {
        let [a, b, c] = out;
        let [i, j, k] = inn;
        let d = self.d;
        let even = |x: i64| x.rem_euclid(2) == 0;
        let letters = self.kind.letters();
        for n in 0..3 {
            if letters[n] == 'O' && (out[n] < 0 || inn[n] < 0) {
                return Some("negative index on an F+ line");
            }
        }
        match self.kind {
            KernelType::ZZZ | KernelType::OZZ | KernelType::ZZO | KernelType::ZOZ => None,
            KernelType::OOZ => {
                if a + b != i + j {
                    Some("delta a+b = i+j")
                } else if !even(a - c + j + k + d) {
                    Some("parity of a-c+j+k+d")
                } else if !((b - i).abs() <= k - c + d && k - c + d <= b + i) {
                    Some("|b-i| <= k-c+d <= b+i")
                } else {
                    None
                }
            }
            KernelType::ZOO => {
                if b + c != j + k {
                    Some("delta b+c = j+k")
                } else if !even(-a + c + i + j - d) {
                    Some("parity of -a+c+i+j-d")
                } else if !((b - k).abs() <= i - a - d && i - a - d <= b + k) {
                    Some("|b-k| <= i-a-d <= b+k")
                } else {
                    None
                }
            }
            KernelType::OZO => {
                if a - c != i - k {
                    Some("delta a-c = i-k")
                } else if !even(i + j + k - b - d - 1) {
                    Some("parity of i+j+k-b-d-1")
                } else if !((a - c).abs() <= j - b - d - 1 && j - b - d - 1 <= a + c) {
                    Some("|a-c| <= j-b-d-1 <= a+c")
                } else {
                    None
                }
            }
            KernelType::OOO => {
                if a + b != i + j {
                    Some("delta a+b = i+j")
                } else if b + c != j + k {
                    Some("delta b+c = j+k")
                } else {
                    None
                }
            }
            KernelType::XXZ => (a + b != i + j).then_some("delta a+b = i+j"),
            KernelType::ZXX => (b + c != j + k).then_some("delta b+c = j+k"),
            KernelType::XZX => (a - c != i - k).then_some("delta a-c = i-k"),
        }
    }

    pub fn sector_of(&self, out: [i64; 3], inn: [i64; 3]) -> SectorData {
        let [a, b, c] = out;
        let [i, j, k] = inn;
        let d = self.d;
        let mut s = SectorData::default();
        match self.kind {
            KernelType::ZZZ => {
                let ds = [a + c - j, b - i - k, -a - b + c + i + j - k, a - b - c - i + j + k];
                s.twice_phi = Some(((ds[0] - ds[1]) * (ds[0] + ds[1] + ds[2] + ds[3]) + ds[2] * ds[3]) / 2 - 2 * ds[0]);
                s.d = Some(ds);
            }
            KernelType::OOZ => {
                s.e = Some(half(a - c + j + k + d));
                s.f = Some(half(b + c + i - k - d));
            }
            KernelType::ZOO => {
                s.e = Some(half(-a + c + i + j - d));
                s.f = Some(half(a + b - i + k + d));
            }
            KernelType::OZO => {
                s.e = Some(half(i + j + k - b - d - 1));
                s.f = Some(half(a + b + c - j + d + 1));
            }
            KernelType::XXZ => {
                let t = a - c + j + k;
                s.h = Some(t.rem_euclid(2));
                s.g = Some(t.div_euclid(2));
            }
            KernelType::ZXX => {
                let t = -a + c + i + j;
                s.h = Some(t.rem_euclid(2));
                s.g = Some(t.div_euclid(2));
            }
            KernelType::XZX => {
                let t = -b + i + j + k;
                s.h = Some(t.rem_euclid(2));
                s.g = Some(t.div_euclid(2));
            }
            KernelType::OZZ => {
                let (x, y) = self.xy_ozz();
                s.z = Some(&x * self.qp(2 * k - 2 * c + 2));
                s.x = Some(x);
                s.y = Some(y);
            }
            KernelType::ZZO => {
                let (x, y) = self.xy_zzo();
                s.z = Some(&x * self.qp(2 * i - 2 * a + 2));
                s.x = Some(x);
                s.y = Some(y);
            }
            KernelType::ZOZ => {
                let (x, y) = self.xy_zoz();
                s.x = Some(x);
                s.y = Some(y);
            }
            KernelType::OOO => {}
        }
        s
    }

    /// The matrix element R^{out}_{in}.
    pub fn element(&self, out: [i64; 3], inn: [i64; 3]) -> Result<Scalar, KernelError> {
        let (out, inn) = self.reflect(out, inn);
        if !self.support(out, inn) {
            return Ok(Scalar::zero());
        }
        self.formula(out, inn)
    }

    /// The printed formula with only its lattice, delta and integrality gates applied;
    /// interval and boundary conditions are left to the formula itself.
    pub fn element_formula(&self, out: [i64; 3], inn: [i64; 3]) -> Result<Scalar, KernelError> {
        let (out, inn) = self.reflect(out, inn);
        let [a, b, c] = out;
        let [i, j, k] = inn;
        let d = self.d;
        let even = |x: i64| x.rem_euclid(2) == 0;
        let letters = self.kind.letters();
        if (0..3).any(|n| letters[n] == 'O' && (out[n] < 0 || inn[n] < 0)) {
            return Ok(Scalar::zero());
        }
        let gate = match self.kind {
            KernelType::OOZ => a + b == i + j && even(a - c + j + k + d),
            KernelType::ZOO => b + c == j + k && even(-a + c + i + j - d),
            KernelType::OZO => a - c == i - k && even(i + j + k - b - d - 1),
            KernelType::OOO => a + b == i + j && b + c == j + k,
            KernelType::XXZ => a + b == i + j,
            KernelType::ZXX => b + c == j + k,
            KernelType::XZX => a - c == i - k,
            _ => true,
        };
        if !gate {
            return Ok(Scalar::zero());
        }
        self.formula(out, inn)
    }

    fn reflect(&self, out: [i64; 3], inn: [i64; 3]) -> ([i64; 3], [i64; 3]) {
        let e = self.signs;
        ([e[0] * out[0], e[1] * out[1], e[2] * out[2]], [e[0] * inn[0], e[1] * inn[1], e[2] * inn[2]])
    }

    fn formula(&self, out: [i64; 3], inn: [i64; 3]) -> Result<Scalar, KernelError> {
        match self.kind {
            KernelType::ZZZ => self.zzz(out, inn),
            KernelType::OZZ => self.ozz(out, inn),
            KernelType::ZZO => self.zzo(out, inn),
            KernelType::ZOZ => self.zoz(out, inn),
            KernelType::OOZ => self.ooz(out, inn),
            KernelType::ZOO => self.zoo(out, inn),
            KernelType::OZO => self.ozo(out, inn),
            KernelType::OOO => self.ooo(out, inn),
            KernelType::XXZ => self.xxz(out, inn),
            KernelType::ZXX => self.zxx(out, inn),
            KernelType::XZX => self.xzx(out, inn),
        }
    }

    fn zzz(&self, [a, b, c]: [i64; 3], [i, j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let (l1, l2, l3) = (self.qt(1), self.qt(2), self.qt(3));
        let q = self.qq();
        let d1 = a + c - j;
        let d2 = b - i - k;
        let d3 = -a - b + c + i + j - k;
        let d4 = a - b - c - i + j + k;
        let twice_phi = ((d1 - d2) * (d1 + d2 + d3 + d4) + d3 * d4) / 2 - 2 * d1;
        let e1 = if self.mutated(Mutation::ZzzD1Sign) { -d1 } else { d1 };
        if let (Some(zt), false) = (&self.tab.zzz, self.mutated(Mutation::ZzzSwapS)) {
            let roots = [zt.root(0, e1), zt.root(1, d2), zt.root(2, d3), zt.root(3, d4), zt.qroot(twice_phi)];
            let phis = [zt.phi(0, d2), zt.phi(1, d3), zt.phi(2, d4), zt.phi(3, -d1), zt.phi(4, d3 + d4)];
            if roots.iter().all(|x| x.is_some()) && phis.iter().all(|x| x.is_some()) {
                let roots = roots.map(|x| x.unwrap());
                let phis = phis.map(|x| x.unwrap());
                let Some(den) = phis[3].zip(phis[4]).map(|(x, y)| x * y).filter(|x| !x.is_zero()) else {
                    return Err(KernelError::Degenerate("ZZZ denominator".into()));
                };
                let (Some(n0), Some(n1), Some(n2)) = (phis[0], phis[1], phis[2]) else {
                    return Err(KernelError::Degenerate("ZZZ numerator at negative index".into()));
                };
                let pre = roots[0] * roots[1] * roots[2] * roots[3] * roots[4];
                return Ok(pre * n0 * n1 * n2 / den);
            }
        }
        let f1 = l2.r.div(&l1.t.mul(&l3.t).mul(&l1.w));
        let f2 = l2.s.div(&l1.t.mul(&l3.t).mul(&l3.w));
        let f3 = l2.t.div(&l1.s.mul(&l3.t));
        let f4 = l2.t.mul(&l2.w).div(&l3.s.mul(&l1.t).mul(&l1.w));
        let pre = qpow_half(&f1, e1)?
            * qpow_half(&f2, d2)?
            * qpow_half(&f3, d3)?
            * qpow_half(&f4, d4)?
            * qpow_half(&self.q, twice_phi)?;
        let (r1, s1, w1) = (&l1.r.value, &l1.s.value, &l1.w.value);
        let (r2, s2, w2) = (&l2.r.value, &l2.s.value, &l2.w.value);
        let (r3, s3, w3) = (&l3.r.value, &l3.s.value, &l3.w.value);
        let z2 = if self.mutated(Mutation::ZzzSwapS) { s1 * s2 / s3 } else { s1 * s3 / s2 };
        let num = phi_tilde(d2, &z2, q)? * phi_tilde(d3, &(r3 * w2 / (s3 * w1)), q)? * phi_tilde(d4, &(r1 * w3 / (s1 * w2)), q)?;
        let den = phi_tilde(-d1, &(q * q * r1 * r3 / r2), q)? * phi_tilde(d3 + d4, &(r1 * r3 * w3 / (s1 * s3 * w1)), q)?;
        if den.is_zero() {
            return Err(KernelError::Degenerate("ZZZ denominator".into()));
        }
        Ok(pre * num / den)
    }

    /// The five Phi~ arguments of the ZZZ formula.
    pub fn zzz_arguments(&self) -> Option<[Scalar; 5]> {
        if self.kind != KernelType::ZZZ {
            return None;
        }
        let (l1, l2, l3) = (self.qt(1), self.qt(2), self.qt(3));
        let q = self.qq();
        let (r1, s1, w1) = (&l1.r.value, &l1.s.value, &l1.w.value);
        let (r2, s2, w2) = (&l2.r.value, &l2.s.value, &l2.w.value);
        let (r3, s3, w3) = (&l3.r.value, &l3.s.value, &l3.w.value);
        Some([
            s1 * s3 / s2,
            r3 * w2 / (s3 * w1),
            r1 * w3 / (s1 * w2),
            q * q * r1 * r3 / r2,
            r1 * r3 * w3 / (s1 * s3 * w1),
        ])
    }

    /// True when some ZZZ argument z has z q^m = 1 for an integer m, so that a
    /// Phi~ factor vanishes somewhere.
    pub fn zzz_singular(&self) -> bool {
        let q = self.qq();
        self.zzz_arguments().is_some_and(|zs| zs.iter().any(|z| log_q(&z.recip(), q).is_some()))
    }

    /// ZZZ element through the generic path, bypassing the precomputed tables.
    pub fn zzz_untabulated(&self, out: [i64; 3], inn: [i64; 3]) -> Result<Scalar, KernelError> {
        let mut k = self.clone();
        k.tab = Arc::new(Tables { zzz: None, qpow: self.tab.qpow.clone(), fac: self.tab.fac.clone() });
        let (out, inn) = k.reflect(out, inn);
        k.zzz(out, inn)
    }

    fn xy_ozz(&self) -> (Scalar, Scalar) {
        let (l2, l3) = (self.qt(2), self.qt(3));
        let mu = self.mu(1);
        let x = mu * mu * &l2.s.value / (&l2.r.value * &l2.w.value);
        let y = &l3.r.value * &l3.w.value / (mu * mu * &l3.s.value);
        (x, y)
    }

    fn xy_zzo(&self) -> (Scalar, Scalar) {
        let (l1, l2) = (self.qt(1), self.qt(2));
        let mu = self.mu(3);
        let x = &l2.s.value * &l2.w.value / (mu * mu * &l2.r.value);
        let y = mu * mu * &l1.r.value / (&l1.s.value * &l1.w.value);
        (x, y)
    }

    fn xy_zoz(&self) -> (Scalar, Scalar) {
        let (l1, l3) = (self.qt(1), self.qt(3));
        let mu = self.mu(2);
        let x = mu * mu * &l1.s.value / (&l1.r.value * &l1.w.value);
        let y = mu * mu * &l3.r.value / (&l3.s.value * &l3.w.value);
        (x, y)
    }

    fn ozz(&self, [a, b, c]: [i64; 3], [i, j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let (l2, l3) = (self.qt(2), self.qt(3));
        let mu = self.mu(1);
        let (r2, s2, t2, w2) = (&l2.r.value, &l2.s.value, &l2.t.value, &l2.w.value);
        let (r3, s3, t3) = (&l3.r.value, &l3.s.value, &l3.t.value);
        let q2 = self.qp(2);
        let (x, y) = self.xy_ozz();
        let e1 = if self.mutated(Mutation::OzzQExponent) { (a - b + j + 1) * c } else { (a - b + j - 1) * c };
        let pre = pw(&(r2 / r3), a)
            * pw(&(s3 / s2), i)
            * pw(&(t2 * w2 / (mu * s2)), -b + j)
            * pw(&(-(mu * t3) / r3), -c + k)
            * self.qp(e1 - (i - b + j - 1) * k - a * j + b * i);
        match self.form {
            SeriesForm::Sum => {
                let mut sum = Scalar::zero();
                for be in 0..=i {
                    sum += self.qp(be * (be + 2 * j - 2 * b - 1))
                        * pw(&-&y, be)
                        * self.qbin(i, be)?
                        * qpochhammer(&(&x * self.qp(2 * k - 2 * c - 2 * be + 2)), &q2, a)?;
                }
                Ok(pre * self.fac_inv(a)? * sum)
            }
            SeriesForm::Hyper => {
                let z = &x * self.qp(2 * k - 2 * c + 2);
                let phi = phi21_terminating(
                    &self.qp(-2 * i),
                    &(&q2 / &z),
                    &(self.qp(-2 * a + 2) / &z),
                    &q2,
                    &(&y * self.qp(2 * i + 2 * j - 2 * a - 2 * b)),
                    i,
                )?;
                Ok(pre * qpochhammer(&z, &q2, a)? * self.fac_inv(a)? * phi)
            }
        }
    }

    fn zzo(&self, [a, b, c]: [i64; 3], [i, j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let (l1, l2) = (self.qt(1), self.qt(2));
        let mu = self.mu(3);
        let (r1, s1, t1, w1) = (&l1.r.value, &l1.s.value, &l1.t.value, &l1.w.value);
        let (r2, s2, t2) = (&l2.r.value, &l2.s.value, &l2.t.value);
        let q2 = self.qp(2);
        let (x, y) = self.xy_zzo();
        let f4 = if self.mutated(Mutation::ZzoSign) { t1 * w1 / (mu * r1) } else { -(t1 * w1) / (mu * r1) };
        let pre = pw(&(r2 / r1), c)
            * pw(&(s1 / s2), k)
            * pw(&(mu * t2 / s2), -b + j)
            * pw(&f4, -a + i)
            * self.qp((c - b + j - 1) * a - (k - b + j - 1) * i - c * j + b * k);
        match self.form {
            SeriesForm::Sum => {
                let mut sum = Scalar::zero();
                for be in 0..=k {
                    sum += self.qp(be * (be + 2 * j - 2 * b - 1))
                        * pw(&-&y, be)
                        * self.qbin(k, be)?
                        * qpochhammer(&(&x * self.qp(2 * i - 2 * a - 2 * be + 2)), &q2, c)?;
                }
                Ok(pre * self.fac_inv(c)? * sum)
            }
            SeriesForm::Hyper => {
                let z = &x * self.qp(2 * i - 2 * a + 2);
                let phi = phi21_terminating(
                    &self.qp(-2 * k),
                    &(&q2 / &z),
                    &(self.qp(-2 * c + 2) / &z),
                    &q2,
                    &(&y * self.qp(2 * j + 2 * k - 2 * b - 2 * c)),
                    k,
                )?;
                Ok(pre * qpochhammer(&z, &q2, c)? * self.fac_inv(c)? * phi)
            }
        }
    }

    fn zoz(&self, [a, b, c]: [i64; 3], [i, j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let (l1, l3) = (self.qt(1), self.qt(3));
        let mu = self.mu(2);
        let (r1, s1, t1) = (&l1.r.value, &l1.s.value, &l1.t.value);
        let (r3, s3, t3, w3) = (&l3.r.value, &l3.s.value, &l3.t.value, &l3.w.value);
        let q2 = self.qp(2);
        let qm2 = self.qp(-2);
        let (x, y) = self.xy_zoz();
        let base1 = if self.mutated(Mutation::ZozSwap) { s1 / (mu * t1) } else { r1 / (mu * t1) };
        let pre = pw(&(s1 * s3), b) / pw(&(r1 * r3), j)
            * pw(&base1, a - i)
            * pw(&(mu * r3 / (t3 * w3)), c - k)
            * self.qp((j - b) * (a + c) + b * (a + c - i - k) - (i - a) * (k - c));
        match self.form {
            SeriesForm::Sum => {
                let mut sum = Scalar::zero();
                for be in 0..=b {
                    sum += self.qp(be * (be + 2 * i - 2 * a + 1))
                        * pw(&-&y, be)
                        * self.qbin(b, be)?
                        * qpochhammer(&(self.qp(2 * j + 2 * k - 2 * c - 2 * be) / &x), &qm2, be)?
                        * qpochhammer(&(self.qp(2 * k - 2 * c - 2 * be + 2) / &x), &q2, b - be)?;
                }
                Ok(pre * self.fac_inv(b)? * sum)
            }
            SeriesForm::Hyper => {
                let mut sum = Scalar::zero();
                for be in 0..=b {
                    let num = pw(&(self.qp(2 * i + 2 * j - 2 * a - 2 * b + 2) * &y), be)
                        * qpochhammer(&self.qp(-2 * b), &q2, be)?
                        * qpochhammer(&(self.qp(2 * c - 2 * k) * &x), &q2, be)?
                        * qpochhammer(&(self.qp(2 * c - 2 * j - 2 * k) * &x), &q2, 2 * be)?;
                    let den = qpochhammer(&q2, &q2, be)?
                        * qpochhammer(&(self.qp(-2 * b + 2 * c - 2 * k) * &x), &q2, 2 * be)?
                        * qpochhammer(&(self.qp(2 * c - 2 * j - 2 * k) * &x), &q2, be)?;
                    if den.is_zero() {
                        return Err(KernelError::Degenerate("ZOZ series denominator".into()));
                    }
                    sum += num / den;
                }
                Ok(pre * qpochhammer(&(self.qp(2 - 2 * c + 2 * k) / &x), &q2, b)? * self.fac_inv(b)? * sum)
            }
        }
    }

    fn ooz(&self, [a, b, c]: [i64; 3], [i, j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let l3 = self.qt(3);
        let mu2 = self.mu(2);
        let (r3, s3, t3, w3) = (&l3.r.value, &l3.s.value, &l3.t.value, &l3.w.value);
        let q2 = self.qp(2);
        let d = self.d;
        let e = half(a - c + j + k + d);
        let f = half(b + c + i - k - d);
        let qe = if self.mutated(Mutation::OozSign) { c * j + b * k } else { c * j - b * k };
        let v = pw(s3, i)
            * pw(&(mu2 * t3), -a)
            * pw(&(mu2 * s3 / (t3 * w3)), j)
            * pw(&(t3 * t3 * w3 / (r3 * s3)), e)
            * self.qp(qe)
            * qpochhammer(&self.qp(2 + 2 * e - 2 * j), &q2, j)?
            * qpochhammer(&self.qp(2 * a + 2), &q2, i - a)?
            * self.fac_inv(f)?
            * qpochhammer_inv(&self.qp(2 * a - 2 * e), &q2, e - a)?;
        Ok(v)
    }

    fn zoo(&self, [a, b, c]: [i64; 3], [i, j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let l1 = self.qt(1);
        let mu2 = self.mu(2);
        let (r1, s1, t1, w1) = (&l1.r.value, &l1.s.value, &l1.t.value, &l1.w.value);
        let q2 = self.qp(2);
        let d = self.d;
        let e = half(-a + c + i + j - d);
        let f = half(a + b - i + k + d);
        let lead = if self.mutated(Mutation::ZooSwap) { r1 } else { s1 };
        let v = pw(lead, k)
            * pw(&(mu2 / (t1 * w1)), c)
            * pw(&(s1 / (mu2 * t1)), j)
            * pw(&(t1 * t1 * w1 / (r1 * s1)), e)
            * self.qp(a * j - b * i)
            * qpochhammer(&self.qp(2 + 2 * e - 2 * j), &q2, j)?
            * qpochhammer(&self.qp(2 + 2 * c), &q2, k - c)?
            * self.fac_inv(f)?
            * qpochhammer_inv(&self.qp(2 * c - 2 * e), &q2, e - c)?;
        Ok(v)
    }

    fn ozo(&self, [a, b, c]: [i64; 3], [i, j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let l2 = self.qt(2);
        let mu3 = self.mu(3);
        let (r2, s2, t2, w2) = (&l2.r.value, &l2.s.value, &l2.t.value, &l2.w.value);
        let q2 = self.qp(2);
        let d = self.d;
        let e = half(i + j + k - b - d - 1);
        let f = half(a + b + c - j + d + 1);
        let qe = if self.mutated(Mutation::OzoExponent) { b * k + c * j } else { b * k - c * j };
        let v = pw(r2, c)
            * pw(&(mu3 * t2), -k)
            * pw(&(mu3 * r2 / (t2 * w2)), i)
            * pw(&(t2 * t2 * w2 / (r2 * s2)), e)
            * self.qp(qe)
            * qpochhammer(&self.qp(2 + 2 * e - 2 * k), &q2, k)?
            * self.fac_inv(f)?
            * qpochhammer_inv(&self.qp(2 * i - 2 * e), &q2, e - i)?;
        Ok(v)
    }

    fn ooo(&self, [a, b, c]: [i64; 3], [i, _j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let (m1, m2, m3) = (self.mu(1), self.mu(2), self.mu(3));
        let q2 = self.qp(2);
        let sgn = if self.mutated(Mutation::OooSign) { m1 / m3 } else { -(m1 / m3) };
        let ex = if self.mutated(Mutation::OooExponent) { b * (k - i - 1) } else { b * (k - i + 1) };
        let phi = phi21_terminating(
            &self.qp(-2 * b),
            &self.qp(-2 * i),
            &self.qp(-2 * a - 2 * b),
            &q2,
            &self.qp(-2 * c),
            b.min(i),
        )?;
        Ok(pw(&(m3 / m2), i) * pw(&sgn, b) * pw(&(m2 / m1), k) * self.qp(i * k + ex) * self.qbin(a + b, a)? * phi)
    }

    fn xxz(&self, [a, b, c]: [i64; 3], [i, j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let (l1, l2, l3) = (self.qt(1), self.qt(2), self.qt(3));
        let (r1, s1, t1, w1) = (&l1.r.value, &l1.s.value, &l1.t.value, &l1.w.value);
        let (r2, s2, t2, w2) = (&l2.r.value, &l2.s.value, &l2.t.value, &l2.w.value);
        let (r3, s3, t3, w3) = (&l3.r.value, &l3.s.value, &l3.t.value, &l3.w.value);
        let q2 = self.qp(2);
        let t = a - c + j + k;
        let h = t.rem_euclid(2);
        let g = (t - h) / 2;
        let lead = if self.mutated(Mutation::XxzSwap) { s1 * s2 / s3 } else { s1 * s3 / s2 };
        let v = pw(&lead, i)
            * pw(&(s1 * t3 / t2), -a)
            * pw(&(s1 * s3 * t2 * w2 / (r1 * s2 * t3 * w3)), j)
            * pw(&(r2 * s2 / (t2 * t2 * w2) * t3 * t3 * w3 / (r3 * s3)), g)
            * self.qp(c * j - b * k)
            * qpochhammer(&(self.qp(b + c + i - k + 2) * t1 * t2 * w2 / (r1 * s2)), &q2, g - a - b)?
            * qpochhammer(&(self.qp(h + 2) * t1 * w1 * t2 / (r2 * s1)), &q2, g)?
            * qpochhammer(&(self.qp(2 * a + 2) * t1 * t1 * w1 / (r1 * s1)), &q2, i - a)?
            * qpochhammer_inv(&(self.qp(-b + c + i - k) * r2 * t1 / (r1 * t2)), &q2, g - a)?
            * qpochhammer_inv(&(self.qp(h + 2) * s2 * t1 * w1 / (s1 * t2 * w2)), &q2, g - j)?
            * &self.consts[h as usize];
        Ok(v)
    }

    fn zxx(&self, [a, b, c]: [i64; 3], [i, j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let (l1, l2, l3) = (self.qt(1), self.qt(2), self.qt(3));
        let (r1, s1, t1, w1) = (&l1.r.value, &l1.s.value, &l1.t.value, &l1.w.value);
        let (r2, s2, t2, w2) = (&l2.r.value, &l2.s.value, &l2.t.value, &l2.w.value);
        let (r3, s3, t3, w3) = (&l3.r.value, &l3.s.value, &l3.t.value, &l3.w.value);
        let q2 = self.qp(2);
        let t = -a + c + i + j;
        let h = t.rem_euclid(2);
        let g = (t - h) / 2;
        let qe = if self.mutated(Mutation::ZxxExponent) { a * j + b * i } else { a * j - b * i };
        let v = pw(&(s1 * s3 / s2), k)
            * pw(&(s3 * t1 * w1 / (t2 * w2)), -c)
            * pw(&(s1 * s3 * t2 / (r3 * s2 * t1)), j)
            * pw(&(r2 * s2 / (t2 * t2 * w2) * t1 * t1 * w1 / (r1 * s1)), g)
            * self.qp(qe)
            * qpochhammer(&(self.qp(a + b - i + k + 2) * t2 * t3 * w3 / (r3 * s2)), &q2, g - b - c)?
            * qpochhammer(&(self.qp(h + 2) * t2 * t3 * w2 / (r2 * s3)), &q2, g)?
            * qpochhammer(&(self.qp(2 * c + 2) * t3 * t3 * w3 / (r3 * s3)), &q2, k - c)?
            * qpochhammer_inv(&(self.qp(a - b - i + k) * r2 * t3 * w3 / (r3 * t2 * w2)), &q2, g - c)?
            * qpochhammer_inv(&(self.qp(h + 2) * s2 * t3 / (s3 * t2)), &q2, g - j)?
            * &self.consts[h as usize];
        Ok(v)
    }

    fn xzx(&self, [_a, b, c]: [i64; 3], [i, j, k]: [i64; 3]) -> Result<Scalar, KernelError> {
        let (l1, l2, l3) = (self.qt(1), self.qt(2), self.qt(3));
        let (r1, s1, t1, w1) = (&l1.r.value, &l1.s.value, &l1.t.value, &l1.w.value);
        let (r2, s2, t2, w2) = (&l2.r.value, &l2.s.value, &l2.t.value, &l2.w.value);
        let (r3, s3, t3, w3) = (&l3.r.value, &l3.s.value, &l3.t.value, &l3.w.value);
        let q2 = self.qp(2);
        let t = -b + i + j + k;
        let h = t.rem_euclid(2);
        let g = (t - h) / 2;
        let first = self.qp(h + 1) * t1 * t3 * w3 / (s1 * s3);
        let first = if self.mutated(Mutation::XzxSign) { first } else { -first };
        let v = pw(&(r2 / (r1 * r3)), c)
            * pw(&(s1 * t3 / t2), k)
            * pw(&(r2 * t3 * w3 / (r3 * t2 * w2)), i)
            * pw(&(r3 * s3 / (t3 * t3 * w3) * t2 * t2 * w2 / (r2 * s2)), g)
            * self.qp(b * k - c * j)
            * qpochhammer(&first, &q2, g)?
            * qpochhammer_inv(&(-(self.qp(h + 1) * r3 * t1 / (s1 * t3))), &q2, g - k)?
            * qpochhammer(&(-(self.qp(-h + 1) * s3 * t1 * w1 / (r1 * t3 * w3))), &q2, i - g)?
            * qpochhammer_inv(&(-(self.qp(-h + 3) * t1 * t3 * w1 / (r1 * r3))), &q2, c + i - g)?
            * &self.consts[h as usize];
        Ok(v)
    }

    /// The kernel of the inverse operator (locally finite types only).
    pub fn inverse(&self) -> Result<RKernel, KernelError> {
        let inv_mu = |l: &LineParams| LineParams::Mu(l.mu().unwrap().recip());
        let inv_qt = |l: &LineParams| LineParams::Quartet(l.quartet().unwrap().inverted());
        let (lines, d) = match self.kind {
            KernelType::OOO => ([inv_mu(&self.lines[0]), inv_mu(&self.lines[1]), inv_mu(&self.lines[2])], 0),
            KernelType::OOZ => ([inv_mu(&self.lines[0]), inv_mu(&self.lines[1]), inv_qt(&self.lines[2])], -self.d),
            KernelType::ZOO => ([inv_qt(&self.lines[0]), inv_mu(&self.lines[1]), inv_mu(&self.lines[2])], -self.d),
            k => return Err(KernelError::NotLocallyFinite(k)),
        };
        RKernel::new(self.kind, self.q.clone(), lines, d)
    }

    /// Element of the inverse operator.
    pub fn inverse_element(&self, out: [i64; 3], inn: [i64; 3]) -> Result<Scalar, KernelError> {
        self.inverse()?.element(out, inn)
    }

    /// Every out-triple with support for a fixed in-triple (locally finite types only).
    pub fn out_fiber(&self, inn: [i64; 3]) -> Result<Vec<[i64; 3]>, KernelError> {
        let [i, j, k] = inn;
        let d = self.d;
        let mut v = Vec::new();
        match self.kind {
            KernelType::OOO => {
                for b in 0..=(i + j).min(j + k) {
                    v.push([i + j - b, b, j + k - b]);
                }
            }
            KernelType::OOZ => {
                for a in 0..=(i + j) {
                    let b = i + j - a;
                    for c in (k + d - b - i)..=(k + d - (b - i).abs()) {
                        v.push([a, b, c]);
                    }
                }
            }
            KernelType::ZOO => {
                for b in 0..=(j + k) {
                    let c = j + k - b;
                    for a in (i - d - b - k)..=(i - d - (b - k).abs()) {
                        v.push([a, b, c]);
                    }
                }
            }
            k => return Err(KernelError::NotLocallyFinite(k)),
        }
        v.retain(|o| self.support(*o, inn));
        Ok(v)
    }

    /// Short parameter listing for reports.
    pub fn describe_params(&self) -> Vec<(String, String)> {
        use crate::exactnum::fmt_scalar;
        let mut v = vec![("q".to_string(), fmt_scalar(&self.q.value))];
        for (n, l) in self.lines.iter().enumerate() {
            match l {
                LineParams::Mu(m) => v.push((format!("mu{}", n + 1), fmt_scalar(&m.value))),
                LineParams::Quartet(qt) => {
                    for (name, p) in [("r", &qt.r), ("s", &qt.s), ("t", &qt.t), ("w", &qt.w)] {
                        v.push((format!("{}{}", name, n + 1), fmt_scalar(&p.value)));
                    }
                }
            }
        }
        if self.kind.has_sector_d() {
            v.push(("d".into(), self.d.to_string()));
        }
        v
    }
}

fn half(x: i64) -> i64 {
    x.div_euclid(2)
}

/// Convenience for tests: integer scalar.
pub fn s(n: i64) -> Scalar {
    int(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn parse_types() {
        assert_eq!("ozz".parse::<KernelType>().unwrap(), KernelType::OZZ);
        assert!("QQQ".parse::<KernelType>().is_err());
        assert_eq!(KernelType::ALL.len(), 11);
    }

    #[test]
    fn ooo_at_zero_is_one() {
        let k = RKernel::sample(KernelType::OOO, 3, 0).unwrap();
        assert_eq!(k.element([0, 0, 0], [0, 0, 0]).unwrap(), s(1));
    }

    #[test]
    fn ooz_boundary() {
        for d in -2..=3 {
            let k = RKernel::sample(KernelType::OOZ, 4, d).unwrap();
            for c in -4..=5 {
                let v = k.element([0, 0, c], [0, 0, 0]).unwrap();
                assert_eq!(v, if c == d { s(1) } else { s(0) });
            }
        }
    }

    #[test]
    fn zoo_boundary() {
        for d in -2..=3 {
            let k = RKernel::sample(KernelType::ZOO, 5, d).unwrap();
            for a in -5..=4 {
                let v = k.element([a, 0, 0], [0, 0, 0]).unwrap();
                assert_eq!(v, if a == -d { s(1) } else { s(0) });
            }
        }
    }

    #[test]
    fn zzz_single_step_value() {
        let k = RKernel::sample(KernelType::ZZZ, 6, 0).unwrap();
        let (l1, l2, l3) = (k.qt(1), k.qt(2), k.qt(3));
        let (r1, s1, t1, w1) = (&l1.r.value, &l1.s.value, &l1.t.value, &l1.w.value);
        let (t2, w2) = (&l2.t.value, &l2.w.value);
        let (r3, s3, w3) = (&l3.r.value, &l3.s.value, &l3.w.value);
        let expect = t2 * w2 / (s3 * t1 * w1) * (s(1) - r1 * w3 / (s1 * w2)) / (s(1) - r1 * r3 * w3 / (s1 * s3 * w1));
        assert_eq!(k.element([1, 0, 0], [0, 1, 0]).unwrap(), expect);
        assert_eq!(k.element([0, 0, 0], [0, 0, 0]).unwrap(), s(1));
    }

    #[test]
    fn sector_examples() {
        let k = RKernel::sample(KernelType::ZZZ, 1, 0).unwrap();
        let sd = k.sector_of([0; 3], [0; 3]);
        assert_eq!(sd.d, Some([0; 4]));
        assert_eq!(sd.twice_phi, Some(0));
        let k = RKernel::sample(KernelType::OOZ, 1, 2).unwrap();
        let sd = k.sector_of([0; 3], [0; 3]);
        assert_eq!((sd.e, sd.f), (Some(1), Some(-1)));
        let k = RKernel::sample(KernelType::XXZ, 1, 0).unwrap();
        let sd = k.sector_of([3, 0, 0], [0, 1, 1]);
        assert_eq!((sd.g, sd.h), (Some(2), Some(1)));
    }

    #[test]
    fn support_examples() {
        let k = RKernel::sample(KernelType::OOZ, 2, 0).unwrap();
        // k - c = b + i + 1
        assert!(!k.support([1, 1, 0], [1, 1, 3]));
        let k = RKernel::sample(KernelType::OOO, 2, 0).unwrap();
        assert!(!k.support([1, 1, 0], [0, 1, 0]));
        let k = RKernel::sample(KernelType::ZZZ, 2, 0).unwrap();
        assert!(k.support([-3, 7, 2], [5, -1, 0]));
    }

    #[test]
    fn non_integral_sector_rejected() {
        let k = RKernel::sample(KernelType::OOZ, 2, 1).unwrap();
        let mut lines = k.lines.clone();
        lines[0] = LineParams::Mu(Param::square(rat(5, 7)));
        assert!(matches!(RKernel::new(KernelType::OOZ, k.q.clone(), lines, 1), Err(KernelError::NonIntegralSector(_))));
        let lines = k.lines.clone();
        assert!(RKernel::new(KernelType::OOZ, k.q.clone(), lines, 2).is_err());
    }

    #[test]
    fn ozo_mu_relation_is_negative() {
        let k = RKernel::sample(KernelType::OZO, 8, 1).unwrap();
        assert_eq!(*k.mu(1), -(k.mu(3) * &k.q.value));
    }

    #[test]
    fn sign_variant_reflects_indices() {
        let k = RKernel::sample(KernelType::ZZZ, 9, 0).unwrap();
        let kv = k.clone().with_signs([-1, 1, 1]);
        assert_eq!(kv.element([2, 1, 0], [1, 0, 2]).unwrap(), k.element([-2, 1, 0], [-1, 0, 2]).unwrap());
        let kp = k.clone().with_signs([1, 1, 1]);
        assert_eq!(kp.element([2, 1, 0], [1, 0, 2]).unwrap(), k.element([2, 1, 0], [1, 0, 2]).unwrap());
    }

    #[test]
    fn inverse_rejects_non_locally_finite() {
        let k = RKernel::sample(KernelType::OZZ, 1, 0).unwrap();
        assert!(matches!(k.inverse(), Err(KernelError::NotLocallyFinite(_))));
    }
}
