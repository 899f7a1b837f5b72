//! The quantized coordinate ring A_q(sl3), its Weyl-algebra representations, and the
//! intertwining relations satisfied by the OOO and ZZZ kernels.

use crate::exactnum::{fmt_scalar, int, pw, LineParams, Param, Quartet, Sampler, Scalar};
use crate::kernels::{KernelError, KernelType, RKernel};
use crate::lops::{build_l, triple_composite, Side};
use crate::report::Report;
use crate::verify::{Memo, Unreduced, Window};
use crate::weyl::{apply_rep, RepTag, StateVector, TensorElement, WeylElement};
use num_traits::{One, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AqError {
    #[error("rho parameter {0} must be nonzero")]
    ZeroParameter(&'static str),
    #[error("representation index must be 1 or 2, got {0}")]
    BadRep(u8),
    #[error("generator index ({0},{1}) out of range")]
    BadIndex(usize, usize),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Images t_ij -> Weyl element under rho_1 or rho_2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorImage {
    pub which: u8,
    pub u: Scalar,
    pub g: Scalar,
    pub h: Scalar,
    pub t: [[WeylElement; 3]; 3],
}

impl GeneratorImage {
    /// Image of t_lm, 1-based.
    pub fn get(&self, l: usize, m: usize) -> &WeylElement {
        &self.t[l - 1][m - 1]
    }
}

pub fn rho_images(which: u8, q: &Scalar, u: &Scalar, g: &Scalar, h: &Scalar) -> Result<GeneratorImage, AqError> {
    for (name, x) in [("u", u), ("g", g), ("h", h)] {
        if x.is_zero() {
            return Err(AqError::ZeroParameter(name));
        }
    }
    let mut t: [[WeylElement; 3]; 3] = Default::default();
    // Z^-1 (u - g h X^2), g X, -q h X, Z
    let big = WeylElement::from_terms([((-1, 0), u.clone()), ((-1, 2), -(g * h))]);
    let gx = WeylElement::mono(g.clone(), 0, 1);
    let hx = WeylElement::mono(-(q * h), 0, 1);
    let inv_u = WeylElement::scalar(u.recip());
    match which {
        1 => {
            t[0][0] = big;
            t[0][1] = gx;
            t[1][0] = hx;
            t[1][1] = WeylElement::z();
            t[2][2] = inv_u;
        }
        2 => {
            t[0][0] = inv_u;
            t[1][1] = big;
            t[1][2] = gx;
            t[2][1] = hx;
            t[2][2] = WeylElement::z();
        }
        w => return Err(AqError::BadRep(w)),
    }
    Ok(GeneratorImage { which, u: u.clone(), g: g.clone(), h: h.clone(), t })
}

/// rho_{O} for a line with parameter mu: (u, g, h) = (1, mu^-1, mu).
pub fn rho_o(which: u8, q: &Scalar, mu: &Scalar) -> Result<GeneratorImage, AqError> {
    rho_images(which, q, &Scalar::one(), &mu.recip(), mu)
}

fn prod(q: &Scalar, fs: &[&WeylElement]) -> WeylElement {
    fs.iter().fold(WeylElement::one(), |acc, f| acc.mul(f, q))
}

/// Length of a permutation of (1,2,3).
fn inversions(p: [usize; 3]) -> i64 {
    let mut n = 0;
    for i in 0..3 {
        for j in i + 1..3 {
            if p[i] > p[j] {
                n += 1;
            }
        }
    }
    n
}

/// Every defining relation as (name, lhs - rhs).
fn relation_differences(img: &GeneratorImage, q: &Scalar) -> Vec<(String, WeylElement)> {
    let t = |i: usize, j: usize| img.get(i, j);
    let mut out = Vec::new();
    let qq = q - q.recip();
    for i in 1..=3 {
        for j in i + 1..=3 {
            for k in 1..=3 {
                for l in 1..=3 {
                    if k == l {
                        continue;
                    }
                    let comm = prod(q, &[t(i, k), t(j, l)]).sub(&prod(q, &[t(j, l), t(i, k)]));
                    let rhs = if k > l { WeylElement::zero() } else { prod(q, &[t(j, k), t(i, l)]).scale(&qq) };
                    out.push((format!("[t{}{}, t{}{}]", i, k, j, l), comm.sub(&rhs)));
                }
            }
        }
    }
    for k in 1..=3 {
        for i in 1..=3 {
            for j in i + 1..=3 {
                let col = prod(q, &[t(i, k), t(j, k)]).sub(&prod(q, &[t(j, k), t(i, k)]).scale(q));
                out.push((format!("t{i}{k} t{j}{k} = q t{j}{k} t{i}{k}"), col));
                let row = prod(q, &[t(k, i), t(k, j)]).sub(&prod(q, &[t(k, j), t(k, i)]).scale(q));
                out.push((format!("t{k}{i} t{k}{j} = q t{k}{j} t{k}{i}"), row));
            }
        }
    }
    let mut det = WeylElement::zero();
    for p in [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]] {
        let sign = pw(&-q.clone(), inversions(p));
        det = det.add(&prod(q, &[t(1, p[0]), t(2, p[1]), t(3, p[2])]).scale(&sign));
    }
    out.push(("quantum determinant = 1".into(), det.sub(&WeylElement::one())));
    out
}

/// Relations of the coordinate ring checked as operators on the window under `tag`,
/// plus as identities in the Weyl algebra.
pub fn check_coordinate_ring_relations(img: &GeneratorImage, tag: RepTag, q: &Scalar, window: &Window) -> Report {
    let mut rep = Report::new("algebra-check", &format!("rho{} {:?}", img.which, tag));
    rep.window = Some(window.describe());
    rep.params.insert("u".into(), fmt_scalar(&img.u));
    rep.params.insert("g".into(), fmt_scalar(&img.g));
    rep.params.insert("h".into(), fmt_scalar(&img.h));
    let letter = if tag == RepTag::O { 'O' } else { 'Z' };
    for (name, d) in relation_differences(img, q) {
        rep.bump("relations", 1);
        if !d.is_zero() {
            rep.bump("weyl_nonzero", 1);
        }
        for m in window.axis(letter) {
            rep.count_check();
            match apply_rep(tag, q, &d, &StateVector::basis(m)) {
                Ok(v) if v.coeffs.is_empty() => {}
                Ok(v) => rep.fail(format!("{} on |{}>", name, m), format!("{:?}", v.coeffs), "0".into()),
                Err(e) => rep.fail(format!("{} on |{}>", name, m), e.to_string(), "0".into()),
            }
        }
    }
    rep
}

/// (rho_a (x) rho_b (x) rho_c)(Delta t_lm), or of Delta' t_lm when `primed`.
pub fn coproduct_operator(
    reps: [&GeneratorImage; 3],
    l: usize,
    m: usize,
    primed: bool,
) -> Result<TensorElement, AqError> {
    if !(1..=3).contains(&l) || !(1..=3).contains(&m) {
        return Err(AqError::BadIndex(l, m));
    }
    let mut out = TensorElement::zero();
    for j in 1..=3 {
        for k in 1..=3 {
            let (x, y, z) = if primed {
                (reps[0].get(k, m), reps[1].get(j, k), reps[2].get(l, j))
            } else {
                (reps[0].get(l, j), reps[1].get(j, k), reps[2].get(k, m))
            };
            if x.is_zero() || y.is_zero() || z.is_zero() {
                continue;
            }
            out = out.add(&TensorElement::tensor(x, y, z));
        }
    }
    Ok(out)
}

/// Single-equation violations of the ZZZ parameter constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Violation {
    R1T1R2T2,
    S2T2S3T3,
    R2R1R3,
    S1S3S2,
    W1,
    W2,
    W3,
    U1U2,
    G1H1G2H2,
}

impl Violation {
    pub const ALL: [Violation; 9] = [
        Violation::R1T1R2T2,
        Violation::S2T2S3T3,
        Violation::R2R1R3,
        Violation::S1S3S2,
        Violation::W1,
        Violation::W2,
        Violation::W3,
        Violation::U1U2,
        Violation::G1H1G2H2,
    ];

    pub fn describe(self) -> &'static str {
        match self {
            Violation::R1T1R2T2 => "r1/t1 = r2/t2",
            Violation::S2T2S3T3 => "s2/t2 = s3/t3",
            Violation::R2R1R3 => "r2/(r1 r3) = u",
            Violation::S1S3S2 => "s1 s3/s2 = u^2",
            Violation::W1 => "t1^2 w1/(r1 s1) = p/u",
            Violation::W2 => "t2^2 w2/(r2 s2) = p/u",
            Violation::W3 => "t3^2 w3/(r3 s3) = p/u",
            Violation::U1U2 => "u1 = u2",
            Violation::G1H1G2H2 => "g1 h1 = g2 h2",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

/// Free parameters of the ZZZ mode; everything else is derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZzzConfig {
    pub q: Param,
    pub u: Param,
    pub p: Param,
    pub h: [Param; 2],
    pub t: [Param; 3],
    pub r1: Param,
    pub s3: Param,
    pub violation: Option<Violation>,
}

/// Factor applied by a violation; a square so that witnesses survive.
fn bump() -> Param {
    Param::square(int(2))
}

impl ZzzConfig {
    /// A point whose kernel, and each single-violation variant, has no vanishing Phi~ factor. Under the constraints every Phi~
    /// argument is a power of u times a power of q, so small draws collide often.
    pub fn sample(seed: u64) -> Self {
        let mut s = Sampler::new(seed);
        loop {
            let c = ZzzConfig {
                q: s.param(),
                u: s.param(),
                p: s.param(),
                h: [s.param(), s.param()],
                t: [s.param(), s.param(), s.param()],
                r1: s.param(),
                s3: s.param(),
                violation: None,
            };
            // the single-violation variants must stay regular too
            let regular = |c: &ZzzConfig| c.kernel().is_ok_and(|k| !k.zzz_singular());
            if regular(&c) && Violation::ALL.iter().all(|v| regular(&c.clone().with_violation(Some(*v)))) {
                return c;
            }
        }
    }

    pub fn with_violation(mut self, v: Option<Violation>) -> Self {
        self.violation = v;
        self
    }

    fn off(&self, v: Violation, x: Param) -> Param {
        if self.violation == Some(v) {
            x.mul(&bump())
        } else {
            x
        }
    }

    /// The three quartets (r_i, s_i, t_i, w_i).
    pub fn quartets(&self) -> [Quartet; 3] {
        let [t1, t2, t3] = self.t.clone();
        let u = &self.u;
        let r1 = self.r1.clone();
        let s3 = self.s3.clone();
        let r2 = self.off(Violation::R1T1R2T2, r1.mul(&t2).div(&t1));
        let s2 = self.off(Violation::S2T2S3T3, s3.mul(&t2).div(&t3));
        let r3 = self.off(Violation::R2R1R3, r2.div(&u.mul(&r1)));
        let s1 = self.off(Violation::S1S3S2, u.pow(2).mul(&s2).div(&s3));
        let pu = self.p.div(u);
        let w = |r: &Param, s: &Param, t: &Param| pu.mul(r).mul(s).div(&t.pow(2));
        let w1 = self.off(Violation::W1, w(&r1, &s1, &t1));
        let w2 = self.off(Violation::W2, w(&r2, &s2, &t2));
        let w3 = self.off(Violation::W3, w(&r3, &s3, &t3));
        [
            Quartet { r: r1, s: s1, t: t1, w: w1 },
            Quartet { r: r2, s: s2, t: t2, w: w2 },
            Quartet { r: r3, s: s3, t: t3, w: w3 },
        ]
    }

    /// (u_i, g_i, h_i) for rho_1 and rho_2.
    pub fn rho_params(&self) -> [[Scalar; 3]; 2] {
        let u1 = self.u.value.clone();
        let u2 = self.off(Violation::U1U2, self.u.clone()).value;
        let g1 = self.p.div(&self.h[0]).value;
        let g2 = self.off(Violation::G1H1G2H2, self.p.div(&self.h[1])).value;
        [[u1, g1, self.h[0].value.clone()], [u2, g2, self.h[1].value.clone()]]
    }

    pub fn kernel(&self) -> Result<RKernel, KernelError> {
        let lines = self.quartets().map(LineParams::Quartet);
        RKernel::new(KernelType::ZZZ, self.q.clone(), lines, 0)
    }

    /// Constant B_lm with A_lm = (-q)^(l-m) B_lm.
    pub fn b_const(&self, l: usize, m: usize) -> Scalar {
        let [qa, qb, qc] = self.quartets();
        let (r1, r2, s2) = (&qa.r.value, &qb.r.value, &qb.s.value);
        let (t1, t2, t3) = (&qa.t.value, &qb.t.value, &qc.t.value);
        let (u, p) = (&self.u.value, &self.p.value);
        let (h1, h2) = (&self.h[0].value, &self.h[1].value);
        let one = Scalar::one();
        match (l, m) {
            (1, 1) => &one / (r2 * r2 * s2),
            (1, 2) => p * u / (h1 * r2 * s2 * t3),
            (1, 3) => p * p / (h1 * h2 * u * r1 * t2 * t3),
            (2, 1) => h1 * t3 / (p * r2 * r2 * s2),
            (2, 2) => u / (r2 * s2),
            (2, 3) => p / (h2 * r2 * t1 * u),
            (3, 1) => h1 * h2 * t1 * t3 / (p * p * r2 * r2 * s2),
            (3, 2) => h2 * t1 * u / (p * r2 * s2),
            (3, 3) => &one / (r2 * u),
            _ => panic!("generator index out of range"),
        }
    }

    pub fn a_const(&self, l: usize, m: usize) -> Scalar {
        pw(&-self.q.value.clone(), l as i64 - m as i64) * self.b_const(l, m)
    }

    pub fn describe(&self) -> Vec<(String, String)> {
        let mut v = vec![
            ("q".to_string(), fmt_scalar(&self.q.value)),
            ("u".into(), fmt_scalar(&self.u.value)),
            ("p".into(), fmt_scalar(&self.p.value)),
            ("h1".into(), fmt_scalar(&self.h[0].value)),
            ("h2".into(), fmt_scalar(&self.h[1].value)),
        ];
        for (n, qt) in self.quartets().iter().enumerate() {
            v.push((format!("rstw{}", n + 1), qt.to_string()));
        }
        if let Some(x) = self.violation {
            v.push(("violated".into(), x.to_string()));
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IntertwinerConfig {
    /// R is the OOO kernel at (mu1, mu2, mu1).
    Ooo { q: Param, mu1: Param, mu2: Param },
    Zzz(ZzzConfig),
}

impl IntertwinerConfig {
    pub fn sample_ooo(seed: u64) -> Self {
        let mut s = Sampler::new(seed);
        IntertwinerConfig::Ooo { q: s.param(), mu1: s.param(), mu2: s.param() }
    }

    pub fn q(&self) -> &Param {
        match self {
            IntertwinerConfig::Ooo { q, .. } => q,
            IntertwinerConfig::Zzz(c) => &c.q,
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            IntertwinerConfig::Ooo { .. } => "OOO",
            IntertwinerConfig::Zzz(_) => "ZZZ",
        }
    }

    pub fn kernel(&self) -> Result<RKernel, KernelError> {
        match self {
            IntertwinerConfig::Ooo { q, mu1, mu2 } => {
                let ls = [mu1, mu2, mu1].map(|m| LineParams::Mu(m.clone()));
                RKernel::new(KernelType::OOO, q.clone(), ls, 0)
            }
            IntertwinerConfig::Zzz(c) => c.kernel(),
        }
    }

    /// Representation triples acting before and after R.
    pub fn rep_triples(&self) -> Result<([GeneratorImage; 3], [GeneratorImage; 3]), AqError> {
        let q = &self.q().value;
        match self {
            IntertwinerConfig::Ooo { mu1, mu2, .. } => {
                let (m1, m2) = (&mu1.value, &mu2.value);
                Ok((
                    [rho_o(1, q, m1)?, rho_o(2, q, m2)?, rho_o(1, q, m1)?],
                    [rho_o(2, q, m1)?, rho_o(1, q, m2)?, rho_o(2, q, m1)?],
                ))
            }
            IntertwinerConfig::Zzz(c) => {
                let [[u1, g1, h1], [u2, g2, h2]] = c.rho_params();
                let r1 = rho_images(1, q, &u1, &g1, &h1)?;
                let r2 = rho_images(2, q, &u2, &g2, &h2)?;
                Ok(([r1.clone(), r2.clone(), r1.clone()], [r2.clone(), r1, r2]))
            }
        }
    }

    fn tag(&self) -> RepTag {
        match self {
            IntertwinerConfig::Ooo { .. } => RepTag::O,
            IntertwinerConfig::Zzz(_) => RepTag::ZPlus,
        }
    }
}

fn t3(x: [i64; 3]) -> String {
    format!("({},{},{})", x[0], x[1], x[2])
}

/// R rho(Delta' t_lm) = rho(Delta t_lm) R for all nine generators, matrix element by matrix element.
pub fn intertwiner_check(cfg: &IntertwinerConfig, window: &Window) -> Result<Report, AqError> {
    let k = cfg.kernel()?;
    let q = cfg.q().value.clone();
    let mut rep = Report::new("intertwiner", cfg.mode());
    rep.window = Some(window.describe());
    match cfg {
        IntertwinerConfig::Ooo { mu1, mu2, .. } => {
            rep.params.insert("q".into(), fmt_scalar(&q));
            rep.params.insert("mu1".into(), fmt_scalar(&mu1.value));
            rep.params.insert("mu2".into(), fmt_scalar(&mu2.value));
        }
        IntertwinerConfig::Zzz(c) => rep.params.extend(c.describe()),
    }
    let (before, after) = cfg.rep_triples()?;
    let tag = cfg.tag();
    let tags = [tag; 3];
    let letter = if tag == RepTag::O { 'O' } else { 'Z' };
    let boxes = window.box3([letter; 3]);
    let mut memo = Memo::new(&k);
    for l in 1..=3 {
        for m in 1..=3 {
            let x = coproduct_operator([&before[0], &before[1], &before[2]], l, m, true)?;
            let y = coproduct_operator([&after[0], &after[1], &after[2]], l, m, false)?;
            rep.bump("generators", 1);
            let mut fws = Vec::with_capacity(boxes.len());
            for inn in &boxes {
                match x.forward(tags, &q, *inn) {
                    Ok(fw) => fws.push(fw),
                    Err(e) => {
                        rep.fail(format!("t{}{} in={}", l, m, t3(*inn)), e.to_string(), "leaves F+".into());
                        fws.push(Vec::new());
                    }
                }
            }
            let trs: Vec<_> = boxes.iter().map(|o| y.transpose(tags, &q, *o)).collect();
            for (ii, inn) in boxes.iter().enumerate() {
                for (oi, out) in boxes.iter().enumerate() {
                    let mut lhs = Unreduced::zero();
                    for (mid, c) in &fws[ii] {
                        lhs.add_product(c, memo.get(*out, *mid)?);
                    }
                    let mut rhs = Unreduced::zero();
                    for (mid, c) in &trs[oi] {
                        rhs.add_product(c, memo.get(*mid, *inn)?);
                    }
                    rep.count_check();
                    if !lhs.is_zero() {
                        rep.bump("nonzero", 1);
                    }
                    if !lhs.equals(&rhs) {
                        rep.fail(
                            format!("t{}{} out={} in={}", l, m, t3(*out), t3(*inn)),
                            fmt_scalar(&lhs.reduce()),
                            fmt_scalar(&rhs.reduce()),
                        );
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// l -> abc and m -> ijk.
pub fn abc_of(l: usize) -> [u8; 3] {
    [[0, 0, 1], [0, 1, 0], [1, 0, 0]][l - 1]
}
pub fn ijk_of(m: usize) -> [u8; 3] {
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]][m - 1]
}
/// l -> i'j'k' and m -> a'b'c' for the substituted composites.
pub fn ijk_primed_of(l: usize) -> [u8; 3] {
    [[1, 1, 0], [1, 0, 1], [0, 1, 1]][l - 1]
}
pub fn abc_primed_of(m: usize) -> [u8; 3] {
    [[0, 1, 1], [1, 0, 1], [1, 1, 0]][m - 1]
}

fn cat(a: [u8; 3], b: [u8; 3]) -> [u8; 6] {
    [a[0], a[1], a[2], b[0], b[1], b[2]]
}

/// Each coproduct image equals a constant times a triple composite of L operators:
/// A_lm against the plain composites and B_lm against the r<->s, t->tw, w->1/w ones.
/// The comparison is exact in the tensor cube of the Weyl algebra and again on the window.
pub fn prop41_constant_check(cfg: &ZzzConfig, window: &Window) -> Result<Report, AqError> {
    let q = cfg.q.value.clone();
    let mut rep = Report::new("prop41", "ZZZ");
    rep.window = Some(window.describe());
    rep.params.extend(cfg.describe());
    let full = IntertwinerConfig::Zzz(cfg.clone());
    let (before, after) = full.rep_triples()?;
    let qts = cfg.quartets();
    let build = |qt: &Quartet| build_l(RepTag::ZPlus, &q, &LineParams::Quartet(qt.clone())).expect("quartet line");
    let ls = [build(&qts[0]), build(&qts[1]), build(&qts[2])];
    let subs = [build(&qts[0].inverted()), build(&qts[1].inverted()), build(&qts[2].inverted())];
    let lr = [&ls[0], &ls[1], &ls[2]];
    let sr = [&subs[0], &subs[1], &subs[2]];
    let tags = [RepTag::ZPlus; 3];
    let boxes = window.box3(['Z'; 3]);
    for l in 1..=3 {
        for m in 1..=3 {
            let x = coproduct_operator([&before[0], &before[1], &before[2]], l, m, true)?;
            let y = coproduct_operator([&after[0], &after[1], &after[2]], l, m, false)?;
            let v = cat(abc_of(l), ijk_of(m));
            let vp = cat(abc_primed_of(m), ijk_primed_of(l));
            let (a, b) = (cfg.a_const(l, m), cfg.b_const(l, m));
            let cases = [
                ("A, Delta'", &x, triple_composite(Side::Left, lr, v).scale(&a)),
                ("A, Delta", &y, triple_composite(Side::Right, lr, v).scale(&a)),
                ("B, Delta'", &x, triple_composite(Side::Right, sr, vp).scale(&b)),
                ("B, Delta", &y, triple_composite(Side::Left, sr, vp).scale(&b)),
            ];
            for (name, lhs, rhs) in cases {
                rep.bump("identities", 1);
                rep.count_check();
                if *lhs != rhs {
                    rep.fail(format!("t{}{} {} (algebra)", l, m, name), lhs.to_string(), rhs.to_string());
                    continue;
                }
                for inn in &boxes {
                    rep.count_check();
                    let f1 = lhs.forward(tags, &q, *inn).expect("F has no lower bound");
                    let f2 = rhs.forward(tags, &q, *inn).expect("F has no lower bound");
                    if f1 != f2 {
                        rep.fail(format!("t{}{} {} in={}", l, m, name, t3(*inn)), format!("{:?}", f1), format!("{:?}", f2));
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Ratio of rho(Delta' t_lm) to the plain composite, when they are proportional.
pub fn measured_a(cfg: &ZzzConfig, l: usize, m: usize) -> Result<Option<Scalar>, AqError> {
    let q = cfg.q.value.clone();
    let (before, _) = IntertwinerConfig::Zzz(cfg.clone()).rep_triples()?;
    let x = coproduct_operator([&before[0], &before[1], &before[2]], l, m, true)?;
    let qts = cfg.quartets();
    let build = |qt: &Quartet| build_l(RepTag::ZPlus, &q, &LineParams::Quartet(qt.clone())).expect("quartet line");
    let ls = [build(&qts[0]), build(&qts[1]), build(&qts[2])];
    let c = triple_composite(Side::Left, [&ls[0], &ls[1], &ls[2]], cat(abc_of(l), ijk_of(m)));
    Ok(x.ratio_to(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    #[test]
    fn rho_matrix_entries() {
        let q = rat(2, 3);
        let (u, g, h) = (rat(5, 2), rat(-1, 3), rat(7, 4));
        let r1 = rho_images(1, &q, &u, &g, &h).unwrap();
        assert_eq!(r1.get(3, 3), &WeylElement::scalar(u.recip()));
        assert_eq!(r1.get(2, 1), &WeylElement::mono(-(&q * &h), 0, 1));
        for (i, j) in [(1, 3), (2, 3), (3, 1), (3, 2)] {
            assert!(r1.get(i, j).is_zero());
        }
        let r2 = rho_images(2, &q, &u, &g, &h).unwrap();
        assert_eq!(r2.get(1, 1), &WeylElement::scalar(u.recip()));
        assert!(rho_images(3, &q, &u, &g, &h).is_err());
        assert!(rho_images(1, &q, &Scalar::zero(), &g, &h).is_err());
    }

    #[test]
    fn relations_are_weyl_identities() {
        let q = rat(-3, 5);
        for which in [1, 2] {
            let img = rho_images(which, &q, &rat(2, 7), &rat(3, 1), &rat(-5, 4)).unwrap();
            for (name, d) in relation_differences(&img, &q) {
                assert!(d.is_zero(), "{name}");
            }
        }
        assert_eq!(inversions([3, 2, 1]), 3);
        assert_eq!(inversions([2, 3, 1]), 2);
    }

    #[test]
    fn coproduct_term_counts() {
        let q = rat(3, 2);
        let a = rho_images(1, &q, &rat(1, 1), &rat(2, 1), &rat(1, 2)).unwrap();
        let b = rho_images(2, &q, &rat(1, 1), &rat(3, 1), &rat(1, 3)).unwrap();
        // rho_1 (x) rho_2 (x) rho_1 on t_33: only j = k = 3 survives in the first slot
        let d = coproduct_operator([&a, &b, &a], 3, 3, false).unwrap();
        let direct = TensorElement::tensor(a.get(3, 3), b.get(3, 3), a.get(3, 3));
        assert_eq!(d, direct);
        let p1 = coproduct_operator([&a, &b, &a], 1, 2, true).unwrap();
        let p2 = coproduct_operator([&a, &b, &a], 1, 2, false).unwrap().flipped();
        assert_eq!(p1, p2);
        assert!(coproduct_operator([&a, &b, &a], 0, 2, true).is_err());
    }

    #[test]
    fn derived_parameters_satisfy_constraints() {
        let c = ZzzConfig::sample(4);
        let [a, b, d] = c.quartets();
        let (u, p) = (&c.u.value, &c.p.value);
        assert_eq!(&a.r.value / &a.t.value, &b.r.value / &b.t.value);
        assert_eq!(&b.s.value / &b.t.value, &d.s.value / &d.t.value);
        assert_eq!(&b.r.value / (&a.r.value * &d.r.value), *u);
        assert_eq!(&a.s.value * &d.s.value / &b.s.value, u * u);
        for qt in [&a, &b, &d] {
            assert_eq!(&qt.t.value * &qt.t.value * &qt.w.value / (&qt.r.value * &qt.s.value), p / u);
        }
        let [[_, g1, h1], [_, g2, h2]] = c.rho_params();
        assert_eq!(g1 * h1, g2 * h2);
    }
}
