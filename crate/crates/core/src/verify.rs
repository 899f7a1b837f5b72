//! RLLL sweeps, the ZZZ recursion oracle, and the kernel property suites.

use crate::exactnum::{
    fmt_scalar, int, log_q, phi21_terminating, phi_tilde, pw, qbinomial, qpochhammer, qpochhammer_inv, LineParams, Param, Quartet,
    Sampler, Scalar,
};
use crate::kernels::{KernelError, KernelType, Mutation, RKernel, SeriesForm};
use crate::lops::{build_l, tag_of, triple_composite, vtuples, LOperator, Side};
use crate::report::Report;
use crate::weyl::RepTag;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;

/// Index bounds for F+ lines and F lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub fplus: (i64, i64),
    pub f: (i64, i64),
}

impl Default for Window {
    fn default() -> Self {
        Window { fplus: (0, 4), f: (-3, 3) }
    }
}

impl Window {
    pub fn new(fplus: (i64, i64), f: (i64, i64)) -> Self {
        Window { fplus, f }
    }

    pub fn axis(&self, letter: char) -> RangeInclusive<i64> {
        let (lo, hi) = if letter == 'O' { (self.fplus.0.max(0), self.fplus.1) } else { self.f };
        lo..=hi
    }

    pub fn box3(&self, letters: [char; 3]) -> Vec<[i64; 3]> {
        let mut v = Vec::new();
        for a in self.axis(letters[0]) {
            for b in self.axis(letters[1]) {
                for c in self.axis(letters[2]) {
                    v.push([a, b, c]);
                }
            }
        }
        v
    }

    pub fn describe(&self) -> String {
        format!("F+ [{},{}], F [{},{}]", self.fplus.0, self.fplus.1, self.f.0, self.f.1)
    }
}

fn t3(x: [i64; 3]) -> String {
    format!("({},{},{})", x[0], x[1], x[2])
}

fn vt(v: [u8; 6]) -> String {
    v.iter().map(|x| x.to_string()).collect()
}

fn at(v: [u8; 6], out: [i64; 3], inn: [i64; 3]) -> String {
    format!("v={} out={} in={}", vt(v), t3(out), t3(inn))
}

fn start_report(suite: &str, k: &RKernel) -> Report {
    let mut r = Report::new(suite, k.kind.name());
    for (name, val) in k.describe_params() {
        r.params.insert(name, val);
    }
    if k.signs != [1, 1, 1] {
        r.params.insert("signs".into(), format!("{:?}", k.signs));
    }
    r
}

/// A sum of products kept as an unreduced fraction; equality is tested by cross-multiplication.
pub(crate) struct Unreduced {
    num: BigInt,
    den: BigInt,
}

impl Unreduced {
    pub(crate) fn zero() -> Self {
        Unreduced { num: BigInt::zero(), den: BigInt::one() }
    }

    pub(crate) fn add_product(&mut self, c: &Scalar, r: &Scalar) {
        if r.is_zero() {
            return;
        }
        let n = c.numer() * r.numer();
        let d = c.denom() * r.denom();
        if d == self.den {
            self.num += n;
        } else if self.num.is_zero() {
            self.num = n;
            self.den = d;
        } else {
            self.num = &self.num * &d + n * &self.den;
            self.den *= d;
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub(crate) fn equals(&self, other: &Unreduced) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }

    pub(crate) fn reduce(self) -> Scalar {
        Scalar::new(self.num, self.den)
    }
}

/// Memoized kernel elements.
pub struct Memo<'a> {
    pub kernel: &'a RKernel,
    cache: HashMap<([i64; 3], [i64; 3]), Scalar>,
}

impl<'a> Memo<'a> {
    pub fn new(kernel: &'a RKernel) -> Self {
        Memo { kernel, cache: HashMap::new() }
    }

    pub fn get(&mut self, out: [i64; 3], inn: [i64; 3]) -> Result<&Scalar, KernelError> {
        let k = self.kernel;
        if !self.cache.contains_key(&(out, inn)) {
            let v = k.element(out, inn)?;
            self.cache.insert((out, inn), v);
        }
        Ok(&self.cache[&(out, inn)])
    }

    pub fn len(&self) -> usize {
        self.cache.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cache.is_empty()
    }
}

/// The three L operators of an RLLL relation together with the kernel.
pub struct RlllSystem<'a> {
    pub memo: Memo<'a>,
    pub tags: [RepTag; 3],
    pub ls: [LOperator; 3],
}

impl<'a> RlllSystem<'a> {
    pub fn new(kernel: &'a RKernel) -> Result<Self, KernelError> {
        let letters = kernel.kind.letters();
        let tags = [0, 1, 2].map(|n| tag_of(letters[n], kernel.signs[n] < 0).expect("type letter"));
        let q = &kernel.q.value;
        let build = |n: usize| {
            build_l(tags[n], q, &kernel.lines[n]).map_err(|e| KernelError::Degenerate(e.to_string()))
        };
        let ls = [build(0)?, build(1)?, build(2)?];
        Ok(RlllSystem { memo: Memo::new(kernel), tags, ls })
    }

    fn composite(&self, side: Side, v: [u8; 6]) -> crate::weyl::TensorElement {
        triple_composite(side, [&self.ls[0], &self.ls[1], &self.ls[2]], v)
    }

    /// Both sides of one component of RLLL at a matrix element.
    pub fn check_pair(&mut self, v: [u8; 6], out: [i64; 3], inn: [i64; 3]) -> Result<(Scalar, Scalar), KernelError> {
        let q = self.memo.kernel.q.value.clone();
        let left = self.composite(Side::Left, v);
        let right = self.composite(Side::Right, v);
        let fw = left.forward(self.tags, &q, inn).map_err(|e| KernelError::Degenerate(e.to_string()))?;
        let tr = right.transpose(self.tags, &q, out);
        self.sides(out, inn, &fw, &tr)
    }

    fn sides(
        &mut self,
        out: [i64; 3],
        inn: [i64; 3],
        fw: &[([i64; 3], Scalar)],
        tr: &[([i64; 3], Scalar)],
    ) -> Result<(Scalar, Scalar), KernelError> {
        let (l, r) = self.sides_raw(out, inn, fw, tr)?;
        Ok((l.reduce(), r.reduce()))
    }

    fn sides_raw(
        &mut self,
        out: [i64; 3],
        inn: [i64; 3],
        fw: &[([i64; 3], Scalar)],
        tr: &[([i64; 3], Scalar)],
    ) -> Result<(Unreduced, Unreduced), KernelError> {
        let mut lhs = Unreduced::zero();
        for (m, c) in fw {
            lhs.add_product(c, self.memo.get(out, *m)?);
        }
        let mut rhs = Unreduced::zero();
        for (m, c) in tr {
            rhs.add_product(c, self.memo.get(*m, inn)?);
        }
        Ok((lhs, rhs))
    }

    /// All 18 relations on every (out, in) pair of the window.
    pub fn sweep(&mut self, window: &Window, stop_at_first: bool) -> Result<Report, KernelError> {
        let k = self.memo.kernel;
        let mut rep = start_report("rlll", k);
        rep.window = Some(window.describe());
        let q = k.q.value.clone();
        let boxes = window.box3(k.kind.letters());
        for v in vtuples() {
            let left = self.composite(Side::Left, v);
            let right = self.composite(Side::Right, v);
            let mut fws = Vec::with_capacity(boxes.len());
            for inn in &boxes {
                match left.forward(self.tags, &q, *inn) {
                    Ok(fw) => fws.push(fw),
                    Err(e) => {
                        rep.fail(format!("v={} in={}", vt(v), t3(*inn)), format!("{}", e), "composite leaves F+".into());
                        fws.push(Vec::new());
                    }
                }
            }
            let trs: Vec<_> = boxes.iter().map(|o| right.transpose(self.tags, &q, *o)).collect();
            rep.bump("relations", 1);
            for (ii, inn) in boxes.iter().enumerate() {
                for (oi, out) in boxes.iter().enumerate() {
                    let (lhs, rhs) = self.sides_raw(*out, *inn, &fws[ii], &trs[oi])?;
                    rep.count_check();
                    if !lhs.is_zero() {
                        rep.bump("nonzero", 1);
                    }
                    if !lhs.equals(&rhs) {
                        rep.fail(at(v, *out, *inn), fmt_scalar(&lhs.reduce()), fmt_scalar(&rhs.reduce()));
                        if stop_at_first {
                            rep.bump("evaluations", self.memo.len() as u64);
                            return Ok(rep);
                        }
                    }
                }
            }
        }
        rep.bump("evaluations", self.memo.len() as u64);
        Ok(rep)
    }
}

pub fn rlll_check_pair(k: &RKernel, v: [u8; 6], out: [i64; 3], inn: [i64; 3]) -> Result<(Scalar, Scalar), KernelError> {
    RlllSystem::new(k)?.check_pair(v, out, inn)
}

pub fn rlll_sweep(k: &RKernel, window: &Window) -> Result<Report, KernelError> {
    RlllSystem::new(k)?.sweep(window, false)
}

/// Sector integers used for the three seeded points of the acceptance sweep.
pub const SWEEP_DS: [i64; 3] = [0, 1, -2];

/// The sweep of one type over `trials` seeded points (seed, seed+1, ...).
pub fn rlll_trials(kind: KernelType, seed: u64, trials: usize, window: &Window) -> Result<Report, KernelError> {
    let mut rep = Report::new("rlll", kind.name());
    rep.seed = Some(seed);
    rep.window = Some(window.describe());
    for t in 0..trials {
        let d = if kind.has_sector_d() { SWEEP_DS[t % 3] } else { 0 };
        let k = RKernel::sample(kind, seed + t as u64, d)?;
        let r = rlll_sweep(&k, window)?;
        for (name, val) in &r.params {
            rep.params.insert(format!("{}[{}]", name, t), val.clone());
        }
        rep.absorb(r);
    }
    Ok(rep)
}

/// ZZZ element by the recursion chain alone, seeded with R^{000}_{p2,p1,0} = 1 for p1, p2 in {0,1}.
pub fn recursion_oracle_zzz(k: &RKernel, out: [i64; 3], inn: [i64; 3]) -> Result<Scalar, KernelError> {
    if k.kind != KernelType::ZZZ {
        return Err(KernelError::Degenerate("recursion oracle is defined for ZZZ only".into()));
    }
    let l = |n: usize| k.lines[n].quartet().expect("quartet line");
    let (l1, l2, l3) = (l(0), l(1), l(2));
    let (r1, s1, t1, w1) = (&l1.r.value, &l1.s.value, &l1.t.value, &l1.w.value);
    let (r2, s2, t2, w2) = (&l2.r.value, &l2.s.value, &l2.t.value, &l2.w.value);
    let (r3, s3, t3, w3) = (&l3.r.value, &l3.s.value, &l3.t.value, &l3.w.value);
    let q = &k.q.value;
    let one = Scalar::one();
    let big = r1 * r3 * w3 / (s1 * s3 * w1);
    let nz = |x: Scalar| -> Result<Scalar, KernelError> {
        if x.is_zero() {
            Err(KernelError::Degenerate("vanishing factor in the recursion chain".into()))
        } else {
            Ok(x)
        }
    };
    // R^{a,0,0}_{i,j,0} = f4 R^{a-1,0,0}_{i,j-1,0}
    let f4 = |a: i64, i: i64, j: i64| -> Result<Scalar, KernelError> {
        nz(pw(q, i) * t2 * w2 / (s3 * t1 * w1) * (&one - pw(q, a - i + j - 2) * r1 * w3 / (s1 * w2))
            / nz(&one - pw(q, 2 * j - 2) * &big)?)
    };
    // R^{000}_{i,j,0} = f6 R^{000}_{i,j-2,0}
    let f6 = |i: i64, j: i64| -> Result<Scalar, KernelError> {
        let den = nz((&one - pw(q, j) * r1 * r3 / r2) * (&one - pw(q, 2 * j - 2) * &big) * (&one - pw(q, 2 * j - 4) * &big))?;
        nz(pw(q, 2 + i) * t2 * t2 * w2 / (r2 * s1 * s3)
            * (&one - pw(q, j - 2 + i) * r3 * w2 / (s3 * w1))
            * (&one - pw(q, j - 2 - i) * r1 * w3 / (s1 * w2))
            / den)
    };
    // R^{000}_{i,j,0} = f5 R^{000}_{i-2,j,0}
    let f5 = |i: i64, j: i64| -> Result<Scalar, KernelError> {
        let den = nz((&one - pw(q, -i) * s1 * s3 / s2) * (&one - pw(q, -i + j) * r1 * w3 / (s1 * w2)))?;
        nz(pw(q, -2 * i + j + 2) * s3 * t1 * t1 * w1 * w3 / (s1 * s2 * w2) * (&one - pw(q, i + j - 2) * r3 * w2 / (s3 * w1))
            / den)
    };
    let base = |mut i: i64, mut j: i64| -> Result<Scalar, KernelError> {
        let mut v = Scalar::one();
        while j >= 2 {
            v *= f6(i, j)?;
            j -= 2;
        }
        while j < 0 {
            j += 2;
            v /= f6(i, j)?;
        }
        while i >= 2 {
            v *= f5(i, j)?;
            i -= 2;
        }
        while i < 0 {
            i += 2;
            v /= f5(i, j)?;
        }
        Ok(v)
    };
    let a00 = |mut a: i64, i: i64, mut j: i64| -> Result<Scalar, KernelError> {
        let mut v = Scalar::one();
        while a > 0 {
            v *= f4(a, i, j)?;
            a -= 1;
            j -= 1;
        }
        while a < 0 {
            a += 1;
            j += 1;
            v /= f4(a, i, j)?;
        }
        Ok(v * base(i, j)?)
    };
    let [a, b, c] = out;
    let [i, j, kk] = inn;
    let pre = pw(q, (c + i - j) * (c - kk))
        * pw(&(t1 * t3 * w3 / s2), -c + kk)
        * qpochhammer_inv(&(pw(q, b - i - kk) * s1 * s3 / s2), &(q * q), -c + kk)?;
    Ok(pre * a00(a - b + c, i - kk - b + 2 * c, j - b)?)
}

/// Ratio closed form / oracle must be constant inside each (d1, d2) parity sector.
pub fn oracle_ratio_check(k: &RKernel, seed: u64, per_sector: usize) -> Result<Report, KernelError> {
    let mut rep = start_report("oracle-ratio", k);
    rep.seed = Some(seed);
    let mut s = Sampler::new(seed);
    let mut ratios: BTreeMap<(i64, i64), (Scalar, usize)> = BTreeMap::new();
    let mut guard = 0;
    while ratios.values().filter(|(_, n)| *n >= per_sector).count() < 4 {
        guard += 1;
        if guard > 200 * per_sector {
            rep.note("sampling budget exhausted before every sector was filled".into());
            rep.bump("failed", 1);
            break;
        }
        let x: Vec<i64> = (0..6).map(|_| s.int(-3, 3)).collect();
        let (out, inn) = ([x[0], x[1], x[2]], [x[3], x[4], x[5]]);
        let sector = k.kind.parity_functional(out, inn).expect("ZZZ parity");
        if ratios.get(&sector).is_some_and(|(_, n)| *n >= per_sector) {
            continue;
        }
        let o = recursion_oracle_zzz(k, out, inn)?;
        let cf = k.element(out, inn)?;
        rep.count_check();
        if o.is_zero() {
            if !cf.is_zero() {
                rep.fail(format!("out={} in={}", t3(out), t3(inn)), fmt_scalar(&cf), "oracle 0".into());
            }
            continue;
        }
        let r = cf / o;
        match ratios.get_mut(&sector) {
            None => {
                ratios.insert(sector, (r, 1));
            }
            Some((r0, n)) => {
                *n += 1;
                if *r0 != r {
                    rep.fail(
                        format!("sector {:?} out={} in={}", sector, t3(out), t3(inn)),
                        fmt_scalar(r0),
                        fmt_scalar(&r),
                    );
                }
            }
        }
    }
    for ((p1, p2), (r, n)) in &ratios {
        rep.bump(&format!("sector_{}{}", p1, p2), *n as u64);
        rep.note(format!("sector ({},{}) ratio {}", p1, p2, fmt_scalar(r)));
    }
    Ok(rep)
}

/// Every element touched by one component relation carries the same parity functional value.
pub fn sector_coupling_audit(k: &RKernel, window: &Window) -> Result<Report, KernelError> {
    let mut rep = start_report("sector-audit", k);
    rep.window = Some(window.describe());
    if k.kind.parity_functional([0; 3], [0; 3]).is_none() {
        rep.note(format!("{} has no parity functional", k.kind));
        return Ok(rep);
    }
    let sys = RlllSystem::new(k)?;
    let q = &k.q.value;
    let boxes = window.box3(k.kind.letters());
    for v in vtuples() {
        let left = sys.composite(Side::Left, v);
        let right = sys.composite(Side::Right, v);
        for inn in &boxes {
            let fw = left.forward(sys.tags, q, *inn).map_err(|e| KernelError::Degenerate(e.to_string()))?;
            for out in &boxes {
                let tr = right.transpose(sys.tags, q, *out);
                let mut seen = BTreeSet::new();
                for (m, _) in &fw {
                    if k.support(*out, *m) {
                        seen.insert(k.kind.parity_functional(*out, *m).unwrap());
                    }
                }
                for (m, _) in &tr {
                    if k.support(*m, *inn) {
                        seen.insert(k.kind.parity_functional(*m, *inn).unwrap());
                    }
                }
                rep.count_check();
                if seen.len() > 1 {
                    rep.fail(at(v, *out, *inn), format!("{:?}", seen), "single parity class".into());
                }
            }
        }
    }
    Ok(rep)
}

/// The two printed series forms of OZZ, ZZO or ZOZ agree elementwise.
pub fn series_equivalence_check(k: &RKernel, window: &Window) -> Result<Report, KernelError> {
    let mut rep = start_report("series-equivalence", k);
    rep.window = Some(window.describe());
    if !matches!(k.kind, KernelType::OZZ | KernelType::ZZO | KernelType::ZOZ) {
        rep.note(format!("{} has a single printed form", k.kind));
        return Ok(rep);
    }
    let a = k.clone().with_form(SeriesForm::Sum);
    let b = k.clone().with_form(SeriesForm::Hyper);
    let boxes = window.box3(k.kind.letters());
    for out in &boxes {
        for inn in &boxes {
            let x = a.element(*out, *inn)?;
            let y = b.element(*out, *inn)?;
            rep.count_check();
            if !x.is_zero() {
                rep.bump("nonzero", 1);
            }
            if x != y {
                rep.fail(format!("out={} in={}", t3(*out), t3(*inn)), fmt_scalar(&x), fmt_scalar(&y));
            }
        }
    }
    Ok(rep)
}

/// OOO kernel at mu1 = mu2 = mu3 = 1.
pub fn ooo_unit_kernel(q: Param) -> RKernel {
    let one = LineParams::Mu(Param::square(Scalar::one()));
    RKernel::new(KernelType::OOO, q, [one.clone(), one.clone(), one], 0).expect("OOO at unit mu")
}

/// R^{abc}_{ijk} (q^2)_a (q^2)_b (q^2)_c = (q^2)_i (q^2)_j (q^2)_k R^{ijk}_{abc} at unit mu.
pub fn ooo_symmetry_check(k: &RKernel, bound: i64) -> Result<Report, KernelError> {
    let mut rep = start_report("ooo-symmetry", k);
    rep.window = Some(format!("[0,{}]", bound));
    if k.kind != KernelType::OOO || k.lines.iter().any(|l| !l.mu().is_some_and(|m| m.value.is_one())) {
        return Err(KernelError::Degenerate("symmetry check needs OOO at mu_i = 1".into()));
    }
    let q2 = &k.q.value * &k.q.value;
    let fac: Vec<Scalar> = (0..=bound).map(|n| qpochhammer(&q2, &q2, n).expect("q generic")).collect();
    let f3 = |x: [i64; 3]| &fac[x[0] as usize] * &fac[x[1] as usize] * &fac[x[2] as usize];
    let w = Window::new((0, bound), (0, bound));
    let boxes = w.box3(['O'; 3]);
    for out in &boxes {
        for inn in &boxes {
            let l = k.element(*out, *inn)? * f3(*out);
            let r = k.element(*inn, *out)? * f3(*inn);
            rep.count_check();
            if !l.is_zero() {
                rep.bump("nonzero", 1);
            }
            if l != r {
                rep.fail(format!("out={} in={}", t3(*out), t3(*inn)), fmt_scalar(&l), fmt_scalar(&r));
            }
        }
    }
    Ok(rep)
}

/// R^{abc}_{000} for OOZ and ZOO over several sectors, and OOO at zero.
pub fn boundary_check(seed: u64) -> Result<Report, KernelError> {
    let mut rep = Report::new("boundary", "OOZ,ZOO,OOO");
    rep.seed = Some(seed);
    for d in -3..=3 {
        let ooz = RKernel::sample(KernelType::OOZ, seed, d)?;
        let zoo = RKernel::sample(KernelType::ZOO, seed, d)?;
        for a in 0..=5 {
            for b in 0..=5 {
                for c in -6..=6 {
                    let v = ooz.element([a, b, c], [0; 3])?;
                    let want = if (a, b, c) == (0, 0, d) { int(1) } else { int(0) };
                    rep.count_check();
                    if v != want {
                        rep.fail(format!("OOZ d={} out=({},{},{})", d, a, b, c), fmt_scalar(&v), fmt_scalar(&want));
                    }
                    let v = zoo.element([c, a, b], [0; 3])?;
                    let want = if (c, a, b) == (-d, 0, 0) { int(1) } else { int(0) };
                    rep.count_check();
                    if v != want {
                        rep.fail(format!("ZOO d={} out=({},{},{})", d, c, a, b), fmt_scalar(&v), fmt_scalar(&want));
                    }
                }
            }
        }
    }
    let ooo = RKernel::sample(KernelType::OOO, seed, 0)?;
    let v = ooo.element([0; 3], [0; 3])?;
    rep.count_check();
    if !v.is_one() {
        rep.fail("OOO out=(0,0,0) in=(0,0,0)".into(), fmt_scalar(&v), "1".into());
    }
    Ok(rep)
}

/// Wherever the support predicate fails, the formula itself (evaluated without the
/// interval gates) vanishes; for locally finite kernels the nonzero out-fiber is the
/// enumerated one.
pub fn support_exactness_check(k: &RKernel, bound: i64) -> Result<Report, KernelError> {
    let mut rep = start_report("support-exactness", k);
    rep.window = Some(format!("[0,{}] (F lines [-{},{}])", bound, bound / 2, bound));
    let w = Window::new((0, bound), (-bound / 2, bound));
    let boxes = w.box3(k.kind.letters());
    for out in &boxes {
        for inn in &boxes {
            if k.support(*out, *inn) {
                continue;
            }
            rep.bump("unsupported", 1);
            match k.element_formula(*out, *inn) {
                Ok(v) if v.is_zero() => {}
                Ok(v) => rep.fail(
                    format!("out={} in={} ({})", t3(*out), t3(*inn), k.support_violation(*out, *inn).unwrap_or("")),
                    fmt_scalar(&v),
                    "0".into(),
                ),
                Err(_) => rep.bump("formula_undefined", 1),
            }
        }
    }
    if k.kind.locally_finite() {
        let small = Window::new((0, 3), (-2, 3)).box3(k.kind.letters());
        let wide = Window::new((0, 3 * bound), (-3 * bound, 3 * bound)).box3(k.kind.letters());
        for inn in &small {
            let fiber: BTreeSet<[i64; 3]> = k.out_fiber(*inn)?.into_iter().collect();
            rep.bump("fiber_total", fiber.len() as u64);
            for out in &wide {
                rep.count_check();
                if !fiber.contains(out) && k.support(*out, *inn) {
                    rep.fail(format!("out={} in={}", t3(*out), t3(*inn)), "supported".into(), "outside the out-fiber".into());
                }
            }
            for out in &fiber {
                if !wide.contains(out) {
                    rep.fail(format!("out={} in={}", t3(*out), t3(*inn)), "fiber element".into(), "outside scan box".into());
                }
            }
        }
    }
    Ok(rep)
}

/// sum_m R^{out}_m (R^{-1})^m_{in} = delta on a window.
pub fn inverse_check(k: &RKernel, window: &Window) -> Result<Report, KernelError> {
    let mut rep = start_report("inverse", k);
    rep.window = Some(window.describe());
    let inv = k.inverse()?;
    let boxes = window.box3(k.kind.letters());
    let mut memo = Memo::new(k);
    for inn in &boxes {
        let fiber = inv.out_fiber(*inn)?;
        let col: Vec<([i64; 3], Scalar)> = fiber
            .into_iter()
            .map(|m| inv.element(m, *inn).map(|x| (m, x)))
            .collect::<Result<_, _>>()?;
        for out in &boxes {
            let mut s = Scalar::zero();
            for (m, x) in &col {
                if !x.is_zero() {
                    s += memo.get(*out, *m)? * x;
                }
            }
            let want = if out == inn { int(1) } else { int(0) };
            rep.count_check();
            if s != want {
                rep.fail(format!("out={} in={}", t3(*out), t3(*inn)), fmt_scalar(&s), fmt_scalar(&want));
            }
        }
    }
    Ok(rep)
}

fn direct_phi21(alpha: &Scalar, beta: &Scalar, gamma: &Scalar, b: &Scalar, z: &Scalar, depth: i64) -> Scalar {
    // term by term from explicit products
    let mut s = Scalar::zero();
    for n in 0..=depth {
        let mut num = pw(z, n);
        let mut den = Scalar::one();
        for j in 0..n {
            let bj = pw(b, j);
            num *= (Scalar::one() - alpha * &bj) * (Scalar::one() - beta * &bj);
            den *= (Scalar::one() - gamma * &bj) * (Scalar::one() - &bj * b);
        }
        s += num / den;
    }
    s
}

/// Pochhammer cocycle, the Phi~ recurrence, terminating 2phi1 against direct sums,
/// q-binomial symmetry, and the series-form equivalences.
pub fn special_function_suite(seed: u64) -> Result<Report, KernelError> {
    let mut rep = Report::new("special-functions", "-");
    rep.seed = Some(seed);
    let mut s = Sampler::new(seed);
    for trial in 0..24 {
        let b = s.root();
        // z in b^Z puts a pole on one side only
        let mut z = s.root();
        while log_q(&z, &b).is_some() {
            z = s.root();
        }
        for m in -6..=6 {
            for n in -6..=6 {
                let l = qpochhammer(&z, &b, m + n);
                let r = qpochhammer(&z, &b, m).and_then(|x| qpochhammer(&(&z * pw(&b, m)), &b, n).map(|y| x * y));
                rep.bump("cocycle", 1);
                match (l, r) {
                    (Ok(l), Ok(r)) if l == r => {}
                    (Err(_), Err(_)) => rep.bump("cocycle_degenerate", 1),
                    (l, r) => rep.fail(format!("cocycle trial {} m={} n={}", trial, m, n), format!("{:?}", l.map(|x| fmt_scalar(&x))), format!("{:?}", r.map(|x| fmt_scalar(&x)))),
                }
            }
        }
    }
    for _ in 0..8 {
        let q = s.root();
        let mut z = s.root();
        while log_q(&z, &q).is_some() {
            z = s.root();
        }
        for m in -8..=8 {
            let l = phi_tilde(m + 2, &z, &q)?;
            let r = (Scalar::one() - &z * pw(&q, m)) * phi_tilde(m, &z, &q)?;
            rep.bump("prec", 1);
            if l != r {
                rep.fail(format!("prec m={}", m), fmt_scalar(&l), fmt_scalar(&r));
            }
        }
    }
    for _ in 0..8 {
        let b = s.root();
        let (beta, z) = (s.root(), s.root());
        let mut gamma = s.root();
        while log_q(&gamma, &b).is_some() {
            gamma = s.root();
        }
        for depth in 0..=8 {
            let alpha = pw(&b, -depth);
            let l = phi21_terminating(&alpha, &beta, &gamma, &b, &z, depth)?;
            let r = direct_phi21(&alpha, &beta, &gamma, &b, &z, depth + 3);
            rep.bump("phi21", 1);
            if l != r {
                rep.fail(format!("2phi1 depth={}", depth), fmt_scalar(&l), fmt_scalar(&r));
            }
        }
        for n in 0..=12 {
            for m in 0..=n {
                rep.bump("qbinomial", 1);
                if qbinomial(n, m, &b)? != qbinomial(n, n - m, &b)? {
                    rep.fail(format!("qbinomial n={} m={}", n, m), "asymmetric".into(), String::new());
                }
            }
        }
    }
    let w = Window::new((0, 3), (-1, 3));
    for kind in [KernelType::OZZ, KernelType::ZZO, KernelType::ZOZ] {
        let k = RKernel::sample(kind, seed, 0)?;
        let r = series_equivalence_check(&k, &w)?;
        rep.bump(&format!("series_{}", kind), r.count("checks"));
        rep.absorb(r);
    }
    Ok(rep)
}

/// For each mutation, a sweep of its target type stopping at the first failure.
pub fn fault_sweep(mutation: Mutation, seed: u64, window: &Window) -> Result<Report, KernelError> {
    let kind = mutation.target();
    let d = if kind.has_sector_d() { 1 } else { 0 };
    let k = RKernel::sample(kind, seed, d)?.with_mutation(Some(mutation));
    let mut rep = RlllSystem::new(&k)?.sweep(window, true)?;
    rep.suite = "fault".into();
    rep.note(format!("{:?}", mutation));
    Ok(rep)
}

/// Component relations of one type at a concrete out/in pair, as text.
pub fn describe_relations(k: &RKernel, out: [i64; 3], inn: [i64; 3]) -> Result<Vec<String>, KernelError> {
    let sys = RlllSystem::new(k)?;
    let q = &k.q.value;
    let mut lines = Vec::new();
    for v in vtuples() {
        let fw = sys
            .composite(Side::Left, v)
            .forward(sys.tags, q, inn)
            .map_err(|e| KernelError::Degenerate(e.to_string()))?;
        let tr = sys.composite(Side::Right, v).transpose(sys.tags, q, out);
        let side = |terms: Vec<String>| if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        let l: Vec<String> = fw.iter().map(|(m, c)| format!("({}) R^{}_{}", fmt_scalar(c), t3(out), t3(*m))).collect();
        let r: Vec<String> = tr.iter().map(|(m, c)| format!("({}) R^{}_{}", fmt_scalar(c), t3(*m), t3(inn))).collect();
        lines.push(format!("[{}] {} = {}", vt(v), side(l), side(r)));
    }
    Ok(lines)
}

/// Rescales t_i by lambda_i^2 and compares against t1^{-a+i} t2^{-b+j} t3^{-c+k} scaling.
pub fn zzz_t_dependence(k: &RKernel, lambdas: [Scalar; 3], out: [i64; 3], inn: [i64; 3]) -> Result<bool, KernelError> {
    let mut lines = k.lines.clone();
    for n in 0..3 {
        let qt = lines[n].quartet().unwrap().clone();
        let t = qt.t.mul(&Param::square(lambdas[n].clone()));
        lines[n] = LineParams::Quartet(Quartet { t, ..qt });
    }
    let k2 = RKernel::new(k.kind, k.q.clone(), lines, k.d)?;
    let mut f = Scalar::one();
    for n in 0..3 {
        f *= pw(&(&lambdas[n] * &lambdas[n]), inn[n] - out[n]);
    }
    Ok(k2.element(out, inn)? == k.element(out, inn)? * f)
}
