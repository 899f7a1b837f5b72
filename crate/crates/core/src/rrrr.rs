//! Finite-sum RRRR tetrahedron equations.

use crate::exactnum::{fmt_scalar, log_q, LineKind, LineParams, Param, Quartet, Sampler, Scalar};
use crate::kernels::{KernelError, KernelType, RKernel};
use crate::report::Report;
use num_traits::Zero;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RrrrError {
    #[error("type {0} is not one of the finitely checkable RRRR types")]
    NotFinite(String),
    #[error("inconsistent integrality demands: {0}")]
    Inconsistent(String),
    #[error("index {index} on F+ line {line} is negative")]
    Lattice { line: usize, index: i64 },
    #[error("intermediate sum is not provably finite: variable {0} is unbounded")]
    Unbounded(char),
    #[error("no nonsingular parameter point after {0} draws")]
    ResamplingExhausted(usize),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Draws per wiring before giving up on finding a nonsingular point.
pub const WIRING_DRAWS: usize = 16;

/// A wiring for `typ`, redrawing while a factor kernel is degenerate at the sampled point.
pub fn wire_parameters(typ: &str, seed: u64) -> Result<Wiring, RrrrError> {
    for n in 0..WIRING_DRAWS {
        match Wiring::sample(typ, seed.wrapping_add((n as u64) << 32)) {
            Err(RrrrError::Kernel(KernelError::Degenerate(_))) => continue,
            Ok(w) if w.factors.iter().any(|f| f.kernel.zzz_singular()) => continue,
            other => return other,
        }
    }
    Err(RrrrError::ResamplingExhausted(WIRING_DRAWS))
}

/// OOOOOO and the 24 types with finitely many intermediate sextets.
pub const FINITE_TYPES: [&str; 25] = [
    "OOOOOO", "ZOOOOO", "OOOZOO", "OOOOOZ", "ZOOOOZ", "OZOOOO", "OOOOZO", "ZZOOOO", "ZOOZOO", "OZOZOO", "OOOZZO", "OOOZOZ",
    "OOOOZZ", "ZZOZOO", "OOOZZZ", "OOZOOO", "ZOZOOO", "ZOOOZO", "OZZOOO", "OZOOOZ", "OOZZOO", "OOZOZO", "OOZOOZ", "ZOZOZO",
    "OZZOOZ",
];

pub fn finite_type_list() -> Vec<&'static str> {
    FINITE_TYPES.to_vec()
}

/// Lines (0-based) of the factors ABD, ACE, BCF and DEF.
pub const FACTOR_LINES: [[usize; 3]; 4] = [[0, 1, 3], [0, 2, 4], [1, 2, 5], [3, 4, 5]];
pub const FACTOR_NAMES: [&str; 4] = ["ABD", "ACE", "BCF", "DEF"];

#[derive(Debug, Clone)]
pub struct Factor {
    pub name: &'static str,
    pub lines: [usize; 3],
    pub kernel: RKernel,
}

#[derive(Debug, Clone)]
pub struct Wiring {
    pub typ: String,
    pub q: Param,
    pub lines: Vec<LineParams>,
    pub factors: [Factor; 4],
}

fn check_type(typ: &str) -> Result<(), RrrrError> {
    if FINITE_TYPES.contains(&typ) {
        Ok(())
    } else {
        Err(RrrrError::NotFinite(typ.into()))
    }
}

fn factor_kind(typ: &str, lines: [usize; 3]) -> KernelType {
    let b = typ.as_bytes();
    let s: String = lines.iter().map(|&n| b[n] as char).collect();
    s.parse().expect("letters Z and O")
}

/// Union-find over O-lines with mu_node = sign * q^exp * mu_root.
struct Potentials {
    parent: Vec<usize>,
    sign: Vec<bool>,
    exp: Vec<i64>,
}

impl Potentials {
    fn new(n: usize) -> Self {
        Potentials { parent: (0..n).collect(), sign: vec![false; n], exp: vec![0; n] }
    }

    fn find(&mut self, x: usize) -> (usize, bool, i64) {
        if self.parent[x] == x {
            return (x, false, 0);
        }
        let (r, s, e) = self.find(self.parent[x]);
        self.parent[x] = r;
        self.sign[x] ^= s;
        self.exp[x] += e;
        (r, self.sign[x], self.exp[x])
    }
}

impl Wiring {
    /// Samples line parameters and imposes every factor's mu relation by construction.
    pub fn sample(typ: &str, seed: u64) -> Result<Wiring, RrrrError> {
        check_type(typ)?;
        let mut s = Sampler::new(seed);
        let q = s.param();
        let kinds: Vec<LineKind> = typ.chars().map(|c| if c == 'O' { LineKind::Mu } else { LineKind::Quartet }).collect();
        let mut pot = Potentials::new(6);
        for f in FACTOR_LINES {
            let kind = factor_kind(typ, f);
            let Some((a, b, neg)) = kind.mu_relation() else { continue };
            let (la, lb) = (f[a], f[b]);
            let (ra, sa, ea) = pot.find(la);
            let (rb, sb, eb) = pot.find(lb);
            if ra == rb {
                if (sa ^ sb) != neg {
                    return Err(RrrrError::Inconsistent(format!(
                        "{} on lines {:?} needs a sign the other factors exclude",
                        kind, f
                    )));
                }
                continue;
            }
            // mu_la = (-1)^neg q^d mu_lb with a sampled d
            let d = s.int(-2, 2);
            pot.parent[ra] = rb;
            pot.sign[ra] = neg ^ sa ^ sb;
            pot.exp[ra] = d + eb - ea;
        }
        let mut base: Vec<Option<LineParams>> = kinds
            .iter()
            .map(|k| match k {
                LineKind::Quartet => Some(LineParams::Quartet(Quartet::sample(&mut s))),
                LineKind::Mu => Some(LineParams::Mu(s.param())),
            })
            .collect();
        let mut lines = Vec::with_capacity(6);
        for n in 0..6 {
            if kinds[n] == LineKind::Quartet {
                lines.push(base[n].take().unwrap());
                continue;
            }
            let (r, sg, e) = pot.find(n);
            let root = base[r].clone().unwrap();
            let mut mu = root.mu().unwrap().mul(&q.pow(e));
            if sg {
                mu = mu.neg();
            }
            lines.push(LineParams::Mu(mu));
        }
        Wiring::from_lines(typ, q, lines)
    }

    /// Builds the four factor kernels, deriving each sector integer from the mu ratios.
    pub fn from_lines(typ: &str, q: Param, lines: Vec<LineParams>) -> Result<Wiring, RrrrError> {
        check_type(typ)?;
        if lines.len() != 6 {
            return Err(RrrrError::Inconsistent(format!("{} lines given, 6 needed", lines.len())));
        }
        let mut factors = Vec::with_capacity(4);
        for (fi, f) in FACTOR_LINES.iter().enumerate() {
            let kind = factor_kind(typ, *f);
            let ls = [lines[f[0]].clone(), lines[f[1]].clone(), lines[f[2]].clone()];
            let d = match kind.mu_relation() {
                None => 0,
                Some((a, b, neg)) => {
                    let (Some(ma), Some(mb)) = (ls[a].mu(), ls[b].mu()) else {
                        return Err(RrrrError::Inconsistent(format!("{} needs mu on lines {:?}", kind, f)));
                    };
                    let ratio = if neg { -(&ma.value / &mb.value) } else { &ma.value / &mb.value };
                    log_q(&ratio, &q.value).ok_or_else(|| {
                        RrrrError::Inconsistent(format!(
                            "{} factor {}: mu{}/mu{} is not {}q^d",
                            kind,
                            FACTOR_NAMES[fi],
                            f[a] + 1,
                            f[b] + 1,
                            if neg { "-" } else { "" }
                        ))
                    })?
                }
            };
            let kernel = RKernel::new(kind, q.clone(), ls, d)?;
            factors.push(Factor { name: FACTOR_NAMES[fi], lines: *f, kernel });
        }
        let factors: [Factor; 4] = factors.try_into().expect("four factors");
        Ok(Wiring { typ: typ.into(), q, lines, factors })
    }

    pub fn letters(&self) -> Vec<char> {
        self.typ.chars().collect()
    }

    fn check_lattice(&self, x: &[i64; 6]) -> Result<(), RrrrError> {
        for (n, c) in self.typ.chars().enumerate() {
            if c == 'O' && x[n] < 0 {
                return Err(RrrrError::Lattice { line: n + 1, index: x[n] });
            }
        }
        Ok(())
    }
}

/// Linear relation sum coeff*var + c  (= 0, <= 0, or even).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rel {
    Eq,
    Le,
    Even,
}

#[derive(Debug, Clone)]
struct Constraint {
    rel: Rel,
    coeffs: [i64; 6],
    c: i64,
}

/// Slot of a factor element: a known index or one of the six unknowns.
#[derive(Debug, Clone, Copy)]
enum Slot {
    Known(i64),
    Var(usize),
}

/// Support of one kernel as linear relations over its six slots (out then in).
fn kernel_relations(k: &RKernel) -> Vec<(Rel, [i64; 6], i64)> {
    let d = k.d;
    let mut v = Vec::new();
    for (n, ch) in k.kind.letters().iter().enumerate() {
        if *ch == 'O' {
            let mut a = [0; 6];
            a[n] = -1;
            v.push((Rel::Le, a, 0));
            let mut b = [0; 6];
            b[n + 3] = -1;
            v.push((Rel::Le, b, 0));
        }
    }
    // slots: a b c i j k
    match k.kind {
        KernelType::OOZ => {
            v.push((Rel::Eq, [1, 1, 0, -1, -1, 0], 0));
            v.push((Rel::Even, [1, 0, -1, 0, 1, 1], d));
            // |b-i| <= k-c+d <= b+i
            v.push((Rel::Le, [0, 1, 1, -1, 0, -1], -d));
            v.push((Rel::Le, [0, -1, 1, 1, 0, -1], -d));
            v.push((Rel::Le, [0, -1, -1, -1, 0, 1], d));
        }
        KernelType::ZOO => {
            v.push((Rel::Eq, [0, 1, 1, 0, -1, -1], 0));
            v.push((Rel::Even, [-1, 0, 1, 1, 1, 0], -d));
            // |b-k| <= i-a-d <= b+k
            v.push((Rel::Le, [1, 1, 0, -1, 0, -1], d));
            v.push((Rel::Le, [1, -1, 0, -1, 0, 1], d));
            v.push((Rel::Le, [-1, -1, 0, 1, 0, -1], -d));
        }
        KernelType::OZO => {
            v.push((Rel::Eq, [1, 0, -1, -1, 0, 1], 0));
            v.push((Rel::Even, [0, -1, 0, 1, 1, 1], -d - 1));
            // |a-c| <= j-b-d-1 <= a+c
            v.push((Rel::Le, [1, 1, -1, 0, -1, 0], d + 1));
            v.push((Rel::Le, [-1, 1, 1, 0, -1, 0], d + 1));
            v.push((Rel::Le, [-1, -1, -1, 0, 1, 0], -d - 1));
        }
        KernelType::OOO => {
            v.push((Rel::Eq, [1, 1, 0, -1, -1, 0], 0));
            v.push((Rel::Eq, [0, 1, 1, 0, -1, -1], 0));
        }
        _ => {}
    }
    v
}

fn lower(rel: &(Rel, [i64; 6], i64), slots: [Slot; 6]) -> Constraint {
    let (r, a, c0) = rel;
    let mut coeffs = [0i64; 6];
    let mut c = *c0;
    for s in 0..6 {
        match slots[s] {
            Slot::Known(x) => c += a[s] * x,
            Slot::Var(v) => coeffs[v] += a[s],
        }
    }
    Constraint { rel: *r, coeffs, c }
}

const VAR_NAMES: [char; 6] = ['u', 'v', 'w', 'x', 'y', 'z'];

type Bounds = [(Option<i64>, Option<i64>); 6];

fn propagate(cs: &[Constraint], b: &mut Bounds) -> bool {
    loop {
        let mut changed = false;
        for con in cs {
            let dirs: &[i64] = match con.rel {
                Rel::Le => &[1],
                Rel::Eq => &[1, -1],
                Rel::Even => &[],
            };
            for &sg in dirs {
                // sg*(sum coeff*x + c) <= 0
                for t in 0..6 {
                    let ct = sg * con.coeffs[t];
                    if ct == 0 {
                        continue;
                    }
                    let mut rest = sg * con.c;
                    let mut ok = true;
                    for v in 0..6 {
                        if v == t || con.coeffs[v] == 0 {
                            continue;
                        }
                        let cv = sg * con.coeffs[v];
                        let m = if cv > 0 { b[v].0.map(|lo| cv * lo) } else { b[v].1.map(|hi| cv * hi) };
                        match m {
                            Some(m) => rest += m,
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }
                    // ct * x_t <= -rest
                    if ct > 0 {
                        let hi = (-rest).div_euclid(ct);
                        if b[t].1.map_or(true, |h| hi < h) {
                            b[t].1 = Some(hi);
                            changed = true;
                        }
                    } else {
                        // -ct * x_t >= rest
                        let lo = ceil_div(rest, -ct);
                        if b[t].0.map_or(true, |l| lo > l) {
                            b[t].0 = Some(lo);
                            changed = true;
                        }
                    }
                    if let (Some(lo), Some(hi)) = b[t] {
                        if lo > hi {
                            return false;
                        }
                    }
                }
            }
        }
        if !changed {
            return true;
        }
    }
}

fn ceil_div(a: i64, b: i64) -> i64 {
    // b > 0
    -((-a).div_euclid(b))
}

fn satisfied(cs: &[Constraint], x: &[i64; 6]) -> bool {
    cs.iter().all(|con| {
        let s: i64 = (0..6).map(|v| con.coeffs[v] * x[v]).sum::<i64>() + con.c;
        match con.rel {
            Rel::Eq => s == 0,
            Rel::Le => s <= 0,
            Rel::Even => s.rem_euclid(2) == 0,
        }
    })
}

fn dfs(cs: &[Constraint], b: Bounds, out: &mut Vec<[i64; 6]>) {
    let mut b = b;
    if !propagate(cs, &mut b) {
        return;
    }
    let open = (0..6).filter(|&v| b[v].0 != b[v].1).min_by_key(|&v| b[v].1.unwrap() - b[v].0.unwrap());
    match open {
        None => {
            let x = [0, 1, 2, 3, 4, 5].map(|v| b[v].0.unwrap());
            if satisfied(cs, &x) {
                out.push(x);
            }
        }
        Some(v) => {
            for val in b[v].0.unwrap()..=b[v].1.unwrap() {
                let mut nb = b;
                nb[v] = (Some(val), Some(val));
                dfs(cs, nb, out);
            }
        }
    }
}

/// Every intermediate sextet allowed by the linear support relations.
fn enumerate(cs: &[Constraint]) -> Result<Vec<[i64; 6]>, RrrrError> {
    let mut b: Bounds = [(None, None); 6];
    if !propagate(cs, &mut b) {
        return Ok(Vec::new());
    }
    for v in 0..6 {
        if b[v].0.is_none() || b[v].1.is_none() {
            return Err(RrrrError::Unbounded(VAR_NAMES[v]));
        }
    }
    let mut out = Vec::new();
    dfs(cs, b, &mut out);
    Ok(out)
}

/// Slots of the four factors on each side: (factor, [out slots], [in slots]) with
/// out = (a,b,c,d,e,f), in = (i,j,k,l,m,n) and unknowns (u,v,w,x,y,z).
#[derive(Debug, Clone, Copy)]
enum S {
    O(usize),
    I(usize),
    V(usize),
}

const LHS_FACTORS: [(usize, [S; 3], [S; 3]); 4] = [
    // R^{d,e,f}_{x,y,z}[DEF] R^{b,c,z}_{v,w,n}[BCF] R^{a,w,y}_{u,k,m}[ACE] R^{u,v,x}_{i,j,l}[ABD]
    (3, [S::O(3), S::O(4), S::O(5)], [S::V(3), S::V(4), S::V(5)]),
    (2, [S::O(1), S::O(2), S::V(5)], [S::V(1), S::V(2), S::I(5)]),
    (1, [S::O(0), S::V(2), S::V(4)], [S::V(0), S::I(2), S::I(4)]),
    (0, [S::V(0), S::V(1), S::V(3)], [S::I(0), S::I(1), S::I(3)]),
];

const RHS_FACTORS: [(usize, [S; 3], [S; 3]); 4] = [
    // R^{a,b,d}_{u,v,x}[ABD] R^{u,c,e}_{i,w,y}[ACE] R^{v,w,f}_{j,k,z}[BCF] R^{x,y,z}_{l,m,n}[DEF]
    (0, [S::O(0), S::O(1), S::O(3)], [S::V(0), S::V(1), S::V(3)]),
    (1, [S::V(0), S::O(2), S::O(4)], [S::I(0), S::V(2), S::V(4)]),
    (2, [S::V(1), S::V(2), S::O(5)], [S::I(1), S::I(2), S::V(5)]),
    (3, [S::V(3), S::V(4), S::V(5)], [S::I(3), S::I(4), S::I(5)]),
];

fn resolve(s: S, out: &[i64; 6], inn: &[i64; 6], x: &[i64; 6]) -> i64 {
    match s {
        S::O(n) => out[n],
        S::I(n) => inn[n],
        S::V(n) => x[n],
    }
}

fn slot(s: S, out: &[i64; 6], inn: &[i64; 6]) -> Slot {
    match s {
        S::O(n) => Slot::Known(out[n]),
        S::I(n) => Slot::Known(inn[n]),
        S::V(n) => Slot::Var(n),
    }
}

/// Evaluator for one wiring with per-factor element caches.
pub struct RrrrSystem<'a> {
    pub wiring: &'a Wiring,
    caches: [HashMap<([i64; 3], [i64; 3]), Scalar>; 4],
    rels: [Vec<(Rel, [i64; 6], i64)>; 4],
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SideStats {
    pub lhs_terms: usize,
    pub rhs_terms: usize,
}

impl<'a> RrrrSystem<'a> {
    pub fn new(wiring: &'a Wiring) -> Self {
        let rels = [0, 1, 2, 3].map(|f| kernel_relations(&wiring.factors[f].kernel));
        RrrrSystem { wiring, caches: Default::default(), rels }
    }

    fn element(&mut self, f: usize, out: [i64; 3], inn: [i64; 3]) -> Result<Scalar, RrrrError> {
        if let Some(v) = self.caches[f].get(&(out, inn)) {
            return Ok(v.clone());
        }
        let v = self.wiring.factors[f].kernel.element(out, inn)?;
        self.caches[f].insert((out, inn), v.clone());
        Ok(v)
    }

    /// Intermediate sextets of one side, from constraint propagation.
    pub fn intermediates(&self, lhs: bool, out: &[i64; 6], inn: &[i64; 6]) -> Result<Vec<[i64; 6]>, RrrrError> {
        let spec = if lhs { &LHS_FACTORS } else { &RHS_FACTORS };
        let mut cs = Vec::new();
        for (f, o, i) in spec {
            let slots = [slot(o[0], out, inn), slot(o[1], out, inn), slot(o[2], out, inn), slot(i[0], out, inn), slot(i[1], out, inn), slot(i[2], out, inn)];
            for rel in &self.rels[*f] {
                cs.push(lower(rel, slots));
            }
        }
        enumerate(&cs)
    }

    fn side(&mut self, lhs: bool, out: &[i64; 6], inn: &[i64; 6]) -> Result<(Scalar, usize), RrrrError> {
        let spec = if lhs { LHS_FACTORS } else { RHS_FACTORS };
        let xs = self.intermediates(lhs, out, inn)?;
        let mut total = Scalar::zero();
        let mut terms = 0;
        'outer: for x in &xs {
            let mut prod: Option<Scalar> = None;
            for (f, o, i) in spec {
                let eo = [resolve(o[0], out, inn, x), resolve(o[1], out, inn, x), resolve(o[2], out, inn, x)];
                let ei = [resolve(i[0], out, inn, x), resolve(i[1], out, inn, x), resolve(i[2], out, inn, x)];
                if !self.wiring.factors[f].kernel.support(eo, ei) {
                    continue 'outer;
                }
                let e = self.element(f, eo, ei)?;
                if e.is_zero() {
                    continue 'outer;
                }
                prod = Some(match prod {
                    None => e,
                    Some(p) => p * e,
                });
            }
            if let Some(p) = prod {
                total += p;
                terms += 1;
            }
        }
        Ok((total, terms))
    }

    /// Both sides of the component of RRRR at (out, in).
    pub fn check_pair(&mut self, out: &[i64; 6], inn: &[i64; 6]) -> Result<(Scalar, Scalar, SideStats), RrrrError> {
        self.wiring.check_lattice(out)?;
        self.wiring.check_lattice(inn)?;
        let (l, nl) = self.side(true, out, inn)?;
        let (r, nr) = self.side(false, out, inn)?;
        Ok((l, r, SideStats { lhs_terms: nl, rhs_terms: nr }))
    }

    /// A pair reached from a random in-sextet by a walk through the supports of the left-hand factors.
    pub fn sample_pair(&mut self, s: &mut Sampler) -> Result<([i64; 6], [i64; 6]), RrrrError> {
        let letters = self.wiring.letters();
        let mut inn = [0i64; 6];
        for n in 0..6 {
            inn[n] = if letters[n] == 'O' { s.int(0, 3) } else { s.int(-2, 2) };
        }
        let mut state = inn;
        for f in 0..4 {
            let k = &self.wiring.factors[f].kernel;
            let ls = self.wiring.factors[f].lines;
            let cur = [state[ls[0]], state[ls[1]], state[ls[2]]];
            let mut cands = if k.kind.locally_finite() {
                k.out_fiber(cur)?
            } else {
                let r = WALK_RADIUS;
                let mut v = Vec::new();
                for da in -r..=r {
                    for db in -r..=r {
                        for dc in -r..=r {
                            let cand = [cur[0] + da, cur[1] + db, cur[2] + dc];
                            if k.support(cand, cur) {
                                v.push(cand);
                            }
                        }
                    }
                }
                v
            };
            // draw without replacement until a nonzero element turns up
            let mut pick: Option<[i64; 3]> = None;
            while !cands.is_empty() {
                let n = s.int(0, cands.len() as i64 - 1) as usize;
                let o = cands.swap_remove(n);
                if !self.element(f, o, cur)?.is_zero() {
                    pick = Some(o);
                    break;
                }
            }
            if let Some(o) = pick {
                for (n, &l) in ls.iter().enumerate() {
                    state[l] = o[n];
                }
            }
        }
        Ok((state, inn))
    }
}

fn s6(x: &[i64; 6]) -> String {
    format!("({})", x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
}

/// Box radius searched around the current triple when a factor is not locally finite.
const WALK_RADIUS: i64 = 4;

/// Largest share of pairs allowed to have both sides zero.
pub const ZERO_PAIR_CAP: f64 = 0.25;

/// `pairs` sampled pairs of one type, compared exactly.
pub fn rrrr_sweep(typ: &str, seed: u64, pairs: usize) -> Result<Report, RrrrError> {
    let wiring = wire_parameters(typ, seed)?;
    rrrr_sweep_wiring(&wiring, seed, pairs)
}

pub fn rrrr_sweep_wiring(wiring: &Wiring, seed: u64, pairs: usize) -> Result<Report, RrrrError> {
    let mut rep = Report::new("rrrr", &wiring.typ);
    rep.seed = Some(seed);
    rep.params.insert("q".into(), fmt_scalar(&wiring.q.value));
    for (n, l) in wiring.lines.iter().enumerate() {
        match l {
            LineParams::Mu(m) => {
                rep.params.insert(format!("mu{}", n + 1), fmt_scalar(&m.value));
            }
            LineParams::Quartet(qt) => {
                rep.params.insert(format!("rstw{}", n + 1), qt.to_string());
            }
        }
    }
    for f in &wiring.factors {
        if f.kernel.kind.has_sector_d() {
            rep.params.insert(format!("d[{}:{}]", f.name, f.kernel.kind), f.kernel.d.to_string());
        }
    }
    let mut sys = RrrrSystem::new(wiring);
    let mut s = Sampler::new(seed ^ 0x5eed);
    let zero_cap = (pairs as f64 * ZERO_PAIR_CAP).floor() as u64;
    let mut attempts = 0;
    while rep.count("pairs") < pairs as u64 {
        attempts += 1;
        if attempts > 20 * pairs + 100 {
            rep.note("sampling budget exhausted".into());
            break;
        }
        let (out, inn) = sys.sample_pair(&mut s)?;
        let (l, r, st) = sys.check_pair(&out, &inn)?;
        let zero = l.is_zero() && r.is_zero();
        if zero && rep.count("zero_pairs") >= zero_cap {
            continue;
        }
        rep.bump("pairs", 1);
        rep.count_check();
        rep.bump(if zero { "zero_pairs" } else { "nonzero_pairs" }, 1);
        rep.bump("lhs_terms", st.lhs_terms as u64);
        rep.bump("rhs_terms", st.rhs_terms as u64);
        if l != r {
            rep.fail(format!("out={} in={}", s6(&out), s6(&inn)), fmt_scalar(&l), fmt_scalar(&r));
        }
    }
    Ok(rep)
}

/// Brute-force intermediate enumeration over a box, for cross-checking the propagation engine.
pub fn brute_intermediates(
    sys: &RrrrSystem,
    lhs: bool,
    out: &[i64; 6],
    inn: &[i64; 6],
    lo: i64,
    hi: i64,
) -> Vec<[i64; 6]> {
    let spec = if lhs { LHS_FACTORS } else { RHS_FACTORS };
    let letters = sys.wiring.letters();
    let mut res = Vec::new();
    let ranges: Vec<(i64, i64)> = (0..6).map(|_| (lo, hi)).collect();
    let mut x = [0i64; 6];
    fn rec(
        n: usize,
        x: &mut [i64; 6],
        ranges: &[(i64, i64)],
        f: &mut dyn FnMut(&[i64; 6]),
    ) {
        if n == 6 {
            f(x);
            return;
        }
        for v in ranges[n].0..=ranges[n].1 {
            x[n] = v;
            rec(n + 1, x, ranges, f);
        }
    }
    let _ = letters;
    rec(0, &mut x, &ranges, &mut |x: &[i64; 6]| {
        let ok = spec.iter().all(|(f, o, i)| {
            let eo = [resolve(o[0], out, inn, x), resolve(o[1], out, inn, x), resolve(o[2], out, inn, x)];
            let ei = [resolve(i[0], out, inn, x), resolve(i[1], out, inn, x), resolve(i[2], out, inn, x)];
            sys.wiring.factors[*f].kernel.support(eo, ei)
        });
        if ok {
            res.push(*x);
        }
    });
    res
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn type_list() {
        assert_eq!(FINITE_TYPES.len(), 25);
        assert!(FINITE_TYPES.contains(&"ZOOOOO") && FINITE_TYPES.contains(&"OZZOOZ"));
        assert!(!FINITE_TYPES.contains(&"ZZZZZZ"));
        assert!(matches!(Wiring::sample("ZZZZZZ", 1), Err(RrrrError::NotFinite(_))));
    }

    #[test]
    fn factor_kinds_follow_letters() {
        let w = Wiring::sample("OOOZOO", 3).unwrap();
        let kinds: Vec<KernelType> = w.factors.iter().map(|f| f.kernel.kind).collect();
        assert_eq!(kinds, vec![KernelType::OOZ, KernelType::OOO, KernelType::OOO, KernelType::ZOO]);
    }

    #[test]
    fn cycle_constraints_are_consistent() {
        for seed in 0..5 {
            let w = Wiring::sample("OOZZOO", seed).unwrap();
            assert_eq!(w.factors.len(), 4);
        }
    }

    #[test]
    fn ceil_div_rounds_up() {
        assert_eq!(ceil_div(7, 2), 4);
        assert_eq!(ceil_div(-7, 2), -3);
        assert_eq!(ceil_div(6, 3), 2);
    }
}
