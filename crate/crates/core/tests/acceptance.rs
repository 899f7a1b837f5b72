// Acceptance gate: one line per criterion, exact equality everywhere.
// Runs without the libtest harness so each line is printed as soon as it is known.

use std::process::ExitCode;
use std::time::Instant;

use tetra_core::aqsl3::{intertwiner_check, prop41_constant_check, IntertwinerConfig, Violation, ZzzConfig};
use tetra_core::kernels::{KernelType, Mutation, RKernel};
use tetra_core::report::Report;
use tetra_core::rrrr::{rrrr_sweep, FINITE_TYPES};
use tetra_core::verify::{
    boundary_check, fault_sweep, inverse_check, ooo_symmetry_check, ooo_unit_kernel, oracle_ratio_check, rlll_sweep,
    rlll_trials, special_function_suite, support_exactness_check, Window,
};
use tetra_core::exactnum::Sampler;

struct Outcome {
    ok: bool,
    detail: String,
}

fn summarize(reps: &[Report]) -> (bool, u64, String) {
    let checks: u64 = reps.iter().map(|r| r.count("checks")).sum();
    let bad: Vec<String> = reps
        .iter()
        .filter(|r| !r.passed())
        .map(|r| match r.failures.first() {
            Some(f) => format!("{}/{}: {} lhs={} rhs={}", r.suite, r.kind, f.at, f.lhs, f.rhs),
            None => format!("{}/{}: {}", r.suite, r.kind, r.notes.join("; ")),
        })
        .collect();
    (bad.is_empty(), checks, bad.join(" | "))
}

fn from_reports(reps: &[Report], extra: String) -> Outcome {
    let (ok, checks, bad) = summarize(reps);
    let detail = if ok { format!("{} exact checks{}", checks, extra) } else { bad };
    Outcome { ok, detail }
}

fn err(e: impl std::fmt::Display) -> Outcome {
    Outcome { ok: false, detail: format!("error: {}", e) }
}

macro_rules! tryo {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(e) => return err(e),
        }
    };
}

fn c1_rlll() -> Outcome {
    let w = Window::default();
    let mut reps = Vec::new();
    for kind in KernelType::ALL {
        reps.push(tryo!(rlll_trials(kind, 1, 3, &w)));
    }
    from_reports(&reps, format!(", 11 types x 3 points, {}", w.describe()))
}

fn c2_rrrr() -> Outcome {
    let mut reps = Vec::new();
    let mut short = Vec::new();
    let mut nonzero = 0;
    for typ in FINITE_TYPES {
        let r = tryo!(rrrr_sweep(typ, 7, 500));
        if r.count("pairs") < 500 {
            short.push(typ);
        }
        nonzero += r.count("nonzero_pairs");
        reps.push(r);
    }
    let mut o = from_reports(&reps, format!(", {} types, {} nonzero pairs", FINITE_TYPES.len(), nonzero));
    if !short.is_empty() {
        o.ok = false;
        o.detail = format!("fewer than 500 pairs for {:?}; {}", short, o.detail);
    }
    o
}

fn c3_oracle() -> Outcome {
    let mut reps = Vec::new();
    for seed in [3, 4] {
        let k = tryo!(RKernel::sample(KernelType::ZZZ, seed, 0));
        let r = tryo!(oracle_ratio_check(&k, seed, 50));
        reps.push(r);
    }
    let mut o = from_reports(&reps, ", 4 sectors x 50 per point".into());
    for r in &reps {
        for s in ["sector_00", "sector_01", "sector_10", "sector_11"] {
            if r.count(s) < 50 {
                o.ok = false;
                o.detail = format!("{} has {} samples; {}", s, r.count(s), o.detail);
            }
        }
    }
    o
}

fn c4_boundary() -> Outcome {
    let reps = vec![tryo!(boundary_check(11)), tryo!(boundary_check(12))];
    from_reports(&reps, String::new())
}

fn c5_support() -> Outcome {
    let mut reps = Vec::new();
    for kind in KernelType::ALL {
        let d = if kind.has_sector_d() { 1 } else { 0 };
        let k = tryo!(RKernel::sample(kind, 21, d));
        reps.push(tryo!(support_exactness_check(&k, 6)));
    }
    let fibers: u64 = reps.iter().map(|r| r.count("fiber_total")).sum();
    from_reports(&reps, format!(", [0,6] boxes, {} fiber elements", fibers))
}

fn c6_inverse() -> Outcome {
    let mut reps = Vec::new();
    for kind in [KernelType::OOZ, KernelType::ZOO, KernelType::OOO] {
        for (seed, d) in [(31, 0), (32, 2), (33, -1)] {
            let d = if kind.has_sector_d() { d } else { 0 };
            let k = tryo!(RKernel::sample(kind, seed, d));
            reps.push(tryo!(inverse_check(&k, &Window::default())));
        }
    }
    from_reports(&reps, String::new())
}

fn c7_symmetry() -> Outcome {
    let mut reps = Vec::new();
    for seed in [41, 42] {
        let q = Sampler::new(seed).param();
        reps.push(tryo!(ooo_symmetry_check(&ooo_unit_kernel(q), 6)));
    }
    from_reports(&reps, ", indices <= 6".into())
}

fn c8_intertwiner() -> Outcome {
    let mut reps = Vec::new();
    for seed in [51, 52] {
        let cfg = IntertwinerConfig::sample_ooo(seed);
        reps.push(tryo!(intertwiner_check(&cfg, &Window::default())));
        // the same statement through the RLLL code path
        let k = tryo!(cfg.kernel());
        reps.push(tryo!(rlll_sweep(&k, &Window::new((0, 3), (-3, 3)))));
    }
    let small = Window::new((0, 3), (-2, 2));
    let z = ZzzConfig::sample(53);
    reps.push(tryo!(intertwiner_check(&IntertwinerConfig::Zzz(z.clone()), &small)));
    reps.push(tryo!(prop41_constant_check(&z, &small)));
    let mut o = from_reports(&reps, String::new());
    let mut missed = Vec::new();
    for v in Violation::ALL {
        let r = tryo!(intertwiner_check(&IntertwinerConfig::Zzz(z.clone().with_violation(Some(v))), &small));
        if r.passed() {
            missed.push(v.describe());
        }
    }
    if missed.is_empty() {
        o.detail.push_str(&format!(", {} of {} violations detected", Violation::ALL.len(), Violation::ALL.len()));
    } else {
        o.ok = false;
        o.detail = format!("undetected violations: {:?}; {}", missed, o.detail);
    }
    o
}

fn c9_special() -> Outcome {
    let reps = vec![tryo!(special_function_suite(61)), tryo!(special_function_suite(62))];
    from_reports(&reps, String::new())
}

fn c10_faults() -> Outcome {
    let mut missed = Vec::new();
    for m in Mutation::ALL {
        let r = tryo!(fault_sweep(m, 71, &Window::default()));
        if r.passed() {
            missed.push(format!("{:?}", m));
        }
    }
    if missed.is_empty() {
        Outcome { ok: true, detail: format!("{} of {} mutations caught", Mutation::ALL.len(), Mutation::ALL.len()) }
    } else {
        Outcome { ok: false, detail: format!("mutations not caught: {}", missed.join(", ")) }
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("RLLL completeness", c1_rlll),
        ("RRRR reproduction", c2_rrrr),
        ("ZZZ oracle uniqueness", c3_oracle),
        ("boundary values", c4_boundary),
        ("support exactness", c5_support),
        ("inverses", c6_inverse),
        ("OOO symmetry", c7_symmetry),
        ("intertwiner equivalences", c8_intertwiner),
        ("special functions", c9_special),
        ("fault sensitivity", c10_faults),
    ];
    // `cargo test acceptance -- <n>` runs only criterion n
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, (name, f)) in criteria.iter().enumerate() {
        let n = n + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let o = f();
        let verdict = if o.ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {:<26} {} (tolerance 0, {:.0}s) {}", n, name, verdict, t.elapsed().as_secs_f64(), o.detail);
        if !o.ok {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{} criteria failed", failed);
        ExitCode::FAILURE
    }
}
