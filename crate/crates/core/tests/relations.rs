use tetra_core::aqsl3::ZzzConfig;
use tetra_core::exactnum::{int, LineParams, Param, Sampler};
use tetra_core::kernels::{KernelType, RKernel};
use tetra_core::rrrr::{wire_parameters, Wiring};
use tetra_core::verify::{ooo_symmetry_check, rlll_check_pair, sector_coupling_audit, Window};

#[test]
fn parity_sectors_are_closed_under_the_relations() {
    let w = Window::new((0, 3), (-2, 2));
    for (kind, d) in [(KernelType::ZZZ, 0), (KernelType::XXZ, 0), (KernelType::OZO, 1)] {
        let k = RKernel::sample(kind, 5, d).unwrap();
        let r = sector_coupling_audit(&k, &w).unwrap();
        assert!(r.passed(), "{}: {:?}", kind, r.failures.first());
        assert!(r.count("checks") > 0);
    }
}

#[test]
fn zzz_shift_relation() {
    // v = (0,0,1|0,0,1): R^{a,b,c}_{i,j-1,k-1} = R^{a,b+1,c+1}_{i,j,k}
    let k = RKernel::sample(KernelType::ZZZ, 8, 0).unwrap();
    for (out, inn) in [([1, -1, 2], [0, 1, 1]), ([0, 0, 0], [2, -1, 1]), ([-2, 1, 0], [1, 1, -1])] {
        let l = k.element(out, [inn[0], inn[1] - 1, inn[2] - 1]).unwrap();
        let r = k.element([out[0], out[1] + 1, out[2] + 1], inn).unwrap();
        assert_eq!(l, r);
        let (a, b) = rlll_check_pair(&k, [0, 0, 1, 0, 0, 1], out, inn).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn ooozoo_wiring() {
    let w = wire_parameters("OOOZOO", 2).unwrap();
    for (n, l) in w.lines.iter().enumerate() {
        assert_eq!(matches!(l, LineParams::Quartet(_)), n == 3, "line {}", n + 1);
    }
    assert!(Wiring::sample("ZZZZZZ", 1).is_err());
}

#[test]
fn symmetry_check_needs_unit_mu() {
    let mut s = Sampler::new(3);
    let ls = [s.param(), s.param(), s.param()].map(LineParams::Mu);
    let k = RKernel::new(KernelType::OOO, s.param(), ls, 0).unwrap();
    assert!(ooo_symmetry_check(&k, 2).is_err());
    let one = LineParams::Mu(Param::square(int(1)));
    let k = RKernel::new(KernelType::OOO, s.param(), [one.clone(), one.clone(), one], 0).unwrap();
    assert!(ooo_symmetry_check(&k, 3).unwrap().passed());
}

#[test]
fn corner_constants() {
    for seed in [1, 9] {
        let c = ZzzConfig::sample(seed);
        let [_, l2, _] = c.quartets();
        let (r2, s2) = (&l2.r.value, &l2.s.value);
        assert_eq!(c.a_const(1, 1), int(1) / (r2 * r2 * s2));
        assert_eq!(c.a_const(3, 3), int(1) / (r2 * &c.u.value));
    }
}
