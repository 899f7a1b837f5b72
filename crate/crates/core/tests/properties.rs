use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use tetra_core::exactnum::{log_q, phi_tilde, pw, qbinomial, qpochhammer, qpochhammer_inv, rat, Scalar};
use tetra_core::kernels::{KernelType, RKernel};
use tetra_core::lops::vtuples;
use tetra_core::rrrr::{brute_intermediates, wire_parameters, RrrrSystem};
use tetra_core::verify::{rlll_check_pair, zzz_t_dependence};
use tetra_core::weyl::{apply_rep, RepTag, StateVector, WeylElement};

fn rational() -> impl Strategy<Value = Scalar> {
    (-12i64..=12, 1i64..=12)
        .prop_map(|(n, d)| rat(n, d))
        .prop_filter("generic", |x| !x.is_zero() && x.abs() != Scalar::one())
}

fn weyl() -> impl Strategy<Value = WeylElement> {
    prop::collection::vec(((-3i64..=3, -3i64..=3), -5i64..=5), 0..4).prop_map(|ts| {
        WeylElement::from_terms(ts.into_iter().map(|(m, c)| (m, Scalar::from_integer(c.into()))))
    })
}

fn kind() -> impl Strategy<Value = KernelType> {
    prop::sample::select(KernelType::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pochhammer_cocycle(z in rational(), b in rational(), m in -6i64..=6, n in -6i64..=6) {
        prop_assume!(log_q(&z, &b).is_none());
        let l = qpochhammer(&z, &b, m + n).unwrap();
        let r = qpochhammer(&z, &b, m).unwrap() * qpochhammer(&(&z * pw(&b, m)), &b, n).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn pochhammer_inverse(z in rational(), b in rational(), m in -6i64..=6) {
        prop_assume!(log_q(&z, &b).is_none());
        prop_assert!((qpochhammer(&z, &b, m).unwrap() * qpochhammer_inv(&z, &b, m).unwrap()).is_one());
    }

    #[test]
    fn qbinomial_symmetry_and_pascal(b in rational(), n in 1i64..=10, m in 0i64..=10) {
        prop_assert_eq!(qbinomial(n, m, &b).unwrap(), qbinomial(n, n - m, &b).unwrap());
        let pascal = qbinomial(n - 1, m - 1, &b).unwrap() + pw(&b, m) * qbinomial(n - 1, m, &b).unwrap();
        prop_assert_eq!(qbinomial(n, m, &b).unwrap(), pascal);
    }

    #[test]
    fn phi_tilde_recurrence(z in rational(), q in rational(), m in -8i64..=8) {
        prop_assume!(log_q(&z, &q).is_none());
        let l = phi_tilde(m + 2, &z, &q).unwrap();
        let r = (Scalar::one() - &z * pw(&q, m)) * phi_tilde(m, &z, &q).unwrap();
        prop_assert_eq!(l, r);
    }

    #[test]
    fn weyl_ring_axioms(a in weyl(), b in weyl(), c in weyl(), q in rational()) {
        prop_assert_eq!(a.mul(&b, &q).mul(&c, &q), a.mul(&b.mul(&c, &q), &q));
        prop_assert_eq!(a.mul(&b.add(&c), &q), a.mul(&b, &q).add(&a.mul(&c, &q)));
        prop_assert_eq!(a.mul(&WeylElement::one(), &q), a);
    }

    #[test]
    fn weyl_commutation(q in rational()) {
        let xz = WeylElement::x().mul(&WeylElement::z(), &q);
        let zx = WeylElement::z().mul(&WeylElement::x(), &q);
        prop_assert_eq!(xz, zx.scale(&q));
    }

    #[test]
    fn representations_are_homomorphisms(
        a in weyl(),
        b in weyl(),
        q in rational(),
        tag in prop::sample::select(vec![RepTag::ZPlus, RepTag::ZMinus, RepTag::X]),
        m in -4i64..=4,
    ) {
        let v = StateVector::basis(m);
        let l = apply_rep(tag, &q, &a.mul(&b, &q), &v).unwrap();
        let r = apply_rep(tag, &q, &a, &apply_rep(tag, &q, &b, &v).unwrap()).unwrap();
        prop_assert_eq!(l, r);
    }
}

fn index3(letters: [char; 3]) -> impl Strategy<Value = [i64; 3]> {
    let axis = |c: char| if c == 'O' { 0i64..=4 } else { -3i64..=3 };
    (axis(letters[0]), axis(letters[1]), axis(letters[2])).prop_map(|(a, b, c)| [a, b, c])
}

fn kernel_and_indices() -> impl Strategy<Value = (KernelType, u64, i64, [i64; 3], [i64; 3])> {
    (kind(), 0u64..40, -2i64..=2).prop_flat_map(|(k, seed, d)| {
        (Just(k), Just(seed), Just(d), index3(k.letters()), index3(k.letters()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn element_vanishes_off_support((k, seed, d, out, inn) in kernel_and_indices()) {
        let d = if k.has_sector_d() { d } else { 0 };
        let r = RKernel::sample(k, seed, d).unwrap();
        if !r.support(out, inn) {
            prop_assert!(r.element(out, inn).unwrap().is_zero());
        }
    }

    #[test]
    fn rlll_holds_pointwise((k, seed, d, out, inn) in kernel_and_indices(), v in prop::sample::select(vtuples())) {
        let d = if k.has_sector_d() { d } else { 0 };
        let r = RKernel::sample(k, seed, d).unwrap();
        let (l, rr) = rlll_check_pair(&r, v, out, inn).unwrap();
        prop_assert_eq!(l, rr);
    }

    #[test]
    fn zzz_t_scaling(seed in 0u64..40, l1 in rational(), l2 in rational(), l3 in rational(), out in index3(['Z'; 3]), inn in index3(['Z'; 3])) {
        let r = RKernel::sample(KernelType::ZZZ, seed, 0).unwrap();
        prop_assert!(zzz_t_dependence(&r, [l1, l2, l3], out, inn).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn intermediate_enumeration_is_sound(
        typ in prop::sample::select(vec!["OOOOOO", "ZOOOOO", "OOZOZO", "OZZOOZ", "ZOZOZO"]),
        seed in 0u64..20,
        lhs in any::<bool>(),
    ) {
        let w = wire_parameters(typ, seed).unwrap();
        let mut sys = RrrrSystem::new(&w);
        let mut s = tetra_core::exactnum::Sampler::new(seed);
        let (out, inn) = sys.sample_pair(&mut s).unwrap();
        let fast = sys.intermediates(lhs, &out, &inn).unwrap();
        let lo = out.iter().chain(&inn).min().unwrap() - 1;
        let hi = out.iter().chain(&inn).max().unwrap() + 1;
        let slow = brute_intermediates(&sys, lhs, &out, &inn, lo, hi);
        let inside: Vec<[i64; 6]> = fast.into_iter().filter(|x| x.iter().all(|v| (lo..=hi).contains(v))).collect();
        // propagation and the exhaustive scan agree on the box
        prop_assert_eq!(inside.len(), slow.len());
        for x in &slow {
            prop_assert!(inside.contains(x), "missed {:?}", x);
        }
    }
}
