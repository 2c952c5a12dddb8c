
use flatkahler::classifier::{classify, ClassifyError, Settings};
use flatkahler::cohomology::{coboundary_matrix, torus_h1, GModule};
use flatkahler::crystal::{fixed_point_group, DiagonalAction};
use flatkahler::groups::{AbstractAbelianGroup, DEFAULT_BOUND};
use flatkahler::linalg::{cokernel_structure, smith_normal_form, solve_linear, IntMatrix, RatVector};
use flatkahler::torus::{make_torus, FactorDescription, Preset, TorsionPoint, TorusSpec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn matrix(rows: usize, cols: usize, range: i64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-range..=range, rows * cols).prop_map(move |v| {
        let rows: Vec<Vec<i64>> = v.chunks(cols).map(<[i64]>::to_vec).collect();
        IntMatrix::from_rows(&rows).unwrap()
    })
}

/// Product of elementary row operations, so always unimodular.
fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -3i64..=3, any::<bool>()), 0..12).prop_map(move |ops| {
        let mut m = IntMatrix::identity(n);
        for (i, j, c, negate) in ops {
            let mut e = IntMatrix::identity(n);
            if i != j {
                e[(i, j)] = BigInt::from(c);
            } else if negate {
                e[(i, i)] = BigInt::from(-1);
            }
            m = e.checked_mul(&m).unwrap();
        }
        m
    })
}

#[derive(Clone, Copy, Debug)]
enum Tagging {
    /// Generic curves pairwise non-isogenous by tag.
    Distinct,
    /// All generic curves share one tag.
    Shared,
    NonIsogenous,
}

fn torus(presets: &[Preset], tagging: Tagging) -> TorusSpec {
    let d: Vec<FactorDescription> = presets
        .iter()
        .map(|&p| FactorDescription::Preset {
            preset: p,
            iso_tag: matches!(tagging, Tagging::Shared).then(|| p.name().to_string()),
        })
        .collect();
    make_torus(&d, matches!(tagging, Tagging::NonIsogenous)).unwrap()
}

fn unit_order(p: Preset) -> u64 {
    match p {
        Preset::Generic => 2,
        Preset::Gauss => 4,
        Preset::Eisenstein => 6,
    }
}

fn preset() -> impl Strategy<Value = Preset> {
    prop_oneof![Just(Preset::Generic), Just(Preset::Gauss), Just(Preset::Eisenstein)]
}

/// A valid diagonal action of a small abelian group on 2 or 3 curves. Exponents
/// are chosen so every relation holds; unfaithful choices are discarded.
fn random_action() -> impl Strategy<Value = DiagonalAction> {
    let moduli = prop_oneof![
        Just(vec![2u64]),
        Just(vec![3]),
        Just(vec![4]),
        Just(vec![6]),
        Just(vec![2, 2]),
    ];
    let tagging = prop_oneof![Just(Tagging::Distinct), Just(Tagging::Shared), Just(Tagging::NonIsogenous)];
    (prop::collection::vec(preset(), 2..=3), moduli, prop::collection::vec(0u64..12, 6), tagging)
        .prop_filter_map("action must be faithful", |(presets, moduli, seeds, tagging)| {
            let exps: Vec<Vec<u64>> = moduli
                .iter()
                .enumerate()
                .map(|(j, &n)| {
                    presets
                        .iter()
                        .enumerate()
                        .map(|(k, &p)| {
                            let o = unit_order(p);
                            let step = o / o.gcd(&n);
                            (seeds[j * 3 + k] * step) % o
                        })
                        .collect()
                })
                .collect();
            let rows: Vec<&[u64]> = exps.iter().map(Vec::as_slice).collect();
            let t = torus(&presets, tagging);
            let g = AbstractAbelianGroup::new(moduli).ok()?;
            let e: Vec<Vec<Vec<u64>>> = rows.iter().map(|r| r.iter().map(|&x| vec![x]).collect()).collect();
            DiagonalAction::from_exponents(&t, g, &e).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn smith_form_is_a_valid_factorization(m in matrix(4, 6, 9)) {
        let s = smith_normal_form(&m);
        prop_assert!(s.u.is_unimodular());
        prop_assert!(s.v.is_unimodular());
        prop_assert_eq!(s.u.checked_mul(&m).unwrap().checked_mul(&s.v).unwrap(), s.d.clone());
        for r in 0..4 {
            for c in 0..6 {
                prop_assert!(r == c || s.d[(r, c)].is_zero());
            }
        }
        let diag = s.diagonal();
        prop_assert!(diag.iter().all(|x| !x.is_negative()));
        for w in diag.windows(2) {
            // d_i | d_{i+1}, with zeros only at the end.
            let ok = if w[0].is_zero() { w[1].is_zero() } else { w[1].is_multiple_of(&w[0]) };
            prop_assert!(ok, "divisibility fails at {:?}", w);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn integer_solutions_satisfy_the_system(a in matrix(3, 4, 6), x in prop::collection::vec(-5i64..=5, 4)) {
        let b = a.mul_vec(&x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>());
        let sol = solve_linear(&a, &RatVector::from_integers(&b), &BigInt::zero()).unwrap().expect("solvable");
        prop_assert_eq!(a.mul_vec(&sol.particular), b);
        for k in &sol.kernel {
            prop_assert!(a.mul_vec(k).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn modular_solutions_match_enumeration(
        a in matrix(2, 3, 8),
        b in prop::collection::vec(0i64..12, 2),
        m in 2i64..8,
    ) {
        let modulus = BigInt::from(m);
        let rhs = RatVector::from_integers(&b);
        let brute: Vec<Vec<BigInt>> = (0..m.pow(3))
            .map(|i| vec![i / (m * m), (i / m) % m, i % m])
            .filter(|x| {
                let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
                a.mul_vec(&xb).iter().zip(&b).all(|(l, r)| (l - r).is_multiple_of(&modulus))
            })
            .map(|x| x.into_iter().map(BigInt::from).collect())
            .collect();
        match solve_linear(&a, &rhs, &modulus).unwrap() {
            None => prop_assert!(brute.is_empty()),
            Some(sol) => {
                prop_assert_eq!(sol.count().unwrap(), BigInt::from(brute.len()));
                prop_assert_eq!(sol.enumerate().unwrap(), brute);
            }
        }
    }

    #[test]
    fn cokernel_is_invariant_under_unimodular_change(m in matrix(3, 4, 7), u in unimodular(3), v in unimodular(4)) {
        let moved = u.checked_mul(&m).unwrap().checked_mul(&v).unwrap();
        prop_assert_eq!(cokernel_structure(&moved), cokernel_structure(&m));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coboundary_squares_to_zero(a in random_action()) {
        let module = GModule::lattice(a.group(), a.matrices().to_vec()).unwrap();
        let d0 = coboundary_matrix(a.group(), &module, 0);
        let d1 = coboundary_matrix(a.group(), &module, 1);
        let d2 = coboundary_matrix(a.group(), &module, 2);
        prop_assert!(d1.checked_mul(&d0).unwrap().is_zero());
        prop_assert!(d2.checked_mul(&d1).unwrap().is_zero());
    }

    #[test]
    fn reduction_ignores_added_coboundaries(a in random_action(), seed in prop::collection::vec(0i64..1000, 6)) {
        let h = torus_h1(&a, DEFAULT_BOUND).unwrap();
        let n = a.torus().rank();
        // Classes are stored through cocycles with values in T[|G|].
        let t = TorsionPoint::new(a.order() as u64, &seed[..n]);
        for z in h.elements().into_iter().take(16) {
            let table = h.table(&z);
            let shifted: Vec<TorsionPoint> = (0..a.order())
                .map(|g| table[g].add(&t.apply(a.matrix(g))).sub(&t))
                .collect();
            let v = h.vector(&shifted).unwrap();
            prop_assert!(h.is_cocycle(&v));
            prop_assert_eq!(h.canonical(&v).unwrap(), z);
        }
    }

    #[test]
    fn orbits_partition_classes_and_respect_orbit_stabilizer(a in random_action()) {
        let result = classify(&a, &Settings::default());
        prop_assume!(!matches!(result, Err(ClassifyError::IsogenousBlock { .. } | ClassifyError::ImageExceedsBound { .. })));
        let (model, report) = result.unwrap();
        let mut seen: Vec<usize> = report.orbits.iter().flat_map(|o| o.members.clone()).collect();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..report.special_class_count).collect::<Vec<_>>());
        for o in &report.orbits {
            prop_assert_eq!(o.size, o.members.len());
            if let (Some(img), Some(stab)) = (&report.image_order, &o.image_stabilizer_order) {
                prop_assert_eq!(stab * BigInt::from(o.size), img.clone());
            }
            if let (Some(n), Some(stab)) = (model.order(), &o.stabilizer_order) {
                prop_assert_eq!(stab * BigInt::from(o.size), n);
            }
        }
    }

    #[test]
    fn renumbering_factors_changes_nothing(a in random_action(), rot in 0usize..6) {
        let k = a.torus().len();
        let mut order: Vec<usize> = (0..k).collect();
        order.rotate_left(rot % k);
        if rot >= 3 {
            order.swap(0, k - 1);
        }
        let b = a.reorder_factors(&order);
        let s = Settings::default();
        let (ra, rb) = (classify(&a, &s), classify(&b, &s));
        if let (Err(ea), Err(eb)) = (&ra, &rb) {
            prop_assert_eq!(std::mem::discriminant(ea), std::mem::discriminant(eb));
            return Ok(());
        }
        let ((ma, ra), (mb, rb)) = (ra.unwrap(), rb.unwrap());
        prop_assert_eq!(&ra.h1, &rb.h1);
        prop_assert_eq!(ra.special_class_count, rb.special_class_count);
        prop_assert_eq!(ra.m(), rb.m());
        let sizes = |r: &flatkahler::classifier::ClassificationReport| {
            let mut v: Vec<usize> = r.orbits.iter().map(|o| o.size).collect();
            v.sort_unstable();
            v
        };
        prop_assert_eq!(sizes(&ra), sizes(&rb));
        prop_assert_eq!(ma.order(), mb.order());
        prop_assert_eq!(ma.permutation_order(), mb.permutation_order());
        prop_assert_eq!(fixed_point_group(&a), fixed_point_group(&b));
    }
}
