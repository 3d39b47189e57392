use proptest::prelude::*;
use qkml_core::metrics::{classification_report, confusion_matrix, f1_score, fmt2, render_report};

fn labels() -> impl Strategy<Value = (Vec<u8>, Vec<u8>)> {
    (1..80usize).prop_flat_map(|n| {
        (
            prop::collection::vec(0..2u8, n),
            prop::collection::vec(0..2u8, n),
        )
    })
}

proptest! {
    #[test]
    fn confusion_counts_every_sample((t, p) in labels()) {
        let cm = confusion_matrix(&t, &p).unwrap();
        prop_assert_eq!(cm.total() as usize, t.len());
        let agree = t.iter().zip(&p).filter(|(a, b)| a == b).count();
        prop_assert_eq!(cm.trace() as usize, agree);
    }

    #[test]
    fn report_is_permutation_invariant((t, p) in labels(), seed in any::<u64>()) {
        let mut idx: Vec<usize> = (0..t.len()).collect();
        let mut s = seed;
        for i in (1..idx.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            idx.swap(i, (s >> 33) as usize % (i + 1));
        }
        let t2: Vec<u8> = idx.iter().map(|&i| t[i]).collect();
        let p2: Vec<u8> = idx.iter().map(|&i| p[i]).collect();
        let a = classification_report(&t, &p).unwrap();
        let b = classification_report(&t2, &p2).unwrap();
        prop_assert_eq!(render_report(&a), render_report(&b));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn rates_are_bounded((t, p) in labels()) {
        let r = classification_report(&t, &p).unwrap();
        for m in r.per_class {
            for v in [m.precision, m.recall, m.f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            let lo = m.precision.min(m.recall);
            let hi = m.precision.max(m.recall);
            prop_assert!(m.f1 >= lo - 1e-12 && m.f1 <= hi + 1e-12);
        }
        prop_assert!((0.0..=1.0).contains(&r.accuracy));
    }

    #[test]
    fn f1_is_symmetric(p in 0.0..1.0f64, r in 0.0..1.0f64) {
        prop_assert_eq!(f1_score(p, r), f1_score(r, p));
    }
}

#[test]
fn display_rounding_is_half_up() {
    assert_eq!(fmt2(0.665), "0.67");
    assert_eq!(fmt2(0.675), "0.68");
    assert_eq!(fmt2(0.6649), "0.66");
    assert_eq!(fmt2(1.0), "1.00");
    assert_eq!(fmt2(0.0), "0.00");
}

#[test]
fn perfect_predictions() {
    let y = vec![0, 1, 1, 0, 1];
    let r = classification_report(&y, &y).unwrap();
    assert_eq!(r.accuracy, 1.0);
    assert!(r.per_class.iter().all(|m| m.f1 == 1.0 && !m.undefined));
}
