use centerlab::sequences::{seq_norms, truncate_seq, GeometricTailSeq};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn seq_strategy() -> impl Strategy<Value = GeometricTailSeq> {
    (
        prop::collection::vec(-9i64..10, 0..4),
        -9i64..10,
        1i64..8,
        prop::collection::vec(-3i64..4, 1..4),
    )
        .prop_map(|(prefix, first, denom, pattern)| {
            GeometricTailSeq::with_tail(
                prefix.into_iter().map(|p| q(p, 3)).collect(),
                q(first, 2),
                q(1, denom + 1),
                pattern.into_iter().map(|p| q(p, 1)).collect(),
            )
            .unwrap()
        })
}

proptest! {
    #[test]
    fn l1_splits_into_head_and_tail(s in seq_strategy(), k in 0usize..30) {
        let norms = seq_norms(&s);
        let head: BigRational = (1..=k).map(|n| s.coord(n).abs()).sum();
        prop_assert_eq!(head + s.tail_mass(k), norms.l1.clone());
        prop_assert!(norms.linf <= norms.l1);
    }

    #[test]
    fn truncation_keeps_prefix(s in seq_strategy(), extra in 1usize..20) {
        let n = s.prefix.len() + extra;
        if n > 1 && !s.prefix.is_empty() {
            prop_assert!(truncate_seq(&s, s.prefix.len() - 1).is_err());
        }
        let (v, mass) = truncate_seq(&s, n).unwrap();
        prop_assert_eq!(v.dim(), n);
        prop_assert_eq!(mass, s.tail_mass(n));
    }

    #[test]
    fn json_roundtrip(s in seq_strategy()) {
        let json = serde_json::to_string(&s).unwrap();
        prop_assert_eq!(GeometricTailSeq::from_json(&json).unwrap(), s);
    }
}

#[test]
fn ratio_must_contract() {
    assert!(GeometricTailSeq::with_tail(vec![], q(1, 1), q(1, 1), vec![q(1, 1)]).is_err());
}
