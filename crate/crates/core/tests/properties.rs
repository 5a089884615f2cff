mod common;

use common::{qubits, LN2};
use eopgap::qdense::{
    conditional_mutual_information, haar_random_pure, log_negativity, markov_gap, mutual_information, PartySpec,
    Region,
};
use eopgap::stab::{random_stabilizer, region_entropy, region_entropy_bits, to_dense};
use proptest::prelude::*;

fn r(s: &str) -> Region {
    Region::parse(s)
}

fn spec(dims: &[usize]) -> PartySpec {
    PartySpec::new(["A", "B", "C", "D"].iter().zip(dims).map(|(l, &d)| (*l, d))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn strong_subadditivity(seed in any::<u64>(), dims in prop::collection::vec(2usize..=3, 4)) {
        let psi = haar_random_pure(&spec(&dims), seed);
        let rho = psi.reduced(&r("A,B,C")).unwrap();
        let cmi = conditional_mutual_information(&rho, &r("A"), &r("C"), &r("B")).unwrap();
        prop_assert!(cmi >= -1e-9, "I(A:C|B) = {cmi}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pure_states_have_complementary_entropies(seed in any::<u64>(), dims in prop::collection::vec(2usize..=3, 3)) {
        let psi = haar_random_pure(&spec(&dims), seed);
        for (x, y) in [("A", "B,C"), ("B", "A,C"), ("A,B", "C")] {
            let sx = psi.entropy_of(&r(x)).unwrap();
            let sy = psi.entropy_of(&r(y)).unwrap();
            prop_assert!((sx - sy).abs() < 1e-9);
        }
        let m = psi.density().matrix().clone();
        let purity = (&m * &m).trace().re;
        prop_assert!((purity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_marginal_measures_are_nonnegative(seed in any::<u64>()) {
        let psi = haar_random_pure(&spec(&[2, 2, 3]), seed);
        let rho = psi.reduced(&r("A,B")).unwrap();
        let i = mutual_information(&rho, &r("A"), &r("B")).unwrap();
        prop_assert!((-1e-10..=2.0 * LN2 + 1e-10).contains(&i));
        prop_assert!(log_negativity(&rho, &r("A"), &r("B")).unwrap() >= -1e-10);
        prop_assert!(markov_gap(&rho, &r("A"), &r("B")).unwrap() >= -1e-8);
    }

    #[test]
    fn stabilizer_entropies_are_integral_and_symmetric(seed in any::<u64>(), n in 2usize..=7, mask in any::<u8>()) {
        let tab = random_stabilizer(n, seed).unwrap();
        let region: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        let rest: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 0).collect();
        let bits = region_entropy_bits(&tab, &region).unwrap();
        prop_assert_eq!(bits, region_entropy_bits(&tab, &rest).unwrap());
        prop_assert!(bits <= region.len().min(rest.len()));
        prop_assert!((region_entropy(&tab, &region).unwrap() - bits as f64 * LN2).abs() < 1e-12);
        if !region.is_empty() && !rest.is_empty() {
            let dense = to_dense(&tab).unwrap().entropy_of(&qubits(&region)).unwrap();
            prop_assert!((dense - bits as f64 * LN2).abs() < 1e-9);
        }
    }
}
