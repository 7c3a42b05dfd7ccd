use dioph_core::count::{
    count_brute_force, count_dp, count_linear_closed_form, count_representations,
    paper_permutation_count,
};
use dioph_core::expsum::fourier_count;
use dioph_core::genfunc::{residue_count, series_product, term_series, PowerSeries};
use dioph_core::{Budget, CountValue, Equation, Exec, SolutionDomain, Term};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_equation(rng: &mut ChaCha8Rng, max_rhs: u64) -> Equation {
    let s = rng.random_range(1..=4);
    let terms = (0..s)
        .map(|_| Term::new(rng.random_range(1..=5), rng.random_range(1..=4)))
        .collect();
    let domain = if rng.random_bool(0.5) {
        SolutionDomain::Positive
    } else {
        SolutionDomain::NonNegative
    };
    Equation::new(terms, rng.random_range(0..=max_rhs), domain)
}

#[test]
fn dp_matches_brute_force_on_random_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let b = Budget::default();
    for _ in 0..600 {
        let eq = random_equation(&mut rng, 60);
        let brute = count_brute_force(&eq, &b, Exec::Parallel).unwrap();
        let dp = count_dp(&eq, &b, Exec::Parallel).unwrap();
        assert_eq!(brute, dp, "{eq} over {}", eq.domain);
    }
}

#[test]
fn residue_matches_dp_and_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let b = Budget::default();
    for _ in 0..250 {
        let eq = random_equation(&mut rng, 60);
        let r = residue_count(&eq, &b, Exec::Sequential).unwrap();
        assert_eq!(r, count_dp(&eq, &b, Exec::Sequential).unwrap(), "{eq}");
        assert_eq!(
            r,
            count_brute_force(&eq, &b, Exec::Sequential).unwrap(),
            "{eq}"
        );
    }
}

#[test]
fn fourier_matches_dp_up_to_rhs_300() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let b = Budget::default();
    for _ in 0..120 {
        let eq = random_equation(&mut rng, 300);
        let f = fourier_count(&eq, &b, Exec::Parallel, None).unwrap();
        assert_eq!(
            f,
            count_dp(&eq, &b, Exec::Parallel).unwrap(),
            "{eq} over {}",
            eq.domain
        );
    }
}

#[test]
fn sequential_and_parallel_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = Budget::default();
    for _ in 0..40 {
        let eq = random_equation(&mut rng, 200);
        assert_eq!(
            count_dp(&eq, &b, Exec::Sequential).unwrap(),
            count_dp(&eq, &b, Exec::Parallel).unwrap()
        );
        let seq = dioph_core::expsum::fourier_coefficient(&eq, 977, Exec::Sequential).unwrap();
        let par = dioph_core::expsum::fourier_coefficient(&eq, 977, Exec::Parallel).unwrap();
        assert_eq!(seq.re.to_bits(), par.re.to_bits());
        assert_eq!(seq.im.to_bits(), par.im.to_bits());
    }
}

#[test]
fn linear_closed_form_both_domains() {
    let b = Budget::default();
    for s in 1..=6usize {
        for n in 0..=40u64 {
            for d in [SolutionDomain::Positive, SolutionDomain::NonNegative] {
                let eq = Equation::linear_unit(s, n, d);
                assert_eq!(
                    count_dp(&eq, &b, Exec::Sequential).unwrap(),
                    count_linear_closed_form(s as u64, n, d).unwrap(),
                    "s={s} n={n} {d}"
                );
            }
        }
    }
}

#[test]
fn domain_shift_for_linear_equations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let b = Budget::default();
    for _ in 0..200 {
        let s = rng.random_range(1..=4);
        let pairs: Vec<(u64, u32)> = (0..s).map(|_| (rng.random_range(1..=5), 1)).collect();
        let shift: u64 = pairs.iter().map(|p| p.0).sum();
        let n = rng.random_range(shift..=shift + 80);
        let pos = Equation::from_pairs(&pairs, n, SolutionDomain::Positive);
        let nonneg = Equation::from_pairs(&pairs, n - shift, SolutionDomain::NonNegative);
        assert_eq!(
            count_dp(&pos, &b, Exec::Sequential).unwrap(),
            count_dp(&nonneg, &b, Exec::Sequential).unwrap()
        );
    }
}

#[test]
fn canonical_form_preserves_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let b = Budget::default();
    for _ in 0..200 {
        let eq = random_equation(&mut rng, 60);
        let canon = eq.canonicalize().unwrap();
        assert!(canon.is_canonical());
        assert_eq!(canon.canonicalize().unwrap(), canon);
        assert_eq!(canon.classify().unwrap(), eq.classify().unwrap());
        assert_eq!(
            count_brute_force(&eq, &b, Exec::Sequential).unwrap(),
            count_dp(&canon, &b, Exec::Sequential).unwrap()
        );
    }
}

/// Every multiset `x_1 <= ... <= x_s` of positive k-th powers summing to n,
/// found by plain nested enumeration.
fn multisets(n: u64, s: u32, k: u32) -> Vec<Vec<u64>> {
    fn go(n: u64, s: u32, k: u32, min: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if s == 0 {
            if n == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let mut x = min;
        while x.pow(k) <= n {
            prefix.push(x);
            go(n - x.pow(k), s - 1, k, x, prefix, out);
            prefix.pop();
            x += 1;
        }
    }
    let mut out = Vec::new();
    go(n, s, k, 1, &mut Vec::new(), &mut out);
    out
}

fn distinct_orderings(parts: &[u64]) -> u64 {
    let fact = |m: u64| (1..=m).product::<u64>();
    let mut mults = std::collections::BTreeMap::new();
    for p in parts {
        *mults.entry(p).or_insert(0u64) += 1;
    }
    fact(parts.len() as u64) / mults.values().map(|&m| fact(m)).product::<u64>()
}

#[test]
fn ordered_counts_versus_representations() {
    let b = Budget::default();
    for s in 1..=3u32 {
        for k in 1..=3u32 {
            for n in 1..=200u64 {
                let reps = multisets(n, s, k);
                let r = count_representations(n, s, k, &b).unwrap();
                assert_eq!(r, BigUint::from(reps.len()), "n={n} s={s} k={k}");
                let ordered = count_dp(
                    &Equation::equal_powers(s as usize, k, n, SolutionDomain::Positive),
                    &b,
                    Exec::Sequential,
                )
                .unwrap();
                assert!(ordered >= r);
                let by_orderings: u64 = reps.iter().map(|m| distinct_orderings(m)).sum();
                assert_eq!(ordered, BigUint::from(by_orderings));
                let all_distinct = reps.iter().all(|m| m.windows(2).all(|w| w[0] != w[1]));
                let s_fact: u64 = (1..=u64::from(s)).product();
                assert_eq!(
                    ordered == BigUint::from(s_fact) * &r,
                    all_distinct,
                    "n={n} s={s} k={k}"
                );
            }
        }
    }
}

#[test]
fn permutation_rule_known_divergence() {
    let b = Budget::default();
    let reps = count_representations(50, 2, 2, &b).unwrap();
    let rule = paper_permutation_count(&reps, 2, 50).unwrap();
    let ordered = count_dp(
        &Equation::equal_powers(2, 2, 50, SolutionDomain::Positive),
        &b,
        Exec::Sequential,
    )
    .unwrap();
    assert_eq!(rule, BigUint::from(2u32));
    assert_eq!(ordered, BigUint::from(3u32));
}

#[test]
fn pole_of_order_six_case() {
    // 3x + 2y = 5 over the non-negative integers
    let eq = Equation::from_pairs(&[(3, 1), (2, 1)], 5, SolutionDomain::NonNegative);
    let b = Budget::default();
    assert_eq!(
        residue_count(&eq, &b, Exec::Sequential).unwrap(),
        BigUint::from(1u32)
    );
}

#[test]
fn counts_exceed_machine_words() {
    let eq = Equation::linear_unit(12, 2000, SolutionDomain::NonNegative);
    let dp = count_dp(&eq, &Budget::default(), Exec::Parallel).unwrap();
    assert!(dp > BigUint::from(u64::MAX));
    assert_eq!(
        dp,
        count_linear_closed_form(12, 2000, SolutionDomain::NonNegative).unwrap()
    );
}

fn series_strategy(order: usize) -> impl Strategy<Value = PowerSeries> {
    prop::collection::vec(0u64..50, order + 1).prop_map(|v| PowerSeries::from_u64s(&v))
}

proptest! {
    #[test]
    fn product_commutes(a in series_strategy(12), b in series_strategy(12)) {
        prop_assert_eq!(series_product(&a, &b).unwrap(), series_product(&b, &a).unwrap());
    }

    #[test]
    fn product_associates(a in series_strategy(10), b in series_strategy(10), c in series_strategy(10)) {
        let left = series_product(&series_product(&a, &b).unwrap(), &c).unwrap();
        let right = series_product(&a, &series_product(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn series_dump_round_trips(a in series_strategy(8)) {
        prop_assert_eq!(PowerSeries::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn term_series_marks_values(c in 1u64..6, k in 1u32..4, order in 0usize..80) {
        let s = term_series(c, k, order, SolutionDomain::Positive);
        for (m, coef) in s.coefficients().iter().enumerate() {
            let is_value = (1..=m as u64).any(|x| c * x.pow(k) == m as u64);
            prop_assert_eq!(coef == &CountValue::from(1u32), is_value);
        }
    }
}
