//! Exact solution counters.
//!
//! Three independent routes to the same number: pruned enumeration, dynamic
//! programming over generating-function coefficients, and (for linear
//! equations with unit coefficients) the binomial closed form.
//! [`count_representations`] counts unordered solutions instead.

use num_bigint::BigUint;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::equation::{CountValue, Equation, SolutionDomain, Term};
use crate::error::{BudgetKind, Error, Result};
use crate::exec::{Budget, Exec};
use crate::expsum::nth_root_index;

/// Counts ordered solution tuples by direct enumeration.
///
/// Variables are enumerated in order of increasing value-list length and the
/// last variable is solved directly, so the search tree has at most the
/// product of the other lists' lengths as leaves. That product is checked
/// against `budget.nodes` before any work is done.
pub fn count_brute_force(eq: &Equation, budget: &Budget, exec: Exec) -> Result<CountValue> {
    eq.ensure_valid()?;
    let rhs = eq.rhs;
    let mut lists: Vec<(Term, Vec<u64>)> = eq
        .terms
        .iter()
        .map(|t| (*t, t.values_up_to(rhs, eq.domain)))
        .collect();
    if lists.iter().any(|(_, v)| v.is_empty()) {
        return Ok(BigUint::zero());
    }
    lists.sort_by_key(|(_, v)| v.len());
    let (last, _) = lists.pop().expect("non-empty term list");
    let lists: Vec<Vec<u64>> = lists.into_iter().map(|(_, v)| v).collect();

    let estimate = lists
        .iter()
        .try_fold(1u128, |acc, v| acc.checked_mul(v.len() as u128))
        .unwrap_or(u128::MAX);
    budget.check(BudgetKind::Nodes, estimate)?;

    let domain = eq.domain;
    let solve_last = move |rest: u64| -> u64 { u64::from(solves_term(last, rest, domain)) };

    let total: u64 = match lists.split_first() {
        None => solve_last(rhs),
        Some((first, tail)) => exec
            .map_slice(first, |&v| enumerate(tail, rhs - v, &solve_last))
            .into_iter()
            .sum(),
    };
    Ok(BigUint::from(total))
}

fn enumerate(lists: &[Vec<u64>], remaining: u64, leaf: &impl Fn(u64) -> u64) -> u64 {
    match lists.split_first() {
        None => leaf(remaining),
        Some((head, tail)) => head
            .iter()
            .take_while(|&&v| v <= remaining)
            .map(|&v| enumerate(tail, remaining - v, leaf))
            .sum(),
    }
}

/// Whether `value = c * x^k` for some `x` in the domain.
fn solves_term(term: Term, value: u64, domain: SolutionDomain) -> bool {
    if !value.is_multiple_of(term.coefficient) {
        return false;
    }
    let q = value / term.coefficient;
    let x = nth_root_index(q, term.exponent);
    x >= domain.first_value() && x.checked_pow(term.exponent) == Some(q)
}

/// Counts ordered solutions as the `t^rhs` coefficient of the product of the
/// term generating functions, built by in-place convolution.
///
/// Terms are processed largest span (`c * N^k`) first. Linear terms use the
/// recurrence of `1/(1 - t^c)`; power terms use a sparse convolution whose
/// output slots are independent and computed under `exec`.
pub fn count_dp(eq: &Equation, budget: &Budget, exec: Exec) -> Result<CountValue> {
    let table = dp_table(eq, eq.rhs, budget, exec)?;
    Ok(table
        .into_iter()
        .nth(eq.rhs as usize)
        .expect("table has rhs + 1 slots"))
}

/// All counts for right-hand sides `0..=order` of the equation's left side.
pub fn dp_table(eq: &Equation, order: u64, budget: &Budget, exec: Exec) -> Result<Vec<CountValue>> {
    eq.ensure_valid()?;
    let len = usize::try_from(order)
        .ok()
        .and_then(|o| o.checked_add(1))
        .ok_or_else(|| Error::Precondition("right-hand side exceeds addressable size".into()))?;
    budget.check(
        BudgetKind::Memory,
        crate::genfunc::series_bytes_estimate(eq, len - 1),
    )?;

    let mut terms: Vec<(Term, Vec<u64>)> = eq
        .terms
        .iter()
        .map(|t| (*t, t.values_up_to(order, eq.domain)))
        .collect();
    terms.sort_by_key(|(_, v)| std::cmp::Reverse(v.last().copied().unwrap_or(0)));

    let mut table = vec![BigUint::zero(); len];
    table[0] = BigUint::one();
    let mut next = vec![BigUint::zero(); len];
    for (term, values) in &terms {
        if term.exponent == 1 {
            linear_step(&table, &mut next, term.coefficient as usize, eq.domain);
        } else {
            exec.fill(&mut next, |m| {
                let mut acc = BigUint::zero();
                for &v in values.iter().take_while(|&&v| v as usize <= m) {
                    acc += &table[m - v as usize];
                }
                acc
            });
        }
        std::mem::swap(&mut table, &mut next);
    }
    Ok(table)
}

/// `next = table * t^start / (1 - t^c)` truncated, with start 0 or c.
fn linear_step(table: &[BigUint], next: &mut [BigUint], c: usize, domain: SolutionDomain) {
    for m in 0..table.len() {
        let mut v = match domain {
            SolutionDomain::NonNegative => table[m].clone(),
            SolutionDomain::Positive if m >= c => table[m - c].clone(),
            SolutionDomain::Positive => BigUint::zero(),
        };
        if m >= c {
            v += &next[m - c];
        }
        next[m] = v;
    }
}

/// Solutions of `x1 + ... + xs = n`: `C(n-1, s-1)` over the positive
/// integers and `C(n+s-1, s-1)` over the non-negative integers.
pub fn count_linear_closed_form(s: u64, n: u64, domain: SolutionDomain) -> Result<CountValue> {
    if s == 0 {
        return Err(Error::Precondition("s must be ≥ 1".into()));
    }
    Ok(match domain {
        SolutionDomain::Positive if n < s => BigUint::zero(),
        SolutionDomain::Positive => binomial(BigUint::from(n - 1), BigUint::from(s - 1)),
        SolutionDomain::NonNegative => binomial(BigUint::from(n + s - 1), BigUint::from(s - 1)),
    })
}

/// Number of multisets `{x1 <= ... <= xs}` of positive integers with
/// `sum x_i^k = n`.
pub fn count_representations(n: u64, s: u32, k: u32, budget: &Budget) -> Result<CountValue> {
    if s == 0 || k == 0 || n == 0 {
        return Err(Error::Precondition("n, s and k must all be ≥ 1".into()));
    }
    let powers = Term::new(1, k).values_up_to(n, SolutionDomain::Positive);
    let mut nodes = 0u64;
    let count = representations_from(&powers, 0, n, s, &mut nodes, budget.nodes)?;
    Ok(BigUint::from(count))
}

fn representations_from(
    powers: &[u64],
    start: usize,
    remaining: u64,
    parts: u32,
    nodes: &mut u64,
    limit: u64,
) -> Result<u64> {
    *nodes += 1;
    if *nodes > limit {
        return Err(Error::BudgetExceeded {
            kind: BudgetKind::Nodes,
            required: u128::from(*nodes),
            limit: u128::from(limit),
        });
    }
    if parts == 1 {
        return Ok(u64::from(powers[start..].binary_search(&remaining).is_ok()));
    }
    let mut total = 0;
    for (i, &p) in powers.iter().enumerate().skip(start) {
        // the remaining parts are all at least p
        if p.saturating_mul(u64::from(parts)) > remaining {
            break;
        }
        total += representations_from(powers, i, remaining - p, parts - 1, nodes, limit)?;
    }
    Ok(total)
}

/// Converts a representation count to a solution count by the rule
/// "multiply by `s!`, or by `s! - 1` when `s` divides `n`".
///
/// This rule is wrong whenever a representation has repeated parts; for
/// `n = 50, s = 2, k = 2` it gives 2 while there are 3 ordered solutions.
/// It is kept as a diagnostic and never used for counting.
pub fn paper_permutation_count(representations: &CountValue, s: u64, n: u64) -> Result<CountValue> {
    if s == 0 {
        return Err(Error::Precondition("s must be ≥ 1".into()));
    }
    let factorial: BigUint = (1..=s).map(BigUint::from).product();
    let multiplier = if n.is_multiple_of(s) {
        factorial - 1u32
    } else {
        factorial
    };
    Ok(multiplier * representations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use SolutionDomain::*;

    fn b() -> Budget {
        Budget::default()
    }

    fn brute(eq: &Equation) -> u64 {
        count_brute_force(eq, &b(), Exec::Sequential)
            .unwrap()
            .try_into()
            .unwrap()
    }

    fn dp(eq: &Equation) -> u64 {
        count_dp(eq, &b(), Exec::Sequential)
            .unwrap()
            .try_into()
            .unwrap()
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(brute(&Equation::linear_unit(5, 1, NonNegative)), 5);
        assert_eq!(brute(&Equation::linear_unit(5, 1, Positive)), 0);
        assert_eq!(
            brute(&Equation::from_pairs(&[(3, 1), (2, 1)], 5, Positive)),
            1
        );
        assert_eq!(
            brute(&Equation::from_pairs(&[(3, 1), (2, 1)], 5, NonNegative)),
            1
        );
        assert_eq!(brute(&Equation::equal_powers(2, 2, 25, Positive)), 2);
    }

    #[test]
    fn dp_examples() {
        assert_eq!(dp(&Equation::linear_unit(3, 10, NonNegative)), 66);
        assert_eq!(dp(&Equation::from_pairs(&[(3, 1), (2, 1)], 5, Positive)), 1);
        assert_eq!(dp(&Equation::equal_powers(4, 2, 4, Positive)), 1);
    }

    #[test]
    fn zero_rhs_base_case() {
        for eq in [
            Equation::linear_unit(3, 0, NonNegative),
            Equation::equal_powers(2, 3, 0, NonNegative),
        ] {
            assert_eq!(brute(&eq), 1);
            assert_eq!(dp(&eq), 1);
        }
        let pos = Equation::linear_unit(3, 0, Positive);
        assert_eq!(brute(&pos), 0);
        assert_eq!(dp(&pos), 0);
    }

    #[test]
    fn single_variable() {
        assert_eq!(brute(&Equation::from_pairs(&[(2, 3)], 54, Positive)), 1);
        assert_eq!(brute(&Equation::from_pairs(&[(2, 3)], 55, Positive)), 0);
        assert_eq!(dp(&Equation::from_pairs(&[(2, 3)], 54, Positive)), 1);
    }

    #[test]
    fn closed_form_examples() {
        let cf = |s, n, d| -> u64 {
            count_linear_closed_form(s, n, d)
                .unwrap()
                .try_into()
                .unwrap()
        };
        assert_eq!(cf(5, 1, NonNegative), 5);
        assert_eq!(cf(3, 5, Positive), 6);
        assert_eq!(cf(5, 1, Positive), 0);
        assert_eq!(cf(1, 0, NonNegative), 1);
        assert!(count_linear_closed_form(0, 3, Positive).is_err());
    }

    #[test]
    fn representation_examples() {
        let r = |n, s, k| -> u64 {
            count_representations(n, s, k, &b())
                .unwrap()
                .try_into()
                .unwrap()
        };
        assert_eq!(r(50, 2, 2), 2);
        assert_eq!(r(2, 2, 2), 1);
        assert_eq!(r(5, 2, 1), 2);
        assert!(count_representations(0, 2, 2, &b()).is_err());
    }

    #[test]
    fn permutation_rule_examples() {
        let p = |r: u32, s, n| -> u64 {
            paper_permutation_count(&BigUint::from(r), s, n)
                .unwrap()
                .try_into()
                .unwrap()
        };
        assert_eq!(p(2, 2, 50), 2);
        assert_eq!(p(1, 2, 5), 2);
        assert_eq!(p(0, 7, 3), 0);
    }

    #[test]
    fn node_budget_refuses() {
        let eq = Equation::linear_unit(4, 1000, Positive);
        let tight = Budget { nodes: 1000, ..b() };
        let err = count_brute_force(&eq, &tight, Exec::Sequential).unwrap_err();
        assert!(err.is_budget());
        let err = count_representations(1000, 4, 1, &tight).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn invalid_equation_rejected() {
        let eq = Equation::from_pairs(&[(0, 1)], 3, Positive);
        assert!(count_brute_force(&eq, &b(), Exec::Sequential).is_err());
        assert!(count_dp(&eq, &b(), Exec::Sequential).is_err());
    }
}
