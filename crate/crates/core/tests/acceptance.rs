//! Exit criteria. Each criterion prints one PASS/FAIL line with its measured
//! value and runtime; the test fails if any criterion fails.

use std::time::{Duration, Instant};

use dioph_core::asymptotics::{
    empirical_slope, exponent_comparison, exponent_equal_powers, exponent_mixed_powers, gamma_fn,
    linear_main_term, paper_inequality_25, ExactRational, SLOPE_SLACK,
};
use dioph_core::count::{
    count_brute_force, count_dp, count_linear_closed_form, count_representations,
    paper_permutation_count,
};
use dioph_core::expsum::{
    exact_sample_count, fourier_coefficient, fourier_count, hua_moment_combinatorial,
    hua_moment_quadrature, hua_sample_count, hua_slope_fit,
};
use dioph_core::genfunc::residue_count;
use dioph_core::sweep::{count_sweep, Method};
use dioph_core::{Budget, CountValue, Equation, EquationTemplate, Exec, SolutionDomain, Term};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use SolutionDomain::{NonNegative, Positive};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn budget() -> Budget {
    Budget::default()
}

/// All four counters on one equation; returns the common value.
fn four_way(eq: &Equation) -> Result<CountValue, String> {
    let b = budget();
    let e = Exec::Parallel;
    let brute = count_brute_force(eq, &b, e).map_err(|x| x.to_string())?;
    let dp = count_dp(eq, &b, e).map_err(|x| x.to_string())?;
    let residue = residue_count(eq, &b, e).map_err(|x| x.to_string())?;
    let fourier = fourier_count(eq, &b, e, None).map_err(|x| x.to_string())?;
    ensure(brute == dp && dp == residue && residue == fourier, || {
        format!(
            "{eq} ({}): brute {brute}, dp {dp}, residue {residue}, fourier {fourier}",
            eq.domain
        )
    })?;
    Ok(dp)
}

fn c1_worked_examples() -> Outcome {
    let cases = [
        (Equation::linear_unit(5, 1, NonNegative), 5u32),
        (Equation::linear_unit(5, 1, Positive), 0),
        (Equation::from_pairs(&[(3, 1), (2, 1)], 5, Positive), 1),
        (Equation::from_pairs(&[(3, 1), (2, 1)], 5, NonNegative), 1),
    ];
    for (eq, expected) in &cases {
        let got = four_way(eq)?;
        ensure(got == BigUint::from(*expected), || {
            format!("{eq}: got {got}, want {expected}")
        })?;
    }
    Ok("R5(1)=5, R5+(1)=0, R2+(5)=1, nonnegative 3x+2y=5 -> 1; four counters agree".into())
}

fn c2_closed_form() -> Outcome {
    let b = budget();
    let mut checked = 0;
    for s in 1..=6u64 {
        for n in 0..=40u64 {
            for d in [Positive, NonNegative] {
                let eq = Equation::linear_unit(s as usize, n, d);
                let dp = count_dp(&eq, &b, Exec::Parallel).map_err(|e| e.to_string())?;
                let cf = count_linear_closed_form(s, n, d).map_err(|e| e.to_string())?;
                ensure(dp == cf, || {
                    format!("s={s} n={n} {d}: dp {dp} vs closed form {cf}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (s, n, domain) cases exact"))
}

fn c3_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20261016);
    let mut worst_imag = 0.0f64;
    for _ in 0..500 {
        let s = rng.random_range(1..=4);
        let terms = (0..s)
            .map(|_| Term::new(rng.random_range(1..=5), rng.random_range(1..=4)))
            .collect();
        let domain = if rng.random_bool(0.5) {
            Positive
        } else {
            NonNegative
        };
        let eq = Equation::new(terms, rng.random_range(0..=60), domain);
        four_way(&eq)?;
        let m = exact_sample_count(&eq) as u64;
        let z = fourier_coefficient(&eq, m, Exec::Parallel).map_err(|e| e.to_string())?;
        ensure(z.im.abs() <= 1e-6 * m as f64, || {
            format!("{eq}: imaginary part {}", z.im)
        })?;
        worst_imag = worst_imag.max(z.im.abs());
    }
    Ok(format!(
        "500 random equations agree; max |imag| = {worst_imag:.2e}"
    ))
}

fn c4_linear_main_term() -> Outcome {
    let b = budget();
    let mut errors = Vec::new();
    for n in [600u64, 1200, 2400, 4800] {
        let eq = Equation::from_pairs(&[(3, 1), (2, 1)], n, Positive);
        let exact = count_brute_force(&eq, &b, Exec::Parallel).map_err(|e| e.to_string())?;
        let exact = f64::from(u32::try_from(&exact).map_err(|e| e.to_string())?);
        let main = linear_main_term(&[3, 2], n).map_err(|e| e.to_string())?;
        if n == 600 {
            ensure(exact == 99.0, || {
                format!("count at 600 is {exact}, want 99")
            })?;
            ensure((main - 100.0).abs() < 1e-9, || format!("main term {main}"))?;
        }
        errors.push((exact - main).abs() / main);
    }
    ensure(errors[0] <= 0.02, || {
        format!("relative error {} > 2%", errors[0])
    })?;
    ensure(errors.windows(2).all(|w| w[1] < w[0]), || {
        format!("relative errors not decreasing: {errors:?}")
    })?;
    Ok(format!("relative errors {errors:.4?}"))
}

fn c5_hua_moments() -> Outcome {
    let b = budget();
    let mut worst = 0.0f64;
    for k in 1..=3u32 {
        for j in 1..=k.min(2) {
            for n in 1..=12u64 {
                let exact = hua_moment_combinatorial(n, k, j, &b, Exec::Parallel)
                    .map_err(|e| e.to_string())?;
                let quad = hua_moment_quadrature(n, k, j, &b, Exec::Parallel)
                    .map_err(|e| e.to_string())?;
                let m = hua_sample_count(n, k, j).unwrap() as f64;
                let exact_f: f64 = exact.to_string().parse().unwrap();
                let diff = (quad - exact_f).abs();
                ensure(diff <= 1e-6 * m, || {
                    format!("N={n} k={k} j={j}: {quad} vs {exact}")
                })?;
                worst = worst.max(diff / m);
            }
        }
    }
    let h321 = hua_moment_combinatorial(3, 2, 1, &b, Exec::Parallel).map_err(|e| e.to_string())?;
    let h222 = hua_moment_combinatorial(2, 2, 2, &b, Exec::Parallel).map_err(|e| e.to_string())?;
    ensure(h321 == BigUint::from(3u32), || {
        format!("hua(3,2,1) = {h321}")
    })?;
    ensure(h222 == BigUint::from(6u32), || {
        format!("hua(2,2,2) = {h222}")
    })?;
    Ok(format!(
        "all N≤12, k≤3, j≤min(k,2) agree; worst |diff|/M = {worst:.2e}"
    ))
}

fn c6_hua_slope() -> Outcome {
    let b = budget();
    let ns = [20u64, 40, 80, 160, 320];
    let fit2 = hua_slope_fit(2, 2, &ns, &b, Exec::Parallel).map_err(|e| e.to_string())?;
    let bound = 2.0 + SLOPE_SLACK;
    ensure(fit2.slope <= bound, || {
        format!("j=2 slope {} > {bound}", fit2.slope)
    })?;
    let fit1 = hua_slope_fit(2, 1, &ns, &b, Exec::Parallel).map_err(|e| e.to_string())?;
    ensure((fit1.slope - 1.0).abs() < 1e-12, || {
        format!("j=1 slope {}", fit1.slope)
    })?;
    Ok(format!(
        "k=2: j=2 slope {:.4} ≤ {bound}, j=1 slope {:.12}",
        fit2.slope, fit1.slope
    ))
}

fn c7_exponents() -> Outcome {
    let q = ExactRational::new;
    let mixed = |ks: &[u32]| {
        exponent_mixed_powers(ks)
            .map(|b| b.base_exponent)
            .map_err(|e| e.to_string())
    };
    ensure(mixed(&[3, 2])? == q(5, 12), || "(3,2) is not 5/12".into())?;
    for k in 1..=12u32 {
        let kk = i128::from(k);
        ensure(mixed(&[k, k])? == q(1, kk), || format!("s=2 k={k}"))?;
        ensure(mixed(&[k, k, k])? == q(3, 2 * kk), || format!("s=3 k={k}"))?;
        ensure(mixed(&[k; 4])? == q(9, 4 * kk), || format!("s=4 k={k}"))?;
        let eq4 = exponent_equal_powers(4, k)
            .map_err(|e| e.to_string())?
            .base_exponent;
        ensure(eq4 == q(2, kk), || format!("equal powers s=4 k={k}: {eq4}"))?;
    }
    let mut valid = 0u64;
    let mut stack: Vec<Vec<u32>> = (1..=12).map(|k| vec![k]).collect();
    while let Some(ks) = stack.pop() {
        if ks.len() >= 2 {
            let report = exponent_comparison(&ks).map_err(|e| e.to_string())?;
            if report.refined.validity.valid {
                valid += 1;
                ensure(report.improves(), || format!("{ks:?}: gap {}", report.gap))?;
            }
        }
        if ks.len() < 10 {
            for k in 1..=*ks.last().unwrap() {
                let mut next = ks.clone();
                next.push(k);
                stack.push(next);
            }
        }
    }
    Ok(format!(
        "5/12, 1/k, 3/2k, 9/4k, 2/k exact; gap > 0 on all {valid} valid lists"
    ))
}

fn c8_gamma() -> Outcome {
    let ratio = gamma_fn(1.5).unwrap() / gamma_fn(2.5).unwrap();
    ensure((ratio - 2.0 / 3.0).abs() <= 1e-10, || {
        format!("Γ(1.5)/Γ(2.5) = {ratio}")
    })?;
    let mut cases = 0;
    for k in 2..=4u32 {
        for s in (1u64 << k) + 1..=(1u64 << k) + 8 {
            let holds = paper_inequality_25(s, k).map_err(|e| e.to_string())?;
            ensure(holds, || format!("inequality fails at s={s} k={k}"))?;
            cases += 1;
        }
    }
    Ok(format!(
        "Γ(1.5)/Γ(2.5) = {ratio:.12}; inequality holds on {cases} cases"
    ))
}

fn summatory_slope(terms: Vec<Term>, max_n: u64) -> Result<f64, String> {
    let t = EquationTemplate::new(terms, Positive);
    let ns: Vec<u64> = (1..=max_n).collect();
    let table = count_sweep(&t, &ns, &[Method::Dp], &budget(), Exec::Parallel)
        .map_err(|e| e.to_string())?;
    Ok(empirical_slope(&table, true)
        .map_err(|e| e.to_string())?
        .slope)
}

fn c9_growth_slopes() -> Outcome {
    let squares = summatory_slope(vec![Term::new(1, 2); 3], 10_000)?;
    ensure((squares - 1.5).abs() <= 0.1, || {
        format!("three squares slope {squares}")
    })?;
    let linear = summatory_slope(vec![Term::new(1, 1); 3], 10_000)?;
    ensure((linear - 3.0).abs() <= 0.1, || {
        format!("three linear slope {linear}")
    })?;
    Ok(format!(
        "three squares {squares:.4} (1.5 ± 0.1), x1+x2+x3 {linear:.4} (3.0 ± 0.1)"
    ))
}

fn c10_divergence() -> Outcome {
    let b = budget();
    let reps = count_representations(50, 2, 2, &b).map_err(|e| e.to_string())?;
    let rule = paper_permutation_count(&reps, 2, 50).map_err(|e| e.to_string())?;
    let ordered = count_dp(
        &Equation::equal_powers(2, 2, 50, Positive),
        &b,
        Exec::Parallel,
    )
    .map_err(|e| e.to_string())?;
    ensure(
        rule == BigUint::from(2u32) && ordered == BigUint::from(3u32),
        || format!("rule {rule}, ordered {ordered}"),
    )?;
    Ok(format!("permutation rule {rule} ≠ ordered count {ordered}"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("1 worked examples", 1, c1_worked_examples),
        ("2 linear closed form", 5, c2_closed_form),
        ("3 oracle equivalence", 120, c3_oracle_equivalence),
        ("4 linear main term", 5, c4_linear_main_term),
        ("5 Hua moments", 60, c5_hua_moments),
        ("6 Hua slope", 120, c6_hua_slope),
        ("7 exponent formulas", 10, c7_exponents),
        ("8 gamma and main-term inequality", 1, c8_gamma),
        ("9 growth slopes", 180, c9_growth_slopes),
        ("10 known divergence", 1, c10_divergence),
    ];
    let mut failed = Vec::new();
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{msg}; took {elapsed:.2?}, limit {limit} s"))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS [{name}] {msg} ({elapsed:.2?})"),
            Err(msg) => {
                println!("FAIL [{name}] {msg} ({elapsed:.2?})");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
