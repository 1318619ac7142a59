//! Acceptance criteria 1-10. Runs without the libtest harness and prints one
//! line per criterion; exits non-zero if any non-advisory criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{factorial, random_values, Oracle};
use hdx_core::cochain::check_localization_identities;
use hdx_core::complex::{check_exact_identities, homogeneous_weight_exact};
use hdx_core::decomposition::{Decomposer, PsiSolver};
use hdx_core::generators::{complete_complex, random_pure_complex, regular_graph_matching, GeneratorSpec};
use hdx_core::io::{to_json, ComplexFile};
use hdx_core::mixing::{check_binary_mixing, check_mixing_bounds, FaceSet, MixingOptions, TheoremId};
use hdx_core::operators::{assemble_lower_walk, assemble_upper_walk, verify_factorizations};
use hdx_core::spectra::{check_descent, garland_terms_with, profile, LinkAtlas};
use hdx_core::suite::{analytic_fixtures, k4, run_suite, triangle, Fixture, SuiteConfig};
use hdx_core::{Cochain, Simplex, WeightedComplex};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn fixtures() -> Vec<Fixture> {
    analytic_fixtures(&SuiteConfig::default()).expect("fixtures")
}

fn cochain(k: usize, values: Vec<f64>) -> Cochain {
    Cochain::new(k as isize, values).unwrap()
}

/// Exact homogeneous weights by direct counting: `(n-k)!` times the number
/// of top faces containing `τ`.
fn counted_weights(o: &Oracle) -> Vec<Vec<u128>> {
    let n = o.n;
    (-1..=n as isize)
        .map(|k| {
            o.faces(k)
                .iter()
                .map(|t| {
                    let c = o.faces(n as isize).iter().filter(|s| t.iter().all(|v| s.contains(v))).count();
                    factorial((n as isize - k) as usize) * c as u128
                })
                .collect()
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut wcs = vec![triangle(), k4(), complete_complex(7, 3).unwrap()];
    let seed0 = SuiteConfig::default().seed;
    for s in 0..20 {
        wcs.push(random_pure_complex(10, 3, 0.7, seed0 + s).unwrap());
    }
    let mut failures = 0usize;
    let mut checked = 0usize;
    for wc in &wcs {
        let o = Oracle::new(wc);
        let n = o.n as isize;
        let counted = counted_weights(&o);
        let lib = homogeneous_weight_exact(wc.complex()).unwrap();
        for k in -1..=n {
            let c = &counted[(k + 1) as usize];
            checked += c.len();
            failures += usize::from(lib.level(k) != c.as_slice());
            // float weights of the homogeneous complex are the same integers
            failures += wc.weights().level(k).iter().zip(c).filter(|(a, b)| **a != **b as f64).count();
        }
        // recursion and partial sums from the counted weights
        for k in -1..n {
            for (t, tau) in o.faces(k).iter().enumerate() {
                for l in k + 1..=n {
                    let sum: u128 = o
                        .faces(l)
                        .iter()
                        .enumerate()
                        .filter(|(_, s)| tau.iter().all(|v| s.contains(v)))
                        .map(|(i, _)| counted[(l + 1) as usize][i])
                        .sum();
                    let mult = factorial((l - k) as usize);
                    failures += usize::from(counted[(k + 1) as usize][t] != mult * sum);
                    checked += 1;
                }
            }
        }
        let totals: Vec<u128> = (-1..=n)
            .map(|k| factorial((k + 1) as usize) * counted[(k + 1) as usize].iter().sum::<u128>())
            .collect();
        failures += totals.iter().filter(|&&t| t != totals[0]).count();
        let r = check_exact_identities(wc.complex(), &lib).unwrap();
        failures += r.recursion_failures + r.top_sum_failures + r.intermediate_sum_failures + r.total_failures;
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        failures == 0 && secs < 10.0,
        format!("{} complexes, {checked} exact checks, {failures} failures, {secs:.2} s (limit 10 s)", wcs.len()),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_lib: f64 = 0.0;
    let mut count = 0;
    for f in fixtures() {
        let o = Oracle::new(&f.complex);
        for k in 0..=o.n {
            let ki = k as isize;
            if k < o.n {
                let up = o.upper(k);
                let dd = o.dstar(ki) * o.d(ki);
                worst = worst.max((&dd - &up * (k + 2) as f64).norm() / up.norm());
                let lib = assemble_upper_walk(&f.complex, k).unwrap();
                worst_lib = worst_lib.max(common::frobenius_rel(lib.matrix(), &up));
                count += 1;
            }
            let lo = o.lower(k);
            let dd = o.d(ki - 1) * o.dstar(ki - 1);
            worst = worst.max((&dd - &lo * (k + 1) as f64).norm() / lo.norm());
            let lib = assemble_lower_walk(&f.complex, k).unwrap();
            worst_lib = worst_lib.max(common::frobenius_rel(lib.matrix(), &lo));
            count += 1;
            let r = verify_factorizations(&f.complex, k).unwrap();
            worst_lib = worst_lib.max(r.max_residual());
        }
    }
    let pass = worst <= 1e-10 && worst_lib <= 1e-10;
    outcome(pass, format!("{count} factorizations, oracle residual {worst:.2e}, library residual {worst_lib:.2e} (limit 1e-10)"))
}

fn criterion_3() -> Outcome {
    let mut loc: f64 = 0.0;
    let mut ident: f64 = 0.0;
    let mut agree: f64 = 0.0;
    let mut violations = 0usize;
    let mut literal = 0usize;
    let mut samples = 0usize;
    for (fi, f) in fixtures().into_iter().enumerate() {
        let wc = &f.complex;
        let o = Oracle::new(wc);
        let prof = o.profile();
        let lib_prof = profile(wc).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0xC3 + fi as u64);
        for k in 0..o.n {
            let ki = k as isize;
            let atlas = LinkAtlas::new(wc, k).unwrap();
            let (mu, nu) = prof[k];
            for _ in 0..100 {
                let phi = random_values(&mut rng, o.faces(ki).len());
                let c = cochain(k, phi.clone());
                for j in -1..ki {
                    loc = loc.max(check_localization_identities(wc, &c, j).unwrap().max());
                }
                let norm = o.norm_sq(ki, &phi);
                let dn = o.d_norm_sq(k, &phi);
                let dsn = o.norm_sq(ki - 1, &o.apply(&o.dstar(ki - 1), &phi));
                let corr = o.corrections(k, &phi);
                ident = ident.max((dn - (dsn + norm + corr)).abs() / dn.max(norm));
                let g = garland_terms_with(wc, &atlas, &c, &lib_prof).unwrap();
                agree = agree.max((g.total - corr).abs() / norm).max(g.identity_residual);
                let c1 = (k + 1) as f64;
                let slack = 1e-10 * norm;
                let ok = c1 * nu * norm - slack <= corr && corr <= c1 * mu.max(0.0) * norm + slack;
                violations += usize::from(!ok || !g.bounds_hold);
                literal += usize::from(corr > c1 * mu * norm + slack);
                samples += 1;
            }
        }
    }
    let pass = loc <= 1e-10 && ident <= 1e-10 && agree <= 1e-10 && violations == 0;
    outcome(
        pass,
        format!(
            "{samples} cochains, localization {loc:.2e}, norm identity {ident:.2e}, \
             library agreement {agree:.2e}, bound violations {violations} \
             (unclamped mu upper bound exceeded {literal} times, info)"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut checks = 0;
    let mut failed = 0;
    let mut connected = 0;
    for f in fixtures() {
        let o = Oracle::new(&f.complex);
        let p = profile(&f.complex).unwrap();
        if !p.all_links_connected {
            continue;
        }
        connected += 1;
        let prof = o.profile();
        let n = o.n;
        for k in 0..n.saturating_sub(1) {
            for (from, steps) in [(k + 1, 1.0), (n - 1, (n - 1 - k) as f64)] {
                let (mf, nf) = prof[from];
                if 1.0 - steps * mf > 0.0 {
                    checks += 1;
                    failed += usize::from(prof[k].0 > mf / (1.0 - steps * mf) + 1e-12);
                }
                if 1.0 - steps * nf > 0.0 {
                    checks += 1;
                    failed += usize::from(prof[k].1 < nf / (1.0 - steps * nf) - 1e-12);
                }
            }
        }
        failed += usize::from(!check_descent(&p).pass);
    }
    let o = Oracle::new(&k4());
    let prof = o.profile();
    let chain = (prof[0].0 + 1.0 / 3.0).abs().max((prof[1].0 + 0.5).abs()).max(
        (prof[0].0 - prof[1].0 / (1.0 - prof[1].0)).abs(),
    );
    let lib = profile(&k4()).unwrap();
    let lib_gap = (lib.mu(0) + 1.0 / 3.0).abs().max((lib.mu(1) + 0.5).abs());
    let pass = failed == 0 && chain <= 1e-12 && lib_gap <= 1e-12;
    outcome(
        pass,
        format!("{checks} inequalities on {connected} connected-link complexes, {failed} failures; K4 chain gap {chain:.1e} (limit 1e-12)"),
    )
}

fn criterion_5() -> Outcome {
    let mut id1: f64 = 0.0;
    let mut id2: f64 = 0.0;
    let mut dist: f64 = 0.0;
    let mut upper_fail = 0;
    let mut lower_fail = 0;
    let mut literal = 0;
    let mut samples = 0;
    let mut pairs = 0;
    let mut kernel_pairs = 0;
    for (fi, f) in fixtures().into_iter().enumerate() {
        let wc = &f.complex;
        let o = Oracle::new(wc);
        let prof = o.profile();
        let mut rng = ChaCha8Rng::seed_from_u64(0xC5 + fi as u64);
        for k in 0..o.n {
            let ki = k as isize;
            // the solvers only differ where some d_{i-1}, i <= k, has a kernel
            let shifted = (1..=k).any(|i| o.d(i as isize - 1).rank(1e-9) < o.faces(i as isize - 1).len());
            kernel_pairs += usize::from(shifted);
            pairs += 1;
            let a = Decomposer::new(wc, k, PsiSolver::MinimumNorm).unwrap();
            let b = Decomposer::new(wc, k, PsiSolver::KernelShifted { seed: 99 }).unwrap();
            for _ in 0..100 {
                let phi = o.project_c0(ki, &random_values(&mut rng, o.faces(ki).len()));
                let norm = o.norm_sq(ki, &phi);
                let ra = a.decompose(&cochain(k, phi.clone())).unwrap();
                let rb = b.decompose(&cochain(k, phi.clone())).unwrap();
                let energies: Vec<f64> =
                    (0..=k).map(|i| o.norm_sq(i as isize, ra.components[i].values())).collect();
                for i in 0..=k {
                    let inter = o.norm_sq(i as isize, ra.intermediates[i].values());
                    let partial: f64 = energies[..=i].iter().sum();
                    id1 = id1.max((inter - partial).abs() / norm);
                }
                let dn = o.d_norm_sq(k, &phi);
                let corr: f64 = (0..=k).map(|i| o.corrections(i, ra.intermediates[i].values())).sum();
                let rhs: f64 =
                    (0..=k).map(|i| (k + 1 - i) as f64 * energies[i]).sum::<f64>() + corr;
                id2 = id2.max((dn - rhs).abs() / dn.max(norm));
                let scale = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                for i in 0..=k {
                    let d = ra.components[i]
                        .values()
                        .iter()
                        .zip(rb.components[i].values())
                        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
                    dist = dist.max(d / scale);
                }
                let coef = |i: usize, pick: &dyn Fn(usize) -> f64| {
                    (k + 1 - i) as f64 + (i..=k).map(|j| (j + 1) as f64 * pick(j)).sum::<f64>()
                };
                let upper: f64 = (0..=k).map(|i| coef(i, &|j| prof[j].0.max(0.0)) * energies[i]).sum();
                let upper_literal: f64 = (0..=k).map(|i| coef(i, &|j| prof[j].0) * energies[i]).sum();
                let lower: f64 = (0..=k).map(|i| coef(i, &|j| prof[j].1) * energies[i]).sum();
                let slack = 1e-8 * norm;
                upper_fail += usize::from(dn > upper + slack);
                lower_fail += usize::from(dn < lower - slack);
                literal += usize::from(dn > upper_literal + slack);
                samples += 1;
            }
        }
    }
    let pass = id1 <= 1e-8 && id2 <= 1e-8 && dist <= 1e-8 && upper_fail == 0 && lower_fail == 0 && kernel_pairs > 0;
    outcome(
        pass,
        format!(
            "{samples} cochains, identity (1) {id1:.2e}, identity (2) {id2:.2e}, solver gap {dist:.2e} (limit 1e-8, \
             {kernel_pairs} of {pairs} (complex, k) pairs with a kernel shift), \
             bound violations upper {upper_fail} lower {lower_fail} (unclamped mu upper exceeded {literal} times, info)"
        ),
    )
}

fn lazy_second(o: &Oracle, k: usize) -> f64 {
    o.c0_spectrum(k as isize, &o.upper(k))[0]
}

fn criterion_6() -> Outcome {
    let mut instances = 0;
    let mut failed = 0;
    let mut gap: f64 = 0.0;
    for f in fixtures() {
        let wc = &f.complex;
        let o = Oracle::new(wc);
        let lambda = o.lambda_one_sided();
        let r = check_mixing_bounds(
            wc,
            &profile(wc).unwrap(),
            &MixingOptions { theorems: vec![TheoremId::LazyUpper], ..Default::default() },
        )
        .unwrap();
        for k in 0..o.n {
            if o.faces(k as isize).len() < 2 {
                continue;
            }
            let kf = k as f64;
            let achieved = lazy_second(&o, k);
            let bound = (kf + 1.0) / (kf + 2.0) + (kf + 1.0) * lambda;
            instances += 1;
            failed += usize::from(achieved > bound + 1e-10);
            let e = r.entries.iter().find(|e| e.k == k).unwrap();
            gap = gap.max((e.achieved - achieved).abs()).max((e.bound - bound).abs());
            failed += usize::from(!e.pass);
        }
    }
    let t = Oracle::new(&triangle());
    let q = Oracle::new(&k4());
    let desk = [
        (lazy_second(&t, 0) - 0.25).abs(),
        (0.5 + t.lambda_one_sided() - 0.5).abs(),
        (lazy_second(&q, 1) - 1.0 / 3.0).abs(),
        (2.0 / 3.0 + 2.0 * q.lambda_one_sided() - 2.0 / 3.0).abs(),
    ];
    let desk_gap = desk.iter().fold(0.0f64, |m, x| m.max(*x));
    let pass = failed == 0 && desk_gap <= 1e-10 && gap <= 1e-9;
    outcome(
        pass,
        format!("{instances} instances, {failed} failures, library gap {gap:.1e}; desk values triangle 1/4 vs 1/2, K4 1/3 vs 2/3 within {desk_gap:.1e}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut values = Vec::new();
    let mut gap: f64 = 0.0;
    for m in 5..=9 {
        let wc = complete_complex(m, 2).unwrap();
        let o = Oracle::new(&wc);
        let achieved = lazy_second(&o, 1);
        // M⁺₁ is (I + A/(m-2))/3 on the Johnson graph J(m, 2)
        let closed = 2.0 * (m as f64 - 3.0) / (3.0 * (m as f64 - 2.0));
        let lib = hdx_core::mixing::second_eigenvalue_on_c0(&wc, &assemble_upper_walk(&wc, 1).unwrap()).unwrap();
        gap = gap.max((achieved - closed).abs()).max((lib.top - closed).abs());
        values.push(lib.top);
    }
    let monotone = values.windows(2).all(|w| w[0] <= w[1]);
    let dist = (values[4] - 2.0 / 3.0).abs();
    let secs = start.elapsed().as_secs_f64();
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    outcome(
        monotone && dist <= 0.15 && gap <= 1e-10 && secs < 30.0,
        format!(
            "m=5..9: [{}], monotone {monotone}, |m=9 - 2/3| = {dist:.4} (limit 0.15), closed-form gap {gap:.1e}, {secs:.2} s",
            shown.join(", ")
        ),
    )
}

/// `‖M⁺χ_A‖/‖χ_A‖` and `F(A)` from the oracle.
fn binary_oracle(wc: &WeightedComplex, a: &FaceSet) -> (f64, f64) {
    let o = Oracle::new(wc);
    let k = a.k;
    let members: Vec<usize> = a.faces.iter().map(|f| o.idx(k, f.vertices()).unwrap()).collect();
    let mut chi = vec![0.0; o.faces(k).len()];
    for &i in &members {
        chi[i] = 1.0;
    }
    let moved = o.apply(&o.upper(k as usize), &chi);
    let ratio = (o.norm_sq(k, &moved) / o.norm_sq(k, &chi)).sqrt();
    let facets = |f: &[usize]| -> Vec<Vec<usize>> {
        (0..f.len()).map(|d| f.iter().enumerate().filter(|(i, _)| *i != d).map(|(_, v)| *v).collect()).collect()
    };
    let thin = members
        .iter()
        .map(|&t| {
            facets(&o.faces(k)[t])
                .iter()
                .map(|eta| {
                    let through: f64 = members
                        .iter()
                        .filter(|&&u| eta.iter().all(|v| o.faces(k)[u].contains(v)))
                        .map(|&u| o.w(k)[u])
                        .sum();
                    through / o.w(k - 1)[o.idx(k - 1, eta).unwrap()]
                })
                .sum::<f64>()
                / (k + 1) as f64
        })
        .fold(0.0, f64::max);
    (ratio, thin)
}

fn criterion_8() -> Outcome {
    let s = |a, b| Simplex::new([a, b]).unwrap();
    let matching = FaceSet::new(1, vec![s(0, 1), s(2, 3)]).unwrap();
    let wc = k4();
    let (ratio, thin) = binary_oracle(&wc, &matching);
    let lambda = Oracle::new(&wc).lambda_one_sided();
    let bound = 1.0 / 3f64.sqrt() + (thin + lambda).sqrt();
    let r3 = 3f64.sqrt();
    let lib = check_binary_mixing(&wc, &matching, lambda).unwrap();
    let desk = (ratio - 1.0 / r3)
        .abs()
        .max((bound - 2.0 / r3).abs())
        .max((lib.achieved - 1.0 / r3).abs())
        .max((lib.bound - 2.0 / r3).abs());
    let mut ok = desk <= 1e-10 && ratio <= bound;
    let mut parts = vec![format!("K4 matching {ratio:.4} vs {bound:.4} (gap {desk:.1e})")];
    for seed in [1, SuiteConfig::default().seed] {
        let mut ratios = Vec::new();
        for deg in [8, 16, 32] {
            let (wc, a) = regular_graph_matching(64, deg, seed).unwrap();
            let (ratio, thin) = binary_oracle(&wc, &a);
            let lambda = Oracle::new(&wc).lambda_one_sided();
            let bound = 1.0 / 3f64.sqrt() + (thin + lambda).sqrt();
            let lib = check_binary_mixing(&wc, &a, profile(&wc).unwrap().lambda_one_sided).unwrap();
            ok &= ratio <= bound && lib.pass && (lib.achieved - ratio).abs() <= 1e-10;
            ratios.push(ratio);
        }
        let decreasing = ratios.windows(2).all(|w| w[1] < w[0]);
        ok &= decreasing;
        let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.4}")).collect();
        parts.push(format!("seed {seed} s=8,16,32: [{}] decreasing {decreasing}", shown.join(", ")));
    }
    outcome(ok, parts.join("; "))
}

fn criterion_9() -> Outcome {
    let mut checked = 0;
    let mut violations = Vec::new();
    for f in fixtures() {
        let o = Oracle::new(&f.complex);
        let lambda = o.lambda_one_sided();
        let n = o.n;
        for k in 0..n {
            if n < k + 3 || o.faces(k as isize).len() < 2 {
                continue;
            }
            let kf = k as f64;
            let spec = o.c0_spectrum(k as isize, &o.nonlazy(k));
            let radius = spec.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let den = 2.0 * (n as f64 - kf - 1.0) - 1.0;
            let bound = (kf / (kf + 1.0) + (kf + 1.0) * lambda).max(2.0 * (kf + 1.0) / den);
            checked += 1;
            if radius > bound + 1e-10 {
                violations.push(format!("{} k={k}: {radius:.4} > {bound:.4}", f.name));
            }
        }
    }
    let detail = if violations.is_empty() {
        format!("{checked} instances with n - k >= 3, no violations")
    } else {
        format!("{checked} instances, violations: {}", violations.join(", "))
    };
    outcome(violations.is_empty(), detail)
}

fn criterion_10() -> Outcome {
    let config = SuiteConfig::default();
    let a = to_json(&run_suite(&config).unwrap()).unwrap();
    let b = to_json(&run_suite(&config).unwrap()).unwrap();
    let spec = GeneratorSpec::RegularGraphMatching { v: 40, s: 8, seed: 5 };
    let g1 = to_json(&ComplexFile::from_generated(&spec.generate().unwrap())).unwrap();
    let g2 = to_json(&ComplexFile::from_generated(&spec.generate().unwrap())).unwrap();
    outcome(a == b && g1 == g2, format!("suite report {} bytes, identical {}; generator output identical {}", a.len(), a == b, g1 == g2))
}

fn main() -> ExitCode {
    type Criterion = fn() -> Outcome;
    let criteria: [(u8, &str, bool, Criterion); 10] = [
        (1, "weight identities", false, criterion_1),
        (2, "operator factorizations", false, criterion_2),
        (3, "garland identities", false, criterion_3),
        (4, "spectral descent", false, criterion_4),
        (5, "decomposition", false, criterion_5),
        (6, "lazy walk mixing", false, criterion_6),
        (7, "optimality trend", false, criterion_7),
        (8, "binary mixing", false, criterion_8),
        (9, "non-lazy one-sided bound", true, criterion_9),
        (10, "determinism", false, criterion_10),
    ];
    let mut failed = 0;
    for (id, name, advisory, run) in criteria {
        let o = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| outcome(false, "panicked".into()));
        let tag = match (o.pass, advisory) {
            (true, _) => "PASS",
            (false, true) => "ADVISORY",
            (false, false) => "FAIL",
        };
        failed += usize::from(!o.pass && !advisory);
        println!("criterion {id:>2} {tag:<8} {name}: {}", o.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
