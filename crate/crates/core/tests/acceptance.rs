//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pointpush::bounds::{closed_lower, closed_upper, convergence_monotone, eff_bounds, eff_exact_two, log3};
use pointpush::freegroup::growth_estimate;
use pointpush::gsr::{gsr_estimate, gsr_two_obstacles, incidence_set, rho_k_bruteforce, run_lemma_trials};
use pointpush::laurent::{expand_mod_q, phi, Cover};
use pointpush::matrix_rep::{
    gen_a, gen_a_bar, h_matrix, h_partial, h_partial_entry_formula, h_partial_trace_formula, hhat_matrix, psi,
    psi_cover,
};
use pointpush::protocol::{alpha_automorphism, hsp, protocol_automorphism, ProtocolWord};
use pointpush::spectral::{
    char_poly, classify_radius, consolidate_clusters, eigenvalues, eigenvalues_direct, multiset_match, roots, spectral_radius,
    Classification, IntPolynomial,
};
use pointpush::{Config, ExactMatrix};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || format!("took {elapsed:?}, limit {limit:?}"))
}

fn pow3(e: usize) -> BigInt {
    num_traits::pow(BigInt::from(3), e)
}

fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

// Largest root modulus of the characteristic polynomial.
fn rho_by_roots(m: &ExactMatrix) -> Result<f64, String> {
    let rs = roots(&char_poly(m)).map_err(|e| e.to_string())?;
    Ok(rs.iter().map(|r| r.modulus()).fold(0.0, f64::max))
}

fn c1() -> Outcome {
    let t = Instant::now();
    for n in 2..=20usize {
        // Oracle: -3^N + 3N + 1 written out directly.
        let want = -pow3(n) + big(3 * n as i64 + 1);
        let got = h_matrix(n).map_err(|e| e.to_string())?.trace();
        ensure(got == want, || format!("N={n}: trace {got}, expected {want}"))?;
    }
    within_time(t.elapsed(), Duration::from_secs(1))?;
    Ok(format!("N=2..20 exact in {:?}", t.elapsed()))
}

fn c2() -> Outcome {
    let t = Instant::now();
    for n in 2..=20usize {
        let hh = hhat_matrix(n).map_err(|e| e.to_string())?;
        let sums = hh.column_sums();
        for (j, s) in sums.iter().enumerate() {
            let want = pow3(n) - big(2) * pow3(j);
            ensure(*s == want, || format!("N={n}, j={}: {s}, expected {want}", j + 1))?;
        }
        let want = pow3(n) - big(n as i64 + 1);
        ensure(hh.trace() == want, || format!("N={n}: trace {}, expected {want}", hh.trace()))?;
    }
    within_time(t.elapsed(), Duration::from_secs(1))?;
    Ok(format!("N=2..20 exact in {:?}", t.elapsed()))
}

fn c3() -> Outcome {
    let mut cells = 0usize;
    for n in 2..=12usize {
        for k in 1..n {
            let h = h_partial(k, n).map_err(|e| e.to_string())?;
            for i in 1..=n {
                for col in k + 1..=n {
                    let want = h_partial_entry_formula(k, i, col);
                    let got = h.get(i - 1, col - 1);
                    ensure(*got == want, || format!("N={n}, k={k}, cell ({i}, {col}): {got} vs {want}"))?;
                    cells += 1;
                }
            }
            let want = -pow3(k) + big(2 * k as i64 + n as i64 + 1);
            ensure(h.trace() == want, || format!("N={n}, k={k}: trace {}, expected {want}", h.trace()))?;
            ensure(h_partial_trace_formula(k, n) == want, || format!("N={n}, k={k}: trace formula"))?;
        }
    }
    Ok(format!("{cells} cells and all traces for k < N <= 12"))
}

fn c4() -> Outcome {
    let h2 = h_matrix(2).map_err(|e| e.to_string())?;
    let cp = char_poly(&h2);
    ensure(cp == IntPolynomial::from_i64(&[1, 2, 1]), || format!("char poly of H(2) is {cp}"))?;
    let rho_h = rho_by_roots(&h2)?;
    ensure((rho_h - 1.0).abs() < 1e-9, || format!("rho(H(2)) = {rho_h}"))?;

    let cfg = Config::default();
    let hh = spectral_radius(&hhat_matrix(2).map_err(|e| e.to_string())?, &cfg).map_err(|e| e.to_string())?;
    let want = 3.0 + 2.0 * 2f64.sqrt();
    ensure((hh.radius - want).abs() < 1e-9, || format!("rho(Hhat(2)) = {}", hh.radius))?;

    // Eff(2) by two independent routes: the closed form and the 2-norm
    // generalized spectral radius of the two-obstacle generator set.
    let eff_paper = 0.881_373_587_0;
    let closed = eff_exact_two();
    let gsr = gsr_two_obstacles().map_err(|e| e.to_string())?.value.ln();
    ensure((closed - eff_paper).abs() < 1e-9, || format!("closed form {closed}"))?;
    ensure((gsr - eff_paper).abs() < 1e-9, || format!("two-obstacle GSR gives {gsr}"))?;
    let p = ProtocolWord::parse("a1 a2^-1", 2).map_err(|e| e.to_string())?;
    let r = rho_by_roots(&psi(&p))?;
    ensure((r.ln() / 2.0 - eff_paper).abs() < 1e-9, || format!("a1 a2^-1 gives {}", r.ln() / 2.0))?;
    Ok(format!("(x+1)^2 exact, rho(Hhat(2)) = {:.12}, Eff(2) = {gsr:.12}", hh.radius))
}

fn c5() -> Outcome {
    let budget = Config::default().product_budget;
    let mut notes = Vec::new();
    for n in 3..=5usize {
        let t = Instant::now();
        let set = incidence_set(n).map_err(|e| e.to_string())?;
        let bf = rho_k_bruteforce(&set, n, budget).map_err(|e| e.to_string())?;
        let elapsed = t.elapsed();
        ensure(bf.total_products == (n as u128).pow(n as u32), || {
            format!("N={n}: {} products enumerated", bf.total_products)
        })?;
        let target = rho_by_roots(&hhat_matrix(n).map_err(|e| e.to_string())?)?.powf(1.0 / n as f64);
        ensure((bf.value - target).abs() < 1e-8, || {
            format!("N={n}: max {} vs rho(Hhat)^(1/N) {target}", bf.value)
        })?;
        for s in 0..n {
            let mut cyc: Vec<usize> = (1..=n).collect();
            cyc.rotate_left(s);
            ensure(bf.achieving.contains(&cyc), || format!("N={n}: shift {cyc:?} does not attain"))?;
        }
        if n == 5 {
            within_time(elapsed, Duration::from_secs(10))?;
        }
        notes.push(format!("N={n}: {} achievers, {elapsed:?}", bf.achieving.len()));
    }
    Ok(notes.join("; "))
}

fn c6() -> Outcome {
    let cfg = Config::default();
    let mut rows = Vec::new();
    for n in 2..=20usize {
        let b = eff_bounds(n, &cfg).map_err(|e| e.to_string())?;
        let c = b.chain();
        for i in 0..3 {
            ensure(c[i] <= c[i + 1] + 1e-9, || format!("N={n}: chain {c:?}"))?;
        }
        rows.push(b);
    }
    let last = rows.last().expect("nonempty");
    let up = (closed_upper(20) - log3()).abs();
    let lo = (closed_lower(20).0 - log3()).abs();
    ensure(up < 1e-8, || format!("closed_upper gap {up}"))?;
    ensure(lo < 0.15, || format!("closed_lower gap {lo}"))?;
    ensure(last.gap_to_log3_upper() == up && last.gap_to_log3_lower() == lo, || "gap mismatch".into())?;
    ensure(convergence_monotone(&rows), || "closed-form gaps not monotone for N >= 3".into())?;
    Ok(format!("chain ordered for N=2..20; gaps at N=20: lower {lo:.6}, upper {up:.3e}"))
}

fn c7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=6usize {
        let cover = if n % 2 == 0 { Cover::Full } else { Cover::Prime };
        ensure(psi_cover(n) == cover, || format!("N={n}: cover choice"))?;
        for _ in 0..100 {
            let len = rng.random_range(0..=12);
            let p = ProtocolWord::random(n, len, &mut rng).map_err(|e| e.to_string())?;
            let lifted = phi(&p, cover);
            let at_minus = lifted.eval_sign(-1).map_err(|e| e.to_string())?;
            let trunc = at_minus.truncate_last();
            ensure(trunc == psi(&p), || format!("N={n}, `{p}`: truncation differs from Psi"))?;
            for other in [Cover::Full, Cover::Prime] {
                let one = phi(&p, other).eval_sign(1).map_err(|e| e.to_string())?;
                ensure(one.is_identity(), || format!("N={n}, `{p}`: Phi(1) is not I ({other:?})"))?;
            }
        }
    }
    Ok("500 words, Psi = truncated Phi(-1) and Phi(1) = I".into())
}

// Defective eigenvalues of the expanded matrix scatter by eps^(1/k) in
// floating point; clusters this tight are averaged before matching.
const CLUSTER_RADIUS: f64 = 1e-2;

fn c8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0f64;
    for n in 3..=4usize {
        for _ in 0..20 {
            let len = rng.random_range(1..=12);
            let p = ProtocolWord::random(n, len, &mut rng).map_err(|e| e.to_string())?;
            for cover in [Cover::Full, Cover::Prime] {
                let m = phi(&p, cover);
                // Route 1: Schur decomposition of the expanded real matrix.
                let big = expand_mod_q(&m, 2).map_err(|e| e.to_string())?;
                let raw = eigenvalues_direct(&big.to_f64()).map_err(|e| e.to_string())?;
                let lhs = consolidate_clusters(&raw, CLUSTER_RADIUS);
                // Route 2: exact characteristic polynomials of C(1) and C(-1).
                let mut rhs = Vec::new();
                for s in [1, -1] {
                    let c = m.eval_sign(s).map_err(|e| e.to_string())?;
                    rhs.extend(eigenvalues(&c).map_err(|e| e.to_string())?);
                }
                multiset_match(&lhs, &rhs, 1e-6)
                    .map_err(|z| format!("N={n}, `{p}` ({cover:?}): unmatched eigenvalue {z}"))?;
                let r_big = lhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
                let r_c = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max);
                worst = worst.max((r_big - r_c).abs() / r_c.max(1.0));
            }
        }
    }
    Ok(format!("40 words on both covers, worst radius deviation {worst:.2e}"))
}

fn c9() -> Outcome {
    let t = Instant::now();
    let p = ProtocolWord::parse("a1 a2^-1", 2).map_err(|e| e.to_string())?;
    let g = growth_estimate(&protocol_automorphism(&p), 1, 8, 10_000_000).map_err(|e| e.to_string())?;
    ensure(g.iterations() == 8, || format!("only {} iterations", g.iterations()))?;
    let want = 3.0 + 2.0 * 2f64.sqrt();
    let r = g.rate_estimate().expect("iterations ran");
    ensure((r - want).abs() / want < 0.02, || format!("a1 a2^-1: ratio {r} vs {want}"))?;
    let mut notes = vec![format!("a1 a2^-1 ratio {r:.6}")];
    for n in [3usize, 4] {
        let a = protocol_automorphism(&hsp(n).map_err(|e| e.to_string())?);
        let g = growth_estimate(&a, 1, 64, 10_000_000).map_err(|e| e.to_string())?;
        let r = g.rate_estimate().expect("iterations ran");
        let want = rho_by_roots(&h_matrix(n).map_err(|e| e.to_string())?)?;
        ensure((r - want).abs() / want < 0.02, || format!("HSP_{n}: ratio {r} vs rho(H) {want}"))?;
        notes.push(format!("HSP_{n} {r:.6} vs {want:.6} after {} iterations", g.iterations()));
    }
    within_time(t.elapsed(), Duration::from_secs(30))?;
    notes.push(format!("{:?}", t.elapsed()));
    Ok(notes.join("; "))
}

fn c10() -> Outcome {
    let three = big(3);
    for n in 2..=12usize {
        for j in 1..=n {
            let abar = gen_a_bar(j, n).map_err(|e| e.to_string())?;
            for sign in [1, -1] {
                let inc = alpha_automorphism(j, sign, n).map_err(|e| e.to_string())?.incidence_matrix();
                ensure(inc == abar, || format!("N={n}, j={j}, sign {sign}: incidence differs"))?;
            }
            let last = abar.row(n);
            let ok = last.iter().enumerate().all(|(c, v)| *v == big(i64::from(c == n)));
            ensure(ok, || format!("N={n}, j={j}: last row {last:?}"))?;
            let a = gen_a(j, n).map_err(|e| e.to_string())?;
            ensure(a.norm_one() == three, || format!("N={n}, j={j}: norm {}", a.norm_one()))?;
        }
    }
    let budget = Config::default().product_budget;
    let mut max_rho = 0f64;
    for (n, k) in [(2usize, 12usize), (3, 8), (4, 6), (5, 5)] {
        let est = gsr_estimate(&incidence_set(n).map_err(|e| e.to_string())?, k, budget).map_err(|e| e.to_string())?;
        ensure(est.ceiling == 3.0 && est.ceiling_ok, || format!("N={n}: ceiling {}", est.ceiling))?;
        for (i, v) in est.rho_k.iter().enumerate() {
            ensure(v.ln() <= log3() + 1e-12, || format!("N={n}, k={}: log rho_k = {}", i + 1, v.ln()))?;
            max_rho = max_rho.max(*v);
        }
    }
    Ok(format!("incidence and norms for j <= N <= 12; max rho_k {max_rho:.6} <= 3"))
}

fn c11() -> Outcome {
    let reports = run_lemma_trials(500, 11);
    ensure(reports.len() == 9, || format!("{} lemma parts", reports.len()))?;
    for r in &reports {
        ensure(r.trials >= 500 && r.failures == 0, || {
            format!("{}: {} failures in {} trials, first {:?}", r.name, r.failures, r.trials, r.first_failure)
        })?;
    }
    Ok(format!("{} parts x 500 trials, zero failures", reports.len()))
}

fn c12() -> Outcome {
    let cfg = Config {
        eps_unit: 1e-6,
        ..Config::default()
    };
    let mut marginal = Vec::new();
    let cases = (3..=20usize)
        .map(|n| (n, false, Classification::Salem))
        .chain((2..=20usize).map(|n| (n, true, Classification::Pisot)));
    for (n, hat, want) in cases {
        let m = if hat { hhat_matrix(n) } else { h_matrix(n) }.map_err(|e| e.to_string())?;
        let name = if hat { "Hhat" } else { "H" };
        let rep = spectral_radius(&m, &cfg).map_err(|e| e.to_string())?;
        let got = rep.classification.classification;
        ensure(got == want, || format!("{name}({n}): {got}, expected {want}"))?;
        let fine = classify_radius(&rep.char_poly, rep.radius, 1e-8).map_err(|e| e.to_string())?;
        ensure(fine.classification == got, || {
            format!("{name}({n}): {got} at 1e-6 but {} at 1e-8", fine.classification)
        })?;
        for r in rep.classification.marginal_roots.iter().chain(&fine.marginal_roots) {
            marginal.push(format!("{name}({n}) |z| = {}", r.modulus()));
        }
    }
    if marginal.is_empty() {
        Ok("Salem for H(3..20), Pisot for Hhat(2..20), stable at 1e-8; no marginal roots".into())
    } else {
        Ok(format!("stable at 1e-8; marginal roots: {}", marginal.join(", ")))
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("trace identity", c1),
        ("Hhat column sums and trace", c2),
        ("intermediate products", c3),
        ("two obstacles exact", c4),
        ("GSR realization", c5),
        ("bound chain", c6),
        ("representation consistency", c7),
        ("double cover spectrum", c8),
        ("word growth vs homology", c9),
        ("incidence and norm facts", c10),
        ("strategy lemmas", c11),
        ("Salem/Pisot pattern", c12),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let dt = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("[PASS] C{:<2} {name} ({dt:.2}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] C{:<2} {name} ({dt:.2}s): {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
