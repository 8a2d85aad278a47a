//! Acceptance suite: twelve exact criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines come out in order; the
//! process exits nonzero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{exponent_sums, gcd_all, random_word, run_golden};
use solvkit::closure::{
    analyze, bounded_search, cyclic_retract, d_extraction, verify_retraction, ClosureError, EquationSystem,
    SearchBounds, SearchOutcome, Subgroup, Verdict,
};
use solvkit::groupring::{Laurent, Monomial, Valuation};
use solvkit::magnus::{
    chain_rule_check, embed, fox_substituted, module_rank, ring_constant, ring_element, FoxRing, GroupContext,
    NormalForm,
};
use solvkit::nilq5::{eq19_scan, lemma7_scan, NilQuotient};
use solvkit::words::{parse_word, substitute, Word};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn w(s: &str) -> Word {
    parse_word(s, None).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn metabelian_law() -> Outcome {
    let law = w("[[x1,x2],[x3,x4]]");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (r, d) in [(2, 2), (3, 2)] {
        let ctx = GroupContext::new(r, d).unwrap();
        for t in 0..100 {
            let sub: BTreeMap<usize, Word> = (1..=4).map(|i| (i, random_word(&mut rng, r, 8))).collect();
            let v = embed(&substitute(&law, &sub).unwrap(), ctx).unwrap();
            ensure(v.is_identity(), || format!("law fails in S_{{{r},{d}}} at trial {t}"))?;
        }
    }
    let ctx = GroupContext::new(2, 3).unwrap();
    let violations = (0..100)
        .filter(|_| {
            let sub: BTreeMap<usize, Word> = (1..=4).map(|i| (i, random_word(&mut rng, 2, 8))).collect();
            !embed(&substitute(&law, &sub).unwrap(), ctx).unwrap().is_identity()
        })
        .count();
    ensure(violations > 0, || "no violation in S_{2,3}".into())?;
    Ok(format!("200 identities, {violations}/100 violations in S_{{2,3}}"))
}

fn fundamental_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for t in 0..1000 {
        let r = rng.gen_range(1..=3);
        let d = rng.gen_range(1..=3);
        let ctx = GroupContext::new(r, d).unwrap();
        let word = random_word(&mut rng, r, 12);
        let a = embed(&word, ctx).unwrap();
        ensure(exponent_sums(&word, r) == a.abelianization(), || format!("abelian image wrong at trial {t}"))?;
        if d == 1 {
            continue;
        }
        let lower = ctx.lower().unwrap();
        let tops: Vec<NormalForm> = lower.generators().iter().map(|g| g.normal_form().clone()).collect();
        let mut lhs = FoxRing::zero();
        for j in 1..=r {
            let dj = fox_substituted(&word, j, &tops);
            ensure(dj == a.coords()[j - 1], || format!("coordinate {j} differs from letterwise Fox at trial {t}"))?;
            let aj = &ring_element(&lower.generator(j).unwrap()) - &ring_constant(lower, 1);
            lhs = &lhs + &(&dj * &aj);
        }
        let rhs = &ring_element(&a.top().unwrap()) - &ring_constant(lower, 1);
        ensure(lhs == rhs, || format!("identity fails for {word} in S_{{{r},{d}}}"))?;
    }
    Ok("1000 words, r<=3, d<=3".into())
}

fn chain_rule() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in 0..200 {
        let r = rng.gen_range(2..=3);
        let d = rng.gen_range(2..=3);
        let ctx = GroupContext::new(r, d).unwrap();
        let k = rng.gen_range(1..=3);
        let c = random_word(&mut rng, k, 6);
        let h: Vec<_> = (0..c.max_generator().max(1)).map(|_| embed(&random_word(&mut rng, r, 6), ctx).unwrap()).collect();
        ensure(chain_rule_check(&c, &h).unwrap(), || format!("chain rule fails for c={c} at trial {t}"))?;
    }
    Ok("200 instances".into())
}

fn random_laurent(rng: &mut ChaCha8Rng, rank: usize, span: i64, max_terms: usize) -> Laurent {
    loop {
        let mut x = Laurent::zero();
        for _ in 0..rng.gen_range(1..=max_terms) {
            let m = Monomial((0..rank).map(|_| rng.gen_range(-span..=span)).collect());
            x.add_term(m, BigInt::from(rng.gen_range(-3i64..=3)));
        }
        if !x.is_zero() {
            return x;
        }
    }
}

fn omega_valuation() -> Outcome {
    for rank in 1..=3 {
        for i in 0..rank {
            let v = Laurent::one_minus(rank, i, 1).omega(8).unwrap();
            ensure(v == Valuation::Exact(1), || format!("omega(1 - a{}) = {v} in rank {rank}", i + 1))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut pairs = 0;
    let mut seen = [0usize; 8];
    while pairs < 200 {
        let rank = rng.gen_range(1..=3);
        let factor = |rng: &mut ChaCha8Rng| {
            let mut x = random_laurent(rng, rank, 2, 3);
            for _ in 0..rng.gen_range(0..=4) {
                let axis = rng.gen_range(0..rank);
                x = &x * &Laurent::one_minus(rank, axis, rng.gen_range(1..=2));
            }
            x
        };
        let x = factor(&mut rng);
        let y = factor(&mut rng);
        let (Valuation::Exact(a), Valuation::Exact(b)) = (x.omega(8).unwrap(), y.omega(8).unwrap()) else { continue };
        if a + b >= 8 {
            continue;
        }
        let v = (&x * &y).omega(8).unwrap();
        ensure(v == Valuation::Exact(a + b), || format!("omega({x} * {y}) = {v}, want {}", a + b))?;
        seen[(a + b) as usize] += 1;
        pairs += 1;
    }
    Ok(format!("200 pairs, sums 0..7 seen {seen:?}"))
}

fn divisibility_lemma() -> Outcome {
    let rank = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let monomials: Vec<Monomial> = (-2..=2i64)
        .flat_map(|p| (-2..=2i64).map(move |q| Monomial(vec![p, q])))
        .filter(|m| m.0 != [0, 0])
        .collect();
    for t in 0..50 {
        let alpha = random_laurent(&mut rng, rank, 2, 4);
        let m = alpha.choose_m().unwrap();
        let target = &Laurent::one_minus(rank, 0, m) * &alpha;
        for wm in &monomials {
            let divisor = &Laurent::one(rank) - &Laurent::term(wm.pow(m), 1);
            let divides = target.exact_div(&divisor).unwrap().is_some();
            let expected = wm.0 == [1, 0] || wm.0 == [-1, 0];
            ensure(divides == expected, || {
                format!("trial {t}: alpha={alpha} m={m} w={:?} divides={divides}", wm.0)
            })?;
        }
    }
    Ok(format!("50 alphas x {} monomials", monomials.len()))
}

fn cyclic_retracts() -> Outcome {
    let corpus: [(usize, usize, &str); 20] = [
        (2, 2, "z1"),
        (2, 2, "z1*[z1,z2]"),
        (2, 2, "z1*z2^-1*z1^-1*z2*z1"),
        (2, 2, "z1^2*z2^3"),
        (2, 2, "z2^-1*[z2,z1]^2"),
        (3, 2, "z1^2*z2^3*z3^5"),
        (3, 2, "z3*[z1,z2]"),
        (2, 3, "z1*[[z1,z2],[z1,z2^2]]"),
        (2, 3, "z1^3*z2^-2"),
        (3, 3, "z1^6*z2^10*z3^15"),
        (2, 2, "z1^2"),
        (2, 2, "[z1,z2]"),
        (2, 2, "z1^2*z2^4"),
        (2, 2, "z1^3*[z1,z2]^2"),
        (2, 2, "z1^6*z2^9"),
        (3, 2, "[z1,z2]*[z2,z3]"),
        (3, 2, "z1^2*z2^2*z3^2"),
        (2, 3, "z1^-4*[z1,z2]"),
        (2, 3, "[z1,z2]^3"),
        (3, 3, "z1^2*z2^-6*z3^4*[z1,z3]"),
    ];
    let mut built = 0;
    for (r, d, text) in corpus {
        let ctx = GroupContext::new(r, d).unwrap();
        let h = w(text);
        let primitive = gcd_all(&exponent_sums(&h, r)) == 1;
        match cyclic_retract(&h, ctx) {
            Ok(rho) => {
                ensure(primitive, || format!("retraction built for non-primitive {text}"))?;
                let sub = Subgroup::new(ctx, vec![h.clone()]).unwrap();
                ensure(verify_retraction(&rho, &sub, None).unwrap(), || format!("verify fails for {text}"))?;
                ensure(rho.is_idempotent().unwrap(), || format!("not idempotent for {text}"))?;
                built += 1;
            }
            Err(ClosureError::NotPrimitive(_)) => ensure(!primitive, || format!("rejected primitive {text}"))?,
            Err(e) => return Err(format!("{text}: {e}")),
        }
    }
    ensure(built == 10, || format!("{built} retractions built, want 10"))?;
    Ok("10 built and verified, 10 rejected".into())
}

fn eq19_grid() -> Outcome {
    let report = eq19_scan(3, 3, 2);
    ensure(report.points == 7usize.pow(6), || format!("{} points", report.points))?;
    ensure(report.confirmed(), || format!("{} mismatches, {} pattern violations", report.mismatches.len(), report.pattern_violations.len()))?;
    // Independent pass: words embedded letter by letter, closed forms written out here.
    let q = NilQuotient::new(3);
    let power = |e: &[i64]| {
        Word::from_letters(
            e.iter()
                .enumerate()
                .filter(|(_, &n)| n != 0)
                .map(|(j, &n)| (solvkit::words::Symbol::gen(j + 1), BigInt::from(n)))
                .collect(),
        )
    };
    let mut distinguished = 0;
    for n in 0..7usize.pow(6) {
        let digits: Vec<i64> = (0..6).map(|p| ((n / 7usize.pow(p)) % 7) as i64 - 3).collect();
        let (k, m) = digits.split_at(3);
        let (g, f) = (power(m), power(k));
        let c = q.embed(&Word::left_normed(&[g.clone(), f.clone(), f, g])).unwrap();
        let coords = q.bc_coordinates(&c).unwrap();
        let get = |t: &[usize]| coords.get(t).copied().unwrap_or(0);
        let got = (get(&[2, 1, 1, 2]), get(&[2, 1, 1, 1]), get(&[2, 1, 2, 2]));
        let delta = k[0] * m[1] - k[1] * m[0];
        let want = (delta * (k[0] * m[1] + k[1] * m[0]), delta * k[0] * m[0], delta * k[1] * m[1]);
        ensure(got == want, || format!("k={k:?} m={m:?}: got {got:?}, want {want:?}"))?;
        let pattern = k[0].abs() == 1 && m[0] == 0 && k[1] == 0 && m[1].abs() == 1;
        ensure((got == (1, 0, 0)) == pattern, || format!("pattern mismatch at k={k:?} m={m:?}"))?;
        distinguished += usize::from(pattern);
    }
    ensure(distinguished == report.distinguished && distinguished == 4 * 49, || {
        format!("distinguished {distinguished} vs scan {}", report.distinguished)
    })?;
    Ok(format!("{} points twice, {distinguished} distinguished", report.points))
}

fn lemma7() -> Outcome {
    let q2 = NilQuotient::new(2);
    let m2 = GroupContext::new(2, 2).unwrap();
    // γ-membership through ω of Fox derivatives, against elements of known weight.
    let hand_built: [(&str, usize); 7] = [
        ("z1", 1),
        ("z1*z2^-1", 1),
        ("[z1,z2]", 2),
        ("[z1,z2]^3*[z2,z1,z1]", 2),
        ("[z2,z1,z1]", 3),
        ("[z2,z1,z1,z2]*[z2,z1,z1,z1]^-2", 4),
        ("[z2,z1,z1,z2,z1]", 5),
    ];
    for (text, weight) in hand_built {
        let a = embed(&w(text), m2).unwrap();
        let nil = q2.embed(&w(text)).unwrap();
        for c in 2..=5 {
            let by_omega = a.abelianization().iter().all(|&e| e == 0)
                && a.coords().iter().all(|u| match solvkit::magnus::to_laurent(u).omega(c as u32) {
                    Ok(Valuation::Exact(n)) => n as usize >= c - 1,
                    Ok(Valuation::AtLeast(_)) | Err(_) => true,
                });
            ensure(by_omega == (weight >= c), || format!("omega criterion wrong for {text} at c={c}"))?;
            ensure(q2.in_gamma(&nil, c) == (weight >= c), || format!("in_gamma wrong for {text} at c={c}"))?;
        }
    }
    // Commutator tails change [g1,g2,g2,g1] only by γ5 terms.
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..30 {
        let z = |rng: &mut ChaCha8Rng| {
            let (a, b) = (rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3));
            Word::gen(1).pow_i64(a).mul(&Word::gen(2).pow_i64(b))
        };
        let (g1, g2) = (z(&mut rng), z(&mut rng));
        let tail = |rng: &mut ChaCha8Rng| random_word(rng, 2, 4).commutator(&random_word(rng, 2, 4));
        let (h1, h2) = (g1.mul(&tail(&mut rng)), g2.mul(&tail(&mut rng)));
        let plain = q2.project(&embed(&Word::left_normed(&[g1.clone(), g2.clone(), g2, g1]), m2).unwrap()).unwrap();
        let tailed = q2.project(&embed(&Word::left_normed(&[h1.clone(), h2.clone(), h2, h1]), m2).unwrap()).unwrap();
        ensure(plain == tailed, || "commutator tail changed the class-5 image".into())?;
    }
    let report = lemma7_scan(3);
    ensure(report.confirmed(), || format!("solutions {:?}", report.solutions))?;
    let want: Vec<[i64; 4]> = vec![[-1, 0, 0, -1], [-1, 0, 0, 1], [1, 0, 0, -1], [1, 0, 0, 1]];
    ensure(report.solutions == want, || format!("solutions {:?}", report.solutions))?;
    Ok("CONFIRMED, 4 solutions in [-3,3]^4".into())
}

fn d_extractions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let commutator = |rng: &mut ChaCha8Rng, ctx: GroupContext| loop {
        let r = ctx.rank();
        let c = embed(&random_word(rng, r, 5).commutator(&random_word(rng, r, 5)), ctx).unwrap();
        if !c.is_identity() {
            break c;
        }
    };
    let mut recovered = 0;
    let mut rejected = 0;
    for t in 0..50 {
        let ctx = GroupContext::new(if t % 2 == 0 { 2 } else { 3 }, 2).unwrap();
        let d0 = commutator(&mut rng, ctx);
        let cs: Vec<_> = ctx
            .generators()
            .iter()
            .map(|z| d0.mul(&d0.conjugate_by(z).unwrap().inv()).unwrap())
            .collect();
        let d = d_extraction(&cs).map_err(|e| format!("trial {t}: {e}"))?;
        ensure(d == d0, || format!("trial {t}: recovered a different d"))?;
        recovered += 1;

        let mut bad = cs.clone();
        let i = rng.gen_range(1..bad.len());
        let u = commutator(&mut rng, ctx);
        bad[i] = bad[i].mul(&u).unwrap();
        match d_extraction(&bad) {
            Err(ClosureError::Inconsistent(_)) => rejected += 1,
            Ok(_) => return Err(format!("trial {t}: perturbed instance accepted")),
            Err(e) => return Err(format!("trial {t}: unexpected error {e}")),
        }
    }
    Ok(format!("{recovered} recovered, {rejected} rejected"))
}

fn module_dimension() -> Outcome {
    let ctx = GroupContext::new(3, 2).unwrap();
    let cs: Vec<_> = ["[z1,z2]", "[z1,z3]", "[z2,z3]"].iter().map(|s| embed(&w(s), ctx).unwrap()).collect();
    let k = module_rank(&cs).unwrap();
    ensure(k == 2, || format!("module_rank = {k}"))?;
    Ok("rank 2 = r - 1".into())
}

fn proposition1() -> Outcome {
    let ctx = GroupContext::new(2, 2).unwrap();
    let h = Subgroup::new(ctx, vec![w("[z1,z2]")]).unwrap();
    let report = analyze(&h, None).unwrap();
    ensure(report.verdict == Verdict::NotVerballyClosed, || format!("verdict {}", report.verdict))?;
    let sys = EquationSystem::new(vec![(w("[x1,x2]"), w("[z1,z2]"))]).unwrap();
    let g = Subgroup::new(ctx, vec![w("z1"), w("z2")]).unwrap();
    let in_g = bounded_search(&sys, &g, SearchBounds { max_length: 1, exponent_cap: 3 }).unwrap();
    ensure(matches!(in_g, SearchOutcome::Found(_)), || "equation not solvable in G".into())?;
    let bounds = SearchBounds { max_length: 5, exponent_cap: 3 };
    let out = bounded_search(&sys, &h, bounds).unwrap();
    ensure(out == SearchOutcome::NoneFound, || format!("unexpected H-solution {out:?}"))?;
    Ok(format!("not-verbally-closed; none found <= {bounds}"))
}

fn cli_golden() -> Outcome {
    let results = run_golden();
    let failed: Vec<_> = results.iter().filter(|r| !r.ok).collect();
    if failed.is_empty() {
        Ok(format!("{} cases", results.len()))
    } else {
        Err(failed.iter().map(|r| format!("{}: {}", r.name, r.detail)).collect::<Vec<_>>().join("\n"))
    }
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("word-problem soundness", metabelian_law),
        ("fundamental identity", fundamental_identity),
        ("chain rule", chain_rule),
        ("omega valuation", omega_valuation),
        ("divisibility by 1 - w^m", divisibility_lemma),
        ("cyclic retractions", cyclic_retracts),
        ("eq19 closed forms", eq19_grid),
        ("lemma7 quotient scan", lemma7),
        ("d-extraction", d_extractions),
        ("module dimension", module_dimension),
        ("proposition1 rule", proposition1),
        ("CLI golden files", cli_golden),
    ];
    let mut failures = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(note) => println!("PASS {:>2} {name}: {note} ({secs:.2}s)", n + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.2}s)", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
