//! One PASS/FAIL line per acceptance criterion, with its runtime and limit.
//! Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use syntomic_core::assembly::{duality_audit, k_k1, tc_k1, unit_torsionfree_audit};
use syntomic_core::bigraded::{Element, Window};
use syntomic_core::chart::{compute, parse_transcription, ComputeRequest, FieldSpec, ObjectKind};
use syntomic_core::gfp::{binom_mod_p, Fp, FpMatrix};
use syntomic_core::hochschild::{closed_form_span, image_fn_closed_form, verify_image, Subset, ThhFp};
use syntomic_core::syntomic::{
    can_phi_assemble, expected_lambda_differential, m_tilde, nygaard_decompose, prismatic_closed_form,
    prismatic_einf, syntomic_max_k, syntomic_stems, tcminus_e2, verify_hodge_tate, FrobeniusField, NygaardPart,
};
use syntomic_core::table::Coeff;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> Vec<(String, i64, i64, Coeff)> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../figures/transcription").join(format!("{name}.txt"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    let mut v: Vec<_> = parse_transcription(&text)
        .unwrap()
        .into_iter()
        .map(|n| (n.label, n.stem, n.y, n.coeff))
        .collect();
    v.sort();
    v
}

fn sorted_points(req: ComputeRequest) -> Result<Vec<(String, i64, i64, Coeff)>, String> {
    compute(&req).map_err(|e| e.to_string())?.points().map_err(|e| e.to_string())
}

fn same_multiset(name: &str, got: &[(String, i64, i64, Coeff)], want: &[(String, i64, i64, Coeff)]) -> Result<(), String> {
    if got == want {
        return Ok(());
    }
    let extra: Vec<_> = got.iter().filter(|x| !want.contains(x)).map(|x| format!("+{}@({},{})", x.0, x.1, x.2)).collect();
    let missing: Vec<_> = want.iter().filter(|x| !got.contains(x)).map(|x| format!("-{}@({},{})", x.0, x.1, x.2)).collect();
    Err(format!("{name}: {} computed vs {} transcribed; {} {}", got.len(), want.len(), extra.join(" "), missing.join(" ")))
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn tc_2_2_chart() -> Outcome {
    let got = sorted_points(ComputeRequest::new(ObjectKind::Tc, 2, 2))?;
    check(got.len() == 32, || format!("{} classes, expected 32", got.len()))?;
    same_multiset("fig1", &got, &fixture("fig1"))?;
    for (label, stem, weight) in [("∂", -1, 1), ("t⁴ε̄₁ε̄₂λ₃", 17, -1), ("ε̄₁ε̄₂λ₃", 25, -1)] {
        check(got.iter().any(|x| x.0 == label && (x.1, x.2) == (stem, weight)), || format!("{label} missing"))?;
    }
    Ok("32 classes equal the transcription".into())
}

fn tc_3_1_chart() -> Outcome {
    let got = sorted_points(ComputeRequest::new(ObjectKind::Tc, 3, 1))?;
    check(got.len() == 20, || format!("{} classes, expected 20", got.len()))?;
    same_multiset("fig5", &got, &fixture("fig5"))?;
    Ok("20 classes equal the corrected transcription".into())
}

fn oracle() -> Outcome {
    let mut compared = 0;
    for (p, n) in [(2, 1), (2, 2), (3, 1), (5, 1)] {
        let top = 2 * (p as i64).pow(n as u32 + 2);
        let c = verify_image(p, n, &Window::new((-1, top), (-(n as i64) - 2, 2))).map_err(e)?;
        compared += c.bidegrees_compared;
    }
    Ok(format!("oracle = closed form in {compared} W-bidegrees"))
}

fn hodge_tate() -> Outcome {
    let mut total = 0;
    for (p, n) in [(2, 1), (2, 2), (3, 1)] {
        let w = Window::new(syntomic_stems(p, n), (-(n as i64) - 2, 2));
        let c = verify_hodge_tate(p, n, &w, 4).map_err(e)?;
        check(c.collapses(), || format!("({p},{n}): E_2 off the 0-line at {:?}", c.off_zero_line))?;
        check(c.zero_line == c.knt, || format!("({p},{n}): 0-line {} vs K_n^t {}", c.zero_line, c.knt))?;
        total += c.zero_line;
    }
    Ok(format!("0-line equals K_n^t ({total} classes over three cases)"))
}

fn prismatic() -> Outcome {
    for (p, n) in [(2, 1), (2, 2), (3, 1)] {
        let big_p = (p as i64).pow(n as u32 + 1);
        let w = Window { stems: syntomic_stems(p, n), weights: (-(n as i64) - 2, 2), aux: Some((-2 * big_p, 2 * big_p)) };
        let r = prismatic_einf(p, n, &w).map_err(e)?;
        let (page, src, tgt) = expected_lambda_differential(p, n).map_err(e)?;
        check(r.pattern.edges.iter().any(|x| x.page == page && x.source == src && x.target == tgt), || {
            format!("({p},{n}): d{page}({src}) = {tgt} not forced")
        })?;
        let closed = prismatic_closed_form(p, n, &w).map_err(e)?;
        check(closed.label_multiset() == r.table.label_multiset(), || format!("({p},{n}): E_∞ differs from the closed form"))?;
    }
    let got = sorted_points(ComputeRequest::new(ObjectKind::Tp, 2, 2).window(-2, 27).yrange(-12, 5))?;
    same_multiset("fig2", &got, &fixture("fig2"))?;
    Ok("unique pattern, E_∞ = closed form, fig2 reproduced".into())
}

fn nygaard() -> Outcome {
    let mut parts = BTreeMap::new();
    for (p, n) in [(2, 1), (2, 2), (3, 1)] {
        let stems = syntomic_stems(p, n);
        let max_k = syntomic_max_k(p, n, stems);
        let d = nygaard_decompose(p, n, stems, max_k).map_err(e)?;
        let e2 = tcminus_e2(p, n, &Window { stems, weights: (-(n as i64) - 1, 2), aux: Some((0, max_k)) }).map_err(e)?;
        check(e2.len() == d.tcminus.e2_total, || format!("({p},{n}): E_2 {} vs {}", e2.len(), d.tcminus.e2_total))?;
        let sum: usize = NygaardPart::ALL.iter().map(|&x| d.get(x).len()).sum();
        check(sum == d.tcminus.einf_total, || format!("({p},{n}): parts {sum} vs E_∞ {}", d.tcminus.einf_total))?;
        let width = (p as i64).pow(n as u32 + 1) - (p as i64).pow(n as u32);
        for s in Subset::all(n) {
            let m = m_tilde(p, n, &s);
            check(m.len() as i64 == width, || format!("|M̃_S| = {} ≠ {width}", m.len()))?;
            let here = d.tcminus.part(NygaardPart::A11).iter().filter(|c| c.name.as_ref().map(|x| &x.0) == Some(&s)).count();
            check(here == m.len(), || format!("({p},{n}) S={:?}: {here} A11 classes vs |M̃_S| {}", s.elements(), m.len()))?;
        }
        parts.insert((p, n), (d.a00.len(), d.a01.len(), d.a10.len(), d.a11.len()));
    }
    Ok(format!("E_2 reconciles; A11 = ⊕M̃_S; (A00,A01,A10,A11) {parts:?}"))
}

/// Bidegrees of Λ(∂, ε̄₁, λ₂) ⊕ {t^k ε̄₁λ₂ : p ≤ k < p²} ⊕ {t^d λ₂ : 0 < d ≤ p² - p}.
fn stated_tc_k1_bidegrees(p: i64) -> Vec<(i64, i64)> {
    let (e1, l2) = (2 * p - 1, 2 * p * p - 1);
    let mut v = Vec::new();
    for bits in 0..8 {
        let (a, b, c) = (bits & 1, (bits >> 1) & 1, (bits >> 2) & 1);
        v.push((-a + b * e1 + c * l2, a - b + c));
    }
    v.extend((p..p * p).map(|k| (e1 + l2 - 2 * k, 0)));
    v.extend((1..=p * p - p).map(|d| (l2 - 2 * d, 1)));
    v.sort();
    v
}

fn tc_k1_assembly() -> Outcome {
    let mut notes = Vec::new();
    for (p, count) in [(5, 48), (3, 20)] {
        let tc = tc_k1(p).map_err(e)?;
        let mut got: Vec<(i64, i64)> = tc.module.generators.entries.iter().map(|x| (x.stem, x.weight)).collect();
        got.sort();
        check(got.len() == count, || format!("p={p}: {} generators, expected {count}", got.len()))?;
        check(got == stated_tc_k1_bidegrees(p as i64), || format!("p={p}: generator bidegrees differ"))?;
        check(tc.module.v_stem == 2 * (p as i64).pow(2) - 2, || "v₂ stem".into())?;
        let expect_trunc = (p == 3).then_some(9);
        check(tc.module.truncation == expect_trunc, || format!("p={p}: truncation {:?}", tc.module.truncation))?;
        check(tc.bockstein.is_clean() && tc.motivic.is_clean(), || format!("p={p}: audits not clean"))?;
        notes.push(format!("p={p}: {count} over {}", tc.module.ground));
    }
    Ok(format!("{}; v₂-Bockstein and motivic d₂/d₃ clean", notes.join(", ")))
}

fn k_k1_ledger() -> Outcome {
    for p in [3u32, 5] {
        let tc = tc_k1(p).map_err(e)?;
        let top = 6 * (p as i64).pow(3);
        let k = k_k1(p, (-1, top)).map_err(e)?;
        let tc_dims = tc.module.stem_dims((-1, top));
        let k_dims = k.module.stem_dims((-1, top));
        for s in -1..=top {
            let extra = usize::from(s == -1 || s == 2 * p as i64 - 2);
            check(tc_dims[&s] == k_dims[&s] + extra, || {
                format!("p={p} stem {s}: TC {} vs K {} + {extra}", tc_dims[&s], k_dims[&s])
            })?;
        }
    }
    Ok("dim TC = dim K + dim Σ⁻¹Λ(ε̄₁) in stems -1..6p³".into())
}

fn field_variant() -> Outcome {
    let f4 = FrobeniusField::new(2, 2).map_err(e)?;
    check(f4.fixed_dims() == (1, 1), || format!("F4: ker/coker of 1-Fr {:?}", f4.fixed_dims()))?;
    let got = sorted_points(ComputeRequest::new(ObjectKind::Tc, 2, 2).field(FieldSpec::AlgebraicallyClosed))?;
    let fp = got.iter().filter(|x| x.3 == Coeff::Fp).count();
    let k = got.iter().filter(|x| x.3 == Coeff::K).count();
    check((fp, k) == (8, 16), || format!("{fp} F₂ + {k} k"))?;
    same_multiset("fig4", &got, &fixture("fig4"))?;
    Ok("F4 gives (1, 1); closed field gives 8 F₂ + 16 k equal to fig4".into())
}

fn duality() -> Outcome {
    for ((p, n), center) in [((2, 2), (24, 0)), ((3, 1), (21, 1))] {
        let table = can_phi_assemble(p, n).map_err(e)?.table();
        let r = duality_audit(&table, center);
        check(r.is_symmetric(), || format!("({p},{n}): violations {:?}", r.violations))?;
    }
    Ok("D(s,w) = D(24-s,-w) and D(21-s,1-w), no violations".into())
}

fn factorial_binomial(j: u64, k: u64) -> BigUint {
    if k > j {
        return BigUint::from(0u32);
    }
    let f = |m: u64| (1..=m).fold(BigUint::from(1u32), |a, i| a * BigUint::from(i));
    f(j) / (f(k) * f(j - k))
}

fn fail<T: std::fmt::Debug>(what: &str, err: proptest::test_runner::TestError<T>) -> String {
    format!("{what}: {err}")
}

fn properties() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 128, failure_persistence: None, ..Config::default() });
    let primes = [2u32, 3, 5, 7];

    runner
        .run(&(0..4usize, 0u64..=64, 0u64..=64), |(i, j, k)| {
            let p = primes[i];
            let got = binom_mod_p(j, k, p).map_err(|e| TestCaseError::fail(e.to_string()))?.value;
            prop_assert_eq!(BigUint::from(got), factorial_binomial(j, k) % BigUint::from(p));
            Ok(())
        })
        .map_err(|x| fail("Lucas", x))?;

    let elements = |thh: &ThhFp, barred: bool, stem: i64, weight: i64, seed: &[u32]| {
        let alg = if barred { thh.bar.clone() } else { thh.eps.clone() };
        let basis = alg.enumerate_window(&Window::point(stem, weight)).unwrap();
        (!basis.is_empty()).then(|| {
            let v: Vec<u32> = (0..basis.len()).map(|i| seed[i % seed.len()] % thh.p).collect();
            Element::from_vector(&alg, &basis, &v)
        })
    };
    runner
        .run(&(0..3usize, any::<bool>(), 0i64..60, -3i64..=0, prop::collection::vec(0u32..10, 1..5)), |(i, barred, s, w, seed)| {
            let thh = ThhFp::new(primes[i], 2).unwrap();
            if let Some(x) = elements(&thh, barred, s, w, &seed) {
                prop_assert!(thh.sigma(&thh.sigma(&x).unwrap()).unwrap().is_zero());
            }
            Ok(())
        })
        .map_err(|x| fail("σ² = 0", x))?;

    runner
        .run(&(0..3usize, 0i64..80, -2i64..=0, 0u64..12, 0u64..12, prop::collection::vec(0u32..10, 1..5)), |(i, s, w, a, b, seed)| {
            let p = primes[i];
            let thh = ThhFp::new(p, 2).unwrap();
            if let Some(x) = elements(&thh, false, s, w, &seed) {
                let lhs = thh.cap(&thh.cap(&x, a).unwrap(), b).unwrap();
                let rhs = thh.cap(&x, a + b).unwrap().scale(binom_mod_p(a + b, a, p).unwrap().value);
                prop_assert_eq!(lhs, rhs);
            }
            Ok(())
        })
        .map_err(|x| fail("cap law", x))?;

    runner
        .run(&(0..3usize, 1usize..9, 1usize..9, prop::collection::vec(0u32..100, 81)), |(i, r, c, seed)| {
            let field = Fp::new(primes[i]).unwrap();
            let rows: Vec<Vec<u32>> = (0..r).map(|a| (0..c).map(|b| seed[a * 9 + b] % field.p()).collect()).collect();
            let m = FpMatrix::from_rows(field, c, &rows).unwrap();
            prop_assert_eq!(m.rank() + m.kernel().dim(), c);
            Ok(())
        })
        .map_err(|x| fail("rank-nullity", x))?;

    for (p, n) in [(2, 1), (2, 2), (3, 1), (5, 1)] {
        let top = 2 * (p as i64).pow(n as u32 + 2);
        let image = image_fn_closed_form(p, n, &Window::new((-1, top + 1), (-(n as i64) - 2, 2))).map_err(e)?;
        let thh = &image.thh;
        let mut spans = BTreeMap::new();
        for m in image.monomials.iter().filter(|m| thh.bar.tri(m).0 < top) {
            let x = Element::monomial(&thh.bar, m.clone());
            let mut images = vec![thh.sigma(&x).map_err(e)?];
            // Caps past the top μ-power vanish.
            for j in 1..=(thh.bar.tri(m).0 / 2) as u64 {
                images.push(thh.cap(&x, j).map_err(e)?);
            }
            for y in images {
                let y = thh.to_eps(&y).map_err(e)?;
                let Some((s, w, _)) = y.tri() else { continue };
                if !spans.contains_key(&(s, w)) {
                    let coords = thh.basis(&Window::point(s, w)).map_err(e)?;
                    let span = closed_form_span(&image, &coords, s, w).map_err(e)?;
                    let index: BTreeMap<_, _> = coords.into_iter().enumerate().map(|(i, m)| (m, i)).collect();
                    spans.insert((s, w), (index, span));
                }
                let (index, span) = &spans[&(s, w)];
                check(span.contains(&y.to_vector(index).map_err(e)?), || {
                    format!("im f_n at ({p},{n}) not closed: {} ↦ {}", thh.bar.label(m), y.label())
                })?;
            }
        }
    }

    for (p, n) in [(2, 1), (2, 2), (3, 1), (5, 1), (7, 1), (3, 2)] {
        let table = can_phi_assemble(p, n).map_err(e)?.table();
        let lo = -(n as i64);
        check(table.entries.iter().all(|x| (lo..=2).contains(&x.weight)), || format!("({p},{n}): weight outside [-n, 2]"))?;
        let bottom: Vec<_> = table.entries.iter().filter(|x| x.weight == lo).map(|x| x.label.clone()).collect();
        let want: String = (1..=n).map(|i| format!("ε̄{}", char::from_u32(0x2080 + i as u32).unwrap())).collect();
        check(bottom == [want.clone()], || format!("({p},{n}): weight -n classes {bottom:?}, expected {want}"))?;
    }

    for (p, n) in [(2, 1), (2, 2), (3, 1)] {
        let a = unit_torsionfree_audit(p, n).map_err(e)?;
        check(a.is_clean(), || format!("unit audit ({p},{n}): {:?}", a.open()))?;
    }
    Ok("Lucas, σ², cap law, rank-nullity, im f_n closure, weights, unit audit".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 11] = [
        ("1  tc p=2 n=2 = fig1 fixture", Some(Duration::from_secs(5)), tc_2_2_chart),
        ("2  tc p=3 n=1 = fig5 fixture", Some(Duration::from_secs(2)), tc_3_1_chart),
        ("3  im f_n oracle = closed form", Some(Duration::from_secs(60)), oracle),
        ("4  Hodge-Tate collapse", Some(Duration::from_secs(30)), hodge_tate),
        ("5  prismatic uniqueness", Some(Duration::from_secs(120)), prismatic),
        ("6  Nygaard bookkeeping", None, nygaard),
        ("7  TC(k(1)) assembly", Some(Duration::from_secs(10)), tc_k1_assembly),
        ("8  K(k(1)) ledger", None, k_k1_ledger),
        ("9  perfect-field variant", None, field_variant),
        ("10 duality audit", None, duality),
        ("11 property suites", Some(Duration::from_secs(60)), properties),
    ];
    let mut failures = 0;
    for (name, limit, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let over = limit.is_some_and(|l| took > l);
        let limit_text = limit.map_or("no limit".to_string(), |l| format!("limit {} s", l.as_secs()));
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("too slow; {d}")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("{status} {name:<34} {:>9.3} s ({limit_text}) exact: {detail}", took.as_secs_f64());
    }
    println!("{} of 11 criteria pass", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
