//! Verification suites behind `kn-chart verify`.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::assembly::{duality_audit, duality_center, k_k1, tc_k1, unit_torsionfree_audit};
use crate::bigraded::Window;
use crate::chart::{compute, diff_against_transcription, export_json, figure_specs, parse_transcription};
use crate::error::{Error, Result};
use crate::hochschild::{default_window, verify_image};
use crate::syntomic::{
    can_phi_assemble, expected_lambda_differential, nygaard_decompose, prismatic_einf, syntomic_closed,
    syntomic_max_k, syntomic_stems, verify_hodge_tate, FrobeniusField, NygaardPart,
};
use crate::table::Coeff;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Figures,
    Oracle,
    Pipeline,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "figures" => Ok(Suite::Figures),
            "oracle" => Ok(Suite::Oracle),
            "pipeline" => Ok(Suite::Pipeline),
            "all" => Ok(Suite::All),
            _ => Err(Error::Invalid(format!("unknown suite {s:?} (figures, oracle, pipeline, all)"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub millis: u128,
}

fn run(suite: &'static str, name: String, f: impl FnOnce() -> Result<String>) -> CheckReport {
    let start = Instant::now();
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(e) => (false, e.to_string()),
    };
    CheckReport { suite, name, passed, detail, millis: start.elapsed().as_millis() }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Mismatch(msg()))
    }
}

/// Recompute every figure and compare with `dir/figN.json` byte for byte
/// and with the hand transcription `dir/transcription/figN.txt`.
pub fn figure_checks(dir: &Path) -> Vec<CheckReport> {
    figure_specs()
        .into_iter()
        .map(|spec| {
            run("figures", spec.name.to_string(), || {
                let doc = compute(&spec.request)?;
                let json = export_json(&doc);
                let path = dir.join(format!("{}.json", spec.name));
                let golden = std::fs::read_to_string(&path)
                    .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
                ensure(golden == json, || format!("{} differs from the computed export", path.display()))?;
                let tpath = dir.join("transcription").join(format!("{}.txt", spec.name));
                let text = std::fs::read_to_string(&tpath)
                    .map_err(|e| Error::Invalid(format!("{}: {e}", tpath.display())))?;
                let diffs = diff_against_transcription(&doc, &parse_transcription(&text)?)?;
                ensure(diffs.is_empty(), || format!("transcription mismatch: {}", diffs.join("; ")))?;
                Ok(format!("{} classes", doc.entries.len()))
            })
        })
        .collect()
}

pub const ORACLE_CASES: [(u32, usize); 4] = [(2, 1), (2, 2), (3, 1), (5, 1)];
pub const SMALL_CASES: [(u32, usize); 3] = [(2, 1), (2, 2), (3, 1)];

pub fn oracle_checks() -> Vec<CheckReport> {
    ORACLE_CASES
        .into_iter()
        .map(|(p, n)| {
            run("oracle", format!("image f_n at p={p} n={n}"), || {
                let c = verify_image(p, n, &default_window(p, n))?;
                Ok(format!("{} bidegrees, max dimension {}", c.bidegrees_compared, c.max_dimension))
            })
        })
        .collect()
}

pub fn pipeline_checks() -> Vec<CheckReport> {
    let mut out = Vec::new();
    for (p, n) in SMALL_CASES {
        out.push(run("pipeline", format!("hodge-tate collapse p={p} n={n}"), || {
            let stems = syntomic_stems(p, n);
            let w = Window::new(stems, (-(n as i64) - 2, 2));
            let c = verify_hodge_tate(p, n, &w, 3)?;
            ensure(c.collapses(), || format!("classes off the 0-line at {:?}", c.off_zero_line))?;
            Ok(format!("{} classes on the 0-line", c.zero_line))
        }));
        out.push(run("pipeline", format!("prismatic forcing p={p} n={n}"), || {
            let stems = syntomic_stems(p, n);
            let r = prismatic_einf(p, n, &Window { stems, weights: (-(n as i64) - 2, 2), aux: Some((-40, 40)) })?;
            let (page, src, tgt) = expected_lambda_differential(p, n)?;
            let found = r.pattern.edges.iter().any(|e| e.page == page && e.source == src && e.target == tgt);
            ensure(found, || format!("d{page}({src}) = {tgt} is missing"))?;
            Ok(format!("{} forced orbits, E_∞ matches over {} tridegrees", r.pattern.edges.len(), r.tridegrees))
        }));
        out.push(run("pipeline", format!("nygaard parts p={p} n={n}"), || {
            let stems = syntomic_stems(p, n);
            let d = nygaard_decompose(p, n, stems, syntomic_max_k(p, n, stems))?;
            let total: usize = NygaardPart::ALL.iter().map(|&x| d.get(x).len()).sum();
            ensure(total == d.tcminus.einf_total, || format!("parts sum to {total}, E_∞ has {}", d.tcminus.einf_total))?;
            Ok(format!("A00 {} A01 {} A10 {} A11 {}", d.a00.len(), d.a01.len(), d.a10.len(), d.a11.len()))
        }));
        out.push(run("pipeline", format!("unit audit p={p} n={n}"), || {
            let a = unit_torsionfree_audit(p, n)?;
            ensure(a.is_clean(), || format!("open candidates {:?}", a.open()))?;
            Ok(format!("{} raw candidates, all discharged", a.raw_count()))
        }));
    }
    for p in [3, 5] {
        out.push(run("pipeline", format!("TC(k(1)) p={p}"), || {
            let tc = tc_k1(p)?;
            ensure(tc.bockstein.is_clean() && tc.motivic.is_clean(), || "open audit candidates".into())?;
            Ok(format!("{} generators", tc.module.generators.len()))
        }));
        out.push(run("pipeline", format!("K(k(1)) ledger p={p}"), || {
            let k = k_k1(p, (-1, 4 * (p as i64).pow(3)))?;
            let expected = std::collections::BTreeMap::from([(-1, 1), (2 * p as i64 - 2, 1)]);
            ensure(k.ledger == expected, || format!("dim TC - dim K is {:?}", k.ledger))?;
            Ok(format!("differences {:?}", k.ledger))
        }));
    }
    out.push(run("pipeline", "F4 Frobenius".into(), || {
        let f = FrobeniusField::new(2, 2)?;
        ensure(f.fixed_dims() == (1, 1), || format!("ker/coker of 1-Fr are {:?}", f.fixed_dims()))?;
        let closed = syntomic_closed(2, 2)?.table();
        let fp = closed.entries.iter().filter(|e| e.coeff == Coeff::Fp).count();
        let k = closed.entries.iter().filter(|e| e.coeff == Coeff::K).count();
        ensure((fp, k) == (8, 16), || format!("closed field gives {fp} Fp and {k} k"))?;
        Ok("8 Fp + 16 k".into())
    }));
    for (p, n) in [(2, 2), (3, 1)] {
        out.push(run("pipeline", format!("duality p={p} n={n}"), || {
            let r = duality_audit(&can_phi_assemble(p, n)?.table(), duality_center(p, n));
            ensure(r.is_symmetric(), || format!("violations {:?}", r.violations))?;
            Ok(format!("center {:?}", r.center))
        }));
    }
    out
}

pub fn run_suite(suite: Suite, fixtures: &Path) -> Vec<CheckReport> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Figures | Suite::All) {
        out.extend(figure_checks(fixtures));
    }
    if matches!(suite, Suite::Oracle | Suite::All) {
        out.extend(oracle_checks());
    }
    if matches!(suite, Suite::Pipeline | Suite::All) {
        out.extend(pipeline_checks());
    }
    out
}
