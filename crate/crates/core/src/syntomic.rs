//! The t-Bockstein pipeline for k(n) modulo (p, v_1, ..., v_{n+1}):
//! Hodge–Tate, periodic (prismatic) and negative pages, the Nygaard
//! decomposition of the negative page, and syntomic cohomology as the
//! kernel plus shifted cokernel of can − φ.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::bigraded::{Element, Monomial, MonomialAlgebra, Tri, Window};
use crate::error::{Error, Result};
use crate::gfp::{quotient_basis, Fp, FpMatrix, Subspace};
use crate::hochschild::{f_of, image_block, ipow, kn_elements, KnAlgebra, KnKind, Subset};
use crate::ss_engine::{
    force_differentials, ClassStatus, DifferentialRule, E1Source, FoldSpec, ForceInput, ForcedPattern, ModuleRules,
    PermanentCycleSet, ShiftLaw, SpectralSequence, StartClass,
};
use crate::table::{ClassEntry, ClassTable, Coeff};

/// Which t-Bockstein E_1 page to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PageKind {
    /// im f_n[μ^{±p^{n+1}}] ⊗ Λ(ε_{n+1}) ⊗ Λ(λ_{n+1}) ⊗ F_p[t].
    HodgeTate,
    /// THH ⊗ F_p[t^{±1}].
    Periodic,
    /// THH ⊗ F_p[t].
    Negative,
    /// The same page for F_p itself: F_p[μ] ⊗ Λ(ε_0, ε̄_1, ..., ε̄_{n+1}) ⊗ F_p[t^{±1}].
    FpComparison,
}

/// E_1 = (mod (p, v_1, ..., v_{n+1}) THH) ⊗ t-powers, in the variant `kind`.
#[derive(Debug, Clone)]
pub struct ThhSource {
    pub ka: KnAlgebra,
    pub kind: PageKind,
    /// One μ^{p^{n+1}}-period of basis elements, with (stem, weight).
    block: Vec<(Element, i64, i64)>,
}

impl ThhSource {
    pub fn new(p: u32, n: usize, kind: PageKind) -> Result<Self> {
        let ka = KnAlgebra::new(p, n, 1)?;
        let mut block = Vec::new();
        let push = |block: &mut Vec<(Element, i64, i64)>, x: Element| {
            let t = x.tri().expect("homogeneous basis element");
            block.push((x, t.0, t.1));
        };
        if kind == PageKind::FpComparison {
            for j in 0..ka.big_p {
                for e0 in [false, true] {
                    for bars in 0..1u32 << (n + 1) {
                        push(&mut block, ka.el(ka.mono(j, e0, bars, false, 0)));
                    }
                }
            }
        } else {
            let eps = ka.eps_top();
            let lambda = ka.lambda();
            for (j, e0, s) in image_block(p, n)? {
                let x = ka.el(ka.mono(j, e0, s.bits, false, 0));
                for with_eps in [false, true] {
                    let y = if with_eps { x.multiply(&eps)? } else { x.clone() };
                    push(&mut block, y.multiply(&lambda)?);
                    push(&mut block, y);
                }
            }
        }
        Ok(ThhSource { ka, kind, block })
    }

    fn k_allowed(&self, k: i64) -> bool {
        match self.kind {
            PageKind::HodgeTate | PageKind::Negative => k >= 0,
            _ => true,
        }
    }

    fn m_allowed(&self, m: i64) -> bool {
        self.kind == PageKind::HodgeTate || m >= 0
    }

    /// d_1 = tσ, σ(ε_0) = μ in barred coordinates.
    pub fn d1_rule(&self) -> DifferentialRule {
        DifferentialRule::Derivation {
            page: 1,
            images: self.ka.d1_images(),
            stem_shift: -1,
        }
    }

    /// Fold by t^{p^{n+1}}, the periodicity of the Tate pages.
    pub fn tate_fold(&self) -> Result<FoldSpec> {
        FoldSpec::new(&self.ka.alg, self.ka.mono(0, false, 0, false, self.ka.big_p))
    }
}

impl E1Source for ThhSource {
    fn algebra(&self) -> &Arc<MonomialAlgebra> {
        &self.ka.alg
    }

    fn basis(&self, (s, w, k): Tri) -> Result<Vec<Element>> {
        if !self.k_allowed(k) {
            return Ok(Vec::new());
        }
        let period = 2 * self.ka.big_p;
        let mut out = Vec::new();
        for (x, sb, wb) in &self.block {
            let d = s + 2 * k - sb;
            if *wb != w || d.rem_euclid(period) != 0 {
                continue;
            }
            let m = d / period;
            if !self.m_allowed(m) {
                continue;
            }
            let shift = self.ka.el(self.ka.mono(self.ka.big_p * m, false, 0, false, k));
            out.push(x.multiply(&shift)?);
        }
        Ok(out)
    }

    fn support(&self, window: &Window) -> Result<Vec<Tri>> {
        let (klo, khi) = window
            .aux
            .ok_or_else(|| Error::Unbounded("t-Bockstein windows need a filtration range".into()))?;
        let period = 2 * self.ka.big_p;
        let mut tris = BTreeSet::new();
        for k in klo..=khi {
            if !self.k_allowed(k) {
                continue;
            }
            for (_, sb, wb) in &self.block {
                if *wb < window.weights.0 || *wb > window.weights.1 {
                    continue;
                }
                let lo = (window.stems.0 + 2 * k - sb).div_euclid(period) - 1;
                let hi = (window.stems.1 + 2 * k - sb).div_euclid(period) + 1;
                for m in lo..=hi {
                    let s = sb + period * m - 2 * k;
                    if self.m_allowed(m) && s >= window.stems.0 && s <= window.stems.1 {
                        tris.insert((s, *wb, k));
                    }
                }
            }
        }
        Ok(tris.into_iter().collect())
    }
}

/// ε̄_S λ^e t^k in the t-Bockstein algebra.
pub fn named_class(ka: &KnAlgebra, s: &Subset, lambda: bool, k: i64) -> Element {
    ka.el(ka.mono(0, false, s.bits, lambda, k))
}

fn class_stem(ka: &KnAlgebra, s: &Subset, lambda: bool, k: i64) -> i64 {
    s.stem(ka.p) + if lambda { 2 * ka.big_p - 1 } else { 0 } - 2 * k
}

fn class_weight(ka: &KnAlgebra, s: &Subset, lambda: bool) -> i64 {
    -(s.len() as i64) + if lambda { ka.lambda_weight } else { 0 }
}

/// K_n^t = (L ⊕ {xμ, x z_{n+1}}) ⊗ Λ(λ_{n+1}) ⊗ F_p[μ^{±p^{n+1}}], λ in weight 1.
pub fn hodge_tate_knt(p: u32, n: usize, window: &Window) -> Result<ClassTable> {
    let ka = KnAlgebra::new(p, n, 1)?;
    Ok(ClassTable::from_entries(
        kn_elements(&ka, window.stems, true)?
            .into_iter()
            .filter(|k| window.contains((k.item.stem, k.item.weight, 0)))
            .map(|k| ClassEntry::new(k.item.label, k.item.stem, k.item.weight).nygaard(0))
            .collect(),
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeTateCheck {
    pub tridegrees: usize,
    /// Total dimension of E_2 on the 0-line, and of K_n^t, over the window.
    pub zero_line: usize,
    pub knt: usize,
    /// Tridegrees with k ≥ 1 where E_2 is nonzero (empty when the run collapses).
    pub off_zero_line: Vec<Tri>,
}

impl HodgeTateCheck {
    pub fn collapses(&self) -> bool {
        self.off_zero_line.is_empty() && self.zero_line == self.knt
    }
}

/// Run the Hodge–Tate t-Bockstein sequence to E_2 over `window` (filtrations
/// 0..=max_k) and compare its 0-line with K_n^t as subspaces.
pub fn verify_hodge_tate(p: u32, n: usize, window: &Window, max_k: i64) -> Result<HodgeTateCheck> {
    let src = ThhSource::new(p, n, PageKind::HodgeTate)?;
    let rule = src.d1_rule();
    let ka = src.ka.clone();
    let ss = SpectralSequence::new(src, ShiftLaw::t_bockstein(), None, vec![rule], 1)?;
    let knt = kn_elements(&ka, window.stems, true)?;
    let mut by_bideg: BTreeMap<(i64, i64), Vec<Element>> = BTreeMap::new();
    for k in knt {
        if window.contains((k.item.stem, k.item.weight, 0)) {
            by_bideg.entry((k.item.stem, k.item.weight)).or_default().push(k.item.element);
        }
    }
    let w = Window { aux: Some((0, max_k)), ..*window };
    let mut check = HodgeTateCheck {
        tridegrees: 0,
        zero_line: 0,
        knt: by_bideg.values().map(|v| v.len()).sum(),
        off_zero_line: Vec::new(),
    };
    for tri in ss.source().support(&w)? {
        check.tridegrees += 1;
        let dim = ss.dimension(2, tri)?;
        if tri.2 == 0 {
            let xs = by_bideg.get(&(tri.0, tri.1)).cloned().unwrap_or_default();
            let rank = ss.class_rank(2, &xs)?;
            if rank != xs.len() || rank != dim {
                return Err(Error::Mismatch(format!(
                    "0-line at ({}, {}): E_2 has dimension {dim}, K_n^t spans {rank} of {}",
                    tri.0,
                    tri.1,
                    xs.len()
                )));
            }
            check.zero_line += dim;
        } else if dim > 0 {
            check.off_zero_line.push(tri);
        }
    }
    Ok(check)
}

#[derive(Debug, Clone)]
pub struct TpPages {
    pub e1: ClassTable,
    pub e2: ClassTable,
}

/// E_1 and E_2 of the periodic t-Bockstein sequence over `window`, with E_2
/// checked against Λ(ε̄_1, ..., ε̄_n, λ_{n+1})[t^{±1}].
pub fn tp_pages(p: u32, n: usize, window: &Window) -> Result<TpPages> {
    let src = ThhSource::new(p, n, PageKind::Periodic)?;
    let ka = src.ka.clone();
    let fold = src.tate_fold()?;
    let rule = src.d1_rule();
    let ss = SpectralSequence::new(src, ShiftLaw::t_bockstein(), Some(fold), vec![rule], 1)?;
    let expected = tate_e2_named(&ka, window);
    check_named_page(&ss, 2, window, &expected)?;
    Ok(TpPages {
        e1: ss.page_table(1, window)?,
        e2: named_table(&expected),
    })
}

/// E_2 of the negative t-Bockstein sequence: Λ(ε̄, λ)[t]{t} in positive
/// filtration and K_n on the 0-line, checked against the engine.
pub fn tcminus_e2(p: u32, n: usize, window: &Window) -> Result<ClassTable> {
    let src = ThhSource::new(p, n, PageKind::Negative)?;
    let ka = src.ka.clone();
    let rule = src.d1_rule();
    let ss = SpectralSequence::new(src, ShiftLaw::t_bockstein(), None, vec![rule], 1)?;
    let mut expected: BTreeMap<Tri, Vec<(String, Element)>> = tate_e2_named(&ka, window)
        .into_iter()
        .map(|(t, v)| (t, v.into_iter().filter(|(_, x)| x.tri().unwrap().2 >= 1).collect::<Vec<_>>()))
        .filter(|(_, v)| !v.is_empty())
        .collect();
    for k in kn_elements(&ka, window.stems, false)? {
        let tri = (k.item.stem, k.item.weight, 0);
        if window.contains(tri) {
            expected.entry(tri).or_default().push((k.item.label, k.item.element));
        }
    }
    check_named_page(&ss, 2, window, &expected)?;
    Ok(named_table(&expected))
}

fn tate_e2_named(ka: &KnAlgebra, window: &Window) -> BTreeMap<Tri, Vec<(String, Element)>> {
    let mut out: BTreeMap<Tri, Vec<(String, Element)>> = BTreeMap::new();
    let (klo, khi) = window.aux.unwrap_or((0, 0));
    for s in Subset::all(ka.n) {
        for lambda in [false, true] {
            for k in klo..=khi {
                let tri = (class_stem(ka, &s, lambda, k), class_weight(ka, &s, lambda), k);
                if window.contains(tri) {
                    let x = named_class(ka, &s, lambda, k);
                    out.entry(tri).or_default().push((ka.alg.label(x.leading().unwrap()), x));
                }
            }
        }
    }
    out
}

fn named_table(named: &BTreeMap<Tri, Vec<(String, Element)>>) -> ClassTable {
    ClassTable::from_entries(
        named
            .iter()
            .flat_map(|(t, v)| v.iter().map(|(l, _)| ClassEntry::new(l.clone(), t.0, t.1).nygaard(t.2)))
            .collect(),
    )
}

/// Every tridegree of the window has exactly the named classes as a basis of E_r.
fn check_named_page<S: E1Source>(
    ss: &SpectralSequence<S>,
    page: u32,
    window: &Window,
    named: &BTreeMap<Tri, Vec<(String, Element)>>,
) -> Result<()> {
    for tri in ss.source().support(window)? {
        let dim = ss.dimension(page, tri)?;
        let xs: Vec<Element> = named.get(&tri).map(|v| v.iter().map(|(_, x)| x.clone()).collect()).unwrap_or_default();
        let rank = if xs.is_empty() { 0 } else { ss.class_rank(page, &xs)? };
        if dim != xs.len() || rank != xs.len() {
            let labels: Vec<&str> = named.get(&tri).map(|v| v.iter().map(|(l, _)| l.as_str()).collect()).unwrap_or_default();
            return Err(Error::Mismatch(format!(
                "E_{page} at {tri:?}: dimension {dim}, expected {labels:?} (rank {rank})"
            )));
        }
    }
    for tri in named.keys() {
        if ss.dimension(page, *tri)? != named[tri].len() {
            return Err(Error::Mismatch(format!("E_{page} at {tri:?} is missing named classes")));
        }
    }
    Ok(())
}

/// A leading term ε̄_S λ^e μ^j of K_n^t in the Nygaard order (μ-exponent
/// descending), naming the prismatic class ε̄_S λ^e t^{-j}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeadingTerm {
    pub subset: Subset,
    pub lambda: bool,
    pub mu: i64,
    pub stem: i64,
    pub weight: i64,
    /// Label of the K_n^t basis element the row came from.
    pub source_label: String,
}

/// Column order for the Nygaard filtration: higher μ-exponent first.
fn nygaard_order(coords: &mut [Monomial]) {
    coords.sort_by(|a, b| b.0[KnAlgebra::MU].cmp(&a.0[KnAlgebra::MU]).then(a.cmp(b)));
}

/// Row-reduce the K_n^t elements of one bidegree in the Nygaard column order.
/// Returns the coordinates and the reduced rows with their pivot monomials.
fn adapted_basis(field: Fp, elements: &[Element]) -> Result<(Vec<Monomial>, Vec<(Monomial, Vec<u32>)>)> {
    let mut set = BTreeSet::new();
    for x in elements {
        set.extend(x.terms().keys().cloned());
    }
    let mut coords: Vec<Monomial> = set.into_iter().collect();
    nygaard_order(&mut coords);
    let index: BTreeMap<Monomial, usize> = coords.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let rows = elements.iter().map(|x| x.to_vector(&index)).collect::<Result<Vec<_>>>()?;
    let space = Subspace::span(field, coords.len(), rows)?;
    if space.dim() != elements.len() {
        return Err(Error::Mismatch("K_n^t basis elements are dependent".into()));
    }
    let out = space
        .basis()
        .iter()
        .zip(space.pivots())
        .map(|(v, &pc)| (coords[pc].clone(), v.clone()))
        .collect();
    Ok((coords, out))
}

/// Nygaard leading terms of K_n^t over one period of stems [0, 2p^{n+1}).
pub fn knt_leading_terms(p: u32, n: usize) -> Result<Vec<LeadingTerm>> {
    let ka = KnAlgebra::new(p, n, 1)?;
    let mut groups: BTreeMap<(i64, i64), Vec<(String, Element)>> = BTreeMap::new();
    for k in kn_elements(&ka, (0, 2 * ka.big_p - 1), true)? {
        groups
            .entry((k.item.stem, k.item.weight))
            .or_default()
            .push((k.item.label, k.item.element));
    }
    let mut out = Vec::new();
    for ((stem, weight), items) in groups {
        let elements: Vec<Element> = items.iter().map(|(_, x)| x.clone()).collect();
        let (_, rows) = adapted_basis(ka.field, &elements)?;
        for (m, _) in rows {
            if m.0[KnAlgebra::E0] != 0 || m.0[ka.ebar_index(n + 1)] != 0 {
                return Err(Error::Mismatch(format!(
                    "leading term {} of K_n^t involves ε_0 or ε̄_{}",
                    ka.alg.label(&m),
                    n + 1
                )));
            }
            let bits: u32 = (1..=n).filter(|&s| m.0[ka.ebar_index(s)] == 1).map(|s| 1 << (s - 1)).sum();
            let source_label = items
                .iter()
                .find(|(_, x)| x.leading() == Some(&m) || x.coefficient(&m) != 0)
                .map(|(l, _)| l.clone())
                .unwrap_or_default();
            out.push(LeadingTerm {
                subset: Subset { bits, n },
                lambda: m.0[ka.lambda_index()] == 1,
                mu: m.0[KnAlgebra::MU] as i64,
                stem,
                weight,
                source_label,
            });
        }
    }
    Ok(out)
}

/// A_S = {-f(S) - j : 0 ≤ j < p^n}, the filtrations (mod p^{n+1}) of the
/// surviving prismatic classes ε̄_S t^k.
pub fn survivor_filtrations(p: u32, n: usize, s: &Subset) -> Vec<i64> {
    let pn = ipow(p, n as u32);
    (0..pn).map(|j| -f_of(p, s) - j).collect()
}

fn survives_mod(p: u32, n: usize, s: &Subset, k: i64) -> bool {
    let big_p = ipow(p, n as u32 + 1);
    survivor_filtrations(p, n, s).iter().any(|a| (a - k).rem_euclid(big_p) == 0)
}

/// (Λ(ε̄) ⊕ ...) ⊗ Λ(λ) ⊗ F_p[t^{±p^{n+1}}]: ε̄_S λ^e t^k with k ∈ A_S mod p^{n+1}.
pub fn prismatic_closed_form(p: u32, n: usize, window: &Window) -> Result<ClassTable> {
    let ka = KnAlgebra::new(p, n, 1)?;
    let named = prismatic_named(&ka, window);
    Ok(named_table(&named))
}

fn prismatic_named(ka: &KnAlgebra, window: &Window) -> BTreeMap<Tri, Vec<(String, Element)>> {
    tate_e2_named(ka, window)
        .into_iter()
        .map(|(t, v)| {
            let keep = v
                .into_iter()
                .filter(|(_, x)| {
                    let m = x.leading().unwrap();
                    let bits: u32 = (1..=ka.n).filter(|&s| m.0[ka.ebar_index(s)] == 1).map(|s| 1 << (s - 1)).sum();
                    survives_mod(ka.p, ka.n, &Subset { bits, n: ka.n }, t.2)
                })
                .collect::<Vec<_>>();
            (t, keep)
        })
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

/// Everything the forcing step needs, built from independent computations.
pub struct PrismaticSetup {
    pub ka: KnAlgebra,
    pub input: ForceInput,
}

/// Highest page on which a prismatic differential can occur: p^{n+1} + Σ_{s≤n} p^s.
pub fn prismatic_max_page(p: u32, n: usize) -> u32 {
    (ipow(p, n as u32 + 1) + (1..=n).map(|s| ipow(p, s as u32)).sum::<i64>()) as u32
}

/// Assemble the constraints: E_2 classes (checked on the engine), permanent
/// cycles from the Nygaard leading terms of K_n^t, non-boundaries from the
/// comparison with F_p, t^{p^n}-linearity below page p^{n+1}, optional
/// λ-linearity, and E_∞ counts from K_n^t.
pub fn prismatic_setup(p: u32, n: usize, lambda_linear: bool) -> Result<PrismaticSetup> {
    let src = ThhSource::new(p, n, PageKind::Periodic)?;
    let ka = src.ka.clone();
    let fold = src.tate_fold()?;
    let rule = src.d1_rule();
    let ss = SpectralSequence::new(src, ShiftLaw::t_bockstein(), Some(fold.clone()), vec![rule], 1)?;

    let fp_src = ThhSource::new(p, n, PageKind::FpComparison)?;
    let fp_rule = fp_src.d1_rule();
    let fp_fold = fp_src.tate_fold()?;
    let fp = SpectralSequence::new(fp_src, ShiftLaw::t_bockstein(), Some(fp_fold), vec![fp_rule], 1)?;

    let mut classes = Vec::new();
    let mut non_boundaries = BTreeSet::new();
    for s in Subset::all(n) {
        for lambda in [false, true] {
            for k in 0..ka.big_p {
                let x = named_class(&ka, &s, lambda, k);
                let label = ka.alg.label(x.leading().unwrap());
                let tri = x.tri().unwrap();
                if ss.dimension(2, tri)? != 1 || ss.status(2, &x)? != ClassStatus::Nonzero {
                    return Err(Error::Mismatch(format!("{label} is not the E_2 generator at {tri:?}")));
                }
                // The map to F_p sends λ to zero and is the identity on the rest.
                if !lambda && fp.status(2, &x)? == ClassStatus::Nonzero {
                    non_boundaries.insert(label.clone());
                }
                classes.push(StartClass { label, tri, element: x });
            }
        }
    }

    let mut permanent = PermanentCycleSet::new();
    let mut expected: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    for lt in knt_leading_terms(p, n)? {
        *expected.entry((lt.stem.rem_euclid(2 * ka.big_p), lt.weight)).or_default() += 1;
        if !lt.lambda {
            let k = (-lt.mu).rem_euclid(ka.big_p);
            let x = named_class(&ka, &lt.subset, false, k);
            permanent.insert(
                ka.alg.label(x.leading().unwrap()),
                format!("lift of the K_n^t leading term of {}", lt.source_label),
            );
        }
    }

    let rules = ModuleRules {
        translation: Some((ka.mono(0, false, 0, false, ka.pn), ka.big_p as u32)),
        lambda: lambda_linear.then(|| ka.mono(0, false, 0, true, 0)),
    };
    let input = ForceInput {
        classes,
        start_page: 2,
        max_page: prismatic_max_page(p, n),
        shift: ShiftLaw::t_bockstein(),
        fold: Some(fold),
        permanent,
        non_boundaries,
        rules,
        expected,
    };
    Ok(PrismaticSetup { ka, input })
}

pub fn prismatic_pattern(p: u32, n: usize, lambda_linear: bool) -> Result<ForcedPattern> {
    let setup = prismatic_setup(p, n, lambda_linear)?;
    force_differentials(&setup.input, &setup.ka.alg)
}

/// The label pair of d_{p^{n+1}}(t^{p^n}) = t^{p^{n+1}+p^n} λ_{n+1}.
pub fn expected_lambda_differential(p: u32, n: usize) -> Result<(u32, String, String)> {
    let ka = KnAlgebra::new(p, n, 1)?;
    let src = ka.alg.label(&ka.mono(0, false, 0, false, ka.pn));
    let tgt = ka.alg.label(&ka.mono(0, false, 0, true, ka.big_p + ka.pn));
    Ok((ka.big_p as u32, src, tgt))
}

#[derive(Debug, Clone)]
pub struct PrismaticResult {
    pub pattern: ForcedPattern,
    /// E_∞ over the window, labeled by the closed-form names after each was
    /// confirmed to be a nonzero class on the engine.
    pub table: ClassTable,
    pub tridegrees: usize,
}

/// Force the differentials, run them through the engine, and compare E_∞
/// with the closed form in every tridegree of `window`.
pub fn prismatic_einf(p: u32, n: usize, window: &Window) -> Result<PrismaticResult> {
    let pattern = prismatic_pattern(p, n, true)?;
    let ss = tate_engine(p, n, &pattern)?;
    let ka = ss.source().ka.clone();
    let named = prismatic_named(&ka, window);
    check_named_page(&ss, u32::MAX, window, &named)?;
    Ok(PrismaticResult {
        tridegrees: ss.source().support(window)?.len(),
        table: named_table(&named),
        pattern,
    })
}

/// The periodic sequence with d_1 and the forced differentials.
pub fn tate_engine(p: u32, n: usize, pattern: &ForcedPattern) -> Result<SpectralSequence<ThhSource>> {
    let src = ThhSource::new(p, n, PageKind::Periodic)?;
    let fold = src.tate_fold()?;
    let mut rules = vec![src.d1_rule()];
    rules.extend(pattern.rules.iter().cloned());
    SpectralSequence::new(src, ShiftLaw::t_bockstein(), Some(fold), rules, prismatic_max_page(p, n))
}


/// The four pieces of the Nygaard decomposition of TC^- E_∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NygaardPart {
    /// Exterior classes ε̄_S λ^e on the 0-line.
    A00,
    /// μ- and z-multiples (and μ^{p^{n+1}}-periodic copies) on the 0-line.
    A01,
    /// Positive filtration classes that also survive in TP.
    A10,
    /// Positive filtration λ-classes that are hit in TP from filtration ≤ 0.
    A11,
}

impl NygaardPart {
    pub const ALL: [NygaardPart; 4] = [NygaardPart::A00, NygaardPart::A01, NygaardPart::A10, NygaardPart::A11];

    pub fn name(self) -> &'static str {
        match self {
            NygaardPart::A00 => "A00",
            NygaardPart::A01 => "A01",
            NygaardPart::A10 => "A10",
            NygaardPart::A11 => "A11",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TcClass {
    pub label: String,
    pub tri: Tri,
    pub part: NygaardPart,
    pub element: Element,
    /// For positive filtration classes: the subset and λ-exponent.
    pub name: Option<(Subset, bool)>,
}

#[derive(Debug, Clone)]
pub struct TcMinusResult {
    pub classes: Vec<TcClass>,
    pub tridegrees: usize,
    pub e2_total: usize,
    pub einf_total: usize,
    pub differentials: usize,
}

impl TcMinusResult {
    pub fn table(&self, parts: &[NygaardPart]) -> ClassTable {
        ClassTable::from_entries(
            self.classes
                .iter()
                .filter(|c| parts.contains(&c.part))
                .map(|c| ClassEntry::new(c.label.clone(), c.tri.0, c.tri.1).nygaard(c.tri.2))
                .collect(),
        )
    }

    pub fn part(&self, part: NygaardPart) -> Vec<&TcClass> {
        self.classes.iter().filter(|c| c.part == part).collect()
    }
}

/// M̃_S = {λ ε̄_S t^d : -f(S) < d ≤ p^{n+1} - p^n - f(S)}.
pub fn m_tilde(p: u32, n: usize, s: &Subset) -> Vec<i64> {
    let big_p = ipow(p, n as u32 + 1);
    let pn = ipow(p, n as u32);
    let f = f_of(p, s);
    (-f + 1..=big_p - pn - f).collect()
}


/// TC^- E_∞ over stems `stems` and filtrations 0..=max_k, computed on the
/// engine with d_1 and the TP differentials restricted to positive
/// filtration sources, then matched class by class with the Nygaard parts.
pub fn tcminus_einf(p: u32, n: usize, stems: (i64, i64), max_k: i64) -> Result<TcMinusResult> {
    let pattern = prismatic_pattern(p, n, true)?;
    let src = ThhSource::new(p, n, PageKind::Negative)?;
    let ka = src.ka.clone();
    let fold = src.tate_fold()?;
    let mut rules = vec![src.d1_rule()];
    // Folded edge data: (page, source subset/λ, canonical source k, target subset/λ).
    let mut edge_sources: BTreeSet<Tri> = BTreeSet::new();
    let mut edge_targets: BTreeSet<Tri> = BTreeSet::new();
    // (target label without t, target k mod P) -> source k (canonical).
    let mut hit_from: BTreeMap<(Monomial, i64), (i64, u32)> = BTreeMap::new();
    for rule in &pattern.rules {
        let DifferentialRule::Explicit { page, source, target } = rule else {
            return Err(Error::Invalid("forced rules must be explicit".into()));
        };
        let k0 = source.tri().unwrap().2;
        let tgt_mono = target.leading().unwrap().clone();
        let mut strip = tgt_mono.clone();
        strip.0[ka.t_index()] = 0;
        hit_from.insert((strip, target.tri().unwrap().2.rem_euclid(ka.big_p)), (k0, *page));
        let mut m = 0;
        while k0 + m * ka.big_p <= max_k {
            if k0 + m * ka.big_p >= 1 {
                let s = fold.translate(source, m)?;
                let t = fold.translate(target, m)?;
                edge_sources.insert(s.tri().unwrap());
                edge_targets.insert(t.tri().unwrap());
                rules.push(DifferentialRule::Explicit { page: *page, source: s, target: t });
            }
            m += 1;
        }
    }
    let ss = SpectralSequence::new(src, ShiftLaw::t_bockstein(), None, rules, prismatic_max_page(p, n))?;

    let mut classes = Vec::new();
    for k in kn_elements(&ka, stems, false)? {
        let part = if k.kind == KnKind::Exterior && k.period == 0 { NygaardPart::A00 } else { NygaardPart::A01 };
        classes.push(TcClass {
            label: k.item.label,
            tri: (k.item.stem, k.item.weight, 0),
            part,
            element: k.item.element,
            name: None,
        });
    }
    for s in Subset::all(n) {
        for lambda in [false, true] {
            for k in 1..=max_k {
                let stem = class_stem(&ka, &s, lambda, k);
                if stem < stems.0 || stem > stems.1 {
                    continue;
                }
                let part = if survives_mod(p, n, &s, k) {
                    Some(NygaardPart::A10)
                } else if lambda {
                    let strip = ka.mono(0, false, s.bits, true, 0);
                    let (k0, page) = *hit_from
                        .get(&(strip, k.rem_euclid(ka.big_p)))
                        .ok_or_else(|| Error::Mismatch(format!("λ-class at filtration {k} is neither survivor nor target")))?;
                    let src_k = k - page as i64;
                    debug_assert_eq!((src_k - k0).rem_euclid(ka.big_p), 0);
                    (src_k <= 0).then_some(NygaardPart::A11)
                } else {
                    None
                };
                if let Some(part) = part {
                    let x = named_class(&ka, &s, lambda, k);
                    classes.push(TcClass {
                        label: ka.alg.label(x.leading().unwrap()),
                        tri: x.tri().unwrap(),
                        part,
                        element: x,
                        name: Some((s.clone(), lambda)),
                    });
                }
            }
        }
    }
    let mut named: BTreeMap<Tri, Vec<(String, Element)>> = BTreeMap::new();
    for c in &classes {
        named.entry(c.tri).or_default().push((c.label.clone(), c.element.clone()));
    }
    let window = Window { stems, weights: (-(n as i64) - 1, 2), aux: Some((0, max_k)) };
    check_named_page(&ss, u32::MAX, &window, &named)?;

    let mut result = TcMinusResult { classes, tridegrees: 0, e2_total: 0, einf_total: 0, differentials: 0 };
    for tri in ss.source().support(&window)? {
        result.tridegrees += 1;
        let e2 = ss.dimension(2, tri)?;
        let einf = named.get(&tri).map_or(0, |v| v.len());
        let moving = usize::from(edge_sources.contains(&tri)) + usize::from(edge_targets.contains(&tri));
        if e2 != einf + moving {
            return Err(Error::Mismatch(format!(
                "at {tri:?}: E_2 = {e2}, E_∞ = {einf}, {moving} differential ends"
            )));
        }
        result.e2_total += e2;
        result.einf_total += einf;
        result.differentials += usize::from(edge_sources.contains(&tri));
    }
    Ok(result)
}

#[derive(Debug, Clone)]
pub struct NygaardDecomposition {
    pub a00: ClassTable,
    pub a01: ClassTable,
    pub a10: ClassTable,
    pub a11: ClassTable,
    /// One line per part saying where its classes came from.
    pub provenance: BTreeMap<NygaardPart, String>,
    pub tcminus: TcMinusResult,
}

impl NygaardDecomposition {
    pub fn get(&self, part: NygaardPart) -> &ClassTable {
        match part {
            NygaardPart::A00 => &self.a00,
            NygaardPart::A01 => &self.a01,
            NygaardPart::A10 => &self.a10,
            NygaardPart::A11 => &self.a11,
        }
    }
}

/// Split TC^- E_∞ into its four Nygaard pieces and check A00 and A11 against
/// their closed forms: A00 = Λ(ε̄_1, ..., ε̄_n) ⊗ Λ(λ_{n+1}) and A11 = ⊕_S M̃_S.
pub fn nygaard_decompose(p: u32, n: usize, stems: (i64, i64), max_k: i64) -> Result<NygaardDecomposition> {
    let tc = tcminus_einf(p, n, stems, max_k)?;
    let ka = KnAlgebra::new(p, n, 1)?;
    let mut a00_expected = Vec::new();
    let mut a11_expected = Vec::new();
    for s in Subset::all(n) {
        for lambda in [false, true] {
            let x = named_class(&ka, &s, lambda, 0);
            let stem = class_stem(&ka, &s, lambda, 0);
            if stem >= stems.0 && stem <= stems.1 {
                a00_expected.push(ClassEntry::new(ka.alg.label(x.leading().unwrap()), stem, class_weight(&ka, &s, lambda)).nygaard(0));
            }
        }
        for d in m_tilde(p, n, &s) {
            let stem = class_stem(&ka, &s, true, d);
            if d <= max_k && stem >= stems.0 && stem <= stems.1 {
                let x = named_class(&ka, &s, true, d);
                a11_expected.push(ClassEntry::new(ka.alg.label(x.leading().unwrap()), stem, class_weight(&ka, &s, true)).nygaard(d));
            }
        }
    }
    let a00 = tc.table(&[NygaardPart::A00]);
    let a11 = tc.table(&[NygaardPart::A11]);
    if a00 != ClassTable::from_entries(a00_expected) {
        return Err(Error::Mismatch("A00 differs from Λ(ε̄_1, ..., ε̄_n) ⊗ Λ(λ_{n+1})".into()));
    }
    if a11 != ClassTable::from_entries(a11_expected) {
        return Err(Error::Mismatch("A11 differs from the sum of the M̃_S".into()));
    }
    let provenance = BTreeMap::from([
        (NygaardPart::A00, "0-line of TC^-: the exterior part of K_n".to_string()),
        (NygaardPart::A01, "0-line of TC^-: μ- and z-multiples in K_n".to_string()),
        (NygaardPart::A10, "positive filtration, surviving in TP".to_string()),
        (NygaardPart::A11, "positive filtration, hit in TP from filtration ≤ 0".to_string()),
    ]);
    Ok(NygaardDecomposition {
        a00,
        a01: tc.table(&[NygaardPart::A01]),
        a10: tc.table(&[NygaardPart::A10]),
        a11,
        provenance,
        tcminus: tc,
    })
}

/// Stems that contain every class of syntomic cohomology, with margin.
pub fn syntomic_stems(p: u32, n: usize) -> (i64, i64) {
    let ka_top: i64 = (1..=n).map(|s| 2 * ipow(p, s as u32) - 1).sum::<i64>() + 2 * ipow(p, n as u32 + 1) - 1;
    (-3, ka_top + 2)
}

/// Filtration bound for TC^- that covers `stems`.
pub fn syntomic_max_k(p: u32, n: usize, stems: (i64, i64)) -> i64 {
    let top: i64 = (1..=n).map(|s| 2 * ipow(p, s as u32) - 1).sum::<i64>() + 2 * ipow(p, n as u32 + 1) - 1;
    (top - stems.0) / 2 + 1
}

#[derive(Debug, Clone)]
pub struct SyntomicClass {
    pub entry: ClassEntry,
    pub part: Option<NygaardPart>,
    /// Kernel classes carry their domain element; cokernel classes their V vector.
    pub element: Element,
    pub in_kernel: bool,
}

#[derive(Debug, Clone)]
pub struct SyntomicResult {
    pub p: u32,
    pub n: usize,
    pub classes: Vec<SyntomicClass>,
}

impl SyntomicResult {
    pub fn table(&self) -> ClassTable {
        ClassTable::from_entries(self.classes.iter().map(|c| c.entry.clone()).collect())
    }

    pub fn kernel(&self) -> impl Iterator<Item = &SyntomicClass> {
        self.classes.iter().filter(|c| c.in_kernel)
    }

    pub fn cokernel(&self) -> impl Iterator<Item = &SyntomicClass> {
        self.classes.iter().filter(|c| !c.in_kernel)
    }
}

/// The map can − φ in one bidegree (stem, weight), from TC^- E_∞ to
/// V = K_n^t in the same bidegree.
#[derive(Debug, Clone)]
pub struct CanPhiBlock {
    pub field: Fp,
    pub stem: i64,
    pub weight: i64,
    /// Coordinates of V, higher μ-exponent first.
    pub coords: Vec<Monomial>,
    /// Adapted K_n^t basis: pivot monomial and reduced row.
    pub adapted: Vec<(Monomial, Vec<u32>)>,
    /// Domain classes in the order A00, A11, A01, A10.
    pub domain: Vec<TcClass>,
    pub can: Vec<Vec<u32>>,
    pub phi: Vec<Vec<u32>>,
}

impl CanPhiBlock {
    pub fn adapted_space(&self) -> Result<Subspace> {
        Subspace::span(self.field, self.coords.len(), self.adapted.iter().map(|(_, v)| v.clone()).collect())
    }

    /// Columns are domain classes; rows are coordinates of V.
    pub fn matrix(&self) -> Result<FpMatrix> {
        let field = self.field;
        let cols: Vec<Vec<u32>> = self
            .can
            .iter()
            .zip(&self.phi)
            .map(|(c, f)| c.iter().zip(f).map(|(&a, &b)| field.sub(a, b)).collect())
            .collect();
        FpMatrix::from_columns(field, self.coords.len(), &cols)
    }
}

fn part_rank(part: NygaardPart) -> u8 {
    match part {
        NygaardPart::A00 => 0,
        NygaardPart::A11 => 1,
        NygaardPart::A01 => 2,
        NygaardPart::A10 => 3,
    }
}

fn can_phi_block(ka: &KnAlgebra, (stem, weight): (i64, i64), v_elements: &[Element], mut domain: Vec<TcClass>) -> Result<CanPhiBlock> {
    domain.sort_by_key(|c| part_rank(c.part));
    let (coords, adapted) = if v_elements.is_empty() {
        (Vec::new(), Vec::new())
    } else {
        adapted_basis(ka.field, v_elements)?
    };
    let index: BTreeMap<Monomial, usize> = coords.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let zero = vec![0u32; coords.len()];
    let mut can = Vec::new();
    let mut phi = Vec::new();
    for c in &domain {
        let (cv, fv) = match c.part {
            NygaardPart::A00 => {
                let v = c.element.to_vector(&index)?;
                (v.clone(), v)
            }
            NygaardPart::A01 => (zero.clone(), c.element.to_vector(&index)?),
            NygaardPart::A10 => {
                let (s, lambda) = c.name.as_ref().expect("positive filtration classes are named");
                let pivot = ka.mono(-c.tri.2, false, s.bits, *lambda, 0);
                let row = adapted
                    .iter()
                    .find(|(m, _)| *m == pivot)
                    .ok_or_else(|| Error::Mismatch(format!("no K_n^t leading term {} for {}", ka.alg.label(&pivot), c.label)))?;
                (row.1.clone(), zero.clone())
            }
            NygaardPart::A11 => (zero.clone(), zero.clone()),
        };
        can.push(cv);
        phi.push(fv);
    }
    Ok(CanPhiBlock { field: ka.field, stem, weight, coords, adapted, domain, can, phi })
}

/// Build every nonzero block of can − φ over the stems that carry syntomic
/// cohomology.
pub fn can_phi_blocks(p: u32, n: usize) -> Result<Vec<CanPhiBlock>> {
    let stems = syntomic_stems(p, n);
    let tc = tcminus_einf(p, n, stems, syntomic_max_k(p, n, stems))?;
    let ka = KnAlgebra::new(p, n, 1)?;
    let mut v: BTreeMap<(i64, i64), Vec<Element>> = BTreeMap::new();
    for k in kn_elements(&ka, stems, true)? {
        v.entry((k.item.stem, k.item.weight)).or_default().push(k.item.element);
    }
    let mut dom: BTreeMap<(i64, i64), Vec<TcClass>> = BTreeMap::new();
    for c in tc.classes {
        dom.entry((c.tri.0, c.tri.1)).or_default().push(c);
    }
    let keys: BTreeSet<(i64, i64)> = v.keys().chain(dom.keys()).cloned().collect();
    keys.into_iter()
        .map(|key| {
            can_phi_block(
                &ka,
                key,
                v.get(&key).map_or(&[][..], |x| &x[..]),
                dom.remove(&key).unwrap_or_default(),
            )
        })
        .collect()
}

fn coker_label(ka: &KnAlgebra, pivot: &Monomial) -> String {
    let bits: u32 = (1..=ka.n).filter(|&s| pivot.0[ka.ebar_index(s)] == 1).map(|s| 1 << (s - 1)).sum();
    let lambda = pivot.0[ka.lambda_index()] == 1;
    let mono = ka.mono(0, false, bits, lambda, -(pivot.0[KnAlgebra::MU] as i64));
    if mono == ka.alg.unit() {
        "∂".to_string()
    } else {
        format!("∂{}", ka.alg.label(&mono))
    }
}

/// Syntomic cohomology of k(n) modulo (p, v_1, ..., v_{n+1}) as ker ⊕ ∂ coker of can − φ.
pub fn can_phi_assemble(p: u32, n: usize) -> Result<SyntomicResult> {
    let ka = KnAlgebra::new(p, n, 1)?;
    let mut classes = Vec::new();
    for block in can_phi_blocks(p, n)? {
        let m = block.matrix()?;
        let ker = m.kernel();
        for (v, &pc) in ker.basis().iter().zip(ker.pivots()) {
            let c = &block.domain[pc];
            let mut element = Element::zero(&ka.alg);
            for (i, &a) in v.iter().enumerate() {
                if a != 0 {
                    element = element.add(&block.domain[i].element.scale(a))?;
                }
            }
            classes.push(SyntomicClass {
                entry: ClassEntry::new(c.label.clone(), block.stem, block.weight).nygaard(c.tri.2),
                part: Some(c.part),
                element,
                in_kernel: true,
            });
        }
        if block.coords.is_empty() {
            continue;
        }
        let coker = quotient_basis(&block.adapted_space()?, &m.image())?;
        for (v, &pc) in coker.basis().iter().zip(coker.pivots()) {
            let element = Element::from_vector(&ka.alg, &block.coords, v);
            classes.push(SyntomicClass {
                entry: ClassEntry::new(coker_label(&ka, &block.coords[pc]), block.stem - 1, block.weight + 1),
                part: None,
                element,
                in_kernel: false,
            });
        }
    }
    Ok(SyntomicResult { p, n, classes })
}

/// Closed form Λ(∂, ε̄_1, ..., ε̄_n) ⊗ Λ(λ_{n+1}) ⊕ ⊕_S M̃_S, with ∂ in
/// bidegree (-1, 1). Total 2^{n+2} + 2^n (p^{n+1} - p^n).
pub fn syntomic_closed_form(p: u32, n: usize) -> Result<ClassTable> {
    let ka = KnAlgebra::new(p, n, 1)?;
    let mut entries = Vec::new();
    for s in Subset::all(n) {
        for lambda in [false, true] {
            let x = named_class(&ka, &s, lambda, 0);
            let label = ka.alg.label(x.leading().unwrap());
            let (stem, weight) = (class_stem(&ka, &s, lambda, 0), class_weight(&ka, &s, lambda));
            let del = if x.leading() == Some(&ka.alg.unit()) { "∂".to_string() } else { format!("∂{label}") };
            entries.push(ClassEntry::new(del, stem - 1, weight + 1));
            entries.push(ClassEntry::new(label, stem, weight));
        }
        for d in m_tilde(p, n, &s) {
            let x = named_class(&ka, &s, true, d);
            entries.push(ClassEntry::new(ka.alg.label(x.leading().unwrap()), class_stem(&ka, &s, true, d), class_weight(&ka, &s, true)));
        }
    }
    Ok(ClassTable::from_entries(entries))
}

pub fn syntomic_closed_form_total(p: u32, n: usize) -> usize {
    let big_p = ipow(p, n as u32 + 1);
    let pn = ipow(p, n as u32);
    (1usize << (n + 2)) + (1usize << n) * (big_p - pn) as usize
}

/// F_{p^m} presented as F_p[x]/(f) for the smallest monic irreducible f of
/// degree m (coefficients compared lexicographically from the constant term
/// upward), with the matrix of Frobenius a ↦ a^p in the basis 1, x, ..., x^{m-1}.
#[derive(Debug, Clone)]
pub struct FrobeniusField {
    pub field: Fp,
    pub m: usize,
    /// Low-to-high coefficients of f, leading 1 included.
    pub modulus: Vec<u32>,
    pub frobenius: FpMatrix,
}

fn poly_mulmod(field: Fp, a: &[u32], b: &[u32], f: &[u32]) -> Vec<u32> {
    let m = f.len() - 1;
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = field.add(prod[i + j], field.mul(x, y));
        }
    }
    for d in (m..prod.len()).rev() {
        let c = prod[d];
        if c != 0 {
            for (i, &fi) in f.iter().enumerate() {
                prod[d - m + i] = field.sub(prod[d - m + i], field.mul(c, fi));
            }
        }
    }
    prod.truncate(m);
    prod.resize(m, 0);
    prod
}

/// Berlekamp's criterion: f is irreducible iff it is squarefree and the
/// Frobenius fixed points of F_p[x]/(f) are just F_p.
fn is_irreducible(field: Fp, f: &[u32]) -> bool {
    let m = f.len() - 1;
    if m == 1 {
        return true;
    }
    let frob = frobenius_matrix(field, f);
    let fixed = frob.sub(&FpMatrix::identity(field, m)).expect("square").kernel().dim();
    if fixed != 1 {
        return false;
    }
    // Squarefree: gcd(f, f') = 1.
    let deriv: Vec<u32> = f.iter().enumerate().skip(1).map(|(i, &c)| field.mul(field.reduce(i as i64), c)).collect();
    poly_gcd_degree(field, f.to_vec(), deriv) == 0
}

fn poly_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_gcd_degree(field: Fp, a: Vec<u32>, b: Vec<u32>) -> usize {
    let (mut a, mut b) = (poly_trim(a), poly_trim(b));
    while !b.is_empty() {
        let inv = field.inv(*b.last().unwrap());
        while a.len() >= b.len() {
            let c = field.mul(*a.last().unwrap(), inv);
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                a[shift + i] = field.sub(a[shift + i], field.mul(c, bi));
            }
            a = poly_trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

fn frobenius_matrix(field: Fp, f: &[u32]) -> FpMatrix {
    let m = f.len() - 1;
    if m == 1 {
        return FpMatrix::identity(field, 1);
    }
    let p = field.p() as usize;
    let mut x = vec![0u32; m];
    x[1] = 1;
    // x^p, then columns (x^p)^i.
    let mut xp = vec![0u32; m];
    xp[0] = 1;
    for _ in 0..p {
        xp = poly_mulmod(field, &xp, &x, f);
    }
    let mut col = vec![0u32; m];
    col[0] = 1;
    let mut cols = Vec::with_capacity(m);
    for _ in 0..m {
        cols.push(col.clone());
        col = poly_mulmod(field, &col, &xp, f);
    }
    FpMatrix::from_columns(field, m, &cols).expect("square")
}

impl FrobeniusField {
    pub fn new(p: u32, m: usize) -> Result<Self> {
        let field = Fp::new(p)?;
        if m == 0 {
            return Err(Error::Invalid("field degree must be positive".into()));
        }
        let count = (p as u64).checked_pow(m as u32).filter(|&c| c <= 1 << 24).ok_or_else(|| {
            Error::Invalid(format!("F_{{{p}^{m}}} is too large to search for a modulus"))
        })?;
        for code in 0..count {
            let mut f = Vec::with_capacity(m + 1);
            let mut c = code;
            for _ in 0..m {
                f.push((c % p as u64) as u32);
                c /= p as u64;
            }
            f.push(1);
            if is_irreducible(field, &f) {
                let frobenius = frobenius_matrix(field, &f);
                return Ok(FrobeniusField { field, m, modulus: f, frobenius });
            }
        }
        Err(Error::Invalid(format!("no irreducible polynomial of degree {m} over F_{p}")))
    }

    /// Dimensions over F_p of ker(1 - F) and coker(1 - F) on F_{p^m}.
    pub fn fixed_dims(&self) -> (usize, usize) {
        let one_minus = FpMatrix::identity(self.field, self.m).sub(&self.frobenius).expect("square");
        let rank = one_minus.rank();
        (self.m - rank, self.m - rank)
    }
}

/// Syntomic cohomology with coefficients in F_{p^m}: can is k-linear, φ is
/// Frobenius-semilinear, so each entry c of can and f of φ becomes the
/// m × m block c·1 - f·F over F_p.
pub fn syntomic_over_field(p: u32, n: usize, m: usize) -> Result<SyntomicResult> {
    let kf = FrobeniusField::new(p, m)?;
    let ka = KnAlgebra::new(p, n, 1)?;
    let field = ka.field;
    let ident = FpMatrix::identity(field, m);
    let mut classes = Vec::new();
    for block in can_phi_blocks(p, n)? {
        let rows = block.coords.len() * m;
        let cols = block.domain.len() * m;
        let mut big = FpMatrix::zero(field, rows, cols);
        for (j, (cv, fv)) in block.can.iter().zip(&block.phi).enumerate() {
            for i in 0..block.coords.len() {
                for a in 0..m {
                    for b in 0..m {
                        let v = field.sub(field.mul(cv[i], ident.get(a, b)), field.mul(fv[i], kf.frobenius.get(a, b)));
                        big.set(i * m + a, j * m + b, v);
                    }
                }
            }
        }
        let ker = big.kernel();
        let mut per_class: BTreeMap<usize, usize> = BTreeMap::new();
        for &pc in ker.pivots() {
            *per_class.entry(pc / m).or_default() += 1;
        }
        for (c, count) in per_class {
            let d = &block.domain[c];
            let entry = ClassEntry::new(d.label.clone(), block.stem, block.weight).nygaard(d.tri.2);
            let tags: Vec<Coeff> = if m > 1 && count == m { vec![Coeff::K] } else { vec![Coeff::Fp; count] };
            for tag in tags {
                classes.push(SyntomicClass {
                    entry: entry.clone().coeff(tag),
                    part: Some(d.part),
                    element: d.element.clone(),
                    in_kernel: true,
                });
            }
        }
        if rows == 0 {
            continue;
        }
        // V ⊗ k inside F_p^{coords × m}.
        let mut vk = Vec::new();
        for (_, row) in &block.adapted {
            for a in 0..m {
                let mut v = vec![0u32; rows];
                for (i, &x) in row.iter().enumerate() {
                    v[i * m + a] = x;
                }
                vk.push(v);
            }
        }
        let vk = Subspace::span(field, rows, vk)?;
        let coker = quotient_basis(&vk, &big.image())?;
        let mut per_coord: BTreeMap<usize, usize> = BTreeMap::new();
        for &pc in coker.pivots() {
            *per_coord.entry(pc / m).or_default() += 1;
        }
        for (i, count) in per_coord {
            let label = coker_label(&ka, &block.coords[i]);
            let tag = if m == 1 { Coeff::Fp } else { Coeff::KFr };
            for _ in 0..count {
                classes.push(SyntomicClass {
                    entry: ClassEntry::new(label.clone(), block.stem - 1, block.weight + 1).coeff(tag),
                    part: None,
                    element: Element::monomial(&ka.alg, block.coords[i].clone()),
                    in_kernel: false,
                });
            }
        }
    }
    Ok(SyntomicResult { p, n, classes })
}

/// Over an algebraically closed field 1 - F is onto with kernel F_p, so the
/// exterior kernel classes stay F_p, the A11 classes become k, and every
/// cokernel class (each the ∂ of an exterior class) disappears.
pub fn syntomic_closed(p: u32, n: usize) -> Result<SyntomicResult> {
    let base = can_phi_assemble(p, n)?;
    let ka = KnAlgebra::new(p, n, 1)?;
    let exterior: BTreeSet<String> = base
        .kernel()
        .filter(|c| c.part == Some(NygaardPart::A00))
        .map(|c| format!("∂{}", c.entry.label))
        .collect();
    let mut classes = Vec::new();
    for c in base.classes {
        match c.part {
            Some(NygaardPart::A00) => classes.push(SyntomicClass { entry: c.entry.coeff(Coeff::Fp), ..c }),
            Some(NygaardPart::A11) => classes.push(SyntomicClass { entry: c.entry.coeff(Coeff::K), ..c }),
            Some(part) => {
                return Err(Error::Mismatch(format!("unexpected {} class {} in the kernel", part.name(), c.entry.label)))
            }
            None => {
                let unit = c.entry.label == "∂" && exterior.contains(&format!("∂{}", ka.alg.label(&ka.alg.unit())));
                if !unit && !exterior.contains(&c.entry.label) {
                    return Err(Error::Mismatch(format!("cokernel class {} is not ∂ of an exterior class", c.entry.label)));
                }
            }
        }
    }
    Ok(SyntomicResult { p, n, classes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn win(s: (i64, i64), k: (i64, i64)) -> Window {
        Window { stems: s, weights: (-4, 4), aux: Some(k) }
    }

    #[test]
    fn hodge_tate_collapses_at_2_1() {
        let c = verify_hodge_tate(2, 1, &win((-2, 20), (0, 0)), 3).unwrap();
        assert!(c.collapses(), "{c:?}");
        assert!(c.knt > 0);
    }

    #[test]
    fn tp_e2_is_exterior_on_bars_and_lambda() {
        let pages = tp_pages(2, 1, &win((-6, 14), (-3, 3))).unwrap();
        assert!(pages.e2.find("t⁻¹ε̄₁λ₂").is_some());
        tcminus_e2(2, 1, &win((-6, 14), (0, 5))).unwrap();
    }

    #[test]
    fn leading_terms_sit_in_survivor_filtrations() {
        for (p, n) in [(2, 1), (2, 2), (3, 1)] {
            let lts = knt_leading_terms(p, n).unwrap();
            for lt in &lts {
                assert!(survives_mod(p, n, &lt.subset, -lt.mu), "{lt:?}");
            }
            assert_eq!(lts.len() as i64, 2 * (1 << n) * ipow(p, n as u32));
        }
    }

    #[test]
    fn lambda_differential_fires() {
        let pat = prismatic_pattern(2, 1, true).unwrap();
        let (r, s, t) = expected_lambda_differential(2, 1).unwrap();
        assert_eq!((r, s.as_str(), t.as_str()), (4, "t²", "t⁶λ₂"));
        assert!(pat.edges.iter().any(|e| e.page == r && e.source == s && e.target == t));
    }

    #[test]
    fn m_tilde_at_2_1() {
        assert_eq!(m_tilde(2, 1, &Subset::empty(1)), vec![1, 2]);
        assert_eq!(m_tilde(2, 1, &Subset { bits: 1, n: 1 }), vec![2, 3]);
    }

    #[test]
    fn syntomic_2_1_matches_closed_form() {
        let r = can_phi_assemble(2, 1).unwrap();
        assert_eq!(r.classes.len(), 12);
        assert_eq!(r.table().label_multiset(), syntomic_closed_form(2, 1).unwrap().label_multiset());
    }

    #[test]
    fn f4_frobenius() {
        let f = FrobeniusField::new(2, 2).unwrap();
        assert_eq!(f.modulus, vec![1, 1, 1]);
        assert_eq!(f.fixed_dims(), (1, 1));
        let f9 = FrobeniusField::new(3, 2).unwrap();
        assert_eq!(f9.fixed_dims(), (1, 1));
        let square = f9.frobenius.mul(&f9.frobenius).unwrap();
        assert_eq!(square, FpMatrix::identity(f9.field, 2));
    }

    #[test]
    fn prime_field_variant_is_the_plain_answer() {
        let a = syntomic_over_field(2, 1, 1).unwrap().table();
        let b = can_phi_assemble(2, 1).unwrap().table();
        assert_eq!(a, b);
    }
}
