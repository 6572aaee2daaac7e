//! Filtered spectral sequences computed page by page from an explicit E_1.
//!
//! A page is stored per tridegree (stem, weight, filtration) as a pair of
//! subspaces B_r ⊆ Z_r of the E_1 coordinate space, so E_r = Z_r / B_r.
//! Differentials come from rules: a derivation given on generators, or an
//! explicit list of (source, target) pairs on one page. Periodic sequences
//! (the Tate case, periodic in t^{p^{n+1}}) are folded onto a fundamental
//! domain of the filtration coordinate.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;
use std::rc::Rc;
use std::sync::Arc;

use crate::bigraded::{Element, Monomial, MonomialAlgebra, Tri, Window};
use crate::error::{Error, Result};
use crate::gfp::{quotient_basis, FpMatrix, Subspace};
use crate::table::{ClassEntry, ClassTable};

/// Tridegree of d_r as `base + r * per_page`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftLaw {
    pub base: Tri,
    pub per_page: Tri,
}

impl ShiftLaw {
    pub fn new(base: Tri, per_page: Tri) -> Self {
        ShiftLaw { base, per_page }
    }

    /// d_r : (s, w, k) -> (s - 1, w + 1, k + r).
    pub fn t_bockstein() -> Self {
        ShiftLaw::new((-1, 1, 0), (0, 0, 1))
    }

    pub fn at(&self, r: u32) -> Tri {
        let r = r as i64;
        (
            self.base.0 + r * self.per_page.0,
            self.base.1 + r * self.per_page.1,
            self.base.2 + r * self.per_page.2,
        )
    }
}

fn tri_add(a: Tri, b: Tri) -> Tri {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2)
}

fn tri_sub(a: Tri, b: Tri) -> Tri {
    (a.0 - b.0, a.1 - b.1, a.2 - b.2)
}

fn tri_scale(a: Tri, m: i64) -> Tri {
    (a.0 * m, a.1 * m, a.2 * m)
}

/// Periodicity by a unit monomial of positive filtration. Every tridegree is
/// moved into filtration [0, period.2) by multiplying with a power of the unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSpec {
    pub unit: Monomial,
    pub period: Tri,
}

impl FoldSpec {
    pub fn new(algebra: &MonomialAlgebra, unit: Monomial) -> Result<Self> {
        let period = algebra.tri(&unit);
        if period.2 <= 0 {
            return Err(Error::Invalid("fold unit must have positive filtration".into()));
        }
        Ok(FoldSpec { unit, period })
    }

    /// The canonical tridegree and the number m of periods removed: t = canon + m * period.
    pub fn canon(&self, t: Tri) -> (Tri, i64) {
        let m = t.2.div_euclid(self.period.2);
        (tri_sub(t, tri_scale(self.period, m)), m)
    }

    pub fn unit_power(&self, m: i64) -> Monomial {
        Monomial(self.unit.0.iter().map(|&e| e * m as i32).collect())
    }

    /// Multiply by unit^m.
    pub fn translate(&self, x: &Element, m: i64) -> Result<Element> {
        if m == 0 {
            return Ok(x.clone());
        }
        x.multiply(&Element::monomial(&x.algebra, self.unit_power(m)))
    }
}

/// The E_1 page: a basis of homogeneous elements in each tridegree.
pub trait E1Source {
    fn algebra(&self) -> &Arc<MonomialAlgebra>;

    /// Linearly independent homogeneous elements spanning E_1 at `tri`.
    fn basis(&self, tri: Tri) -> Result<Vec<Element>>;

    /// Tridegrees inside `window` where E_1 is nonzero, in increasing order.
    /// The window must bound the filtration coordinate when the algebra has one.
    fn support(&self, window: &Window) -> Result<Vec<Tri>>;
}

/// E_1 equal to a whole free monomial algebra.
#[derive(Debug, Clone)]
pub struct FreeAlgebraSource {
    pub alg: Arc<MonomialAlgebra>,
}

impl E1Source for FreeAlgebraSource {
    fn algebra(&self) -> &Arc<MonomialAlgebra> {
        &self.alg
    }

    fn basis(&self, tri: Tri) -> Result<Vec<Element>> {
        Ok(self
            .alg
            .enumerate_window(&Window::tri_point(tri))?
            .into_iter()
            .map(|m| Element::monomial(&self.alg, m))
            .collect())
    }

    fn support(&self, window: &Window) -> Result<Vec<Tri>> {
        let tris: BTreeSet<Tri> = self
            .alg
            .enumerate_window(window)?
            .iter()
            .map(|m| self.alg.tri(m))
            .collect();
        Ok(tris.into_iter().collect())
    }
}

#[derive(Debug, Clone)]
pub enum DifferentialRule {
    /// d_r is the derivation with the given values on generators (`None`
    /// means zero). `stem_shift` fixes the Koszul sign.
    Derivation {
        page: u32,
        images: Vec<Option<Element>>,
        stem_shift: i64,
    },
    /// d_r(source) = target. On each page the explicit rules describe the
    /// whole differential: classes outside the span of the listed sources
    /// (taken as the canonical complement) are d_r-cycles.
    Explicit { page: u32, source: Element, target: Element },
}

impl DifferentialRule {
    pub fn page(&self) -> u32 {
        match self {
            DifferentialRule::Derivation { page, .. } | DifferentialRule::Explicit { page, .. } => *page,
        }
    }
}

enum StageKind {
    Derivation { images: Vec<Option<Element>>, stem_shift: i64 },
    Explicit(HashMap<Tri, Vec<(Element, Element)>>),
}

struct Stage {
    page: u32,
    kind: StageKind,
}

struct Coords {
    monos: Vec<Monomial>,
    index: BTreeMap<Monomial, usize>,
    span: Subspace,
}

struct State {
    z: Subspace,
    b: Subspace,
}

/// Explicit d_r at one source tridegree, prepared for linear evaluation.
struct ExplicitMap {
    /// B_r plus the span of the sources.
    covered: Subspace,
    /// Sources reduced modulo B_r, as columns.
    sources: FpMatrix,
    targets: Vec<Vec<u32>>,
}

/// Whether an element is zero on a page, a nonzero class, or not a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassStatus {
    NotCycle,
    Boundary,
    Nonzero,
}

/// One basis class of a page, with an unfolded representative.
#[derive(Debug, Clone)]
pub struct PageClass {
    pub tri: Tri,
    pub representative: Element,
    pub label: String,
}

pub struct SpectralSequence<S: E1Source> {
    source: S,
    shift: ShiftLaw,
    fold: Option<FoldSpec>,
    max_page: u32,
    stages: Vec<Stage>,
    coords: RefCell<HashMap<Tri, Rc<Coords>>>,
    states: RefCell<HashMap<(usize, Tri), Rc<State>>>,
    explicit: RefCell<HashMap<(usize, Tri), Rc<ExplicitMap>>>,
}

impl<S: E1Source> SpectralSequence<S> {
    pub fn new(
        source: S,
        shift: ShiftLaw,
        fold: Option<FoldSpec>,
        rules: Vec<DifferentialRule>,
        max_page: u32,
    ) -> Result<Self> {
        let mut ss = SpectralSequence {
            source,
            shift,
            fold,
            max_page,
            stages: Vec::new(),
            coords: RefCell::new(HashMap::new()),
            states: RefCell::new(HashMap::new()),
            explicit: RefCell::new(HashMap::new()),
        };
        let mut by_page: BTreeMap<u32, Vec<DifferentialRule>> = BTreeMap::new();
        for rule in rules {
            if rule.page() == 0 || rule.page() > max_page {
                return Err(Error::Invalid(format!(
                    "rule on page {} outside 1..={max_page}",
                    rule.page()
                )));
            }
            by_page.entry(rule.page()).or_default().push(rule);
        }
        for (page, rules) in by_page {
            let derivations = rules
                .iter()
                .filter(|r| matches!(r, DifferentialRule::Derivation { .. }))
                .count();
            if derivations > 0 && derivations != rules.len() || derivations > 1 {
                return Err(Error::Invalid(format!(
                    "page {page} mixes a derivation with other rules"
                )));
            }
            let kind = if derivations == 1 {
                let Some(DifferentialRule::Derivation { images, stem_shift, .. }) = rules.into_iter().next() else {
                    unreachable!()
                };
                if images.len() != ss.source.algebra().len() {
                    return Err(Error::DimensionMismatch(images.len(), ss.source.algebra().len()));
                }
                StageKind::Derivation { images, stem_shift }
            } else {
                let mut map: HashMap<Tri, Vec<(Element, Element)>> = HashMap::new();
                for rule in rules {
                    let DifferentialRule::Explicit { source, target, .. } = rule else {
                        unreachable!()
                    };
                    let tri = source
                        .tri()
                        .ok_or_else(|| Error::Invalid("rule source must be nonzero and homogeneous".into()))?;
                    let expected = tri_add(tri, shift.at(page));
                    if !target.is_zero() && target.tri() != Some(expected) {
                        return Err(Error::Invalid(format!(
                            "d_{page}({}) = {} does not have the declared shift",
                            source.label(),
                            target.label()
                        )));
                    }
                    let (canon, m) = ss.canon(tri);
                    let (s, t) = match &ss.fold {
                        Some(f) => (f.translate(&source, -m)?, f.translate(&target, -m)?),
                        None => (source, target),
                    };
                    map.entry(canon).or_default().push((s, t));
                }
                StageKind::Explicit(map)
            };
            ss.stages.push(Stage { page, kind });
        }
        Ok(ss)
    }

    pub fn source(&self) -> &S {
        &self.source
    }

    pub fn algebra(&self) -> &Arc<MonomialAlgebra> {
        self.source.algebra()
    }

    pub fn shift(&self) -> ShiftLaw {
        self.shift
    }

    pub fn fold(&self) -> Option<&FoldSpec> {
        self.fold.as_ref()
    }

    pub fn max_page(&self) -> u32 {
        self.max_page
    }

    /// Pages carrying a nonzero rule, in order.
    pub fn rule_pages(&self) -> Vec<u32> {
        self.stages.iter().map(|s| s.page).collect()
    }

    pub fn canon(&self, t: Tri) -> (Tri, i64) {
        match &self.fold {
            Some(f) => f.canon(t),
            None => (t, 0),
        }
    }

    fn coords(&self, tri: Tri) -> Result<Rc<Coords>> {
        if let Some(c) = self.coords.borrow().get(&tri) {
            return Ok(c.clone());
        }
        let basis = self.source.basis(tri)?;
        let mut set = BTreeSet::new();
        for x in &basis {
            if !x.is_zero() && x.tri() != Some(tri) {
                return Err(Error::Sequence(format!("E1 element {} is not in tridegree {tri:?}", x.label())));
            }
            set.extend(x.terms().keys().cloned());
        }
        let monos: Vec<Monomial> = set.into_iter().collect();
        let index: BTreeMap<Monomial, usize> = monos.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let field = self.algebra().field;
        let vectors = basis.iter().map(|x| x.to_vector(&index)).collect::<Result<Vec<_>>>()?;
        let span = Subspace::span(field, monos.len(), vectors)?;
        if span.dim() != basis.len() {
            return Err(Error::Sequence(format!("E1 basis at {tri:?} is linearly dependent")));
        }
        let c = Rc::new(Coords { monos, index, span });
        self.coords.borrow_mut().insert(tri, c.clone());
        Ok(c)
    }

    /// Fold an element expected in tridegree `tri` and write it in E_1 coordinates.
    fn vector_of(&self, x: &Element, tri: Tri) -> Result<(Tri, Vec<u32>)> {
        if !x.is_zero() && x.tri() != Some(tri) {
            return Err(Error::Sequence(format!("{} is not in tridegree {tri:?}", x.label())));
        }
        let (canon, m) = self.canon(tri);
        let c = self.coords(canon)?;
        if x.is_zero() {
            return Ok((canon, vec![0; c.monos.len()]));
        }
        let y = match &self.fold {
            Some(f) => f.translate(x, -m)?,
            None => x.clone(),
        };
        let v = y.to_vector(&c.index).map_err(|_| {
            Error::Sequence(format!("{} leaves E1", x.label()))
        })?;
        if !c.span.contains(&v) {
            return Err(Error::Sequence(format!("{} leaves E1", x.label())));
        }
        Ok((canon, v))
    }

    fn element_of(&self, canon: Tri, v: &[u32]) -> Result<Element> {
        let c = self.coords(canon)?;
        Ok(Element::from_vector(self.algebra(), &c.monos, v))
    }

    /// Number of stages whose page is below r, i.e. the state index of E_r.
    fn stage_index(&self, r: u32) -> usize {
        self.stages.iter().take_while(|s| s.page < r).count()
    }

    fn state(&self, i: usize, tri: Tri) -> Result<Rc<State>> {
        if let Some(s) = self.states.borrow().get(&(i, tri)) {
            return Ok(s.clone());
        }
        let st = if i == 0 {
            let c = self.coords(tri)?;
            State {
                z: c.span.clone(),
                b: Subspace::zero(self.algebra().field, c.monos.len()),
            }
        } else {
            self.next_state(i - 1, tri)?
        };
        let st = Rc::new(st);
        self.states.borrow_mut().insert((i, tri), st.clone());
        Ok(st)
    }

    /// Apply the differential of stage j to a vector of Z at `tri`.
    fn apply(&self, j: usize, tri: Tri, v: &[u32]) -> Result<(Tri, Vec<u32>)> {
        let stage = &self.stages[j];
        let raw_target = tri_add(tri, self.shift.at(stage.page));
        match &stage.kind {
            StageKind::Derivation { images, stem_shift } => {
                let x = self.element_of(tri, v)?;
                let y = x.derive(images, *stem_shift)?;
                self.vector_of(&y, raw_target)
            }
            StageKind::Explicit(rules) => {
                let (canon_target, _) = self.canon(raw_target);
                if !rules.contains_key(&tri) {
                    let n = self.coords(canon_target)?.monos.len();
                    return Ok((canon_target, vec![0; n]));
                }
                let map = self.explicit_map(j, tri)?;
                let st = self.state(j, tri)?;
                let u: Vec<u32> = {
                    let rest = map.covered.reduce(v);
                    v.iter().zip(&rest).map(|(&a, &b)| self.algebra().field.sub(a, b)).collect()
                };
                let reduced = st.b.reduce(&u);
                let coeffs = map
                    .sources
                    .solve(&reduced)?
                    .ok_or_else(|| Error::Sequence("explicit differential is not linear on its sources".into()))?;
                let f = self.algebra().field;
                let n = self.coords(canon_target)?.monos.len();
                let mut out = vec![0; n];
                for (c, t) in coeffs.iter().zip(&map.targets) {
                    if *c != 0 {
                        f.axpy(&mut out, *c, t);
                    }
                }
                Ok((canon_target, out))
            }
        }
    }

    fn explicit_map(&self, j: usize, tri: Tri) -> Result<Rc<ExplicitMap>> {
        if let Some(m) = self.explicit.borrow().get(&(j, tri)) {
            return Ok(m.clone());
        }
        let stage = &self.stages[j];
        let StageKind::Explicit(rules) = &stage.kind else {
            unreachable!()
        };
        let r = stage.page;
        let f = self.algebra().field;
        let st = self.state(j, tri)?;
        let raw_target = tri_add(tri, self.shift.at(r));
        let (canon_target, _) = self.canon(raw_target);
        let target_state = self.state(j, canon_target)?;
        let mut src_vecs = Vec::new();
        let mut reduced = Vec::new();
        let mut targets = Vec::new();
        for (s, t) in &rules[&tri] {
            let (_, sv) = self.vector_of(s, tri)?;
            if !st.z.contains(&sv) {
                return Err(Error::Sequence(format!("source {} of d_{r} is not a cycle on E_{r}", s.label())));
            }
            let (_, tv) = self.vector_of(t, raw_target)?;
            if !t.is_zero() {
                if !target_state.z.contains(&tv) {
                    return Err(Error::Sequence(format!(
                        "target {} of d_{r} does not survive to E_{r}",
                        t.label()
                    )));
                }
                if target_state.b.contains(&tv) {
                    return Err(Error::Sequence(format!("target {} of d_{r} is already dead", t.label())));
                }
            }
            reduced.push(st.b.reduce(&sv));
            src_vecs.push(sv);
            targets.push(tv);
        }
        let sources = FpMatrix::from_columns(f, st.z.ambient_dim, &reduced)?;
        if sources.rank() != reduced.len() {
            let witness = rules[&tri][0].0.label();
            return Err(Error::Sequence(format!(
                "sources of d_{r} at {tri:?} are dead or dependent (e.g. {witness})"
            )));
        }
        let mut cov = st.b.basis().to_vec();
        cov.extend(src_vecs);
        let covered = Subspace::span(f, st.z.ambient_dim, cov)?;
        let m = Rc::new(ExplicitMap {
            covered,
            sources,
            targets,
        });
        self.explicit.borrow_mut().insert((j, tri), m.clone());
        Ok(m)
    }

    fn next_state(&self, j: usize, tri: Tri) -> Result<State> {
        let f = self.algebra().field;
        let r = self.stages[j].page;
        let prev = self.state(j, tri)?;
        let n = prev.z.ambient_dim;

        // Cycles: kernel of d_r on Z_r modulo B_r of the target.
        let raw_target = tri_add(tri, self.shift.at(r));
        let (t_canon, _) = self.canon(raw_target);
        let t_state = self.state(j, t_canon)?;
        let mut columns = Vec::new();
        for z in prev.z.basis() {
            let (tt, y) = self.apply(j, tri, z)?;
            debug_assert_eq!(tt, t_canon);
            if !t_state.z.contains(&y) {
                let x = self.element_of(tri, z)?;
                return Err(Error::Sequence(format!(
                    "d_{r}({}) leaves Z_{r} of the target",
                    x.label()
                )));
            }
            if !y.iter().all(|&c| c == 0) {
                let (tt2, yy) = self.apply(j, t_canon, &y)?;
                if !self.state(j, tt2)?.b.contains(&yy) {
                    let x = self.element_of(tri, z)?;
                    return Err(Error::Sequence(format!("d_{r}∘d_{r} ≠ 0 on {}", x.label())));
                }
            }
            columns.push(t_state.b.reduce(&y));
        }
        for b in prev.b.basis() {
            let (_, y) = self.apply(j, tri, b)?;
            if !t_state.b.contains(&y) {
                let x = self.element_of(tri, b)?;
                return Err(Error::Sequence(format!(
                    "d_{r} is not well defined: boundary {} maps outside B_{r}",
                    x.label()
                )));
            }
        }
        let z_new = if columns.is_empty() {
            Subspace::zero(f, n)
        } else {
            let m = FpMatrix::from_columns(f, t_state.z.ambient_dim, &columns)?;
            let ker = m.kernel();
            let vecs = ker
                .basis()
                .iter()
                .map(|c| {
                    let mut v = vec![0; n];
                    for (coef, z) in c.iter().zip(prev.z.basis()) {
                        f.axpy(&mut v, *coef, z);
                    }
                    v
                })
                .collect();
            Subspace::span(f, n, vecs)?
        };

        // Boundaries: B_r plus the image of d_r from the source tridegree.
        let (s_canon, _) = self.canon(tri_sub(tri, self.shift.at(r)));
        let s_state = self.state(j, s_canon)?;
        let mut rows = prev.b.basis().to_vec();
        for z in s_state.z.basis() {
            let (tt, y) = self.apply(j, s_canon, z)?;
            debug_assert_eq!(tt, tri);
            rows.push(y);
        }
        let b_new = Subspace::span(f, n, rows)?;
        if let Some(v) = b_new.basis().iter().find(|v| !z_new.contains(v)) {
            let x = self.element_of(tri, v)?;
            return Err(Error::Sequence(format!("boundary {} is not a cycle on E_{}", x.label(), r + 1)));
        }
        Ok(State { z: z_new, b: b_new })
    }

    fn state_for_page(&self, page: u32, tri: Tri) -> Result<(Tri, i64, Rc<State>)> {
        let page = page.min(self.max_page.saturating_add(1));
        let (canon, m) = self.canon(tri);
        let i = self.stage_index(page);
        Ok((canon, m, self.state(i, canon)?))
    }

    /// dim E_r at `tri`; use `u32::MAX` for E_∞.
    pub fn dimension(&self, page: u32, tri: Tri) -> Result<usize> {
        let (_, _, st) = self.state_for_page(page, tri)?;
        Ok(st.z.dim() - st.b.dim())
    }

    /// Basis of E_r at `tri` with canonical representatives, unfolded back to `tri`.
    pub fn classes(&self, page: u32, tri: Tri) -> Result<Vec<PageClass>> {
        let (canon, m, st) = self.state_for_page(page, tri)?;
        let q = quotient_basis(&st.z, &st.b)?;
        let c = self.coords(canon)?;
        let mut out = Vec::new();
        for (v, &pc) in q.basis().iter().zip(q.pivots()) {
            let mut rep = Element::from_vector(self.algebra(), &c.monos, v);
            let mut pivot = Element::monomial(self.algebra(), c.monos[pc].clone());
            if let Some(f) = &self.fold {
                rep = f.translate(&rep, m)?;
                pivot = f.translate(&pivot, m)?;
            }
            let label = self.algebra().label(pivot.leading().expect("monomial"));
            out.push(PageClass {
                tri,
                representative: rep,
                label,
            });
        }
        Ok(out)
    }

    /// Where a homogeneous element stands on E_r.
    pub fn status(&self, page: u32, x: &Element) -> Result<ClassStatus> {
        let tri = x
            .tri()
            .ok_or_else(|| Error::Invalid("status of zero or inhomogeneous element".into()))?;
        let (canon, v) = self.vector_of(x, tri)?;
        let i = self.stage_index(page.min(self.max_page.saturating_add(1)));
        let st = self.state(i, canon)?;
        Ok(if !st.z.contains(&v) {
            ClassStatus::NotCycle
        } else if st.b.contains(&v) {
            ClassStatus::Boundary
        } else {
            ClassStatus::Nonzero
        })
    }

    /// Dimension of the span of `xs` (all in one tridegree) on E_r. Every
    /// element must be a cycle on that page.
    pub fn class_rank(&self, page: u32, xs: &[Element]) -> Result<usize> {
        let Some(tri) = xs.iter().find_map(|x| x.tri()) else {
            return Ok(0);
        };
        let i = self.stage_index(page.min(self.max_page.saturating_add(1)));
        let mut rows = Vec::new();
        let mut canon = tri;
        for x in xs {
            let (c, v) = self.vector_of(x, tri)?;
            canon = c;
            rows.push(v);
        }
        let st = self.state(i, canon)?;
        let mut reduced = Vec::new();
        for (x, v) in xs.iter().zip(&rows) {
            if !st.z.contains(v) {
                return Err(Error::Sequence(format!("{} is not a cycle on E_{page}", x.label())));
            }
            reduced.push(st.b.reduce(v));
        }
        Ok(Subspace::span(self.algebra().field, st.z.ambient_dim, reduced)?.dim())
    }

    /// E_r over the support of E_1 in `window`, as a table (the filtration is
    /// reported as the Nygaard coordinate).
    pub fn page_table(&self, page: u32, window: &Window) -> Result<ClassTable> {
        let mut entries = Vec::new();
        for tri in self.source.support(window)? {
            for c in self.classes(page, tri)? {
                entries.push(ClassEntry::new(c.label, tri.0, tri.1).nygaard(tri.2));
            }
        }
        Ok(ClassTable::from_entries(entries))
    }

    pub fn e_infinity(&self, window: &Window) -> Result<ClassTable> {
        self.page_table(u32::MAX, window)
    }
}

/// A bidegree pair where a differential could land.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Collision {
    pub page: u32,
    pub source: (i64, i64),
    pub target: (i64, i64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub pages: (u32, u32),
    pub sources_checked: usize,
    pub collisions: Vec<Collision>,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.collisions.is_empty()
    }
}

/// Bidegree-only check that no differential d_r, r in `pages`, can connect
/// two populated bidegrees of `support`. The aux part of `shift` is ignored.
pub fn no_differential_audit(support: &ClassTable, shift: &ShiftLaw, pages: RangeInclusive<u32>) -> AuditReport {
    audit_between(support, support, shift, pages)
}

/// Like [`no_differential_audit`] with separate source and target supports.
pub fn audit_between(
    sources: &ClassTable,
    targets: &ClassTable,
    shift: &ShiftLaw,
    pages: RangeInclusive<u32>,
) -> AuditReport {
    let src: BTreeSet<(i64, i64)> = sources.entries.iter().map(|e| (e.stem, e.weight)).collect();
    let tgt: BTreeSet<(i64, i64)> = targets.entries.iter().map(|e| (e.stem, e.weight)).collect();
    let mut collisions = Vec::new();
    for r in pages.clone() {
        let d = shift.at(r);
        for &(s, w) in &src {
            let t = (s + d.0, w + d.1);
            if tgt.contains(&t) {
                collisions.push(Collision {
                    page: r,
                    source: (s, w),
                    target: t,
                });
            }
        }
    }
    AuditReport {
        pages: (*pages.start(), *pages.end()),
        sources_checked: src.len(),
        collisions,
    }
}

/// Classes known to be permanent cycles, with where the knowledge came from.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PermanentCycleSet {
    entries: BTreeMap<String, String>,
}

impl PermanentCycleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, label: impl Into<String>, provenance: impl Into<String>) {
        self.entries.insert(label.into(), provenance.into());
    }

    pub fn contains(&self, label: &str) -> bool {
        self.entries.contains_key(label)
    }

    pub fn provenance(&self, label: &str) -> Option<&str> {
        self.entries.get(label).map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(|s| s.as_str())
    }
}

/// One class of the page where the induction starts (dimension ≤ 1 per tridegree).
#[derive(Debug, Clone)]
pub struct StartClass {
    pub label: String,
    /// Canonical (folded) tridegree.
    pub tri: Tri,
    pub element: Element,
}

/// Multiplicative structure the differentials must respect.
#[derive(Debug, Clone, Default)]
pub struct ModuleRules {
    /// Linearity over a permanent unit monomial u on pages below a bound:
    /// d_r(ux) = u d_r(x) for r < below_page.
    pub translation: Option<(Monomial, u32)>,
    /// Linearity over an exterior permanent cycle λ with λ·E_∞ ⊆ E_∞ free:
    /// λ times a surviving class survives, and d_r(λx) = λ d_r(x).
    pub lambda: Option<Monomial>,
}

pub struct ForceInput {
    pub classes: Vec<StartClass>,
    pub start_page: u32,
    pub max_page: u32,
    pub shift: ShiftLaw,
    pub fold: Option<FoldSpec>,
    /// Never support a differential.
    pub permanent: PermanentCycleSet,
    /// Never hit by a differential.
    pub non_boundaries: BTreeSet<String>,
    pub rules: ModuleRules,
    /// Required E_∞ dimension per (stem mod |period stem|, weight); keys that
    /// are absent require zero.
    pub expected: BTreeMap<(i64, i64), usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForcedEdge {
    pub page: u32,
    pub source: String,
    pub target: String,
    pub source_tri: Tri,
    pub target_tri: Tri,
}

#[derive(Debug, Clone)]
pub struct ForcedPattern {
    pub edges: Vec<ForcedEdge>,
    pub rules: Vec<DifferentialRule>,
    pub survivors: Vec<String>,
    /// Search nodes visited; a rough measure of how constrained the problem was.
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Undecided,
    Survive,
    Source(usize, u32),
    Target(usize),
    Reserved,
}

struct Search<'a> {
    input: &'a ForceInput,
    index: HashMap<Tri, usize>,
    edges: Vec<Vec<(u32, usize)>>,
    sources_of: Vec<Vec<usize>>,
    survivors: Vec<bool>,
    order: Vec<usize>,
    keys: Vec<(i64, i64)>,
    solutions: Vec<Vec<Role>>,
    nodes: usize,
}

impl<'a> Search<'a> {
    fn canon(&self, t: Tri) -> Tri {
        match &self.input.fold {
            Some(f) => f.canon(t).0,
            None => t,
        }
    }

    fn translate(&self, x: usize, unit: &Monomial, alg: &MonomialAlgebra) -> Option<usize> {
        let t = tri_add(self.input.classes[x].tri, alg.tri(unit));
        self.index.get(&self.canon(t)).copied()
    }

    fn counts_feasible(&self, roles: &[Role], complete: bool) -> bool {
        let mut sure: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        let mut maybe: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        for (i, r) in roles.iter().enumerate() {
            match r {
                Role::Survive => *sure.entry(self.keys[i]).or_default() += 1,
                Role::Undecided => *maybe.entry(self.keys[i]).or_default() += 1,
                _ => {}
            }
        }
        let mut all_keys: BTreeSet<(i64, i64)> = self.input.expected.keys().copied().collect();
        all_keys.extend(sure.keys().copied());
        for k in all_keys {
            let want = self.input.expected.get(&k).copied().unwrap_or(0);
            let s = sure.get(&k).copied().unwrap_or(0);
            let m = if complete { 0 } else { maybe.get(&k).copied().unwrap_or(0) };
            if s > want || s + m < want {
                return false;
            }
        }
        true
    }

    fn valid_solution(&self, roles: &[Role], alg: &MonomialAlgebra) -> bool {
        if roles.iter().any(|r| matches!(r, Role::Reserved | Role::Undecided)) {
            return false;
        }
        if !self.counts_feasible(roles, true) {
            return false;
        }
        // λ-linearity: d_r(λx) = λ d_r(x).
        if let Some(l) = &self.input.rules.lambda {
            for (x, role) in roles.iter().enumerate() {
                if let Role::Source(y, r) = *role {
                    let lx = self.translate(x, l, alg).filter(|_| self.has_factor_room(x, l, alg));
                    let ly = self.translate(y, l, alg).filter(|_| self.has_factor_room(y, l, alg));
                    if let Some(lx) = lx {
                        match (roles[lx], ly) {
                            (Role::Source(t, r2), Some(ly)) if t == ly && r2 == r => {}
                            (_, Some(_)) => return false,
                            (Role::Source(_, r2), None) if r2 <= r => return false,
                            _ => {}
                        }
                    }
                }
            }
        }
        true
    }

    /// Whether x times the exterior monomial l is nonzero.
    fn has_factor_room(&self, x: usize, l: &Monomial, alg: &MonomialAlgebra) -> bool {
        let m = self.input.classes[x].element.leading().expect("nonzero class");
        alg.mul_monomials(m, l).is_some()
    }

    fn run(&mut self, pos: usize, roles: &mut Vec<Role>, alg: &MonomialAlgebra) {
        if self.solutions.len() >= 2 {
            return;
        }
        self.nodes += 1;
        if !self.counts_feasible(roles, false) {
            return;
        }
        if pos == self.order.len() {
            if self.valid_solution(roles, alg) {
                self.solutions.push(roles.clone());
            }
            return;
        }
        let x = self.order[pos];
        if roles[x] != Role::Undecided {
            self.run(pos + 1, roles, alg);
            return;
        }
        let permanent = self.input.permanent.contains(&self.input.classes[x].label);

        // Survive.
        roles[x] = Role::Survive;
        self.run(pos + 1, roles, alg);
        roles[x] = Role::Undecided;
        if self.survivors[x] {
            return;
        }

        // Support a differential.
        if !permanent {
            for &(r, y) in &self.edges[x].clone() {
                if !matches!(roles[y], Role::Undecided | Role::Reserved) {
                    continue;
                }
                let mut assignment = vec![(x, y)];
                if let Some((unit, below)) = &self.input.rules.translation {
                    if r < *below {
                        match self.orbit(x, y, r, unit, roles, alg) {
                            Some(a) => assignment = a,
                            None => continue,
                        }
                    }
                }
                let saved: Vec<(usize, Role, usize, Role)> =
                    assignment.iter().map(|&(a, b)| (a, roles[a], b, roles[b])).collect();
                for &(a, b) in &assignment {
                    roles[a] = Role::Source(b, r);
                    roles[b] = Role::Target(a);
                }
                self.run(pos + 1, roles, alg);
                for &(a, ra, b, rb) in saved.iter().rev() {
                    roles[b] = rb;
                    roles[a] = ra;
                }
                if self.solutions.len() >= 2 {
                    return;
                }
            }
        }

        // Be hit later by a source still to be decided.
        if !self.input.non_boundaries.contains(&self.input.classes[x].label)
            && self.sources_of[x].iter().any(|&s| roles[s] == Role::Undecided)
        {
            roles[x] = Role::Reserved;
            self.run(pos + 1, roles, alg);
            roles[x] = Role::Undecided;
        }
    }

    /// The full translation orbit of an edge x -> y, or None if some
    /// translate is already decided otherwise.
    fn orbit(
        &self,
        x: usize,
        y: usize,
        r: u32,
        unit: &Monomial,
        roles: &[Role],
        alg: &MonomialAlgebra,
    ) -> Option<Vec<(usize, usize)>> {
        let mut out = vec![(x, y)];
        let (mut a, mut b) = (x, y);
        loop {
            a = self.translate(a, unit, alg)?;
            b = self.translate(b, unit, alg)?;
            if a == x {
                return (b == y).then_some(out);
            }
            if out.len() > self.input.classes.len() {
                return None;
            }
            let free_source = roles[a] == Role::Undecided && !self.survivors[a];
            let free_target = matches!(roles[b], Role::Undecided | Role::Reserved);
            if !free_source || !free_target || !self.edges[a].contains(&(r, b)) {
                return None;
            }
            if out.iter().any(|&(p, q)| p == a || q == b || q == a || p == b) {
                return None;
            }
            out.push((a, b));
        }
    }
}

/// Find the unique pattern of differentials compatible with the constraints,
/// by a downward search over the classes in decreasing stem.
pub fn force_differentials(input: &ForceInput, alg: &MonomialAlgebra) -> Result<ForcedPattern> {
    let n = input.classes.len();
    let mut index = HashMap::new();
    for (i, c) in input.classes.iter().enumerate() {
        if index.insert(c.tri, i).is_some() {
            return Err(Error::Invalid(format!(
                "two classes in tridegree {:?}; the induction needs dimension ≤ 1",
                c.tri
            )));
        }
    }
    let period_stem = input.fold.as_ref().map(|f| f.period.0.abs()).unwrap_or(0);
    let keys: Vec<(i64, i64)> = input
        .classes
        .iter()
        .map(|c| {
            let s = if period_stem > 0 { c.tri.0.rem_euclid(period_stem) } else { c.tri.0 };
            (s, c.tri.1)
        })
        .collect();

    let mut survivors = vec![false; n];
    for (i, c) in input.classes.iter().enumerate() {
        survivors[i] = input.permanent.contains(&c.label) && input.non_boundaries.contains(&c.label);
    }
    if let Some(l) = &input.rules.lambda {
        let base = survivors.clone();
        for i in 0..n {
            if base[i] {
                let m = input.classes[i].element.leading().expect("nonzero class");
                if alg.mul_monomials(m, l).is_some() {
                    let t = tri_add(input.classes[i].tri, alg.tri(l));
                    let t = match &input.fold {
                        Some(f) => f.canon(t).0,
                        None => t,
                    };
                    if let Some(&j) = index.get(&t) {
                        survivors[j] = true;
                    }
                }
            }
        }
    }

    let mut search = Search {
        input,
        index,
        edges: vec![Vec::new(); n],
        sources_of: vec![Vec::new(); n],
        survivors,
        order: Vec::new(),
        keys,
        solutions: Vec::new(),
        nodes: 0,
    };
    for x in 0..n {
        if search.survivors[x] || input.permanent.contains(&input.classes[x].label) {
            continue;
        }
        for r in input.start_page..=input.max_page {
            let t = search.canon(tri_add(input.classes[x].tri, input.shift.at(r)));
            if let Some(&y) = search.index.get(&t) {
                if y != x && !search.survivors[y] && !input.non_boundaries.contains(&input.classes[y].label) {
                    search.edges[x].push((r, y));
                    search.sources_of[y].push(x);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let ta = input.classes[a].tri;
        let tb = input.classes[b].tri;
        tb.0.cmp(&ta.0).then(ta.1.cmp(&tb.1)).then(ta.2.cmp(&tb.2))
    });
    search.order = order;

    let mut roles = vec![Role::Undecided; n];
    search.run(0, &mut roles, alg);
    match search.solutions.len() {
        0 => Err(Error::Inconsistent(format!(
            "{n} classes, {} survivors fixed",
            search.survivors.iter().filter(|&&s| s).count()
        ))),
        1 => {
            let sol = &search.solutions[0];
            let mut edges = Vec::new();
            let mut rules = Vec::new();
            let mut surv = Vec::new();
            for (x, role) in sol.iter().enumerate() {
                match *role {
                    Role::Source(y, r) => {
                        let cx = &input.classes[x];
                        let cy = &input.classes[y];
                        let raw = tri_add(cx.tri, input.shift.at(r));
                        let target = match &input.fold {
                            Some(f) => {
                                let m = (raw.2 - cy.tri.2).div_euclid(f.period.2);
                                f.translate(&cy.element, m)?
                            }
                            None => cy.element.clone(),
                        };
                        edges.push(ForcedEdge {
                            page: r,
                            source: cx.label.clone(),
                            target: alg.label(target.leading().expect("nonzero")),
                            source_tri: cx.tri,
                            target_tri: raw,
                        });
                        rules.push(DifferentialRule::Explicit {
                            page: r,
                            source: cx.element.clone(),
                            target,
                        });
                    }
                    Role::Survive => surv.push(input.classes[x].label.clone()),
                    _ => {}
                }
            }
            edges.sort_by(|a, b| (a.source_tri.0, &a.source).cmp(&(b.source_tri.0, &b.source)));
            Ok(ForcedPattern {
                edges,
                rules,
                survivors: surv,
                nodes: search.nodes,
            })
        }
        _ => {
            let (a, b) = (&search.solutions[0], &search.solutions[1]);
            let differing = (0..n)
                .filter(|&i| a[i] != b[i])
                .min_by_key(|&i| (input.classes[i].tri.0, input.classes[i].tri.1))
                .expect("distinct solutions differ somewhere");
            Err(Error::Ambiguous {
                label: input.classes[differing].label.clone(),
                stem: input.classes[differing].tri.0,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigraded::{GeneratorSpec, Parity};
    use crate::gfp::Fp;

    fn koszul_toy() -> SpectralSequence<FreeAlgebraSource> {
        let alg = MonomialAlgebra::new(
            Fp::new(2).unwrap(),
            vec![
                GeneratorSpec::new("ε", Parity::Exterior, 1, -1).rank(3),
                GeneratorSpec::new("μ", Parity::Polynomial, 2, 0).rank(2),
                GeneratorSpec::new("t", Parity::Polynomial, -2, 0).aux(1).rank(1),
            ],
        )
        .unwrap();
        let tmu = Element::from_exponents(&alg, &[("t", 1), ("μ", 1)]).unwrap();
        let rule = DifferentialRule::Derivation {
            page: 1,
            images: vec![Some(tmu), None, None],
            stem_shift: -1,
        };
        SpectralSequence::new(FreeAlgebraSource { alg }, ShiftLaw::t_bockstein(), None, vec![rule], 4).unwrap()
    }

    #[test]
    fn koszul_toy_e2() {
        let ss = koszul_toy();
        let w = Window::new((-10, 10), (-2, 2)).with_aux(0, 5);
        let e2 = ss.page_table(2, &w).unwrap();
        let mut labels: Vec<String> = e2.entries.iter().map(|e| e.label.clone()).collect();
        labels.sort();
        let mut want: Vec<String> = ["1", "μ", "μ²", "μ³", "μ⁴", "μ⁵", "t", "t²", "t³", "t⁴", "t⁵"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        want.sort();
        assert_eq!(labels, want);
        assert!(e2.entries.iter().all(|e| e.nygaard == Some(0) || !e.label.contains('μ')));
    }

    #[test]
    fn explicit_rule_on_dead_source_fails() {
        let ss0 = koszul_toy();
        let alg = ss0.algebra().clone();
        // tμ is already a d_1 boundary, so it cannot support a d_2.
        let src = Element::from_exponents(&alg, &[("t", 1), ("μ", 1)]).unwrap();
        let rules = vec![
            DifferentialRule::Derivation {
                page: 1,
                images: vec![Some(src.clone()), None, None],
                stem_shift: -1,
            },
            DifferentialRule::Explicit {
                page: 2,
                source: src,
                target: Element::zero(&alg),
            },
        ];
        let ss = SpectralSequence::new(FreeAlgebraSource { alg }, ShiftLaw::t_bockstein(), None, rules, 4).unwrap();
        let err = ss.dimension(3, (0, 0, 1)).unwrap_err();
        assert!(matches!(err, Error::Sequence(_)), "{err}");
    }

    #[test]
    fn mixing_rules_on_a_page_is_rejected() {
        let ss0 = koszul_toy();
        let alg = ss0.algebra().clone();
        let one = Element::one(&alg);
        let rules = vec![
            DifferentialRule::Derivation {
                page: 1,
                images: vec![None, None, None],
                stem_shift: -1,
            },
            DifferentialRule::Explicit {
                page: 1,
                source: one.clone(),
                target: Element::zero(&alg),
            },
        ];
        assert!(SpectralSequence::new(FreeAlgebraSource { alg }, ShiftLaw::t_bockstein(), None, rules, 4).is_err());
    }

    #[test]
    fn audit_reports_adjacent_lines() {
        let t = ClassTable::from_entries(vec![ClassEntry::new("a", 3, 0), ClassEntry::new("b", 2, 1)]);
        let rep = no_differential_audit(&t, &ShiftLaw::new((-1, 1, 0), (0, 0, 0)), 1..=3);
        assert_eq!(rep.collisions.len(), 3);
        assert_eq!(rep.collisions[0].source, (3, 0));
        let clean = no_differential_audit(&t, &ShiftLaw::new((-1, 0, 0), (0, 1, 0)), 2..=3);
        assert!(clean.is_clean());
    }

    #[test]
    fn fold_canonicalizes_filtration() {
        let alg = MonomialAlgebra::new(
            Fp::new(3).unwrap(),
            vec![GeneratorSpec::new("t", Parity::Laurent, -2, 0).aux(1)],
        )
        .unwrap();
        let f = FoldSpec::new(&alg, Monomial(vec![3])).unwrap();
        assert_eq!(f.canon((8, 0, -4)), ((-4, 0, 2), -2));
        assert_eq!(f.canon((-4, 0, 2)), ((-4, 0, 2), 0));
    }
}
