//! Mod (p, v_1, ..., v_n) Hochschild homology of F_p and of k(n): the σ
//! operator, cap products, the barred generators, the combinatorial sets
//! f, m, w, B, W, U, the image of the reduction map and the σ-kernel K_n.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bigraded::{subscript, Element, GeneratorSpec, Monomial, MonomialAlgebra, Parity, Window};
use crate::error::{Error, Result};
use crate::gfp::{binom_in, Fp, FpMatrix, Subspace};
use crate::table::{ClassEntry, ClassTable, LabeledBasis, LabeledElement};

pub(crate) const RANK_T: u32 = 1;
pub(crate) const RANK_MU: u32 = 2;
pub(crate) const RANK_EPS: u32 = 3;
pub(crate) const RANK_BAR: u32 = 4;
pub(crate) const RANK_LAMBDA: u32 = 5;

pub(crate) fn ipow(p: u32, e: u32) -> i64 {
    (p as i64).pow(e)
}

pub fn eps_name(i: usize) -> String {
    format!("ε{}", subscript(i as u64))
}

pub fn ebar_name(i: usize) -> String {
    format!("ε\u{304}{}", subscript(i as u64))
}

pub fn lambda_name(k: usize) -> String {
    format!("λ{}", subscript(k as u64))
}

/// A subset S of {1, ..., n}, stored as a bit mask (bit s-1 for s).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    pub bits: u32,
    pub n: usize,
}

impl Subset {
    pub fn new(elements: &[usize], n: usize) -> Result<Self> {
        let mut bits = 0;
        for &s in elements {
            if s == 0 || s > n {
                return Err(Error::Invalid(format!("{s} is not in {{1..{n}}}")));
            }
            bits |= 1 << (s - 1);
        }
        Ok(Subset { bits, n })
    }

    pub fn empty(n: usize) -> Self {
        Subset { bits: 0, n }
    }

    /// All subsets of {1..n} ordered by bit mask.
    pub fn all(n: usize) -> Vec<Subset> {
        (0..1u32 << n).map(|bits| Subset { bits, n }).collect()
    }

    pub fn elements(&self) -> Vec<usize> {
        (1..=self.n).filter(|s| self.bits & (1 << (s - 1)) != 0).collect()
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, s: usize) -> bool {
        s >= 1 && s <= self.n && self.bits & (1 << (s - 1)) != 0
    }

    /// Σ_{s∈S} (2p^s - 1), the stem of ε̄_S.
    pub fn stem(&self, p: u32) -> i64 {
        self.elements().iter().map(|&s| 2 * ipow(p, s as u32) - 1).sum()
    }

    /// Name such as "ε̄₁ε̄₂", empty for S = ∅.
    pub fn ebar_label(&self) -> String {
        self.elements().iter().map(|&s| ebar_name(s)).collect()
    }
}

/// f(S) = Σ_{s∈S} (p^{s-1} - p^s), with f(∅) = 0.
pub fn f_of(p: u32, s: &Subset) -> i64 {
    s.elements()
        .iter()
        .map(|&i| ipow(p, i as u32 - 1) - ipow(p, i as u32))
        .sum()
}

/// w(S) = Σ_{s∈S} p^s.
pub fn w_of(p: u32, s: &Subset) -> i64 {
    s.elements().iter().map(|&i| ipow(p, i as u32)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combinatorics {
    pub f: i64,
    pub w: i64,
    max: Option<usize>,
    subset: Subset,
}

impl Combinatorics {
    /// m(S) = max S; undefined for the empty set.
    pub fn m(&self) -> Result<usize> {
        self.max
            .ok_or_else(|| Error::Undefined("m(S) for S = ∅".into()))
    }

    /// S' = S - {m(S)}.
    pub fn s_prime(&self) -> Result<Subset> {
        let m = self.m()?;
        Ok(Subset {
            bits: self.subset.bits & !(1 << (m - 1)),
            n: self.subset.n,
        })
    }
}

pub fn combinatorics(s: &Subset, p: u32) -> Result<Combinatorics> {
    Fp::new(p)?;
    Ok(Combinatorics {
        f: f_of(p, s),
        w: w_of(p, s),
        max: s.elements().last().copied(),
        subset: *s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Rewrite barred generators in terms of ε_i.
    BarToEps,
    EpsToBar,
}

/// F_p[μ] ⊗ Λ(ε_0, ..., ε_top) in both the ε basis and the barred basis
/// Λ(ε_0, ε̄_1, ..., ε̄_top). Generator order in both: μ, then index 0..=top.
#[derive(Debug, Clone)]
pub struct ThhFp {
    pub p: u32,
    pub field: Fp,
    pub top: usize,
    pub eps: Arc<MonomialAlgebra>,
    pub bar: Arc<MonomialAlgebra>,
}

impl ThhFp {
    pub fn new(p: u32, top: usize) -> Result<Self> {
        let field = Fp::new(p)?;
        let build = |barred: bool| {
            let mut g = vec![GeneratorSpec::new("μ", Parity::Polynomial, 2, 0).rank(RANK_MU)];
            for i in 0..=top {
                let stem = 2 * ipow(p, i as u32) - 1;
                let (name, rank) = if barred && i > 0 {
                    (ebar_name(i), RANK_BAR)
                } else {
                    (eps_name(i), RANK_EPS)
                };
                g.push(GeneratorSpec::new(&name, Parity::Exterior, stem, -1).rank(rank));
            }
            MonomialAlgebra::new(field, g)
        };
        Ok(ThhFp {
            p,
            field,
            top,
            eps: build(false)?,
            bar: build(true)?,
        })
    }

    fn mu_pow(&self, alg: &Arc<MonomialAlgebra>, j: i64) -> Element {
        let mut m = alg.unit();
        m.0[0] = j as i32;
        Element::monomial(alg, m)
    }

    /// ε̄_i = ε_i - μ^{p^i - p^{i-1}} ε_{i-1}, written in the ε basis.
    pub fn ebar(&self, i: usize) -> Result<Element> {
        if i == 0 {
            return Err(Error::Invalid("ε̄₀ does not exist".into()));
        }
        if i > self.top {
            return Err(Error::Invalid(format!("ε̄{} is beyond the top generator", subscript(i as u64))));
        }
        let e = |k: usize| Element::generator(&self.eps, k + 1);
        let shift = ipow(self.p, i as u32) - ipow(self.p, i as u32 - 1);
        e(i).sub(&self.mu_pow(&self.eps, shift).multiply(&e(i - 1))?)
    }

    /// ε_i = Σ_{s=1}^{i} ε̄_s μ^{p^i - p^s} + ε_0 μ^{p^i - 1}, in the barred basis.
    pub fn eps_in_bar(&self, i: usize) -> Result<Element> {
        let pi = ipow(self.p, i as u32);
        let mut x = self
            .mu_pow(&self.bar, pi - 1)
            .multiply(&Element::generator(&self.bar, 1))?;
        for s in 1..=i {
            let term = Element::generator(&self.bar, s + 1)
                .multiply(&self.mu_pow(&self.bar, pi - ipow(self.p, s as u32)))?;
            x = x.add(&term)?;
        }
        Ok(x)
    }

    pub fn bar_change_of_basis(&self, x: &Element, dir: Direction) -> Result<Element> {
        match dir {
            Direction::BarToEps => {
                if x.algebra != self.bar {
                    return Err(Error::AlgebraMismatch);
                }
                let mut images = vec![Element::generator(&self.eps, 0), Element::generator(&self.eps, 1)];
                for i in 1..=self.top {
                    images.push(self.ebar(i)?);
                }
                x.substitute(&self.eps, &images)
            }
            Direction::EpsToBar => {
                if x.algebra != self.eps {
                    return Err(Error::AlgebraMismatch);
                }
                let mut images = vec![Element::generator(&self.bar, 0), Element::generator(&self.bar, 1)];
                for i in 1..=self.top {
                    images.push(self.eps_in_bar(i)?);
                }
                x.substitute(&self.bar, &images)
            }
        }
    }

    pub fn to_eps(&self, x: &Element) -> Result<Element> {
        if x.algebra == self.eps {
            Ok(x.clone())
        } else {
            self.bar_change_of_basis(x, Direction::BarToEps)
        }
    }

    /// σ: the odd derivation with σ(μ) = 0 and σ(ε_i) = μ^{p^i}, computed in
    /// the ε basis; barred inputs are converted there and back.
    pub fn sigma(&self, x: &Element) -> Result<Element> {
        let barred = x.algebra == self.bar;
        let xe = self.to_eps(x)?;
        let mut images = vec![None];
        for i in 0..=self.top {
            images.push(Some(self.mu_pow(&self.eps, ipow(self.p, i as u32))));
        }
        let y = xe.derive(&images, 1)?;
        if barred {
            self.bar_change_of_basis(&y, Direction::EpsToBar)
        } else {
            Ok(y)
        }
    }

    /// Cap product with c_k: μ^j ε_A ∩ c_k = C(j, k) μ^{j-k} ε_A.
    pub fn cap(&self, x: &Element, k: u64) -> Result<Element> {
        let barred = x.algebra == self.bar;
        let xe = self.to_eps(x)?;
        let mut out = Element::zero(&self.eps);
        for (m, &c) in xe.terms() {
            let j = m.0[0] as i64;
            if j < k as i64 {
                continue;
            }
            let b = binom_in(self.field, j as u64, k);
            if b != 0 {
                let mut mm = m.clone();
                mm.0[0] -= k as i32;
                out.add_term(mm, self.field.mul(b, c));
            }
        }
        if barred {
            self.bar_change_of_basis(&out, Direction::EpsToBar)
        } else {
            Ok(out)
        }
    }

    pub fn basis(&self, window: &Window) -> Result<Vec<Monomial>> {
        self.eps.enumerate_window(window)
    }

    /// Matrix of a linear operator between two bidegrees of the ε basis.
    fn operator_matrix(
        &self,
        source: &[Monomial],
        target: &[Monomial],
        op: impl Fn(&Element) -> Result<Element>,
    ) -> Result<FpMatrix> {
        let index: BTreeMap<Monomial, usize> =
            target.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut cols = Vec::with_capacity(source.len());
        for m in source {
            let y = op(&Element::monomial(&self.eps, m.clone()))?;
            cols.push(y.to_vector(&index).map_err(|_| {
                Error::Mismatch("operator leaves the expected bidegree".into())
            })?);
        }
        FpMatrix::from_columns(self.field, target.len(), &cols)
    }
}

/// Window used when none is given: two μ^{p^{n+1}} periods of stems.
pub fn default_window(p: u32, n: usize) -> Window {
    Window::new((-1, 2 * ipow(p, n as u32 + 2)), (-(n as i64) - 2, 2))
}

pub fn thh_fp_basis(p: u32, n: usize, window: &Window) -> Result<ClassTable> {
    let thh = ThhFp::new(p, n)?;
    let ms = thh.basis(window)?;
    Ok(ClassTable::from_entries(
        ms.iter()
            .map(|m| {
                let b = thh.eps.bidegree_of(m);
                ClassEntry::new(thh.eps.label(m), b.stem, b.weight)
            })
            .collect(),
    ))
}

/// The set B with the summation range that makes the image count come out:
/// ε̄_S μ^j for S ⊆ {1..n} and 0 ≤ j < p^n - 1 + f(S).
pub fn set_b(p: u32, n: usize) -> Result<Vec<Monomial>> {
    let thh = ThhFp::new(p, n)?;
    let pn = ipow(p, n as u32);
    let mut out = Vec::new();
    for s in Subset::all(n) {
        for j in 0..(pn - 1 + f_of(p, &s)).max(0) {
            out.push(bar_monomial(&thh, j, false, &s));
        }
    }
    Ok(out)
}

/// B exactly as the two-summand definition reads (first summand over
/// S ⊆ {1..n-1}, second over ε̄_{S'} ε̄_n μ^j). Kept for comparison: it is too
/// small as soon as n ≥ 2.
pub fn set_b_literal(p: u32, n: usize) -> Result<Vec<Monomial>> {
    let thh = ThhFp::new(p, n)?;
    let pn = ipow(p, n as u32);
    let mut out = Vec::new();
    let lower = if n == 0 { vec![] } else { Subset::all(n - 1) };
    for s in &lower {
        let s = Subset { bits: s.bits, n };
        for j in 0..(pn - 1 + f_of(p, &s)).max(0) {
            out.push(bar_monomial(&thh, j, false, &s));
        }
    }
    for s in &lower {
        let s = Subset { bits: s.bits, n };
        if s.is_empty() {
            continue;
        }
        let c = combinatorics(&s, p)?;
        let m = c.m()?;
        let sp = c.s_prime()?;
        let with_n = Subset { bits: sp.bits | 1 << (n - 1), n };
        let pm = ipow(p, m as u32);
        for j in (pm + c.f)..(pm - 1) {
            out.push(bar_monomial(&thh, j, false, &with_n));
        }
    }
    Ok(out)
}

fn bar_monomial(thh: &ThhFp, mu: i64, e0: bool, s: &Subset) -> Monomial {
    let mut m = thh.bar.unit();
    m.0[0] = mu as i32;
    m.0[1] = e0 as i32;
    for i in s.elements() {
        m.0[i + 1] = 1;
    }
    m
}

/// Multiplicity tables of W and U. Both index monomials μ^k ε_0^{a_0} ⋯ ε_n^{a_n}
/// rather than bidegrees, so one bidegree can carry several entries and can
/// lie in both sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexSets {
    pub w: BTreeMap<(i64, i64), usize>,
    pub u: BTreeMap<(i64, i64), usize>,
}

impl IndexSets {
    pub fn in_w(&self, b: (i64, i64)) -> bool {
        self.w.contains_key(&b)
    }

    pub fn in_u(&self, b: (i64, i64)) -> bool {
        self.u.contains_key(&b)
    }

    pub fn w_mult(&self, b: (i64, i64)) -> usize {
        self.w.get(&b).copied().unwrap_or(0)
    }

    pub fn u_mult(&self, b: (i64, i64)) -> usize {
        self.u.get(&b).copied().unwrap_or(0)
    }

    /// Bidegrees that appear in both tables.
    pub fn overlaps(&self) -> Vec<(i64, i64)> {
        self.w.keys().filter(|b| self.u.contains_key(b)).copied().collect()
    }
}

pub fn index_sets(p: u32, n: usize, window: &Window) -> Result<IndexSets> {
    let thh = ThhFp::new(p, n)?;
    let big_p = ipow(p, n as u32 + 1);
    let pn = ipow(p, n as u32);
    let mut out = IndexSets::default();
    for m in thh.basis(window)? {
        let k = m.0[0] as i64;
        let a_n = m.0[n + 1];
        let b = thh.eps.bidegree_of(&m);
        let key = (b.stem, b.weight);
        if a_n == 0 && k.rem_euclid(big_p) < pn {
            *out.w.entry(key).or_insert(0) += 1;
        } else {
            *out.u.entry(key).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// Closed-form basis of im f_n: (Λ(ε̄_1..ε̄_n) ⊕ {xμ, ε_0 x : x ∈ B}) ⊗ F_p[μ^{p^{n+1}}],
/// as monomials of the barred algebra of `thh`. The kernel of f_n is generated
/// by λ_{n+1}, recorded by `lambda_in_kernel`.
#[derive(Debug, Clone)]
pub struct ImageBasis {
    pub thh: ThhFp,
    pub monomials: Vec<Monomial>,
    pub lambda_in_kernel: bool,
}

impl ImageBasis {
    pub fn at(&self, stem: i64, weight: i64) -> Vec<&Monomial> {
        self.monomials
            .iter()
            .filter(|m| {
                let b = self.thh.bar.bidegree_of(m);
                (b.stem, b.weight) == (stem, weight)
            })
            .collect()
    }

    pub fn to_table(&self) -> ClassTable {
        ClassTable::from_entries(
            self.monomials
                .iter()
                .map(|m| {
                    let b = self.thh.bar.bidegree_of(m);
                    ClassEntry::new(self.thh.bar.label(m), b.stem, b.weight)
                })
                .collect(),
        )
    }
}

/// The block of the image in stems [0, 2p^{n+1}), before μ^{p^{n+1}}-periodicity.
pub(crate) fn image_block(p: u32, n: usize) -> Result<Vec<(i64, bool, Subset)>> {
    let mut out: Vec<(i64, bool, Subset)> = Subset::all(n).into_iter().map(|s| (0, false, s)).collect();
    for m in set_b(p, n)? {
        let j = m.0[0] as i64;
        let s = Subset {
            bits: (1..=n).filter(|&i| m.0[i + 1] == 1).map(|i| 1u32 << (i - 1)).sum(),
            n,
        };
        out.push((j + 1, false, s));
        out.push((j, true, s));
    }
    Ok(out)
}

pub fn image_fn_closed_form(p: u32, n: usize, window: &Window) -> Result<ImageBasis> {
    let thh = ThhFp::new(p, n)?;
    let big_p = ipow(p, n as u32 + 1);
    let mut monomials = Vec::new();
    for (j, e0, s) in image_block(p, n)? {
        let base = bar_monomial(&thh, j, e0, &s);
        let base_stem = thh.bar.tri(&base).0;
        let mut k = 0;
        while base_stem + 2 * big_p * k <= window.stems.1 {
            let mut m = base.clone();
            m.0[0] += (big_p * k) as i32;
            if window.contains(thh.bar.tri(&m)) {
                monomials.push(m);
            }
            k += 1;
        }
    }
    monomials.sort_by(|a, b| thh.bar.canonical_cmp(a, b));
    Ok(ImageBasis {
        thh,
        monomials,
        lambda_in_kernel: true,
    })
}

/// ker(σ(-) ∩ c_{p^n}) ∩ ker(- ∩ c_{p^n}) in one bidegree, in the ε basis.
#[derive(Debug, Clone)]
pub struct OracleSpace {
    pub coords: Vec<Monomial>,
    pub space: Subspace,
}

pub fn image_fn_oracle(p: u32, n: usize, window: &Window) -> Result<BTreeMap<(i64, i64), OracleSpace>> {
    let thh = ThhFp::new(p, n)?;
    let pn = ipow(p, n as u32) as u64;
    let mut out = BTreeMap::new();
    for stem in window.stems.0..=window.stems.1 {
        for weight in window.weights.0..=window.weights.1 {
            let coords = thh.basis(&Window::point(stem, weight))?;
            if coords.is_empty() {
                continue;
            }
            let cap_t = thh.basis(&Window::point(stem - 2 * pn as i64, weight))?;
            let sig_t = thh.basis(&Window::point(stem + 1 - 2 * pn as i64, weight + 1))?;
            let cap_m = thh.operator_matrix(&coords, &cap_t, |x| thh.cap(x, pn))?;
            let sig_m = thh.operator_matrix(&coords, &sig_t, |x| thh.cap(&thh.sigma(x)?, pn))?;
            let space = cap_m.kernel().intersect(&sig_m.kernel())?;
            out.insert((stem, weight), OracleSpace { coords, space });
        }
    }
    Ok(out)
}

/// Span of the closed-form image in one bidegree, in the ε-basis coordinates.
pub fn closed_form_span(image: &ImageBasis, coords: &[Monomial], stem: i64, weight: i64) -> Result<Subspace> {
    let index: BTreeMap<Monomial, usize> =
        coords.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let mut rows = Vec::new();
    for m in image.at(stem, weight) {
        let e = image.thh.to_eps(&Element::monomial(&image.thh.bar, m.clone()))?;
        rows.push(e.to_vector(&index)?);
    }
    Subspace::span(image.thh.field, coords.len(), rows)
}

/// Outcome of comparing the oracle with the closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageCheck {
    pub bidegrees_compared: usize,
    pub max_dimension: usize,
}

/// Compare oracle and closed form in every bidegree of W inside the window.
/// The dimension there must also equal the W multiplicity.
pub fn verify_image(p: u32, n: usize, window: &Window) -> Result<ImageCheck> {
    let oracle = image_fn_oracle(p, n, window)?;
    let image = image_fn_closed_form(p, n, window)?;
    let sets = index_sets(p, n, window)?;
    let mut check = ImageCheck {
        bidegrees_compared: 0,
        max_dimension: 0,
    };
    for (&(s, w), mult) in &sets.w {
        let o = oracle
            .get(&(s, w))
            .ok_or_else(|| Error::Mismatch(format!("no oracle space at ({s}, {w})")))?;
        let c = closed_form_span(&image, &o.coords, s, w)?;
        if c != o.space {
            return Err(Error::Mismatch(format!(
                "image at ({s}, {w}): oracle dim {}, closed form dim {}",
                o.space.dim(),
                c.dim()
            )));
        }
        if c.dim() != *mult {
            return Err(Error::Mismatch(format!(
                "image at ({s}, {w}) has dim {} but W multiplicity {mult}",
                c.dim()
            )));
        }
        let codim = o.coords.len() - c.dim();
        if codim != sets.u_mult((s, w)) {
            return Err(Error::Mismatch(format!(
                "codimension {codim} at ({s}, {w}) differs from U multiplicity {}",
                sets.u_mult((s, w))
            )));
        }
        check.bidegrees_compared += 1;
        check.max_dimension = check.max_dimension.max(c.dim());
    }
    Ok(check)
}

/// The algebra F_p[μ^{±1}] ⊗ Λ(ε_0, ε̄_1, ..., ε̄_{n+1}) ⊗ Λ(λ_{n+1}) ⊗ F_p[t^{±1}]
/// in which every later stage computes. λ_{n+1} has weight 0 for THH and
/// weight 1 for the t-Bockstein pages and syntomic cohomology.
#[derive(Debug, Clone)]
pub struct KnAlgebra {
    pub p: u32,
    pub n: usize,
    pub field: Fp,
    /// p^{n+1}.
    pub big_p: i64,
    /// p^n.
    pub pn: i64,
    pub lambda_weight: i64,
    pub alg: Arc<MonomialAlgebra>,
}

impl KnAlgebra {
    pub const MU: usize = 0;
    pub const E0: usize = 1;

    pub fn new(p: u32, n: usize, lambda_weight: i64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("height n must be at least 1".into()));
        }
        let field = Fp::new(p)?;
        let big_p = ipow(p, n as u32 + 1);
        let mut g = vec![
            GeneratorSpec::new("μ", Parity::Laurent, 2, 0).rank(RANK_MU),
            GeneratorSpec::new(&eps_name(0), Parity::Exterior, 1, -1).rank(RANK_EPS),
        ];
        for s in 1..=n + 1 {
            g.push(GeneratorSpec::new(&ebar_name(s), Parity::Exterior, 2 * ipow(p, s as u32) - 1, -1).rank(RANK_BAR));
        }
        g.push(GeneratorSpec::new(&lambda_name(n + 1), Parity::Exterior, 2 * big_p - 1, lambda_weight).rank(RANK_LAMBDA));
        g.push(GeneratorSpec::new("t", Parity::Laurent, -2, 0).aux(1).rank(RANK_T));
        Ok(KnAlgebra {
            p,
            n,
            field,
            big_p,
            pn: ipow(p, n as u32),
            lambda_weight,
            alg: MonomialAlgebra::new(field, g)?,
        })
    }

    pub fn ebar_index(&self, s: usize) -> usize {
        1 + s
    }

    pub fn lambda_index(&self) -> usize {
        self.n + 3
    }

    pub fn t_index(&self) -> usize {
        self.n + 4
    }

    /// μ^mu ε_0^{e0} ε̄_S λ^{lambda} t^t, with S ⊆ {1..n+1} given as a bit mask.
    pub fn mono(&self, mu: i64, e0: bool, bars: u32, lambda: bool, t: i64) -> Monomial {
        let mut m = self.alg.unit();
        m.0[Self::MU] = mu as i32;
        m.0[Self::E0] = e0 as i32;
        for s in 1..=self.n + 1 {
            if bars & (1 << (s - 1)) != 0 {
                m.0[self.ebar_index(s)] = 1;
            }
        }
        m.0[self.lambda_index()] = lambda as i32;
        m.0[self.t_index()] = t as i32;
        m
    }

    pub fn el(&self, m: Monomial) -> Element {
        Element::monomial(&self.alg, m)
    }

    pub fn t_pow(&self, k: i64) -> Element {
        self.el(self.mono(0, false, 0, false, k))
    }

    pub fn mu_pow(&self, j: i64) -> Element {
        self.el(self.mono(j, false, 0, false, 0))
    }

    pub fn lambda(&self) -> Element {
        self.el(self.mono(0, false, 0, true, 0))
    }

    pub fn ebar_s(&self, s: &Subset) -> Element {
        self.el(self.mono(0, false, s.bits, false, 0))
    }

    /// ε_{n+1} = Σ_{s=1}^{n+1} ε̄_s μ^{P - p^s} + ε_0 μ^{P-1}.
    pub fn eps_top(&self) -> Element {
        let mut x = self.el(self.mono(self.big_p - 1, true, 0, false, 0));
        for s in 1..=self.n + 1 {
            let m = self.mono(self.big_p - ipow(self.p, s as u32), false, 1 << (s - 1), false, 0);
            x.add_term(m, 1);
        }
        x
    }

    /// z_{n+1} = Σ_{s=1}^{n+1} ε̄_s μ^{P - p^s + 1} = ε_{n+1} μ - ε_0 μ^P.
    pub fn z(&self) -> Element {
        let mut x = Element::zero(&self.alg);
        for s in 1..=self.n + 1 {
            let m = self.mono(self.big_p - ipow(self.p, s as u32) + 1, false, 1 << (s - 1), false, 0);
            x.add_term(m, 1);
        }
        x
    }

    /// σ in barred coordinates: σ(ε_0) = μ, every other generator to 0.
    pub fn sigma(&self, x: &Element) -> Result<Element> {
        let mut images = vec![None; self.alg.len()];
        images[Self::E0] = Some(self.mu_pow(1));
        x.derive(&images, 1)
    }

    /// The first t-Bockstein differential d_1 = tσ.
    pub fn d1_images(&self) -> Vec<Option<Element>> {
        let mut images = vec![None; self.alg.len()];
        images[Self::E0] = Some(self.el(self.mono(1, false, 0, false, 1)));
        images
    }

    /// Map into the barred THH(F_p) algebra with ε̄ up to n+1, sending λ to 0
    /// and t to 1. Used to check σ-closedness against the ε-basis formula.
    pub fn to_thh(&self, x: &Element, thh: &ThhFp) -> Result<Element> {
        let mut images: Vec<Element> = (0..self.n + 3).map(|i| Element::generator(&thh.bar, i)).collect();
        images.push(Element::zero(&thh.bar));
        images.push(Element::one(&thh.bar));
        x.substitute(&thh.bar, &images)
    }

    pub fn stem_of(&self, x: &Element) -> Option<i64> {
        x.tri().map(|t| t.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnKind {
    /// ε̄_S with S ⊆ {1..n}.
    Exterior,
    /// xμ for x ∈ B.
    MuMultiple,
    /// x z_{n+1} for x ∈ B.
    ZMultiple,
}

/// One basis element of K_n (or of its μ-localization).
#[derive(Debug, Clone)]
pub struct KnElement {
    pub item: LabeledElement,
    pub kind: KnKind,
    /// The power m of μ^{p^{n+1}} multiplying the base element.
    pub period: i64,
}

/// Basis of K_n = (L ⊕ {xμ, x z_{n+1} : x ∈ B}) ⊗ Λ(λ_{n+1}) ⊗ F_p[μ^{p^{n+1}}]
/// in the given stem range. With `localized`, μ^{p^{n+1}} is inverted (K_n^t).
pub fn kn_elements(ka: &KnAlgebra, stems: (i64, i64), localized: bool) -> Result<Vec<KnElement>> {
    let z = ka.z();
    let z_name = format!("z{}", subscript(ka.n as u64 + 1));
    let mut base: Vec<(Element, KnKind, Option<Monomial>)> = Vec::new();
    for s in Subset::all(ka.n) {
        base.push((ka.ebar_s(&s), KnKind::Exterior, None));
    }
    for (j, e0, s) in image_block(ka.p, ka.n)? {
        if e0 {
            // ε_0 x does not survive σ; its partner x z_{n+1} does.
            let x = ka.mono(j, false, s.bits, false, 0);
            base.push((ka.el(x.clone()).multiply(&z)?, KnKind::ZMultiple, Some(x)));
        } else if j > 0 {
            base.push((ka.el(ka.mono(j, false, s.bits, false, 0)), KnKind::MuMultiple, None));
        }
    }
    let period_stem = 2 * ka.big_p;
    let mut out = Vec::new();
    for lambda in [false, true] {
        for (x, kind, zx) in &base {
            let x = if lambda { x.multiply(&ka.lambda())? } else { x.clone() };
            let (s0, w) = {
                let t = x.tri().ok_or_else(|| Error::Mismatch("inhomogeneous K_n element".into()))?;
                (t.0, t.1)
            };
            let lo = if localized {
                (stems.0 - s0).div_euclid(period_stem) - 1
            } else {
                0
            };
            let hi = (stems.1 - s0).div_euclid(period_stem) + 1;
            for m in lo..=hi {
                let stem = s0 + m * period_stem;
                if stem < stems.0 || stem > stems.1 {
                    continue;
                }
                let shifted = x.multiply(&ka.mu_pow(ka.big_p * m))?;
                let label = match zx {
                    None => ka.alg.label(shifted.leading().expect("nonzero")),
                    Some(xm) => {
                        let mut xm = xm.clone();
                        xm.0[KnAlgebra::MU] += (ka.big_p * m) as i32;
                        let pre = ka.alg.label(&xm);
                        let pre = if pre == "1" { String::new() } else { pre };
                        let lam = if lambda { lambda_name(ka.n + 1) } else { String::new() };
                        format!("{pre}{z_name}{lam}")
                    }
                };
                out.push(KnElement {
                    item: LabeledElement {
                        label,
                        element: shifted,
                        stem,
                        weight: w,
                        lambda_divisible: lambda,
                    },
                    kind: *kind,
                    period: m,
                });
            }
        }
    }
    out.sort_by(|a, b| (a.item.stem, a.item.weight, &a.item.label).cmp(&(b.item.stem, b.item.weight, &b.item.label)));
    Ok(out)
}

/// K_n = ker σ on mod (p, v_1, ..., v_{n+1}) THH of k(n), λ_{n+1} in weight 0.
/// Every element is checked to be killed by σ computed in the ε basis.
pub fn kn_kernel_basis(p: u32, n: usize, window: &Window) -> Result<LabeledBasis> {
    let ka = KnAlgebra::new(p, n, 0)?;
    let thh = ThhFp::new(p, n + 1)?;
    let mut items = Vec::new();
    for k in kn_elements(&ka, window.stems, false)? {
        if !window.contains((k.item.stem, k.item.weight, 0)) {
            continue;
        }
        if !k.item.lambda_divisible {
            let x = ka.to_thh(&k.item.element, &thh)?;
            if !thh.sigma(&x)?.is_zero() {
                return Err(Error::Mismatch(format!("σ({}) ≠ 0", k.item.label)));
            }
        }
        items.push(k.item);
    }
    Ok(LabeledBasis { items })
}

/// Mod (p, v_1, ..., v_n) THH of k(n): im f_n ⊗ Λ(λ_{n+1}) with λ_{n+1} in
/// bidegree (2p^{n+1}-1, 0). With `mod_vn1`, also adjoin Λ(ε_{n+1}).
pub fn thh_kn_basis(p: u32, n: usize, window: &Window, mod_vn1: bool) -> Result<LabeledBasis> {
    let ka = KnAlgebra::new(p, n, 0)?;
    let eps_top = ka.eps_top();
    let eps_top_name = eps_name(n + 1);
    let image = image_fn_closed_form(p, n, &Window::new((0, window.stems.1), (-(n as i64) - 3, 3)))?;
    let mut items = Vec::new();
    for m in &image.monomials {
        let bars: u32 = (1..=n).filter(|&i| m.0[i + 1] == 1).map(|i| 1u32 << (i - 1)).sum();
        let x = ka.el(ka.mono(m.0[0] as i64, m.0[1] == 1, bars, false, 0));
        for with_eps in [false, true] {
            if with_eps && !mod_vn1 {
                continue;
            }
            for lambda in [false, true] {
                let mut e = x.clone();
                let mut label = ka.alg.label(x.leading().expect("monomial"));
                if with_eps {
                    e = e.multiply(&eps_top)?;
                    label = if label == "1" { eps_top_name.clone() } else { format!("{label}{eps_top_name}") };
                }
                if lambda {
                    e = e.multiply(&ka.lambda())?;
                    label = if label == "1" { lambda_name(n + 1) } else { format!("{label}{}", lambda_name(n + 1)) };
                }
                let (s, w, _) = e.tri().expect("homogeneous");
                if window.contains((s, w, 0)) {
                    items.push(LabeledElement {
                        label,
                        element: e,
                        stem: s,
                        weight: w,
                        lambda_divisible: lambda,
                    });
                }
            }
        }
    }
    items.sort_by(|a, b| (a.stem, a.weight, &a.label).cmp(&(b.stem, b.weight, &b.label)));
    Ok(LabeledBasis { items })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinatorics_examples() {
        assert_eq!(f_of(2, &Subset::empty(2)), 0);
        assert_eq!(f_of(2, &Subset::new(&[1], 2).unwrap()), -1);
        assert_eq!(w_of(3, &Subset::new(&[1, 2], 2).unwrap()), 12);
        let c = combinatorics(&Subset::empty(2), 2).unwrap();
        assert!(matches!(c.m(), Err(Error::Undefined(_))));
        let c = combinatorics(&Subset::new(&[1, 2], 2).unwrap(), 2).unwrap();
        assert_eq!(c.m().unwrap(), 2);
        assert_eq!(c.s_prime().unwrap().elements(), vec![1]);
    }

    #[test]
    fn set_b_examples() {
        let thh = ThhFp::new(2, 1).unwrap();
        let labels = |p, n| -> Vec<String> {
            let t = ThhFp::new(p, n).unwrap();
            set_b(p, n).unwrap().iter().map(|m| t.bar.label(m)).collect()
        };
        let _ = thh;
        assert_eq!(labels(2, 1), ["1"]);
        assert_eq!(labels(3, 1), ["1", "μ"]);
        assert_eq!(labels(2, 2), ["1", "μ", "μ²", "ε̄₁", "με̄₁", "ε̄₂"]);
        // The literal definition misses ε̄₂ at (2, 2).
        let t = ThhFp::new(2, 2).unwrap();
        let literal: Vec<String> = set_b_literal(2, 2).unwrap().iter().map(|m| t.bar.label(m)).collect();
        assert_eq!(literal, ["1", "μ", "μ²", "ε̄₁", "με̄₁"]);
    }

    #[test]
    fn barred_generators() {
        let thh = ThhFp::new(2, 2).unwrap();
        assert_eq!(thh.ebar(1).unwrap().label(), "ε₁ + με₀");
        assert_eq!(thh.ebar(2).unwrap().label(), "ε₂ + μ²ε₁");
        assert!(thh.ebar(0).is_err());
        let thh3 = ThhFp::new(3, 1).unwrap();
        assert_eq!(thh3.ebar(1).unwrap().label(), "ε₁ - μ²ε₀");
    }

    #[test]
    fn sigma_examples() {
        let thh = ThhFp::new(3, 2).unwrap();
        let e0 = Element::generator(&thh.eps, 1);
        assert_eq!(thh.sigma(&e0).unwrap().label(), "μ");
        for i in 1..=2 {
            assert!(thh.sigma(&thh.ebar(i).unwrap()).unwrap().is_zero());
        }
        let ka = KnAlgebra::new(3, 1, 1).unwrap();
        let thh2 = ThhFp::new(3, 2).unwrap();
        let z = ka.to_thh(&ka.z(), &thh2).unwrap();
        assert!(thh2.sigma(&z).unwrap().is_zero());
    }

    #[test]
    fn z_in_eps_basis() {
        for (p, n) in [(2, 1), (2, 2), (3, 1)] {
            let ka = KnAlgebra::new(p, n, 1).unwrap();
            let thh = ThhFp::new(p, n + 1).unwrap();
            let z = thh.to_eps(&ka.to_thh(&ka.z(), &thh).unwrap()).unwrap();
            let big_p = ipow(p, n as u32 + 1) as i32;
            let mut e_top = thh.eps.unit();
            e_top.0[n + 2] = 1;
            e_top.0[0] = 1;
            let mut e0 = thh.eps.unit();
            e0.0[1] = 1;
            e0.0[0] = big_p;
            let expect = Element::monomial(&thh.eps, e_top)
                .sub(&Element::monomial(&thh.eps, e0))
                .unwrap();
            assert_eq!(z, expect);
        }
    }

    #[test]
    fn oracle_small_cases() {
        let o = image_fn_oracle(2, 1, &Window::new((0, 3), (-2, 0))).unwrap();
        let at = &o[&(3, -1)];
        assert_eq!(at.space.dim(), 1);
        assert_eq!(at.space.basis()[0], vec![1, 1]);
        assert_eq!(o[&(0, 0)].space.dim(), 1);
    }

    #[test]
    fn closed_form_block() {
        let im = image_fn_closed_form(2, 1, &Window::new((0, 7), (-3, 0))).unwrap();
        let t = im.to_table();
        let got: Vec<_> = t.entries.iter().map(|e| (e.label.as_str(), e.stem, e.weight)).collect();
        assert_eq!(got, [("1", 0, 0), ("ε₀", 1, -1), ("μ", 2, 0), ("ε̄₁", 3, -1)]);
    }

    #[test]
    fn kn_block() {
        let kb = kn_kernel_basis(2, 1, &Window::new((0, 9), (-3, 2))).unwrap();
        let labels: Vec<_> = kb.items.iter().map(|x| x.label.as_str()).collect();
        assert_eq!(labels, ["1", "μ", "ε̄₁", "λ₂", "μ⁴", "z₂", "μλ₂"]);
    }

    #[test]
    fn index_set_overlap() {
        let sets = index_sets(2, 1, &Window::new((0, 16), (-3, 0))).unwrap();
        assert!(sets.in_w((0, 0)));
        assert!(sets.in_w((3, -1)) && sets.in_u((3, -1)));
        for k in 0..8 {
            let in_u = sets.in_u((2 * k, 0));
            assert_eq!(in_u, matches!(k % 4, 2 | 3), "k = {k}");
        }
    }
}
