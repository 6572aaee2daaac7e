//! Bigraded-commutative monomial algebras: exterior, polynomial and Laurent
//! generators with Koszul signs, elements over F_p, and enumeration of basis
//! monomials inside finite windows.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gfp::Fp;

/// A (stem, Adams weight) pair, optionally carrying the t-power grading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub stem: i64,
    pub weight: i64,
    pub aux: Option<i64>,
}

impl Bidegree {
    pub fn new(stem: i64, weight: i64) -> Self {
        Bidegree { stem, weight, aux: None }
    }

    pub fn with_aux(stem: i64, weight: i64, aux: i64) -> Self {
        Bidegree { stem, weight, aux: Some(aux) }
    }
}

impl fmt::Display for Bidegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.aux {
            Some(a) => write!(f, "({}, {}; {})", self.stem, self.weight, a),
            None => write!(f, "({}, {})", self.stem, self.weight),
        }
    }
}

/// Internal tridegree (stem, weight, aux); aux is zero where undeclared.
pub type Tri = (i64, i64, i64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    /// Square-zero, exponent 0 or 1. Flagged explicitly so that p = 2 still
    /// gets the relation even though signs vanish there.
    Exterior,
    Polynomial,
    Laurent,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub name: String,
    pub parity: Parity,
    pub stem: i64,
    pub weight: i64,
    pub aux: i64,
    /// Position when printing labels; lower prints first.
    pub print_rank: u32,
}

impl GeneratorSpec {
    pub fn new(name: &str, parity: Parity, stem: i64, weight: i64) -> Self {
        GeneratorSpec {
            name: name.to_string(),
            parity,
            stem,
            weight,
            aux: 0,
            print_rank: 0,
        }
    }

    pub fn aux(mut self, aux: i64) -> Self {
        self.aux = aux;
        self
    }

    pub fn rank(mut self, r: u32) -> Self {
        self.print_rank = r;
        self
    }

    fn odd(&self) -> bool {
        self.stem.rem_euclid(2) == 1
    }
}

/// A free graded-commutative algebra over F_p on the listed generators.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialAlgebra {
    pub field: Fp,
    pub generators: Vec<GeneratorSpec>,
    /// Whether the aux grading is meaningful (reported in bidegrees).
    pub has_aux: bool,
}

impl MonomialAlgebra {
    pub fn new(field: Fp, generators: Vec<GeneratorSpec>) -> Result<Arc<Self>> {
        for (i, g) in generators.iter().enumerate() {
            if generators[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::Invalid(format!("duplicate generator name {}", g.name)));
            }
            if g.odd() && g.parity != Parity::Exterior && field.p() != 2 {
                return Err(Error::Invalid(format!(
                    "odd generator {} must be exterior at odd p",
                    g.name
                )));
            }
        }
        let has_aux = generators.iter().any(|g| g.aux != 0);
        Ok(Arc::new(MonomialAlgebra {
            field,
            generators,
            has_aux,
        }))
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn unit(&self) -> Monomial {
        Monomial(vec![0; self.len()])
    }

    pub fn generator(&self, i: usize) -> Monomial {
        let mut e = vec![0; self.len()];
        e[i] = 1;
        Monomial(e)
    }

    /// Check exponent bounds for every generator.
    pub fn validate(&self, m: &Monomial) -> Result<()> {
        if m.0.len() != self.len() {
            return Err(Error::DimensionMismatch(m.0.len(), self.len()));
        }
        for (g, &e) in self.generators.iter().zip(&m.0) {
            let ok = match g.parity {
                Parity::Exterior => e == 0 || e == 1,
                Parity::Polynomial => e >= 0,
                Parity::Laurent => true,
            };
            if !ok {
                return Err(Error::Invalid(format!("exponent {e} not allowed for {}", g.name)));
            }
        }
        Ok(())
    }

    pub fn tri(&self, m: &Monomial) -> Tri {
        let mut t = (0, 0, 0);
        for (g, &e) in self.generators.iter().zip(&m.0) {
            let e = e as i64;
            t.0 += e * g.stem;
            t.1 += e * g.weight;
            t.2 += e * g.aux;
        }
        t
    }

    pub fn bidegree_of(&self, m: &Monomial) -> Bidegree {
        let (s, w, a) = self.tri(m);
        Bidegree {
            stem: s,
            weight: w,
            aux: self.has_aux.then_some(a),
        }
    }

    /// Product of two monomials with its Koszul sign, or `None` when an
    /// exterior generator would square.
    pub fn mul_monomials(&self, a: &Monomial, b: &Monomial) -> Option<(Monomial, bool)> {
        let mut out = Vec::with_capacity(self.len());
        let mut negative = false;
        // Moving each odd factor of b leftwards past the odd factors of a
        // with a larger index.
        let mut odd_a_after = 0i64;
        for i in (0..self.len()).rev() {
            let g = &self.generators[i];
            if g.parity == Parity::Exterior && a.0[i] == 1 && b.0[i] == 1 {
                return None;
            }
            if g.odd() {
                if b.0[i].rem_euclid(2) == 1 && odd_a_after % 2 == 1 {
                    negative = !negative;
                }
                odd_a_after += a.0[i].rem_euclid(2) as i64;
            }
        }
        for i in 0..self.len() {
            out.push(a.0[i] + b.0[i]);
        }
        Some((Monomial(out), negative && self.field.p() != 2))
    }

    /// Label in the fixed print order, e.g. "t⁴ε̄₁ε̄₂λ₃"; the unit prints as "1".
    pub fn label(&self, m: &Monomial) -> String {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.generators[i].print_rank, i));
        let mut s = String::new();
        for i in order {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            s.push_str(&self.generators[i].name);
            if e != 1 {
                s.push_str(&superscript(e as i64));
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        s
    }

    /// Every monomial whose tridegree lies in the window, sorted by
    /// (stem, weight, aux, exponents).
    pub fn enumerate_window(&self, window: &Window) -> Result<Vec<Monomial>> {
        let bounds = self.exponent_bounds(window)?;
        let mut out = Vec::new();
        let mut cur = vec![0i32; self.len()];
        self.enumerate_rec(0, &bounds, window, &mut cur, &mut out);
        out.sort_by(|a, b| self.canonical_cmp(a, b));
        Ok(out)
    }

    pub fn canonical_cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        self.tri(a).cmp(&self.tri(b)).then_with(|| a.0.cmp(&b.0))
    }

    fn enumerate_rec(
        &self,
        i: usize,
        bounds: &[(i64, i64)],
        window: &Window,
        cur: &mut Vec<i32>,
        out: &mut Vec<Monomial>,
    ) {
        if i == self.len() {
            let m = Monomial(cur.clone());
            if window.contains(self.tri(&m)) {
                out.push(m);
            }
            return;
        }
        for e in bounds[i].0..=bounds[i].1 {
            cur[i] = e as i32;
            self.enumerate_rec(i + 1, bounds, window, cur, out);
        }
        cur[i] = 0;
    }

    /// Interval propagation: each coordinate constrains each exponent through
    /// the extreme contributions of the others. Repeats until stable, then
    /// fails if some exponent is still unbounded.
    fn exponent_bounds(&self, window: &Window) -> Result<Vec<(i64, i64)>> {
        const INF: i64 = i64::MAX / 4;
        let mut b: Vec<(i64, i64)> = self
            .generators
            .iter()
            .map(|g| match g.parity {
                Parity::Exterior => (0, 1),
                Parity::Polynomial => (0, INF),
                Parity::Laurent => (-INF, INF),
            })
            .collect();
        let coords: Vec<(Box<dyn Fn(&GeneratorSpec) -> i64>, (i64, i64))> = {
            let mut v: Vec<(Box<dyn Fn(&GeneratorSpec) -> i64>, (i64, i64))> = vec![
                (Box::new(|g: &GeneratorSpec| g.stem), window.stems),
                (Box::new(|g: &GeneratorSpec| g.weight), window.weights),
            ];
            if let Some(a) = window.aux {
                v.push((Box::new(|g: &GeneratorSpec| g.aux), a));
            }
            v
        };
        let contrib = |g: i64, (lo, hi): (i64, i64)| -> (i64, i64) {
            let sat = |e: i64| {
                if e.abs() >= INF {
                    if (e > 0) == (g > 0) { INF } else { -INF }
                } else {
                    e * g
                }
            };
            if g == 0 {
                (0, 0)
            } else if g > 0 {
                (sat(lo), sat(hi))
            } else {
                (sat(hi), sat(lo))
            }
        };
        loop {
            let mut changed = false;
            for (coord, (wlo, whi)) in &coords {
                for i in 0..self.len() {
                    let gi = coord(&self.generators[i]);
                    if gi == 0 {
                        continue;
                    }
                    let (mut rest_lo, mut rest_hi) = (0i64, 0i64);
                    for j in 0..self.len() {
                        if j != i {
                            let (l, h) = contrib(coord(&self.generators[j]), b[j]);
                            rest_lo = if l <= -INF || rest_lo <= -INF { -INF } else { rest_lo + l };
                            rest_hi = if h >= INF || rest_hi >= INF { INF } else { rest_hi + h };
                        }
                    }
                    // wlo - rest_hi <= e * gi <= whi - rest_lo
                    let lo_val = if rest_hi >= INF { -INF } else { wlo - rest_hi };
                    let hi_val = if rest_lo <= -INF { INF } else { whi - rest_lo };
                    let (mut lo_e, mut hi_e) = b[i];
                    if gi > 0 {
                        if lo_val > -INF {
                            lo_e = lo_e.max(div_ceil(lo_val, gi));
                        }
                        if hi_val < INF {
                            hi_e = hi_e.min(div_floor(hi_val, gi));
                        }
                    } else {
                        if hi_val < INF {
                            lo_e = lo_e.max(div_ceil(hi_val, gi));
                        }
                        if lo_val > -INF {
                            hi_e = hi_e.min(div_floor(lo_val, gi));
                        }
                    }
                    if (lo_e, hi_e) != b[i] {
                        b[i] = (lo_e, hi_e);
                        changed = true;
                    }
                    if lo_e > hi_e {
                        // Empty window: no monomials at all.
                        return Ok(vec![(0, -1); self.len()]);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if let Some(i) = b.iter().position(|&(l, h)| l <= -INF || h >= INF) {
            return Err(Error::Unbounded(format!(
                "exponent of {} is not bounded by the window",
                self.generators[i].name
            )));
        }
        Ok(b)
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) { q - 1 } else { q }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -div_floor(-a, b)
}

/// Closed ranges of stems, weights and (optionally) aux degrees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub stems: (i64, i64),
    pub weights: (i64, i64),
    pub aux: Option<(i64, i64)>,
}

impl Window {
    pub fn new(stems: (i64, i64), weights: (i64, i64)) -> Self {
        Window { stems, weights, aux: None }
    }

    pub fn point(stem: i64, weight: i64) -> Self {
        Window::new((stem, stem), (weight, weight))
    }

    pub fn tri_point((s, w, a): Tri) -> Self {
        Window {
            stems: (s, s),
            weights: (w, w),
            aux: Some((a, a)),
        }
    }

    pub fn with_aux(mut self, lo: i64, hi: i64) -> Self {
        self.aux = Some((lo, hi));
        self
    }

    pub fn contains(&self, (s, w, a): Tri) -> bool {
        let inr = |x: i64, (lo, hi): (i64, i64)| lo <= x && x <= hi;
        inr(s, self.stems) && inr(w, self.weights) && self.aux.is_none_or(|r| inr(a, r))
    }
}

/// Exponent vector, indexed like the generators of the owning algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<i32>);

impl Monomial {
    pub fn exps(&self) -> &[i32] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }
}

/// An F_p-linear combination of monomials in one algebra. Zero coefficients
/// are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    pub algebra: Arc<MonomialAlgebra>,
    terms: BTreeMap<Monomial, u32>,
}

impl Element {
    pub fn zero(algebra: &Arc<MonomialAlgebra>) -> Self {
        Element {
            algebra: algebra.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(algebra: &Arc<MonomialAlgebra>, m: Monomial) -> Self {
        Self::term(algebra, m, 1)
    }

    pub fn term(algebra: &Arc<MonomialAlgebra>, m: Monomial, c: i64) -> Self {
        let mut e = Self::zero(algebra);
        e.add_term(m, algebra.field.reduce(c));
        e
    }

    /// Build from exponents given by generator name; unnamed generators get 0.
    pub fn from_exponents(algebra: &Arc<MonomialAlgebra>, exps: &[(&str, i32)]) -> Result<Self> {
        let mut m = algebra.unit();
        for &(name, e) in exps {
            let i = algebra
                .index_of(name)
                .ok_or_else(|| Error::Invalid(format!("unknown generator {name}")))?;
            m.0[i] += e;
        }
        algebra.validate(&m)?;
        Ok(Self::monomial(algebra, m))
    }

    pub fn one(algebra: &Arc<MonomialAlgebra>) -> Self {
        Self::monomial(algebra, algebra.unit())
    }

    pub fn generator(algebra: &Arc<MonomialAlgebra>, i: usize) -> Self {
        Self::monomial(algebra, algebra.generator(i))
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, u32> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> u32 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: u32) {
        let f = self.algebra.field;
        let v = f.add(self.coefficient(&m), c % f.p());
        if v == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, v);
        }
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.scale(self.algebra.field.neg(1)))
    }

    pub fn scale(&self, c: u32) -> Element {
        let f = self.algebra.field;
        let mut out = Element::zero(&self.algebra);
        for (m, &x) in &self.terms {
            out.add_term(m.clone(), f.mul(x, c));
        }
        out
    }

    pub fn multiply(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let alg = &self.algebra;
        let f = alg.field;
        let mut out = Element::zero(alg);
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                if let Some((m, neg)) = alg.mul_monomials(a, b) {
                    let c = f.mul(ca, cb);
                    out.add_term(m, if neg { f.neg(c) } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Element> {
        let mut acc = Element::one(&self.algebra);
        for _ in 0..e {
            acc = acc.multiply(self)?;
        }
        Ok(acc)
    }

    /// The common tridegree, or `None` for zero or inhomogeneous elements.
    pub fn tri(&self) -> Option<Tri> {
        let mut it = self.terms.keys().map(|m| self.algebra.tri(m));
        let first = it.next()?;
        it.all(|t| t == first).then_some(first)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.tri().is_some()
    }

    /// Leading monomial in the canonical order (used for labels of classes).
    pub fn leading(&self) -> Option<&Monomial> {
        self.terms.keys().min_by(|a, b| self.algebra.canonical_cmp(a, b))
    }

    /// Human-readable sum like "ε₁ + με₀".
    pub fn label(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let p = self.algebra.field.p();
        let mut parts = Vec::new();
        for (m, &c) in &self.terms {
            let l = self.algebra.label(m);
            if c == 1 {
                parts.push(l);
            } else if c == p - 1 {
                parts.push(format!("-{l}"));
            } else {
                parts.push(format!("{c}{l}"));
            }
        }
        parts.join(" + ").replace("+ -", "- ")
    }

    /// Coefficient vector against an ordered list of coordinate monomials.
    /// Fails if a term is not among the coordinates.
    pub fn to_vector(&self, coords: &BTreeMap<Monomial, usize>) -> Result<Vec<u32>> {
        let mut v = vec![0; coords.len()];
        for (m, &c) in &self.terms {
            let &i = coords.get(m).ok_or_else(|| {
                Error::Sequence(format!("term {} outside the coordinate space", self.algebra.label(m)))
            })?;
            v[i] = c;
        }
        Ok(v)
    }

    pub fn from_vector(algebra: &Arc<MonomialAlgebra>, coords: &[Monomial], v: &[u32]) -> Element {
        let mut e = Element::zero(algebra);
        for (m, &c) in coords.iter().zip(v) {
            if c != 0 {
                e.add_term(m.clone(), c);
            }
        }
        e
    }

    /// Apply a derivation given by its values on generators. `stem_shift`
    /// fixes the Koszul sign: D(xy) = D(x)y + (-1)^{|x||D|} x D(y).
    /// Polynomial and Laurent generators must have even stem here.
    pub fn derive(&self, images: &[Option<Element>], stem_shift: i64) -> Result<Element> {
        let alg = &self.algebra;
        if images.len() != alg.len() {
            return Err(Error::DimensionMismatch(images.len(), alg.len()));
        }
        let f = alg.field;
        let mut out = Element::zero(alg);
        for (m, &c) in &self.terms {
            let mut prefix = alg.unit();
            for (i, g) in alg.generators.iter().enumerate() {
                let e = m.0[i];
                if e != 0 {
                    if let Some(img) = &images[i] {
                        self.check_same(img)?;
                        let dg = match g.parity {
                            Parity::Exterior => img.clone(),
                            _ => {
                                let mut reduced = alg.unit();
                                reduced.0[i] = e - 1;
                                Element::monomial(alg, reduced)
                                    .multiply(img)?
                                    .scale(f.reduce(e as i64))
                            }
                        };
                        let mut suffix = alg.unit();
                        suffix.0[i + 1..].copy_from_slice(&m.0[i + 1..]);
                        let prefix_stem = alg.tri(&prefix).0;
                        let sign_neg = (prefix_stem * stem_shift).rem_euclid(2) == 1;
                        let term = Element::monomial(alg, prefix.clone())
                            .multiply(&dg)?
                            .multiply(&Element::monomial(alg, suffix))?;
                        let coeff = if sign_neg { f.neg(c) } else { c };
                        out = out.add(&term.scale(coeff))?;
                    }
                }
                prefix.0[i] = e;
            }
        }
        Ok(out)
    }

    /// Algebra map into `target` sending generator i to `images[i]`.
    /// Negative exponents need a monomial image (a unit).
    pub fn substitute(&self, target: &Arc<MonomialAlgebra>, images: &[Element]) -> Result<Element> {
        let alg = &self.algebra;
        if images.len() != alg.len() {
            return Err(Error::DimensionMismatch(images.len(), alg.len()));
        }
        let f = alg.field;
        let mut out = Element::zero(target);
        for (m, &c) in &self.terms {
            let mut acc = Element::term(target, target.unit(), c as i64);
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let img = &images[i];
                let factor = if e > 0 {
                    img.pow(e as u32)?
                } else {
                    let (mono, &coef) = match img.terms.iter().next() {
                        Some(t) if img.terms.len() == 1 => t,
                        _ => {
                            return Err(Error::Invalid(format!(
                                "negative power of non-unit image of {}",
                                alg.generators[i].name
                            )))
                        }
                    };
                    let inv = Monomial(mono.0.iter().map(|&x| -x * (-e)).collect());
                    target.validate(&inv)?;
                    Element::term(target, inv, f.pow(f.inv(coef), (-e) as u64) as i64)
                };
                acc = acc.multiply(&factor)?;
            }
            out = out.add(&acc)?;
        }
        Ok(out)
    }
}

const SUPERSCRIPT_DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
const SUBSCRIPT_DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];

pub fn superscript(n: i64) -> String {
    let mut s = String::new();
    if n < 0 {
        s.push('⁻');
    }
    for d in n.unsigned_abs().to_string().bytes() {
        s.push(SUPERSCRIPT_DIGITS[(d - b'0') as usize]);
    }
    s
}

pub fn subscript(n: u64) -> String {
    n.to_string()
        .bytes()
        .map(|d| SUBSCRIPT_DIGITS[(d - b'0') as usize])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn thh_fp(p: u32, n: usize) -> Arc<MonomialAlgebra> {
        let f = Fp::new(p).unwrap();
        let mut g = vec![GeneratorSpec::new("μ", Parity::Polynomial, 2, 0)];
        for i in 0..=n {
            let pi = (p as i64).pow(i as u32);
            g.push(GeneratorSpec::new(&format!("ε{}", subscript(i as u64)), Parity::Exterior, 2 * pi - 1, -1));
        }
        MonomialAlgebra::new(f, g).unwrap()
    }

    #[test]
    fn enumerate_examples() {
        let a = thh_fp(2, 1);
        let at = |s, w| a.enumerate_window(&Window::point(s, w)).unwrap();
        assert_eq!(at(2, 0).iter().map(|m| a.label(m)).collect::<Vec<_>>(), ["μ"]);
        assert_eq!(at(1, -1).iter().map(|m| a.label(m)).collect::<Vec<_>>(), ["ε₀"]);
        assert_eq!(at(4, -2).iter().map(|m| a.label(m)).collect::<Vec<_>>(), ["ε₀ε₁"]);
    }

    #[test]
    fn exterior_square_and_signs() {
        let a = thh_fp(3, 1);
        let e0 = Element::generator(&a, 1);
        let e1 = Element::generator(&a, 2);
        assert!(e0.multiply(&e0).unwrap().is_zero());
        let s = e0.multiply(&e1).unwrap().add(&e1.multiply(&e0).unwrap()).unwrap();
        assert!(s.is_zero());
        let mu = Element::generator(&a, 0);
        assert_eq!(mu.pow(2).unwrap().multiply(&mu.pow(3).unwrap()).unwrap(), mu.pow(5).unwrap());
    }

    #[test]
    fn laurent_needs_bounds() {
        let f = Fp::new(2).unwrap();
        let a = MonomialAlgebra::new(
            f,
            vec![
                GeneratorSpec::new("μ", Parity::Polynomial, 2, 0).rank(2),
                GeneratorSpec::new("t", Parity::Laurent, -2, 0).aux(1).rank(1),
            ],
        )
        .unwrap();
        assert!(matches!(a.enumerate_window(&Window::point(0, 0)), Err(Error::Unbounded(_))));
        let w = Window::point(0, 0).with_aux(-2, 2);
        let ms = a.enumerate_window(&w).unwrap();
        assert_eq!(ms.iter().map(|m| a.label(m)).collect::<Vec<_>>(), ["1", "tμ", "t²μ²"]);
    }

    #[test]
    fn labels_use_print_rank() {
        let f = Fp::new(2).unwrap();
        let a = MonomialAlgebra::new(
            f,
            vec![
                GeneratorSpec::new("λ₃", Parity::Exterior, 15, 1).rank(5),
                GeneratorSpec::new("t", Parity::Laurent, -2, 0).aux(1).rank(1),
            ],
        )
        .unwrap();
        assert_eq!(a.label(&Monomial(vec![1, -1])), "t⁻¹λ₃");
        assert_eq!(a.label(&Monomial(vec![0, 0])), "1");
    }
}
