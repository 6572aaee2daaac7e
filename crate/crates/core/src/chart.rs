//! Chart documents: what the CLI computes, serializes, renders and compares
//! against the transcribed figures.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::assembly::{k_k1, tc_k1, ModuleOverPolyGen};
use crate::bigraded::{superscript, Window};
use crate::error::{Error, Result};
use crate::hochschild::{ipow, thh_kn_basis};
use crate::syntomic::{
    can_phi_assemble, hodge_tate_knt, prismatic_einf, syntomic_closed, syntomic_over_field, syntomic_stems,
    tcminus_einf, NygaardPart,
};
use crate::table::{ClassEntry, ClassTable, Coeff};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectKind {
    Thh,
    HodgeTate,
    Tp,
    Tcminus,
    Tc,
    K1Tc,
    K1K,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 7] = [
        ObjectKind::Thh,
        ObjectKind::HodgeTate,
        ObjectKind::Tp,
        ObjectKind::Tcminus,
        ObjectKind::Tc,
        ObjectKind::K1Tc,
        ObjectKind::K1K,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectKind::Thh => "thh",
            ObjectKind::HodgeTate => "hodge-tate",
            ObjectKind::Tp => "tp",
            ObjectKind::Tcminus => "tcminus",
            ObjectKind::Tc => "tc",
            ObjectKind::K1Tc => "k1-tc",
            ObjectKind::K1K => "k1-k",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown object kind {s:?}")))
    }

    fn default_axis(self) -> Axis {
        match self {
            ObjectKind::Tp | ObjectKind::Tcminus => Axis::Nygaard,
            _ => Axis::AdamsWeight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    AdamsWeight,
    Nygaard,
}

impl Axis {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "adams_weight" | "weight" => Ok(Axis::AdamsWeight),
            "nygaard" => Ok(Axis::Nygaard),
            _ => Err(Error::Invalid(format!("unknown axis {s:?} (adams_weight or nygaard)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSpec {
    /// F_{p^m}.
    Degree(usize),
    AlgebraicallyClosed,
}

impl FieldSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "closed" {
            return Ok(FieldSpec::AlgebraicallyClosed);
        }
        match s.parse::<usize>() {
            Ok(m) if m >= 1 => Ok(FieldSpec::Degree(m)),
            _ => Err(Error::Invalid(format!("--field takes a degree m ≥ 1 or \"closed\", not {s:?}"))),
        }
    }
}

/// The stable on-disk form of a chart.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDocument {
    pub object: ObjectKind,
    pub p: u32,
    pub n: usize,
    pub ideal: String,
    pub axis: Axis,
    pub entries: Vec<ClassEntry>,
}

impl ChartDocument {
    pub fn new(object: ObjectKind, p: u32, n: usize, ideal: String, axis: Axis, table: ClassTable) -> Result<Self> {
        let mut entries = table.entries;
        entries.sort_by(|a, b| (a.stem, a.weight, &a.label).cmp(&(b.stem, b.weight, &b.label)));
        let doc = ChartDocument { object, p, n, ideal, axis, entries };
        doc.validate()?;
        Ok(doc)
    }

    pub fn y(&self, e: &ClassEntry) -> Result<i64> {
        match self.axis {
            Axis::AdamsWeight => Ok(e.weight),
            Axis::Nygaard => e
                .nygaard
                .ok_or_else(|| Error::Invalid(format!("{} has no Nygaard filtration; use the weight axis", e.label))),
        }
    }

    fn validate(&self) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for e in &self.entries {
            let key = (e.label.clone(), e.stem, self.y(e)?);
            if !seen.insert(key) {
                return Err(Error::Invalid(format!("duplicate entry {} at stem {}", e.label, e.stem)));
            }
        }
        let sorted = self
            .entries
            .windows(2)
            .all(|w| (w[0].stem, w[0].weight, &w[0].label) <= (w[1].stem, w[1].weight, &w[1].label));
        if !sorted {
            return Err(Error::Invalid("entries must be sorted by (stem, weight, label)".into()));
        }
        Ok(())
    }

    pub fn table(&self) -> ClassTable {
        ClassTable::from_entries(self.entries.clone())
    }

    /// (label, stem, y, coeff) for every entry, sorted.
    pub fn points(&self) -> Result<Vec<(String, i64, i64, Coeff)>> {
        let mut v = self
            .entries
            .iter()
            .map(|e| Ok((e.label.clone(), e.stem, self.y(e)?, e.coeff)))
            .collect::<Result<Vec<_>>>()?;
        v.sort();
        Ok(v)
    }
}

pub fn export_json(doc: &ChartDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("chart documents serialize");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<ChartDocument> {
    let doc: ChartDocument = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad chart JSON: {e}")))?;
    doc.validate()?;
    Ok(doc)
}

/// The ideal (p, v_1, ..., v_k) written the way the CLI prints it.
pub fn ideal_string(p: u32, k: usize) -> String {
    let mut s = format!("({p}");
    for i in 1..=k {
        write!(s, ",v{i}").unwrap();
    }
    s.push(')');
    s
}

fn normalize_ideal(s: &str) -> String {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .map(|c| match c {
            '₀'..='₉' => char::from_digit(c as u32 - '₀' as u32, 10).unwrap(),
            c => c,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComputeRequest {
    pub kind: ObjectKind,
    pub p: u32,
    pub n: usize,
    pub ideal: Option<String>,
    pub window: Option<(i64, i64)>,
    pub yrange: Option<(i64, i64)>,
    pub field: Option<FieldSpec>,
    pub axis: Option<Axis>,
    pub exclude_a01: bool,
}

impl ComputeRequest {
    pub fn new(kind: ObjectKind, p: u32, n: usize) -> Self {
        ComputeRequest {
            kind,
            p,
            n,
            ideal: None,
            window: None,
            yrange: None,
            field: None,
            axis: None,
            exclude_a01: false,
        }
    }

    pub fn window(mut self, lo: i64, hi: i64) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn yrange(mut self, lo: i64, hi: i64) -> Self {
        self.yrange = Some((lo, hi));
        self
    }

    pub fn field(mut self, f: FieldSpec) -> Self {
        self.field = Some(f);
        self
    }

    pub fn exclude_a01(mut self) -> Self {
        self.exclude_a01 = true;
        self
    }

    fn is_k1(&self) -> bool {
        matches!(self.kind, ObjectKind::K1Tc | ObjectKind::K1K)
    }

    fn canonical_ideal(&self) -> String {
        if self.is_k1() {
            ideal_string(self.p, 1)
        } else {
            ideal_string(self.p, self.n + 1)
        }
    }
}

fn module_table(module: &ModuleOverPolyGen, (lo, hi): (i64, i64)) -> ClassTable {
    let mut entries = Vec::new();
    for g in &module.generators.entries {
        let mut m = 0;
        while g.stem + m * module.v_stem <= hi {
            let s = g.stem + m * module.v_stem;
            if s >= lo {
                let label = match m {
                    0 => g.label.clone(),
                    1 => format!("v₂·{}", g.label),
                    _ => format!("v₂{}·{}", superscript(m), g.label),
                };
                entries.push(ClassEntry::new(label, s, g.weight));
            }
            m += 1;
        }
    }
    ClassTable::from_entries(entries)
}

/// Run one pipeline stage and package it as a chart document.
pub fn compute(req: &ComputeRequest) -> Result<ChartDocument> {
    let (p, n) = (req.p, req.n);
    crate::gfp::Fp::new(p)?;
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let ideal = req.canonical_ideal();
    if let Some(given) = &req.ideal {
        if normalize_ideal(given) != ideal {
            return Err(Error::Invalid(format!(
                "{} is computed modulo {ideal}; other ideals are not supported (got {given})",
                req.kind.name()
            )));
        }
    }
    if req.is_k1() && n != 1 {
        return Err(Error::Invalid(format!("{} is defined for k(1) only; pass --n 1", req.kind.name())));
    }
    if req.field.is_some() && req.kind != ObjectKind::Tc {
        return Err(Error::Invalid("--field applies to tc only".into()));
    }
    let axis = req.axis.unwrap_or(req.kind.default_axis());
    let big_p = ipow(p, n as u32 + 1);
    let pn = ipow(p, n as u32);
    let weights = (-(n as i64) - 3, 3);
    let table = match req.kind {
        ObjectKind::Thh => {
            let stems = req.window.unwrap_or((0, 4 * big_p));
            thh_kn_basis(p, n, &Window::new(stems, weights), true)?.to_table()
        }
        ObjectKind::HodgeTate => {
            let stems = req.window.unwrap_or((-2 * big_p, 2 * big_p));
            hodge_tate_knt(p, n, &Window::new(stems, weights))?
        }
        ObjectKind::Tp => {
            let stems = req.window.unwrap_or(syntomic_stems(p, n));
            let ys = req.yrange.unwrap_or((-(big_p + pn), big_p / 2 + 1));
            prismatic_einf(p, n, &Window { stems, weights, aux: Some(ys) })?.table
        }
        ObjectKind::Tcminus => {
            let stems = req.window.unwrap_or(syntomic_stems(p, n));
            let ys = req.yrange.unwrap_or((-1, big_p + pn));
            let parts: Vec<NygaardPart> = NygaardPart::ALL
                .into_iter()
                .filter(|&x| !(req.exclude_a01 && x == NygaardPart::A01))
                .collect();
            tcminus_einf(p, n, stems, ys.1.max(0))?.table(&parts)
        }
        ObjectKind::Tc => match req.field {
            None => can_phi_assemble(p, n)?.table(),
            Some(FieldSpec::Degree(m)) => syntomic_over_field(p, n, m)?.table(),
            Some(FieldSpec::AlgebraicallyClosed) => syntomic_closed(p, n)?.table(),
        },
        ObjectKind::K1Tc | ObjectKind::K1K => {
            let module = if req.kind == ObjectKind::K1Tc {
                tc_k1(p)?.module
            } else {
                let top = tc_k1(p)?.module.generators.stem_range().map_or(0, |r| r.1);
                k_k1(p, (-1, top))?.module
            };
            let top = module.generators.stem_range().map_or(0, |r| r.1);
            module_table(&module, req.window.unwrap_or((-1, top)))
        }
    };
    let doc = ChartDocument::new(req.kind, p, n, ideal.clone(), axis, table)?;
    let mut kept = Vec::new();
    for e in doc.entries.iter() {
        let y = doc.y(e)?;
        let in_stems = req.window.is_none_or(|(lo, hi)| e.stem >= lo && e.stem <= hi);
        let in_ys = req.yrange.is_none_or(|(lo, hi)| y >= lo && y <= hi);
        if in_stems && in_ys {
            kept.push(e.clone());
        }
    }
    ChartDocument::new(req.kind, p, n, ideal, axis, ClassTable { entries: kept })
}

/// Plot frame: stem and y ranges of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    pub stems: (i64, i64),
    pub ys: (i64, i64),
}

impl Frame {
    pub fn fit(doc: &ChartDocument) -> Result<Frame> {
        let mut frame = Frame { stems: (0, 0), ys: (0, 0) };
        for (i, e) in doc.entries.iter().enumerate() {
            let y = doc.y(e)?;
            if i == 0 {
                frame = Frame { stems: (e.stem, e.stem), ys: (y, y) };
            }
            frame.stems = (frame.stems.0.min(e.stem), frame.stems.1.max(e.stem));
            frame.ys = (frame.ys.0.min(y), frame.ys.1.max(y));
        }
        Ok(Frame { stems: (frame.stems.0 - 1, frame.stems.1 + 1), ys: (frame.ys.0 - 1, frame.ys.1 + 1) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Svg,
    Tikz,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "svg" => Ok(Format::Svg),
            "tikz" => Ok(Format::Tikz),
            _ => Err(Error::Invalid(format!("unknown format {s:?} (svg or tikz)"))),
        }
    }
}

/// Entries with their plot position and their rank among entries sharing
/// that lattice point; the rank drives the vertical offset.
fn placed(doc: &ChartDocument) -> Result<Vec<(&ClassEntry, i64, usize)>> {
    let mut counts: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let mut out = Vec::new();
    for e in &doc.entries {
        let y = doc.y(e)?;
        let c = counts.entry((e.stem, y)).or_default();
        out.push((e, y, *c));
        *c += 1;
    }
    Ok(out)
}

/// Boxes mark F_p generators, but only when some other coefficient appears.
fn boxes_fp(doc: &ChartDocument) -> bool {
    doc.entries.iter().any(|e| e.coeff != Coeff::Fp)
}

pub fn render(doc: &ChartDocument, format: Format, frame: Option<Frame>) -> Result<String> {
    let frame = match frame {
        Some(f) => f,
        None => Frame::fit(doc)?,
    };
    match format {
        Format::Svg => render_svg(doc, frame),
        Format::Tikz => render_tikz(doc, frame),
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

const UNIT: i64 = 48;
const MARGIN: i64 = 40;
const LINE: i64 = 13;

fn render_svg(doc: &ChartDocument, frame: Frame) -> Result<String> {
    let width = (frame.stems.1 - frame.stems.0) * UNIT + 2 * MARGIN;
    let height = (frame.ys.1 - frame.ys.0) * UNIT + 2 * MARGIN;
    let px = |s: i64| MARGIN + (s - frame.stems.0) * UNIT;
    let py = |y: i64| MARGIN + (frame.ys.1 - y) * UNIT;
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="serif" font-size="11">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"<title>{} p={} n={} mod {}</title>"#,
        doc.object.name(),
        doc.p,
        doc.n,
        xml_escape(&doc.ideal)
    )
    .unwrap();
    writeln!(out, r##"<g stroke="#d3d3d3" stroke-width="1">"##).unwrap();
    for s in frame.stems.0..=frame.stems.1 {
        writeln!(out, r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}"/>"#, px(s), py(frame.ys.1), py(frame.ys.0)).unwrap();
    }
    for y in frame.ys.0..=frame.ys.1 {
        writeln!(out, r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}"/>"#, py(y), px(frame.stems.0), px(frame.stems.1)).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r##"<g fill="#555555" text-anchor="middle">"##).unwrap();
    for s in frame.stems.0..=frame.stems.1 {
        writeln!(out, r#"<text x="{}" y="{}">{s}</text>"#, px(s), py(frame.ys.0) + 18).unwrap();
    }
    for y in frame.ys.0..=frame.ys.1 {
        writeln!(out, r#"<text x="{}" y="{}">{y}</text>"#, px(frame.stems.0) - 18, py(y) + 4).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    let boxed = boxes_fp(doc);
    writeln!(out, r#"<g>"#).unwrap();
    for (e, y, rank) in placed(doc)? {
        let (x, cy) = (px(e.stem), py(y));
        let ty = cy + 14 + rank as i64 * LINE;
        writeln!(out, r#"<circle cx="{x}" cy="{cy}" r="3"/>"#).unwrap();
        let label = xml_escape(&e.label);
        if boxed && e.coeff == Coeff::Fp {
            let w = 7 * e.label.chars().filter(|c| !is_combining(*c)).count() as i64 + 6;
            writeln!(out, r#"<rect x="{}" y="{}" width="{w}" height="14" fill="none" stroke="black"/>"#, x - w / 2, ty - 11)
                .unwrap();
        }
        writeln!(out, r#"<text x="{x}" y="{ty}" text-anchor="middle" data-coeff="{}">{label}</text>"#, e.coeff.tag()).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

fn is_combining(c: char) -> bool {
    ('\u{0300}'..='\u{036f}').contains(&c)
}

/// Convert an engine label to TeX math.
pub fn label_to_tex(label: &str) -> String {
    fn flush(out: &mut String, buf: &mut String, kind: char) {
        if !buf.is_empty() {
            write!(out, "{kind}{{{buf}}}").unwrap();
            buf.clear();
        }
    }
    let mut out = String::new();
    let (mut sub, mut sup) = (String::new(), String::new());
    let mut chars = label.chars().peekable();
    while let Some(c) = chars.next() {
        let sub_digit = ('₀'..='₉').contains(&c);
        let sup_char = match c {
            '⁰' => Some('0'),
            '¹' => Some('1'),
            '²' => Some('2'),
            '³' => Some('3'),
            '⁴'..='⁹' => char::from_digit(c as u32 - '⁴' as u32 + 4, 10),
            '⁻' => Some('-'),
            _ => None,
        };
        if !sub_digit {
            flush(&mut out, &mut sub, '_');
        }
        if sup_char.is_none() {
            flush(&mut out, &mut sup, '^');
        }
        if sub_digit {
            sub.push(char::from_digit(c as u32 - '₀' as u32, 10).unwrap());
            continue;
        }
        if let Some(d) = sup_char {
            sup.push(d);
            continue;
        }
        match c {
            'ε' => {
                if chars.peek() == Some(&'\u{0304}') {
                    chars.next();
                    out.push_str("\\bar{\\varepsilon}");
                } else {
                    out.push_str("\\varepsilon");
                }
            }
            'λ' => out.push_str("\\lambda"),
            'μ' => out.push_str("\\mu"),
            '∂' => out.push_str("\\partial "),
            '·' => out.push_str("\\cdot "),
            c => out.push(c),
        }
    }
    flush(&mut out, &mut sub, '_');
    flush(&mut out, &mut sup, '^');
    out
}

fn render_tikz(doc: &ChartDocument, frame: Frame) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "% {} p={} n={} mod {}", doc.object.name(), doc.p, doc.n, doc.ideal).unwrap();
    writeln!(out, "\\begin{{tikzpicture}}[radius=1,yscale=2]").unwrap();
    let (s0, s1, y0, y1) = (frame.stems.0, frame.stems.1, frame.ys.0, frame.ys.1);
    writeln!(out, "\\foreach \\n in {{{s0},{},...,{s1}}} \\node [below] at (\\n,-.8{y0:+}) {{$\\n$}};", s0 + 1).unwrap();
    writeln!(out, "\\foreach \\s in {{{y0},{},...,{y1}}} \\node [left] at (-.3{s0:+},\\s) {{$\\s$}};", y0 + 1).unwrap();
    writeln!(out, "\\draw [thin,color=lightgray] ({s0},{y0}) grid ({s1},{y1});").unwrap();
    let boxed = boxes_fp(doc);
    for (e, y, rank) in placed(doc)? {
        let mut opts = Vec::new();
        if boxed && e.coeff == Coeff::Fp {
            opts.push("draw".to_string());
            opts.push("minimum size=.1cm".to_string());
        }
        opts.push("below".to_string());
        if rank > 0 {
            opts.push(format!("yshift=-{}pt", 9 * rank));
        }
        writeln!(out, "\\node [{}] at ({},{y}) {{${}$}};", opts.join(","), e.stem, label_to_tex(&e.label)).unwrap();
    }
    writeln!(out, "\\end{{tikzpicture}}").unwrap();
    Ok(out)
}

/// One transcribed figure: how to compute it and where its fixtures live.
#[derive(Debug, Clone)]
pub struct FigureSpec {
    pub name: &'static str,
    pub request: ComputeRequest,
}

pub fn figure_specs() -> Vec<FigureSpec> {
    vec![
        FigureSpec { name: "fig1", request: ComputeRequest::new(ObjectKind::Tc, 2, 2).window(-2, 26).yrange(-3, 3) },
        FigureSpec { name: "fig2", request: ComputeRequest::new(ObjectKind::Tp, 2, 2).window(-2, 27).yrange(-12, 5) },
        FigureSpec {
            name: "fig3",
            request: ComputeRequest::new(ObjectKind::Tcminus, 2, 2).window(-2, 27).yrange(-1, 12).exclude_a01(),
        },
        FigureSpec {
            name: "fig4",
            request: ComputeRequest::new(ObjectKind::Tc, 2, 2)
                .window(-2, 26)
                .yrange(-3, 3)
                .field(FieldSpec::AlgebraicallyClosed),
        },
        FigureSpec { name: "fig5", request: ComputeRequest::new(ObjectKind::Tc, 3, 1).window(-2, 26).yrange(-2, 3) },
    ]
}

/// A node of a hand transcription: `x y label [coeff] # note`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscribedNode {
    pub stem: i64,
    pub y: i64,
    pub label: String,
    pub coeff: Coeff,
    pub note: Option<String>,
}

pub fn parse_transcription(text: &str) -> Result<Vec<TranscribedNode>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let (body, note) = match line.split_once('#') {
            Some((b, n)) => (b.trim(), Some(n.trim().to_string()).filter(|n| !n.is_empty())),
            None => (line.trim(), None),
        };
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let bad = || Error::Invalid(format!("transcription line {}: {line:?}", i + 1));
        if fields.len() < 3 || fields.len() > 4 {
            return Err(bad());
        }
        let coeff = match fields.get(3) {
            None | Some(&"Fp") => Coeff::Fp,
            Some(&"k") => Coeff::K,
            Some(&"kFr") => Coeff::KFr,
            _ => return Err(bad()),
        };
        out.push(TranscribedNode {
            stem: fields[0].parse().map_err(|_| bad())?,
            y: fields[1].parse().map_err(|_| bad())?,
            label: fields[2].to_string(),
            coeff,
            note,
        });
    }
    Ok(out)
}

/// Differences between a document and a transcription, as readable lines.
pub fn diff_against_transcription(doc: &ChartDocument, nodes: &[TranscribedNode]) -> Result<Vec<String>> {
    let mut expected: Vec<(String, i64, i64, Coeff)> =
        nodes.iter().map(|n| (n.label.clone(), n.stem, n.y, n.coeff)).collect();
    expected.sort();
    let actual = doc.points()?;
    let mut diffs = Vec::new();
    for x in &actual {
        if !expected.contains(x) {
            diffs.push(format!("+ {} at ({}, {}) [{}]", x.0, x.1, x.2, x.3.tag()));
        }
    }
    for x in &expected {
        if !actual.contains(x) {
            diffs.push(format!("- {} at ({}, {}) [{}]", x.0, x.1, x.2, x.3.tag()));
        }
    }
    Ok(diffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tex_labels() {
        assert_eq!(label_to_tex("t⁻¹ε̄₁λ₃"), "t^{-1}\\bar{\\varepsilon}_{1}\\lambda_{3}");
        assert_eq!(label_to_tex("∂"), "\\partial ");
        assert_eq!(label_to_tex("t¹²λ₃"), "t^{12}\\lambda_{3}");
    }

    #[test]
    fn ideal_forms() {
        assert_eq!(ideal_string(2, 3), "(2,v1,v2,v3)");
        assert_eq!(normalize_ideal("(2, v₁, v_2, v3)"), "(2,v1,v2,v3)");
    }

    #[test]
    fn empty_document_renders_a_grid() {
        let doc = ChartDocument::new(ObjectKind::Tc, 2, 1, ideal_string(2, 2), Axis::AdamsWeight, ClassTable::new()).unwrap();
        let svg = render(&doc, Format::Svg, None).unwrap();
        assert!(svg.contains("<line") && !svg.contains("<circle"));
        assert!(export_json(&doc).contains("\"entries\": []"));
    }

    #[test]
    fn transcription_lines() {
        let nodes = parse_transcription("# header\n-1 1 ∂ # boundary\n3 -1 ε̄₁ k\n").unwrap();
        assert_eq!(nodes.len(), 2);
        assert_eq!(nodes[1].coeff, Coeff::K);
        assert!(parse_transcription("1 x y\n").is_err());
    }
}
