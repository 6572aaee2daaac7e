//! The output record shared by every stage: labeled classes with bidegrees.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bigraded::Element;

/// Coefficient space of a class: the prime field, a perfect field k, or the
/// Frobenius coinvariants k_{Fr}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Coeff {
    #[serde(rename = "Fp")]
    Fp,
    #[serde(rename = "k")]
    K,
    #[serde(rename = "kFr")]
    KFr,
}

impl Coeff {
    pub fn tag(self) -> &'static str {
        match self {
            Coeff::Fp => "Fp",
            Coeff::K => "k",
            Coeff::KFr => "kFr",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassEntry {
    pub label: String,
    pub stem: i64,
    pub weight: i64,
    pub nygaard: Option<i64>,
    pub coeff: Coeff,
}

impl ClassEntry {
    pub fn new(label: impl Into<String>, stem: i64, weight: i64) -> Self {
        ClassEntry {
            label: label.into(),
            stem,
            weight,
            nygaard: None,
            coeff: Coeff::Fp,
        }
    }

    pub fn nygaard(mut self, k: i64) -> Self {
        self.nygaard = Some(k);
        self
    }

    pub fn coeff(mut self, c: Coeff) -> Self {
        self.coeff = c;
        self
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTable {
    pub entries: Vec<ClassEntry>,
}

impl ClassTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_entries(mut entries: Vec<ClassEntry>) -> Self {
        sort_entries(&mut entries);
        ClassTable { entries }
    }

    pub fn push(&mut self, e: ClassEntry) {
        self.entries.push(e);
    }

    /// Sort by (stem, weight, label), the order used for serialization.
    pub fn sort(&mut self) {
        sort_entries(&mut self.entries);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of classes in each (stem, weight).
    pub fn dims(&self) -> BTreeMap<(i64, i64), usize> {
        let mut d = BTreeMap::new();
        for e in &self.entries {
            *d.entry((e.stem, e.weight)).or_insert(0) += 1;
        }
        d
    }

    pub fn dim_at(&self, stem: i64, weight: i64) -> usize {
        self.entries
            .iter()
            .filter(|e| e.stem == stem && e.weight == weight)
            .count()
    }

    /// Sorted (label, stem, weight) triples, for multiset comparisons.
    pub fn label_multiset(&self) -> Vec<(String, i64, i64)> {
        let mut v: Vec<_> = self
            .entries
            .iter()
            .map(|e| (e.label.clone(), e.stem, e.weight))
            .collect();
        v.sort();
        v
    }

    pub fn stem_range(&self) -> Option<(i64, i64)> {
        let lo = self.entries.iter().map(|e| e.stem).min()?;
        let hi = self.entries.iter().map(|e| e.stem).max()?;
        Some((lo, hi))
    }

    pub fn find(&self, label: &str) -> Option<&ClassEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn filter(&self, keep: impl Fn(&ClassEntry) -> bool) -> ClassTable {
        ClassTable {
            entries: self.entries.iter().filter(|e| keep(e)).cloned().collect(),
        }
    }

    pub fn extend(&mut self, other: ClassTable) {
        self.entries.extend(other.entries);
    }
}

fn sort_entries(entries: &mut [ClassEntry]) {
    entries.sort_by(|a, b| {
        (a.stem, a.weight, &a.label, a.nygaard, a.coeff).cmp(&(b.stem, b.weight, &b.label, b.nygaard, b.coeff))
    });
}

/// A basis element carried together with its display name.
#[derive(Debug, Clone)]
pub struct LabeledElement {
    pub label: String,
    pub element: Element,
    pub stem: i64,
    pub weight: i64,
    pub lambda_divisible: bool,
}

#[derive(Debug, Clone, Default)]
pub struct LabeledBasis {
    pub items: Vec<LabeledElement>,
}

impl LabeledBasis {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn at(&self, stem: i64, weight: i64) -> impl Iterator<Item = &LabeledElement> {
        self.items
            .iter()
            .filter(move |x| x.stem == stem && x.weight == weight)
    }

    pub fn to_table(&self) -> ClassTable {
        ClassTable::from_entries(
            self.items
                .iter()
                .map(|x| ClassEntry::new(x.label.clone(), x.stem, x.weight))
                .collect(),
        )
    }
}
