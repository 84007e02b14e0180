//! AI-CWE weakness enumeration and mitigation-technique catalog.
//!
//! A [`Catalog`] only exists in a fully cross-checked state: loading either
//! succeeds with every reference resolved and the parent/child graph acyclic,
//! or fails without producing a value.

mod entries;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde_json::Value;
use thiserror::Error;

use crate::ids::{AiCweId, MitigationId};

pub use entries::{
    AiCweEntry, BandRange, IntroductionMode, MitigationEntry, MitigationType, Orientation, Relationship,
    RelationshipKind, WeaknessClass,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("catalog document {document}: {message}")]
    MalformedDocument { document: usize, message: String },
    #[error("duplicate catalog id {0}")]
    DuplicateId(String),
    #[error("{from} references unknown {to}")]
    DanglingRef { from: String, to: String },
    #[error("parent/child relationships form a cycle: {}", render_cycle(.0))]
    RelationshipCycle(Vec<AiCweId>),
    #[error("{0} not found in catalog")]
    NotFound(String),
}

fn render_cycle(ids: &[AiCweId]) -> String {
    ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(" -> ")
}

impl CatalogError {
    pub fn code(&self) -> &'static str {
        match self {
            Self::MalformedDocument { .. } => "MALFORMED_DOCUMENT",
            Self::DuplicateId(_) => "DUPLICATE_ID",
            Self::DanglingRef { .. } => "DANGLING_REF",
            Self::RelationshipCycle(_) => "RELATIONSHIP_CYCLE",
            Self::NotFound(_) => "NOT_FOUND",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Catalog {
    weaknesses: BTreeMap<AiCweId, AiCweEntry>,
    mitigations: BTreeMap<MitigationId, MitigationEntry>,
    version: String,
}

/// Parses and cross-checks catalog documents.
///
/// Each document is a JSON object or an array of objects. Objects whose `id`
/// starts with `AI-CWE-` are weaknesses; `MIT-` ids are mitigations.
pub fn load_catalog<S: AsRef<str>>(version: impl Into<String>, documents: &[S]) -> Result<Catalog, CatalogError> {
    let mut weaknesses = BTreeMap::new();
    let mut mitigations = BTreeMap::new();
    for (index, document) in documents.iter().enumerate() {
        let malformed = |message: String| CatalogError::MalformedDocument { document: index, message };
        let value: Value = serde_json::from_str(document.as_ref()).map_err(|e| malformed(e.to_string()))?;
        let objects = match value {
            Value::Array(items) => items,
            obj @ Value::Object(_) => vec![obj],
            _ => return Err(malformed("expected an object or an array of objects".into())),
        };
        for object in objects {
            let id = object.get("id").and_then(Value::as_str).unwrap_or_default().to_string();
            if id.starts_with("AI-CWE-") {
                let entry: AiCweEntry =
                    serde_json::from_value(object).map_err(|e| malformed(format!("{id}: {e}")))?;
                if weaknesses.insert(entry.id, entry).is_some() {
                    return Err(CatalogError::DuplicateId(id));
                }
            } else if id.starts_with("MIT-") {
                let entry: MitigationEntry =
                    serde_json::from_value(object).map_err(|e| malformed(format!("{id}: {e}")))?;
                if mitigations.insert(entry.id, entry).is_some() {
                    return Err(CatalogError::DuplicateId(id));
                }
            } else {
                return Err(malformed(format!("entry id {id:?} is neither AI-CWE-* nor MIT-*")));
            }
        }
    }
    let catalog = Catalog {
        weaknesses,
        mitigations,
        version: version.into(),
    };
    catalog.check_references()?;
    catalog.check_acyclic()?;
    Ok(catalog)
}

impl Catalog {
    pub fn empty(version: impl Into<String>) -> Self {
        Self {
            weaknesses: BTreeMap::new(),
            mitigations: BTreeMap::new(),
            version: version.into(),
        }
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn weaknesses(&self) -> impl Iterator<Item = &AiCweEntry> {
        self.weaknesses.values()
    }

    pub fn mitigations(&self) -> impl Iterator<Item = &MitigationEntry> {
        self.mitigations.values()
    }

    pub fn contains_weakness(&self, id: AiCweId) -> bool {
        self.weaknesses.contains_key(&id)
    }

    pub fn contains_mitigation(&self, id: MitigationId) -> bool {
        self.mitigations.contains_key(&id)
    }

    pub fn get_weakness(&self, id: AiCweId) -> Result<&AiCweEntry, CatalogError> {
        self.weaknesses
            .get(&id)
            .ok_or_else(|| CatalogError::NotFound(id.to_string()))
    }

    pub fn get_mitigation(&self, id: MitigationId) -> Result<&MitigationEntry, CatalogError> {
        self.mitigations
            .get(&id)
            .ok_or_else(|| CatalogError::NotFound(id.to_string()))
    }

    /// Entries of one class, ordered by id.
    pub fn list_by_class(&self, class: WeaknessClass) -> Vec<&AiCweEntry> {
        self.weaknesses
            .values()
            .filter(|e| e.weakness_class == class)
            .collect()
    }

    /// Every mitigation that targets `id`, ordered by mitigation id.
    pub fn get_mitigations_for(&self, id: AiCweId) -> Result<Vec<&MitigationEntry>, CatalogError> {
        self.get_weakness(id)?;
        Ok(self
            .mitigations
            .values()
            .filter(|m| m.target_weaknesses.contains(&id))
            .collect())
    }

    /// Case-insensitive lookup of a weakness by its name.
    pub fn find_weakness_by_name(&self, name: &str) -> Option<&AiCweEntry> {
        let wanted = name.trim();
        self.weaknesses
            .values()
            .find(|e| e.name.eq_ignore_ascii_case(wanted))
    }

    /// Everything reachable from `id` over declared `ParentOf`/`ChildOf` edges,
    /// breadth-first with targets visited in id order. `RelatedTo` is not
    /// followed. The start node is excluded.
    pub fn resolve_relationships(&self, id: AiCweId) -> Result<Vec<AiCweId>, CatalogError> {
        self.get_weakness(id)?;
        let mut seen = BTreeSet::from([id]);
        let mut order = Vec::new();
        let mut queue = VecDeque::from([id]);
        while let Some(current) = queue.pop_front() {
            let Some(entry) = self.weaknesses.get(&current) else { continue };
            let targets: BTreeSet<AiCweId> = entry
                .relationships
                .iter()
                .filter(|r| r.kind != RelationshipKind::RelatedTo)
                .map(|r| r.target)
                .collect();
            for target in targets {
                if seen.insert(target) {
                    order.push(target);
                    queue.push_back(target);
                }
            }
        }
        Ok(order)
    }

    /// Weakness entries as a pretty JSON array, ordered by id.
    pub fn weaknesses_document(&self) -> String {
        let entries: Vec<_> = self.weaknesses.values().collect();
        serde_json::to_string_pretty(&entries).expect("catalog entries serialize") + "\n"
    }

    pub fn mitigations_document(&self) -> String {
        let entries: Vec<_> = self.mitigations.values().collect();
        serde_json::to_string_pretty(&entries).expect("catalog entries serialize") + "\n"
    }

    fn check_references(&self) -> Result<(), CatalogError> {
        for entry in self.weaknesses.values() {
            for rel in &entry.relationships {
                if !self.weaknesses.contains_key(&rel.target) {
                    return Err(CatalogError::DanglingRef {
                        from: entry.id.to_string(),
                        to: rel.target.to_string(),
                    });
                }
            }
            for mitigation in &entry.potential_mitigations {
                if !self.mitigations.contains_key(mitigation) {
                    return Err(CatalogError::DanglingRef {
                        from: entry.id.to_string(),
                        to: mitigation.to_string(),
                    });
                }
            }
        }
        for entry in self.mitigations.values() {
            for target in &entry.target_weaknesses {
                if !self.weaknesses.contains_key(target) {
                    return Err(CatalogError::DanglingRef {
                        from: entry.id.to_string(),
                        to: target.to_string(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Normalises `A ChildOf B` to `B -> A` and rejects any directed cycle.
    fn check_acyclic(&self) -> Result<(), CatalogError> {
        let mut children: BTreeMap<AiCweId, BTreeSet<AiCweId>> = BTreeMap::new();
        for entry in self.weaknesses.values() {
            for rel in &entry.relationships {
                match rel.kind {
                    RelationshipKind::ParentOf => children.entry(entry.id).or_default().insert(rel.target),
                    RelationshipKind::ChildOf => children.entry(rel.target).or_default().insert(entry.id),
                    RelationshipKind::RelatedTo => continue,
                };
            }
        }

        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut marks: BTreeMap<AiCweId, Mark> = BTreeMap::new();
        for &root in self.weaknesses.keys() {
            if marks.contains_key(&root) {
                continue;
            }
            // Iterative DFS; `path` mirrors the active stack for cycle reporting.
            let mut stack: Vec<(AiCweId, Vec<AiCweId>)> = Vec::new();
            let mut path: Vec<AiCweId> = Vec::new();
            let next = |id: AiCweId| children.get(&id).map(|c| c.iter().copied().collect()).unwrap_or_default();
            marks.insert(root, Mark::Active);
            path.push(root);
            stack.push((root, next(root)));
            while let Some((node, pending)) = stack.last_mut() {
                if let Some(child) = pending.pop() {
                    match marks.get(&child) {
                        Some(Mark::Active) => {
                            let start = path.iter().position(|p| *p == child).unwrap_or(0);
                            let mut cycle = path[start..].to_vec();
                            cycle.push(child);
                            return Err(CatalogError::RelationshipCycle(cycle));
                        }
                        Some(Mark::Done) => {}
                        None => {
                            marks.insert(child, Mark::Active);
                            path.push(child);
                            let grandchildren = next(child);
                            stack.push((child, grandchildren));
                        }
                    }
                } else {
                    marks.insert(*node, Mark::Done);
                    path.pop();
                    stack.pop();
                }
            }
        }
        Ok(())
    }
}
