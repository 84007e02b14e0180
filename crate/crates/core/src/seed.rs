//! The bundled seed corpus: the membership-inference record and a small catalog.

use crate::aibom::{parse_aibom, AibomDocument};
use crate::catalog::{load_catalog, Catalog};
use crate::record::{parse_record, VulnerabilityRecord};
use crate::severity::{parse_vector, SeverityVector};

pub const SEED_RECORD: &str = include_str!("../../../seed/ai-cve-2024-1234.json");
pub const SEED_AIBOM: &str = include_str!("../../../seed/aibom/AI-CVE-2024-1234.json");
pub const SEED_WEAKNESSES: &str = include_str!("../../../seed/catalog/weaknesses.json");
pub const SEED_MITIGATIONS: &str = include_str!("../../../seed/catalog/mitigations.json");
pub const SEED_CATALOG_VERSION: &str = "seed-1";

pub const SEED_RECORD_ID: &str = "AI-CVE-2024-1234";

/// Network-reachable query API, low complexity, confidentiality and
/// model-inversion exposure high.
pub const ANCHOR_VECTOR: &str = "AIVSS:1.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:N/A:N/DP:N/MI:H/AE:N/DS:N";

pub fn seed_catalog() -> Catalog {
    load_catalog(SEED_CATALOG_VERSION, &[SEED_WEAKNESSES, SEED_MITIGATIONS]).expect("seed catalog loads")
}

pub fn seed_record() -> VulnerabilityRecord {
    parse_record(SEED_RECORD).expect("seed record parses")
}

pub fn seed_aibom() -> AibomDocument {
    parse_aibom(SEED_AIBOM).expect("seed AIBOM parses")
}

pub fn anchor_vector() -> SeverityVector {
    parse_vector(ANCHOR_VECTOR).expect("anchor vector parses")
}
