//! One-point enumerative numbers, loaded from a JSON table.
//!
//! The recursion bottoms out in counts of curves with a single singular
//! point: `N(X, n)` and the lifted `N(PX, n, m)`. They are data. The shipped
//! table lives in `data/basecases.json` and is embedded in the library.
//!
//! ```
//! use curvecount::basecases::{BaseKey, BaseTable, BaseTarget};
//! use curvecount::Polynomial;
//!
//! let table = BaseTable::shipped();
//! let a1 = table.lookup(BaseKey::new(BaseTarget::A1, 2, 0)).unwrap();
//! assert_eq!(a1, Polynomial::one());
//! let far = table.lookup(BaseKey::new(BaseTarget::PE7, 5, 0)).unwrap();
//! assert!(far.is_zero());
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exactpoly::Polynomial;
use crate::recursion::{self, Sing};

const SHIPPED: &str = include_str!("../../../data/basecases.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BaseTarget {
    A1,
    A2,
    D4,
    D5,
    PA3,
    PA4,
    PA5,
    PA6,
    PA7,
    PD6,
    PD7,
    PE6,
    PE7,
}

impl BaseTarget {
    pub const ALL: [BaseTarget; 13] = [
        BaseTarget::A1,
        BaseTarget::A2,
        BaseTarget::D4,
        BaseTarget::D5,
        BaseTarget::PA3,
        BaseTarget::PA4,
        BaseTarget::PA5,
        BaseTarget::PA6,
        BaseTarget::PA7,
        BaseTarget::PD6,
        BaseTarget::PD7,
        BaseTarget::PE6,
        BaseTarget::PE7,
    ];

    /// Lifted targets carry a direction and a second index `m`.
    pub fn is_projectivized(self) -> bool {
        !matches!(
            self,
            BaseTarget::A1 | BaseTarget::A2 | BaseTarget::D4 | BaseTarget::D5
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            BaseTarget::A1 => "A1",
            BaseTarget::A2 => "A2",
            BaseTarget::D4 => "D4",
            BaseTarget::D5 => "D5",
            BaseTarget::PA3 => "PA3",
            BaseTarget::PA4 => "PA4",
            BaseTarget::PA5 => "PA5",
            BaseTarget::PA6 => "PA6",
            BaseTarget::PA7 => "PA7",
            BaseTarget::PD6 => "PD6",
            BaseTarget::PD7 => "PD7",
            BaseTarget::PE6 => "PE6",
            BaseTarget::PE7 => "PE7",
        }
    }
}

impl fmt::Display for BaseTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BaseTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<BaseTarget> {
        BaseTarget::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Schema(format!("unknown base target {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BaseKey {
    pub target: BaseTarget,
    pub n: u32,
    pub m: u32,
}

impl BaseKey {
    pub fn new(target: BaseTarget, n: u32, m: u32) -> BaseKey {
        BaseKey { target, n, m }
    }
}

impl fmt::Display for BaseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.target.is_projectivized() {
            write!(f, "{}({},{})", self.target, self.n, self.m)
        } else {
            write!(f, "{}({})", self.target, self.n)
        }
    }
}

/// Every key a table must provide: `n` in `0..=2`, and `m` in `0..=1` for
/// lifted targets.
pub fn manifest() -> Vec<BaseKey> {
    let mut keys = vec![];
    for t in BaseTarget::ALL {
        for n in 0..3 {
            let ms = if t.is_projectivized() { 0..2 } else { 0..1 };
            for m in ms {
                keys.push(BaseKey::new(t, n, m));
            }
        }
    }
    keys
}

/// The node count through `n` generic lines.
pub fn a1_closed_form(n: u32) -> Polynomial {
    match n {
        0 => Polynomial::from_ints(&[3, -6, 3]),
        1 => Polynomial::from_ints(&[-3, 3]),
        2 => Polynomial::one(),
        _ => Polynomial::zero(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub poly: Polynomial,
    pub source: String,
    pub min_d: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    target: String,
    n: u32,
    m: u32,
    coeffs: Vec<String>,
    source: String,
    min_d: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTable {
    entries: Vec<RawEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseTable {
    entries: BTreeMap<BaseKey, Entry>,
}

impl BaseTable {
    /// The table bundled with the crate.
    pub fn shipped() -> BaseTable {
        BaseTable::from_json(SHIPPED).expect("shipped base table is valid")
    }

    /// The raw bytes of the bundled table.
    pub fn shipped_json() -> &'static str {
        SHIPPED
    }

    pub fn load(path: impl AsRef<Path>) -> Result<BaseTable> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        BaseTable::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn from_json(text: &str) -> Result<BaseTable> {
        let raw: RawTable = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        let mut entries = BTreeMap::new();
        for e in raw.entries {
            let target: BaseTarget = e.target.parse()?;
            let key = BaseKey::new(target, e.n, e.m);
            if e.n > 2 || e.m > 1 || (!target.is_projectivized() && e.m != 0) {
                return Err(Error::Schema(format!(
                    "key {key} (m={}) is outside the manifest",
                    e.m
                )));
            }
            let entry = Entry {
                poly: Polynomial::from_strings(&e.coeffs)?,
                source: e.source,
                min_d: e.min_d,
            };
            if entries.insert(key, entry).is_some() {
                return Err(Error::Schema(format!("duplicate entry {key}")));
            }
        }
        BaseTable::from_entries(entries)
    }

    /// Validates coverage of the manifest and the node rows.
    pub fn from_entries(entries: BTreeMap<BaseKey, Entry>) -> Result<BaseTable> {
        let missing: Vec<BaseKey> = manifest()
            .into_iter()
            .filter(|k| !entries.contains_key(k))
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingKey(missing));
        }
        for n in 0..3 {
            let found = &entries[&BaseKey::new(BaseTarget::A1, n, 0)].poly;
            let expected = a1_closed_form(n);
            if *found != expected {
                return Err(Error::A1Mismatch {
                    n,
                    expected,
                    found: found.clone(),
                });
            }
        }
        Ok(BaseTable { entries })
    }

    /// Canonical serialization, entries in manifest order.
    pub fn to_json(&self) -> String {
        let raw = RawTable {
            entries: self
                .entries
                .iter()
                .map(|(k, e)| RawEntry {
                    target: k.target.name().to_string(),
                    n: k.n,
                    m: k.m,
                    coeffs: e.poly.to_strings(),
                    source: e.source.clone(),
                    min_d: e.min_d,
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&raw).expect("serializable");
        s.push('\n');
        s
    }

    /// SHA-256 of the canonical serialization, hex encoded.
    pub fn fingerprint(&self) -> String {
        Sha256::digest(self.to_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BaseKey, &Entry)> {
        self.entries.iter()
    }

    pub fn entry(&self, key: BaseKey) -> Option<&Entry> {
        self.entries.get(&key)
    }

    /// Replaces one stored polynomial. Node rows are still checked.
    pub fn with_entry(&self, key: BaseKey, poly: Polynomial) -> Result<BaseTable> {
        let mut entries = self.entries.clone();
        let e = entries
            .get_mut(&key)
            .ok_or_else(|| Error::MissingKey(vec![key]))?;
        e.poly = poly;
        BaseTable::from_entries(entries)
    }

    /// Stored value, with `n ≥ 3` giving zero and `m ≥ 2` reduced through
    /// `N(n, m) = −3N(n+1, m−1) − 3N(n+2, m−2)`.
    pub fn lookup(&self, key: BaseKey) -> Result<Polynomial> {
        if key.n >= 3 {
            return Ok(Polynomial::zero());
        }
        if !key.target.is_projectivized() && key.m != 0 {
            return Err(Error::InvalidKey(format!(
                "{} takes no m index (m={})",
                key.target, key.m
            )));
        }
        if key.m >= 2 {
            let a = self.lookup(BaseKey::new(key.target, key.n + 1, key.m - 1))?;
            let b = self.lookup(BaseKey::new(key.target, key.n + 2, key.m - 2))?;
            return Ok((a + b).scale_int(-3));
        }
        self.entries
            .get(&key)
            .map(|e| e.poly.clone())
            .ok_or_else(|| Error::MissingKey(vec![key]))
    }
}

/// `3(d−2)(d−1)(3d²−3d−11)`, the ordered binodal count with no line
/// conditions.
pub fn binodal_closed_form() -> Polynomial {
    Polynomial::from_ints(&[3])
        * Polynomial::from_ints(&[-2, 1])
        * Polynomial::from_ints(&[-1, 1])
        * Polynomial::from_ints(&[-11, -3, 3])
}

/// `12(d−3)(3d³−6d²−11d+18)`, node plus cusp.
pub fn node_cusp_closed_form() -> Polynomial {
    Polynomial::from_ints(&[12])
        * Polynomial::from_ints(&[-3, 1])
        * Polynomial::from_ints(&[18, -11, -6, 3])
}

/// `6(d−3)(25d³−71d²−122d+280)`, node plus tacnode.
pub fn node_tacnode_closed_form() -> Polynomial {
    Polynomial::from_ints(&[6])
        * Polynomial::from_ints(&[-3, 1])
        * Polynomial::from_ints(&[280, -122, -71, 25])
}

/// The three low-degree closed forms the pipeline must reproduce at `n = 0`.
pub fn reference_forms() -> [(Sing, Polynomial); 3] {
    [
        (Sing::A1, binodal_closed_form()),
        (Sing::A2, node_cusp_closed_form()),
        (Sing::A3, node_tacnode_closed_form()),
    ]
}

/// The cusp count forced by the binodal recursion and its closed form:
/// `3N(A2,0) = 9(d−1)⁴ − 3(d−1)² − 3d(d−1) − 3(d−2)(d−1)(3d²−3d−11)`.
pub fn cusp_identity_rhs() -> Polynomial {
    let dm1 = Polynomial::from_ints(&[-1, 1]);
    let three_a2 = dm1.pow(4).scale_int(9)
        - dm1.pow(2).scale_int(3)
        - (Polynomial::d() * &dm1).scale_int(3)
        - binodal_closed_form();
    three_a2.div_exact(3, false).expect("nonzero divisor")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub checks: Vec<Check>,
    /// Entries pinned by an identity or closed form.
    pub anchored: BTreeSet<BaseKey>,
    /// Entries that rest on external sourcing alone.
    pub external: BTreeSet<BaseKey>,
}

impl ConsistencyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// `(passed, total)` over the closed-form reproductions.
    pub fn closed_form_score(&self) -> (usize, usize) {
        let ours: Vec<_> = self
            .checks
            .iter()
            .filter(|c| c.name.starts_with("closed form"))
            .collect();
        (ours.iter().filter(|c| c.passed).count(), ours.len())
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks the table against everything that can be said without external
/// data: the cusp identity, the three low-degree closed forms, and the
/// declared validity bounds.
pub fn consistency_check(table: &BaseTable) -> ConsistencyReport {
    let mut checks = vec![];
    let mut anchored = BTreeSet::new();

    let a2 = table.lookup(BaseKey::new(BaseTarget::A2, 0, 0));
    let want = cusp_identity_rhs();
    checks.push(match a2 {
        Ok(p) => Check {
            name: "cusp identity".into(),
            passed: p == want,
            detail: format!("A2(0) = {p}, identity gives {want}"),
        },
        Err(e) => Check {
            name: "cusp identity".into(),
            passed: false,
            detail: e.to_string(),
        },
    });

    for (sing, form) in reference_forms() {
        let mut ev = recursion::Evaluator::new(table);
        let deps = ev.final_dependencies(sing, 0);
        let name = format!("closed form {}", sing.pair_label());
        let check = match ev.final_count(sing, 0) {
            Ok(fc) => Check {
                passed: fc.poly == form,
                detail: format!("pipeline {} vs closed form {}", fc.poly, form),
                name,
            },
            Err(e) => Check {
                name,
                passed: false,
                detail: e.to_string(),
            },
        };
        if check.passed {
            anchored.extend(deps);
        }
        checks.push(check);
    }
    for n in 0..3 {
        anchored.insert(BaseKey::new(BaseTarget::A1, n, 0));
    }
    if checks[0].passed {
        anchored.insert(BaseKey::new(BaseTarget::A2, 0, 0));
    }

    for sing in Sing::ALL {
        let mut ev = recursion::Evaluator::new(table);
        let name = format!("bound {}", sing.pair_label());
        let check = match ev.final_count(sing, 0) {
            Ok(fc) => {
                let low = ev
                    .final_dependencies(sing, 0)
                    .iter()
                    .filter_map(|k| table.entry(*k))
                    .any(|e| e.min_d == 0);
                Check {
                    passed: fc.min_valid_d >= sing.bound() && !low,
                    detail: format!(
                        "valid from d = {}, validity bound {}",
                        fc.min_valid_d,
                        sing.bound()
                    ),
                    name,
                }
            }
            Err(e) => Check {
                name,
                passed: false,
                detail: e.to_string(),
            },
        };
        checks.push(check);
    }

    let external = manifest()
        .into_iter()
        .filter(|k| !anchored.contains(k))
        .collect();
    ConsistencyReport {
        checks,
        anchored,
        external,
    }
}
