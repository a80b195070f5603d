//! Re-derives every left-hand side of the recursion from the bundle data.
//!
//! The coefficients in [`RuleTable::standard`] are typed in by hand. Here
//! they are recomputed from first Chern classes, the splitting principle
//! and the fibre pushforward, and the two are compared term by term.
//!
//! ```
//! use curvecount::deriver::{crosscheck_all, derive_triple, task_for};
//! use curvecount::Polynomial;
//!
//! let t = derive_triple(&task_for("A1PA4").unwrap()).unwrap();
//! assert_eq!(t, [2.into(), 2.into(), Polynomial::from_ints(&[-6, 2])]);
//!
//! let report = crosscheck_all();
//! assert_eq!(report.score(), (13, 13));
//! ```

use std::fmt;

use crate::basecases::a1_closed_form;
use crate::cohomring::{BundleSpec, RingClass};
use crate::error::{Error, Result};
use crate::exactpoly::Polynomial;
use crate::recursion::{RecursionRule, RuleTable, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairingMode {
    /// Pair on the lifted space; push forward when the predecessor lives
    /// downstairs.
    FullProjectivization,
    /// Pair on the product of two planes and extract the top degree in the
    /// second one.
    DiagonalP2,
    /// Pair the `m = 1` triple-point row downstairs.
    DownstairsD4,
    /// The ring relation itself.
    Reduction,
}

impl fmt::Display for PairingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairingMode::FullProjectivization => "full-projectivization",
            PairingMode::DiagonalP2 => "diagonal-P2",
            PairingMode::DownstairsD4 => "downstairs-D4",
            PairingMode::Reduction => "reduction",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTask {
    pub rule: &'static str,
    /// Bundles whose Euler classes are multiplied.
    pub bundles: Vec<BundleSpec>,
    pub mode: PairingMode,
    /// Power of `λ` the target row pairs against, for rows pushed down.
    pub m_row: Option<u32>,
}

fn task(
    rule: &'static str,
    bundles: &[&str],
    mode: PairingMode,
    m_row: Option<u32>,
) -> DerivationTask {
    DerivationTask {
        rule,
        bundles: bundles
            .iter()
            .map(|n| BundleSpec::named(n).expect("registered bundle"))
            .collect(),
        mode,
        m_row,
    }
}

/// One task per rule of the standard table.
pub fn standard_tasks() -> Vec<DerivationTask> {
    use PairingMode::*;
    vec![
        task("reduction", &[], Reduction, None),
        task("A1A1", &["L_A0", "V_A1"], DiagonalP2, None),
        task("A1PA2 m=0", &["V_PA2"], FullProjectivization, Some(0)),
        task("A1PA2 m=1", &["V_PA2"], FullProjectivization, Some(1)),
        task("A1PA3", &["L_PA3"], FullProjectivization, None),
        task("A1PA4", &["L_PA4"], FullProjectivization, None),
        task("A1PA5", &["L_PA5"], FullProjectivization, None),
        task("A1PA6", &["L_PA6"], FullProjectivization, None),
        task("A1PD4 m=0", &["L_PD4"], FullProjectivization, None),
        task("A1PD4 m=1", &["L_PA3"], DownstairsD4, Some(1)),
        task("A1PD5", &["L_PD5"], FullProjectivization, None),
        task("A1PD6", &["L_PD6"], FullProjectivization, None),
        task("A1PE6", &["L_PE6"], FullProjectivization, None),
    ]
}

pub fn task_for(rule: &str) -> Option<DerivationTask> {
    standard_tasks().into_iter().find(|t| t.rule == rule)
}

fn product_of_euler_classes(bundles: &[BundleSpec]) -> RingClass {
    bundles.iter().fold(RingClass::one(), |acc, b| {
        (&acc * &b.euler_class()).normalize()
    })
}

fn terms_from(class: &RingClass, dm_offset: i32) -> Vec<Term> {
    let mut out: Vec<Term> = class
        .expansion_coefficients()
        .into_iter()
        .map(|e| Term {
            coeff: e.coeff,
            dn: e.dn,
            dm: e.dm as i32 + dm_offset,
        })
        .collect();
    out.sort_by_key(|t| (t.dn, t.dm));
    out
}

/// The left-hand side of a rule as a list of shifted terms.
pub fn derive_terms(t: &DerivationTask) -> Result<Vec<Term>> {
    match t.mode {
        PairingMode::Reduction => {
            let l = RingClass::lambda();
            Ok(terms_from(&(&l * &l).normalize(), -2))
        }
        PairingMode::DiagonalP2 => Ok(derive_binodal_pattern()
            .into_iter()
            .enumerate()
            .map(|(j, coeff)| Term {
                coeff,
                dn: j as u32,
                dm: 0,
            })
            .collect()),
        PairingMode::FullProjectivization | PairingMode::DownstairsD4 => {
            let e = product_of_euler_classes(&t.bundles);
            let rank: u32 = t.bundles.iter().map(BundleSpec::rank).sum();
            if t.mode == PairingMode::FullProjectivization && rank == 1 {
                return Ok(terms_from(&e, 0));
            }
            let m = t
                .m_row
                .ok_or_else(|| Error::UnsupportedMode(format!("{} needs a target row", t.mode)))?;
            let paired = (&e * &RingClass::lambda().pow(m)).normalize();
            Ok(terms_from(&paired.pushforward(), 0))
        }
    }
}

/// `(c_same, c_mPlus1, c_nPlus1)` of a single line bundle, or the two
/// downstairs coefficients with a zero in the middle slot.
pub fn derive_triple(t: &DerivationTask) -> Result<[Polynomial; 3]> {
    let one_line = t.bundles.len() == 1 && t.bundles[0].rank() == 1;
    match t.mode {
        PairingMode::FullProjectivization if one_line => {}
        PairingMode::DownstairsD4 => {}
        mode => return Err(Error::UnsupportedMode(mode.to_string())),
    }
    let terms = derive_terms(t)?;
    let at = |dn, dm| -> Polynomial {
        terms
            .iter()
            .filter(|x| x.dn == dn && x.dm == dm)
            .map(|x| x.coeff.clone())
            .sum()
    };
    Ok([at(0, 0), at(0, 1), at(1, 0)])
}

/// Coefficients of `a⁰, a¹, a²` in `e(L_A0)·e(V_A1)`:
/// `(1, 3(d−1), 3(d−1)²)`.
pub fn derive_binodal_pattern() -> [Polynomial; 3] {
    let e = product_of_euler_classes(&[
        BundleSpec::named("L_A0").expect("registered"),
        BundleSpec::named("V_A1").expect("registered"),
    ]);
    debug_assert!(e.terms().all(|(m, _)| m.l == 0 && m.y + m.a == 3));
    let mut k: [Polynomial; 3] = Default::default();
    for (m, c) in e.terms() {
        k[m.a as usize] = c.clone();
    }
    k
}

/// Pairs the binodal pattern with the node counts: pushing the class down
/// to the second plane keeps only its `a²` part, so the value at `n` is
/// `k[2 − n]·N(A1, 0)`.
pub fn binodal_combination(k: &[Polynomial; 3], n: u32) -> Polynomial {
    if n > 2 {
        return Polynomial::zero();
    }
    &k[2 - n as usize] * &a1_closed_form(0)
}

/// The two multipliers of `N(n+1, m−1)` and `N(n+2, m−2)` in the ring
/// relation.
pub fn derive_reduction_rule() -> (Polynomial, Polynomial) {
    let terms = derive_terms(&task("reduction", &[], PairingMode::Reduction, None))
        .expect("reduction always derives");
    let at = |dn, dm| {
        terms
            .iter()
            .find(|t| t.dn == dn && t.dm == dm)
            .map(|t| t.coeff.clone())
            .unwrap_or_default()
    };
    (at(1, -1), at(2, -2))
}

#[derive(Clone, Debug)]
pub struct RuleCheck {
    pub label: &'static str,
    pub mode: Option<PairingMode>,
    pub derived: Vec<Term>,
    pub table: Vec<Term>,
    pub passed: bool,
    pub note: String,
}

impl RuleCheck {
    /// `(1, 3, d)` style rendering over the table's shifts.
    pub fn render(terms: &[Term]) -> String {
        let parts: Vec<String> = terms.iter().map(|t| t.coeff.to_string()).collect();
        format!("({})", parts.join(", "))
    }
}

#[derive(Clone, Debug)]
pub struct CrosscheckReport {
    pub rows: Vec<RuleCheck>,
}

impl CrosscheckReport {
    pub fn score(&self) -> (usize, usize) {
        (
            self.rows.iter().filter(|r| r.passed).count(),
            self.rows.len(),
        )
    }

    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

fn compare(rule: &RecursionRule, derived: &[Term]) -> bool {
    let mut shifts: Vec<(u32, i32)> = rule
        .lhs
        .iter()
        .map(|t| (t.dn, t.dm))
        .chain(derived.iter().map(|t| (t.dn, t.dm)))
        .collect();
    shifts.sort();
    shifts.dedup();
    shifts.into_iter().all(|(dn, dm)| {
        let d: Polynomial = derived
            .iter()
            .filter(|t| t.dn == dn && t.dm == dm)
            .map(|t| t.coeff.clone())
            .sum();
        d == rule.lhs_coeff(dn, dm)
    })
}

/// Aligns derived terms with the table's order of shifts.
fn aligned(rule: &RecursionRule, derived: &[Term]) -> Vec<Term> {
    let mut out: Vec<Term> = rule
        .lhs
        .iter()
        .map(|t| Term {
            coeff: derived
                .iter()
                .filter(|x| x.dn == t.dn && x.dm == t.dm)
                .map(|x| x.coeff.clone())
                .sum(),
            dn: t.dn,
            dm: t.dm,
        })
        .collect();
    for x in derived {
        if !rule.lhs.iter().any(|t| t.dn == x.dn && t.dm == x.dm) {
            out.push(x.clone());
        }
    }
    out
}

/// Compares every rule of `rules` against its task in `tasks`.
pub fn crosscheck(rules: &RuleTable, tasks: &[DerivationTask]) -> CrosscheckReport {
    let rows = rules
        .rules()
        .iter()
        .map(|rule| {
            let Some(task) = tasks.iter().find(|t| t.rule == rule.label) else {
                return RuleCheck {
                    label: rule.label,
                    mode: None,
                    derived: vec![],
                    table: rule.lhs.clone(),
                    passed: false,
                    note: "no derivation task".into(),
                };
            };
            match derive_terms(task) {
                Ok(derived) => {
                    let mut passed = compare(rule, &derived);
                    let mut note = String::new();
                    if task.mode == PairingMode::DiagonalP2 {
                        let k = derive_binodal_pattern();
                        let product_ok = (0..4).all(|n| {
                            binodal_combination(&k, n) == &a1_closed_form(0) * &a1_closed_form(n)
                        });
                        if !product_ok {
                            note = "pattern does not reproduce N(A1,0)·N(A1,n)".into();
                        }
                        passed &= product_ok;
                    }
                    if task.mode == PairingMode::DownstairsD4 {
                        let bundle = product_of_euler_classes(&task.bundles);
                        let degree = bundle.pushforward();
                        if degree != RingClass::constant(Polynomial::constant(3)) {
                            note = format!("fibre degree {degree}, expected 3");
                            passed = false;
                        }
                    }
                    RuleCheck {
                        label: rule.label,
                        mode: Some(task.mode),
                        derived: aligned(rule, &derived),
                        table: rule.lhs.clone(),
                        passed,
                        note,
                    }
                }
                Err(e) => RuleCheck {
                    label: rule.label,
                    mode: Some(task.mode),
                    derived: vec![],
                    table: rule.lhs.clone(),
                    passed: false,
                    note: e.to_string(),
                },
            }
        })
        .collect();
    CrosscheckReport { rows }
}

pub fn crosscheck_all() -> CrosscheckReport {
    crosscheck(&RuleTable::standard(), &standard_tasks())
}
