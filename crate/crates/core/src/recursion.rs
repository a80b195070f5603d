//! The two-point recursion: a node together with one further singularity.
//!
//! Each lifted count `N(A1PX, n, m)` is obtained from its predecessor by
//! pairing with the Euler class of one more bundle and subtracting the
//! contributions of degenerate strata. The rules are plain data in
//! [`RuleTable`] and [`Evaluator`] walks them with memoization.
//!
//! ```
//! use curvecount::recursion::{Evaluator, Sing};
//! use curvecount::BaseTable;
//!
//! let base = BaseTable::shipped();
//! let mut ev = Evaluator::new(&base);
//! let tacnode = ev.final_count(Sing::A3, 0).unwrap();
//! assert_eq!(tacnode.poly.eval_to_int(4), Some(1536.into()));
//! assert_eq!(tacnode.min_valid_d, 6);
//! ```

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use crate::basecases::{BaseKey, BaseTable, BaseTarget, Check};
use crate::error::{Error, Result};
use crate::exactpoly::Polynomial;

/// Anything the evaluator can count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Target {
    Base(BaseTarget),
    A1A1,
    A1PA2,
    A1PA3,
    A1PA4,
    A1PA5,
    A1PA6,
    A1PD4,
    /// The downstairs triple-point count, a third of `A1PD4` at `m = 0`.
    A1D4,
    A1PD5,
    A1PD6,
    A1PE6,
}

impl Target {
    pub const TWO_POINT: [Target; 11] = [
        Target::A1A1,
        Target::A1PA2,
        Target::A1PA3,
        Target::A1PA4,
        Target::A1PA5,
        Target::A1PA6,
        Target::A1PD4,
        Target::A1D4,
        Target::A1PD5,
        Target::A1PD6,
        Target::A1PE6,
    ];

    pub fn is_projectivized(self) -> bool {
        match self {
            Target::Base(t) => t.is_projectivized(),
            Target::A1A1 | Target::A1D4 => false,
            _ => true,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Target::Base(t) => t.name(),
            Target::A1A1 => "A1A1",
            Target::A1PA2 => "A1PA2",
            Target::A1PA3 => "A1PA3",
            Target::A1PA4 => "A1PA4",
            Target::A1PA5 => "A1PA5",
            Target::A1PA6 => "A1PA6",
            Target::A1PD4 => "A1PD4",
            Target::A1D4 => "A1D4",
            Target::A1PD5 => "A1PD5",
            Target::A1PD6 => "A1PD6",
            Target::A1PE6 => "A1PE6",
        }
    }

    pub fn all() -> impl Iterator<Item = Target> {
        BaseTarget::ALL
            .into_iter()
            .map(Target::Base)
            .chain(Target::TWO_POINT)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Target> {
        Target::all()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::InvalidKey(format!("unknown target {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountKey {
    pub target: Target,
    pub n: u32,
    pub m: u32,
}

impl CountKey {
    pub fn new(target: Target, n: u32, m: u32) -> Result<CountKey> {
        if m != 0 && !target.is_projectivized() {
            return Err(Error::InvalidKey(format!(
                "{target} takes no m index (m={m})"
            )));
        }
        Ok(CountKey { target, n, m })
    }

    fn unchecked(target: Target, n: u32, m: u32) -> CountKey {
        debug_assert!(m == 0 || target.is_projectivized());
        CountKey { target, n, m }
    }
}

impl fmt::Display for CountKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.target.is_projectivized() {
            write!(f, "{}({},{})", self.target, self.n, self.m)
        } else {
            write!(f, "{}({})", self.target, self.n)
        }
    }
}

/// The singularity paired with the node in a final count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sing {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    D4,
    D5,
    D6,
    E6,
}

impl Sing {
    pub const ALL: [Sing; 10] = [
        Sing::A1,
        Sing::A2,
        Sing::A3,
        Sing::A4,
        Sing::A5,
        Sing::A6,
        Sing::D4,
        Sing::D5,
        Sing::D6,
        Sing::E6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Sing::A1 => "A1",
            Sing::A2 => "A2",
            Sing::A3 => "A3",
            Sing::A4 => "A4",
            Sing::A5 => "A5",
            Sing::A6 => "A6",
            Sing::D4 => "D4",
            Sing::D5 => "D5",
            Sing::D6 => "D6",
            Sing::E6 => "E6",
        }
    }

    /// `"A1A3"` and so on.
    pub fn pair_label(self) -> String {
        format!("A1{}", self.name())
    }

    /// Degree from which the count is guaranteed.
    pub fn bound(self) -> u32 {
        match self {
            Sing::A1 => 4,
            Sing::A2 => 5,
            Sing::A3 => 6,
            Sing::A4 => 7,
            Sing::A5 => 8,
            Sing::A6 => 9,
            Sing::D4 => 5,
            Sing::D5 => 6,
            Sing::D6 => 7,
            Sing::E6 => 6,
        }
    }

    /// The key whose value is the final count.
    pub fn final_key(self, n: u32) -> CountKey {
        let (t, m) = match self {
            Sing::A1 => (Target::A1A1, 0),
            Sing::A2 => (Target::A1PA2, 0),
            Sing::A3 => (Target::A1PA3, 0),
            Sing::A4 => (Target::A1PA4, 0),
            Sing::A5 => (Target::A1PA5, 0),
            Sing::A6 => (Target::A1PA6, 0),
            Sing::D4 => (Target::A1D4, 0),
            Sing::D5 => (Target::A1PD5, 0),
            Sing::D6 => (Target::A1PD6, 0),
            Sing::E6 => (Target::A1PE6, 0),
        };
        CountKey::unchecked(t, n, m)
    }
}

impl fmt::Display for Sing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Sing {
    type Err = Error;
    fn from_str(s: &str) -> Result<Sing> {
        let s = s.trim();
        let s = s.strip_prefix("A1").filter(|r| !r.is_empty()).unwrap_or(s);
        Sing::ALL
            .into_iter()
            .find(|x| x.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidKey(format!("unsupported singularity {s:?}")))
    }
}

/// One term `coeff · N(pred, n + dn, m + dm)` of a left-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Polynomial,
    pub dn: u32,
    pub dm: i32,
}

impl Term {
    fn new(coeff: Polynomial, dn: u32, dm: i32) -> Term {
        Term { coeff, dn, dm }
    }
}

/// A degenerate stratum subtracted with the given multiplier, evaluated at
/// `(n + dn, m)` (or `n + dn` for targets without `m`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Correction {
    pub multiplier: Polynomial,
    pub target: Target,
    pub dn: u32,
    pub reason: &'static str,
}

impl Correction {
    fn new(multiplier: i64, target: Target, reason: &'static str) -> Correction {
        Correction {
            multiplier: Polynomial::constant(multiplier),
            target,
            dn: 0,
            reason,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleForm {
    /// `N(n, m) = −3N(n+1, m−1) − 3N(n+2, m−2)` for every lifted target.
    Reduction,
    /// The binodal rule: product of two node counts minus the diagonal.
    DiagonalProduct,
    /// Rank-2 twist over the node-node space, pushed down along the fibre.
    Rank2Pushforward,
    /// One more line bundle on the lifted space.
    LineBundle,
    /// The triple-point row with `m = 1`, paired downstairs.
    DownstairsD4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionRule {
    pub label: &'static str,
    pub form: RuleForm,
    /// `None` for the reduction rule, which applies to every lifted target.
    pub target: Option<Target>,
    /// The single `m` row this rule produces, if it is row-specific.
    pub m_row: Option<u32>,
    pub predecessor: Option<Target>,
    pub lhs: Vec<Term>,
    pub corrections: Vec<Correction>,
    /// Name of the bundle whose Euler class produces the left-hand side.
    pub bundle: Option<&'static str>,
}

impl RecursionRule {
    /// Coefficient of the left-hand-side term at the given shift, zero when
    /// absent.
    pub fn lhs_coeff(&self, dn: u32, dm: i32) -> Polynomial {
        self.lhs
            .iter()
            .filter(|t| t.dn == dn && t.dm == dm)
            .map(|t| t.coeff.clone())
            .sum()
    }

    /// `(c_same, c_mPlus1, c_nPlus1)` for line-bundle rules.
    pub fn triple(&self) -> Option<[Polynomial; 3]> {
        (self.form == RuleForm::LineBundle).then(|| {
            [
                self.lhs_coeff(0, 0),
                self.lhs_coeff(0, 1),
                self.lhs_coeff(1, 0),
            ]
        })
    }

    pub fn lhs_coeff_mut(&mut self, dn: u32, dm: i32) -> Option<&mut Polynomial> {
        self.lhs
            .iter_mut()
            .find(|t| t.dn == dn && t.dm == dm)
            .map(|t| &mut t.coeff)
    }
}

fn lp(c: &[i64]) -> Polynomial {
    Polynomial::from_ints(c)
}

fn line(
    label: &'static str,
    target: Target,
    m_row: Option<u32>,
    pred: Target,
    bundle: &'static str,
    [same, up, next]: [Polynomial; 3],
    corrections: Vec<Correction>,
) -> RecursionRule {
    RecursionRule {
        label,
        form: RuleForm::LineBundle,
        target: Some(target),
        m_row,
        predecessor: Some(pred),
        lhs: vec![
            Term::new(same, 0, 0),
            Term::new(up, 0, 1),
            Term::new(next, 1, 0),
        ],
        corrections,
        bundle: Some(bundle),
    }
}

const TWO_AK: &str = "node meets the Ak point, generic Hessian";
const FIVE_E6: &str = "node meets the A4 point along the E6 stratum";
const SIX_E7: &str = "node meets the A5 point along the E7 stratum";
const THREE: &str = "collision with a cusp, or the triple-point locus";
const TWO_PD6: &str = "section vanishes to order two along PD6";
const ONE_PE7: &str = "section vanishes to order one along PE7";
const D5_STRATUM: &str = "node meets the A4 point along the D5 stratum";
const D6_STRATUM: &str = "node meets the A5 point along the D6 stratum";
const E6_STRATUM: &str = "node meets the A5 point along the E6 stratum";
const OWN: &str = "degenerate stratum of the same pair of points";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleTable {
    rules: Vec<RecursionRule>,
}

impl RuleTable {
    /// The thirteen rules: the reduction law followed by the twelve
    /// recursions in dependency order.
    pub fn standard() -> RuleTable {
        use BaseTarget as B;
        use Target::*;
        let d = Polynomial::d;
        let base = |t| Target::Base(t);
        let rules = vec![
            RecursionRule {
                label: "reduction",
                form: RuleForm::Reduction,
                target: None,
                m_row: None,
                predecessor: None,
                lhs: vec![Term::new(lp(&[-3]), 1, -1), Term::new(lp(&[-3]), 2, -2)],
                corrections: vec![],
                bundle: None,
            },
            RecursionRule {
                label: "A1A1",
                form: RuleForm::DiagonalProduct,
                target: Some(A1A1),
                m_row: None,
                predecessor: Some(base(B::A1)),
                lhs: vec![
                    Term::new(lp(&[1]), 0, 0),
                    Term::new(lp(&[-3, 3]), 1, 0),
                    Term::new(lp(&[3, -6, 3]), 2, 0),
                ],
                corrections: vec![
                    Correction::new(1, base(B::A1), OWN),
                    Correction {
                        multiplier: d(),
                        target: base(B::A1),
                        dn: 1,
                        reason: OWN,
                    },
                    Correction::new(3, base(B::A2), THREE),
                ],
                bundle: None,
            },
            RecursionRule {
                label: "A1PA2 m=0",
                form: RuleForm::Rank2Pushforward,
                target: Some(A1PA2),
                m_row: Some(0),
                predecessor: Some(A1A1),
                lhs: vec![
                    Term::new(lp(&[2]), 0, 0),
                    Term::new(lp(&[-6, 2]), 1, 0),
                    Term::new(lp(&[]), 2, 0),
                ],
                corrections: vec![Correction::new(2, base(B::PA3), TWO_AK)],
                bundle: Some("V_PA2"),
            },
            RecursionRule {
                label: "A1PA2 m=1",
                form: RuleForm::Rank2Pushforward,
                target: Some(A1PA2),
                m_row: Some(1),
                predecessor: Some(A1A1),
                lhs: vec![
                    Term::new(lp(&[1]), 0, 0),
                    Term::new(lp(&[-9, 2]), 1, 0),
                    Term::new(lp(&[18, -9, 1]), 2, 0),
                ],
                corrections: vec![
                    Correction::new(2, base(B::PA3), TWO_AK),
                    Correction::new(3, base(B::D4), THREE),
                ],
                bundle: Some("V_PA2"),
            },
            line(
                "A1PA3",
                A1PA3,
                None,
                A1PA2,
                "L_PA3",
                [lp(&[1]), lp(&[3]), d()],
                vec![Correction::new(2, base(B::PA4), TWO_AK)],
            ),
            line(
                "A1PA4",
                A1PA4,
                None,
                A1PA3,
                "L_PA4",
                [lp(&[2]), lp(&[2]), lp(&[-6, 2])],
                vec![Correction::new(2, base(B::PA5), TWO_AK)],
            ),
            line(
                "A1PA5",
                A1PA5,
                None,
                A1PA4,
                "L_PA5",
                [lp(&[3]), lp(&[1]), lp(&[-12, 3])],
                vec![
                    Correction::new(2, A1PD5, D5_STRATUM),
                    Correction::new(2, base(B::PA6), TWO_AK),
                    Correction::new(5, base(B::PE6), FIVE_E6),
                ],
            ),
            line(
                "A1PA6",
                A1PA6,
                None,
                A1PA5,
                "L_PA6",
                [lp(&[4]), lp(&[]), lp(&[-18, 4])],
                vec![
                    Correction::new(4, A1PD6, D6_STRATUM),
                    Correction::new(3, A1PE6, E6_STRATUM),
                    Correction::new(2, base(B::PA7), TWO_AK),
                    Correction::new(6, base(B::PE7), SIX_E7),
                ],
            ),
            line(
                "A1PD4 m=0",
                A1PD4,
                Some(0),
                A1PA3,
                "L_PD4",
                [lp(&[1]), lp(&[-2]), lp(&[-6, 1])],
                vec![Correction::new(2, base(B::D5), TWO_AK)],
            ),
            RecursionRule {
                label: "A1PD4 m=1",
                form: RuleForm::DownstairsD4,
                target: Some(A1PD4),
                m_row: Some(1),
                predecessor: Some(A1D4),
                lhs: vec![Term::new(lp(&[1]), 0, 0), Term::new(lp(&[-9, 1]), 1, 0)],
                corrections: vec![],
                bundle: Some("L_PA3"),
            },
            line(
                "A1PD5",
                A1PD5,
                None,
                A1PD4,
                "L_PD5",
                [lp(&[1]), lp(&[1]), lp(&[-3, 1])],
                vec![Correction::new(2, base(B::PD6), TWO_PD6)],
            ),
            line(
                "A1PD6",
                A1PD6,
                None,
                A1PD5,
                "L_PD6",
                [lp(&[1]), lp(&[4]), d()],
                vec![
                    Correction::new(2, base(B::PD7), TWO_AK),
                    Correction::new(1, base(B::PE7), ONE_PE7),
                ],
            ),
            line(
                "A1PE6",
                A1PE6,
                None,
                A1PD5,
                "L_PE6",
                [lp(&[1]), lp(&[-1]), lp(&[-6, 1])],
                vec![Correction::new(1, base(B::PE7), ONE_PE7)],
            ),
        ];
        RuleTable { rules }
    }

    pub fn rules(&self) -> &[RecursionRule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn by_label(&self, label: &str) -> Option<&RecursionRule> {
        self.rules.iter().find(|r| r.label == label)
    }

    pub fn by_label_mut(&mut self, label: &str) -> Option<&mut RecursionRule> {
        self.rules.iter_mut().find(|r| r.label == label)
    }

    pub fn reduction(&self) -> &RecursionRule {
        self.rules
            .iter()
            .find(|r| r.form == RuleForm::Reduction)
            .expect("rule table has a reduction rule")
    }

    /// The rule producing `target` in row `m`.
    pub fn rule_for(&self, target: Target, m: u32) -> Option<&RecursionRule> {
        self.rules
            .iter()
            .find(|r| r.target == Some(target) && r.m_row.map_or(true, |row| row == m))
    }
}

fn standard_rules() -> &'static RuleTable {
    static RULES: OnceLock<RuleTable> = OnceLock::new();
    RULES.get_or_init(RuleTable::standard)
}

/// A final count and the degree from which it is guaranteed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalCount {
    pub sing: Sing,
    pub n: u32,
    pub poly: Polynomial,
    pub min_valid_d: u32,
}

/// Evaluates counts against one base table and one rule table.
pub struct Evaluator<'a> {
    base: &'a BaseTable,
    rules: &'a RuleTable,
    memo: Option<HashMap<CountKey, Polynomial>>,
    active: HashSet<CountKey>,
}

impl<'a> Evaluator<'a> {
    pub fn new(base: &'a BaseTable) -> Evaluator<'a> {
        Evaluator::with_rules(base, standard_rules())
    }

    pub fn with_rules(base: &'a BaseTable, rules: &'a RuleTable) -> Evaluator<'a> {
        Evaluator {
            base,
            rules,
            memo: Some(HashMap::new()),
            active: HashSet::new(),
        }
    }

    /// An evaluator that recomputes every subterm.
    pub fn memo_free(base: &'a BaseTable) -> Evaluator<'a> {
        Evaluator {
            memo: None,
            ..Evaluator::new(base)
        }
    }

    pub fn base(&self) -> &BaseTable {
        self.base
    }

    pub fn rules(&self) -> &RuleTable {
        self.rules
    }

    pub fn count(&mut self, key: CountKey) -> Result<Polynomial> {
        if key.m != 0 && !key.target.is_projectivized() {
            return Err(Error::InvalidKey(format!(
                "{} takes no m index (m={})",
                key.target, key.m
            )));
        }
        if key.n >= 3 {
            return Ok(Polynomial::zero());
        }
        if let Some(hit) = self.memo.as_ref().and_then(|m| m.get(&key)) {
            return Ok(hit.clone());
        }
        assert!(self.active.insert(key), "recursion cycle through {key}");
        let value = self.compute(key);
        self.active.remove(&key);
        let value = value?;
        if let Some(memo) = self.memo.as_mut() {
            memo.insert(key, value.clone());
        }
        Ok(value)
    }

    fn compute(&mut self, key: CountKey) -> Result<Polynomial> {
        let CountKey { target, n, m } = key;
        if m >= 2 {
            let terms = self.rules.reduction().lhs.clone();
            return self.sum_terms(target, n, m, &terms);
        }
        match target {
            Target::Base(t) => self.base.lookup(BaseKey::new(t, n, m)),
            Target::A1D4 => {
                let lifted = self.count(CountKey::unchecked(Target::A1PD4, n, 0))?;
                lifted
                    .div_exact(3, true)
                    .map_err(|_| Error::NonExactDivision {
                        context: format!("A1D4({n}) from A1PD4({n},0)"),
                        poly: lifted,
                        divisor: 3,
                    })
            }
            _ => {
                let rule = self
                    .rules
                    .rule_for(target, m)
                    .ok_or_else(|| Error::InvalidKey(format!("no rule produces {key}")))?;
                let pred = rule
                    .predecessor
                    .expect("recursion rules have a predecessor");
                let lhs = if rule.form == RuleForm::DiagonalProduct {
                    let a1 = |ev: &mut Self, k| ev.count(CountKey::unchecked(pred, k, 0));
                    a1(self, 0)? * a1(self, n)?
                } else {
                    let terms = rule.lhs.clone();
                    self.sum_terms(pred, n, m, &terms)?
                };
                let mut total = lhs;
                for c in &rule.corrections {
                    let cm = if c.target.is_projectivized() { m } else { 0 };
                    let v = self.count(CountKey::unchecked(c.target, n + c.dn, cm))?;
                    total -= &(&c.multiplier * &v);
                }
                Ok(total)
            }
        }
    }

    fn sum_terms(&mut self, pred: Target, n: u32, m: u32, terms: &[Term]) -> Result<Polynomial> {
        let mut total = Polynomial::zero();
        for t in terms {
            if t.coeff.is_zero() {
                continue;
            }
            let tm = if pred.is_projectivized() {
                u32::try_from(m as i64 + t.dm as i64).map_err(|_| {
                    Error::InvalidKey(format!("negative m reached from {pred}({n},{m})"))
                })?
            } else {
                0
            };
            let v = self.count(CountKey::unchecked(pred, n + t.dn, tm))?;
            total += &(&t.coeff * &v);
        }
        Ok(total)
    }

    /// Every base-table key the value of `key` depends on.
    pub fn dependencies(&self, key: CountKey) -> BTreeSet<BaseKey> {
        let mut out = BTreeSet::new();
        let mut seen = HashSet::new();
        self.walk(key, &mut seen, &mut out);
        out
    }

    pub fn final_dependencies(&self, sing: Sing, n: u32) -> BTreeSet<BaseKey> {
        self.dependencies(sing.final_key(n))
    }

    fn walk(&self, key: CountKey, seen: &mut HashSet<CountKey>, out: &mut BTreeSet<BaseKey>) {
        let CountKey { target, n, m } = key;
        if n >= 3 || !seen.insert(key) {
            return;
        }
        let mut visit = |t: Target, n: u32, m: i64| {
            if m >= 0 {
                let m = if t.is_projectivized() { m as u32 } else { 0 };
                self.walk(CountKey::unchecked(t, n, m), seen, out);
            }
        };
        if m >= 2 {
            for t in &self.rules.reduction().lhs {
                visit(target, n + t.dn, m as i64 + t.dm as i64);
            }
            return;
        }
        match target {
            Target::Base(t) => {
                out.insert(BaseKey::new(t, n, m));
            }
            Target::A1D4 => visit(Target::A1PD4, n, 0),
            _ => {
                let Some(rule) = self.rules.rule_for(target, m) else {
                    return;
                };
                let pred = rule
                    .predecessor
                    .expect("recursion rules have a predecessor");
                if rule.form == RuleForm::DiagonalProduct {
                    visit(pred, 0, 0);
                    visit(pred, n, 0);
                } else {
                    for t in &rule.lhs {
                        if !t.coeff.is_zero() {
                            visit(pred, n + t.dn, m as i64 + t.dm as i64);
                        }
                    }
                }
                for c in &rule.corrections {
                    visit(c.target, n + c.dn, m as i64);
                }
            }
        }
    }

    /// `N(A1 X, n)` with its validity bound.
    ///
    /// Starts from [`Sing::bound`], raised if any base entry used carries
    /// a larger declared minimum.
    pub fn final_count(&mut self, sing: Sing, n: u32) -> Result<FinalCount> {
        let key = sing.final_key(n);
        let poly = self.count(key)?;
        if !poly.is_integral() {
            return Err(Error::NonExactDivision {
                context: format!(
                    "{} at n={n} has non-integral coefficients",
                    sing.pair_label()
                ),
                poly,
                divisor: 1,
            });
        }
        let min_valid_d = self
            .dependencies(key)
            .iter()
            .filter_map(|k| self.base.entry(*k))
            .map(|e| e.min_d)
            .fold(sing.bound(), u32::max);
        Ok(FinalCount {
            sing,
            n,
            poly,
            min_valid_d,
        })
    }

    /// Curves with two nodes, each counted once.
    ///
    /// Only `n = 0` is symmetric in the two nodes; other `n` are rejected.
    pub fn unordered_binodal(&mut self, n: u32) -> Result<Polynomial> {
        if n != 0 {
            return Err(Error::InvalidKey(format!(
                "unordered binodal count needs n=0, got n={n}"
            )));
        }
        let ordered = self.count(Sing::A1.final_key(n))?;
        let half = ordered.div_exact(2, false)?;
        if !half.is_integer_valued() {
            return Err(Error::NonExactDivision {
                context: format!("unordered binodal count at n={n}"),
                poly: ordered,
                divisor: 2,
            });
        }
        Ok(half)
    }
}

/// Every key with `n ≤ max_n` and `m ≤ max_m` (lifted targets only).
pub fn key_grid(max_n: u32, max_m: u32) -> Vec<CountKey> {
    let mut keys = vec![];
    for t in Target::all() {
        let top_m = if t.is_projectivized() { max_m } else { 0 };
        for n in 0..=max_n {
            for m in 0..=top_m {
                keys.push(CountKey::unchecked(t, n, m));
            }
        }
    }
    keys
}

/// Laws every evaluation must satisfy, checked over the shipped ranges:
/// the ring relation, vanishing beyond two lines, integrality of the final
/// counts, and agreement of memoized with memo-free evaluation.
pub fn invariant_checks(base: &BaseTable) -> Vec<Check> {
    let mut checks = vec![];
    let mut ev = Evaluator::new(base);
    let mut record = |name: &str, failures: Vec<String>| {
        checks.push(Check {
            name: name.to_string(),
            passed: failures.is_empty(),
            detail: if failures.is_empty() {
                "ok".into()
            } else {
                failures.join("; ")
            },
        })
    };

    let mut bad = vec![];
    for t in Target::all().filter(|t| t.is_projectivized()) {
        for n in 0..3 {
            let mut c = |n, m| ev.count(CountKey::unchecked(t, n, m));
            match (c(n, 2), c(n + 1, 1), c(n + 2, 0)) {
                (Ok(a), Ok(b), Ok(z)) => {
                    if !(a + b.scale_int(3) + z.scale_int(3)).is_zero() {
                        bad.push(format!("{t} at n={n}"));
                    }
                }
                _ => bad.push(format!("{t} at n={n}: evaluation failed")),
            }
        }
    }
    record("reduction law", bad);

    let mut bad = vec![];
    for key in key_grid(6, 3).into_iter().filter(|k| k.n >= 3) {
        if !ev.count(key).is_ok_and(|v| v.is_zero()) {
            bad.push(key.to_string());
        }
    }
    record("vanishing law", bad);

    let mut bad = vec![];
    for sing in Sing::ALL {
        for n in 0..3 {
            if let Err(e) = ev.final_count(sing, n) {
                bad.push(format!("{}({n}): {e}", sing.pair_label()));
            }
        }
    }
    if let Err(e) = ev.unordered_binodal(0) {
        bad.push(e.to_string());
    }
    record("integrality", bad);

    let mut memo_free = Evaluator::memo_free(base);
    let mut bad = vec![];
    for key in key_grid(4, 4) {
        let a = ev.count(key).ok();
        let b = memo_free.count(key).ok();
        if a.is_none() || a != b {
            bad.push(key.to_string());
        }
    }
    record("memo agreement", bad);
    checks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basecases::{binodal_closed_form, node_cusp_closed_form, node_tacnode_closed_form};
    use proptest::prelude::*;

    fn key(t: Target, n: u32, m: u32) -> CountKey {
        CountKey::new(t, n, m).unwrap()
    }

    #[test]
    fn thirteen_rules_with_cited_multipliers() {
        let rules = RuleTable::standard();
        assert_eq!(rules.len(), 13);
        let allowed: Vec<Polynomial> = (1..=6)
            .map(Polynomial::constant)
            .chain([Polynomial::d()])
            .collect();
        for r in rules.rules() {
            for c in &r.corrections {
                assert!(
                    allowed.contains(&c.multiplier),
                    "{}: {}",
                    r.label,
                    c.multiplier
                );
                assert!(!c.reason.is_empty());
            }
        }
    }

    #[test]
    fn every_two_point_row_has_one_rule() {
        let rules = RuleTable::standard();
        for t in Target::TWO_POINT {
            if t == Target::A1D4 {
                continue;
            }
            let rows = if t.is_projectivized() { 0..2 } else { 0..1 };
            for m in rows {
                let hits = rules
                    .rules()
                    .iter()
                    .filter(|r| r.target == Some(t) && r.m_row.map_or(true, |row| row == m))
                    .count();
                assert_eq!(hits, 1, "{t} row {m}");
            }
        }
    }

    #[test]
    fn closed_forms_reproduced() {
        let base = BaseTable::shipped();
        let mut ev = Evaluator::new(&base);
        assert_eq!(
            ev.count(key(Target::A1A1, 0, 0)).unwrap(),
            binodal_closed_form()
        );
        assert_eq!(
            ev.final_count(Sing::A2, 0).unwrap().poly,
            node_cusp_closed_form()
        );
        let a3 = ev.final_count(Sing::A3, 0).unwrap();
        assert_eq!(a3.poly, node_tacnode_closed_form());
        assert_eq!(a3.min_valid_d, 6);
        assert_eq!(
            ev.final_count(Sing::A2, 0).unwrap().poly.eval_to_int(3),
            Some(0.into())
        );
    }

    #[test]
    fn vanishing_and_reduction_examples() {
        let base = BaseTable::shipped();
        let mut ev = Evaluator::new(&base);
        assert!(ev.count(key(Target::A1PA2, 7, 0)).unwrap().is_zero());
        let lhs = ev.count(key(Target::A1PA3, 0, 2)).unwrap();
        let rhs = (ev.count(key(Target::A1PA3, 1, 1)).unwrap()
            + ev.count(key(Target::A1PA3, 2, 0)).unwrap())
        .scale_int(-3);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn triple_point_is_a_third() {
        let base = BaseTable::shipped();
        let mut ev = Evaluator::new(&base);
        for n in 0..3 {
            let lifted = ev.count(key(Target::A1PD4, n, 0)).unwrap();
            let fc = ev.final_count(Sing::D4, n).unwrap();
            assert_eq!(fc.poly.scale_int(3), lifted);
            assert!(fc.poly.is_integral());
        }
    }

    #[test]
    fn downstairs_row() {
        let base = BaseTable::shipped();
        let mut ev = Evaluator::new(&base);
        for n in 0..3 {
            let up = ev.count(key(Target::A1PD4, n, 1)).unwrap();
            let want = ev.count(key(Target::A1D4, n, 0)).unwrap()
                + lp(&[-9, 1]) * ev.count(key(Target::A1D4, n + 1, 0)).unwrap();
            assert_eq!(up, want);
        }
    }

    #[test]
    fn unordered_binodal_values() {
        let base = BaseTable::shipped();
        let mut ev = Evaluator::new(&base);
        let u = ev.unordered_binodal(0).unwrap();
        assert_eq!(u.eval_to_int(3), Some(21.into()));
        assert_eq!(u.eval_to_int(2), Some(0.into()));
        assert_eq!(u.eval_to_int(4), Some(225.into()));
        assert!(u.is_integer_valued());
        assert!(!u.is_integral());
        for n in 1..4 {
            assert!(matches!(ev.unordered_binodal(n), Err(Error::InvalidKey(_))));
        }
    }

    #[test]
    fn invalid_keys() {
        assert!(CountKey::new(Target::A1A1, 0, 1).is_err());
        assert!(CountKey::new(Target::Base(BaseTarget::D5), 0, 1).is_err());
        let base = BaseTable::shipped();
        let mut ev = Evaluator::new(&base);
        let bad = CountKey {
            target: Target::A1D4,
            n: 0,
            m: 2,
        };
        assert!(matches!(ev.count(bad), Err(Error::InvalidKey(_))));
    }

    #[test]
    fn parse_names() {
        assert_eq!("A3".parse::<Sing>().unwrap(), Sing::A3);
        assert_eq!("A1E6".parse::<Sing>().unwrap(), Sing::E6);
        assert_eq!("a1".parse::<Sing>().unwrap(), Sing::A1);
        assert!("A7".parse::<Sing>().is_err());
        assert_eq!("A1PD5".parse::<Target>().unwrap(), Target::A1PD5);
        assert_eq!(
            "PE7".parse::<Target>().unwrap(),
            Target::Base(BaseTarget::PE7)
        );
    }

    #[test]
    fn bounds() {
        let base = BaseTable::shipped();
        let mut ev = Evaluator::new(&base);
        for (s, c) in [
            (Sing::A1, 4),
            (Sing::A6, 9),
            (Sing::D4, 5),
            (Sing::D6, 7),
            (Sing::E6, 6),
        ] {
            assert_eq!(s.bound(), c);
            assert!(ev.final_count(s, 0).unwrap().min_valid_d >= c);
        }
    }

    #[test]
    fn dependencies_cover_what_evaluation_reads() {
        let base = BaseTable::shipped();
        let ev = Evaluator::new(&base);
        let deps = ev.final_dependencies(Sing::A1, 0);
        let want: BTreeSet<_> = [
            BaseKey::new(BaseTarget::A1, 0, 0),
            BaseKey::new(BaseTarget::A1, 1, 0),
            BaseKey::new(BaseTarget::A2, 0, 0),
        ]
        .into();
        assert_eq!(deps, want);
        let a6 = ev.final_dependencies(Sing::A6, 0);
        assert!(a6.contains(&BaseKey::new(BaseTarget::PA7, 0, 0)));
        assert!(a6.iter().all(|k| k.n <= 2 && k.m <= 1));
    }

    #[test]
    fn corrupted_base_entry_changes_only_dependents() {
        let base = BaseTable::shipped();
        let k = BaseKey::new(BaseTarget::PA7, 0, 0);
        let bad = base.with_entry(k, Polynomial::zero()).unwrap();
        let mut good_ev = Evaluator::new(&base);
        let mut bad_ev = Evaluator::new(&bad);
        for s in Sing::ALL {
            let same = good_ev.final_count(s, 0).unwrap() == bad_ev.final_count(s, 0).unwrap();
            assert_eq!(same, !good_ev.final_dependencies(s, 0).contains(&k), "{s}");
        }
    }

    proptest! {
        #[test]
        fn reduction_law(ti in 0usize..11, n in 0u32..5) {
            let t = Target::TWO_POINT[ti];
            prop_assume!(t.is_projectivized());
            let base = BaseTable::shipped();
            let mut ev = Evaluator::new(&base);
            let mut c = |n, m| ev.count(key(t, n, m)).unwrap();
            let sum = c(n, 2) + c(n + 1, 1).scale_int(3) + c(n + 2, 0).scale_int(3);
            prop_assert!(sum.is_zero());
        }

        #[test]
        fn high_n_vanishes(ti in 0usize..24, n in 3u32..40, m in 0u32..6) {
            let t = Target::all().nth(ti).unwrap();
            let m = if t.is_projectivized() { m } else { 0 };
            let base = BaseTable::shipped();
            let mut ev = Evaluator::new(&base);
            prop_assert!(ev.count(key(t, n, m)).unwrap().is_zero());
        }
    }
}
