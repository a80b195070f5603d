//! The truncated cohomology ring in `y`, `a`, `λ` and the bundle classes.
//!
//! `y` is the hyperplane class of the space of curves, `a` the hyperplane
//! class of the plane carrying the second singular point and `λ` the
//! tautological class of its projectivized tangent bundle. The relations are
//!
//! ```text
//! a³ = 0        λ² = −3aλ − 3a²
//! ```
//!
//! Powers of `y` are relative offsets. The ambient top power of `y` depends
//! on `d` and never appears here.
//!
//! ```
//! use curvecount::cohomring::{BundleSpec, RingClass};
//!
//! let l = RingClass::lambda();
//! let cube = (&(&l * &l) * &l).normalize();
//! assert_eq!(cube, RingClass::monomial(0, 2, 1, 6.into()));
//!
//! let pa5 = BundleSpec::named("L_PA5").unwrap();
//! assert_eq!(pa5.c1().unwrap().to_string(), "3y + (3d - 12)a + λ");
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::exactpoly::Polynomial;

/// Exponents of `y^y a^a λ^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub y: u32,
    pub a: u32,
    pub l: u32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { y: 0, a: 0, l: 0 };

    pub fn new(y: u32, a: u32, l: u32) -> Monomial {
        Monomial { y, a, l }
    }

    fn times(self, o: Monomial) -> Monomial {
        Monomial::new(self.y + o.y, self.a + o.a, self.l + o.l)
    }
}

/// A ring element with [`Polynomial`] coefficients. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RingClass {
    terms: BTreeMap<Monomial, Polynomial>,
}

/// One monomial of a class, read as a shift of the pairing indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub dy: u32,
    pub dn: u32,
    pub dm: u32,
    pub coeff: Polynomial,
}

impl RingClass {
    pub fn zero() -> RingClass {
        RingClass::default()
    }

    pub fn one() -> RingClass {
        RingClass::constant(Polynomial::one())
    }

    pub fn constant(c: Polynomial) -> RingClass {
        RingClass::monomial(0, 0, 0, c)
    }

    pub fn monomial(y: u32, a: u32, l: u32, c: Polynomial) -> RingClass {
        let mut r = RingClass::zero();
        r.add_term(Monomial::new(y, a, l), c);
        r
    }

    pub fn y() -> RingClass {
        RingClass::monomial(1, 0, 0, Polynomial::one())
    }

    pub fn a() -> RingClass {
        RingClass::monomial(0, 1, 0, Polynomial::one())
    }

    pub fn lambda() -> RingClass {
        RingClass::monomial(0, 0, 1, Polynomial::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Polynomial)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: Monomial) -> Polynomial {
        self.terms.get(&m).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, m: Monomial, c: Polynomial) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_default();
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, c: &Polynomial) -> RingClass {
        let mut r = RingClass::zero();
        for (m, k) in &self.terms {
            r.add_term(*m, k * c);
        }
        r
    }

    pub fn pow(&self, e: u32) -> RingClass {
        (0..e).fold(RingClass::one(), |acc, _| (&acc * self).normalize())
    }

    pub fn is_normalized(&self) -> bool {
        self.terms.keys().all(|m| m.a <= 2 && m.l <= 1)
    }

    /// Applies `a³ = 0` and `λ² = −3aλ − 3a²` until no monomial has
    /// `a ≥ 3` or `λ ≥ 2`.
    pub fn normalize(&self) -> RingClass {
        let mut pending: Vec<(Monomial, Polynomial)> =
            self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        let mut out = RingClass::zero();
        while let Some((m, c)) = pending.pop() {
            if m.a >= 3 {
                continue;
            }
            if m.l >= 2 {
                let minus3 = c.scale_int(-3);
                pending.push((Monomial::new(m.y, m.a + 1, m.l - 1), minus3.clone()));
                pending.push((Monomial::new(m.y, m.a + 2, m.l - 2), minus3));
                continue;
            }
            out.add_term(m, c);
        }
        out
    }

    /// Integration along the fibre of the projectivized tangent bundle:
    /// `λ·ω ↦ ω`, classes without `λ` go to zero.
    pub fn pushforward(&self) -> RingClass {
        let mut out = RingClass::zero();
        for (m, c) in self.normalize().terms {
            if m.l == 1 {
                out.add_term(Monomial::new(m.y, m.a, 0), c);
            }
        }
        out
    }

    /// Reads each monomial `y^i a^j λ^k` as a shift `(n, m) → (n + j, m + k)`
    /// of the pairing indices, with `i` fewer point conditions.
    pub fn expansion_coefficients(&self) -> Vec<Expansion> {
        debug_assert!(self.is_normalized());
        self.terms
            .iter()
            .map(|(m, c)| Expansion {
                dy: m.y,
                dn: m.a,
                dm: m.l,
                coeff: c.clone(),
            })
            .collect()
    }
}

impl From<Polynomial> for RingClass {
    fn from(c: Polynomial) -> RingClass {
        RingClass::constant(c)
    }
}

impl Add<&RingClass> for &RingClass {
    type Output = RingClass;
    fn add(self, rhs: &RingClass) -> RingClass {
        let mut r = self.clone();
        for (m, c) in &rhs.terms {
            r.add_term(*m, c.clone());
        }
        r
    }
}

impl Neg for &RingClass {
    type Output = RingClass;
    fn neg(self) -> RingClass {
        self.scale(&Polynomial::constant(-1))
    }
}

impl Sub<&RingClass> for &RingClass {
    type Output = RingClass;
    fn sub(self, rhs: &RingClass) -> RingClass {
        self + &(-rhs)
    }
}

/// The raw product. Call [`RingClass::normalize`] to apply the relations.
impl Mul<&RingClass> for &RingClass {
    type Output = RingClass;
    fn mul(self, rhs: &RingClass) -> RingClass {
        let mut r = RingClass::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                r.add_term(m1.times(*m2), c1 * c2);
            }
        }
        r
    }
}

impl fmt::Display for RingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let mut body = String::new();
            for (sym, e) in [("y", m.y), ("a", m.a), ("λ", m.l)] {
                match e {
                    0 => {}
                    1 => body.push_str(sym),
                    _ => body.push_str(&format!("{sym}^{e}")),
                }
            }
            let text = c.to_string();
            let (neg, mag) = match (c.is_constant(), text.strip_prefix('-')) {
                (true, Some(rest)) => (true, rest.to_string()),
                _ => (false, text),
            };
            if !first {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            first = false;
            if body.is_empty() {
                f.write_str(&mag)?;
            } else if mag == "1" {
                f.write_str(&body)?;
            } else if c.is_constant() {
                write!(f, "{mag}{body}")?;
            } else {
                write!(f, "({mag}){body}")?;
            }
        }
        Ok(())
    }
}

/// The generating line bundles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    /// Dual tautological bundle of the space of curves, `c₁ = y`.
    GammaDDual,
    /// The `d`-th power of the dual tautological bundle of the plane, `c₁ = d·a`.
    GammaP2DualD,
    /// Dual tautological bundle of the plane, `c₁ = a`.
    GammaP2Dual,
    /// Dual tautological line of the projectivized tangent bundle, `c₁ = λ`.
    GammaTildeDual,
    /// Dual of the tangent quotient `TP²/γ̃`, `c₁ = −3a − λ`.
    QuotientDual,
}

impl Generator {
    pub const ALL: [Generator; 5] = [
        Generator::GammaDDual,
        Generator::GammaP2DualD,
        Generator::GammaP2Dual,
        Generator::GammaTildeDual,
        Generator::QuotientDual,
    ];

    pub fn c1(self) -> RingClass {
        match self {
            Generator::GammaDDual => RingClass::y(),
            Generator::GammaP2DualD => RingClass::a().scale(&Polynomial::d()),
            Generator::GammaP2Dual => RingClass::a(),
            Generator::GammaTildeDual => RingClass::lambda(),
            Generator::QuotientDual => {
                &RingClass::a().scale(&Polynomial::constant(-3)) - &RingClass::lambda()
            }
        }
    }
}

/// A tensor product of generator powers, optionally twisted by the
/// cotangent bundle of the plane (which makes it rank 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleSpec {
    pub name: String,
    pub factors: Vec<(Generator, i64)>,
    pub rank2_cotangent: bool,
}

const NAMES: &[&str] = &[
    "L_A0",
    "V_A1",
    "V_PA2",
    "V_PD5",
    "L_PA3",
    "L_PA4",
    "L_PA5",
    "L_PA6",
    "L_PA7",
    "L_PD4",
    "L_PD5",
    "L_PD5dual",
    "L_PD6dual",
    "L_PD6",
    "L_PD7",
    "L_PD8",
    "L_PE6",
    "L_PE7",
    "L_PE8",
    "L_PX8",
    "L_J",
];

impl BundleSpec {
    pub fn line(name: &str, factors: &[(Generator, i64)]) -> BundleSpec {
        BundleSpec {
            name: name.to_string(),
            factors: factors.to_vec(),
            rank2_cotangent: false,
        }
    }

    pub fn twisted(name: &str, factors: &[(Generator, i64)]) -> BundleSpec {
        BundleSpec {
            rank2_cotangent: true,
            ..BundleSpec::line(name, factors)
        }
    }

    pub fn rank(&self) -> u32 {
        if self.rank2_cotangent {
            2
        } else {
            1
        }
    }

    /// Every name known to [`BundleSpec::named`].
    pub fn names() -> &'static [&'static str] {
        NAMES
    }

    /// Looks a bundle up by its conventional name, e.g. `"L_PA5"` or `"V_PA2"`.
    pub fn named(name: &str) -> Option<BundleSpec> {
        use Generator::*;
        let base = [(GammaDDual, 1), (GammaP2DualD, 1)];
        let with = |extra: &[(Generator, i64)]| -> Vec<(Generator, i64)> {
            extra.iter().chain(base.iter()).copied().collect()
        };
        let spec = match name {
            "L_A0" => BundleSpec::line(name, &base),
            "V_A1" => BundleSpec::twisted(name, &base),
            "V_PA2" => BundleSpec::twisted(name, &with(&[(GammaTildeDual, 1)])),
            "V_PD5" => BundleSpec::twisted(name, &with(&[(GammaTildeDual, 2)])),
            "L_PD4" => BundleSpec::line(name, &with(&[(QuotientDual, 2)])),
            "L_PD5" => BundleSpec::line(name, &with(&[(GammaTildeDual, 2), (QuotientDual, 1)])),
            "L_PD5dual" => BundleSpec::line(
                name,
                &[
                    (GammaTildeDual, 2),
                    (QuotientDual, 4),
                    (GammaDDual, 2),
                    (GammaP2DualD, 2),
                ],
            ),
            "L_PD6dual" => BundleSpec::line(
                name,
                &[
                    (GammaTildeDual, 8),
                    (QuotientDual, 4),
                    (GammaDDual, 5),
                    (GammaP2DualD, 5),
                ],
            ),
            "L_PE6" => BundleSpec::line(name, &with(&[(GammaTildeDual, 1), (QuotientDual, 2)])),
            "L_PE7" => BundleSpec::line(name, &with(&[(GammaTildeDual, 4)])),
            "L_PE8" => BundleSpec::line(name, &with(&[(GammaTildeDual, 3), (QuotientDual, 1)])),
            "L_PX8" => BundleSpec::line(name, &with(&[(QuotientDual, 3)])),
            "L_J" => BundleSpec::line(
                name,
                &[
                    (GammaTildeDual, 9),
                    (QuotientDual, 3),
                    (GammaDDual, 3),
                    (GammaP2DualD, 1),
                ],
            ),
            _ => {
                if let Some(k) = name
                    .strip_prefix("L_PA")
                    .and_then(|s| s.parse::<i64>().ok())
                {
                    if k < 3 {
                        return None;
                    }
                    BundleSpec::line(
                        name,
                        &[
                            (GammaTildeDual, k),
                            (QuotientDual, 2 * k - 6),
                            (GammaDDual, k - 2),
                            (GammaP2DualD, k - 2),
                        ],
                    )
                } else {
                    let k = name
                        .strip_prefix("L_PD")
                        .and_then(|s| s.parse::<i64>().ok())?;
                    let eps = match k {
                        6 => 0,
                        7 => 1,
                        8 => 3,
                        _ => return None,
                    };
                    BundleSpec::line(
                        name,
                        &[
                            (GammaTildeDual, k - 2 + eps),
                            (QuotientDual, 2 * eps),
                            (GammaDDual, 1 + eps),
                            (GammaP2DualD, 1 + eps),
                        ],
                    )
                }
            }
        };
        Some(spec)
    }

    /// First Chern class of the line-bundle part, ignoring any twist.
    fn line_c1(&self) -> RingClass {
        self.factors.iter().fold(RingClass::zero(), |acc, (g, k)| {
            &acc + &g.c1().scale(&Polynomial::constant(*k))
        })
    }

    /// First Chern class of a line bundle: `αy + βa + γλ`.
    pub fn c1(&self) -> Result<RingClass> {
        if self.rank2_cotangent {
            return Err(Error::NotLineBundle(self.name.clone()));
        }
        Ok(self.line_c1())
    }

    /// Total Chern class. For `L ⊗ T*P²` this is
    /// `1 + (2c₁(L) − 3a) + e(L ⊗ T*P²)`.
    pub fn total_chern_class(&self) -> RingClass {
        let u = self.line_c1();
        if !self.rank2_cotangent {
            return &RingClass::one() + &u;
        }
        let c1 = &u.scale(&Polynomial::constant(2))
            + &RingClass::monomial(0, 1, 0, Polynomial::constant(-3));
        &(&RingClass::one() + &c1) + &self.euler_class()
    }

    /// Top Chern class. For `L ⊗ T*P²` this is
    /// `c₁(L)² − 3a·c₁(L) + 3a²`.
    pub fn euler_class(&self) -> RingClass {
        let u = self.line_c1();
        if !self.rank2_cotangent {
            return u;
        }
        let cot_c1 = RingClass::a().scale(&Polynomial::constant(-3));
        let cot_c2 = RingClass::monomial(0, 2, 0, Polynomial::constant(3));
        twisted_rank2_euler(&u, &cot_c1, &cot_c2)
    }
}

/// Euler class of `L ⊗ E` for a rank-2 bundle `E` with Chern classes
/// `c1`, `c2`: `c₁(L)² + c₁(E)c₁(L) + c₂(E)`.
pub fn twisted_rank2_euler(l: &RingClass, c1: &RingClass, c2: &RingClass) -> RingClass {
    let sum = &(&(l * l) + &(c1 * l)) + c2;
    sum.normalize()
}
