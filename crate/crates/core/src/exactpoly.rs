//! Dense univariate polynomials in `d` over arbitrary-precision rationals.
//!
//! Every count computed by this crate is a [`Polynomial`]. Coefficients are
//! stored low-to-high with no trailing zeros, so the zero polynomial is the
//! empty vector and equality is structural.
//!
//! ```
//! use curvecount::Polynomial;
//!
//! let p = Polynomial::from_ints(&[-1, 1]) * Polynomial::from_ints(&[-2, 1]);
//! assert_eq!(p, Polynomial::from_ints(&[2, -3, 1]));
//! assert_eq!(p.to_string(), "d^2 - 3d + 2");
//! assert_eq!(p.eval_to_int(5), Some(12.into()));
//! ```

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Polynomial {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Polynomial {
        Polynomial { coeffs: vec![] }
    }

    pub fn one() -> Polynomial {
        Polynomial::constant(1)
    }

    pub fn constant(c: i64) -> Polynomial {
        Polynomial::new(vec![BigRational::from_integer(c.into())])
    }

    /// The variable `d`.
    pub fn d() -> Polynomial {
        Polynomial::from_ints(&[0, 1])
    }

    /// Builds `c[0] + c[1] d + c[2] d^2 + ...`.
    pub fn from_ints(c: &[i64]) -> Polynomial {
        Polynomial::new(
            c.iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// The constant term.
    pub fn constant_term(&self) -> BigRational {
        self.coeffs
            .first()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn scale_int(&self, c: i64) -> Polynomial {
        self.scale(&BigRational::from_integer(c.into()))
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        (0..e).fold(Polynomial::one(), |acc, _| &acc * self)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, x: i64) -> BigRational {
        self.eval(&BigRational::from_integer(x.into()))
    }

    /// The value at an integer, if it is an integer.
    pub fn eval_to_int(&self, x: i64) -> Option<BigInt> {
        let v = self.eval_int(x);
        v.is_integer().then(|| v.to_integer())
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(BigRational::is_integer)
    }

    /// True when the polynomial takes integer values at every integer.
    ///
    /// A polynomial of degree `k` is integer-valued exactly when it is
    /// integral at `k + 1` consecutive integers.
    pub fn is_integer_valued(&self) -> bool {
        (0..self.coeffs.len() as i64).all(|x| self.eval_int(x).is_integer())
    }

    /// Divides by a nonzero integer.
    ///
    /// With `demand_integral`, every coefficient of the quotient must be an
    /// integer, otherwise [`Error::NonExactDivision`] is returned.
    pub fn div_exact(&self, k: i64, demand_integral: bool) -> Result<Polynomial> {
        assert!(k != 0, "division by zero");
        let q = self.scale(&BigRational::new(1.into(), k.into()));
        if demand_integral && !q.is_integral() {
            return Err(Error::NonExactDivision {
                context: "integral quotient".into(),
                poly: self.clone(),
                divisor: k,
            });
        }
        Ok(q)
    }

    /// Coefficients as exact strings, `"n"` or `"n/m"`.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(ToString::to_string).collect()
    }

    pub fn from_strings<S: AsRef<str>>(items: &[S]) -> Result<Polynomial> {
        let coeffs = items
            .iter()
            .map(|s| {
                let s = s.as_ref().trim();
                BigRational::from_str(s)
                    .map_err(|_| Error::Schema(format!("bad coefficient {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Polynomial::new(coeffs))
    }
}

impl From<i64> for Polynomial {
    fn from(c: i64) -> Polynomial {
        Polynomial::constant(c)
    }
}

impl From<BigInt> for Polynomial {
    fn from(c: BigInt) -> Polynomial {
        Polynomial::new(vec![BigRational::from_integer(c)])
    }
}

impl From<BigRational> for Polynomial {
    fn from(c: BigRational) -> Polynomial {
        Polynomial::new(vec![c])
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let abs = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let coef = if !abs.is_integer() && i > 0 {
                format!("({abs})")
            } else {
                abs.to_string()
            };
            match i {
                0 => f.write_str(&coef)?,
                _ => {
                    if !abs.is_one() {
                        f.write_str(&coef)?;
                    }
                    f.write_str("d")?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Polynomial, D::Error> {
        let items = Vec::<String>::deserialize(de)?;
        Polynomial::from_strings(&items).map_err(serde::de::Error::custom)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigRational::zero();
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_binop {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial { (&self).$m(&rhs) }
        }
        impl $tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: &Polynomial) -> Polynomial { (&self).$m(rhs) }
        }
        impl $tr<Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial { self.$m(&rhs) }
        }
    )*};
}

forward_binop!(Add add, Sub sub, Mul mul);

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Polynomial> for Polynomial {
    fn sub_assign(&mut self, rhs: &Polynomial) {
        *self = &*self - rhs;
    }
}

impl Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::zero(), |a, b| a + b)
    }
}

impl Product for Polynomial {
    fn product<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        iter.fold(Polynomial::one(), |a, b| a * b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(c)
    }

    fn int(x: i64) -> BigRational {
        BigRational::from_integer(x.into())
    }

    #[test]
    fn cancellation_and_identity() {
        assert_eq!(p(&[-1, 1]) + p(&[1]), Polynomial::d());
        let q = p(&[4, 0, 7]);
        assert_eq!(Polynomial::zero() + &q, q);
        assert_eq!(p(&[0, 1]) - p(&[0, 1]), Polynomial::zero());
        assert!((p(&[1, 2]) - p(&[1, 2])).coeffs().is_empty());
    }

    #[test]
    fn addition_matches_integer_arithmetic() {
        let s = p(&[-11, -3, 3]) + p(&[0, 3]);
        assert_eq!(s, p(&[-11, 0, 3]));
        assert_eq!(s.eval_int(2), int(3 * 4 - 3 * 2 - 11 + 3 * 2));
    }

    #[test]
    fn products() {
        assert_eq!(p(&[-1, 1]) * p(&[-2, 1]), p(&[2, -3, 1]));
        assert_eq!(p(&[5, 1]) * Polynomial::zero(), Polynomial::zero());
        let binodal = p(&[-2, 1]) * p(&[-1, 1]) * p(&[-11, -3, 3]) * p(&[3]);
        assert_eq!(binodal.eval_int(3), int(42));
    }

    #[test]
    fn evaluation() {
        let tacnode = p(&[6]) * p(&[-3, 1]) * p(&[280, -122, -71, 25]);
        assert_eq!(tacnode.eval_int(4), int(1536));
        let cusp = p(&[12]) * p(&[-3, 1]) * p(&[18, -11, -6, 3]);
        assert_eq!(cusp.eval_int(3), int(0));
        assert_eq!(p(&[7, 1, 1]).eval_int(0), int(7));
    }

    #[test]
    fn exact_division() {
        assert_eq!(p(&[0, -9, 3]).div_exact(3, true).unwrap(), p(&[0, -3, 1]));
        assert!(matches!(
            p(&[1, 2]).div_exact(2, true),
            Err(Error::NonExactDivision { .. })
        ));
        let half = p(&[1, 2]).div_exact(2, false).unwrap();
        assert_eq!(half.coeffs()[0], BigRational::new(1.into(), 2.into()));
    }

    #[test]
    fn integer_valued_but_not_integral() {
        let tri = (p(&[0, 1]) * p(&[1, 1])).div_exact(2, false).unwrap();
        assert!(!tri.is_integral());
        assert!(tri.is_integer_valued());
        assert!(!p(&[1, 1]).div_exact(2, false).unwrap().is_integer_valued());
    }

    #[test]
    fn display() {
        assert_eq!(Polynomial::zero().to_string(), "0");
        assert_eq!(p(&[-11, -3, 3]).to_string(), "3d^2 - 3d - 11");
        assert_eq!(p(&[0, -1]).to_string(), "-d");
        let q = p(&[1, 1]).div_exact(2, false).unwrap();
        assert_eq!(q.to_string(), "(1/2)d + 1/2");
    }

    #[test]
    fn json_round_trip() {
        let q = p(&[1, 1]).div_exact(2, false).unwrap() - p(&[0, 0, 4]);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"["1/2","1/2","-4"]"#);
        assert_eq!(serde_json::from_str::<Polynomial>(&s).unwrap(), q);
        assert!(serde_json::from_str::<Polynomial>(r#"["x"]"#).is_err());
        assert_eq!(
            serde_json::from_str::<Polynomial>(r#"["2/4","0"]"#).unwrap(),
            Polynomial::new(vec![BigRational::new(1.into(), 2.into())])
        );
    }

    fn small_poly() -> impl Strategy<Value = Polynomial> {
        prop::collection::vec(-50i64..50, 0..5).prop_map(|c| Polynomial::from_ints(&c))
    }

    fn eval_i128(c: &[i64], x: i128) -> i128 {
        c.iter().rev().fold(0i128, |acc, &k| acc * x + k as i128)
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&a + &b, &b + &a);
        }

        #[test]
        fn canonical_form(a in small_poly(), b in small_poly()) {
            for r in [&a + &b, &a - &b, &a * &b] {
                prop_assert!(r.coeffs().last().map_or(true, |c| !c.is_zero()));
            }
        }

        #[test]
        fn eval_is_a_homomorphism(a in small_poly(), b in small_poly(), x in -20i64..20) {
            let prod = (&a * &b).eval_int(x);
            prop_assert_eq!(prod, a.eval_int(x) * b.eval_int(x));
        }

        #[test]
        fn product_matches_integer_oracle(
            ca in prop::collection::vec(-30i64..30, 0..4),
            cb in prop::collection::vec(-30i64..30, 0..4),
        ) {
            let prod = Polynomial::from_ints(&ca) * Polynomial::from_ints(&cb);
            let deg = prod.degree().unwrap_or(0) as i128;
            for x in 0..=deg + 1 {
                let expect = eval_i128(&ca, x) * eval_i128(&cb, x);
                prop_assert_eq!(prod.eval_int(x as i64), BigRational::from_integer(expect.into()));
            }
        }
    }
}
