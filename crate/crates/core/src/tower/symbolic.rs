//! Sizes that may be far too large to write down.
//!
//! A [`SymbolicSize`] keeps the expression that produced it, an exact value
//! when that value fits in [`EXACT_BIT_BUDGET`] bits, and a [`Magnitude`]
//! computed from the operands' magnitudes alone. The magnitude never looks
//! at the exact value, so the two can be cross-checked.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

/// Exact values are kept up to this many bits.
pub const EXACT_BIT_BUDGET: f64 = 4096.0;

// Values above CAP move one level up the iterated-log ladder.
const CAP: f64 = 1e15;

/// A non-negative number written as `2^2^…^value` with `height` twos.
///
/// Normalized so that `value <= CAP` and, for `height > 0`,
/// `value > log2(CAP)`; ordering by `(height, value)` is then the numeric
/// order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Magnitude {
    height: u32,
    value: f64,
}

impl Magnitude {
    pub fn zero() -> Self {
        Self { height: 0, value: 0.0 }
    }

    pub fn from_f64(value: f64) -> Self {
        Self { height: 0, value }.normalize()
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        let bits = n.bits();
        if bits <= 1000 {
            return Self::from_f64(n.to_f64().unwrap_or(f64::INFINITY));
        }
        let shift = bits - 64;
        let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
        Self {
            height: 1,
            value: top.log2() + shift as f64,
        }
        .normalize()
    }

    fn normalize(mut self) -> Self {
        while self.value > CAP {
            self.value = self.value.log2();
            self.height += 1;
        }
        while self.height > 0 && self.value <= CAP.log2() {
            self.value = self.value.exp2();
            self.height -= 1;
        }
        self
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// The top of the ladder: the number is `2^2^…^value` with
    /// [`height`](Self::height) twos.
    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn is_zero(&self) -> bool {
        self.height == 0 && self.value <= 0.0
    }

    /// `log2` of the number, as a magnitude. The number must be positive.
    pub fn log2(self) -> Self {
        if self.height == 0 {
            Self::from_f64(self.value.log2())
        } else {
            Self {
                height: self.height - 1,
                value: self.value,
            }
            .normalize()
        }
    }

    pub fn exp2(self) -> Self {
        if self.height == 0 && self.value <= CAP.log2() {
            return Self::from_f64(self.value.exp2());
        }
        Self {
            height: self.height + 1,
            value: self.value,
        }
        .normalize()
    }

    /// `log2` as a float when it fits one.
    pub fn log2_f64(&self) -> Option<f64> {
        match self.height {
            0 => Some(self.value.log2()),
            1 => Some(self.value),
            _ => None,
        }
    }

    /// `log2 log2` as a float when it fits one.
    pub fn log2_log2_f64(&self) -> Option<f64> {
        match self.height {
            0 => Some(self.value.log2().log2()),
            1 => Some(self.value.log2()),
            2 => Some(self.value),
            _ => None,
        }
    }

    fn ordered(a: Self, b: Self) -> (Self, Self) {
        if a >= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    pub fn add(self, other: Self) -> Self {
        let (hi, lo) = Self::ordered(self, other);
        if hi.height == 0 {
            return Self::from_f64(hi.value + lo.value);
        }
        if lo.is_zero() || lo.height == 0 && lo.value < 0.0 {
            return hi;
        }
        let (lh, ll) = (hi.log2(), lo.log2());
        if lh.height == 0 && ll.height == 0 {
            let gap = ll.value - lh.value;
            return Self::from_f64(lh.value + gap.exp2().ln_1p() / std::f64::consts::LN_2).exp2();
        }
        hi
    }

    /// `self − other` for `self ≥ other`. When the operands agree to float
    /// precision the larger one is returned.
    pub fn sub(self, other: Self) -> Self {
        if other.is_zero() {
            return self;
        }
        if self.height == 0 {
            return Self::from_f64((self.value - other.value).max(0.0));
        }
        let (la, lb) = (self.log2(), other.log2());
        if la.height == 0 && lb.height == 0 && lb.value < la.value {
            let gap = lb.value - la.value;
            let keep = -(gap * std::f64::consts::LN_2).exp_m1();
            return Self::from_f64(la.value + keep.log2()).exp2();
        }
        self
    }

    pub fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.height == 0 && other.height == 0 && self.value * other.value <= CAP {
            return Self::from_f64(self.value * other.value);
        }
        self.log2().add(other.log2()).exp2()
    }

    pub fn div(self, other: Self) -> Self {
        if self.height == 0 && other.height == 0 {
            return Self::from_f64(self.value / other.value);
        }
        let (la, lb) = (self.log2(), other.log2());
        if la >= lb {
            la.sub(lb).exp2()
        } else {
            Self::zero()
        }
    }

    pub fn pow(self, exponent: Self) -> Self {
        if exponent.is_zero() {
            return Self::from_f64(1.0);
        }
        if self.is_zero() {
            return Self::zero();
        }
        self.log2().mul(exponent).exp2()
    }

    /// `N^K − (N−1)^K`, which is `N^K·(1 − (1 − 1/N)^K)`.
    pub fn power_gap(n: Self, k: Self) -> Self {
        let lead = n.pow(k);
        let ratio = if n.height == 0 && k.height == 0 {
            -(k.value * (-1.0 / n.value).ln_1p()).exp_m1()
        } else {
            let (lk, ln) = (k.log2(), n.log2());
            if lk.height == 0 && ln.height == 0 {
                -(-(lk.value - ln.value).exp2()).exp_m1()
            } else {
                1.0
            }
        };
        if ratio <= 0.0 {
            return lead;
        }
        lead.log2().add(Self::from_f64(ratio.log2())).exp2()
    }
}

impl PartialOrd for Magnitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.height.cmp(&other.height) {
            Ordering::Equal => self.value.partial_cmp(&other.value),
            o => Some(o),
        }
    }
}

impl fmt::Display for Magnitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.height {
            0 => write!(f, "{:.6e}", self.value),
            1 => write!(f, "2^{:.6}", self.value),
            2 => write!(f, "2^2^{:.6}", self.value),
            h => write!(f, "2^^{h}({:.6})", self.value),
        }
    }
}

#[derive(Debug)]
enum Expr {
    Int,
    Pow2(SymbolicSize),
    Pow(SymbolicSize, SymbolicSize),
    Add(SymbolicSize, SymbolicSize),
    Sub(SymbolicSize, SymbolicSize),
    Mul(SymbolicSize, SymbolicSize),
    Div(SymbolicSize, SymbolicSize),
    PowerGap(SymbolicSize, SymbolicSize),
}

/// A count held exactly when affordable and by magnitude always.
#[derive(Debug, Clone)]
pub struct SymbolicSize {
    expr: Arc<Expr>,
    exact: Option<BigUint>,
    magnitude: Magnitude,
}

impl SymbolicSize {
    pub fn int(value: impl Into<BigUint>) -> Self {
        let value = value.into();
        Self {
            expr: Arc::new(Expr::Int),
            magnitude: Magnitude::from_biguint(&value),
            exact: Some(value),
        }
    }

    fn node(expr: Expr, magnitude: Magnitude, exact: impl FnOnce() -> Option<BigUint>) -> Self {
        let affordable = magnitude
            .log2_f64()
            .is_some_and(|bits| bits <= EXACT_BIT_BUDGET);
        Self {
            expr: Arc::new(expr),
            exact: if affordable { exact() } else { None },
            magnitude,
        }
    }

    fn both<'a>(a: &'a Self, b: &'a Self) -> Option<(&'a BigUint, &'a BigUint)> {
        Some((a.exact.as_ref()?, b.exact.as_ref()?))
    }

    pub fn pow2(e: &Self) -> Self {
        Self::node(Expr::Pow2(e.clone()), e.magnitude.exp2(), || {
            Some(BigUint::one() << e.exact.as_ref()?.to_u64()?)
        })
    }

    pub fn pow(b: &Self, e: &Self) -> Self {
        Self::node(
            Expr::Pow(b.clone(), e.clone()),
            b.magnitude.pow(e.magnitude),
            || {
                let (b, e) = Self::both(b, e)?;
                Some(num_traits::pow(b.clone(), e.to_usize()?))
            },
        )
    }

    pub fn add(a: &Self, b: &Self) -> Self {
        Self::node(
            Expr::Add(a.clone(), b.clone()),
            a.magnitude.add(b.magnitude),
            || Self::both(a, b).map(|(x, y)| x + y),
        )
    }

    /// `a − b`; the caller guarantees `a ≥ b`.
    pub fn sub(a: &Self, b: &Self) -> Self {
        Self::node(
            Expr::Sub(a.clone(), b.clone()),
            a.magnitude.sub(b.magnitude),
            || {
                let (x, y) = Self::both(a, b)?;
                assert!(x >= y, "symbolic subtraction would go negative");
                Some(x - y)
            },
        )
    }

    pub fn mul(a: &Self, b: &Self) -> Self {
        Self::node(
            Expr::Mul(a.clone(), b.clone()),
            a.magnitude.mul(b.magnitude),
            || Self::both(a, b).map(|(x, y)| x * y),
        )
    }

    /// `a / b`; exact only when `b` divides `a`.
    pub fn div(a: &Self, b: &Self) -> Self {
        Self::node(
            Expr::Div(a.clone(), b.clone()),
            a.magnitude.div(b.magnitude),
            || {
                let (x, y) = Self::both(a, b)?;
                let (q, r) = x.div_rem(y);
                r.is_zero().then_some(q)
            },
        )
    }

    /// `n^k − (n−1)^k` for `n ≥ 1`.
    pub fn power_gap(n: &Self, k: &Self) -> Self {
        Self::node(
            Expr::PowerGap(n.clone(), k.clone()),
            Magnitude::power_gap(n.magnitude, k.magnitude),
            || {
                let (n, k) = Self::both(n, k)?;
                let k = k.to_usize()?;
                Some(num_traits::pow(n.clone(), k) - num_traits::pow(n - 1u32, k))
            },
        )
    }

    pub fn exact(&self) -> Option<&BigUint> {
        self.exact.as_ref()
    }

    pub fn magnitude(&self) -> Magnitude {
        self.magnitude
    }

    /// Exact decimal if known, otherwise the magnitude.
    pub fn describe(&self) -> String {
        match &self.exact {
            Some(v) => v.to_string(),
            None => format!("~{}", self.magnitude),
        }
    }

    /// The expression, with exact leaves of up to 40 digits inlined.
    pub fn formula(&self) -> String {
        if let Some(v) = &self.exact {
            let s = v.to_string();
            if s.len() <= 40 {
                return s;
            }
        }
        match &*self.expr {
            Expr::Int => self.describe(),
            Expr::Pow2(e) => format!("2^({})", e.formula()),
            Expr::Pow(b, e) => format!("({})^({})", b.formula(), e.formula()),
            Expr::Add(a, b) => format!("{} + {}", a.formula(), b.formula()),
            Expr::Sub(a, b) => format!("{} - ({})", a.formula(), b.formula()),
            Expr::Mul(a, b) => format!("({})·({})", a.formula(), b.formula()),
            Expr::Div(a, b) => format!("({})/({})", a.formula(), b.formula()),
            Expr::PowerGap(n, k) => {
                let (n, k) = (n.formula(), k.formula());
                format!("({n})^({k}) - ({n} - 1)^({k})")
            }
        }
    }
}

impl fmt::Display for SymbolicSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// `{"exact": "…"}`, `{"log2": x}` or `{"log2_log2": x}`.
impl Serialize for SymbolicSize {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(1))?;
        match (&self.exact, self.magnitude.height) {
            (Some(v), _) => map.serialize_entry("exact", &v.to_string())?,
            (None, 0 | 1) => map.serialize_entry("log2", &self.magnitude.log2_f64())?,
            (None, 2) => map.serialize_entry("log2_log2", &self.magnitude.log2_log2_f64())?,
            (None, h) => map.serialize_entry(
                "iterated_log",
                &serde_json::json!({"height": h, "value": self.magnitude.value}),
            )?,
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn int(v: u64) -> SymbolicSize {
        SymbolicSize::int(v)
    }

    fn close(m: Magnitude, exact: &BigUint) -> bool {
        let want = Magnitude::from_biguint(exact);
        match (m.log2_f64(), want.log2_f64()) {
            (Some(a), Some(b)) => (a - b).abs() <= 1e-6 * b.abs().max(1.0),
            _ => false,
        }
    }

    #[test]
    fn normalization_and_order() {
        let big = Magnitude::from_f64(1e20);
        assert_eq!(big.height(), 1);
        assert!(big > Magnitude::from_f64(1e14));
        assert_eq!(big.log2().exp2().height(), 1);
        assert!(Magnitude::from_f64(3.0).exp2().log2_f64().unwrap() - 3.0 < 1e-12);
    }

    #[test]
    fn magnitude_of_huge_integer() {
        let n: BigUint = BigUint::one() << 5000u32;
        let m = Magnitude::from_biguint(&n);
        assert!((m.log2_f64().unwrap() - 5000.0).abs() < 1e-9);
    }

    #[test]
    fn exact_budget_is_respected() {
        let small = SymbolicSize::pow(&int(64), &int(16));
        assert_eq!(small.exact(), Some(&(BigUint::one() << 96u32)));
        let large = SymbolicSize::pow(&int(2048), &int(512));
        assert!(large.exact().is_none());
        assert!((large.magnitude().log2_f64().unwrap() - 5632.0).abs() < 1e-6);
    }

    #[test]
    fn power_gap_matches_exact_beyond_the_budget() {
        // 2048^512 − 2047^512 has ~5632 bits; compare the estimate with a
        // direct big-integer evaluation.
        let gap = SymbolicSize::power_gap(&int(2048), &int(512));
        assert!(gap.exact().is_none());
        let exact = num_traits::pow(BigUint::from(2048u32), 512)
            - num_traits::pow(BigUint::from(2047u32), 512);
        assert!(close(gap.magnitude(), &exact));
    }

    #[test]
    fn doubly_exponential_sizes_stay_finite() {
        let e = int(1u64 << 40);
        let n = SymbolicSize::mul(&SymbolicSize::pow2(&int(3)), &SymbolicSize::pow2(&e));
        let k = SymbolicSize::pow2(&e);
        let total = SymbolicSize::power_gap(&n, &k);
        let m = total.magnitude();
        assert_eq!(m.height(), 2);
        // log2 log2 (N^K) = log2(K · log2 N) = 2^40 + log2(2^40 + 3).
        let want = 2f64.powi(40) + 40.0;
        assert!((m.log2_log2_f64().unwrap() - want).abs() < 1e-6 * want);
        assert!(total.describe().starts_with('~'));
    }

    #[test]
    fn serialization_forms() {
        let j = |s: &SymbolicSize| serde_json::to_string(s).unwrap();
        assert_eq!(j(&int(12)), r#"{"exact":"12"}"#);
        let big = SymbolicSize::pow(&int(2048), &int(512));
        assert!(j(&big).starts_with(r#"{"log2":5632"#));
        let huge = SymbolicSize::pow2(&SymbolicSize::pow2(&int(1u64 << 40)));
        assert!(j(&huge).starts_with(r#"{"log2_log2":"#));
    }

    #[test]
    fn formula_inlines_small_leaves() {
        let x = SymbolicSize::pow(&int(2048), &int(512));
        assert_eq!(x.formula(), "(2048)^(512)");
    }

    fn arb_expr() -> impl Strategy<Value = SymbolicSize> {
        let leaf = (1u64..1000).prop_map(int);
        leaf.prop_recursive(3, 16, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SymbolicSize::add(&a, &b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| SymbolicSize::mul(&a, &b)),
                (inner.clone(), 0u64..4).prop_map(|(a, e)| SymbolicSize::pow(&a, &int(e))),
                // Differences are kept away from cancellation: the smaller
                // operand is at most half the larger.
                (inner.clone(), inner.clone()).prop_map(|(a, b)| {
                    let (hi, lo) = if a.exact() >= b.exact() { (a, b) } else { (b, a) };
                    if lo.exact().unwrap() * 2u32 <= *hi.exact().unwrap() {
                        SymbolicSize::sub(&hi, &lo)
                    } else {
                        SymbolicSize::add(&hi, &lo)
                    }
                }),
                (1u64..100, 1u64..12).prop_map(|(n, k)| SymbolicSize::power_gap(&int(n), &int(k))),
            ]
        })
    }

    proptest! {
        #[test]
        fn magnitude_agrees_with_exact_below_2_pow_64(x in arb_expr()) {
            let exact = x.exact().expect("small expressions are exact").clone();
            prop_assume!(exact.bits() <= 64 && !exact.is_zero());
            let m = x.magnitude();
            let want = exact.to_f64().unwrap();
            prop_assert!((m.log2_f64().unwrap() - want.log2()).abs() < 1e-6, "{} vs {}", m, want);
        }
    }
}
