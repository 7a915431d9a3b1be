//! The interval-type bound used to cap existential witnesses.
//!
//! Values grow as towers of exponentials, so they are kept symbolically as
//! `base * 2^(e_1 + ... + e_k) (+ 1)` and materialized only when small.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{Formula, FormulaError, Modality};
use crate::system::InterpretedSystem;

/// Exponent sums above this many bits are never materialized.
const MAX_BITS: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FisMode {
    /// `2|G|^2 * prod_q 2^|Q_q|` per level.
    Literal,
    /// `2|G|^2 * prod_q |Q_q|` per level, plus one.
    Tight,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FisValue {
    base: BigUint,
    exponents: Vec<FisValue>,
    plus_one: bool,
}

impl FisValue {
    pub fn from_u64(n: u64) -> FisValue {
        FisValue {
            base: BigUint::from(n),
            exponents: Vec::new(),
            plus_one: false,
        }
    }

    pub fn base(&self) -> &BigUint {
        &self.base
    }

    pub fn exponents(&self) -> &[FisValue] {
        &self.exponents
    }

    /// The exact value, when its exponent stays below a few million bits.
    pub fn exact(&self) -> Option<BigUint> {
        let mut shift = 0u64;
        for e in &self.exponents {
            shift = shift.checked_add(e.exact()?.to_u64()?)?;
            if shift > MAX_BITS {
                return None;
            }
        }
        let mut v = &self.base << shift;
        if self.plus_one {
            v += 1u32;
        }
        Some(v)
    }

    pub fn to_u64(&self) -> Option<u64> {
        if self.log2() > 64.0 {
            return None;
        }
        self.exact()?.to_u64()
    }

    pub fn to_usize(&self) -> Option<usize> {
        self.to_u64().and_then(|v| usize::try_from(v).ok())
    }

    /// Approximate binary logarithm; `inf` once it leaves `f64` range.
    pub fn log2(&self) -> f64 {
        let base = self.base.to_f64().map_or(f64::INFINITY, f64::log2);
        let sum: f64 = self.exponents.iter().map(FisValue::approx).sum();
        if self.base.is_zero() {
            return if self.plus_one {
                0.0
            } else {
                f64::NEG_INFINITY
            };
        }
        base + sum
    }

    fn approx(&self) -> f64 {
        let l = self.log2();
        if l > 1023.0 {
            f64::INFINITY
        } else {
            l.exp2() + if self.plus_one { 1.0 } else { 0.0 }
        }
    }

    // value ~ exp2^level(x), x kept below 1024
    fn tower(&self) -> (u32, f64) {
        let l = self.log2();
        if l.is_finite() {
            if l < 1000.0 {
                return (0, self.approx());
            }
            let (mut level, mut x) = (1, l);
            while x >= 1024.0 {
                x = x.log2();
                level += 1;
            }
            return (level, x);
        }
        let (level, x) = self
            .exponents
            .iter()
            .map(FisValue::tower)
            .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
            .expect("an infinite logarithm needs an exponent");
        (level + 1, x)
    }

    /// Numeric comparison; exact when both sides materialize.
    pub fn cmp_value(&self, other: &FisValue) -> Ordering {
        if let (Some(a), Some(b)) = (self.exact(), other.exact()) {
            return a.cmp(&b);
        }
        self.tower()
            .partial_cmp(&other.tower())
            .unwrap_or(Ordering::Equal)
    }

    /// Whether the value is at most `n`.
    pub fn le_u64(&self, n: u64) -> bool {
        self.to_u64().is_some_and(|v| v <= n)
    }

    fn exponent_text(&self) -> String {
        let all_exact: Option<Vec<BigUint>> = self.exponents.iter().map(FisValue::exact).collect();
        match all_exact {
            Some(v) => {
                let s: BigUint = v.into_iter().sum();
                let text = s.to_string();
                if text.len() <= 40 {
                    return text;
                }
                format!(
                    "({})",
                    scientific(self.exponents.iter().map(FisValue::log2))
                )
            }
            None => {
                let parts: Vec<String> = self.exponents.iter().map(FisValue::symbolic).collect();
                format!("({})", parts.join(" + "))
            }
        }
    }

    /// Structural form such as `288*2^288`.
    pub fn symbolic(&self) -> String {
        if let Some(v) = self.exact() {
            let text = v.to_string();
            if text.len() <= 40 {
                return text;
            }
        }
        let mut s = if self.exponents.is_empty() {
            self.base.to_string()
        } else {
            format!("{}*2^{}", self.base, self.exponent_text())
        };
        if self.plus_one {
            s.push_str(" + 1");
        }
        s
    }

    /// Decimal scientific notation when the logarithm is finite.
    pub fn scientific(&self) -> Option<String> {
        let l = self.log2();
        l.is_finite().then(|| scientific([l].into_iter()))
    }
}

// Sum of values given by their log2, rendered as m.mmme+N.
fn scientific(logs: impl Iterator<Item = f64>) -> String {
    let logs: Vec<f64> = logs.collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return "inf".into();
    }
    let l2 = max + logs.iter().map(|l| (l - max).exp2()).sum::<f64>().log2();
    let l10 = l2 * std::f64::consts::LOG10_2;
    let e = l10.floor();
    format!("{:.3}e{}", 10f64.powf(l10 - e), e as i64)
}

impl fmt::Display for FisValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = self.symbolic();
        match self.exact() {
            Some(v) if v.to_string() == sym => f.write_str(&sym),
            _ => match self.scientific() {
                Some(sci) => write!(f, "{sym} (~{sci})"),
                None => f.write_str(&sym),
            },
        }
    }
}

fn base(sys: &InterpretedSystem, mode: FisMode) -> BigUint {
    let g = BigUint::from(sys.num_configs());
    let mut b = BigUint::from(2u32) * &g * &g;
    for d in sys.dfas() {
        match mode {
            FisMode::Literal => b <<= d.num_states(),
            FisMode::Tight => b *= BigUint::from(d.num_states()),
        }
    }
    if b.is_zero() {
        b = BigUint::one();
    }
    b
}

fn value<A: Clone + PartialEq>(f: &Formula<A>, base: &BigUint, mode: FisMode) -> FisValue {
    FisValue {
        base: base.clone(),
        exponents: f
            .top_level_subformulas()
            .iter()
            .map(|(_, operand)| value(operand, base, mode))
            .collect(),
        plus_one: mode == FisMode::Tight,
    }
}

/// The literal bound, over the `<L>`-free form of `f`.
pub fn fis_bound<A: Clone + PartialEq>(
    sys: &InterpretedSystem,
    f: &Formula<A>,
) -> Result<FisValue, FormulaError> {
    fis_bound_with(sys, f, FisMode::Literal)
}

pub fn fis_bound_with<A: Clone + PartialEq>(
    sys: &InterpretedSystem,
    f: &Formula<A>,
    mode: FisMode,
) -> Result<FisValue, FormulaError> {
    let g = f.eliminate_l();
    if let Some(m) = g
        .temporal_modalities()
        .into_iter()
        .find(|m| !matches!(m, Modality::A | Modality::Bbar | Modality::N))
    {
        return Err(FormulaError::Fragment(format!(
            "the bound is defined for A, Bbar, L, N only; found {m}"
        )));
    }
    Ok(value(&g, &base(sys, mode), mode))
}
