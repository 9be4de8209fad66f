//! Closed-form evaluators for the rewrite-count guarantees and upper bounds
//! the codes are measured against.
//!
//! Exact constants stay exact: bounds with rational closed forms are
//! returned as [`Ratio`] values and floored only at the comparison site.
//! Log-based forms use `f64` with base-2 logs; a log argument below 2 is
//! clamped to 2 (so the log never drops below 1), and the report notes when
//! a clamp fired.

use serde::Serialize;
use std::cmp::Ordering;
use std::fmt;

use crate::registers::choose_b;

/// An exact rational, normalized, `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = if (num < 0) != (den < 0) && num != 0 {
            -1
        } else {
            1
        };
        let (num, den) = (num.abs(), den.abs());
        let g = gcd(num as u64, den as u64) as i64;
        Ratio {
            num: sign * num / g,
            den: den / g,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Ratio { num: v, den: 1 }
    }

    pub fn floor(&self) -> i64 {
        self.num.div_euclid(self.den)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn min(self, other: Ratio) -> Ratio {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn scale(self, k: i64) -> Ratio {
        Ratio::new(self.num * k, self.den)
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Base-2 log with the argument clamped to at least 2, so the result is
/// always >= 1. Keeps the closed forms finite at tiny `L`.
pub fn guarded_log2(x: f64) -> f64 {
    x.max(2.0).log2()
}

/// `L <= 2^(n/16)`, the regime in which the split-code analysis applies.
pub fn in_split_regime(n: u64, alphabet: u64) -> bool {
    alphabet >= 2 && 16.0 * (alphabet as f64).log2() <= n as f64 + 1e-9
}

/// Modular-code guarantee: `b0 (L+4)(q-1)/4` rewrites with `b0 = floor(n/L)`
/// groups, and its weaker uniform form `n(q-1)/8`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModularBound {
    pub per_group_form: Ratio,
    pub uniform_form: Ratio,
    /// True iff `2 <= L <= n`, the construction's domain.
    pub regime_ok: bool,
}

pub fn lb_modular(n: u64, q: u32, alphabet: u64) -> ModularBound {
    let groups = (n / alphabet.max(1)) as i64;
    ModularBound {
        per_group_form: Ratio::new(groups * (alphabet as i64 + 4) * (i64::from(q) - 1), 4),
        uniform_form: Ratio::new(n as i64 * (i64::from(q) - 1), 8),
        regime_ok: 2 <= alphabet && alphabet <= n,
    }
}

/// Base-representation guarantee `q / ceil(c)`. A `c` below 2 would mean a
/// degenerate radix-1 representation, so the radix is clamped to 2 and the
/// clamp reported.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BaseRepBound {
    pub value: Ratio,
    pub radix: u32,
    pub radix_clamped: bool,
}

pub fn lb_baserep(q: u32, c_param: f64) -> BaseRepBound {
    let ceil_c = c_param.ceil().max(1.0) as u32;
    let radix = ceil_c.max(2);
    BaseRepBound {
        value: Ratio::new(i64::from(q), i64::from(radix)),
        radix,
        radix_clamped: ceil_c < 2,
    }
}

/// Split-code guarantee `n(q-1) log(n/log L) / (16 log L)`, log base 2.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SplitBound {
    pub value: f64,
    /// True iff `n <= L <= 2^(n/16)`.
    pub regime_ok: bool,
}

pub fn lb_split(n: u64, q: u32, alphabet: u64) -> SplitBound {
    let log_l = guarded_log2(alphabet as f64);
    let value = n as f64 * f64::from(q - 1) * guarded_log2(n as f64 / log_l) / (16.0 * log_l);
    SplitBound {
        value,
        regime_ok: alphabet >= n && in_split_regime(n, alphabet),
    }
}

/// Universal ceiling `n(q-1)`: every rewrite raises at least one cell by at
/// least one level.
pub fn ub_trivial(n: u64, q: u32) -> u64 {
    n * u64::from(q - 1)
}

/// `C(v, u)` in exact integer arithmetic, saturating at `u128::MAX` (a
/// saturated value only ever gets compared against desk-scale alphabets).
pub fn binomial_saturating(v: u64, u: u64) -> u128 {
    if u > v {
        return 0;
    }
    let u = u.min(v - u);
    let mut acc: u128 = 1;
    for i in 1..=u {
        match acc.checked_mul((v - u + i) as u128) {
            Some(p) => acc = p / i as u128,
            None => return u128::MAX,
        }
    }
    acc
}

/// Largest `r` with `C(r+n-1, r) < L-1`: that many single-level raises still
/// cannot reach enough distinct states to cover every rewrite target. Zero
/// when `n >= L-1`.
///
/// `C(r+n-1, r)` is increasing in `r`, so the scan doubles then bisects;
/// the binomial is evaluated through its `n-1` short factors, which keeps
/// tiny-`n`, huge-`L` inputs exact and fast.
///
/// For `n = 1` every `r` trivially qualifies (one cell raised `r` times
/// reaches one state); the meaningful answer is `L-2`, the worst-case raise
/// count to reach any of `L-1` targets on a single cell.
pub fn max_r(n: u64, alphabet: u64) -> u64 {
    if alphabet < 2 || n + 1 >= alphabet {
        return 0;
    }
    if n == 1 {
        return alphabet - 2;
    }
    let qualifies = |r: u64| binomial_saturating(r + n - 1, r) < (alphabet - 1) as u128;
    debug_assert!(qualifies(1), "n < L-1 implies r=1 qualifies");
    let mut hi = 1;
    while qualifies(hi * 2) {
        hi *= 2;
    }
    // Largest qualifying r lies in [hi, 2*hi).
    let mut lo = hi;
    hi *= 2;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if qualifies(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Complete-graph ceiling `floor(n(q-1) / (r+1))`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompleteBound {
    pub r: u64,
    pub value: u64,
    /// True iff `n < L-1`, where the bound improves on `n(q-1)`.
    pub precondition_ok: bool,
}

pub fn ub_complete(n: u64, q: u32, alphabet: u64) -> CompleteBound {
    let r = max_r(n, alphabet);
    CompleteBound {
        r,
        value: ub_trivial(n, q) / (r + 1),
        precondition_ok: n + 1 < alphabet,
    }
}

/// The out-degree threshold `floor(n log(n/log L) / (2 log L))` separating
/// the small-delta trajectory layout from the large-delta one.
pub fn delta_threshold(n: u64, alphabet: u64) -> u64 {
    let log_l = guarded_log2(alphabet as f64);
    (n as f64 * guarded_log2(n as f64 / log_l) / (2.0 * log_l)).floor() as u64
}

/// Parameter check for the robust code's guarantee, which needs
/// `nq >= c * L log L` for a constant depending on the slack `epsilon`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RobustRegime {
    pub nq: u64,
    pub l_log_l: f64,
    pub ratio: f64,
    pub epsilon: f64,
    pub c: f64,
    pub meets: bool,
}

pub fn robust_regime(n: u64, q: u32, alphabet: u64, epsilon: f64, c: f64) -> RobustRegime {
    let nq = n * u64::from(q);
    let l_log_l = alphabet as f64 * guarded_log2(alphabet as f64);
    let ratio = nq as f64 / l_log_l;
    RobustRegime {
        nq,
        l_log_l,
        ratio,
        epsilon,
        c,
        meets: ratio >= c,
    }
}

/// Everything the harness attaches to a run: lower bounds per construction,
/// the two ceilings, and the parameter-regime flags that say which
/// guarantees apply.
#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub n: u64,
    pub q: u32,
    pub alphabet: u64,
    pub delta: Option<u64>,
    pub lb_modular: ModularBound,
    pub lb_baserep: BaseRepBound,
    pub lb_split: SplitBound,
    pub ub_trivial: u64,
    pub ub_complete: CompleteBound,
    pub b: Option<u64>,
    pub delta_threshold: u64,
    pub robust: RobustRegime,
    pub notes: Vec<String>,
}

impl BoundsReport {
    pub fn evaluate(
        n: u64,
        q: u32,
        alphabet: u64,
        delta: Option<u64>,
        epsilon: f64,
        c: f64,
    ) -> Self {
        let mut notes = Vec::new();
        let c_param = (alphabet as f64).powf(1.0 / n as f64);
        let lb_baserep = lb_baserep(q, c_param);
        if lb_baserep.radix_clamped {
            notes.push("base-rep radix clamped to 2".into());
        }
        if !in_split_regime(n, alphabet) {
            notes.push(format!(
                "L={alphabet} outside L <= 2^(n/16): split/trajectory guarantees do not apply"
            ));
        }
        BoundsReport {
            n,
            q,
            alphabet,
            delta,
            lb_modular: lb_modular(n, q, alphabet),
            lb_baserep,
            lb_split: lb_split(n, q, alphabet),
            ub_trivial: ub_trivial(n, q),
            ub_complete: ub_complete(n, q, alphabet),
            b: choose_b(n as usize, alphabet as usize)
                .ok()
                .map(|b| b as u64),
            delta_threshold: delta_threshold(n, alphabet),
            robust: robust_regime(n, q, alphabet, epsilon, c),
            notes,
        }
    }
}
