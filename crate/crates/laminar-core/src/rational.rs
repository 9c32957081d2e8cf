//! Exact slope arithmetic: reduced fractions p/q including the infinite
//! slope 1/0, distance Δ, parity pairs, continued-fraction expansions, and
//! the normal form of Montesinos knot data.

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A slope p/q in lowest terms.
///
/// Invariants: gcd(|p|, q) = 1; q ≥ 0, and q = 0 only for the infinite
/// slope 1/0 (stored as p = 1, q = 0). For finite slopes the sign is
/// carried by p.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

/// Parity class of (p mod 2, q mod 2). (even, even) cannot occur for a
/// reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ParityPair {
    /// odd / even — the class of 1/0
    OE,
    /// even / odd — the class of 0/1
    EO,
    /// odd / odd — the class of 1/1
    OO,
}

/// Expansion p/q = v₁ + [c₁, …, cₙ] where [c₁, …, cₖ] denotes
/// 1/(c₁ − 1/(c₂ − … − 1/cₖ)). Canonical form has every |cᵢ| ≥ 2 with all
/// cᵢ of one sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContFrac {
    pub v1: i64,
    pub cs: Vec<i64>,
}

/// Which sign of c₁ to produce in [`cont_frac`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfSign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RationalError {
    #[error("slope 0/0 is not defined")]
    ZeroZero,
    #[error("operation requires a finite non-integer slope, got {0}")]
    DegenerateSlope(Slope),
    #[error("continued fraction hits division by zero at position {0}")]
    CfDivisionByZero(usize),
    #[error("continued fraction contains a zero coefficient at position {0}")]
    CfZeroCoefficient(usize),
    #[error("{p} and {q} are not coprime")]
    NotCoprime { p: i64, q: i64 },
    #[error("cannot parse {0:?} as a slope")]
    Parse(String),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Floor of p/q for q > 0.
fn div_floor(p: i64, q: i64) -> i64 {
    debug_assert!(q > 0);
    let d = p / q;
    if p % q != 0 && p < 0 {
        d - 1
    } else {
        d
    }
}

fn div_ceil(p: i64, q: i64) -> i64 {
    -div_floor(-p, q)
}

/// Build a reduced, sign-canonical slope. (±1, 0) and any (p, 0) with
/// p ≠ 0 map to 1/0.
pub fn make_slope(p: i64, q: i64) -> Result<Slope, RationalError> {
    if p == 0 && q == 0 {
        return Err(RationalError::ZeroZero);
    }
    if q == 0 {
        return Ok(Slope { p: 1, q: 0 });
    }
    let g = gcd(p, q);
    let (mut p, mut q) = (p / g, q / g);
    if q < 0 {
        p = -p;
        q = -q;
    }
    Ok(Slope { p, q })
}

impl Slope {
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };

    pub fn new(p: i64, q: i64) -> Slope {
        make_slope(p, q).expect("slope 0/0")
    }

    pub fn is_infinite(self) -> bool {
        self.q == 0
    }

    pub fn is_integer(self) -> bool {
        self.q == 1
    }

    pub fn floor(self) -> i64 {
        debug_assert!(!self.is_infinite());
        div_floor(self.p, self.q)
    }

    pub fn ceil(self) -> i64 {
        debug_assert!(!self.is_infinite());
        div_ceil(self.p, self.q)
    }

    /// r + n for integer n; leaves 1/0 fixed.
    pub fn add_int(self, n: i64) -> Slope {
        Slope {
            p: self.p + n * self.q,
            q: self.q,
        }
    }

    /// 1 − r; leaves 1/0 fixed (the vertical-reflection action on diagrams).
    pub fn one_minus(self) -> Slope {
        if self.is_infinite() {
            self
        } else {
            Slope {
                p: self.q - self.p,
                q: self.q,
            }
        }
    }

    /// −r; leaves 1/0 fixed.
    pub fn neg(self) -> Slope {
        if self.is_infinite() {
            self
        } else {
            Slope {
                p: -self.p,
                q: self.q,
            }
        }
    }

    /// Freshman sum (p₁+p₂)/(q₁+q₂); the Farey mediant of two neighbors.
    pub fn mediant(a: Slope, b: Slope) -> Slope {
        Slope::new(a.p + b.p, a.q + b.q)
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order with 1/0 greatest (it plays +∞ in diagram layouts).
impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.is_infinite() && other.is_infinite() {
            return Ordering::Equal;
        }
        if self.is_infinite() {
            return Ordering::Greater;
        }
        if other.is_infinite() {
            return Ordering::Less;
        }
        (self.p * other.q).cmp(&(other.p * self.q))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl fmt::Debug for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for Slope {
    type Err = RationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RationalError::Parse(s.to_string());
        let (ps, qs) = match s.split_once('/') {
            Some(pair) => pair,
            None => (s, "1"),
        };
        let p: i64 = ps.trim().parse().map_err(|_| bad())?;
        let q: i64 = qs.trim().parse().map_err(|_| bad())?;
        make_slope(p, q).map_err(|_| bad())
    }
}

impl Serialize for Slope {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Slope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Δ(p₁/q₁, p₂/q₂) = |p₁q₂ − p₂q₁|. Zero iff the slopes are equal;
/// one means Farey neighbors.
pub fn delta(r: Slope, s: Slope) -> i64 {
    (r.p * s.q - s.p * r.q).abs()
}

pub fn parity_pair(r: Slope) -> ParityPair {
    match (r.p.rem_euclid(2), r.q.rem_euclid(2)) {
        (1, 0) => ParityPair::OE,
        (0, 1) => ParityPair::EO,
        (1, 1) => ParityPair::OO,
        _ => unreachable!("reduced fraction cannot be even/even"),
    }
}

/// Canonical continued-fraction expansion of a finite slope, with all
/// coefficients ≥ 2 (`CfSign::Positive`) or all ≤ −2 (`CfSign::Negative`).
/// Integers get an empty coefficient list.
///
/// With m the integer such that m < p/q < m+1, the produced v₁ is m for the
/// positive variant and m+1 for the negative one.
pub fn cont_frac(r: Slope, sign: CfSign) -> Result<ContFrac, RationalError> {
    if r.is_infinite() {
        return Err(RationalError::DegenerateSlope(r));
    }
    if r.is_integer() {
        return Ok(ContFrac {
            v1: r.p,
            cs: vec![],
        });
    }
    match sign {
        CfSign::Positive => {
            let v1 = r.floor();
            // x = a/b in (0,1); x = 1/(c - y) with c = ceil(b/a) ≥ 2 keeps
            // the tail y = (c·a − b)/a in [0,1).
            let (mut a, mut b) = (r.p - v1 * r.q, r.q);
            let mut cs = vec![];
            while a != 0 {
                let c = div_ceil(b, a);
                cs.push(c);
                (a, b) = (c * a - b, a);
            }
            Ok(ContFrac { v1, cs })
        }
        CfSign::Negative => {
            let v1 = r.ceil();
            // x = a/b in (-1,0) with b > 0; x = 1/(c - y) with
            // c = floor(b/a) ≤ -2 keeps the tail y = c - b/a in (-1,0].
            let (mut a, mut b) = (r.p - v1 * r.q, r.q);
            let mut cs = vec![];
            while a != 0 {
                let c = div_floor(-b, -a);
                cs.push(c);
                (a, b) = (b - c * a, -a);
            }
            Ok(ContFrac { v1, cs })
        }
    }
}

/// Evaluate v₁ + [c₁, …, cₙ] exactly. Works for arbitrary nonzero
/// coefficients, not just canonical ones; reports the position where a
/// division by zero arises if the expansion is degenerate.
pub fn eval_cont_frac(cf: &ContFrac) -> Result<Slope, RationalError> {
    if let Some(i) = cf.cs.iter().position(|&c| c == 0) {
        return Err(RationalError::CfZeroCoefficient(i));
    }
    // Evaluate back to front: t ← 1/(cᵢ − t).
    let (mut tp, mut tq) = (0i64, 1i64);
    for (i, &c) in cf.cs.iter().enumerate().rev() {
        let np = c * tq - tp;
        if np == 0 {
            return Err(RationalError::CfDivisionByZero(i));
        }
        (tp, tq) = (tq, np);
    }
    Ok(Slope::new(cf.v1 * tq + tp, tq))
}

/// The mod-q inverse of −p with minimal absolute value: p·p̄ ≡ −1 (mod q)
/// and 2|p̄| ≤ q. When q is even and ±q/2 both qualify, returns +q/2.
pub fn mod_neg_inverse(p: i64, q: i64) -> Result<i64, RationalError> {
    assert!(q >= 2);
    if gcd(p, q) != 1 {
        return Err(RationalError::NotCoprime { p, q });
    }
    // Extended Euclid for p⁻¹ mod q.
    let (mut r0, mut r1) = (q, p.rem_euclid(q));
    let (mut s0, mut s1) = (0i64, 1i64);
    while r1 != 0 {
        let k = r0 / r1;
        (r0, r1) = (r1, r0 - k * r1);
        (s0, s1) = (s1, s0 - k * s1);
    }
    let inv = s0.rem_euclid(q);
    let x0 = (-inv).rem_euclid(q); // in [0, q)
    let lo = x0 - q;
    Ok(if x0.abs() < lo.abs() {
        x0
    } else if lo.abs() < x0.abs() {
        lo
    } else {
        x0 // tie at ±q/2 → positive
    })
}

/// Normalized Montesinos knot data K(r₁, …, r_k, n): each rᵢ in (0, 1),
/// integer parts folded into the band twist count n, mirrored if that puts
/// n below −1 where the mirror improves it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MontesinosKnot {
    pub tangles: Vec<Slope>,
    pub n: i64,
    pub mirrored: bool,
    /// True when every tangle is 1/qᵢ or (qᵢ−1)/qᵢ, i.e. the knot is a
    /// pretzel up to (q−1)/q ↦ 1/(−q) rewrites with twist compensation.
    pub pretzel: bool,
}

/// Fold each tangle into (0,1) (compensating n), then mirror
/// (rᵢ ↦ 1 − rᵢ, n ↦ −n − k) when n < −1 and the mirror strictly raises
/// it. Idempotent.
pub fn normalize_montesinos(raw: &[Slope], n: i64) -> Result<MontesinosKnot, RationalError> {
    let mut n = n;
    let mut tangles = Vec::with_capacity(raw.len());
    for &r in raw {
        if r.is_infinite() || r.is_integer() {
            return Err(RationalError::DegenerateSlope(r));
        }
        let t = r.floor();
        tangles.push(r.add_int(-t));
        n += t;
    }
    let k = raw.len() as i64;
    let mut mirrored = false;
    if n < -1 && -n - k > n {
        for r in &mut tangles {
            *r = r.one_minus();
        }
        n = -n - k;
        mirrored = true;
    }
    let pretzel = tangles.iter().all(|r| r.p == 1 || r.p == r.q - 1);
    Ok(MontesinosKnot {
        tangles,
        n,
        mirrored,
        pretzel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(p: i64, q: i64) -> Slope {
        Slope::new(p, q)
    }

    #[test]
    fn make_slope_canonical() {
        assert_eq!(make_slope(6, 10).unwrap(), s(3, 5));
        assert_eq!(make_slope(-3, 0).unwrap(), Slope::INFINITY);
        assert_eq!(make_slope(3, -5).unwrap(), s(-3, 5));
        assert_eq!(make_slope(0, 0), Err(RationalError::ZeroZero));
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(Slope::INFINITY, s(3, 11)), 11);
        assert_eq!(delta(s(1, 2), s(1, 3)), 1);
        assert_eq!(delta(s(1, 2), s(3, 5)), 1);
    }

    #[test]
    fn parity_values() {
        assert_eq!(parity_pair(Slope::INFINITY), ParityPair::OE);
        assert_eq!(parity_pair(s(2, 5)), ParityPair::EO);
        assert_eq!(parity_pair(s(3, 11)), ParityPair::OO);
    }

    #[test]
    fn cont_frac_canonical_values() {
        let cf = cont_frac(s(3, 11), CfSign::Positive).unwrap();
        assert_eq!(cf, ContFrac { v1: 0, cs: vec![4, 3] });
        let cf = cont_frac(s(4, 5), CfSign::Negative).unwrap();
        assert_eq!(cf, ContFrac { v1: 1, cs: vec![-5] });
        let cf = cont_frac(s(3, 11), CfSign::Negative).unwrap();
        assert_eq!(cf, ContFrac { v1: 1, cs: vec![-2, -2, -3, -2] });
    }

    #[test]
    fn eval_cont_frac_values() {
        let e = |v1, cs: &[i64]| {
            eval_cont_frac(&ContFrac { v1, cs: cs.to_vec() }).unwrap()
        };
        assert_eq!(e(0, &[4, 3]), s(3, 11));
        assert_eq!(e(1, &[-5]), s(4, 5));
        assert_eq!(e(7, &[]), s(7, 1));
        assert_eq!(
            // The tail [1, 1] starting at position 1 evaluates to 1/0.
            eval_cont_frac(&ContFrac { v1: 0, cs: vec![-1, 1, 1] }),
            Err(RationalError::CfDivisionByZero(1))
        );
    }

    #[test]
    fn mod_neg_inverse_values() {
        assert_eq!(mod_neg_inverse(2, 5).unwrap(), 2);
        assert_eq!(mod_neg_inverse(2, 9).unwrap(), 4);
        assert_eq!(mod_neg_inverse(1, 7).unwrap(), -1);
        assert!(mod_neg_inverse(2, 4).is_err());
    }

    #[test]
    fn normalize_examples() {
        let k = normalize_montesinos(&[s(1, 3), s(1, 3), s(-1, 4)], 0).unwrap();
        assert_eq!(k.tangles, vec![s(1, 3), s(1, 3), s(3, 4)]);
        assert_eq!(k.n, -1);
        assert!(!k.mirrored);
        assert!(k.pretzel);

        let k = normalize_montesinos(&[s(1, 2), s(1, 3), s(1, 7)], -1).unwrap();
        assert_eq!(k.tangles, vec![s(1, 2), s(1, 3), s(1, 7)]);
        assert_eq!(k.n, -1);
        assert!(k.pretzel);

        let k = normalize_montesinos(&[s(1, 3), s(1, 3), s(8, 9)], -1).unwrap();
        assert!(k.pretzel);

        let k = normalize_montesinos(&[s(2, 5), s(1, 3), s(1, 7)], 0).unwrap();
        assert!(!k.pretzel);
    }

    #[test]
    fn slope_parse_display_roundtrip() {
        for txt in ["3/11", "1/0", "-1/4", "7/1"] {
            let r: Slope = txt.parse().unwrap();
            assert_eq!(r.to_string(), txt);
        }
        assert_eq!("-3".parse::<Slope>().unwrap(), s(-3, 1));
        assert!("a/b".parse::<Slope>().is_err());
    }

    #[test]
    fn slope_order() {
        assert!(Slope::INFINITY > s(100, 1));
        assert!(s(1, 3) < s(2, 5));
        assert!(s(-1, 2) < s(0, 1));
    }
}
