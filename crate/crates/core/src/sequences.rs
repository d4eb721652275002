//! Exact rational models of `c₀` functionals (elements of `ℓ₁`) whose
//! entries are a finite prefix followed by a periodic geometric tail.
//!
//! A tail `{first, ratio, pattern}` of period `m = pattern.len()` has
//! entry `k` (0-based) equal to `first · ratio^⌊k/m⌋ · pattern[k mod m]`.
//!
//! ```
//! use centerlab::sequences::{seq_norms, GeometricTailSeq};
//! use num_rational::BigRational;
//!
//! // (−1/2, 1/2, −1/4, 1/4, …)
//! let f = GeometricTailSeq::from_json(
//!     r#"{"prefix":[],"tail":{"first":"1/2","ratio":"1/2","pattern":["-1","1"]}}"#,
//! ).unwrap();
//! let n = seq_norms(&f);
//! assert_eq!(n.l1, BigRational::from_integer(2.into()));
//! assert!(!n.support_finite);
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::norm::{NormSpec, Subspace, Vector};
use crate::{Error, Result};

mod rational_str {
    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_rational(&s).map_err(de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|q| q.to_string()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| super::super::parse_rational(s).map_err(de::Error::custom))
                .collect()
        }
    }
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let q: BigRational = t.parse().map_err(|_| Error::InvalidArgument(format!("not a rational: {s:?}")))?;
    Ok(q)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricTail {
    #[serde(with = "rational_str")]
    pub first: BigRational,
    #[serde(with = "rational_str")]
    pub ratio: BigRational,
    #[serde(with = "rational_str::vec")]
    pub pattern: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeq")]
pub struct GeometricTailSeq {
    #[serde(with = "rational_str::vec")]
    pub prefix: Vec<BigRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<GeometricTail>,
}

#[derive(Deserialize)]
struct RawSeq {
    #[serde(with = "rational_str::vec")]
    prefix: Vec<BigRational>,
    #[serde(default)]
    tail: Option<GeometricTail>,
}

impl TryFrom<RawSeq> for GeometricTailSeq {
    type Error = Error;

    fn try_from(r: RawSeq) -> Result<Self> {
        GeometricTailSeq::new(r.prefix, r.tail)
    }
}

impl GeometricTailSeq {
    pub fn new(prefix: Vec<BigRational>, tail: Option<GeometricTail>) -> Result<Self> {
        if let Some(t) = &tail {
            if t.ratio.abs() >= BigRational::one() {
                return Err(Error::InvalidArgument("tail ratio must satisfy |ratio| < 1".into()));
            }
            if t.pattern.is_empty() {
                return Err(Error::InvalidArgument("tail pattern must be nonempty".into()));
            }
        }
        Ok(GeometricTailSeq { prefix, tail })
    }

    pub fn finite(prefix: Vec<BigRational>) -> Self {
        GeometricTailSeq { prefix, tail: None }
    }

    /// Prefix followed by `first · ratio^j · pattern`.
    pub fn with_tail(prefix: Vec<BigRational>, first: BigRational, ratio: BigRational, pattern: Vec<BigRational>) -> Result<Self> {
        Self::new(prefix, Some(GeometricTail { first, ratio, pattern }))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    /// The `n`-th coordinate, 1-based.
    pub fn coord(&self, n: usize) -> BigRational {
        assert!(n >= 1, "coordinates are 1-based");
        let k = n - 1;
        if k < self.prefix.len() {
            return self.prefix[k].clone();
        }
        match &self.tail {
            None => BigRational::zero(),
            Some(t) => {
                let k = k - self.prefix.len();
                let m = t.pattern.len();
                let j = i32::try_from(k / m).expect("index fits");
                &t.first * t.ratio.pow(j) * &t.pattern[k % m]
            }
        }
    }

    /// Value on a finitely supported vector, `Σ f(n) x(n)`.
    pub fn apply(&self, x: &[BigRational]) -> BigRational {
        x.iter().enumerate().map(|(k, xi)| self.coord(k + 1) * xi).sum()
    }

    fn tail_is_zero(&self) -> bool {
        self.tail.as_ref().is_none_or(|t| t.first.is_zero() || t.pattern.iter().all(Zero::is_zero))
    }

    pub fn is_zero(&self) -> bool {
        self.prefix.iter().all(Zero::is_zero) && self.tail_is_zero()
    }

    /// Index one past the last coordinate that can be nonzero, if finite.
    fn support_end(&self) -> Option<usize> {
        if self.tail_is_zero() {
            Some(self.prefix.iter().rposition(|q| !q.is_zero()).map_or(0, |i| i + 1))
        } else {
            None
        }
    }

    /// `Σ_{n > k} |f(n)|` in closed form.
    pub fn tail_mass(&self, k: usize) -> BigRational {
        let mut total: BigRational = self.prefix.iter().skip(k).map(|q| q.abs()).sum();
        if let Some(t) = &self.tail {
            if self.tail_is_zero() {
                return total;
            }
            let m = t.pattern.len();
            let skip = k.saturating_sub(self.prefix.len());
            // whole periods before the first period that is partly kept
            let (periods, offset) = (skip / m, skip % m);
            let scale = t.first.abs() * t.ratio.abs().pow(i32::try_from(periods).expect("fits"));
            let r = t.ratio.abs();
            let period_sum: BigRational = t.pattern.iter().map(|p| p.abs()).sum();
            let partial: BigRational = t.pattern[offset..].iter().map(|p| p.abs()).sum();
            // partial current period, then geometric remainder
            total += &scale * partial + &scale * &r * period_sum / (BigRational::one() - r);
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqNorms {
    #[serde(with = "rational_str")]
    pub l1: BigRational,
    #[serde(with = "rational_str")]
    pub linf: BigRational,
    pub support_finite: bool,
}

pub fn seq_norms(s: &GeometricTailSeq) -> SeqNorms {
    let l1 = s.tail_mass(0);
    let mut linf = s.prefix.iter().map(|q| q.abs()).max().unwrap_or_else(BigRational::zero);
    if let Some(t) = &s.tail {
        // |ratio| < 1, so the first period dominates the tail
        for p in &t.pattern {
            let v = (&t.first * p).abs();
            if v > linf {
                linf = v;
            }
        }
    }
    SeqNorms { l1, linf, support_finite: s.support_end().is_some() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub reason: String,
}

/// Hyperplane criterion for `ker f ⊂ c₀`: the kernel is in (GC) iff
/// `2‖f‖∞ ≥ ‖f‖₁` or `f` has finite support.
pub fn c0_hyperplane_gc(f: &GeometricTailSeq) -> Result<Verdict> {
    if f.is_zero() {
        return Err(Error::InvalidArgument("zero functional".into()));
    }
    let n = seq_norms(f);
    let two_linf = &n.linf * BigInt::from(2);
    let verdict = if n.support_finite {
        Verdict { holds: true, reason: "finite support".into() }
    } else if two_linf >= n.l1 {
        Verdict { holds: true, reason: format!("2‖f‖∞ = {two_linf} ≥ ‖f‖₁ = {}", n.l1) }
    } else {
        Verdict { holds: false, reason: format!("2‖f‖∞ = {two_linf} < ‖f‖₁ = {} and support is infinite", n.l1) }
    };
    Ok(verdict)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attainment {
    #[serde(with = "rational_str")]
    pub l1: BigRational,
    /// 1-based coordinates `n` with `2|f(n)| ≥ ‖f‖₁`.
    pub candidates: Vec<usize>,
    pub chosen: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstrainedReport {
    pub holds: bool,
    pub attainments: Vec<Attainment>,
    pub note: String,
}

pub const CRITERION_NOTE: &str =
    "sufficient condition only: each functional attains half its l1 norm at its own coordinate";

/// Sufficient condition for `⋂ ker f_i ⊂ c₀` to be constrained: every
/// `f_i` has a coordinate `n_i` with `2|f_i(n_i)| ≥ ‖f_i‖₁`, the `n_i`
/// pairwise distinct.
pub fn c0_constrained_criterion(functionals: &[GeometricTailSeq]) -> Result<ConstrainedReport> {
    if let Some(i) = functionals.iter().position(GeometricTailSeq::is_zero) {
        return Err(Error::InvalidArgument(format!("functional {i} is zero")));
    }
    let mut attainments: Vec<Attainment> = functionals
        .iter()
        .map(|f| {
            let l1 = seq_norms(f).l1;
            // entries shrink after the first tail period
            let horizon = f.prefix.len() + f.tail.as_ref().map_or(0, |t| t.pattern.len());
            let candidates = (1..=horizon).filter(|&n| f.coord(n).abs() * BigInt::from(2) >= l1).collect();
            Attainment { l1, candidates, chosen: None }
        })
        .collect();
    let options: Vec<Vec<usize>> = attainments.iter().map(|a| a.candidates.clone()).collect();
    let mut chosen = vec![0; options.len()];
    let holds = assign(&options, 0, &mut chosen);
    if holds {
        for (a, c) in attainments.iter_mut().zip(chosen) {
            a.chosen = Some(c);
        }
    }
    Ok(ConstrainedReport { holds, attainments, note: CRITERION_NOTE.to_string() })
}

fn assign(options: &[Vec<usize>], i: usize, chosen: &mut Vec<usize>) -> bool {
    if i == options.len() {
        return true;
    }
    for &c in &options[i] {
        if !chosen[..i].contains(&c) {
            chosen[i] = c;
            if assign(options, i + 1, chosen) {
                return true;
            }
        }
    }
    false
}

fn to_f64(q: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// The first `n` coordinates as floats and the exact dropped `ℓ₁` mass.
pub fn truncate_seq(s: &GeometricTailSeq, n: usize) -> Result<(Vector, BigRational)> {
    if n < s.prefix.len() {
        return Err(Error::InvalidArgument(format!("n = {n} is shorter than the prefix ({})", s.prefix.len())));
    }
    let v = Vector::new((1..=n).map(|k| to_f64(&s.coord(k))).collect())?;
    Ok((v, s.tail_mass(n)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelTruncation {
    pub space: NormSpec,
    pub subspace: Subspace,
    /// Dropped `ℓ₁` mass per functional.
    #[serde(with = "rational_str::vec")]
    pub tail_mass: Vec<BigRational>,
}

/// `⋂ ker f_i` restricted to the first `n` coordinates of `c₀`, as a
/// subspace of `ℓ∞ⁿ`.
pub fn truncate_kernel(functionals: &[GeometricTailSeq], n: usize) -> Result<KernelTruncation> {
    let mut rows = Vec::new();
    let mut tail_mass = Vec::new();
    for f in functionals {
        let (v, mass) = truncate_seq(f, n)?;
        rows.push(crate::norm::LinearFunctional(v.into_inner()));
        tail_mass.push(mass);
    }
    Ok(KernelTruncation { space: NormSpec::linf(n), subspace: Subspace::from_kernel(n, &rows)?, tail_mass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineUnionModel {
    pub space: NormSpec,
    /// `span{e₁}`.
    pub u: Subspace,
    /// `(k−1)e₁ + e_k` for `k = 2..=n`.
    pub v_points: Vec<Vector>,
}

impl LineUnionModel {
    /// `U + V` as the lines `e_k + span{e₁}`.
    pub fn feasible(&self) -> crate::centers::FeasibleSet {
        let n = self.space.dim();
        crate::centers::FeasibleSet::Union {
            pieces: (1..n)
                .map(|k| crate::centers::AffinePiece { offset: Vector::unit(n, k), directions: self.u.clone() })
                .collect(),
        }
    }

    /// `e_2, …, e_n`.
    pub fn unit_sequence(&self) -> impl Iterator<Item = Vector> + '_ {
        let n = self.space.dim();
        (1..n).map(move |k| Vector::unit(n, k))
    }
}

/// `ℓ₁ⁿ` with `U = span{e₁}` and the listed points of `V`.
pub fn line_union_model(n: usize) -> Result<LineUnionModel> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let v_points = (2..=n)
        .map(|k| {
            let mut c = vec![0.0; n];
            c[0] = (k - 1) as f64;
            c[k - 1] = 1.0;
            Vector::new(c).expect("finite")
        })
        .collect();
    Ok(LineUnionModel { space: NormSpec::l1(n), u: Subspace::coordinate(n, &[0])?, v_points })
}

/// `f = (−1/2, 1/2, −1/4, 1/4, …)`.
pub fn alternating_pair_functional() -> GeometricTailSeq {
    GeometricTailSeq::with_tail(vec![], rat(1, 2), rat(1, 2), vec![rat(-1, 1), rat(1, 1)]).expect("valid")
}

/// `f₁ = (0, 1/2, 0, 1/4, …)`.
pub fn even_functional() -> GeometricTailSeq {
    GeometricTailSeq::with_tail(vec![], rat(1, 2), rat(1, 2), vec![rat(0, 1), rat(1, 1)]).expect("valid")
}

/// `f₂ = (1/2, 0, 1/4, 0, …)`.
pub fn odd_functional() -> GeometricTailSeq {
    GeometricTailSeq::with_tail(vec![], rat(1, 2), rat(1, 2), vec![rat(1, 1), rat(0, 1)]).expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn alternating_functional_norms() {
        let f = alternating_pair_functional();
        assert_eq!(f.coord(1), rat(-1, 2));
        assert_eq!(f.coord(4), rat(1, 4));
        let n = seq_norms(&f);
        assert_eq!((n.l1, n.linf, n.support_finite), (int(2), rat(1, 2), false));
        assert!(!c0_hyperplane_gc(&f).unwrap().holds);
    }

    #[test]
    fn zero_and_finite_sequences() {
        let z = GeometricTailSeq::finite(vec![]);
        assert_eq!(seq_norms(&z), SeqNorms { l1: int(0), linf: int(0), support_finite: true });
        assert!(c0_hyperplane_gc(&z).is_err());
        let f = GeometricTailSeq::finite(vec![int(3), int(-1), int(5)]);
        assert!(c0_hyperplane_gc(&f).unwrap().holds);
    }

    #[test]
    fn halving_sequence_sits_on_the_boundary() {
        let f = GeometricTailSeq::with_tail(vec![], rat(1, 2), rat(1, 2), vec![int(1)]).unwrap();
        let n = seq_norms(&f);
        assert_eq!(n.l1, int(1));
        let v = c0_hyperplane_gc(&f).unwrap();
        assert!(v.holds, "{}", v.reason);
    }

    #[test]
    fn pair_of_functionals_is_constrained() {
        let r = c0_constrained_criterion(&[even_functional(), odd_functional()]).unwrap();
        assert!(r.holds);
        let chosen: Vec<_> = r.attainments.iter().map(|a| a.chosen.unwrap()).collect();
        assert_eq!(chosen, vec![2, 1]);
        assert_eq!(seq_norms(&even_functional()).l1, int(1));
        assert_eq!(even_functional().coord(2) * int(2), int(1));
    }

    #[test]
    fn criterion_fails_without_a_large_entry() {
        let r = c0_constrained_criterion(&[alternating_pair_functional()]).unwrap();
        assert!(!r.holds);
        let r = c0_constrained_criterion(&[even_functional(), even_functional()]).unwrap();
        assert!(!r.holds);
        let e1 = GeometricTailSeq::finite(vec![int(1)]);
        assert_eq!(c0_constrained_criterion(&[e1]).unwrap().attainments[0].chosen, Some(1));
    }

    #[test]
    fn tail_mass_matches_partial_sums() {
        let f = GeometricTailSeq::with_tail(vec![int(1), rat(-1, 3)], rat(2, 3), rat(-1, 3), vec![int(1), int(-2), int(0)]).unwrap();
        let total = seq_norms(&f).l1;
        for k in [0, 1, 2, 3, 7, 20] {
            let head: BigRational = (1..=k).map(|n| f.coord(n).abs()).sum();
            assert_eq!(head + f.tail_mass(k), total, "k = {k}");
        }
    }

    #[test]
    fn json_schema_round_trip() {
        let s = r#"{"prefix":["-1/2","1/2"],"tail":{"first":"1/4","ratio":"1/2","pattern":["-1","1"]}}"#;
        let f = GeometricTailSeq::from_json(s).unwrap();
        assert_eq!(seq_norms(&f), seq_norms(&alternating_pair_functional()));
        let back: GeometricTailSeq = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(GeometricTailSeq::from_json(r#"{"prefix":[],"tail":{"first":"1","ratio":"1","pattern":["1"]}}"#).is_err());
    }

    #[test]
    fn truncations() {
        let k = truncate_kernel(&[even_functional(), odd_functional()], 10).unwrap();
        assert_eq!(k.subspace.dim(), 8);
        assert_eq!(k.tail_mass[0], rat(1, 32));
        let (v, mass) = truncate_seq(&GeometricTailSeq::finite(vec![int(1), int(2)]), 2).unwrap();
        assert_eq!((v.dim(), mass), (2, int(0)));
        assert!(truncate_seq(&GeometricTailSeq::finite(vec![int(1), int(2)]), 1).is_err());
        let m = line_union_model(50).unwrap();
        assert_eq!(m.v_points.len(), 49);
    }
}
