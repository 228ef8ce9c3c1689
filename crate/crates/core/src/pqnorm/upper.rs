//! Certified upper bounds for `‖A‖_{p,q}` from closed-form endpoint norms,
//! Riesz–Thorin interpolation between them, and ball inclusions.
//!
//! Everything is phrased in reciprocal coordinates `(1/p, 1/q) ∈ [0, 1]²`.
//! Closed forms are available on the edge `1/p = 1`, on the edge `1/q = 0`,
//! and at the point `(1/2, 1/2)`. Interpolation moves along segments between
//! such points; a ball inclusion then moves from an anchor to the target at the
//! cost of a dimension factor when the move enlarges a ball.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponent::{ratio_to_f64, Exponent};
use crate::matrix::DenseMatrix;

use super::exact::ExactRule;

/// Number of subdivisions of the one-parameter family of boundary segments.
const SEGMENT_GRID: i64 = 16;

fn ser_ratio<S: Serializer>(r: &Rational64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// One step of an upper-bound derivation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DerivationStep {
    EndpointExact { p: Exponent, q: Exponent, rule: ExactRule, value: f64 },
    /// Interpolation between the two preceding endpoint steps at parameter `theta`.
    Interpolation {
        p: Exponent,
        q: Exponent,
        #[serde(serialize_with = "ser_ratio")]
        theta: Rational64,
        bound: f64,
    },
    /// `‖A‖_{p,q} <= factor · ‖A‖_{from_p, from_q}`.
    BallInclusion { from_p: Exponent, from_q: Exponent, p: Exponent, q: Exponent, factor: f64, bound: f64 },
}

/// An upper bound with the derivation that certifies it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperBound {
    pub value: f64,
    pub derivation: Vec<DerivationStep>,
}

/// Result of interpolating two endpoint bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interpolated {
    pub p: Exponent,
    pub q: Exponent,
    pub bound: f64,
}

/// Riesz–Thorin: from `‖A‖_{p0,q0} <= m0` and `‖A‖_{p1,q1} <= m1`, the pair
/// `1/pθ = (1-θ)/p0 + θ/p1`, `1/qθ = (1-θ)/q0 + θ/q1` has
/// `‖A‖_{pθ,qθ} <= m0^{1-θ} m1^θ`.
pub fn pq_norm_upper_interpolate(
    m0: f64,
    (p0, q0): (Exponent, Exponent),
    m1: f64,
    (p1, q1): (Exponent, Exponent),
    theta: Rational64,
) -> Result<Interpolated> {
    if theta < Rational64::zero() || theta > Rational64::one() {
        return Err(Error::InvalidArgument(format!("interpolation parameter {theta} outside [0, 1]")));
    }
    if m0 < 0.0 || m1 < 0.0 {
        return Err(Error::InvalidArgument("endpoint bounds must be nonnegative".into()));
    }
    let one = Rational64::one();
    let p = Exponent::from_recip((one - theta) * p0.recip() + theta * p1.recip())?;
    let q = Exponent::from_recip((one - theta) * q0.recip() + theta * q1.recip())?;
    let bound = if theta.is_zero() {
        m0
    } else if theta == one {
        m1
    } else {
        let t = ratio_to_f64(theta);
        m0.powf(1.0 - t) * m1.powf(t)
    };
    Ok(Interpolated { p, q, bound })
}

#[derive(Clone, Copy, PartialEq, Eq)]
struct Point {
    a: Rational64,
    b: Rational64,
}

impl Point {
    fn new(a: Rational64, b: Rational64) -> Self {
        Point { a, b }
    }

    fn from_pair(p: Exponent, q: Exponent) -> Self {
        Point { a: p.recip(), b: q.recip() }
    }

    fn in_square(&self) -> bool {
        let (z, o) = (Rational64::zero(), Rational64::one());
        self.a >= z && self.a <= o && self.b >= z && self.b <= o
    }

    fn exponents(&self) -> (Exponent, Exponent) {
        (
            Exponent::from_recip(self.a).expect("point lies in the unit square"),
            Exponent::from_recip(self.b).expect("point lies in the unit square"),
        )
    }

    fn exact_rule(&self) -> Option<ExactRule> {
        let (p, q) = self.exponents();
        ExactRule::for_pair(p, q)
    }
}

struct Engine<'a> {
    a: &'a DenseMatrix,
}

impl Engine<'_> {
    fn endpoint(&self, pt: Point) -> Option<DerivationStep> {
        let rule = pt.exact_rule()?;
        let (p, q) = pt.exponents();
        Some(DerivationStep::EndpointExact { p, q, rule, value: rule.evaluate(self.a, p, q) })
    }

    fn endpoint_value(step: &DerivationStep) -> f64 {
        match step {
            DerivationStep::EndpointExact { value, .. } => *value,
            _ => unreachable!("endpoint steps only"),
        }
    }

    /// Interpolate between closed-form points `e0` and `e1` to reach
    /// `(1-θ)·e0 + θ·e1`.
    fn interpolate(&self, e0: Point, e1: Point, theta: Rational64) -> Option<UpperBound> {
        let s0 = self.endpoint(e0)?;
        let s1 = self.endpoint(e1)?;
        let (m0, m1) = (Self::endpoint_value(&s0), Self::endpoint_value(&s1));
        let it = pq_norm_upper_interpolate(m0, e0.exponents(), m1, e1.exponents(), theta).ok()?;
        Some(UpperBound {
            value: it.bound,
            derivation: vec![
                s0,
                s1,
                DerivationStep::Interpolation { p: it.p, q: it.q, theta, bound: it.bound },
            ],
        })
    }

    /// Best bound at `pt` using only closed forms and one interpolation.
    fn at_point(&self, pt: Point) -> Option<UpperBound> {
        let mut best: Option<UpperBound> = None;
        let mut offer = |c: Option<UpperBound>| {
            if let Some(c) = c {
                if best.as_ref().is_none_or(|b| c.value < b.value) {
                    best = Some(c);
                }
            }
        };

        if let Some(step) = self.endpoint(pt) {
            let value = Self::endpoint_value(&step);
            offer(Some(UpperBound { value, derivation: vec![step] }));
        }

        let (zero, one) = (Rational64::zero(), Rational64::one());
        let half = Rational64::new(1, 2);
        let center = Point::new(half, half);

        // Ray from the center through `pt`, continued to the closed-form edges.
        if pt != center {
            let (da, db) = (pt.a - half, pt.b - half);
            let mut exits = Vec::new();
            if da > zero {
                exits.push((one - half) / da);
            }
            if db < zero {
                exits.push((zero - half) / db);
            }
            for t in exits {
                if t < one {
                    continue;
                }
                let end = Point::new(half + t * da, half + t * db);
                if end.in_square() {
                    offer(self.interpolate(center, end, t.recip()));
                }
            }
        }

        // Segments from the edge 1/p = 1 to the edge 1/q = 0 passing through `pt`.
        if pt.a > zero && pt.a < one && pt.b > zero && pt.b <= pt.a {
            let lo = pt.b / pt.a;
            for k in 0..=SEGMENT_GRID {
                let b0 = lo + (one - lo) * Rational64::new(k, SEGMENT_GRID);
                let theta = one - pt.b / b0;
                if theta <= zero {
                    continue;
                }
                let a1 = (pt.a - one + theta) / theta;
                let (e0, e1) = (Point::new(one, b0), Point::new(a1, zero));
                if e1.in_square() {
                    offer(self.interpolate(e0, e1, theta));
                }
            }
        }
        best
    }
}

/// Certified upper bound on `‖A‖_{p,q}`, with its derivation.
///
/// Candidate anchors near the target are bounded by closed forms and
/// interpolation, then moved to the target by ball inclusion:
/// `‖A‖_{p,q} <= n^{max(0, 1/p0 - 1/p)} · m^{max(0, 1/q - 1/q0)} · ‖A‖_{p0,q0}`.
pub fn pq_norm_upper(a: &DenseMatrix, p: Exponent, q: Exponent) -> UpperBound {
    let engine = Engine { a };
    let target = Point::from_pair(p, q);
    let (zero, one) = (Rational64::zero(), Rational64::one());
    let half = Rational64::new(1, 2);
    let (ta, tb) = (target.a, target.b);

    let mut anchors = vec![
        target,
        Point::new(ta, one - ta),
        Point::new(ta, ta),
        Point::new(one - tb, tb),
        Point::new(tb, tb),
        Point::new(ta, half),
        Point::new(half, tb),
        Point::new(ta, zero),
        Point::new(one, tb),
        Point::new(half, half),
        Point::new(one, zero),
        Point::new(one, one),
        Point::new(zero, zero),
    ];
    let mut seen = Vec::new();
    anchors.retain(|pt| {
        if seen.contains(pt) {
            false
        } else {
            seen.push(*pt);
            true
        }
    });

    let (n, m) = (a.cols() as f64, a.rows() as f64);
    let mut best: Option<UpperBound> = None;
    for anchor in anchors {
        let Some(mut ub) = engine.at_point(anchor) else { continue };
        if anchor != target {
            let dom = (anchor.a - ta).max(zero);
            let cod = (tb - anchor.b).max(zero);
            let factor = pow_rational(n, dom) * pow_rational(m, cod);
            let (from_p, from_q) = anchor.exponents();
            ub.value *= factor;
            ub.derivation.push(DerivationStep::BallInclusion { from_p, from_q, p, q, factor, bound: ub.value });
        }
        if best.as_ref().is_none_or(|b| ub.value < b.value) {
            best = Some(ub);
        }
    }
    best.expect("the corner (1, ∞) always yields a bound")
}

fn pow_rational(base: f64, e: Rational64) -> f64 {
    if e.is_zero() {
        1.0
    } else {
        base.powf(ratio_to_f64(e))
    }
}
