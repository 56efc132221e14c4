use super::{ControlPointSet, RelevanceFunction, Segment};

/// Adjusts control-point derivatives so that every Hermite segment is
/// monotone in the direction of its secant (Fritsch–Carlson).
///
/// `derivs` has one entry per control point, `secants` one per interval.
/// Rules, in order:
/// * a point whose neighbouring secants change sign is a local extremum and
///   gets derivative 0;
/// * a flat secant zeroes both endpoint derivatives;
/// * a derivative whose sign disagrees with the secant is flipped;
/// * a pair `(α, β) = (b_k/δ_k, b_{k+1}/δ_k)` outside the monotone region is
///   pulled back onto the circle `α² + β² = 9`.
pub fn check_slopes(derivs: &[f64], secants: &[f64]) -> Vec<f64> {
    assert_eq!(derivs.len(), secants.len() + 1, "one derivative per control point");
    let mut b = derivs.to_vec();

    for k in 1..secants.len() {
        if secants[k - 1] * secants[k] < 0.0 {
            b[k] = 0.0;
        }
    }

    for (k, &delta) in secants.iter().enumerate() {
        if delta == 0.0 {
            b[k] = 0.0;
            b[k + 1] = 0.0;
            continue;
        }
        if b[k] / delta < 0.0 {
            b[k] = -b[k];
        }
        if b[k + 1] / delta < 0.0 {
            b[k + 1] = -b[k + 1];
        }
        rescale(&mut b, k, delta);
    }

    // a rescale shrinks the shared derivative of the previous segment, which
    // can push that one out of the region; rescaled pairs sit on the circle
    // and stay inside it, so each segment needs at most one more rescale
    for _ in 0..secants.len() {
        let mut changed = false;
        for (k, &delta) in secants.iter().enumerate() {
            if delta != 0.0 {
                changed |= rescale(&mut b, k, delta);
            }
        }
        if !changed {
            break;
        }
    }
    b
}

fn rescale(b: &mut [f64], k: usize, delta: f64) -> bool {
    let (alpha, beta) = (b[k] / delta, b[k + 1] / delta);
    let tau1 = 2.0 * alpha + beta - 3.0;
    let tau2 = alpha + 2.0 * beta - 3.0;
    // outside the monotone region iff α(τ1 + τ2) < τ1² (equivalently
    // α² + αβ + β² − 6α − 6β + 9 > 0) with both τ positive
    if tau1 > 0.0 && tau2 > 0.0 && alpha * (tau1 + tau2) < tau1 * tau1 {
        let tau = 3.0 * delta / alpha.hypot(beta);
        let (bk, bk1) = (alpha * tau, beta * tau);
        let moved = bk.abs() < b[k].abs() || bk1.abs() < b[k + 1].abs();
        b[k] = bk;
        b[k + 1] = bk1;
        moved
    } else {
        false
    }
}

/// Monotone piecewise cubic Hermite interpolant through `cps`.
pub fn pchip_fit(cps: &ControlPointSet) -> RelevanceFunction {
    let pts = cps.points();
    let h: Vec<f64> = pts.windows(2).map(|w| w[1].y - w[0].y).collect();
    let secants: Vec<f64> = pts
        .windows(2)
        .zip(&h)
        .map(|(w, hk)| (w[1].rel - w[0].rel) / hk)
        .collect();
    let derivs: Vec<f64> = pts.iter().map(|p| p.deriv).collect();
    let b = check_slopes(&derivs, &secants);

    let segments = (0..h.len())
        .map(|k| {
            let (hk, dk) = (h[k], secants[k]);
            Segment {
                y0: pts[k].y,
                y1: pts[k + 1].y,
                a: pts[k].rel,
                b: b[k],
                c: (3.0 * dk - 2.0 * b[k] - b[k + 1]) / hk,
                d: (b[k] - 2.0 * dk + b[k + 1]) / (hk * hk),
            }
        })
        .collect();
    RelevanceFunction::from_parts(cps.clone(), segments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relevance::ControlPoint;
    use proptest::prelude::*;

    /// Dense-sampling monotonicity check of the Hermite cubic with unit
    /// interval, end values 0 and `delta`, end slopes `m0`, `m1`.
    fn hermite_is_monotone(delta: f64, m0: f64, m1: f64) -> bool {
        let p = |t: f64| {
            let t2 = t * t;
            let t3 = t2 * t;
            (-2.0 * t3 + 3.0 * t2) * delta + (t3 - 2.0 * t2 + t) * m0 + (t3 - t2) * m1
        };
        let mut prev = p(0.0);
        (1..=10_000).all(|i| {
            let v = p(i as f64 / 10_000.0);
            let ok = if delta >= 0.0 {
                v >= prev - 1e-12
            } else {
                v <= prev + 1e-12
            };
            prev = v;
            ok
        })
    }

    #[test]
    fn flat_secant_zeroes_both_ends() {
        assert_eq!(check_slopes(&[0.7, -2.0], &[0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn inside_region_is_unchanged() {
        assert!(hermite_is_monotone(1.0, 1.0, 1.0));
        assert_eq!(check_slopes(&[1.0, 1.0], &[1.0]), vec![1.0, 1.0]);
    }

    #[test]
    fn outside_region_is_rescaled_onto_circle() {
        assert!(!hermite_is_monotone(1.0, 4.0, 4.0));
        let b = check_slopes(&[4.0, 4.0], &[1.0]);
        assert!((b[0].hypot(b[1]) - 3.0).abs() < 1e-12);
        assert!((b[0] - b[1]).abs() < 1e-15);
        assert!(hermite_is_monotone(1.0, b[0], b[1]));
    }

    #[test]
    fn asymmetric_violation_is_caught() {
        // (α, β) = (5, 1) overshoots even though α(τ1+τ2) ≥ τ1·τ2
        assert!(!hermite_is_monotone(1.0, 5.0, 1.0));
        let b = check_slopes(&[5.0, 1.0], &[1.0]);
        assert!(hermite_is_monotone(1.0, b[0], b[1]));
    }

    #[test]
    fn sign_mismatch_is_flipped() {
        assert_eq!(check_slopes(&[-0.5, 0.5], &[1.0]), vec![0.5, 0.5]);
        assert_eq!(check_slopes(&[0.5, -0.25], &[-1.0]), vec![-0.5, -0.25]);
    }

    #[test]
    fn extremum_gets_zero_slope() {
        // 0 → 1 → 0 with a non-zero slope at the peak
        assert_eq!(check_slopes(&[0.0, 0.8, 0.0], &[1.0, -1.0]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_point_ramp_is_monotone() {
        let f = pchip_fit(
            &ControlPointSet::new(vec![ControlPoint::new(0.0, 0.0, 0.0), ControlPoint::new(1.0, 1.0, 0.0)]).unwrap(),
        );
        let mut prev = f.eval(0.0);
        for i in 1..=1000 {
            let v = f.eval(i as f64 / 1000.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn neighbour_rescale_does_not_break_earlier_segment() {
        let secants = [-0.6623017193415371, -0.06443923706208756];
        let b = check_slopes(
            &[-2.5044298105111396, 1.1100414551551285, -0.6407381534544632],
            &secants,
        );
        for k in 0..2 {
            let (a, c) = (b[k] / secants[k], b[k + 1] / secants[k]);
            assert!(hermite_is_monotone(1.0, a, c), "segment {k}: ({a}, {c})");
        }
    }

    proptest! {
        #[test]
        fn rescaled_slopes_are_monotone(delta in -5.0f64..5.0, a in -10.0f64..10.0, c in -10.0f64..10.0) {
            prop_assume!(delta.abs() > 1e-3);
            let b = check_slopes(&[a, c], &[delta]);
            prop_assert!(hermite_is_monotone(delta, b[0], b[1]));
        }

        #[test]
        fn chained_segments_are_monotone(
            secants in proptest::collection::vec(-3.0f64..3.0, 1..6),
            raw in proptest::collection::vec(-10.0f64..10.0, 7),
        ) {
            prop_assume!(secants.iter().all(|d| d.abs() > 1e-3));
            let b = check_slopes(&raw[..secants.len() + 1], &secants);
            for (k, &d) in secants.iter().enumerate() {
                prop_assert!(hermite_is_monotone(1.0, b[k] / d, b[k + 1] / d));
            }
        }
    }
}
