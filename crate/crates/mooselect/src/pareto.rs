//! Dominance testing, Pareto-frontier extraction over (f1, f2) points, and
//! the post-optimization selection heuristics that operate on the frontier.
//!
//! Both objectives are minimized. Comparisons are exact (tolerance zero):
//! near-ties stay separate points so no candidate is silently hidden, and
//! exact duplicates are both retained and flagged.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::{real, Scalar};
use crate::objectives::ObjectivePoint;

/// True when `a` dominates `b`: no worse in both coordinates and strictly
/// better in at least one. Coordinates must be finite (validated wherever
/// points enter the module).
pub fn dominates<F: Scalar>(a: &ObjectivePoint<F>, b: &ObjectivePoint<F>) -> bool {
    a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2)
}

/// One step along the frontier toward higher complexity.
#[derive(Debug, Clone, Serialize)]
pub struct MarginalStep<F> {
    pub from: String,
    pub to: String,
    /// Fit improvement `f1[k] - f1[k+1]` gained by accepting the step.
    pub delta_f1: F,
    pub delta_f2: F,
}

/// Elbow of the frontier: the interior point furthest below the chord
/// joining the endpoints in the (f2, f1) plane.
#[derive(Debug, Clone, Serialize)]
pub struct Elbow<F> {
    pub model_id: String,
    /// Vertical gap below the endpoint chord.
    pub gap: F,
    /// Set when the frontier is (numerically) a straight line, in which case
    /// the elbow is not meaningful.
    pub zero_curvature: bool,
}

/// Frontier extraction result.
#[derive(Debug, Clone)]
pub struct FrontierReport<F> {
    pub all_points: Vec<ObjectivePoint<F>>,
    /// Non-dominated points sorted by f2 ascending (then f1, then id).
    pub frontier: Vec<ObjectivePoint<F>>,
    pub dominated_count: usize,
    /// Consecutive frontier steps (empty for a singleton frontier).
    pub marginal_returns: Vec<MarginalStep<F>>,
    /// Present only when the frontier has at least three points.
    pub elbow: Option<Elbow<F>>,
    /// Ids that share identical (f1, f2) with another retained point.
    pub duplicate_ids: Vec<String>,
}

impl<F: Scalar> FrontierReport<F> {
    pub fn frontier_ids(&self) -> Vec<String> {
        self.frontier.iter().map(|p| p.model_id.clone()).collect()
    }

    pub fn dominated_ids(&self) -> Vec<String> {
        let frontier: std::collections::BTreeSet<&str> =
            self.frontier.iter().map(|p| p.model_id.as_str()).collect();
        self.all_points
            .iter()
            .filter(|p| !frontier.contains(p.model_id.as_str()))
            .map(|p| p.model_id.clone())
            .collect()
    }

    /// JSON export with fields `points`, `frontier_ids`, `dominated_ids`,
    /// `marginal_returns`, `elbow_id`.
    pub fn to_json(&self) -> String
    where
        F: Serialize,
    {
        #[derive(Serialize)]
        struct Export<'a, F> {
            points: &'a [ObjectivePoint<F>],
            frontier_ids: Vec<String>,
            dominated_ids: Vec<String>,
            marginal_returns: &'a [MarginalStep<F>],
            elbow_id: Option<&'a str>,
        }
        let export = Export {
            points: &self.all_points,
            frontier_ids: self.frontier_ids(),
            dominated_ids: self.dominated_ids(),
            marginal_returns: &self.marginal_returns,
            elbow_id: self.elbow.as_ref().map(|e| e.model_id.as_str()),
        };
        serde_json::to_string_pretty(&export).expect("frontier report serializes")
    }
}

fn validate_points<F: Scalar>(points: &[ObjectivePoint<F>]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyInput("no objective points".into()));
    }
    for p in points {
        if !p.f1.is_finite() || !p.f2.is_finite() {
            return Err(Error::NonFinitePoint(p.model_id.clone()));
        }
    }
    Ok(())
}

/// Extract the Pareto frontier (all points not dominated by any other) and
/// derive the post-optimization diagnostics.
///
/// Points with identical (f1, f2) do not dominate each other; all copies are
/// retained on the frontier and listed in `duplicate_ids`.
pub fn pareto_frontier<F: Scalar>(points: &[ObjectivePoint<F>]) -> Result<FrontierReport<F>> {
    validate_points(points)?;

    // Plane sweep over f2 groups in ascending order: a point is dominated
    // iff some point at strictly smaller f2 has f1 <= its own, or some point
    // in its f2 group has strictly smaller f1.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i]
            .f2
            .partial_cmp(&points[j].f2)
            .unwrap()
            .then(points[i].f1.partial_cmp(&points[j].f1).unwrap())
            .then(points[i].model_id.cmp(&points[j].model_id))
    });

    let mut non_dominated = vec![false; points.len()];
    let mut best_prev: Option<F> = None; // min f1 over strictly smaller f2
    let mut idx = 0;
    while idx < order.len() {
        // Delimit the group of equal f2.
        let mut end = idx + 1;
        while end < order.len() && points[order[end]].f2 == points[order[idx]].f2 {
            end += 1;
        }
        let group_min_f1 = points[order[idx]].f1; // group sorted by f1
        for &i in &order[idx..end] {
            let q = &points[i];
            let dominated_from_left = best_prev.is_some_and(|b| b <= q.f1);
            let dominated_in_group = group_min_f1 < q.f1;
            non_dominated[i] = !(dominated_from_left || dominated_in_group);
        }
        best_prev = Some(match best_prev {
            Some(b) if b < group_min_f1 => b,
            _ => group_min_f1,
        });
        idx = end;
    }

    let mut frontier: Vec<ObjectivePoint<F>> = order
        .iter()
        .filter(|&&i| non_dominated[i])
        .map(|&i| points[i].clone())
        .collect();
    frontier.sort_by(|a, b| {
        a.f2.partial_cmp(&b.f2)
            .unwrap()
            .then(a.f1.partial_cmp(&b.f1).unwrap())
            .then(a.model_id.cmp(&b.model_id))
    });

    // Flag exact duplicates among retained points.
    let mut duplicate_ids = Vec::new();
    for (i, a) in frontier.iter().enumerate() {
        let dup = frontier
            .iter()
            .enumerate()
            .any(|(j, b)| i != j && a.f1 == b.f1 && a.f2 == b.f2);
        if dup {
            duplicate_ids.push(a.model_id.clone());
        }
    }

    let marginal_returns = if frontier.len() >= 2 {
        marginal_steps(&frontier)
    } else {
        Vec::new()
    };
    let elbow = if frontier.len() >= 3 {
        Some(elbow_of_sorted(&frontier))
    } else {
        None
    };

    Ok(FrontierReport {
        dominated_count: points.len() - frontier.len(),
        all_points: points.to_vec(),
        frontier,
        marginal_returns,
        elbow,
        duplicate_ids,
    })
}

fn marginal_steps<F: Scalar>(frontier: &[ObjectivePoint<F>]) -> Vec<MarginalStep<F>> {
    frontier
        .windows(2)
        .map(|w| MarginalStep {
            from: w[0].model_id.clone(),
            to: w[1].model_id.clone(),
            delta_f1: w[0].f1 - w[1].f1,
            delta_f2: w[1].f2 - w[0].f2,
        })
        .collect()
}

/// Fit improvement per step along a frontier already sorted by f2 ascending.
pub fn marginal_returns<F: Scalar>(frontier: &[ObjectivePoint<F>]) -> Result<Vec<F>> {
    if frontier.len() < 2 {
        return Err(Error::FrontierTooSmall {
            needed: 2,
            found: frontier.len(),
        });
    }
    validate_points(frontier)?;
    Ok(frontier.windows(2).map(|w| w[0].f1 - w[1].f1).collect())
}

/// Elbow of a frontier sorted by f2 ascending: the interior point with the
/// largest vertical gap below the chord between the endpoints; ties resolve
/// toward smaller f2.
pub fn elbow<F: Scalar>(frontier: &[ObjectivePoint<F>]) -> Result<Elbow<F>> {
    if frontier.len() < 3 {
        return Err(Error::FrontierTooSmall {
            needed: 3,
            found: frontier.len(),
        });
    }
    validate_points(frontier)?;
    Ok(elbow_of_sorted(frontier))
}

fn elbow_of_sorted<F: Scalar>(frontier: &[ObjectivePoint<F>]) -> Elbow<F> {
    let first = &frontier[0];
    let last = &frontier[frontier.len() - 1];
    let span = last.f2 - first.f2;
    let slope = if span > F::zero() {
        (last.f1 - first.f1) / span
    } else {
        F::zero()
    };
    let mut best_idx = 1;
    let mut best_gap = F::neg_infinity();
    for (i, p) in frontier.iter().enumerate().skip(1).take(frontier.len() - 2) {
        let chord = first.f1 + slope * (p.f2 - first.f2);
        let gap = chord - p.f1;
        if gap > best_gap {
            best_gap = gap;
            best_idx = i;
        }
    }
    let scale = first.f1.abs() + last.f1.abs() + F::one();
    Elbow {
        model_id: frontier[best_idx].model_id.clone(),
        gap: best_gap,
        zero_curvature: best_gap <= real::<F>(1e-12) * scale,
    }
}

/// Among frontier points with `p <= p_max`, the one with the smallest f1.
pub fn constrained_select<F: Scalar>(
    frontier: &[ObjectivePoint<F>],
    p_max: usize,
) -> Result<&ObjectivePoint<F>> {
    validate_points(frontier)?;
    frontier
        .iter()
        .filter(|p| p.p <= p_max)
        .min_by(|a, b| {
            a.f1.partial_cmp(&b.f1)
                .unwrap()
                .then(a.p.cmp(&b.p))
                .then(a.model_id.cmp(&b.model_id))
        })
        .ok_or(Error::ConstraintExcludesAll(p_max))
}

/// Largest parameter count satisfying the strict budget `p < n / divisor`.
pub fn strict_parameter_budget(n: usize, divisor: usize) -> usize {
    // ceil(n/divisor) - 1 == the largest integer strictly below n/divisor.
    n.div_ceil(divisor).saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(id: &str, f1: f64, f2: f64) -> ObjectivePoint<f64> {
        ObjectivePoint::new(id, f1, f2, f2 as usize).unwrap()
    }

    /// Independent all-pairs dominance oracle.
    fn brute_force_frontier(points: &[ObjectivePoint<f64>]) -> Vec<String> {
        let mut ids: Vec<String> = points
            .iter()
            .enumerate()
            .filter(|(i, a)| {
                !points
                    .iter()
                    .enumerate()
                    .any(|(j, b)| *i != j && dominates(b, a))
            })
            .map(|(_, a)| a.model_id.clone())
            .collect();
        ids.sort();
        ids
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&pt("a", 250.0, 3.0), &pt("b", 260.0, 4.0)));
        assert!(!dominates(&pt("a", 250.0, 3.0), &pt("b", 250.0, 3.0)));
        // Mutually non-dominating trade-off pair.
        let a = pt("a", 249.6, 6.0);
        let b = pt("b", 249.4, 7.0);
        assert!(!dominates(&a, &b));
        assert!(!dominates(&b, &a));
        // Equal in one coordinate, better in the other.
        assert!(dominates(&pt("a", 250.0, 3.0), &pt("b", 250.0, 4.0)));
    }

    #[test]
    fn single_point_is_its_own_frontier() {
        let report = pareto_frontier(&[pt("only", 1.0, 1.0)]).unwrap();
        assert_eq!(report.frontier.len(), 1);
        assert_eq!(report.dominated_count, 0);
        assert!(report.elbow.is_none());
        assert!(report.marginal_returns.is_empty());
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(pareto_frontier::<f64>(&[]).is_err());
    }

    #[test]
    fn non_finite_points_are_rejected() {
        let bad = ObjectivePoint {
            model_id: "nan".into(),
            f1: f64::NAN,
            f2: 1.0,
            p: 1,
        };
        assert!(pareto_frontier(&[bad]).is_err());
    }

    #[test]
    fn duplicates_are_both_retained_and_flagged() {
        let points = vec![pt("a", 1.0, 2.0), pt("b", 1.0, 2.0), pt("c", 5.0, 1.0)];
        let report = pareto_frontier(&points).unwrap();
        assert_eq!(report.frontier.len(), 3);
        let mut dups = report.duplicate_ids.clone();
        dups.sort();
        assert_eq!(dups, vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn frontier_f1_strictly_decreases_over_distinct_f2() {
        let points = vec![
            pt("p1", 369.6, 1.0),
            pt("p2", 283.6, 2.0),
            pt("p2b", 332.6, 2.0),
            pt("p3", 260.3, 3.0),
            pt("p7", 249.4, 7.0),
        ];
        let report = pareto_frontier(&points).unwrap();
        for w in report.frontier.windows(2) {
            assert!(w[1].f2 > w[0].f2);
            assert!(w[1].f1 < w[0].f1);
        }
    }

    #[test]
    fn elbow_finds_sharp_corner_of_staircase() {
        // Convex staircase with one sharp corner at (2, 10).
        let frontier = vec![
            pt("a", 100.0, 1.0),
            pt("corner", 10.0, 2.0),
            pt("c", 9.0, 3.0),
            pt("d", 8.5, 4.0),
        ];
        let e = elbow(&frontier).unwrap();
        assert_eq!(e.model_id, "corner");
        assert!(!e.zero_curvature);
    }

    #[test]
    fn collinear_frontier_reports_zero_curvature() {
        let frontier = vec![pt("a", 30.0, 1.0), pt("b", 20.0, 2.0), pt("c", 10.0, 3.0)];
        let e = elbow(&frontier).unwrap();
        assert_eq!(e.model_id, "b");
        assert!(e.gap.abs() < 1e-9);
        assert!(e.zero_curvature);
    }

    #[test]
    fn elbow_needs_three_points() {
        let err = elbow(&[pt("a", 1.0, 1.0), pt("b", 0.5, 2.0)]).unwrap_err();
        assert!(matches!(err, Error::FrontierTooSmall { needed: 3, .. }));
    }

    #[test]
    fn marginal_returns_needs_two_points() {
        let err = marginal_returns(&[pt("a", 1.0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::FrontierTooSmall { needed: 2, .. }));
    }

    #[test]
    fn constrained_select_examples() {
        let frontier = vec![
            pt("p1", 369.6, 1.0),
            pt("p2", 283.6, 2.0),
            pt("p3", 260.3, 3.0),
            pt("p4", 253.7, 4.0),
        ];
        // Budget covers everything: global minimum-f1 point wins.
        let best = constrained_select(&frontier, 10).unwrap();
        assert_eq!(best.model_id, "p4");
        // Tight budget.
        let best = constrained_select(&frontier, 2).unwrap();
        assert_eq!(best.model_id, "p2");
        // Budget of zero excludes every model (intercept alone has p = 1).
        assert!(matches!(
            constrained_select(&frontier, 0),
            Err(Error::ConstraintExcludesAll(0))
        ));
    }

    #[test]
    fn strict_budget_examples() {
        // p < 49/15 allows at most 3 parameters.
        assert_eq!(strict_parameter_budget(49, 15), 3);
        // Exact multiples stay strict: p < 45/15 = 3 allows 2.
        assert_eq!(strict_parameter_budget(45, 15), 2);
        assert_eq!(strict_parameter_budget(14, 15), 0);
    }

    #[test]
    fn json_export_has_declared_fields() {
        let report = pareto_frontier(&[
            pt("a", 10.0, 1.0),
            pt("b", 5.0, 2.0),
            pt("c", 4.0, 3.0),
            pt("d", 12.0, 3.0),
        ])
        .unwrap();
        let json = report.to_json();
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert!(value["points"].is_array());
        assert_eq!(value["points"].as_array().unwrap().len(), 4);
        assert!(value["frontier_ids"].is_array());
        assert_eq!(value["dominated_ids"].as_array().unwrap().len(), 1);
        assert!(value["marginal_returns"].is_array());
        assert!(value["elbow_id"].is_string());
    }

    fn arb_points(max_len: usize) -> impl Strategy<Value = Vec<ObjectivePoint<f64>>> {
        proptest::collection::vec((0.0f64..100.0, 0.0f64..100.0), 1..max_len).prop_map(|coords| {
            coords
                .into_iter()
                .enumerate()
                .map(|(i, (f1, f2))| {
                    ObjectivePoint::new(format!("m{i}"), f1, f2, f2 as usize).unwrap()
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn frontier_matches_brute_force_oracle(points in arb_points(60)) {
            let report = pareto_frontier(&points).unwrap();
            let mut got = report.frontier_ids();
            got.sort();
            prop_assert_eq!(got, brute_force_frontier(&points));
        }

        #[test]
        fn duplicated_coordinates_still_match_oracle(
            base in arb_points(20),
            dup_idx in 0usize..20,
        ) {
            let mut points = base.clone();
            let src = &base[dup_idx % base.len()];
            points.push(ObjectivePoint::new("copy", src.f1, src.f2, src.p).unwrap());
            let report = pareto_frontier(&points).unwrap();
            let mut got = report.frontier_ids();
            got.sort();
            prop_assert_eq!(got, brute_force_frontier(&points));
        }

        #[test]
        fn weighted_sum_minimizer_is_on_frontier(
            points in arb_points(60),
            w1 in 1e-3f64..1e3,
            w2 in 1e-3f64..1e3,
        ) {
            let report = pareto_frontier(&points).unwrap();
            let winner = points
                .iter()
                .min_by(|a, b| {
                    (w1 * a.f1 + w2 * a.f2)
                        .partial_cmp(&(w1 * b.f1 + w2 * b.f2))
                        .unwrap()
                })
                .unwrap();
            // Positive weights make the argmin Pareto optimal.
            prop_assert!(
                report.frontier_ids().contains(&winner.model_id),
                "weighted-sum winner {} not on the frontier",
                winner.model_id
            );
        }

        #[test]
        fn frontier_set_is_scale_invariant(
            points in arb_points(40),
            c1 in 1e-3f64..1e3,
            c2 in 1e-3f64..1e3,
        ) {
            let report = pareto_frontier(&points).unwrap();
            let scaled: Vec<ObjectivePoint<f64>> = points
                .iter()
                .map(|p| ObjectivePoint::new(p.model_id.clone(), p.f1 * c1, p.f2 * c2, p.p).unwrap())
                .collect();
            let scaled_report = pareto_frontier(&scaled).unwrap();
            let mut a = report.frontier_ids();
            let mut b = scaled_report.frontier_ids();
            a.sort();
            b.sort();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn marginal_returns_are_positive_on_clean_frontiers(points in arb_points(40)) {
            let report = pareto_frontier(&points).unwrap();
            prop_assume!(report.frontier.len() >= 2);
            prop_assume!(report.duplicate_ids.is_empty());
            let steps = marginal_returns(&report.frontier).unwrap();
            for step in steps {
                prop_assert!(step > 0.0, "non-positive marginal return {step}");
            }
        }

        #[test]
        fn every_dominated_point_is_dominated_by_a_frontier_member(points in arb_points(40)) {
            let report = pareto_frontier(&points).unwrap();
            let frontier_ids = report.frontier_ids();
            for p in &points {
                if !frontier_ids.contains(&p.model_id) {
                    prop_assert!(
                        report.frontier.iter().any(|f| dominates(f, p)),
                        "dominated point {} not covered by the frontier",
                        p.model_id
                    );
                }
            }
        }
    }
}
