//! Independent checks on a computed store: the loop equations at every
//! branch point, the dilaton, string and homogeneity identities, and the
//! decoupling of uncharged exceptional components.

mod decouple;
mod loops;
mod relations;

pub use decouple::{check_decoupling, decoupled_curve, DecouplingReport};
pub use loops::{
    abstract_bound, check_abstract_loop, check_master_loop, fiber_sums, loop_gap, loop_spectator_sets, loop_suite,
    master_bound, ComponentBound, LoopEquationReport,
};
pub use relations::{check_dilaton, check_homogeneity, check_string, RelationFailure, RelationReport};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{BranchPoint, Component, SpectralCurveLocal};
    use crate::exactnum::{int, rat};
    use crate::recursion::{run, EngineOptions};

    fn airy() -> SpectralCurveLocal {
        SpectralCurveLocal::monomial(2, 3, rat(1, 2)).unwrap()
    }

    fn exceptional(q: i64) -> SpectralCurveLocal {
        let c1 = Component::new(1, 2, &[(3, int(-1))]).with_q(int(q));
        let c2 = Component::new(2, 1, &[]).with_q(int(-q));
        SpectralCurveLocal::new(vec![BranchPoint::new(0, vec![c1, c2])], &[], true).unwrap()
    }

    #[test]
    fn airy_loops_hold_and_bound_is_tight() {
        let curve = airy();
        let store = run(&curve, 3, &EngineOptions::default()).unwrap().store;
        let reports = loop_suite(&curve, &store, 3, 1).unwrap();
        assert!(!reports.is_empty());
        assert!(reports.iter().all(|r| r.pass), "{:?}", reports.iter().find(|r| !r.pass));
        // The quadratic bound is attained at (g, n) = (0, 2).
        assert!(reports
            .iter()
            .any(|r| r.i == Some(2) && (r.g2, r.n) == (0, 2) && r.components[0].tight));
        // A single-component branch point has gaps r and >= 1.
        let bp = &curve.branch_points[0];
        let gaps: Vec<i64> = (1..=2).map(|i| loop_gap(bp, 1, i).unwrap().unwrap()).collect();
        assert_eq!(gaps, vec![2, 1]);
    }

    #[test]
    fn uncharged_exceptional_component_decouples() {
        let curve = exceptional(0);
        let store = run(&curve, 3, &EngineOptions::default()).unwrap().store;
        let report = check_decoupling(&curve, &store, 3, &EngineOptions::default()).unwrap();
        assert_eq!(report.removed, vec![2]);
        assert!(report.pass, "{:?}", report.diffs.first());
        assert!(report.entries > 10);
        // A charge couples the components.
        assert!(matches!(decoupled_curve(&exceptional(1)), Err(crate::Error::ShapeMismatch(_))));
    }

    #[test]
    fn airy_relations() {
        let curve = airy();
        let store = run(&curve, 4, &EngineOptions::default()).unwrap().store;
        for report in [
            check_dilaton(&curve, &store).unwrap(),
            check_string(&curve, &store).unwrap(),
            check_homogeneity(&curve, &store).unwrap(),
        ] {
            assert!(report.checked > 0);
            assert!(report.pass, "{report:?}");
        }
        assert_eq!(store.get(2, 2, &[(1, 3), (1, 3)]), rat(3, 8));
    }

    #[test]
    fn exceptional_relations_and_constant() {
        let curve = exceptional(1);
        let store = run(&curve, 3, &EngineOptions::default()).unwrap().store;
        // F11[3] = 1/8 + 3 q^2 / 2 at t = 1/2.
        assert_eq!(store.get(2, 1, &[(1, 3)]), rat(1, 8) + rat(3, 2));
        for report in [
            check_dilaton(&curve, &store).unwrap(),
            check_string(&curve, &store).unwrap(),
            check_homogeneity(&curve, &store).unwrap(),
        ] {
            assert!(report.pass, "{report:?}");
        }
        let reports = loop_suite(&curve, &store, 2, 1).unwrap();
        assert!(reports.iter().all(|r| r.pass), "{:?}", reports.iter().find(|r| !r.pass));
    }
}
