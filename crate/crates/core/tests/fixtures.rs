use lhmatch::algorithms::deferred_acceptance;
use lhmatch::experiments::{perturbation_case, removal_case};
use lhmatch::fixtures::*;
use lhmatch::io::example_fixtures;
use lhmatch::market::max_rank_difference;

#[test]
fn example_sosm_and_perturbation() {
    let u = example_profile();
    let v = perturbed_example_profile();
    let q = tight_quotas();
    assert_eq!(deferred_acceptance(&u, &q), example_sosm());
    assert_eq!(deferred_acceptance(&v, &q), perturbed_example_sosm());
    assert_eq!(max_rank_difference(&u.colleges).h, 4);
    let case = perturbation_case(&u, &v, &q, true);
    assert_eq!(case.k, 4);
    // j2 loses i2 and i3 and gains i1 and i5
    assert_eq!(case.sosm_max_college_change, 4);
    assert_eq!(case.sosm_total_changed, 5);
    assert!(!case.sosm_college_violation && !case.sosm_total_violation);
    assert!(!case.sosm_vs_cop_violation && !case.cross_violation);
}

#[test]
fn extra_seat_absorbs_the_perturbation() {
    let q = slack_quotas();
    let a = deferred_acceptance(&example_profile(), &q);
    let b = deferred_acceptance(&perturbed_example_profile(), &q);
    let changed = a.assignment().iter().zip(b.assignment()).filter(|(x, y)| x != y).count();
    assert_eq!(changed, 1);
    let cmp = example_fixtures();
    assert_eq!(cmp.quotas_slack, vec![1, 3, 2]);
}

#[test]
fn removals_restabilize_on_the_example() {
    let u = example_profile();
    for q in [tight_quotas(), slack_quotas()] {
        for i in 0..5 {
            let case = removal_case(&u, &q, i).unwrap();
            assert!(case.restabilized_equals_sosm, "i = {i}");
            assert!(case.fill_dichotomy_holds, "i = {i}");
            let bound = 4 * case.k.max(1) as usize;
            assert!(case.max_n_j1 <= bound && case.max_n_j0 <= bound);
        }
    }
}
