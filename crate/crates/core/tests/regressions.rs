//! Frozen values. Each was first checked against an independent oracle or
//! recomputed by hand and is pinned here so that refactors cannot drift.

use cliquefactor::detectors::{EventParams, Variant};
use cliquefactor::lemma::{doubling_ordering, survey, PairStatistic, SurveyMode};
use cliquefactor::sim::{estimate_t_probability, run_games, Realizer, SimConfig};
use cliquefactor::solver::{solve, GameValue, SolverOptions};
use cliquefactor::strategy::{stage_parameters, StrategyId};
use cliquefactor::{Edge, GoalSpec};

#[test]
fn small_solver_values() {
    let cases = [
        (3, "factor:3", GameValue::ClientWins),
        (4, "clique:2", GameValue::WaiterWins(1)),
        (5, "clique:3", GameValue::WaiterWins(4)),
    ];
    for (n, goal, value) in cases {
        let r = solve(n, goal.parse().unwrap(), SolverOptions::default()).unwrap();
        assert_eq!(r.value, value, "n={n} {goal}");
    }
}

#[test]
fn five_vertex_triangle_line() {
    let r = solve(5, GoalSpec::SingleClique(3), SolverOptions::default()).unwrap();
    assert_eq!(r.states, 6633);
    assert_eq!(r.principal_variation, [(0, 1, 0), (2, 9, 2), (4, 7, 4), (3, 5, 3)]);
    assert_eq!(Edge::from_index(9), Edge::new(3, 4).unwrap());
}

#[test]
fn six_vertex_triangle_factor_is_a_client_win() {
    let r = solve(6, GoalSpec::CliqueFactor(3), SolverOptions::default()).unwrap();
    assert_eq!(r.value, GameValue::ClientWins);
    assert_eq!(r.states, 473_366);
}

#[test]
fn lemma_minima() {
    let expect = [
        (4, PairStatistic::Good, 1),
        (4, PairStatistic::Component, 3),
        (5, PairStatistic::Good, 3),
        (5, PairStatistic::Component, 6),
    ];
    for (k, stat, min) in expect {
        let s = survey(k, stat, SurveyMode::Exhaustive).unwrap();
        assert_eq!(s.min_of_max, min, "k={k} {stat:?}");
        assert_eq!(s.total_violations, 0);
    }
}

#[test]
fn doubling_component_counts() {
    for (t, count) in [(1, 0), (2, 3), (3, 18), (4, 81), (5, 336)] {
        let o = doubling_ordering(t).unwrap();
        assert!(o.component_pairs().iter().all(|&c| c == count), "t={t}");
    }
}

#[test]
fn triangle_factor_plan() {
    let p = stage_parameters(3).unwrap();
    assert_eq!(p.r, 17);
    assert_eq!(p.n_min, Some(393_183));
    assert_eq!(p.c_impl(), Some(131_096));
}

#[test]
fn t_frequencies() {
    let cases = [
        (4, Realizer::SpokesThenRim, 253),
        (4, Realizer::BuilderThroughV, 0),
        (5, Realizer::SpokesThenRim, 29),
        (5, Realizer::BuilderThroughV, 0),
    ];
    for (k, realizer, successes) in cases {
        let e = estimate_t_probability(k, realizer, 2000, 7, None).unwrap();
        assert_eq!(e.successes, successes, "k={k} {realizer:?}");
    }
}

#[test]
fn s_event_mean() {
    let mut c = SimConfig::new(
        40,
        GoalSpec::SingleClique(5),
        StrategyId::Random,
        StrategyId::Random,
        200,
        11,
    );
    c.events = Some(EventParams::new(4, 12, 2, Variant::S3));
    let s = run_games(&c, Some(1)).unwrap();
    assert_eq!(s.waiter_wins, 200);
    assert_eq!(s.s_per_game.unwrap().mean, 2.485);
    assert_eq!(s.s_frequency, Some(0.062125));
}
