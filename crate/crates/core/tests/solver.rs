use cubemix::oracle::{bfs_enumerate, default_cache_dir, heuristic, PdbSet};
use cubemix::{distance, named_state, relative_state, solve_optimal, uniform_state, walk, Budget, CubeState, Error, RngStream};

fn pdbs() -> PdbSet {
    PdbSet::load_or_build(&default_cache_dir()).unwrap()
}

#[test]
fn heuristic_is_admissible_on_the_depth_six_ball() {
    let pdbs = pdbs();
    let table = bfs_enumerate(6, false).unwrap();
    assert_eq!(heuristic(&CubeState::SOLVED, &pdbs), 0);
    let mut checked = 0u64;
    for d in 0..=6u8 {
        for x in table.layer(d) {
            assert!(heuristic(&x, &pdbs) <= d, "h > {d} at {x}");
            checked += 1;
        }
    }
    assert_eq!(checked, table.len() as u64);
}

#[test]
fn solutions_are_optimal_and_valid() {
    let pdbs = pdbs();
    let table = bfs_enumerate(5, false).unwrap();
    let mut rng = RngStream::new(41, 0);
    for len in 0..=10 {
        for _ in 0..5 {
            let x = walk(&CubeState::SOLVED, len, &mut rng);
            let r = solve_optimal(&x, &pdbs, Budget::UNLIMITED).unwrap();
            assert!(x.apply_sequence(&r.solution).is_solved());
            assert_eq!(r.solution.len(), r.distance as usize);
            assert!(r.distance as usize <= len);
            if let Some(d) = table.distance(&x) {
                assert_eq!(r.distance, d);
            }
        }
    }
}

#[test]
fn distance_to_a_target_uses_the_relative_state() {
    let pdbs = pdbs();
    let checker = named_state("checkerboard").unwrap();
    let mut rng = RngStream::new(42, 0);
    for len in 0..5 {
        let x = walk(&checker, len, &mut rng);
        let d = distance(&x, &checker, &pdbs, Budget::UNLIMITED).unwrap();
        assert!(d as usize <= len);
        assert_eq!(d, solve_optimal(&relative_state(&x, &checker), &pdbs, Budget::UNLIMITED).unwrap().distance);
    }
    assert_eq!(distance(&CubeState::SOLVED, &checker, &pdbs, Budget::UNLIMITED).unwrap(), 6);
}

#[test]
fn node_budget_reports_a_lower_bound() {
    let pdbs = pdbs();
    let x = uniform_state(&mut RngStream::new(43, 0));
    match solve_optimal(&x, &pdbs, Budget::nodes(1000)) {
        Err(Error::BudgetExhausted { lower_bound, .. }) => assert!(lower_bound >= heuristic(&x, &pdbs)),
        other => panic!("expected budget exhaustion, got {other:?}"),
    }
}

#[test]
fn deep_bfs_needs_opt_in() {
    assert!(matches!(bfs_enumerate(7, false), Err(Error::DepthGuard(_))));
}

#[test]
fn distance_is_symmetric_and_satisfies_the_triangle_inequality() {
    let pdbs = pdbs();
    let mut rng = RngStream::new(44, 0);
    let d = |a: &CubeState, b: &CubeState| distance(a, b, &pdbs, Budget::UNLIMITED).unwrap();
    for _ in 0..40 {
        let x = uniform_state(&mut rng);
        let y = walk(&x, 4, &mut rng);
        let z = walk(&y, 4, &mut rng);
        assert_eq!(d(&x, &y), d(&y, &x));
        assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z));
    }
}
