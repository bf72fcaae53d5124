use std::collections::HashMap;

use cubemix::walk::{group_order, random_moves, walk_trajectory};
use cubemix::{random_move, uniform_state, walk, CubeState, RngStream};

// 0.999 quantile of chi-square with 17 degrees of freedom
const CHI2_17_999: f64 = 40.790;

#[test]
fn moves_are_uniform_chi_square() {
    let mut rng = RngStream::new(31, 0);
    let draws = 1_000_000;
    let mut counts = [0u64; 18];
    for _ in 0..draws {
        counts[random_move(&mut rng).index()] += 1;
    }
    let expected = draws as f64 / 18.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < CHI2_17_999, "chi-square {chi2} with counts {counts:?}");
}

#[test]
fn group_order_matches_the_counting_formula() {
    let f = |n: u128| (1..=n).product::<u128>();
    assert_eq!(group_order(), f(8) * f(12) * 3u128.pow(7) * 2u128.pow(11) / 2);
    assert_eq!(group_order(), 43_252_003_274_489_856_000);
}

#[test]
fn corner_projection_of_uniform_states_has_birthday_collisions() {
    let cells = 88_179_840f64;
    let k = 1_000_000u64;
    let mut rng = RngStream::new(32, 0);
    let mut hits: HashMap<usize, u32> = HashMap::with_capacity(k as usize);
    for _ in 0..k {
        let i = cubemix::ChainMode::Corner.index_of(&uniform_state(&mut rng).corners());
        *hits.entry(i).or_default() += 1;
    }
    let pairs: u64 = hits.values().map(|&c| c as u64 * (c as u64 - 1) / 2).sum();
    // pairs of samples landing in the same cell: mean C(k,2)/N, approximately Poisson
    let mean = (k * (k - 1) / 2) as f64 / cells;
    let sd = mean.sqrt();
    assert!((pairs as f64 - mean).abs() < 4.0 * sd, "{pairs} colliding pairs, expected {mean:.0} +- {sd:.0}");
}

#[test]
fn walks_are_bit_reproducible_across_threads() {
    let run = |seed| {
        let mut rng = RngStream::for_sample(seed, 30, 12);
        walk(&CubeState::SOLVED, 30, &mut rng)
    };
    let here = run(5);
    let there = std::thread::spawn(move || run(5)).join().unwrap();
    assert_eq!(here, there);
    assert_ne!(here, run(6));
}

#[test]
fn trajectory_ends_at_walk() {
    let traj = walk_trajectory(&CubeState::SOLVED, 20, &mut RngStream::new(33, 1));
    assert_eq!(traj.len(), 21);
    assert!(traj[0].is_solved());
    assert_eq!(traj[20], walk(&CubeState::SOLVED, 20, &mut RngStream::new(33, 1)));
    for w in traj.windows(2) {
        assert!(cubemix::Move::all().any(|m| w[0].apply_move(m) == w[1]));
    }
}

#[test]
fn walk_applies_the_drawn_moves() {
    let s = random_moves(40, &mut RngStream::new(34, 0));
    assert_eq!(walk(&CubeState::SOLVED, 40, &mut RngStream::new(34, 0)), CubeState::SOLVED.apply_sequence(&s));
}

#[test]
fn five_step_support_is_bounded_by_words() {
    let mut rng = RngStream::new(35, 0);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..200_000 {
        seen.insert(walk(&CubeState::SOLVED, 5, &mut rng).key());
    }
    assert!(seen.len() <= 1_889_568);
    // the exact ball of radius 5 has 621,649 states
    assert!(seen.len() <= 1 + 18 + 243 + 3240 + 43239 + 574908);
}
