//! Acceptance suite. Each test covers one acceptance criterion and
//! prints a single PASS line (visible with `--nocapture`); a failing
//! criterion fails its test. Time budgets are asserted per criterion.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use toastflow::format::{flow_bytes, pieces_bytes};
use toastflow_core::equidecomp::{
    check_uniform, equidecompose, flow_from_bijection, folner_tiling, matched_bijection,
    verify_equidecomposition, TorusAction,
};
use toastflow_core::flow::verify_f_flow;
use toastflow_core::graph::canonical;
use toastflow_core::oracle::{
    connected_labeled_graphs, enumerate_integral_flows, feasible_integral_flow,
    lex_least_integral_flow, random_instance, random_instance_with_toast, zero_sum_demands,
    InstanceBundle,
};
use toastflow_core::parity::odd_parity_subgraph;
use toastflow_core::rounding::round_flow;
use toastflow_core::toast::{generate_torus_toast, is_k_toast, validate_toast, Tile};
use toastflow_core::{ExactRational, Flow, FlowProblem, Graph, Toast, Vertex, VertexSet};

fn rng_below(rng: &mut ChaCha8Rng, bound: u32) -> u32 {
    if bound <= 1 {
        return 0;
    }
    let zone = u32::MAX - u32::MAX % bound;
    loop {
        let x = rng.next_u32();
        if x < zone {
            return x % bound;
        }
    }
}

fn report(criterion: u32, detail: &str, start: Instant, budget: Duration) {
    let elapsed = start.elapsed();
    println!(
        "criterion {criterion}: PASS ({detail}) in {:.1}s",
        elapsed.as_secs_f64()
    );
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its {:.0}s budget: {:.1}s",
        budget.as_secs_f64(),
        elapsed.as_secs_f64()
    );
}

/// An 8x8 torus is below the generator's minimum cell pitch, so build its
/// two-tile toast (root plus one inner 5x5 block) by hand.
fn small_torus_bundle(circuits: u32, denominators: &[u64], seed: u64) -> InstanceBundle {
    let graph = Graph::torus(8, 8).unwrap();
    let root: VertexSet = graph.vertices().iter().copied().collect();
    let mut child = VertexSet::new();
    for y in 0..5 {
        for x in 0..5 {
            child.insert(graph.torus_vertex(x, y));
        }
    }
    let toast = Toast::new(vec![
        Tile { id: 0, parent: None, vertices: root },
        Tile { id: 1, parent: Some(0), vertices: child },
    ])
    .unwrap();
    random_instance_with_toast(graph, toast, circuits, denominators, seed).unwrap()
}

/// Torus/toast configurations spanning 8x8 up to 24x24 with margins 3-4.
const ROUNDING_CONFIGS: &[(u32, u32, u32, u32)] = &[
    (12, 6, 2, 3),
    (16, 8, 2, 3),
    (16, 8, 2, 4),
    (20, 10, 2, 3),
    (20, 10, 2, 4),
    (24, 12, 2, 3),
    (24, 12, 2, 4),
];

fn rounding_bundle(index: u64) -> InstanceBundle {
    let denominator_pool: &[&[u64]] = &[&[3, 5, 7], &[9, 11], &[3, 5, 7, 9, 11], &[7, 11]];
    let circuits = (index % 41) as u32;
    let denominators = denominator_pool[(index / 7 % 4) as usize];
    if index % 8 == 0 {
        return small_torus_bundle(circuits, denominators, index);
    }
    let (w, base, factor, margin) = ROUNDING_CONFIGS[(index % 7) as usize];
    random_instance(w, w, base, factor, margin, circuits, denominators, index).unwrap()
}

/// Criterion 1: on 500 seeded instances (tori 8x8 to 24x24, margins 3-4,
/// up to 40 rational circuits with denominators from {3,5,7,9,11}),
/// rounding returns an integral flow with the exact demand divergence,
/// sup distance below 3, and per-stage edge changes below 1 and 2.
#[test]
fn criterion_1_rounding_on_seeded_instances() {
    let start = Instant::now();
    let one = ExactRational::one();
    let two = ExactRational::from_int(2);
    let three = ExactRational::from_int(3);
    for index in 0..500u64 {
        let bundle = rounding_bundle(index);
        let (psi, trace) = round_flow(&bundle.problem, &bundle.toast, &bundle.phi)
            .unwrap_or_else(|e| panic!("instance {index}: {e}"));
        assert!(psi.is_integral(), "instance {index}: psi not integral");
        assert!(
            verify_f_flow(&psi, &bundle.problem).unwrap().ok(),
            "instance {index}: psi divergence differs from the demand"
        );
        assert!(
            psi.sup_distance(&bundle.phi) < three,
            "instance {index}: sup distance >= 3"
        );
        for (e, delta) in &trace.stage1_change {
            assert!(delta < &one, "instance {index}: stage-1 change >= 1 on {e:?}");
        }
        for (e, delta) in &trace.stage2_change {
            assert!(delta < &two, "instance {index}: stage-2 change >= 2 on {e:?}");
        }
    }
    report(1, "500 instances rounded within bounds", start, Duration::from_secs(120));
}

/// Criterion 2: in a dyadic f-flow with integral demands, every vertex
/// touches an even number of edges whose denominator exponent equals the
/// maximum denominator exponent among its incident edges.
#[test]
fn criterion_2_dyadic_flow_parity() {
    let start = Instant::now();
    let mut checked_vertices = 0u64;
    for seed in 0..200u64 {
        let circuits = (seed % 31) as u32;
        let bundle = random_instance(12, 12, 6, 2, 3, circuits, &[2, 4, 8, 16, 32], seed).unwrap();
        let phi = &bundle.phi;
        assert!(phi.is_dyadic(), "seed {seed}: flow not dyadic");
        let graph = &bundle.problem.graph;
        for &v in graph.vertices() {
            let exps: Vec<u64> = graph
                .neighbors(v)
                .unwrap()
                .iter()
                .map(|&w| {
                    phi.canonical_value(canonical(v, w))
                        .denominator_exponent()
                        .expect("dyadic value")
                })
                .collect();
            let l_max = exps.iter().copied().max().unwrap_or(0);
            if l_max >= 1 {
                let count = exps.iter().filter(|&&l| l == l_max).count();
                assert!(
                    count % 2 == 0,
                    "seed {seed}: vertex {v} touches {count} edges at top exponent {l_max}"
                );
                checked_vertices += 1;
            }
        }
    }
    report(
        2,
        &format!("200 dyadic flows, {checked_vertices} vertices at top exponent"),
        start,
        Duration::from_secs(60),
    );
}

/// Criterion 3: on every labeled connected graph with at most 5 vertices
/// and 10 edges, `odd_parity_subgraph` realizes every even-size odd-vertex
/// request, and exhaustive enumeration confirms the achievable odd-vertex
/// sets are exactly the even-size subsets.
#[test]
fn criterion_3_parity_subgraph_exhaustive() {
    let start = Instant::now();
    let mut graph_count = 0u64;
    for n in 1..=5u32 {
        for graph in connected_labeled_graphs(n, 10) {
            graph_count += 1;
            let edges = graph.edges();
            let m = edges.len();
            // all achievable odd-degree vertex sets, as bitmasks
            let mut achievable = vec![false; 1 << n];
            for subset in 0u32..(1 << m) {
                let mut parity = 0u32;
                for (i, e) in edges.iter().enumerate() {
                    if subset >> i & 1 == 1 {
                        parity ^= (1 << e.0) | (1 << e.1);
                    }
                }
                achievable[parity as usize] = true;
            }
            let s: VertexSet = graph.vertices().iter().copied().collect();
            for mask in 0u32..(1 << n) {
                let even = mask.count_ones() % 2 == 0;
                assert_eq!(
                    achievable[mask as usize], even,
                    "graph {graph_count}: achievable parity sets differ from even subsets"
                );
                if !even {
                    continue;
                }
                let p: VertexSet = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
                let q = odd_parity_subgraph(&graph, &s, &p).unwrap();
                for &v in &s {
                    let deg = graph
                        .neighbors(v)
                        .unwrap()
                        .iter()
                        .filter(|&&w| q.contains(&canonical(v, w)))
                        .count();
                    assert_eq!(
                        deg % 2 == 1,
                        p.contains(&v),
                        "graph {graph_count}: wrong parity at vertex {v}"
                    );
                }
            }
        }
    }
    report(
        3,
        &format!("{graph_count} connected graphs, all even requests realized"),
        start,
        Duration::from_secs(60),
    );
}

/// Criterion 4: 100 seeded generated toasts on tori of side 16, 32 and 64
/// validate and satisfy the margin-k separation; 20 hand-crafted broken
/// toasts are rejected with the correct property number.
#[test]
fn criterion_4_toast_generation_and_validation() {
    let start = Instant::now();
    let configs = [
        (16u32, 8u32, 2u32, 3u32),
        (16, 8, 2, 4),
        (32, 8, 2, 3),
        (32, 16, 2, 3),
        (32, 16, 2, 4),
        (64, 16, 2, 3),
        (64, 16, 2, 4),
        (64, 32, 2, 3),
    ];
    for seed in 0..100u64 {
        let (w, base, factor, margin) = configs[(seed % 8) as usize];
        let graph = Graph::torus(w, w).unwrap();
        let toast = generate_torus_toast(w, w, base, factor, margin, seed).unwrap();
        let violations = validate_toast(&graph, &toast).unwrap();
        assert!(violations.is_empty(), "seed {seed}: {violations:?}");
        assert!(
            is_k_toast(&graph, &toast, margin).unwrap(),
            "seed {seed}: margin-{margin} separation fails"
        );
    }

    // hand-crafted violations, cycling through the three properties
    let graph = Graph::torus(8, 8).unwrap();
    let all: VertexSet = graph.vertices().iter().copied().collect();
    let block = |x0: u32, y0: u32, s: u32| -> VertexSet {
        let mut set = VertexSet::new();
        for y in y0..y0 + s {
            for x in x0..x0 + s {
                set.insert(graph.torus_vertex(x, y));
            }
        }
        set
    };
    let mut rejected = 0u32;
    for i in 0..20u32 {
        let (tiles, want): (Vec<Tile>, u8) = match i % 5 {
            // two far-apart components in one tile: not connected
            0 => (
                vec![Tile {
                    id: 0,
                    parent: None,
                    vertices: block(0, 0, 2).union(&block(4 + i % 2, 4, 2)).copied().collect(),
                }],
                3,
            ),
            // a root that misses some vertices: edges uncovered
            1 => (
                vec![Tile { id: 0, parent: None, vertices: block(0, 0, 5 + i % 3) }],
                1,
            ),
            // two incomparable tiles at distance <= 1: dichotomy fails
            2 => (
                vec![
                    Tile { id: 0, parent: None, vertices: all.clone() },
                    Tile { id: 1, parent: Some(0), vertices: block(0, 0, 3 + i % 2) },
                    Tile { id: 2, parent: Some(0), vertices: block(3, 0, 2) },
                ],
                2,
            ),
            // duplicated tile vertex sets
            3 => (
                vec![
                    Tile { id: 0, parent: None, vertices: all.clone() },
                    Tile { id: 1, parent: Some(0), vertices: block(2, 2, 2 + i % 2) },
                    Tile { id: 2, parent: Some(0), vertices: block(2, 2, 2 + i % 2) },
                ],
                2,
            ),
            // two full-row children cutting the parent's free region into
            // two bands
            _ => (
                vec![
                    Tile { id: 0, parent: None, vertices: all.clone() },
                    Tile {
                        id: 1,
                        parent: Some(0),
                        vertices: (0..8).map(|x| graph.torus_vertex(x, 2 + i % 3)).collect(),
                    },
                    Tile {
                        id: 2,
                        parent: Some(0),
                        vertices: (0..8).map(|x| graph.torus_vertex(x, 5 + i % 3)).collect(),
                    },
                ],
                3,
            ),
        };
        let toast = Toast::new(tiles).unwrap();
        let violations = validate_toast(&graph, &toast).unwrap();
        assert!(!violations.is_empty(), "broken toast {i} was accepted");
        assert!(
            violations.iter().any(|v| v.property() == want),
            "broken toast {i}: wanted property {want}, got {violations:?}"
        );
        rejected += 1;
    }
    report(
        4,
        &format!("100 generated toasts valid, {rejected} broken toasts rejected"),
        start,
        Duration::from_secs(120),
    );
}

/// Criterion 5: 200 random connected hole-free subsets (5 to 200
/// vertices) of a 32x32 torus have connected annuli; 20 constructed
/// ring-shaped sets fail the hole-freeness check.
#[test]
fn criterion_5_annulus_connectivity() {
    let start = Instant::now();
    let graph = Graph::torus(32, 32).unwrap();
    for seed in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = 5 + rng_below(&mut rng, 196) as usize;
        // growth confined to a 29x29 box so the set cannot wrap the torus
        let in_box = |v: Vertex| v % 32 < 29 && v / 32 < 29;
        let start_v = graph.torus_vertex(rng_below(&mut rng, 29), rng_below(&mut rng, 29));
        let mut set = VertexSet::from([start_v]);
        let mut frontier: Vec<Vertex> = graph
            .neighbors(start_v)
            .unwrap()
            .iter()
            .copied()
            .filter(|&v| in_box(v))
            .collect();
        while set.len() < target && !frontier.is_empty() {
            let i = rng_below(&mut rng, frontier.len() as u32) as usize;
            let v = frontier.swap_remove(i);
            if set.insert(v) {
                for &w in graph.neighbors(v).unwrap() {
                    if !set.contains(&w) && in_box(w) {
                        frontier.push(w);
                    }
                }
            }
        }
        // fill holes: absorb all complement components except the largest
        let complement: VertexSet = graph
            .vertices()
            .iter()
            .copied()
            .filter(|v| !set.contains(v))
            .collect();
        let mut comps = graph.components_within(&complement);
        comps.sort_by_key(|c| c.len());
        comps.pop();
        for c in comps {
            set.extend(c);
        }
        assert!(graph.is_hole_free(&set).unwrap(), "seed {seed}: set has a hole");
        assert!(
            graph.annulus_connected(&set).unwrap(),
            "seed {seed}: annulus disconnected for hole-free set of {} vertices",
            set.len()
        );
    }

    // rings: the frame of a (3+k)x(3+k) box encloses a hole
    for k in 0..20u32 {
        let side = 3 + k % 10;
        let mut ring = VertexSet::new();
        for d in 0..=side {
            ring.insert(graph.torus_vertex(d, 0));
            ring.insert(graph.torus_vertex(d, side));
            ring.insert(graph.torus_vertex(0, d));
            ring.insert(graph.torus_vertex(side, d));
        }
        assert!(
            !graph.is_hole_free(&ring).unwrap(),
            "ring of side {side} reported hole-free"
        );
    }
    report(5, "200 hole-free sets, 20 holed sets rejected", start, Duration::from_secs(60));
}

fn flow_key(problem: &FlowProblem, flow: &Flow) -> Vec<i64> {
    problem
        .graph
        .edges()
        .iter()
        .map(|&e| {
            let v = flow.canonical_value(e);
            let num: i64 = format!("{v}").parse().unwrap_or_else(|_| panic!("non-integral {v}"));
            num
        })
        .collect()
}

fn check_oracle_agreement(graph: &Graph, demand: BTreeMap<Vertex, i64>) {
    let capacity: BTreeMap<_, u64> = graph.edges().iter().map(|&e| (e, 2)).collect();
    let problem = match FlowProblem::new(graph.clone(), demand, Some(capacity)) {
        Ok(p) => p,
        Err(_) => return, // demand unbalanced on some component
    };
    let all = enumerate_integral_flows(&problem, 2).unwrap();
    let feasible = feasible_integral_flow(&problem).unwrap();
    assert_eq!(
        feasible.is_some(),
        !all.is_empty(),
        "feasibility oracle disagrees with enumeration"
    );
    if let Some(f) = &feasible {
        assert!(verify_f_flow(f, &problem).unwrap().ok());
    }
    let least = lex_least_integral_flow(&problem).unwrap();
    match (&least, all.is_empty()) {
        (Some(l), false) => {
            let l_key = flow_key(&problem, l);
            let min_key = all
                .iter()
                .map(|f| flow_key(&problem, f))
                .min()
                .expect("non-empty enumeration");
            assert_eq!(l_key, min_key, "lex-least differs from enumeration minimum");
        }
        (None, true) => {}
        _ => panic!("lex-least feasibility disagrees with enumeration"),
    }
}

/// Criterion 6: the max-flow based oracles agree with exhaustive
/// enumeration (capacity 2 everywhere): same feasibility verdict and the
/// identical lexicographically least flow. Exhaustive over all connected
/// labeled graphs with up to 4 vertices and all zero-sum demands in
/// [-2, 2]; sampled over 5-vertex graphs with up to 8 edges.
#[test]
fn criterion_6_oracle_agreement() {
    let start = Instant::now();
    let mut instances = 0u64;
    for n in 2..=4u32 {
        for graph in connected_labeled_graphs(n, 6) {
            for demand in zero_sum_demands(graph.vertices(), 2) {
                check_oracle_agreement(&graph, demand);
                instances += 1;
            }
        }
    }
    let five = connected_labeled_graphs(5, 8);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for gi in 0..40 {
        let graph = &five[rng_below(&mut rng, five.len() as u32) as usize];
        let demands = zero_sum_demands(graph.vertices(), 2);
        for _ in 0..10 {
            let demand = demands[rng_below(&mut rng, demands.len() as u32) as usize].clone();
            check_oracle_agreement(graph, demand);
            instances += 1;
        }
        let _ = gi;
    }
    report(
        6,
        &format!("{instances} instances agree with enumeration"),
        start,
        Duration::from_secs(120),
    );
}

/// Generates A and B on a 32x32 torus with equal totals and per-tile
/// counts between 20 and 44 over the 8x8 tiling, so both sets meet the
/// 1/4-uniformity condition.
fn balanced_sets(
    action: &TorusAction,
    tiles: &[VertexSet],
    rng: &mut ChaCha8Rng,
) -> (VertexSet, VertexSet) {
    let a_counts: Vec<usize> = tiles.iter().map(|_| 20 + rng_below(rng, 25) as usize).collect();
    // B's counts are a locally compensating perturbation of A's: a few
    // single units move between adjacent tiles of the 4x4 tile grid, as
    // in the uniform-transport hypothesis. (Arbitrary count differences
    // can pile up transit flow on one tile and legitimately exceed its
    // sparsity budget.)
    let mut b_counts = a_counts.clone();
    let grid = 4usize; // 32/8 tiles per row
    for _ in 0..8 {
        let i = rng_below(rng, (grid * grid) as u32) as usize;
        let (x, y) = (i % grid, i / grid);
        let j = match rng_below(rng, 4) {
            0 => y * grid + (x + 1) % grid,
            1 => y * grid + (x + grid - 1) % grid,
            2 => ((y + 1) % grid) * grid + x,
            _ => ((y + grid - 1) % grid) * grid + x,
        };
        if b_counts[i] > 18 && b_counts[j] < 46 {
            b_counts[i] -= 1;
            b_counts[j] += 1;
        }
    }
    let sample = |counts: &[usize], rng: &mut ChaCha8Rng| -> VertexSet {
        let mut set = VertexSet::new();
        for (tile, &want) in tiles.iter().zip(counts) {
            let mut pool: Vec<Vertex> = tile.iter().copied().collect();
            for _ in 0..want {
                let i = rng_below(rng, pool.len() as u32) as usize;
                set.insert(pool.swap_remove(i));
            }
        }
        set
    };
    let a = sample(&a_counts, rng);
    let b = sample(&b_counts, rng);
    let _ = action;
    (a, b)
}

fn equidecompose_seeded(seed: u64) -> toastflow_core::equidecomp::Equidecomposition {
    let action = TorusAction::new(32, 32).unwrap();
    let graph = action.graph();
    let tiling = folner_tiling(&action, &ExactRational::new(1, 2)).unwrap();
    assert_eq!(tiling.side, Some(8));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = balanced_sets(&action, &tiling.tiles, &mut rng);
    let quarter = ExactRational::new(1, 4);
    assert!(check_uniform(&action, &a, &tiling, &quarter).unwrap().ok());
    assert!(check_uniform(&action, &b, &tiling, &quarter).unwrap().ok());

    let raw = matched_bijection(&action, &tiling, &a, &b).unwrap();
    let (phi, _bound) = flow_from_bijection(&action, &raw).unwrap();

    let demand: BTreeMap<Vertex, i64> = graph
        .vertices()
        .iter()
        .map(|&v| (v, i64::from(a.contains(&v)) - i64::from(b.contains(&v))))
        .filter(|&(_, d)| d != 0)
        .collect();
    let problem = FlowProblem::new(graph.clone(), demand, None).unwrap();
    let toast = generate_torus_toast(32, 32, 16, 2, 3, seed).unwrap();
    let (psi, _trace) = round_flow(&problem, &toast, &phi).unwrap();

    let pieces = equidecompose(&action, &a, &b, &tiling, &psi).unwrap();
    let check = verify_equidecomposition(&action, &a, &b, &pieces);
    assert!(check.ok(), "seed {seed}: {:?}", check.issues);
    pieces
}

/// Criterion 7: 100 seeded equal-size, tile-uniform set pairs on a 32x32
/// torus run the full pipeline (matched bijection, flow, rounding,
/// flow-driven equidecomposition) and verify.
#[test]
fn criterion_7_equidecomposition_pipeline() {
    let start = Instant::now();
    let mut total_pieces = 0usize;
    let mut max_pieces = 0usize;
    for seed in 0..100u64 {
        let pieces = equidecompose_seeded(seed);
        total_pieces += pieces.piece_count();
        max_pieces = max_pieces.max(pieces.piece_count());
    }
    report(
        7,
        &format!(
            "100 pipelines verified; mean pieces {:.1}, max {max_pieces}",
            total_pieces as f64 / 100.0
        ),
        start,
        Duration::from_secs(180),
    );
}

/// Criterion 8: identical seeds reproduce byte-identical serialized
/// outputs for both the rounding pipeline and the equidecomposition
/// pipeline.
#[test]
fn criterion_8_determinism() {
    let start = Instant::now();
    for index in (0..100u64).step_by(5) {
        let first = rounding_bundle(index);
        let second = rounding_bundle(index);
        assert_eq!(
            flow_bytes(&first.phi),
            flow_bytes(&second.phi),
            "instance {index}: generated flows differ between runs"
        );
        let (psi1, _) = round_flow(&first.problem, &first.toast, &first.phi).unwrap();
        let (psi2, _) = round_flow(&second.problem, &second.toast, &second.phi).unwrap();
        assert_eq!(
            flow_bytes(&psi1),
            flow_bytes(&psi2),
            "instance {index}: rounded flows differ between runs"
        );
    }
    for seed in 0..5u64 {
        let p1 = equidecompose_seeded(seed);
        let p2 = equidecompose_seeded(seed);
        assert_eq!(
            pieces_bytes(&p1),
            pieces_bytes(&p2),
            "seed {seed}: pieces differ between runs"
        );
    }
    report(8, "20 rounding and 5 equidecomposition re-runs byte-identical", start, Duration::from_secs(120));
}
