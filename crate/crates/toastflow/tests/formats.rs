//! Round-trip tests for the on-disk JSON formats and the determinism of
//! their byte serializations.

use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use toastflow::format::{
    flow_bytes, pieces_bytes, read_flow, read_graph, read_pieces, read_toast, read_vertex_set,
    write_flow, write_graph, write_pieces, write_toast, write_vertex_set,
};
use toastflow_core::equidecomp::{Equidecomposition, Piece};
use toastflow_core::graph::canonical;
use toastflow_core::oracle::random_instance;
use toastflow_core::{ExactRational, Flow, Graph, VertexSet};

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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Flows survive a write/read cycle exactly, including non-dyadic
    /// rationals, and serialize to identical bytes every time.
    #[test]
    fn flow_round_trip(seed in any::<u64>()) {
        let graph = Graph::torus(8, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut flow = Flow::zero(&graph);
        for _ in 0..20 {
            let &e = &graph.edges()[rng_below(&mut rng, graph.edge_count() as u32) as usize];
            let p = rng_below(&mut rng, 19) as i64 - 9;
            let q = 1 + rng_below(&mut rng, 11) as i64;
            flow.set_canonical(e, ExactRational::new(p, q));
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("flow.json");
        write_flow(&path, &flow).unwrap();
        let back = read_flow(&path, &graph).unwrap();
        prop_assert_eq!(&back, &flow);
        prop_assert_eq!(flow_bytes(&flow), flow_bytes(&back));
    }

    /// Explicit vertex/edge graphs and torus graphs both round-trip.
    #[test]
    fn graph_round_trip(seed in any::<u64>(), w in 3u32..10, h in 3u32..10) {
        let dir = tempfile::tempdir().unwrap();

        let torus = Graph::torus(w, h).unwrap();
        let path = dir.path().join("torus.json");
        write_graph(&path, &torus).unwrap();
        prop_assert_eq!(read_graph(&path).unwrap(), torus);

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 3 + rng_below(&mut rng, 8);
        let mut edges = std::collections::BTreeSet::new();
        for i in 1..n {
            edges.insert(canonical(i - 1, i));
        }
        for _ in 0..n {
            let u = rng_below(&mut rng, n);
            let v = rng_below(&mut rng, n);
            if u != v {
                edges.insert(canonical(u, v));
            }
        }
        let graph = Graph::new(0..n, edges).unwrap();
        let path = dir.path().join("graph.json");
        write_graph(&path, &graph).unwrap();
        prop_assert_eq!(read_graph(&path).unwrap(), graph);
    }

    /// Generated toasts and vertex sets round-trip through their files.
    #[test]
    fn toast_and_vertex_set_round_trip(seed in any::<u64>()) {
        let bundle = random_instance(16, 16, 8, 2, 3, 4, &[3], seed).unwrap();
        let dir = tempfile::tempdir().unwrap();

        let path = dir.path().join("toast.json");
        write_toast(&path, &bundle.toast).unwrap();
        let back = read_toast(&path).unwrap();
        prop_assert_eq!(back.tiles(), bundle.toast.tiles());

        let set: VertexSet = bundle.problem.demand.keys().copied().collect();
        let path = dir.path().join("set.json");
        write_vertex_set(&path, &set).unwrap();
        prop_assert_eq!(read_vertex_set(&path).unwrap(), set);
    }

    /// Piece lists round-trip and have stable bytes.
    #[test]
    fn pieces_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pieces = Vec::new();
        for _ in 0..1 + rng_below(&mut rng, 5) {
            let gamma = (rng_below(&mut rng, 8), rng_below(&mut rng, 8));
            let vertices: VertexSet = (0..rng_below(&mut rng, 10))
                .map(|_| rng_below(&mut rng, 64))
                .collect();
            pieces.push(Piece { gamma, vertices });
        }
        let deco = Equidecomposition { pieces };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pieces.json");
        write_pieces(&path, &deco).unwrap();
        let back = read_pieces(&path).unwrap();
        prop_assert_eq!(pieces_bytes(&back), pieces_bytes(&deco));
    }
}
