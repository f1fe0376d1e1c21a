mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use resilnet_core::service::SlaTier;
use resilnet_core::topology::{
    critical_nodes, isolate, reroute_avoiding, shed_traffic, vertex_connectivity, DisruptionRegion, FlowRequest,
};
use resilnet_core::{Error, NodeId, Topology};

#[test]
fn vertex_connectivity_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let n = rng.gen_range(2..=8);
        let density = rng.gen_range(0.2..0.95);
        let edges = random_graph(&mut rng, n, density);
        let g = Topology::from_edges(n as u32, &edges).unwrap();
        assert_eq!(vertex_connectivity(&g).unwrap(), brute_vertex_connectivity(n, &edges), "{edges:?}");
    }
}

#[test]
fn critical_nodes_match_removal_check() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..100 {
        let n = rng.gen_range(2..=8);
        let density = rng.gen_range(0.0..0.5);
        let edges = random_connected_graph(&mut rng, n, density);
        let g = Topology::from_edges(n as u32, &edges).unwrap();
        let got: BTreeSet<u32> = critical_nodes(&g).unwrap().into_iter().map(|v| v.0).collect();
        assert_eq!(got, brute_articulation(n, &edges), "{edges:?}");
        let by_isolation: BTreeSet<u32> =
            (0..n as u32).filter(|&v| !isolate(&g, &[NodeId(v)]).unwrap().1.connected).collect();
        assert_eq!(got, by_isolation);
    }
}

#[test]
fn reroute_is_optimal_by_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut routed = 0;
    for _ in 0..300 {
        let n = rng.gen_range(2..=10);
        let density = rng.gen_range(0.15..0.6);
        let edges = random_graph(&mut rng, n, density);
        let g = Topology::from_edges(n as u32, &edges).unwrap();
        let adj = adjacency(n, &edges);
        let (s, t) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let blocked: BTreeSet<NodeId> =
            (0..n).filter(|&v| v != s && v != t && rng.gen_bool(0.25)).map(|v| NodeId(v as u32)).collect();
        let allowed: Vec<bool> = (0..n).map(|v| !blocked.contains(&NodeId(v as u32))).collect();
        let region = DisruptionRegion::Nodes(blocked.clone());
        let got = reroute_avoiding(&g, NodeId(s as u32), NodeId(t as u32), &region);
        match best_path_by_enumeration(&adj, &allowed, s, t) {
            Some(best) => {
                let got: Vec<usize> = got.unwrap().into_iter().map(|v| v.0 as usize).collect();
                assert!(got.iter().all(|v| allowed[*v]));
                assert_eq!(got, best);
                routed += 1;
            }
            None => assert!(matches!(got, Err(Error::NoRoute { .. }))),
        }
    }
    assert!(routed > 100);
}

#[test]
fn circle_region_excludes_interior_nodes() {
    let g = Topology::grid(5, 5).unwrap();
    let region = DisruptionRegion::circle(2.0, 2.0, 1.5).unwrap();
    let path = reroute_avoiding(&g, NodeId(0), NodeId(24), &region).unwrap();
    for id in &path {
        let node = g.nodes().iter().find(|n| n.id == *id).unwrap();
        assert!(!region.contains(node));
    }
    assert_eq!(path.len() - 1, 8);
}

fn tier(priority: u32) -> SlaTier {
    SlaTier {
        name: format!("p{priority}"),
        priority,
        outage_target: 0.01,
        survival_time: 2,
        demand: 1.0,
        degraded_demand: 0.5,
    }
}

proptest! {
    #[test]
    fn shedding_monotone_in_capacity(
        flows in prop::collection::vec((0u32..4, 0.1f64..10.0), 1..10),
        cap in 0.0f64..40.0,
        more in 0.0f64..20.0,
    ) {
        let reqs: Vec<FlowRequest> = flows
            .iter()
            .enumerate()
            .map(|(i, &(p, d))| FlowRequest::new(i as u32, NodeId(0), NodeId(1), d, tier(p)).unwrap())
            .collect();
        let a = shed_traffic(&reqs, cap);
        let b = shed_traffic(&reqs, cap + more);
        prop_assert!(a.iter().sum::<f64>() <= cap + 1e-9);
        for ((x, y), r) in a.iter().zip(&b).zip(&reqs) {
            prop_assert!(y >= x);
            prop_assert!(*x <= r.demand);
        }
    }
}
