use std::collections::HashSet;

use hamlower_core::gadget::replay_plan;
use hamlower_core::graph::{build_graph, InteractionGraph, Point};
use hamlower_core::lattice::*;
use hamlower_core::pauli::{Axis, Axis::*};
use hamlower_core::spectral::sectored_lowest;
use hamlower_core::{Error, Hamiltonian};

fn ground(h: &Hamiltonian) -> f64 {
    sectored_lowest(h, 1, 14).unwrap()[0]
}

fn sum(n: usize, terms: &[(f64, &[(usize, Axis)])]) -> Hamiltonian {
    terms
        .iter()
        .fold(Hamiltonian::zero(n), |h, (c, p)| h.add(&Hamiltonian::term(n, *c, p).unwrap()))
}

fn pts(p: &[(f64, f64)]) -> Vec<Point> {
    p.iter().map(|&(x, y)| Point::new(x, y)).collect()
}

/// Two diagonals of a unit square cross once; a separate pair sits to the right.
fn crossed_six() -> (Hamiltonian, Vec<Point>) {
    let h = sum(
        6,
        &[
            (1.0, &[(0, Z), (3, Z)]),
            (0.8, &[(1, Z), (2, Z)]),
            (0.6, &[(4, Z), (5, Z)]),
            (0.3, &[(0, Z)]),
            (-0.2, &[(1, Z)]),
            (0.1, &[(4, Z)]),
        ],
    );
    (h, pts(&[(0., 0.), (2., 0.), (0., 2.), (2., 2.), (4., 0.), (4., 2.)]))
}

fn assert_degree_profile(g: &InteractionGraph<f64>, originals: usize) {
    for v in 0..g.num_vertices {
        let d = g.pauli_degrees(v).unwrap();
        if v < originals {
            assert!(d.max_axis() <= 1, "original {v}: {d:?}");
        } else {
            assert!((2..=3).contains(&d.x) && d.y == 0 && d.z == 0, "mediator {v}: {d:?}");
        }
    }
}

#[test]
fn planarize_removes_the_crossing() {
    let (h, coords) = crossed_six();
    let p = planarize(&h, &coords, &PlanarizeConfig::default()).unwrap();
    assert!(p.crossings().is_empty());
    let g = p.graph();
    assert!(g.max_pauli_degree() <= 3);
    assert_degree_profile(&g, 6);
    let names: Vec<&str> = p.stages.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(
        names,
        ["localize vertices", "halve degrees", "thin crossings", "localize crossings", "cross", "trim mediators"]
    );
    let cross = p.stage("cross").unwrap();
    assert_eq!(cross.end_round - cross.first_round, 1);
    assert_eq!(p.plan.ledger[cross.first_round].mediators.len(), 1);
    let replay = replay_plan(&h, &p.plan.specs).unwrap();
    assert_eq!(replay.output(), p.hamiltonian);
}

#[test]
fn localization_and_cross_keep_the_ground_energy() {
    let (h, coords) = crossed_six();
    let p = planarize(&h, &coords, &PlanarizeConfig::default()).unwrap();
    let mut before = ground(&h);
    let end = p.stage("cross").unwrap().end_round;
    for (k, app) in p.plan.rounds[..end].iter().enumerate() {
        let after = ground(&app.emitted());
        let eps = p.plan.ledger[k].epsilon_implied.unwrap();
        assert!((after - before).abs() <= eps, "round {k}: {before} -> {after}, ε = {eps}");
        before = after;
    }
}

#[test]
fn planar_input_is_left_alone() {
    let h = sum(3, &[(1.0, &[(0, Z), (1, Z)]), (0.5, &[(1, X), (2, X)]), (0.2, &[(0, X)])]);
    let coords = pts(&[(0., 0.), (1., 0.), (2., 0.)]);
    let p = planarize(&h, &coords, &PlanarizeConfig::default()).unwrap();
    assert_eq!(p.plan.serial_rounds(), 0);
    assert_eq!(p.hamiltonian, h);
    assert_eq!(p.coords, coords);
}

fn star(d: usize) {
    let n = d + 1;
    let mut terms: Vec<(f64, Vec<(usize, Axis)>)> = Vec::new();
    let mut coords = vec![(0.0, 0.0)];
    for i in 0..d {
        terms.push((1.0 + 0.1 * i as f64, vec![(0, Z), (i + 1, Z)]));
        let t = std::f64::consts::TAU * i as f64 / d as f64;
        coords.push((2.0 * t.cos(), 2.0 * t.sin()));
    }
    let h = terms
        .iter()
        .fold(Hamiltonian::zero(n), |h, (c, p)| h.add(&Hamiltonian::term(n, *c, p).unwrap()));
    let p = planarize(&h, &pts(&coords), &PlanarizeConfig::default()).unwrap();
    let halve = p.stage("halve degrees").unwrap();
    // Two rounds of the plan make one triangle round.
    for (r, k) in (halve.first_round..halve.end_round).step_by(2).enumerate() {
        let after = p.plan.rounds[k + 1].emitted();
        let z = build_graph(&after).pauli_degrees(0).unwrap().z;
        assert!(z <= d.div_ceil(1 << (r + 1)) + 1, "d={d}, round {r}: Z-degree {z}");
    }
    assert!(p.crossings().is_empty());
    assert_degree_profile(&p.graph(), n);
}

#[test]
fn star_degree_halves_each_round() {
    for d in [4, 5, 6, 8] {
        star(d);
    }
}

#[test]
fn planarize_errors() {
    let (h, coords) = crossed_six();
    let far = pts(&[(0., 0.), (20., 0.), (0., 2.), (2., 2.), (4., 0.), (4., 2.)]);
    assert!(matches!(planarize(&h, &far, &PlanarizeConfig::default()), Err(Error::AuditFailed(_))));
    let three = h.add(&Hamiltonian::term(6, 1.0, &[(0, Z), (1, Z), (2, Z)]).unwrap());
    assert!(matches!(planarize(&three, &coords, &PlanarizeConfig::default()), Err(Error::PlanInfeasible(_))));
}

fn graph(h: &Hamiltonian, coords: &[(f64, f64)]) -> InteractionGraph<f64> {
    build_graph(h).with_coords(&pts(coords)).unwrap()
}

#[test]
fn triangle_routes_disjointly() {
    let h = sum(3, &[(1.0, &[(0, Z), (1, Z)]), (1.0, &[(1, X), (2, X)]), (1.0, &[(0, X), (2, Z)])]);
    let g = graph(&h, &[(0., 0.), (1., 0.), (0.5, 0.75f64.sqrt())]);
    let cfg = RouteConfig::default();
    let emb = snap_and_route(&g, &cfg).unwrap();
    assert_eq!(emb.edges.len(), 3);
    emb.validate(cfg.max_path_len).unwrap();
    let mut seen = HashSet::new();
    for e in &emb.edges {
        assert_eq!(e.path[0], emb.vertices[e.a]);
        assert_eq!(*e.path.last().unwrap(), emb.vertices[e.b]);
        for p in &e.path[1..e.path.len() - 1] {
            assert!(seen.insert(*p), "grid point {p:?} used twice");
        }
        assert!(e.len() <= cfg.max_path_len);
    }
    assert!(emb.warnings.is_empty());
}

#[test]
fn single_edge_is_straight() {
    let h = sum(2, &[(1.0, &[(0, Z), (1, Z)])]);
    let g = graph(&h, &[(0., 0.), (3., 0.)]);
    let emb = snap_and_route(&g, &RouteConfig::default()).unwrap();
    assert_eq!(emb.refinements, 0);
    let path = &emb.edges[0].path;
    assert_eq!(emb.edges[0].len(), 6);
    assert!(path.iter().all(|p| p[1] == 0));
    let json = serde_json::to_value(&emb).unwrap();
    assert_eq!(json["vertices"][1], serde_json::json!([6, 0]));
    assert_eq!(json["edges"][0]["path"].as_array().unwrap().len(), 7);
}

#[test]
fn routing_refines_when_vertices_collide() {
    let h = sum(3, &[(1.0, &[(0, Z), (1, Z)]), (1.0, &[(1, Z), (2, Z)])]);
    let g = graph(&h, &[(0., 0.), (0.2, 0.), (0.4, 0.)]);
    let emb = snap_and_route(&g, &RouteConfig::default()).unwrap();
    assert!(emb.refinements >= 1);
    let cfg = RouteConfig { max_refinements: 0, ..RouteConfig::default() };
    assert!(matches!(snap_and_route(&g, &cfg), Err(Error::RoutingFailed { refinements: 0, .. })));
}

#[test]
fn routing_rejects_bad_drawings() {
    let h = sum(4, &[(1.0, &[(0, Z), (3, Z)]), (1.0, &[(1, Z), (2, Z)])]);
    let g = graph(&h, &[(0., 0.), (1., 0.), (0., 1.), (1., 1.)]);
    assert!(matches!(snap_and_route(&g, &RouteConfig::default()), Err(Error::InvalidParameter(_))));
    let star = sum(5, &[(1.0, &[(0, Z), (1, Z)]), (1.0, &[(0, Z), (2, Z)]), (1.0, &[(0, Z), (3, Z)]), (1.0, &[(0, Z), (4, Z)])]);
    let g = graph(&star, &[(0., 0.), (1., 0.), (0., 1.), (-1., 0.), (0., -1.)]);
    assert!(matches!(snap_and_route(&g, &RouteConfig::default()), Err(Error::InvalidParameter(_))));
}

#[test]
fn unit_paths_need_no_mediator() {
    let h = sum(2, &[(1.0, &[(0, Z), (1, Z)])]);
    let cfg = RouteConfig { initial_spacing: 1.0, ..RouteConfig::default() };
    let emb = snap_and_route(&graph(&h, &[(0., 0.), (1., 0.)]), &cfg).unwrap();
    let out = match_path_lengths(&h, &emb, 1e3, 1e2).unwrap();
    assert_eq!(out.plan.serial_rounds(), 0);
    assert_eq!(out.hamiltonian, h);
}

#[test]
fn length_two_path_gets_one_mediator() {
    let h = sum(2, &[(1.0, &[(0, Z), (1, Z)])]);
    let cfg = RouteConfig { initial_spacing: 1.0, ..RouteConfig::default() };
    let emb = snap_and_route(&graph(&h, &[(0., 0.), (2., 0.)]), &cfg).unwrap();
    assert_eq!(emb.edges[0].len(), 2);
    let out = match_path_lengths(&h, &emb, 1e4, 1e2).unwrap();
    assert_eq!(out.plan.ledger.len(), 1);
    assert_eq!(out.plan.ledger[0].mediators, vec![2]);
    assert_eq!(out.positions[2], [1, 0]);
    assert!(lattice_violations(&out.hamiltonian, &out.positions).is_empty());
}

#[test]
fn square_ends_on_the_lattice() {
    let h = sum(
        4,
        &[
            (1.0, &[(0, Z), (1, Z)]),
            (0.7, &[(1, Z), (2, Z)]),
            (-0.5, &[(2, X), (3, X)]),
            (0.9, &[(3, Z), (0, Z)]),
            (0.4, &[(0, X)]),
            (0.3, &[(2, Z)]),
        ],
    );
    let g = graph(&h, &[(0., 0.), (1., 0.), (1., 1.), (0., 1.)]);
    let emb = snap_and_route(&g, &RouteConfig::default()).unwrap();
    assert!(emb.edges.iter().all(|e| e.len() == 2));
    let out = match_path_lengths(&h, &emb, 1e5, 1e2).unwrap();
    assert_eq!(out.hamiltonian.num_qubits(), 8);
    assert!(lattice_violations(&out.hamiltonian, &out.positions).is_empty());
    let drift = (ground(&out.hamiltonian) - ground(&h)).abs();
    let eps = out.plan.epsilon_budget().unwrap();
    assert!(drift < 1e-2 && drift <= eps, "drift {drift}, ε {eps}");
}

#[test]
fn three_local_input_is_refused() {
    let h = sum(3, &[(1.0, &[(0, Z), (1, Z), (2, Z)])]);
    let emb = LatticeEmbedding { spacing: 1.0, refinements: 0, vertices: vec![[0, 0], [1, 0], [2, 0]], edges: vec![], warnings: vec![] };
    assert!(matches!(match_path_lengths(&h, &emb, 1e3, 1e2), Err(Error::PlanInfeasible(_))));
}
