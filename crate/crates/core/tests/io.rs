mod common;

use std::fs::File;

use common::*;
use topocore::cost::INF_THRESHOLD;
use topocore::graph::random_order;
use topocore::io::{
    load_prep, parse_dimacs, read_costs, read_prep, save_prep, synthesize_costs, write_costs_binary,
    write_costs_text, write_dimacs, write_dimacs_coords, write_prep, CostMode, CostTable, IoError,
    Workload, PREP_MAGIC,
};
use topocore::synth::{road_grid, RoadGridConfig};
use topocore::{prepare, CombineSpec, NodeOrder, Variant};

#[test]
fn dimacs_round_trip_with_coordinates() {
    let g = road_grid(&RoadGridConfig::new(4, 5), 3).graph;
    let mut gr = Vec::new();
    let mut co = Vec::new();
    write_dimacs(&g, 0, &mut gr).unwrap();
    write_dimacs_coords(&g, &mut co).unwrap();
    let back = parse_dimacs(gr.as_slice(), Some(co.as_slice())).unwrap();
    assert_eq!(back.first_out(), g.first_out());
    assert_eq!(back.heads(), g.heads());
    assert_eq!(back.costs_flat(), g.costs_flat());
    for (a, b) in back.coords().unwrap().iter().zip(g.coords().unwrap()) {
        assert!((a.lat - b.lat).abs() <= 5e-7 && (a.lon - b.lon).abs() <= 5e-7);
    }
    // comments and blank lines do not matter
    let text = String::from_utf8(gr).unwrap().replace('\n', "\n\nc note\n");
    let again = parse_dimacs(text.as_bytes(), None::<&[u8]>).unwrap();
    assert_eq!(again.heads(), g.heads());
}

#[test]
fn prep_round_trip_is_bit_exact() {
    let spec = mixed_spec();
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..20 {
        let g = random_graph(seed, 150, &spec);
        let variant = if seed % 2 == 0 { Variant::TopoCore } else { Variant::TopoCoreIs };
        let mut prep = prepare(&g, NodeOrder::Dfs, seed, variant).prep;
        if seed % 3 == 0 {
            prep.set_source_ids((0..g.node_count() as u32).map(|v| v * 2).collect()).unwrap();
        }
        let path = dir.path().join(format!("p{seed}.topo"));
        save_prep(&prep, &path).unwrap();
        let back = load_prep(&path).unwrap();
        assert_eq!(back, prep);
        let mut bytes = Vec::new();
        write_prep(&back, &mut bytes).unwrap();
        assert_eq!(bytes, std::fs::read(&path).unwrap());
    }
    // coordinates travel with the container
    let g = road_grid(&RoadGridConfig::new(3, 3), 1).graph;
    let prep = prepare(&g, NodeOrder::Input, 0, Variant::TopoCoreIs).prep;
    let mut bytes = Vec::new();
    write_prep(&prep, &mut bytes).unwrap();
    assert_eq!(read_prep(&bytes).unwrap(), prep);
}

#[test]
fn prep_corruption_is_rejected() {
    let g = random_graph(4, 80, &mixed_spec());
    let prep = prepare(&g, NodeOrder::Input, 0, Variant::TopoCoreIs).prep;
    let mut bytes = Vec::new();
    write_prep(&prep, &mut bytes).unwrap();

    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(read_prep(&bad), Err(IoError::Format(m)) if m.contains("magic")));

    let mut bad = bytes.clone();
    bad[PREP_MAGIC.len()] = 9;
    assert!(matches!(read_prep(&bad), Err(IoError::Format(m)) if m.contains("version")));

    for cut in [3, 20, bytes.len() / 2, bytes.len() - 1] {
        assert!(read_prep(&bytes[..cut]).is_err(), "cut at {cut}");
    }
    let mut longer = bytes.clone();
    longer.push(0);
    assert!(read_prep(&longer).is_err());
}

#[test]
fn cost_files_round_trip() {
    let g = road_grid(&RoadGridConfig::new(5, 5), 2).graph;
    let dir = tempfile::tempdir().unwrap();
    for mode in [CostMode::Basic, CostMode::Generalized] {
        let table = synthesize_costs(&g, mode, 11).unwrap();
        assert_eq!(table, synthesize_costs(&g, mode, 11).unwrap());
        let t = dir.path().join("c.txt");
        let b = dir.path().join("c.bin");
        write_costs_text(&table, File::create(&t).unwrap()).unwrap();
        write_costs_binary(&table, File::create(&b).unwrap()).unwrap();
        assert_eq!(read_costs(&t).unwrap(), table);
        assert_eq!(read_costs(&b).unwrap(), table);
        let attached = table.clone().attach(g.clone()).unwrap();
        assert_eq!(CostTable::of_graph(&attached), table);
    }
}

#[test]
fn threshold_dice_rate() {
    let g = road_grid(&RoadGridConfig::new(220, 220), 5).graph;
    let table = synthesize_costs(&g, CostMode::Generalized, 5).unwrap();
    let m = table.len();
    assert!(m >= 1_000_000, "{m} arcs");
    let p = 1.0 / 1000.0;
    let sigma = (m as f64 * p * (1.0 - p)).sqrt();
    for comp in 4..8 {
        let finite = (0..m).filter(|&a| table.row(a)[comp] != INF_THRESHOLD).count();
        assert!((finite as f64 - m as f64 * p).abs() <= 5.0 * sigma, "component {comp}: {finite}");
        assert!((0..m).all(|a| table.row(a)[comp] == INF_THRESHOLD || table.row(a)[comp] <= 100));
    }
}

#[test]
fn workload_follows_permutation() {
    let spec = CombineSpec::generalized();
    let w = Workload::generate(500, 100, &spec, 21);
    let perm = random_order(500, 3);
    let moved = w.relabel(&perm);
    for (a, b) in w.queries.iter().zip(&moved.queries) {
        assert_eq!((perm.new_id(a.source), perm.new_id(a.target)), (b.source, b.target));
    }
    assert!(Workload::generate(500, 0, &spec, 21).is_empty());
}
