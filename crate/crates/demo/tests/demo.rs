use topocore_demo::Demo;

#[test]
fn wrapper_round_trip() {
    let mut d = Demo::new(6, 8, 2, true);
    let n = d.node_count();
    assert_eq!(d.coords().len(), 2 * n);
    assert_eq!(d.layers().len(), n);
    assert!(d.arcs().iter().all(|&v| (v as usize) < n));

    let c = d.coords();
    let far = d.nearest(c[2 * (n - 1)], c[2 * (n - 1) + 1]);
    assert_eq!(far, n as i32 - 1);
    let path = d.route(0, far as u32, 1, 1);
    assert_eq!(path.first(), Some(&0));
    assert_eq!(path.last(), Some(&(far as u32)));
    assert!(d.last_distance() > 0.0);
    assert!(d.last_bilevel_pops() < d.last_uni_pops());

    assert!(d.route(0, n as u32 + 5, 1, 1).is_empty());
    assert_eq!(d.last_distance(), -1.0);
}
