use hdg_stokes::mesh::{Domain, Triangulation};
use proptest::prelude::*;

fn euler_holds(mesh: &Triangulation) -> bool {
    mesh.n_vertices() + mesh.n_triangles() == mesh.n_edges() + 1
}

fn normals_reproducible(mesh: &Triangulation) -> bool {
    (0..mesh.n_edges()).all(|e| {
        let [a, b] = mesh.edges()[e];
        assert!(a < b);
        let (p, q) = (mesh.vertices()[a], mesh.vertices()[b]);
        let len = (q[0] - p[0]).hypot(q[1] - p[1]);
        let t = [(q[0] - p[0]) / len, (q[1] - p[1]) / len];
        mesh.edge_normal(e) == [-t[1], t[0]]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_meshes_are_valid(n in 1usize..20, t_shape in any::<bool>()) {
        let (domain, n) = if t_shape { (Domain::TShape, 2 * n.div_ceil(2)) } else { (Domain::UnitSquare, n) };
        let mesh = Triangulation::generate(domain, n).unwrap();
        mesh.check_invariants().unwrap();
        prop_assert!(euler_holds(&mesh));
        prop_assert!(normals_reproducible(&mesh));
        prop_assert!((0..mesh.n_triangles()).all(|t| mesh.area(t) > 0.0));
        let expected_area = if t_shape { 2.0 } else { 1.0 };
        prop_assert!((mesh.total_area() - expected_area).abs() <= 1e-12 * expected_area);
    }

    #[test]
    fn refinement_preserves_domain(n in 1usize..8, t_shape in any::<bool>()) {
        let (domain, n) = if t_shape { (Domain::TShape, 2 * n.div_ceil(2)) } else { (Domain::UnitSquare, n) };
        let coarse = Triangulation::generate(domain, n).unwrap();
        let fine = coarse.refine_uniform();
        fine.check_invariants().unwrap();
        prop_assert_eq!(fine.n_triangles(), 4 * coarse.n_triangles());
        prop_assert!(euler_holds(&fine));
        prop_assert!(((fine.total_area() - coarse.total_area()) / coarse.total_area()).abs() <= 1e-12);
        prop_assert!((fine.h() - coarse.h() / 2.0).abs() <= 1e-12);
    }

    #[test]
    fn dual_graph_is_symmetric_and_matches_interior_edges(n in 1usize..10) {
        let mesh = Triangulation::generate(Domain::UnitSquare, n).unwrap();
        let g = mesh.dual_graph();
        let mut links = 0;
        for (t, nbrs) in g.iter().enumerate() {
            prop_assert!(nbrs.len() <= 3);
            for &s in nbrs {
                prop_assert!(g[s].contains(&t));
                links += 1;
            }
        }
        let interior = mesh.n_edges() - mesh.n_boundary_edges();
        prop_assert_eq!(links, 2 * interior);
    }

    #[test]
    fn text_format_round_trips(n in 1usize..6) {
        let mesh = Triangulation::generate(Domain::TShape, 2 * n).unwrap();
        let back = Triangulation::from_text(&mesh.to_text()).unwrap();
        prop_assert_eq!(back.triangles(), mesh.triangles());
        prop_assert_eq!(back.edges(), mesh.edges());
    }
}
