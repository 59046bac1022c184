macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        #[path = $file]
        mod $name;

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(graph_zoo, "../examples/graph_zoo.rs");
example!(independent_sets, "../examples/independent_sets.rs");
example!(sdp_solver, "../examples/sdp_solver.rs");
example!(lasserre_hierarchy, "../examples/lasserre_hierarchy.rs");
example!(theta_bounds, "../examples/theta_bounds.rs");
example!(three_point, "../examples/three_point.rs");
example!(measure_recovery, "../examples/measure_recovery.rs");
example!(kissing_numbers, "../examples/kissing_numbers.rs");
example!(command_line, "../examples/command_line.rs");
