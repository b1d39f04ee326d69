macro_rules! example {
    ($module:ident, $test:ident, $file:literal) => {
        #[path = $file]
        mod $module;

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(meanfield_bifurcation, meanfield_bifurcation_runs, "../examples/meanfield_bifurcation.rs");
example!(quasi_normal_spectrum, quasi_normal_spectrum_runs, "../examples/quasi_normal_spectrum.rs");
example!(steady_state_fluctuations, steady_state_fluctuations_runs, "../examples/steady_state_fluctuations.rs");
example!(ground_state_bogoliubov, ground_state_bogoliubov_runs, "../examples/ground_state_bogoliubov.rs");
example!(critical_exponents, critical_exponents_runs, "../examples/critical_exponents.rs");
example!(entanglement, entanglement_runs, "../examples/entanglement.rs");
example!(oracle_checks, oracle_checks_runs, "../examples/oracle_checks.rs");
