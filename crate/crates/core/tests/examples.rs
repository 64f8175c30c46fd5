macro_rules! example {
    ($name:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $name() {
            $name::run().expect(concat!($file, " should run"));
        }
    };
}

example!(worked_example, "worked_example.rs");
example!(evaluate_pair, "evaluate_pair.rs");
example!(threshold_sweep, "threshold_sweep.rs");
example!(rank_bias, "rank_bias.rs");
example!(nifti_io, "nifti_io.rs");
example!(synthetic_cohort, "synthetic_cohort.rs");
example!(cohort_report, "cohort_report.rs");
