//! Every example runs to completion with its default settings.

mod wavelet_basics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/wavelet_basics.rs"));
}

#[test]
fn wavelet_basics_example_runs() {
    wavelet_basics::run_example().expect("wavelet_basics example should run");
}

mod prior_transform {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/prior_transform.rs"));
}

#[test]
fn prior_transform_example_runs() {
    prior_transform::run_example().expect("prior_transform example should run");
}

mod prior_samples {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/prior_samples.rs"));
}

#[test]
fn prior_samples_example_runs() {
    prior_samples::run_example().expect("prior_samples example should run");
}

mod forward_models {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/forward_models.rs"));
}

#[test]
fn forward_models_example_runs() {
    forward_models::run_example().expect("forward_models example should run");
}

mod inpainting_rto {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/inpainting_rto.rs"));
}

#[test]
fn inpainting_rto_example_runs() {
    inpainting_rto::run_example().expect("inpainting_rto example should run");
}

mod deconvolution_run {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/deconvolution_run.rs"));
}

#[test]
fn deconvolution_run_example_runs() {
    deconvolution_run::run_example().expect("deconvolution_run example should run");
}

mod ct_run {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/ct_run.rs"));
}

#[test]
fn ct_run_example_runs() {
    ct_run::run_example().expect("ct_run example should run");
}

mod discretization_sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/discretization_sweep.rs"));
}

#[test]
fn discretization_sweep_example_runs() {
    discretization_sweep::run_example().expect("discretization_sweep example should run");
}

mod chain_diagnostics {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/chain_diagnostics.rs"));
}

#[test]
fn chain_diagnostics_example_runs() {
    chain_diagnostics::run_example().expect("chain_diagnostics example should run");
}
