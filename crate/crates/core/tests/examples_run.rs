//! The quick examples run to completion.

#[path = "../examples/expansion.rs"]
mod expansion;
#[path = "../examples/locus.rs"]
mod locus;
#[path = "../examples/spectrum.rs"]
mod spectrum;
#[path = "../examples/stability.rs"]
mod stability;

#[test]
fn spectrum_example() {
    spectrum::main();
}

#[test]
fn expansion_example() {
    expansion::main();
}

#[test]
fn stability_example() {
    stability::main();
}

#[test]
fn locus_example() {
    locus::main();
}
