use std::env;
use std::path::PathBuf;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let crate_dir = env::var("CARGO_MANIFEST_DIR").unwrap();
    let out = PathBuf::from(env::var("OUT_DIR").unwrap()).join("depinning.h");
    cbindgen::generate(&crate_dir)
        .expect("header generation failed")
        .write_to_file(&out);
    // Lets the sync test compare the committed header against this build.
    println!("cargo:rustc-env=DEPINNING_GENERATED_HEADER={}", out.display());
}
