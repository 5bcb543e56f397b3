use cbindgen::Config;

fn main() {
    let crate_dir = std::env::var("CARGO_MANIFEST_DIR").unwrap();
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    cbindgen::Builder::new()
        .with_crate(&crate_dir)
        .with_config(Config::from_file("cbindgen.toml").unwrap_or_default())
        .generate()
        .expect("Unable to generate bindings")
        .write_to_file(std::path::Path::new(&crate_dir).join("include/knotvol.h"));
}
