use std::path::Path;

fn main() {
    println!("cargo:rerun-if-changed=src/lib.rs");
    println!("cargo:rerun-if-changed=cbindgen.toml");
    let crate_dir = env!("CARGO_MANIFEST_DIR");
    let header = Path::new(crate_dir).join("include").join("rclab.h");
    match cbindgen::generate(crate_dir) {
        Ok(bindings) => {
            bindings.write_to_file(header);
        }
        // A stale committed header is better than a broken build; the
        // header test will catch real drift.
        Err(e) => println!("cargo:warning=cbindgen failed, keeping existing header: {e}"),
    }
}
