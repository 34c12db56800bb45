//! Regenerate the bundled demo assemblies under ./demo.
//!
//! Usage: cargo run --example generate_demo [target_dir]

use digplan::fixtures;
use digplan::manifest::save_assembly_as_manifest;

fn main() {
    let target = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "demo".to_string());
    let sets = [
        ("module_box", fixtures::module_box_analog()),
        ("lock_pair", fixtures::lock_pair_fixture()),
        ("nested_covers", fixtures::nested_covers_chain(8)),
        ("notch", fixtures::notch_fixture()),
    ];
    for (name, asm) in sets {
        let dir = std::path::Path::new(&target).join(name);
        let path = save_assembly_as_manifest(&asm, 0.0, &dir)
            .unwrap_or_else(|e| panic!("writing {name}: {e}"));
        println!("wrote {}", path.display());
    }
}
