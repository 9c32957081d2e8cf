//! Regenerate the bundled model-piece complexes in `examples/`.
//!
//! Run from the workspace root:
//! `cargo run -p laminar-core --example write_model_pieces [out_dir]`

use laminar_core::complex::{
    channel_piece_a, channel_piece_b, half_channel_piece, ht_piece, trivial_cap, Mark, OnSurface,
    TangleComplex,
};

fn write(dir: &std::path::Path, name: &str, tc: &TangleComplex) {
    let path = dir.join(name);
    let json = serde_json::to_string_pretty(tc).expect("serializable complex");
    std::fs::write(&path, json + "\n").unwrap_or_else(|e| panic!("write {path:?}: {e}"));
    println!("wrote {}", path.display());
}

fn main() {
    let dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "examples".into());
    let dir = std::path::PathBuf::from(dir);
    std::fs::create_dir_all(&dir).expect("create output directory");

    write(&dir, "ht_piece.json", &ht_piece());
    write(&dir, "channelA.json", &channel_piece_a());
    write(&dir, "channelB.json", &channel_piece_b());
    write(&dir, "half_channel.json", &half_channel_piece());
    write(&dir, "trivial_cap.json", &trivial_cap());

    // Negative control: a diamond on a tube-side arc, which no valid
    // crossing configuration allows. The checker must reject it.
    let mut bad = channel_piece_a();
    let arc = bad
        .disks
        .iter_mut()
        .flat_map(|d| d.boundary.iter_mut())
        .find(|a| a.on == OnSurface::Q && !a.marks.is_empty())
        .expect("model piece has a marked tube-side arc");
    arc.marks[0] = Mark::Diamond;
    write(&dir, "q_diamond_invalid.json", &bad);
}
