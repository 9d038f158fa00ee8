//! Build icospheres of increasing subdivision and round-trip one through OBJ.

use meshpush::mesh::{build_adjacency, load_obj, make_icosphere, save_obj};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for level in 0..=4 {
        let m = make_icosphere(level)?;
        let adj = build_adjacency(&m);
        println!(
            "subdiv {level}: {:>5} vertices {:>5} faces, euler {}, closed manifold {}",
            m.num_vertices(),
            m.num_faces(),
            m.euler_characteristic(),
            adj.is_closed_manifold()
        );
    }

    let m = make_icosphere(1)?;
    let mut buf = Vec::new();
    save_obj(&m, &mut buf)?;
    let back = load_obj(buf.as_slice())?.mesh;
    println!("OBJ round trip is exact: {}", back == m);
    Ok(())
}
