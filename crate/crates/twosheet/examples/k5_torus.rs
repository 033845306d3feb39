//! A torus embedding of K5 whose faces cover every edge twice but include a
//! closed walk that is not a cycle.

use twosheet::embedding::{
    face_trace, faces_as_cdc, find_rotation_with_faces, k5_torus_faces, k5_torus_fixture, repeated_edges,
};

fn main() {
    let rs = k5_torus_fixture();
    let fs = face_trace(&rs).unwrap();
    println!("genus {}, chi {}", fs.genus, fs.chi);
    for f in &fs.faces {
        let rep = repeated_edges(f);
        if rep.is_empty() {
            println!("  {f:?}");
        } else {
            println!("  {f:?}  repeats {rep:?}");
        }
    }
    let r = faces_as_cdc(rs.host(), &fs);
    println!(
        "coverage {:?}, non-cycle faces {:?}, cover: {}",
        r.histogram, r.malformed, r.ok
    );

    let found = find_rotation_with_faces(rs.host(), &k5_torus_faces());
    println!("rotation search reproduces the face set: {}", found.is_some());
}
