//! Embeds K3..K8 at maximum genus and reports the face structure.

use twosheet::embedding::{face_trace, faces_as_cdc, genus_bound, inductive_complete_embedding};

fn main() {
    println!(" k  faces  chi  genus  bound  faces form a cover");
    for k in 3..=8 {
        let rs = inductive_complete_embedding(k).unwrap();
        let fs = face_trace(&rs).unwrap();
        let (bound, _) = genus_bound(k).unwrap();
        let cover = faces_as_cdc(rs.host(), &fs).ok;
        println!(
            "{k:>2}  {:>5}  {:>3}  {:>5}  {bound:>5}  {cover}",
            fs.faces.len(),
            fs.chi,
            fs.genus
        );
    }
    match inductive_complete_embedding(9) {
        Ok(_) => println!("K9 embedded"),
        Err(e) => println!("K9: {e}"),
    }
}
