//! The finite approximations of the value domain: enumeration, order,
//! least upper bounds, application and the embedding-projection pairs.

use lazylab::denotational::show_table;
use lazylab::domain::{embed, enumerate, fn_make, fn_project_apply, lattice_height, leq, lub, project, DomElem};

fn main() {
    for rank in 0..=3 {
        println!("rank {rank}: {} elements, height {}", enumerate(rank).unwrap().len(), lattice_height(rank));
    }

    let id = fn_make(3, |a| a).unwrap();
    let top = fn_make(3, |_| fn_make(2, |a| a).unwrap()).unwrap();
    println!("id       {}", show_table(id));
    println!("const    {}", show_table(top));
    println!("id ⊔ c   {}", show_table(lub(id, top)));
    println!("id ⊑ c   {}", leq(id, top));
    println!("c Bot    {:?}", fn_project_apply(top, DomElem::bot(2)));

    // Embedding then projecting is the identity; the other way round loses
    // precision.
    let wide = embed(id).unwrap();
    println!("p(e(id)) = id: {}", project(wide).unwrap() == id);
    println!("e(p(id)) = {}", show_table(embed(project(id).unwrap()).unwrap()));
}
