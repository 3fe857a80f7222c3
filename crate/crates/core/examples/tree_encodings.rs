//! Trees and matchings: the Diaconis–Holmes bijection, the Richman-style
//! embedding, and two witnesses that the bijection does not preserve
//! neighbourhoods.

use matchkern::phylo::{
    counterexample_prop6, counterexample_prop7, dh_decode, dh_encode, nni_neighbors, richman_embed,
    tree_fraction, PhyloTree,
};

fn main() -> matchkern::Result<()> {
    let t: PhyloTree = "(((1,5),4),(3,2));".parse()?;
    let x = dh_encode(&t)?;
    println!("{t}  ->  {x}  ->  {}", dh_decode(&x)?);
    println!("embedded: {}", richman_embed(&t)?);

    // Every NNI neighbour embeds to a matching at most two transpositions away.
    for u in nni_neighbors(&t) {
        println!(
            "  nni {u:<22} dh {}  embed {}",
            dh_encode(&u)?,
            richman_embed(&u)?
        );
    }

    let w = counterexample_prop6(8)?;
    println!(
        "adjacent trees {} and {} encode {} quotient steps apart",
        w.left,
        w.right,
        w.distance.value()
    );
    let w = counterexample_prop7(10)?;
    println!(
        "matchings one transposition apart decode to heights {} and {}",
        w.height1, w.height2
    );
    println!("trees cover {} of matchings with n = 10", tree_fraction(10));
    Ok(())
}
