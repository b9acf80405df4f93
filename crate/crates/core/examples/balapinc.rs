//! Directional similarity between two hand-made feature vectors.

use sense_entail::entail::{apinc, balapinc, lin_similarity};
use sense_entail::vsm::{rank_features, SparseVector};

fn main() -> sense_entail::Result<()> {
    let dog: SparseVector = [("bark", 3.0), ("tail", 2.0), ("fur", 1.5), ("leash", 1.0)]
        .into_iter()
        .collect();
    let animal: SparseVector = [
        ("tail", 2.5),
        ("fur", 2.0),
        ("eat", 2.0),
        ("bark", 0.5),
        ("wild", 1.0),
        ("zoo", 0.8),
    ]
    .into_iter()
    .collect();

    let (fd, fa) = (rank_features(&dog, 1000)?, rank_features(&animal, 1000)?);
    println!("lin(dog, animal)      = {:.4}", lin_similarity(&dog, &animal));
    println!("apinc(dog, animal)    = {:.4}", apinc(&fd, &fa));
    println!("apinc(animal, dog)    = {:.4}", apinc(&fa, &fd));
    println!("balapinc(dog, animal) = {:.4}", balapinc(&dog, &animal, 1000)?);
    println!("balapinc(animal, dog) = {:.4}", balapinc(&animal, &dog, 1000)?);
    Ok(())
}
