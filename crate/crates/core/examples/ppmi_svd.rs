//! Count matrix -> PPMI -> truncated SVD, then fold a new row into the latent space.

use std::collections::BTreeMap;

use sense_entail::vsm::{build_count_matrix, ppmi_transform, truncated_svd, SparseVector};

fn row(pairs: &[(&str, f64)]) -> SparseVector {
    pairs.iter().copied().collect()
}

fn main() -> sense_entail::Result<()> {
    let mut protos = BTreeMap::new();
    protos.insert(
        "cat#0".to_owned(),
        row(&[("L:the", 4.0), ("R:purr", 3.0), ("R:meow", 2.0)]),
    );
    protos.insert(
        "dog#0".to_owned(),
        row(&[("L:the", 5.0), ("R:bark", 4.0), ("R:wag", 1.0)]),
    );
    protos.insert(
        "car#0".to_owned(),
        row(&[("L:the", 3.0), ("R:drive", 4.0), ("L:fast", 2.0)]),
    );

    for tagged in [false, true] {
        let counts = build_count_matrix(&protos, tagged)?;
        let ppmi = ppmi_transform(&counts)?;
        println!("side_tagged={tagged}: {} columns", counts.columns.len());
        for (label, v) in ppmi.iter() {
            let cells: Vec<String> = v.iter().map(|(f, w)| format!("{f}={w:.3}")).collect();
            println!("  {label}: {}", cells.join(" "));
        }
    }

    let ppmi = ppmi_transform(&build_count_matrix(&protos, false)?)?;
    let latent = truncated_svd(&ppmi, 2, 0)?;
    println!("singular values: {:?}", latent.singular_values);
    for (l, v) in latent.labels.iter().zip(&latent.vectors) {
        println!("  {l}: {v:.3?}");
    }
    let kitten = row(&[("purr", 1.0), ("meow", 1.0)]);
    println!("folded-in kitten: {:.3?}", latent.project(&kitten)?);
    Ok(())
}
