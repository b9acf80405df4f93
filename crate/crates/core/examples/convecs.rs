//! Train a small ConVecs model on asymmetric toy pairs, score both directions, round-trip it.

use sense_entail::convecs::{read_model, score_pair, train_convecs, write_model, PairExample};

fn main() -> sense_entail::Result<()> {
    // u entails v when u's mass sits on the first axis and v's on the second
    let mut examples = Vec::new();
    for i in 0..20 {
        let t = i as f64 / 20.0;
        examples.push(PairExample {
            u: vec![1.0, t],
            v: vec![t, 1.0],
            label: true,
        });
        examples.push(PairExample {
            u: vec![t, 1.0],
            v: vec![1.0, t],
            label: false,
        });
    }
    let model = train_convecs(&examples, 2, 1.0, 7)?;
    let (a, b) = (vec![1.0, 0.2], vec![0.2, 1.0]);
    println!("P(a entails b) = {:.4}", score_pair(&model, &a, &b)?);
    println!("P(b entails a) = {:.4}", score_pair(&model, &b, &a)?);

    let mut buf = Vec::new();
    write_model(&mut buf, &model)?;
    println!(
        "model file: {} bytes, {} support vectors",
        buf.len(),
        model.machine.coef.len()
    );
    let back = read_model(buf.as_slice(), std::path::Path::new("<memory>"))?;
    assert_eq!(back, model);
    Ok(())
}
