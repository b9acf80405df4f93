//! Wu-Palmer over a small taxonomy and the best-match bag similarity built on it.

use sense_entail::lexsim::llm_similarity;
use sense_entail::synth::toy_taxonomy;

fn main() {
    let t = toy_taxonomy();
    for (a, b) in [
        ("dog", "cat"),
        ("dog", "car"),
        ("bank", "shore"),
        ("bank", "bus"),
        ("dog", "unicorn"),
    ] {
        let s = t.wu_palmer(a, b);
        println!(
            "wup({a}, {b}) = {:.4}  out of vocabulary: {}",
            s.value, s.out_of_vocabulary
        );
    }
    let cached = t.cached();
    let ctx1 = ["dog", "cat", "tree"];
    let ctx2 = ["bird", "plant"];
    println!(
        "llm = {:.4}",
        llm_similarity(&ctx1, &ctx2, |a, b| cached.similarity(a, b))
    );
}
