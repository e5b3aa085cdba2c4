use lll_mra::landau::{haar3_closed_form, StripRule};
use lll_mra::lattice::LatticeShape;

fn main() {
    // timing
    let t0 = std::time::Instant::now();
    let mut acc = 0.0;
    for i in 0..200_000 {
        let x = (i % 631) as f64 * 0.01 - 3.0;
        let y = (i % 977) as f64 * 0.01 - 4.0;
        acc += haar3_closed_form([x, y]).norm_sqr();
    }
    println!("200k evals: {:?} (acc {acc:.3})", t0.elapsed());

    // norm over strips of increasing length (expect -> 1 like 1 - 0.818/L)
    for half_len in [60.0, 140.0, 400.0] {
        let t0 = std::time::Instant::now();
        let rule = StripRule::for_shape(LatticeShape::Triangular, half_len, 7.0);
        let n = rule.l2_norm([0.0, 0.0], &|r| haar3_closed_form(r));
        println!("L={half_len}: norm = {:.8} ({:?})", n, t0.elapsed());
    }
}
