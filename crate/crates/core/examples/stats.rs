use linspp_core::*;

fn main() {
    let mut spots = 0;
    let mut no_verdicts = 0;
    let mut arc_counts = Vec::new();
    for seed in 0..500u64 {
        let mode = match seed % 3 {
            0 => Mode::Arbitrary,
            1 => Mode::Linearizable,
            _ => Mode::NonLinearizable,
        };
        let d = 2 + (seed % 2) as u32;
        let mut spec = GeneratorSpec::new(Family::RandomDag, d, seed, mode);
        spec.m = Some(4 + (seed % 7) as u32);
        let gen = match generate(&spec) {
            Ok(g) => g,
            Err(_) => {
                let mut s2 = spec.clone();
                s2.mode = Mode::Arbitrary;
                generate(&s2).unwrap()
            }
        };
        arc_counts.push(gen.dag.arc_count());
        // does the graph admit a nondegenerate system?
        let has_spot = gen.dag.vertices().any(|v| {
            v != gen.dag.source()
                && v != gen.dag.sink()
                && gen.dag.first_paths(gen.dag.source(), v, 2).len() == 2
                && gen.dag.first_paths(v, gen.dag.sink(), 2).len() == 2
        });
        if has_spot { spots += 1; }
        let ns = choose_nonbasic_system(&gen.dag);
        if !linearize(&gen.dag, &gen.q, &ns).unwrap().is_linearizable() {
            no_verdicts += 1;
        }
    }
    let avg_m: f64 = arc_counts.iter().map(|&m| m as f64).sum::<f64>() / 500.0;
    println!("plant spots: {spots}/500, NO verdicts: {no_verdicts}/500, avg m: {avg_m:.1}");
}
