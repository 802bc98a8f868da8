use geppg::env::CmcEnv;
use geppg::gep::{cmc_outcome, run_gep, GepConfig, GepPolicy, GepPolicyKind, GepRunOptions, OutcomeSpace};
use geppg::rng;
use rayon::prelude::*;
use std::time::Instant;

fn study(kind: GepPolicyKind, trials: u64, max_goal_eps: usize) -> (usize, Vec<f64>) {
    let env = CmcEnv;
    let space = OutcomeSpace::cmc();
    let policy = GepPolicy::new(kind, &env).unwrap();
    let config = GepConfig { goal_episodes: max_goal_eps, ..Default::default() };
    let opts = GepRunOptions { stop_at_first_goal: true, harvest_transitions: false };
    let results: Vec<Option<usize>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(9000 + t, &[rng::tag::GEP]);
            run_gep(&env, &policy, &config, &space, cmc_outcome, &mut r, &opts)
                .unwrap()
                .first_goal_step
        })
        .collect();
    let reached: Vec<f64> = results.iter().flatten().map(|&s| s as f64).collect();
    (results.len() - reached.len(), reached)
}

fn main() {
    for (name, kind, trials, cap) in [
        ("linear cap50", GepPolicyKind::Linear, 200u64, 45usize),
        ("linear cap150", GepPolicyKind::Linear, 200, 145),
        ("mlp(64,64) cap50", GepPolicyKind::Mlp { hidden: vec![64, 64] }, 50, 45),
    ] {
        let t0 = Instant::now();
        let (miss, reached) = study(kind, trials, cap);
        let n = reached.len() as f64;
        let mean = reached.iter().sum::<f64>() / n;
        let mut sorted = reached.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!(
            "{name}: reached {}/{trials}  mean={mean:.0}  median={:.0}  max={:.0}  miss={miss}  ({:.1}s)",
            reached.len(), sorted[sorted.len() / 2], sorted.last().unwrap(), t0.elapsed().as_secs_f64()
        );
    }
}
