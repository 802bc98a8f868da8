use geppg::env::CmcEnv;
use geppg::gep::{cmc_outcome, run_gep, GepConfig, GepPolicy, GepPolicyKind, GepRunOptions, OutcomeSpace};
use geppg::rng;
use rayon::prelude::*;

fn main() {
    let env = CmcEnv;
    let space = OutcomeSpace::cmc();
    let policy = GepPolicy::new(GepPolicyKind::Linear, &env).unwrap();
    let opts = GepRunOptions { stop_at_first_goal: true, harvest_transitions: false };
    let rows: Vec<(bool, bool, Option<usize>)> = (0..400u64)
        .into_par_iter()
        .map(|t| {
            // Same stream for both runs: bootstrap-only result is a prefix.
            let config_long = GepConfig { goal_episodes: 145, ..Default::default() };
            let mut r = rng::stream(7000 + t, &[rng::tag::GEP]);
            let long = run_gep(&env, &policy, &config_long, &space, cmc_outcome, &mut r, &opts).unwrap();
            let boot_success = long
                .log
                .iter()
                .take(5)
                .any(|row| row.goal_reached);
            (boot_success, long.first_goal_step.is_some(), long.log.last().map(|l| l.episode))
        })
        .collect();
    let boot = rows.iter().filter(|r| r.0).count();
    let total = rows.iter().filter(|r| r.1).count();
    let missers = rows.len() - boot;
    let rescued = total - boot;
    println!("bootstrap success: {boot}/400  final: {total}/400  rescued: {rescued}/{missers}");
    let late: Vec<_> = rows.iter().filter(|r| r.1 && !r.0).filter_map(|r| r.2).collect();
    println!("rescue episodes: {late:?}");
}
