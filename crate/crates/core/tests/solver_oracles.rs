mod common;

use common::oracles;
use lslab::solvers::SolverConfig;

#[test]
fn objectives_match_brute_force_oracles() {
    let cfg = SolverConfig::default();
    let mut report = Vec::new();
    let mut worst: f64 = 0.0;
    let mut latent_active = 0;
    for seed in 0..5 {
        for o in oracles::all(seed, &cfg) {
            report.push(format!(
                "{:<18} seed {} reported {:.10} recomputed {:.10} oracle {:.10} gap {:.2e} {}",
                o.solver,
                o.seed,
                o.reported,
                o.recomputed,
                o.oracle,
                o.gap(),
                o.result.status
            ));
            worst = worst.max(o.gap());
            if o.solver == "lvglasso" && o.result.var("L").frobenius_norm() > 1e-6 {
                latent_active += 1;
            }
        }
    }
    println!("{}", report.join("\n"));
    assert!(worst <= 1e-4, "{}", report.join("\n"));
    // at least some latent instances must exercise the low-rank component
    assert!(latent_active >= 2, "only {latent_active} lvglasso instances with L != 0");
}
