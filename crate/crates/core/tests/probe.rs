// temporary numerical probe; removed before release
use linni_core::bvp::{self, ShootingOptions};
use linni_core::problem::RadialProblem;

#[test]
#[ignore]
fn probe_type_b_hunt() {
    let opts = ShootingOptions::default();
    for p in [3.95, 3.98, 3.99] {
        let problem = RadialProblem::new(4, 1.0, p).unwrap();
        println!("=== p = {p}");
        let mut prev: Option<(f64, f64)> = None;
        for k in 0..160 {
            // geometric grid from 5 to 3000
            let a = 5.0 * (3000.0f64 / 5.0).powf(k as f64 / 159.0);
            let s = bvp::shooting_residual(&problem, a, &opts);
            if let Some((ap, sp)) = prev {
                if sp.signum() != s.signum() {
                    println!("  sign change in [{ap:.2}, {a:.2}]  (S: {sp:+.3e} -> {s:+.3e})");
                    if let Ok(sr) = bvp::solve_neumann(&problem, ap, a) {
                        let min_u = sr
                            .profile
                            .values()
                            .fold(f64::INFINITY, f64::min);
                        println!(
                            "    root a = {:.4}, min u = {:+.4e}, u(R/2) = {:+.4e}, zeros(u-1) = {}",
                            sr.center_value,
                            min_u,
                            sr.profile.value_at(0.5),
                            sr.profile.sign_changes_about(1.0)
                        );
                    }
                }
            }
            prev = Some((a, s));
        }
    }
}

#[test]
#[ignore]
fn probe_stall_neighborhood() {
    let opts = ShootingOptions::default();
    // i=2 upper branch stalls near (p, a) = (16.4458, 4.0328)
    for da in [-0.08f64, -0.04, 0.0, 0.04, 0.08] {
        print!("a = {:.4}: ", 4.0328 + da);
        for dp in [-0.2f64, -0.1, 0.0, 0.1, 0.2] {
            let p = 16.4458 + dp;
            let problem = RadialProblem::new(4, 1.0, p).unwrap();
            let s = bvp::shooting_residual(&problem, 4.0328 + da, &opts);
            print!("S({p:.2}) = {s:+.2e}  ");
        }
        println!();
    }
}
