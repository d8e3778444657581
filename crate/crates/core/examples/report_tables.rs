//! The report-count laws behind the classifier.
//!
//! Prints `P(a | r1)` for the cynical model, the quality model at a few fixed
//! quality factors and integrated over `q ~ Beta(12, 12)`, and the Beta
//! parameters of the mean/variance grid used by the quality sweeps.
//!
//! ```bash
//! cargo run --example report_tables
//! ```

use revclass::model::{
    beta_moment, beta_params_from_mean_variance, cynical_report_pmf, marginal_report_pmf, quality_report_pmf_given_q,
    QualityDistribution, ReviewerClass,
};

pub fn run_example() -> revclass::Result<()> {
    let classes = [ReviewerClass::Friend, ReviewerClass::Rival];

    println!("cynical model: P(a | r1), a = 0, 1, 2");
    for class in classes {
        println!("  {class:?}: {:?}", cynical_report_pmf(class).probs());
    }

    println!("\nquality model at fixed q");
    for q in [0.25, 0.5, 0.75] {
        for class in classes {
            let p = quality_report_pmf_given_q(class, q)?.probs();
            println!("  q = {q:<4} {class:?}: [{:.4}, {:.4}, {:.4}]", p[0], p[1], p[2]);
        }
    }

    let d = QualityDistribution::beta(12.0, 12.0)?;
    println!(
        "\nq ~ Beta(12, 12): E[q] = {}, E[q^2] = {}, E[q^3] = {}",
        beta_moment(&d, 1),
        beta_moment(&d, 2),
        beta_moment(&d, 3)
    );
    for class in classes {
        let p = marginal_report_pmf(class, &d).probs();
        println!("  {class:?}: [{:.2}, {:.2}, {:.2}]", p[0], p[1], p[2]);
    }

    println!("\n(mean, variance) -> (alpha, beta)");
    for mean in [0.25, 0.5, 0.75] {
        for variance in [0.05, 0.01, 0.005] {
            let (a, b) = beta_params_from_mean_variance(mean, variance)?;
            println!("  ({mean:<4}, {variance:<5}) -> ({a:>7.4}, {b:>7.4})");
        }
    }
    // Feasibility requires variance < mean (1 - mean).
    if let Err(e) = beta_params_from_mean_variance(0.5, 0.3) {
        println!("  (0.5, 0.3) -> {e}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> revclass::Result<()> {
    run_example()
}
