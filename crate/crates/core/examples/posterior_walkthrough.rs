//! Exact Bayesian updating by hand.
//!
//! Two reviewers, both suggested, two positive reports under the cynical
//! model: the configuration "both rivals" becomes impossible and "both
//! friends" twice as likely as each mixed one. Then a longer hand-written
//! history over four reviewers shows how the marginals, the MAP
//! configuration and the entropy evolve.
//!
//! ```bash
//! cargo run --example posterior_walkthrough
//! ```

use revclass::inference::LogPosterior;
use revclass::model::{Configuration, ReviewModel, SuggestedSet};

fn label(x: &Configuration) -> String {
    x.classes()
        .iter()
        .map(|c| if c.is_friend() { 'f' } else { 'r' })
        .collect()
}

pub fn run_example() -> revclass::Result<()> {
    let model = ReviewModel::Cynical;

    let mut post = LogPosterior::uniform(2)?;
    post.update(2, &SuggestedSet::new(vec![0, 1], 2)?, &model)?;
    println!("two reviewers, S = {{1, 2}}, a = 2");
    for (bits, p) in post.probs().iter().enumerate() {
        let x = Configuration::from_bits(bits as u32, 2)?;
        println!("  x{} = {}: {p:.4}", x.index(), label(&x));
    }
    println!("  rho_1 = {:.4}, entropy = {:.4} bits\n", post.marginal_friend_probability(0)?, post.entropy_bits());

    // Reviewers 1 and 2 are friends, 3 and 4 rivals; (suggested, a) pairs
    // with 1-based reviewer ids as an author would record them.
    let history: [(&[usize], usize); 8] = [
        (&[1, 3], 1),
        (&[2, 4], 2),
        (&[3, 4], 0),
        (&[1, 2], 2),
        (&[1, 4], 1),
        (&[2, 3], 2),
        (&[3, 4], 1),
        (&[1, 3], 2),
    ];
    let truth = Configuration::first_friends(4, 2)?;
    let mut post = LogPosterior::uniform(4)?;
    println!(" mu  S       a  rho                              MAP   errors  H (bits)");
    for (mu, (s, a)) in history.iter().enumerate() {
        let s = SuggestedSet::new(s.iter().map(|r| r - 1).collect(), 4)?;
        post.update(*a, &s, &model)?;
        let rho: Vec<String> = post.marginals().iter().map(|r| format!("{r:.3}")).collect();
        let map = post.map_configuration();
        println!(
            "{:>3}  {:<6}  {a}  [{}]  {}  {:>5}  {:>8.4}",
            mu + 1,
            format!("{:?}", s.members().iter().map(|r| r + 1).collect::<Vec<_>>()),
            rho.join(", "),
            label(&map),
            post.map_error_count(&truth)?,
            post.entropy_bits()
        );
    }
    println!("third-largest marginal T = {:.4}", post.kth_largest_marginal(3)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> revclass::Result<()> {
    run_example()
}
