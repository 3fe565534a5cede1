//! Small hand-built games used across the test suites and as worked
//! examples in the documentation, plus two compiled gadget instances.

use crate::format::parse_qbf;
use crate::gadgets::{gen_qbf, gen_satunsat};
use crate::model::{Game, GameBuilder, Owner, ResourceDelta::Fin, ResourceDelta::Omega};

/// d=1, a single reload loop: every positive load is safe.
pub fn g_loop() -> Game {
    GameBuilder::new(1)
        .state("s", Owner::Box)
        .edge("s", "s", &[Omega])
        .build()
        .unwrap()
}

/// d=1, a pure drain: nothing is safe.
pub fn g_sink() -> Game {
    GameBuilder::new(1)
        .state("s", Owner::Box)
        .edge("s", "s", &[Fin(-1)])
        .build()
        .unwrap()
}

/// d=1, a paid step into a reload loop.
pub fn g_chain() -> Game {
    GameBuilder::new(1)
        .state("s", Owner::Box)
        .state("t", Owner::Box)
        .edge("s", "t", &[Fin(-3)])
        .edge("t", "t", &[Omega])
        .build()
        .unwrap()
}

/// d=1, a reload cycle that costs 5 per round trip.
pub fn g_pump() -> Game {
    GameBuilder::new(1)
        .state("s", Owner::Box)
        .state("t", Owner::Box)
        .state("u", Owner::Box)
        .edge("s", "t", &[Fin(-1)])
        .edge("t", "u", &[Omega])
        .edge("u", "t", &[Fin(-5)])
        .build()
        .unwrap()
}

/// d=1, adversary chooses which of two priced reload loops to enter.
pub fn g_2p() -> Game {
    GameBuilder::new(1)
        .state("q", Owner::Diamond)
        .state("a", Owner::Box)
        .state("b", Owner::Box)
        .edge("q", "a", &[Fin(-1)])
        .edge("q", "b", &[Fin(-2)])
        .edge("a", "a", &[Omega])
        .edge("b", "b", &[Omega])
        .build()
        .unwrap()
}

/// d=2, two incomparable ways to pay for the same step.
pub fn g_fork2() -> Game {
    GameBuilder::new(2)
        .state("s", Owner::Box)
        .state("r", Owner::Box)
        .edge("s", "r", &[Fin(-1), Fin(-2)])
        .edge("s", "r", &[Fin(-2), Fin(-1)])
        .edge("r", "r", &[Fin(0), Fin(0)])
        .build()
        .unwrap()
}

/// d=1, adversary picks the price of the only step.
pub fn g_dia() -> Game {
    GameBuilder::new(1)
        .state("s", Owner::Diamond)
        .state("r", Owner::Box)
        .edge("s", "r", &[Fin(-1)])
        .edge("s", "r", &[Fin(-3)])
        .edge("r", "r", &[Fin(0)])
        .build()
        .unwrap()
}

/// d=2, reloads arrive one dimension at a time along a chain.
pub fn g_order() -> Game {
    GameBuilder::new(2)
        .state("s", Owner::Box)
        .state("a", Owner::Box)
        .state("b", Owner::Box)
        .state("c", Owner::Box)
        .edge("s", "a", &[Fin(-1), Fin(-2)])
        .edge("a", "b", &[Omega, Fin(-1)])
        .edge("b", "c", &[Fin(-1), Omega])
        .edge("c", "c", &[Fin(0), Fin(0)])
        .build()
        .unwrap()
}

/// d=3, the compiled gadget for ∃x1 ∀x2 ∃x3 (x1∨¬x2∨x3) ∧ (¬x1∨x2∨x3) ∧
/// (¬x1∨¬x2). The formula is true, so (7,7,7) is the unique minimal safe
/// load at `s1`; two-player (the ∀ position is adversary-owned) and
/// decreasing.
pub fn g_qbf3() -> Game {
    let q = parse_qbf("p cnf 3 3\ne 1 0\na 2 0\ne 3 0\n1 -2 3 0\n-1 2 3 0\n-1 -2 0\n")
        .expect("fixture formula parses");
    gen_qbf(&q).game
}

/// d=4, the chained gadget for φ = x1∨¬x2 against ψ = (y1∨y2) ∧ (¬y1∨¬y2),
/// with ψ's variables renumbered to 3 and 4. Both formulas are satisfiable,
/// so the designated load (5,12,12,13) is safe at `s1` but not minimal;
/// one-player.
pub fn g_dp() -> Game {
    let phi = parse_qbf("p cnf 2 1\n1 -2 0\n").expect("fixture formula parses");
    let psi = parse_qbf("p cnf 4 2\n3 4 0\n-3 -4 0\n").expect("fixture formula parses");
    gen_satunsat(&phi, &psi)
        .expect("fixture formulas have disjoint variables")
        .game
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify, max_finite_drop};

    #[test]
    fn fixtures_validate_and_classify() {
        assert!(classify(&g_loop()).one_player);
        assert!(classify(&g_loop()).decreasing);
        assert!(!classify(&g_2p()).one_player);
        assert!(!classify(&g_fork2()).decreasing);
        assert!(!classify(&g_dia()).one_player);
        assert!(classify(&g_pump()).decreasing);
        assert_eq!(max_finite_drop(&g_pump()), 5);
        assert_eq!(max_finite_drop(&g_loop()), 0);
        assert_eq!(g_order().dimension(), 2);
    }

    #[test]
    fn gadget_fixtures_have_the_documented_shape() {
        let qbf3 = g_qbf3();
        assert_eq!(qbf3.num_states(), 11);
        assert_eq!(qbf3.dimension(), 3);
        assert_eq!(max_finite_drop(&qbf3), 6);
        let class = classify(&qbf3);
        assert!(!class.one_player && class.decreasing);

        let dp = g_dp();
        assert_eq!(dp.num_states(), 17);
        assert_eq!(dp.dimension(), 4);
        assert!(classify(&dp).one_player);
    }
}
