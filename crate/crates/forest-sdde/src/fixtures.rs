//! Reference configurations used across tests, examples and the CLI docs.

use crate::model::{
    CompetitionFunction, InitialHistory, ModelConfig, SpeciesParams,
};

/// Single species, rational competition `1/(1+x)`, constant unit history,
/// `tau0 = 2` (so the conserved delay integral is exactly 1).
pub fn f1() -> ModelConfig {
    ModelConfig {
        species: vec![f1_species()],
        zeta: vec![vec![1.0]],
    }
}

pub fn f1_species() -> SpeciesParams {
    SpeciesParams {
        mu_a: 0.1,
        mu_j: 0.05,
        beta: 0.2,
        tau0: 2.0,
        f: CompetitionFunction::RationalDecay {
            kappa: 1.0,
            theta: 1.0,
            p: 1.0,
        },
        history: InitialHistory::Constant { value: 1.0 },
    }
}

/// Two decoupled copies of `f1` (block-diagonal coupling).
pub fn f2() -> ModelConfig {
    ModelConfig {
        species: vec![f1_species(), f1_species()],
        zeta: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
    }
}

/// Two cross-coupled copies of `f1`.
pub fn f3() -> ModelConfig {
    ModelConfig {
        species: vec![f1_species(), f1_species()],
        zeta: vec![vec![1.0, 0.5], vec![0.5, 1.0]],
    }
}

/// `f1` started exactly at its positive equilibrium: constant history at
/// `A*` with `tau0 = tau_bar`. Self-consistent: the history reproduces the
/// same conserved integral the equilibrium was derived from.
pub fn f1_equilibrium() -> ModelConfig {
    let base = f1();
    let (a_star, tau_bar) = crate::model::equilibrium(&base, 0, 1.0)
        .expect("f1 equilibrium solve")
        .found()
        .expect("f1 has a positive equilibrium");
    let mut cfg = base;
    cfg.species[0].tau0 = tau_bar;
    cfg.species[0].history = InitialHistory::Constant { value: a_star };
    cfg
}
