//! Reachable state spaces, continuous-time Markov chains and their export.

mod ssa;

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::congruence::ClassKey;
use crate::lts::{ground_view, SysLabel};
use crate::stochastic::{sos_sys, Rate, RateError, RateTable};
use crate::syntax::Term;

pub use crate::bisim::{rate_bisim, DEFAULT_STATE_BUDGET};
pub use ssa::{ssa_run, Trajectory, SSA_ALGORITHM};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MarkovError {
    #[error("state budget of {budget} states exceeded after exploring {explored} states")]
    StateBudgetExceeded { budget: usize, explored: usize },
    #[error(transparent)]
    Rate(#[from] RateError),
}

/// Ground states reachable by internal steps, in discovery order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateSpace {
    pub states: Vec<ClassKey>,
    pub initial: usize,
}

impl StateSpace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Sparse rate matrix indexed by state.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Ctmc {
    pub rates: BTreeMap<(usize, usize), Rate>,
}

impl Ctmc {
    pub fn transitions(&self) -> usize {
        self.rates.len()
    }

    /// Outgoing transitions of `state` as `(target, rate)`.
    pub fn row(&self, state: usize) -> impl Iterator<Item = (usize, &Rate)> {
        self.rates
            .range((state, 0)..=(state, usize::MAX))
            .map(|((_, j), r)| (*j, r))
    }

    pub fn exit_rate(&self, state: usize) -> Rate {
        self.row(state).map(|(_, r)| r.clone()).sum()
    }
}

/// Result of an exploration that ran out of budget: the states and rates
/// discovered so far.
#[derive(Clone, Debug)]
pub struct Partial {
    pub space: StateSpace,
    pub ctmc: Ctmc,
}

/// Breadth-first exploration under `id` transitions with exact rates.
pub fn explore(
    p0: &Term,
    rates: &RateTable,
    budget: usize,
) -> Result<(StateSpace, Ctmc), MarkovError> {
    explore_partial(p0, rates, budget).map_err(|(e, _)| e)
}

/// Like [`explore`], but hands back the partial space when the budget is hit.
pub fn explore_partial(
    p0: &Term,
    rates: &RateTable,
    budget: usize,
) -> Result<(StateSpace, Ctmc), (MarkovError, Option<Partial>)> {
    let mut states = vec![ClassKey::of(&ground_view(p0))];
    let mut index: HashMap<ClassKey, usize> = HashMap::from([(states[0].clone(), 0)]);
    let mut ctmc = Ctmc::default();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let behaviour = sos_sys(&states[i].term(), rates).map_err(|e| (e.into(), None))?;
        let Some(ids) = behaviour.get(&SysLabel::Id) else {
            continue;
        };
        for (k, r) in ids.iter() {
            let j = match index.get(k) {
                Some(j) => *j,
                None => {
                    if states.len() >= budget {
                        let err = MarkovError::StateBudgetExceeded {
                            budget,
                            explored: states.len(),
                        };
                        let partial = Partial {
                            space: StateSpace { states, initial: 0 },
                            ctmc,
                        };
                        return Err((err, Some(partial)));
                    }
                    states.push(k.clone());
                    index.insert(k.clone(), states.len() - 1);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                }
            };
            *ctmc.rates.entry((i, j)).or_insert_with(Rate::zero) += r;
        }
    }
    Ok((StateSpace { states, initial: 0 }, ctmc))
}

/// Renders the `.sta` and `.tra` files: `<index> <state>` per line, and a
/// `<states> <transitions>` header followed by `<i> <j> <rate>` lines
/// sorted by source and target.
pub fn export_ctmc(space: &StateSpace, ctmc: &Ctmc) -> (String, String) {
    let mut sta = String::new();
    for (i, k) in space.states.iter().enumerate() {
        writeln!(sta, "{i} {k}").expect("writing to a string");
    }
    let mut tra = String::new();
    writeln!(tra, "{} {}", space.len(), ctmc.transitions()).expect("writing to a string");
    for ((i, j), r) in &ctmc.rates {
        writeln!(tra, "{i} {j} {r}").expect("writing to a string");
    }
    (sta, tra)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_system;

    fn rates() -> RateTable {
        RateTable::parse("phago n = 2\npino n = 3").unwrap()
    }

    #[test]
    fn void_space() {
        let (space, ctmc) = explore(&Term::VoidSys, &rates(), 10).unwrap();
        assert_eq!(space.len(), 1);
        assert_eq!(
            export_ctmc(&space, &ctmc),
            ("0 void\n".to_string(), "1 0\n".to_string())
        );
    }

    #[test]
    fn phago_pair() {
        let p = parse_system("phago n[void] o cophago n{0}[void]").unwrap();
        let (space, ctmc) = explore(&p, &rates(), 10).unwrap();
        let (_, tra) = export_ctmc(&space, &ctmc);
        assert_eq!(tra, "2 1\n0 1 2\n");
    }

    #[test]
    fn budget_is_explicit() {
        let p = parse_system("pino n{0}.pino n{0}[void]").unwrap();
        assert_eq!(explore(&p, &rates(), 3).unwrap().0.len(), 3);
        let err = explore_partial(&p, &rates(), 2).unwrap_err();
        assert_eq!(
            err.0,
            MarkovError::StateBudgetExceeded {
                budget: 2,
                explored: 2
            }
        );
        assert_eq!(err.1.unwrap().space.len(), 2);
    }
}
