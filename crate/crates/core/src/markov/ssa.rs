use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Exp};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::{Ctmc, StateSpace};

/// Identifies the generator and the sampling scheme of every trajectory.
pub const SSA_ALGORITHM: &str = "gillespie-direct/xoshiro256++";

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub seed: u64,
    /// `(time, state)` pairs, starting at time 0 in the initial state.
    pub steps: Vec<(f64, usize)>,
}

impl Trajectory {
    /// Time of the first jump, if any.
    pub fn first_jump(&self) -> Option<f64> {
        self.steps.get(1).map(|s| s.0)
    }

    /// CSV rows `run,seed,time,state`.
    pub fn csv_rows(&self, run: usize, space: &StateSpace) -> String {
        let mut out = String::new();
        for (t, s) in &self.steps {
            out.push_str(&format!("{run},{},{t},{}\n", self.seed, space.states[*s]));
        }
        out
    }
}

/// Samples one trajectory until absorption or until time `t_max` is passed.
pub fn ssa_run(space: &StateSpace, ctmc: &Ctmc, seed: u64, t_max: f64) -> Trajectory {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let rows: Vec<Vec<(usize, f64)>> = (0..space.len())
        .map(|i| ctmc.row(i).map(|(j, r)| (j, r.to_f64())).collect())
        .collect();
    let mut state = space.initial;
    let mut time = 0.0;
    let mut steps = vec![(0.0, state)];
    loop {
        let row = &rows[state];
        let total: f64 = row.iter().map(|(_, r)| r).sum();
        if row.is_empty() || total <= 0.0 {
            break;
        }
        time += Exp::new(total)
            .expect("positive exit rate")
            .sample(&mut rng);
        if time > t_max {
            break;
        }
        let mut pick = rng.random::<f64>() * total;
        let mut next = row[row.len() - 1].0;
        for (j, r) in row {
            if pick < *r {
                next = *j;
                break;
            }
            pick -= r;
        }
        state = next;
        steps.push((time, state));
    }
    Trajectory { seed, steps }
}
