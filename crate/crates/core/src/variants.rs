//! Average-inertia weighted CSO (AICSO) and parallel CSO (PCSO).

use rand::{Rng, SeedableRng};

use crate::cso::{
    self, assign_modes, init_population, step_population, BestRecord, Cat, CsoParams, Evaluator,
    RunOutcome, SwarmRng, Trace,
};
use crate::error::{Error, Result};
use crate::objective::Objective;

/// Linearly decaying inertia: `w_start` at `iter = 0`, `w_end` at
/// `iter = max_iters`.
pub fn inertia_at(iter: usize, max_iters: usize, w_start: f64, w_end: f64) -> f64 {
    let max_iters = max_iters.max(1);
    let frac = iter.min(max_iters) as f64 / max_iters as f64;
    w_start - (w_start - w_end) * frac
}

#[derive(Debug, Clone, PartialEq)]
pub struct AicsoParams {
    pub base: CsoParams,
    pub w_start: f64,
    pub w_end: f64,
}

impl Default for AicsoParams {
    fn default() -> Self {
        AicsoParams {
            base: CsoParams::default(),
            w_start: 0.9,
            w_end: 0.4,
        }
    }
}

impl AicsoParams {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        let in_range = |w: f64| w > 0.0 && w <= 1.0;
        if !in_range(self.w_start) || !in_range(self.w_end) {
            return Err(Error::Config(format!(
                "inertia weights must lie in (0, 1], got {} and {}",
                self.w_start, self.w_end
            )));
        }
        if self.w_start < self.w_end {
            return Err(Error::Config(format!(
                "w_start ({}) must not be below w_end ({})",
                self.w_start, self.w_end
            )));
        }
        Ok(())
    }

    /// Inertia applied during the 1-based `iteration`; the first iteration
    /// uses `w_start` and the last `w_end`.
    pub fn inertia_for(&self, iteration: usize) -> f64 {
        let span = self.base.max_iters.saturating_sub(1).max(1);
        inertia_at(iteration.saturating_sub(1), span, self.w_start, self.w_end)
    }
}

/// CSO with the inertia schedule applied to the tracing velocity update.
pub fn aicso_run(params: &AicsoParams, objective: &dyn Objective) -> Result<RunOutcome> {
    params.validate()?;
    let mut rng = SwarmRng::seed_from_u64(params.base.rng_seed);
    cso::run_with(
        &params.base,
        objective,
        &mut rng,
        |it| params.inertia_for(it),
        &mut (),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcsoParams {
    pub base: CsoParams,
    /// Number of subgroups.
    pub n_groups: usize,
    /// Iterations between information exchanges.
    pub ech: usize,
}

impl Default for PcsoParams {
    fn default() -> Self {
        PcsoParams {
            base: CsoParams::default(),
            n_groups: 4,
            ech: 20,
        }
    }
}

impl PcsoParams {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.n_groups < 2 || self.n_groups > self.base.n_cats {
            return Err(Error::Config(format!(
                "n_groups must lie in [2, n_cats={}], got {}",
                self.base.n_cats, self.n_groups
            )));
        }
        if self.ech == 0 {
            return Err(Error::Config("ech must be at least 1".into()));
        }
        Ok(())
    }

    /// Sizes of the round-robin partition: cat `i` joins group `i % n_groups`.
    pub fn group_sizes(&self) -> Vec<usize> {
        let (n, g) = (self.base.n_cats, self.n_groups);
        (0..g).map(|k| n / g + usize::from(k < n % g)).collect()
    }
}

/// The random stream of subgroup `group`; stream 0 drives exchanges.
pub fn group_rng(seed: u64, group: usize) -> SwarmRng {
    let mut rng = SwarmRng::seed_from_u64(seed);
    rng.set_stream(group as u64 + 1);
    rng
}

/// A PCSO run with its exchange bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct PcsoOutcome {
    pub run: RunOutcome,
    /// Iterations at which groups exchanged information.
    pub exchange_iterations: Vec<usize>,
    /// Best-so-far trace of each group's local best.
    pub group_traces: Vec<Vec<f64>>,
    /// Total population counted right after each exchange.
    pub population_after_exchange: Vec<usize>,
}

struct Group<'o> {
    cats: Vec<Cat>,
    rng: SwarmRng,
    eval: Evaluator<'o>,
    best: BestRecord,
    best_velocity: Vec<f64>,
    trace: Vec<f64>,
}

impl Group<'_> {
    fn refresh_best(&mut self, iteration: usize) {
        if let Some(i) = best_index(&self.cats) {
            if self.cats[i].fitness < self.best.fitness {
                self.best = BestRecord {
                    position: self.cats[i].position.clone(),
                    fitness: self.cats[i].fitness,
                    iteration_found: iteration,
                };
                self.best_velocity = self.cats[i].velocity.clone();
            }
        }
    }
}

fn best_index(cats: &[Cat]) -> Option<usize> {
    (0..cats.len()).reduce(|a, b| if cats[b].fitness < cats[a].fitness { b } else { a })
}

/// Worst cat, ties going to the lowest index.
fn worst_index(cats: &[Cat]) -> Option<usize> {
    (0..cats.len()).reduce(|a, b| if cats[b].fitness > cats[a].fitness { b } else { a })
}

/// Parallel CSO: subgroups trace towards their own local best and, every
/// `ech` iterations, each group's worst cat is overwritten by a copy of the
/// local best of another, uniformly chosen group.
///
/// Each group draws from its own stream ([`group_rng`]), so between
/// exchanges a group evolves exactly like a standalone run on its share of
/// the population.
pub fn pcso_run(params: &PcsoParams, objective: &dyn Objective) -> Result<PcsoOutcome> {
    params.validate()?;
    let base = &params.base;
    let bounds = objective.bounds();
    bounds.validate()?;
    let v_max = base.v_max.resolve(bounds);
    let seed = base.rng_seed;

    let mut groups = Vec::with_capacity(params.n_groups);
    for (g, size) in params.group_sizes().into_iter().enumerate() {
        let mut rng = group_rng(seed, g);
        let mut eval = Evaluator::new(objective);
        let sub = CsoParams {
            n_cats: size,
            ..base.clone()
        };
        let mut cats = init_population(&sub, &mut eval, &mut rng)?;
        assign_modes(&mut cats, base.mr, &mut rng);
        let i = best_index(&cats).expect("groups are non-empty");
        let best = BestRecord {
            position: cats[i].position.clone(),
            fitness: cats[i].fitness,
            iteration_found: 0,
        };
        groups.push(Group {
            best_velocity: cats[i].velocity.clone(),
            trace: vec![best.fitness],
            best,
            cats,
            rng,
            eval,
        });
    }
    let mut exchange_rng = SwarmRng::seed_from_u64(seed);

    let mut global = global_best(&groups);
    let mut trace = Trace::default();
    let evaluations = |groups: &[Group<'_>]| groups.iter().map(|g| g.eval.count()).sum::<u64>();
    trace.best_fitness.push(global.fitness);
    trace.evaluations.push(evaluations(&groups));

    let mut exchange_iterations = Vec::new();
    let mut population_after_exchange = Vec::new();

    for iteration in 1..=base.max_iters {
        for group in groups.iter_mut() {
            let attractor = group.best.position.clone();
            step_population(
                &mut group.cats,
                &attractor,
                base,
                &v_max,
                1.0,
                &mut group.eval,
                &mut group.rng,
            )?;
            group.refresh_best(iteration);
        }

        if iteration % params.ech == 0 {
            exchange(&mut groups, &mut exchange_rng, iteration);
            exchange_iterations.push(iteration);
            population_after_exchange.push(groups.iter().map(|g| g.cats.len()).sum());
        }

        for group in groups.iter_mut() {
            group.trace.push(group.best.fitness);
        }
        let candidate = global_best(&groups);
        if candidate.fitness < global.fitness {
            global = candidate;
        }
        trace.best_fitness.push(global.fitness);
        trace.evaluations.push(evaluations(&groups));

        for group in groups.iter_mut() {
            assign_modes(&mut group.cats, base.mr, &mut group.rng);
        }
    }

    Ok(PcsoOutcome {
        run: RunOutcome {
            best: global,
            trace,
        },
        exchange_iterations,
        group_traces: groups.into_iter().map(|g| g.trace).collect(),
        population_after_exchange,
    })
}

fn global_best(groups: &[Group<'_>]) -> BestRecord {
    groups
        .iter()
        .map(|g| &g.best)
        .reduce(|a, b| if b.fitness < a.fitness { b } else { a })
        .expect("at least two groups")
        .clone()
}

fn exchange(groups: &mut [Group<'_>], rng: &mut SwarmRng, iteration: usize) {
    let donors: Vec<(Vec<f64>, Vec<f64>, f64)> = groups
        .iter()
        .map(|g| (g.best.position.clone(), g.best_velocity.clone(), g.best.fitness))
        .collect();
    let n = groups.len();
    for (g, group) in groups.iter_mut().enumerate() {
        // Uniform over the other groups.
        let mut donor = rng.random_range(0..n - 1);
        if donor >= g {
            donor += 1;
        }
        let worst = worst_index(&group.cats).expect("groups are non-empty");
        let (position, velocity, fitness) = &donors[donor];
        let cat = &mut group.cats[worst];
        cat.position.clone_from(position);
        cat.velocity.clone_from(velocity);
        cat.fitness = *fitness;
        group.refresh_best(iteration);
    }
}
