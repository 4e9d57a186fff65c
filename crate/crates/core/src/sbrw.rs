//! Monte Carlo simulation of the simplicial branching random walk.
//!
//! Populations live on oriented `(d−1)`-cells, addressed by
//! [`OrientedIndex::code`]. Without ancestry, the particles on a cell move as
//! a lump (binomial and multinomial draws). With ancestry every particle is
//! tracked, and its random draws are keyed by its lineage label so that runs
//! with different absorbing sets are coupled.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::complex::{alternating, OrientedIndex, SimplicialComplex};
use crate::error::{Error, Result};

/// Default cap on the total number of particles.
pub const DEFAULT_MAX_PARTICLES: u64 = 100_000_000;

/// Simulation parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub p: f64,
    pub horizon: usize,
    pub runs: usize,
    pub seed: u64,
    /// Canonical indices of absorbing cells; particles there never move.
    pub absorbing: Option<Vec<usize>>,
    pub track_ancestry: bool,
    /// Cancel opposite-orientation pairs after each step.
    pub annihilate: bool,
    pub max_particles: u64,
}

impl SimConfig {
    pub fn new(p: f64, horizon: usize, runs: usize, seed: u64) -> Self {
        SimConfig {
            p,
            horizon,
            runs,
            seed,
            absorbing: None,
            track_ancestry: false,
            annihilate: false,
            max_particles: DEFAULT_MAX_PARTICLES,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidLaziness(self.p));
        }
        if self.runs == 0 {
            return Err(Error::InvalidParameter("runs must be at least 1".into()));
        }
        Ok(())
    }
}

/// Particle counts on oriented cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParticlePopulation {
    pub counts: Vec<u64>,
}

impl ParticlePopulation {
    pub fn empty(cells: usize) -> Self {
        ParticlePopulation { counts: vec![0; 2 * cells] }
    }

    pub fn single(cells: usize, at: OrientedIndex) -> Self {
        let mut p = Self::empty(cells);
        p.counts[at.code()] = 1;
        p
    }

    pub fn get(&self, o: OrientedIndex) -> u64 {
        self.counts[o.code()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn effective(&self) -> EffectiveState {
        EffectiveState {
            values: self.counts.chunks(2).map(|c| c[0] as i64 - c[1] as i64).collect(),
        }
    }

    /// Removes `min(N(σ), N(σ̄))` particles from both orientations of each cell.
    pub fn annihilate(&mut self) {
        for c in self.counts.chunks_mut(2) {
            let m = c[0].min(c[1]);
            c[0] -= m;
            c[1] -= m;
        }
    }
}

/// `D(σ) = N(σ) − N(σ̄)` on canonical cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EffectiveState {
    pub values: Vec<i64>,
}

impl EffectiveState {
    pub fn eval(&self, o: OrientedIndex) -> i64 {
        i64::from(o.sign) * self.values[o.index]
    }
}

/// One tracked particle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Particle {
    /// Oriented cell code.
    pub cell: u32,
    /// Index of the parent in the previous generation; `u32::MAX` in generation 0.
    pub parent: u32,
    /// Lineage label; keys the particle's random draws.
    pub label: u64,
    pub frozen: bool,
}

/// Particles of every generation with parent links.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AncestryForest {
    pub generations: Vec<Vec<Particle>>,
}

impl AncestryForest {
    pub fn population(&self, n: usize, cells: usize) -> ParticlePopulation {
        let mut p = ParticlePopulation::empty(cells);
        for q in &self.generations[n] {
            p.counts[q.cell as usize] += 1;
        }
        p
    }
}

/// Trajectory of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    /// `D_n` for `n = 0..=horizon`.
    pub states: Vec<EffectiveState>,
    pub ancestry: Option<AncestryForest>,
}

/// Sample mean and its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub runs: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let var = if samples.len() > 1 {
            samples.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Estimate { mean, stderr: libm::sqrt(var / n), runs: samples.len() }
    }
}

/// Random generator of run `run`: ChaCha8 seeded by `seed`, on stream `run`.
pub fn run_rng(seed: u64, run: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run as u64);
    rng
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mix(a: u64, b: u64) -> u64 {
    splitmix(a ^ splitmix(b))
}

fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential-binomial multinomial split of `n` items into `k` equally likely bins.
fn multinomial_uniform<R: Rng>(n: u64, k: usize, rng: &mut R) -> Vec<u64> {
    let mut out = vec![0; k];
    let mut left = n;
    for (i, slot) in out.iter_mut().enumerate() {
        if left == 0 {
            break;
        }
        let bins = (k - i) as f64;
        *slot = if i + 1 == k { left } else { binomial(left, 1.0 / bins, rng) };
        left -= *slot;
    }
    out
}

fn binomial<R: Rng>(n: u64, p: f64, rng: &mut R) -> u64 {
    if n == 0 || p <= 0.0 {
        0
    } else if p >= 1.0 {
        n
    } else {
        Binomial::new(n, p).expect("valid binomial").sample(rng)
    }
}

/// Precomputed splitting geometry of a complex.
#[derive(Clone, Debug)]
pub struct Walker {
    cells: usize,
    /// `stars[i][t]`: up-neighbors of `+σ_i` inside its `t`-th coface.
    stars: Vec<Vec<Vec<OrientedIndex>>>,
    /// `lower[τ][a]`: cells down-adjacent to `+τ` through face `a`.
    lower: Vec<Vec<Vec<OrientedIndex>>>,
}

impl Walker {
    pub fn new(x: &SimplicialComplex) -> Result<Self> {
        let d = x.dim() as i32;
        if d < 1 {
            return Err(Error::DimensionOutOfRange { got: d as i64, lo: 1, hi: i64::MAX });
        }
        let j = d - 1;
        let stars = (0..x.num_cells(j))
            .map(|i| {
                x.cofaces_of(j, i)
                    .iter()
                    .map(|&t| {
                        let fs = x.faces_of(d, t as usize);
                        let a = fs.iter().position(|&f| f as usize == i).unwrap();
                        fs.iter()
                            .enumerate()
                            .filter(|&(b, _)| b != a)
                            .map(|(b, &f)| OrientedIndex::new(f as usize, -alternating(a + b)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let lower = (0..x.num_cells(d))
            .map(|t| {
                x.faces_of(d, t)
                    .iter()
                    .enumerate()
                    .map(|(a, &s)| {
                        x.cofaces_of(j, s as usize)
                            .iter()
                            .filter(|&&u| u as usize != t)
                            .map(|&u| {
                                let b = x.face_position(j, s as usize, u as usize);
                                OrientedIndex::new(u as usize, -alternating(a + b))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Walker { cells: x.num_cells(j), stars, lower })
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn top_cells(&self) -> usize {
        self.lower.len()
    }

    fn absorbing_mask(&self, absorbing: Option<&[usize]>) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.cells];
        for &a in absorbing.unwrap_or(&[]) {
            if a >= self.cells {
                return Err(Error::InvalidParameter(alloc::format!("absorbing index {a} out of range")));
            }
            mask[a] = true;
        }
        Ok(mask)
    }

    /// One step of the walk.
    pub fn step<R: Rng>(&self, pop: &ParticlePopulation, p: f64, rng: &mut R) -> Result<ParticlePopulation> {
        self.step_masked(pop, &vec![false; self.cells], p, rng)
    }

    /// One step with particles on the absorbing cells (either orientation) frozen.
    pub fn step_absorbing<R: Rng>(
        &self,
        pop: &ParticlePopulation,
        absorbing: &[usize],
        p: f64,
        rng: &mut R,
    ) -> Result<ParticlePopulation> {
        let mask = self.absorbing_mask(Some(absorbing))?;
        self.step_masked(pop, &mask, p, rng)
    }

    fn step_masked<R: Rng>(
        &self,
        pop: &ParticlePopulation,
        frozen: &[bool],
        p: f64,
        rng: &mut R,
    ) -> Result<ParticlePopulation> {
        let mut next = ParticlePopulation::empty(self.cells);
        for (code, &n) in pop.counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let here = OrientedIndex::from_code(code);
            if frozen[here.index] {
                next.counts[code] += n;
                continue;
            }
            let star = &self.stars[here.index];
            if star.is_empty() {
                return Err(Error::StrandedParticle);
            }
            let stay = binomial(n, p, rng);
            next.counts[code] += stay;
            for (coface, k) in star.iter().zip(multinomial_uniform(n - stay, star.len(), rng)) {
                if k == 0 {
                    continue;
                }
                for o in coface {
                    next.counts[OrientedIndex::new(o.index, o.sign * here.sign).code()] += k;
                }
            }
        }
        Ok(next)
    }

    /// One step of the lower walk on oriented `d`-cells.
    pub fn step_lower<R: Rng>(&self, pop: &ParticlePopulation, p: f64, rng: &mut R) -> ParticlePopulation {
        let mut next = ParticlePopulation::empty(self.lower.len());
        for (code, &n) in pop.counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let here = OrientedIndex::from_code(code);
            let faces = &self.lower[here.index];
            let stay = binomial(n, p, rng);
            next.counts[code] += stay;
            for (adj, k) in faces.iter().zip(multinomial_uniform(n - stay, faces.len(), rng)) {
                if k == 0 {
                    continue;
                }
                for o in adj {
                    next.counts[OrientedIndex::new(o.index, o.sign * here.sign).code()] += k;
                }
            }
        }
        next
    }

    /// One generation of tracked particles; draws depend only on `(key, label, generation)`.
    fn step_particles(
        &self,
        current: &[Particle],
        frozen: &[bool],
        p: f64,
        key: u64,
        generation: u64,
    ) -> Result<Vec<Particle>> {
        let mut next = Vec::with_capacity(current.len());
        for (i, q) in current.iter().enumerate() {
            let here = OrientedIndex::from_code(q.cell as usize);
            if frozen[here.index] {
                next.push(Particle { cell: q.cell, parent: i as u32, label: q.label, frozen: true });
                continue;
            }
            let star = &self.stars[here.index];
            if star.is_empty() {
                return Err(Error::StrandedParticle);
            }
            let h = mix(mix(key, q.label), generation);
            if unit(h) < p {
                next.push(Particle { cell: q.cell, parent: i as u32, label: mix(q.label, 0), frozen: false });
                continue;
            }
            let t = ((unit(mix(h, 1)) * star.len() as f64) as usize).min(star.len() - 1);
            for (c, o) in star[t].iter().enumerate() {
                next.push(Particle {
                    cell: OrientedIndex::new(o.index, o.sign * here.sign).code() as u32,
                    parent: i as u32,
                    label: mix(q.label, 1 + c as u64),
                    frozen: false,
                });
            }
        }
        Ok(next)
    }

    /// Simulates one run from `start`.
    pub fn simulate_run(&self, start: OrientedIndex, cfg: &SimConfig, run: usize) -> Result<RunRecord> {
        cfg.validate()?;
        if start.index >= self.cells {
            return Err(Error::InvalidParameter(alloc::format!("start index {} out of range", start.index)));
        }
        let mask = self.absorbing_mask(cfg.absorbing.as_deref())?;
        let mut pop = ParticlePopulation::single(self.cells, start);
        let mut states = vec![pop.effective()];
        if cfg.track_ancestry {
            let key = mix(cfg.seed, run as u64);
            let mut forest = AncestryForest {
                generations: vec![vec![Particle { cell: start.code() as u32, parent: u32::MAX, label: 1, frozen: false }]],
            };
            for g in 1..=cfg.horizon {
                let next = self.step_particles(forest.generations.last().unwrap(), &mask, cfg.p, key, g as u64)?;
                if next.len() as u64 > cfg.max_particles {
                    return Err(Error::PopulationOverflow(cfg.max_particles));
                }
                forest.generations.push(next);
                states.push(forest.population(g, self.cells).effective());
            }
            return Ok(RunRecord { run, states, ancestry: Some(forest) });
        }
        let mut rng = run_rng(cfg.seed, run);
        for _ in 0..cfg.horizon {
            pop = self.step_masked(&pop, &mask, cfg.p, &mut rng)?;
            if cfg.annihilate {
                pop.annihilate();
            }
            if pop.total() > cfg.max_particles {
                return Err(Error::PopulationOverflow(cfg.max_particles));
            }
            states.push(pop.effective());
        }
        Ok(RunRecord { run, states, ancestry: None })
    }

    /// Lower-walk run from an oriented `d`-cell; returns `D_n^↓` for `n = 0..=horizon`.
    pub fn simulate_lower_run(&self, start: OrientedIndex, cfg: &SimConfig, run: usize) -> Result<Vec<EffectiveState>> {
        cfg.validate()?;
        let mut rng = run_rng(cfg.seed, run);
        let mut pop = ParticlePopulation::single(self.lower.len(), start);
        let mut states = vec![pop.effective()];
        for _ in 0..cfg.horizon {
            pop = self.step_lower(&pop, cfg.p, &mut rng);
            if pop.total() > cfg.max_particles {
                return Err(Error::PopulationOverflow(cfg.max_particles));
            }
            states.push(pop.effective());
        }
        Ok(states)
    }
}

/// Runs `cfg.runs` independent simulations from `start`.
pub fn simulate(x: &SimplicialComplex, start: OrientedIndex, cfg: &SimConfig) -> Result<Vec<RunRecord>> {
    let walker = Walker::new(x)?;
    (0..cfg.runs).map(|r| walker.simulate_run(start, cfg, r)).collect()
}

/// `K_n(σ′)`: generation-`n` particles at `σ′` whose ancestors at times
/// `1..n−1` avoided both `σ′` and `σ̄′`.
pub fn count_first_visits(ancestry: Option<&AncestryForest>, target: OrientedIndex, n: usize) -> Result<u64> {
    let forest = ancestry.ok_or(Error::AncestryAbsent)?;
    if n == 0 {
        return Ok(0);
    }
    let hit = |q: &Particle| OrientedIndex::from_code(q.cell as usize).index == target.index;
    // tainted[i]: particle i of the current generation or an ancestor at time ≥ 1 sat on the target cell
    let mut tainted = vec![false; forest.generations[0].len()];
    for g in 1..n {
        tainted = forest.generations[g].iter().map(|q| tainted[q.parent as usize] || hit(q)).collect();
    }
    Ok(forest.generations[n]
        .iter()
        .filter(|q| q.cell as usize == target.code() && !tainted[q.parent as usize])
        .count() as u64)
}

/// Monte Carlo estimate of `ℰ_n(σ, σ′) = E^σ[D_n(σ′)]`.
pub fn estimate_heat_kernel(
    x: &SimplicialComplex,
    sigma: OrientedIndex,
    target: OrientedIndex,
    n: usize,
    p: f64,
    runs: usize,
    seed: u64,
) -> Result<Estimate> {
    let walker = Walker::new(x)?;
    let cfg = SimConfig::new(p, n, runs, seed);
    let samples = (0..runs)
        .map(|r| walker.simulate_run(sigma, &cfg, r).map(|rec| rec.states[n].eval(target) as f64))
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&samples))
}

/// Monte Carlo estimate of `E^σ[K_n(σ′)]` from ancestry-tracked runs.
pub fn estimate_first_visits(
    x: &SimplicialComplex,
    sigma: OrientedIndex,
    target: OrientedIndex,
    n: usize,
    p: f64,
    runs: usize,
    seed: u64,
) -> Result<Estimate> {
    let walker = Walker::new(x)?;
    let mut cfg = SimConfig::new(p, n, runs, seed);
    cfg.track_ancestry = true;
    let samples = (0..runs)
        .map(|r| {
            let rec = walker.simulate_run(sigma, &cfg, r)?;
            count_first_visits(rec.ancestry.as_ref(), target, n).map(|k| k as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Estimate::from_samples(&samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::complex::{Cell, OrientedCell};

    fn idx(x: &SimplicialComplex, v: &[u32]) -> OrientedIndex {
        x.oriented_index(&OrientedCell::from_ordering(v).unwrap()).unwrap()
    }

    #[test]
    fn deterministic_split_on_triangle() {
        let x = catalog::single_triangle();
        let w = Walker::new(&x).unwrap();
        let pop = ParticlePopulation::single(3, idx(&x, &[0, 1]));
        let next = w.step(&pop, 0.0, &mut run_rng(1, 0)).unwrap();
        assert_eq!(next.total(), 2);
        assert_eq!(next.get(idx(&x, &[2, 1])), 1);
        assert_eq!(next.get(idx(&x, &[0, 2])), 1);
        assert_eq!(w.step(&pop, 1.0, &mut run_rng(1, 0)).unwrap(), pop);
    }

    #[test]
    fn absorbing_steps() {
        let x = catalog::single_triangle();
        let w = Walker::new(&x).unwrap();
        let a = x.index_of(&Cell::new(vec![0, 1]).unwrap()).unwrap();
        let pop = ParticlePopulation::single(3, idx(&x, &[1, 0]));
        assert_eq!(w.step_absorbing(&pop, &[a], 0.3, &mut run_rng(2, 0)).unwrap(), pop);
        let start = ParticlePopulation::single(3, idx(&x, &[1, 2]));
        let one = w.step_absorbing(&start, &[a], 0.0, &mut run_rng(2, 0)).unwrap();
        assert_eq!(one.get(idx(&x, &[0, 2])), 1);
        assert_eq!(one.get(idx(&x, &[1, 0])), 1);
        assert_eq!(one.total(), 2);
        let two = w.step_absorbing(&one, &[a], 0.0, &mut run_rng(2, 0)).unwrap();
        assert_eq!(two.get(idx(&x, &[1, 0])), 1);
        assert_eq!(two.get(idx(&x, &[0, 1])), 1);
        assert_eq!(two.get(idx(&x, &[1, 2])), 1);
        let three = w.step_absorbing(&two, &[a], 0.0, &mut run_rng(2, 0)).unwrap();
        assert_eq!(three.get(idx(&x, &[1, 0])), 2);
        assert_eq!(three.get(idx(&x, &[0, 1])), 1);
    }

    #[test]
    fn lower_steps() {
        let x = catalog::single_triangle();
        let w = Walker::new(&x).unwrap();
        let pop = ParticlePopulation::single(1, OrientedIndex::positive(0));
        assert_eq!(w.step_lower(&pop, 0.0, &mut run_rng(3, 0)).total(), 0);
        let y = catalog::two_triangles();
        let w = Walker::new(&y).unwrap();
        let pop = ParticlePopulation::single(2, OrientedIndex::positive(0));
        assert_eq!(w.step_lower(&pop, 1.0, &mut run_rng(3, 0)), pop);
        let mut shared = 0;
        for r in 0..300 {
            let next = w.step_lower(&pop, 0.0, &mut run_rng(3, r));
            assert!(next.total() <= 1);
            if next.total() == 1 {
                assert_eq!(next.get(OrientedIndex::new(1, -1)), 1);
                shared += 1;
            }
        }
        assert!(shared > 60 && shared < 140);
    }

    #[test]
    fn stranded_particle_is_an_error() {
        let x = crate::complex::build_complex(&[vec![0, 1, 2], vec![3, 4]]).unwrap();
        let w = Walker::new(&x).unwrap();
        let e = x.index_of(&Cell::new(vec![3, 4]).unwrap()).unwrap();
        let pop = ParticlePopulation::single(w.cells(), OrientedIndex::positive(e));
        assert_eq!(w.step(&pop, 0.5, &mut run_rng(0, 0)), Err(Error::StrandedParticle));
    }

    #[test]
    fn first_visits_by_hand() {
        // p = 0: [0,1] → {[2,1], [0,2]} → {[2,0], [0,1], [1,2], [0,1]} → …
        let x = catalog::single_triangle();
        let mut cfg = SimConfig::new(0.0, 3, 1, 9);
        cfg.track_ancestry = true;
        let rec = simulate(&x, idx(&x, &[0, 1]), &cfg).unwrap().pop().unwrap();
        let forest = rec.ancestry.as_ref();
        let target = idx(&x, &[0, 1]);
        assert_eq!(count_first_visits(forest, target, 0).unwrap(), 0);
        assert_eq!(count_first_visits(forest, target, 1).unwrap(), 0);
        assert_eq!(count_first_visits(forest, target, 2).unwrap(), 2);
        assert_eq!(count_first_visits(forest, target.flip(), 2).unwrap(), 0);
        // generation 3 from the untouched lines [2,0] and [1,2]: two land on [1,0]
        assert_eq!(count_first_visits(forest, target.flip(), 3).unwrap(), 2);
        assert_eq!(count_first_visits(forest, target, 3).unwrap(), 0);
        assert_eq!(rec.states[1].eval(target), 0);
        let n1 = forest.unwrap().population(1, 3);
        let t2 = idx(&x, &[2, 1]);
        assert_eq!(count_first_visits(forest, t2, 1).unwrap(), n1.get(t2));
        assert_eq!(count_first_visits(None, target, 1), Err(Error::AncestryAbsent));
    }

    #[test]
    fn p_one_has_no_variance() {
        let x = catalog::torus7();
        let e = estimate_heat_kernel(&x, OrientedIndex::positive(4), OrientedIndex::new(4, -1), 5, 1.0, 50, 3).unwrap();
        assert_eq!((e.mean, e.stderr), (-1.0, 0.0));
    }

    #[test]
    fn runs_are_reproducible() {
        let x = catalog::two_triangles();
        let cfg = SimConfig::new(0.4, 6, 5, 77);
        assert_eq!(simulate(&x, OrientedIndex::positive(0), &cfg), simulate(&x, OrientedIndex::positive(0), &cfg));
    }

    #[test]
    fn annihilation_preserves_effective_state() {
        let mut p = ParticlePopulation { counts: vec![3, 1, 0, 2] };
        let before = p.effective();
        p.annihilate();
        assert_eq!(p.effective(), before);
        assert_eq!(p.counts, vec![2, 0, 0, 2]);
    }

    #[test]
    fn growth_cap() {
        let x = catalog::torus7();
        let mut cfg = SimConfig::new(0.0, 30, 1, 1);
        cfg.max_particles = 1000;
        assert_eq!(simulate(&x, OrientedIndex::positive(0), &cfg), Err(Error::PopulationOverflow(1000)));
    }

    #[test]
    fn graph_walk_keeps_one_particle() {
        let x = catalog::hollow_triangle();
        let cfg = SimConfig::new(0.3, 10, 20, 5);
        for rec in simulate(&x, OrientedIndex::positive(0), &cfg).unwrap() {
            assert!(rec.states.iter().all(|s| s.values.iter().sum::<i64>() == 1));
        }
    }
}
