use alloc::vec::Vec;
use rand::Rng;

use crate::esn::{ContextVector, CONTEXT_WIDTH};
use crate::rng::{stream, Purpose};

/// Four dayparts times weekday/weekend.
pub const BUCKETS: usize = 8;

/// Zipf probabilities `n^-α / H` for ranks `1..=n`.
pub fn zipf(n: usize, alpha: f64) -> Vec<f64> {
    let raw: Vec<f64> = (1..=n).map(|k| libm::pow(k as f64, -alpha)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Inverse-CDF draw of an index of `probs` from `u` in `[0, 1)`.
pub fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding can leave acc slightly below 1; fall back to the last positive entry
    probs.iter().rposition(|p| *p > 0.0).unwrap_or(0)
}

/// Time of day and day of week of a 1-based slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Calendar {
    pub hour: usize,
    pub weekday: usize,
}

impl Calendar {
    pub fn is_weekend(&self) -> bool {
        self.weekday >= 5
    }

    pub fn bucket(&self) -> usize {
        (self.hour * 4 / 24) * 2 + usize::from(self.is_weekend())
    }
}

pub fn slot_calendar(slot: usize, slots_per_day: usize) -> Calendar {
    let s = slot.saturating_sub(1);
    let day = s / slots_per_day;
    let hour = (s % slots_per_day) * 24 / slots_per_day;
    Calendar { hour, weekday: day % 7 }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadConfig {
    pub users: usize,
    pub contents: usize,
    pub zipf_alpha: f64,
    pub archetypes: usize,
    pub slots_per_day: usize,
    /// Every slot uses the first calendar bucket.
    pub stationary: bool,
}

/// A demand profile: context template plus one content distribution per
/// calendar bucket.
#[derive(Debug, Clone, PartialEq)]
pub struct Archetype {
    /// Gender, occupation, age and device features in `[0, 1]`.
    pub profile: [f64; 4],
    pub buckets: Vec<Vec<f64>>,
}

fn swap_adjacent<R: Rng + ?Sized>(order: &mut [usize], swaps: usize, rng: &mut R) {
    // rank 0 stays in place so the head of the catalog is shared
    if order.len() < 3 {
        return;
    }
    for _ in 0..swaps {
        let i = rng.random_range(1..order.len() - 1);
        order.swap(i, i + 1);
    }
}

fn ranked(base: &[f64], order: &[usize]) -> Vec<f64> {
    let mut out = alloc::vec![0.0; base.len()];
    for (rank, &content) in order.iter().enumerate() {
        out[content] = base[rank];
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub contents: usize,
    pub slots_per_day: usize,
    pub archetypes: Vec<Archetype>,
    pub user_archetype: Vec<usize>,
    pub stationary: bool,
}

impl Workload {
    /// Archetypes perturb a shared Zipf ranking with adjacent swaps below the
    /// top rank; each bucket perturbs its archetype's ranking again.
    pub fn generate(cfg: &WorkloadConfig, seed: u64) -> Self {
        let contents = cfg.contents.max(2);
        let base = zipf(contents, cfg.zipf_alpha);
        let archetype_count = cfg.archetypes.max(1);
        let mut rng = stream(seed, Purpose::Workload, &[0]);
        let mut global: Vec<usize> = (0..contents).collect();
        swap_adjacent(&mut global, contents, &mut rng);
        let archetypes = (0..archetype_count)
            .map(|a| {
                let mut rng = stream(seed, Purpose::Workload, &[1, a as u64]);
                let mut order = global.clone();
                if archetype_count > 1 {
                    swap_adjacent(&mut order, contents / 2, &mut rng);
                }
                let profile = [
                    (a % 2) as f64,
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                    rng.random::<f64>(),
                ];
                let buckets = (0..BUCKETS)
                    .map(|_| {
                        let mut o = order.clone();
                        swap_adjacent(&mut o, contents / 4, &mut rng);
                        ranked(&base, &o)
                    })
                    .collect();
                Archetype { profile, buckets }
            })
            .collect();
        let user_archetype = (0..cfg.users).map(|u| u % archetype_count).collect();
        Self {
            contents,
            slots_per_day: cfg.slots_per_day.max(1),
            archetypes,
            user_archetype,
            stationary: cfg.stationary,
        }
    }

    fn calendar(&self, slot: usize) -> Calendar {
        slot_calendar(if self.stationary { 1 } else { slot }, self.slots_per_day)
    }

    pub fn users(&self) -> usize {
        self.user_archetype.len()
    }

    pub fn distribution(&self, user: usize, slot: usize) -> &[f64] {
        let cal = self.calendar(slot);
        &self.archetypes[self.user_archetype[user]].buckets[cal.bucket()]
    }

    /// Context features in the fixed order time, weekday, gender,
    /// occupation, age, device, reserved.
    pub fn context(&self, user: usize, slot: usize) -> ContextVector {
        let cal = self.calendar(slot);
        let p = self.archetypes[self.user_archetype[user]].profile;
        let f: [f64; CONTEXT_WIDTH] = [cal.hour as f64 / 23.0, cal.weekday as f64 / 6.0, p[0], p[1], p[2], p[3], 0.0];
        ContextVector::new(f.to_vec()).expect("finite features")
    }

    /// The content `user` requests at `slot`, a pure function of the seed.
    pub fn request(&self, user: usize, slot: usize, seed: u64) -> usize {
        let u: f64 = stream(seed, Purpose::Request, &[slot as u64, user as u64]).random();
        sample_index(self.distribution(user, slot), u)
    }
}
