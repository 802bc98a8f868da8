//! Sliding-window replay buffer with uniform sampling.

use rand::Rng;

use crate::env::Transition;
use crate::error::{Error, Result};
use crate::rng::Stream;

/// Ring buffer of transitions in struct-of-arrays layout. Insertion beyond
/// capacity evicts the oldest entry.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    obs_dim: usize,
    act_dim: usize,
    states: Vec<f64>,
    actions: Vec<f64>,
    rewards: Vec<f64>,
    next_states: Vec<f64>,
    terminals: Vec<bool>,
    /// Index of the next slot to write.
    head: usize,
    size: usize,
}

/// A sampled minibatch, row-major.
#[derive(Debug, Clone, Default)]
pub struct TransitionBatch {
    pub states: Vec<f64>,
    pub actions: Vec<f64>,
    pub rewards: Vec<f64>,
    pub next_states: Vec<f64>,
    pub terminals: Vec<bool>,
    pub len: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, obs_dim: usize, act_dim: usize) -> Self {
        ReplayBuffer {
            capacity,
            obs_dim,
            act_dim,
            states: Vec::new(),
            actions: Vec::new(),
            rewards: Vec::new(),
            next_states: Vec::new(),
            terminals: Vec::new(),
            head: 0,
            size: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn obs_dim(&self) -> usize {
        self.obs_dim
    }

    pub fn act_dim(&self) -> usize {
        self.act_dim
    }

    /// Append one transition, evicting the oldest once full.
    pub fn push(&mut self, t: &Transition) -> Result<()> {
        if t.state.len() != self.obs_dim
            || t.next_state.len() != self.obs_dim
            || t.action.len() != self.act_dim
        {
            return Err(Error::invalid_input("transition dimensions do not match the buffer"));
        }
        if !t.is_finite() {
            return Err(Error::numeric("non-finite transition rejected"));
        }
        if self.size < self.capacity {
            self.states.extend_from_slice(&t.state);
            self.actions.extend_from_slice(&t.action);
            self.rewards.push(t.reward);
            self.next_states.extend_from_slice(&t.next_state);
            self.terminals.push(t.terminal);
            self.size += 1;
        } else {
            let s = self.head * self.obs_dim;
            self.states[s..s + self.obs_dim].copy_from_slice(&t.state);
            self.next_states[s..s + self.obs_dim].copy_from_slice(&t.next_state);
            let a = self.head * self.act_dim;
            self.actions[a..a + self.act_dim].copy_from_slice(&t.action);
            self.rewards[self.head] = t.reward;
            self.terminals[self.head] = t.terminal;
        }
        self.head = (self.head + 1) % self.capacity;
        Ok(())
    }

    /// The `i`-th stored transition in insertion order (0 = oldest).
    pub fn get(&self, i: usize) -> Option<Transition> {
        if i >= self.size {
            return None;
        }
        let slot = if self.size < self.capacity { i } else { (self.head + i) % self.capacity };
        let s = slot * self.obs_dim;
        let a = slot * self.act_dim;
        Some(Transition {
            state: self.states[s..s + self.obs_dim].to_vec(),
            action: self.actions[a..a + self.act_dim].to_vec(),
            reward: self.rewards[slot],
            next_state: self.next_states[s..s + self.obs_dim].to_vec(),
            terminal: self.terminals[slot],
        })
    }

    /// Draw `n` transitions uniformly with replacement into `batch`.
    pub fn sample_into(&self, n: usize, rng: &mut Stream, batch: &mut TransitionBatch) -> Result<()> {
        if self.size == 0 {
            return Err(Error::invalid_state("cannot sample from an empty replay buffer"));
        }
        batch.len = n;
        batch.states.clear();
        batch.actions.clear();
        batch.rewards.clear();
        batch.next_states.clear();
        batch.terminals.clear();
        for _ in 0..n {
            let slot = rng.random_range(0..self.size);
            let s = slot * self.obs_dim;
            let a = slot * self.act_dim;
            batch.states.extend_from_slice(&self.states[s..s + self.obs_dim]);
            batch.actions.extend_from_slice(&self.actions[a..a + self.act_dim]);
            batch.rewards.push(self.rewards[slot]);
            batch.next_states.extend_from_slice(&self.next_states[s..s + self.obs_dim]);
            batch.terminals.push(self.terminals[slot]);
        }
        Ok(())
    }

    /// Draw `n` transitions uniformly with replacement.
    pub fn sample(&self, n: usize, rng: &mut Stream) -> Result<TransitionBatch> {
        let mut batch = TransitionBatch::default();
        self.sample_into(n, rng, &mut batch)?;
        Ok(batch)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn t(v: f64) -> Transition {
        Transition {
            state: vec![v, v + 0.5],
            action: vec![-v],
            reward: v * 10.0,
            next_state: vec![v + 1.0, v + 1.5],
            terminal: false,
        }
    }

    #[test]
    fn fifo_eviction_beyond_capacity() {
        let mut buf = ReplayBuffer::new(3, 2, 1);
        for k in 0..4 {
            buf.push(&t(k as f64)).unwrap();
        }
        assert_eq!(buf.len(), 3);
        // Oldest entry (0) evicted; contents are pushes 1, 2, 3 in order.
        for (i, expect) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert_eq!(buf.get(i).unwrap().reward, expect * 10.0);
        }
        assert!(buf.get(3).is_none());
    }

    #[test]
    fn size_tracks_pushes_up_to_capacity() {
        let mut buf = ReplayBuffer::new(10, 2, 1);
        for k in 0..7 {
            buf.push(&t(k as f64)).unwrap();
            assert_eq!(buf.len(), k + 1);
        }
    }

    #[test]
    fn singleton_buffer_sampling() {
        let mut buf = ReplayBuffer::new(8, 2, 1);
        buf.push(&t(2.0)).unwrap();
        let mut rng = rng::stream(0, &[rng::tag::BUFFER]);
        let batch = buf.sample(64, &mut rng).unwrap();
        assert_eq!(batch.len, 64);
        assert!(batch.rewards.iter().all(|&r| r == 20.0));
    }

    #[test]
    fn empty_buffer_sampling_is_a_state_error() {
        let buf = ReplayBuffer::new(8, 2, 1);
        let mut rng = rng::stream(0, &[rng::tag::BUFFER]);
        assert!(matches!(buf.sample(1, &mut rng), Err(Error::InvalidState(_))));
    }

    #[test]
    fn non_finite_transition_is_rejected() {
        let mut buf = ReplayBuffer::new(8, 2, 1);
        let mut bad = t(1.0);
        bad.reward = f64::NAN;
        assert!(matches!(buf.push(&bad), Err(Error::Numeric(_))));
        assert_eq!(buf.len(), 0);
    }

    #[test]
    fn sampling_is_uniform() {
        // Multinomial concentration: 1e5 draws over 10 elements.
        let mut buf = ReplayBuffer::new(10, 2, 1);
        for k in 0..10 {
            buf.push(&t(k as f64)).unwrap();
        }
        let mut rng = rng::stream(1, &[rng::tag::BUFFER]);
        let mut counts = [0usize; 10];
        let draws = 100_000;
        let batch = buf.sample(draws, &mut rng).unwrap();
        for &r in &batch.rewards {
            counts[(r / 10.0) as usize] += 1;
        }
        for &c in &counts {
            let f = c as f64 / draws as f64;
            assert!((0.09..=0.11).contains(&f), "frequency {f}");
        }
    }

    #[test]
    fn same_seed_same_batch() {
        let mut buf = ReplayBuffer::new(16, 2, 1);
        for k in 0..16 {
            buf.push(&t(k as f64)).unwrap();
        }
        let a = buf.sample(32, &mut rng::stream(9, &[rng::tag::BUFFER])).unwrap();
        let b = buf.sample(32, &mut rng::stream(9, &[rng::tag::BUFFER])).unwrap();
        assert_eq!(a.rewards, b.rewards);
        assert_eq!(a.states, b.states);
    }

    #[test]
    fn sliding_window_matches_last_k_pushes() {
        let mut buf = ReplayBuffer::new(5, 2, 1);
        let total = 13;
        for k in 0..total {
            buf.push(&t(k as f64)).unwrap();
        }
        for i in 0..5 {
            let expect = (total - 5 + i) as f64;
            assert_eq!(buf.get(i).unwrap().reward, expect * 10.0);
        }
    }
}
