use std::collections::VecDeque;

use rand::SeedableRng;
use rand_distr::{Distribution, Exp};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::{Class, Discipline, ReplicationRecord, SimConfig};
use crate::error::{ModelError, Result};

/// Exponential clock; a zero rate never fires.
#[derive(Clone, Copy)]
struct Clock(Option<Exp<f64>>);

impl Clock {
    fn new(rate: f64) -> Result<Self> {
        if rate == 0.0 {
            return Ok(Clock(None));
        }
        Exp::new(rate)
            .map(|e| Clock(Some(e)))
            .map_err(|e| ModelError::Config(format!("bad exponential rate {rate}: {e}")))
    }

    fn draw(&self, rng: &mut Xoshiro256PlusPlus) -> f64 {
        self.0.map_or(f64::INFINITY, |e| e.sample(rng))
    }
}

struct Sim<'a> {
    config: &'a SimConfig,
    rng: Xoshiro256PlusPlus,
    arrival_clock: [Clock; 2],
    service_clock: [Clock; 2],
    capacity: [usize; 2],
    now: f64,
    window_start: f64,
    window_end: f64,
    next_arrival: [f64; 2],
    /// Completion time of the service in progress for each class.
    completion: [Option<f64>; 2],
    /// Work left on a preempted NRT head-of-line customer.
    nrt_remaining: Option<f64>,
    /// Arrival times, head of line first; the customer in service is at the front.
    queue: [VecDeque<f64>; 2],
    rec: ReplicationRecord,
}

impl<'a> Sim<'a> {
    fn new(config: &'a SimConfig, seed: u64) -> Result<Self> {
        let p = &config.params;
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let arrival_clock = [Clock::new(p.lambda_rt)?, Clock::new(p.lambda_nrt)?];
        let service_clock = [Clock::new(p.mu_rt)?, Clock::new(p.mu_nrt)?];
        let next_arrival = [arrival_clock[0].draw(&mut rng), arrival_clock[1].draw(&mut rng)];
        Ok(Self {
            config,
            rng,
            arrival_clock,
            service_clock,
            capacity: [config.buffer.r_threshold(), config.buffer.n_capacity()],
            now: 0.0,
            window_start: config.warmup,
            window_end: config.warmup + config.horizon,
            next_arrival,
            completion: [None; 2],
            nrt_remaining: None,
            queue: [VecDeque::new(), VecDeque::new()],
            rec: ReplicationRecord {
                seed,
                arrivals: [0; 2],
                losses: [0; 2],
                departures: [0; 2],
                in_system_at_end: [0; 2],
                max_occupancy: [0; 2],
                window_arrivals: [0; 2],
                window_losses: [0; 2],
                delay_count: [0; 2],
                delay_sum: [0.0; 2],
                occupancy_area: [0.0; 2],
                window: config.horizon,
            },
        })
    }

    fn run(mut self) -> ReplicationRecord {
        loop {
            let (t, event) = self.next_event();
            self.advance_to(t.min(self.window_end));
            if t > self.window_end {
                break;
            }
            match event {
                Event::Arrival(c) => self.arrive(c),
                Event::Departure(c) => self.depart(c),
            }
            self.dispatch();
        }
        self.rec.in_system_at_end = [self.queue[0].len() as u64, self.queue[1].len() as u64];
        self.rec
    }

    fn next_event(&self) -> (f64, Event) {
        let mut best = (self.next_arrival[0], Event::Arrival(Class::Rt));
        let candidates = [
            (Some(self.next_arrival[1]), Event::Arrival(Class::Nrt)),
            (self.completion[0], Event::Departure(Class::Rt)),
            (self.completion[1], Event::Departure(Class::Nrt)),
        ];
        for (time, event) in candidates {
            if let Some(t) = time {
                if t < best.0 {
                    best = (t, event);
                }
            }
        }
        best
    }

    /// Moves the clock forward, accumulating occupancy inside the window.
    fn advance_to(&mut self, t: f64) {
        let from = self.now.max(self.window_start);
        if t > from {
            for c in 0..2 {
                self.rec.occupancy_area[c] += self.queue[c].len() as f64 * (t - from);
            }
        }
        self.now = t;
    }

    fn in_window(&self) -> bool {
        self.now >= self.window_start
    }

    fn arrive(&mut self, class: Class) {
        let c = class.idx();
        self.rec.arrivals[c] += 1;
        let counted = self.in_window();
        if counted {
            self.rec.window_arrivals[c] += 1;
        }
        if self.queue[c].len() >= self.capacity[c] {
            self.rec.losses[c] += 1;
            if counted {
                self.rec.window_losses[c] += 1;
            }
        } else {
            self.queue[c].push_back(self.now);
            self.rec.max_occupancy[c] = self.rec.max_occupancy[c].max(self.queue[c].len());
        }
        self.next_arrival[c] = self.now + self.arrival_clock[c].draw(&mut self.rng);
    }

    fn depart(&mut self, class: Class) {
        let c = class.idx();
        let arrived = self.queue[c]
            .pop_front()
            .expect("departure from a non-empty queue");
        self.completion[c] = None;
        self.rec.departures[c] += 1;
        if arrived >= self.window_start {
            self.rec.delay_count[c] += 1;
            self.rec.delay_sum[c] += self.now - arrived;
        }
    }

    fn start(&mut self, class: Class) {
        let c = class.idx();
        let work = match class {
            Class::Nrt => self.nrt_remaining.take(),
            Class::Rt => None,
        }
        .unwrap_or_else(|| self.service_clock[c].draw(&mut self.rng));
        self.completion[c] = Some(self.now + work);
    }

    /// Starts, resumes or preempts services after a state change.
    fn dispatch(&mut self) {
        let (rt, nrt) = (Class::Rt.idx(), Class::Nrt.idx());
        match self.config.discipline {
            Discipline::IndependentClassService => {
                for class in Class::BOTH {
                    let c = class.idx();
                    if !self.queue[c].is_empty() && self.completion[c].is_none() {
                        self.start(class);
                    }
                }
            }
            Discipline::PreemptiveResume => {
                if !self.queue[rt].is_empty() {
                    if let Some(done) = self.completion[nrt].take() {
                        self.nrt_remaining = Some(done - self.now);
                    }
                    if self.completion[rt].is_none() {
                        self.start(Class::Rt);
                    }
                } else if !self.queue[nrt].is_empty() && self.completion[nrt].is_none() {
                    self.start(Class::Nrt);
                }
            }
            Discipline::NonPreemptivePriority => {
                let idle = self.completion.iter().all(Option::is_none);
                if idle {
                    if !self.queue[rt].is_empty() {
                        self.start(Class::Rt);
                    } else if !self.queue[nrt].is_empty() {
                        self.start(Class::Nrt);
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy)]
enum Event {
    Arrival(Class),
    Departure(Class),
}

/// Simulates one replication of `config` driven by `seed`.
pub fn run_replication(config: &SimConfig, seed: u64) -> Result<ReplicationRecord> {
    config.validate()?;
    Ok(Sim::new(config, seed)?.run())
}
