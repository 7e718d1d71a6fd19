//! Global rate limiter enforcing both the sliding requests-per-minute window
//! and the minimum inter-call spacing across all concurrent callers.

use super::clock::Clock;
use std::collections::VecDeque;
use std::sync::Mutex;
use std::time::Duration;

const WINDOW: Duration = Duration::from_secs(60);

pub struct RateLimiter {
    rpm: usize,
    min_gap: Duration,
    state: Mutex<LimiterState>,
}

#[derive(Default)]
struct LimiterState {
    /// Start times within the last window, ascending.
    starts: VecDeque<Duration>,
    last_start: Option<Duration>,
}

impl RateLimiter {
    pub fn new(requests_per_minute: u32, min_inter_call_delay: Duration) -> Self {
        RateLimiter {
            rpm: requests_per_minute as usize,
            min_gap: min_inter_call_delay,
            state: Mutex::new(LimiterState::default()),
        }
    }

    /// Block (on the injected clock) until a start slot is admissible, then
    /// record and return the start time. Admission happens under the lock so
    /// the invariants hold across concurrent callers.
    pub fn acquire(&self, clock: &dyn Clock) -> Duration {
        loop {
            let now = clock.now();
            let mut state = self.state.lock().unwrap();
            // a start s has left the sliding window once s + WINDOW <= now
            while state.starts.front().is_some_and(|&s| s + WINDOW <= now) {
                state.starts.pop_front();
            }
            let mut earliest = now;
            if let Some(last) = state.last_start {
                earliest = earliest.max(last + self.min_gap);
            }
            if state.starts.len() >= self.rpm {
                let blocking = state.starts[state.starts.len() - self.rpm];
                earliest = earliest.max(blocking + WINDOW);
            }
            if earliest <= now {
                state.starts.push_back(now);
                state.last_start = Some(now);
                return now;
            }
            let wait = earliest - now;
            drop(state);
            clock.sleep(wait);
        }
    }
}
