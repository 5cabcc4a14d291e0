//! Request pacing for the remote backend: a token bucket for requests per
//! minute plus a cap on concurrent in-flight requests.

use std::sync::{Condvar, Mutex};
use std::time::{Duration, Instant};

#[derive(Debug)]
struct Bucket {
    tokens: f64,
    last: Instant,
}

#[derive(Debug)]
pub struct RateLimiter {
    per_minute: Option<u32>,
    bucket: Mutex<Bucket>,
    max_in_flight: usize,
    in_flight: Mutex<usize>,
    freed: Condvar,
}

/// Releases the in-flight slot on drop.
pub struct Permit<'a> {
    limiter: &'a RateLimiter,
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        let mut n = self.limiter.in_flight.lock().unwrap_or_else(|e| e.into_inner());
        *n -= 1;
        self.limiter.freed.notify_one();
    }
}

impl RateLimiter {
    /// `per_minute = None` disables pacing; `max_in_flight = 0` means one.
    pub fn new(per_minute: Option<u32>, max_in_flight: usize) -> Self {
        let burst = per_minute.map_or(0.0, f64::from);
        RateLimiter {
            per_minute: per_minute.filter(|&r| r > 0),
            bucket: Mutex::new(Bucket {
                tokens: burst,
                last: Instant::now(),
            }),
            max_in_flight: max_in_flight.max(1),
            in_flight: Mutex::new(0),
            freed: Condvar::new(),
        }
    }

    /// Blocks until a request may start.
    pub fn acquire(&self) -> Permit<'_> {
        {
            let mut n = self.in_flight.lock().unwrap_or_else(|e| e.into_inner());
            while *n >= self.max_in_flight {
                n = self.freed.wait(n).unwrap_or_else(|e| e.into_inner());
            }
            *n += 1;
        }
        if let Some(rate) = self.per_minute {
            let per_sec = f64::from(rate) / 60.0;
            loop {
                let wait = {
                    let mut b = self.bucket.lock().unwrap_or_else(|e| e.into_inner());
                    let now = Instant::now();
                    let refill = now.duration_since(b.last).as_secs_f64() * per_sec;
                    b.tokens = (b.tokens + refill).min(f64::from(rate));
                    b.last = now;
                    if b.tokens >= 1.0 {
                        b.tokens -= 1.0;
                        break;
                    }
                    (1.0 - b.tokens) / per_sec
                };
                std::thread::sleep(Duration::from_secs_f64(wait));
            }
        }
        Permit { limiter: self }
    }

    pub fn in_flight(&self) -> usize {
        *self.in_flight.lock().unwrap_or_else(|e| e.into_inner())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    #[test]
    fn caps_concurrency() {
        let lim = RateLimiter::new(None, 2);
        let peak = AtomicUsize::new(0);
        std::thread::scope(|s| {
            for _ in 0..6 {
                s.spawn(|| {
                    let _p = lim.acquire();
                    peak.fetch_max(lim.in_flight(), Ordering::SeqCst);
                    std::thread::sleep(Duration::from_millis(20));
                });
            }
        });
        assert!(peak.load(Ordering::SeqCst) <= 2);
        assert_eq!(lim.in_flight(), 0);
    }

    #[test]
    fn paces_after_burst() {
        // 600/min = one every 100ms after the burst is spent.
        let lim = RateLimiter::new(Some(600), 4);
        {
            let mut b = lim.bucket.lock().unwrap();
            b.tokens = 1.0;
        }
        let start = Instant::now();
        drop(lim.acquire());
        drop(lim.acquire());
        assert!(start.elapsed() >= Duration::from_millis(80));
    }
}
