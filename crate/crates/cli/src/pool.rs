//! A small fixed-size worker pool over an indexed job list. Results come
//! back in job order regardless of which worker ran them, so aggregate
//! output stays deterministic for any worker count.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Resolve a requested worker count: 0 means "use available parallelism",
/// and the pool never spawns more workers than there are jobs.
pub fn effective_jobs(requested: usize, jobs: usize) -> usize {
    let hardware = std::thread::available_parallelism().map_or(1, |n| n.get());
    let workers = if requested == 0 { hardware } else { requested };
    workers.min(jobs).max(1)
}

/// Run `work(i)` for every `i < jobs` on `workers` threads and return the
/// results indexed by `i`.
pub fn run_indexed<R, F>(jobs: usize, workers: usize, work: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    if jobs == 0 {
        return Vec::new();
    }
    let workers = workers.min(jobs).max(1);
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = (0..jobs).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= jobs {
                    break;
                }
                let result = work(i);
                *slots[i].lock().unwrap() = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().unwrap().expect("every job slot filled"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_come_back_in_job_order() {
        let out = run_indexed(20, 4, |i| i * i);
        assert_eq!(out, (0..20).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn single_worker_and_oversubscribed_agree() {
        let a = run_indexed(7, 1, |i| format!("job-{i}"));
        let b = run_indexed(7, 32, |i| format!("job-{i}"));
        assert_eq!(a, b);
    }

    #[test]
    fn zero_jobs_is_empty() {
        let out: Vec<u8> = run_indexed(0, 4, |_| unreachable!());
        assert!(out.is_empty());
    }

    #[test]
    fn effective_jobs_resolves_zero_and_caps() {
        assert!(effective_jobs(0, 100) >= 1);
        assert_eq!(effective_jobs(8, 3), 3);
        assert_eq!(effective_jobs(2, 100), 2);
        assert_eq!(effective_jobs(5, 0), 1);
    }
}
