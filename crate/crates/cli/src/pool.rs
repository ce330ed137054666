//! A small order-preserving worker pool. Tasks are pulled off a shared
//! counter; results land in their task slot, so the output order does not
//! depend on scheduling and reruns are byte-identical. The pool width is
//! capped by the GRAPHMASK_THREADS environment variable.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub fn pool_size(tasks: usize) -> usize {
    let available = std::env::var("GRAPHMASK_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|v| v.get())
                .unwrap_or(1)
        });
    available.min(tasks).max(1)
}

/// Run `work` over `0..tasks` on a bounded pool, returning results in task
/// order.
pub fn run<R, F>(tasks: usize, work: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync,
{
    let mut slots: Vec<Option<R>> = Vec::with_capacity(tasks);
    slots.resize_with(tasks, || None);
    let slots = Mutex::new(slots);
    let next = AtomicUsize::new(0);
    let workers = pool_size(tasks);

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let task = next.fetch_add(1, Ordering::Relaxed);
                if task >= tasks {
                    break;
                }
                let result = work(task);
                slots.lock().expect("pool lock").insert_result(task, result);
            });
        }
    });

    slots
        .into_inner()
        .expect("pool lock")
        .into_iter()
        .map(|slot| slot.expect("every task ran"))
        .collect()
}

trait SlotInsert<R> {
    fn insert_result(&mut self, task: usize, result: R);
}

impl<R> SlotInsert<R> for Vec<Option<R>> {
    fn insert_result(&mut self, task: usize, result: R) {
        self[task] = Some(result);
    }
}
