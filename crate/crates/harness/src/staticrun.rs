//! Static evaluation with a bounded worker pool.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use dronebench_core::metrics::Judge;
use dronebench_core::staticeval::{assemble_report, score_item, ItemResult, QAItem, StaticAgent, StaticReport};

/// Each worker builds its own agent and judge; results are assembled in
/// id order, so the report does not depend on scheduling.
pub fn run_parallel<A, J>(
    items: &[QAItem],
    concurrency: usize,
    judge_attempts: u32,
    make_agent: impl Fn() -> A + Sync,
    make_judge: impl Fn() -> J + Sync,
) -> StaticReport
where
    A: StaticAgent,
    J: Judge,
{
    let next = AtomicUsize::new(0);
    let results = Mutex::new(Vec::with_capacity(items.len()));
    let workers = concurrency.clamp(1, items.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| {
                let mut agent = make_agent();
                let mut judge = make_judge();
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(item) = items.get(i) else { break };
                    let r = match agent.answer(item) {
                        Ok(text) => score_item(item, &text, &mut judge, judge_attempts),
                        Err(e) => ItemResult::failed(item, e),
                    };
                    results.lock().expect("no worker panics while holding the lock").push(r);
                }
            });
        }
    });
    assemble_report(results.into_inner().expect("workers joined"))
}
