use super::{BackendError, CompletionBackend, CompletionParams};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

pub const DEFAULT_PARALLELISM: usize = 4;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed: distinct for every trial, stable across runs.
pub fn derive_seed(seed: u64, trial: usize) -> u64 {
    splitmix64(seed ^ splitmix64(trial as u64))
}

/// Requests `params.trials` independent completions, at most `parallelism`
/// at a time, and returns them in trial order.
///
/// Each call sees its trial index and, when `params.seed` is set, the
/// derived seed for that trial. On the first failure no further trials are
/// started and the error of the lowest failing trial is returned.
pub fn sample_n<B>(
    backend: &B,
    prompt: &str,
    params: &CompletionParams,
    parallelism: usize,
) -> Result<Vec<String>, BackendError>
where
    B: CompletionBackend + ?Sized,
{
    params.validate()?;
    let trials = params.trials;
    let next = AtomicUsize::new(0);
    let cancelled = AtomicBool::new(false);
    let results: Mutex<Vec<Option<String>>> = Mutex::new(vec![None; trials]);
    let failure: Mutex<Option<(usize, BackendError)>> = Mutex::new(None);

    let worker = || loop {
        if cancelled.load(Ordering::Acquire) {
            break;
        }
        let t = next.fetch_add(1, Ordering::AcqRel);
        if t >= trials {
            break;
        }
        let call = CompletionParams {
            trial: t,
            seed: params.seed.map(|s| derive_seed(s, t)),
            ..params.clone()
        };
        match backend.complete(prompt, &call) {
            Ok(text) => results.lock().unwrap()[t] = Some(text),
            Err(e) => {
                cancelled.store(true, Ordering::Release);
                let mut slot = failure.lock().unwrap();
                if slot.as_ref().is_none_or(|(first, _)| t < *first) {
                    *slot = Some((t, e));
                }
                break;
            }
        }
    };

    let threads = parallelism.clamp(1, trials);
    if threads == 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(worker);
            }
        });
    }

    if let Some((_, e)) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok(results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every trial completed"))
        .collect())
}
