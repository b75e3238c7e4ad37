//! The interpreter and the resolver recurse natively over program
//! syntax, so deep candidate programs need more stack than the 8 MB
//! default thread allowance. Every entry point that may run them goes
//! through here.

const STACK_BYTES: usize = 64 * 1024 * 1024;

pub fn with_big_stack<T, F>(f: F) -> T
where
    T: Send + 'static,
    F: FnOnce() -> T + Send + 'static,
{
    std::thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn(f)
        .expect("spawn worker thread")
        .join()
        .expect("worker thread panicked")
}

/// Scoped variant for worker pools; the closure may borrow from the
/// caller's stack.
pub fn spawn_scoped_big<'scope, 'env, T, F>(
    scope: &'scope std::thread::Scope<'scope, 'env>,
    f: F,
) -> std::thread::ScopedJoinHandle<'scope, T>
where
    T: Send + 'scope,
    F: FnOnce() -> T + Send + 'scope,
{
    std::thread::Builder::new()
        .stack_size(STACK_BYTES)
        .spawn_scoped(scope, f)
        .expect("spawn scoped worker")
}
