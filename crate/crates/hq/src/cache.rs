use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use hq_core::{BigRational, KernelSet};

/// Kernel sets keyed on `(n, a, b)` with exact endpoints. Safe to share
/// between threads; concurrent misses may build the same set twice, and the
/// first insert wins.
#[derive(Debug, Default)]
pub struct KernelCache {
    entries: RwLock<HashMap<(usize, BigRational, BigRational), Arc<KernelSet>>>,
}

impl KernelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(&self, n: usize, a: &BigRational, b: &BigRational) -> hq_core::Result<Arc<KernelSet>> {
        let key = (n, a.clone(), b.clone());
        if let Some(hit) = self.entries.read().expect("kernel cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let built = Arc::new(KernelSet::new(n, a, b)?);
        let mut entries = self.entries.write().expect("kernel cache poisoned");
        Ok(Arc::clone(entries.entry(key).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("kernel cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use hq_core::ratio;

    #[test]
    fn hits_share_the_same_set() {
        let cache = KernelCache::new();
        let first = cache.get_or_build(3, &ratio(0, 1), &ratio(1, 1)).unwrap();
        let again = cache.get_or_build(3, &ratio(0, 1), &ratio(2, 2)).unwrap();
        assert!(Arc::ptr_eq(&first, &again));
        cache.get_or_build(3, &ratio(0, 1), &ratio(2, 1)).unwrap();
        assert_eq!(cache.len(), 2);
        assert!(cache.get_or_build(0, &ratio(0, 1), &ratio(1, 1)).is_err());
    }

    #[test]
    fn concurrent_access() {
        let cache = Arc::new(KernelCache::new());
        let handles: Vec<_> = (0..8)
            .map(|i| {
                let cache = Arc::clone(&cache);
                std::thread::spawn(move || cache.get_or_build(1 + i % 3, &ratio(-1, 1), &ratio(1, 1)).unwrap())
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert_eq!(cache.len(), 3);
    }
}
