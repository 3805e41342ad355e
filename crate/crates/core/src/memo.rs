//! Process-wide memo tables for recursive constructions.

use rustc_hash::FxHashMap as HashMap;
use std::hash::Hash;
use std::sync::{Mutex, OnceLock};

pub(crate) struct Memo<K, V> {
    cell: OnceLock<Mutex<HashMap<K, V>>>,
}

impl<K: Eq + Hash + Clone, V: Clone> Memo<K, V> {
    pub(crate) const fn new() -> Self {
        Memo {
            cell: OnceLock::new(),
        }
    }

    /// Looks up `key`, computing and storing it on a miss.  The lock is not
    /// held while computing, so recursive constructions may re-enter.
    pub(crate) fn get_or<E>(&self, key: K, f: impl FnOnce() -> Result<V, E>) -> Result<V, E> {
        let map = self.cell.get_or_init(|| Mutex::new(HashMap::default()));
        if let Some(v) = map.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = f()?;
        map.lock().unwrap().entry(key).or_insert_with(|| v.clone());
        Ok(v)
    }
}
