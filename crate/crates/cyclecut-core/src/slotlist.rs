//! Membership list with O(1) insert/remove via back-pointers.

use alloc::vec::Vec;

const ABSENT: u32 = u32::MAX;

/// A set of small integer ids supporting constant-time insert, remove
/// and first/last access. `pos[id]` is the slot of `id` in `items`.
#[derive(Clone, Debug, Default)]
pub struct SlotList {
    items: Vec<u32>,
    pos: Vec<u32>,
}

impl SlotList {
    pub fn with_capacity(ids: usize) -> Self {
        SlotList { items: Vec::new(), pos: alloc::vec![ABSENT; ids] }
    }

    fn ensure(&mut self, id: u32) {
        if self.pos.len() <= id as usize {
            self.pos.resize(id as usize + 1, ABSENT);
        }
    }

    pub fn insert(&mut self, id: u32) {
        self.ensure(id);
        debug_assert_eq!(self.pos[id as usize], ABSENT);
        self.pos[id as usize] = self.items.len() as u32;
        self.items.push(id);
    }

    pub fn remove(&mut self, id: u32) {
        let slot = self.pos[id as usize];
        debug_assert_ne!(slot, ABSENT);
        self.pos[id as usize] = ABSENT;
        let last = self.items.pop().unwrap();
        if last != id {
            self.items[slot as usize] = last;
            self.pos[last as usize] = slot;
        }
    }

    #[cfg(test)]
    pub fn contains(&self, id: u32) -> bool {
        (id as usize) < self.pos.len() && self.pos[id as usize] != ABSENT
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// The id stored in slot `i`; slot order is unspecified.
    pub fn get(&self, i: usize) -> u32 {
        self.items[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn insert_remove_swaps() {
        let mut s = SlotList::with_capacity(4);
        s.insert(1);
        s.insert(3);
        s.insert(2);
        assert_eq!(s.len(), 3);
        s.remove(1);
        assert!(!s.contains(1));
        assert!(s.contains(3) && s.contains(2));
        s.remove(2);
        s.remove(3);
        assert!(s.is_empty());
    }
}
