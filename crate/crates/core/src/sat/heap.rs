/// Max-heap of variable indices ordered by an external activity table.
#[derive(Debug, Default, Clone)]
pub(crate) struct VarHeap {
    heap: Vec<u32>,
    pos: Vec<i32>,
}

impl VarHeap {
    pub fn grow(&mut self, n: usize) {
        if self.pos.len() < n {
            self.pos.resize(n, -1);
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.pos.get(v).is_some_and(|&p| p >= 0)
    }

    pub fn insert(&mut self, v: usize, act: &[f64]) {
        self.grow(v + 1);
        if self.contains(v) {
            return;
        }
        self.pos[v] = self.heap.len() as i32;
        self.heap.push(v as u32);
        self.sift_up(self.heap.len() - 1, act);
    }

    /// Restores heap order after `v`'s activity increased.
    pub fn increased(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v] as usize, act);
        }
    }

    pub fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0] as usize;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top] = -1;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn better(a: u32, b: u32, act: &[f64]) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::better(v, self.heap[parent], act) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = i as i32;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let left = 2 * i + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && Self::better(self.heap[right], self.heap[left], act) {
                right
            } else {
                left
            };
            if !Self::better(self.heap[child], v, act) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i] as usize] = i as i32;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as i32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_in_activity_order_with_index_tiebreak() {
        let act = vec![1.0, 5.0, 3.0, 5.0, 0.5];
        let mut h = VarHeap::default();
        for v in 0..5 {
            h.insert(v, &act);
        }
        let order: Vec<_> = std::iter::from_fn(|| h.pop(&act)).collect();
        assert_eq!(order, vec![1, 3, 2, 0, 4]);
    }

    #[test]
    fn increase_reorders() {
        let mut act = vec![1.0, 2.0, 3.0];
        let mut h = VarHeap::default();
        for v in 0..3 {
            h.insert(v, &act);
        }
        act[0] = 10.0;
        h.increased(0, &act);
        assert_eq!(h.pop(&act), Some(0));
    }
}
