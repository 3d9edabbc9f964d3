//! Algorithm X over dancing links.
//!
//! Column choice is deterministic: fewest remaining options first, ties by
//! item index. The search is iterative because factor instances on large
//! boards go hundreds of thousands of levels deep.

use std::collections::BTreeSet;

pub struct ExactCover {
    items: usize,
    up: Vec<usize>,
    down: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
    col: Vec<usize>,
    row: Vec<usize>,
    size: Vec<usize>,
    active: BTreeSet<(usize, usize)>,
    rows: usize,
}

impl ExactCover {
    pub fn new(items: usize) -> Self {
        ExactCover {
            items,
            up: (0..items).collect(),
            down: (0..items).collect(),
            left: (0..items).collect(),
            right: (0..items).collect(),
            col: (0..items).collect(),
            row: vec![usize::MAX; items],
            size: vec![0; items],
            active: BTreeSet::new(),
            rows: 0,
        }
    }

    pub fn option_count(&self) -> usize {
        self.rows
    }

    /// Adds an option covering `items` (distinct, each `< self.items`).
    pub fn add_option(&mut self, items: &[usize]) {
        assert!(!items.is_empty(), "empty option");
        let row = self.rows;
        self.rows += 1;
        let first = self.up.len();
        for (i, &c) in items.iter().enumerate() {
            assert!(c < self.items, "item {c} out of range");
            let node = first + i;
            let bottom = self.up[c];
            self.up.push(bottom);
            self.down.push(c);
            self.down[bottom] = node;
            self.up[c] = node;
            self.left.push(if i == 0 { first + items.len() - 1 } else { node - 1 });
            self.right.push(if i + 1 == items.len() { first } else { node + 1 });
            self.col.push(c);
            self.row.push(row);
            self.size[c] += 1;
        }
    }

    fn shrink(&mut self, c: usize) {
        self.active.remove(&(self.size[c], c));
        self.size[c] -= 1;
        self.active.insert((self.size[c], c));
    }

    fn grow(&mut self, c: usize) {
        self.active.remove(&(self.size[c], c));
        self.size[c] += 1;
        self.active.insert((self.size[c], c));
    }

    fn cover(&mut self, c: usize) {
        self.active.remove(&(self.size[c], c));
        let mut i = self.down[c];
        while i != c {
            let mut j = self.right[i];
            while j != i {
                let (u, d) = (self.up[j], self.down[j]);
                self.up[d] = u;
                self.down[u] = d;
                self.shrink(self.col[j]);
                j = self.right[j];
            }
            i = self.down[i];
        }
    }

    fn uncover(&mut self, c: usize) {
        let mut i = self.up[c];
        while i != c {
            let mut j = self.left[i];
            while j != i {
                self.grow(self.col[j]);
                let (u, d) = (self.up[j], self.down[j]);
                self.up[d] = j;
                self.down[u] = j;
                j = self.left[j];
            }
            i = self.up[i];
        }
        self.active.insert((self.size[c], c));
    }

    fn select(&mut self, r: usize) {
        let mut j = self.right[r];
        while j != r {
            self.cover(self.col[j]);
            j = self.right[j];
        }
    }

    fn deselect(&mut self, r: usize) {
        let mut j = self.left[r];
        while j != r {
            self.uncover(self.col[j]);
            j = self.left[j];
        }
    }

    /// First exact cover found, as option indices in insertion order, or
    /// `None` if none exists. Consumes the instance.
    pub fn solve(mut self) -> Option<Vec<usize>> {
        self.active = (0..self.items).map(|c| (self.size[c], c)).collect();
        let mut stack: Vec<usize> = Vec::new();
        'descend: loop {
            match self.active.first().copied() {
                None => {
                    let mut rows: Vec<usize> = stack.iter().map(|&r| self.row[r]).collect();
                    rows.sort_unstable();
                    return Some(rows);
                }
                Some((s, c)) if s > 0 => {
                    self.cover(c);
                    let r = self.down[c];
                    self.select(r);
                    stack.push(r);
                    continue 'descend;
                }
                Some(_) => {}
            }
            // dead end: advance the deepest choice that still has options
            loop {
                let r = stack.pop()?;
                self.deselect(r);
                let c = self.col[r];
                let next = self.down[r];
                if next != c {
                    self.select(next);
                    stack.push(next);
                    continue 'descend;
                }
                self.uncover(c);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn knuth_example() {
        // the 7-item example from "Dancing Links"
        let mut x = ExactCover::new(7);
        let opts: [&[usize]; 6] = [&[2, 4, 5], &[0, 3, 6], &[1, 2, 5], &[0, 3], &[1, 6], &[3, 4, 6]];
        for o in opts {
            x.add_option(o);
        }
        assert_eq!(x.solve(), Some(vec![0, 3, 4]));
    }

    #[test]
    fn no_cover() {
        let mut x = ExactCover::new(3);
        x.add_option(&[0, 1]);
        x.add_option(&[1, 2]);
        assert_eq!(x.solve(), None);
        // an item with no options at all
        let mut y = ExactCover::new(2);
        y.add_option(&[0]);
        assert_eq!(y.solve(), None);
    }

    #[test]
    fn backtracks_past_first_choice() {
        let mut x = ExactCover::new(4);
        x.add_option(&[0, 1]);
        x.add_option(&[1, 2]);
        x.add_option(&[0, 3]);
        x.add_option(&[2]);
        assert_eq!(x.solve(), Some(vec![1, 2]));
    }

    #[test]
    fn deep_chain_does_not_overflow() {
        let n = 200_000;
        let mut x = ExactCover::new(n);
        for i in (0..n).step_by(2) {
            x.add_option(&[i, i + 1]);
        }
        assert_eq!(x.solve().map(|r| r.len()), Some(n / 2));
    }
}
