//! Definability by formulas with at most `k` variables and quantifier
//! depth at most `d`, computed by refining the types of partial pebble
//! placements.

use restrule::structures::{tuples, Structure};
use std::collections::HashMap;

/// Positions are base-`(n + 1)` numbers; digit 0 means the pebble is off
/// the board, digit `e + 1` that it sits on element `e`.
struct Board {
    n: usize,
    k: usize,
    weight: Vec<usize>,
}

impl Board {
    fn new(n: usize, k: usize) -> Self {
        let weight = (0..k).map(|i| (n + 1).pow((k - 1 - i) as u32)).collect();
        Board { n, k, weight }
    }

    fn len(&self) -> usize {
        (self.n + 1).pow(self.k as u32)
    }

    fn digit(&self, p: usize, i: usize) -> usize {
        p / self.weight[i] % (self.n + 1)
    }

    fn place(&self, p: usize, i: usize, e: usize) -> usize {
        p - self.digit(p, i) * self.weight[i] + (e + 1) * self.weight[i]
    }
}

struct Interner {
    ids: HashMap<Vec<u32>, u32>,
}

impl Interner {
    fn new() -> Self {
        Interner {
            ids: HashMap::new(),
        }
    }

    fn id(&mut self, key: &[u32]) -> u32 {
        if let Some(&i) = self.ids.get(key) {
            return i;
        }
        let i = self.ids.len() as u32;
        self.ids.insert(key.to_vec(), i);
        i
    }
}

/// Elements `a` whose placement `x0 := a` has a type no other element shares.
pub fn definable(a: &Structure, k: usize, d: usize) -> Vec<usize> {
    let n = a.size();
    let board = Board::new(n, k);
    let tables: Vec<(usize, Vec<bool>)> = a
        .vocab()
        .relations()
        .map(|(r, ar)| {
            (
                ar,
                tuples(n, ar)
                    .map(|t| a.holds(r, &t).unwrap_or(false))
                    .collect(),
            )
        })
        .collect();
    let consts: Vec<usize> = a.constants().map(|(_, e)| e).collect();
    let width = k + consts.len();
    let picks: Vec<Vec<Vec<usize>>> = tables
        .iter()
        .map(|(ar, _)| tuples(width, *ar).collect())
        .collect();
    let mut key: Vec<u32> = Vec::new();
    let mut atoms = Interner::new();
    let mut class: Vec<u32> = (0..board.len())
        .map(|p| {
            key.clear();
            let terms: Vec<Option<usize>> = (0..k)
                .map(|i| board.digit(p, i).checked_sub(1))
                .chain(consts.iter().map(|&c| Some(c)))
                .collect();
            for (i, s) in terms.iter().enumerate() {
                for t in &terms[i + 1..] {
                    key.push(match (s, t) {
                        (Some(x), Some(y)) => 1 + (x == y) as u32,
                        _ => 0,
                    });
                }
            }
            for ((_, cells), picks) in tables.iter().zip(&picks) {
                for pick in picks {
                    let mut at = 0;
                    let mut placed = true;
                    for &i in pick {
                        match terms[i] {
                            Some(e) => at = at * n + e,
                            None => placed = false,
                        }
                    }
                    key.push(if placed { 1 + cells[at] as u32 } else { 0 });
                }
            }
            atoms.id(&key)
        })
        .collect();
    let mut count = atoms.ids.len();
    let mut moves: Vec<u32> = Vec::with_capacity(n);
    for _ in 0..d {
        let mut ids = Interner::new();
        let refined: Vec<u32> = (0..board.len())
            .map(|p| {
                key.clear();
                key.push(class[p]);
                for i in 0..k {
                    moves.clear();
                    moves.extend((0..n).map(|e| class[board.place(p, i, e)]));
                    moves.sort_unstable();
                    moves.dedup();
                    key.extend_from_slice(&moves);
                    key.push(u32::MAX);
                }
                ids.id(&key)
            })
            .collect();
        class = refined;
        if ids.ids.len() == count {
            break;
        }
        count = ids.ids.len();
    }
    let start = |e: usize| class[board.place(0, 0, e)];
    (0..n)
        .filter(|&e| (0..n).all(|b| b == e || start(b) != start(e)))
        .collect()
}
