//! One-to-one assignment on rectangular grids with forbidden cells.
//!
//! The solver is the shortest-augmenting-path form of the Hungarian method,
//! `O(n² m)` for `n` rows and `m` columns. Forbidden cells are never offered
//! as edges. Every row of the shorter side also gets access to "unassigned"
//! slack columns, and costs are compared lexicographically as
//! `(unassigned rows, cost)`. That yields a maximum-cardinality matching and,
//! among those, an optimal one, without any large surrogate constant.
//!
//! Ties are resolved canonically: among optimal assignments the solver returns
//! the one whose column sequence over the shorter side (taken in index order,
//! with "unassigned" sorting last) is lexicographically smallest. The final
//! duals characterize every optimal assignment (tight edges plus coverage of
//! columns with nonzero dual), so the canonical choice is found greedily
//! without re-solving.

use std::cmp::Ordering;
use std::ops::{Add, AddAssign, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentProblem {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries; `None` is a forbidden cell.
    pub cells: Vec<Option<f64>>,
    pub objective: Objective,
}

impl AssignmentProblem {
    pub fn new(
        rows: usize,
        cols: usize,
        cells: Vec<Option<f64>>,
        objective: Objective,
    ) -> Result<Self> {
        let p = Self {
            rows,
            cols,
            cells,
            objective,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn from_rows(grid: &[Vec<Option<f64>>], objective: Objective) -> Result<Self> {
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if grid.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged assignment grid".into()));
        }
        Self::new(
            rows,
            cols,
            grid.iter().flatten().copied().collect(),
            objective,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Dimension(format!(
                "assignment grid must be at least 1x1, got {}x{}",
                self.rows, self.cols
            )));
        }
        if self.cells.len() != self.rows * self.cols {
            return Err(Error::Dimension(format!(
                "assignment grid holds {} cells, expected {}x{}",
                self.cells.len(),
                self.rows,
                self.cols
            )));
        }
        if let Some(pos) = self
            .cells
            .iter()
            .position(|c| matches!(c, Some(v) if !v.is_finite()))
        {
            return Err(Error::Dimension(format!(
                "non-finite entry at ({}, {}); forbidden cells must be explicit",
                pos / self.cols,
                pos % self.cols
            )));
        }
        Ok(())
    }

    pub fn get(&self, r: usize, c: usize) -> Option<f64> {
        self.cells[r * self.cols + c]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    /// Selected `(row, col)` cells, sorted by row.
    pub pairs: Vec<(usize, usize)>,
    pub objective_value: f64,
    /// Whether `min(rows, cols)` pairs were placed.
    pub complete: bool,
}

/// Lexicographic cost: `major` counts unassigned rows, `minor` is the cost.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Lex {
    major: f64,
    minor: f64,
}

impl Lex {
    const ZERO: Lex = Lex {
        major: 0.0,
        minor: 0.0,
    };
    const INF: Lex = Lex {
        major: f64::INFINITY,
        minor: f64::INFINITY,
    };
}

impl PartialOrd for Lex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.major.partial_cmp(&other.major)? {
            Ordering::Equal => self.minor.partial_cmp(&other.minor),
            ord => Some(ord),
        }
    }
}

impl Add for Lex {
    type Output = Lex;
    fn add(self, o: Lex) -> Lex {
        Lex {
            major: self.major + o.major,
            minor: self.minor + o.minor,
        }
    }
}

impl Sub for Lex {
    type Output = Lex;
    fn sub(self, o: Lex) -> Lex {
        Lex {
            major: self.major - o.major,
            minor: self.minor - o.minor,
        }
    }
}

impl AddAssign for Lex {
    fn add_assign(&mut self, o: Lex) {
        *self = *self + o;
    }
}

impl SubAssign for Lex {
    fn sub_assign(&mut self, o: Lex) {
        *self = *self - o;
    }
}

/// Working problem: `n <= m` real columns plus `n` slack columns.
struct Work<'a> {
    n: usize,
    m: usize,
    cost: &'a dyn Fn(usize, usize) -> Option<f64>,
}

impl Work<'_> {
    fn total_cols(&self) -> usize {
        self.m + self.n
    }

    fn edge(&self, i: usize, j: usize) -> Option<Lex> {
        if j < self.m {
            (self.cost)(i, j).map(|c| Lex {
                major: 0.0,
                minor: c,
            })
        } else {
            Some(Lex {
                major: 1.0,
                minor: 0.0,
            })
        }
    }
}

struct Solution {
    /// Column for each working row (slack columns are `>= m`).
    row_col: Vec<usize>,
    u: Vec<Lex>,
    v: Vec<Lex>,
}

fn hungarian(w: &Work<'_>) -> Solution {
    let n = w.n;
    let mt = w.total_cols();
    // 1-indexed; index 0 is the virtual root
    let mut u = vec![Lex::ZERO; n + 1];
    let mut v = vec![Lex::ZERO; mt + 1];
    let mut p = vec![0usize; mt + 1];
    let mut way = vec![0usize; mt + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![Lex::INF; mt + 1];
        let mut used = vec![false; mt + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = Lex::INF;
            let mut j1 = 0usize;
            for j in 1..=mt {
                if used[j] {
                    continue;
                }
                if let Some(c) = w.edge(i0 - 1, j - 1) {
                    let cur = c - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            // slack columns keep every row reachable
            debug_assert!(j1 != 0);
            for j in 0..=mt {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_col = vec![usize::MAX; n];
    for j in 1..=mt {
        if p[j] != 0 {
            row_col[p[j] - 1] = j - 1;
        }
    }
    Solution {
        row_col,
        u: u[1..].to_vec(),
        v: v[1..].to_vec(),
    }
}

/// Rearranges an optimal solution into the canonical optimum.
fn canonicalize(w: &Work<'_>, sol: &mut Solution, eps: f64) {
    let n = w.n;
    let mt = w.total_cols();
    let is_zero = |x: Lex| x.major == 0.0 && x.minor.abs() <= eps;
    let tight: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..mt)
                .filter(|&j| matches!(w.edge(i, j), Some(c) if is_zero(c - sol.u[i] - sol.v[j])))
                .collect()
        })
        .collect();
    // a column with nonzero dual must stay matched
    let pinned: Vec<bool> = sol.v.iter().map(|&x| !is_zero(x)).collect();
    let mut owner = vec![usize::MAX; mt];
    for (i, &j) in sol.row_col.iter().enumerate() {
        owner[j] = i;
    }

    // Find a new column for `r`, avoiding frozen rows; `target` may be taken
    // freely (it is about to be vacated). Returns the augmenting chain.
    fn reroute(
        r: usize,
        target: usize,
        tight: &[Vec<usize>],
        owner: &[usize],
        frozen: &[bool],
        seen: &mut [bool],
        chain: &mut Vec<(usize, usize)>,
        allow_free: bool,
    ) -> bool {
        for &c in &tight[r] {
            if seen[c] {
                continue;
            }
            seen[c] = true;
            let o = owner[c];
            if c == target || (o == usize::MAX && allow_free) {
                chain.push((r, c));
                return true;
            }
            if o != usize::MAX
                && !frozen[o]
                && reroute(o, target, tight, owner, frozen, seen, chain, allow_free)
            {
                chain.push((r, c));
                return true;
            }
        }
        false
    }

    let mut frozen = vec![false; n];
    for i in 0..n {
        let current = sol.row_col[i];
        let mut cands: Vec<usize> = tight[i].iter().copied().filter(|&c| c < w.m).collect();
        if current < w.m && !cands.contains(&current) {
            cands.push(current);
            cands.sort_unstable();
        }
        // every slack column is equivalent; try the current one if slack
        if current >= w.m {
            cands.push(current);
        } else if let Some(&s) = tight[i].iter().find(|&&c| c >= w.m) {
            cands.push(s);
        }
        for c in cands {
            if c == current {
                break;
            }
            let o = owner[c];
            if o != usize::MAX && frozen[o] {
                continue;
            }
            // vacating `current` is only allowed when its dual is zero
            let allow_free = !pinned[current];
            let mut chain = Vec::new();
            let ok = if o == usize::MAX {
                allow_free
            } else {
                let mut seen = vec![false; mt];
                seen[c] = true;
                frozen[i] = true;
                let found = reroute(
                    o, current, &tight, &owner, &frozen, &mut seen, &mut chain, allow_free,
                );
                frozen[i] = false;
                found
            };
            if !ok {
                continue;
            }
            for &(r, col) in &chain {
                sol.row_col[r] = col;
            }
            sol.row_col[i] = c;
            owner.fill(usize::MAX);
            for (r, &col) in sol.row_col.iter().enumerate() {
                owner[col] = r;
            }
            break;
        }
        frozen[i] = true;
    }
}

/// Optimal one-to-one assignment avoiding forbidden cells.
pub fn solve_assignment(problem: &AssignmentProblem) -> Result<Assignment> {
    problem.validate()?;
    let sign = match problem.objective {
        Objective::Minimize => 1.0,
        Objective::Maximize => -1.0,
    };
    let transposed = problem.rows > problem.cols;
    let (n, m) = if transposed {
        (problem.cols, problem.rows)
    } else {
        (problem.rows, problem.cols)
    };
    let cost = move |i: usize, j: usize| {
        let (r, c) = if transposed { (j, i) } else { (i, j) };
        problem.get(r, c).map(|x| sign * x)
    };
    let work = Work { n, m, cost: &cost };
    let mut sol = hungarian(&work);
    let scale = problem
        .cells
        .iter()
        .flatten()
        .fold(0.0f64, |acc, x| acc.max(x.abs()));
    canonicalize(
        &work,
        &mut sol,
        1e-11 * scale.max(1e-300) * (n as f64 + 1.0),
    );

    let mut pairs: Vec<(usize, usize)> = sol
        .row_col
        .iter()
        .enumerate()
        .filter(|&(_, &j)| j < m)
        .map(|(i, &j)| if transposed { (j, i) } else { (i, j) })
        .collect();
    pairs.sort_unstable();
    let objective_value = pairs
        .iter()
        .map(|&(r, c)| {
            problem
                .get(r, c)
                .expect("solver never selects a forbidden cell")
        })
        .sum();
    let complete = pairs.len() == n;
    Ok(Assignment {
        pairs,
        objective_value,
        complete,
    })
}

/// Assignment of `min(R, C)` cells minimizing how many 1-cells are used.
///
/// `ones[r * cols + c]` marks a 1-cell. Returns the count `δ` and the pairs.
pub fn min_total_binary_cost(
    rows: usize,
    cols: usize,
    ones: &[bool],
) -> Result<(usize, Vec<(usize, usize)>)> {
    let cells = ones
        .iter()
        .map(|&b| Some(if b { 1.0 } else { 0.0 }))
        .collect();
    let problem = AssignmentProblem::new(rows, cols, cells, Objective::Minimize)?;
    let a = solve_assignment(&problem)?;
    let delta = a.pairs.iter().filter(|&&(r, c)| ones[r * cols + c]).count();
    Ok((delta, a.pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(grid: &[&[f64]], obj: Objective) -> AssignmentProblem {
        let rows: Vec<Vec<Option<f64>>> = grid
            .iter()
            .map(|r| r.iter().map(|&x| Some(x)).collect())
            .collect();
        AssignmentProblem::from_rows(&rows, obj).unwrap()
    }

    #[test]
    fn singleton() {
        let a = solve_assignment(&dense(&[&[5.0]], Objective::Minimize)).unwrap();
        assert_eq!(a.pairs, vec![(0, 0)]);
        assert_eq!(a.objective_value, 5.0);
        assert!(a.complete);
    }

    #[test]
    fn small_maximize() {
        let p = dense(
            &[&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0], &[3.0, 6.0, 9.0]],
            Objective::Maximize,
        );
        let a = solve_assignment(&p).unwrap();
        assert_eq!(a.objective_value, 14.0);
    }

    #[test]
    fn classic_minimize() {
        let p = dense(
            &[&[4.0, 3.0, 5.0], &[3.0, 5.0, 9.0], &[4.0, 1.0, 4.0]],
            Objective::Minimize,
        );
        let a = solve_assignment(&p).unwrap();
        assert_eq!(a.objective_value, 9.0);
        assert_eq!(a.pairs, vec![(0, 2), (1, 0), (2, 1)]);
    }

    #[test]
    fn forbidden_cells_are_never_used() {
        // the only complete assignment uses the expensive diagonal
        let rows = vec![vec![Some(100.0), None], vec![None, Some(100.0)]];
        let p = AssignmentProblem::from_rows(&rows, Objective::Minimize).unwrap();
        let a = solve_assignment(&p).unwrap();
        assert_eq!(a.pairs, vec![(0, 0), (1, 1)]);
        assert!(a.complete);
    }

    #[test]
    fn infeasible_reports_partial_matching() {
        let rows = vec![vec![Some(1.0), None], vec![Some(2.0), None]];
        let p = AssignmentProblem::from_rows(&rows, Objective::Maximize).unwrap();
        let a = solve_assignment(&p).unwrap();
        assert!(!a.complete);
        assert_eq!(a.pairs, vec![(1, 0)]);
        assert_eq!(a.objective_value, 2.0);

        let rows = vec![vec![None, None]];
        let p = AssignmentProblem::from_rows(&rows, Objective::Maximize).unwrap();
        let a = solve_assignment(&p).unwrap();
        assert!(a.pairs.is_empty() && !a.complete);
    }

    #[test]
    fn cardinality_beats_cost() {
        // taking the cheap (0,0) would strand row 1
        let rows = vec![vec![Some(0.0), Some(50.0)], vec![Some(60.0), None]];
        let p = AssignmentProblem::from_rows(&rows, Objective::Minimize).unwrap();
        let a = solve_assignment(&p).unwrap();
        assert_eq!(a.pairs, vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn rectangular_both_orientations() {
        let p = dense(&[&[1.0, 9.0, 2.0, 8.0]], Objective::Maximize);
        let a = solve_assignment(&p).unwrap();
        assert_eq!(a.pairs, vec![(0, 1)]);
        let p = dense(&[&[1.0], &[9.0], &[2.0]], Objective::Minimize);
        let a = solve_assignment(&p).unwrap();
        assert_eq!(a.pairs, vec![(0, 0)]);
        assert!(a.complete);
    }

    #[test]
    fn ties_resolve_lexicographically() {
        let p = dense(&[&[1.0, 1.0], &[1.0, 1.0]], Objective::Minimize);
        assert_eq!(solve_assignment(&p).unwrap().pairs, vec![(0, 0), (1, 1)]);
        let p = dense(&[&[2.0; 3], &[2.0; 3], &[2.0; 3]], Objective::Maximize);
        assert_eq!(
            solve_assignment(&p).unwrap().pairs,
            vec![(0, 0), (1, 1), (2, 2)]
        );
        // (0,0) is optimal only together with (1,1)
        let p = dense(&[&[0.0, 0.0, 5.0], &[5.0, 0.0, 0.0]], Objective::Minimize);
        assert_eq!(solve_assignment(&p).unwrap().pairs, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn validation_errors() {
        assert!(AssignmentProblem::new(0, 1, vec![], Objective::Minimize).is_err());
        assert!(AssignmentProblem::new(1, 2, vec![Some(1.0)], Objective::Minimize).is_err());
        assert!(AssignmentProblem::new(1, 1, vec![Some(f64::NAN)], Objective::Minimize).is_err());
        assert!(
            AssignmentProblem::new(1, 1, vec![Some(f64::NEG_INFINITY)], Objective::Maximize)
                .is_err()
        );
    }

    #[test]
    fn binary_cost_examples() {
        let (d, _) = min_total_binary_cost(3, 3, &[false; 9]).unwrap();
        assert_eq!(d, 0);
        let (d, pairs) = min_total_binary_cost(2, 2, &[true, false, false, true]).unwrap();
        assert_eq!(d, 0);
        assert_eq!(pairs, vec![(0, 1), (1, 0)]);
        let (d, _) = min_total_binary_cost(2, 2, &[true, true, false, true]).unwrap();
        assert_eq!(d, 1);
    }
}
