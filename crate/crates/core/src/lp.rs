//! Small dense linear-programming solver.
//!
//! Two-phase primal simplex on a dense tableau with Bland's anti-cycling rule.
//! Problems here have a handful of variables and at most a few hundred rows
//! (gauges and supports of low-dimensional polytopes), so a dense tableau is
//! the simplest correct tool.

const EPS: f64 = 1e-11;

/// Affine expression `sum(coef * var) + constant` over LP variables.
#[derive(Debug, Clone, Default)]
pub struct Affine {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Affine {
    pub fn constant(c: f64) -> Self {
        Affine { terms: Vec::new(), constant: c }
    }

    pub fn var(v: usize) -> Self {
        Affine { terms: vec![(v, 1.0)], constant: 0.0 }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Affine {
            terms: self.terms.iter().map(|&(v, c)| (v, c * s)).collect(),
            constant: self.constant * s,
        }
    }

    pub fn plus(mut self, other: &Affine) -> Self {
        self.terms.extend_from_slice(&other.terms);
        self.constant += other.constant;
        self
    }

    pub fn minus(self, other: &Affine) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    pub fn add_term(&mut self, v: usize, c: f64) {
        self.terms.push((v, c));
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RowKind {
    Le,
    Eq,
}

#[derive(Debug, Clone)]
struct Row {
    coefs: Vec<(usize, f64)>,
    kind: RowKind,
    rhs: f64,
}

/// Outcome of [`LinearProgram::solve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LpOutcome {
    Optimal(f64),
    Unbounded,
    Infeasible,
}

impl LpOutcome {
    /// Optimal value, `+inf` when unbounded above for a maximisation (or below
    /// for a minimisation the sign is handled by the caller), `None` when
    /// infeasible.
    pub fn value(self) -> Option<f64> {
        match self {
            LpOutcome::Optimal(v) => Some(v),
            LpOutcome::Unbounded => Some(f64::INFINITY),
            LpOutcome::Infeasible => None,
        }
    }
}

/// A linear program over free and nonnegative variables.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    free: Vec<bool>,
    rows: Vec<Row>,
    objective: Affine,
    minimize: bool,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, free: bool) -> usize {
        self.free.push(free);
        self.free.len() - 1
    }

    pub fn add_vars(&mut self, count: usize, free: bool) -> Vec<usize> {
        (0..count).map(|_| self.add_var(free)).collect()
    }

    pub fn num_vars(&self) -> usize {
        self.free.len()
    }

    /// `lhs <= rhs`.
    pub fn add_le(&mut self, lhs: &Affine, rhs: &Affine) {
        self.push_row(lhs, rhs, RowKind::Le);
    }

    /// `lhs == rhs`.
    pub fn add_eq(&mut self, lhs: &Affine, rhs: &Affine) {
        self.push_row(lhs, rhs, RowKind::Eq);
    }

    fn push_row(&mut self, lhs: &Affine, rhs: &Affine, kind: RowKind) {
        let diff = lhs.clone().minus(rhs);
        let mut dense: Vec<(usize, f64)> = Vec::with_capacity(diff.terms.len());
        for &(v, c) in &diff.terms {
            match dense.iter_mut().find(|(w, _)| *w == v) {
                Some(e) => e.1 += c,
                None => dense.push((v, c)),
            }
        }
        dense.retain(|&(_, c)| c != 0.0);
        self.rows.push(Row { coefs: dense, kind, rhs: -diff.constant });
    }

    pub fn maximize(&mut self, obj: Affine) {
        self.objective = obj;
        self.minimize = false;
    }

    pub fn minimize(&mut self, obj: Affine) {
        self.objective = obj;
        self.minimize = true;
    }

    /// Solve. For a minimisation, `Unbounded` means unbounded below.
    pub fn solve(&self) -> LpOutcome {
        // Column layout: one column per nonneg var, two per free var.
        let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(self.free.len());
        let mut ncols = 0;
        for &f in &self.free {
            if f {
                col_of.push((ncols, Some(ncols + 1)));
                ncols += 2;
            } else {
                col_of.push((ncols, None));
                ncols += 1;
            }
        }
        let n_struct = ncols;
        let m = self.rows.len();

        // Count auxiliary columns.
        let mut n_slack = 0;
        let mut n_art = 0;
        for r in &self.rows {
            match r.kind {
                RowKind::Le => {
                    n_slack += 1;
                    if r.rhs < 0.0 {
                        n_art += 1;
                    }
                }
                RowKind::Eq => n_art += 1,
            }
        }
        let total = n_struct + n_slack + n_art;
        let width = total + 1;
        let mut t = vec![0.0; (m + 1) * width];
        let mut basis = vec![0usize; m];
        let mut is_art = vec![false; total];
        let mut slack_i = n_struct;
        let mut art_i = n_struct + n_slack;

        for (i, r) in self.rows.iter().enumerate() {
            let sign = if r.rhs < 0.0 { -1.0 } else { 1.0 };
            let row = &mut t[i * width..(i + 1) * width];
            for &(v, c) in &r.coefs {
                let (p, q) = col_of[v];
                row[p] += sign * c;
                if let Some(q) = q {
                    row[q] -= sign * c;
                }
            }
            row[total] = sign * r.rhs;
            match r.kind {
                RowKind::Le => {
                    row[slack_i] = sign;
                    if sign > 0.0 {
                        basis[i] = slack_i;
                    } else {
                        row[art_i] = 1.0;
                        is_art[art_i] = true;
                        basis[i] = art_i;
                        art_i += 1;
                    }
                    slack_i += 1;
                }
                RowKind::Eq => {
                    row[art_i] = 1.0;
                    is_art[art_i] = true;
                    basis[i] = art_i;
                    art_i += 1;
                }
            }
        }

        let mut tab = Tableau { t, m, width, basis };

        if n_art > 0 {
            // Phase 1: maximise -sum(art).
            let mut cost = vec![0.0; total];
            for (j, &a) in is_art.iter().enumerate() {
                if a {
                    cost[j] = -1.0;
                }
            }
            tab.set_objective(&cost);
            let blocked = vec![false; total];
            if tab.run(&blocked) == Phase::Unbounded {
                return LpOutcome::Infeasible;
            }
            if tab.objective_value() < -1e-8 * (1.0 + tab.rhs_scale()) {
                return LpOutcome::Infeasible;
            }
            tab.evict_artificials(&is_art);
        }

        // Phase 2.
        let sense = if self.minimize { -1.0 } else { 1.0 };
        let mut cost = vec![0.0; total];
        for &(v, c) in &self.objective.terms {
            let (p, q) = col_of[v];
            cost[p] += sense * c;
            if let Some(q) = q {
                cost[q] -= sense * c;
            }
        }
        tab.set_objective(&cost);
        match tab.run(&is_art) {
            Phase::Unbounded => LpOutcome::Unbounded,
            Phase::Optimal => {
                LpOutcome::Optimal(sense * tab.objective_value() + self.objective.constant)
            }
        }
    }
}

#[derive(Debug, PartialEq)]
enum Phase {
    Optimal,
    Unbounded,
}

struct Tableau {
    t: Vec<f64>,
    m: usize,
    width: usize,
    basis: Vec<usize>,
}

impl Tableau {
    fn at(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.width + j]
    }

    fn rhs_scale(&self) -> f64 {
        (0..self.m).map(|i| self.at(i, self.width - 1).abs()).fold(0.0, f64::max)
    }

    /// Objective row holds reduced costs `z_j - c_j` and `z` in the last slot.
    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.width;
        let obj = self.m * w;
        for j in 0..w {
            self.t[obj + j] = if j < cost.len() { -cost[j] } else { 0.0 };
        }
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for j in 0..w {
                    self.t[obj + j] += cb * self.t[i * w + j];
                }
            }
        }
    }

    fn objective_value(&self) -> f64 {
        self.at(self.m, self.width - 1)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.t[r * w + c];
        for j in 0..w {
            self.t[r * w + j] /= p;
        }
        self.t[r * w + c] = 1.0;
        for i in 0..=self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f != 0.0 {
                for j in 0..w {
                    self.t[i * w + j] -= f * self.t[r * w + j];
                }
                self.t[i * w + c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn run(&mut self, blocked: &[bool]) -> Phase {
        let total = self.width - 1;
        let max_iter = 50_000;
        for _ in 0..max_iter {
            // Bland: lowest-index improving column.
            let entering =
                (0..total).find(|&j| !blocked[j] && self.at(self.m, j) < -EPS);
            let Some(c) = entering else {
                return Phase::Optimal;
            };
            let mut best: Option<(usize, f64)> = None;
            for i in 0..self.m {
                let a = self.at(i, c);
                if a > EPS {
                    let ratio = self.at(i, total) / a;
                    match best {
                        None => best = Some((i, ratio)),
                        Some((bi, br)) => {
                            if ratio < br - 1e-14
                                || (ratio <= br + 1e-14 && self.basis[i] < self.basis[bi])
                            {
                                best = Some((i, ratio));
                            }
                        }
                    }
                }
            }
            match best {
                None => return Phase::Unbounded,
                Some((r, _)) => self.pivot(r, c),
            }
        }
        Phase::Optimal
    }

    fn evict_artificials(&mut self, is_art: &[bool]) {
        let total = self.width - 1;
        for i in 0..self.m {
            if is_art[self.basis[i]] {
                if let Some(c) = (0..total).find(|&j| !is_art[j] && self.at(i, j).abs() > 1e-9) {
                    self.pivot(i, c);
                }
                // otherwise the row is redundant; the artificial stays basic at zero
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_support() {
        // max x + y s.t. |x| <= 1, |y| <= 2 (free vars)
        let mut lp = LinearProgram::new();
        let x = lp.add_var(true);
        let y = lp.add_var(true);
        for (v, b) in [(x, 1.0), (y, 2.0)] {
            lp.add_le(&Affine::var(v), &Affine::constant(b));
            lp.add_le(&Affine::var(v).scaled(-1.0), &Affine::constant(b));
        }
        lp.maximize(Affine::var(x).plus(&Affine::var(y)));
        assert_eq!(lp.solve(), LpOutcome::Optimal(3.0));
    }

    #[test]
    fn equality_and_phase_one() {
        // min a + b s.t. a + 2b = 4, a >= 0, b >= 0, a >= 1  -> a=1,b=1.5 -> 2.5? no: min at b=2,a=0 violates a>=1; a=1,b=1.5 => 2.5
        let mut lp = LinearProgram::new();
        let a = lp.add_var(false);
        let b = lp.add_var(false);
        lp.add_eq(&Affine::var(a).plus(&Affine::var(b).scaled(2.0)), &Affine::constant(4.0));
        lp.add_le(&Affine::constant(1.0), &Affine::var(a));
        lp.minimize(Affine::var(a).plus(&Affine::var(b)));
        match lp.solve() {
            LpOutcome::Optimal(v) => assert!((v - 2.5).abs() < 1e-12),
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let a = lp.add_var(false);
        lp.add_le(&Affine::var(a), &Affine::constant(-1.0));
        lp.maximize(Affine::var(a));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);

        let mut lp = LinearProgram::new();
        let a = lp.add_var(true);
        lp.add_le(&Affine::var(a).scaled(-1.0), &Affine::constant(1.0));
        lp.maximize(Affine::var(a));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
    }

    #[test]
    fn degenerate_vertex_does_not_cycle() {
        // many redundant constraints through the optimum
        let mut lp = LinearProgram::new();
        let x = lp.add_var(true);
        let y = lp.add_var(true);
        for k in 0..40 {
            let th = k as f64 * std::f64::consts::PI / 80.0;
            let row = Affine::var(x).scaled(th.cos()).plus(&Affine::var(y).scaled(th.sin()));
            lp.add_le(&row, &Affine::constant(th.cos() + th.sin()));
        }
        lp.add_le(&Affine::var(x).scaled(-1.0), &Affine::constant(5.0));
        lp.add_le(&Affine::var(y).scaled(-1.0), &Affine::constant(5.0));
        lp.maximize(Affine::var(x).plus(&Affine::var(y)));
        match lp.solve() {
            LpOutcome::Optimal(v) => assert!((v - 2.0).abs() < 1e-9, "{v}"),
            o => panic!("{o:?}"),
        }
    }
}
