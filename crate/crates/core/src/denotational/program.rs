//! Expressions compiled to slot-addressed nodes, evaluated with memoization.

use std::collections::HashMap;

use crate::domain::{
    embed, enumerate, fn_project_apply, lattice_height, lub, project, DomElem, DomainError, Env,
};
use crate::syntax::{Expr, Name};

use super::HeapVariant;

type Slot = u32;

enum Node {
    Var(Slot),
    Lam(Slot, usize),
    App(usize, Slot),
    Let(Vec<(Slot, usize)>, usize),
}

/// A set of expressions sharing one slot namespace.
pub(crate) struct Program {
    nodes: Vec<Node>,
    /// Slots a node's value depends on, for memo keys.
    deps: Vec<Vec<Slot>>,
    names: Vec<Name>,
    slot_of: HashMap<Name, Slot>,
}

impl Program {
    pub fn new() -> Program {
        Program { nodes: Vec::new(), deps: Vec::new(), names: Vec::new(), slot_of: HashMap::new() }
    }

    pub fn slot(&mut self, x: &Name) -> Slot {
        if let Some(&s) = self.slot_of.get(x) {
            return s;
        }
        let s = self.names.len() as Slot;
        self.names.push(x.clone());
        self.slot_of.insert(x.clone(), s);
        s
    }

    /// Compiles `e`, whose binders must be distinct from each other and from
    /// everything else in the program.
    pub fn compile(&mut self, e: &Expr) -> usize {
        let (node, mut deps) = match e {
            Expr::Var(x) => {
                let s = self.slot(x);
                (Node::Var(s), vec![s])
            }
            Expr::Lam(x, b) => {
                let s = self.slot(x);
                let b = self.compile(b);
                let deps = self.deps[b].iter().copied().filter(|&d| d != s).collect();
                (Node::Lam(s, b), deps)
            }
            Expr::App(f, x) => {
                let s = self.slot(x);
                let f = self.compile(f);
                let mut deps = self.deps[f].clone();
                deps.push(s);
                (Node::App(f, s), deps)
            }
            Expr::Let(bs, b) => {
                let slots: Vec<Slot> = bs.iter().map(|(x, _)| self.slot(x)).collect();
                let rhs: Vec<usize> = bs.iter().map(|(_, r)| self.compile(r)).collect();
                let body = self.compile(b);
                // The binders' incoming values matter only to the literal
                // join, so they stay in the key.
                let mut deps: Vec<Slot> = rhs.iter().chain([&body]).flat_map(|&n| self.deps[n].clone()).collect();
                deps.extend(&slots);
                (Node::Let(slots.into_iter().zip(rhs).collect(), body), deps)
            }
        };
        deps.sort_unstable();
        deps.dedup();
        self.nodes.push(node);
        self.deps.push(deps);
        self.nodes.len() - 1
    }
}

pub(crate) struct Machine<'p> {
    prog: &'p Program,
    rank: u8,
    variant: HeapVariant,
    env: Vec<DomElem>,
    memo: HashMap<(usize, Vec<DomElem>), DomElem>,
    args: Vec<DomElem>,
}

impl<'p> Machine<'p> {
    pub fn new(prog: &'p Program, rank: u8, variant: HeapVariant) -> Result<Machine<'p>, DomainError> {
        Ok(Machine {
            prog,
            rank,
            variant,
            env: vec![DomElem::bot(rank); prog.names.len()],
            memo: HashMap::new(),
            args: enumerate(rank - 1)?,
        })
    }

    /// Loads `rho` into the slots; names without a slot are irrelevant.
    pub fn load(&mut self, rho: &Env) {
        self.env.fill(DomElem::bot(self.rank));
        for (x, v) in rho.iter() {
            if let Some(&s) = self.prog.slot_of.get(x) {
                self.env[s as usize] = v;
            }
        }
    }

    fn combine(&self, old: DomElem, new: DomElem) -> DomElem {
        match self.variant {
            HeapVariant::Join => lub(old, new),
            HeapVariant::Update => new,
        }
    }

    pub fn eval(&mut self, n: usize) -> Result<DomElem, DomainError> {
        let prog = self.prog;
        match &prog.nodes[n] {
            Node::Var(s) => Ok(self.env[*s as usize]),
            Node::App(f, x) => {
                let fv = self.eval(*f)?;
                let arg = project(self.env[*x as usize])?;
                embed(fn_project_apply(fv, arg))
            }
            Node::Lam(..) | Node::Let(..) => {
                let key: Vec<DomElem> = prog.deps[n].iter().map(|&s| self.env[s as usize]).collect();
                let key = (n, key);
                if let Some(&v) = self.memo.get(&key) {
                    return Ok(v);
                }
                let v = self.eval_uncached(n)?;
                self.memo.insert(key, v);
                Ok(v)
            }
        }
    }

    fn eval_uncached(&mut self, n: usize) -> Result<DomElem, DomainError> {
        let prog = self.prog;
        match &prog.nodes[n] {
            Node::Lam(x, body) => {
                let saved = self.env[*x as usize];
                let mut entries = Vec::with_capacity(self.args.len());
                for k in 0..self.args.len() {
                    self.env[*x as usize] = embed(self.args[k])?;
                    entries.push(project(self.eval(*body)?)?);
                }
                self.env[*x as usize] = saved;
                DomElem::from_entries(self.rank, &entries)
            }
            Node::Let(binds, body) => {
                let saved: Vec<DomElem> = binds.iter().map(|(s, _)| self.env[*s as usize]).collect();
                for (s, _) in binds {
                    self.env[*s as usize] = DomElem::bot(self.rank);
                }
                let cap = lattice_height(self.rank) * binds.len() + 1;
                let mut passes = 0;
                loop {
                    passes += 1;
                    if passes > cap {
                        return Err(DomainError::NotConverged { calls: cap });
                    }
                    let mut changed = false;
                    for (i, (s, rhs)) in binds.iter().enumerate() {
                        let v = self.eval(*rhs)?;
                        let v = self.combine(saved[i], v);
                        if v != self.env[*s as usize] {
                            self.env[*s as usize] = v;
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
                let v = self.eval(*body)?;
                for ((s, _), old) in binds.iter().zip(saved) {
                    self.env[*s as usize] = old;
                }
                Ok(v)
            }
            _ => unreachable!("only binders are cached"),
        }
    }
}
