use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Div, Index, Mul, Neg, Sub};

use super::Scalar;

#[derive(Clone, Copy)]
struct Node {
    parents: [usize; 2],
    partials: [f64; 2],
}

/// Record of elementary operations with their local partial derivatives.
///
/// Nodes are appended in evaluation order, so the recording order is a
/// topological order and the reverse pass is a single backward sweep.
#[derive(Default)]
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

/// A scalar recorded on a [`Tape`].
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    index: usize,
    value: f64,
}

impl fmt::Debug for Var<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Var")
            .field("index", &self.index)
            .field("value", &self.value)
            .finish()
    }
}

/// Adjoints `d(output)/d(node)` for every node on a tape.
#[derive(Debug, Clone)]
pub struct Gradients(Vec<f64>);

impl Gradients {
    pub fn wrt(&self, var: &Var<'_>) -> f64 {
        self.0[var.index]
    }
}

impl Index<&Var<'_>> for Gradients {
    type Output = f64;

    fn index(&self, var: &Var<'_>) -> &f64 {
        &self.0[var.index]
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    /// New independent variable.
    pub fn var(&self, value: f64) -> Var<'_> {
        let index = self.push(Node {
            parents: [0, 0],
            partials: [0.0, 0.0],
        });
        Var {
            tape: self,
            index,
            value,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Reverse accumulation from `output`.
    pub fn gradient(&self, output: &Var<'_>) -> Gradients {
        assert!(
            std::ptr::eq(self, output.tape),
            "output was recorded on another tape"
        );
        let nodes = self.nodes.borrow();
        let mut adjoint = vec![0.0; nodes.len()];
        adjoint[output.index] = 1.0;
        for i in (0..=output.index).rev() {
            let a = adjoint[i];
            if a == 0.0 {
                continue;
            }
            let node = nodes[i];
            for (&p, &d) in node.parents.iter().zip(&node.partials) {
                if d != 0.0 {
                    adjoint[p] += d * a;
                }
            }
        }
        Gradients(adjoint)
    }

    fn push(&self, node: Node) -> usize {
        let mut nodes = self.nodes.borrow_mut();
        nodes.push(node);
        nodes.len() - 1
    }
}

impl<'t> Var<'t> {
    pub fn value(&self) -> f64 {
        self.value
    }

    fn unary(&self, value: f64, partial: f64) -> Var<'t> {
        let index = self.tape.push(Node {
            parents: [self.index, 0],
            partials: [partial, 0.0],
        });
        Var {
            tape: self.tape,
            index,
            value,
        }
    }

    fn binary(&self, other: &Var<'t>, value: f64, partials: [f64; 2]) -> Var<'t> {
        let index = self.tape.push(Node {
            parents: [self.index, other.index],
            partials,
        });
        Var {
            tape: self.tape,
            index,
            value,
        }
    }
}

impl<'t> Add for Var<'t> {
    type Output = Var<'t>;

    fn add(self, rhs: Self) -> Self::Output {
        self.binary(&rhs, self.value + rhs.value, [1.0, 1.0])
    }
}

impl<'t> Sub for Var<'t> {
    type Output = Var<'t>;

    fn sub(self, rhs: Self) -> Self::Output {
        self.binary(&rhs, self.value - rhs.value, [1.0, -1.0])
    }
}

impl<'t> Mul for Var<'t> {
    type Output = Var<'t>;

    fn mul(self, rhs: Self) -> Self::Output {
        self.binary(&rhs, self.value * rhs.value, [rhs.value, self.value])
    }
}

impl<'t> Div for Var<'t> {
    type Output = Var<'t>;

    fn div(self, rhs: Self) -> Self::Output {
        let q = self.value / rhs.value;
        self.binary(&rhs, q, [1.0 / rhs.value, -q / rhs.value])
    }
}

impl<'t> Neg for Var<'t> {
    type Output = Var<'t>;

    fn neg(self) -> Self::Output {
        self.unary(-self.value, -1.0)
    }
}

impl<'t> Add<f64> for Var<'t> {
    type Output = Var<'t>;

    fn add(self, rhs: f64) -> Self::Output {
        self.unary(self.value + rhs, 1.0)
    }
}

impl<'t> Mul<f64> for Var<'t> {
    type Output = Var<'t>;

    fn mul(self, rhs: f64) -> Self::Output {
        self.unary(self.value * rhs, rhs)
    }
}

impl Scalar for Var<'_> {
    fn constant_like(&self, value: f64) -> Self {
        self.tape.var(value)
    }

    fn tanh(self) -> Self {
        let y = self.value.tanh();
        self.unary(y, 1.0 - y * y)
    }

    fn value(&self) -> f64 {
        self.value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_and_product() {
        let tape = Tape::new();
        let x = tape.var(3.0);
        let y = tape.var(-2.0);
        let f = x * x + x * y;
        let g = tape.gradient(&f);
        assert_eq!(f.value(), 3.0);
        assert_eq!(g[&x], 2.0 * 3.0 - 2.0);
        assert_eq!(g[&y], 3.0);
    }

    #[test]
    fn quotient_and_constants() {
        let tape = Tape::new();
        let x = tape.var(2.0);
        let f = (x * 3.0 + 1.0) / (x * x);
        // f = (3x + 1) / x^2, f' = -3/x^2 - 2/x^3
        let g = tape.gradient(&f);
        assert!((g.wrt(&x) - (-0.75 - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn tanh_parameter_gradient() {
        // loss = u^2, u = tanh(w x0): d loss / dw = 2u (1 - u^2) x0
        let (w0, x0) = (0.7, 1.3);
        let tape = Tape::new();
        let w = tape.var(w0);
        let u = (w * x0).tanh();
        let loss = u * u;
        let expected = 2.0 * u.value() * (1.0 - u.value() * u.value()) * x0;
        assert!((tape.gradient(&loss)[&w] - expected).abs() < 1e-15);
    }

    #[test]
    fn unused_inputs_get_zero() {
        let tape = Tape::new();
        let x = tape.var(1.0);
        let unused = tape.var(5.0);
        let f = -x;
        let g = tape.gradient(&f);
        assert_eq!(g[&x], -1.0);
        assert_eq!(g[&unused], 0.0);
        assert_eq!(tape.len(), 3);
    }
}
