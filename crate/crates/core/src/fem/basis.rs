//! Gauss–Legendre rules and equispaced Lagrange polynomials on `[-1, 1]`.

/// Points and weights of the `n`-point Gauss–Legendre rule, `1 ≤ n ≤ 5`.
pub fn gauss_legendre(n: usize) -> (&'static [f64], &'static [f64]) {
    const P1: [f64; 1] = [0.0];
    const W1: [f64; 1] = [2.0];
    const P2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
    const W2: [f64; 2] = [1.0, 1.0];
    const P3: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const W3: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    const P4: [f64; 4] = [
        -0.861_136_311_594_052_6,
        -0.339_981_043_584_856_3,
        0.339_981_043_584_856_3,
        0.861_136_311_594_052_6,
    ];
    const W4: [f64; 4] = [
        0.347_854_845_137_453_9,
        0.652_145_154_862_546_1,
        0.652_145_154_862_546_1,
        0.347_854_845_137_453_9,
    ];
    const P5: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683_1,
        0.0,
        0.538_469_310_105_683_1,
        0.906_179_845_938_664,
    ];
    const W5: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];
    match n {
        1 => (&P1, &W1),
        2 => (&P2, &W2),
        3 => (&P3, &W3),
        4 => (&P4, &W4),
        5 => (&P5, &W5),
        _ => panic!("Gauss–Legendre rule with {n} points is not tabulated"),
    }
}

/// Equispaced node coordinates of a degree-`order` Lagrange basis.
pub fn lagrange_nodes(order: usize) -> Vec<f64> {
    (0..=order)
        .map(|i| -1.0 + 2.0 * i as f64 / order as f64)
        .collect()
}

/// Values and first derivatives of the degree-`order` Lagrange basis at `x`.
pub fn lagrange_1d(order: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let nodes = lagrange_nodes(order);
    let n = nodes.len();
    let mut val = vec![0.0; n];
    let mut der = vec![0.0; n];
    for i in 0..n {
        let mut v = 1.0;
        let mut d = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let denom = nodes[i] - nodes[j];
            // product rule, accumulated one factor at a time
            d = d * (x - nodes[j]) / denom + v / denom;
            v *= (x - nodes[j]) / denom;
        }
        val[i] = v;
        der[i] = d;
    }
    (val, der)
}

/// Tensor-product shape functions at `(xi, eta)`; node `(a, b)` has local
/// index `b * (order + 1) + a`.
#[derive(Debug, Clone)]
pub struct Shape2 {
    pub n: Vec<f64>,
    pub dn_dxi: Vec<f64>,
    pub dn_deta: Vec<f64>,
}

impl Shape2 {
    pub fn eval(order: usize, xi: f64, eta: f64) -> Self {
        let (nx, dx) = lagrange_1d(order, xi);
        let (ny, dy) = lagrange_1d(order, eta);
        let m = order + 1;
        let mut s = Shape2 {
            n: vec![0.0; m * m],
            dn_dxi: vec![0.0; m * m],
            dn_deta: vec![0.0; m * m],
        };
        for b in 0..m {
            for a in 0..m {
                let k = b * m + a;
                s.n[k] = nx[a] * ny[b];
                s.dn_dxi[k] = dx[a] * ny[b];
                s.dn_deta[k] = nx[a] * dy[b];
            }
        }
        s
    }

    pub fn derivative(&self, alpha: usize) -> &[f64] {
        if alpha == 0 {
            &self.dn_dxi
        } else {
            &self.dn_deta
        }
    }
}

/// Quadrature point of the tensor-product rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub xi: f64,
    pub eta: f64,
    pub weight: f64,
}

/// `(order + 1)²` Gauss points.
pub fn quad_rule(order: usize) -> Vec<QuadPoint> {
    let (p, w) = gauss_legendre(order + 1);
    let mut out = Vec::with_capacity(p.len() * p.len());
    for j in 0..p.len() {
        for i in 0..p.len() {
            out.push(QuadPoint {
                xi: p[i],
                eta: p[j],
                weight: w[i] * w[j],
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_integrate_polynomials_exactly() {
        for n in 1..=5 {
            let (p, w) = gauss_legendre(n);
            for deg in 0..2 * n {
                let quad: f64 = p.iter().zip(w).map(|(x, w)| w * x.powi(deg as i32)).sum();
                let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
                assert!((quad - exact).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn lagrange_partition_of_unity_and_kronecker() {
        for order in 1..=3 {
            let nodes = lagrange_nodes(order);
            for (i, &x) in nodes.iter().enumerate() {
                let (v, _) = lagrange_1d(order, x);
                for (j, vj) in v.iter().enumerate() {
                    assert!((vj - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
                }
            }
            let (v, d) = lagrange_1d(order, 0.37);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(d.iter().sum::<f64>().abs() < 1e-13);
        }
    }

    #[test]
    fn lagrange_derivative_matches_finite_difference() {
        let h = 1e-6;
        for order in 1..=3 {
            let (_, d) = lagrange_1d(order, 0.21);
            let (vp, _) = lagrange_1d(order, 0.21 + h);
            let (vm, _) = lagrange_1d(order, 0.21 - h);
            for i in 0..=order {
                assert!((d[i] - (vp[i] - vm[i]) / (2.0 * h)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn quad_rule_weights_sum_to_reference_area() {
        for order in 1..=3 {
            let q = quad_rule(order);
            assert_eq!(q.len(), (order + 1).pow(2));
            assert!((q.iter().map(|p| p.weight).sum::<f64>() - 4.0).abs() < 1e-14);
        }
    }
}
