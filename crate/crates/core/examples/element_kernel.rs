//! Local BDM₁ basis and element matrices on a single triangle.
//!
//! ```text
//! cargo run --example element_kernel
//! ```

use hdg_stokes::local_assembly::{local_a, local_b, ElementKernel, Params, Symmetry};
use hdg_stokes::mesh::Triangulation;

fn main() -> hdg_stokes::Result<()> {
    let mesh = Triangulation::from_parts(vec![[0.0, 0.0], [1.0, 0.0], [0.2, 0.9]], vec![[0, 1, 2]])?;
    let k = ElementKernel::new(&mesh, 0)?;
    println!("area {:.4}, diameter {:.4}", k.area, k.diameter);

    // the basis is dual to the normal moments at the edge Gauss points
    for (i, phi) in k.basis.iter().enumerate() {
        let e = &k.edges[i / 2];
        let n = e.global_normal();
        let moments: Vec<String> = (0..6)
            .map(|j| {
                let ej = &k.edges[j / 2];
                let v = k.basis[i].at(k.center, ej.node(j % 2));
                let nj = ej.global_normal();
                format!("{:6.3}", v[0] * nj[0] + v[1] * nj[1])
            })
            .collect();
        println!("phi_{i}: div {:8.4}, n_E = ({:5.2}, {:5.2}), moments [{}]", phi.div(), n[0], n[1], moments.join(" "));
    }

    // a rigid translation is reproduced exactly
    let c = k.interpolate(|_| [1.0, -2.0]);
    println!("interpolated (1,-2) at the centre: {:?}", k.eval(&c, k.center));

    for symmetry in [Symmetry::Symmetric, Symmetry::NonSymmetric] {
        let a = local_a(&k, &Params { symmetry, ..Params::default() })?;
        let asym = (0..9)
            .flat_map(|i| (0..9).map(move |j| (i, j)))
            .map(|(i, j)| (a[i][j] - a[j][i]).abs())
            .fold(0.0, f64::max);
        println!("{symmetry:?}: max |A - Aᵀ| = {asym:.2e}, A[0][0] = {:.4}", a[0][0]);
    }
    println!("B = {:?}", local_b(&k).map(|v| (v * 1e4).round() / 1e4));
    Ok(())
}
