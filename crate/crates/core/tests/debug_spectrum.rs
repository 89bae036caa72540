use straintomo::boundary::Point;
use straintomo::elastic::{body_force_rhs, ElasticConstants, Regime};
use straintomo::grid::{Grid2, SymTensorField2, VectorField2};
use straintomo::helmholtz::solenoidal_part;
use straintomo::lrt::lrt_forward;
use straintomo::mask::{mask_field, Mask};
use straintomo::metrics::relative_error;
use straintomo::pipeline::{potential_stage, recover_stage};
use straintomo::sinogram::ScanGeometry;
use straintomo::{airy, synth};

// spectral inversion of du_hat = i sym(k u_hat) on the padded grid
fn u_from_potential(pot: &SymTensorField2) -> VectorField2 {
    use rustfft::num_complex::Complex64;
    use rustfft::FftPlanner;
    let g = pot.grid;
    let (w, h) = (g.nx, g.ny);
    let mut c11: Vec<Complex64> = pot.e11.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut c12: Vec<Complex64> = pot.e12.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let mut c22: Vec<Complex64> = pot.e22.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let fft2 = |data: &mut Vec<Complex64>, inverse: bool| {
        let mut planner = FftPlanner::new();
        let rf = if inverse { planner.plan_fft_inverse(w) } else { planner.plan_fft_forward(w) };
        for row in data.chunks_exact_mut(w) { rf.process(row); }
        let cf = if inverse { planner.plan_fft_inverse(h) } else { planner.plan_fft_forward(h) };
        let mut col = vec![Complex64::new(0.0, 0.0); h];
        for x in 0..w {
            for y in 0..h { col[y] = data[y * w + x]; }
            cf.process(&mut col);
            for y in 0..h { data[y * w + x] = col[y]; }
        }
    };
    fft2(&mut c11, false); fft2(&mut c12, false); fft2(&mut c22, false);
    let mut u1 = vec![Complex64::new(0.0, 0.0); w * h];
    let mut u2 = vec![Complex64::new(0.0, 0.0); w * h];
    for iy in 0..h {
        for ix in 0..w {
            let kx = { let j = ix; let jj = if j <= w/2 { j as isize } else { j as isize - w as isize }; std::f64::consts::TAU * jj as f64 / (w as f64 * g.hx()) };
            let ky = { let j = iy; let jj = if j <= h/2 { j as isize } else { j as isize - h as isize }; std::f64::consts::TAU * jj as f64 / (h as f64 * g.hy()) };
            let k = iy * w + ix;
            let n2 = kx * kx + ky * ky;
            if n2 == 0.0 { continue; }
            // P k (vector): (P.k)_i = P_ij k_j
            let pk1 = c11[k] * kx + c12[k] * ky;
            let pk2 = c12[k] * kx + c22[k] * ky;
            // a = k.u_hat = (k.P.k)/(i n2)
            let kpk = pk1 * kx + pk2 * ky;
            let i_c = Complex64::new(0.0, 1.0);
            let a = kpk / (i_c * n2);
            // u_i = (2 (P.k)_i / i - k_i a) / n2
            u1[k] = (pk1 * 2.0 / i_c - a * kx) / n2;
            u2[k] = (pk2 * 2.0 / i_c - a * ky) / n2;
        }
    }
    fft2(&mut u1, true); fft2(&mut u2, true);
    let scale = 1.0 / (w * h) as f64;
    let mut out = VectorField2::zeros(g);
    for k in 0..g.len() {
        out.u1[k] = u1[k].re * scale;
        out.u2[k] = u2[k].re * scale;
    }
    out
}

#[test]
#[ignore]
fn golden_oracle_substitution() {
    let grid = Grid2::centered_square(222, 1.11).unwrap();
    let boundary = synth::disk_boundary(1000);
    let constants = ElasticConstants::new(1.0, 0.28, Regime::PlaneStress).unwrap();
    let (_stress, strain) = airy::airy_phantom(grid, &boundary, &constants).unwrap();
    let mask = Mask::from_boundary(grid, &boundary).unwrap();
    let geom = ScanGeometry::parallel(250, 0.01, grid.circumradius()).unwrap();
    let sino = lrt_forward(&strain, &geom).unwrap();
    let mut recovered = recover_stage(&sino, &boundary, &grid, &constants, 1e-10).unwrap();

    // oracle fields on the padded grid
    let big = Grid2::centered_square(444, 2.22).unwrap();
    let mut embedded = SymTensorField2::zeros(big);
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let k = grid.idx(ix, iy);
            let bk = big.idx(ix + 111, iy + 111);
            embedded.e11[bk] = strain.e11[k];
            embedded.e12[bk] = strain.e12[k];
            embedded.e22[bk] = strain.e22[k];
        }
    }
    let sol_big = solenoidal_part(&embedded);
    let mut pot_big = embedded.clone();
    for k in 0..big.len() {
        pot_big.e11[k] -= sol_big.e11[k];
        pot_big.e12[k] -= sol_big.e12[k];
        pot_big.e22[k] -= sol_big.e22[k];
    }
    let u_big = u_from_potential(&pot_big);
    let u_oracle: Vec<Point> = boundary.nodes().map(|(x, y)| u_big.sample(x, y)).collect();

    let mut s_eps_true = SymTensorField2::zeros(grid);
    let mut du_true = SymTensorField2::zeros(grid);
    for iy in 0..grid.ny {
        for ix in 0..grid.nx {
            let k = grid.idx(ix, iy);
            let bk = big.idx(ix + 111, iy + 111);
            s_eps_true.e11[k] = sol_big.e11[bk];
            s_eps_true.e12[k] = sol_big.e12[bk];
            s_eps_true.e22[k] = sol_big.e22[bk];
            du_true.e11[k] = pot_big.e11[bk];
            du_true.e12[k] = pot_big.e12[bk];
            du_true.e22[k] = pot_big.e22[bk];
        }
    }
    let du_true_masked = mask_field(&du_true, &mask).unwrap();
    let b_oracle = body_force_rhs(&s_eps_true, &constants);

    // compare recovered U against oracle U (up to rigid motions)
    use straintomo::recover::rigid_projection;
    let diff: Vec<Point> = recovered.u_nodes.iter().zip(&u_oracle)
        .map(|(a, b)| (a.0 - b.0, a.1 - b.1)).collect();
    let rigid = rigid_projection(&boundary, &diff);
    let nonrigid: f64 = diff.iter().zip(&rigid)
        .map(|(d, r)| ((d.0 - r.0).powi(2) + (d.1 - r.1).powi(2))).sum::<f64>().sqrt();
    let u_norm: f64 = u_oracle.iter().map(|p| p.0 * p.0 + p.1 * p.1).sum::<f64>().sqrt();
    println!("U error (non-rigid part): {:.4} relative to |U| {:.3}", nonrigid / u_norm, u_norm);

    let run = |label: &str, u_nodes: &Vec<Point>, b: &VectorField2, rec: &mut straintomo::pipeline::RecoveredBoundary| {
        rec.u_nodes = u_nodes.clone();
        rec.body_force = b.clone();
        let (du_field, _eps, _s, _t) = potential_stage(rec, &boundary, 0.03, &constants).unwrap();
        let e = relative_error(&du_field, &du_true_masked, &mask).unwrap();
        println!("{label}: e_du = {e:.4}");
    };

    let u_rec = recovered.u_nodes.clone();
    let b_rec = recovered.body_force.clone();
    run("A recovered U + recon b ", &u_rec, &b_rec, &mut recovered);
    run("B recovered U + oracle b", &u_rec, &b_oracle, &mut recovered);
    run("C oracle U    + recon b ", &u_oracle, &b_rec, &mut recovered);
    run("D oracle U    + oracle b", &u_oracle, &b_oracle, &mut recovered);
}
