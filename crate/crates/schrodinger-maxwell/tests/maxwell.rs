mod common;

use common::*;
use proptest::prelude::*;
use schrodinger_maxwell::diagnostics::*;
use schrodinger_maxwell::linalg::*;
use schrodinger_maxwell::maxwell::interface::*;
use schrodinger_maxwell::maxwell::profile::*;
use schrodinger_maxwell::maxwell::rs::*;
use schrodinger_maxwell::maxwell::spectral::*;
use schrodinger_maxwell::maxwell::upwind::*;
use schrodinger_maxwell::maxwell::yee::*;
use schrodinger_maxwell::maxwell::*;
use rand::Rng;
use std::f64::consts::{PI, SQRT_2};

fn unitary_defect(u: &ComplexMatrix) -> f64 {
    u.matmul(&u.adjoint()).unwrap().max_abs_diff(&ComplexMatrix::identity(u.rows()))
}

/// `Ψ± = ½((−F_x ± iF_y), F_z, F_z, (F_x ± iF_y))` straight from the RS vector.
fn psi_from_rs(e: [C64; 3], b: [C64; 3], eps: f64, mu: f64) -> [C64; 8] {
    let f = |sign: f64| -> [C64; 3] {
        let mut out = [C64::new(0.0, 0.0); 3];
        for k in 0..3 {
            out[k] = (e[k] * eps.sqrt() + I * sign * b[k] / mu.sqrt()) / SQRT_2;
        }
        out
    };
    let mut psi = [C64::new(0.0, 0.0); 8];
    for (half, sign) in [(0, 1.0), (1, -1.0)] {
        let fp = f(sign);
        let o = 4 * half;
        psi[o] = (-fp[0] + I * sign * fp[1]) * 0.5;
        psi[o + 1] = fp[2] * 0.5;
        psi[o + 2] = fp[2] * 0.5;
        psi[o + 3] = (fp[0] + I * sign * fp[1]) * 0.5;
    }
    psi
}

fn dense_eigs_real(a: &ComplexMatrix) -> Vec<C64> {
    let d = a.to_dense();
    assert!(d.iter().all(|z| z.im.abs() < 1e-14), "expected a real matrix");
    d.map(|z| z.re).complex_eigenvalues().iter().map(|z| C64::new(z.re, z.im)).collect()
}

fn max_re(eigs: &[C64]) -> f64 {
    eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

fn constant(eps: f64, mu: f64) -> MediumParams {
    MediumParams::constant(eps, mu).unwrap()
}

fn pack_nodes(grid: &GridSpec, medium: &MediumParams, f: &dyn Fn([f64; 3]) -> FieldSample) -> FieldState {
    let n = grid.points();
    let samples: Vec<FieldSample> = (0..n).map(|i| f(grid.coord(grid.unflatten(i), [0.0; 3]))).collect();
    let e: Vec<[C64; 3]> = samples.iter().map(|s| s.e).collect();
    let b: Vec<[C64; 3]> = samples.iter().map(|s| s.b).collect();
    rs_pack(&e, &b, medium, grid).unwrap()
}

// ---------- fixed transforms ----------

#[test]
fn t_and_characteristic_transform_are_unitary() {
    let tr = build_transforms();
    assert!(unitary_defect(&tr.t_rs) <= 1e-14);
    assert!(unitary_defect(&tr.u_char) <= 1e-14);
    assert!(unitary_defect(&tr.u) <= 1e-14);
}

#[test]
fn t_first_row() {
    let t = build_transforms().t_rs;
    let expected = [c(-0.5, 0.0), c(0.0, 0.5), r(0.0), r(0.0), c(0.0, -0.5), c(-0.5, 0.0), r(0.0), r(0.0)];
    for (j, x) in expected.iter().enumerate() {
        assert_eq!(t.get(0, j), *x, "T[0,{j}]");
    }
}

#[test]
fn sigma1_is_diagonalized_by_u() {
    let tr = build_transforms();
    let back = tr.u.transpose().matmul(&tr.lambda1).unwrap().matmul(&tr.u).unwrap();
    assert!(back.max_abs_diff(&tr.sigma[0]) <= 1e-14);
    for (k, s) in tr.sigma.iter().enumerate() {
        assert!(s.is_hermitian(0.0), "Σ{}", k + 1);
        assert!(s.matmul(s).unwrap().max_abs_diff(&ComplexMatrix::identity(4)) <= 1e-15);
    }
}

// ---------- RS packing ----------

#[test]
fn rs_pack_unit_ex() {
    let grid = GridSpec::line(2, 1.0).unwrap();
    let one = [r(1.0), r(0.0), r(0.0)];
    let zero = [r(0.0); 3];
    let psi = rs_pack(&[one, one], &[zero, zero], &MediumParams::vacuum(), &grid).unwrap();
    let s = 1.0 / (2.0 * SQRT_2);
    let expected = [-s, 0.0, 0.0, s, -s, 0.0, 0.0, s];
    for (comp, x) in expected.iter().enumerate() {
        for idx in 0..2 {
            assert!((psi.data[comp * 2 + idx] - r(*x)).norm() <= 1e-15);
        }
    }
    let oracle = psi_from_rs(one, zero, 1.0, 1.0);
    for (comp, x) in oracle.iter().enumerate() {
        assert!((psi.data[comp * 2] - x).norm() <= 1e-15);
    }
}

#[test]
fn rs_pack_matches_riemann_silberstein_definition() {
    let mut g = rng(11);
    let grid = GridSpec::line(8, 2.0).unwrap();
    let eps: Vec<f64> = (0..8).map(|i| 1.0 + 0.25 * i as f64).collect();
    let mu: Vec<f64> = (0..8).map(|i| 2.0 - 0.1 * i as f64).collect();
    let medium = MediumParams::sampled(eps.clone(), mu.clone()).unwrap();
    let e: Vec<[C64; 3]> = (0..8).map(|_| [rand_c(&mut g), rand_c(&mut g), rand_c(&mut g)]).collect();
    let b: Vec<[C64; 3]> = (0..8).map(|_| [rand_c(&mut g), rand_c(&mut g), rand_c(&mut g)]).collect();
    let psi = rs_pack(&e, &b, &medium, &grid).unwrap();
    for idx in 0..8 {
        let oracle = psi_from_rs(e[idx], b[idx], eps[idx], mu[idx]);
        for comp in 0..8 {
            assert!((psi.data[comp * 8 + idx] - oracle[comp]).norm() <= 1e-14);
        }
    }
}

#[test]
fn rs_pack_zero_fields() {
    let grid = GridSpec::square(4, 1.0).unwrap();
    let z = vec![[r(0.0); 3]; 16];
    let psi = rs_pack(&z, &z, &MediumParams::vacuum(), &grid).unwrap();
    assert!(psi.data.iter().all(|x| *x == r(0.0)));
}

#[test]
fn packed_fields_leave_gauss_slots_empty() {
    let mut g = rng(12);
    let grid = GridSpec::line(16, 1.0).unwrap();
    let e: Vec<[C64; 3]> = (0..16).map(|_| [rand_c(&mut g), rand_c(&mut g), rand_c(&mut g)]).collect();
    let b: Vec<[C64; 3]> = (0..16).map(|_| [rand_c(&mut g), rand_c(&mut g), rand_c(&mut g)]).collect();
    let psi = rs_pack(&e, &b, &constant(2.0, 3.0), &grid).unwrap();
    let (f4, f8) = gauss_monitors(&psi, &build_transforms()).unwrap();
    assert!(f4 <= 1e-14 && f8 <= 1e-14, "f4 = {f4}, f8 = {f8}");
}

#[test]
fn gauss_monitor_sees_injected_slot() {
    let grid = GridSpec::line(4, 1.0).unwrap();
    let z = vec![[r(0.0); 3]; 4];
    let psi = rs_pack(&z, &z, &MediumParams::vacuum(), &grid).unwrap();
    let t = build_transforms();
    // 𝓕 with 1e−6 in slot 3 at point 2, mapped back through T
    let mut f = [r(0.0); 8];
    f[3] = r(1e-6);
    let col = apply8(&t.t_rs, &f);
    let mut data = psi.data.clone();
    for comp in 0..8 {
        data[comp * 4 + 2] = col[comp];
    }
    let psi = FieldState::new(Layout::Rs8, data, grid).unwrap();
    let (f4, f8) = gauss_monitors(&psi, &t).unwrap();
    assert!((f4 - 1e-6).abs() <= 1e-20);
    assert!(f8 <= 1e-20);
}

proptest! {
    #[test]
    fn rs_round_trip(seed in 0u64..10_000, eps in 0.2f64..5.0, mu in 0.2f64..5.0) {
        let mut g = rng(seed);
        let grid = GridSpec::line(8, 1.0).unwrap();
        let e: Vec<[C64; 3]> = (0..8).map(|_| [rand_c(&mut g), rand_c(&mut g), rand_c(&mut g)]).collect();
        let b: Vec<[C64; 3]> = (0..8).map(|_| [rand_c(&mut g), rand_c(&mut g), rand_c(&mut g)]).collect();
        let medium = constant(eps, mu);
        let psi = rs_pack(&e, &b, &medium, &grid).unwrap();
        let (e2, b2) = rs_unpack(&psi, &medium).unwrap();
        for i in 0..8 {
            for k in 0..3 {
                prop_assert!((e[i][k] - e2[i][k]).norm() <= 1e-14);
                prop_assert!((b[i][k] - b2[i][k]).norm() <= 1e-14);
            }
        }
    }
}

// ---------- spectral, periodic ----------

#[test]
fn spectral_generator_is_anti_hermitian() {
    for grid in [GridSpec::line(16, 3.0).unwrap(), GridSpec::square(8, 2.0).unwrap(), GridSpec::new(3, 4, vec![1.0, 2.0, 3.0]).unwrap()] {
        let init = FieldState::new(Layout::Rs8, vec![r(0.0); 8 * grid.points()], grid.clone()).unwrap();
        let sys = build_spectral_periodic(&grid, &constant(2.0, 0.5), &init, None).unwrap();
        assert!(sys.a.add(&sys.a.adjoint()).unwrap().max_norm() <= 1e-14);
        assert!(sys.is_homogeneous());
    }
}

#[test]
fn spectral_eigenvalues_at_two_points() {
    let (len, eps, mu) = (3.0, 4.0, 1.0);
    let v = 1.0 / (eps * mu as f64).sqrt();
    let grid = GridSpec::line(2, len).unwrap();
    let init = FieldState::new(Layout::Rs8, vec![r(0.0); 16], grid.clone()).unwrap();
    let a = build_spectral_periodic(&grid, &constant(eps, mu), &init, None).unwrap().a;
    // iA is Hermitian with eigenvalues ∓vν
    let ia = a.scale(I).to_dense();
    let mut got: Vec<f64> = ia.symmetric_eigenvalues().iter().copied().collect();
    got.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let nu = 2.0 * PI / len;
    let mut expected = vec![-v * nu; 4];
    expected.extend(vec![0.0; 8]);
    expected.extend(vec![v * nu; 4]);
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).abs() <= 1e-12, "{got:?}");
    }
}

#[test]
fn spectral_generator_reproduces_the_tm_plane_wave_derivative() {
    let grid = GridSpec::square(8, 2.0).unwrap();
    let medium = MediumParams::vacuum();
    let field = tm_2d_field();
    let psi = pack_nodes(&grid, &medium, &|x| field(0.0, x));
    let sys = build_spectral_periodic(&grid, &medium, &psi, None).unwrap();
    let dc = sys.a.matvec(&sys.u0);
    let dpsi = spectral_state(&dc, &grid).unwrap();
    let (de, db) = rs_unpack(&dpsi, &medium).unwrap();
    let s5 = 5f64.sqrt();
    for idx in 0..grid.points() {
        let [x, y, _] = grid.coord(grid.unflatten(idx), [0.0; 3]);
        let cs = (PI * (x + 2.0 * y)).cos();
        let dez = s5 * PI * cs;
        assert!((de[idx][2] - r(dez)).norm() <= 1e-11);
        assert!((db[idx][0] - r(-2.0 * PI * cs)).norm() <= 1e-11);
        assert!((db[idx][1] - r(PI * cs)).norm() <= 1e-11);
        assert!(de[idx][0].norm() + de[idx][1].norm() + db[idx][2].norm() <= 1e-11);
    }
}

#[test]
fn spectral_source_free_norm_is_conserved() {
    let grid = GridSpec::line(8, 1.0).unwrap();
    let mut g = rng(13);
    let init = FieldState::new(Layout::Rs8, rand_vec(&mut g, 64), grid.clone()).unwrap();
    let sys = build_spectral_periodic(&grid, &MediumParams::vacuum(), &init, None).unwrap();
    let n0 = norm(&sys.u0);
    for t in [0.3, 1.0, 7.5] {
        let u = expm_apply(&sys.a.scale(I), t, &sys.u0).unwrap();
        assert!((norm(&u) - n0).abs() <= 1e-10 * n0);
    }
}

#[test]
fn spectral_rejects_varying_medium() {
    let grid = GridSpec::line(4, 1.0).unwrap();
    let init = FieldState::new(Layout::Rs8, vec![r(0.0); 32], grid.clone()).unwrap();
    let medium = MediumParams::sampled(vec![1.0, 2.0, 1.0, 2.0], vec![1.0]).unwrap();
    assert!(matches!(
        build_spectral_periodic(&grid, &medium, &init, None),
        Err(AssemblyError::InvalidMedium(_))
    ));
}

// ---------- Yee, periodic ----------

#[test]
fn yee_blocks_are_negative_transposes() {
    let grid = GridSpec::new(3, 4, vec![1.0, 1.5, 2.0]).unwrap();
    let n = grid.points();
    let a = yee_periodic_matrix(&grid, 0.7).unwrap();
    let mbe = curl_matrix(&grid, 0.7).unwrap();
    for (i, j, x) in a.triplets() {
        if i < 3 * n {
            assert!(j >= 3 * n);
            assert_eq!(x, mbe.get(i, j - 3 * n));
        } else {
            assert!(j < 3 * n);
            assert_eq!(x, -mbe.get(j, i - 3 * n));
        }
    }
    assert_eq!(a.add(&a.transpose()).unwrap().max_norm(), 0.0);
}

#[test]
fn div_of_curl_vanishes_3d() {
    let mut g = rng(14);
    let grid = GridSpec::new(3, 4, vec![1.0, 2.0, 0.5]).unwrap();
    let n = grid.points();
    let mut data = rand_vec(&mut g, 3 * n);
    data.extend(vec![r(0.0); 3 * n]);
    let e = FieldState::new(Layout::YeeEb, data, grid).unwrap();
    let div = discrete_div(&discrete_curl(&e).unwrap()).unwrap();
    assert!(div.iter().all(|x| x.norm() <= 1e-12));
}

#[test]
fn div_of_curl_vanishes_tm() {
    let mut g = rng(15);
    let grid = GridSpec::square(8, 2.0).unwrap();
    let e = FieldState::new(Layout::YeeTm2d, rand_vec(&mut g, 3 * 64), grid).unwrap();
    let div = discrete_div(&discrete_curl(&e).unwrap()).unwrap();
    assert!(div.iter().all(|x| x.norm() <= 1e-12));
}

#[test]
fn div_of_constant_is_zero() {
    let grid = GridSpec::square(8, 2.0).unwrap();
    let b = FieldState::new(Layout::YeeTm2d, vec![r(3.0); 3 * 64], grid).unwrap();
    assert!(discrete_div(&b).unwrap().iter().all(|x| x.norm() <= 1e-12));
}

#[test]
fn div_of_sinusoid_carries_the_discrete_symbol() {
    let (m, len) = (16, 2.0);
    let grid = GridSpec::square(m, len).unwrap();
    let nu = 2.0 * PI * 3.0 / len;
    let dx = len / m as f64;
    let b = sample_fields(Layout::YeeTm2d, &grid, &|p| FieldSample::real([0.0; 3], [(nu * p[0]).sin(), 0.0, 0.0]))
        .unwrap();
    let div = discrete_div(&b).unwrap();
    let symbol = 2.0 / dx * (nu * dx / 2.0).sin();
    for idx in 0..grid.points() {
        let x = grid.coord(grid.unflatten(idx), [0.0; 3])[0];
        assert!((div[idx] - r(symbol * (nu * x).cos())).norm() <= 1e-12, "idx {idx}");
    }
}

#[test]
fn yee_kills_constants() {
    let grid = GridSpec::new(3, 4, vec![1.0, 1.0, 1.0]).unwrap();
    let init = FieldState::new(Layout::YeeEb, vec![r(2.5); 6 * 64], grid.clone()).unwrap();
    let sys = build_yee_periodic(&grid, &MediumParams::vacuum(), &init, None).unwrap();
    assert!(sys.a.matvec(&sys.u0).iter().all(|x| x.norm() <= 1e-12));
}

#[test]
fn yee_exact_evolution_conserves_energy_and_divergence() {
    let mut g = rng(16);
    let grid = GridSpec::square(8, 2.0).unwrap();
    let data: Vec<C64> = (0..3 * 64).map(|_| r(g.gen_range(-1.0..1.0))).collect();
    let init = FieldState::new(Layout::YeeTm2d, data, grid.clone()).unwrap();
    let sys = build_yee_periodic(&grid, &MediumParams::vacuum(), &init, None).unwrap();
    let e0 = discrete_energy(&init).unwrap();
    let div0 = discrete_div(&init).unwrap();
    let u = expm_apply(&sys.a.scale(I), 1.3, &sys.u0).unwrap();
    let fin = FieldState::new(Layout::YeeTm2d, u, grid).unwrap();
    assert!((discrete_energy(&fin).unwrap() - e0).abs() <= 1e-10);
    assert!(max_diff(&discrete_div(&fin).unwrap(), &div0) <= 1e-10);
}

// ---------- 1-D upwind ----------

#[test]
fn right_difference_is_minus_left_transpose() {
    for m in [3, 8, 17] {
        let dx = 0.3;
        assert_eq!(d_right(m, dx), d_left(m, dx).transpose().scale(r(-1.0)));
    }
}

#[test]
fn left_difference_at_three_points() {
    let dx = 0.5;
    let d = d_left(3, dx);
    let expected = [[2.0, 0.0, 0.0], [-2.0, 2.0, 0.0], [0.0, -2.0, 2.0]];
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(d.get(i, j), r(expected[i][j]));
        }
    }
}

#[test]
fn perfect_conductor_left_coupling() {
    let b = boundary_coupling(CouplingKind::PecLeft, 1.0);
    let s = 1.0 / (2.0 * SQRT_2);
    let expected = [[1., 1., 1., -1.], [-1., -1., 1., -1.], [1., -1., 1., 1.], [1., -1., -1., -1.]];
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(b.get(i, j), r(expected[i][j] * s));
        }
    }
}

#[test]
fn impedance_right_coupling_reflection_entries() {
    let s = 1.0 / (2.0 * SQRT_2);
    let b1 = boundary_coupling(CouplingKind::ImpedanceRight, 1.0);
    let exchange = [[1., -1., 0., 0.], [1., -1., 0., 0.], [0., 0., 1., -1.], [0., 0., 1., -1.]];
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(b1.get(i, j), r(exchange[i][j] * s));
        }
    }
    let b2 = boundary_coupling(CouplingKind::ImpedanceRight, 2.0);
    let t = 1.0 / 3.0;
    let printed = [[1., -1., -t, -t], [1., -1., t, t], [-t, -t, 1., -1.], [t, t, 1., -1.]];
    for i in 0..4 {
        for j in 0..4 {
            assert!((b2.get(i, j) - r(printed[i][j] * s)).norm() <= 1e-16);
        }
    }
}

fn upwind_system(m: usize, bc: &BoundarySpec) -> ComplexMatrix {
    let grid = GridSpec::line(m, 15.0).unwrap();
    let init = FieldState::new(Layout::Te1dChar, vec![r(0.0); 8 * m], grid.clone()).unwrap();
    build_upwind_1d(&grid, &MediumParams::vacuum(), bc, &init, None, None).unwrap().a
}

#[test]
fn upwind_closures_are_dissipative() {
    use BoundaryKind::{Impedance, PerfectConductor};
    for m in [8, 16, 32] {
        for (l, rt) in [(PerfectConductor, PerfectConductor), (Impedance, Impedance), (PerfectConductor, Impedance), (Impedance, PerfectConductor)] {
            let a = upwind_system(m, &BoundarySpec::new(l, rt).unwrap());
            let worst = max_re(&dense_eigs_real(&a));
            assert!(worst <= 1e-10, "M = {m}, {l:?}/{rt:?}: max Re λ = {worst}");
        }
    }
}

#[test]
fn periodic_upwind_is_skew_plus_dissipation() {
    let a = upwind_system(8, &BoundarySpec::periodic());
    let sym = a.add(&a.transpose()).unwrap().scale(r(0.5)).to_dense();
    let top = sym.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    assert!(top <= 1e-12);
    assert!(max_re(&dense_eigs_real(&a)) <= 1e-10);
}

#[test]
fn upwind_rejects_inflow_without_sampler() {
    let grid = GridSpec::line(8, 1.0).unwrap();
    let init = FieldState::new(Layout::Te1dChar, vec![r(0.0); 64], grid.clone()).unwrap();
    let bc = BoundarySpec::new(BoundaryKind::InflowExact, BoundaryKind::InflowExact).unwrap();
    assert!(matches!(
        build_upwind_1d(&grid, &MediumParams::vacuum(), &bc, &init, None, None),
        Err(AssemblyError::UnsupportedBoundary(_))
    ));
}

// ---------- 1-D Yee ----------

fn yee_1d(m: usize, len: f64, bc: &BoundarySpec, field: Option<&FieldFn>, source: Option<CurrentFn>) -> (GridSpec, schrodinger_maxwell::schrodinger::LinearSystem) {
    let grid = GridSpec::line(m, len).unwrap();
    let init = match field {
        Some(f) => sample_fields(Layout::Te1d, &grid, &|x| f(0.0, x)).unwrap(),
        None => FieldState::new(Layout::Te1d, vec![r(0.0); 3 * m], grid.clone()).unwrap(),
    };
    let sys = build_yee_1d(&grid, &MediumParams::vacuum(), bc, &init, source).unwrap();
    (grid, sys)
}

#[test]
fn yee_1d_curl_block_away_from_walls() {
    let m = 16;
    let v = 0.5;
    let grid = GridSpec::line(m, 3.0).unwrap();
    let dx = grid.dx()[0];
    let init = FieldState::new(Layout::Te1d, vec![r(0.0); 3 * m], grid.clone()).unwrap();
    let bc = BoundarySpec::new(BoundaryKind::PerfectConductor, BoundaryKind::Impedance).unwrap();
    let a = build_yee_1d(&grid, &constant(2.0, 2.0), &bc, &init, None).unwrap().a;
    let dr = d_right(m, dx);
    for i in 0..m - 1 {
        for j in 0..m {
            assert_eq!(a.get(m + i, 2 * m + j), dr.get(i, j) * -v, "row {i}, col {j}");
        }
    }
}

#[test]
fn yee_1d_conducting_walls_keep_constants() {
    let m = 16;
    let bc = BoundarySpec::new(BoundaryKind::PerfectConductor, BoundaryKind::PerfectConductor).unwrap();
    let f: FieldFn = std::sync::Arc::new(|_, _| FieldSample::real([0.7, 0.0, 0.0], [0.0, 0.0, -1.3]));
    let (_, sys) = yee_1d(m, 15.0, &bc, Some(&f), None);
    assert!(sys.a.matvec(&sys.u0).iter().all(|x| x.norm() <= 1e-12));
}

#[test]
fn yee_1d_impedance_ghost_closure() {
    // ghost B_z at L + Δx/2 implied by the boundary row: 2E_y/v − B_z(L − Δx/2);
    // the closed form is odd about the wall, so the average is exact
    let t = 0.7;
    for m in [32, 64, 128] {
        let dx = 15.0 / m as f64;
        let (_, ey, _) = exact_impedance_1d(t, 15.0);
        let (_, _, bz_in) = exact_impedance_1d(t, 15.0 - dx / 2.0);
        let (_, _, bz_ghost) = exact_impedance_1d(t, 15.0 + dx / 2.0);
        assert!((2.0 * ey - bz_in - bz_ghost).abs() <= 1e-13);
    }
}

#[test]
fn yee_1d_impedance_row_is_consistent() {
    let bc = BoundarySpec::new(BoundaryKind::Impedance, BoundaryKind::Impedance).unwrap();
    let t = 0.4;
    let mut res = Vec::new();
    let mut hs = Vec::new();
    for m in [32, 64, 128, 256] {
        let f = impedance_field();
        let (grid, sys) = yee_1d(m, 15.0, &bc, Some(&f), Some(impedance_current()));
        let u = sample_fields(Layout::Te1d, &grid, &|x| f(t, x)).unwrap();
        let rhs: Vec<C64> = sys.a.matvec(&u.data).iter().zip(sys.source_at(t)).map(|(a, b)| a + b).collect();
        // E_y is stationary, so the right-wall row must tend to zero
        res.push(rhs[2 * m - 1].norm());
        hs.push(grid.dx()[0]);
    }
    assert!(res[3] < res[0]);
    assert!(slope(&hs, &res) > 0.8, "{res:?}");
}

// ---------- inhomogeneous spectral ----------

#[test]
fn inhomogeneous_reduces_to_periodic_for_constant_media() {
    let mut g = rng(17);
    for grid in [GridSpec::line(8, 2.0).unwrap(), GridSpec::square(4, 1.0).unwrap()] {
        let n = grid.points();
        let medium = MediumParams::sampled(vec![2.0; n], vec![0.5; n]).unwrap();
        let psi = FieldState::new(Layout::Rs8, rand_vec(&mut g, 8 * n), grid.clone()).unwrap();
        let inh = build_spectral_inhomogeneous(&grid, &medium, &psi, None).unwrap();
        let per = build_spectral_periodic(&grid, &constant(2.0, 0.5), &psi, None).unwrap();
        let direct = inh.a.matvec(&psi.data);
        let via = spectral_state(&per.a.matvec(&per.u0), &grid).unwrap();
        assert!(max_diff(&direct, &via.data) <= 1e-12);
    }
}

#[test]
fn inhomogeneous_matches_physical_maxwell() {
    // ∂_t(εE) = ∇×(B/μ), ∂_t B = −∇×E in 1-D, evaluated analytically
    let (m, len) = (64, 2.0);
    let k = 2.0 * PI / len;
    let eps = |x: f64| 1.5 + 0.5 * (k * x).sin();
    let mu = |x: f64| 1.2 + 0.3 * (k * x).cos();
    let grid = GridSpec::line(m, len).unwrap();
    let xs: Vec<f64> = (0..m).map(|i| grid.coord([i, 0, 0], [0.0; 3])[0]).collect();
    let medium = MediumParams::sampled(xs.iter().map(|x| eps(*x)).collect(), xs.iter().map(|x| mu(*x)).collect()).unwrap();
    let field = |x: f64| {
        FieldSample::real(
            [0.3 / eps(x), (k * x).sin(), (2.0 * k * x).cos()],
            [0.1, 0.5 * (k * x).cos(), (3.0 * k * x).sin()],
        )
    };
    let psi = pack_nodes(&grid, &medium, &|p| field(p[0]));
    let sys = build_spectral_inhomogeneous(&grid, &medium, &psi, None).unwrap();
    let dpsi = FieldState::new(Layout::Rs8, sys.a.matvec(&psi.data), grid.clone()).unwrap();
    let (de, db) = rs_unpack(&dpsi, &medium).unwrap();
    // d/dx of B_y/μ and B_z/μ, and of E_y, E_z
    let d_by_mu = |x: f64| {
        let (by, dby) = (0.5 * (k * x).cos(), -0.5 * k * (k * x).sin());
        let (m_, dm) = (mu(x), -0.3 * k * (k * x).sin());
        (dby * m_ - by * dm) / (m_ * m_)
    };
    let d_bz_mu = |x: f64| {
        let (bz, dbz) = ((3.0 * k * x).sin(), 3.0 * k * (3.0 * k * x).cos());
        let (m_, dm) = (mu(x), -0.3 * k * (k * x).sin());
        (dbz * m_ - bz * dm) / (m_ * m_)
    };
    for (i, x) in xs.iter().copied().enumerate() {
        let expected_e = [0.0, -d_bz_mu(x) / eps(x), d_by_mu(x) / eps(x)];
        let expected_b = [0.0, -2.0 * k * (2.0 * k * x).sin(), -k * (k * x).cos()];
        for c in 0..3 {
            assert!((de[i][c] - r(expected_e[c])).norm() <= 1e-8, "dE[{c}] at {x}: {} vs {}", de[i][c], expected_e[c]);
            assert!((db[i][c] - r(expected_b[c])).norm() <= 1e-8, "dB[{c}] at {x}: {} vs {}", db[i][c], expected_b[c]);
        }
    }
    // with a longitudinal component the printed divergence rows pick up ∇μ̄·B̂ with the curl sign
    let (f4, _) = gauss_monitors(&dpsi, &build_transforms()).unwrap();
    assert!(f4 > 1e-3);
}

#[test]
fn inhomogeneous_keeps_gauss_slots_for_transverse_fields() {
    let (m, len) = (64, 2.0);
    let k = 2.0 * PI / len;
    let grid = GridSpec::line(m, len).unwrap();
    let xs: Vec<f64> = (0..m).map(|i| grid.coord([i, 0, 0], [0.0; 3])[0]).collect();
    let medium = MediumParams::sampled(
        xs.iter().map(|x| 2.0 + (k * x).sin()).collect(),
        xs.iter().map(|x| 1.0 + 0.5 * (k * x).cos()).collect(),
    )
    .unwrap();
    let psi = pack_nodes(&grid, &medium, &|p| {
        let x = p[0];
        FieldSample::real([0.0, (k * x).cos(), (3.0 * k * x).sin()], [0.0, (2.0 * k * x).sin(), 0.4])
    });
    let sys = build_spectral_inhomogeneous(&grid, &medium, &psi, None).unwrap();
    let dpsi = FieldState::new(Layout::Rs8, sys.a.matvec(&psi.data), grid).unwrap();
    let (f4, f8) = gauss_monitors(&dpsi, &build_transforms()).unwrap();
    assert!(f4 <= 1e-12 && f8 <= 1e-12, "{f4} {f8}");
}

// ---------- tanh profile ----------

#[test]
fn tanh_profile_center_and_limits() {
    assert_eq!(tanh_permittivity(1.0, 3.0, 2.0, 4.0, 2.0), 2.0);
    assert!((tanh_permittivity(1.0, 3.0, 0.0, 4.0, -50.0) - 1.0).abs() <= 1e-15);
    assert!((tanh_permittivity(1.0, 3.0, 0.0, 4.0, 50.0) - 3.0).abs() <= 1e-15);
    assert!((tanh_permittivity(1.0, 3.0, 0.0, 10.0, -1.0) - 1.0).abs() <= 1e-4);
    assert!((tanh_permittivity(1.0, 3.0, 0.0, 10.0, 1.0) - 3.0).abs() <= 1e-4);
}

#[test]
fn periodic_tanh_profile_closes() {
    let p = TanhProfile::new(1.0, 3.0, 12.0, 2.0).unwrap().periodic(0.0, 40.0, 0.9);
    assert!((p.eval(0.0) - p.eval(40.0)).abs() <= 1e-6);
    assert!((p.eval(20.0) - 3.0).abs() <= 1e-6);
    assert!(TanhProfile::new(1.0, -3.0, 0.0, 1.0).is_err());
    assert!(TanhProfile::new(1.0, 3.0, 0.0, 0.0).is_err());
}

// ---------- interface ----------

#[test]
fn jump_matrix_first_row() {
    let r1 = jump_matrix(1.0, 1.0, [1.0, 0.0, 0.0]);
    for (j, x) in [1.0, 0.0, 0.0, 1.0].iter().enumerate() {
        assert_eq!(r1.get(0, j), r(*x));
    }
}

#[test]
fn equal_media_have_no_jump() {
    let mut g = rng(18);
    let spec = InterfaceSpec::new(0.0, constant(2.0, 3.0), constant(2.0, 3.0), [1.0, 0.0, 0.0]).unwrap();
    let psi = rand_vec(&mut g, 8);
    let d: Vec<C64> = spec.r1_tilde.matvec(&psi).iter().zip(spec.r2_tilde.matvec(&psi)).map(|(a, b)| a - b).collect();
    assert!(norm(&d) == 0.0);
}

#[test]
fn fresnel_traces_satisfy_the_jump_conditions() {
    let w = char_transform();
    for p in [FresnelParams::default(), FresnelParams { eps2: 3.0, mu2: 1.0, ..Default::default() }] {
        let spec = InterfaceSpec::new(0.0, constant(p.eps1, p.mu1), constant(p.eps2, p.mu2), [1.0, 0.0, 0.0]).unwrap();
        let f = interface_field(p);
        for t in [0.0, 0.9, 2.3] {
            let left = f(t, [-1e-300, 0.0, 0.0]);
            let right = f(t, [0.0, 0.0, 0.0]);
            let u1 = apply8(&w, &f_vector(left.e, left.b, p.eps1, p.mu1));
            let u2 = apply8(&w, &f_vector(right.e, right.b, p.eps2, p.mu2));
            let d: Vec<C64> = spec.r1_tilde.matvec(&u1).iter().zip(spec.r2_tilde.matvec(&u2)).map(|(a, b)| a - b).collect();
            assert!(norm(&d) <= 1e-10, "{p:?} t = {t}: {}", norm(&d));
        }
    }
}

#[test]
fn fresnel_continuity_and_matched_impedance() {
    let p = FresnelParams::default();
    assert_eq!(p.z1(), p.z2());
    assert_eq!(p.reflection(), 0.0);
    assert_eq!(p.k2(), 1.0);
    assert!((1.0 + p.reflection() - p.transmission()).abs() <= 1e-15);
    let q = FresnelParams { eps2: 3.0, mu2: 1.0, ..Default::default() };
    assert!((1.0 + q.reflection() - q.transmission()).abs() <= 1e-15);
    let (el, _) = exact_interface(&q, 0.4, -1e-300);
    let (er, _) = exact_interface(&q, 0.4, 0.0);
    assert!((el - er).norm() <= 1e-15);
}

#[test]
fn matching_system_is_solvable_for_all_small_contrasts() {
    for e2 in [1.0, 2.0, 3.0] {
        for m2 in [1.0, 2.0, 3.0] {
            let spec = InterfaceSpec::new(0.0, MediumParams::vacuum(), constant(e2, m2), [1.0, 0.0, 0.0]).unwrap();
            let det = matching_determinant(&spec);
            assert!(det > 1e-6, "ε₂ = {e2}, μ₂ = {m2}: det = {det}");
            assert!(scattering_matrix(&spec).is_ok());
        }
    }
}

#[test]
fn interface_rejects_non_unit_normal_and_off_grid_position() {
    assert!(matches!(
        InterfaceSpec::new(0.0, MediumParams::vacuum(), MediumParams::vacuum(), [1.0, 1.0, 0.0]),
        Err(AssemblyError::NonUnitNormal(_))
    ));
    let grid = GridSpec::line(16, 4.0).unwrap().with_origin(vec![-2.0]);
    assert!(InterfaceGrid::new(&grid, 5.0).is_err());
    assert!(InterfaceGrid::new(&grid, -1.9).is_err());
    assert!(InterfaceGrid::new(&grid, 0.0).is_ok());
}

#[test]
fn transparent_interface_is_plain_upwind() {
    let m = 16;
    let grid = GridSpec::line(m, 4.0).unwrap().with_origin(vec![-2.0]);
    let vac = MediumParams::vacuum();
    let spec = InterfaceSpec::new(0.0, vac.clone(), vac.clone(), [1.0, 0.0, 0.0]).unwrap();
    let bc = BoundarySpec::new(BoundaryKind::PerfectConductor, BoundaryKind::PerfectConductor).unwrap();
    let zero = FieldState::new(Layout::Te1dChar, vec![r(0.0); 8 * m], grid.clone()).unwrap();
    let a_int = build_interface_1d(&grid, &spec, &bc, &zero, None, None).unwrap().a;
    let a_up = build_upwind_1d(&grid, &vac, &bc, &zero, None, None).unwrap().a;
    let ig = InterfaceGrid::new(&grid, 0.0).unwrap();
    // upwind index c·M + j ↔ interface index on the side holding cell j
    let perm: Vec<usize> = (0..8 * m)
        .map(|i| {
            let (c, j) = (i / m, i % m);
            if j < ig.m1 {
                ig.index(0, c, j)
            } else {
                ig.index(1, c, j - ig.m1)
            }
        })
        .collect();
    let mut g = rng(19);
    let u = rand_vec(&mut g, 8 * m);
    let mut u_int = vec![r(0.0); 8 * m];
    for (i, p) in perm.iter().enumerate() {
        u_int[*p] = u[i];
    }
    let du = a_up.matvec(&u);
    let du_int = a_int.matvec(&u_int);
    for (i, p) in perm.iter().enumerate() {
        assert!((du[i] - du_int[*p]).norm() <= 1e-10, "upwind row {i}");
    }
}

#[test]
fn plane_wave_is_a_near_fixed_point_of_the_interface_scheme() {
    let p = FresnelParams { eps2: 3.0, mu2: 1.0, ..Default::default() };
    let bc = BoundarySpec::new(BoundaryKind::InflowExact, BoundaryKind::InflowExact).unwrap();
    let spec = InterfaceSpec::new(0.0, constant(p.eps1, p.mu1), constant(p.eps2, p.mu2), [1.0, 0.0, 0.0]).unwrap();
    let exact = interface_field(p);
    let t = 0.8;
    let mut hs = Vec::new();
    let mut res = Vec::new();
    for m in [64, 128, 256] {
        let grid = GridSpec::line(m, 8.0).unwrap().with_origin(vec![-4.0]);
        let f0 = exact.clone();
        let init = interface_pack(&grid, &spec, &|side, x| f0(t, [if side == 0 { x.min(-1e-300) } else { x }, 0.0, 0.0])).unwrap();
        let sys = build_interface_1d(&grid, &spec, &bc, &init, None, Some(exact.clone())).unwrap();
        // d/dt of e^{iωt} data is iω times the data
        let rhs: Vec<C64> = sys.a.matvec(&init.data).iter().zip(sys.source_at(t)).map(|(a, b)| a + b).collect();
        let worst = rhs.iter().zip(&init.data).map(|(x, u)| (x - u * I * p.omega).norm()).fold(0.0, f64::max);
        res.push(worst);
        hs.push(8.0 / m as f64);
    }
    assert!(slope(&hs, &res) > 0.8, "{res:?}");
}

#[test]
fn field_state_and_grid_validation() {
    let grid = GridSpec::line(8, 1.0).unwrap();
    assert!(FieldState::new(Layout::Te1d, vec![r(0.0); 23], grid.clone()).is_err());
    assert!(FieldState::new(Layout::Te1d, vec![r(0.0); 24], grid).is_ok());
    assert!(GridSpec::line(7, 1.0).is_err());
    assert!(GridSpec::line(8, -1.0).is_err());
    assert!(MediumParams::constant(0.0, 1.0).is_err());
    assert!(BoundarySpec::new(BoundaryKind::Periodic, BoundaryKind::Impedance).is_err());
}
