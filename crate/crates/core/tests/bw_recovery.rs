use hamrecon::bw::{self, FitOptions};
use hamrecon::chain::{assemble_hamiltonian, ground_state, reduced_density_matrix};

#[test]
fn seven_site_block_of_three() {
    let reg = bw::weight_conventions();
    for theta0 in [0.3f64, 0.45] {
        let gs = ground_state(&assemble_hamiltonian(7, theta0).unwrap(), 1e-10, 4).unwrap();
        let rho = reduced_density_matrix(&gs.vector, 3).unwrap();
        let mut best_err = f64::INFINITY;
        for name in reg.names() {
            let conv = reg.get(name).unwrap();
            let fit = bw::fit(&rho, conv, &FitOptions::default()).unwrap();
            assert!(fit.min_relative_entropy >= 0.0);
            assert!(!fit.boundary_flag, "{name}, θ₀ = {theta0}");
            let err = (fit.theta_hat.sin() - theta0.sin()).abs();
            if err <= 0.15 {
                let profile = bw::theta_profile(&rho, conv, fit.beta_hat, &FitOptions::default().theta_grid()).unwrap();
                assert_eq!(bw::gradient_sign_changes(&profile), 1, "{name}, θ₀ = {theta0}");
            }
            best_err = best_err.min(err);
        }
        assert!(best_err <= 0.15, "θ₀ = {theta0}: {best_err}");
    }
}

#[test]
fn klein_inequality_on_a_grid() {
    let gs = ground_state(&assemble_hamiltonian(5, 0.45).unwrap(), 1e-10, 4).unwrap();
    let rho = reduced_density_matrix(&gs.vector, 2).unwrap();
    let conv = bw::HalfIntegerWeights;
    for theta in [0.1, 0.4, 0.8, 1.2] {
        for beta in [0.01, 0.5, 3.0, 30.0] {
            let s = bw::relative_entropy(&rho, theta, beta, &conv).unwrap();
            assert!(s.raw >= -1e-10 && !s.floor_violation, "({theta}, {beta}): {}", s.raw);
        }
    }
}

#[test]
fn infinite_temperature_limit() {
    let gs = ground_state(&assemble_hamiltonian(5, 0.3).unwrap(), 1e-10, 4).unwrap();
    let rho = reduced_density_matrix(&gs.vector, 2).unwrap();
    let s_rho = hamrecon::chain::entanglement_entropy(&rho);
    let s = bw::relative_entropy(&rho, 0.3, 1e-12, &bw::IntegerWeights).unwrap();
    assert!((s.value - (2.0 * 6f64.ln() - s_rho)).abs() <= 1e-9);
}
