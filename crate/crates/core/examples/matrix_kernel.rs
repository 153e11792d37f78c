// Kronecker products, Hermitian spectra and singular values of 4×4 matrices.

use qslchan::matrix::{eig_hermitian, kron, pauli, schatten_norms, singular_values, ComplexMatrix};
use qslchan::Result;

pub fn run_example() -> Result<()> {
    let xx = kron(&pauli(1), &pauli(1))?;
    println!("sigma_x (x) sigma_x:\n{xx:?}");

    let rho = ComplexMatrix::diag(&[0.4, 0.3, 0.2, 0.1])?;
    println!(
        "eigenvalues of diag(0.4, 0.3, 0.2, 0.1): {:?}",
        eig_hermitian(&rho)?
    );

    let zz = kron(&pauli(3), &ComplexMatrix::identity(2)?)?;
    let sv = singular_values(&(zz.scale(0.5) + xx))?;
    let [l1, l2, linf] = schatten_norms(&sv);
    println!("singular values {sv:?}");
    println!("Schatten norms: l1 = {l1:.6}, l2 = {l2:.6}, linf = {linf:.6}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
