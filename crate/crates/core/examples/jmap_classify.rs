//! The j-mapping on catalog algebras: the pseudo-H identity and Métivier
//! witnesses.
//!
//! ```text
//! cargo run --example jmap_classify
//! ```

use nilflow::algebra::orthogonal_split;
use nilflow::constructors::{builtin, names};
use nilflow::jmap::{check_pseudo_h, classify_algebra, j_operator};
use nilflow::{AlgebraVector, Tolerances};

fn main() -> nilflow::Result<()> {
    let tol = Tolerances::default();
    for name in names() {
        let (alg, product) = builtin(name)?;
        let split = orthogonal_split(&alg, &product, &tol)?;
        let class = classify_algebra(&split, 32, 1)?;
        let pseudo = check_pseudo_h(&split)?;
        print!(
            "{name:12} carnot={} metivier={} pseudo_h={} (residual {:.1e})",
            class.carnot, class.metivier, pseudo.holds, pseudo.residual
        );
        match (&class.witness_label, &class.witness) {
            (Some(label), _) => println!(" witness {label}"),
            (None, Some(w)) => println!(" witness {w:?}"),
            _ => println!(),
        }
    }

    let (alg, product) = builtin("metivier5")?;
    let split = orthogonal_split(&alg, &product, &tol)?;
    let j = j_operator(&split, &AlgebraVector::basis(5, 4))?;
    println!("metivier5 j(Z) (columns are images of X1, Y1, X2, Y2):{}", j.matrix());
    Ok(())
}
