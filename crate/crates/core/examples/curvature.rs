//! Closed-form constant-curvature metrics, their Christoffel symbols and the
//! constant-curvature residual.
use hydrobracket::expr::{field_names, int, rat};
use hydrobracket::geometry::canonical_metric;

fn main() -> hydrobracket::Result<()> {
    let (a, k) = (vec![int(1), int(3)], int(2));
    let cm = canonical_metric(&a, &k)?;
    let names = field_names(2);
    println!("det g^(ij) = {}", cm.det.display(&names));
    for i in 0..2 {
        for j in 0..2 {
            println!("g^{}{} = {}", i + 1, j + 1, cm.metric.contra[[i, j]].display(&names));
        }
    }
    let conn = cm.metric.christoffel()?;
    println!("Gamma^1_11 = {}", conn.gamma[[0, 0, 0]].display(&names));
    println!("constant curvature {k}: {}", cm.metric.constant_curvature_residual(&k)?.is_zero());
    println!("constant curvature {}: {}", rat(5, 2), cm.metric.constant_curvature_residual(&rat(5, 2))?.is_zero());

    let degenerate = canonical_metric(&[int(0), int(1)], &int(1))?;
    println!("degenerate model det = {}", degenerate.det.display(&names));
    Ok(())
}
