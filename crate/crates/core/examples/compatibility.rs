//! Compatibility with a constant bracket, and pencils of two nonlocal brackets.
use hydrobracket::bracket::{check_compat_constant, check_pencil, ConstantBracket, HydroBracket};
use hydrobracket::expr::{field_names, int, parse_expr};
use hydrobracket::geometry::canonical_metric;
use hydrobracket::tensor::Matrix;

fn main() -> hydrobracket::Result<()> {
    let k = int(1);
    let eta = ConstantBracket::identity(2);
    let curved = HydroBracket::from_metric(canonical_metric(&[int(1), int(1)], &k)?.metric.contra, k.clone())?;
    println!("mu - K uu against the identity:\n{}\n", check_compat_constant(&curved, &eta)?);

    let names = field_names(2);
    let polar = Matrix::from_rows(vec![
        vec![parse_expr("1", &names)?, parse_expr("0", &names)?],
        vec![parse_expr("0", &names)?, parse_expr("1/u1^2", &names)?],
    ])?;
    let polar = HydroBracket::from_metric(polar, int(0))?;
    println!("flat polar metric against the identity:\n{}\n", check_compat_constant(&polar, &eta)?);

    let other = HydroBracket::from_metric(canonical_metric(&[int(2), int(1)], &k)?.metric.contra, k)?;
    let pencil = check_pencil(&curved, &other)?;
    let (c1, c2) = &pencil.local_member;
    println!("pencil (local member {c1}, {c2}):\n{}", pencil.pencil);
    Ok(())
}
