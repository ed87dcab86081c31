//! Exact rational-function arithmetic: parsing, normal form, derivatives,
//! zero testing.
use hydrobracket::expr::{field_names, is_zero, parse, parse_expr, ParseMode};

fn main() -> hydrobracket::Result<()> {
    let names = field_names(2);
    let e = parse_expr("(u1^2 - u2^2)/(u1 - u2) + 1/3", &names)?;
    println!("normal form: {}", e.display(&names));
    println!("d/du1:       {}", e.derivative(0).display(&names));

    let f = parse_expr("u1^3/(1 - u1*u2)", &names)?;
    println!("f = {}", f.display(&names));
    println!("df/du2 = {}", f.derivative(1).display(&names));

    let identity = parse("(u1 + u2)^2 - u1^2 - 2*u1*u2 - u2^2", &names, ParseMode::Rational)?;
    println!("(u1+u2)^2 - expansion is zero: {:?}", is_zero(&identity)?);
    Ok(())
}
