//! Reduced binary quadratic forms, used as the class-number oracle.

use rug::Integer;

/// A positive definite form `a x^2 + b xy + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// All reduced primitive forms of discriminant `-d` (`d > 0`).
pub fn reduced_forms(d: u64) -> Vec<Form> {
    let d = d as i64;
    let mut out = Vec::new();
    // reduced forms satisfy a <= sqrt(d/3)
    let mut a = 1i64;
    while 3 * a * a <= d {
        for b in -a + 1..=a {
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            let g = Integer::from(a).gcd(&Integer::from(b)).gcd(&Integer::from(c));
            if g == 1 {
                out.push(Form { a, b, c });
            }
        }
        a += 1;
    }
    out
}

pub fn class_number_by_forms(d: u64) -> u64 {
    reduced_forms(d).len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d7_has_one_form() {
        assert_eq!(reduced_forms(7), vec![Form { a: 1, b: 1, c: 2 }]);
    }

    #[test]
    fn d15_has_two_forms() {
        assert_eq!(class_number_by_forms(15), 2);
        assert_eq!(class_number_by_forms(3), 1);
    }
}
