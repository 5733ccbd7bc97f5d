struct ZST;

const SEVEN: &'static i32 = &7;

trait Trait<T, U> {
    fn f(&self, a: T, b: U);
}

#[when(all(T = &str, T: 'a, U = &'a i32))]
impl<'a, T, U> Trait<T, U> for ZST {
    fn f(&self, a: T, b: U) {
        println!("same lifetime");
    }
}

#[when(all(T = &str, T: 'a, U = &'b i32))]
impl<'a, 'b, T, U> Trait<T, U> for ZST {
    fn f(&self, a: T, b: U) {
        println!("distinct lifetimes");
    }
}

impl<T, U> Trait<T, U> for ZST {
    fn f(&self, a: T, b: U) {
        println!("default");
    }
}

fn main() {
    let zst = ZST;
    let p: &'static str = "p";
    spec! { zst.f(p, SEVEN); ZST; [&'static str, &'static i32]; }
    spec! { zst.f(p, &7); ZST; [&'static str, &i32]; }
}
