struct ZST;

const SEVEN: &'static i32 = &7;

trait Trait<T, U, V> {
    fn f(&self, a: T, b: U) -> V;
}

#[when(all(T = &str, T: 'b, U = for<'a> fn(T, &'a i32) -> V))]
impl<'b, T, U, V> Trait<T, U, V> for ZST {
    fn f(&self, a: T, b: U) -> V {
        println!("higher-ranked");
        b(a, SEVEN)
    }
}

impl<T, U, V: Default> Trait<T, U, V> for ZST {
    fn f(&self, a: T, b: U) -> V {
        println!("fallback");
        V::default()
    }
}

fn main() {
    let zst = ZST;
    let p: &'static str = "p";
    let n: u32 = spec! { zst.f(p, |s: &str, n: &i32| s.len() as u32 + *n as u32); ZST; [&'static str, for<'a> fn(&'static str, &'a i32) -> u32, u32]; };
    println!("{}", n);
    let m: u32 = spec! { zst.f(p, 42); ZST; [&'static str, i32, u32]; };
    println!("{}", m);
}
