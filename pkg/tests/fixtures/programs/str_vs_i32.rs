struct ZST;

trait Trait<T> {
    fn f(&self, a: T);
}

#[when(T = i32)]
impl<T> Trait<T> for ZST {
    fn f(&self, a: T) {
        println!("specialized i32");
    }
}

impl<T> Trait<T> for ZST {
    fn f(&self, a: T) {
        println!("default");
    }
}

fn main() {
    let s = ZST;
    spec! { s.f("s"); ZST; [&str]; }
    spec! { s.f(42); ZST; [i32]; }
}
