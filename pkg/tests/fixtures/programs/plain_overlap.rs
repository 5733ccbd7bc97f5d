struct ZST;

trait Trait<T> {
    fn f(&self, a: T);
}

impl Trait<i32> for ZST {
    fn f(&self, a: i32) {
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
    s.f("s");
    s.f(42);
}
