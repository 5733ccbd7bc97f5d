struct ZST;
struct NotClone;

trait Trait<T> {
    fn f(&self, a: T);
}

#[when(any(T = i32, T: Clone))]
impl<T> Trait<T> for ZST {
    fn f(&self, a: T) {
        println!("specialized");
    }
}

impl<T> Trait<T> for ZST {
    fn f(&self, a: T) {
        println!("default");
    }
}

fn main() {
    let s = ZST;
    spec! { s.f(42); ZST; [i32]; }
    spec! { s.f(vec![1, 2, 3]); ZST; [Vec<i32>]; Vec<i32>: Clone }
    spec! { s.f(NotClone); ZST; [NotClone]; }
    spec! { s.f("s"); ZST; [_]; }
}
