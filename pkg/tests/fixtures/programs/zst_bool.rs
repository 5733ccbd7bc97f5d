use std::marker::PhantomData;

struct ZST<U>(PhantomData<U>);

trait Trait<T, U> {
    fn f(&self, a: T, b: U);
}

#[when(all(any(T = i32, T: Clone), U = bool))]
impl<T, U> Trait<T, U> for ZST<U> {
    fn f(&self, a: T, b: U) {
        println!("specialized");
    }
}

impl<T, U> Trait<T, U> for ZST<U> {
    fn f(&self, a: T, b: U) {
        println!("default");
    }
}

fn main() {
    let flag = ZST::<bool>(PhantomData);
    let byte = ZST::<u8>(PhantomData);
    spec! { flag.f(1, true); ZST<bool>; [i32, bool]; }
    spec! { byte.f(1, 7u8); ZST<u8>; [i32, u8]; }
}
