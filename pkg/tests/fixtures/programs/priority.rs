struct ZST;
struct Both;

trait First {}
trait Second {}
trait Third {}

impl First for Both {}
impl Second for Both {}
impl Third for Both {}

trait Trait<T> {
    fn f(&self, a: T);
}

#[when(T: First)]
impl<T> Trait<T> for ZST {
    fn f(&self, a: T) {
        println!("single bound");
    }
}

#[when(T: Second + Third)]
impl<T> Trait<T> for ZST {
    fn f(&self, a: T) {
        println!("multiple bounds");
    }
}

impl<T> Trait<T> for ZST {
    fn f(&self, a: T) {
        println!("default");
    }
}

fn main() {
    let s = ZST;
    spec! { s.f(Both); ZST; [Both]; Both: First + Second + Third }
}
