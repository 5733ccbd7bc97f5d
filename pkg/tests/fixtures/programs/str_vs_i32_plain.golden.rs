struct ZST;
trait Trait<T> {
    fn f(&self, a: T); }
trait Trait_i32 {
    fn f(&self, a: i32); }
impl<T> Trait<T> for ZST {
    fn f(&self, a: T) {} }
impl Trait_i32 for ZST {
    fn f(&self, a: i32) {} }

fn main() {
    let s = ZST;
    <ZST as Trait<&str>>::f(&s, "s");
    <ZST as Trait_i32>::f(&s, 42);
}
