use std::any::TypeId;

pub trait Codec {
    fn put_u16(&self, out: &mut Vec<u8>, x: u16) {
        for b in x.to_le_bytes().iter() {
            out.push(*b);
        }
    }

    fn put_u32(&self, out: &mut Vec<u8>, x: u32) {
        for b in x.to_le_bytes().iter() {
            out.push(*b);
        }
    }
}

pub struct Cell<T>(T);

impl Cell<i32> {
    pub fn doubled(&self) -> i32 {
        let v = self.0;
        v + v
    }
}

impl Cell<f64> {
    pub fn doubled(&self) -> f64 {
        let v = self.0;
        v + v
    }
}

pub fn scale_i64(x: i64, k: i64) -> i64 {
    let y = x * k;
    if y < 0 { 0 } else { y }
}

pub fn scale_u64(x: u64, k: u64) -> u64 {
    let y = x * k;
    if y < 0 { 0 } else { y }
}

pub fn scale<T: 'static + Copy>(x: T, k: T) -> T {
    if TypeId::of::<T>() == TypeId::of::<i64>() {
        let r = scale_i64(unsafe { std::mem::transmute_copy(&x) }, unsafe { std::mem::transmute_copy(&k) });
        return unsafe { std::mem::transmute_copy(&r) };
    }
    x
}

pub fn left_pad(s: &str, n: usize) -> String {
    let mut out = String::new();
    for _ in 0..n {
        out.push(' ');
    }
    out.push_str(s);
    out
}

pub fn right_pad(s: &str, n: usize) -> String {
    let mut out = String::new();
    out.push_str(s);
    for _ in 0..n {
        out.push(' ');
    }
    out
}
