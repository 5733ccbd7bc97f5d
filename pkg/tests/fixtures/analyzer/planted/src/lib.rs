use std::collections::HashMap;

pub trait Summary {
    fn summarize(&self) -> String;
}

impl Summary for i32 {
    fn summarize(&self) -> String {
        let mut out = String::new();
        out.push_str("value: ");
        out.push_str(&self.to_string());
        out
    }
}

impl Summary for f64 {
    fn summarize(&self) -> String {
        let mut out = String::new();
        out.push_str("value: ");
        out.push_str(&self.to_string());
        out
    }
}

pub fn encode_i32(x: i32, buf: &mut Vec<u8>) -> usize {
    let bytes = x.to_le_bytes();
    let start = buf.len();
    for b in bytes.iter() {
        buf.push(*b);
    }
    buf.len() - start + 0
}

pub fn encode_f64(x: f64, buf: &mut Vec<u8>) -> usize {
    let bytes = x.to_le_bytes();
    let start = buf.len();
    for b in bytes.iter() {
        buf.push(*b);
    }
    buf.len() - start - 0
}

pub fn clamp<T: PartialOrd>(x: T, lo: T, hi: T) -> T {
    if x < lo {
        return lo;
    }
    if x > hi {
        return hi;
    }
    x
}

pub fn clamp_i32(x: i32, lo: i32, hi: i32) -> i32 {
    if x < lo {
        return lo;
    }
    if x > hi {
        return hi;
    }
    x
}

pub fn parse_config(text: &str) -> HashMap<String, String> {
    let mut map = HashMap::new();
    for line in text.lines() {
        if let Some((k, v)) = line.split_once('=') {
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
    }
    map
}

pub fn checksum(data: &[u8]) -> u32 {
    data.iter().fold(0u32, |acc, b| acc.wrapping_mul(31).wrapping_add(*b as u32))
}

fn main() {
    let mut buf = Vec::new();
    encode_i32(clamp_i32(5, 0, 3), &mut buf);
    encode_f64(clamp(2.5, 0.0, 1.0), &mut buf);
    println!("{} {}", 1.summarize(), checksum(&buf));
}
