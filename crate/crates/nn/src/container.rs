//! Versioned binary container for checkpoints.
//!
//! A container is an ordered list of named entries (`f64` buffers, `u64`
//! buffers, or raw bytes) written little-endian behind a magic/version
//! header. Serialization is byte-deterministic, and `f64` payloads round
//! trip bit-exactly — resuming from a checkpoint must replay identically.

use std::io::{Read, Write};

use crate::error::NnError;

const MAGIC: &[u8; 8] = b"KOFNCKP1";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Entry {
    F64(Vec<f64>),
    U64(Vec<u64>),
    Bytes(Vec<u8>),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Container {
    entries: Vec<(String, Entry)>,
}

impl Container {
    pub fn new() -> Container {
        Container::default()
    }

    pub fn put_f64(&mut self, name: &str, data: Vec<f64>) {
        self.entries.push((name.to_string(), Entry::F64(data)));
    }

    pub fn put_u64(&mut self, name: &str, data: Vec<u64>) {
        self.entries.push((name.to_string(), Entry::U64(data)));
    }

    pub fn put_bytes(&mut self, name: &str, data: Vec<u8>) {
        self.entries.push((name.to_string(), Entry::Bytes(data)));
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e)
    }

    pub fn f64s(&self, name: &str) -> Result<&[f64], NnError> {
        match self.get(name) {
            Some(Entry::F64(v)) => Ok(v),
            Some(_) => Err(NnError::CorruptContainer(format!("{name} is not f64"))),
            None => Err(NnError::MissingEntry(name.into())),
        }
    }

    pub fn u64s(&self, name: &str) -> Result<&[u64], NnError> {
        match self.get(name) {
            Some(Entry::U64(v)) => Ok(v),
            Some(_) => Err(NnError::CorruptContainer(format!("{name} is not u64"))),
            None => Err(NnError::MissingEntry(name.into())),
        }
    }

    pub fn bytes(&self, name: &str) -> Result<&[u8], NnError> {
        match self.get(name) {
            Some(Entry::Bytes(v)) => Ok(v),
            Some(_) => Err(NnError::CorruptContainer(format!("{name} is not bytes"))),
            None => Err(NnError::MissingEntry(name.into())),
        }
    }

    pub fn scalar_u64(&self, name: &str) -> Result<u64, NnError> {
        let v = self.u64s(name)?;
        if v.len() != 1 {
            return Err(NnError::CorruptContainer(format!("{name} is not scalar")));
        }
        Ok(v[0])
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(n, _)| n.as_str())
    }

    pub fn write<W: Write>(&self, mut w: W) -> Result<(), NnError> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.entries.len() as u64).to_le_bytes())?;
        for (name, entry) in &self.entries {
            let nb = name.as_bytes();
            w.write_all(&(nb.len() as u32).to_le_bytes())?;
            w.write_all(nb)?;
            match entry {
                Entry::F64(v) => {
                    w.write_all(&[0u8])?;
                    w.write_all(&(v.len() as u64).to_le_bytes())?;
                    for x in v {
                        w.write_all(&x.to_le_bytes())?;
                    }
                }
                Entry::U64(v) => {
                    w.write_all(&[1u8])?;
                    w.write_all(&(v.len() as u64).to_le_bytes())?;
                    for x in v {
                        w.write_all(&x.to_le_bytes())?;
                    }
                }
                Entry::Bytes(v) => {
                    w.write_all(&[2u8])?;
                    w.write_all(&(v.len() as u64).to_le_bytes())?;
                    w.write_all(v)?;
                }
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("vec write cannot fail");
        buf
    }

    pub fn read<R: Read>(mut r: R) -> Result<Container, NnError> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(NnError::CorruptContainer("bad magic".into()));
        }
        let mut v4 = [0u8; 4];
        r.read_exact(&mut v4)?;
        if u32::from_le_bytes(v4) != VERSION {
            return Err(NnError::CorruptContainer("unsupported version".into()));
        }
        let mut v8 = [0u8; 8];
        r.read_exact(&mut v8)?;
        let count = u64::from_le_bytes(v8) as usize;
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut v4)?;
            let name_len = u32::from_le_bytes(v4) as usize;
            let mut name = vec![0u8; name_len];
            r.read_exact(&mut name)?;
            let name = String::from_utf8(name)
                .map_err(|_| NnError::CorruptContainer("non-utf8 name".into()))?;
            let mut tag = [0u8; 1];
            r.read_exact(&mut tag)?;
            r.read_exact(&mut v8)?;
            let len = u64::from_le_bytes(v8) as usize;
            let entry = match tag[0] {
                0 => {
                    let mut data = Vec::with_capacity(len);
                    let mut b = [0u8; 8];
                    for _ in 0..len {
                        r.read_exact(&mut b)?;
                        data.push(f64::from_le_bytes(b));
                    }
                    Entry::F64(data)
                }
                1 => {
                    let mut data = Vec::with_capacity(len);
                    let mut b = [0u8; 8];
                    for _ in 0..len {
                        r.read_exact(&mut b)?;
                        data.push(u64::from_le_bytes(b));
                    }
                    Entry::U64(data)
                }
                2 => {
                    let mut data = vec![0u8; len];
                    r.read_exact(&mut data)?;
                    Entry::Bytes(data)
                }
                t => {
                    return Err(NnError::CorruptContainer(format!("unknown tag {t}")));
                }
            };
            entries.push((name, entry));
        }
        Ok(Container { entries })
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Container, NnError> {
        Container::read(bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_corrupt_input() {
        assert!(Container::from_bytes(b"nonsense").is_err());
        let mut c = Container::new();
        c.put_u64("x", vec![1]);
        let mut bytes = c.to_bytes();
        bytes[3] ^= 0xff;
        assert!(Container::from_bytes(&bytes).is_err());
    }

    proptest! {
        #[test]
        fn round_trips_bit_exactly(
            f in prop::collection::vec(prop::num::f64::ANY, 0..64),
            u in prop::collection::vec(prop::num::u64::ANY, 0..64),
            b in prop::collection::vec(prop::num::u8::ANY, 0..64),
        ) {
            let mut c = Container::new();
            c.put_f64("params", f.clone());
            c.put_u64("counters", u.clone());
            c.put_bytes("blob", b.clone());
            let bytes = c.to_bytes();
            let back = Container::from_bytes(&bytes).unwrap();
            // Compare bit patterns so NaNs round trip too.
            let f2 = back.f64s("params").unwrap();
            prop_assert_eq!(f.len(), f2.len());
            for (a, b) in f.iter().zip(f2) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
            prop_assert_eq!(back.u64s("counters").unwrap(), &u[..]);
            prop_assert_eq!(back.bytes("blob").unwrap(), &b[..]);
            prop_assert_eq!(back.to_bytes(), bytes);
        }
    }
}
