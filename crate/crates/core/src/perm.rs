//! Small permutations of tetrahedron and triangle vertex slots.

use std::fmt;

/// A permutation of `{0, 1, 2, 3}`, stored as its image table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4([u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Builds a permutation from its image table, returning `None` unless the
    /// table is a bijection of `0..4`.
    pub fn new(images: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &i in &images {
            if i > 3 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm4(images))
    }

    /// The transposition exchanging `a` and `b`.
    pub fn transposition(a: usize, b: usize) -> Self {
        let mut p = [0u8, 1, 2, 3];
        p.swap(a, b);
        Perm4(p)
    }

    #[inline]
    pub fn apply(self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(self) -> [u8; 4] {
        self.0
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(self, other: Perm4) -> Perm4 {
        let mut p = [0u8; 4];
        for (i, slot) in p.iter_mut().enumerate() {
            *slot = self.0[other.0[i] as usize];
        }
        Perm4(p)
    }

    pub fn inverse(self) -> Perm4 {
        let mut p = [0u8; 4];
        for i in 0..4 {
            p[self.0[i] as usize] = i as u8;
        }
        Perm4(p)
    }

    /// +1 for even permutations, -1 for odd ones.
    pub fn sign(self) -> i32 {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// All 24 permutations in lexicographic order of their image tables.
    pub fn all() -> impl Iterator<Item = Perm4> {
        (0..24u8).map(|code| {
            let mut avail = vec![0u8, 1, 2, 3];
            let mut rest = code as usize;
            let mut p = [0u8; 4];
            let mut fact = 6;
            for (i, slot) in p.iter_mut().enumerate() {
                let idx = rest / fact;
                rest %= fact;
                *slot = avail.remove(idx);
                if i < 3 {
                    fact /= 3 - i;
                }
            }
            Perm4(p)
        })
    }

    /// Encodes a face gluing the way the file format stores it: the face
    /// opposite `face` has its three slots listed in ascending order, and the
    /// result gives, for each of them, the position of its image among the
    /// ascending slots of the face opposite `self.apply(face)`.
    pub fn to_face_code(self, face: usize) -> [u8; 3] {
        let src = face_slots(face);
        let dst = face_slots(self.apply(face));
        let mut code = [0u8; 3];
        for (k, &s) in src.iter().enumerate() {
            let img = self.apply(s);
            code[k] = dst.iter().position(|&d| d == img).expect("face maps to face") as u8;
        }
        code
    }

    /// Inverse of [`Perm4::to_face_code`].
    pub fn from_face_code(face: usize, other_face: usize, code: [u8; 3]) -> Option<Perm4> {
        if face > 3 || other_face > 3 {
            return None;
        }
        let mut seen = [false; 3];
        for &c in &code {
            if c > 2 || seen[c as usize] {
                return None;
            }
            seen[c as usize] = true;
        }
        let src = face_slots(face);
        let dst = face_slots(other_face);
        let mut p = [0u8; 4];
        p[face] = other_face as u8;
        for k in 0..3 {
            p[src[k]] = dst[code[k] as usize] as u8;
        }
        Perm4::new(p)
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

/// The three slots of the face opposite `face`, ascending.
pub fn face_slots(face: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    for s in 0..4 {
        if s != face {
            out[k] = s;
            k += 1;
        }
    }
    out
}

/// Tetrahedron edges as slot pairs, in the fixed order 01, 02, 03, 12, 13, 23.
pub const EDGE_SLOTS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index into [`EDGE_SLOTS`] of the edge joining two distinct slots.
pub fn edge_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("invalid edge ({a}, {b})"),
    }
}

/// A permutation of `{0, 1, 2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Perm3([u8; 3]);

impl Perm3 {
    pub const IDENTITY: Perm3 = Perm3([0, 1, 2]);

    pub fn new(images: [u8; 3]) -> Option<Self> {
        let mut seen = [false; 3];
        for &i in &images {
            if i > 2 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm3(images))
    }

    #[inline]
    pub fn apply(self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn inverse(self) -> Perm3 {
        let mut p = [0u8; 3];
        for i in 0..3 {
            p[self.0[i] as usize] = i as u8;
        }
        Perm3(p)
    }

    pub fn sign(self) -> i32 {
        let mut inversions = 0;
        for i in 0..3 {
            for j in i + 1..3 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }
}
