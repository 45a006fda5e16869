//! The `TOPO1` container for preprocessed data.
//!
//! Little endian throughout. Layout:
//!
//! ```text
//! magic "TOPO1"  version u32  variant u8
//! k u32  operator codes k x u8
//! n u32  core_count u32  input_arc_count u32
//! perm       n x u32          (pipeline input id -> search id)
//! forward    search graph
//! backward   search graph
//! shortcuts  s u32  tail s x u32  head s x u32  costs s*k x u32
//!            unpack_first (s+1) x u32  unpack_items x u32
//! source ids len u32  len x u32
//! coords     flag u8  [n x (lat f64, lon f64)]
//!
//! search graph: m u32  first_out (n+1) x u32  head m x u32
//!               arc_ref m x u32  costs m*k x u32
//! ```

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use byteorder::{ByteOrder, LittleEndian, WriteBytesExt};

use super::IoError;
use crate::cost::{CombineOp, CombineSpec};
use crate::graph::{Coord, Graph, Permutation};
use crate::topocore::{CorePrep, SearchGraph, ShortcutTable, Variant};

pub const PREP_MAGIC: &[u8; 5] = b"TOPO1";
pub const PREP_VERSION: u32 = 1;

fn put_u32s<W: Write>(w: &mut W, values: &[u32]) -> std::io::Result<()> {
    for &v in values {
        w.write_u32::<LittleEndian>(v)?;
    }
    Ok(())
}

fn put_search_graph<W: Write>(w: &mut W, sg: &SearchGraph) -> std::io::Result<()> {
    w.write_u32::<LittleEndian>(sg.graph.arc_count() as u32)?;
    put_u32s(w, sg.graph.first_out())?;
    put_u32s(w, sg.graph.heads())?;
    put_u32s(w, &sg.arc_ref)?;
    put_u32s(w, sg.graph.costs_flat())
}

/// Serializes `prep` into `w`.
pub fn write_prep<W: Write>(prep: &CorePrep, w: W) -> Result<(), IoError> {
    let mut w = BufWriter::new(w);
    let spec = prep.spec();
    let n = prep.node_count();
    w.write_all(PREP_MAGIC)?;
    w.write_u32::<LittleEndian>(PREP_VERSION)?;
    w.write_u8(prep.variant.code())?;
    w.write_u32::<LittleEndian>(spec.k() as u32)?;
    for op in spec.ops() {
        w.write_u8(op.code())?;
    }
    w.write_u32::<LittleEndian>(n as u32)?;
    w.write_u32::<LittleEndian>(prep.core_count)?;
    w.write_u32::<LittleEndian>(prep.input_arc_count)?;
    put_u32s(&mut w, prep.perm.as_slice())?;
    put_search_graph(&mut w, &prep.forward)?;
    put_search_graph(&mut w, &prep.backward)?;

    let sc = &prep.shortcuts;
    w.write_u32::<LittleEndian>(sc.len() as u32)?;
    put_u32s(&mut w, &sc.tail)?;
    put_u32s(&mut w, &sc.head)?;
    put_u32s(&mut w, &sc.costs)?;
    put_u32s(&mut w, &sc.unpack_first)?;
    put_u32s(&mut w, &sc.unpack_items)?;

    w.write_u32::<LittleEndian>(prep.source_ids.len() as u32)?;
    put_u32s(&mut w, &prep.source_ids)?;

    match prep.forward.graph.coords() {
        Some(coords) => {
            w.write_u8(1)?;
            for c in coords {
                w.write_f64::<LittleEndian>(c.lat)?;
                w.write_f64::<LittleEndian>(c.lon)?;
            }
        }
        None => w.write_u8(0)?,
    }
    w.flush()?;
    Ok(())
}

pub fn save_prep(prep: &CorePrep, path: &Path) -> Result<(), IoError> {
    write_prep(prep, File::create(path)?)
}

/// Bounds-checked reader over the whole container.
struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8], IoError> {
        if self.data.len() - self.pos < len {
            return Err(IoError::Format(format!(
                "truncated container: need {len} bytes at offset {}",
                self.pos
            )));
        }
        let s = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, IoError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, IoError> {
        Ok(LittleEndian::read_u32(self.take(4)?))
    }

    fn f64(&mut self) -> Result<f64, IoError> {
        Ok(LittleEndian::read_f64(self.take(8)?))
    }

    fn u32s(&mut self, count: usize) -> Result<Vec<u32>, IoError> {
        let bytes = count
            .checked_mul(4)
            .ok_or_else(|| IoError::Format("array length overflows".into()))?;
        let raw = self.take(bytes)?;
        let mut out = vec![0u32; count];
        LittleEndian::read_u32_into(raw, &mut out);
        Ok(out)
    }
}

fn read_search_graph(
    c: &mut Cursor<'_>,
    n: usize,
    spec: &CombineSpec,
    coords: Option<Vec<Coord>>,
) -> Result<SearchGraph, IoError> {
    let m = c.u32()? as usize;
    let first_out = c.u32s(n + 1)?;
    let head = c.u32s(m)?;
    let arc_ref = c.u32s(m)?;
    let costs = c.u32s(m * spec.k())?;
    let graph = Graph::from_parts(first_out, head, costs, spec.clone(), coords)?;
    Ok(SearchGraph { graph, arc_ref })
}

/// Parses a container held in memory.
pub fn read_prep(data: &[u8]) -> Result<CorePrep, IoError> {
    let mut c = Cursor { data, pos: 0 };
    if c.take(PREP_MAGIC.len()).ok() != Some(&PREP_MAGIC[..]) {
        return Err(IoError::Format("not a TOPO1 container (bad magic)".into()));
    }
    let version = c.u32()?;
    if version != PREP_VERSION {
        return Err(IoError::Format(format!(
            "unsupported container version {version}, expected {PREP_VERSION}"
        )));
    }
    let variant_code = c.u8()?;
    let variant = Variant::from_code(variant_code)
        .ok_or_else(|| IoError::Format(format!("unknown variant code {variant_code}")))?;
    let k = c.u32()? as usize;
    let mut ops = Vec::with_capacity(k.min(1024));
    for _ in 0..k {
        let code = c.u8()?;
        ops.push(
            CombineOp::from_code(code)
                .ok_or_else(|| IoError::Format(format!("unknown operator code {code}")))?,
        );
    }
    let spec = CombineSpec::new(ops)?;
    let n = c.u32()? as usize;
    let core_count = c.u32()?;
    let input_arc_count = c.u32()?;
    let perm = Permutation::from_new_ids(c.u32s(n)?)?;

    // coordinates trail the container but belong to both graphs; read the
    // graphs first, attach afterwards
    let forward = read_search_graph(&mut c, n, &spec, None)?;
    let backward = read_search_graph(&mut c, n, &spec, None)?;

    let s = c.u32()? as usize;
    let mut shortcuts = ShortcutTable::new(k);
    shortcuts.tail = c.u32s(s)?;
    shortcuts.head = c.u32s(s)?;
    shortcuts.costs = c.u32s(s * k)?;
    shortcuts.unpack_first = c.u32s(s + 1)?;
    if shortcuts.unpack_first[0] != 0 || shortcuts.unpack_first.windows(2).any(|w| w[0] > w[1]) {
        return Err(IoError::Format("shortcut unpack offsets are not monotone".into()));
    }
    shortcuts.unpack_items = c.u32s(shortcuts.unpack_first[s] as usize)?;

    let source_len = c.u32()? as usize;
    let source_ids = c.u32s(source_len)?;

    let coords = match c.u8()? {
        0 => None,
        1 => {
            let mut v = Vec::with_capacity(n.min(data.len() / 16));
            for _ in 0..n {
                let lat = c.f64()?;
                let lon = c.f64()?;
                v.push(Coord { lat, lon });
            }
            Some(v)
        }
        other => return Err(IoError::Format(format!("bad coordinate flag {other}"))),
    };
    if c.pos != data.len() {
        return Err(IoError::Format("trailing bytes after container".into()));
    }

    let mut prep = CorePrep {
        variant,
        core_count,
        input_arc_count,
        perm,
        forward,
        backward,
        shortcuts,
        source_ids,
        input_endpoints: Vec::new(),
    };
    prep.forward.graph.set_coords(coords.clone())?;
    prep.backward.graph.set_coords(coords)?;
    prep.derive_input_endpoints();
    prep.validate()?;
    Ok(prep)
}

pub fn load_prep(path: &Path) -> Result<CorePrep, IoError> {
    read_prep(&std::fs::read(path)?)
}
