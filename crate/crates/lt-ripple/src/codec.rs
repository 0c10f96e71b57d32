//! LT encoder and instrumented peeling decoder.
//!
//! The decoder is incremental: symbols can be pushed one at a time and the
//! ripple processed between arrivals, which yields the exact success
//! threshold `n_success` in a single pass. Batch decoding (push everything,
//! then peel) is provided for trajectory measurements; by monotonicity of
//! peeling both agree on success for the same received set.

use std::collections::VecDeque;

use crate::dist::{DegreeDistribution, DegreeSampler};
use crate::error::{Error, Result};
use crate::rng::RandomStream;
use rand::RngExt;

/// One encoded symbol: the XOR of `neighbors` input symbols.
///
/// `neighbors` is sorted and duplicate-free. The payload is present only in
/// payload mode and is the XOR of the neighbor input blocks at creation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedSymbol {
    neighbors: Vec<u32>,
    payload: Option<Vec<u8>>,
}

impl EncodedSymbol {
    /// Builds a symbol from an arbitrary neighbor list; sorts and rejects
    /// duplicates or emptiness.
    pub fn new(neighbors: Vec<u32>, payload: Option<Vec<u8>>) -> Result<Self> {
        let mut neighbors = neighbors;
        neighbors.sort_unstable();
        if neighbors.is_empty() {
            return Err(Error::InvalidParameter(
                "encoded symbol needs at least one neighbor".into(),
            ));
        }
        if neighbors.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(
                "encoded symbol neighbors must be distinct".into(),
            ));
        }
        Ok(Self { neighbors, payload })
    }

    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }

    pub fn neighbors(&self) -> &[u32] {
        &self.neighbors
    }

    pub fn payload(&self) -> Option<&[u8]> {
        self.payload.as_deref()
    }
}

/// Draws encoded symbols from a degree distribution.
///
/// Symbolic and payload modes consume the random stream identically; the
/// payload XOR uses no randomness, so traces agree between modes for equal
/// seeds.
pub struct Encoder {
    k: usize,
    sampler: DegreeSampler,
    blocks: Option<Vec<Vec<u8>>>,
}

impl Encoder {
    pub fn new(dist: &DegreeDistribution) -> Self {
        Self {
            k: dist.k(),
            sampler: DegreeSampler::new(dist),
            blocks: None,
        }
    }

    /// Payload mode: `blocks` are the k input blocks, one per index,
    /// uniform nonzero length.
    pub fn with_payloads(dist: &DegreeDistribution, blocks: Vec<Vec<u8>>) -> Result<Self> {
        if blocks.len() != dist.k() {
            return Err(Error::InvalidParameter(format!(
                "expected {} input blocks, got {}",
                dist.k(),
                blocks.len()
            )));
        }
        let len = blocks.first().map_or(0, Vec::len);
        if len == 0 || blocks.iter().any(|b| b.len() != len) {
            return Err(Error::InvalidParameter(
                "input blocks must share one nonzero length".into(),
            ));
        }
        Ok(Self {
            k: dist.k(),
            sampler: DegreeSampler::new(dist),
            blocks: Some(blocks),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn block_len(&self) -> Option<usize> {
        self.blocks.as_ref().map(|b| b[0].len())
    }

    /// Draws one symbol: degree from the distribution, then a uniform
    /// degree-subset of inputs without replacement.
    pub fn emit(&self, rng: &mut RandomStream) -> EncodedSymbol {
        let d = self.sampler.sample(rng);
        let mut neighbors: Vec<u32> = rand::seq::index::sample(rng, self.k, d)
            .into_iter()
            .map(|i| i as u32)
            .collect();
        neighbors.sort_unstable();
        let payload = self.blocks.as_ref().map(|blocks| {
            let mut acc = vec![0u8; blocks[0].len()];
            for &i in &neighbors {
                xor_into(&mut acc, &blocks[i as usize]);
            }
            acc
        });
        EncodedSymbol { neighbors, payload }
    }
}

/// Convenience: `count` symbolic symbols from one stream.
pub fn encode(dist: &DegreeDistribution, count: usize, rng: &mut RandomStream) -> Vec<EncodedSymbol> {
    let enc = Encoder::new(dist);
    (0..count).map(|_| enc.emit(rng)).collect()
}

fn xor_into(acc: &mut [u8], other: &[u8]) {
    debug_assert_eq!(acc.len(), other.len());
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= *b;
    }
}

/// Which recovered-but-unprocessed symbol a processing step takes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RippleDiscipline {
    #[default]
    Fifo,
    Lifo,
    Random,
}

/// One processing step: `remaining` inputs left unprocessed after it,
/// ripple size before and after, and the release counts it produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceRow {
    pub step: usize,
    pub remaining: usize,
    pub ripple_before: usize,
    pub ripple: usize,
    pub releases: usize,
    pub redundant_releases: usize,
}

/// Outcome of a decode run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderTrace {
    pub rows: Vec<TraceRow>,
    pub consumed: usize,
    pub redundant: usize,
    pub success: bool,
    /// Symbols consumed at the moment all k inputs were recovered.
    pub n_success: Option<usize>,
}

impl DecoderTrace {
    /// CSV export: step, remaining, ripple, releases, redundant_releases.
    pub fn csv_rows(&self) -> String {
        let mut out = String::from("step,remaining,ripple,releases,redundant_releases\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.step, r.remaining, r.ripple, r.releases, r.redundant_releases
            ));
        }
        out
    }
}

struct BufSym {
    neighbors: Vec<u32>,
    payload: Option<Vec<u8>>,
}

/// Incremental peeling decoder.
///
/// State invariants: ripple and processed are disjoint; buffered symbols
/// exclude processed indices and have degree >= 2; recovered counts
/// processed plus ripple.
pub struct Decoder {
    k: usize,
    discipline: RippleDiscipline,
    block_len: Option<usize>,
    recovered: Vec<bool>,
    processed: Vec<bool>,
    payloads: Vec<Option<Vec<u8>>>,
    ripple: VecDeque<u32>,
    // Append-only slab: released slots become None and are never reused, so
    // stale ids in the incidence lists stay permanently dead.
    slab: Vec<Option<BufSym>>,
    incident: Vec<Vec<u32>>,
    buffered: usize,
    processed_count: usize,
    recovered_count: usize,
    consumed: usize,
    redundant: usize,
    rows: Vec<TraceRow>,
    n_success: Option<usize>,
}

impl Decoder {
    pub fn new(k: usize) -> Self {
        Self::with_discipline(k, RippleDiscipline::Fifo)
    }

    pub fn with_discipline(k: usize, discipline: RippleDiscipline) -> Self {
        Self {
            k,
            discipline,
            block_len: None,
            recovered: vec![false; k],
            processed: vec![false; k],
            payloads: Vec::new(),
            ripple: VecDeque::new(),
            slab: Vec::new(),
            incident: vec![Vec::new(); k],
            buffered: 0,
            processed_count: 0,
            recovered_count: 0,
            consumed: 0,
            redundant: 0,
            rows: Vec::new(),
            n_success: None,
        }
    }

    /// Payload mode: every pushed symbol must carry a block of `block_len`.
    pub fn with_payloads(k: usize, block_len: usize, discipline: RippleDiscipline) -> Result<Self> {
        if block_len == 0 {
            return Err(Error::InvalidParameter("block length must be nonzero".into()));
        }
        let mut d = Self::with_discipline(k, discipline);
        d.block_len = Some(block_len);
        d.payloads = vec![None; k];
        Ok(d)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn ripple_len(&self) -> usize {
        self.ripple.len()
    }

    pub fn processed_count(&self) -> usize {
        self.processed_count
    }

    pub fn recovered_count(&self) -> usize {
        self.recovered_count
    }

    /// Live buffered symbols (reduced degree >= 2).
    pub fn buffered_count(&self) -> usize {
        self.buffered
    }

    pub fn is_complete(&self) -> bool {
        self.recovered_count == self.k
    }

    /// Recovered input block, once index `i` has been recovered.
    pub fn payload(&self, i: usize) -> Option<&[u8]> {
        self.payloads.get(i).and_then(|p| p.as_deref())
    }

    fn recover(&mut self, j: u32, payload: Option<Vec<u8>>) {
        debug_assert!(!self.recovered[j as usize]);
        self.recovered[j as usize] = true;
        self.recovered_count += 1;
        if self.block_len.is_some() {
            debug_assert!(payload.is_some());
            self.payloads[j as usize] = payload;
        }
        self.ripple.push_back(j);
        if self.recovered_count == self.k && self.n_success.is_none() {
            self.n_success = Some(self.consumed);
        }
    }

    /// Takes one symbol: reduces it by processed indices, then recovers,
    /// buffers, or discards it as redundant.
    pub fn push(&mut self, s: &EncodedSymbol) -> Result<()> {
        if let Some(&max) = s.neighbors.last() {
            if max as usize >= self.k {
                return Err(Error::Session(format!(
                    "symbol references input {} but the session has k = {}",
                    max, self.k
                )));
            }
        }
        let mut payload = match self.block_len {
            Some(len) => match s.payload() {
                Some(p) if p.len() == len => Some(p.to_vec()),
                Some(p) => {
                    return Err(Error::Session(format!(
                        "payload length {} does not match session block length {len}",
                        p.len()
                    )))
                }
                None => {
                    return Err(Error::Session(
                        "payload-mode session received a symbol without payload".into(),
                    ))
                }
            },
            None => None,
        };
        self.consumed += 1;
        let mut reduced: Vec<u32> = Vec::with_capacity(s.degree());
        for &i in &s.neighbors {
            if self.processed[i as usize] {
                if let Some(acc) = payload.as_deref_mut() {
                    xor_into(acc, self.payloads[i as usize].as_deref().unwrap());
                }
            } else {
                reduced.push(i);
            }
        }
        match reduced.len() {
            0 => self.redundant += 1,
            1 => {
                let j = reduced[0];
                if self.recovered[j as usize] {
                    self.redundant += 1;
                } else {
                    self.recover(j, payload);
                }
            }
            _ => {
                let id = self.slab.len() as u32;
                for &i in &reduced {
                    self.incident[i as usize].push(id);
                }
                self.slab.push(Some(BufSym {
                    neighbors: reduced,
                    payload,
                }));
                self.buffered += 1;
            }
        }
        Ok(())
    }

    fn pop_ripple(&mut self, rng: &mut RandomStream) -> Option<u32> {
        match self.discipline {
            RippleDiscipline::Fifo => self.ripple.pop_front(),
            RippleDiscipline::Lifo => self.ripple.pop_back(),
            RippleDiscipline::Random => {
                if self.ripple.is_empty() {
                    None
                } else {
                    let at = rng.random_range(0..self.ripple.len());
                    self.ripple.swap_remove_back(at)
                }
            }
        }
    }

    /// Processes one ripple symbol: marks it processed, reduces incident
    /// buffered symbols, and routes any releases.
    pub fn process_step(&mut self, rng: &mut RandomStream) -> Result<TraceRow> {
        let ripple_before = self.ripple.len();
        let i = self.pop_ripple(rng).ok_or_else(|| {
            Error::Session("cannot process: the ripple is empty".into())
        })?;
        self.processed[i as usize] = true;
        self.processed_count += 1;
        let mut releases = 0;
        let mut redundant_releases = 0;
        let ids = std::mem::take(&mut self.incident[i as usize]);
        for id in ids {
            let Some(sym) = self.slab[id as usize].as_mut() else {
                continue; // released earlier; slot stays dead
            };
            let at = sym
                .neighbors
                .iter()
                .position(|&n| n == i)
                .expect("live incident symbol must contain the processed index");
            sym.neighbors.swap_remove(at);
            if let Some(acc) = sym.payload.as_deref_mut() {
                xor_into(acc, self.payloads[i as usize].as_deref().unwrap());
            }
            if sym.neighbors.len() == 1 {
                let j = sym.neighbors[0];
                let payload = self.slab[id as usize].take().unwrap().payload;
                self.buffered -= 1;
                releases += 1;
                if self.recovered[j as usize] {
                    redundant_releases += 1;
                    self.redundant += 1;
                } else {
                    self.recover(j, payload);
                }
            }
        }
        let row = TraceRow {
            step: self.processed_count,
            remaining: self.k - self.processed_count,
            ripple_before,
            ripple: self.ripple.len(),
            releases,
            redundant_releases,
        };
        self.rows.push(row);
        Ok(row)
    }

    /// Processes until the ripple drains.
    pub fn run_ripple(&mut self, rng: &mut RandomStream) -> Result<()> {
        while !self.ripple.is_empty() {
            self.process_step(rng)?;
        }
        Ok(())
    }

    pub fn trace_rows(&self) -> &[TraceRow] {
        &self.rows
    }

    pub fn finish(self) -> DecoderTrace {
        DecoderTrace {
            rows: self.rows,
            consumed: self.consumed,
            redundant: self.redundant,
            success: self.recovered_count == self.k,
            n_success: self.n_success,
        }
    }

    /// All recovered blocks in index order; None unless payload mode
    /// completed.
    pub fn recovered_payloads(self) -> Option<Vec<Vec<u8>>> {
        if self.block_len.is_none() || self.recovered_count != self.k {
            return None;
        }
        self.payloads.into_iter().collect()
    }
}

fn drive(
    enc: &Encoder,
    decoder: &mut Decoder,
    cap: usize,
    rng: &mut RandomStream,
    mut record: Option<&mut Vec<EncodedSymbol>>,
) -> Result<()> {
    while !decoder.is_complete() && decoder.consumed() < cap {
        let s = enc.emit(rng);
        if let Some(rec) = record.as_deref_mut() {
            rec.push(s.clone());
        }
        decoder.push(&s)?;
        decoder.run_ripple(rng)?;
    }
    Ok(())
}

/// Draws symbols one at a time, peeling eagerly after each arrival, until
/// all k inputs are recovered or `cap` symbols have been consumed.
pub fn decode_incremental(
    dist: &DegreeDistribution,
    cap: usize,
    discipline: RippleDiscipline,
    rng: &mut RandomStream,
) -> Result<DecoderTrace> {
    if cap < dist.k() {
        return Err(Error::InvalidParameter(format!(
            "cap {} cannot recover k = {} inputs",
            cap,
            dist.k()
        )));
    }
    let enc = Encoder::new(dist);
    let mut decoder = Decoder::with_discipline(dist.k(), discipline);
    drive(&enc, &mut decoder, cap, rng, None)?;
    Ok(decoder.finish())
}

/// `decode_incremental` that also returns the drawn symbols, for re-decode
/// checks.
pub fn decode_incremental_recorded(
    dist: &DegreeDistribution,
    cap: usize,
    discipline: RippleDiscipline,
    rng: &mut RandomStream,
) -> Result<(DecoderTrace, Vec<EncodedSymbol>)> {
    if cap < dist.k() {
        return Err(Error::InvalidParameter(format!(
            "cap {} cannot recover k = {} inputs",
            cap,
            dist.k()
        )));
    }
    let enc = Encoder::new(dist);
    let mut decoder = Decoder::with_discipline(dist.k(), discipline);
    let mut symbols = Vec::new();
    drive(&enc, &mut decoder, cap, rng, Some(&mut symbols))?;
    Ok((decoder.finish(), symbols))
}

/// Payload-mode `decode_incremental`; returns the recovered blocks on
/// success.
pub fn decode_incremental_payload(
    dist: &DegreeDistribution,
    blocks: Vec<Vec<u8>>,
    cap: usize,
    discipline: RippleDiscipline,
    rng: &mut RandomStream,
) -> Result<(DecoderTrace, Option<Vec<Vec<u8>>>)> {
    if cap < dist.k() {
        return Err(Error::InvalidParameter(format!(
            "cap {} cannot recover k = {} inputs",
            cap,
            dist.k()
        )));
    }
    let block_len = blocks.first().map_or(0, Vec::len);
    let enc = Encoder::with_payloads(dist, blocks)?;
    let mut decoder = Decoder::with_payloads(dist.k(), block_len, discipline)?;
    drive(&enc, &mut decoder, cap, rng, None)?;
    let trace = DecoderTrace {
        rows: decoder.rows.clone(),
        consumed: decoder.consumed,
        redundant: decoder.redundant,
        success: decoder.recovered_count == decoder.k,
        n_success: decoder.n_success,
    };
    Ok((trace, decoder.recovered_payloads()))
}

/// Draws exactly `n` symbols up front, then peels to exhaustion.
pub fn decode_batch(
    dist: &DegreeDistribution,
    n: usize,
    discipline: RippleDiscipline,
    rng: &mut RandomStream,
) -> Result<DecoderTrace> {
    let enc = Encoder::new(dist);
    let mut decoder = Decoder::with_discipline(dist.k(), discipline);
    for _ in 0..n {
        decoder.push(&enc.emit(rng))?;
    }
    decoder.run_ripple(rng)?;
    Ok(decoder.finish())
}

/// Batch-decodes a fixed symbol list.
pub fn decode_symbols(
    k: usize,
    symbols: &[EncodedSymbol],
    discipline: RippleDiscipline,
    rng: &mut RandomStream,
) -> Result<DecoderTrace> {
    let mut decoder = Decoder::with_discipline(k, discipline);
    for s in symbols {
        decoder.push(s)?;
    }
    decoder.run_ripple(rng)?;
    Ok(decoder.finish())
}

/// Re-decodes every prefix of a recorded realization and checks that
/// success happens exactly on prefixes of length >= n_success: peeling
/// success is monotone in the received set.
pub fn n_success_monotone_check(
    k: usize,
    symbols: &[EncodedSymbol],
    n_success: usize,
) -> Result<bool> {
    if n_success > symbols.len() {
        return Err(Error::InvalidParameter(format!(
            "n_success {} exceeds the {} recorded symbols",
            n_success,
            symbols.len()
        )));
    }
    let mut rng = crate::rng::master_stream(0);
    for n in 0..=symbols.len() {
        let trace = decode_symbols(k, &symbols[..n], RippleDiscipline::Fifo, &mut rng)?;
        if trace.success != (n >= n_success) {
            return Ok(false);
        }
    }
    Ok(true)
}
