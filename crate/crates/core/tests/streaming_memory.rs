//! Reading a dump must not hold the whole array in memory. Kept in its own
//! test binary so nothing else moves the process high-water mark.

use std::io::Read;

use kgforge::ingest::{read_dump, DumpFileKind};
use kgforge::ontology::Registry;

const RECORDS: usize = 1_000_000;

/// A papers dump produced on the fly, one record at a time.
struct GeneratedDump {
    next: usize,
    pending: Vec<u8>,
    pos: usize,
    bytes: usize,
}

impl GeneratedDump {
    fn new() -> Self {
        GeneratedDump { next: 0, pending: b"[".to_vec(), pos: 0, bytes: 0 }
    }

    fn refill(&mut self) {
        self.pending.clear();
        self.pos = 0;
        if self.next > RECORDS {
            return;
        }
        if self.next == RECORDS {
            self.pending.extend_from_slice(b"]");
        } else {
            let i = self.next;
            let sep = if i == 0 { "" } else { "," };
            let record = format!(
                r#"{sep}{{"paper_url":"https://paperswithcode.com/paper/p{i}","title":"Paper number {i} on streaming","abstract":"An abstract with **markup** for record {i}.","authors":["Author {a}","Author {b}"],"tasks":["Task {t}"],"date":"2021-01-01","arxiv_id":null,"url_abs":null,"url_pdf":null,"proceeding":null,"methods":[],"conference":null}}"#,
                a = i % 997,
                b = i % 991,
                t = i % 50,
            );
            self.pending.extend_from_slice(record.as_bytes());
        }
        self.next += 1;
    }
}

impl Read for GeneratedDump {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        if self.pos == self.pending.len() {
            self.refill();
            if self.pending.is_empty() {
                return Ok(0);
            }
        }
        let n = buf.len().min(self.pending.len() - self.pos);
        buf[..n].copy_from_slice(&self.pending[self.pos..self.pos + n]);
        self.pos += n;
        self.bytes += n;
        Ok(n)
    }
}

#[cfg(target_os = "linux")]
fn high_water_kib() -> u64 {
    let status = std::fs::read_to_string("/proc/self/status").unwrap();
    status
        .lines()
        .find_map(|l| l.strip_prefix("VmHWM:"))
        .and_then(|v| v.trim().trim_end_matches("kB").trim().parse().ok())
        .unwrap()
}

#[cfg(target_os = "linux")]
#[test]
fn a_million_records_stream_in_bounded_memory() {
    let registry = Registry::default();
    let before = high_water_kib();
    let mut dump = GeneratedDump::new();
    let mut seen = 0usize;
    let summary = read_dump(DumpFileKind::Papers, &mut dump, &registry, |r| {
        assert!(!r.slug.is_empty());
        seen += 1;
    })
    .unwrap();
    let growth_mib = (high_water_kib() - before) as f64 / 1024.0;
    let input_mib = dump.bytes as f64 / (1024.0 * 1024.0);
    assert_eq!(seen, RECORDS);
    assert_eq!(summary.records as usize, RECORDS);
    assert!(input_mib > 250.0, "input only {input_mib:.0} MiB");
    assert!(growth_mib < 64.0, "peak memory grew {growth_mib:.1} MiB while reading {input_mib:.0} MiB");
}
