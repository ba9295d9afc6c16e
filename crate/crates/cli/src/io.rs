//! Plain-text exchange formats for discrete curves.
//!
//! Frame file: a header line `N K n_samples`, then one line per sample
//! holding the parameter s followed by N*K complex entries as `re im`
//! pairs, row-major (basis index outer, frame index inner). Projector files
//! are identical with N*N entries per sample. Numbers are written in
//! shortest round-trip form, so emitted files reparse to bit-identical
//! values.

use std::fmt::Write as _;
use std::path::Path;

use holonomy_core::{CMatrix, Frame, C64};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Format {
        path: String,
        line: usize,
        message: String,
    },
}

struct Tokens<'a> {
    label: String,
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str, label: &str) -> Self {
        let mut items = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("");
            for tok in body.split_whitespace() {
                items.push((i + 1, tok));
            }
        }
        Tokens {
            label: label.to_string(),
            items,
            pos: 0,
        }
    }

    fn error(&self, line: usize, message: String) -> FileError {
        FileError::Format {
            path: self.label.clone(),
            line,
            message,
        }
    }

    fn last_line(&self) -> usize {
        self.items.last().map_or(1, |(l, _)| *l)
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), FileError> {
        if self.pos >= self.items.len() {
            return Err(self.error(
                self.last_line(),
                format!("unexpected end of file, expected {what}"),
            ));
        }
        let item = self.items[self.pos];
        self.pos += 1;
        Ok(item)
    }

    fn next_usize(&mut self, what: &str) -> Result<usize, FileError> {
        let (line, tok) = self.next(what)?;
        tok.parse()
            .map_err(|_| self.error(line, format!("expected {what}, found {tok:?}")))
    }

    fn next_f64(&mut self, what: &str) -> Result<(usize, f64), FileError> {
        let (line, tok) = self.next(what)?;
        let value: f64 = tok
            .parse()
            .map_err(|_| self.error(line, format!("expected {what}, found {tok:?}")))?;
        if !value.is_finite() {
            return Err(self.error(line, format!("{what} must be finite, found {tok:?}")));
        }
        Ok((line, value))
    }

    fn expect_end(&mut self) -> Result<(), FileError> {
        if self.pos < self.items.len() {
            let (line, tok) = self.items[self.pos];
            return Err(self.error(line, format!("trailing data starting at {tok:?}")));
        }
        Ok(())
    }
}

fn parse_header(tokens: &mut Tokens) -> Result<(usize, usize, usize), FileError> {
    let n = tokens.next_usize("ambient dimension N")?;
    let k = tokens.next_usize("subspace dimension K")?;
    let samples = tokens.next_usize("sample count")?;
    if n == 0 || k == 0 || k > n {
        return Err(tokens.error(1, format!("need 1 <= K <= N, header says N = {n}, K = {k}")));
    }
    if samples < 2 {
        return Err(tokens.error(1, format!("need at least 2 samples, header says {samples}")));
    }
    Ok((n, k, samples))
}

fn parse_sample_matrix(
    tokens: &mut Tokens,
    rows: usize,
    cols: usize,
    index: usize,
    total: usize,
) -> Result<(usize, CMatrix), FileError> {
    let (s_line, s) = tokens.next_f64("sample parameter s")?;
    let expected_s = index as f64 / (total - 1) as f64;
    if (s - expected_s).abs() > 1e-9 {
        return Err(tokens.error(
            s_line,
            format!("sample {index} has s = {s}, expected uniform grid value {expected_s}"),
        ));
    }
    let mut m = CMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            let (_, re) = tokens.next_f64("real part")?;
            let (_, im) = tokens.next_f64("imaginary part")?;
            m[(r, c)] = C64::new(re, im);
        }
    }
    Ok((s_line, m))
}

pub fn parse_frame_text(text: &str, label: &str) -> Result<Vec<Frame>, FileError> {
    let mut tokens = Tokens::new(text, label);
    let (n, k, samples) = parse_header(&mut tokens)?;
    let mut frames = Vec::with_capacity(samples);
    for index in 0..samples {
        let (line, m) = parse_sample_matrix(&mut tokens, n, k, index, samples)?;
        let frame = Frame::new(m)
            .map_err(|e| tokens.error(line, format!("sample {index} is not a frame: {e}")))?;
        frames.push(frame);
    }
    tokens.expect_end()?;
    Ok(frames)
}

/// Parse a projector file; returns the projector list and the header's
/// subspace dimension K.
pub fn parse_projector_text(text: &str, label: &str) -> Result<(Vec<CMatrix>, usize), FileError> {
    let mut tokens = Tokens::new(text, label);
    let (n, k, samples) = parse_header(&mut tokens)?;
    let mut projectors = Vec::with_capacity(samples);
    for index in 0..samples {
        let (_, m) = parse_sample_matrix(&mut tokens, n, n, index, samples)?;
        projectors.push(m);
    }
    tokens.expect_end()?;
    Ok((projectors, k))
}

pub fn read_frame_file(path: &Path) -> Result<Vec<Frame>, FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_frame_text(&text, &path.display().to_string())
}

pub fn read_projector_file(path: &Path) -> Result<(Vec<CMatrix>, usize), FileError> {
    let text = std::fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_projector_text(&text, &path.display().to_string())
}

fn push_matrix_line(out: &mut String, s: f64, m: &CMatrix) {
    write!(out, "{s}").unwrap();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            write!(out, " {} {}", z.re, z.im).unwrap();
        }
    }
    out.push('\n');
}

pub fn frame_file_text(frames: &[Frame]) -> String {
    assert!(frames.len() >= 2, "frame files hold at least two samples");
    let n = frames[0].dim_total();
    let k = frames[0].dim_sub();
    let mut out = format!("{n} {k} {}\n", frames.len());
    for (j, f) in frames.iter().enumerate() {
        let s = j as f64 / (frames.len() - 1) as f64;
        push_matrix_line(&mut out, s, f.columns());
    }
    out
}

pub fn projector_file_text(projectors: &[CMatrix], dim_sub: usize) -> String {
    assert!(
        projectors.len() >= 2,
        "projector files hold at least two samples"
    );
    let n = projectors[0].nrows();
    let mut out = format!("{n} {dim_sub} {}\n", projectors.len());
    for (j, p) in projectors.iter().enumerate() {
        let s = j as f64 / (projectors.len() - 1) as f64;
        push_matrix_line(&mut out, s, p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use holonomy_core::random::random_frame;
    use holonomy_core::sample_curve;
    use holonomy_core::tripod::{dark_curve, SpherePath};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frame_files_round_trip_exactly() {
        let path = SpherePath::meridian_then_latitude(1.0, 0.8).unwrap();
        let frames = sample_curve(&dark_curve(&path), 16).unwrap();
        let text = frame_file_text(&frames);
        let parsed = parse_frame_text(&text, "mem").unwrap();
        assert_eq!(parsed.len(), frames.len());
        for (a, b) in parsed.iter().zip(&frames) {
            assert_eq!(a.columns(), b.columns(), "bit-exact round trip");
        }
        // and the emission is reproducible
        assert_eq!(frame_file_text(&parsed), text);
    }

    #[test]
    fn projector_files_round_trip_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let f = random_frame(4, 2, &mut rng);
        let projectors = vec![f.projector(), f.projector(), f.projector()];
        let text = projector_file_text(&projectors, 2);
        let (parsed, k) = parse_projector_text(&text, "mem").unwrap();
        assert_eq!(k, 2);
        for (a, b) in parsed.iter().zip(&projectors) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = "4 2 3\n0 1 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0\n"; // truncated
        let err = parse_frame_text(text, "bad.frames").unwrap_err();
        let msg = err.to_string();
        assert!(msg.starts_with("bad.frames:"), "{msg}");

        let text = "4 2 2\n0.5 1 0 0 0 0 0 1 0 0 0 0 0 0 0 0 0\n";
        let err = parse_frame_text(text, "grid.frames").unwrap_err();
        assert!(err.to_string().contains("uniform grid"), "{err}");

        let text = "2 3 2\n";
        let err = parse_frame_text(text, "hdr.frames").unwrap_err();
        assert!(err.to_string().contains("1 <= K <= N"), "{err}");
    }

    #[test]
    fn non_orthonormal_sample_is_rejected_with_location() {
        let text = concat!(
            "2 1 2\n",
            "0 1 0 0 0\n",
            "1 0.5 0 0.5 0\n", // not unit norm
        );
        let err = parse_frame_text(text, "frames").unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("frames:3") && msg.contains("not a frame"),
            "{msg}"
        );
    }
}
