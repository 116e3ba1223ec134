//! Frame-size traces and quality ladders.

use std::fs;
use std::path::{Path, PathBuf};

use super::ProtoError;
use crate::sim::RngStream;

/// Frame sizes in bytes, in playback order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoTrace {
    pub name: String,
    frames: Vec<u32>,
}

impl VideoTrace {
    pub fn new(name: impl Into<String>, frames: Vec<u32>) -> Result<Self, ProtoError> {
        if frames.is_empty() {
            return Err(ProtoError::EmptyTrace);
        }
        if let Some(i) = frames.iter().position(|&f| f == 0) {
            return Err(ProtoError::TraceParse { line: i + 1, reason: "frame size must be positive".into() });
        }
        Ok(Self { name: name.into(), frames })
    }

    pub fn frames(&self) -> &[u32] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame(&self, index: usize) -> Option<u32> {
        self.frames.get(index).copied()
    }

    pub fn mean_frame_bytes(&self) -> f64 {
        self.frames.iter().map(|&f| f as f64).sum::<f64>() / self.frames.len() as f64
    }

    /// One decimal integer per line, LF terminated.
    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(self.frames.len() * 7);
        for f in &self.frames {
            s.push_str(&f.to_string());
            s.push('\n');
        }
        s
    }
}

/// Parses one frame size per non-empty line.
pub fn load_trace(name: &str, text: &str) -> Result<VideoTrace, ProtoError> {
    let mut frames = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let size: u32 = line
            .parse()
            .map_err(|_| ProtoError::TraceParse { line: i + 1, reason: format!("not a positive integer: {line:?}") })?;
        if size == 0 {
            return Err(ProtoError::TraceParse { line: i + 1, reason: "frame size must be positive".into() });
        }
        frames.push(size);
    }
    VideoTrace::new(name, frames)
}

pub fn read_trace_file(path: &Path) -> Result<VideoTrace, ProtoError> {
    let text = fs::read_to_string(path).map_err(|e| ProtoError::Io { path: path.to_owned(), source: e })?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    load_trace(&name, &text).map_err(|e| match e {
        ProtoError::TraceParse { line, reason } => {
            ProtoError::TraceParse { line, reason: format!("{}: {reason}", path.display()) }
        }
        other => other,
    })
}

/// Video versions indexed by quality level, 0 being the lowest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QualityLadder {
    levels: Vec<VideoTrace>,
}

impl QualityLadder {
    pub fn new(levels: Vec<VideoTrace>) -> Result<Self, ProtoError> {
        let first = levels.first().ok_or(ProtoError::EmptyLadder)?;
        let n = first.len();
        if let Some((i, t)) = levels.iter().enumerate().find(|(_, t)| t.len() != n) {
            return Err(ProtoError::LadderShape(format!("level {i} has {} frames, level 0 has {n}", t.len())));
        }
        for (i, pair) in levels.windows(2).enumerate() {
            if pair[1].mean_frame_bytes() < pair[0].mean_frame_bytes() {
                return Err(ProtoError::LadderShape(format!(
                    "mean frame size drops from level {i} to level {}",
                    i + 1
                )));
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> usize {
        self.levels.len()
    }

    pub fn top_level(&self) -> u16 {
        (self.levels.len() - 1) as u16
    }

    pub fn frames_per_level(&self) -> usize {
        self.levels[0].len()
    }

    pub fn level(&self, level: u16) -> &VideoTrace {
        &self.levels[level as usize]
    }

    pub fn frame(&self, level: u16, index: usize) -> Option<u32> {
        self.levels.get(level as usize)?.frame(index)
    }

    pub fn iter(&self) -> impl Iterator<Item = &VideoTrace> {
        self.levels.iter()
    }

    pub fn read_dir(dir: &Path) -> Result<Self, ProtoError> {
        let mut levels = Vec::new();
        for i in 0.. {
            let path = level_path(dir, i);
            if !path.exists() {
                break;
            }
            levels.push(read_trace_file(&path)?);
        }
        if levels.is_empty() {
            return Err(ProtoError::Io {
                path: level_path(dir, 0),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no level0.txt in ladder directory"),
            });
        }
        Self::new(levels)
    }

    pub fn write_dir(&self, dir: &Path) -> Result<(), ProtoError> {
        fs::create_dir_all(dir).map_err(|e| ProtoError::Io { path: dir.to_owned(), source: e })?;
        for (i, t) in self.levels.iter().enumerate() {
            let path = level_path(dir, i);
            fs::write(&path, t.to_text()).map_err(|e| ProtoError::Io { path, source: e })?;
        }
        Ok(())
    }
}

pub fn level_path(dir: &Path, level: usize) -> PathBuf {
    dir.join(format!("level{level}.txt"))
}

/// Bitrates of the default six-level ladder, in bits per second.
pub const DEFAULT_LADDER_BPS: [u64; 6] = [500_000, 1_000_000, 2_500_000, 5_000_000, 8_000_000, 16_000_000];

#[derive(Debug, Clone, PartialEq)]
pub struct LadderSpec {
    pub frames: usize,
    pub fps: f64,
    pub bitrates_bps: Vec<u64>,
    /// Relative half-width of the uniform jitter around the mean frame size.
    pub jitter: f64,
}

impl Default for LadderSpec {
    fn default() -> Self {
        Self { frames: 500, fps: 25.0, bitrates_bps: DEFAULT_LADDER_BPS.to_vec(), jitter: 0.2 }
    }
}

/// Builds a synthetic ladder: level `l` frames are
/// `bitrate[l] / (8·fps)` bytes with uniform `±jitter` relative noise.
pub fn synth_ladder(spec: &LadderSpec, rng: &mut RngStream) -> Result<QualityLadder, ProtoError> {
    if spec.bitrates_bps.is_empty() {
        return Err(ProtoError::EmptyLadder);
    }
    if spec.bitrates_bps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ProtoError::LadderShape("bitrates must be strictly increasing".into()));
    }
    if spec.frames == 0 || !spec.fps.is_finite() || spec.fps <= 0.0 || !(0.0..1.0).contains(&spec.jitter) {
        return Err(ProtoError::LadderShape("frames, fps and jitter out of range".into()));
    }
    let levels = spec
        .bitrates_bps
        .iter()
        .enumerate()
        .map(|(i, &bps)| {
            let mean = bps as f64 / (8.0 * spec.fps);
            let frames = (0..spec.frames)
                .map(|_| {
                    let k = if spec.jitter > 0.0 {
                        rng.next_uniform(1.0 - spec.jitter, 1.0 + spec.jitter).expect("valid range")
                    } else {
                        1.0
                    };
                    (mean * k).round().max(1.0) as u32
                })
                .collect();
            VideoTrace::new(format!("level{i}"), frames)
        })
        .collect::<Result<Vec<_>, _>>()?;
    QualityLadder::new(levels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sample_trace() {
        let t = load_trace("sample", "22500\n1027\n1027\n1251").unwrap();
        assert_eq!(t.frames(), &[22500, 1027, 1027, 1251]);
        let t = load_trace("blank", "\n10\n\n  20 \n").unwrap();
        assert_eq!(t.frames(), &[10, 20]);
    }

    #[test]
    fn parse_errors_name_line() {
        assert!(matches!(load_trace("e", ""), Err(ProtoError::EmptyTrace)));
        assert!(matches!(load_trace("e", "100\nabc"), Err(ProtoError::TraceParse { line: 2, .. })));
        assert!(matches!(load_trace("e", "0"), Err(ProtoError::TraceParse { line: 1, .. })));
        assert!(matches!(load_trace("e", "5\n-3"), Err(ProtoError::TraceParse { line: 2, .. })));
    }

    #[test]
    fn single_level_without_jitter() {
        let spec = LadderSpec { frames: 10, fps: 25.0, bitrates_bps: vec![5_000_000], jitter: 0.0 };
        let ladder = synth_ladder(&spec, &mut RngStream::new(1, 0, "ladder")).unwrap();
        assert!(ladder.level(0).frames().iter().all(|&f| f == 25_000));
    }

    #[test]
    fn default_ladder_means_increase() {
        let ladder = synth_ladder(&LadderSpec::default(), &mut RngStream::new(7, 0, "ladder")).unwrap();
        assert_eq!(ladder.levels(), 6);
        let means: Vec<f64> = ladder.iter().map(|t| t.mean_frame_bytes()).collect();
        assert!(means.windows(2).all(|w| w[1] > w[0]), "{means:?}");
    }

    #[test]
    fn synthesis_is_deterministic() {
        let a = synth_ladder(&LadderSpec::default(), &mut RngStream::new(3, 0, "ladder")).unwrap();
        let b = synth_ladder(&LadderSpec::default(), &mut RngStream::new(3, 0, "ladder")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_non_increasing_bitrates() {
        let spec = LadderSpec { bitrates_bps: vec![1_000_000, 1_000_000], ..LadderSpec::default() };
        assert!(synth_ladder(&spec, &mut RngStream::new(0, 0, "l")).is_err());
    }

    #[test]
    fn ladder_shape_checked() {
        let a = VideoTrace::new("a", vec![10, 10]).unwrap();
        let b = VideoTrace::new("b", vec![10]).unwrap();
        assert!(QualityLadder::new(vec![a.clone(), b]).is_err());
        let small = VideoTrace::new("s", vec![1, 1]).unwrap();
        assert!(QualityLadder::new(vec![a, small]).is_err());
        assert!(matches!(QualityLadder::new(vec![]), Err(ProtoError::EmptyLadder)));
    }

    #[test]
    fn ladder_directory_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ladder =
            synth_ladder(&LadderSpec { frames: 20, ..LadderSpec::default() }, &mut RngStream::new(11, 0, "ladder"))
                .unwrap();
        ladder.write_dir(dir.path()).unwrap();
        assert!(dir.path().join("level5.txt").exists());
        assert_eq!(QualityLadder::read_dir(dir.path()).unwrap(), ladder);
    }
}
