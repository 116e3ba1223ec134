//! Flat `key = value` scenario configuration.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use super::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// One server, one client, one point-to-point link.
    A,
    /// One server fanned out to two clients over independent links.
    B,
    /// One access point hosting the server, one mobile station.
    C,
    /// Several access points, each hosting a server, and several mobile
    /// stations on one shared channel.
    D,
    Custom,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::A => "a",
            ScenarioKind::B => "b",
            ScenarioKind::C => "c",
            ScenarioKind::D => "d",
            ScenarioKind::Custom => "custom",
        }
    }

    pub fn is_wireless(self) -> bool {
        matches!(self, ScenarioKind::C | ScenarioKind::D)
    }
}

impl FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a" => Ok(ScenarioKind::A),
            "b" => Ok(ScenarioKind::B),
            "c" => Ok(ScenarioKind::C),
            "d" => Ok(ScenarioKind::D),
            "custom" => Ok(ScenarioKind::Custom),
            other => Err(format!("unknown scenario {other:?} (expected a, b, c, d or custom)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaMobility {
    RandomWalk,
    Constant,
}

impl StaMobility {
    pub fn as_str(self) -> &'static str {
        match self {
            StaMobility::RandomWalk => "random-walk",
            StaMobility::Constant => "constant",
        }
    }
}

impl FromStr for StaMobility {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random-walk" => Ok(StaMobility::RandomWalk),
            "constant" => Ok(StaMobility::Constant),
            other => Err(format!("unknown mobility {other:?} (expected random-walk or constant)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub seed: Option<u64>,
    pub horizon_s: f64,
    pub out_dir: PathBuf,
    pub num_sta: Option<u32>,
    pub num_ap: Option<u32>,

    pub p2p_rate_mbps: f64,
    pub p2p_delay_ms: f64,
    pub p2p_queue_packets: u32,

    pub wifi_phy_rate_mbps: f64,
    pub wifi_tx_power_dbm: f64,
    pub wifi_rx_sensitivity_dbm: f64,
    pub wifi_pathloss_exponent: f64,
    pub wifi_reference_loss_db: f64,
    pub wifi_reference_distance_m: f64,

    pub max_frame: u32,
    pub interval_s: f64,
    pub packet_size: u32,
    pub initial_level: u16,
    pub frame_rate: u32,

    pub ladder_dir: Option<PathBuf>,
    pub ladder_bitrates_mbps: Vec<f64>,
    pub ladder_jitter: f64,

    pub sta_mobility: StaMobility,
    pub sta_min_x: f64,
    pub sta_min_y: f64,
    pub sta_delta_x: f64,
    pub sta_delta_y: f64,
    pub sta_grid_width: u32,
    pub ap_delta_x: f64,
    pub ap_delta_y: f64,
    pub ap_grid_width: u32,
    pub walk_min_x: f64,
    pub walk_max_x: f64,
    pub walk_min_y: f64,
    pub walk_max_y: f64,
    pub speed_min: f64,
    pub speed_max: f64,
    pub leg_period_s: f64,

    pub bin_width_s: f64,
    pub mobility_sample_s: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::A,
            seed: None,
            horizon_s: 30.0,
            out_dir: PathBuf::from("out"),
            num_sta: None,
            num_ap: None,
            p2p_rate_mbps: 5.0,
            p2p_delay_ms: 2.0,
            p2p_queue_packets: 100,
            wifi_phy_rate_mbps: 54.0,
            wifi_tx_power_dbm: 16.0206,
            wifi_rx_sensitivity_dbm: -96.0,
            wifi_pathloss_exponent: 3.0,
            wifi_reference_loss_db: 46.6777,
            wifi_reference_distance_m: 1.0,
            max_frame: 500,
            interval_s: 0.01,
            packet_size: 1400,
            initial_level: 3,
            frame_rate: 25,
            ladder_dir: None,
            ladder_bitrates_mbps: vec![0.5, 1.0, 2.5, 5.0, 8.0, 16.0],
            ladder_jitter: 0.2,
            sta_mobility: StaMobility::RandomWalk,
            sta_min_x: 0.0,
            sta_min_y: 0.0,
            sta_delta_x: 5.0,
            sta_delta_y: 10.0,
            sta_grid_width: 3,
            ap_delta_x: 10.0,
            ap_delta_y: 10.0,
            ap_grid_width: 3,
            walk_min_x: -50.0,
            walk_max_x: 50.0,
            walk_min_y: -50.0,
            walk_max_y: 50.0,
            speed_min: 2.0,
            speed_max: 4.0,
            leg_period_s: 1.0,
            bin_width_s: 1.0,
            mobility_sample_s: 1.0,
        }
    }
}

/// Every accepted key, in serialization order.
pub const CONFIG_KEYS: &[&str] = &[
    "scenario",
    "seed",
    "horizon_s",
    "out_dir",
    "num_sta",
    "num_ap",
    "p2p_rate_mbps",
    "p2p_delay_ms",
    "p2p_queue_packets",
    "wifi_phy_rate_mbps",
    "wifi_tx_power_dbm",
    "wifi_rx_sensitivity_dbm",
    "wifi_pathloss_exponent",
    "wifi_reference_loss_db",
    "wifi_reference_distance_m",
    "max_frame",
    "interval_s",
    "packet_size",
    "initial_level",
    "frame_rate",
    "ladder_dir",
    "ladder_bitrates_mbps",
    "ladder_jitter",
    "sta_mobility",
    "sta_min_x",
    "sta_min_y",
    "sta_delta_x",
    "sta_delta_y",
    "sta_grid_width",
    "ap_delta_x",
    "ap_delta_y",
    "ap_grid_width",
    "walk_min_x",
    "walk_max_x",
    "walk_min_y",
    "walk_max_y",
    "speed_min",
    "speed_max",
    "leg_period_s",
    "bin_width_s",
    "mobility_sample_s",
];

fn num<T: FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("malformed value {v:?}"))
}

fn finite(v: &str) -> Result<f64, String> {
    let x: f64 = num(v)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("value must be finite, got {v:?}"))
    }
}

fn positive(v: &str) -> Result<f64, String> {
    let x = finite(v)?;
    if x > 0.0 {
        Ok(x)
    } else {
        Err(format!("value must be positive, got {v}"))
    }
}

fn non_negative(v: &str) -> Result<f64, String> {
    let x = finite(v)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("value must not be negative, got {v}"))
    }
}

fn at_least_one(v: &str) -> Result<u32, String> {
    match num::<u32>(v)? {
        0 => Err("value must be at least 1".into()),
        n => Ok(n),
    }
}

fn float_list(v: &str) -> Result<Vec<f64>, String> {
    v.split(',').map(|p| positive(p.trim())).collect()
}

impl ScenarioConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        let r: Result<(), String> = (|| {
            match key {
                "scenario" => self.scenario = v.parse()?,
                "seed" => self.seed = Some(num(v)?),
                "horizon_s" => self.horizon_s = positive(v)?,
                "out_dir" => self.out_dir = PathBuf::from(v),
                "num_sta" => self.num_sta = Some(at_least_one(v)?),
                "num_ap" => self.num_ap = Some(at_least_one(v)?),
                "p2p_rate_mbps" => self.p2p_rate_mbps = positive(v)?,
                "p2p_delay_ms" => self.p2p_delay_ms = non_negative(v)?,
                "p2p_queue_packets" => self.p2p_queue_packets = at_least_one(v)?,
                "wifi_phy_rate_mbps" => self.wifi_phy_rate_mbps = positive(v)?,
                "wifi_tx_power_dbm" => self.wifi_tx_power_dbm = finite(v)?,
                "wifi_rx_sensitivity_dbm" => self.wifi_rx_sensitivity_dbm = finite(v)?,
                "wifi_pathloss_exponent" => self.wifi_pathloss_exponent = positive(v)?,
                "wifi_reference_loss_db" => self.wifi_reference_loss_db = finite(v)?,
                "wifi_reference_distance_m" => self.wifi_reference_distance_m = positive(v)?,
                "max_frame" => self.max_frame = at_least_one(v)?,
                "interval_s" => self.interval_s = positive(v)?,
                "packet_size" => self.packet_size = at_least_one(v)?,
                "initial_level" => self.initial_level = num(v)?,
                "frame_rate" => self.frame_rate = at_least_one(v)?,
                "ladder_dir" => self.ladder_dir = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
                "ladder_bitrates_mbps" => self.ladder_bitrates_mbps = float_list(v)?,
                "ladder_jitter" => {
                    let j = non_negative(v)?;
                    if j >= 1.0 {
                        return Err("jitter must be below 1".into());
                    }
                    self.ladder_jitter = j;
                }
                "sta_mobility" => self.sta_mobility = v.parse()?,
                "sta_min_x" => self.sta_min_x = finite(v)?,
                "sta_min_y" => self.sta_min_y = finite(v)?,
                "sta_delta_x" => self.sta_delta_x = finite(v)?,
                "sta_delta_y" => self.sta_delta_y = finite(v)?,
                "sta_grid_width" => self.sta_grid_width = at_least_one(v)?,
                "ap_delta_x" => self.ap_delta_x = finite(v)?,
                "ap_delta_y" => self.ap_delta_y = finite(v)?,
                "ap_grid_width" => self.ap_grid_width = at_least_one(v)?,
                "walk_min_x" => self.walk_min_x = finite(v)?,
                "walk_max_x" => self.walk_max_x = finite(v)?,
                "walk_min_y" => self.walk_min_y = finite(v)?,
                "walk_max_y" => self.walk_max_y = finite(v)?,
                "speed_min" => self.speed_min = non_negative(v)?,
                "speed_max" => self.speed_max = positive(v)?,
                "leg_period_s" => self.leg_period_s = positive(v)?,
                "bin_width_s" => self.bin_width_s = positive(v)?,
                "mobility_sample_s" => self.mobility_sample_s = positive(v)?,
                _ => return Err("unknown key".into()),
            }
            Ok(())
        })();
        r.map_err(|reason| ConfigError::Key { key: key.to_owned(), reason })
    }

    /// Parses config text without the final cross-field checks, so that
    /// command-line overrides can still be applied.
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Line {
                line: i + 1,
                reason: format!("expected `key = value`, got {line:?}"),
            })?;
            cfg.set(key.trim(), value).map_err(|e| ConfigError::Line { line: i + 1, reason: e.to_string() })?;
        }
        Ok(cfg)
    }

    /// Serializes every key; parsing the result yields an equal config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("scenario", self.scenario.as_str().into());
        if let Some(seed) = self.seed {
            kv("seed", seed.to_string());
        }
        kv("horizon_s", self.horizon_s.to_string());
        kv("out_dir", self.out_dir.display().to_string());
        if let Some(n) = self.num_sta {
            kv("num_sta", n.to_string());
        }
        if let Some(n) = self.num_ap {
            kv("num_ap", n.to_string());
        }
        kv("p2p_rate_mbps", self.p2p_rate_mbps.to_string());
        kv("p2p_delay_ms", self.p2p_delay_ms.to_string());
        kv("p2p_queue_packets", self.p2p_queue_packets.to_string());
        kv("wifi_phy_rate_mbps", self.wifi_phy_rate_mbps.to_string());
        kv("wifi_tx_power_dbm", self.wifi_tx_power_dbm.to_string());
        kv("wifi_rx_sensitivity_dbm", self.wifi_rx_sensitivity_dbm.to_string());
        kv("wifi_pathloss_exponent", self.wifi_pathloss_exponent.to_string());
        kv("wifi_reference_loss_db", self.wifi_reference_loss_db.to_string());
        kv("wifi_reference_distance_m", self.wifi_reference_distance_m.to_string());
        kv("max_frame", self.max_frame.to_string());
        kv("interval_s", self.interval_s.to_string());
        kv("packet_size", self.packet_size.to_string());
        kv("initial_level", self.initial_level.to_string());
        kv("frame_rate", self.frame_rate.to_string());
        if let Some(d) = &self.ladder_dir {
            kv("ladder_dir", d.display().to_string());
        }
        let rates: Vec<String> = self.ladder_bitrates_mbps.iter().map(f64::to_string).collect();
        kv("ladder_bitrates_mbps", rates.join(","));
        kv("ladder_jitter", self.ladder_jitter.to_string());
        kv("sta_mobility", self.sta_mobility.as_str().into());
        kv("sta_min_x", self.sta_min_x.to_string());
        kv("sta_min_y", self.sta_min_y.to_string());
        kv("sta_delta_x", self.sta_delta_x.to_string());
        kv("sta_delta_y", self.sta_delta_y.to_string());
        kv("sta_grid_width", self.sta_grid_width.to_string());
        kv("ap_delta_x", self.ap_delta_x.to_string());
        kv("ap_delta_y", self.ap_delta_y.to_string());
        kv("ap_grid_width", self.ap_grid_width.to_string());
        kv("walk_min_x", self.walk_min_x.to_string());
        kv("walk_max_x", self.walk_max_x.to_string());
        kv("walk_min_y", self.walk_min_y.to_string());
        kv("walk_max_y", self.walk_max_y.to_string());
        kv("speed_min", self.speed_min.to_string());
        kv("speed_max", self.speed_max.to_string());
        kv("leg_period_s", self.leg_period_s.to_string());
        kv("bin_width_s", self.bin_width_s.to_string());
        kv("mobility_sample_s", self.mobility_sample_s.to_string());
        s
    }

    /// Station count after applying per-scenario defaults.
    pub fn stations(&self) -> u32 {
        match self.scenario {
            ScenarioKind::B => 2,
            ScenarioKind::D => self.num_sta.unwrap_or(3),
            _ => 1,
        }
    }

    /// Access-point (server) count after applying per-scenario defaults.
    pub fn access_points(&self) -> u32 {
        match self.scenario {
            ScenarioKind::D => self.num_ap.unwrap_or(3),
            _ => 1,
        }
    }

    pub fn seed(&self) -> Result<u64, ConfigError> {
        self.seed.ok_or(ConfigError::MissingSeed)
    }

    /// Cross-field checks run before a scenario is built.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, reason: String| Err(ConfigError::Key { key: key.into(), reason });
        self.seed()?;
        for (key, value, fixed) in [
            ("num_sta", self.num_sta, self.scenario != ScenarioKind::D),
            ("num_ap", self.num_ap, self.scenario != ScenarioKind::D),
        ] {
            if let (true, Some(n)) = (fixed, value) {
                let want = if key == "num_sta" { self.stations() } else { self.access_points() };
                if n != want {
                    return bad(key, format!("scenario {} has exactly {want}", self.scenario.as_str()));
                }
            }
        }
        if self.walk_min_x >= self.walk_max_x || self.walk_min_y >= self.walk_max_y {
            return bad("walk_min_x", "walk bounds are empty".into());
        }
        if self.speed_min >= self.speed_max {
            return bad("speed_min", "speed_min must be below speed_max".into());
        }
        if self.ladder_bitrates_mbps.windows(2).any(|w| w[1] <= w[0]) {
            return bad("ladder_bitrates_mbps", "bitrates must be strictly increasing".into());
        }
        if self.ladder_dir.is_none() && self.initial_level as usize >= self.ladder_bitrates_mbps.len() {
            return bad("initial_level", format!("ladder has {} levels", self.ladder_bitrates_mbps.len()));
        }
        if let Some(dir) = &self.ladder_dir {
            let first = crate::stream::level_path(dir, 0);
            if !first.is_file() {
                return bad("ladder_dir", format!("{} does not exist", first.display()));
            }
        }
        Ok(())
    }
}

/// Parses and validates config text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let cfg = ScenarioConfig::from_text(text)?;
    cfg.validate()?;
    Ok(cfg)
}
