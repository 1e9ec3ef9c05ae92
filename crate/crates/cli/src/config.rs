//! Flat `key = value` configuration. Every key is also a command-line flag.
//!
//! Rates, detunings, the drive and `kerr_abs` are read in any unit and divided
//! by `kappa_a` before use; grid extents are already in units of `kappa_a`.

use std::fmt::Write as _;
use std::str::FromStr;

use magnonic_core::oracle::{HysteresisSettings, Rk4Settings, ValidationSettings};
use magnonic_core::sweep::{Axis, RatioAxis, SweepSpec};
use magnonic_core::{KerrSign, SystemParams, Tolerances};

use crate::CliError;

macro_rules! config_keys {
    ($( $key:ident : $ty:ty = $default:expr, $help:literal; )*) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct Config {
            $( pub $key: $ty, )*
        }

        impl Default for Config {
            fn default() -> Self {
                Self { $( $key: $default, )* }
            }
        }

        impl Config {
            /// `(key, help)` for every configuration key, in dump order.
            pub const KEYS: &'static [(&'static str, &'static str)] = &[
                $( (stringify!($key), $help), )*
            ];

            pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
                let key = canonical_key(key);
                match key {
                    $( stringify!($key) => {
                        self.$key = parse_value::<$ty>(key, value)?;
                    } )*
                    _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
                }
                Ok(())
            }

            /// Configuration text that parses back to `self`.
            pub fn dump(&self) -> String {
                let mut s = String::new();
                $( let _ = writeln!(s, "{} = {}", stringify!($key), self.$key.render()); )*
                s
            }
        }
    };
}

config_keys! {
    delta_a: f64 = 3.0, "cavity detuning";
    delta_m_over_delta_a: f64 = 1.3, "magnon-to-cavity detuning ratio (alias: ratio)";
    kappa_a: f64 = 1.0, "cavity decay rate; the unit of every rate";
    gamma_m: f64 = 1.0, "magnon decay rate";
    g_m: f64 = 2.4, "magnon-photon coupling";
    kerr_sign: KerrSign = KerrSign::Positive, "sign of the Kerr coefficient, + or - (alias: kerr)";
    kerr_abs: f64 = 1.0, "magnitude of the Kerr coefficient";
    omega: f64 = 2.2, "parametric drive strength";
    nbar_a: f64 = 0.0, "thermal photon occupancy";
    nbar_m: f64 = 0.0, "thermal magnon occupancy";
    omega_min: f64 = 1.8, "grid and cut lower drive";
    omega_max: f64 = 2.4, "grid and cut upper drive";
    omega_count: usize = 400, "grid drive samples";
    ratio_min: f64 = 0.5, "grid lower detuning ratio";
    ratio_max: f64 = 1.5, "grid upper detuning ratio";
    ratio_count: usize = 400, "grid detuning-ratio samples";
    cut_count: usize = 2000, "drive samples on one-dimensional cuts";
    eps_den: f64 = 1e-9, "singular-denominator guard";
    tol_phase: f64 = 1e-6, "phase-equation modulus tolerance";
    tol_fp: f64 = 1e-8, "fixed-point residual tolerance";
    tol_stab: f64 = 1e-9, "marginal-stability band";
    eps_contrast: f64 = 1e-9, "relative tolerance for equal order parameters";
    oracle_omega_min: f64 = 1.8, "validation grid lower drive";
    oracle_omega_max: f64 = 2.4, "validation grid upper drive";
    oracle_ratio_min: f64 = 0.6, "validation grid lower ratio";
    oracle_ratio_max: f64 = 1.4, "validation grid upper ratio";
    oracle_count: usize = 20, "validation grid samples per axis";
    oracle_dt: f64 = 1e-3, "RK4 step";
    oracle_t_end: f64 = 200.0, "RK4 relaxation time";
    hysteresis_count: usize = 121, "drive samples per hysteresis direction";
    hysteresis_kick: f64 = 1e-4, "perturbation added before each hysteresis point";
    seed: u64 = 7, "seed for oracle perturbations";
}

fn canonical_key(key: &str) -> &str {
    match key {
        "ratio" => "delta_m_over_delta_a",
        "kerr" => "kerr_sign",
        other => other,
    }
}

fn parse_value<T: ConfigValue>(key: &str, value: &str) -> Result<T, CliError> {
    T::parse(value.trim())
        .ok_or_else(|| CliError::Config(format!("invalid value {value:?} for {key}")))
}

trait ConfigValue: Sized {
    fn parse(s: &str) -> Option<Self>;
    fn render(&self) -> String;
}

impl ConfigValue for f64 {
    fn parse(s: &str) -> Option<Self> {
        f64::from_str(s).ok()
    }
    fn render(&self) -> String {
        // shortest representation that round-trips
        format!("{self:?}")
    }
}

impl ConfigValue for usize {
    fn parse(s: &str) -> Option<Self> {
        s.parse().ok()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for u64 {
    fn parse(s: &str) -> Option<Self> {
        s.parse().ok()
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for KerrSign {
    fn parse(s: &str) -> Option<Self> {
        s.parse().ok()
    }
    fn render(&self) -> String {
        self.symbol().to_string()
    }
}

impl Config {
    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value)
                .map_err(|e| CliError::Config(format!("line {}: {}", n + 1, e.message())))?;
        }
        Ok(())
    }

    /// Same configuration with every rate divided by `kappa_a`.
    pub fn normalized(&self) -> Result<Config, CliError> {
        let k = self.kappa_a;
        if !(k.is_finite() && k > 0.0) {
            return Err(CliError::Config("kappa_a must be finite and > 0".into()));
        }
        Ok(Config {
            delta_a: self.delta_a / k,
            kappa_a: 1.0,
            gamma_m: self.gamma_m / k,
            g_m: self.g_m / k,
            kerr_abs: self.kerr_abs / k,
            omega: self.omega / k,
            ..self.clone()
        })
    }

    /// Operating point; call on a normalized config.
    pub fn params(&self) -> SystemParams {
        SystemParams {
            delta_a: self.delta_a,
            delta_m: self.delta_m_over_delta_a * self.delta_a,
            kappa_a: self.kappa_a,
            gamma_m: self.gamma_m,
            g_m: self.g_m,
            kerr_sign: self.kerr_sign,
            kerr_magnitude: self.kerr_abs,
            omega_drive: self.omega,
            nbar_a: self.nbar_a,
            nbar_m: self.nbar_m,
            tol: Tolerances {
                eps_den: self.eps_den,
                tol_phase: self.tol_phase,
                tol_fp: self.tol_fp,
                tol_stab: self.tol_stab,
                eps_contrast: self.eps_contrast,
            },
        }
    }

    pub fn grid(&self) -> SweepSpec {
        SweepSpec {
            omega: Axis::new(self.omega_min, self.omega_max, self.omega_count),
            ratio: RatioAxis::Range(Axis::new(self.ratio_min, self.ratio_max, self.ratio_count)),
            base: self.params(),
        }
    }

    pub fn cut(&self) -> SweepSpec {
        SweepSpec {
            omega: Axis::new(self.omega_min, self.omega_max, self.cut_count),
            ratio: RatioAxis::Fixed(self.delta_m_over_delta_a),
            base: self.params(),
        }
    }

    pub fn oracle_grid(&self) -> SweepSpec {
        SweepSpec {
            omega: Axis::new(self.oracle_omega_min, self.oracle_omega_max, self.oracle_count),
            ratio: RatioAxis::Range(Axis::new(
                self.oracle_ratio_min,
                self.oracle_ratio_max,
                self.oracle_count,
            )),
            base: self.params(),
        }
    }

    pub fn rk4(&self) -> Rk4Settings {
        Rk4Settings {
            dt: self.oracle_dt,
            t_end: self.oracle_t_end,
            ..Rk4Settings::default()
        }
    }

    pub fn validation(&self) -> ValidationSettings {
        let d = ValidationSettings::default();
        ValidationSettings {
            relax: Rk4Settings {
                dt: self.oracle_dt,
                t_end: self.oracle_t_end,
                ..d.relax
            },
            probe: Rk4Settings {
                dt: self.oracle_dt,
                t_end: self.oracle_t_end,
                ..d.probe
            },
            seed: self.seed,
            ..d
        }
    }

    pub fn hysteresis(&self) -> HysteresisSettings {
        let d = HysteresisSettings::default();
        HysteresisSettings {
            rk4: Rk4Settings {
                dt: self.oracle_dt,
                ..d.rk4
            },
            kick: self.hysteresis_kick,
            seed: self.seed,
        }
    }

    pub fn hysteresis_omegas(&self) -> Vec<f64> {
        Axis::new(self.omega_min, self.omega_max, self.hysteresis_count).values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dump_round_trips() {
        let mut c = Config::default();
        c.set("omega", "2.05").unwrap();
        c.set("kerr", "-").unwrap();
        c.set("ratio", "0.8").unwrap();
        c.set("eps_den", "1e-11").unwrap();
        let mut d = Config::default();
        d.apply_text(&c.dump()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn comments_and_blank_lines() {
        let mut c = Config::default();
        c.apply_text("# header\n\n g_m = 2.0  # trailing\nkerr_sign=-\n").unwrap();
        assert_eq!(c.g_m, 2.0);
        assert_eq!(c.kerr_sign, KerrSign::Negative);
    }

    #[test]
    fn bad_input_rejected() {
        let mut c = Config::default();
        assert!(c.apply_text("nonsense = 1").is_err());
        assert!(c.apply_text("g_m").is_err());
        assert!(c.set("omega_count", "1.5").is_err());
        assert!(c.set("kerr_sign", "sideways").is_err());
    }

    #[test]
    fn normalization_by_cavity_decay() {
        let mut c = Config::default();
        for (k, v) in [("kappa_a", "2"), ("delta_a", "6"), ("g_m", "4.8"), ("gamma_m", "2"), ("omega", "4.4"), ("kerr_abs", "2")] {
            c.set(k, v).unwrap();
        }
        let n = c.normalized().unwrap();
        assert_eq!(n.params(), Config::default().params());
        assert_eq!(n.normalized().unwrap(), n);
    }
}
