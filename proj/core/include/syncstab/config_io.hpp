#pragma once

#include <filesystem>
#include <string>

#include "syncstab/params.hpp"

namespace syncstab {

struct ModelConfig {
  SynchronverterParams params;
  GridParams grid;
};

/// Parses a JSON config with keys exactly
///   {Rs, Ls, n, J, Dp, Dq, m, K, Tm, Qset, vset, umin, umax, eps, V, wg, wn}.
/// Values are SI numbers, or strings with an SI-prefixed unit suffix
/// ("9 kW", "2.27 mH", "5 kA"); missing or unknown keys are rejected.
/// Throws ConfigError on any problem.
ModelConfig parse_config_text(const std::string& text);

ModelConfig load_config(const std::filesystem::path& path);

/// "value [unit]" -> SI value. Accepts W/V/A/H/VAr/var/VA/Nm/N·m/Ohm/AH/s
/// (an A·H suffix is handy for reactive-gain lists) with m/k/M/u prefixes,
/// plus rad/s. Throws ConfigError on unknown units.
double parse_quantity(const std::string& text);

/// Canonical serialization (fixed key order, %.17g values) used for the
/// parameter hash.
std::string canonical_param_string(const ModelConfig& config);

/// 64-bit FNV-1a of the canonical form, as 16 hex digits. Identical configs
/// hash identically regardless of file formatting.
std::string param_hash(const ModelConfig& config);

}  // namespace syncstab
