#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "vcma/device.hpp"
#include "vcma/dynamics.hpp"
#include "vcma/errors.hpp"

namespace vcma {

using Json = nlohmann::ordered_json;

/// Malformed or schema-violating configuration. The message carries the
/// origin and, where known, the line.
class ConfigError : public InvalidParameter {
public:
    using InvalidParameter::InvalidParameter;
};

/// Every key the configuration accepts, with its default value. The shape of
/// this document is the schema: unknown keys and type mismatches are rejected.
Json default_config();

/// Parses `text` (JSON, or an emitted CSV/JSON file carrying an embedded
/// resolved config) and merges it over the defaults. `origin` names the
/// source in error messages.
Json parse_config(const std::string& text, const std::string& origin);

/// Reads and parses a config file; throws ConfigError if unreadable.
Json load_config(const std::string& path);

/// Applies one `dotted.key=value` override; value is JSON, or a bare string.
void apply_override(Json& config, const std::string& assignment);

/// Range and cross-field checks on a merged config.
void validate_config(const Json& config);

DeviceParams device_params(const Json& config);
SolverConfig solver_config(const Json& config);

std::uint64_t config_seed(const Json& config);
std::uint64_t config_trials(const Json& config);

/// Comment header embedding the resolved config and seed in a CSV file.
std::string config_header(const Json& config);

/// 1-based line of the member at `path` in `text`, or 0 if it cannot be found.
std::size_t locate_key(const std::string& text, const std::vector<std::string>& path);

} // namespace vcma
