#pragma once

#include <string>
#include <string_view>

#include "dsice/model.hpp"

namespace dsice {

// INI-style run configuration. Sections: [exogenous] [economy] [climate]
// [growth] [tipping] [preferences] [initial] [solver] [simulate].
ModelConfig parse_config(const std::string& text, const std::string& origin = "<config>");
ModelConfig load_config(const std::string& path);

// Resolved `section.key = value` lines for every setting that affects solutions
// (everything except worker count and the [simulate] section).
std::string canonical_text(const ModelConfig& cfg);
// Full listing including [simulate] and workers, in config-file syntax.
std::string config_file_text(const ModelConfig& cfg);

std::string sha256_hex(std::string_view data);
std::string config_hash(const ModelConfig& cfg);

}  // namespace dsice
