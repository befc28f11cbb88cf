#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dflow/executor.hpp"

namespace dflow {

/// Validated runtime configuration: everything the execution environment
/// needs, kept apart from program logic. Immutable after load.
///
/// Documented key tree (YAML):
///   retries, retry_delay_s, run_dir,
///   strategy.{poll_interval_s, idle_timeout_s},
///   executors[].{label, kind, max_workers, address,
///                provider.{kind, nodes_per_block, init_blocks, min_blocks,
///                          max_blocks, partition, queue_delay_s, launcher,
///                          channel}}
struct ConfigDocument {
    int retries = 0;
    double retry_delay_s = 0.0;
    std::filesystem::path run_dir = "runinfo";
    StrategyParams strategy;
    std::vector<ExecutorSpec> executors;
};

struct Finding {
    std::string key_path;  // e.g. "executors[1].label"
    std::string message;

    bool operator==(const Finding&) const = default;
};

/// Parses and validates; defaults are filled (retries=0, min_blocks=0,
/// max_blocks=1, poll_interval_s=1, idle_timeout_s=60). Throws ConfigError
/// with line/column on parse failure, or naming the offending key on
/// validation failure.
ConfigDocument load_config(const std::filesystem::path& path);
ConfigDocument parse_config(const std::string& yaml_text);

/// Semantic findings for a document; empty iff load would succeed. Parse
/// failures still throw ConfigError (they have no key path to report).
std::vector<Finding> validate_config(const std::string& yaml_text);
std::vector<Finding> validate_config_file(const std::filesystem::path& path);

/// Machine-readable option schema: every key with type, default and
/// constraint.
struct OptionDesc {
    std::string key;
    std::string type;
    std::string default_value;
    std::string constraint;

    bool operator==(const OptionDesc&) const = default;
};

const std::vector<OptionDesc>& describe_options();

/// The same schema as a JSON document.
std::string options_schema_json();

}  // namespace dflow
