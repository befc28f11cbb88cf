#include "dflow/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dflow/errors.hpp"
#include "json.hpp"
#include "yaml-cpp/yaml.h"

namespace dflow {

namespace {

struct Parser {
    std::vector<Finding>& findings;

    void finding(const std::string& path, const std::string& message) {
        findings.push_back({path, message});
    }

    void check_keys(const YAML::Node& node, const std::string& path,
                    const std::set<std::string>& allowed) {
        if (!node.IsMap()) return;
        for (const auto& kv : node) {
            auto key = kv.first.as<std::string>();
            if (!allowed.count(key))
                finding(path.empty() ? key : path + "." + key, "unknown key");
        }
    }

    template <typename T>
    T get(const YAML::Node& node, const std::string& path, const char* key, T fallback) {
        if (!node || !node[key]) return fallback;
        try {
            return node[key].as<T>();
        } catch (const YAML::Exception&) {
            finding(path.empty() ? key : path + "." + key, "expected a value of a different type");
            return fallback;
        }
    }

    ProviderSpec parse_provider(const YAML::Node& node, const std::string& path) {
        ProviderSpec p;
        check_keys(node, path,
                   {"kind", "nodes_per_block", "init_blocks", "min_blocks", "max_blocks",
                    "partition", "queue_delay_s", "launcher", "channel"});
        auto kind = get<std::string>(node, path, "kind", "local");
        if (kind == "local")
            p.kind = ProviderSpec::Kind::local;
        else if (kind == "sim_batch")
            p.kind = ProviderSpec::Kind::sim_batch;
        else
            finding(path + ".kind", "unknown provider kind '" + kind + "'");

        p.nodes_per_block = get<int>(node, path, "nodes_per_block", 1);
        p.init_blocks = get<int>(node, path, "init_blocks", 1);
        p.min_blocks = get<int>(node, path, "min_blocks", 0);
        p.max_blocks = get<int>(node, path, "max_blocks", 1);
        p.partition = get<std::string>(node, path, "partition", "");
        p.queue_delay.delay_s = get<double>(node, path, "queue_delay_s", 0.0);

        auto launcher = get<std::string>(node, path, "launcher", "per_node");
        if (launcher == "per_node")
            p.launcher.kind = LauncherSpec::Kind::per_node;
        else if (launcher == "single")
            p.launcher.kind = LauncherSpec::Kind::single;
        else
            finding(path + ".launcher", "unknown launcher '" + launcher + "'");

        auto channel = get<std::string>(node, path, "channel", "local");
        if (channel != "local") finding(path + ".channel", "unknown channel '" + channel + "'");

        if (p.nodes_per_block < 1) finding(path + ".nodes_per_block", "must be >= 1");
        if (p.init_blocks < 0) finding(path + ".init_blocks", "must be >= 0");
        if (p.min_blocks < 0) finding(path + ".min_blocks", "must be >= 0");
        if (p.max_blocks < 1) finding(path + ".max_blocks", "must be >= 1");
        if (p.min_blocks > p.init_blocks)
            finding(path + ".init_blocks",
                    "init_blocks (" + std::to_string(p.init_blocks) +
                        ") must be >= min_blocks (" + std::to_string(p.min_blocks) + ")");
        if (p.init_blocks > p.max_blocks)
            finding(path + ".init_blocks",
                    "init_blocks (" + std::to_string(p.init_blocks) +
                        ") must be <= max_blocks (" + std::to_string(p.max_blocks) + ")");
        if (p.queue_delay.delay_s < 0) finding(path + ".queue_delay_s", "must be >= 0");
        return p;
    }

    ExecutorSpec parse_executor(const YAML::Node& node, const std::string& path) {
        ExecutorSpec ex;
        check_keys(node, path, {"label", "kind", "max_workers", "address", "provider"});
        ex.label = get<std::string>(node, path, "label", "");
        if (ex.label.empty()) finding(path + ".label", "label must be non-empty");

        auto kind = get<std::string>(node, path, "kind", "in_process");
        if (kind == "in_process")
            ex.kind = ExecutorSpec::Kind::in_process;
        else if (kind == "worker_pool")
            ex.kind = ExecutorSpec::Kind::worker_pool;
        else
            finding(path + ".kind", "unknown executor kind '" + kind + "'");

        ex.max_workers = get<int>(node, path, "max_workers", 1);
        if (ex.max_workers < 1) finding(path + ".max_workers", "must be >= 1");
        ex.address = get<std::string>(node, path, "address", "127.0.0.1");

        if (ex.kind == ExecutorSpec::Kind::worker_pool) {
            if (!node["provider"]) {
                finding(path + ".provider", "worker_pool executor requires a provider");
            } else {
                ex.provider = parse_provider(node["provider"], path + ".provider");
            }
        } else if (node["provider"]) {
            finding(path + ".provider", "in_process executor takes no provider");
        }
        return ex;
    }

    ConfigDocument parse(const YAML::Node& root) {
        ConfigDocument doc;
        if (root && !root.IsMap() && !root.IsNull()) {
            finding("", "top level must be a mapping");
            return doc;
        }
        check_keys(root, "", {"retries", "retry_delay_s", "run_dir", "strategy", "executors"});

        doc.retries = get<int>(root, "", "retries", 0);
        if (doc.retries < 0) finding("retries", "must be >= 0");
        doc.retry_delay_s = get<double>(root, "", "retry_delay_s", 0.0);
        if (doc.retry_delay_s < 0) finding("retry_delay_s", "must be >= 0");
        doc.run_dir = get<std::string>(root, "", "run_dir", "runinfo");

        if (root["strategy"]) {
            check_keys(root["strategy"], "strategy", {"poll_interval_s", "idle_timeout_s"});
            doc.strategy.poll_interval_s =
                get<double>(root["strategy"], "strategy", "poll_interval_s", 1.0);
            doc.strategy.idle_timeout_s =
                get<double>(root["strategy"], "strategy", "idle_timeout_s", 60.0);
            if (doc.strategy.poll_interval_s <= 0)
                finding("strategy.poll_interval_s", "must be > 0");
            if (doc.strategy.idle_timeout_s <= 0)
                finding("strategy.idle_timeout_s", "must be > 0");
        }

        if (!root["executors"] || !root["executors"].IsSequence() ||
            root["executors"].size() == 0) {
            finding("executors", "at least one executor is required");
            return doc;
        }
        std::set<std::string> labels;
        std::size_t i = 0;
        for (const auto& ex_node : root["executors"]) {
            std::string path = "executors[" + std::to_string(i) + "]";
            ExecutorSpec ex = parse_executor(ex_node, path);
            if (!ex.label.empty() && !labels.insert(ex.label).second)
                finding(path + ".label", "duplicate executor label '" + ex.label + "'");
            doc.executors.push_back(std::move(ex));
            ++i;
        }
        return doc;
    }
};

YAML::Node parse_yaml(const std::string& text) {
    try {
        return YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("parse error at line " + std::to_string(e.mark.line + 1) +
                          ", column " + std::to_string(e.mark.column + 1) + ": " + e.msg);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("parse error: ") + e.what());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

std::vector<Finding> validate_config(const std::string& yaml_text) {
    std::vector<Finding> findings;
    Parser parser{findings};
    parser.parse(parse_yaml(yaml_text));
    return findings;
}

std::vector<Finding> validate_config_file(const std::filesystem::path& path) {
    return validate_config(read_file(path));
}

ConfigDocument parse_config(const std::string& yaml_text) {
    std::vector<Finding> findings;
    Parser parser{findings};
    ConfigDocument doc = parser.parse(parse_yaml(yaml_text));
    if (!findings.empty()) {
        std::ostringstream os;
        os << "invalid configuration:";
        for (const auto& f : findings) os << "\n  " << f.key_path << ": " << f.message;
        throw ConfigError(os.str());
    }
    return doc;
}

ConfigDocument load_config(const std::filesystem::path& path) {
    return parse_config(read_file(path));
}

const std::vector<OptionDesc>& describe_options() {
    static const std::vector<OptionDesc> schema = {
        {"retries", "int", "0", ">=0"},
        {"retry_delay_s", "float", "0", ">=0"},
        {"run_dir", "path", "runinfo", ""},
        {"strategy.poll_interval_s", "float", "1", ">0"},
        {"strategy.idle_timeout_s", "float", "60", ">0"},
        {"executors", "list", "", "non-empty"},
        {"executors[].label", "string", "", "non-empty, unique"},
        {"executors[].kind", "string", "in_process", "in_process | worker_pool"},
        {"executors[].max_workers", "int", "1", ">=1"},
        {"executors[].address", "string", "127.0.0.1", "IPv4 address"},
        {"executors[].provider.kind", "string", "local", "local | sim_batch"},
        {"executors[].provider.nodes_per_block", "int", "1", ">=1"},
        {"executors[].provider.init_blocks", "int", "1", ">=min_blocks, <=max_blocks"},
        {"executors[].provider.min_blocks", "int", "0", ">=0"},
        {"executors[].provider.max_blocks", "int", "1", ">=1"},
        {"executors[].provider.partition", "string", "", "sim_batch queue profile"},
        {"executors[].provider.queue_delay_s", "float", "0", ">=0"},
        {"executors[].provider.launcher", "string", "per_node", "single | per_node"},
        {"executors[].provider.channel", "string", "local", "local"},
    };
    return schema;
}

std::string options_schema_json() {
    nlohmann::json options = nlohmann::json::array();
    for (const auto& o : describe_options()) {
        options.push_back({{"key", o.key},
                           {"type", o.type},
                           {"default", o.default_value},
                           {"constraint", o.constraint}});
    }
    return nlohmann::json{{"options", options}}.dump(2);
}

}  // namespace dflow
