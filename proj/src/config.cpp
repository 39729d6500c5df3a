#include "hybridgrid/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace hybridgrid {

namespace {

std::string location(const std::string& source, int line) {
    return line > 0 ? source + ":" + std::to_string(line) : source;
}

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& field,
                           const std::string& message) const {
        const int line = node.IsDefined() && node.Mark().line >= 0 ? node.Mark().line + 1 : 0;
        throw ConfigError(source_, line, field, message);
    }

    void check_keys(const YAML::Node& map, const std::string& prefix,
                    const std::set<std::string>& allowed) const {
        if (!map.IsMap()) fail(map, prefix.empty() ? "<root>" : prefix, "expected a mapping");
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) {
                fail(kv.first, prefix.empty() ? key : prefix + "." + key, "unknown key");
            }
        }
    }

    template <typename T>
    void scalar(const YAML::Node& map, const std::string& key, const std::string& field, T& out) const {
        const YAML::Node node = map[key];
        if (!node) return;
        if (!node.IsScalar()) fail(node, field, "expected a scalar");
        try {
            out = node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, field, "cannot read '" + node.Scalar() + "' as " + type_name<T>());
        }
    }

    template <typename T>
    void list(const YAML::Node& map, const std::string& key, const std::string& field,
              std::vector<T>& out) const {
        const YAML::Node node = map[key];
        if (!node) return;
        if (!node.IsSequence()) fail(node, field, "expected a list");
        out.clear();
        for (const auto& item : node) {
            try {
                out.push_back(item.as<T>());
            } catch (const YAML::Exception&) {
                fail(item, field, "cannot read '" + item.Scalar() + "' as " + type_name<T>());
            }
        }
    }

private:
    template <typename T>
    static std::string type_name() {
        if constexpr (std::is_same_v<T, bool>) return "a boolean";
        else if constexpr (std::is_integral_v<T>) return "an integer";
        else if constexpr (std::is_floating_point_v<T>) return "a number";
        else return "a string";
    }

    std::string source_;
};

}  // namespace

ConfigError::ConfigError(const std::string& source, int line, const std::string& field,
                         const std::string& message)
    : std::runtime_error(location(source, line) + ": " + field + ": " + message),
      line_(line),
      field_(field) {}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(source, e.mark.line + 1, "<syntax>", e.msg);
    }
    ExperimentConfig config;
    if (root.IsNull()) return config;

    const Reader r(source);
    r.check_keys(root, "", {"strategies", "base_sizes", "wall_distances", "n_runs", "seed_base",
                            "threads", "record_runs", "iteration_bound", "curve", "caps",
                            "fixed_length"});

    if (const YAML::Node node = root["strategies"]) {
        std::vector<std::string> names;
        r.list(root, "strategies", "strategies", names);
        config.strategies.clear();
        std::size_t i = 0;
        for (const auto& name : names) {
            try {
                config.strategies.push_back(parse_strategy(name));
            } catch (const std::invalid_argument& e) {
                r.fail(node[i], "strategies", e.what());
            }
            ++i;
        }
    }
    r.list(root, "base_sizes", "base_sizes", config.base_sizes);
    r.list(root, "wall_distances", "wall_distances", config.wall_distances);
    r.scalar(root, "n_runs", "n_runs", config.n_runs);
    r.scalar(root, "seed_base", "seed_base", config.seed_base);
    r.scalar(root, "threads", "threads", config.threads);
    r.scalar(root, "record_runs", "record_runs", config.record_runs);
    if (const YAML::Node node = root["iteration_bound"]) {
        std::string bound;
        r.scalar(root, "iteration_bound", "iteration_bound", bound);
        if (bound == "floor") config.iteration_bound = IterationBound::floor;
        else if (bound == "ceil") config.iteration_bound = IterationBound::ceil;
        else r.fail(node, "iteration_bound", "expected floor or ceil, got '" + bound + "'");
    }

    if (const YAML::Node curve = root["curve"]) {
        r.check_keys(curve, "curve", {"policy", "convergence", "max_length", "dp_budget",
                                      "batch_size", "min_successes"});
        if (const YAML::Node node = curve["policy"]) {
            std::string policy;
            r.scalar(curve, "policy", "curve.policy", policy);
            try {
                config.curve.policy = parse_curve_policy(policy);
            } catch (const std::invalid_argument& e) {
                r.fail(node, "curve.policy", e.what());
            }
        }
        r.scalar(curve, "convergence", "curve.convergence", config.curve.convergence);
        r.scalar(curve, "max_length", "curve.max_length", config.curve.max_length);
        r.scalar(curve, "dp_budget", "curve.dp_budget", config.curve.dp_budget);
        r.scalar(curve, "batch_size", "curve.batch_size", config.curve.mc.batch_size);
        r.scalar(curve, "min_successes", "curve.min_successes", config.curve.mc.min_successes);
    }
    if (const YAML::Node caps = root["caps"]) {
        r.check_keys(caps, "caps", {"shot_cap", "round_cap", "step_cap"});
        r.scalar(caps, "shot_cap", "caps.shot_cap", config.curve.mc.shot_cap);
        r.scalar(caps, "round_cap", "caps.round_cap", config.caps.round_cap);
        r.scalar(caps, "step_cap", "caps.step_cap", config.caps.step_cap);
    }
    if (const YAML::Node fixed = root["fixed_length"]) {
        r.check_keys(fixed, "fixed_length", {"grid", "points", "max_length"});
        r.list(fixed, "grid", "fixed_length.grid", config.fixed_lengths);
        r.scalar(fixed, "points", "fixed_length.points", config.fixed_grid_points);
        r.scalar(fixed, "max_length", "fixed_length.max_length", config.fixed_grid_max);
    }

    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        // validate() prefixes the field name; point at that key when it exists.
        const std::string what = e.what();
        const std::string field = what.substr(0, what.find(':'));
        YAML::Node node = root;
        std::stringstream path(field);
        for (std::string part; std::getline(path, part, '.');) {
            if (node.IsMap() && node[part]) node = node[part];
        }
        r.fail(node, field, what.substr(what.find(':') + 2));
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string(), 0, "<file>", "cannot open configuration file");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

std::string dump_config(const ExperimentConfig& c) {
    YAML::Emitter out;
    out.SetDoublePrecision(17);
    out << YAML::BeginMap;
    out << YAML::Key << "strategies" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (Strategy s : c.strategies) out << std::string(to_string(s));
    out << YAML::EndSeq;
    out << YAML::Key << "base_sizes" << YAML::Value << YAML::Flow << c.base_sizes;
    out << YAML::Key << "wall_distances" << YAML::Value << YAML::Flow << c.wall_distances;
    out << YAML::Key << "n_runs" << YAML::Value << c.n_runs;
    out << YAML::Key << "seed_base" << YAML::Value << c.seed_base;
    out << YAML::Key << "threads" << YAML::Value << c.threads;
    out << YAML::Key << "record_runs" << YAML::Value << c.record_runs;
    out << YAML::Key << "iteration_bound" << YAML::Value
        << (c.iteration_bound == IterationBound::floor ? "floor" : "ceil");
    out << YAML::Key << "curve" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "policy" << YAML::Value << to_string(c.curve.policy);
    out << YAML::Key << "convergence" << YAML::Value << c.curve.convergence;
    out << YAML::Key << "max_length" << YAML::Value << c.curve.max_length;
    out << YAML::Key << "dp_budget" << YAML::Value << c.curve.dp_budget;
    out << YAML::Key << "batch_size" << YAML::Value << c.curve.mc.batch_size;
    out << YAML::Key << "min_successes" << YAML::Value << c.curve.mc.min_successes;
    out << YAML::EndMap;
    out << YAML::Key << "caps" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "shot_cap" << YAML::Value << c.curve.mc.shot_cap;
    out << YAML::Key << "round_cap" << YAML::Value << c.caps.round_cap;
    out << YAML::Key << "step_cap" << YAML::Value << c.caps.step_cap;
    out << YAML::EndMap;
    out << YAML::Key << "fixed_length" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "grid" << YAML::Value << YAML::Flow << c.fixed_lengths;
    out << YAML::Key << "points" << YAML::Value << c.fixed_grid_points;
    out << YAML::Key << "max_length" << YAML::Value << c.fixed_grid_max;
    out << YAML::EndMap;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace hybridgrid
