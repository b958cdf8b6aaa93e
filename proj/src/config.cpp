#include "ebql/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "ebql/csv.hpp"
#include "ebql/errors.hpp"

namespace ebql {

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::MseCurve: return "mse-curve";
        case ExperimentKind::SplitSweep: return "split-sweep";
        case ExperimentKind::EstimatorStats: return "estimator-stats";
        case ExperimentKind::ChainTrain: return "chain-train";
        case ExperimentKind::BiasTrace: return "bias-trace";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    if (s == "mse-curve") return ExperimentKind::MseCurve;
    if (s == "split-sweep") return ExperimentKind::SplitSweep;
    if (s == "estimator-stats") return ExperimentKind::EstimatorStats;
    if (s == "chain-train") return ExperimentKind::ChainTrain;
    if (s == "bias-trace") return ExperimentKind::BiasTrace;
    throw ConfigError("unknown experiment kind: " + s);
}

std::string AlgorithmSpec::label() const {
    switch (algorithm) {
        case Algorithm::QL: return "ql";
        case Algorithm::DQL: return "dql";
        case Algorithm::EBQL: return "ebql" + std::to_string(ensemble_size);
    }
    return "?";
}

AlgorithmSpec AlgorithmSpec::parse(const std::string& text) {
    AlgorithmSpec spec;
    if (text == "ql") {
        spec.algorithm = Algorithm::QL;
    } else if (text == "dql") {
        spec.algorithm = Algorithm::DQL;
    } else if (text.rfind("ebql", 0) == 0) {
        spec.algorithm = Algorithm::EBQL;
        std::string rest = text.substr(4);
        if (!rest.empty() && rest.front() == ':') rest.erase(0, 1);
        if (rest.empty()) rest = "10";
        try {
            spec.ensemble_size = std::stoi(rest);
        } catch (const std::exception&) {
            throw ConfigError("bad ensemble size in algorithm '" + text + "'");
        }
        if (spec.ensemble_size < 2)
            throw ConfigError("ebql ensemble size must be >= 2, got '" + text + "'");
    } else {
        throw ConfigError("unknown algorithm '" + text + "' (want ql, dql, or ebql:K)");
    }
    return spec;
}

MetaChainConfig ExperimentConfig::meta_chain() const {
    MetaChainConfig meta;
    for (double mu : chain_mus) meta.chains.push_back({mu, sigma, b_actions});
    return meta;
}

AgentConfig ExperimentConfig::agent_config(const AlgorithmSpec& alg) const {
    AgentConfig cfg;
    cfg.algorithm = alg.algorithm;
    if (alg.algorithm == Algorithm::EBQL) cfg.ensemble_size = alg.ensemble_size;
    cfg.gamma = gamma;
    cfg.lr_exponent = lr_exponent;
    cfg.epsilon = epsilon;
    return cfg;
}

void ExperimentConfig::validate() const {
    if (chain_mus.empty()) throw ConfigError("chain_mus must be nonempty");
    if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (b_actions < 1) throw ConfigError("b_actions must be >= 1");
    if (gamma < 0.0 || gamma > 1.0) throw ConfigError("gamma must lie in [0,1]");
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (seeds < 1) throw ConfigError("seeds must be >= 1");
    if (algorithms.empty()) throw ConfigError("algorithms must be nonempty");
    if (means.size() != stds.size() || means.empty())
        throw ConfigError("means and stds must be nonempty and equal length");
    for (double s : stds)
        if (!(s > 0.0)) throw ConfigError("stds must be positive");
    if (n_samples < 2) throw ConfigError("n_samples must be >= 2");
    if (trials < 1 || mc_trials < 1) throw ConfigError("trial counts must be >= 1");
    if (estimator != "se" && estimator != "de" && estimator != "wde" && estimator != "ee")
        throw ConfigError("estimator must be one of se, de, wde, ee");
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + s + "'", line);
    }
}

long parse_long(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("expected an integer, got '" + s + "'", line);
    }
}

std::vector<double> parse_double_list(const std::string& s, int line) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) out.push_back(parse_double(item, line));
    return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string raw;
    int line = 0;
    bool kind_seen = false;
    while (std::getline(ss, raw)) {
        ++line;
        const auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value', got '" + s + "'", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        try {
            if (key == "kind") {
                cfg.kind = experiment_kind_from_string(value);
                kind_seen = true;
            } else if (key == "chain_mus") {
                cfg.chain_mus = parse_double_list(value, line);
            } else if (key == "sigma") {
                cfg.sigma = parse_double(value, line);
            } else if (key == "b_actions") {
                cfg.b_actions = static_cast<int>(parse_long(value, line));
            } else if (key == "gamma") {
                cfg.gamma = parse_double(value, line);
            } else if (key == "lr_exponent") {
                cfg.lr_exponent = parse_double(value, line);
            } else if (key == "epsilon") {
                cfg.epsilon = parse_double(value, line);
            } else if (key == "episodes") {
                cfg.episodes = static_cast<int>(parse_long(value, line));
            } else if (key == "seeds") {
                cfg.seeds = static_cast<int>(parse_long(value, line));
            } else if (key == "algorithms") {
                cfg.algorithms.clear();
                for (const auto& item : split_list(value))
                    cfg.algorithms.push_back(AlgorithmSpec::parse(item));
            } else if (key == "master_seed") {
                cfg.master_seed = static_cast<std::uint64_t>(parse_long(value, line));
            } else if (key == "means") {
                cfg.means = parse_double_list(value, line);
            } else if (key == "stds") {
                cfg.stds = parse_double_list(value, line);
            } else if (key == "n_samples") {
                cfg.n_samples = static_cast<int>(parse_long(value, line));
            } else if (key == "estimator") {
                cfg.estimator = value;
            } else if (key == "param") {
                cfg.param = static_cast<int>(parse_long(value, line));
            } else if (key == "trials") {
                cfg.trials = parse_long(value, line);
            } else if (key == "deltas") {
                cfg.deltas = parse_double_list(value, line);
            } else if (key == "sigma2") {
                cfg.sigma2 = parse_double(value, line);
            } else if (key == "m_values") {
                cfg.m_values.clear();
                for (const auto& item : split_list(value))
                    cfg.m_values.push_back(static_cast<int>(parse_long(item, line)));
            } else if (key == "normalized_gaps") {
                cfg.normalized_gaps = parse_double_list(value, line);
            } else if (key == "mc_trials") {
                cfg.mc_trials = parse_long(value, line);
            } else if (key == "snr_values") {
                cfg.snr_values = parse_double_list(value, line);
            } else if (key == "out_dir") {
                cfg.out_dir = value;
            } else {
                throw ConfigError("unknown key '" + key + "'", line);
            }
        } catch (ConfigError& e) {
            if (e.line_number == 0) throw ConfigError(e.what(), line);
            throw;
        }
    }
    if (!kind_seen) throw ConfigError("missing required key 'kind'");
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

namespace {

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += csv_double(v[i]);
    }
    return out;
}

}  // namespace

std::string serialize_config(const ExperimentConfig& c) {
    std::string algs;
    for (std::size_t i = 0; i < c.algorithms.size(); ++i) {
        if (i) algs += ",";
        const auto& a = c.algorithms[i];
        algs += a.algorithm == Algorithm::EBQL
                    ? "ebql:" + std::to_string(a.ensemble_size)
                    : a.label();
    }
    std::string ms;
    for (std::size_t i = 0; i < c.m_values.size(); ++i) {
        if (i) ms += ",";
        ms += std::to_string(c.m_values[i]);
    }
    std::ostringstream out;
    out << "kind = " << to_string(c.kind) << "\n"
        << "chain_mus = " << join_doubles(c.chain_mus) << "\n"
        << "sigma = " << csv_double(c.sigma) << "\n"
        << "b_actions = " << c.b_actions << "\n"
        << "gamma = " << csv_double(c.gamma) << "\n"
        << "lr_exponent = " << csv_double(c.lr_exponent) << "\n"
        << "epsilon = " << csv_double(c.epsilon) << "\n"
        << "episodes = " << c.episodes << "\n"
        << "seeds = " << c.seeds << "\n"
        << "algorithms = " << algs << "\n"
        << "master_seed = " << c.master_seed << "\n"
        << "means = " << join_doubles(c.means) << "\n"
        << "stds = " << join_doubles(c.stds) << "\n"
        << "n_samples = " << c.n_samples << "\n"
        << "estimator = " << c.estimator << "\n"
        << "param = " << c.param << "\n"
        << "trials = " << c.trials << "\n"
        << "deltas = " << join_doubles(c.deltas) << "\n"
        << "sigma2 = " << csv_double(c.sigma2) << "\n"
        << "m_values = " << ms << "\n";
    if (!c.normalized_gaps.empty())
        out << "normalized_gaps = " << join_doubles(c.normalized_gaps) << "\n";
    out << "mc_trials = " << c.mc_trials << "\n";
    if (!c.snr_values.empty()) out << "snr_values = " << join_doubles(c.snr_values) << "\n";
    out << "out_dir = " << c.out_dir << "\n";
    return out.str();
}

}  // namespace ebql
