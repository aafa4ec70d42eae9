#include "defix/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "csv.hpp"
#include "defix/error.hpp"

namespace defix {

const std::vector<std::string>& default_major_tokens() {
    static const std::vector<std::string> tokens{"LUNA", "AVAX", "WBTC", "DAI",  "LINK",
                                                 "UNI",  "FTM",  "XTZ",  "AAVE", "GRT",
                                                 "CAKE", "MKR",  "RUNE", "CRV",  "LRC"};
    return tokens;
}

namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
        if (!out.empty()) out += ',';
        out += s;
    }
    return out;
}

std::string join(const std::vector<int>& v) {
    std::string out;
    for (int x : v) {
        if (!out.empty()) out += ',';
        out += std::to_string(x);
    }
    return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw Error(ErrorCode::InvalidConfig, key + ": " + why);
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
        bad(key, "not a number: '" + text + "'");
    }
    return v;
}

std::size_t to_count(const std::string& key, const std::string& text) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        bad(key, "not a non-negative integer: '" + text + "'");
    }
    return v;
}

std::vector<int> to_lags(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const auto& item : split_list(text)) {
        const auto v = to_count(key, item);
        if (v < 1) bad(key, "lags must be >= 1");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) bad(key, "lag set must not be empty");
    return out;
}

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"inputs", {"prices", "tvl", "network", "attention"}},
        {"index", {"min_mcap", "reconstitution", "target_count", "lookback_days", "beta", "exclude"}},
        {"analysis",
         {"frequency", "lags_crypto", "lags_network", "lags_attention", "lags_valuation", "btc",
          "eth", "crix", "attention_terms", "attention_labels", "missing_policy"}},
        {"tokens",
         {"major", "major_rule", "major_count", "major_window_days", "all_tvl", "all_network"}},
        {"output", {"dir"}},
    };
    return keys;
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw Error(ErrorCode::InvalidConfig, std::string("config syntax: ") + e.what());
    }

    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end() || body.empty()) {
            bad(section, it == known_keys().end() ? "unknown section" : "top-level key without section");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) bad(section + "." + key, "unknown key");
        }
    }

    auto get = [&](const std::string& path) -> std::optional<std::string> {
        if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) {
            return trim(*v);
        }
        return std::nullopt;
    };
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };

    RunConfig c;
    c.major = default_major_tokens();
    const auto prices = get("inputs.prices");
    if (!prices || prices->empty()) bad("inputs.prices", "required");
    c.prices = resolve(*prices);
    c.input_labels.emplace_back("prices", *prices);
    for (const char* name : {"tvl", "network", "attention"}) {
        if (auto v = get(std::string("inputs.") + name); v && !v->empty()) {
            auto& slot = std::string(name) == "tvl"       ? c.tvl
                         : std::string(name) == "network" ? c.network
                                                          : c.attention;
            slot = resolve(*v);
            c.input_labels.emplace_back(name, *v);
        }
    }

    if (auto v = get("index.min_mcap")) {
        c.index.min_mcap = to_double("index.min_mcap", *v);
        if (!(c.index.min_mcap > 0.0)) bad("index.min_mcap", "must be > 0");
    }
    if (auto v = get("index.reconstitution")) c.schedule.reconstitution = parse_reconstitution(*v);
    if (auto v = get("index.target_count"); v && !v->empty()) {
        const auto k = to_count("index.target_count", *v);
        if (k == 0 || k % 5 != 0) bad("index.target_count", "must be a positive multiple of five");
        c.index.target_count = k;
    }
    if (auto v = get("index.lookback_days")) {
        c.index.lookback_days = to_count("index.lookback_days", *v);
        if (c.index.lookback_days == 0) bad("index.lookback_days", "must be >= 1");
    }
    if (auto v = get("index.beta")) {
        c.index.beta = to_double("index.beta", *v);
        if (!(c.index.beta > 0.0)) bad("index.beta", "must be > 0");
    }
    if (auto v = get("index.exclude")) {
        for (auto& s : split_list(*v)) c.index.excluded.insert(s);
    }

    if (auto v = get("analysis.frequency")) {
        c.frequency = parse_frequency(*v);
        if (c.frequency == Frequency::daily) bad("analysis.frequency", "must be weekly or monthly");
    }
    if (auto v = get("analysis.lags_crypto")) c.lags_crypto = to_lags("analysis.lags_crypto", *v);
    if (auto v = get("analysis.lags_network")) c.lags_network = to_lags("analysis.lags_network", *v);
    if (auto v = get("analysis.lags_attention")) {
        c.lags_attention = to_lags("analysis.lags_attention", *v);
    }
    if (auto v = get("analysis.lags_valuation")) {
        c.lags_valuation = to_lags("analysis.lags_valuation", *v);
    }
    if (auto v = get("analysis.btc")) c.btc = *v;
    if (auto v = get("analysis.eth")) c.eth = *v;
    if (auto v = get("analysis.crix")) c.crix = *v;
    if (auto v = get("analysis.attention_terms")) c.attention_terms = split_list(*v);
    if (auto v = get("analysis.attention_labels")) c.attention_labels = split_list(*v);
    if (c.attention_terms.size() != c.attention_labels.size()) {
        bad("analysis.attention_labels", "needs one label per attention term");
    }
    if (auto v = get("analysis.missing_policy")) {
        if (*v == "drop") c.missing_policy = MissingPolicy::drop_missing;
        else if (*v == "forward_fill") c.missing_policy = MissingPolicy::forward_fill;
        else bad("analysis.missing_policy", "expected drop or forward_fill");
    }

    if (auto v = get("tokens.major")) c.major = split_list(*v);
    if (auto v = get("tokens.major_rule")) {
        if (*v == "fixed") c.major_rule = MajorRule::fixed;
        else if (*v == "avg_mcap") c.major_rule = MajorRule::avg_mcap;
        else bad("tokens.major_rule", "expected fixed or avg_mcap");
    }
    if (auto v = get("tokens.major_count")) c.major_count = to_count("tokens.major_count", *v);
    if (auto v = get("tokens.major_window_days")) {
        c.major_window_days = to_count("tokens.major_window_days", *v);
        if (c.major_window_days == 0) bad("tokens.major_window_days", "must be >= 1");
    }
    if (auto v = get("tokens.all_tvl"); v && *v != "auto") c.all_tvl = split_list(*v);
    if (auto v = get("tokens.all_network"); v && *v != "auto") c.all_network = split_list(*v);

    if (auto v = get("output.dir"); v && !v->empty()) c.output_dir = resolve(*v);

    // Benchmarks never enter the index.
    c.index.excluded.insert(c.btc);
    c.index.excluded.insert(c.eth);
    c.index.excluded.insert(c.crix);
    return c;
}

RunConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidConfig, "cannot open config " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), file.parent_path());
}

void validate(const RunConfig& config) {
    auto must_exist = [](const char* key, const std::filesystem::path& p) {
        if (!std::filesystem::is_regular_file(p)) {
            bad(std::string("inputs.") + key, "file not found: " + p.string());
        }
    };
    must_exist("prices", config.prices);
    if (config.tvl) must_exist("tvl", *config.tvl);
    if (config.network) must_exist("network", *config.network);
    if (config.attention) must_exist("attention", *config.attention);
    if (!(config.index.min_mcap > 0.0)) bad("index.min_mcap", "must be > 0");
    for (const auto* lags : {&config.lags_crypto, &config.lags_network, &config.lags_attention,
                             &config.lags_valuation}) {
        if (lags->empty()) bad("analysis.lags", "lag sets must be non-empty");
    }
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [k, v] : input_labels) out.emplace_back("inputs." + k, v);
    std::vector<std::string> excluded(index.excluded.begin(), index.excluded.end());
    out.emplace_back("index.min_mcap", csv::format_exact(index.min_mcap));
    out.emplace_back("index.reconstitution", std::string(to_string(schedule.reconstitution)));
    out.emplace_back("index.target_count",
                     index.target_count ? std::to_string(*index.target_count) : "auto");
    out.emplace_back("index.lookback_days", std::to_string(index.lookback_days));
    out.emplace_back("index.beta", csv::format_exact(index.beta));
    out.emplace_back("index.exclude", join(excluded));
    out.emplace_back("analysis.frequency", std::string(to_string(frequency)));
    out.emplace_back("analysis.lags_crypto", join(lags_crypto));
    out.emplace_back("analysis.lags_network", join(lags_network));
    out.emplace_back("analysis.lags_attention", join(lags_attention));
    out.emplace_back("analysis.lags_valuation", join(lags_valuation));
    out.emplace_back("analysis.missing_policy",
                     missing_policy == MissingPolicy::drop_missing ? "drop" : "forward_fill");
    out.emplace_back("analysis.btc", btc);
    out.emplace_back("analysis.eth", eth);
    out.emplace_back("analysis.crix", crix);
    out.emplace_back("analysis.attention_terms", join(attention_terms));
    out.emplace_back("analysis.attention_labels", join(attention_labels));
    out.emplace_back("tokens.major_rule", major_rule == MajorRule::fixed ? "fixed" : "avg_mcap");
    out.emplace_back("tokens.major", join(major));
    out.emplace_back("tokens.major_count", std::to_string(major_count));
    out.emplace_back("tokens.major_window_days", std::to_string(major_window_days));
    out.emplace_back("tokens.all_tvl", all_tvl.empty() ? "auto" : join(all_tvl));
    out.emplace_back("tokens.all_network", all_network.empty() ? "auto" : join(all_network));
    return out;
}

}  // namespace defix
