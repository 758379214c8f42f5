// Copyright 2026 The dgten Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dgten/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dgten/errors.hpp"

namespace dgten {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": '" + v + "'");
    }
}

long long to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("bad value for " + key + ": '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError("bad value for " + key + ": '" + v + "'");
}

}  // namespace

void TrainConfig::apply_preset(const std::string& name) {
    if (name == "otc") {
        tau_cos = 1.4;
        heads = 28;
    } else if (name == "alpha") {
        tau_cos = 1.3;
        heads = 20;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected otc or alpha)");
    }
    dropout = 0.3;
}

void TrainConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("invalid config: ") + what);
    };
    require(learning_rate > 0, "learning_rate must be > 0");
    require(weight_decay >= 0, "weight_decay must be >= 0");
    require(epochs >= 0, "epochs must be >= 0");
    require(layers >= 1, "layers must be >= 1");
    require(heads >= 1, "heads must be >= 1");
    require(head_dim >= 1, "head_dim must be >= 1");
    require(dropout >= 0 && dropout < 1, "dropout must be in [0, 1)");
    require(cheb_order >= 0, "cheb_order must be >= 0");
    require(hidden_dim >= 2 && hidden_dim % 2 == 0, "hidden_dim must be even and >= 2");
    require(feature_dim >= 1, "feature_dim must be >= 1");
    require(ode_steps >= 1, "ode_steps must be >= 1");
    require(delta >= 1, "delta must be >= 1");
    require(t_initial >= 2, "t_initial must be >= 2");
    require(sigma_min > 0, "sigma_min must be > 0");
    require(epsilon > 0, "epsilon must be > 0");
    require(momentum >= 0 && momentum < 1, "momentum must be in [0, 1)");
    require(optimizer_eps > 0, "optimizer_eps must be > 0");
}

void TrainConfig::set(const std::string& raw_key, const std::string& raw_value) {
    const std::string key = trim(raw_key);
    const std::string v = trim(raw_value);
    if (key == "preset") apply_preset(v);
    else if (key == "learning_rate") learning_rate = to_double(key, v);
    else if (key == "weight_decay") weight_decay = to_double(key, v);
    else if (key == "epochs") epochs = static_cast<int>(to_int(key, v));
    else if (key == "layers") layers = static_cast<int>(to_int(key, v));
    else if (key == "tau_cos") tau_cos = to_double(key, v);
    else if (key == "heads") heads = static_cast<int>(to_int(key, v));
    else if (key == "dropout") dropout = to_double(key, v);
    else if (key == "cheb_order") cheb_order = static_cast<int>(to_int(key, v));
    else if (key == "hidden_dim") hidden_dim = static_cast<int>(to_int(key, v));
    else if (key == "feature_dim") feature_dim = static_cast<int>(to_int(key, v));
    else if (key == "head_dim") head_dim = static_cast<int>(to_int(key, v));
    else if (key == "ode_steps") ode_steps = static_cast<int>(to_int(key, v));
    else if (key == "delta") delta = static_cast<int>(to_int(key, v));
    else if (key == "t_initial") t_initial = static_cast<int>(to_int(key, v));
    else if (key == "sigma_min") sigma_min = to_double(key, v);
    else if (key == "epsilon") epsilon = to_double(key, v);
    else if (key == "jaccard_threshold") jaccard_threshold = to_double(key, v);
    else if (key == "momentum") momentum = to_double(key, v);
    else if (key == "optimizer_eps") optimizer_eps = to_double(key, v);
    else if (key == "robust_aggregation") robust_aggregation = to_bool(key, v);
    else if (key == "train_on_next_slot") train_on_next_slot = to_bool(key, v);
    else if (key == "seed") seed = static_cast<std::uint64_t>(to_int(key, v));
    else throw ConfigError("unknown config key '" + key + "'");
}

std::string TrainConfig::to_json() const {
    nlohmann::json j{
        {"learning_rate", learning_rate},
        {"weight_decay", weight_decay},
        {"epochs", epochs},
        {"layers", layers},
        {"tau_cos", tau_cos},
        {"heads", heads},
        {"dropout", dropout},
        {"cheb_order", cheb_order},
        {"hidden_dim", hidden_dim},
        {"feature_dim", feature_dim},
        {"head_dim", head_dim},
        {"ode_steps", ode_steps},
        {"delta", delta},
        {"t_initial", t_initial},
        {"sigma_min", sigma_min},
        {"epsilon", epsilon},
        {"jaccard_threshold", jaccard_threshold},
        {"momentum", momentum},
        {"optimizer_eps", optimizer_eps},
        {"robust_aggregation", robust_aggregation},
        {"train_on_next_slot", train_on_next_slot},
        {"seed", seed},
    };
    return j.dump();
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config JSON must be an object");
    TrainConfig c;
    if (j.contains("preset")) c.apply_preset(j["preset"].get<std::string>());
    for (const auto& [key, value] : j.items()) {
        if (key == "preset") continue;
        if (value.is_string()) {
            c.set(key, value.get<std::string>());
        } else if (value.is_boolean()) {
            c.set(key, value.get<bool>() ? "true" : "false");
        } else if (value.is_number_integer() || value.is_number_unsigned()) {
            c.set(key, std::to_string(value.get<long long>()));
        } else if (value.is_number()) {
            std::ostringstream os;
            os.precision(17);
            os << value.get<double>();
            c.set(key, os.str());
        } else {
            throw ConfigError("unsupported value for " + key);
        }
    }
    c.validate();
    return c;
}

TrainConfig TrainConfig::from_key_values(const std::string& text) {
    TrainConfig c;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        c.set(line.substr(0, eq), line.substr(eq + 1));
    }
    c.validate();
    return c;
}

TrainConfig TrainConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') return from_json(text);
    return from_key_values(text);
}

}  // namespace dgten
