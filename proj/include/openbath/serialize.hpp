// serialize.hpp — strict JSON config parsing (unknown keys rejected with their
// path), JSON emission for reports, and a fixed-format CSV writer.

#pragma once

#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "openbath/linear_example.hpp"

namespace openbath {

using Json = nlohmann::ordered_json;

// Raised for any schema/value problem in a config; the harness maps it to
// exit code 2 and the message carries the offending key path.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Strict object reader: every key must be consumed, and done() reports
// leftovers by path.
class ConfigReader {
  public:
    ConfigReader(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    template <typename T>
    T require(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": missing");
        return get<T>(key);
    }

    template <typename T>
    T optional(const std::string& key, T fallback) {
        if (!j_.contains(key)) return fallback;
        return get<T>(key);
    }

    ConfigReader child(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": missing");
        used_.insert(key);
        return ConfigReader(j_.at(key), path_ + "." + key);
    }

    std::vector<Json> child_array(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(path_ + "." + key + ": missing");
        used_.insert(key);
        const Json& a = j_.at(key);
        if (!a.is_array()) throw ConfigError(path_ + "." + key + ": expected an array");
        return std::vector<Json>(a.begin(), a.end());
    }

    const std::string& path() const { return path_; }

    void done() const {
        for (const auto& [key, value] : j_.items()) {
            (void)value;
            if (!used_.count(key))
                throw ConfigError(path_ + "." + key + ": unknown key");
        }
    }

  private:
    template <typename T>
    T get(const std::string& key) {
        used_.insert(key);
        try {
            return j_.at(key).get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ConfigError(path_ + "." + key + ": wrong type");
        }
    }

    const Json& j_;
    std::string path_;
    std::set<std::string> used_;
};

// Bath mode: explicit diffusion constants, or Gibbs form via "temperature".
// With enforce = false the constraint check is skipped (validate scenario).
inline OscillatorParams parse_oscillator(ConfigReader r, Constants constants = {},
                                         bool enforce = true) {
    const double m = r.require<double>("m");
    const double omega = r.require<double>("omega");
    const double lambda = r.require<double>("lambda");
    const double mu = r.optional<double>("mu", 0.0);
    OscillatorParams p;
    try {
        if (r.has("temperature")) {
            p = gibbs_params(m, omega, lambda, mu, r.require<double>("temperature"), constants);
        } else {
            p.m = m;
            p.omega = omega;
            p.lambda = lambda;
            p.mu = mu;
            p.constants = constants;
            p.D_qq = r.require<double>("D_qq");
            p.D_pp = r.require<double>("D_pp");
            p.D_pq = r.optional<double>("D_pq", 0.0);
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(r.path() + ": " + e.what());
    }
    r.done();
    if (!enforce) return p;
    const ValidationReport rep = validate_params(p);
    if (!rep.valid()) {
        std::string msg = r.path() + ": constraint violations:";
        for (const auto& lab : rep.violations) msg += " " + lab;
        throw ConfigError(msg);
    }
    return p;
}

inline Json to_json(const OscillatorParams& p) {
    return Json{{"m", p.m},       {"omega", p.omega}, {"lambda", p.lambda},
                {"mu", p.mu},     {"D_qq", p.D_qq},   {"D_pp", p.D_pp},
                {"D_pq", p.D_pq}, {"hbar", p.constants.hbar}, {"k_B", p.constants.k_B}};
}

inline Json to_json(const Mat& a) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            row.push_back(Json::array({a(i, j).real(), a(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Json to_json(const MasterEquationSpec& me) {
    Json jumps = Json::array();
    for (const Mat& v : me.jumps) jumps.push_back(to_json(v));
    return Json{{"h_eff", to_json(me.h_eff)}, {"jumps", std::move(jumps)},
                {"rates", me.rates}};
}

inline Json to_json(const EffectiveCoefficients& e) {
    return Json{{"delta_omega_S", e.delta_omega_S},
                {"delta_E", e.delta_E},
                {"lambda_eff", e.lambda_eff},
                {"D_pp_eff", e.D_pp_eff},
                {"D_qq_eff", e.D_qq_eff},
                {"lambda_eff_nonpositive", e.lambda_eff_nonpositive}};
}

// Fixed-format CSV: '.' decimal, %.12e numbers, RFC-style quoting for text.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::ios_base::failure("cannot open " + path);
    }

    void header(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i)
            out_ << (i ? "," : "") << quote(names[i]);
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        char buf[32];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%.12e", values[i]);
            out_ << (i ? "," : "") << buf;
        }
        out_ << "\n";
    }

    void text_row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i)
            out_ << (i ? "," : "") << quote(fields[i]);
        out_ << "\n";
    }

    void close() {
        out_.close();
        if (!out_) throw std::ios_base::failure("CSV write failed");
    }

  private:
    static std::string quote(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    }

    std::ofstream out_;
};

}  // namespace openbath
