// Copyright 2026 The gptkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <system_error>
#include <string_view>
#include <vector>

#include "gptkit/core.hpp"
#include "gptkit/distinguish.hpp"
#include "gptkit/error.hpp"
#include "gptkit/frequency.hpp"
#include "gptkit/models.hpp"

namespace gptkit::io {

/// Shortest decimal that round-trips a double: 17 significant digits.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string join(std::span<const double> values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_double(values[i]);
    }
    return out;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline double parse_double(const std::string& token, const std::string& field) {
    double v = 0.0;
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, v);
    // Out of range covers both overflow and gradual underflow; strtod tells them apart.
    if (ec == std::errc::result_out_of_range) v = std::strtod(token.c_str(), nullptr);
    const bool ok = ec == std::errc() || ec == std::errc::result_out_of_range;
    if (!ok || ptr != end || token.empty() || !std::isfinite(v)) {
        throw Error(field + ": malformed number '" + token + "'");
    }
    return v;
}

inline std::uint64_t parse_count(const std::string& token, const std::string& field) {
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos) {
        throw Error(field + ": malformed non-negative integer '" + token + "'");
    }
    try {
        return std::stoull(token);
    } catch (const std::exception&) {
        throw Error(field + ": integer out of range '" + token + "'");
    }
}

inline std::vector<double> parse_doubles(const std::string& line, const std::string& field) {
    std::vector<double> out;
    for (const auto& tok : split(line, ',')) out.push_back(parse_double(tok, field));
    return out;
}

/// Parses "word key=value key=value"; returns the key/value map and checks the word.
inline std::map<std::string, std::string> parse_header(const std::string& line, std::string_view word) {
    std::istringstream in(line);
    std::string first;
    in >> first;
    if (first != word) throw Error("header: expected '" + std::string(word) + "', got '" + first + "'");
    std::map<std::string, std::string> kv;
    std::string tok;
    while (in >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw Error("header: malformed field '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

inline std::string require_key(const std::map<std::string, std::string>& kv, const std::string& key,
                               const std::string& what) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw Error(what + ": missing field '" + key + "'");
    return it->second;
}

inline bool next_content_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        line = trim(line);
        if (!line.empty() && line[0] != '#') return true;
    }
    return false;
}

namespace detail {

inline std::string write_vector(std::string_view word, std::span<const double> values, const std::string& model_id) {
    return std::string(word) + " K=" + std::to_string(values.size()) + " model=" + model_id + "\n" + join(values) + "\n";
}

inline std::pair<std::vector<double>, std::string> read_vector(std::istream& in, std::string_view word) {
    std::string line;
    if (!next_content_line(in, line)) throw Error(std::string(word) + ": missing header line");
    const auto kv = parse_header(line, word);
    const std::string what(word);
    const auto k = parse_count(require_key(kv, "K", what), what + " K");
    const auto model = require_key(kv, "model", what);
    if (!next_content_line(in, line)) throw Error(what + ": missing value line");
    auto values = parse_doubles(line, what + " entries");
    if (values.size() != k) {
        throw Error(what + " entries: header says K=" + std::to_string(k) + " but line has " +
                    std::to_string(values.size()) + " values");
    }
    return {std::move(values), model};
}

}  // namespace detail

/// "state K=<int> model=<id>" followed by the comma-separated entries.
inline std::string write_state(const StateVector& s) {
    return detail::write_vector("state", s.entries(), s.model_id());
}
inline std::string write_effect(const EffectVector& e) {
    return detail::write_vector("effect", e.coeffs(), e.model_id());
}

inline StateVector read_state(std::istream& in) {
    auto [v, id] = detail::read_vector(in, "state");
    return {std::move(v), std::move(id)};
}
inline EffectVector read_effect(std::istream& in) {
    auto [v, id] = detail::read_vector(in, "effect");
    return {std::move(v), std::move(id)};
}
inline StateVector parse_state(const std::string& text) {
    std::istringstream in(text);
    return read_state(in);
}
inline EffectVector parse_effect(const std::string& text) {
    std::istringstream in(text);
    return read_effect(in);
}

/// Every state block in a stream, until end of input.
inline std::vector<StateVector> read_states(std::istream& in) {
    std::vector<StateVector> out;
    std::string header;
    std::string values;
    while (next_content_line(in, header)) {
        if (!next_content_line(in, values)) throw Error("state: missing value line after '" + header + "'");
        std::istringstream block(header + "\n" + values + "\n");
        out.push_back(read_state(block));
    }
    return out;
}

/// Row-major "re,im" pairs, one matrix row per line.
inline std::string write_density(const CMatrix& m) {
    std::string out;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_double(m(r, c).real()) + "," + format_double(m(r, c).imag());
        }
        out += '\n';
    }
    return out;
}

/// Reads a square matrix; the dimension is the number of pairs on the first row.
inline CMatrix read_density(std::istream& in) {
    std::string line;
    if (!next_content_line(in, line)) throw Error("density matrix: empty input");
    std::vector<std::vector<double>> rows{parse_doubles(line, "density matrix row 1")};
    if (rows[0].size() % 2 != 0) throw Error("density matrix row 1: odd number of values (expected re,im pairs)");
    const std::size_t n = rows[0].size() / 2;
    while (rows.size() < n) {
        if (!next_content_line(in, line)) throw Error("density matrix: expected " + std::to_string(n) + " rows");
        rows.push_back(parse_doubles(line, "density matrix row " + std::to_string(rows.size() + 1)));
        if (rows.back().size() != 2 * n) {
            throw Error("density matrix row " + std::to_string(rows.size()) + ": expected " + std::to_string(2 * n) +
                        " values");
        }
    }
    CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex{rows[r][2 * c], rows[r][2 * c + 1]};
        }
    }
    return m;
}

inline CMatrix parse_density(const std::string& text) {
    std::istringstream in(text);
    return read_density(in);
}

/// "model kind=<classical|quantum> N=<int>", or
/// "model kind=composite a=<file> b=<file>" with paths relative to the file.
inline ModelDescriptor read_model_file(const std::filesystem::path& path, int depth = 0) {
    if (depth > 16) throw Error("model file: composite nesting too deep at " + path.string());
    std::ifstream in(path);
    if (!in) throw Error("model file: cannot open " + path.string());
    std::string line;
    if (!next_content_line(in, line)) throw Error("model file: empty " + path.string());
    const auto kv = parse_header(line, "model");
    const auto kind = require_key(kv, "kind", "model file");
    if (kind == "composite") {
        const auto dir = path.parent_path();
        return compose(read_model_file(dir / require_key(kv, "a", "model file"), depth + 1),
                       read_model_file(dir / require_key(kv, "b", "model file"), depth + 1));
    }
    const auto n = static_cast<int>(parse_count(require_key(kv, "N", "model file"), "model file N"));
    if (kind == "classical") return classical_model(n);
    if (kind == "quantum") return quantum_model(n);
    throw Error("model file: unknown kind '" + kind + "'");
}

inline std::string write_model_line(const ModelDescriptor& m) {
    if (m.kind() != ModelKind::classical && m.kind() != ModelKind::quantum) {
        throw Error("model file: only classical and quantum models have a single-line form");
    }
    return std::string("model kind=") + to_string(m.kind()) + " N=" + std::to_string(m.n()) + "\n";
}

inline constexpr std::string_view kTrialHeader = "n,k,q_true,seed";

/// "n,k,q_true,seed".
inline std::string write_trial(const TrialRecord& r) {
    return std::to_string(r.n) + "," + std::to_string(r.k) + "," + format_double(r.q_true) + "," +
           std::to_string(r.seed);
}

inline TrialRecord parse_trial(const std::string& line) {
    const auto f = split(line, ',');
    if (f.size() != 4) throw Error("trial record: expected 4 fields n,k,q_true,seed, got " + std::to_string(f.size()));
    TrialRecord r{parse_count(f[0], "trial record n"), parse_count(f[1], "trial record k"),
                  parse_double(f[2], "trial record q_true"), parse_count(f[3], "trial record seed")};
    if (r.k > r.n) throw Error("trial record k: exceeds n");
    return r;
}

/// CSV of trial records, an optional header row first.
inline std::vector<TrialRecord> read_trials(std::istream& in) {
    std::vector<TrialRecord> out;
    std::string line;
    bool first = true;
    while (next_content_line(in, line)) {
        if (first && line == kTrialHeader) {
            first = false;
            continue;
        }
        first = false;
        out.push_back(parse_trial(line));
    }
    return out;
}

/// Certificate header, then either the measurement (one effect block per
/// outcome) or the failing pair.
inline std::string write_certificate(const DistinguishCertificate& c, const ModelDescriptor& model,
                                     std::size_t state_count) {
    std::string out = std::string("certificate distinguishable=") + (c.distinguishable ? "true" : "false") +
                      " states=" + std::to_string(state_count) + " model=" + model.id() +
                      " tolerance=" + format_double(c.tolerance) +
                      " verification_error=" + format_double(c.verification_error) + "\n";
    if (c.measurement) {
        out += "measurement L=" + std::to_string(c.measurement->outcome_count()) +
               " null_supported=" + (c.measurement->null_supported() ? "true" : "false") + "\n";
        for (const auto& e : c.measurement->effects()) out += write_effect(e);
    }
    if (c.failure_witness) {
        out += "witness i=" + std::to_string(c.failure_witness->i) + " j=" + std::to_string(c.failure_witness->j) +
               " overlap=" + format_double(c.failure_witness->overlap) + "\n";
    }
    return out;
}

inline DistinguishCertificate parse_certificate(const std::string& text, const ModelDescriptor& model) {
    std::istringstream in(text);
    std::string line;
    if (!next_content_line(in, line)) throw Error("certificate: empty input");
    const auto kv = parse_header(line, "certificate");
    const auto model_id = require_key(kv, "model", "certificate");
    gptkit::detail::require_same_model(model.id(), model_id, "certificate");
    DistinguishCertificate c;
    const auto flag = require_key(kv, "distinguishable", "certificate");
    if (flag != "true" && flag != "false") throw Error("certificate distinguishable: expected true or false");
    c.distinguishable = flag == "true";
    c.tolerance = parse_double(require_key(kv, "tolerance", "certificate"), "certificate tolerance");
    c.verification_error =
        parse_double(require_key(kv, "verification_error", "certificate"), "certificate verification_error");
    while (next_content_line(in, line)) {
        if (line.rfind("measurement", 0) == 0) {
            const auto mk = parse_header(line, "measurement");
            const auto l = parse_count(require_key(mk, "L", "measurement"), "measurement L");
            const bool null_supported = require_key(mk, "null_supported", "measurement") == "true";
            std::vector<EffectVector> effects;
            for (std::uint64_t i = 0; i < l; ++i) effects.push_back(read_effect(in));
            c.measurement.emplace(std::move(effects), model.unit_effect(), null_supported);
        } else if (line.rfind("witness", 0) == 0) {
            const auto wk = parse_header(line, "witness");
            c.failure_witness = DistinguishCertificate::Overlap{
                parse_count(require_key(wk, "i", "witness"), "witness i"),
                parse_count(require_key(wk, "j", "witness"), "witness j"),
                parse_double(require_key(wk, "overlap", "witness"), "witness overlap")};
        } else {
            throw Error("certificate: unexpected line '" + line + "'");
        }
    }
    return c;
}

}  // namespace gptkit::io
