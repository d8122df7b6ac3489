#ifndef CQDUAL_SPEC_IO_HPP
#define CQDUAL_SPEC_IO_HPP

// Ensemble specification ingestion (JSON), run manifests, and the CSV/JSON
// table emitters shared by the command-line front-end.

#include "cqdual/ensemble.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace cqdual {

/// Round-trip-exact float formatting: 17 significant digits.
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Parses a self-describing ensemble document. States are nested arrays of
/// [re, im] pairs; the "classical" shorthand gives conditional probability
/// rows realized as diagonal states. Throws std::invalid_argument on any
/// schema or validation failure.
inline CqEnsemble parse_ensemble(const nlohmann::json& j) {
    if (!j.contains("prior") || !j["prior"].is_array())
        throw std::invalid_argument("spec: missing prior array");
    std::vector<double> prior;
    for (const auto& v : j["prior"]) prior.push_back(v.get<double>());
    if (j.contains("alphabet") &&
        j["alphabet"].get<std::size_t>() != prior.size())
        throw std::invalid_argument("spec: alphabet size does not match prior length");
    for (double p : prior)
        if (!(p > 0.0)) throw std::invalid_argument("spec: prior must be strictly positive");

    std::vector<Matrix> states;
    if (j.contains("classical")) {
        const auto& rows = j["classical"];
        if (!rows.is_array() || rows.size() != prior.size())
            throw std::invalid_argument("spec: classical rows must match prior length");
        const std::size_t d = rows[0].size();
        for (const auto& row : rows) {
            if (row.size() != d)
                throw std::invalid_argument("spec: ragged classical rows");
            Matrix m = Matrix::Zero(d, d);
            double sum = 0.0;
            for (std::size_t y = 0; y < d; ++y) {
                const double p = row[y].get<double>();
                if (p < 0.0) throw std::invalid_argument("spec: negative probability");
                m(y, y) = p;
                sum += p;
            }
            if (std::abs(sum - 1.0) > 1e-9)
                throw std::invalid_argument("spec: classical row does not sum to 1");
            states.push_back(m);
        }
    } else if (j.contains("states")) {
        const auto& arr = j["states"];
        if (!arr.is_array() || arr.size() != prior.size())
            throw std::invalid_argument("spec: states must match prior length");
        for (const auto& st : arr) {
            const std::size_t d = st.size();
            Matrix m(d, d);
            for (std::size_t r = 0; r < d; ++r) {
                if (st[r].size() != d) throw std::invalid_argument("spec: non-square state");
                for (std::size_t c = 0; c < d; ++c) {
                    const auto& e = st[r][c];
                    if (!e.is_array() || e.size() != 2)
                        throw std::invalid_argument("spec: entries must be [re, im] pairs");
                    m(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
                }
            }
            states.push_back(m);
        }
    } else {
        throw std::invalid_argument("spec: need either states or classical");
    }
    try {
        return CqEnsemble(prior, states);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("spec: ") + e.what());
    }
}

inline CqEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("spec: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("spec: parse error: ") + e.what());
    }
    return parse_ensemble(j);
}

struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::uint64_t seed = 0;
    std::string version = "0.1.0";
    std::string wall_clock;
};

inline RunManifest make_manifest(const std::string& command, const nlohmann::json& config,
                                 std::uint64_t seed) {
    RunManifest m;
    m.command = command;
    m.config = config;
    m.seed = seed;
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    m.wall_clock = buf;
    return m;
}

inline nlohmann::json manifest_json(const RunManifest& m) {
    return {{"command", m.command},
            {"config", m.config},
            {"seed", m.seed},
            {"version", m.version},
            {"wall_clock", m.wall_clock}};
}

/// Row-oriented result table; cells are preformatted strings so CSV and JSON
/// emit byte-identical numerics.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> cells) { rows.push_back(std::move(cells)); }
};

inline std::string to_csv(const Table& t) {
    std::ostringstream out;
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        out << t.columns[c] << (c + 1 < t.columns.size() ? "," : "\n");
    for (const auto& row : t.rows)
        for (std::size_t c = 0; c < row.size(); ++c)
            out << row[c] << (c + 1 < row.size() ? "," : "\n");
    return out.str();
}

inline nlohmann::json table_json(const Table& t) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json rec;
        for (std::size_t c = 0; c < row.size(); ++c) rec[t.columns[c]] = row[c];
        rows.push_back(rec);
    }
    return rows;
}

} // namespace cqdual

#endif // CQDUAL_SPEC_IO_HPP
