#include "fceval/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "fceval/error.hpp"

namespace fceval::io {

namespace {

std::string trim(std::string s) {
    auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

struct Table {
    std::map<std::string, std::size_t> columns;
    std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;  // (line number, fields)
};

Table parse_table(const std::string& text, const std::string& source, const std::vector<std::string>& required) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    Table t;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        for (auto& f : fields) f = trim(f);
        if (!have_header) {
            for (std::size_t i = 0; i < fields.size(); ++i) t.columns[fields[i]] = i;
            for (const auto& r : required) {
                if (!t.columns.count(r))
                    throw ConfigError(source + ": header lacks required column '" + r + "'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != t.columns.size()) {
            throw ValidationError(source + ":" + std::to_string(lineno) + ": expected " +
                                  std::to_string(t.columns.size()) + " fields, got " + std::to_string(fields.size()));
        }
        t.rows.emplace_back(lineno, std::move(fields));
    }
    if (!have_header) throw ConfigError(source + ": missing header row");
    return t;
}

double parse_number(const std::string& s, const std::string& where) {
    if (s.empty()) throw ValidationError(where + ": missing value (missing values are rejected, not imputed)");
    double v = 0.0;
    const char* b = s.data();
    const char* e = s.data() + s.size();
    if (*b == '+') ++b;
    auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || !std::isfinite(v))
        throw ValidationError(where + ": '" + s + "' is not a finite number");
    return v;
}

std::int64_t parse_int(const std::string& s, const std::string& where) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
        throw ValidationError(where + ": '" + s + "' is not an integer");
    return v;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

core::Dataset parse_series_csv(const std::string& text, const std::string& source) {
    const Table t = parse_table(text, source, {"series_id", "timestamp", "value"});
    const auto c_id = t.columns.at("series_id");
    const auto c_ts = t.columns.at("timestamp");
    const auto c_v = t.columns.at("value");
    const auto c_f = t.columns.count("frequency") ? std::optional<std::size_t>(t.columns.at("frequency")) : std::nullopt;

    struct Acc {
        std::vector<std::pair<std::int64_t, double>> points;
        std::optional<int> freq;
    };
    std::vector<std::string> order;
    std::map<std::string, Acc> acc;
    for (const auto& [lineno, f] : t.rows) {
        const std::string where = source + ":" + std::to_string(lineno);
        const std::string& id = f[c_id];
        if (id.empty()) throw ValidationError(where + ": empty series_id");
        if (!acc.count(id)) order.push_back(id);
        auto& a = acc[id];
        a.points.emplace_back(parse_int(f[c_ts], where), parse_number(f[c_v], where));
        if (c_f && !f[*c_f].empty()) {
            const auto freq = static_cast<int>(parse_int(f[*c_f], where));
            if (a.freq && *a.freq != freq) throw ValidationError(where + ": inconsistent frequency for '" + id + "'");
            a.freq = freq;
        }
    }
    if (order.empty()) throw ValidationError(source + ": no data rows");
    std::vector<core::TimeSeries> series;
    for (const auto& id : order) {
        auto& a = acc[id];
        std::stable_sort(a.points.begin(), a.points.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        std::vector<std::int64_t> ts;
        std::vector<double> vs;
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            if (i > 0 && a.points[i].first == a.points[i - 1].first) {
                throw ValidationError(source + ": duplicate timestamp " + std::to_string(a.points[i].first) +
                                      " in series '" + id + "'");
            }
            ts.push_back(a.points[i].first);
            vs.push_back(a.points[i].second);
        }
        try {
            series.emplace_back(id, std::move(ts), std::move(vs), a.freq);
        } catch (const DomainError& e) {
            throw ValidationError(source + ": " + e.what());
        }
    }
    return core::Dataset(std::move(series));
}

core::Dataset read_series_csv(const std::string& path) { return parse_series_csv(read_file(path), path); }

std::vector<core::ForecastRecord> parse_forecast_csv(const std::string& text, const std::string& source) {
    const Table t = parse_table(text, source, {"series_id", "origin", "step", "model", "forecast"});
    const auto c_id = t.columns.at("series_id");
    const auto c_o = t.columns.at("origin");
    const auto c_s = t.columns.at("step");
    const auto c_m = t.columns.at("model");
    const auto c_f = t.columns.at("forecast");
    std::vector<core::ForecastRecord> out;
    out.reserve(t.rows.size());
    for (const auto& [lineno, f] : t.rows) {
        const std::string where = source + ":" + std::to_string(lineno);
        core::ForecastRecord r;
        r.series_id = f[c_id];
        r.origin = parse_int(f[c_o], where);
        const auto step = parse_int(f[c_s], where);
        if (step < 1) throw ValidationError(where + ": step must be >= 1");
        r.step = static_cast<std::size_t>(step);
        r.model = f[c_m];
        if (r.model.empty()) throw ValidationError(where + ": empty model name");
        r.forecast = parse_number(f[c_f], where);
        out.push_back(std::move(r));
    }
    if (out.empty()) throw ValidationError(source + ": no data rows");
    return out;
}

std::vector<core::ForecastRecord> read_forecast_csv(const std::string& path) {
    return parse_forecast_csv(read_file(path), path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out) throw IoError("write to '" + path + "' failed");
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorKind::Io, "SHA-256 digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return os.str();
}

}  // namespace fceval::io
