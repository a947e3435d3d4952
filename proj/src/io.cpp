#include "cogarch/io.hpp"

#include "cogarch/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace cogarch {

namespace {

double number(const Json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ValueError(std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

std::vector<double> number_array(const Json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw ValueError(std::string("field '") + key + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j.at(key)) {
        if (!v.is_number()) throw ValueError(std::string("field '") + key + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::string trim(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && s[i] == ' ') ++i;
    s.erase(0, i);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

Json levy_to_json(const LevySpec& levy) {
    if (const auto* cp = std::get_if<CompoundPoissonNormal>(&levy))
        return {{"family", "CompoundPoissonNormal"}, {"lambda", cp->lambda}, {"eta", cp->eta}, {"sig2", cp->sig2}};
    const auto& vg = std::get<VarianceGamma>(levy);
    return {{"family", "VarianceGamma"}, {"lambda", vg.lambda}, {"alpha", vg.alpha}, {"beta", vg.beta},
            {"mu", vg.mu0}};
}

LevySpec levy_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string())
        throw ValueError("levy must be an object with a 'family' string");
    const std::string family = j.at("family").get<std::string>();
    LevySpec out;
    if (family == "CompoundPoissonNormal" || family == "cp" || family == "compound_poisson") {
        CompoundPoissonNormal cp;
        cp.lambda = number(j, "lambda", cp.lambda);
        cp.eta = number(j, "eta", cp.eta);
        cp.sig2 = number(j, "sig2", cp.sig2);
        out = cp;
    } else if (family == "VarianceGamma" || family == "vg" || family == "variance_gamma") {
        VarianceGamma vg;
        vg.lambda = number(j, "lambda", vg.lambda);
        vg.alpha = number(j, "alpha", vg.alpha);
        vg.beta = number(j, "beta", vg.beta);
        vg.mu0 = number(j, "mu", number(j, "mu0", vg.mu0));
        out = vg;
    } else {
        throw ValueError("unknown levy family: " + family);
    }
    validate(out);
    return out;
}

Json spec_to_json(const CogarchSpec& spec) {
    std::vector<double> a(spec.a.data(), spec.a.data() + spec.p);
    std::vector<double> b(spec.b.data(), spec.b.data() + spec.q);
    return {{"p", spec.p}, {"q", spec.q}, {"a", a}, {"b", b}, {"a0", spec.a0}, {"levy", levy_to_json(spec.levy)}};
}

CogarchSpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw ValueError("spec must be a JSON object");
    for (const char* key : {"p", "q", "a0", "levy"})
        if (!j.contains(key)) throw ValueError(std::string("spec is missing '") + key + "'");
    if (!j.at("p").is_number_integer() || !j.at("q").is_number_integer())
        throw ValueError("p and q must be integers");
    return build_spec(j.at("p").get<int>(), j.at("q").get<int>(), number_array(j, "a"), number_array(j, "b"),
                      number(j, "a0", 0.0), levy_from_json(j.at("levy")));
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw ValueError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

double parse_double(std::string_view s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw DataError("not a number: '" + std::string(s) + "'");
    return v;
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns[i];
    throw DataError("missing column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty CSV input");
    t.header = split(line);
    if (t.header.empty() || t.header.front().empty()) throw DataError("CSV header is missing");
    t.columns.assign(t.header.size(), {});
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != t.header.size())
            throw DataError("row " + std::to_string(row) + " has " + std::to_string(fields.size()) +
                            " fields, expected " + std::to_string(t.header.size()));
        for (std::size_t i = 0; i < fields.size(); ++i) t.columns[i].push_back(parse_double(fields[i]));
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    return read_csv(in);
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < table.columns.size(); ++i)
            out << (i ? "," : "") << format_double(table.columns[i][r]);
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    write_csv(out, table);
    if (!out) throw IoError("write failed for " + path.string());
}

void write_trajectory(std::ostream& out, const Trajectory& tr, bool with_increments) {
    CsvTable t;
    t.header = {"time", "G", "V"};
    t.columns = {tr.times, tr.G, tr.V};
    for (Eigen::Index j = 0; j < tr.Y.cols(); ++j) {
        t.header.push_back("Y" + std::to_string(j + 1));
        const Vector col = tr.Y.col(j);
        t.columns.emplace_back(col.data(), col.data() + col.size());
    }
    if (with_increments) {
        t.header.emplace_back("dL");
        std::vector<double> dl{std::numeric_limits<double>::quiet_NaN()};
        dl.insert(dl.end(), tr.dL.begin(), tr.dL.end());
        t.columns.push_back(std::move(dl));
    }
    write_csv(out, t);
}

Series read_series(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    Series s{t.column("time"), t.column("G")};
    if (s.times.size() < 2) throw DataError("need at least two observations");
    for (double v : s.G)
        if (!std::isfinite(v)) throw DataError("G contains missing or non-finite values");
    return s;
}

double check_equally_spaced(const std::vector<double>& times) {
    if (times.size() < 2) throw DataError("need at least two time points");
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DataError("times must be increasing");
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double step = times[i] - times[i - 1];
        if (!(std::abs(step - dt) <= 1e-9 * dt))
            throw DataError("observations are not equally spaced (row " + std::to_string(i + 1) + ")");
    }
    return dt;
}

void write_increments(std::ostream& out, const std::vector<double>& increments) {
    write_csv(out, CsvTable{{"dL"}, {increments}});
}

std::vector<double> read_increments(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    auto v = t.column("dL");
    for (double x : v)
        if (!std::isfinite(x)) throw DataError("increments contain non-finite values");
    return v;
}

}  // namespace cogarch
