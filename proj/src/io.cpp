#include "hypforge/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hypforge {

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw io_error("cannot open " + tmp.string() + " for writing");
        os << content;
        if (!os) throw io_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string format_double(double x) {
    char buf[40];
    // shortest round-trip: try increasing precision
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        double back = 0;
        std::sscanf(buf, "%lf", &back);
        if (back == x) return buf;
    }
    return buf;
}

void write_profile_csv(const std::filesystem::path& path, const RadialGrid& g,
                       const std::vector<double>& values) {
    if (values.size() != g.n()) throw io_error("write_profile_csv: size mismatch");
    std::ostringstream os;
    os << "rho,value\n";
    for (std::size_t j = 0; j < g.n(); ++j)
        os << format_double(g.rho(j)) << ',' << format_double(values[j]) << '\n';
    atomic_write(path, os.str());
}

std::pair<RadialGrid, std::vector<double>> read_profile_csv(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path.string());
    std::string line;
    std::getline(is, line);
    if (line != "rho,value")
        throw io_error(path.string() + ":1: expected header 'rho,value'");
    std::vector<double> rho, val;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw io_error(path.string() + ":" + std::to_string(lineno) + ": missing comma");
        try {
            rho.push_back(std::stod(line.substr(0, comma)));
            val.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw io_error(path.string() + ":" + std::to_string(lineno) + ": parse error");
        }
    }
    if (rho.size() < 16) throw io_error(path.string() + ": too few rows");
    const double rho_c = rho.back();
    RadialGrid g(rho.size(), rho_c);
    for (std::size_t j = 0; j < g.n(); ++j)
        if (std::fabs(g.rho(j) - rho[j]) > 1e-12 * rho_c)
            throw io_error(path.string() + ":" + std::to_string(j + 2) + ": non-uniform grid");
    return {g, val};
}

nlohmann::json metric_to_json(const RadialMetric& m) {
    nlohmann::json j;
    j["schema"] = "v1";
    j["grid"] = {{"rho_c", m.grid().rho_c()}, {"n", m.grid().n()}};
    j["profiles"] = {{"a", m.a()}, {"b", m.b()}};
    j["closes"] = m.closes_at_center();
    j["chart_singular"] = m.center_chart_singular();
    if (m.has_jets())
        j["jets"] = {{"da", m.da()}, {"d2a", m.d2a()}, {"db", m.db()}, {"d2b", m.d2b()}};
    return j;
}

RadialMetric metric_from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "v1") throw io_error("metric JSON: unknown schema");
    RadialGrid g(j.at("grid").at("n").get<std::size_t>(), j.at("grid").at("rho_c").get<double>());
    RadialMetric m(g, j.at("profiles").at("a").get<std::vector<double>>(),
                   j.at("profiles").at("b").get<std::vector<double>>(),
                   j.at("closes").get<bool>(), j.value("chart_singular", false));
    if (j.contains("jets"))
        m.set_jets(j["jets"].at("da").get<std::vector<double>>(),
                   j["jets"].at("d2a").get<std::vector<double>>(),
                   j["jets"].at("db").get<std::vector<double>>(),
                   j["jets"].at("d2b").get<std::vector<double>>());
    return m;
}

nlohmann::json series_to_json(const PhgSeries& s) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : s.terms()) {
        nlohmann::json e;
        e["s"] = t.s.str();
        e["p"] = t.p;
        if (t.c.exact()) e["c"] = t.c.rat().str();
        else e["c"] = t.c.value();
        terms.push_back(e);
    }
    return {{"schema", "v1"}, {"truncation", s.truncation().str()}, {"terms", terms}};
}

PhgSeries series_from_json(const nlohmann::json& j) {
    std::vector<PhgTerm> terms;
    for (const auto& e : j.at("terms")) {
        PhgTerm t;
        t.s = Rational::from_string(e.at("s").get<std::string>());
        t.p = e.at("p").get<unsigned>();
        if (e.at("c").is_string()) t.c = Coeff(Rational::from_string(e.at("c").get<std::string>()));
        else t.c = Coeff(e.at("c").get<double>());
        terms.push_back(t);
    }
    return PhgSeries(std::move(terms), Rational::from_string(j.at("truncation").get<std::string>()));
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& columns,
                 const std::vector<std::vector<double>>& rows) {
    std::ostringstream os;
    os << "#";
    for (const auto& c : columns) os << ' ' << c;
    os << '\n';
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << format_double(r[i]);
        os << '\n';
    }
    atomic_write(path, os.str());
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace hypforge
