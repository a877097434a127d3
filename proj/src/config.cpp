#include "hypforge/config.hpp"

#include <fstream>
#include <sstream>

#include "hypforge/io.hpp"

namespace hypforge {

namespace {
std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
} // namespace

Toml Toml::parse(const std::string& text) {
    Toml out;
    std::istringstream is(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("toml:" + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("toml:" + std::to_string(lineno) + ": expected key = value");
        const std::string key = (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (val.empty()) throw config_error("toml:" + std::to_string(lineno) + ": empty value");
        if (val.front() == '"') {
            if (val.size() < 2 || val.back() != '"')
                throw config_error("toml:" + std::to_string(lineno) + ": unterminated string");
            out.kv_[key] = val.substr(1, val.size() - 2);
        } else if (val == "true" || val == "false") {
            out.kv_[key] = (val == "true");
        } else if (val.front() == '[') {
            if (val.back() != ']')
                throw config_error("toml:" + std::to_string(lineno) + ": unterminated array");
            std::string body = trim(val.substr(1, val.size() - 2));
            std::vector<double> nums;
            std::vector<std::string> strs;
            bool string_array = false;
            std::stringstream bs(body);
            std::string item;
            while (std::getline(bs, item, ',')) {
                item = trim(item);
                if (item.empty()) continue;
                if (item.front() == '"') {
                    string_array = true;
                    strs.push_back(item.substr(1, item.size() - 2));
                } else {
                    try { nums.push_back(std::stod(item)); }
                    catch (...) {
                        throw config_error("toml:" + std::to_string(lineno) + ": bad array item '"
                                           + item + "'");
                    }
                }
            }
            if (string_array) out.kv_[key] = strs;
            else out.kv_[key] = nums;
        } else {
            try { out.kv_[key] = std::stod(val); }
            catch (...) {
                throw config_error("toml:" + std::to_string(lineno) + ": bad value '" + val + "'");
            }
        }
    }
    return out;
}

Toml Toml::parse_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw config_error("cannot open config " + path.string());
    std::ostringstream os;
    os << is.rdbuf();
    return parse(os.str());
}

std::string Toml::get_string(const std::string& key, const std::string& dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
    throw config_error("config key '" + key + "' is not a string");
}

double Toml::get_number(const std::string& key, double dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    throw config_error("config key '" + key + "' is not a number");
}

bool Toml::get_bool(const std::string& key, bool dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    if (const auto* b = std::get_if<bool>(&it->second)) return *b;
    throw config_error("config key '" + key + "' is not a boolean");
}

std::vector<double> Toml::get_array(const std::string& key, std::vector<double> dflt) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return dflt;
    if (const auto* a = std::get_if<std::vector<double>>(&it->second)) return *a;
    throw config_error("config key '" + key + "' is not a number array");
}

std::string RunConfig::canonical_toml() const {
    std::ostringstream os;
    os << "schema = \"v1\"\n\n[grid]\nn = " << grid_n << "\n\n[family]\nepsilons = [";
    for (std::size_t i = 0; i < epsilons.size(); ++i)
        os << (i ? ", " : "") << format_double(epsilons[i]);
    os << "]\nglue_fraction = " << format_double(glue_fraction)
       << "\n\n[seed]\nname = \"" << seed_name << "\"\nalpha = " << format_double(seed_alpha)
       << "\nspike_s0 = " << format_double(spike_s0)
       << "\nspike_width = " << format_double(spike_width)
       << "\n\n[solver]\npicard_tol = " << format_double(solver.picard_tol)
       << "\nmax_iter = " << solver.max_iter
       << "\nnewton_tol = " << format_double(solver.newton_tol)
       << "\nmomentum_decay = " << format_double(solver.momentum_decay_exponent)
       << "\n\n[thresholds]\nslope_lo = " << format_double(slope_lo)
       << "\nslope_hi = " << format_double(slope_hi)
       << "\nshear_ratio_max = " << format_double(shear_ratio_max)
       << "\nresidual_max = " << format_double(residual_max)
       << "\n\n[output]\ndir = \"" << out_dir << "\"\n\n[test]\nrng_seed = " << rng_seed << "\n";
    return os.str();
}

RunConfig RunConfig::from_toml(const Toml& t) {
    RunConfig c;
    c.grid_n = std::size_t(t.get_number("grid.n", double(c.grid_n)));
    c.epsilons = t.get_array("family.epsilons", c.epsilons);
    c.glue_fraction = t.get_number("family.glue_fraction", c.glue_fraction);
    c.seed_name = t.get_string("seed.name", c.seed_name);
    c.seed_alpha = t.get_number("seed.alpha", c.seed_alpha);
    c.spike_s0 = t.get_number("seed.spike_s0", c.spike_s0);
    c.spike_width = t.get_number("seed.spike_width", c.spike_width);
    c.solver.picard_tol = t.get_number("solver.picard_tol", c.solver.picard_tol);
    c.solver.max_iter = int(t.get_number("solver.max_iter", c.solver.max_iter));
    c.solver.newton_tol = t.get_number("solver.newton_tol", c.solver.newton_tol);
    c.solver.momentum_decay_exponent =
        t.get_number("solver.momentum_decay", c.solver.momentum_decay_exponent);
    c.slope_lo = t.get_number("thresholds.slope_lo", c.slope_lo);
    c.slope_hi = t.get_number("thresholds.slope_hi", c.slope_hi);
    c.shear_ratio_max = t.get_number("thresholds.shear_ratio_max", c.shear_ratio_max);
    c.residual_max = t.get_number("thresholds.residual_max", c.residual_max);
    c.out_dir = t.get_string("output.dir", c.out_dir);
    c.rng_seed = (unsigned long long)t.get_number("test.rng_seed", double(c.rng_seed));
    for (double e : c.epsilons)
        if (!(e > 0)) throw config_error("config: epsilons must be positive");
    if (!(c.solver.picard_tol > 0) || !(c.solver.newton_tol > 0))
        throw config_error("config: tolerances must be positive");
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    return from_toml(Toml::parse_file(path));
}

} // namespace hypforge
